import warnings

import pytest

from neargroup.second_class import refine
from neargroup.seeds import load_table, read_row


@pytest.fixture(scope="session")
def table():
    return load_table()


@pytest.fixture(scope="session")
def row_solution(table):
    """Refined solution for a table row, using its fewest-change reading."""
    cache = {}

    def get(i):
        if i not in cache:
            cache[i] = refine(read_row(table[i])[0].solution())
        return cache[i]
    return get


@pytest.fixture(autouse=True)
def _quiet_incomplete():
    from neargroup.triples import IncompleteTriples
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncompleteTriples)
        yield


@pytest.fixture(scope="session")
def row_double(row_solution):
    """(solution, triples, modular data) for a table row, via the triple solver."""
    from neargroup.triples import md_second_class, solve_triples
    cache = {}

    def get(i):
        if i not in cache:
            sol = row_solution(i)
            tr = solve_triples(sol)
            cache[i] = (sol, tr, md_second_class(sol, tr))
        return cache[i]
    return get
