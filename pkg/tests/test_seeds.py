import numpy as np
import pytest

from neargroup.second_class import full_residual
from neargroup.seeds import (
    decimals,
    j_elements,
    load_table,
    match_row,
    qprime_form,
    read_row,
    reading_with_printed_pairing,
)
from neargroup.groups import gauss_sum, parse_group


def test_table_shape(table):
    assert len(table) == 50
    assert [r.index for r in table] == list(range(50))
    assert table[3].group.name() == "Z3"
    assert table[3].j_text == ["-2.8484536"]


def test_decimals():
    assert decimals("-2.8484536") == 7
    assert decimals("1") == 0


def test_j_elements_two_factor():
    assert j_elements(parse_group("Z3xZ3")) == [(1, 0), (0, 1), (1, 1), (2, 1)]


@pytest.mark.parametrize("i", [0, 3, 4, 8, 9, 10, 17, 29, 31, 46])
def test_literal_rows(table, row_solution, i):
    rd = read_row(table[i])[0]
    assert not rd.changes
    assert full_residual(row_solution(i).instance, row_solution(i).b) < 1e-10


def test_z7_rows_need_flipped_pairing(table):
    rd = read_row(table[15])[0]
    assert rd.pairing_m == -table[15].pairing_m
    assert reading_with_printed_pairing(table[15]).pairing_m == table[15].pairing_m


def test_match_row_self(table, row_solution):
    hit = match_row(row_solution(3), table[3])
    assert hit is not None and hit[1] < 1e-6


def test_match_row_rejects_other_class(table, row_solution):
    assert match_row(row_solution(3), table[4]) is None


def test_qprime_forms(table):
    assert qprime_form(table[3]).group.order == 7
    assert qprime_form(table[8]).group.factors == (3, 3)
    assert qprime_form(table[1]) is None


@pytest.mark.parametrize("i", [0, 3, 4, 8, 9, 10, 15, 16, 29, 30, 31, 36, 37, 38, 39, 46, 47, 48, 49])
def test_gauss_condition(table, i):
    from neargroup.groups import quadratic_form_of_pairing
    rd = reading_with_printed_pairing(table[i])
    Q = quadratic_form_of_pairing(rd.solution().instance.pairing)
    Qp = qprime_form(table[i])
    assert abs(gauss_sum(Q, 1) * gauss_sum(Qp, 1) + 1) < 1e-10
