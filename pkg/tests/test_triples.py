import math

import numpy as np
import pytest

from neargroup.modular import verify_axioms
from neargroup.triples import (
    compare_even_t,
    expected_triples,
    md_second_class,
    predicted_even_t,
    solve_triples,
    triple_residuals,
    triples_from_json,
    triples_to_json,
)


def turns(z):
    return float(np.angle(z) / (2 * math.pi)) % 1


def test_expected_counts():
    assert [expected_triples(n) for n in (1, 2, 3, 5, 7)] == [2, 5, 9, 20, 35]


def test_z3_triples(row_double):
    sol, tr, md = row_double(3)
    assert len(tr) == 9
    for t in tr:
        r = triple_residuals(sol.instance, sol.b, t.omega, t.tau, t.xi)
        assert np.max(np.abs(r)) < 1e-9
        assert np.allclose(np.abs(t.xi), 1)
    at_zero = sorted(round(turns(t.omega) * 7, 6) for t in tr if t.tau == 0)
    assert at_zero == [1, 2, 4]


def test_z3_double_axioms(row_double):
    _, _, md = row_double(3)
    assert md.size == 18
    rep = verify_axioms(md)
    assert rep.ok, rep.summary()


def test_z1_omegas(row_double):
    _, tr, md = row_double(0)
    assert len(tr) == 2
    assert sorted(round(turns(t.omega), 9) for t in tr) == [0.4, 0.6]
    assert verify_axioms(md).ok


def test_wrong_count_rejected(row_double):
    sol, tr, _ = row_double(3)
    with pytest.raises(ValueError):
        md_second_class(sol, tr[:-1])


def test_json_round_trip(row_double):
    _, tr, _ = row_double(0)
    back = triples_from_json(triples_to_json(tr))
    assert [t.tau for t in back] == [t.tau for t in tr]
    assert all(abs(a.omega - b.omega) < 1e-15 for a, b in zip(back, tr))


def test_even_prediction_size():
    # one value per d-label
    for n in (2, 4, 6):
        assert len(predicted_even_t(n, 1, 1, 1)) == expected_triples(n)


def test_even_comparison_z2(row_double):
    _, tr, _ = row_double(1)
    cmp = compare_even_t(tr, 2, 1, -1, -5)
    assert cmp.total == 5
    assert cmp.matched == 4 and not cmp.ok
