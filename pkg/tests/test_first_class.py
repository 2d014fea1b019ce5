import pytest

from neargroup.first_class import (
    canonical_first_class,
    catalog,
    count_first_class,
    exceptional_first_class,
    fixed_point_values,
    verify_bprime,
    verify_identities,
    FirstClassSolution,
)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17])
def test_canonical_passes(q):
    rep = verify_identities(canonical_first_class(q))
    assert rep.ok and rep.max_residual == 0


@pytest.mark.parametrize("n,v", [(1, 0), (2, 0), (2, 1), (3, 0), (7, 0)])
def test_exceptional_passes(n, v):
    sol = exceptional_first_class(n, v)
    rep = verify_identities(sol)
    assert rep.ok, rep.failures[:3]
    assert verify_bprime(sol)


def test_exceptional_signs():
    assert exceptional_first_class(1).s == -1
    assert exceptional_first_class(3).s == -1
    assert exceptional_first_class(7).s == -1
    assert exceptional_first_class(2, 0).s == 1


def test_unknown_exceptional():
    with pytest.raises(ValueError):
        exceptional_first_class(4)


def test_corrupted_solution_fails():
    sol = canonical_first_class(8)
    k = next(iter(sol.bpp))
    sol.bpp[k] = 1
    rep = verify_identities(sol)
    assert not rep.ok and rep.max_residual > 0


def test_wrong_s_for_odd_characteristic_fails():
    sol = canonical_first_class(5)
    sol.s = -1
    assert not verify_identities(sol).ok


@pytest.mark.parametrize("n,count", [
    (1, 2), (2, 3), (3, 2), (4, 1), (5, 0), (6, 1), (7, 2), (8, 1), (9, 0), (10, 1), (15, 1), (16, 1),
])
def test_counts(n, count):
    assert count_first_class(n, certify=n <= 8) == count


def test_catalog_canonical_first():
    sols = catalog(7)
    assert sols[0].name.startswith("canonical")
    assert len(sols) == 2


def test_json_round_trip():
    for sol in catalog(7) + catalog(3):
        back = FirstClassSolution.from_json(sol.to_json())
        assert back.a == sol.a and back.b == sol.b and back.bpp == sol.bpp and back.s == sol.s
        assert verify_identities(back).ok


def test_n7_product_with_conjugate_is_trivial_in_a():
    sol = exceptional_first_class(7)
    prod = sol.product(sol.conjugate())
    assert all(v == 0 for v in prod.a.values())
    assert all(v == 0 for v in prod.bpp.values())


def test_fixed_point_values_q4():
    vals = fixed_point_values(canonical_first_class(4))
    assert len(vals) == 2 and set(vals.values()) == {0}


def test_fixed_points_trivial_when_s_is_one():
    # 3 | n: the two roots of x^2 - x + 1 are fixed by sigma
    for n in (3, 6, 12, 15):
        for sol in catalog(n):
            if sol.s == 1:
                assert set(fixed_point_values(sol).values()) <= {0}


def test_fixed_point_sign_for_n3_exceptional():
    # b = s a puts -1 at one fixed point; the identities still hold
    vals = fixed_point_values(exceptional_first_class(3))
    assert sorted(vals.values()) == [0, 3]
    assert verify_identities(exceptional_first_class(3)).ok
