import numpy as np
import pytest

from neargroup.fields import additive_characters, field_of_order
from neargroup.first_class import canonical_first_class, catalog
from neargroup.groups import parse_group, quadratic_form_cyclic, quadratic_form_diagonal
from neargroup.modular import (
    ModularData,
    aff1_double,
    character_zeta,
    check_zeta,
    fusion_closed_form,
    galois_check,
    match_md,
    md_first_class,
    md_point,
    md_qq,
    simple_currents,
    solve_zeta,
    t_order,
    verify_axioms,
    verlinde,
    zeta_system,
)


@pytest.mark.parametrize("n,m", [(3, 1), (5, 2), (7, 1), (9, 1), (3, -1)])
def test_point_data(n, m):
    rep = verify_axioms(md_point(quadratic_form_cyclic(n, m)))
    assert rep.ok, rep.summary()


def test_broken_s_reported():
    md = md_point(quadratic_form_cyclic(5, 1))
    md.S[1, 2] *= 1.01
    rep = verify_axioms(md)
    assert not rep.ok
    assert "unitary" in rep.failures and "symmetric" in rep.failures


def test_t_order():
    T = np.exp(2j * np.pi * np.array([0, 1 / 6, 1 / 4]))
    assert t_order(T) == 12


def test_verlinde_point_group_law():
    md = md_point(quadratic_form_cyclic(5, 1))
    N = verlinde(md).N
    assert N.shape == (5, 5, 5)
    # g * h contains exactly one simple
    assert np.allclose(np.rint(N).sum(axis=2), 1)


@pytest.mark.parametrize("n,k,np_", [(3, 1, 7), (5, 2, 9), (7, 1, 11), (11, 1, 15), (13, 2, 17)])
def test_qq_axioms_and_fusion(n, k, np_):
    Q = quadratic_form_cyclic(n, k)
    # partner form chosen so the Gauss sums multiply to -1
    for kp in range(1, np_):
        Qp = quadratic_form_cyclic(np_, kp)
        md = md_qq(Q, Qp)
        if md.meta["gauss_ok"]:
            break
    rep = verify_axioms(md)
    assert rep.ok, rep.summary()
    assert md.size == n * (n + 3)
    N = np.rint(verlinde(md).N).astype(int)
    assert np.array_equal(N, fusion_closed_form(Q.group, Qp.group))


def test_qq_z3_z7_dimensions():
    md = md_qq(quadratic_form_cyclic(3, 1), quadratic_form_cyclic(7, 1))
    assert md.size == 18
    d = md.dims()
    delta = (3 + np.sqrt(21)) / 2
    assert np.allclose(sorted(d)[:3], 1)
    assert np.isclose(md.global_dimension(), (3 + delta ** 2) ** 2)


def test_qq_z5_with_z3z3():
    Qp = quadratic_form_diagonal(parse_group("Z3xZ3"), [1, 1])
    md = md_qq(quadratic_form_cyclic(5, 1), Qp)
    assert md.meta["gauss_ok"]
    assert verify_axioms(md).ok


def test_galois_z3_z7():
    Q, Qp = quadratic_form_cyclic(3, 1), quadratic_form_cyclic(7, 1)
    for ell in (2, 4, 5, 8, 10):
        assert galois_check(Q, Qp, ell).ok


def test_simple_currents_z3_z7():
    md = md_qq(quadratic_form_cyclic(3, 1), quadratic_form_cyclic(7, 1))
    rep = simple_currents(md)
    assert rep.ok and len(rep.currents) == 3


def test_match_is_label_independent():
    md = md_qq(quadratic_form_cyclic(3, 1), quadratic_form_cyclic(7, 1))
    rng = np.random.default_rng(1)
    p = [0] + list(rng.permutation(np.arange(1, md.size)))
    shuffled = ModularData([md.labels[i] for i in p], md.S[np.ix_(p, p)], md.T[p])
    pi = match_md(md, shuffled)
    assert pi is not None
    other = md_qq(quadratic_form_cyclic(3, 1), quadratic_form_cyclic(7, -1))
    assert match_md(md, other) is None


def test_json_round_trip():
    md = md_point(quadratic_form_cyclic(7, 1))
    back = ModularData.from_json(md.to_json())
    assert np.allclose(back.S, md.S) and np.allclose(back.T, md.T)
    assert back.labels == md.labels


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_zeta_count(q):
    sol = canonical_first_class(q)
    zs = solve_zeta(sol)
    assert len(zs) == q
    sys_ = zeta_system(sol)
    assert all(check_zeta(sys_, z) < 1e-9 for z in zs)


def test_characters_give_zeta_solutions():
    F = field_of_order(5)
    sys_ = zeta_system(canonical_first_class(5))
    for psi in additive_characters(F)[1:]:
        assert check_zeta(sys_, character_zeta(F, psi)) < 1e-9


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_first_class_matches_affine_double(q):
    md = md_first_class(canonical_first_class(q))
    assert verify_axioms(md).ok
    n = q - 1
    assert md.size == n * n + n + 2
    assert match_md(md, aff1_double(field_of_order(q))) is not None


def test_first_class_classes_distinct_n2():
    mds = [md_first_class(s) for s in catalog(2)]
    for i in range(3):
        assert verify_axioms(mds[i]).ok
        for j in range(i + 1, 3):
            assert match_md(mds[i], mds[j]) is None


def test_exceptional_n7_has_52_labels():
    md = md_first_class(catalog(7)[1])
    assert md.size == 52
    assert verify_axioms(md).ok


def test_printed_rho_reading_fails_for_some_zeta():
    sol = canonical_first_class(4)
    zs = solve_zeta(sol)
    printed = [verify_axioms(md_first_class(sol, z, reading="printed")).ok for z in zs]
    paired = [verify_axioms(md_first_class(sol, z)).ok for z in zs]
    assert all(paired)
    assert not all(printed)
