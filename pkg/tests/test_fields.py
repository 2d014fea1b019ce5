import pytest

from neargroup.fields import (
    additive_characters,
    build_field,
    cycle_type,
    field_of_order,
    fixed_points,
    format_cycles,
    parse_cycles,
    prime_power,
    sigma_map,
    verify_sigma_identities,
)


@pytest.mark.parametrize("q,want", [(2, (2, 1)), (9, (3, 2)), (16, (2, 4)), (6, None), (1, None), (27, (3, 3))])
def test_prime_power(q, want):
    assert prime_power(q) == want


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 17])
def test_field_axioms(q):
    F = field_of_order(q)
    for x in F.nonzero():
        assert F.mul(x, F.inv(x)) == 1
        assert F.add(x, F.neg(x)) == 0
        assert F.power(x, q - 1) == 1
    # distributivity on a sample
    xs = list(F.elements())[:6]
    for x in xs:
        for y in xs:
            for z in xs:
                assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))


def test_log_tables_match_slow_multiplication():
    F = build_field(2, 3)
    for x in F.nonzero():
        for y in F.nonzero():
            assert F.mul(x, y) == F._mul_slow(x, y)


def test_gf9_has_four_primitive_elements():
    F = field_of_order(9)
    assert len(F.primitive_elements()) == 4


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_sigma_identities(q):
    rep = verify_sigma_identities(field_of_order(q))
    assert rep.ok


@pytest.mark.parametrize("q,fixed", [(4, 2), (7, 2), (9, 1), (5, 0), (8, 0), (16, 2), (13, 2)])
def test_sigma_fixed_points(q, fixed):
    assert len(fixed_points(field_of_order(q))) == fixed


def test_sigma_cycles_have_length_three():
    F = field_of_order(8)
    assert sorted(cycle_type(sigma_map(F))) == [3, 3]


def test_cycle_text_round_trip():
    perm = parse_cycles("(1 2 3)(4 5 6)")
    assert perm[3] == 1 and perm[6] == 4
    assert parse_cycles(format_cycles(perm, labels=False)) == perm


def test_characters_are_homomorphisms():
    F = field_of_order(9)
    for psi in additive_characters(F)[:3]:
        for x in F.elements():
            for y in F.elements():
                assert abs(psi(F.add(x, y)) - psi(x) * psi(y)) < 1e-12
