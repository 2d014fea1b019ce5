import cmath
import math
from fractions import Fraction

import pytest

from neargroup.groups import (
    automorphisms,
    epsilon_exponents,
    frac1,
    gauss_sum,
    jacobi_symbol,
    pairing_for_cyclic,
    pairing_from_parameter,
    parse_group,
    quadratic_form_cyclic,
    quadratic_form_diagonal,
)


def test_parse_group():
    assert parse_group("Z2xZ4").factors == (2, 4)
    assert parse_group("Z2^3").factors == (2, 2, 2)
    assert parse_group("Z_13").order == 13
    with pytest.raises(ValueError):
        parse_group("S3")


@pytest.mark.parametrize("a,b,want", [(2, 7, 1), (3, 7, -1), (2, 9, 1), (5, 21, 1), (2, 21, -1), (7, 21, 0)])
def test_jacobi(a, b, want):
    assert jacobi_symbol(a, b) == want


def test_jacobi_needs_odd_modulus():
    with pytest.raises(ValueError):
        jacobi_symbol(3, 8)


@pytest.mark.parametrize("n,m,want", [
    (3, 1, 1j), (7, 1, 1j), (7, 3, -1j), (5, 1, 1), (5, 2, -1), (9, 1, 1), (11, 2, -1j), (13, 2, -1),
])
def test_classical_gauss_sums(n, m, want):
    assert abs(gauss_sum(quadratic_form_cyclic(n, m), 1) - want) < 1e-12


def test_gauss_sum_product_z3z3():
    G = parse_group("Z3xZ3")
    assert abs(gauss_sum(quadratic_form_diagonal(G, [1, 1]), 1) - (-1)) < 1e-12


def test_pairing_values():
    p = pairing_for_cyclic(3, 1)
    assert abs(p.value((1,), (2,)) - cmath.exp(2j * math.pi * 2 / 3)) < 1e-15
    with pytest.raises(ValueError):
        pairing_for_cyclic(4, 2)


def test_epsilon_refines_pairing():
    for G, m in [("Z3", 1), ("Z4", 1), ("Z6", -1), ("Z2xZ4", 1)]:
        grp = parse_group(G)
        p = pairing_from_parameter(grp, m)
        e = epsilon_exponents(p)
        for g in grp.elements():
            assert e[grp.neg(g)] == e[g]
            for h in grp.elements():
                assert frac1(e[grp.add(g, h)] + p.exponent(g, h) - e[g] - e[h]) == 0


@pytest.mark.parametrize("G,count", [("Z8", 4), ("Z12", 4), ("Z2xZ2", 6), ("Z2xZ4", 8), ("Z3xZ3", 48), ("Z2^3", 168)])
def test_automorphism_counts(G, count):
    assert len(automorphisms(parse_group(G))) == count


def test_frac1():
    assert frac1(Fraction(-1, 3)) == Fraction(2, 3)
