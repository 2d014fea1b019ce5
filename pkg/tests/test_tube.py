import pytest

from neargroup.tube import alpha_halfbraiding_condition, tube_first_class, tube_second_class


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 7, 8])
def test_first_class_blocks(n):
    t = tube_first_class(n)
    assert t.blocks == n * n + n + 2
    assert t.total_dim == (2 * n + 1) + n * n + 4 * (n * n - n)


def test_exceptional_seven():
    t = tube_first_class(7, -1)
    assert t.blocks == 52
    assert t.block_sizes[7] == 1 and t.block_sizes[2] == 44


def test_not_prime_power():
    with pytest.raises(ValueError):
        tube_first_class(5)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 7, 13])
def test_second_class_blocks(n):
    assert tube_second_class(n).blocks == n * (n + 3)


def test_describe():
    assert tube_second_class(3).describe() == "C^12 + (M_2)^3 + (M_3)^3"


def test_halfbraiding_z3(row_double):
    sol, _, md = row_double(3)
    rep = alpha_halfbraiding_condition(sol, md)
    assert rep.ok, rep.mismatches
