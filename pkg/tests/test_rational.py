from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvgeom import rational as rq


def test_float_goes_through_shortest_repr():
    assert rq.as_fraction(0.1) == Fraction(1, 10)
    assert rq.as_fraction("3/6") == Fraction(1, 2)
    assert rq.fraction_str(Fraction(-4, 6)) == "-2/3"
    assert rq.fraction_str(2) == "2/1"


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), True])
def test_rejects_non_scalars(bad):
    with pytest.raises((ValueError, TypeError)):
        rq.as_fraction(bad)


def test_int_rows_use_exact_division():
    assert rq.rank([[1, 2], [2, 4]]) == 1
    assert rq.det([[2, 1, 0, 0], [1, 2, 1, 0], [0, 1, 2, 1], [0, 0, 1, 2]]) == 5


fracs = st.fractions(min_value=-10, max_value=10, max_denominator=20)


@given(st.lists(st.lists(fracs, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(fracs, min_size=3, max_size=3))
def test_solve_and_inverse_agree(m, b):
    m = rq.mat(m)
    if rq.det(m) == 0:
        with pytest.raises(ZeroDivisionError):
            rq.solve(m, b)
        return
    x = rq.solve(m, b)
    assert rq.matvec(m, x) == rq.vec(b)
    assert rq.matmul(m, rq.inverse(m)) == rq.identity(3)


@given(st.lists(st.lists(fracs, min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_is_multiplicative_with_transpose(m):
    m = rq.mat(m)
    assert rq.det(m) == rq.det(rq.transpose(m))
    assert rq.det(rq.matmul(m, m)) == rq.det(m) ** 2
