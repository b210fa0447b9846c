"""Small exact linear-algebra helpers over :class:`fractions.Fraction`.

Matrices are tuples of row tuples. Everything here is exact; nothing is
meant to scale beyond the handful of dimensions the geometry kernel uses.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` / decimal strings and floats.

    Floats go through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite scalar {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    # numpy scalars and friends
    if hasattr(value, "item"):
        return as_fraction(value.item())
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


def vec(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(t: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(t * a for a in v)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def matvec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, v) for row in m)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def _eliminate(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int], int]:
    """Row-reduce in place; returns (rows, pivot columns, number of swaps)."""
    pivots: list[int] = []
    swaps = 0
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
            swaps += 1
        pv = rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                f /= pv
                ri, rr = rows[i], rows[r]
                for j in range(c, ncols):
                    ri[j] -= f * rr[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots, swaps


def rank(rows: Iterable[Sequence[Fraction]]) -> int:
    rows = [[Fraction(x) for x in r] for r in rows]
    if not rows:
        return 0
    _, pivots, _ = _eliminate(rows)
    return len(pivots)


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    """Dimension of the affine hull of ``points`` (-1 for no points)."""
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]])


def det(m: Matrix) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        a, b, c = m
        return (
            a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
        )
    rows = [[Fraction(x) for x in r] for r in m]
    rows, pivots, swaps = _eliminate(rows)
    if len(pivots) < n:
        return Fraction(0)
    out = Fraction(-1 if swaps % 2 else 1)
    for i in range(n):
        out *= rows[i][i]
    return out


def solve(m: Matrix, b: Sequence[Fraction]) -> Vector:
    """Solve the square system ``m x = b``; raises ``ZeroDivisionError`` if singular."""
    n = len(m)
    aug = [list(m[i]) + [as_fraction(b[i])] for i in range(n)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        pv = aug[c][c]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c] / pv
                for j in range(c, n + 1):
                    aug[i][j] -= f * aug[c][j]
    return tuple(aug[i][n] / aug[i][i] for i in range(n))


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(m[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def fraction_str(x: Fraction) -> str:
    """Canonical ``"p/q"`` form (always with a denominator)."""
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"
