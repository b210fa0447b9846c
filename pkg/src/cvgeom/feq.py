"""Executable versions of the functional equations behind the planar
classification: Cauchy additivity, the interval decomposition, the
F-descriptions on axis quadrilaterals and on the wider class of
quadrilaterals with two vertices on the x-axis, and the grid argument that
kills odd antisymmetric kernels.

All computations stay exact whenever the oracle returns rationals.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from . import polytope as pt
from . import rational as rq
from .errors import (
    ClassViolation,
    FitDegenerate,
    InsufficientTriples,
    NotEven,
    PreconditionViolated,
)
from .valuations import even_odd_split

Number = Fraction | float

DEFAULT_ADDITIVE_GRID = tuple(Fraction(j, 4) for j in range(-8, 9))
DEFAULT_LOG_GRID = tuple(Fraction(2) ** i for i in range(-4, 5))
DEFAULT_QUAD_GRID = (Fraction(1, 2), Fraction(1), Fraction(2))


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _sub(a: Number, b: Number) -> Number:
    if _exact(a) and _exact(b):
        return Fraction(a) - Fraction(b)
    return float(a) - float(b)


def _abs_max(values: Iterable[Number]) -> Number:
    vals = [abs(v) for v in values]
    return max(vals) if vals else Fraction(0)


# ---------------------------------------------------------------------------
# grid tables

@dataclass(frozen=True)
class GridFunction1D:
    """Samples ``f(x)`` on a strictly increasing grid."""

    xs: tuple
    values: tuple

    def __post_init__(self):
        xs = tuple(rq.as_fraction(x) for x in self.xs)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", tuple(self.values))
        if len(xs) != len(self.values):
            raise ValueError("grid and values differ in length")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("grid must be strictly increasing")

    @classmethod
    def from_function(cls, f: Callable, xs: Sequence = DEFAULT_ADDITIVE_GRID) -> "GridFunction1D":
        xs = tuple(rq.as_fraction(x) for x in xs)
        return cls(xs, tuple(f(x) for x in xs))

    def as_dict(self) -> dict:
        return dict(zip(self.xs, self.values))

    def __getitem__(self, x) -> Number:
        return self.as_dict()[rq.as_fraction(x)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for x, v in zip(self.xs, self.values):
            w.writerow([rq.fraction_str(x), _cell(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction1D":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0].strip() == "x":
            rows = rows[1:]
        return cls(tuple(r[0] for r in rows), tuple(_parse_cell(r[1]) for r in rows))


@dataclass(frozen=True)
class GridFunction2D:
    """Samples ``G(x, y)`` on the square lattice ``{j h : |j| <= N}^2``."""

    step: Fraction
    size: int
    table: dict = field(repr=False)
    antisymmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "step", rq.as_fraction(self.step))
        if self.step <= 0 or self.size < 1:
            raise ValueError("need a positive step and size")
        idx = range(-self.size, self.size + 1)
        missing = [(i, j) for i in idx for j in idx if (i, j) not in self.table]
        if missing:
            raise ValueError(f"lattice value missing at index {missing[0]}")
        if self.antisymmetric:
            for i, j in product(idx, idx):
                if self.table[i, j] != -self.table[j, i]:
                    raise ValueError(f"not antisymmetric at index {(i, j)}")

    @classmethod
    def from_function(cls, g: Callable, step=Fraction(1, 4), size: int = 8,
                      antisymmetric: bool = False) -> "GridFunction2D":
        """Tabulate ``g(x, y)`` at lattice points ``(i h, j h)``."""
        h = rq.as_fraction(step)
        idx = range(-size, size + 1)
        table = {(i, j): g(i * h, j * h) for i in idx for j in idx}
        return cls(h, size, table, antisymmetric)

    def at(self, i: int, j: int) -> Number:
        """Value at lattice index ``(i, j)``."""
        return self.table[i, j]

    def __call__(self, x, y) -> Number:
        i, j = rq.as_fraction(x) / self.step, rq.as_fraction(y) / self.step
        if i.denominator != 1 or j.denominator != 1:
            raise KeyError(f"({x}, {y}) is not a lattice point")
        return self.table[int(i), int(j)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        for (i, j), v in sorted(self.table.items()):
            w.writerow([rq.fraction_str(i * self.step), rq.fraction_str(j * self.step), _cell(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, antisymmetric: bool = False) -> "GridFunction2D":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0].strip() == "x":
            rows = rows[1:]
        pts = [(rq.as_fraction(r[0]), rq.as_fraction(r[1]), _parse_cell(r[2])) for r in rows]
        coords = sorted({p[0] for p in pts} | {p[1] for p in pts})
        positive = [c for c in coords if c > 0]
        if not positive:
            raise ValueError("lattice needs positive coordinates")
        h = min(positive)
        size = int(max(abs(c) for c in coords) / h)
        table = {}
        for x, y, v in pts:
            i, j = x / h, y / h
            if i.denominator != 1 or j.denominator != 1:
                raise ValueError(f"({x}, {y}) is off the lattice of step {h}")
            table[int(i), int(j)] = v
        return cls(h, size, table, antisymmetric)


def _cell(v) -> str:
    return rq.fraction_str(v) if _exact(v) else repr(float(v))


def _parse_cell(s: str) -> Number:
    s = s.strip()
    if "/" in s or s.lstrip("-").isdigit():
        return Fraction(s)
    return float(s)


# ---------------------------------------------------------------------------
# Cauchy's equation

@dataclass(frozen=True)
class CauchyReport:
    residual: Number
    slope: Number
    triples: int


def cauchy_residual(f: GridFunction1D, min_triples: int = 10) -> CauchyReport:
    """Largest ``|f(x+y) - f(x) - f(y)|`` over grid triples, plus the
    least-squares slope ``sum x f / sum x^2`` of a line through the origin.

    A zero residual on a finite grid is evidence of additivity only;
    pathological solutions cannot be excluded from samples.
    """
    table = f.as_dict()
    xs = f.xs
    res = []
    for i, x in enumerate(xs):
        for y in xs[i:]:
            if x + y in table:
                res.append(_sub(table[x + y], table[x] + table[y]))
    if len(res) < min_triples:
        raise InsufficientTriples(f"only {len(res)} triples (x, y, x+y) on the grid")
    sxx = sum((x * x for x in xs), Fraction(0))
    if sxx == 0:
        raise InsufficientTriples("grid has no non-zero points")
    sxf = sum(x * v for x, v in zip(xs, f.values))
    slope = sxf / sxx if _exact(sxf) else float(sxf) / float(sxx)
    return CauchyReport(_abs_max(res), slope, len(res))


# ---------------------------------------------------------------------------
# intervals

def interval_oracle(spec) -> Callable[[Fraction, Fraction], Number]:
    """``(a, b) -> mu[-a, b]`` for a valuation spec on the line."""
    def mu(a, b):
        return spec(pt.convex_hull([(-rq.as_fraction(a),), (rq.as_fraction(b),)]))
    return mu


def interval_identity_residual(mu: Callable, a, b) -> Number:
    """Residual of the even/odd interval decomposition at ``(a, b)``."""
    half = Fraction(1, 2)
    one = Fraction(1)
    terms = (
        mu(a, a), mu(b, b), mu(one, b), mu(b, one), mu(one, a), mu(a, one)
    )
    lhs = mu(a, b)
    if all(_exact(t) for t in terms) and _exact(lhs):
        rhs = half * (terms[0] + terms[1] + terms[2] - terms[3] - terms[4] + terms[5])
        return lhs - rhs
    t = [float(x) for x in terms]
    return float(lhs) - 0.5 * (t[0] + t[1] + t[2] - t[3] - t[4] + t[5])


def one_dim_decompose_check(mu: Callable, grid: Sequence = (Fraction(1, 2), 1, Fraction(3, 2), 2, 3)) -> Number:
    """Max residual of the interval decomposition over ``grid x grid``.

    ``mu(a, b)`` evaluates the valuation on ``[-a, b]``; wrap specs with
    :func:`interval_oracle`.
    """
    grid = [rq.as_fraction(g) for g in grid]
    return _abs_max(interval_identity_residual(mu, a, b) for a in grid for b in grid)


# ---------------------------------------------------------------------------
# descriptions on quadrilaterals

def quad(a, b, c, d) -> pt.Polytope:
    """``[-a e_1, b e_1, -c e_2, d e_2]``."""
    return pt.make_Q(2, [a, c], [b, d])


@dataclass(frozen=True)
class Q2Description:
    F: GridFunction1D
    residual: Number


def extract_F_on_Q2(
    mu: Callable,
    s_grid: Sequence = DEFAULT_LOG_GRID,
    check_grid: Sequence = DEFAULT_QUAD_GRID,
) -> Q2Description:
    """Tabulate ``F(s) = mu[-s e_1, s e_1, -e_2, e_2] / 4`` and measure how
    well ``F(ac) + F(bc) + F(ad) + F(bd)`` reproduces ``mu`` on the
    quadrilaterals with ``a, b, c, d`` in ``check_grid``."""
    quarter = Fraction(1, 4)
    cache: dict[Fraction, Number] = {}

    def F(s: Fraction) -> Number:
        if s not in cache:
            v = mu(quad(s, s, 1, 1))
            cache[s] = v * quarter if _exact(v) else 0.25 * float(v)
        return cache[s]

    s_grid = tuple(rq.as_fraction(s) for s in s_grid)
    table = GridFunction1D(s_grid, tuple(F(s) for s in s_grid))
    check_grid = [rq.as_fraction(g) for g in check_grid]
    flips = (pt.reflection(2, 0), pt.reflection(2, 1))
    res = []
    for a, b, c, d in product(check_grid, repeat=4):
        P = quad(a, b, c, d)
        val = mu(P)
        for A in flips:
            if _sub(mu(pt.apply_linear(P, A)), val) != 0:
                raise NotEven(f"mu changes under a coordinate reflection at {(a, b, c, d)}")
        pred = F(a * c) + F(b * c) + F(a * d) + F(b * d)
        res.append(_sub(val, pred))
    return Q2Description(table, _abs_max(res))


@dataclass(frozen=True)
class DescriptorFit:
    """Description ``F, k`` on the x-axis quadrilaterals and the fit
    ``F(r) = c1/r + c2 + c3 r``."""

    F: GridFunction1D
    k: Number
    c1: Number
    c2: Number
    c3: Number
    k_residual: Number
    F_residual: Number

    @property
    def consistency(self) -> Number:
        """``c1 + 2k``; zero for a genuine description."""
        return self.c1 + 2 * self.k


def _solve3(rows, rhs):
    if all(_exact(v) for v in rhs):
        try:
            return rq.solve(rq.mat(rows), rq.vec(rhs))
        except ZeroDivisionError:
            raise FitDegenerate("fitting grid gives a singular system") from None
    sol, *_ = np.linalg.lstsq(np.array(rows, dtype=float), np.array(rhs, dtype=float), rcond=None)
    return tuple(float(c) for c in sol)


def fit_R2_descriptor(
    mu: Callable,
    s_grid: Sequence = DEFAULT_LOG_GRID,
    base: tuple = (1, 2, 1, 1),
    shifts: Sequence[tuple] = ((Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(-1, 3), Fraction(1, 2))),
) -> DescriptorFit:
    """Fit ``k`` and ``(c1, c2, c3)`` for ``mu`` on quadrilaterals
    ``[-a e_1, b e_1, c (x,-1), d (y,1)]``.

    ``F`` is tabulated from the axis-aligned case.  ``k`` is read off from
    the change in ``mu`` when ``x + y`` moves away from 0 at the fixed
    ``(a, b, c, d) = base``; further shifts give a residual for the linear
    law.  The three coefficients come from an exact solve at
    ``s = 1/2, 1, 2``, with residual over the rest of ``s_grid``.
    """
    desc = extract_F_on_Q2(mu, s_grid)
    Ftab = desc.F.as_dict()
    a, b, c, d = (rq.as_fraction(v) for v in base)
    coef = b**-2 - a**-2
    if coef == 0:
        raise FitDegenerate("a = b leaves the (x+y) term invisible")

    def F(s):
        s = rq.as_fraction(s)
        if s not in Ftab:
            v = mu(quad(s, s, 1, 1))
            Ftab[s] = v / 4 if _exact(v) else 0.25 * float(v)
        return Ftab[s]

    def excess(x, y):
        try:
            P = pt.make_R2(a, b, c, d, x, y)
        except ClassViolation as exc:
            raise FitDegenerate(f"shift {(x, y)} leaves the admissible class") from exc
        return _sub(mu(P), F(a * c) + F(b * c) + F(a * d) + F(b * d))

    e0 = excess(0, 0)
    ks = []
    for x, y in shifts:
        x, y = rq.as_fraction(x), rq.as_fraction(y)
        if x + y == 0:
            continue
        diff = _sub(excess(x, y), e0)
        ks.append(diff / (coef * (x + y)) if _exact(diff) else float(diff) / float(coef * (x + y)))
    if not ks:
        raise FitDegenerate("no shift with x + y != 0")
    k = ks[0]
    k_res = _abs_max([_sub(kk, k) for kk in ks] + [e0])

    pts = [Fraction(1, 2), Fraction(1), Fraction(2)]
    rows = [(1 / s, 1, s) for s in pts]
    c1, c2, c3 = _solve3(rows, [F(s) for s in pts])
    f_res = _abs_max(_sub(F(s), c1 / s + c2 + c3 * s) for s in desc.F.xs)
    return DescriptorFit(desc.F, k, c1, c2, c3, k_res, max(f_res, desc.residual))


# ---------------------------------------------------------------------------
# odd kernels on the lattice

@dataclass(frozen=True)
class AnnihilationReport:
    """Outcome of the lattice propagation for an odd antisymmetric kernel.

    ``all_forced`` says the recurrences alone force every lattice value to
    zero.  ``recurrence_residual`` and ``shift_residual`` measure how far the
    supplied table is from satisfying the recurrences and the shift
    independence they come from.  ``holds`` requires all three.
    """

    holds: bool
    all_forced: bool
    recurrence_residual: Number
    shift_residual: Number
    first_violation: str | None
    steps: int


def _check_preconditions(G: GridFunction2D) -> None:
    N = G.size
    idx = range(-N, N + 1)
    for i, j in product(idx, idx):
        if G.at(i, j) != -G.at(j, i):
            raise PreconditionViolated(f"G is not antisymmetric at index {(i, j)}")
    for i in idx:
        if G.at(i, 0) != 0 or G.at(0, i) != 0:
            raise PreconditionViolated(f"G does not vanish on the axes at index {i}")
        if G.at(i, -i) != 0:
            raise PreconditionViolated(f"G(x, -x) != 0 at index {i}")


def _recurrence_instances(N: int):
    """Lattice forms of the two recurrences, for unit steps ``x = +-1``.

    Each instance is ``(lhs, [(sign, cell), ...])`` with
    ``G(lhs) = sum sign * G(cell)``; cells are lattice indices.
    """
    out = []
    for x in (1, -1):
        for k in range(1, N + 1):
            for l in range(0, N):
                # G(kx, lx) = G((k-1)x, (l+1)x) - G(-x, (l+1)x) - G((k-1)x, x)
                out.append((
                    ("first", x, k, l),
                    (k * x, l * x),
                    [(1, ((k - 1) * x, (l + 1) * x)), (-1, (-x, (l + 1) * x)), (-1, ((k - 1) * x, x))],
                ))
            for l in range(1, N + 1):
                # G(kx, -lx) = G((k-1)x, -(l-1)x) - G(-x, -(l-1)x) - G((k-1)x, x)
                out.append((
                    ("second", x, k, l),
                    (k * x, -l * x),
                    [(1, ((k - 1) * x, -(l - 1) * x)), (-1, (-x, -(l - 1) * x)), (-1, ((k - 1) * x, x))],
                ))
    return out


def _var(cell: tuple[int, int]) -> tuple[int, tuple[int, int] | None]:
    """Canonical unknown for a cell under antisymmetry: ``(sign, key)``."""
    i, j = cell
    if i == j:
        return 0, None
    return (1, (i, j)) if i < j else (-1, (j, i))


def _propagate(N: int, instances) -> tuple[bool, int]:
    """Close the set of cells forced to vanish.

    Starts from the axes and the anti-diagonal, then treats each recurrence
    instance as a linear relation between canonical unknowns and forces the
    last remaining unknown whenever its net coefficient is non-zero.
    """
    zero: set = set()
    for i in range(-N, N + 1):
        for cell in ((i, 0), (0, i), (i, -i)):
            s, key = _var(cell)
            if key is not None:
                zero.add(key)
    equations = []
    for _, lhs, rhs in instances:
        coeffs: dict = {}
        for sign, cell in [(-1, lhs)] + list(rhs):
            if max(abs(cell[0]), abs(cell[1])) > N:
                break
            s, key = _var(cell)
            if key is not None:
                coeffs[key] = coeffs.get(key, 0) + sign * s
        else:
            equations.append({k: v for k, v in coeffs.items() if v})
    steps = 0
    changed = True
    while changed:
        changed = False
        for eq in equations:
            live = [k for k in eq if k not in zero]
            if len(live) == 1:
                zero.add(live[0])
                steps += 1
                changed = True
    total = {(_var((i, j))[1]) for i in range(-N, N + 1) for j in range(-N, N + 1)} - {None}
    return total <= zero, steps


def odd_grid_annihilation(G: GridFunction2D, shift_block: int | None = None) -> AnnihilationReport:
    """Run the lattice induction for an odd kernel ``G``.

    Preconditions (antisymmetry, vanishing on the axes and on ``y = -x``)
    are checked first.  The recurrences are evaluated at the unit steps
    ``x = +-h``; the shift independence of
    ``G(b+r, d-r) - G(a+r, d-r) - G(b+r, c-r) + G(a+r, c-r)`` is sampled at
    ``r = +-h`` for all ``a, b, c, d`` within ``shift_block`` steps of 0.
    """
    _check_preconditions(G)
    N = G.size
    instances = _recurrence_instances(N)
    first = None
    rec = []
    for tag, lhs, rhs in instances:
        cells = [lhs] + [c for _, c in rhs]
        if any(max(abs(i), abs(j)) > N for i, j in cells):
            continue
        val = G.at(*lhs)
        pred = sum((s * G.at(*c) for s, c in rhs), Fraction(0))
        r = _sub(val, pred)
        rec.append(r)
        if r != 0 and first is None:
            first = f"{tag[0]} recurrence, x={tag[1]:+d}h, k={tag[2]}, l={tag[3]}: residual {r}"

    B = N // 2 if shift_block is None else shift_block
    shift = []
    rng = range(-B, B + 1)
    for a, b, c, d in product(rng, repeat=4):
        def E(r):
            return (G.at(b + r, d - r) - G.at(a + r, d - r)
                    - G.at(b + r, c - r) + G.at(a + r, c - r))
        base = E(0)
        for r in (-1, 1):
            diff = _sub(E(r), base)
            shift.append(diff)
            if diff != 0 and first is None:
                first = f"shift independence fails at a,b,c,d={(a, b, c, d)}, r={r:+d}h"
    forced, steps = _propagate(N, instances)
    rec_res = _abs_max(rec)
    shift_res = _abs_max(shift)
    holds = forced and rec_res == 0 and shift_res == 0
    return AnnihilationReport(holds, forced, rec_res, shift_res, first, steps)


def grid_from_odd_valuation(spec, size: int = 4, base=2) -> GridFunction2D:
    """Kernel ``G(i, j) = mu_-[-e_1, base^i e_1, -e_2, base^j e_2]`` of the
    odd part of ``spec`` under flipping the first coordinate; the lattice
    step stands for ``log(base)``."""
    _, odd = even_odd_split(spec, 0)
    base = rq.as_fraction(base)
    idx = range(-size, size + 1)
    table = {(i, j): odd(quad(1, base**i, 1, base**j)) for i in idx for j in idx}
    return GridFunction2D(Fraction(1), size, table)
