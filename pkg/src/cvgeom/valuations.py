"""Valuations built from volume, polar volume, Euler characteristic and
Orlicz affine surface areas, plus the checks that go with them.

A :class:`Composite` ``(c0, c1, c2, phi)`` stands for
``c0 V_0 + c1 V_n + c2 V_n(.*) + Omega_phi``.  On polytopes the Orlicz term
vanishes, so evaluation stays in exact rationals there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import bodies as bd
from . import polytope as pt
from . import rational as rq
from .errors import (
    InvalidConcFn,
    NotConverging,
    NotUnimodular,
    SingularFittingSystem,
    UnionNotConvex,
    ZeroBaseline,
)
from .quadrature import QuadResult

Number = Fraction | float

# ---------------------------------------------------------------------------
# concave parameter functions

_CONCAVITY_GRID = np.logspace(-12, 12, 97)
_TINY, _HUGE = 1e-300, 1e300


@dataclass(frozen=True, eq=False)
class ConcFn:
    """A finite concave ``phi >= 0`` on ``(0, inf)`` with ``phi(0+) = 0``
    and ``phi(t)/t -> 0``; ``phi(0)`` is set to 0.

    Build with :meth:`power`, :meth:`capped` or :meth:`table`.  Validation
    runs at construction: non-negativity and finiteness plus a slope test on
    a log-spaced grid over ``[1e-12, 1e12]``; the two limits are checked
    numerically at ``1e-300`` and ``1e300``.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    name: str
    params: dict = field(default_factory=dict)
    limit_tol: float = 1e-2

    def __post_init__(self):
        t = _CONCAVITY_GRID
        v = self._raw(t)
        if not np.all(np.isfinite(v)):
            raise InvalidConcFn(f"{self.name}: infinite or NaN values are not supported")
        if np.any(v < 0):
            raise InvalidConcFn(f"{self.name}: negative values")
        slopes = np.diff(v) / np.diff(t)
        scale = np.maximum(np.abs(slopes[:-1]), np.abs(slopes[1:]))
        if np.any(slopes[1:] - slopes[:-1] > 1e-9 * scale + 1e-300):
            raise InvalidConcFn(f"{self.name}: not concave on the validation grid")
        ref = max(1.0, float(self._raw(np.array([1.0]))[0]))
        lo, hi = self._raw(np.array([_TINY, _HUGE]))
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise InvalidConcFn(f"{self.name}: non-finite value at the grid extremes")
        if lo > self.limit_tol * ref:
            raise InvalidConcFn(f"{self.name}: phi(t) does not tend to 0 as t -> 0")
        if hi / _HUGE > self.limit_tol * ref:
            raise InvalidConcFn(f"{self.name}: phi(t)/t does not tend to 0 as t -> inf")

    def _raw(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self.rule(np.asarray(t, dtype=float)), dtype=float)

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.where(arr > 0, self._raw(np.where(arr > 0, arr, 1.0)), 0.0)
        return out if out.ndim else float(out)

    def scaled(self, c: float) -> "ConcFn":
        c = float(c)
        if c < 0:
            raise InvalidConcFn("scale must be non-negative")
        base = self.rule
        return ConcFn(lambda t: c * base(t), f"{c:g}*{self.name}",
                      {"scale": c, "of": self.to_json()})

    # -- constructors ----------------------------------------------------
    @classmethod
    def power(cls, p: float, n: int = 2) -> "ConcFn":
        """``t^(p/(n+p))``; ``p = 1`` gives the classical affine surface area."""
        p = float(p)
        if not (p > 0 and math.isfinite(p)):
            raise InvalidConcFn("power exponent needs p > 0")
        e = p / (n + p)
        return cls(lambda t: np.power(t, e), f"power(p={p:g},n={n})",
                   {"type": "power", "p": p, "n": n})

    @classmethod
    def capped(cls, slope: float, cap: float) -> "ConcFn":
        """``min(slope * t, cap)``."""
        slope, cap = float(slope), float(cap)
        if slope <= 0 or cap <= 0:
            raise InvalidConcFn("capped function needs positive slope and cap")
        return cls(lambda t: np.minimum(slope * t, cap), f"capped({slope:g},{cap:g})",
                   {"type": "capped", "slope": slope, "cap": cap})

    @classmethod
    def table(cls, points: Sequence[Sequence[float]]) -> "ConcFn":
        """Piecewise-linear interpolation through ``points``, anchored at
        ``(0, 0)`` and extended flat beyond the last knot."""
        pts = sorted((float(s), float(v)) for s, v in points)
        if not pts:
            raise InvalidConcFn("empty table")
        if pts[0][0] < 0:
            raise InvalidConcFn("table abscissae must be non-negative")
        if pts[0][0] == 0:
            if pts[0][1] != 0:
                raise InvalidConcFn("table must pass through (0, 0)")
        else:
            pts.insert(0, (0.0, 0.0))
        s = np.array([p[0] for p in pts])
        v = np.array([p[1] for p in pts])
        if np.any(np.diff(s) <= 0):
            raise InvalidConcFn("table abscissae must be distinct")
        if not np.all(np.isfinite(v)):
            raise InvalidConcFn("table values must be finite")
        slopes = np.append(np.diff(v) / np.diff(s), 0.0)
        if np.any(np.diff(slopes) > 1e-12 * np.abs(slopes[:-1]).max(initial=1.0)):
            raise InvalidConcFn("table is not concave with a flat tail")
        return cls(lambda t: np.interp(t, s, v), f"table[{len(pts) - 1}]",
                   {"type": "table", "points": [[a, b] for a, b in pts[1:]]})

    def to_json(self) -> dict:
        return dict(self.params)


def conc_from_json(data: dict | None, n: int = 2) -> ConcFn | None:
    """Parse ``{"type": "power", "p": ..}`` and friends; ``n`` fills in the
    dimension of power functions that omit it."""
    if data is None:
        return None
    kind = data.get("type")
    if kind == "power":
        return ConcFn.power(float(data["p"]), int(data.get("n", n)))
    if kind == "capped":
        return ConcFn.capped(float(data["slope"]), float(data["cap"]))
    if kind == "table":
        return ConcFn.table([(float(rq.as_fraction(a)), float(rq.as_fraction(b)))
                             for a, b in data["points"]])
    raise InvalidConcFn(f"unknown phi type {kind!r}")


# ---------------------------------------------------------------------------
# generic body helpers

def kappa_n(n: int) -> float:
    return bd.ball_volume(n)


def is_polytope(K) -> bool:
    return isinstance(K, (pt.Polytope, bd.PolytopeBody))


def _poly(K) -> pt.Polytope:
    return K.polytope if isinstance(K, bd.PolytopeBody) else K


def volume_of(K) -> Number:
    if is_polytope(K):
        return _poly(K).volume
    return K.volume()


def polar_volume_of(K) -> Number:
    if is_polytope(K):
        return pt.polar(_poly(K)).volume
    return K.polar_volume()


def orlicz_area(K, phi: ConcFn | None) -> QuadResult:
    """``Omega_phi(K)``: 0 on polytopes, closed form on balls and ellipsoids,
    boundary quadrature on planar arc/segment bodies."""
    if phi is None or is_polytope(K):
        return QuadResult(0.0, 0.0, True, 0)
    return K.orlicz_surface_area(phi)


def transform_body(K, A):
    """Image of ``K`` under the linear map ``A``."""
    if isinstance(K, pt.Polytope):
        return pt.apply_linear(K, A)
    return K.transform(A)


def scale_body(K, t):
    if isinstance(K, pt.Polytope):
        return pt.scale(K, t)
    return K.scaled(float(t))


def reflect_body(K, k: int):
    return transform_body(K, pt.reflection(K.dim, k))


# ---------------------------------------------------------------------------
# valuation specs

@dataclass(frozen=True)
class Evaluation:
    value: Number
    exact: bool
    error: float = 0.0
    converged: bool = True


@dataclass(frozen=True, eq=False)
class Composite:
    """``c0 V_0 + c1 V_n + c2 V_n(.*) + Omega_phi`` with rational ``c``'s."""

    c0: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)
    c2: Fraction = Fraction(0)
    phi: ConcFn | None = None

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            object.__setattr__(self, name, rq.as_fraction(getattr(self, name)))

    @property
    def name(self) -> str:
        tail = f", phi={self.phi.name}" if self.phi else ""
        return f"Composite({self.c0}, {self.c1}, {self.c2}{tail})"

    def evaluate_detailed(self, K) -> Evaluation:
        if is_polytope(K):
            P = _poly(K)
            val = self.c0
            if self.c1:
                val += self.c1 * P.volume
            if self.c2:
                val += self.c2 * pt.polar(P).volume
            return Evaluation(val, True)
        total = float(self.c0)
        if self.c1:
            total += float(self.c1) * K.volume()
        if self.c2:
            total += float(self.c2) * K.polar_volume()
        omega = orlicz_area(K, self.phi)
        return Evaluation(total + omega.value, False, omega.error, omega.converged)

    def __call__(self, K) -> Number:
        return self.evaluate_detailed(K).value

    def to_json(self) -> dict:
        return {
            "c0": rq.fraction_str(self.c0),
            "c1": rq.fraction_str(self.c1),
            "c2": rq.fraction_str(self.c2),
            "phi": self.phi.to_json() if self.phi else None,
        }


@dataclass(frozen=True, eq=False)
class Oracle:
    """Black-box valuation; ``fn`` must be pure and safe to call concurrently."""

    fn: Callable[[Any], Number]
    name: str = "oracle"

    def evaluate_detailed(self, K) -> Evaluation:
        v = self.fn(K)
        return Evaluation(v, isinstance(v, (int, Fraction)))

    def __call__(self, K) -> Number:
        return self.fn(K)


Spec = Composite | Oracle


def evaluate(spec: Spec, K) -> Number:
    return spec.evaluate_detailed(K).value


def evaluate_detailed(spec: Spec, K) -> Evaluation:
    return spec.evaluate_detailed(K)


def euler_characteristic() -> Composite:
    return Composite(1, 0, 0)


def volume_spec() -> Composite:
    return Composite(0, 1, 0)


def polar_volume_spec() -> Composite:
    return Composite(0, 0, 1)


def lp_affine_surface_area(p: float, n: int = 2) -> Composite:
    return Composite(0, 0, 0, ConcFn.power(p, n))


def mahler_oracle() -> Oracle:
    """Volume product ``V(K) V(K*)`` (not a valuation; used for Mahler checks)."""
    return Oracle(lambda K: volume_of(K) * polar_volume_of(K), "mahler")


def classical_asa(K) -> float:
    """Classical affine surface area, ``phi(t) = t^(1/(n+1))``."""
    return orlicz_area(K, ConcFn.power(1, K.dim)).value


def spec_from_json(data, n: int = 2) -> Composite:
    if isinstance(data, str):
        data = json.loads(data)
    return Composite(
        rq.as_fraction(data.get("c0", 0)),
        rq.as_fraction(data.get("c1", 0)),
        rq.as_fraction(data.get("c2", 0)),
        conc_from_json(data.get("phi"), n),
    )


def spec_to_json(spec: Composite) -> dict:
    return spec.to_json()


# ---------------------------------------------------------------------------
# structural checks

def even_odd_split(spec: Spec, k: int) -> tuple[Oracle, Oracle]:
    """Parts of ``spec`` that are even and odd under flipping coordinate ``k``."""
    half = Fraction(1, 2)

    def _half(x):
        return x * half if isinstance(x, (int, Fraction)) else 0.5 * x

    def plus(K):
        return _half(spec(K) + spec(reflect_body(K, k)))

    def minus(K):
        return _half(spec(K) - spec(reflect_body(K, k)))

    name = getattr(spec, "name", "mu")
    return Oracle(plus, f"{name}[+{k}]"), Oracle(minus, f"{name}[-{k}]")


def _diff(a: Number, b: Number) -> Number:
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return abs(Fraction(a) - Fraction(b))
    return abs(float(a) - float(b))


def check_valuation_identity(spec: Spec, K, L, union=None, inter=None) -> Number:
    """``|mu(K u L) + mu(K n L) - mu(K) - mu(L)|``.

    For polytopes the union and intersection are computed and the union is
    checked to be convex by exact volume inclusion-exclusion.  Other bodies
    must come with ``union`` and ``inter`` supplied by construction (see
    :func:`disc_cap_pair`).
    """
    if isinstance(K, pt.Polytope) and isinstance(L, pt.Polytope):
        hull = pt.union_hull(K, L)
        meet = pt.intersection(K, L)
        if hull.volume + meet.volume != K.volume + L.volume:
            raise UnionNotConvex("K u L is not convex")
        union = union or hull
        inter = inter or meet
    elif union is None or inter is None:
        raise UnionNotConvex("union and intersection must be supplied for non-polytopes")
    lhs = spec(union)
    rhs = spec(K)
    if isinstance(lhs, (int, Fraction)):
        lhs = lhs + spec(inter)
        rhs = rhs + spec(L)
    else:
        lhs = float(lhs) + float(spec(inter))
        rhs = float(rhs) + float(spec(L))
    return _diff(lhs, rhs)


def disc_cap_pair(a: float, b: float | None = None):
    """``K = B^2 n {x_1 <= a}``, ``L = B^2 n {x_1 >= -b}`` with their union
    (the disc) and intersection (the slab), for ``0 < a, b < 1``."""
    b = a if b is None else b
    K = bd.Piecewise2D.disc_section(-1.0, a)
    L = bd.Piecewise2D.disc_section(-b, 1.0)
    return K, L, bd.Piecewise2D.disc(), bd.Piecewise2D.disc_section(-b, a)


def check_sl_invariance(spec: Spec, K, A) -> Number:
    """``|mu(A K) - mu(K)|`` for ``det A = 1``."""
    if isinstance(A, pt.LinearMap):
        if A.det != 1:
            raise NotUnimodular(f"det = {A.det}")
    else:
        arr = np.asarray(A, dtype=float)
        if abs(np.linalg.det(arr) - 1) > 1e-12:
            raise NotUnimodular(f"det = {np.linalg.det(arr):.15g}")
        if isinstance(K, pt.Polytope):
            A = pt.LinearMap(A)
    return _diff(spec(transform_body(K, A)), spec(K))


@dataclass(frozen=True)
class HomogeneityFit:
    q: float
    residual: float
    t_grid: tuple[float, ...]
    values: tuple[float, ...]


def homogeneity_degree(spec: Spec, K, t_grid: Sequence = (Fraction(1, 2), 1, 2, 4)) -> HomogeneityFit:
    """Least-squares slope of ``log|mu(tK)|`` against ``log t``."""
    if len(t_grid) < 3:
        raise ValueError("need at least three scale factors")
    if spec(K) == 0:
        raise ZeroBaseline("mu(K) = 0; degree is undefined")
    vals = [float(spec(scale_body(K, t))) for t in t_grid]
    if any(v == 0 for v in vals):
        raise ZeroBaseline("mu(tK) vanishes on the grid")
    x = np.log([float(t) for t in t_grid])
    y = np.log(np.abs(vals))
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + icpt))))
    return HomogeneityFit(float(slope), resid, tuple(float(t) for t in t_grid), tuple(vals))


def expected_degree(p: float, n: int) -> float:
    """Degree of ``Omega_p`` on ``R^n``: ``n(n-p)/(n+p)``."""
    return n * (n - p) / (n + p)


# ---------------------------------------------------------------------------
# decomposition

@dataclass(frozen=True)
class DecompositionReport:
    c0: Number
    c1: Number
    c2: Number
    exact: bool
    residuals: tuple[Number, ...]
    phi_samples: tuple[tuple[float, float], ...]
    q_hat: float | None = None
    caveat: str | None = None

    @property
    def coefficients(self) -> tuple[Number, Number, Number]:
        return self.c0, self.c1, self.c2

    def to_json(self) -> dict:
        def enc(x):
            return rq.fraction_str(x) if isinstance(x, (int, Fraction)) else float(x)

        return {
            "c0": enc(self.c0),
            "c1": enc(self.c1),
            "c2": enc(self.c2),
            "exact": self.exact,
            "residuals": [enc(r) for r in self.residuals],
            "phi_samples": [[s, v] for s, v in self.phi_samples],
            "q_hat": self.q_hat,
            "caveat": self.caveat,
        }


def default_triple(n: int) -> tuple[pt.Polytope, pt.Polytope, pt.Polytope]:
    return pt.cube(n), pt.cube(n, 2), pt.cross_polytope(n)


def _check_set(n: int) -> list[pt.Polytope]:
    out = [pt.cross_polytope(n, Fraction(1, 2)), pt.make_Q(n, [1] * n, [2] * n)]
    if n == 2:
        out.append(pt.make_R2(1, 2, 1, 1, 0, 0))
    return out


DEFAULT_S_GRID = (0.25, 1.0, 4.0)


def decompose(
    oracle: Spec,
    n: int = 2,
    triple: Sequence[pt.Polytope] | None = None,
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    estimate_q: bool = False,
) -> DecompositionReport:
    """Recover ``(c0, c1, c2)`` on polytopes and sample ``phi`` from balls.

    Stage one solves ``mu(P) = c0 + c1 V(P) + c2 V(P*)`` on three polytopes,
    exactly when the oracle is rational-valued.  Residuals are reported on a
    few further polytopes.  Stage two inverts the ball formula
    ``Omega_phi(t B^n) = n kappa_n t^n phi(t^(-2n))`` at ``t = s^(-1/(2n))``.
    """
    triple = tuple(triple or default_triple(n))
    rows = [(1, P.volume, pt.polar(P).volume) for P in triple]
    vals = [oracle(P) for P in triple]
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    if rq.det(rq.mat(rows)) == 0:
        raise SingularFittingSystem("polytope triple has dependent (1, V, V*) rows")
    if exact:
        c0, c1, c2 = rq.solve(rq.mat(rows), rq.vec(vals))
    else:
        c0, c1, c2 = (float(c) for c in np.linalg.solve(
            np.array(rows, dtype=float), np.array(vals, dtype=float)))
    residuals = []
    for P in _check_set(n):
        pred = c0 + c1 * P.volume + c2 * pt.polar(P).volume
        residuals.append(_diff(oracle(P), pred))

    k = kappa_n(n)
    samples = []
    for s in s_grid:
        t = float(s) ** (-1.0 / (2 * n))
        ball = bd.Ball(t, n)
        mu = float(oracle(ball))
        rest = mu - float(c0) - float(c1) * k * t**n - float(c2) * k * t ** (-n)
        samples.append((float(s), rest / (n * k * t**n)))

    q_hat = None
    if estimate_q:
        pos = [(s, v) for s, v in samples if v > 0]
        if len(pos) >= 2:
            e = np.polyfit(np.log([s for s, _ in pos]), np.log([v for _, v in pos]), 1)[0]
            q_hat = float(n - 2 * n * e)

    caveat = None
    if not isinstance(oracle, Composite):
        caveat = (
            "black-box oracle: the fit assumes an upper semicontinuous, SL(n)-invariant "
            "valuation; for other oracles the numbers carry no structural meaning"
        )
    return DecompositionReport(c0, c1, c2, exact, tuple(residuals), tuple(samples), q_hat, caveat)


# ---------------------------------------------------------------------------
# upper semicontinuity probe

@dataclass(frozen=True)
class UscReport:
    values: tuple[float, ...]
    gaps: tuple[float, ...]
    limit_value: float
    tail_max: float
    margin: float  # limit_value - tail_max
    bound_holds: bool


def usc_probe(
    spec: Spec,
    sequence: Sequence,
    limit,
    directions=None,
    tol: float = 1e-9,
    slack: float = 2.0,
) -> UscReport:
    """Finite evidence for ``limsup mu(K_k) <= mu(K)``.

    The support gap to ``limit`` must strictly decrease along the sequence.
    The bound is reported as holding when the tail stays below the limit
    value, or when the excess above it shrinks monotonically and at least
    as fast as the support gap (ratio at most ``slack`` times its initial
    value), which is what convergence from above looks like.
    """
    if len(sequence) < 2:
        raise NotConverging("need at least two bodies")
    dirs = pt.fibonacci_directions(720, limit.dim) if directions is None else directions
    gaps = [pt.support_gap(K, limit, dirs) for K in sequence]
    if any(g1 >= g0 for g0, g1 in zip(gaps, gaps[1:])):
        raise NotConverging("support gap is not strictly decreasing")
    values = [float(spec(K)) for K in sequence]
    lim = float(spec(limit))
    tail = values[len(values) // 2:]
    tail_gaps = gaps[len(gaps) // 2:]
    tail_max = max(tail)
    holds = tail_max <= lim + tol
    if not holds:
        excess = [max(v - lim, 0.0) for v in tail]
        monotone = all(b <= a + tol for a, b in zip(excess, excess[1:]))
        ratios = [e / g for e, g in zip(excess, tail_gaps)]
        holds = monotone and all(r <= slack * ratios[0] + tol for r in ratios)
    return UscReport(tuple(values), tuple(gaps), lim, tail_max, lim - tail_max, holds)
