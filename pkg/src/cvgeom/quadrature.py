"""Adaptive Gauss-Legendre quadrature with panel halving."""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureNoConvergence


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    converged: bool
    panels: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error + other.error,
            self.converged and other.converged,
            self.panels + other.panels,
        )


ZERO = QuadResult(0.0, 0.0, True, 0)


@lru_cache(maxsize=None)
def _rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    order: int = 16,
    max_panels: int = 4000,
    warn: bool = True,
) -> QuadResult:
    """Integrate a vectorized ``f`` over ``[a, b]``.

    Each panel is compared against its two halves; the panel with the largest
    disagreement is split until the summed disagreement drops below
    ``max(rtol * |I|, atol)`` or ``max_panels`` is reached.  On budget
    exhaustion the best estimate is returned with ``converged=False``.
    Panels are summed in order of position, so results are reproducible.
    """
    if a == b:
        return ZERO
    nodes, weights = _rule(order)

    def gl(lo: float, hi: float) -> float:
        half = 0.5 * (hi - lo)
        x = 0.5 * (hi + lo) + half * nodes
        return half * float(weights @ np.asarray(f(x), dtype=float))

    def panel(lo: float, hi: float, coarse: float):
        mid = 0.5 * (lo + hi)
        left, right = gl(lo, mid), gl(mid, hi)
        fine = left + right
        return (-abs(fine - coarse), lo, hi, fine, left, right)

    heap = [panel(a, b, gl(a, b))]
    total_err = -heap[0][0]
    count = 1
    while True:
        estimate = sum(p[3] for p in heap)
        total_err = sum(-p[0] for p in heap)
        if total_err <= max(rtol * abs(estimate), atol):
            converged = True
            break
        if count >= max_panels:
            converged = False
            break
        _, lo, hi, _, left, right = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        heapq.heappush(heap, panel(lo, mid, left))
        heapq.heappush(heap, panel(mid, hi, right))
        count += 1

    value = sum(p[3] for p in sorted(heap, key=lambda p: p[1]))
    if not converged and warn:
        warnings.warn(
            f"quadrature budget of {max_panels} panels exhausted "
            f"(error estimate {total_err:.3g})",
            QuadratureNoConvergence,
            stacklevel=2,
        )
    return QuadResult(value, total_err, converged, count)


def adaptive_gauss_legendre_2d(
    f: Callable[[float, np.ndarray], np.ndarray],
    outer: tuple[float, float],
    inner: tuple[float, float],
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    order: int = 16,
    max_panels: int = 400,
) -> QuadResult:
    """Iterated rule: ``int_outer int_inner f(s, t) dt ds``."""
    flags = {"converged": True, "error": 0.0}

    def outer_integrand(s: np.ndarray) -> np.ndarray:
        out = np.empty_like(s)
        for i, si in enumerate(s):
            r = adaptive_gauss_legendre(
                lambda t: f(si, t), *inner,
                rtol=rtol, atol=atol, order=order, max_panels=max_panels, warn=False,
            )
            flags["converged"] &= r.converged
            flags["error"] = max(flags["error"], r.error)
            out[i] = r.value
        return out

    res = adaptive_gauss_legendre(
        outer_integrand, *outer,
        rtol=rtol, atol=atol, order=order, max_panels=max_panels, warn=False,
    )
    converged = res.converged and flags["converged"]
    span = abs(outer[1] - outer[0])
    if not converged:
        warnings.warn("2-d quadrature did not converge", QuadratureNoConvergence, stacklevel=2)
    return QuadResult(res.value, res.error + span * flags["error"], converged, res.panels)
