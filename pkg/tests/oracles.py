"""Independent reference computations used to freeze expected values.

Nothing here imports the hull, volume or quadrature code under test.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np


def _solve(rows, rhs):
    n = len(rows)
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c] / aug[c][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(aug[i][n] / aug[i][i] for i in range(n))


def brute_facets(points):
    """Facet normals ``a`` with ``<a, p> <= 1`` by enumerating n-subsets."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n = len(pts[0])
    out = set()
    for sub in combinations(pts, n):
        a = _solve(sub, [1] * n)
        if a is None:
            continue
        if all(sum(x * y for x, y in zip(a, p)) <= 1 for p in pts):
            out.add(a)
    return out


def brute_vertices(points):
    """Points not expressible as hull of the rest, via facet incidence rank."""
    facets = brute_facets(points)
    pts = {tuple(Fraction(x) for x in p) for p in points}
    n = len(next(iter(pts)))
    out = set()
    for p in pts:
        tight = [a for a in facets if sum(x * y for x, y in zip(a, p)) == 1]
        if _rank(tight) == n:
            out.add(p)
    return out


def _rank(rows):
    m = [list(r) for r in rows]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            f = m[i][c] / m[r][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def _ccw(vertices):
    vs = list(vertices)
    return sorted(vs, key=lambda v: math.atan2(float(v[1]), float(v[0])))


def shoelace(vertices) -> Fraction:
    """Exact area of a convex polygon containing the origin."""
    vs = _ccw(vertices)
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(vs, vs[1:] + vs[:1]):
        s += x1 * y2 - x2 * y1
    return s / 2


def polygon_first_moment(vertices) -> tuple[Fraction, Fraction]:
    """Exact ``int x dA`` over a convex polygon by Green's theorem."""
    vs = _ccw(vertices)
    mx = my = Fraction(0)
    for (x1, y1), (x2, y2) in zip(vs, vs[1:] + vs[:1]):
        cr = x1 * y2 - x2 * y1
        mx += (x1 + x2) * cr
        my += (y1 + y2) * cr
    return mx / 6, my / 6


def polar_polygon(vertices):
    """Vertices of the polar polygon: the brute-force facet normals."""
    return brute_facets(vertices)


def periodic_trapezoid(f, n: int = 4096) -> float:
    """Trapezoid rule on ``[0, 2 pi)``; spectrally accurate for smooth periodic ``f``."""
    t = 2 * np.pi * np.arange(n) / n
    return float(np.sum(f(t)) * 2 * np.pi / n)


def ellipse_orlicz_trapezoid(S, phi, n: int = 4096) -> float:
    """``int phi(kappa_0) dmu`` for ``S B^2`` from the support-function form
    ``int phi(h^-3 rho) h rho dtheta`` over outer normal angles, with
    ``rho = h + h''`` the radius of curvature."""
    S = np.asarray(S, dtype=float)
    M = S @ S

    def integrand(th):
        u = np.stack([np.cos(th), np.sin(th)], -1)
        h = np.sqrt(np.einsum("ij,jk,ik->i", u, M, u))
        rho = np.linalg.det(M) / h**3
        kappa0 = 1.0 / (rho * h**3)
        return phi(kappa0) * h * rho

    return periodic_trapezoid(integrand, n)
