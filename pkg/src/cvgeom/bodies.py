"""Smooth and piecewise-smooth convex bodies with the origin inside.

Supported models: Euclidean balls, ellipsoids ``S B^n`` (``S`` symmetric
positive definite), planar bodies bounded by circular arcs and segments,
and a wrapper around exact polytopes.  Every model exposes volume, polar
volume, support function, boundary points with curvature data, and
cone-measure integrals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import polytope as pt
from .errors import InvalidBody, NonSmoothPoint, ParamOutOfDomain
from .quadrature import ZERO, QuadResult, adaptive_gauss_legendre, adaptive_gauss_legendre_2d

TWO_PI = 2 * math.pi
QUAD_RTOL = 1e-10


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(frozen=True)
class BoundaryPoint:
    """Boundary data; fields may be batched along a leading axis."""

    position: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    support: np.ndarray  # <x, u(K, x)>

    @property
    def dim(self) -> int:
        return np.shape(self.position)[-1]


def kappa_zero(bp: BoundaryPoint, n: int | None = None):
    """Curvature normalized by the cone density: ``kappa / <x,u>^(n+1)``."""
    n = bp.dim if n is None else n
    return np.asarray(bp.curvature) / np.asarray(bp.support) ** (n + 1)


def _const_one(bp: BoundaryPoint) -> np.ndarray:
    return np.ones(np.shape(bp.support))


# ---------------------------------------------------------------------------
# ellipsoids and balls

def _sym_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    return (v * np.sqrt(w)) @ v.T


def _w2(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([c, s], -1), np.stack([-s, c], -1), np.stack([-c, -s], -1)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The body ``S B^n`` for a symmetric positive-definite ``S``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidBody("ellipsoid matrix must be square")
        if not np.allclose(m, m.T, rtol=0, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise InvalidBody("ellipsoid matrix must be symmetric")
        if np.linalg.eigvalsh(m).min() <= 0:
            raise InvalidBody("ellipsoid matrix must be positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_linear_image(cls, A) -> "Ellipsoid":
        """``A B^n`` for any invertible ``A`` (stored via ``sqrt(A A^t)``)."""
        A = np.asarray(A.as_array() if isinstance(A, pt.LinearMap) else A, dtype=float)
        if abs(np.linalg.det(A)) == 0:
            raise InvalidBody("singular linear image")
        return cls(_sym_sqrt(A @ A.T))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def volume(self) -> float:
        return ball_volume(self.dim) * self.det

    def polar_volume(self) -> float:
        return ball_volume(self.dim) / self.det

    def polar(self) -> "Ellipsoid":
        return Ellipsoid(np.linalg.inv(self.matrix))

    def support(self, u) -> float:
        return float(np.linalg.norm(self.matrix @ np.asarray(u, dtype=float)))

    def transform(self, A) -> "Ellipsoid":
        A = np.asarray(A.as_array() if isinstance(A, pt.LinearMap) else A, dtype=float)
        return Ellipsoid.from_linear_image(A @ self.matrix)

    def scaled(self, t: float) -> "Ellipsoid":
        return Ellipsoid(float(t) * self.matrix)

    def _normal_param(self, t) -> np.ndarray:
        u = np.atleast_1d(np.asarray(t, dtype=float))
        if self.dim == 2 and u.shape == (1,):
            if not np.isfinite(u[0]):
                raise ParamOutOfDomain("angle must be finite")
            return np.array([math.cos(u[0]), math.sin(u[0])])
        if u.shape != (self.dim,) or not np.all(np.isfinite(u)):
            raise ParamOutOfDomain(f"expected a unit vector in R^{self.dim}")
        norm = np.linalg.norm(u)
        if abs(norm - 1) > 1e-9:
            raise ParamOutOfDomain("normal parameter must be a unit vector")
        return u / norm

    def boundary_point(self, t) -> BoundaryPoint:
        """Boundary point with outer normal ``t`` (unit vector, or angle in 2-d)."""
        u = self._normal_param(t)
        S = self.matrix
        su = S @ u
        h = float(np.linalg.norm(su))
        x = S @ su / h
        M = np.linalg.inv(S @ S)
        kappa = np.linalg.det(M) / np.linalg.norm(M @ x) ** (self.dim + 1)
        return BoundaryPoint(x, u, np.float64(kappa), np.float64(h))

    # -- quadrature path -------------------------------------------------
    def _points_2d(self, phi: np.ndarray) -> tuple[BoundaryPoint, np.ndarray]:
        S = self.matrix
        w, dw, ddw = _w2(phi)
        x, dx, ddx = w @ S.T, dw @ S.T, ddw @ S.T
        speed = np.linalg.norm(dx, axis=-1)
        cross = dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]
        kappa = np.abs(cross) / speed**3
        u = np.stack([dx[:, 1], -dx[:, 0]], -1) / speed[:, None]
        h = np.einsum("ij,ij->i", x, u)
        return BoundaryPoint(x, u, kappa, h), speed

    def _points_3d(self, theta: float, phi: np.ndarray) -> tuple[BoundaryPoint, np.ndarray]:
        S = self.matrix
        st, ct = math.sin(theta), math.cos(theta)
        cp, sp = np.cos(phi), np.sin(phi)
        one = np.ones_like(phi)
        w = np.stack([st * cp, st * sp, ct * one], -1)
        w_t = np.stack([ct * cp, ct * sp, -st * one], -1)
        w_p = np.stack([-st * sp, st * cp, 0 * one], -1)
        w_tt = -w
        w_tp = np.stack([-ct * sp, ct * cp, 0 * one], -1)
        w_pp = np.stack([-st * cp, -st * sp, 0 * one], -1)
        x, x_t, x_p = w @ S.T, w_t @ S.T, w_p @ S.T
        x_tt, x_tp, x_pp = w_tt @ S.T, w_tp @ S.T, w_pp @ S.T
        N = np.cross(x_t, x_p)
        area = np.linalg.norm(N, axis=-1)
        u = N / area[:, None]
        E = np.einsum("ij,ij->i", x_t, x_t)
        F = np.einsum("ij,ij->i", x_t, x_p)
        G = np.einsum("ij,ij->i", x_p, x_p)
        L = np.einsum("ij,ij->i", x_tt, u)
        M = np.einsum("ij,ij->i", x_tp, u)
        Nn = np.einsum("ij,ij->i", x_pp, u)
        kappa = (L * Nn - M * M) / (E * G - F * F)
        h = np.einsum("ij,ij->i", x, u)
        return BoundaryPoint(x, u, kappa, h), area

    def cone_measure_integral(self, f=None, rtol: float = QUAD_RTOL) -> QuadResult:
        """``int f dmu_K`` from an explicit surface parametrization (n = 2, 3)."""
        f = f or _const_one
        if self.dim == 2:
            def integrand(phi):
                bp, speed = self._points_2d(phi)
                return f(bp) * bp.support * speed
            return adaptive_gauss_legendre(integrand, 0.0, TWO_PI, rtol=rtol)
        if self.dim == 3:
            def integrand2(theta, phi):
                bp, area = self._points_3d(theta, phi)
                return f(bp) * bp.support * area
            return adaptive_gauss_legendre_2d(
                integrand2, (0.0, math.pi), (0.0, TWO_PI), rtol=rtol
            )
        if f is _const_one:
            return QuadResult(self.dim * self.volume(), 0.0, True, 0)
        raise NotImplementedError("boundary quadrature is available for n = 2, 3 only")

    def orlicz_closed_form(self, phi) -> float:
        n, d = self.dim, self.det
        return n * ball_volume(n) * d * float(phi(np.float64(d ** (-2))))

    def orlicz_quadrature(self, phi, rtol: float = QUAD_RTOL) -> QuadResult:
        n = self.dim
        return self.cone_measure_integral(lambda bp: phi(kappa_zero(bp, n)), rtol=rtol)

    def orlicz_surface_area(self, phi) -> QuadResult:
        return QuadResult(self.orlicz_closed_form(phi), 0.0, True, 0)

    def to_json(self) -> dict:
        return {
            "type": "ellipsoid",
            "matrix": [[repr(float(x)) for x in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class Ball:
    """Centered ball of the given radius."""

    radius: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidBody("ball radius must be positive and finite")
        if self.dim < 1:
            raise InvalidBody("dimension must be positive")

    def as_ellipsoid(self) -> Ellipsoid:
        return Ellipsoid(self.radius * np.eye(self.dim))

    def volume(self) -> float:
        return ball_volume(self.dim) * self.radius**self.dim

    def polar_volume(self) -> float:
        return ball_volume(self.dim) * self.radius ** (-self.dim)

    def polar(self) -> "Ball":
        return Ball(1.0 / self.radius, self.dim)

    def support(self, u) -> float:
        return self.radius * float(np.linalg.norm(u))

    def transform(self, A):
        A = np.asarray(A.as_array() if isinstance(A, pt.LinearMap) else A, dtype=float)
        if np.allclose(A @ A.T, np.eye(self.dim), atol=1e-14):
            return self
        return Ellipsoid.from_linear_image(self.radius * A)

    def scaled(self, t: float) -> "Ball":
        return Ball(self.radius * float(t), self.dim)

    def boundary_point(self, t) -> BoundaryPoint:
        u = self.as_ellipsoid()._normal_param(t)
        r, n = self.radius, self.dim
        return BoundaryPoint(r * u, u, np.float64(r ** (-(n - 1))), np.float64(r))

    def cone_measure_integral(self, f=None, rtol: float = QUAD_RTOL) -> QuadResult:
        return self.as_ellipsoid().cone_measure_integral(f, rtol)

    def orlicz_closed_form(self, phi) -> float:
        n, r = self.dim, self.radius
        return n * ball_volume(n) * r**n * float(phi(np.float64(r ** (-2 * n))))

    def orlicz_quadrature(self, phi, rtol: float = QUAD_RTOL) -> QuadResult:
        return self.as_ellipsoid().orlicz_quadrature(phi, rtol)

    def orlicz_surface_area(self, phi) -> QuadResult:
        return QuadResult(self.orlicz_closed_form(phi), 0.0, True, 0)

    def to_json(self) -> dict:
        return {"type": "ball", "dim": self.dim, "radius": repr(float(self.radius))}


def polar_ellipsoid(E):
    """Polar of ``S B^n`` is ``S^{-1} B^n``; balls stay balls."""
    return E.polar()


# ---------------------------------------------------------------------------
# planar arc/segment bodies

def _angle_in(theta: float, start: float, end: float, tol: float = 0.0) -> bool:
    d = (theta - start) % TWO_PI
    return d <= (end - start) + tol or d >= TWO_PI - tol


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise circular arc from angle ``start`` to ``end``."""

    center: tuple[float, float]
    radius: float
    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise InvalidBody("arc radius must be positive")
        if not 0 < self.end - self.start <= TWO_PI + 1e-12:
            raise InvalidBody("arc must sweep an angle in (0, 2*pi] counter-clockwise")

    def point(self, ang) -> np.ndarray:
        c = np.asarray(self.center)
        return c + self.radius * np.stack([np.cos(ang), np.sin(ang)], -1)

    @property
    def first(self) -> np.ndarray:
        return self.point(self.start)

    @property
    def last(self) -> np.ndarray:
        return self.point(self.end)

    def tangent_in(self) -> np.ndarray:
        return np.array([-math.sin(self.start), math.cos(self.start)])

    def tangent_out(self) -> np.ndarray:
        return np.array([-math.sin(self.end), math.cos(self.end)])

    @property
    def turning(self) -> float:
        return self.end - self.start

    def min_support(self) -> float:
        c = np.asarray(self.center)
        cands = [self.start, self.end]
        if np.any(c):
            worst = math.atan2(-c[1], -c[0])
            if _angle_in(worst, self.start, self.end):
                cands.append(worst)
        return min(float(c @ [math.cos(a), math.sin(a)]) + self.radius for a in cands)

    def support(self, u: np.ndarray) -> float:
        ang = math.atan2(u[1], u[0])
        c = np.asarray(self.center)
        if _angle_in(ang, self.start, self.end):
            return float(c @ u) + self.radius * float(np.linalg.norm(u))
        return max(float(self.first @ u), float(self.last @ u))

    def area_term(self) -> float:
        # 1/2 * int (x dy - y dx) along the arc
        cx, cy = self.center
        r, a, b = self.radius, self.start, self.end
        return 0.5 * (
            r * r * (b - a) + r * (cx * (math.sin(b) - math.sin(a)) - cy * (math.cos(b) - math.cos(a)))
        )

    def points(self, s: np.ndarray) -> tuple[BoundaryPoint, float]:
        """Boundary data at arc angles ``s``; second value is ds/dangle."""
        u = np.stack([np.cos(s), np.sin(s)], -1)
        x = np.asarray(self.center) + self.radius * u
        h = u @ np.asarray(self.center) + self.radius
        kappa = np.full(np.shape(s), 1.0 / self.radius)
        return BoundaryPoint(x, u, kappa, h), self.radius

    def mapped(self, A: np.ndarray, flip: bool) -> "Arc":
        # A = scale * orthogonal
        scale = math.sqrt(abs(np.linalg.det(A)))
        c = A @ np.asarray(self.center)
        e0 = A @ np.array([math.cos(self.start), math.sin(self.start)])
        e1 = A @ np.array([math.cos(self.end), math.sin(self.end)])
        a0, a1 = math.atan2(e0[1], e0[0]), math.atan2(e1[1], e1[0])
        if flip:
            a0, a1 = a1, a0
        sweep = self.end - self.start
        return Arc(tuple(c), self.radius * scale, a0, a0 + sweep)

    def to_json(self) -> dict:
        return {
            "kind": "arc",
            "center": [repr(c) for c in self.center],
            "radius": repr(self.radius),
            "from": repr(self.start),
            "to": repr(self.end),
        }


@dataclass(frozen=True)
class Segment:
    start_point: tuple[float, float]
    end_point: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "start_point", tuple(float(c) for c in self.start_point))
        object.__setattr__(self, "end_point", tuple(float(c) for c in self.end_point))
        if self.length == 0:
            raise InvalidBody("segment has zero length")

    @property
    def first(self) -> np.ndarray:
        return np.asarray(self.start_point)

    @property
    def last(self) -> np.ndarray:
        return np.asarray(self.end_point)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.subtract(self.end_point, self.start_point)))

    @property
    def direction(self) -> np.ndarray:
        return (self.last - self.first) / self.length

    def tangent_in(self) -> np.ndarray:
        return self.direction

    tangent_out = tangent_in

    @property
    def normal(self) -> np.ndarray:
        d = self.direction
        return np.array([d[1], -d[0]])

    @property
    def turning(self) -> float:
        return 0.0

    def min_support(self) -> float:
        return float(self.first @ self.normal)

    def support(self, u: np.ndarray) -> float:
        return max(float(self.first @ u), float(self.last @ u))

    def area_term(self) -> float:
        (x1, y1), (x2, y2) = self.start_point, self.end_point
        return 0.5 * (x1 * y2 - x2 * y1)

    def points(self, s: np.ndarray) -> tuple[BoundaryPoint, float]:
        s = np.asarray(s)
        x = self.first + s[:, None] * (self.last - self.first)
        u = np.broadcast_to(self.normal, x.shape)
        h = np.full(s.shape, self.min_support())
        return BoundaryPoint(x, u, np.zeros(s.shape), h), self.length

    def mapped(self, A: np.ndarray, flip: bool) -> "Segment":
        p, q = A @ self.first, A @ self.last
        return Segment(tuple(q), tuple(p)) if flip else Segment(tuple(p), tuple(q))

    def to_json(self) -> dict:
        return {
            "kind": "segment",
            "from": [repr(c) for c in self.start_point],
            "to": [repr(c) for c in self.end_point],
        }


Piece = Arc | Segment


def _turn(t_out: np.ndarray, t_in: np.ndarray) -> float:
    return math.atan2(t_out[0] * t_in[1] - t_out[1] * t_in[0], float(t_out @ t_in))


@dataclass(frozen=True)
class Piecewise2D:
    """Planar convex body bounded by arcs and segments, listed counter-clockwise."""

    pieces: tuple[Piece, ...]
    tol: float = field(default=1e-9, repr=False)

    dim = 2

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise InvalidBody("no boundary pieces")
        total = 0.0
        for i, p in enumerate(pieces):
            q = pieces[(i + 1) % len(pieces)]
            if np.linalg.norm(p.last - q.first) > self.tol:
                raise InvalidBody(f"pieces {i} and {(i + 1) % len(pieces)} do not join")
            turn = _turn(p.tangent_out(), q.tangent_in())
            if turn < -self.tol:
                raise InvalidBody(f"boundary turns clockwise after piece {i}: not convex")
            total += p.turning + max(turn, 0.0)
        if abs(total - TWO_PI) > 1e-7:
            raise InvalidBody(f"total turning {total:.12g} != 2*pi")
        if min(p.min_support() for p in pieces) <= 0:
            raise InvalidBody("origin is not interior")

    # -- constructors ----------------------------------------------------
    @classmethod
    def disc(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "Piecewise2D":
        return cls((Arc(tuple(center), radius, 0.0, TWO_PI),))

    @classmethod
    def disc_section(cls, lo: float = -1.0, hi: float = 1.0) -> "Piecewise2D":
        """Unit disc cut to ``lo <= x_1 <= hi`` with ``-1 <= lo < 0 < hi <= 1``."""
        if not -1 <= lo < 0 < hi <= 1:
            raise InvalidBody("need -1 <= lo < 0 < hi <= 1")
        a = math.acos(hi)
        b = math.acos(lo)
        if lo == -1 and hi == 1:
            return cls.disc()
        if lo == -1:
            return cls((Arc((0, 0), 1.0, a, TWO_PI - a),
                        Segment((hi, -math.sin(a)), (hi, math.sin(a)))))
        if hi == 1:
            return cls((Arc((0, 0), 1.0, -b, b),
                        Segment((lo, math.sin(b)), (lo, -math.sin(b)))))
        return cls((
            Arc((0, 0), 1.0, a, b),
            Segment((lo, math.sin(b)), (lo, -math.sin(b))),
            Arc((0, 0), 1.0, TWO_PI - b, TWO_PI - a),
            Segment((hi, -math.sin(a)), (hi, math.sin(a))),
        ))

    @classmethod
    def from_polygon(cls, P: pt.Polytope) -> "Piecewise2D":
        if P.dim != 2:
            raise InvalidBody("polygon must be planar")
        V = P.vertex_array
        order = np.argsort(np.arctan2(V[:, 1], V[:, 0]))
        V = V[order]
        return cls(tuple(Segment(tuple(V[i]), tuple(V[(i + 1) % len(V)])) for i in range(len(V))))

    # -- functionals -----------------------------------------------------
    def volume(self) -> float:
        return sum(p.area_term() for p in self.pieces)

    def _corners(self):
        for i, p in enumerate(self.pieces):
            q = self.pieces[(i + 1) % len(self.pieces)]
            n_out = np.array([p.tangent_out()[1], -p.tangent_out()[0]])
            n_in = np.array([q.tangent_in()[1], -q.tangent_in()[0]])
            a0 = math.atan2(n_out[1], n_out[0])
            turn = _turn(p.tangent_out(), q.tangent_in())
            if turn > self.tol:
                yield p.last, a0, a0 + turn

    def polar_volume_result(self, rtol: float = QUAD_RTOL) -> QuadResult:
        """Area of the polar body, ``1/2 int h(theta)^-2 dtheta``, split by normal cones."""
        total = ZERO
        for p in self.pieces:
            if isinstance(p, Arc):
                c = np.asarray(p.center)
                r = p.radius

                def g(s, c=c, r=r):
                    return 0.5 / (np.cos(s) * c[0] + np.sin(s) * c[1] + r) ** 2

                total = total + adaptive_gauss_legendre(g, p.start, p.end, rtol=rtol)
        for corner, a0, a1 in self._corners():
            rad = float(np.linalg.norm(corner))
            alpha = math.atan2(corner[1], corner[0])
            val = 0.5 * (math.tan(a1 - alpha) - math.tan(a0 - alpha)) / rad**2
            total = total + QuadResult(val, 0.0, True, 0)
        return total

    def polar_volume(self) -> float:
        return self.polar_volume_result().value

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return max(p.support(u) for p in self.pieces)

    def transform(self, A) -> "Piecewise2D":
        A = np.asarray(A.as_array() if isinstance(A, pt.LinearMap) else A, dtype=float)
        d = np.linalg.det(A)
        s2 = abs(d)
        if not np.allclose(A @ A.T, s2 * np.eye(2), atol=1e-12 * max(1.0, s2)):
            raise InvalidBody("only similarity maps keep arcs circular")
        flip = d < 0
        pieces = [p.mapped(A, flip) for p in self.pieces]
        if flip:
            pieces.reverse()
        return Piecewise2D(tuple(pieces), self.tol)

    def scaled(self, t: float) -> "Piecewise2D":
        return self.transform(float(t) * np.eye(2))

    def boundary_point(self, theta: float) -> BoundaryPoint:
        """Boundary point on the ray from the origin at polar angle ``theta``."""
        theta = float(theta)
        if not math.isfinite(theta):
            raise ParamOutOfDomain("angle must be finite")
        w = np.array([math.cos(theta), math.sin(theta)])
        for i, p in enumerate(self.pieces):
            for end, nbr in ((p.first, self.pieces[i - 1]), (p.last, self.pieces[(i + 1) % len(self.pieces)])):
                ang = math.atan2(end[1], end[0])
                if abs(math.remainder(ang - theta, TWO_PI)) < 1e-12 and not _same_circle(p, nbr):
                    raise NonSmoothPoint(f"angle {theta} hits a joint of the boundary")
        for p in self.pieces:
            if isinstance(p, Segment):
                den = float(w @ p.normal)
                if den <= 0:
                    continue
                x = w * (p.min_support() / den)
                s = float((x - p.first) @ p.direction)
                if -1e-12 <= s <= p.length + 1e-12:
                    return BoundaryPoint(x, p.normal.copy(), np.float64(0.0), np.float64(p.min_support()))
            else:
                c = np.asarray(p.center)
                wc = float(w @ c)
                disc = wc * wc - float(c @ c) + p.radius**2
                if disc < 0:
                    continue
                x = w * (wc + math.sqrt(disc))
                ang = math.atan2(x[1] - c[1], x[0] - c[0])
                if _angle_in(ang, p.start, p.end, 1e-12):
                    u = (x - c) / p.radius
                    return BoundaryPoint(x, u, np.float64(1 / p.radius), np.float64(x @ u))
        raise ParamOutOfDomain(f"no boundary point found at angle {theta}")

    def cone_measure_integral(self, f=None, rtol: float = QUAD_RTOL) -> QuadResult:
        f = f or _const_one
        total = ZERO
        for p in self.pieces:
            if isinstance(p, Arc):
                lo, hi = p.start, p.end
            else:
                lo, hi = 0.0, 1.0

            def integrand(s, p=p):
                bp, jac = p.points(s)
                return f(bp) * bp.support * jac

            total = total + adaptive_gauss_legendre(integrand, lo, hi, rtol=rtol)
        return total

    def orlicz_quadrature(self, phi, rtol: float = QUAD_RTOL) -> QuadResult:
        return self.cone_measure_integral(lambda bp: phi(kappa_zero(bp, 2)), rtol=rtol)

    def orlicz_surface_area(self, phi) -> QuadResult:
        return self.orlicz_quadrature(phi)

    def to_json(self) -> dict:
        return {"type": "piecewise2d", "pieces": [p.to_json() for p in self.pieces]}


def _same_circle(p, q) -> bool:
    return (
        isinstance(p, Arc)
        and isinstance(q, Arc)
        and np.allclose(p.center, q.center)
        and math.isclose(p.radius, q.radius)
    )


# ---------------------------------------------------------------------------
# polytopes as bodies

@dataclass(frozen=True)
class PolytopeBody:
    """Exact polytope viewed as a body; curvature vanishes almost everywhere."""

    polytope: pt.Polytope

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def volume(self):
        return self.polytope.volume

    def polar_volume(self):
        return pt.polar(self.polytope).volume

    def support(self, u) -> float:
        return self.polytope.support(u)

    def transform(self, A) -> "PolytopeBody":
        return PolytopeBody(pt.apply_linear(self.polytope, A))

    def scaled(self, t) -> "PolytopeBody":
        return PolytopeBody(pt.scale(self.polytope, t))

    def cone_mass(self):
        """Exact total cone measure: sum over facets of ``<x_F,u_F> |F|``."""
        P = self.polytope
        total = 0
        for simplex in P.fan_simplices:
            total += abs(pt.rq.det(tuple(P.vertices[i] for i in simplex)))
        return total / math.factorial(P.dim - 1)

    def cone_measure_integral(self, f=None, rtol: float = QUAD_RTOL) -> QuadResult:
        if f is None:
            return QuadResult(float(self.cone_mass()), 0.0, True, 0)
        if self.dim == 2:
            return Piecewise2D.from_polygon(self.polytope).cone_measure_integral(f, rtol)
        # one node per facet: normal, support and curvature are constant on
        # facet interiors, so this is exact for curvature functionals
        P = self.polytope
        total = 0.0
        for a, mass, centroid in self._facet_data():
            norm = float(np.linalg.norm(a))
            bp = BoundaryPoint(centroid, a / norm, np.float64(0.0), np.float64(1.0 / norm))
            total += float(f(bp)) * mass
        return QuadResult(total, 0.0, True, len(P.facets))

    def _facet_data(self):
        """``(normal row, cone mass, centroid)`` per facet."""
        P = self.polytope
        simplices = P.fan_simplices
        out = []
        for a, face in zip(P.facets, P.facet_vertices):
            face = set(face)
            mass = sum(abs(pt.rq.det(tuple(P.vertices[i] for i in s)))
                       for s in simplices if face.issuperset(s))
            centroid = P.vertex_array[sorted(face)].mean(axis=0)
            out.append((np.array([float(x) for x in a]), float(mass) / math.factorial(P.dim - 1), centroid))
        return out

    def orlicz_quadrature(self, phi, rtol: float = QUAD_RTOL) -> QuadResult:
        return self.cone_measure_integral(lambda bp: phi(kappa_zero(bp, self.dim)), rtol)

    def boundary_point(self, t):
        raise NonSmoothPoint("polytope boundaries carry no Gaussian curvature")

    def orlicz_surface_area(self, phi) -> QuadResult:
        return QuadResult(0.0, 0.0, True, 0)


Body = Ball | Ellipsoid | Piecewise2D | PolytopeBody


def boundary_point(K, t) -> BoundaryPoint:
    return K.boundary_point(t)


def cone_measure_integral(K, f: Callable[[BoundaryPoint], np.ndarray] | None = None,
                          rtol: float = QUAD_RTOL) -> QuadResult:
    """``int_{bd K} f dmu_K``; ``f=None`` integrates the constant 1."""
    if isinstance(K, pt.Polytope):
        K = PolytopeBody(K)
    return K.cone_measure_integral(f, rtol)


# ---------------------------------------------------------------------------
# JSON

def _f(x) -> float:
    return float(x)


def body_from_json(data):
    """Parse a body description; a bare ``{"dim", "vertices"}`` is a polytope."""
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("type", "polytope")
    if kind == "polytope":
        return pt.polytope_from_json(data)
    if kind == "ball":
        return Ball(_f(data.get("radius", 1)), int(data.get("dim", 2)))
    if kind == "ellipsoid":
        return Ellipsoid(np.array([[_f(x) for x in row] for row in data["matrix"]]))
    if kind == "piecewise2d":
        pieces = []
        for p in data["pieces"]:
            if p["kind"] == "arc":
                pieces.append(Arc(tuple(_f(c) for c in p["center"]), _f(p["radius"]),
                                  _f(p["from"]), _f(p["to"])))
            elif p["kind"] == "segment":
                pieces.append(Segment(tuple(_f(c) for c in p["from"]),
                                      tuple(_f(c) for c in p["to"])))
            else:
                raise InvalidBody(f"unknown piece kind {p['kind']!r}")
        return Piecewise2D(tuple(pieces))
    raise InvalidBody(f"unknown body type {kind!r}")


def body_to_json(K) -> dict:
    if isinstance(K, pt.Polytope):
        return {"type": "polytope", **pt.polytope_to_json(K)}
    if isinstance(K, PolytopeBody):
        return body_to_json(K.polytope)
    return K.to_json()
