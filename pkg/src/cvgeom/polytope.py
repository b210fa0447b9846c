"""Exact rational polytopes that contain the origin in their interiors.

A :class:`Polytope` carries both representations: its vertices and its facet
normals ``a_i`` with facets ``<a_i, x> <= 1``.  Because the origin is interior,
that normalization always exists, and polarity is a swap of the two lists.

Hulls are computed with an incremental double-description pass over the cone
``{(a, s) : <a, p> <= s for every input point p}``; its extreme rays with
``s > 0`` are the facets.  All predicates are exact.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import rational as rq
from .errors import (
    ClassViolation,
    DegenerateInput,
    EmptyDirections,
    InvalidSplit,
    NoIntersection,
    OriginNotInterior,
    SingularMatrix,
)
from .rational import Matrix, Vector

__all__ = [
    "Polytope",
    "Hyperplane",
    "LinearMap",
    "convex_hull",
    "polar",
    "volume",
    "moment_vector_of_polar",
    "split_by_hyperplane",
    "split_volumes",
    "clip",
    "overlapping_pair",
    "intersection",
    "union_hull",
    "apply_linear",
    "reflection",
    "scale",
    "translate",
    "make_Q",
    "make_R2",
    "make_double_pyramid",
    "prism",
    "cube",
    "cross_polytope",
    "inscribed_ngon",
    "axis_section",
    "support_gap",
    "fibonacci_directions",
    "polytope_to_json",
    "polytope_from_json",
]


class Polytope:
    """Full-dimensional rational polytope with the origin strictly inside.

    Do not call the constructor directly; use :func:`convex_hull` or one of
    the ``make_*`` builders.  Instances are treated as immutable values.
    """

    def __init__(
        self,
        vertices: Sequence[Vector],
        facets: Sequence[Vector],
        incidence: Sequence[Iterable[int]] | None = None,
    ):
        # ``incidence[i]`` lists positions in ``vertices`` lying on facet i;
        # when omitted it is recomputed and both lists are cross-checked.
        vin = [tuple(v) for v in vertices]
        fin = [tuple(a) for a in facets]
        if not vin or not fin:
            raise DegenerateInput("empty representation")
        if len(set(vin)) != len(vin) or len(set(fin)) != len(fin):
            raise ValueError("duplicate vertices or facets")
        vorder = sorted(range(len(vin)), key=vin.__getitem__)
        forder = sorted(range(len(fin)), key=fin.__getitem__)
        vpos = {old: new for new, old in enumerate(vorder)}
        verts = tuple(vin[i] for i in vorder)
        facs = tuple(fin[i] for i in forder)
        n = len(verts[0])
        if incidence is None:
            for a in facs:
                for v in verts:
                    if rq.dot(a, v) > 1:
                        raise ValueError("vertex violates facet inequality")
            inc = tuple(
                frozenset(j for j, v in enumerate(verts) if rq.dot(a, v) == 1)
                for a in facs
            )
        else:
            inc = tuple(frozenset(vpos[j] for j in incidence[i]) for i in forder)
        for face in inc:
            if len(face) < n:
                raise ValueError("facet supported by fewer than n vertices")
        self.dim = n
        self.vertices: tuple[Vector, ...] = verts
        self.facets: tuple[Vector, ...] = facs
        self.facet_vertices: tuple[frozenset[int], ...] = inc

    # -- value semantics -------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polytope)
            and self.dim == other.dim
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.vertices))

    def __repr__(self) -> str:
        return (
            f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, "
            f"facets={len(self.facets)})"
        )

    # -- derived data ----------------------------------------------------
    @cached_property
    def vertex_facets(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in self.vertices]
        for i, inc in enumerate(self.facet_vertices):
            for j in inc:
                out[j].add(i)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def fan_simplices(self) -> tuple[tuple[int, ...], ...]:
        """Origin-fan triangulation: each entry lists ``dim`` vertex indices."""
        memo: dict[frozenset[int], list[tuple[int, ...]]] = {}
        out: list[tuple[int, ...]] = []
        for face in self.facet_vertices:
            out.extend(_triangulate_face(self, face, self.dim - 1, memo))
        return tuple(out)

    @cached_property
    def volume(self) -> Fraction:
        total = Fraction(0)
        for simplex in self.fan_simplices:
            total += abs(rq.det(tuple(self.vertices[i] for i in simplex)))
        return total / math.factorial(self.dim)

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    def support(self, u) -> float:
        """Support function ``h(u) = max <v, u>`` in floating point."""
        return float(np.max(self.vertex_array @ np.asarray(u, dtype=float)))

    def support_exact(self, u: Sequence) -> Fraction:
        u = rq.vec(u)
        return max(rq.dot(v, u) for v in self.vertices)

    def contains(self, x: Sequence) -> bool:
        x = rq.vec(x)
        return all(rq.dot(a, x) <= 1 for a in self.facets)


# ---------------------------------------------------------------------------
# triangulation

def _triangulate_face(
    P: Polytope, face: frozenset[int], k: int, memo: dict
) -> list[tuple[int, ...]]:
    # pulling triangulation from the lexicographically smallest vertex
    if face in memo:
        return memo[face]
    if len(face) == k + 1:
        memo[face] = [tuple(sorted(face))]
        return memo[face]
    v0 = min(face)
    seen: set[frozenset[int]] = set()
    subfaces: list[frozenset[int]] = []
    for F in P.facet_vertices:
        T = face & F
        if T == face or len(T) < k or v0 in T or T in seen:
            continue
        seen.add(T)
        if rq.affine_rank([P.vertices[i] for i in T]) == k - 1:
            subfaces.append(T)
    out: list[tuple[int, ...]] = []
    for T in sorted(subfaces, key=sorted):
        for s in _triangulate_face(P, T, k - 1, memo):
            out.append((v0,) + s)
    memo[face] = out
    return out


# ---------------------------------------------------------------------------
# hull

def _primitive(y: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in y:
        g = math.gcd(g, c)
    return tuple(c // g for c in y)


def _integer_row(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for c in v:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return tuple(int(c * den) for c in v)


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Exact convex hull of ``points``; the origin must be strictly interior.

    Raises :class:`DegenerateInput` for lower-dimensional input and
    :class:`OriginNotInterior` when the origin lies on the boundary or outside.
    """
    pts = sorted(set(rq.vec(p) for p in points))
    if not pts:
        raise DegenerateInput("no points")
    n = len(pts[0])
    if n < 1 or any(len(p) != n for p in pts):
        raise DegenerateInput("points of mixed or zero dimension")

    if n == 1:
        lo, hi = pts[0][0], pts[-1][0]
        if lo == hi:
            raise DegenerateInput("hull is a single point")
        if not lo < 0 < hi:
            raise OriginNotInterior(f"origin not inside [{lo}, {hi}]")
        return Polytope([(lo,), (hi,)], [(1 / lo,), (1 / hi,)], [[0], [1]])

    # constraint rows (p, -1), scaled to integers: positive scaling keeps the cone
    rows = [_integer_row(p + (Fraction(-1),)) for p in pts]
    d = n + 1

    basis: list[int] = []
    for i in range(len(rows)):
        if rq.rank([rows[j] for j in basis] + [rows[i]]) == len(basis) + 1:
            basis.append(i)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise DegenerateInput("points do not span a full-dimensional hull")

    minv = rq.inverse(rq.mat(rows[i] for i in basis))
    rays: list[tuple[tuple[int, ...], frozenset[int]]] = []
    basis_set = frozenset(basis)
    for j, bi in enumerate(basis):
        y = _integer_row([-minv[r][j] for r in range(d)])
        rays.append((_primitive(y), basis_set - {bi}))

    for i in range(len(rows)):
        if i in basis_set:
            continue
        h = rows[i]
        plus, minus, zero = [], [], []
        for y, Z in rays:
            v = sum(a * b for a, b in zip(h, y))
            if v > 0:
                plus.append((y, Z, v))
            elif v < 0:
                minus.append((y, Z, v))
            else:
                zero.append((y, Z | {i}))
        if not plus:
            rays = [(y, Z) for y, Z, _ in minus] + zero
            continue
        all_z = [Z for _, Z in rays]
        new = []
        for yp, Zp, vp in plus:
            for ym, Zm, vm in minus:
                common = Zp & Zm
                if len(common) < d - 2:
                    continue
                # combinatorial adjacency test
                if any(Z is not Zp and Z is not Zm and common <= Z for Z in all_z):
                    continue
                y = [vp * a - vm * b for a, b in zip(ym, yp)]
                new.append((_primitive(y), common | {i}))
        rays = [(y, Z) for y, Z, _ in minus] + zero + new

    facets: list[Vector] = []
    facet_sets: list[frozenset[int]] = []
    for y, Z in rays:
        s = y[n]
        if s <= 0:
            raise OriginNotInterior("origin is on the boundary of or outside the hull")
        facets.append(tuple(Fraction(c, s) for c in y[:n]))
        facet_sets.append(Z)

    point_facets: list[list[int]] = [[] for _ in pts]
    for k, Z in enumerate(facet_sets):
        for i in Z:
            point_facets[i].append(k)
    keep = [
        i
        for i in range(len(pts))
        if len(point_facets[i]) >= n and rq.rank([facets[k] for k in point_facets[i]]) == n
    ]
    index = {i: j for j, i in enumerate(keep)}
    incidence = [[index[i] for i in Z if i in index] for Z in facet_sets]
    return Polytope([pts[i] for i in keep], facets, incidence)


def polar(P: Polytope) -> Polytope:
    """Polar body; vertices and facet normals trade places."""
    return Polytope(P.facets, P.vertices, P.vertex_facets)


def volume(P: Polytope) -> Fraction:
    return P.volume


def moment_vector_of_polar(P: Polytope) -> Vector:
    """Exact ``integral of x dx`` over the polar body of ``P``."""
    Q = polar(P)
    n = Q.dim
    total = [Fraction(0)] * n
    nf = math.factorial(n)
    for simplex in Q.fan_simplices:
        pts = [Q.vertices[i] for i in simplex]
        vol = abs(rq.det(tuple(pts))) / nf
        for k in range(n):
            total[k] += vol * sum(p[k] for p in pts) / (n + 1)
    return tuple(total)


# ---------------------------------------------------------------------------
# linear maps

class LinearMap:
    """Invertible rational ``n x n`` matrix with cached determinant and inverse."""

    def __init__(self, matrix: Iterable[Iterable]):
        m = rq.mat(matrix)
        n = len(m)
        if n == 0 or any(len(r) != n for r in m):
            raise ValueError("matrix must be square and non-empty")
        self.matrix: Matrix = m
        self.det = rq.det(m)
        if self.det == 0:
            raise SingularMatrix("matrix is not invertible")
        self.unimodular = self.det == 1

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @cached_property
    def inverse(self) -> Matrix:
        return rq.inverse(self.matrix)

    @cached_property
    def inverse_transpose(self) -> Matrix:
        return rq.transpose(self.inverse)

    def __call__(self, x: Sequence) -> Vector:
        return rq.matvec(self.matrix, rq.vec(x))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(rq.matmul(self.matrix, other.matrix))

    def __repr__(self) -> str:
        rows = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.matrix)
        return f"LinearMap([{rows}])"

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.matrix])


def _as_map(A) -> LinearMap:
    return A if isinstance(A, LinearMap) else LinearMap(A)


def apply_linear(P: Polytope, A) -> Polytope:
    """Image ``A P``: vertices map by ``A``, facet normals by ``A^{-t}``."""
    A = _as_map(A)
    if A.dim != P.dim:
        raise ValueError("dimension mismatch")
    verts = [A(v) for v in P.vertices]
    facs = [rq.matvec(A.inverse_transpose, a) for a in P.facets]
    return Polytope(verts, facs, P.facet_vertices)


def reflection(n: int, k: int) -> LinearMap:
    """Reflection flipping coordinate ``k`` (0-based)."""
    return LinearMap(
        [[(-1 if i == k else 1) if i == j else 0 for j in range(n)] for i in range(n)]
    )


def scale(P: Polytope, t) -> Polytope:
    t = rq.as_fraction(t)
    if t <= 0:
        raise ValueError("scale factor must be positive")
    return Polytope(
        [rq.scale(t, v) for v in P.vertices],
        [rq.scale(1 / t, a) for a in P.facets],
        P.facet_vertices,
    )


def translate(P: Polytope, shift: Sequence) -> Polytope:
    """``P + shift``; the translated body must still contain the origin."""
    s = rq.vec(shift)
    return convex_hull(rq.add(v, s) for v in P.vertices)


# ---------------------------------------------------------------------------
# cuts and set operations

class Hyperplane:
    """The hyperplane ``{x : <normal, x> = offset}``."""

    def __init__(self, normal: Sequence, offset=0):
        self.normal = rq.vec(normal)
        self.offset = rq.as_fraction(offset)
        if all(c == 0 for c in self.normal):
            raise ValueError("hyperplane normal must be non-zero")

    def __repr__(self) -> str:
        return f"Hyperplane(normal={[str(c) for c in self.normal]}, offset={self.offset})"


def clip(P: Polytope, normal: Sequence, offset) -> Polytope:
    """``P`` intersected with ``{<normal, x> <= offset}``, ``offset > 0``."""
    offset = rq.as_fraction(offset)
    if offset <= 0:
        raise InvalidSplit("the clipped piece would not contain the origin in its interior")
    w = rq.scale(1 / offset, rq.vec(normal))
    return polar(convex_hull(list(P.facets) + [w]))


def _value_range(P: Polytope, normal: Vector) -> tuple[Fraction, Fraction]:
    vals = [rq.dot(normal, v) for v in P.vertices]
    return min(vals), max(vals)


def split_by_hyperplane(P: Polytope, H: Hyperplane) -> tuple[Polytope, Polytope]:
    """Return ``(P & H-, P & H+)``.

    Both pieces must themselves contain the origin in their interiors, which
    a single hyperplane can never grant to both sides; in practice this
    validates a cut and raises :class:`InvalidSplit`.  Use
    :func:`overlapping_pair` for the two-offset construction and
    :func:`split_volumes` for the volumes of a genuine split.
    """
    lo, hi = _value_range(P, H.normal)
    if not lo < H.offset < hi:
        raise NoIntersection("hyperplane misses the interior of P")
    if H.offset <= 0:
        raise InvalidSplit("origin is not interior to P & H-")
    # offset > 0: the origin lies strictly inside H-, never inside H+
    raise InvalidSplit("origin is not interior to P & H+")


def overlapping_pair(P: Polytope, normal: Sequence, lo, hi) -> tuple[Polytope, Polytope]:
    """``(P & {<w,x> <= hi}, P & {<w,x> >= lo})`` for ``lo < 0 < hi``.

    The pieces cover ``P`` and overlap in the slab between the two offsets,
    so all four of ``K, L, K | L, K & L`` stay in the class.
    """
    w = rq.vec(normal)
    lo, hi = rq.as_fraction(lo), rq.as_fraction(hi)
    if not lo < 0 < hi:
        raise InvalidSplit("need lo < 0 < hi")
    vmin, vmax = _value_range(P, w)
    if not (vmin < lo and hi < vmax):
        raise NoIntersection("offsets must both cut the interior of P")
    return clip(P, w, hi), clip(P, rq.scale(-1, w), -lo)


def split_volumes(P: Polytope, H: Hyperplane) -> tuple[Fraction, Fraction]:
    """Exact volumes of ``P & H-`` and ``P & H+``.

    The piece that misses the origin is re-centred at an interior point
    before clipping; volume is translation invariant so nothing is lost.
    """
    w, o = H.normal, H.offset
    lo, hi = _value_range(P, w)
    if not lo < o < hi:
        raise NoIntersection("hyperplane misses the interior of P")

    def piece(normal: Vector, offset: Fraction) -> Fraction:
        # volume of P & {<normal, x> <= offset}
        if offset > 0:
            return clip(P, normal, offset).volume
        centroid = rq.scale(Fraction(1, len(P.vertices)), _sum(P.vertices))
        vmin = min(P.vertices, key=lambda v: rq.dot(normal, v))
        gc, gv = rq.dot(normal, centroid), rq.dot(normal, vmin)
        target = (gv + min(offset, gc)) / 2
        # point on the segment centroid -> vmin where <normal, .> == target
        lam = (gc - target) / (gc - gv)
        c = rq.add(centroid, rq.scale(lam, rq.sub(vmin, centroid)))
        shifted = translate(P, rq.scale(-1, c))
        return clip(shifted, normal, offset - rq.dot(normal, c)).volume

    return piece(w, o), piece(rq.scale(-1, w), -o)


def _sum(vectors: Sequence[Vector]) -> Vector:
    out = [Fraction(0)] * len(vectors[0])
    for v in vectors:
        for i, c in enumerate(v):
            out[i] += c
    return tuple(out)


def intersection(K: Polytope, L: Polytope) -> Polytope:
    """``K & L`` computed as the polar of ``conv(K* | L*)``."""
    return polar(convex_hull(list(K.facets) + list(L.facets)))


def union_hull(K: Polytope, L: Polytope) -> Polytope:
    return convex_hull(list(K.vertices) + list(L.vertices))


# ---------------------------------------------------------------------------
# builders

def cube(n: int, r=1) -> Polytope:
    r = rq.as_fraction(r)
    pts = [tuple(r if (mask >> i) & 1 else -r for i in range(n)) for mask in range(2**n)]
    facets = []
    for i in range(n):
        for s in (1, -1):
            facets.append(tuple(Fraction(s) / r if j == i else Fraction(0) for j in range(n)))
    return Polytope(pts, facets)


def cross_polytope(n: int, r=1) -> Polytope:
    return polar(cube(n, 1 / rq.as_fraction(r)))


def make_Q(n: int, a: Sequence, b: Sequence) -> Polytope:
    """``[-a_1 e_1, b_1 e_1, ..., -a_n e_n, b_n e_n]``."""
    a, b = rq.vec(a), rq.vec(b)
    if len(a) != n or len(b) != n:
        raise ValueError("need n lower and n upper lengths")
    if any(x <= 0 for x in a + b):
        raise ValueError("axis lengths must be positive")
    pts = []
    for k in range(n):
        e = [Fraction(0)] * n
        e[k] = -a[k]
        pts.append(tuple(e))
        e[k] = b[k]
        pts.append(tuple(e))
    return convex_hull(pts)


def axis_section(P: Polytope, axis: int = 0) -> tuple[Fraction, Fraction]:
    """Exact interval ``{t : t e_axis in P}``."""
    lo, hi = None, None
    for a in P.facets:
        c = a[axis]
        if c > 0:
            hi = 1 / c if hi is None else min(hi, 1 / c)
        elif c < 0:
            lo = 1 / c if lo is None else max(lo, 1 / c)
    return lo, hi


def make_R2(a, b, c, d, x, y) -> Polytope:
    """``[-a e_1, b e_1, c (x, -1), d (y, 1)]`` with the x-axis section ``[-a, b]``."""
    a, b, c, d, x, y = (rq.as_fraction(t) for t in (a, b, c, d, x, y))
    if min(a, b, c, d) <= 0:
        raise ValueError("a, b, c, d must be positive")
    P = convex_hull([(-a, 0), (b, 0), (c * x, -c), (d * y, d)])
    if axis_section(P, 0) != (-a, b):
        raise ClassViolation(
            f"hull meets the x-axis in {axis_section(P, 0)}, expected [{-a}, {b}]"
        )
    return P


def make_double_pyramid(P: Polytope, a, b) -> Polytope:
    """``[P, -a e_n, b e_n]`` with ``P`` embedded in the hyperplane ``x_n = 0``."""
    a, b = rq.as_fraction(a), rq.as_fraction(b)
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    zero = (Fraction(0),) * P.dim
    pts = [v + (Fraction(0),) for v in P.vertices] + [zero + (-a,), zero + (b,)]
    return convex_hull(pts)


def prism(P: Polytope, lo, hi) -> Polytope:
    """Product ``P x [lo, hi]`` with ``lo < 0 < hi``."""
    lo, hi = rq.as_fraction(lo), rq.as_fraction(hi)
    if not lo < 0 < hi:
        raise OriginNotInterior("need lo < 0 < hi")
    verts = [v + (t,) for v in P.vertices for t in (lo, hi)]
    facets = [a + (Fraction(0),) for a in P.facets]
    facets += [(Fraction(0),) * P.dim + (1 / lo,), (Fraction(0),) * P.dim + (1 / hi,)]
    return Polytope(verts, facets)


def rational_circle_point(theta: float, max_denominator: int = 10**6) -> Vector:
    """Rational point exactly on the unit circle near angle ``theta``."""
    theta = math.remainder(theta, 2 * math.pi)
    if abs(abs(theta) - math.pi) < 1e-15:
        return (Fraction(-1), Fraction(0))
    t = Fraction(math.tan(theta / 2)).limit_denominator(max_denominator)
    q = 1 + t * t
    return ((1 - t * t) / q, 2 * t / q)


def inscribed_ngon(m: int, max_denominator: int = 10**6) -> Polytope:
    """Rational ``m``-gon inscribed in the unit circle, vertex 0 at angle 0."""
    if m < 3:
        raise DegenerateInput("need at least three vertices")
    return convex_hull(
        rational_circle_point(2 * math.pi * k / m, max_denominator) for k in range(m)
    )


# ---------------------------------------------------------------------------
# support-function monitor

def fibonacci_directions(count: int, dim: int = 2) -> np.ndarray:
    """Deterministic, roughly uniform unit directions.

    ``dim == 2`` gives equally spaced angles, ``dim == 3`` a Fibonacci
    sphere; higher dimensions use normalized Gaussians from a fixed seed.
    """
    if count < 1:
        raise EmptyDirections("need at least one direction")
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        r = np.sqrt(1 - z * z)
        phi = np.pi * (3 - np.sqrt(5)) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    g = np.random.default_rng(0).standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def support_gap(P, Q, directions) -> float:
    """``max |h_P(u) - h_Q(u)|`` over the given directions.

    Works for anything exposing ``support(u)``; a convergence monitor, not
    a Hausdorff distance.
    """
    dirs = np.asarray(directions, dtype=float)
    if dirs.size == 0:
        raise EmptyDirections("no directions supplied")
    dirs = np.atleast_2d(dirs)
    return max(abs(P.support(u) - Q.support(u)) for u in dirs)


# ---------------------------------------------------------------------------
# JSON

def polytope_to_json(P: Polytope) -> dict:
    return {
        "dim": P.dim,
        "vertices": [[rq.fraction_str(c) for c in v] for v in P.vertices],
    }


def polytope_from_json(data) -> Polytope:
    if isinstance(data, str):
        data = json.loads(data)
    pts = [rq.vec(v) for v in data["vertices"]]
    dim = data.get("dim", len(pts[0]) if pts else 0)
    if any(len(p) != dim for p in pts):
        raise DegenerateInput("vertex dimension does not match 'dim'")
    return convex_hull(pts)
