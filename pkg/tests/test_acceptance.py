"""Acceptance criteria, one test each; the terminal summary prints a
PASS/FAIL line per criterion."""

import math
import random
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from cvgeom import bodies as bd
from cvgeom import feq
from cvgeom import polytope as pt
from cvgeom import rational as rq
from cvgeom import valuations as val
from cvgeom.suites import (
    random_composite,
    random_conc,
    random_gl2,
    random_polytope,
    random_rational,
)

F = Fraction
SEED = 20240601


def test_criterion_1_polar_involution_and_product_identity():
    start = time.perf_counter()
    for i in range(200):
        rng = random.Random(SEED + i)
        n = (2, 3, 4)[i % 3]
        P = random_polytope(rng, n)
        assert pt.polar(pt.polar(P)) == P
        base = random_polytope(rng, n - 1, extra=1 if n > 2 else 0)
        a = F(rng.randint(1, 5), rng.randint(1, 3))
        b = F(rng.randint(1, 5), rng.randint(1, 3))
        lhs = pt.polar(pt.make_double_pyramid(base, a, b))
        rhs = pt.prism(pt.polar(base), -1 / a, 1 / b)
        assert set(lhs.vertices) == set(rhs.vertices)
    assert time.perf_counter() - start < 10


def test_criterion_2_r2_explicit_formulas():
    grid = (F(1), F(3, 2), F(2))
    shifts = (F(-1, 3), F(0), F(1, 2))
    count = 0
    for a, b, c, d in product(grid, repeat=4):
        for x, y in product(shifts, repeat=2):
            P = pt.make_R2(a, b, c, d, x, y)
            assert P.volume == (a * c + b * c + a * d + b * d) / 2
            assert pt.polar(P).volume == (
                1 / (a * c) + 1 / (b * c) + 1 / (a * d) + 1 / (b * d)
                - F(1, 2) * (b**-2 - a**-2) * (x + y)
            )
            count += 1
    assert count == 3**6


def _random_matrix(rng, n):
    while True:
        A = rng.uniform(-1.5, 1.5, size=(n, n)) + np.eye(n)
        s = np.linalg.svd(A, compute_uv=False)
        if s[-1] > 0.3 and s[0] / s[-1] < 6:
            return A


def test_criterion_3_orlicz_closed_form_vs_quadrature():
    rng = np.random.default_rng(SEED)
    phis = {n: (val.ConcFn.power(1, n), val.ConcFn.power(2, n),
                val.ConcFn.table([(0.25, 0.3), (1.0, 0.8), (4.0, 1.2)])) for n in (2, 3)}
    start = time.perf_counter()
    worst = 0.0
    for k in range(20):
        n = 2 + k % 2
        A = _random_matrix(rng, n)
        E = bd.Ellipsoid.from_linear_image(A)
        det = abs(np.linalg.det(A))
        kappa = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        for phi in phis[n]:
            closed = n * kappa * det * float(phi(det**-2))
            quad = E.orlicz_quadrature(phi)
            assert quad.converged
            worst = max(worst, abs(quad.value - closed) / closed)
    assert worst < 1e-6
    assert time.perf_counter() - start < 30


def test_criterion_4_omega_vanishes_on_polytopes():
    for i in range(30):
        rng = random.Random(SEED + i)
        n = (2, 3, 4)[i % 3]
        P = random_polytope(rng, n)
        phi = random_conc(rng, n)
        assert val.orlicz_area(P, phi).value == 0
        assert bd.PolytopeBody(P).orlicz_quadrature(phi).value == 0
        assert val.evaluate(val.Composite(0, 0, 0, phi), P) == 0


@pytest.mark.parametrize("p", [1, 2, "n"])
def test_criterion_5_homogeneity_degrees(p):
    n = 2
    p = n if p == "n" else p
    fit = val.homogeneity_degree(val.lp_affine_surface_area(p, n), bd.Ball(1.0, n), (0.5, 1, 2, 4))
    assert abs(fit.q - n * (n - p) / (n + p)) < 1e-4


def test_criterion_6_valuation_identity():
    for i in range(50):
        rng = random.Random(SEED + i)
        n = 2 + i % 2
        P = random_polytope(rng, n)
        w = [random_rational(rng, -2, 2, 2) for _ in range(n)]
        if not any(w):
            w[0] = F(1)
        vals = [rq.dot(w, v) for v in P.vertices]
        lo = min(vals) * F(rng.randint(1, 7), 8)
        hi = max(vals) * F(rng.randint(1, 7), 8)
        K, L = pt.overlapping_pair(P, w, lo, hi)
        assert val.check_valuation_identity(random_composite(rng), K, L) == 0
    omega = val.Composite(0, 0, 0, val.ConcFn.power(1, 2))
    for a in (0.5, 0.2, 0.35, 0.65, 0.8):
        assert val.check_valuation_identity(omega, *val.disc_cap_pair(a)) < 1e-6


def test_criterion_7_usc_gap():
    omega = val.Composite(0, 0, 0, val.ConcFn.power(1, 2))
    disc = bd.Ball(1.0, 2)
    assert abs(val.evaluate(omega, disc) - 2 * math.pi) < 1e-6
    # 4096 equal angles include every edge-midpoint normal for m | 4096
    dirs = pt.fibonacci_directions(4096, 2)
    gaps = []
    m = 4
    while m <= 512:
        P = pt.inscribed_ngon(m)
        assert val.evaluate(omega, P) == 0
        gaps.append(pt.support_gap(P, disc, dirs))
        m *= 2
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_criterion_8_decomposition_round_trip():
    for i in range(10):
        rng = random.Random(SEED + i)
        phi = random_conc(rng, 2)
        spec = random_composite(rng, phi)
        rep = val.decompose(spec)
        assert rep.coefficients == (spec.c0, spec.c1, spec.c2)
        for s, v in rep.phi_samples:
            assert abs(v - float(phi(s))) < 1e-6


@pytest.mark.parametrize("name, spec, F_of, expected", [
    ("V0", val.euler_characteristic(), lambda s: F(1, 4), (0, 0, F(1, 4), 0)),
    ("V2", val.volume_spec(), lambda s: s / 2, (0, 0, 0, F(1, 2))),
    ("V2-polar", val.polar_volume_spec(), lambda s: 1 / s, (F(-1, 2), 1, 0, 0)),
])
def test_criterion_9_feq_descriptions(name, spec, F_of, expected):
    desc = feq.extract_F_on_Q2(spec)
    assert desc.residual == 0
    assert all(v == F_of(s) for s, v in zip(desc.F.xs, desc.F.values))
    fit = feq.fit_R2_descriptor(spec)
    assert (fit.k, fit.c1, fit.c2, fit.c3) == expected
    assert fit.c1 == -2 * fit.k
    assert fit.k_residual == 0 and fit.F_residual == 0


def test_criterion_10_mahler_products():
    square = pt.cube(2)
    assert square.volume * pt.polar(square).volume == 8 == F(4**2, math.factorial(2))
    disc = bd.Piecewise2D.disc()
    prod = disc.volume() * disc.polar_volume()
    assert abs(prod - math.pi**2) < 1e-10
    assert abs(val.evaluate(val.mahler_oracle(), bd.Ball(1.0, 2)) - math.pi**2) < 1e-10
    assert 8 <= math.pi**2


def test_criterion_11_moment_contravariance():
    for i in range(50):
        rng = random.Random(SEED + i)
        P = random_polytope(rng, 2)
        A = random_gl2(rng)
        lhs = pt.moment_vector_of_polar(pt.apply_linear(P, A))
        m = pt.moment_vector_of_polar(P)
        rhs = rq.scale(1 / abs(A.det), rq.matvec(A.inverse_transpose, m))
        assert tuple(lhs) == tuple(rhs)
