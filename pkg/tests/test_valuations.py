import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvgeom import bodies as bd
from cvgeom import polytope as pt
from cvgeom import valuations as val
from cvgeom.errors import (
    InvalidConcFn,
    NotConverging,
    NotUnimodular,
    SingularFittingSystem,
    UnionNotConvex,
    ZeroBaseline,
)
from cvgeom.suites import random_composite, random_conc, random_polytope, random_sl

F = Fraction
PHI1 = val.ConcFn.power(1, 2)


# -- ConcFn -----------------------------------------------------------------

def test_power_values():
    assert PHI1(8.0) == pytest.approx(2.0)
    assert PHI1(0.0) == 0.0
    assert np.allclose(PHI1(np.array([0.0, 1.0, 27.0])), [0, 1, 3])


def test_table_interpolates_with_flat_tail():
    phi = val.ConcFn.table([(1, 1), (2, 1.5)])
    assert np.allclose(phi(np.array([0.0, 0.5, 1.5, 10.0])), [0, 0.5, 1.25, 1.5])


@pytest.mark.parametrize("make", [
    lambda: val.ConcFn.table([(1, 1), (2, 3)]),                # convex kink
    lambda: val.ConcFn.table([(0, 1), (1, 2)]),                # misses (0, 0)
    lambda: val.ConcFn.table([(1, float("inf"))]),             # infinite
    lambda: val.ConcFn(lambda t: t**2, "square"),              # convex
    lambda: val.ConcFn(lambda t: t, "linear"),                 # phi(t)/t -> 1
    lambda: val.ConcFn(lambda t: 1 + 0 * t, "constant"),       # phi(0+) = 1
    lambda: val.ConcFn(lambda t: -np.sqrt(t), "negative"),
    lambda: val.ConcFn.power(0, 2),
    lambda: val.ConcFn.capped(-1, 1),
])
def test_invalid_conc_functions(make):
    with pytest.raises(InvalidConcFn):
        make()


def test_conc_json_round_trip():
    for phi in (PHI1, val.ConcFn.capped(1.5, 2), val.ConcFn.table([(0.5, 0.4), (1, 0.7)])):
        back = val.conc_from_json(phi.to_json())
        t = np.logspace(-3, 3, 13)
        assert np.array_equal(back(t), phi(t))


# -- evaluation -------------------------------------------------------------

def test_composite_on_square_is_exact():
    v = val.evaluate(val.Composite(2, 3, 5), pt.cube(2))
    assert v == 24 and isinstance(v, Fraction)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
def test_omega_on_balls(t):
    assert val.evaluate(val.Composite(0, 0, 0, PHI1), bd.Ball(t, 2)) == pytest.approx(2 * math.pi * t ** (2 / 3))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_omega_vanishes_on_polytopes(seed, n):
    rng = random.Random(seed)
    P = random_polytope(rng, n)
    phi = random_conc(rng, n)
    assert val.orlicz_area(P, phi).value == 0
    spec = val.Composite(0, 1, 0, phi)
    assert val.evaluate(spec, P) == P.volume


def test_classical_asa():
    assert val.classical_asa(bd.Piecewise2D.disc()) == pytest.approx(2 * math.pi, rel=1e-12)
    assert val.classical_asa(pt.inscribed_ngon(9)) == 0
    assert val.classical_asa(bd.Ellipsoid(np.diag([2.0, 0.5]))) == pytest.approx(2 * math.pi)


def test_spec_json_round_trip():
    spec = val.Composite(F(1, 3), -2, F(5, 7), val.ConcFn.power(2, 2))
    back = val.spec_from_json(val.spec_to_json(spec))
    assert (back.c0, back.c1, back.c2) == (F(1, 3), -2, F(5, 7))
    assert back.phi(2.0) == spec.phi(2.0)


# -- even/odd ---------------------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_even_odd_split_exact(seed):
    rng = random.Random(seed)
    P = random_polytope(rng, 2, extra=3)
    for spec in (val.volume_spec(), val.polar_volume_spec(), random_composite(rng)):
        plus, minus = val.even_odd_split(spec, 0)
        Q = pt.apply_linear(P, pt.reflection(2, 0))
        assert minus(P) == 0
        assert plus(P) + minus(P) == spec(P)
        assert plus(Q) == plus(P)


def _centroid_x(P):
    return pt.moment_vector_of_polar(P)[0] / pt.polar(P).volume


def test_odd_oracle_is_all_odd():
    mu = val.Oracle(_centroid_x, "centroid-x")
    plus, minus = val.even_odd_split(mu, 0)
    P = pt.convex_hull([(-1, 0), (2, 0), (0, -1), (0, 1)])
    assert plus(P) == 0
    assert minus(P) == mu(P) == F(-1, 4)
    assert minus(pt.apply_linear(P, pt.reflection(2, 0))) == -minus(P)


# -- valuation identity -----------------------------------------------------

def test_identity_for_boxes():
    K = pt.convex_hull([(-2, -1), (1, -1), (1, 1), (-2, 1)])
    L = pt.convex_hull([(-1, -1), (2, -1), (2, 1), (-1, 1)])
    assert val.check_valuation_identity(val.volume_spec(), K, L) == 0
    assert pt.polar(K).volume == pt.polar(L).volume == F(3, 2)
    assert pt.polar(pt.union_hull(K, L)).volume == 1
    assert pt.polar(pt.intersection(K, L)).volume == 2
    assert val.check_valuation_identity(val.polar_volume_spec(), K, L) == 0


def test_non_convex_union_rejected():
    K = pt.convex_hull([(-2, -1), (2, -1), (2, 1), (-2, 1)])
    L = pt.convex_hull([(-1, -2), (1, -2), (1, 2), (-1, 2)])
    with pytest.raises(UnionNotConvex):
        val.check_valuation_identity(val.volume_spec(), K, L)


def test_smooth_pair_needs_union():
    with pytest.raises(UnionNotConvex):
        val.check_valuation_identity(val.volume_spec(), bd.Ball(1.0, 2), bd.Ball(2.0, 2))


@pytest.mark.parametrize("a", [0.5, 0.25, 0.75])
def test_identity_on_disc_caps(a):
    assert val.check_valuation_identity(val.Composite(0, 0, 0, PHI1), *val.disc_cap_pair(a)) < 1e-6
    assert val.check_valuation_identity(val.Composite(1, 2, 3, PHI1), *val.disc_cap_pair(a, 0.3)) < 1e-6


def test_omega_of_cap_is_arc_length():
    K, *_ = val.disc_cap_pair(0.5)
    arc = 2 * (math.pi - math.acos(0.5))
    assert val.evaluate(val.Composite(0, 0, 0, PHI1), K) == pytest.approx(arc, rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_identity_is_exact_on_overlapping_pairs(seed):
    rng = random.Random(seed)
    P = random_polytope(rng, 2, extra=3)
    vals = [v[0] + v[1] for v in P.vertices]
    K, L = pt.overlapping_pair(P, (1, 1), min(vals) / 2, max(vals) / 3)
    assert val.check_valuation_identity(random_composite(rng), K, L) == 0


# -- SL invariance ------------------------------------------------------------

def test_shear_invariance_exact():
    assert val.check_sl_invariance(val.Composite(1, 1, 1), pt.cube(2), pt.LinearMap([[1, 1], [0, 1]])) == 0


def test_disc_vs_sheared_disc():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    assert val.check_sl_invariance(val.Composite(0, 0, 0, PHI1), bd.Ball(1.0, 2), A) < 1e-6


def test_reflection_is_not_unimodular():
    with pytest.raises(NotUnimodular):
        val.check_sl_invariance(val.volume_spec(), pt.cube(2), pt.reflection(2, 0))
    with pytest.raises(NotUnimodular):
        val.check_sl_invariance(val.volume_spec(), bd.Ball(1.0, 2), np.diag([2.0, 1.0]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_random_unimodular_maps(seed, n):
    rng = random.Random(seed)
    A = random_sl(rng, n)
    assert A.unimodular
    assert val.check_sl_invariance(random_composite(rng), random_polytope(rng, n), A) == 0


# -- homogeneity ----------------------------------------------------------------

def test_degrees_of_pure_terms():
    assert val.homogeneity_degree(val.volume_spec(), pt.cube(2)).q == pytest.approx(2, abs=1e-9)
    assert val.homogeneity_degree(val.polar_volume_spec(), pt.cube(2)).q == pytest.approx(-2, abs=1e-9)
    assert val.homogeneity_degree(val.euler_characteristic(), pt.cube(3)).q == pytest.approx(0, abs=1e-12)


def test_exact_scaling_on_polytopes():
    P = pt.make_R2(1, 2, 1, 1, F(1, 2), 0)
    t = F(3, 2)
    Q = pt.scale(P, t)
    assert Q.volume == t**2 * P.volume
    assert pt.polar(Q).volume == t**-2 * pt.polar(P).volume


@pytest.mark.parametrize("p", [1, 2, 0.5, 4])
def test_degree_of_lp_area(p):
    fit = val.homogeneity_degree(val.lp_affine_surface_area(p, 2), bd.Ball(1.0, 2), (0.5, 1, 2, 4))
    assert fit.q == pytest.approx(val.expected_degree(p, 2), abs=1e-4)


def test_zero_baseline():
    with pytest.raises(ZeroBaseline):
        val.homogeneity_degree(val.Composite(0, 0, 0, PHI1), pt.cube(2))


# -- decomposition --------------------------------------------------------------

def test_decompose_exact_triple():
    rep = val.decompose(val.Composite(2, 3, 5))
    assert rep.exact and rep.coefficients == (2, 3, 5)
    assert all(r == 0 for r in rep.residuals)
    assert all(abs(v) < 1e-12 for _, v in rep.phi_samples)


def test_decompose_phi_only():
    rep = val.decompose(val.Composite(0, 0, 0, PHI1))
    assert rep.coefficients == (0, 0, 0)
    for s, v in rep.phi_samples:
        assert v == pytest.approx(PHI1(s), abs=1e-6)


@pytest.mark.parametrize("n", [2, 3])
def test_decompose_full(n):
    phi = val.ConcFn.power(1, n)
    rep = val.decompose(val.Composite(1, 1, 1, phi), n, estimate_q=True)
    assert rep.coefficients == (1, 1, 1)
    for s, v in rep.phi_samples:
        assert v == pytest.approx(phi(s), abs=1e-6)
    assert rep.q_hat == pytest.approx(val.expected_degree(1, n), abs=1e-6)


def test_decompose_flags_black_boxes():
    rep = val.decompose(val.Oracle(lambda K: val.volume_of(K), "volume"))
    assert rep.caveat and rep.coefficients == (0, 1, 0)


def test_decompose_rejects_dependent_triple():
    with pytest.raises(SingularFittingSystem):
        val.decompose(val.volume_spec(), triple=[pt.cube(2), pt.cube(2, 2), pt.apply_linear(pt.cube(2), [[1, 1], [0, 1]])])


# -- u.s.c. probe -----------------------------------------------------------------

@pytest.fixture(scope="module")
def ngons():
    return [pt.inscribed_ngon(m) for m in (4, 8, 16, 32, 64)]


def test_usc_omega_gap(ngons):
    rep = val.usc_probe(val.Composite(0, 0, 0, PHI1), ngons, bd.Ball(1.0, 2))
    assert rep.values == (0.0,) * 5
    assert rep.limit_value == pytest.approx(2 * math.pi)
    assert rep.bound_holds and rep.margin > 6


def test_usc_volume_from_below(ngons):
    rep = val.usc_probe(val.volume_spec(), ngons, bd.Ball(1.0, 2))
    for m, v in zip((4, 8, 16, 32, 64), rep.values):
        assert v == pytest.approx(m / 2 * math.sin(2 * math.pi / m), rel=1e-9)
    assert rep.bound_holds


def test_usc_polar_volume_from_above(ngons):
    rep = val.usc_probe(val.polar_volume_spec(), ngons, bd.Ball(1.0, 2))
    for m, v in zip((4, 8, 16, 32, 64), rep.values):
        assert v == pytest.approx(m * math.tan(math.pi / m), rel=1e-9)
    assert rep.tail_max > math.pi and rep.bound_holds


def test_usc_probe_rejects_diverging_sequence(ngons):
    with pytest.raises(NotConverging):
        val.usc_probe(val.volume_spec(), ngons[::-1], bd.Ball(1.0, 2))


def test_usc_probe_flags_jump_up():
    # a valuation-like oracle that jumps above the limit along the sequence
    bad = val.Oracle(lambda K: 10.0 if isinstance(K, pt.Polytope) else 0.0, "jump")
    seq = [pt.inscribed_ngon(m) for m in (4, 8, 16, 32)]
    assert not val.usc_probe(bad, seq, bd.Ball(1.0, 2)).bound_holds
