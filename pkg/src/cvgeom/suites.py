"""Named verification suites shared by the CLI and the acceptance tests.

Every suite is a deterministic list of cases built from a seed.  Cases run
on a thread pool capped by ``CV_THREADS`` and are reported in index order,
so identical configurations give byte-identical reports.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bodies as bd
from . import feq
from . import polytope as pt
from . import rational as rq
from . import valuations as val
from .errors import UnknownSuite


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    cases: int | None = None
    tol: float = 1e-6
    p: tuple[float, ...] | None = None
    sequence: str = "ngon"
    max_m: int = 512
    threads: int | None = None


@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    residual: Fraction | float | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": encode(self.residual),
            "detail": {k: encode(v) for k, v in sorted(self.detail.items())},
        }


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    ref: str
    seed: int
    cases: tuple[CaseResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ref": self.ref,
            "seed": self.seed,
            "passed": self.passed,
            "n_cases": len(self.cases),
            "n_failed": sum(not c.passed for c in self.cases),
            "cases": [c.to_json() for c in self.cases],
        }


def encode(x):
    """JSON-friendly value: rationals as ``"p/q"``, floats unchanged."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, Fraction):
        return rq.fraction_str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    return str(x)


def thread_count(requested: int | None = None) -> int:
    cap = int(os.environ.get("CV_THREADS", "0") or 0)
    n = requested or cap or min(8, os.cpu_count() or 1)
    return max(1, min(n, cap) if cap else n)


def run_cases(cases: list[Callable[[], CaseResult]], threads: int | None = None) -> tuple[CaseResult, ...]:
    n = thread_count(threads)
    if n == 1 or len(cases) < 2:
        return tuple(c() for c in cases)
    with ThreadPoolExecutor(max_workers=n) as ex:
        return tuple(ex.map(lambda c: c(), cases))


# ---------------------------------------------------------------------------
# random inputs

def random_rational(rng: random.Random, lo: int = -6, hi: int = 6, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_polytope(rng: random.Random, n: int, extra: int | None = None) -> pt.Polytope:
    """Hull of ``+-r_i e_i`` and a few random rational points; the axis
    points keep the origin interior."""
    pts = []
    for i in range(n):
        for sign in (-1, 1):
            e = [Fraction(0)] * n
            e[i] = sign * Fraction(rng.randint(2, 8), rng.randint(1, 3))
            pts.append(tuple(e))
    for _ in range(rng.randint(0, 4) if extra is None else extra):
        pts.append(tuple(random_rational(rng, -3, 3) for _ in range(n)))
    return pt.convex_hull(pts)


def random_gl2(rng: random.Random) -> pt.LinearMap:
    while True:
        m = [[random_rational(rng, -3, 3, 3) for _ in range(2)] for _ in range(2)]
        if rq.det(rq.mat(m)) != 0:
            return pt.LinearMap(m)


def random_sl(rng: random.Random, n: int) -> pt.LinearMap:
    """Product of rational shears and a determinant-one diagonal."""
    A = pt.LinearMap(rq.identity(n))
    for _ in range(3):
        i, j = rng.sample(range(n), 2)
        m = [list(r) for r in rq.identity(n)]
        m[i][j] = random_rational(rng, -2, 2, 3)
        A = pt.LinearMap(m) @ A
    t = Fraction(rng.randint(1, 4), rng.randint(1, 4))
    d = [list(r) for r in rq.identity(n)]
    d[0][0], d[1][1] = t, 1 / t
    return pt.LinearMap(d) @ A


def random_composite(rng: random.Random, phi: val.ConcFn | None = None) -> val.Composite:
    return val.Composite(*(random_rational(rng, -5, 5) for _ in range(3)), phi)


def random_conc(rng: random.Random, n: int = 2) -> val.ConcFn:
    kind = rng.choice(["power", "capped", "table"])
    if kind == "power":
        return val.ConcFn.power(rng.choice([0.5, 1, 2, 3]), n)
    if kind == "capped":
        return val.ConcFn.capped(rng.uniform(0.5, 2), rng.uniform(0.5, 3))
    return val.ConcFn.table([(0.5, 0.4), (1.0, 0.7), (2.0, 1.0), (5.0, 1.4)])


# ---------------------------------------------------------------------------
# suites

def suite_polar_involution(cfg: SuiteConfig):
    count = cfg.cases or 100

    def case(i):
        def run():
            rng = random.Random(cfg.seed * 1_000_003 + i)
            n = (2, 3, 4)[i % 3]
            P = random_polytope(rng, n)
            back = pt.polar(pt.polar(P))
            ok_inv = back == P
            base = random_polytope(rng, n - 1, extra=1 if n > 2 else 0)
            a = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            b = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            lhs = pt.polar(pt.make_double_pyramid(base, a, b))
            rhs = pt.prism(pt.polar(base), -1 / a, 1 / b)
            ok_prod = set(lhs.vertices) == set(rhs.vertices)
            # residual counts vertices present on one side only
            miss = (len(set(back.vertices) ^ set(P.vertices))
                    + len(set(lhs.vertices) ^ set(rhs.vertices)))
            return CaseResult(f"case-{i}", ok_inv and ok_prod, miss,
                              {"dim": n, "involution": ok_inv, "product": ok_prod})
        return run

    return [case(i) for i in range(count)]


def suite_moment_contravariance(cfg: SuiteConfig):
    count = cfg.cases or 50

    def case(i):
        def run():
            rng = random.Random(cfg.seed * 1_000_003 + i)
            P = random_polytope(rng, 2)
            A = random_gl2(rng)
            lhs = pt.moment_vector_of_polar(pt.apply_linear(P, A))
            m = pt.moment_vector_of_polar(P)
            rhs = rq.scale(1 / abs(A.det), rq.matvec(A.inverse_transpose, m))
            res = max(abs(x - y) for x, y in zip(lhs, rhs))
            return CaseResult(f"case-{i}", res == 0, res)
        return run

    return [case(i) for i in range(count)]


def suite_valuation_identity(cfg: SuiteConfig):
    count = cfg.cases or 50

    def poly_case(i):
        def run():
            rng = random.Random(cfg.seed * 1_000_003 + i)
            n = 2 + i % 2
            P = random_polytope(rng, n)
            w = [random_rational(rng, -2, 2, 2) for _ in range(n)]
            if not any(w):
                w[0] = Fraction(1)
            vals = [rq.dot(w, v) for v in P.vertices]
            lo = min(vals) * Fraction(rng.randint(1, 7), 8)
            hi = max(vals) * Fraction(rng.randint(1, 7), 8)
            K, L = pt.overlapping_pair(P, w, lo, hi)
            spec = random_composite(rng)
            res = val.check_valuation_identity(spec, K, L)
            return CaseResult(f"polytopes-{i}", res == 0, res, {"dim": n})
        return run

    def cap_case(j, a):
        def run():
            spec = val.Composite(0, 0, 0, val.ConcFn.power(1, 2))
            res = val.check_valuation_identity(spec, *val.disc_cap_pair(a))
            return CaseResult(f"disc-caps-{j}", res < cfg.tol, res, {"a": a})
        return run

    caps = [0.5, 0.2, 0.35, 0.65, 0.8]
    return [poly_case(i) for i in range(count)] + [cap_case(j, a) for j, a in enumerate(caps)]


def suite_sl_invariance(cfg: SuiteConfig):
    count = cfg.cases or 50

    def case(i):
        def run():
            rng = random.Random(cfg.seed * 1_000_003 + i)
            n = 2 + i % 2
            P = random_polytope(rng, n)
            A = random_sl(rng, n)
            res = val.check_sl_invariance(random_composite(rng), P, A)
            return CaseResult(f"polytope-{i}", res == 0, res, {"dim": n})
        return run

    def smooth_case(j):
        def run():
            rng = random.Random(cfg.seed * 7919 + j)
            A = random_sl(rng, 2).as_array()
            spec = val.Composite(1, 1, 1, val.ConcFn.power(rng.choice([1, 2]), 2))
            res = val.check_sl_invariance(spec, bd.Ball(1.0 + j / 4, 2), A)
            return CaseResult(f"ellipse-{j}", res < cfg.tol, res)
        return run

    return [case(i) for i in range(count)] + [smooth_case(j) for j in range(3)]


def suite_homogeneity(cfg: SuiteConfig):
    n = 2
    ps = cfg.p or (1.0, 2.0, float(n))

    def omega_case(p):
        def run():
            fit = val.homogeneity_degree(val.lp_affine_surface_area(p, n), bd.Ball(1.0, n),
                                         (0.5, 1.0, 2.0, 4.0))
            want = val.expected_degree(p, n)
            err = abs(fit.q - want)
            return CaseResult(f"omega-p={p:g}", err < 1e-4, err, {"q_hat": fit.q, "expected": want})
        return run

    def exact_case(name, spec, q):
        def run():
            fit = val.homogeneity_degree(spec, pt.cube(n))
            err = abs(fit.q - q)
            return CaseResult(name, err < 1e-9, err, {"q_hat": fit.q, "expected": float(q)})
        return run

    return [omega_case(p) for p in ps] + [
        exact_case("volume", val.volume_spec(), n),
        exact_case("polar-volume", val.polar_volume_spec(), -n),
    ]


def suite_usc_probe(cfg: SuiteConfig):
    if cfg.sequence != "ngon":
        raise UnknownSuite(f"unknown sequence {cfg.sequence!r}")
    ms = []
    m = 4
    while m <= cfg.max_m:
        ms.append(m)
        m *= 2
    polygons = [pt.inscribed_ngon(k) for k in ms]
    disc = bd.Ball(1.0, 2)

    omega = val.Composite(0, 0, 0, val.ConcFn.power(1, 2))

    def probe(name, spec, check):
        def run():
            rep = val.usc_probe(spec, polygons, disc)
            ok = rep.bound_holds and check(rep)
            return CaseResult(name, ok, rep.margin, {
                "m": list(ms), "values": list(rep.values), "gaps": list(rep.gaps),
                "limit": rep.limit_value, "tail_max": rep.tail_max,
            })
        return run

    return [
        probe("omega", omega, lambda r: all(v == 0 for v in r.values)
              and abs(r.limit_value - 2 * math.pi) < cfg.tol),
        probe("volume", val.volume_spec(), lambda r: abs(r.values[-1] - math.pi) < 1e-3),
        probe("polar-volume", val.polar_volume_spec(), lambda r: abs(r.values[-1] - math.pi) < 1e-3),
    ]


def _base_specs():
    return [("V0", val.euler_characteristic()), ("V2", val.volume_spec()),
            ("V2-polar", val.polar_volume_spec())]


def suite_q2_description(cfg: SuiteConfig):
    count = cfg.cases or 5

    def case(name, spec):
        def run():
            d = feq.extract_F_on_Q2(spec)
            want = [spec.c0 / 4 + spec.c1 * s / 2 + spec.c2 / s for s in d.F.xs]
            ok = d.residual == 0 and list(d.F.values) == want
            return CaseResult(name, ok, d.residual)
        return run

    specs = _base_specs() + [
        (f"random-{i}", random_composite(random.Random(cfg.seed * 1_000_003 + i)))
        for i in range(count)
    ]
    return [case(n, s) for n, s in specs]


def r2_formula_residual(a, b, c, d, x, y) -> Fraction:
    """Gap between the kernel and the closed forms for ``V(P)`` and ``V(P*)``."""
    P = pt.make_R2(a, b, c, d, x, y)
    v = (a * c + b * c + a * d + b * d) / 2
    vp = (1 / (a * c) + 1 / (b * c) + 1 / (a * d) + 1 / (b * d)
          - Fraction(1, 2) * (b**-2 - a**-2) * (x + y))
    return abs(P.volume - v) + abs(pt.polar(P).volume - vp)


R2_GRID_ABCD = (Fraction(1), Fraction(3, 2), Fraction(2))
R2_GRID_XY = (Fraction(-1, 3), Fraction(0), Fraction(1, 2))


def suite_r2_description(cfg: SuiteConfig):
    from itertools import product

    def formula_case(j, abcd):
        def run():
            worst = Fraction(0)
            for x, y in product(R2_GRID_XY, repeat=2):
                worst = max(worst, r2_formula_residual(*abcd, x, y))
            return CaseResult(f"formulas-{j}", worst == 0, worst,
                              {"abcd": [rq.fraction_str(t) for t in abcd]})
        return run

    expected = {"V0": (0, 0, Fraction(1, 4), 0), "V2": (0, 0, 0, Fraction(1, 2)),
                "V2-polar": (Fraction(-1, 2), 1, 0, 0)}

    def fit_case(name, spec):
        def run():
            f = feq.fit_R2_descriptor(spec)
            got = (f.k, f.c1, f.c2, f.c3)
            ok = got == expected[name] and f.consistency == 0 and f.k_residual == 0 and f.F_residual == 0
            return CaseResult(f"fit-{name}", ok, f.consistency,
                              {"k": f.k, "c1": f.c1, "c2": f.c2, "c3": f.c3})
        return run

    grid = list(product(R2_GRID_ABCD, repeat=4))
    return [formula_case(j, g) for j, g in enumerate(grid)] + [fit_case(n, s) for n, s in _base_specs()]


def suite_one_dim(cfg: SuiteConfig):
    count = cfg.cases or 10

    def case(i):
        def run():
            spec = random_composite(random.Random(cfg.seed * 1_000_003 + i))
            res = feq.one_dim_decompose_check(feq.interval_oracle(spec))
            return CaseResult(f"composite-{i}", res == 0, res)
        return run

    def split_case():
        res = feq.one_dim_decompose_check(lambda a, b: a * a + 1 / b)
        return CaseResult("split-sum", res == 0, res)

    def reject_case():
        res = feq.interval_identity_residual(lambda a, b: a * b, 1, 2)
        return CaseResult("product-rejected", res != 0, res)

    return [case(i) for i in range(count)] + [split_case, reject_case]


def suite_cauchy(cfg: SuiteConfig):
    count = cfg.cases or 10

    def case(i):
        def run():
            s = random_rational(random.Random(cfg.seed * 1_000_003 + i))
            rep = feq.cauchy_residual(feq.GridFunction1D.from_function(lambda x: s * x))
            ok = rep.residual == 0 and rep.slope == s
            return CaseResult(f"linear-{i}", ok, rep.residual, {"slope": rep.slope})
        return run

    def square_case():
        rep = feq.cauchy_residual(feq.GridFunction1D.from_function(lambda x: x * x))
        return CaseResult("square-rejected", rep.residual > 0, rep.residual)

    return [case(i) for i in range(count)] + [square_case]


SUITES: dict[str, tuple[str, Callable]] = {
    "polar-involution": ("polar body involution; polar of a double pyramid is a prism", suite_polar_involution),
    "moment-contravariance": ("GL(n) contravariance of the polar moment vector", suite_moment_contravariance),
    "valuation-identity": ("inclusion-exclusion on convex unions", suite_valuation_identity),
    "sl-invariance": ("invariance under SL(n)", suite_sl_invariance),
    "homogeneity": ("degree of L_p affine surface areas", suite_homogeneity),
    "usc-probe": ("upper semicontinuity along inscribed polygons", suite_usc_probe),
    "q2-description": ("F-description on axis quadrilaterals", suite_q2_description),
    "r2-description": ("(F, k)-description on x-axis quadrilaterals", suite_r2_description),
    "one-dim": ("interval decomposition", suite_one_dim),
    "cauchy": ("Cauchy additivity", suite_cauchy),
}


def run_suite(name: str, cfg: SuiteConfig = SuiteConfig()) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    ref, build = SUITES[name]
    cases = build(cfg)
    return SuiteReport(name, ref, cfg.seed, run_cases(cases, cfg.threads))
