"""Command-line front end: ``cvgeom compute | verify | decompose``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import bodies as bd
from . import valuations as val
from .errors import GeometryError, InvalidConcFn
from .suites import SUITES, SuiteConfig, encode, run_suite


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    spec: str | None = None
    phi: str | None = None
    suite: str | None = None
    seed: int = 0
    cases: int | None = None
    tol: float = 1e-6
    out: str | None = None
    fmt: str = "json"
    p: tuple[float, ...] | None = None
    sequence: str = "ngon"
    max_m: int = 512
    dim: int = 2
    grid: tuple[float, ...] = val.DEFAULT_S_GRID

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("--tol must be positive")


def parse_phi(text: str | None, n: int = 2) -> val.ConcFn | None:
    """``power:p=1``, ``capped:slope=1,cap=2``, ``table:0.5=0.4;1=0.7`` or JSON."""
    if not text:
        return None
    text = text.strip()
    if text.startswith("{"):
        return val.conc_from_json(json.loads(text), n)
    kind, _, rest = text.partition(":")
    if kind == "table":
        pts = [tuple(float(Fraction(x)) for x in item.split("=")) for item in rest.split(";") if item]
        return val.ConcFn.table(pts)
    args = dict(item.split("=", 1) for item in rest.split(",") if item)
    if kind == "power":
        return val.ConcFn.power(float(args["p"]), int(args.get("n", n)))
    if kind == "capped":
        return val.ConcFn.capped(float(args["slope"]), float(args["cap"]))
    raise InvalidConcFn(f"cannot parse phi {text!r}")


def parse_spec(text: str | None, phi: val.ConcFn | None, n: int):
    if text is None:
        return val.Composite(0, 0, 0, phi) if phi else None
    if text.strip() == "mahler":
        return val.mahler_oracle()
    spec = val.spec_from_json(text, n)
    if phi is not None:
        spec = val.Composite(spec.c0, spec.c1, spec.c2, phi)
    return spec


def load_body(path: str):
    return bd.body_from_json(json.loads(Path(path).read_text()))


def _provenance(value, quadrature: bool = False, error: float = 0.0) -> dict:
    if isinstance(value, (int, Fraction)):
        return {"value": encode(Fraction(value)), "provenance": "exact"}
    if not quadrature:
        return {"value": float(value), "provenance": "closed-form"}
    return {"value": float(value), "provenance": "quadrature", "error": float(error)}


def cmd_compute(cfg: RunConfig) -> tuple[dict, int]:
    reports = []
    for path in cfg.inputs:
        K = load_body(path)
        phi = parse_phi(cfg.phi, K.dim)
        spec = parse_spec(cfg.spec, phi, K.dim)
        entry = {
            "input": path,
            "dim": K.dim,
            "volume": _provenance(val.volume_of(K)),
            "polar_volume": _provenance(val.polar_volume_of(K)),
        }
        curved = isinstance(K, bd.Piecewise2D)
        if curved:
            pv = K.polar_volume_result()
            entry["polar_volume"] = _provenance(pv.value, True, pv.error)
        if phi is not None:
            om = val.orlicz_area(K, phi)
            entry["omega"] = _provenance(om.value, curved, om.error)
            entry["omega"]["converged"] = om.converged
        if spec is not None:
            ev = spec.evaluate_detailed(K)
            entry["spec"] = getattr(spec, "name", "spec")
            entry["value"] = _provenance(ev.value, curved, ev.error)
        reports.append(entry)
    return {"command": "compute", "results": reports}, 0


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    report = run_suite(cfg.suite, SuiteConfig(
        seed=cfg.seed, cases=cfg.cases, tol=cfg.tol, p=cfg.p,
        sequence=cfg.sequence, max_m=cfg.max_m,
    ))
    return report.to_json(), 0 if report.passed else 1


def cmd_decompose(cfg: RunConfig) -> tuple[dict, int]:
    phi = parse_phi(cfg.phi, cfg.dim)
    spec = parse_spec(cfg.spec or "{}", phi, cfg.dim)
    rep = val.decompose(spec, cfg.dim, s_grid=cfg.grid, estimate_q=True)
    out = {"command": "decompose", "dim": cfg.dim, "oracle": getattr(spec, "name", "oracle")}
    out.update(rep.to_json())
    return out, 0


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "cases" in doc:
        w.writerow(["suite", "case", "passed", "residual"])
        for c in doc["cases"]:
            w.writerow([doc["suite"], c["name"], c["passed"], c["residual"]])
    elif doc.get("command") == "compute":
        w.writerow(["input", "quantity", "value", "provenance"])
        for r in doc["results"]:
            for key in ("volume", "polar_volume", "omega", "value"):
                if key in r:
                    w.writerow([r["input"], key, r[key]["value"], r[key]["provenance"]])
    else:
        w.writerow(["quantity", "value"])
        for key in ("c0", "c1", "c2", "q_hat"):
            w.writerow([key, doc.get(key)])
        for s, v in doc.get("phi_samples", []):
            w.writerow([f"phi({s})", v])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="valuation spec as JSON, or 'mahler'")
    common.add_argument("--phi", help="concave function, e.g. power:p=1")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="cvgeom", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="evaluate functionals on body files")
    c.add_argument("inputs", nargs="+")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite_pos", nargs="?", metavar="suite")
    v.add_argument("--suite")
    v.add_argument("--p", type=float, action="append")
    v.add_argument("--sequence", default="ngon")
    v.add_argument("--max", dest="max_m", type=int, default=512)

    d = sub.add_parser("decompose", parents=[common], help="fit (c0, c1, c2, phi) to an oracle")
    d.add_argument("--dim", type=int, default=2)
    d.add_argument("--grid", help="comma-separated phi sample points")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = dict(command=args.command, spec=args.spec, phi=args.phi, seed=args.seed,
              cases=args.cases, tol=args.tol, out=args.out, fmt=args.fmt)
    if args.command == "compute":
        kw["inputs"] = tuple(args.inputs)
    elif args.command == "verify":
        kw.update(suite=args.suite or args.suite_pos, sequence=args.sequence, max_m=args.max_m,
                  p=tuple(args.p) if args.p else None)
    else:
        kw["dim"] = args.dim
        if args.grid:
            kw["grid"] = tuple(float(Fraction(x)) for x in args.grid.split(","))
    return RunConfig(**kw)


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "decompose": cmd_decompose}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "verify" and not cfg.suite:
            raise GeometryError(f"name a suite: {', '.join(sorted(SUITES))}")
        doc, code = COMMANDS[cfg.command](cfg)
    except (GeometryError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = to_csv(doc) if cfg.fmt == "csv" else json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
