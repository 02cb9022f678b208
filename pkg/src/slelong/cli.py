"""Command-line front end.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from fractions import Fraction
import io
import json
import math
import sys

import numpy as np

from . import analysis
from .cones import AngularCone, HypothesisError, hull_region, theorem_cone
from .figures import FigureSpec, figure_svg
from .geometry import GeometryError, PolyhedralCone, Polytope, lattice_gap, parse_coordinate
from .integrals import (
    DivergentIntegralError,
    WeightSpec,
    finiteness_lp,
    monomial_norm_closed_form,
    quadrature_norm,
)

SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    polytope: str | None = None
    m: int = 1
    gamma: object = 0
    cone: str = "auto"
    margin: float | None = None
    exact: bool = True
    out: str | None = None
    seed: int = 0

    def validate(self):
        if self.m < 1:
            raise InputError("field 'm': must be >= 1")
        if self.gamma < 0:
            raise InputError("field 'gamma': must be >= 0")
        if self.margin is not None and self.margin < 0:
            raise InputError("field 'margin': must be >= 0")


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _num(text, field):
    try:
        return parse_coordinate(text)
    except GeometryError as exc:
        raise InputError(f"field '{field}': {exc}") from exc


def _ints(text, field):
    try:
        return tuple(int(t) for t in str(text).replace(" ", "").split(","))
    except ValueError as exc:
        raise InputError(f"field '{field}': expected comma-separated integers") from exc


def _floats(text, field):
    try:
        return tuple(float(t) for t in str(text).replace(" ", "").split(","))
    except ValueError as exc:
        raise InputError(f"field '{field}': expected comma-separated numbers") from exc


def _load_json(path, field):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"field '{field}': cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"field '{field}': malformed JSON in {path}: {exc.msg}") from exc


def load_polytope(path) -> Polytope:
    if path is None:
        raise InputError("field 'polytope': required")
    data = _load_json(path, "polytope")
    try:
        return Polytope.from_json(data)
    except (GeometryError, TypeError) as exc:
        raise InputError(f"field 'polytope': {exc}") from exc


def load_cone(spec, n, d_m=None, gamma=0):
    """--cone auto | path to cone JSON."""
    if spec in (None, "auto"):
        return theorem_cone(n, d_m, float(gamma))
    data = _load_json(spec, "cone")
    kind = data.get("type")
    if kind == "angular":
        if "half_angle_deg" not in data:
            raise InputError("field 'cone.half_angle_deg': required")
        return AngularCone(n, math.radians(float(data["half_angle_deg"])))
    if kind == "polyhedral":
        rays = data.get("rays")
        if not rays or any(len(r) != n for r in rays):
            raise InputError("field 'cone.rays': need rays of the polytope's dimension")
        return PolyhedralCone.from_rays(np.asarray(rays, dtype=float))
    raise InputError("field 'cone.type': must be 'angular' or 'polyhedral'")


def _polynomial(text):
    """Polynomial from JSON text or a file: {"1,2": coeff, ...}; coeff a number or [re, im]."""
    if text.strip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"field 'poly': malformed JSON: {exc.msg}") from exc
    else:
        data = _load_json(text, "poly")
    out = {}
    for key, val in data.items():
        exp = _ints(key, "poly")
        out[exp] = complex(*val) if isinstance(val, list) else complex(val)
    return out


def _dump(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    _write(text, out)


def _write(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    fields = list(rows[0].as_row().keys()) if rows else ["alpha"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.as_row())
    return buf.getvalue()


def _config(args) -> RunConfig:
    cfg = RunConfig(
        polytope=getattr(args, "polytope", None),
        m=getattr(args, "m", 1),
        gamma=_num(getattr(args, "gamma", "0"), "gamma"),
        cone=getattr(args, "cone", "auto"),
        margin=getattr(args, "margin", None),
        exact=getattr(args, "exact", True),
        out=getattr(args, "out", None),
        seed=getattr(args, "seed", 0),
    )
    cfg.validate()
    return cfg


def _setup(cfg: RunConfig):
    S = load_polytope(cfg.polytope)
    if not cfg.exact and S.exact:
        S = Polytope(S.V.tolist())
    gap = lattice_gap(S, cfg.m)
    cone = load_cone(cfg.cone, S.dim, gap.value, cfg.gamma)
    region = hull_region(S.scale(cfg.m), cone)
    return analysis.Setup(S, cfg.m, cfg.gamma, gap, cone, region, cfg.exact and S.exact)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args):
    cfg = _config(args)
    setup = _setup(cfg)
    rows = analysis.classify(setup.S, cfg.m, cfg.gamma, cfg.margin, exact=cfg.exact, setup=setup)
    if args.format == "csv":
        _write(_rows_csv(rows), cfg.out)
    else:
        _dump({"schema_version": SCHEMA_VERSION, "m": cfg.m, "gamma": cfg.gamma,
               "d_m": setup.gap.value, "rows": [r.as_row() for r in rows]}, cfg.out)
    return 0


def cmd_verify(args):
    cfg = _config(args)
    setup = _setup(cfg)
    if args.corollaries:
        lam = load_cone(args.lam, setup.S.dim) if args.lam else None
        rep = analysis.verify_corollaries(setup.S, cfg.m, cfg.gamma, lam, cfg.margin,
                                          exact=cfg.exact, setup=setup)
    else:
        rep = analysis.verify_theorem(setup.S, cfg.m, cfg.gamma, cfg.margin,
                                      exact=cfg.exact, setup=setup)
    _dump(rep.to_dict(), cfg.out)
    print("PASS" if rep.passed else "FAIL", file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_example41(args):
    try:
        res = analysis.example41(args.m, _num(args.a, "a"), _num(args.b, "b"), args.k,
                                 quadrature=not args.no_quad)
    except analysis.Example41Error as exc:
        raise InputError(str(exc)) from exc
    _dump(res.to_dict(), args.out)
    return 0


def cmd_norm(args):
    cfg = _config(args)
    S = load_polytope(cfg.polytope)
    alpha = _ints(args.alpha, "alpha")
    if len(alpha) != S.dim:
        raise InputError("field 'alpha': dimension does not match the polytope")
    W = WeightSpec(S, cfg.m, cfg.gamma)
    verdict = finiteness_lp(W, alpha, exact=None if cfg.exact else False,
                            early_exit=False)
    out = {"schema_version": SCHEMA_VERSION, "alpha": list(alpha), "status": str(verdict.status),
           "face_maxima": {k: float(v) for k, v in verdict.face_maxima}}
    if verdict.witness is not None:
        out["witness"] = list(verdict.witness)
    if args.method in ("closed", "both"):
        if cfg.gamma != 0:
            raise InputError("field 'method': closed form needs gamma = 0")
        cf = monomial_norm_closed_form(W, alpha)
        out["value"] = cf.value if cf.finite else "inf"
        out["per_cone"] = [{"vertex": [str(c) for c in v], "integral": t if math.isfinite(t) else "inf"}
                           for v, t in cf.per_cell]
    if args.method in ("quad", "both"):
        try:
            q = quadrature_norm(W, alpha)
            out["quadrature"] = {"value": q.value, "error": float(q.error), "radius": q.radius,
                                 "tail_bound": float(q.tail_bound)}
        except DivergentIntegralError as exc:
            out["quadrature"] = {"error": str(exc)}
        if "value" not in out and "value" in out["quadrature"]:
            out["value"] = out["quadrature"]["value"]
    _dump(out, cfg.out)
    return 0


def cmd_coeff(args):
    poly = _polynomial(args.poly)
    alpha = _ints(args.alpha, "alpha")
    try:
        window = analysis.CoefficientWindow(_floats(args.sigma, "sigma"), _floats(args.tau, "tau"))
    except ValueError as exc:
        raise InputError(f"field 'sigma/tau': {exc}") from exc
    if len(alpha) != window.dim or any(len(e) != window.dim for e in poly):
        raise InputError("field 'alpha': dimensions of alpha, window and polynomial differ")
    a = analysis.taylor_coefficient(poly, alpha, window)
    out = {"schema_version": SCHEMA_VERSION, "alpha": list(alpha),
           "coefficient": [a.real, a.imag], "abs": abs(a)}
    if args.polytope:
        cfg = _config(args)
        S = load_polytope(cfg.polytope)
        W = WeightSpec(S, cfg.m, cfg.gamma)
        norm = analysis.polynomial_norm(poly, W)
        out["norm_psi"] = norm
        out["bound"] = analysis.coefficient_bound(norm, W, alpha, window, args.t)
        out["t"] = args.t
    _dump(out, args.out)
    return 0


def cmd_decay(args):
    cfg = _config(args)
    setup = _setup(cfg)
    alpha = _ints(args.alpha, "alpha")
    try:
        curve = analysis.decay_demo(setup.S, cfg.m, cfg.gamma, alpha, setup=setup)
    except analysis.DecayPreconditionError as exc:
        raise InputError(f"field 'alpha': {exc}") from exc
    _dump(curve.to_dict(), cfg.out)
    return 0 if curve.below and curve.monotone_final_decade else 1


def cmd_figure(args):
    spec = FigureSpec(args.kind, args.scale, not args.no_annotations)
    if args.example41:
        a, b = _num(args.a, "a"), _num(args.b, "b")
        try:
            analysis._check_example_params(args.m, a, b, None)
        except analysis.Example41Error as exc:
            raise InputError(str(exc)) from exc
        S = analysis.example41_polytope(a, b)
        labels = {(0, 0): "0", (args.m * a, 0): "(ma, 0)",
                  (args.m * b, args.m * (1 - b)): "(mb, m(1-b))", (0, args.m): "(0, m)"}
        title = f"m S for the quadrilateral, m={args.m}"
    else:
        S = load_polytope(args.polytope)
        labels, title = None, "m S"
    if S.dim != 2:
        raise InputError("figures are 2D only")
    gamma = _num(args.gamma, "gamma")
    gap = lattice_gap(S, args.m)
    cone = load_cone(args.cone, 2, gap.value, gamma)
    mS = S.scale(args.m)
    region = hull_region(mS, cone)
    svg = figure_svg(mS, region, cone, labels, spec, title)
    _write(svg, args.out)
    return 0


def cmd_suite(args):
    """Seeded random suites of the theorem (random polygons) or the lower-set corollary."""
    rng = np.random.default_rng(args.seed)
    results = []
    for i in range(args.count):
        S = analysis.random_lower_set_2d(rng) if args.kind == "lower" else analysis.random_polytope_2d(rng)
        for m in range(1, args.max_m + 1):
            gap = lattice_gap(S, m)
            for gamma in ([0] if args.kind == "lower" else [0, gap.value / 2]):
                if args.kind == "lower":
                    rep = analysis.verify_corollaries(S, m, gamma)
                    ok = rep.passed and rep.cases["i"]
                else:
                    rep = analysis.verify_theorem(S, m, gamma)
                    ok = rep.passed
                results.append({"index": i, "polytope": S.to_json(), "m": m, "gamma": float(gamma),
                                "d_m": gap.value, "result": "PASS" if ok else "FAIL",
                                "violations": [list(r.alpha) for r in rep.violations]})
    fails = sum(r["result"] == "FAIL" for r in results)
    _dump({"schema_version": SCHEMA_VERSION, "kind": args.kind, "seed": args.seed,
           "runs": len(results), "failures": fails, "results": results}, args.out)
    return 0 if fails == 0 else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slelong", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, polytope_required=True):
        sp.add_argument("--polytope", required=polytope_required, help="polytope JSON file")
        sp.add_argument("-m", type=int, default=1)
        sp.add_argument("--gamma", default="0", help="decimal or p/q")
        sp.add_argument("--cone", default="auto", help="'auto' or a cone JSON file")
        sp.add_argument("--margin", type=float, default=None)
        sp.add_argument("--exact", dest="exact", action="store_true", default=True,
                        help="rational arithmetic for membership decisions (default)")
        sp.add_argument("--no-exact", dest="exact", action="store_false")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("classify", help="classify lattice exponents")
    common(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify", help="check the finiteness => hull implication")
    common(sp)
    sp.add_argument("--corollaries", action="store_true")
    sp.add_argument("--lambda", dest="lam", default=None, help="cone JSON for the Gamma-convexity case")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("example41", help="the quadrilateral counterexample")
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-a", required=True)
    sp.add_argument("-b", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--no-quad", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_example41)

    sp = sub.add_parser("norm", help="weighted norm of a monomial")
    common(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--method", choices=("closed", "quad", "both"), default="both")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("coeff", help="Taylor coefficient over a polyannulus, optional bound")
    common(sp, polytope_required=False)
    sp.add_argument("--poly", required=True, help='JSON like {"1,2": 1} or a file')
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.set_defaults(func=cmd_coeff)

    sp = sub.add_parser("decay", help="coefficient bound along t K for an exponent outside the hull")
    common(sp)
    sp.add_argument("--alpha", required=True)
    sp.set_defaults(func=cmd_decay)

    sp = sub.add_parser("figure", help="SVG figure (2D only)")
    sp.add_argument("--polytope")
    sp.add_argument("--example41", action="store_true")
    sp.add_argument("-a", default="1/10")
    sp.add_argument("-b", default="4/5")
    sp.add_argument("-m", type=int, default=1)
    sp.add_argument("--gamma", default="0")
    sp.add_argument("--cone", default="auto")
    sp.add_argument("--kind", choices=("all", "hull", "fan", "cone"), default="all")
    sp.add_argument("--scale", type=float, default=80.0)
    sp.add_argument("--no-annotations", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_figure)

    sp = sub.add_parser("suite", help="seeded random property suite")
    sp.add_argument("--kind", choices=("theorem", "lower"), default="theorem")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--max-m", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, HypothesisError, GeometryError, analysis.Example41Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
