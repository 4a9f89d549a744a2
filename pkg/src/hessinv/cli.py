"""Command-line front end.

Exit codes: 0 when every check passed, 1 when a mathematical check failed,
2 on usage or I/O errors. Reports are deterministic: rows are sorted and
floats are printed with 12 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog
from .errors import (
    ConvexityCertificateFailed,
    CurveLeavesDomain,
    EquivalenceViolation,
    HessinvError,
    IntegratorToleranceExceeded,
    RegionOverlap,
    SpecError,
    UnexpectedStratum,
)
from .funcspace import Intersection, domain_from_spec, function_from_spec, load_spec
from .matgeo import REL_GAP
from .propi import TOL_NONZERO, TOL_ZERO, Verdict

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = (
    "check-propi",
    "christoffel",
    "jets2d",
    "characteristics",
    "lift",
    "legendre",
    "handles-build",
    "handles-check",
    "poisson-commute",
    "report-all",
)


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    builtin: str | None = None
    domain: str | None = None
    samples: int = 200
    tol_zero: float = TOL_ZERO
    tol_nonzero: float = TOL_NONZERO
    rel_gap: float = REL_GAP
    out: str | None = None
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples < 1:
            raise SpecError("--samples must be at least 1")
        if min(self.tol_zero, self.tol_nonzero, self.rel_gap) <= 0:
            raise SpecError("tolerances must be positive")
        if (self.spec is None) == (self.builtin is None):
            raise SpecError("give exactly one of --spec and --builtin")


@dataclass
class Report:
    command: str
    rows: list
    summary: dict
    ok: bool
    applicable: bool = True

    @property
    def status(self):
        if not self.applicable:
            return "NOT_APPLICABLE"
        return "PASS" if self.ok else "FAIL"


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Verdict):
        return v.value
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def _point_cols(x, prefix="x"):
    return {f"{prefix}{i + 1}": float(c) for i, c in enumerate(np.asarray(x).ravel())}


def _sorted(rows):
    return sorted(rows, key=lambda r: [fmt(v) if not isinstance(v, (float, np.floating)) else float(v)
                                       for v in r.values()])


def load_function(cfg: RunConfig):
    if cfg.builtin is not None:
        if cfg.builtin not in catalog.CATALOG:
            raise SpecError(f"unknown builtin {cfg.builtin!r}; choose from {sorted(catalog.CATALOG)}")
        f = catalog.get(cfg.builtin)
    else:
        f = function_from_spec(load_spec(cfg.spec))
    if cfg.domain is not None:
        f.domain = Intersection([f.domain, domain_from_spec(load_spec(cfg.domain))])
    return f


def samples_for(f, cfg):
    return f.domain.sample(cfg.samples)


# -- commands ---------------------------------------------------------------

def cmd_check_propi(f, cfg):
    from .propi import symmetry_equiv_check

    rep = symmetry_equiv_check(f, samples_for(f, cfg), cfg.tol_zero, cfg.tol_nonzero)
    rows = []
    for r in rep.rows:
        status = "PASS" if r.verdict is Verdict.ZERO else "FAIL"
        rows.append({**_point_cols(r.point), "residual": r.residual, "defect": r.defect,
                     "commutator": r.commutator, "verdict": r.verdict, "status": status})
    summary = {"samples": len(rows), "max_residual": rep.max_residual,
               "disagreements": len(rep.disagreements), "property_I": rep.all_zero}
    return Report(cfg.command, _sorted(rows), summary, rep.all_zero)


def cmd_christoffel(f, cfg):
    from .propi import cartan_subalgebra_check, christoffel

    rows, ok = [], True
    for x in samples_for(f, cfg):
        c = cartan_subalgebra_check(f, x, cfg.tol_zero, cfg.tol_nonzero)
        ch = christoffel(f, x)
        sym = c["verdict"] is Verdict.ZERO
        ok &= sym
        rows.append({**_point_cols(x), "max_gamma": float(np.max(np.abs(ch.gammas))), "defect": c["defect"],
                     "commutator_inverse": c["commutator_inverse"], "commutator": c["commutator"],
                     "verdict": c["verdict"], "status": "PASS" if sym else "FAIL"})
    return Report(cfg.command, _sorted(rows), {"samples": len(rows), "symmetric": ok}, ok)


def cmd_jets2d(f, cfg):
    from .errors import BasePointHit
    from .funcspace import eval_jet3
    from .jets2d import Jet2D, cubics, quadrics, slope_constancy_check

    if f.dim != 2:
        raise SpecError("jets2d needs a planar function")
    xs = samples_for(f, cfg)
    rows = []
    for x in xs:
        j = Jet2D.from_jet3(eval_jet3(f, x))
        q, c = quadrics(j), cubics(j)
        rows.append({**_point_cols(x), "Q1": q[0], "Q2": q[1], "C1": c[0], "C2": c[1]})
    try:
        rep = slope_constancy_check(f, xs)
        summary = {"samples": len(xs), "angle": rep.angle, "spread": rep.spread, "constant_slope": rep.passed}
        ok = rep.passed
    except BasePointHit as exc:
        # umbilic sample: the slope is undefined, so the check does not apply
        point = ";".join(fmt(float(v)) for v in exc.point)
        return Report(cfg.command, _sorted(rows), {"samples": len(xs), "base_point": point}, True, False)
    return Report(cfg.command, _sorted(rows), summary, ok)


def cmd_characteristics(f, cfg):
    from .connection import characteristic_recovery, property_c_check

    xs = samples_for(f, cfg)
    rec = characteristic_recovery(f, xs)
    rows = []
    vel = np.ones(f.dim) / math.sqrt(f.dim)
    for x in xs[: min(len(xs), 50)]:
        pc = property_c_check(f, x, vel, rel_gap=cfg.rel_gap)
        rows.append({**_point_cols(x), "tangency_residual": pc.residual, "found": pc.found})
    summary = {
        "found": rec.B is not None,
        "max_offdiag": rec.max_offdiag,
        "optimized_min": rec.optimized_min,
        "B": fmt(json.dumps([[float(format(v, ".12g")) for v in row] for row in rec.best_frame])),
    }
    if rec.angle is not None:
        summary["angle"] = rec.angle
    return Report(cfg.command, _sorted(rows), summary, rec.B is not None)


def _vector(text, n):
    v = np.array([float(t) for t in text.split(",")])
    if v.size != n:
        raise SpecError(f"expected {n} comma-separated numbers, got {text!r}")
    return v


def cmd_lift(f, cfg):
    from .connection import INTEGRATOR_TOL, Polyline, Segment, horizontal_lift, orthonormal_diagonal_frame

    ex = cfg.extra
    if ex.get("points"):
        pts = np.array([_vector(p, f.dim) for p in ex["points"].split(";")])
        curve = Polyline(pts)
    else:
        x0 = _vector(ex["start"], f.dim) if ex.get("start") else f.interior_point()
        d = _vector(ex["direction"], f.dim) if ex.get("direction") else np.eye(f.dim)[0] * 0.1
        curve = Segment(x0, d, float(ex.get("t_max") or 1.0))
    step = float(ex.get("step") or 1e-3)
    A0 = orthonormal_diagonal_frame(f.hessian(curve.position(0.0)))
    try:
        res = horizontal_lift(f, curve, A0, step=step)
    except IntegratorToleranceExceeded as exc:
        return Report(cfg.command, [], {"error": str(exc)}, False)
    n = f.dim
    rows = []
    for row in res.rows():
        t, *rest = row
        entries = rest[: n * n]
        d = {"t": t}
        d.update({f"A{i + 1}{j + 1}": entries[i * n + j] for i in range(n) for j in range(n)})
        d["orthonormality_drift"], d["c_drift"] = rest[n * n], rest[n * n + 1]
        rows.append(d)
    ok = res.max_orthonormality_drift < 10 * INTEGRATOR_TOL
    summary = {"steps": len(rows) - 1, "orthonormality_drift": res.max_orthonormality_drift,
               "c_drift": res.max_c_drift, "halving_error": res.halving_error}
    return Report(cfg.command, rows, summary, ok)


def cmd_legendre(f, cfg):
    from .legendre import conjugate_propi_invariance, hessian_duality_check, involution_check
    from .propi import classify

    xs = samples_for(f, cfg)
    inv = conjugate_propi_invariance(f, xs)
    sub = xs[: min(len(xs), 20)]
    duality = hessian_duality_check(f, sub)
    invol = involution_check(f, sub)
    rows = []
    for i, r in enumerate(inv.rows):
        agree = classify(r.residual, cfg.tol_zero, cfg.tol_nonzero) == classify(
            r.conjugate_residual, cfg.tol_zero, cfg.tol_nonzero)
        rows.append({**_point_cols(r.x), **_point_cols(r.y, "y"), "residual": r.residual,
                     "conjugate_residual": r.conjugate_residual, "preimage_error": r.preimage_error,
                     "status": "PASS" if agree else "FAIL"})
    inv_err = max(max(r.point_error, r.value_error) for r in invol)
    ok = all(r["status"] == "PASS" for r in rows) and max(duality) < 1e-8 and inv_err < 1e-8
    summary = {"max_conjugate_residual": inv.max_conjugate_residual, "max_duality_error": max(duality),
               "max_involution_error": inv_err}
    return Report(cfg.command, _sorted(rows), summary, ok)


def _family(f):
    from .handles import HandleFamily

    if not isinstance(f, HandleFamily):
        raise SpecError("this command needs a handle_family spec")
    return f


def cmd_handles_build(f, cfg):
    f = _family(f)
    rows = []
    for l, (h, prof) in enumerate(zip(f.domain.handles, f.profiles)):
        rows.append({"handle": l, **_point_cols(h.u, "u"), "p": h.p, "b": h.b,
                     "profile": prof.to_dict()["kind"], "certificate": prof.certify()})
    xs = samples_for(f, cfg)
    regions = {}
    for x in xs:
        r = f.domain.region(x)
        regions[r] = regions.get(r, 0) + 1
    summary = {"k": f.k, "handles": len(rows),
               "regions": ";".join(f"{k}:{v}" for k, v in sorted(regions.items()))}
    if cfg.extra.get("emit_spec"):
        Path(cfg.extra["emit_spec"]).write_text(json.dumps(f.to_spec(), indent=2, sort_keys=True) + "\n")
    return Report(cfg.command, rows, summary, True)


def cmd_handles_check(f, cfg):
    from .handles import conjugate_family, gluing_smoothness_check, no_common_characteristics_check, stratum_trace
    from .propi import symmetry_equiv_check

    f = _family(f)
    if cfg.extra.get("conjugate"):
        f = conjugate_family(f)
    xs = samples_for(f, cfg)
    rows = []
    rep = symmetry_equiv_check(f, xs, cfg.tol_zero, cfg.tol_nonzero)
    rows.append({"check": "property_I", "value": rep.max_residual, "status": "PASS" if rep.all_zero else "FAIL"})
    for l in range(len(f.domain.handles)):
        g = gluing_smoothness_check(f, l)
        rows.append({"check": f"gluing_{l}", "value": g.max_difference, "status": g.status})
    try:
        hist = stratum_trace(f, xs, cfg.rel_gap)
        detail = ";".join(f"{k}:{v}" for k, v in sorted((str(s), c) for s, c in hist.items()))
        rows.append({"check": "strata", "value": detail, "status": "PASS"})
    except UnexpectedStratum as exc:
        rows.append({"check": "strata", "value": str(exc), "status": "FAIL"})
    nc = no_common_characteristics_check(f)
    rows.append({"check": "no_common_characteristics", "value": nc.optimized_min, "status": nc.status})
    ok = all(r["status"] in ("PASS", "NotApplicable") for r in rows)
    return Report(cfg.command, rows, {"samples": len(xs), "conjugate": bool(cfg.extra.get("conjugate"))}, ok)


def cmd_poisson(f, cfg):
    from .poisson import commuting_equiv_check

    rep = commuting_equiv_check(f, samples_for(f, cfg), cfg.tol_zero, cfg.tol_nonzero)
    rows = [{**_point_cols(r.point), "bracket": r.bracket, "residual": r.residual,
             "conjugate_residual": r.conjugate_residual, "verdict": r.verdict,
             "status": "PASS" if r.verdict is Verdict.ZERO else "FAIL"} for r in rep.rows]
    summary = {"samples": len(rows), "max_bracket": rep.max_bracket, "commute": rep.all_zero,
               "disagreements": len(rep.disagreements)}
    return Report(cfg.command, _sorted(rows), summary, rep.all_zero)


def cmd_report_all(f, cfg):
    from .handles import HandleFamily

    cmds = ["check-propi", "christoffel", "characteristics", "legendre", "poisson-commute"]
    if f.dim == 2:
        cmds.insert(2, "jets2d")
    if isinstance(f, HandleFamily):
        cmds += ["handles-build", "handles-check"]
    rows, ok = [], True
    for c in cmds:
        sub = RunConfig(c, cfg.spec, cfg.builtin, cfg.domain, cfg.samples, cfg.tol_zero, cfg.tol_nonzero,
                        cfg.rel_gap, None, cfg.format, {})
        try:
            rep = HANDLERS[c](f, sub)
            status = rep.status
        except EquivalenceViolation as exc:
            status = f"FAIL ({exc})"
        ok &= status in ("PASS", "NOT_APPLICABLE")
        rows.append({"command": c, "status": status})
    return Report(cfg.command, rows, {"commands": len(rows)}, ok)


HANDLERS = {
    "check-propi": cmd_check_propi,
    "christoffel": cmd_christoffel,
    "jets2d": cmd_jets2d,
    "characteristics": cmd_characteristics,
    "lift": cmd_lift,
    "legendre": cmd_legendre,
    "handles-build": cmd_handles_build,
    "handles-check": cmd_handles_check,
    "poisson-commute": cmd_poisson,
    "report-all": cmd_report_all,
}


# -- output -----------------------------------------------------------------

def render(rep: Report, form: str) -> str:
    if form == "json":
        doc = {
            "command": rep.command,
            "status": rep.status,
            "summary": {k: fmt(v) for k, v in rep.summary.items()},
            "rows": [{k: fmt(v) for k, v in r.items()} for r in rep.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# command: {rep.command}\n")
    buf.write(f"# status: {rep.status}\n")
    for k, v in rep.summary.items():
        buf.write(f"# {k}: {fmt(v)}\n")
    if rep.rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rep.rows[0].keys()))
        for r in rep.rows:
            w.writerow([fmt(v) for v in r.values()])
    return buf.getvalue()


def build_parser():
    ap = argparse.ArgumentParser(prog="hessinv", description="Checks for Hessian metrics with property I.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--spec", help="function spec (JSON)")
        src.add_argument("--builtin", help=f"built-in function: {', '.join(sorted(catalog.CATALOG))}")
        p.add_argument("--domain", help="domain spec (JSON) intersected with the function's domain")
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--tol-zero", type=float, default=TOL_ZERO)
        p.add_argument("--tol-nonzero", type=float, default=TOL_NONZERO)
        p.add_argument("--rel-gap", type=float, default=REL_GAP)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "lift":
            p.add_argument("--start", help="segment start, comma separated")
            p.add_argument("--direction", help="segment velocity, comma separated")
            p.add_argument("--t-max", type=float)
            p.add_argument("--points", help="polyline vertices 'x,y;x,y;...'")
            p.add_argument("--step", type=float)
        if name == "handles-check":
            p.add_argument("--conjugate", action="store_true", help="check the Legendre conjugate family")
        if name == "handles-build":
            p.add_argument("--emit-spec", help="write the built family's spec here")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    extra = {k: getattr(ns, k) for k in ("start", "direction", "t_max", "points", "step", "conjugate", "emit_spec")
             if hasattr(ns, k)}
    try:
        cfg = RunConfig(ns.command, ns.spec, ns.builtin, ns.domain, ns.samples, ns.tol_zero, ns.tol_nonzero,
                        ns.rel_gap, ns.out, ns.format, extra)
        f = load_function(cfg)
        rep = HANDLERS[cfg.command](f, cfg)
    except (SpecError, OSError, CurveLeavesDomain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EquivalenceViolation, ConvexityCertificateFailed, RegionOverlap) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except HessinvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = render(rep, cfg.format)
    try:
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if rep.ok else EXIT_FAIL


def main():
    sys.exit(run())
