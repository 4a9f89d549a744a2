"""JSON function and domain specs.

Every spec has the shape ``{"kind": ..., "dim": n, "params": {...}}``.

Function kinds and their params:

* ``quadratic``: ``k`` (the function is k|x|^2).
* ``separable``: ``pieces``, a list of ``{"axis": i, "kind": ..., ...}`` with
  piece kinds ``quadratic(k)``, ``exp(scale, rate)``,
  ``power(degree, coefficient)``, ``log_barrier(slope, intercept)``,
  ``flat_glued(k, p, mu)``; an optional ``interval`` [lo, hi] narrows a piece.
* ``rotated``: ``inner`` (a function spec) and either ``angle`` (planar only:
  the characteristic frame is the rotation by this angle) or ``matrix`` (B,
  the function being x -> inner(B x)).
* ``exp_affine``: ``vectors``, ``weights``, optional ``k``.
* ``custom``: ``terms``, a list of function specs that are summed.
* ``handle_family``: see `hessinv.handles.family_from_spec`.

A function spec may carry a top-level ``domain`` (a domain spec) that narrows
its natural domain.

Domain kinds: ``box`` (``intervals``; ``null`` means unbounded) and
``polytope`` (``normals``, ``offsets``: the points with normals @ x + offsets > 0).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import SpecError
from .domains import Box, Domain, Intersection, Polytope
from .functions import ConvexFunction, Custom, ExpAffine, Quadratic, RotatedCompose, SeparableSum, rotation2
from .pieces import piece_from_dict


def _interval(pair):
    lo, hi = pair
    return [-np.inf if lo is None else float(lo), np.inf if hi is None else float(hi)]


def _json_float(v):
    return None if not np.isfinite(v) else float(v)


def domain_from_spec(spec: dict) -> Domain:
    kind = spec.get("kind")
    params = spec.get("params", {})
    try:
        if kind == "box":
            return Box(np.array([_interval(p) for p in params["intervals"]]))
        if kind == "polytope":
            dim = spec.get("dim") or len(params["normals"][0])
            return Polytope(params["normals"], params["offsets"], dim=dim)
        if kind == "polytope_with_handles":
            from ..handles import domain_from_params

            return domain_from_params(params, spec.get("dim"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {kind} domain spec: {exc}") from exc
    raise SpecError(f"unknown domain kind {kind!r}")


def domain_to_spec(domain: Domain) -> dict:
    if isinstance(domain, Box):
        iv = [[_json_float(lo), _json_float(hi)] for lo, hi in domain.intervals]
        return {"kind": "box", "dim": domain.dim, "params": {"intervals": iv}}
    if isinstance(domain, Polytope):
        return {
            "kind": "polytope",
            "dim": domain.dim,
            "params": {"normals": domain.normals.tolist(), "offsets": domain.offsets.tolist()},
        }
    if hasattr(domain, "to_spec"):
        return domain.to_spec()
    raise SpecError(f"domain {type(domain).__name__} has no JSON form")


def function_from_spec(spec: dict) -> ConvexFunction:
    try:
        f = _function(spec)
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SpecError(f"bad {spec.get('kind')!r} function spec: {exc}") from exc
    if "domain" in spec:
        f.domain = Intersection([f.domain, domain_from_spec(spec["domain"])])
    return f


def _function(spec):
    kind = spec.get("kind")
    params = spec.get("params", {})
    dim = spec.get("dim")
    if kind == "quadratic":
        return Quadratic(float(params["k"]), int(dim))
    if kind == "separable":
        pieces = [(int(p["axis"]), piece_from_dict(p)) for p in params["pieces"]]
        return SeparableSum(pieces, int(dim))
    if kind == "rotated":
        inner = function_from_spec(params["inner"])
        if "angle" in params:
            if inner.dim != 2:
                raise SpecError("'angle' is only meaningful in the plane; give 'matrix'")
            B = rotation2(float(params["angle"])).T
        else:
            B = np.asarray(params["matrix"], dtype=float)
        return RotatedCompose(B, inner)
    if kind == "exp_affine":
        return ExpAffine(params["vectors"], params["weights"], float(params.get("k", 0.0)))
    if kind == "custom":
        return Custom([function_from_spec(t) for t in params["terms"]])
    if kind == "handle_family":
        from ..handles import family_from_spec

        return family_from_spec(spec)
    raise SpecError(f"unknown function kind {kind!r}")


def load_spec(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
