"""Open domains in R^n: boxes, polytopes and predicate-defined regions.

All domains share one sampler: an unscrambled Halton sequence over a bounding
box, rejected against membership. No RNG is involved, so samples are
reproducible across runs and machines.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.stats import qmc

DEFAULT_RADIUS = 5.0
DEFAULT_SAMPLES = 200


def halton_points(lo, hi, n, skip=1):
    """`n` Halton points mapped into the box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    sampler = qmc.Halton(d=lo.size, scramble=False)
    if skip:
        sampler.fast_forward(skip)
    u = sampler.random(n)
    return lo + u * (hi - lo)


class Domain:
    """Base class. Subclasses implement `contains` and `bounding_box`."""

    dim: int

    def contains(self, x) -> bool:
        raise NotImplementedError

    def bounding_box(self, radius=DEFAULT_RADIUS):
        raise NotImplementedError

    def sample(self, n=DEFAULT_SAMPLES, radius=DEFAULT_RADIUS, max_draws=200_000):
        """Deterministic low-discrepancy points inside the domain.

        Unbounded directions are truncated to ``[-radius, radius]``.
        """
        lo, hi = self.bounding_box(radius)
        out = []
        skip = 1
        batch = max(4 * n, 64)
        while len(out) < n and skip < max_draws:
            pts = halton_points(lo, hi, batch, skip=skip)
            skip += batch
            for p in pts:
                if self.contains(p):
                    out.append(p)
                    if len(out) == n:
                        break
        if len(out) < n:
            raise RuntimeError(f"could only draw {len(out)} of {n} points from {self!r}")
        return np.array(out)


@dataclass
class Box(Domain):
    """Product of open intervals; bounds may be infinite."""

    intervals: np.ndarray

    def __post_init__(self):
        self.intervals = np.asarray(self.intervals, dtype=float).reshape(-1, 2)
        if np.any(self.intervals[:, 0] >= self.intervals[:, 1]):
            raise ValueError("empty interval in box")
        self.dim = self.intervals.shape[0]

    @classmethod
    def whole(cls, dim):
        return cls(np.tile([-np.inf, np.inf], (dim, 1)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x > self.intervals[:, 0]) and np.all(x < self.intervals[:, 1]))

    def bounding_box(self, radius=DEFAULT_RADIUS):
        lo = np.maximum(self.intervals[:, 0], -radius)
        hi = np.minimum(self.intervals[:, 1], radius)
        return lo, hi

    def as_polytope(self) -> "Polytope":
        normals, offsets = [], []
        for i, (lo, hi) in enumerate(self.intervals):
            e = np.zeros(self.dim)
            e[i] = 1.0
            if np.isfinite(lo):
                normals.append(e)
                offsets.append(-lo)
            if np.isfinite(hi):
                normals.append(-e)
                offsets.append(hi)
        return Polytope(np.array(normals).reshape(-1, self.dim), np.array(offsets), dim=self.dim)


@dataclass
class Polytope(Domain):
    """Points where finitely many affine maps ``a_i . x + c_i`` are positive.

    The closure need not be compact. An empty list of maps is all of R^n.
    """

    normals: np.ndarray
    offsets: np.ndarray
    dim: int = None

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=float).reshape(-1)
        if self.dim is None:
            self.dim = np.asarray(self.normals).shape[-1]
        self.normals = np.asarray(self.normals, dtype=float).reshape(-1, self.dim)
        if self.normals.shape[0] != self.offsets.size:
            raise ValueError("normals and offsets disagree in length")

    def affine_values(self, x):
        return self.normals @ np.asarray(x, dtype=float) + self.offsets

    def contains(self, x) -> bool:
        return bool(np.all(self.affine_values(x) > 0.0))

    def bounding_box(self, radius=DEFAULT_RADIUS):
        lo = np.full(self.dim, -radius)
        hi = np.full(self.dim, radius)
        if self.normals.shape[0] == 0:
            return lo, hi
        bounds = [(-radius, radius)] * self.dim
        for i in range(self.dim):
            for sign, store in ((1.0, lo), (-1.0, hi)):
                c = np.zeros(self.dim)
                c[i] = sign
                res = linprog(c, A_ub=-self.normals, b_ub=self.offsets, bounds=bounds, method="highs")
                if res.status == 0:
                    store[i] = res.x[i]
        return lo, hi

    def pullback(self, B) -> "Polytope":
        """The set {x : B x in self}."""
        B = np.asarray(B, dtype=float)
        return Polytope(self.normals @ B, self.offsets.copy(), dim=B.shape[1])

    def scaled(self, s) -> "Polytope":
        """The set {s x : x in self}, s > 0."""
        return Polytope(self.normals.copy(), self.offsets * s, dim=self.dim)


@dataclass
class PredicateDomain(Domain):
    """Region given by a membership callable and a sampling box."""

    dim: int
    predicate: Callable = field(repr=False)
    box: tuple = None

    def contains(self, x) -> bool:
        return bool(self.predicate(np.asarray(x, dtype=float)))

    def bounding_box(self, radius=DEFAULT_RADIUS):
        if self.box is None:
            return np.full(self.dim, -radius), np.full(self.dim, radius)
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        return np.maximum(lo, -radius), np.minimum(hi, radius)


@dataclass
class Intersection(Domain):
    parts: Sequence[Domain]

    def __post_init__(self):
        self.dim = self.parts[0].dim

    def contains(self, x) -> bool:
        return all(p.contains(x) for p in self.parts)

    def bounding_box(self, radius=DEFAULT_RADIUS):
        boxes = [p.bounding_box(radius) for p in self.parts]
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        return lo, hi


def rotate_domain(domain: Domain, B) -> Domain:
    """The set {x : B x in domain}."""
    B = np.asarray(B, dtype=float)
    if isinstance(domain, Box):
        domain = domain.as_polytope()
    if isinstance(domain, Polytope):
        return domain.pullback(B)
    return PredicateDomain(domain.dim, lambda x: domain.contains(B @ x))
