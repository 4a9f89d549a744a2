"""Strictly convex functions with exact derivatives up to order three."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NotConvexHere, OutOfDomain
from .domains import Box, Domain, Intersection, rotate_domain
from .pieces import OneDPiece


@dataclass
class Jet3:
    """Value, gradient, Hessian and third-derivative tensor at a point."""

    point: np.ndarray
    value: float
    grad: np.ndarray
    hess: np.ndarray
    third: np.ndarray

    @property
    def dim(self):
        return self.grad.size


class ConvexFunction:
    """Base class.

    Subclasses set ``dim`` and ``domain`` and implement ``_jet(x)`` returning
    ``(value, grad, hess, third)`` without any checks.
    """

    dim: int
    domain: Domain

    def _jet(self, x):
        raise NotImplementedError

    def jet(self, x) -> Jet3:
        return eval_jet3(self, x)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if not self.domain.contains(x):
            raise OutOfDomain(x)
        return self._jet(x)[0]

    def gradient(self, x):
        return self.jet(x).grad

    def hessian(self, x):
        return self.jet(x).hess

    def interior_point(self):
        """A point inside the domain, used to seed iterative solvers."""
        lo, hi = self.domain.bounding_box(1.0)
        mid = 0.5 * (lo + hi)
        if self.domain.contains(mid):
            return mid
        return self.domain.sample(1)[0]

    def to_spec(self) -> dict:
        raise NotImplementedError


def eval_jet3(f: ConvexFunction, x) -> Jet3:
    """Evaluate the 3-jet of `f` at `x`.

    Raises `OutOfDomain` outside the domain and `NotConvexHere` if the Hessian
    is not positive definite there.
    """
    x = np.asarray(x, dtype=float).reshape(f.dim)
    if not f.domain.contains(x):
        raise OutOfDomain(x)
    v, g, H, T = f._jet(x)
    H = 0.5 * (H + H.T)
    min_eig = np.linalg.eigvalsh(H)[0]
    if not min_eig > 0.0:
        raise NotConvexHere(x, min_eig)
    return Jet3(x, float(v), np.asarray(g, dtype=float), H, np.asarray(T, dtype=float))


@dataclass
class Quadratic(ConvexFunction):
    """k |x|^2."""

    k: float
    dim: int
    domain: Domain = None

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.domain is None:
            self.domain = Box.whole(self.dim)

    def _jet(self, x):
        n = self.dim
        return (self.k * x @ x, 2.0 * self.k * x, 2.0 * self.k * np.eye(n), np.zeros((n, n, n)))

    def to_spec(self):
        return {"kind": "quadratic", "dim": self.dim, "params": {"k": self.k}}


@dataclass
class SeparableSum(ConvexFunction):
    """Sum of univariate pieces, each acting on one coordinate axis.

    Several pieces may share an axis; only their sum has to be convex.
    """

    pieces: Sequence[tuple[int, OneDPiece]]
    dim: int
    domain: Domain = None

    def __post_init__(self):
        axes = {a for a, _ in self.pieces}
        if not axes <= set(range(self.dim)):
            raise ValueError("piece axis out of range")
        if self.domain is None:
            iv = np.tile([-np.inf, np.inf], (self.dim, 1))
            for a, p in self.pieces:
                lo, hi = p.interval
                iv[a, 0] = max(iv[a, 0], lo)
                iv[a, 1] = min(iv[a, 1], hi)
            self.domain = Box(iv)

    def _jet(self, x):
        n = self.dim
        v = 0.0
        g = np.zeros(n)
        H = np.zeros((n, n))
        T = np.zeros((n, n, n))
        for a, p in self.pieces:
            d = p.derivs(x[a])
            v += d[0]
            g[a] += d[1]
            H[a, a] += d[2]
            T[a, a, a] += d[3]
        return v, g, H, T

    def to_spec(self):
        pieces = []
        for a, p in self.pieces:
            d = {"axis": a, **p.to_dict()}
            if type(p).interval != p.interval:
                d["interval"] = [float(p.interval[0]), float(p.interval[1])]
            pieces.append(d)
        return {"kind": "separable", "dim": self.dim, "params": {"pieces": pieces}}


@dataclass
class RotatedCompose(ConvexFunction):
    """x -> inner(B x) for an orthogonal B.

    Derivatives transform as grad = B^T g(Bx), H = B^T H(Bx) B and
    T_ijk = B_ai B_bj B_ck T_abc(Bx). If `inner` is separable, the columns of
    B^T are the characteristic directions of the composition.
    """

    B: np.ndarray
    inner: ConvexFunction
    domain: Domain = None

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        self.dim = self.inner.dim
        if not np.allclose(self.B.T @ self.B, np.eye(self.dim), atol=1e-12):
            raise ValueError("B must be orthogonal")
        if self.domain is None:
            self.domain = rotate_domain(self.inner.domain, self.B)

    def _jet(self, x):
        B = self.B
        v, g, H, T = self.inner._jet(B @ x)
        return (
            v,
            B.T @ g,
            B.T @ H @ B,
            np.einsum("abc,ai,bj,ck->ijk", T, B, B, B),
        )

    def to_spec(self):
        return {
            "kind": "rotated",
            "dim": self.dim,
            "params": {"matrix": self.B.tolist(), "inner": self.inner.to_spec()},
        }


def rotation2(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotated(theta, inner: ConvexFunction) -> RotatedCompose:
    """Planar composition whose characteristic frame is rotation2(theta).

    This is inner(R(theta)^T x): the axes of `inner` are turned by +theta.
    """
    return RotatedCompose(rotation2(theta).T, inner)


@dataclass
class ExpAffine(ConvexFunction):
    """sum_m w_m exp(a_m . x) + k |x|^2 with w_m > 0."""

    vectors: np.ndarray
    weights: np.ndarray
    k: float = 0.0
    domain: Domain = None

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.dim = self.vectors.shape[1]
        if self.weights.size != self.vectors.shape[0]:
            raise ValueError("one weight per exponent vector")
        if np.any(self.weights <= 0) or self.k < 0:
            raise ValueError("weights must be positive and k non-negative")
        if self.domain is None:
            self.domain = Box.whole(self.dim)

    def _jet(self, x):
        A = self.vectors
        e = self.weights * np.exp(A @ x)
        n = self.dim
        v = e.sum() + self.k * x @ x
        g = A.T @ e + 2.0 * self.k * x
        H = np.einsum("m,mi,mj->ij", e, A, A) + 2.0 * self.k * np.eye(n)
        T = np.einsum("m,mi,mj,mk->ijk", e, A, A, A)
        return v, g, H, T

    def to_spec(self):
        return {
            "kind": "exp_affine",
            "dim": self.dim,
            "params": {"vectors": self.vectors.tolist(), "weights": self.weights.tolist(), "k": self.k},
        }


@dataclass
class Custom(ConvexFunction):
    """Sum of closed-form terms; only the total needs to be strictly convex."""

    terms: Sequence[ConvexFunction]
    domain: Domain = field(default=None)

    def __post_init__(self):
        self.dim = self.terms[0].dim
        if any(t.dim != self.dim for t in self.terms):
            raise ValueError("terms disagree in dimension")
        if self.domain is None:
            doms = [t.domain for t in self.terms]
            self.domain = doms[0] if len(doms) == 1 else Intersection(doms)

    def _jet(self, x):
        parts = [t._jet(x) for t in self.terms]
        return tuple(sum(p[i] for p in parts) for i in range(4))

    def to_spec(self):
        return {"kind": "custom", "dim": self.dim, "params": {"terms": [t.to_spec() for t in self.terms]}}
