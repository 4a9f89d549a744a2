"""Univariate convex building blocks with closed-form derivatives to order 3.

Every piece exposes ``derivs(t) -> array([f, f', f'', f'''])`` and an open
interval of definition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def flat_bump(s):
    """Derivatives of ``exp(-1/s) s^4`` (zero for s <= 0), orders 0..3.

    The function is flat at 0: every derivative vanishes there.
    """
    if s <= 0.0:
        return np.zeros(4)
    e = math.exp(-1.0 / s)
    return np.array([
        e * s**4,
        e * (s**2 + 4.0 * s**3),
        e * (1.0 + 6.0 * s + 12.0 * s**2),
        e * (s**-2 + 6.0 / s + 18.0 + 24.0 * s),
    ])


class OneDPiece:
    interval = (-np.inf, np.inf)

    def derivs(self, t) -> np.ndarray:
        raise NotImplementedError

    def contains(self, t) -> bool:
        lo, hi = self.interval
        return lo < t < hi

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass
class QuadraticPiece(OneDPiece):
    """k t^2."""

    k: float = 1.0

    def derivs(self, t):
        return np.array([self.k * t * t, 2.0 * self.k * t, 2.0 * self.k, 0.0])

    def to_dict(self):
        return {"kind": "quadratic", "k": self.k}


@dataclass
class ExpPiece(OneDPiece):
    """scale * exp(rate * t)."""

    scale: float = 1.0
    rate: float = 1.0

    def derivs(self, t):
        e = self.scale * math.exp(self.rate * t)
        r = self.rate
        return np.array([e, r * e, r * r * e, r**3 * e])

    def to_dict(self):
        return {"kind": "exp", "scale": self.scale, "rate": self.rate}


@dataclass
class PowerPiece(OneDPiece):
    """coefficient * t^degree with even degree >= 2.

    For degree > 2 the second derivative vanishes at 0, so a power piece is
    normally summed with a quadratic on the same axis.
    """

    degree: int = 4
    coefficient: float = 1.0

    def __post_init__(self):
        if self.degree < 2 or self.degree % 2:
            raise ValueError("power piece needs an even degree >= 2")

    def derivs(self, t):
        d, c = self.degree, self.coefficient
        return np.array([
            c * t**d,
            c * d * t ** (d - 1),
            c * d * (d - 1) * t ** (d - 2),
            c * d * (d - 1) * (d - 2) * t ** (d - 3) if d > 2 else 0.0,
        ])

    def to_dict(self):
        return {"kind": "power", "degree": self.degree, "coefficient": self.coefficient}


@dataclass
class LogBarrierPiece(OneDPiece):
    """0.5 * a(t) (log a(t) - 1) with a(t) = slope * t + intercept > 0.

    The derivative is 0.5 * slope * log a(t), which blows up at the zero of a.
    """

    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self):
        if self.slope == 0.0:
            raise ValueError("log-barrier slope must be nonzero")
        root = -self.intercept / self.slope
        self.interval = (root, np.inf) if self.slope > 0 else (-np.inf, root)

    def derivs(self, t):
        m = self.slope
        a = m * t + self.intercept
        if a <= 0.0:
            raise ValueError(f"log-barrier evaluated outside its interval at t={t}")
        la = math.log(a)
        return np.array([0.5 * a * (la - 1.0), 0.5 * m * la, 0.5 * m * m / a, -0.5 * m**3 / (a * a)])

    def to_dict(self):
        return {"kind": "log_barrier", "slope": self.slope, "intercept": self.intercept}


@dataclass
class FlatGluedPiece(OneDPiece):
    """k t^2 + mu * flat_bump(t - p): tangent to k t^2 at p to infinite order."""

    k: float = 1.0
    p: float = 0.0
    mu: float = 1.0

    def derivs(self, t):
        out = np.array([self.k * t * t, 2.0 * self.k * t, 2.0 * self.k, 0.0])
        return out + self.mu * flat_bump(t - self.p)

    def to_dict(self):
        return {"kind": "flat_glued", "k": self.k, "p": self.p, "mu": self.mu}


PIECE_KINDS = {
    "quadratic": QuadraticPiece,
    "exp": ExpPiece,
    "power": PowerPiece,
    "log_barrier": LogBarrierPiece,
    "flat_glued": FlatGluedPiece,
}


def piece_from_dict(d: dict) -> OneDPiece:
    d = dict(d)
    kind = d.pop("kind")
    d.pop("axis", None)
    lo_hi = d.pop("interval", None)
    piece = PIECE_KINDS[kind](**d)
    if lo_hi is not None:
        lo, hi = (float(v) for v in lo_hi)
        plo, phi = piece.interval
        piece.interval = (max(lo, plo), min(hi, phi))
    return piece
