"""Planar jet space: the quadric and cubic systems and slope constancy.

Jet coordinates follow the usual naming
chi = phi_11, tau = phi_12, zeta = phi_22,
upsilon = phi_111, nu = phi_112, omega = phi_122, xi = phi_222.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

from .errors import BasePointHit
from .funcspace import ConvexFunction, Jet3, eval_jet3


@dataclass
class Jet2D:
    chi: float
    tau: float
    zeta: float
    upsilon: float
    nu: float
    omega: float
    xi: float

    @classmethod
    def from_jet3(cls, jet: Jet3) -> "Jet2D":
        if jet.dim != 2:
            raise ValueError("Jet2D needs a planar jet")
        H, T = jet.hess, jet.third
        return cls(H[0, 0], H[0, 1], H[1, 1], T[0, 0, 0], T[0, 0, 1], T[0, 1, 1], T[1, 1, 1])

    @property
    def det(self):
        return self.chi * self.zeta - self.tau**2

    @property
    def convex(self) -> bool:
        return self.det > 0 and self.chi + self.zeta > 0

    def order3(self):
        return np.array([self.upsilon, self.nu, self.omega, self.xi])


def quadrics(j: Jet2D):
    """(Q1, Q2); both vanish exactly when the Christoffel matrices are symmetric."""
    Q1 = (j.zeta - j.chi) * j.nu + j.tau * (j.upsilon - j.omega)
    Q2 = (j.zeta - j.chi) * j.omega + j.tau * (j.nu - j.xi)
    return Q1, Q2


def cubics(j: Jet2D):
    """The two cubic polynomials of the inverse-Hessian system, term by term."""
    chi, tau, zeta, ups, nu, om, xi = astuple(j)
    d = chi * zeta - tau**2
    X = nu * zeta + chi * xi - 2 * tau * om
    Y = ups * zeta + chi * om - 2 * tau * nu
    C1 = xi * d - zeta * X + nu * d - tau * Y
    C2 = -om * d + tau * X - ups * d + chi * Y
    return C1, C2


def cubic_from_quadric_matrix(j: Jet2D):
    """Matrix M with (C1, C2) = M (Q1, Q2); det M = chi zeta - tau^2."""
    return np.array([[-j.zeta, j.tau], [j.tau, -j.chi]])


def _linear_rows(j: Jet2D, fn):
    """Coefficients of fn's two outputs as linear forms in (upsilon, nu, omega, xi)."""
    rows = np.zeros((2, 4))
    for m in range(4):
        e = np.zeros(4)
        e[m] = 1.0
        rows[:, m] = fn(Jet2D(j.chi, j.tau, j.zeta, *e))
    return rows


def quadric_matrix(j: Jet2D):
    return _linear_rows(j, quadrics)


def cubic_matrix(j: Jet2D):
    return _linear_rows(j, cubics)


def random_convex_jets(count, box=2.0, seed=0):
    """Order-2 parts uniform in [-box, box]^3 rejected into the convexity region."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        chi, tau, zeta = rng.uniform(-box, box, 3)
        if chi * zeta - tau**2 > 0 and chi + zeta > 0:
            out.append(Jet2D(chi, tau, zeta, *rng.uniform(-box, box, 4)))
    return out


def null_space_jet(j: Jet2D, rows, coeffs):
    """Replace the order-3 part of `j` by a combination of ker(rows)."""
    _, s, vt = np.linalg.svd(rows)
    kernel = vt[np.sum(s > 1e-12 * s[0]):]
    o3 = np.asarray(coeffs)[: kernel.shape[0]] @ kernel
    return Jet2D(j.chi, j.tau, j.zeta, *o3)


def slope_vector(H):
    return np.array([H[1, 1] - H[0, 0], H[0, 1]])


def characteristic_angle(H) -> float:
    """Angle in [0, pi/2) of the eigenframe of a planar symmetric H."""
    theta = 0.5 * np.arctan2(2.0 * H[0, 1], H[0, 0] - H[1, 1])
    return float(np.mod(theta, np.pi / 2))


@dataclass
class SlopeReport:
    points: np.ndarray
    angles: np.ndarray
    spread: float
    passed: bool

    @property
    def angle(self) -> float:
        return float(self.angles[0])


def slope_constancy_check(f: ConvexFunction, samples, tol=1e-6, base_tol=1e-12) -> SlopeReport:
    """Spread of the projective point [phi_22 - phi_11 : phi_12] over samples.

    The spread is the largest pairwise angle between the vectors modulo sign.
    Raises `BasePointHit` where the vector vanishes (double eigenvalue).
    """
    vecs, angles, pts = [], [], []
    for x in samples:
        H = eval_jet3(f, x).hess
        v = slope_vector(H)
        if np.linalg.norm(v) <= base_tol * np.max(np.abs(H)):
            raise BasePointHit(np.asarray(x))
        vecs.append(v / np.linalg.norm(v))
        angles.append(characteristic_angle(H))
        pts.append(x)
    V = np.array(vecs)
    cross = np.abs(np.outer(V[:, 0], V[:, 1]) - np.outer(V[:, 1], V[:, 0]))
    spread = float(np.arcsin(min(1.0, cross.max())))
    return SlopeReport(np.array(pts), np.array(angles), spread, spread < tol)
