"""Property-I residuals, Christoffel matrices and their equivalences.

Conventions: Christoffel matrices carry no 1/2, Gamma_k = H^-1 [H]_{,k};
all matrix norms are the max-abs entry. Derivatives of H^-1 come from the
identity d_k(H^-1) = -H^-1 [H]_{,k} H^-1 with one Cholesky factor of H.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import EquivalenceViolation
from .funcspace import ConvexFunction, Jet3, eval_jet3

TOL_ZERO = 1e-9
TOL_NONZERO = 1e-3


class Verdict(str, Enum):
    ZERO = "ZERO"
    NONZERO = "NONZERO"
    INDETERMINATE = "INDETERMINATE"


def classify(value, tol_zero=TOL_ZERO, tol_nonzero=TOL_NONZERO) -> Verdict:
    if value < tol_zero:
        return Verdict.ZERO
    if value > tol_nonzero:
        return Verdict.NONZERO
    return Verdict.INDETERMINATE


def maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def inverse_and_derivatives(jet: Jet3):
    """H^-1 and the stack D[k] = d_k(H^-1) = -H^-1 T_k H^-1."""
    n = jet.dim
    c = cho_factor(jet.hess)
    Hinv = cho_solve(c, np.eye(n))
    Hinv = 0.5 * (Hinv + Hinv.T)
    # T[:, :, k] is [H]_{,k}
    D = np.stack([-Hinv @ jet.third[:, :, k] @ Hinv for k in range(n)])
    return Hinv, D


@dataclass
class PropertyIResidual:
    """R[i, j, k] = d_k(H^-1)_ij - d_j(H^-1)_ik."""

    entries: np.ndarray

    @property
    def max_abs(self) -> float:
        return maxabs(self.entries)


def residual_from_jet(jet: Jet3) -> PropertyIResidual:
    _, D = inverse_and_derivatives(jet)
    # D[k, i, j] -> R[i, j, k] = D[k, i, j] - D[j, i, k]
    R = np.transpose(D, (1, 2, 0)) - np.transpose(D, (1, 0, 2))
    return PropertyIResidual(R)


def property_i_residual(f: ConvexFunction, x) -> PropertyIResidual:
    return residual_from_jet(eval_jet3(f, x))


@dataclass
class ChristoffelSet:
    gammas: np.ndarray  # gammas[k] = H^-1 [H]_{,k}
    hinv: np.ndarray

    @property
    def defects(self):
        return self.gammas - np.transpose(self.gammas, (0, 2, 1))

    @property
    def max_defect(self) -> float:
        return maxabs(self.defects)

    @property
    def levi_civita(self):
        """The matrices 1/2 Gamma_k used by parallel transport."""
        return 0.5 * self.gammas


def christoffel_from_jet(jet: Jet3) -> ChristoffelSet:
    Hinv, _ = inverse_and_derivatives(jet)
    G = np.stack([Hinv @ jet.third[:, :, k] for k in range(jet.dim)])
    return ChristoffelSet(G, Hinv)


def christoffel(f: ConvexFunction, x) -> ChristoffelSet:
    return christoffel_from_jet(eval_jet3(f, x))


def commutators(jet: Jet3, hinv=None):
    """Return ([H^-1, T_k], [H, T_k]) stacked over k.

    The first equals the symmetry defect Gamma_k - Gamma_k^T identically,
    since T_k is symmetric; the second is the form in which both matrices
    sit in one Cartan subalgebra iff it vanishes.
    """
    if hinv is None:
        hinv, _ = inverse_and_derivatives(jet)
    H = jet.hess
    Ts = [jet.third[:, :, k] for k in range(jet.dim)]
    c_inv = np.stack([hinv @ T - T @ hinv for T in Ts])
    c_h = np.stack([H @ T - T @ H for T in Ts])
    return c_inv, c_h


@dataclass
class PointReport:
    point: np.ndarray
    residual: float
    defect: float
    commutator: float
    verdicts: tuple

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1 and Verdict.INDETERMINATE not in self.verdicts

    @property
    def verdict(self) -> Verdict:
        return self.verdicts[0] if self.agree else Verdict.INDETERMINATE


def point_report(jet: Jet3, tol_zero=TOL_ZERO, tol_nonzero=TOL_NONZERO) -> PointReport:
    """Three residual families at one point with the scaled zero-tolerances.

    The defect threshold is scaled by |H^-1| and the [H, T_k] threshold by
    |H|; the nonzero threshold is absolute for all three.
    """
    chris = christoffel_from_jet(jet)
    res = residual_from_jet(jet).max_abs
    defect = chris.max_defect
    _, c_h = commutators(jet, chris.hinv)
    comm = maxabs(c_h)
    verdicts = (
        classify(res, tol_zero, tol_nonzero),
        classify(defect, tol_zero * max(1.0, maxabs(chris.hinv)), tol_nonzero),
        classify(comm, tol_zero * max(1.0, maxabs(jet.hess)), tol_nonzero),
    )
    return PointReport(jet.point, res, defect, comm, verdicts)


@dataclass
class EquivalenceReport:
    rows: list

    @property
    def disagreements(self):
        return [r for r in self.rows if not r.agree]

    @property
    def all_zero(self) -> bool:
        return all(r.verdict is Verdict.ZERO for r in self.rows)

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)


def symmetry_equiv_check(f: ConvexFunction, samples, tol_zero=TOL_ZERO, tol_nonzero=TOL_NONZERO,
                         strict=True) -> EquivalenceReport:
    """Property-I residual vs Christoffel symmetry defect vs commutator.

    With `strict`, a point where one family is classified ZERO and another
    NONZERO raises `EquivalenceViolation`: that cannot happen mathematically.
    """
    rows = []
    for x in samples:
        r = point_report(eval_jet3(f, x), tol_zero, tol_nonzero)
        v = set(r.verdicts)
        if strict and Verdict.ZERO in v and Verdict.NONZERO in v:
            raise EquivalenceViolation(x, f"verdicts {[t.value for t in r.verdicts]}")
        rows.append(r)
    return EquivalenceReport(rows)


def cartan_subalgebra_check(f: ConvexFunction, x, tol_zero=TOL_ZERO, tol_nonzero=TOL_NONZERO) -> dict:
    """Whether H and every [H]_{,k} commute, against the Christoffel defect."""
    jet = eval_jet3(f, x)
    chris = christoffel_from_jet(jet)
    c_inv, c_h = commutators(jet, chris.hinv)
    defect = chris.max_defect
    out = {
        "point": jet.point,
        "commutator_inverse": maxabs(c_inv),
        "commutator": maxabs(c_h),
        "defect": defect,
    }
    v_c = classify(out["commutator"], tol_zero * max(1.0, maxabs(jet.hess)), tol_nonzero)
    v_d = classify(defect, tol_zero * max(1.0, maxabs(chris.hinv)), tol_nonzero)
    if {v_c, v_d} == {Verdict.ZERO, Verdict.NONZERO}:
        raise EquivalenceViolation(jet.point, f"commutator {v_c.value} but defect {v_d.value}")
    out["verdict"] = v_c if v_c == v_d else Verdict.INDETERMINATE
    return out
