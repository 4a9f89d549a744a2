"""Matrix manifolds behind the frame bundle of a Hessian metric.

pi(A) = A^-T A^-1 sends a frame to the metric it is orthonormal for;
q(A) = A^T A = pi(A^-1) detects orthogonal columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import special_ortho_group

from .errors import NotOrthogonalColumns, Singular, SignatureMismatch

IN_C_TOL = 1e-9
REL_GAP = 1e-6
COND_MAX = 1e12


def offdiag(M) -> np.ndarray:
    M = np.asarray(M)
    return M - np.diag(np.diag(M))


def offdiag_max(M) -> float:
    return float(np.max(np.abs(offdiag(M)))) if np.asarray(M).size > 1 else 0.0


def pi_map(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if np.linalg.cond(A) > COND_MAX:
        raise Singular("frame is numerically singular")
    Ainv = np.linalg.inv(A)
    V = Ainv.T @ Ainv
    return 0.5 * (V + V.T)


def q_map(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A.T @ A


def in_C(A, tol=IN_C_TOL) -> bool:
    """Orthogonal columns: off-diagonal of A^T A small relative to its size."""
    Q = q_map(A)
    return offdiag_max(Q) < tol * np.max(np.abs(Q))


def in_D(A) -> bool:
    A = np.asarray(A)
    return offdiag_max(A) == 0.0 and bool(np.all(np.diag(A) > 0))


def in_SO(A, tol=1e-12) -> bool:
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    return np.max(np.abs(A.T @ A - np.eye(n))) < tol and np.linalg.det(A) > 0


@dataclass
class FrameMatrix:
    """A frame with membership predicates; thin wrapper around an ndarray."""

    A: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)

    @property
    def det_positive(self) -> bool:
        return np.linalg.det(self.A) > 0

    @property
    def in_C(self) -> bool:
        return in_C(self.A)

    @property
    def in_D(self) -> bool:
        return in_D(self.A)

    @property
    def in_SO(self) -> bool:
        return in_SO(self.A)


def cartan_factor(C, tol=IN_C_TOL):
    """C = B Lam with B in SO(n) and Lam positive diagonal (column norms)."""
    C = np.asarray(C, dtype=float)
    if not in_C(C, tol) or np.linalg.det(C) <= 0:
        raise NotOrthogonalColumns("matrix is not in C (orthogonal columns, det > 0)")
    lam = np.sqrt(np.diag(q_map(C)))
    return C / lam, np.diag(lam)


@dataclass(frozen=True)
class StratumSignature:
    """Cluster sizes of the increasingly ordered eigenvalues."""

    kappa: tuple

    @property
    def n(self):
        return sum(self.kappa)

    def reversed(self) -> "StratumSignature":
        return StratumSignature(tuple(reversed(self.kappa)))

    def __str__(self):
        return "(" + ",".join(map(str, self.kappa)) + ")"


def cluster_sizes(values, rel_gap=REL_GAP) -> tuple:
    """Sort increasingly and merge neighbours with relative gap < rel_gap."""
    v = np.sort(np.asarray(values, dtype=float))
    sizes = [1]
    for a, b in zip(v[:-1], v[1:]):
        if (b - a) / abs(a) < rel_gap:
            sizes[-1] += 1
        else:
            sizes.append(1)
    return tuple(sizes)


def stratum_signature(V, rel_gap=REL_GAP) -> StratumSignature:
    return StratumSignature(cluster_sizes(np.linalg.eigvalsh(V), rel_gap))


def column_norm_signature(C, rel_gap=REL_GAP) -> StratumSignature:
    return StratumSignature(cluster_sizes(np.sqrt(np.diag(q_map(C))), rel_gap))


def stratum_compat_check(C, rel_gap=REL_GAP) -> dict:
    """Stratum of pi(C) against the clustering of the column norms of C.

    pi(C) = B Lam^-2 B^T, so eigenvalues are inverse squared column norms and
    the increasing order reverses: sig(pi(C)) == reversed(sig(norms)).
    """
    if not in_C(C):
        raise NotOrthogonalColumns("stratum check needs C in C")
    sig_pi = stratum_signature(pi_map(C), rel_gap)
    sig_cols = column_norm_signature(C, rel_gap)
    if sig_pi != sig_cols.reversed():
        raise SignatureMismatch(f"pi(C) in {sig_pi}, column norms in {sig_cols}")
    return {"pi": sig_pi, "columns": sig_cols}


def eigenframe(V):
    """Deterministic eigen-decomposition of a symmetric matrix.

    Eigenvalues ascend; each eigenvector's largest-magnitude entry is made
    positive; if the determinant is negative the last column is flipped.
    """
    w, E = np.linalg.eigh(V)
    idx = np.argmax(np.abs(E), axis=0)
    signs = np.sign(E[idx, np.arange(E.shape[1])])
    signs[signs == 0] = 1.0
    E = E * signs
    if np.linalg.det(E) < 0:
        E[:, -1] *= -1.0
    return w, E


def random_rotation(n, rng) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    return special_ortho_group.rvs(n, random_state=rng)


def random_gl_plus(n, rng, smin=0.5, smax=2.0) -> np.ndarray:
    """Well-conditioned element of Gl(n)+: U diag(s) V with U, V in SO(n)."""
    s = rng.uniform(smin, smax, n)
    return random_rotation(n, rng) @ np.diag(s) @ random_rotation(n, rng)


def random_C(n, rng, smin=0.5, smax=2.0) -> np.ndarray:
    return random_rotation(n, rng) @ np.diag(rng.uniform(smin, smax, n))
