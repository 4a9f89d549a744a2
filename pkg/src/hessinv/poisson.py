"""Torus-invariant bivectors on R^n x R^n and their Schouten brackets.

Coordinates are (x_1..x_n, theta_1..theta_n); coefficients depend on x only.
A p-vector is stored as a fully antisymmetric array A of shape (N,)*p,
meaning (1/p!) A^{i_1..i_p} d_{i_1} ^ ... ^ d_{i_p}, with N = 2n.

For a strictly convex phi with g = H(phi)^-1 the bivector
P = sum_jk g_jk d_{x_j} ^ d_{theta_k} has matrix [[0, g], [-g, 0]]. This is
the real form of the Kahler bivector written in complex frames
d_z = (d_x - i d_theta)/2; the complex-frame constants only rescale it.
The standard structure Pi has g = I.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

import numpy as np

from .errors import EquivalenceViolation
from .funcspace import ConvexFunction, eval_jet3, fd_jacobian
from .legendre import LegendreConjugate
from .propi import TOL_NONZERO, TOL_ZERO, Verdict, classify, inverse_and_derivatives, maxabs, residual_from_jet


# -- exterior algebra on components ----------------------------------------

def _perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def alt(T):
    """Antisymmetrization (average over signed permutations of the axes)."""
    T = np.asarray(T)
    p = T.ndim
    if p <= 1:
        return T.copy()
    out = np.zeros_like(T)
    for perm in permutations(range(p)):
        out += _perm_sign(perm) * np.transpose(T, perm)
    return out / math.factorial(p)


def wedge(A, B):
    """Wedge product in the (1/p!)-normalized component convention."""
    a, b = np.ndim(A), np.ndim(B)
    if a == 0 or b == 0:
        return A * B
    coef = math.factorial(a + b) / (math.factorial(a) * math.factorial(b))
    return coef * alt(np.multiply.outer(A, B))


# -- fields -----------------------------------------------------------------

@dataclass
class MultivectorField:
    """p-vector field on R^{2n} whose coefficients depend on x only.

    `coeff(x)` returns the (N,)*p component array; `deriv(x)`, if given,
    returns an array with one extra trailing axis of length n holding the
    x-derivatives. Without it, derivatives come from finite differences.
    """

    n: int
    degree: int
    coeff: Callable
    deriv: Callable = None
    h: float = 1e-3

    @property
    def N(self):
        return 2 * self.n

    def components(self, x):
        return np.asarray(self.coeff(np.asarray(x, dtype=float)), dtype=float)

    def derivatives(self, x):
        """Derivatives along all N coordinates; theta-derivatives are zero."""
        x = np.asarray(x, dtype=float)
        if self.deriv is not None:
            dx = np.asarray(self.deriv(x), dtype=float)
        else:
            dx = fd_jacobian(self.coeff, x, self.h)
        pad = np.zeros(dx.shape[:-1] + (self.n,))
        return np.concatenate([dx, pad], axis=-1)

    def scaled(self, lam):
        d = None if self.deriv is None else (lambda x: lam * self.deriv(x))
        return MultivectorField(self.n, self.degree, lambda x: lam * self.coeff(x), d, self.h)


BivectorField = MultivectorField


def _block(g):
    n = g.shape[0]
    W = np.zeros((2 * n, 2 * n) + g.shape[2:])
    W[:n, n:] = g
    W[n:, :n] = -np.swapaxes(g, 0, 1)
    return W


def standard_pi(n, scale=1.0) -> MultivectorField:
    W = _block(scale * np.eye(n))
    return MultivectorField(n, 2, lambda x: W, lambda x: np.zeros(W.shape + (n,)))


def kahler_bivector(f: ConvexFunction) -> MultivectorField:
    """P with g = H(phi)^-1; derivatives of g from -H^-1 [H]_{,k} H^-1."""

    def coeff(x):
        Hinv, _ = inverse_and_derivatives(eval_jet3(f, x))
        return _block(Hinv)

    def deriv(x):
        _, D = inverse_and_derivatives(eval_jet3(f, x))
        # D[k, i, j] -> g_{ij,k} with k last
        return _block(np.transpose(D, (1, 2, 0)))

    return MultivectorField(f.dim, 2, coeff, deriv)


# -- brackets ---------------------------------------------------------------

def schouten_bracket(P: MultivectorField, Q: MultivectorField, x) -> np.ndarray:
    """Schouten bracket of a p-vector and a q-vector at x.

    With odd variables xi_l standing for d_l,
    [P, Q] = sum_l dP/dxi_l dQ/dx_l - (-1)^((p-1)(q-1)) dQ/dxi_l dP/dx_l.
    The result has degree p + q - 1.
    """
    p, q = P.degree, Q.degree
    Pc, Qc = P.components(x), Q.components(x)
    dP, dQ = P.derivatives(x), Q.derivatives(x)
    N = P.N
    sign = (-1) ** ((p - 1) * (q - 1))
    out = np.zeros((N,) * (p + q - 1))
    for l in range(P.n):  # theta-derivatives vanish
        out += wedge(Pc[l], dQ[..., l]) - sign * wedge(Qc[l], dP[..., l])
    return out


def bivector_bracket_explicit(W, dW, V, dV):
    """[W, V]^{ijk} = sum_l cyc_{ijk} (W^{li} V^{jk}_{,l} + V^{li} W^{jk}_{,l}).

    Arrays dW, dV carry the derivative index last, over all N coordinates.
    """
    t1 = np.einsum("li,jkl->ijk", W, dV) + np.einsum("li,jkl->ijk", V, dW)
    return t1 + np.transpose(t1, (1, 2, 0)) + np.transpose(t1, (2, 0, 1))


def fd_oracle_bracket(f: ConvexFunction, x, h=1e-3, pi_scale=1.0) -> np.ndarray:
    """[Pi, P] from numerically inverted Hessians and central differences.

    The stencil runs over all 2n coordinates (x, theta) with the coefficients
    read from x only.
    """
    n = f.dim
    x = np.asarray(x, dtype=float)

    def W(z):
        return _block(np.linalg.inv(f.hessian(z[:n])))

    z = np.concatenate([x, np.zeros(n)])
    dW = fd_jacobian(W, z, h)
    Pi = _block(pi_scale * np.eye(n))
    return bivector_bracket_explicit(Pi, np.zeros_like(dW), W(z), dW)


def commutator_trivector(f: ConvexFunction, x, pi_scale=1.0) -> np.ndarray:
    return schouten_bracket(standard_pi(f.dim, pi_scale), kahler_bivector(f), x)


def jacobi_residual(f: ConvexFunction, x, h=1e-3) -> float:
    """max |[Pi, [Pi, P]]|; the inner bracket is differentiated numerically."""
    n = f.dim
    Pi = standard_pi(n)
    P = kahler_bivector(f)
    inner = MultivectorField(n, 3, lambda y: schouten_bracket(Pi, P, y), None, h)
    return maxabs(schouten_bracket(Pi, inner, x))


# -- equivalence ------------------------------------------------------------

@dataclass
class CommutingRow:
    point: np.ndarray
    bracket: float
    residual: float
    conjugate_residual: float
    verdicts: tuple

    @property
    def agree(self):
        return len(set(self.verdicts)) == 1 and Verdict.INDETERMINATE not in self.verdicts

    @property
    def verdict(self):
        return self.verdicts[0] if self.agree else Verdict.INDETERMINATE

    @property
    def ratio(self):
        return self.bracket / self.residual if self.residual > 0 else math.nan


@dataclass
class CommutingReport:
    rows: list

    @property
    def all_zero(self):
        return all(r.verdict is Verdict.ZERO for r in self.rows)

    @property
    def all_nonzero(self):
        return all(r.verdict is Verdict.NONZERO for r in self.rows)

    @property
    def disagreements(self):
        return [r for r in self.rows if not r.agree]

    @property
    def max_bracket(self):
        return max(r.bracket for r in self.rows)


def commuting_equiv_check(f: ConvexFunction, samples, tol_zero=TOL_ZERO, tol_nonzero=TOL_NONZERO,
                          conjugate=True, strict=True) -> CommutingReport:
    """Per sample: max |[Pi, P]|, the property-I residual of phi, and of phi*.

    phi* is evaluated at grad phi(x) through the numerical Legendre transform.
    A ZERO verdict next to a NONZERO one raises `EquivalenceViolation`.
    """
    conj = LegendreConjugate(f) if conjugate else None
    rows = []
    for x in samples:
        x = np.asarray(x, dtype=float)
        jet = eval_jet3(f, x)
        br = maxabs(commutator_trivector(f, x))
        res = residual_from_jet(jet).max_abs
        vals = [br, res]
        if conj is not None:
            conj._last = x
            cres = residual_from_jet(conj.jet(jet.grad)).max_abs
            vals.append(cres)
        else:
            cres = math.nan
        verdicts = tuple(classify(v, tol_zero, tol_nonzero) for v in vals)
        if strict and Verdict.ZERO in verdicts and Verdict.NONZERO in verdicts:
            raise EquivalenceViolation(x, f"verdicts {[v.value for v in verdicts]}")
        rows.append(CommutingRow(x, br, res, cres, verdicts))
    return CommutingReport(rows)
