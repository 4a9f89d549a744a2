"""Finite-difference oracles, kept independent of the analytic derivative code.

Central differences with one level of Richardson extrapolation. The default
steps are 1e-3 for orders <= 2 and 5e-3 for the third derivatives.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import StencilOutOfDomain
from .functions import Jet3

H_LOW = 1e-3
H_THIRD = 5e-3


def _richardson(fn, h):
    """Fourth-order combination of a second-order central estimate."""
    return (4.0 * fn(0.5 * h) - fn(h)) / 3.0


def _guarded(f, contains):
    if contains is None:
        return f

    def g(p):
        if not contains(p):
            raise StencilOutOfDomain(p)
        return f(p)

    return g


def _hessian_central(f, x, h, f0=None):
    n = x.size
    E = np.eye(n) * h
    f0 = f(x) if f0 is None else f0
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = (f(x + E[i]) - 2.0 * f0 + f(x - E[i])) / (h * h)
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (
                f(x + E[i] + E[j]) - f(x + E[i] - E[j]) - f(x - E[i] + E[j]) + f(x - E[i] - E[j])
            ) / (4.0 * h * h)
    return H


def fd_gradient(f, x, h=H_LOW, contains=None):
    f = _guarded(f, contains)
    x = np.asarray(x, dtype=float)
    n = x.size

    def central(hh):
        E = np.eye(n) * hh
        return np.array([(f(x + E[i]) - f(x - E[i])) / (2.0 * hh) for i in range(n)])

    return _richardson(central, h)


def fd_hessian(f, x, h=H_LOW, contains=None):
    f = _guarded(f, contains)
    x = np.asarray(x, dtype=float)
    f0 = f(x)
    return _richardson(lambda hh: _hessian_central(f, x, hh, f0), h)


def fd_third(f, x, h=H_THIRD, contains=None):
    """Third-derivative tensor, symmetrized over index permutations."""
    f = _guarded(f, contains)
    x = np.asarray(x, dtype=float)
    n = x.size

    def central(hh):
        T = np.empty((n, n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = hh
            T[:, :, k] = (_hessian_central(f, x + e, hh) - _hessian_central(f, x - e, hh)) / (2.0 * hh)
        return T

    return symmetrize3(_richardson(central, h))


def symmetrize3(T):
    return sum(np.transpose(T, p) for p in itertools.permutations(range(3))) / 6.0


def finite_difference_jet3(f_scalar, x, h=None, contains=None) -> Jet3:
    """Central-difference 3-jet of a scalar callable.

    `h` overrides both default steps. `contains`, if given, is checked on every
    stencil point (radius 2h) and `StencilOutOfDomain` is raised on failure.
    """
    x = np.asarray(x, dtype=float)
    h_low = H_LOW if h is None else h
    h_third = H_THIRD if h is None else h
    f = _guarded(f_scalar, contains)
    return Jet3(
        x,
        float(f(x)),
        fd_gradient(f, x, h_low),
        fd_hessian(f, x, h_low),
        fd_third(f, x, h_third),
    )


def fd_jacobian(F, x, h=H_LOW):
    """Jacobian of a vector (or matrix) valued callable; derivative axis last."""
    x = np.asarray(x, dtype=float)
    n = x.size

    def central(hh):
        cols = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = hh
            cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2.0 * hh))
        return np.stack(cols, axis=-1)

    return _richardson(central, h)
