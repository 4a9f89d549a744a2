"""Numerical Legendre transform.

The conjugate's jets are pushed forward from the original function:
grad phi*(y) = x, H phi*(y) = H(x)^-1, and
T*_abc = -T_ijk G_ia G_jb G_kc with G = H(x)^-1, where y = grad phi(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HessinvError, NoConvergence, OutOfDomain
from .funcspace import ConvexFunction, Jet3, eval_jet3, fd_jacobian
from .funcspace.domains import DEFAULT_RADIUS, DEFAULT_SAMPLES, Domain
from .propi import TOL_NONZERO, TOL_ZERO, classify, inverse_and_derivatives, residual_from_jet

NEWTON_TOL = 1e-10
MAX_ITER = 200


def _merit(f, x, y):
    """phi(x) - <x, y>: strictly convex, minimized where grad phi = y."""
    jet = eval_jet3(f, x)
    return jet.value - x @ y, jet


def legendre_point(f: ConvexFunction, y, x_init=None, tol=NEWTON_TOL, max_iter=MAX_ITER):
    """Solve grad phi(x) = y; return (x, phi*(y)).

    Damped Newton on phi(x) - <x, y> with Armijo backtracking; a step is also
    halved until the trial point stays inside the domain. Once the gradient
    residual is below `tol` (relative to max(1, |y|)) a few polishing steps
    run while they still reduce it.
    """
    y = np.asarray(y, dtype=float).reshape(f.dim)
    x = np.asarray(f.interior_point() if x_init is None else x_init, dtype=float).reshape(f.dim)
    try:
        m, jet = _merit(f, x, y)
    except HessinvError as exc:
        raise NoConvergence(f"starting point unusable: {exc}", x) from exc
    scale = max(1.0, float(np.max(np.abs(y))))
    best = np.inf
    for _ in range(max_iter):
        r = jet.grad - y
        res = float(np.max(np.abs(r)))
        if res < tol * scale:
            if res >= best * 0.5:
                break
        best = min(best, res)
        dx = -np.linalg.solve(jet.hess, r)
        slope = float(r @ dx)
        t = 1.0
        while True:
            trial = x + t * dx
            if f.domain.contains(trial):
                try:
                    m_new, jet_new = _merit(f, trial, y)
                    # near the solution the merit is flat to rounding; accept
                    if m_new <= m + 1e-4 * t * slope or res < 1e3 * tol * scale:
                        break
                except HessinvError:
                    pass
            t *= 0.5
            if t < 1e-14:
                if res < tol * scale:
                    return x, float(x @ y - jet.value)
                raise NoConvergence(f"line search stalled at residual {res:.3e}", x)
        x, m, jet = trial, m_new, jet_new
    r = float(np.max(np.abs(jet.grad - y)))
    if r >= tol * scale:
        raise NoConvergence(f"gradient residual {r:.3e} after {max_iter} iterations", x)
    return x, float(x @ y - jet.value)


def conjugate_jet(jet: Jet3) -> Jet3:
    """3-jet of phi* at y = grad phi(x) from the 3-jet of phi at x."""
    G, _ = inverse_and_derivatives(jet)
    Tstar = -np.einsum("ijk,ia,jb,kc->abc", jet.third, G, G, G)
    y = jet.grad
    return Jet3(y.copy(), float(jet.point @ y - jet.value), jet.point.copy(), G, Tstar)


@dataclass
class GradientImage(Domain):
    """The image grad phi(domain), tested by solving for a preimage."""

    f: ConvexFunction = field(repr=False)

    def __post_init__(self):
        self.dim = self.f.dim
        self._box = None

    def contains(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(y)):
            return False
        try:
            legendre_point(self.f, y, self.f.interior_point())
            return True
        except NoConvergence:
            return False

    def bounding_box(self, radius=DEFAULT_RADIUS):
        if self._box is None:
            pts = self.sample(DEFAULT_SAMPLES, radius)
            self._box = (pts.min(axis=0), pts.max(axis=0))
        lo, hi = self._box
        return np.maximum(lo, -radius), np.minimum(hi, radius)

    def sample(self, n=DEFAULT_SAMPLES, radius=DEFAULT_RADIUS, max_draws=200_000):
        """Gradient images of low-discrepancy samples of the original domain."""
        xs = self.f.domain.sample(n, radius)
        return np.array([self.f.gradient(x) for x in xs])


class LegendreConjugate(ConvexFunction):
    """phi* as a ConvexFunction; each evaluation solves grad phi(x) = y.

    The last solution warm-starts the next solve. If the original function
    offers ``gradient_inverse(y)``, that supplies the starting point.
    """

    def __init__(self, f: ConvexFunction):
        self.f = f
        self.dim = f.dim
        self.domain = GradientImage(f)
        self._last = None

    def preimage(self, y):
        y = np.asarray(y, dtype=float)
        guess = None
        if hasattr(self.f, "gradient_inverse"):
            guess = self.f.gradient_inverse(y)
        if guess is None:
            guess = self._last if self._last is not None else self.f.interior_point()
        try:
            x, _ = legendre_point(self.f, y, guess)
        except NoConvergence:
            if guess is self._last:
                x, _ = legendre_point(self.f, y, self.f.interior_point())
            else:
                raise
        self._last = x
        return x

    def _jet(self, y):
        x = self.preimage(y)
        cj = conjugate_jet(eval_jet3(self.f, x))
        return cj.value, cj.grad, cj.hess, cj.third

    def jet(self, y) -> Jet3:
        # membership is decided by the solve itself
        y = np.asarray(y, dtype=float).reshape(self.dim)
        try:
            x = self.preimage(y)
        except NoConvergence as exc:
            raise OutOfDomain(y, "not in the gradient image") from exc
        cj = conjugate_jet(eval_jet3(self.f, x))
        cj.point = y
        return cj

    def value(self, y):
        return self.jet(y).value

    def interior_point(self):
        return self.f.gradient(self.f.interior_point())

    def to_spec(self):
        return {"kind": "legendre_conjugate", "dim": self.dim, "params": {"of": self.f.to_spec()}}


@dataclass
class InvarianceRow:
    x: np.ndarray
    y: np.ndarray
    residual: float
    conjugate_residual: float
    preimage_error: float

    @property
    def agree(self) -> bool:
        return classify(self.residual) == classify(self.conjugate_residual)


@dataclass
class InvarianceReport:
    rows: list
    tol: float

    @property
    def max_conjugate_residual(self) -> float:
        return max(r.conjugate_residual for r in self.rows)

    @property
    def max_preimage_error(self) -> float:
        return max(r.preimage_error for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.max_conjugate_residual < self.tol

    @property
    def agree(self) -> bool:
        return all(r.agree for r in self.rows)


def conjugate_propi_invariance(f: ConvexFunction, samples, tol=1e-7) -> InvarianceReport:
    """Property-I residual of phi* at y = grad phi(x) for each sample x.

    The conjugate is evaluated through `LegendreConjugate`, i.e. by solving
    for the preimage of y and pushing the jet forward; the preimage error
    |x_solved - x| is reported alongside.
    """
    conj = LegendreConjugate(f)
    rows = []
    for x in samples:
        x = np.asarray(x, dtype=float)
        jet = eval_jet3(f, x)
        conj._last = x
        cjet = conj.jet(jet.grad)
        rows.append(
            InvarianceRow(
                x,
                jet.grad,
                residual_from_jet(jet).max_abs,
                residual_from_jet(cjet).max_abs,
                float(np.max(np.abs(cjet.grad - x))),
            )
        )
    return InvarianceReport(rows, tol)


@dataclass
class InvolutionRow:
    x: np.ndarray
    point_error: float
    value_error: float


def involution_check(f: ConvexFunction, samples):
    """Apply the transform twice: x -> y = grad phi(x) -> x'' with phi**(x'').

    The second transform runs Newton on the conjugate, whose Hessian is
    H(x)^-1 at the solved preimage.
    """
    conj = LegendreConjugate(f)
    rows = []
    for x in samples:
        x = np.asarray(x, dtype=float)
        y_guess = f.gradient(x) + 1e-3  # do not start the outer solve at the answer
        y2, phi2 = legendre_point(conj, x, y_guess)
        x2 = conj.preimage(y2)
        rows.append(InvolutionRow(x, float(np.max(np.abs(x2 - x))), abs(phi2 - f.value(x))))
    return rows


def hessian_duality_check(f: ConvexFunction, samples, h=1e-3):
    """max |D(grad phi*)(y) - H(x)^-1| with D taken by finite differences.

    grad phi* = (grad phi)^-1 is evaluated by Newton solves only, so this is
    independent of the analytic pushforward.
    """
    errs = []
    for x in samples:
        x = np.asarray(x, dtype=float)
        jet = eval_jet3(f, x)

        def inv(y, x=x):
            return legendre_point(f, y, x)[0]

        J = fd_jacobian(inv, jet.grad, h)
        errs.append(float(np.max(np.abs(J - np.linalg.inv(jet.hess)))))
    return errs


def grid_conjugate(fun, y, grid):
    """Oracle: max over a 1D grid of r y - fun(r)."""
    r = np.asarray(grid, dtype=float)
    return float(np.max(r * y - fun(r)))


def legendre_domain_image(f, samples=None, n=200, h=1e-3):
    """Image of a handle family under grad phi, with per-handle directions.

    Returns the gradient point cloud and, for each handle, the largest
    deviation |1 - |<e, u_l>|| where e is the eigenvector for the simple
    eigenvalue of the conjugate Hessian. That Hessian is differentiated
    numerically from Newton solves of grad phi = y.
    """
    from .handles import HandleFamily

    if not isinstance(f, HandleFamily):
        raise TypeError("legendre_domain_image expects a HandleFamily")
    xs = f.domain.sample(n) if samples is None else np.asarray(samples, dtype=float)
    cloud = np.array([f.gradient(x) for x in xs])
    deviations = {}
    for l, handle in enumerate(f.domain.handles):
        pts = [x for x in xs if f.domain.region(x) == l + 1]
        devs = []
        for x in pts:
            y = f.gradient(x)

            def inv(yy, x=x):
                return legendre_point(f, yy, x)[0]

            Hs = fd_jacobian(inv, y, h)
            Hs = 0.5 * (Hs + Hs.T)
            w, E = np.linalg.eigh(Hs)
            gaps = [abs(w[i] - np.delete(w, i)).min() for i in range(len(w))]
            e = E[:, int(np.argmax(gaps))]
            if max(gaps) < 1e-6 * max(1.0, np.abs(w).max()):
                continue  # locally quadratic: the direction is not visible
            devs.append(abs(1.0 - abs(e @ handle.u)))
        deviations[l] = max(devs) if devs else None
    return {"points": xs, "image": cloud, "direction_deviation": deviations}


__all__ = [
    "GradientImage",
    "InvarianceReport",
    "LegendreConjugate",
    "TOL_NONZERO",
    "TOL_ZERO",
    "conjugate_jet",
    "conjugate_propi_invariance",
    "grid_conjugate",
    "hessian_duality_check",
    "involution_check",
    "legendre_domain_image",
    "legendre_point",
]
