"""Horizontal lifts of curves to the orthonormal frame bundle.

Parallel transport for a Hessian metric uses the Levi-Civita symbols
1/2 H^-1 [H]_{,k}; with that factor A(t)^T H(gamma(t)) A(t) = I is an exact
invariant of the ODE A' = -(sum_k gamma'_k 1/2 Gamma_k) A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .errors import (
    CurveLeavesDomain,
    EquivalenceViolation,
    IntegratorToleranceExceeded,
    NotInC,
    NotOrthonormalFrame,
    OutOfDomain,
)
from .funcspace import ConvexFunction, eval_jet3
from .matgeo import cluster_sizes, eigenframe, in_C, offdiag_max, q_map, REL_GAP
from .propi import christoffel_from_jet, maxabs

LIFT_STEP = 1e-3
INTEGRATOR_TOL = 1e-8
FOUND_TOL = 1e-7
RECOVERY_TOL = 1e-6
ORTHONORMAL_TOL = 1e-9


# -- curves -----------------------------------------------------------------

@dataclass
class Segment:
    x0: np.ndarray
    direction: np.ndarray
    t_max: float = 1.0

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        self.direction = np.asarray(self.direction, dtype=float)

    def position(self, t):
        return self.x0 + t * self.direction

    def velocity(self, t):
        return self.direction

    @property
    def breakpoints(self):
        return [0.0, self.t_max]


@dataclass
class Polyline:
    """Vertices visited at t = 0, 1, 2, ...; constant velocity on each leg."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.t_max = float(len(self.points) - 1)

    def _leg(self, t):
        return min(int(math.floor(t)), len(self.points) - 2)

    def position(self, t):
        i = self._leg(t)
        return self.points[i] + (t - i) * (self.points[i + 1] - self.points[i])

    def velocity(self, t):
        i = self._leg(t)
        return self.points[i + 1] - self.points[i]

    @property
    def breakpoints(self):
        return [float(i) for i in range(len(self.points))]


@dataclass
class Arc:
    """c + r (cos t, sin t) in the plane of the first two coordinates."""

    center: np.ndarray
    radius: float
    t0: float = 0.0
    t1: float = 2 * np.pi

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)

    def _e(self, t):
        e = np.zeros_like(self.center)
        e[0], e[1] = math.cos(t), math.sin(t)
        return e

    def position(self, s):
        return self.center + self.radius * self._e(self.t0 + s)

    def velocity(self, s):
        t = self.t0 + s
        v = np.zeros_like(self.center)
        v[0], v[1] = -self.radius * math.sin(t), self.radius * math.cos(t)
        return v

    @property
    def t_max(self):
        return self.t1 - self.t0

    @property
    def breakpoints(self):
        return [0.0, self.t_max]


# -- horizontal lift --------------------------------------------------------

@dataclass
class LiftResult:
    t: np.ndarray
    frames: np.ndarray
    orthonormality_drift: np.ndarray
    c_drift: np.ndarray
    halving_error: float = float("nan")
    hessians: np.ndarray = field(default=None, repr=False)

    @property
    def max_orthonormality_drift(self):
        return float(self.orthonormality_drift.max())

    @property
    def max_c_drift(self):
        return float(self.c_drift.max())

    def rows(self):
        """Rows (t, A entries row-major, orthonormality drift, C-drift)."""
        for t, A, d, c in zip(self.t, self.frames, self.orthonormality_drift, self.c_drift):
            yield [t, *A.ravel(), d, c]


def _connection_matrix(f, curve, t):
    x = curve.position(t)
    try:
        jet = eval_jet3(f, x)
    except OutOfDomain as exc:
        raise CurveLeavesDomain(x) from exc
    v = curve.velocity(t)
    G = christoffel_from_jet(jet).levi_civita
    return np.tensordot(v, G, axes=1), jet.hess


def _grid(curve, step):
    ts = [0.0]
    bps = curve.breakpoints
    for a, b in zip(bps[:-1], bps[1:]):
        m = max(1, int(math.ceil((b - a) / step - 1e-9)))
        ts.extend(a + (b - a) * np.arange(1, m + 1) / m)
    return np.array(ts)


def _rk4(f, curve, A0, step):
    ts = _grid(curve, step)
    A = np.array(A0, dtype=float)
    frames = [A.copy()]
    M0, H0 = _connection_matrix(f, curve, 0.0)
    hess = [H0]
    for a, b in zip(ts[:-1], ts[1:]):
        h = b - a
        # evaluate just inside the leg so polyline velocities stay one-sided
        tb = b - 1e-15 * max(1.0, b)
        k1 = -M0 @ A
        Mm, _ = _connection_matrix(f, curve, a + 0.5 * h)
        k2 = -Mm @ (A + 0.5 * h * k1)
        k3 = -Mm @ (A + 0.5 * h * k2)
        Mb, _ = _connection_matrix(f, curve, tb)
        k4 = -Mb @ (A + h * k3)
        A = A + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        frames.append(A.copy())
        M0, Hb = _connection_matrix(f, curve, b)
        hess.append(Hb)
    return ts, np.array(frames), np.array(hess)


def horizontal_lift(f: ConvexFunction, curve, A0, step=LIFT_STEP, check_halving=True,
                    tol=INTEGRATOR_TOL) -> LiftResult:
    """Parallel-transport the frame A0 along `curve` with classical RK4.

    With `check_halving` the lift is recomputed at step/2 and the largest
    difference at the common grid points is reported; above `tol` it raises
    `IntegratorToleranceExceeded`.
    """
    A0 = np.asarray(A0, dtype=float)
    x0 = curve.position(0.0)
    try:
        H0 = eval_jet3(f, x0).hess
    except OutOfDomain as exc:
        raise CurveLeavesDomain(x0) from exc
    n = A0.shape[0]
    if maxabs(A0.T @ H0 @ A0 - np.eye(n)) > ORTHONORMAL_TOL:
        raise NotOrthonormalFrame("initial frame is not orthonormal for the Hessian at gamma(0)")
    ts, frames, hess = _rk4(f, curve, A0, step)
    I = np.eye(n)
    drift = np.array([maxabs(A.T @ H @ A - I) for A, H in zip(frames, hess)])
    cdrift = np.array([offdiag_max(q_map(A)) for A in frames])
    result = LiftResult(ts, frames, drift, cdrift, hessians=hess)
    if check_halving:
        _, fine, _ = _rk4(f, curve, A0, step / 2)
        # the fine grid refines every coarse leg by exactly two
        coarse_at_fine = fine[::2]
        if coarse_at_fine.shape == frames.shape:
            result.halving_error = float(np.max(np.abs(coarse_at_fine - frames)))
        else:
            result.halving_error = float(np.max(np.abs(fine[-1] - frames[-1])))
        if result.halving_error > tol:
            raise IntegratorToleranceExceeded(
                f"step halving changed the lift by {result.halving_error:.3e} > {tol:.1e}"
            )
    return result


def orthonormal_diagonal_frame(H):
    """E diag(w)^-1/2 from the deterministic eigenframe: orthonormal and in C."""
    w, E = eigenframe(H)
    return E / np.sqrt(w)


# -- property C -------------------------------------------------------------

def _check_frame(jet, A):
    n = jet.dim
    if maxabs(A.T @ jet.hess @ A - np.eye(n)) > ORTHONORMAL_TOL * max(1.0, maxabs(A) ** 2 * maxabs(jet.hess)):
        raise NotOrthonormalFrame("frame is not orthonormal for the Hessian")
    if not in_C(A):
        raise NotInC("frame does not have orthogonal columns")


def property_c_residual(f: ConvexFunction, x, A, tol=1e-9) -> dict:
    """Largest off-diagonal entry of A^T G_k^T A + A^T G_k A over k.

    Also returns the reduced form max offdiag(A^T [H]_{,k} A); the two must
    vanish together.
    """
    jet = eval_jet3(f, x)
    A = np.asarray(A, dtype=float)
    _check_frame(jet, A)
    G = christoffel_from_jet(jet).gammas
    full = max(offdiag_max(A.T @ g.T @ A + A.T @ g @ A) for g in G)
    Xs = [A.T @ jet.third[:, :, k] @ A for k in range(jet.dim)]
    reduced = max(offdiag_max(X) for X in Xs)
    # H^-1 = A A^T, so the full form is entrywise (lam_i + lam_j) X_ij
    lam = np.diag(q_map(A))
    predicted = max(offdiag_max((lam[:, None] + lam[None, :]) * X) for X in Xs)
    if abs(full - predicted) > 1e-8 * (1.0 + predicted):
        raise EquivalenceViolation(jet.point, f"residual {full:.3e} vs reduced form {predicted:.3e}")
    return {"residual": full, "reduced": reduced, "zero": full < tol}


def _tangency(S_stack, R):
    return max(offdiag_max(R.T @ S @ R) for S in S_stack)


def _block_rotation(sizes, params):
    n = sum(sizes)
    R = np.eye(n)
    start, p = 0, 0
    for s in sizes:
        m = s * (s - 1) // 2
        if m:
            K = np.zeros((s, s))
            K[np.triu_indices(s, 1)] = params[p:p + m]
            R[start:start + s, start:start + s] = expm(K - K.T)
        start += s
        p += m
    return R


def _golden(fn, a, b, iters=30):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (c, fc) if fc < fd else (d, fd)


@dataclass
class PropertyCResult:
    found: bool
    frame: np.ndarray
    residual: float


def property_c_check(f: ConvexFunction, x, velocity=None, rel_gap=REL_GAP, n_angles=2000,
                     tol=FOUND_TOL) -> PropertyCResult:
    """Search the orthonormal frames in C over H(x) for one tangent to C.

    The tangency residual is offdiag(d/dt q(A(t))) at t = 0 for a lift with
    the given initial velocity; with `velocity` None it is the maximum over
    all coordinate directions, i.e. over every curve through x.

    Frames are E diag(w)^-1/2 R with R a block rotation inside clusters of
    equal eigenvalues. A planar block is scanned on `n_angles` angles and
    refined by golden section; larger blocks are optimized locally.
    """
    jet = eval_jet3(f, x)
    w, E = eigenframe(jet.hess)
    A0 = E / np.sqrt(w)
    G = christoffel_from_jet(jet).levi_civita
    Ms = list(G) if velocity is None else [np.tensordot(np.asarray(velocity, dtype=float), G, axes=1)]
    S_tilde = [A0.T @ (M + M.T) @ A0 for M in Ms]
    sizes = cluster_sizes(w, rel_gap)
    nparams = sum(s * (s - 1) // 2 for s in sizes)

    def obj(p):
        return _tangency(S_tilde, _block_rotation(sizes, p))

    if nparams == 0:
        best = np.zeros(0)
    elif sizes == (2,) or (nparams == 1):
        grid = np.linspace(0.0, np.pi / 2, n_angles, endpoint=False)
        vals = [obj(np.array([a])) for a in grid]
        i = int(np.argmin(vals))
        da = grid[1] - grid[0]
        a, _ = _golden(lambda t: obj(np.array([t])), grid[i] - da, grid[i] + da)
        best = np.array([a])
    else:
        best = minimize(obj, np.zeros(nparams), method="Nelder-Mead",
                        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000}).x
    R = _block_rotation(sizes, best)
    res = obj(best)
    return PropertyCResult(res < tol, A0 @ R, res)


# -- characteristic recovery ------------------------------------------------

@dataclass
class RecoveryResult:
    B: np.ndarray | None
    max_offdiag: float
    optimized_min: float
    best_frame: np.ndarray

    @property
    def angle(self) -> float | None:
        """For n = 2: angle of the frame modulo pi/2."""
        if self.best_frame.shape != (2, 2):
            return None
        return float(np.mod(math.atan2(self.best_frame[1, 0], self.best_frame[0, 0]), np.pi / 2))


def _rel_offdiag(B, hessians):
    Hs = np.asarray(hessians)
    M = np.einsum("ai,mab,bj->mij", B, Hs, B)
    n = B.shape[0]
    M[:, np.arange(n), np.arange(n)] = 0.0
    return float(np.max(np.abs(M).max(axis=(1, 2)) / np.abs(Hs).max(axis=(1, 2))))


def _euler(a, b, c):
    def rz(t):
        return np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0], [0, 0, 1]])

    def ry(t):
        return np.array([[math.cos(t), 0, math.sin(t)], [0, 1, 0], [-math.sin(t), 0, math.cos(t)]])

    return rz(a) @ ry(b) @ rz(c)


def _optimize_2d(hessians, n_angles=2000):
    def J(t):
        return _rel_offdiag(np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]), hessians)

    grid = np.linspace(0.0, np.pi / 2, n_angles, endpoint=False)
    vals = np.array([J(t) for t in grid])
    i = int(np.argmin(vals))
    da = grid[1] - grid[0]
    t, v = _golden(J, grid[i] - da, grid[i] + da, iters=60)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]]), v


def _optimize_3d(hessians, start, sweeps=20, n_scan=180):
    # express the start frame as R = B0 * Euler(a, b, c); descend on (a, b, c)
    B0 = start

    def J(p):
        return _rel_offdiag(B0 @ _euler(*p), hessians)

    p = np.zeros(3)
    cur = J(p)
    for _ in range(sweeps):
        prev = cur
        for i in range(3):
            grid = np.linspace(-np.pi / 2, np.pi / 2, n_scan, endpoint=False) + p[i]
            vals = []
            for g in grid:
                q = p.copy()
                q[i] = g
                vals.append(J(q))
            k = int(np.argmin(vals))
            d = grid[1] - grid[0]

            def line(t, i=i):
                q = p.copy()
                q[i] = t
                return J(q)

            t, v = _golden(line, grid[k] - d, grid[k] + d, iters=50)
            if v < cur:
                p[i], cur = t, v
        if prev - cur < 1e-15:
            break
    return B0 @ _euler(*p), cur


def characteristic_recovery(f: ConvexFunction, samples, tol=RECOVERY_TOL) -> RecoveryResult:
    """Look for one rotation B with B^T H(x) B diagonal at every sample.

    Off-diagonals are measured relative to max|H(x)|. The deterministic
    eigenframe at the first sample is tried first; if it fails, n = 2 scans
    the angle and refines by golden section, n = 3 runs coordinate descent on
    Euler angles, and n >= 4 tries the eigenframes of the other samples.
    """
    hessians = np.array([eval_jet3(f, x).hess for x in samples])
    n = hessians[0].shape[0]
    _, B = eigenframe(hessians[0])
    first = _rel_offdiag(B, hessians)
    best, best_val = B, first
    if first >= tol:
        if n == 2:
            cand, val = _optimize_2d(hessians)
        elif n == 3:
            cand, val = _optimize_3d(hessians, B)
        else:
            cand, val = B, first
            for H in hessians[1:]:
                _, E = eigenframe(H)
                v = _rel_offdiag(E, hessians)
                if v < val:
                    cand, val = E, v
        if val < best_val:
            best, best_val = cand, val
    if np.linalg.det(best) < 0:
        best = best.copy()
        best[:, -1] *= -1
    return RecoveryResult(best if best_val < tol else None, first, best_val, best)
