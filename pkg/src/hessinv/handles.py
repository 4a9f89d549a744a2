"""Polytopes with 1-handles and a family of convex functions on them.

A handle is described in its own orthonormal coordinates y = B^T x. The
first column u of B is the primary direction, the handle is
{p < y_1 < b, (y_2..y_n) in F}, and it is glued to the core polytope along
the face y_1 = p. The function is k|x|^2 on the core and
profile(y_1) + k(y_2^2 + ... + y_n^2) on a handle, where the profile agrees
with k y_1^2 to infinite order at p.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linprog

from .connection import characteristic_recovery
from .errors import ConvexityCertificateFailed, RegionOverlap, SpecError, UnexpectedStratum
from .funcspace import Box, ConvexFunction, Polytope, domain_from_spec, domain_to_spec, flat_bump, rotation2
from .funcspace.domains import DEFAULT_RADIUS, Domain
from .matgeo import REL_GAP, StratumSignature, stratum_signature

CERT_POINTS = 10_000
GLUE_TOL = 1e-14


# -- one-dimensional profiles ----------------------------------------------

def _mul(a, b):
    """Product of two truncated derivative arrays [f, f', f'', f''']."""
    return np.array([
        a[0] * b[0],
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2],
        a[3] * b[0] + 3 * a[2] * b[1] + 3 * a[1] * b[2] + a[0] * b[3],
    ])


def _recip(v):
    v0, v1, v2, v3 = v
    return np.array([
        1 / v0,
        -v1 / v0**2,
        2 * v1**2 / v0**3 - v2 / v0**2,
        -6 * v1**3 / v0**4 + 6 * v1 * v2 / v0**3 - v3 / v0**2,
    ])


def _flat(t):
    """exp(-1/t) and derivatives, zero for t <= 0."""
    if t <= 0:
        return np.zeros(4)
    e = math.exp(-1.0 / t)
    return e * np.array([1.0, 1 / t**2, (1 - 2 * t) / t**4, (1 - 6 * t + 6 * t**2) / t**6])


def smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, flat at both ends; derivatives to order 3."""
    if t <= 0:
        return np.zeros(4)
    if t >= 1:
        return np.array([1.0, 0, 0, 0])
    a = _flat(t)
    b = _flat(1 - t) * np.array([1, -1, 1, -1])
    return _mul(a, _recip(a + b))


@dataclass
class FlatBump:
    """mu * Psi(t) with Psi(t) = exp(-1/t) t^4, flat at t = 0."""

    mu: float

    def derivs(self, t):
        return self.mu * flat_bump(t)

    def certify(self, k, length, n=CERT_POINTS, delta=None):
        """Lower bound for 2k + mu Psi'' on (0, length) from a dense grid.

        The grid minimum is padded by spacing * max|mu Psi'''|. Beyond a
        finite grid, Psi'' >= 0, so an unbounded interval certifies only
        for mu >= 0.
        """
        delta = 1e-3 * k if delta is None else delta
        if math.isinf(length):
            if self.mu < 0:
                raise ConvexityCertificateFailed("negative bump on an unbounded handle")
            length = 50.0
        t = np.linspace(0.0, length, n)
        d = np.array([flat_bump(s) for s in t])
        second = 2 * k + self.mu * d[:, 2]
        pad = (t[1] - t[0]) * np.max(np.abs(self.mu * d[:, 3]))
        bound = float(second.min() - pad)
        if not bound > delta:
            raise ConvexityCertificateFailed(
                f"2k + mu Psi'' certified only down to {bound:.3e} (need > {delta:.1e})"
            )
        return bound


class Profile:
    """Convex function of the primary coordinate on (p, b)."""

    k: float
    p: float
    b: float

    def derivs(self, s) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def grad_image_end(self) -> float:
        """sup of the derivative over (p, b)."""
        if math.isinf(self.b):
            return math.inf
        return float(self.derivs(self.b)[1])

    def grad_inverse(self, z):
        """s in [p, b) with profile'(s) = z, by bracketed root finding."""
        lo = self.p
        if z <= self.derivs(lo)[1]:
            return lo
        hi = self.b
        if math.isinf(hi):
            hi = lo + 1.0
            while self.derivs(hi)[1] < z:
                hi = lo + 2 * (hi - lo)
        else:
            step = (hi - lo) / 2
            hi = lo + step
            while self.derivs(hi)[1] < z:
                step /= 2
                if self.b - step >= self.b:
                    return None  # preimage closer to b than float resolution
                hi = self.b - step
            if self.derivs(hi)[1] < z:
                return None
        return brentq(lambda s: self.derivs(s)[1] - z, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)

    def certify(self, n=CERT_POINTS):
        """Dense-grid lower bound for the second derivative on (p, b)."""
        hi = self.b if not math.isinf(self.b) else self.p + 50.0
        s = np.linspace(self.p, hi, n + 1)[1:-1] if not math.isinf(self.b) else np.linspace(self.p, hi, n)
        d = np.array([self.derivs(t) for t in s])
        pad = (s[1] - s[0]) * np.max(np.abs(d[:, 3]))
        bound = float(d[:, 2].min() - min(pad, 0.5 * d[:, 2].min()))
        if not bound > 0:
            raise ConvexityCertificateFailed(f"profile second derivative certified only down to {bound:.3e}")
        return bound


@dataclass
class BumpProfile(Profile):
    """k s^2 + mu Psi(s - p)."""

    k: float
    p: float
    b: float
    bump: FlatBump

    def derivs(self, s):
        k = self.k
        return np.array([k * s * s, 2 * k * s, 2 * k, 0.0]) + self.bump.derivs(s - self.p)

    def certify(self, n=CERT_POINTS):
        return self.bump.certify(self.k, self.b - self.p, n)

    def to_dict(self):
        return {"kind": "bump", "mu": self.bump.mu}


@dataclass
class BarrierEndProfile(Profile):
    """k s^2 near p, blended into a log barrier at b.

    G(s) = 1/2 a (log a - 1), a = b - s, has G'' = 1/(2a) = 2k at
    m = b - 1/(4k). There G plus an affine term matches k s^2 to second
    order, and a flat smooth step on [m - w, m + w] switches between them.
    """

    k: float
    p: float
    b: float
    width: float = None

    def __post_init__(self):
        if math.isinf(self.b):
            raise SpecError("a barrier end needs a finite b")
        self.m = self.b - 1.0 / (4.0 * self.k)
        if self.width is None:
            self.width = min(0.1, 0.5 * (self.m - self.p))
        if not self.m - self.width > self.p:
            raise SpecError("handle too short for a barrier end: need b - p > 1/(4k)")
        g = self._barrier(self.m)
        self._beta = 2 * self.k * self.m - g[1]
        self._alpha = self.k * self.m**2 - g[0]

    def _barrier(self, s):
        a = self.b - s
        return np.array([0.5 * a * (math.log(a) - 1), -0.5 * math.log(a), 0.5 / a, 0.5 / a**2])

    def derivs(self, s):
        k = self.k
        Q = np.array([k * s * s, 2 * k * s, 2 * k, 0.0])
        lo = self.m - self.width
        if s <= lo:
            return Q
        G = self._barrier(s) + np.array([self._alpha + self._beta * (s - self.m), self._beta, 0, 0])
        t = (s - lo) / (2 * self.width)
        S = smooth_step(t) * np.array([1, 1, 1, 1]) / np.array([1, 2 * self.width, (2 * self.width) ** 2,
                                                                (2 * self.width) ** 3])
        return Q + _mul(S, G - Q)

    def grad_image_end(self):
        return math.inf

    def to_dict(self):
        return {"kind": "barrier", "width": self.width}


@dataclass
class ConjugateProfile(Profile):
    """Legendre conjugate of another profile: s = (profile')^-1(z)."""

    of: Profile

    def __post_init__(self):
        self.k = 1.0 / (4.0 * self.of.k)
        self.p = float(self.of.derivs(self.of.p)[1])
        self.b = self.of.grad_image_end()

    def derivs(self, z):
        s = self.of.grad_inverse(z)
        if s is None:
            raise ValueError(f"{z} outside the gradient image of the profile")
        d = self.of.derivs(s)
        return np.array([s * z - d[0], s, 1.0 / d[2], -d[3] / d[2] ** 3])

    def certify(self, n=CERT_POINTS):
        return self.of.certify(n)

    def to_dict(self):
        o = self.of
        return {"kind": "conjugate", "of": o.to_dict(), "k": o.k, "p": o.p,
                "b": None if math.isinf(o.b) else o.b}


def profile_from_dict(d, k, p, b) -> Profile:
    kind = d.get("kind", "bump")
    if kind == "bump":
        return BumpProfile(k, p, b, FlatBump(float(d.get("mu", 0.0))))
    if kind == "barrier":
        return BarrierEndProfile(k, p, b, d.get("width"))
    if kind == "conjugate":
        # k, p, b stored here belong to the original handle
        b0 = math.inf if d.get("b") is None else float(d["b"])
        return ConjugateProfile(profile_from_dict(d["of"], float(d["k"]), float(d["p"]), b0))
    raise SpecError(f"unknown profile kind {kind!r}")


# -- domains ----------------------------------------------------------------

@dataclass
class Handle:
    B: np.ndarray
    p: float
    b: float
    face: Polytope

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        n = self.B.shape[0]
        if np.max(np.abs(self.B.T @ self.B - np.eye(n))) > 1e-12 or np.linalg.det(self.B) <= 0:
            raise SpecError("handle frame must be in SO(n)")
        if isinstance(self.face, Box):
            self.face = self.face.as_polytope()
        self.b = math.inf if self.b is None else float(self.b)
        self.p = float(self.p)
        if not self.b > self.p:
            raise SpecError("handle needs b > p")

    @property
    def u(self):
        return self.B[:, 0]

    def coords(self, x):
        return self.B.T @ np.asarray(x, dtype=float)

    def closure_constraints(self):
        """A x <= c describing the closed handle."""
        A = [-self.u]
        c = [-self.p]
        if not math.isinf(self.b):
            A.append(self.u)
            c.append(self.b)
        # face: normals @ y' + offsets >= 0
        Bp = self.B[:, 1:]
        for nrm, off in zip(self.face.normals, self.face.offsets):
            A.append(-(Bp @ nrm))
            c.append(off)
        return np.array(A), np.array(c)

    def to_spec(self):
        return {
            "frame": self.B.tolist(),
            "p": self.p,
            "b": None if math.isinf(self.b) else self.b,
            "face": domain_to_spec(self.face),
        }


def regular_polygon(sides, apothem=1.0, phase=0.0) -> Polytope:
    a = phase + 2 * np.pi * np.arange(sides) / sides
    normals = -np.stack([np.cos(a), np.sin(a)], axis=1)
    return Polytope(normals, np.full(sides, float(apothem)), dim=2)


@dataclass
class PolytopeWithHandles(Domain):
    core: Polytope
    handles: list = field(default_factory=list)
    validate: bool = True

    def __post_init__(self):
        self.dim = self.core.dim
        if self.validate:
            self.check()

    def region(self, x) -> int:
        """0 for the core (and gluing faces), l + 1 for handle l, -1 outside."""
        x = np.asarray(x, dtype=float)
        if self.core.contains(x):
            return 0
        for l, h in enumerate(self.handles):
            y = h.coords(x)
            if not h.face.contains(y[1:]):
                continue
            if abs(y[0] - h.p) <= GLUE_TOL * max(1.0, abs(h.p)):
                return 0
            if h.p < y[0] < h.b:
                return l + 1
        return -1

    def contains(self, x) -> bool:
        return self.region(x) >= 0

    def bounding_box(self, radius=DEFAULT_RADIUS):
        lo, hi = self.core.bounding_box(radius)
        for h in self.handles:
            flo, fhi = h.face.bounding_box(radius)
            top = min(h.b, h.p + 2 * radius)
            corners = np.array(np.meshgrid(*[[a, b] for a, b in zip([h.p, *flo], [top, *fhi])])).reshape(self.dim, -1)
            xs = h.B @ corners
            lo = np.minimum(lo, xs.min(axis=1))
            hi = np.maximum(hi, xs.max(axis=1))
        return np.maximum(lo, -radius), np.minimum(hi, radius)

    def check(self, tol=1e-9):
        """Supporting hyperplanes, gluing faces inside core facets, disjoint handles."""
        for l, h in enumerate(self.handles):
            res = linprog(-h.u, A_ub=-self.core.normals, b_ub=self.core.offsets,
                          bounds=[(None, None)] * self.dim, method="highs")
            if res.status != 0 or abs(-res.fun - h.p) > tol * max(1.0, abs(h.p)):
                raise RegionOverlap(f"handle {l}: y_1 = p does not support the core")
            # the gluing face lies in the closed core: check its vertices
            for v in _vertices(h.face):
                x = h.B @ np.concatenate([[h.p], v])
                if np.min(self.core.affine_values(x)) < -tol:
                    raise RegionOverlap(f"handle {l}: gluing face leaves the core facet")
        for i in range(len(self.handles)):
            for j in range(i + 1, len(self.handles)):
                A1, c1 = self.handles[i].closure_constraints()
                A2, c2 = self.handles[j].closure_constraints()
                res = linprog(np.zeros(self.dim), A_ub=np.vstack([A1, A2]), b_ub=np.concatenate([c1, c2]),
                              bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 0:
                    raise RegionOverlap(f"handles {i} and {j} have intersecting closures")

    def to_spec(self):
        return {
            "kind": "polytope_with_handles",
            "dim": self.dim,
            "params": {"core": domain_to_spec(self.core), "handles": [h.to_spec() for h in self.handles]},
        }


def _vertices(face: Polytope):
    """Vertices of a bounded polytope (brute force over constraint subsets)."""
    from itertools import combinations

    m = face.dim
    if m == 0:
        return [np.zeros(0)]
    out = []
    N, c = face.normals, face.offsets
    for idx in combinations(range(len(c)), m):
        A = N[list(idx)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        v = np.linalg.solve(A, -c[list(idx)])
        if np.min(N @ v + c) > -1e-9:
            out.append(v)
    return out


def _handle_from_params(d, dim):
    if "angle" in d:
        if dim != 2:
            raise SpecError("'angle' is only meaningful in the plane; give 'frame'")
        B = rotation2(float(d["angle"]))
    else:
        B = np.asarray(d["frame"], dtype=float)
    face = d["face"]
    face = domain_from_spec(face) if "kind" in face else Box(np.asarray(face["intervals"], dtype=float))
    return Handle(B, float(d["p"]), d.get("b"), face)


def _core_from_params(core):
    if core.get("kind") == "regular_polygon":
        pr = core["params"]
        return regular_polygon(int(pr["sides"]), float(pr.get("apothem", 1.0)), float(pr.get("phase", 0.0)))
    dom = domain_from_spec(core)
    return dom.as_polytope() if isinstance(dom, Box) else dom


def domain_from_params(params, dim=None) -> PolytopeWithHandles:
    core = _core_from_params(params["core"])
    return PolytopeWithHandles(core, [_handle_from_params(h, core.dim) for h in params.get("handles", [])])


# -- the function family ----------------------------------------------------

class HandleFamily(ConvexFunction):
    """k|x|^2 on the core, profile_l(y_1) + k|y'|^2 on handle l."""

    def __init__(self, domain: PolytopeWithHandles, k: float, profiles):
        if len(profiles) != len(domain.handles):
            raise SpecError("one profile per handle is required")
        self.domain = domain
        self.dim = domain.dim
        self.k = float(k)
        self.profiles = list(profiles)

    def _jet(self, x):
        x = np.asarray(x, dtype=float)
        r = self.domain.region(x)
        k, n = self.k, self.dim
        if r <= 0:
            return k * x @ x, 2 * k * x, 2 * k * np.eye(n), np.zeros((n, n, n))
        h, prof = self.domain.handles[r - 1], self.profiles[r - 1]
        y = h.coords(x)
        d = prof.derivs(y[0])
        v = d[0] + k * y[1:] @ y[1:]
        gy = np.concatenate([[d[1]], 2 * k * y[1:]])
        Hy = 2 * k * np.eye(n)
        Hy[0, 0] = d[2]
        B = h.B
        T = d[3] * np.einsum("i,j,l->ijl", B[:, 0], B[:, 0], B[:, 0])
        return v, B @ gy, B @ Hy @ B.T, T

    def interior_point(self):
        lo, hi = self.domain.core.bounding_box(1.0)
        mid = 0.5 * (lo + hi)
        return mid if self.domain.core.contains(mid) else self.domain.core.sample(1)[0]

    def gradient_inverse(self, z):
        """Exact preimage of z under the gradient, or None if z is not in the image."""
        z = np.asarray(z, dtype=float)
        x = z / (2 * self.k)
        if self.domain.core.contains(x):
            return x
        for h, prof in zip(self.domain.handles, self.profiles):
            w = h.coords(z)
            yp = w[1:] / (2 * self.k)
            if not h.face.contains(yp):
                continue
            if prof.derivs(h.p)[1] < w[0] < prof.grad_image_end():
                s = prof.grad_inverse(w[0])
                if s is not None and h.p < s < h.b:
                    return h.B @ np.concatenate([[s], yp])
        if self.domain.contains(x):
            return x
        return None

    def region_samples(self, region, n=100):
        """Low-discrepancy samples of one region (0 core, l + 1 handle l)."""
        if region == 0:
            return self.domain.core.sample(n)
        h = self.domain.handles[region - 1]
        top = h.b if not math.isinf(h.b) else h.p + 2.0
        face_box = h.face.bounding_box()
        sub = Box(np.array([[h.p, top], *zip(*face_box)]))
        pts = []
        for y in sub.sample(4 * n):
            if h.face.contains(y[1:]) and h.p < y[0] < h.b:
                pts.append(h.B @ y)
            if len(pts) == n:
                break
        return np.array(pts)

    def to_spec(self):
        spec = self.domain.to_spec()
        hs = spec["params"]["handles"]
        for hd, prof in zip(hs, self.profiles):
            hd["profile"] = prof.to_dict()
        return {"kind": "handle_family", "dim": self.dim, "params": {"k": self.k, **spec["params"]}}


def build_handle_family(domain: PolytopeWithHandles, k: float, bumps=None, profiles=None,
                        certify=True) -> HandleFamily:
    """Bumped quadratic on each handle; `profiles` overrides per handle.

    With `certify`, each profile's second derivative is bounded below on a
    dense grid; failure raises `ConvexityCertificateFailed`.
    """
    if profiles is None:
        bumps = bumps if bumps is not None else [0.0] * len(domain.handles)
        profiles = [
            BumpProfile(k, h.p, h.b, mu if isinstance(mu, FlatBump) else FlatBump(float(mu)))
            for h, mu in zip(domain.handles, bumps)
        ]
    f = HandleFamily(domain, k, profiles)
    if certify:
        for prof in profiles:
            prof.certify()
    return f


def family_from_spec(spec) -> HandleFamily:
    params = spec["params"]
    domain = domain_from_params(params, spec.get("dim"))
    k = float(params["k"])
    profiles = []
    for h, hd in zip(domain.handles, params.get("handles", [])):
        prof = hd.get("profile", {"kind": "bump", "mu": hd.get("mu", 0.0)})
        profiles.append(profile_from_dict(prof, k, h.p, h.b))
    return build_handle_family(domain, k, profiles=profiles)


def conjugate_family(f: HandleFamily) -> HandleFamily:
    """The Legendre conjugate as a handle family on the gradient image.

    Core: 2k * core with quadratic 1/(4k); handle l: p* = 2k p,
    b* = profile'(b), face 2k F, profile the 1D conjugate.
    """
    k = f.k
    handles = [
        Handle(h.B, 2 * k * h.p, prof.grad_image_end(), h.face.scaled(2 * k))
        for h, prof in zip(f.domain.handles, f.profiles)
    ]
    dom = PolytopeWithHandles(f.domain.core.scaled(2 * k), handles)
    return HandleFamily(dom, 1.0 / (4 * k), [ConjugateProfile(p) for p in f.profiles])


def standard_instance(angle=np.pi / 6, mu=1.0, k=1.0, p=1.0, b=2.0, half_width=0.2, sides=12) -> HandleFamily:
    """Regular polygon core with apothem p; handles on the facets at 0 and `angle`."""
    core = regular_polygon(sides, p)
    face = Box(np.array([[-half_width, half_width]]))
    mus = mu if np.ndim(mu) else [mu, mu]
    handles = [Handle(rotation2(a), p, b, face) for a in (0.0, angle)]
    return build_handle_family(PolytopeWithHandles(core, handles), k, mus)


# -- checks -----------------------------------------------------------------

def _one_sided_weights(order, npts):
    """Weights w with sum_j w_j f(j h) ~ h^order f^(order)(0)."""
    j = np.arange(npts, dtype=float)
    V = np.array([j**q / math.factorial(q) for q in range(npts)])
    rhs = np.zeros(npts)
    rhs[order] = 1.0
    return np.linalg.solve(V, rhs)


@dataclass
class GluingReport:
    handle: int
    point: np.ndarray
    on_interface: bool
    left: list
    right: list
    tol: float

    @property
    def differences(self):
        return [abs(a - b) for a, b in zip(self.left, self.right)]

    @property
    def max_difference(self):
        return max(self.differences) if self.on_interface else math.nan

    @property
    def passed(self):
        return self.on_interface and self.max_difference < self.tol

    @property
    def status(self):
        if not self.on_interface:
            return "NotOnInterface"
        return "PASS" if self.passed else "FAIL"


def gluing_smoothness_check(f: HandleFamily, l: int, orders=3, h=1e-2, probe=None, tol=1e-6,
                            accuracy=2) -> GluingReport:
    """Derivatives of order <= `orders` along the primary direction, from each side.

    Core-side and handle-side one-sided stencils (accuracy order 2) at the
    probe point on the gluing face are compared.
    """
    if orders > 5:
        raise ValueError("orders must be at most 5")
    hd = f.domain.handles[l]
    if probe is None:
        fv = _vertices(hd.face)
        probe = hd.B @ np.concatenate([[hd.p], np.mean(fv, axis=0)])
    probe = np.asarray(probe, dtype=float)
    y = hd.coords(probe)
    on = abs(y[0] - hd.p) <= 1e-12 * max(1.0, abs(hd.p)) and hd.face.contains(y[1:])
    if not on:
        return GluingReport(l, probe, False, [], [], tol)
    u = hd.u
    left, right = [], []
    for m in range(orders + 1):
        npts = m + accuracy
        w = _one_sided_weights(m, npts)
        j = np.arange(npts)
        fr = np.array([f.value(probe + t * h * u) for t in j])
        fl = np.array([f.value(probe - t * h * u) for t in j])
        right.append(float(w @ fr) / h**m)
        left.append(float(w @ fl) / (-h) ** m)
    return GluingReport(l, probe, True, left, right, tol)


def allowed_signatures(n):
    return {StratumSignature((n,)), StratumSignature((n - 1, 1)), StratumSignature((1, n - 1))}


def stratum_trace(f: HandleFamily, samples, rel_gap=REL_GAP) -> Counter:
    """Histogram of stratum signatures of the Hessian over samples."""
    allowed = allowed_signatures(f.dim)
    hist = Counter()
    for x in samples:
        sig = stratum_signature(f.hessian(x), rel_gap)
        if sig not in allowed:
            raise UnexpectedStratum(f"signature {sig} at {np.asarray(x)!r}")
        hist[sig] += 1
    return hist


@dataclass
class NoCommonReport:
    status: str
    optimized_min: float = math.nan
    recovery: object = None

    @property
    def passed(self):
        return self.status == "PASS"


def no_common_characteristics_check(f: HandleFamily, n_per_handle=100, threshold=1e-2) -> NoCommonReport:
    """Joint characteristic recovery over samples from all bumped handles."""
    active = [l for l, prof in enumerate(f.profiles) if not _is_flat(prof)]
    if len(active) < 2:
        return NoCommonReport("NotApplicable")
    us = [f.domain.handles[l].u for l in active]
    generic = any(
        1e-9 < abs(us[i] @ us[j]) < 1 - 1e-9 for i in range(len(us)) for j in range(i + 1, len(us))
    )
    if not generic:
        return NoCommonReport("NotApplicable")
    samples = np.concatenate([f.region_samples(l + 1, n_per_handle) for l in active])
    rec = characteristic_recovery(f, samples)
    ok = rec.B is None and rec.optimized_min > threshold
    return NoCommonReport("PASS" if ok else "FAIL", rec.optimized_min, rec)


def _is_flat(prof):
    if isinstance(prof, BumpProfile):
        return prof.bump.mu == 0.0
    if isinstance(prof, ConjugateProfile):
        return _is_flat(prof.of)
    return False
