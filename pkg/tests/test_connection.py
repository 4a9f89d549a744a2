import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessinv import catalog
from hessinv.connection import (
    Arc,
    Polyline,
    Segment,
    characteristic_recovery,
    horizontal_lift,
    orthonormal_diagonal_frame,
    property_c_check,
    property_c_residual,
)
from hessinv.errors import CurveLeavesDomain, IntegratorToleranceExceeded, NotInC, NotOrthonormalFrame
from hessinv.funcspace import ExpPiece, Quadratic, SeparableSum, eval_jet3
from hessinv.matgeo import cartan_factor, eigenframe, offdiag_max
from hessinv.propi import christoffel


def test_flat_metric_keeps_frame():
    f = Quadratic(1.0, 2)
    A0 = np.eye(2) / np.sqrt(2)
    res = horizontal_lift(f, Segment([0, 0], [1, 2]), A0)
    assert np.all(res.frames == A0)
    assert res.max_orthonormality_drift < 1e-15 and res.max_c_drift == 0


def test_exponential_closed_form():
    f = SeparableSum([(0, ExpPiece(1.0, 1.0))], 1)
    res = horizontal_lift(f, Segment([0.0], [1.0], 2.0), np.eye(1))
    np.testing.assert_allclose(res.frames[:, 0, 0], np.exp(-res.t / 2), atol=1e-12)
    np.testing.assert_allclose(res.frames[:, 0, 0] ** 2 * np.exp(res.t), 1.0, atol=1e-12)


def test_separable_lift_stays_in_c_and_in_one_leaf():
    f = catalog.get("sep_exp")
    x0 = np.array([-0.8, 0.3])
    A0 = np.diag(np.diag(f.hessian(x0)) ** -0.5)
    res = horizontal_lift(f, Segment(x0, [0.5, 0.6]), A0)
    assert res.max_c_drift < 1e-8
    B0, _ = cartan_factor(res.frames[0])
    for A in res.frames[::50]:
        B, _ = cartan_factor(A)
        assert np.max(np.abs(B - B0)) < 1e-8
    for H in res.hessians:
        assert offdiag_max(B0.T @ H @ B0) < 1e-7


@settings(max_examples=8)
@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-np.pi, np.pi), st.floats(0.05, 0.4))
def test_orthonormality_is_preserved(x, y, ang, length):
    f = catalog.get("mixed_exp")
    x0 = np.array([x, y])
    d = length * np.array([np.cos(ang), np.sin(ang)])
    if not f.domain.contains(x0 + d):
        return
    A0 = orthonormal_diagonal_frame(f.hessian(x0))
    res = horizontal_lift(f, Segment(x0, d), A0, step=4e-3)
    assert res.max_orthonormality_drift < 1e-7
    # A A^T reproduces the inverse metric along the curve
    for A, H in zip(res.frames[::25], res.hessians[::25]):
        np.testing.assert_allclose(A @ A.T, np.linalg.inv(H), atol=1e-8)


def test_generic_lift_leaves_c():
    f = catalog.get("mixed_exp")
    x0 = np.zeros(2)
    res = horizontal_lift(f, Segment(x0, [0.3, 0.2]), orthonormal_diagonal_frame(f.hessian(x0)))
    assert res.max_c_drift > 1e-4


def test_polyline_and_arc():
    f = catalog.get("rot30")
    pts = np.array([[0.0, 0.0], [0.2, 0.1], [0.1, 0.3]])
    A0 = orthonormal_diagonal_frame(f.hessian(pts[0]))
    res = horizontal_lift(f, Polyline(pts), A0, step=5e-3)
    assert res.t[-1] == pytest.approx(2.0) and res.max_orthonormality_drift < 1e-9
    arc = Arc(np.zeros(2), 0.3, 0.0, np.pi)
    A0 = orthonormal_diagonal_frame(f.hessian(arc.position(0.0)))
    res = horizontal_lift(f, arc, A0, step=5e-3)
    assert res.max_orthonormality_drift < 1e-9
    # rotated separable: the lift stays in C
    assert res.max_c_drift < 1e-8


def test_lift_errors():
    f = catalog.get("rot30")
    A0 = orthonormal_diagonal_frame(f.hessian(np.zeros(2)))
    with pytest.raises(CurveLeavesDomain):
        horizontal_lift(f, Segment(np.zeros(2), [2.0, 0.0]), A0)
    with pytest.raises(NotOrthonormalFrame):
        horizontal_lift(f, Segment(np.zeros(2), [0.1, 0.0]), np.eye(2))
    with pytest.raises(IntegratorToleranceExceeded):
        horizontal_lift(f, Segment(np.zeros(2), [0.4, 0.0]), A0, step=0.2, tol=1e-14)


def test_rk4_fourth_order():
    f = SeparableSum([(0, ExpPiece(1.0, 1.0))], 1)
    seg = Segment([0.0], [1.0])
    errs = [abs(horizontal_lift(f, seg, np.eye(1), step=h, check_halving=False).frames[-1, 0, 0] - np.exp(-0.5))
            for h in (0.2, 0.1, 0.05)]
    assert 14 < errs[0] / errs[1] < 18 and 14 < errs[1] / errs[2] < 18


def test_property_c_residual_examples():
    assert property_c_residual(Quadratic(1.0, 2), np.zeros(2), np.eye(2) / np.sqrt(2))["residual"] == 0
    f = catalog.get("sep_exp")
    x = np.array([-0.5, 0.5])
    A = np.diag(np.diag(f.hessian(x)) ** -0.5)
    assert property_c_residual(f, x, A)["residual"] < 1e-12
    m = catalog.get("mixed_exp")
    r = property_c_residual(m, np.zeros(2), orthonormal_diagonal_frame(m.hessian(np.zeros(2))))
    assert r["residual"] > 1e-3 and r["reduced"] > 1e-3


def test_property_c_residual_preconditions():
    f = catalog.get("rot30")
    x = np.zeros(2)
    with pytest.raises(NotOrthonormalFrame):
        property_c_residual(f, x, np.eye(2))
    A = orthonormal_diagonal_frame(f.hessian(x))
    Hhalf = np.linalg.cholesky(np.linalg.inv(f.hessian(x)))  # orthonormal, generally not in C
    with pytest.raises(NotInC):
        property_c_residual(f, x, Hhalf)
    assert property_c_residual(f, x, A)["zero"]


def _fiber_scan_oracle(f, x, v, n=4000):
    """Brute force over E D^-1/2 R(psi), psi in [0, pi), keeping frames in C."""
    H = f.hessian(x)
    w, E = np.linalg.eigh(H)
    A0 = E @ np.diag(w**-0.5)
    G = christoffel(f, x).gammas
    M = 0.5 * np.tensordot(v, G, axes=1)
    best = np.inf
    for psi in np.linspace(0, np.pi, n, endpoint=False):
        R = np.array([[np.cos(psi), -np.sin(psi)], [np.sin(psi), np.cos(psi)]])
        A = A0 @ R
        Q = A.T @ A
        if abs(Q[0, 1]) > 1e-9 * np.max(np.abs(Q)):
            continue
        S = A.T @ (M + M.T) @ A
        best = min(best, abs(S[0, 1]))
    return best


def test_property_c_check_examples():
    f = catalog.get("rot45")
    x = np.array([0.1, -0.2])
    res = property_c_check(f, x, [1.0, 0.5])
    assert res.found and res.residual < 1e-12
    _, E = eigenframe(f.hessian(x))
    B, _ = cartan_factor(res.frame)
    assert np.allclose(np.abs(B.T @ E), np.eye(2), atol=1e-9) or np.allclose(np.abs(B.T @ E), np.eye(2)[::-1], atol=1e-9)
    q = property_c_check(Quadratic(1.0, 2), np.zeros(2), [1.0, 0.0])
    assert q.found and q.residual == 0.0
    m = catalog.get("mixed_exp")
    for x in m.domain.sample(10):
        r = property_c_check(m, x)
        assert not r.found
        oracle = max(_fiber_scan_oracle(m, x, e) for e in np.eye(2))
        assert oracle > 1e-3
        assert r.residual == pytest.approx(oracle, rel=1e-3)


def test_single_velocity_can_be_tangent():
    # in the plane the tangency residual is one number linear in the velocity
    m = catalog.get("mixed_exp")
    x = np.zeros(2)
    A = orthonormal_diagonal_frame(m.hessian(x))
    G = christoffel(m, x).levi_civita
    s = [(A.T @ (g + g.T) @ A)[0, 1] for g in G]
    v = np.array([s[1], -s[0]])
    assert property_c_check(m, x, v).found
    assert not property_c_check(m, x, [0.0, 1.0]).found
    # over all coordinate directions no frame in the fiber works
    assert not property_c_check(m, x).found


def test_property_c_check_double_eigenvalue_scan():
    # at the origin the handle family is 2|x|^2: the whole circle fiber is searched
    f = catalog.get("handles")
    r = property_c_check(f, np.zeros(2), [1.0, 0.0])
    assert r.found and r.residual == 0.0


@pytest.mark.parametrize("name", ["rot30", "rot45", "rot1"])
def test_recovery_rotated(name):
    entry = catalog.CATALOG[name]
    f = entry.build()
    rec = characteristic_recovery(f, f.domain.sample(100))
    assert rec.B is not None and rec.max_offdiag < 1e-9
    assert rec.angle == pytest.approx(np.mod(entry.angle, np.pi / 2), abs=1e-9)


def test_recovery_flat_metric():
    rec = characteristic_recovery(Quadratic(1.0, 2), [np.zeros(2), np.ones(2)])
    np.testing.assert_array_equal(rec.B, np.eye(2))
    assert rec.max_offdiag == 0


def test_recovery_three_dimensional():
    f = catalog.get("rot3d")
    rec = characteristic_recovery(f, f.domain.sample(60))
    assert rec.B is not None
    P = np.abs(rec.B.T @ catalog.ROTATION3)
    np.testing.assert_allclose(np.sort(P, axis=1)[:, -1], 1.0, atol=1e-9)
    m = catalog.get("mixed3")
    rec = characteristic_recovery(m, m.domain.sample(60))
    assert rec.B is None and rec.optimized_min > 1e-3


def test_recovery_fails_for_two_handles():
    f = catalog.get("handles")
    xs = np.concatenate([f.region_samples(1, 50), f.region_samples(2, 50)])
    rec = characteristic_recovery(f, xs)
    assert rec.B is None and rec.optimized_min > 1e-2


def test_lift_rows_layout():
    f = catalog.get("sep_exp")
    x0 = np.array([-0.5, 0.5])
    res = horizontal_lift(f, Segment(x0, [1.0, 0.0], 0.1), orthonormal_diagonal_frame(f.hessian(x0)), step=0.05)
    rows = list(res.rows())
    assert len(rows) == 3 and len(rows[0]) == 1 + 4 + 2
    assert eval_jet3(f, x0).dim == 2
