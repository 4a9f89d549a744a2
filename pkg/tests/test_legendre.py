import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessinv import catalog
from hessinv.connection import characteristic_recovery
from hessinv.errors import NoConvergence
from hessinv.funcspace import Box, ExpPiece, LogBarrierPiece, QuadraticPiece, SeparableSum, eval_jet3, rotation2
from hessinv.handles import (
    BarrierEndProfile,
    Handle,
    PolytopeWithHandles,
    build_handle_family,
    conjugate_family,
    regular_polygon,
    standard_instance,
)
from hessinv.legendre import (
    LegendreConjugate,
    conjugate_jet,
    conjugate_propi_invariance,
    grid_conjugate,
    hessian_duality_check,
    involution_check,
    legendre_domain_image,
    legendre_point,
)
from hessinv.propi import residual_from_jet


def one_d(piece):
    return SeparableSum([(0, piece)], 1)


def test_closed_forms():
    x, v = legendre_point(one_d(QuadraticPiece(1.0)), [1.0])
    assert x[0] == pytest.approx(0.5, abs=1e-12) and v == pytest.approx(0.25, abs=1e-12)
    x, v = legendre_point(one_d(ExpPiece(1.0, 1.0)), [1.0])
    assert x[0] == pytest.approx(0.0, abs=1e-12) and v == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("y", [-1.0, -0.3, 0.0, 0.4, 1.2])
def test_barrier_conjugate_against_grid_and_closed_form(y):
    # 1/2 (-r)(log(-r) - 1) on r < 0 is convex with conjugate 1/2 e^(-2y)
    f = one_d(LogBarrierPiece(-1.0, 0.0))
    _, v = legendre_point(f, [y], x_init=[-1.0])
    assert v == pytest.approx(0.5 * np.exp(-2 * y), rel=1e-12)
    grid = -np.exp(np.linspace(-12, 4, 400_001))
    oracle = grid_conjugate(lambda r: 0.5 * (-r) * (np.log(-r) - 1), y, grid)
    assert v == pytest.approx(oracle, rel=1e-8)


@settings(max_examples=25)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_conjugate_jet_inverts_hessian(a, b):
    f = catalog.get("mixed_exp")
    x = np.array([a, b]) * 0.2
    jet = eval_jet3(f, x)
    cj = conjugate_jet(jet)
    np.testing.assert_allclose(cj.grad, x, atol=1e-15)
    np.testing.assert_allclose(cj.hess @ jet.hess, np.eye(2), atol=1e-12)
    G = cj.hess
    want = -np.einsum("ijk,ia,jb,kc->abc", jet.third, G, G, G)
    np.testing.assert_allclose(cj.third, want, atol=1e-12)


def test_conjugate_jet_matches_newton_route():
    f = catalog.get("mixed_exp")
    conj = LegendreConjugate(f)
    for x in f.domain.sample(10):
        y = f.gradient(x)
        np.testing.assert_allclose(conj.preimage(y), x, atol=1e-10)
        assert conj.value(y) == pytest.approx(x @ y - f.value(x), abs=1e-12)


@pytest.mark.parametrize("name", ["sep_exp", "rot30", "mixed_exp"])
def test_involution_and_duality(name):
    f = catalog.get(name)
    xs = f.domain.sample(100)
    rows = involution_check(f, xs)
    assert max(max(r.point_error, r.value_error) for r in rows) < 1e-8
    assert max(hessian_duality_check(f, xs[:30])) < 1e-7


def test_separable_conjugate_keeps_property_i():
    f = catalog.get("sep_exp")
    rep = conjugate_propi_invariance(f, f.domain.sample(60))
    assert rep.passed and rep.max_conjugate_residual < 1e-10 and rep.agree
    assert rep.max_preimage_error < 1e-10


def test_mixed_conjugate_stays_nonzero():
    f = catalog.get("mixed_exp")
    rep = conjugate_propi_invariance(f, f.domain.sample(60))
    assert not rep.passed and rep.agree
    assert min(r.conjugate_residual for r in rep.rows) > 1e-3


def test_rotated_conjugate_has_the_same_characteristic_angle():
    entry = catalog.CATALOG["rot30"]
    f = entry.build()
    conj = LegendreConjugate(f)
    ys = np.array([f.gradient(x) for x in f.domain.sample(40)])
    rec = characteristic_recovery(conj, ys)
    assert rec.B is not None
    d = abs(rec.angle - np.mod(entry.angle, np.pi / 2))
    assert min(d, np.pi / 2 - d) < 1e-6


def test_no_convergence_outside_the_gradient_image():
    f = one_d(ExpPiece(1.0, 1.0))
    with pytest.raises(NoConvergence) as info:
        legendre_point(f, [-1.0])
    assert info.value.last_iterate is not None


def test_domain_image_without_handles_is_scaled_core():
    k = 1.5
    core = regular_polygon(6, 1.0)
    f = build_handle_family(PolytopeWithHandles(core, []), k)
    out = legendre_domain_image(f, n=100)
    big = core.scaled(2 * k)
    assert all(big.contains(y) for y in out["image"])
    np.testing.assert_allclose(out["image"], 2 * k * out["points"], atol=1e-15)
    assert out["direction_deviation"] == {}


def test_domain_image_handle_direction_is_preserved():
    f = standard_instance()
    out = legendre_domain_image(f, n=300)
    devs = out["direction_deviation"]
    assert set(devs) == {0, 1}
    assert all(d is not None and d < 1e-8 for d in devs.values())


def test_conjugate_family_agrees_with_newton_route():
    f = standard_instance()
    g = conjugate_family(f)
    conj = LegendreConjugate(f)
    for x in f.domain.sample(60):
        y = f.gradient(x)
        assert g.domain.contains(y)
        np.testing.assert_allclose(g.gradient(y), x, atol=1e-10)
        assert g.value(y) == pytest.approx(conj.value(y), abs=1e-10)
        np.testing.assert_allclose(g.hessian(y), np.linalg.inv(f.hessian(x)), atol=1e-9)


def test_barrier_end_gives_unbounded_conjugate_handle():
    k = 1.0
    core = regular_polygon(8, 1.0)
    h = Handle(rotation2(0.0), 1.0, 2.0, Box(np.array([[-0.2, 0.2]])))
    dom = PolytopeWithHandles(core, [h])
    f = build_handle_family(dom, k, profiles=[BarrierEndProfile(k, 1.0, 2.0)])
    g = conjugate_family(f)
    assert np.isinf(g.domain.handles[0].b)
    # the primary gradient grows without bound toward b
    assert f.gradient([1.999999, 0.0])[0] > 5
    xs = f.region_samples(1, 40)
    assert max(residual_from_jet(eval_jet3(f, x)).max_abs for x in xs) < 1e-12
    for x in xs:
        np.testing.assert_allclose(g.gradient(f.gradient(x)), x, atol=1e-9)
