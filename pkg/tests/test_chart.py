import numpy as np
import pytest

from curvops.catalog import (
    DunnSpec,
    FiedlerSpec,
    LorentzMFSpec,
    MBetaSpec,
    Warped3DSpec,
)
from curvops.chart import (
    ChartDomainError,
    build_chart,
    christoffel_at,
    curvature_at,
    curvature_range_rank,
    hessian_log_scalar,
    metric_at,
    model_at,
)
from curvops.model import curvature_operator, is_skew_tsankov, nilpotency_order

FLAT3 = build_chart((0, 3), (("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")))


def _strip_orbit(riemann, i, j, k, l):
    out = riemann.copy()
    for (a, b, c, d) in (
        (i, j, k, l),
        (j, i, k, l),
        (i, j, l, k),
        (j, i, l, k),
        (k, l, i, j),
        (l, k, i, j),
        (k, l, j, i),
        (l, k, j, i),
    ):
        out[a, b, c, d] = 0.0
    return out


def test_flat_metric_identity():
    g, ginv = metric_at(FLAT3, (0.3, -1.0, 2.0))
    assert np.allclose(g, np.eye(3))
    assert np.allclose(ginv, np.eye(3))


def test_mbeta_metric_values():
    chart = MBetaSpec(beta=1.0).build()
    g, ginv = metric_at(chart, (0.0, 0.0, 1.0, 1.0))
    assert np.allclose(g, np.diag([1.0, 4.0, 1.0, 1.0]))
    assert np.allclose(ginv, np.diag([1.0, 0.25, 1.0, 1.0]))


def test_lorentz_inverse_closed_form():
    chart = LorentzMFSpec(f="exp(y)").build()
    point = (0.7, -0.3, 0.4)
    f = np.exp(0.4)
    g, ginv = metric_at(chart, point)
    assert np.allclose(g, [[-2 * f, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert np.allclose(ginv, [[0, 1, 0], [1, 2 * f, 0], [0, 0, 1]])


def test_flat_christoffels_vanish():
    gamma1, gamma2 = christoffel_at(FLAT3, (1.0, 2.0, 3.0))
    assert np.abs(gamma1).max() == 0.0
    assert np.abs(gamma2).max() == 0.0


def test_mbeta_christoffel_values():
    chart = MBetaSpec(beta=2.0).build()
    gamma1, _ = christoffel_at(chart, (0.5, -0.5, 1.0, 1.0))
    assert gamma1[1, 1, 2] == pytest.approx(-3.0)
    assert gamma1[1, 1, 3] == pytest.approx(-6.0)
    assert gamma1[1, 3, 1] == pytest.approx(6.0)


def test_warped_christoffel_value():
    chart = Warped3DSpec(alpha="0").build()
    gamma1, _ = christoffel_at(chart, (0.0, 0.0, 2.0))
    assert gamma1[0, 2, 0] == pytest.approx(2.0)


def test_mbeta_curvature_single_orbit():
    chart = MBetaSpec(beta=1.0).build()
    data = curvature_at(chart, (0.0, 0.0, 1.0, 1.0))
    assert data.riemann[0, 1, 1, 0] == pytest.approx(-2.0)
    assert np.abs(_strip_orbit(data.riemann, 0, 1, 1, 0)).max() < 1e-12
    assert data.scalar == pytest.approx(-1.0)


def test_warped_scalar_value():
    chart = Warped3DSpec(alpha="0").build()
    data = curvature_at(chart, (0.0, 0.0, 2.0))
    assert data.scalar == pytest.approx(-0.5)


def test_fiedler_curvature_entry():
    chart = FiedlerSpec(
        nu=2, xi=((1.0, 0.0), (0.0, 1.0)), f="1/2*(u1*u1+u2*u2)"
    ).build()
    data = curvature_at(chart, (0.0, 0.3, -0.2, 0.0))
    assert data.riemann[0, 1, 1, 0] == pytest.approx(1.0)
    assert data.riemann[0, 2, 2, 0] == pytest.approx(1.0)
    assert data.riemann[0, 1, 2, 0] == pytest.approx(0.0)


def test_model_at_flat_is_zero():
    model = model_at(FLAT3, (0.0, 0.0, 0.0))
    assert model.max_norm() == 0.0


def test_model_at_mbeta_commutes():
    chart = MBetaSpec(beta=1.3).build()
    assert is_skew_tsankov(model_at(chart, (0.2, 1.0, 0.7, 1.5))).passed


def test_model_at_dunn_order_two():
    chart = DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0"))).build()
    model = model_at(chart, (0.4, -1.2, 0.0, 2.0))
    assert nilpotency_order(model).order == 2


def test_fiedler_operator_sends_core_to_null():
    chart = FiedlerSpec(nu=1, xi=((1.0,),), f="1/2*u1*u1").build()
    model = model_at(chart, (0.0, 0.0, 0.0))
    op = curvature_operator(model, np.eye(3)[0], np.eye(3)[1])
    assert op.apply(np.eye(3)[1]) == pytest.approx([0.0, 0.0, 1.0])


def test_range_rank():
    assert curvature_range_rank(FLAT3, (0.0, 0.0, 0.0)) == 0
    assert curvature_range_rank(MBetaSpec(beta=1.0).build(), (0.0, 0.0, 1.0, 1.0)) == 2
    assert curvature_range_rank(Warped3DSpec(alpha="0").build(), (0.0, 0.0, 1.0)) == 2


def test_hessian_log_scalar_frozen_case():
    spec = MBetaSpec(beta=2.0)
    chart = spec.build()
    point = (0.0, 0.0, 1.0, 1.0)
    exact = hessian_log_scalar(chart, point, (2, 3), scalar_field=spec.scalar_expression())
    assert exact.matrix == pytest.approx(
        np.array([[10.0 / 9.0, 2.0 / 9.0], [2.0 / 9.0, 4.0 / 9.0]])
    )
    assert exact.determinant == pytest.approx(4.0 / 9.0)
    # determinant = (beta^2/4) * tau^2 with tau = -2/3 here
    assert exact.determinant == pytest.approx((4.0 / 4.0) * (2.0 / 3.0) ** 2)
    fd = hessian_log_scalar(chart, point, (2, 3))  # difference fallback
    assert fd.matrix == pytest.approx(exact.matrix, rel=1e-6, abs=1e-6)
    assert fd.determinant == pytest.approx(exact.determinant, rel=1e-6)


def test_hessian_log_scalar_rejects_zero_scalar():
    with pytest.raises(ChartDomainError):
        hessian_log_scalar(FLAT3, (0.0, 0.0, 0.0), (0, 1))


CATALOG_CHARTS = (
    ("warped3d", Warped3DSpec(alpha="sin(x1) - 0.4*x2"), None),
    ("mbeta", MBetaSpec(beta=0.8), None),
    ("dunn", DunnSpec(p=2, psi=(("x1*x2 + x2*x2", "x1"), ("0", "x2"))), None),
    (
        "fiedler",
        FiedlerSpec(nu=2, xi=((1.0, 0.2), (0.2, -1.0)), f="u1*u2*u2 - u1*u1"),
        None,
    ),
    ("lorentz_mf", LorentzMFSpec.from_preset("n2m"), None),
)


@pytest.mark.parametrize("name,spec,_", CATALOG_CHARTS)
def test_riemann_symmetries_on_catalog_charts(name, spec, _, rng):
    chart = spec.build()
    points = np.stack([spec.sample_point(rng) for _ in range(200)])
    data = curvature_at(chart, points)
    r = data.riemann
    scale = max(1.0, np.abs(r).max())
    assert np.abs(r + np.swapaxes(r, 1, 2)).max() <= 1e-9 * scale
    assert np.abs(r - np.transpose(r, (0, 3, 4, 1, 2))).max() <= 1e-9 * scale
    bianchi = r + np.transpose(r, (0, 2, 3, 1, 4)) + np.transpose(r, (0, 3, 1, 2, 4))
    assert np.abs(bianchi).max() <= 1e-9 * scale


def test_batched_curvature_matches_single(rng):
    spec = MBetaSpec(beta=1.1)
    chart = spec.build()
    points = np.stack([spec.sample_point(rng) for _ in range(16)])
    batch = curvature_at(chart, points)
    for k in (0, 7, 15):
        single = curvature_at(chart, points[k])
        assert np.allclose(batch.riemann[k], single.riemann)
        assert np.allclose(batch.scalar[k], single.scalar)


def test_flat_cone_has_no_curvature():
    chart = Warped3DSpec(alpha="log(2/(1 + x1*x1 + x2*x2))").build()
    data = curvature_at(chart, (0.3, -0.2, 1.7))
    assert np.abs(data.riemann).max() < 1e-8
    assert abs(data.scalar) < 1e-8


def test_guard_violation_raises():
    chart = MBetaSpec(beta=1.0).build()
    with pytest.raises(ChartDomainError):
        metric_at(chart, (0.0, 0.0, -1.0, 1.0))
    with pytest.raises(ChartDomainError):
        curvature_at(chart, (0.0, 0.0, 1.0, 0.0))


def test_degenerate_metric_detected():
    chart = build_chart((0, 2), (("x1", "0"), ("0", "1")), guards=())
    with pytest.raises(ChartDomainError):
        metric_at(chart, (0.0, 1.0))
