import numpy as np
import pytest

from curvops.catalog import (
    FAMILIES,
    PRESETS,
    CatalogError,
    CustomSpec,
    DunnSpec,
    FiedlerSpec,
    LorentzMFSpec,
    MBetaSpec,
    Warped3DSpec,
    build,
    describe_families,
    oracle_curvature,
    scalar_curvature_closed_form,
    spec_from_config,
)
from curvops.chart import curvature_at, metric_at

ALL_SPECS = (
    Warped3DSpec(alpha="x1*x2 - 0.5*x2*x2"),
    MBetaSpec(beta=2.2),
    DunnSpec(p=2, psi=(("x1*x1 + x2", "x1*x2"), ("0", "x2*x2"))),
    FiedlerSpec(nu=2, xi=((2.0, 0.5), (0.5, 1.0)), f="u1*u1*u2 + u2"),
    LorentzMFSpec(f="exp(y) - y"),
)


def test_registry_contents():
    assert set(FAMILIES) == {
        "warped3d",
        "mbeta",
        "dunn",
        "fiedler",
        "lorentz_mf",
        "custom",
    }
    assert len(describe_families()) == 6


def test_warped_structure():
    chart = Warped3DSpec(alpha="0").build()
    assert chart.dim == 3
    assert chart.signature == (0, 3)
    g, _ = metric_at(chart, (0.4, -1.0, 2.0))
    assert np.allclose(g, np.diag([4.0, 4.0, 1.0]))


def test_dunn_structure():
    chart = DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0"))).build()
    assert chart.signature == (2, 2)
    g, _ = metric_at(chart, (0.5, 1.5, -2.0, 0.3))
    assert g[0, 2] == pytest.approx(1.0)
    assert g[1, 3] == pytest.approx(1.0)
    assert g[0, 0] == pytest.approx(1.5**2)
    assert g[2, 2] == 0.0 and g[3, 3] == 0.0


def test_fiedler_signature_follows_xi():
    assert FiedlerSpec(nu=2, xi=((1.0, 0.0), (0.0, 1.0)), f="0").signature() == (1, 3)
    assert FiedlerSpec(nu=2, xi=((-1.0, 0.0), (0.0, 1.0)), f="0").signature() == (2, 2)


def test_invalid_parameters_rejected():
    with pytest.raises(CatalogError):
        MBetaSpec(beta=-1.0)
    with pytest.raises(CatalogError):
        MBetaSpec(beta=0.0)
    with pytest.raises(CatalogError):
        DunnSpec(p=0, psi=())
    with pytest.raises(CatalogError):
        FiedlerSpec(nu=2, xi=((1.0, 0.5), (0.4, 1.0)), f="0")  # not symmetric
    with pytest.raises(CatalogError):
        FiedlerSpec(nu=1, xi=((0.0,),), f="0")  # degenerate core
    with pytest.raises(CatalogError):
        LorentzMFSpec.from_preset("nope")


def test_dunn_rejects_y_dependence():
    with pytest.raises(CatalogError):
        DunnSpec(p=2, psi=(("y1", "0"), ("0", "0")))


def test_fiedler_rejects_non_core_dependence():
    with pytest.raises(CatalogError):
        FiedlerSpec(nu=1, xi=((1.0,),), f="x")


def test_presets_all_build():
    assert set(PRESETS) == {
        "s_plus",
        "s_minus",
        "n1m",
        "n2m",
        "n3m",
        "n1p",
        "n2p",
        "n3p",
    }
    for name in PRESETS:
        chart = LorentzMFSpec.from_preset(name).build()
        metric_at(chart, (0.0, 0.0, 0.0))


def test_oracle_mbeta_single_orbit():
    spec = MBetaSpec(beta=1.0)
    data = spec.oracle_curvature(np.array([0.0, 0.0, 1.0, 1.0]))
    assert data.riemann[0, 1, 1, 0] == pytest.approx(-2.0)
    # the (0,1,1,0) orbit has 4 distinct slots; nothing else is nonzero
    assert np.count_nonzero(data.riemann) == 4
    assert data.scalar == pytest.approx(-1.0)


def test_oracle_fiedler_entry():
    spec = FiedlerSpec(nu=1, xi=((1.0,),), f="1/2*u1*u1")
    data = spec.oracle_curvature(np.array([0.0, 0.7, 0.0]))
    assert data.riemann[0, 1, 1, 0] == pytest.approx(1.0)


def test_oracle_dunn_constant_curvature():
    spec = DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0")))
    for point in ((0.0, 0.0, 0.0, 0.0), (3.0, -2.0, 1.0, 5.0)):
        data = spec.oracle_curvature(np.asarray(point))
        assert data.riemann[0, 1, 1, 0] == pytest.approx(-1.0)


def test_scalar_closed_forms():
    warped = Warped3DSpec(alpha="x1*x1 + x2*x2")
    assert warped.scalar_closed_form(np.array([0.0, 0.0, 1.0])) == pytest.approx(-10.0)
    mbeta = MBetaSpec(beta=2.0)
    assert mbeta.scalar_closed_form(np.array([0.0, 0.0, 1.0, 1.0])) == pytest.approx(
        -2.0 / 3.0
    )
    dunn = DunnSpec(p=2, psi=(("x1*x1", "0"), ("0", "0")))
    assert dunn.scalar_closed_form(np.array([1.0, 2.0, 3.0, 4.0])) == 0.0
    assert scalar_curvature_closed_form(
        LorentzMFSpec.from_preset("n1p"), np.zeros(3)
    ) == 0.0


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family)
def test_engine_matches_oracle(spec, rng):
    chart = build(spec)
    for _ in range(25):
        point = spec.sample_point(rng)
        engine = curvature_at(chart, point)
        oracle = oracle_curvature(spec, point)
        for name in ("metric", "gamma_first", "gamma_second", "riemann", "ricci"):
            got = getattr(engine, name)
            want = getattr(oracle, name)
            scale = max(1.0, np.abs(want).max())
            assert np.abs(got - want).max() <= 1e-9 * scale, name
        assert abs(engine.scalar - oracle.scalar) <= 1e-9 * max(1.0, abs(oracle.scalar))


def test_warped_surface_relation(rng):
    spec = Warped3DSpec(alpha="0.3*x1*x1 - x1*x2")
    chart = spec.build()
    surface = spec.surface_chart()
    for _ in range(20):
        point = spec.sample_point(rng)
        tau_m = float(curvature_at(chart, point).scalar)
        tau_n = float(curvature_at(surface, point[:2]).scalar)
        assert tau_m == pytest.approx((tau_n - 2.0) / point[2] ** 2, abs=1e-10)


def test_custom_spec_builds_and_refuses_oracle():
    spec = CustomSpec(
        signature=(1, 1),
        components=(("-1", "0"), ("0", "exp(2*x1)")),
    )
    chart = spec.build()
    assert chart.signature == (1, 1)
    with pytest.raises(CatalogError):
        spec.oracle_curvature(np.zeros(2))
    with pytest.raises(CatalogError):
        spec.scalar_closed_form(np.zeros(2))


def test_spec_from_config_round_trip():
    spec = spec_from_config({"family": "mbeta", "beta": 1.5})
    assert isinstance(spec, MBetaSpec) and spec.beta == 1.5
    spec = spec_from_config(
        {"family": "dunn", "p": 2, "psi": [["x2*x2", "0"], ["0", "0"]]}
    )
    assert isinstance(spec, DunnSpec)
    spec = spec_from_config({"family": "lorentz_mf", "preset": "s_plus"})
    assert isinstance(spec, LorentzMFSpec)


def test_spec_from_config_strictness():
    with pytest.raises(CatalogError):
        spec_from_config({"family": "mbeta"})  # missing beta
    with pytest.raises(CatalogError):
        spec_from_config({"family": "mbeta", "beta": 1.0, "gamma": 2.0})
    with pytest.raises(CatalogError):
        spec_from_config({"family": "unknown"})
    with pytest.raises(CatalogError):
        spec_from_config({"beta": 1.0})
    with pytest.raises(CatalogError):
        spec_from_config({"family": "lorentz_mf", "preset": "s_plus", "f": "y"})


def test_sample_points_respect_guards(rng):
    for spec in ALL_SPECS:
        chart = build(spec)
        for _ in range(50):
            assert chart.contains(spec.sample_point(rng))
