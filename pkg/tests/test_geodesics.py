import numpy as np
import pytest

from curvops.catalog import (
    CustomSpec,
    DunnSpec,
    LorentzMFSpec,
    MBetaSpec,
    Warped3DSpec,
)
from curvops.geodesics import (
    STATUS_BLOWUP,
    STATUS_EXIT,
    STATUS_HORIZON,
    GeodesicError,
    IntegrationOptions,
    blowup_probe,
    completeness_probe,
    exp_map,
    geodesic_rhs,
    integrate,
    sample_directions,
)

FLAT3 = CustomSpec(
    signature=(0, 3),
    components=(("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")),
).build()


def test_flat_rhs_has_no_acceleration():
    state = np.array([0.5, -1.0, 2.0, 0.3, 0.7, -0.2])
    deriv = geodesic_rhs(FLAT3, state)
    assert deriv == pytest.approx([0.3, 0.7, -0.2, 0.0, 0.0, 0.0])


def test_mbeta_coordinate_acceleration():
    chart = MBetaSpec(beta=1.0).build()
    state = np.array([0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    deriv = geodesic_rhs(chart, state)
    assert deriv[4:] == pytest.approx([0.0, 0.0, 1.0, 0.0])


def test_warped_vertical_lines_are_geodesics():
    chart = Warped3DSpec(alpha="sin(x1) + x2").build()
    state = np.array([0.4, -0.7, 1.5, 0.0, 0.0, 1.0])
    deriv = geodesic_rhs(chart, state)
    assert deriv[3:] == pytest.approx([0.0, 0.0, 0.0], abs=1e-14)


def test_flat_straight_line():
    traj = integrate(FLAT3, (1.0, 2.0, 3.0), (0.5, -1.0, 0.25), horizon=8.0)
    assert traj.status == STATUS_HORIZON
    assert traj.s_end == pytest.approx(8.0)
    assert traj.final_position == pytest.approx([5.0, -6.0, 5.0])
    assert traj.final_velocity == pytest.approx([0.5, -1.0, 0.25])
    assert traj.energy_drift() <= 1e-12


def test_dunn_long_horizon_complete(rng):
    chart = DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0"))).build()
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    traj = integrate(chart, (0.0, 0.0, 0.0, 0.0), v, horizon=100.0)
    assert traj.status == STATUS_HORIZON
    assert traj.energy_drift() <= 1e-8


def test_mbeta_blowup_before_one():
    chart = MBetaSpec(beta=1.0).build()
    options = IntegrationOptions(monitor="scalar_curvature")
    traj = integrate(chart, (1.0, 1.0, 1.0, 1.0), (0.0, 0.0, -1.0, 0.0), 2.0, options)
    assert traj.status == STATUS_BLOWUP
    assert traj.s_end < 1.0
    assert abs(traj.monitor[-1]) >= 1e6


def test_chart_exit_refined_to_boundary():
    chart = MBetaSpec(beta=1.0).build()
    traj = integrate(chart, (1.0, 1.0, 1.0, 1.0), (0.0, 0.0, -1.0, 0.0), 2.0)
    assert traj.status == STATUS_EXIT
    assert traj.s_end == pytest.approx(1.0, abs=1e-8)
    assert traj.final_position[2] > 0.0  # stops strictly inside the chart


def test_trajectory_records_are_monotone():
    chart = MBetaSpec(beta=1.0).build()
    traj = integrate(chart, (0.0, 0.0, 2.0, 2.0), (0.3, 0.1, 0.2, -0.1), 5.0)
    assert traj.s[0] == 0.0
    assert np.all(np.diff(traj.s) > 0)
    assert traj.positions.shape == (len(traj.s), 4)
    assert traj.velocities.shape == (len(traj.s), 4)
    assert traj.s[-1] == pytest.approx(traj.s_end)


def test_reversibility_flat_and_dunn():
    for chart, start, v in (
        (FLAT3, (0.0, 0.0, 0.0), (1.0, 0.5, -0.5)),
        (
            DunnSpec(p=2, psi=(("x2*x2", "0"), ("0", "0"))).build(),
            (0.1, -0.2, 0.3, 0.4),
            (0.6, 0.4, -0.2, 0.3),
        ),
    ):
        out = integrate(chart, start, v, horizon=7.0)
        back = integrate(chart, out.final_position, -out.final_velocity, horizon=7.0)
        assert back.final_position == pytest.approx(np.asarray(start), abs=1e-6)


def test_step_halving_consistency():
    chart = MBetaSpec(beta=1.0).build()
    opts_a = IntegrationOptions(max_step=0.1)
    opts_b = IntegrationOptions(max_step=0.05)
    a = integrate(chart, (0.0, 0.0, 2.0, 2.0), (0.4, 0.2, 0.1, -0.2), 5.0, opts_a)
    b = integrate(chart, (0.0, 0.0, 2.0, 2.0), (0.4, 0.2, 0.1, -0.2), 5.0, opts_b)
    assert a.final_position == pytest.approx(b.final_position, abs=1e-8)


def test_integrate_rejects_bad_start():
    chart = MBetaSpec(beta=1.0).build()
    with pytest.raises(Exception):
        integrate(chart, (0.0, 0.0, -1.0, 1.0), (1.0, 0.0, 0.0, 0.0), 1.0)


def test_options_validated():
    with pytest.raises(GeodesicError):
        IntegrationOptions(rel_tol=-1.0)
    with pytest.raises(GeodesicError):
        IntegrationOptions(monitor="nope")


def test_blowup_probe_finds_warped_curvature_growth():
    chart = Warped3DSpec(alpha="x1*x1 + x2*x2").build()
    options = IntegrationOptions(monitor="scalar_curvature", blowup_threshold=1e6)
    report = blowup_probe(chart, (0.0, 0.0, 1.0), (0.0, 0.0, -1.0), 2.0, options)
    assert report.found
    assert report.s_star < 1.0
    assert "crossed" in report.summary()


def test_blowup_probe_reports_inconclusive_on_flat():
    options = IntegrationOptions(monitor="scalar_curvature")
    report = blowup_probe(FLAT3, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 5.0, options)
    assert not report.found
    assert "inconclusive" in report.summary()


def test_completeness_flat_all_reach():
    report = completeness_probe(FLAT3, (0.0, 0.0, 0.0), horizon=10.0, num_directions=16, seed=1)
    assert report.all_reached
    assert report.counts == {STATUS_HORIZON: 16}
    doc = report.to_json()
    assert doc["all_reached"] is True


def test_exp_map_basics():
    base = (0.5, -0.5, 1.0)
    assert exp_map(FLAT3, base, (0.0, 0.0, 0.0)) == pytest.approx(np.asarray(base))
    assert exp_map(FLAT3, base, (1.0, 2.0, -1.0)) == pytest.approx([1.5, 1.5, 0.0])


def test_exp_map_unreachable_reports_cause():
    chart = MBetaSpec(beta=1.0).build()
    with pytest.raises(GeodesicError) as err:
        exp_map(chart, (1.0, 1.0, 1.0, 1.0), (0.0, 0.0, -1.5, 0.0))
    assert "chart_exit" in str(err.value)


def test_s_minus_exp_grid_injective():
    chart = LorentzMFSpec.from_preset("s_minus").build()
    axis = np.linspace(-3.0, 3.0, 3)
    images = []
    for vx in axis:
        for vxt in axis:
            for vy in axis:
                images.append(exp_map(chart, (0.0, 0.0, 0.0), (vx, vxt, vy)))
    images = np.asarray(images)
    diff = images[:, None, :] - images[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    dist[np.diag_indices(len(images))] = np.inf
    assert dist.min() > 1e-3  # pairwise distinct images


def test_sample_directions_deterministic():
    a = sample_directions(4, 32, np.random.default_rng(5))
    b = sample_directions(4, 32, np.random.default_rng(5))
    assert np.array_equal(a, b)
    assert np.linalg.norm(a, axis=1) == pytest.approx(np.ones(32))


def test_csv_export(tmp_path):
    chart = LorentzMFSpec.from_preset("s_plus").build()
    options = IntegrationOptions(monitor="ricci_vv")
    traj = integrate(chart, (0.0, 0.0, 0.0), (0.3, 0.2, 0.5), 2.0, options)
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header == [
        "affine_param",
        "x",
        "xt",
        "y",
        "v_x",
        "v_xt",
        "v_y",
        "speed_norm",
        "monitor",
    ]
    assert len(lines) == len(traj.s) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == 0.0
    assert first[1:4] == pytest.approx([0.0, 0.0, 0.0])


def test_csv_without_monitor(tmp_path):
    traj = integrate(FLAT3, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 1.0)
    path = tmp_path / "flat.csv"
    traj.write_csv(path)
    header = path.read_text().splitlines()[0].split(",")
    assert header[-1] == "speed_norm"


def test_speed_norm_uses_metric_signature():
    # null direction in the s_plus chart: g(v, v) = 0 along the whole ride
    chart = LorentzMFSpec.from_preset("s_plus").build()
    traj = integrate(chart, (0.0, 0.0, 0.0), (0.0, 1.0, 0.0), 3.0)
    assert np.abs(traj.speed_norm).max() <= 1e-10
