"""Adaptive geodesic integration with event detection.

State vectors stack position and velocity: ``(u, v)`` with ``u' = v`` and
``v'^k = -Gamma^k_ij v^i v^j``.  The stepper is an embedded Dormand-Prince
5(4) pair with FSAL, vectorized over a batch of trajectories; every
trajectory carries its own adaptive step, so results do not depend on what
else is in the batch.

Terminal events:

* ``horizon_reached`` -- the affine parameter hit the requested horizon.
* ``blowup``          -- the curvature monitor crossed the threshold; the
  crossing is refined by bisection inside the offending step.
* ``chart_exit``      -- the trajectory left the chart domain (guard failed
  or the state stopped being finite); the boundary crossing is refined and
  the last interior state is reported.
* ``step_collapse``   -- the step size underflowed without a clean event;
  usually a metric singularity the step controller cannot cross.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .chart import Chart, _gamma_first, _metric_jets, curvature_at, metric_at

__all__ = [
    "BlowupReport",
    "CompletenessReport",
    "CoverageReport",
    "DirectionOutcome",
    "GeodesicError",
    "GeodesicTrajectory",
    "IntegrationOptions",
    "MONITORS",
    "STATUS_BLOWUP",
    "STATUS_COLLAPSE",
    "STATUS_EXIT",
    "STATUS_HORIZON",
    "UncoveredCell",
    "blowup_probe",
    "completeness_probe",
    "exp_coverage",
    "exp_map",
    "geodesic_rhs",
    "integrate",
    "sample_directions",
]

STATUS_HORIZON = "horizon_reached"
STATUS_BLOWUP = "blowup"
STATUS_EXIT = "chart_exit"
STATUS_COLLAPSE = "step_collapse"

MONITORS = ("scalar_curvature", "ricci_vv")

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_MAX_BISECT = 60

# Dormand-Prince 5(4) tableau.  _E is b5 - b4 extended with the FSAL stage,
# so the error estimate costs nothing beyond the stage reused as next k1.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


class GeodesicError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegrationOptions:
    """Step control and event configuration for the geodesic integrator.

    ``max_step`` defaults to horizon / 100.  ``monitor`` is evaluated at
    every accepted step when set: ``scalar_curvature`` tracks the scalar
    curvature at the moving point, ``ricci_vv`` tracks the Ricci tensor
    contracted twice with the velocity.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: Optional[float] = None
    monitor: Optional[str] = None
    blowup_threshold: float = 1e6
    event_resolution: float = 1e-9
    max_steps: int = 200_000

    def __post_init__(self):
        if self.monitor is not None and self.monitor not in MONITORS:
            raise GeodesicError(
                f"unknown monitor {self.monitor!r}; available: {', '.join(MONITORS)}"
            )
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise GeodesicError("tolerances must be positive")
        if not (self.blowup_threshold > 0):
            raise GeodesicError("blowup_threshold must be positive")
        if not (self.event_resolution > 0):
            raise GeodesicError("event_resolution must be positive")


def _make_rhs(chart: Chart):
    """Geodesic right-hand side; invalid rows come back as NaN so the step
    controller rejects them instead of raising mid-batch."""
    n = chart.dim
    eye = np.eye(n)

    def rhs(state: np.ndarray) -> np.ndarray:
        pos = state[..., :n]
        vel = state[..., n:]
        with np.errstate(all="ignore"):
            g, dg, _ = _metric_jets(chart, pos, 1, strict=False)
            gamma1 = _gamma_first(dg)
            w = np.einsum("...ijk,...i,...j->...k", gamma1, vel, vel)
            ok = (
                np.isfinite(g).all(axis=(-2, -1))
                & np.isfinite(w).all(axis=-1)
                & np.isfinite(vel).all(axis=-1)
            )
            g_safe = np.where(ok[..., None, None], g, eye)
            ok = ok & (np.abs(np.linalg.det(g_safe)) > 1e-300)
            g_safe = np.where(ok[..., None, None], g_safe, eye)
            w_safe = np.where(ok[..., None], w, 0.0)
            accel = -np.linalg.solve(g_safe, w_safe[..., None])[..., 0]
            accel = np.where(ok[..., None], accel, np.nan)
        return np.concatenate([vel, accel], axis=-1)

    return rhs


def _make_monitor(chart: Chart, name: str):
    if name == "scalar_curvature":

        def mfun(pos, vel):
            with np.errstate(all="ignore"):
                data = curvature_at(chart, pos, check=False)
            return np.asarray(data.scalar, dtype=float)

    else:

        def mfun(pos, vel):
            with np.errstate(all="ignore"):
                data = curvature_at(chart, pos, check=False)
            return np.einsum("...jk,...j,...k->...", data.ricci, vel, vel)

    return mfun


def geodesic_rhs(chart: Chart, state) -> np.ndarray:
    """Derivative of the stacked geodesic state (batched over leading axes)."""
    state = np.asarray(state, dtype=float)
    if state.shape[-1] != 2 * chart.dim:
        raise GeodesicError(
            f"state needs {2 * chart.dim} entries (position then velocity), "
            f"got {state.shape[-1]}"
        )
    metric_at(chart, state[..., : chart.dim], check=True)
    return _make_rhs(chart)(state)


def _rk_step(rhs, y, k1, h):
    """One embedded step for every row; returns (y_new, k_fsal, err_vec)."""
    hcol = h[:, None]
    ks = [k1]
    for stage in range(1, 6):
        coeff = _A[stage]
        incr = coeff[0] * ks[0]
        for j in range(1, stage):
            incr = incr + coeff[j] * ks[j]
        ks.append(rhs(y + hcol * incr))
    acc = _B[0] * ks[0]
    for j in range(2, 6):
        acc = acc + _B[j] * ks[j]
    y_new = y + hcol * acc
    k_fsal = rhs(y_new)
    ks.append(k_fsal)
    err = _E[0] * ks[0]
    for j in range(2, 7):
        err = err + _E[j] * ks[j]
    return y_new, k_fsal, hcol * err


def _rk_state(rhs, y, k1, h):
    """State after a single fractional substep (used by event bisection)."""
    hcol = h[:, None]
    ks = [k1]
    for stage in range(1, 6):
        coeff = _A[stage]
        incr = coeff[0] * ks[0]
        for j in range(1, stage):
            incr = incr + coeff[j] * ks[j]
        ks.append(rhs(y + hcol * incr))
    acc = _B[0] * ks[0]
    for j in range(2, 6):
        acc = acc + _B[j] * ks[j]
    return y + hcol * acc


def _error_norm(err, y, y_new, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    with np.errstate(all="ignore"):
        ratio = err / scale
        return np.sqrt(np.mean(ratio * ratio, axis=-1))


def _initial_step(rhs, y, k1, horizon, max_step, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2, axis=-1))
    d1 = np.sqrt(np.mean((k1 / scale) ** 2, axis=-1))
    with np.errstate(all="ignore"):
        h0 = np.where((d0 >= 1e-5) & (d1 >= 1e-5), 0.01 * d0 / d1, 1e-6)
        h0 = np.minimum(h0, 0.1 * horizon)
        f1 = rhs(y + h0[:, None] * k1)
        d2 = np.sqrt(np.mean(((f1 - k1) / scale) ** 2, axis=-1)) / h0
        d = np.maximum(d1, d2)
        h1 = (0.01 / d) ** 0.2
        h = np.where(d > 1e-15, np.minimum(100.0 * h0, h1), np.maximum(h0, 1e-6))
    h = np.where(np.isfinite(h) & (h > 0), h, 1e-6 * horizon)
    return np.minimum(h, min(max_step, horizon))


def _h_floor(s):
    return 1e4 * np.spacing(np.maximum(np.abs(s), 1.0))


def _bisect_boundary(rhs, chart, y0, k1, h, s0, resolution):
    """Largest substep fraction whose endpoint is still inside the chart.

    Rows enter with the full step known to land outside; theta = 0 (the
    previous accepted state) is inside by construction.
    """
    n = chart.dim
    lo = np.zeros(len(y0))
    hi = np.ones(len(y0))
    y_lo = y0.copy()
    for _ in range(_MAX_BISECT):
        gap = (hi - lo) * h
        if np.all(gap <= resolution * np.maximum(1.0, np.abs(s0 + hi * h))):
            break
        mid = 0.5 * (lo + hi)
        ymid = _rk_state(rhs, y0, k1, mid * h)
        with np.errstate(invalid="ignore"):
            bad = ~np.isfinite(ymid).all(axis=-1) | ~chart.contains(ymid[:, :n])
        hi = np.where(bad, mid, hi)
        lo = np.where(bad, lo, mid)
        y_lo = np.where(bad[:, None], y_lo, ymid)
    return lo, y_lo


def _bisect_monitor(rhs, mon, y0, k1, h, hi, y_hi, m_hi, s0, threshold, resolution):
    """First substep fraction where |monitor| crosses the threshold.

    The bracket is (0, hi]: the monitor is below threshold at the previous
    accepted state and at/above it at ``hi`` (states ``y_hi`` supplied by the
    caller).  Returns the crossed side of the final bracket.
    """
    n = y0.shape[-1] // 2
    lo = np.zeros(len(y0))
    y_hi = y_hi.copy()
    m_hi = m_hi.copy()
    for _ in range(_MAX_BISECT):
        gap = (hi - lo) * h
        if np.all(gap <= resolution * np.maximum(1.0, np.abs(s0 + hi * h))):
            break
        mid = 0.5 * (lo + hi)
        ymid = _rk_state(rhs, y0, k1, mid * h)
        with np.errstate(invalid="ignore"):
            mv = mon(ymid[:, :n], ymid[:, n:])
            crossed = ~np.isfinite(mv) | (np.abs(mv) >= threshold)
        hi = np.where(crossed, mid, hi)
        lo = np.where(crossed, lo, mid)
        y_hi = np.where(crossed[:, None], ymid, y_hi)
        m_hi = np.where(crossed, mv, m_hi)
    return hi, y_hi, m_hi


def _integrate_batch(chart, states, horizon, options=None, record=False):
    """Advance a batch of stacked states to the horizon or a terminal event.

    Returns a dict of per-row arrays: ``status``, ``s_end``, ``final``,
    ``steps``, ``monitor_last``, ``monitor_peak``, and (when ``record``)
    per-row lists of accepted samples.
    """
    options = options or IntegrationOptions()
    n = chart.dim
    y = np.atleast_2d(np.asarray(states, dtype=float)).copy()
    if y.ndim != 2 or y.shape[1] != 2 * n:
        raise GeodesicError(
            f"batch states must have shape (m, {2 * n}) for this chart"
        )
    if not (horizon > 0):
        raise GeodesicError(f"horizon must be positive, got {horizon}")
    m = y.shape[0]
    metric_at(chart, y[:, :n], check=True)  # raises on invalid start points

    rhs = _make_rhs(chart)
    mon = _make_monitor(chart, options.monitor) if options.monitor else None
    max_step = options.max_step if options.max_step else horizon / 100.0
    rel_tol, abs_tol = options.rel_tol, options.abs_tol

    status = np.full(m, "", dtype="<U16")
    s = np.zeros(m)
    s_end = np.zeros(m)
    final = y.copy()
    steps = np.zeros(m, dtype=int)
    mon_last = np.full(m, np.nan)
    mon_peak = np.full(m, np.nan)
    rec_s = [[] for _ in range(m)] if record else None
    rec_y = [[] for _ in range(m)] if record else None
    rec_m = [[] for _ in range(m)] if record else None

    k1 = rhs(y)
    if not np.all(np.isfinite(k1)):
        raise GeodesicError(
            "geodesic equation is undefined at a start state "
            "(singular metric or non-finite derivatives)"
        )

    if mon is not None:
        m0 = mon(y[:, :n], y[:, n:])
        mon_last[:] = m0
        mon_peak[:] = np.abs(m0)
        hot = ~np.isfinite(m0) | (np.abs(m0) >= options.blowup_threshold)
        status[hot] = STATUS_BLOWUP
    if record:
        for i in range(m):
            rec_s[i].append(0.0)
            rec_y[i].append(y[i].copy())
            if mon is not None:
                rec_m[i].append(float(mon_last[i]))

    h = _initial_step(rhs, y, k1, horizon, max_step, rel_tol, abs_tol)
    alive = np.flatnonzero(status == "")
    iterations = 0
    while alive.size:
        iterations += 1
        if iterations > options.max_steps:
            status[alive] = STATUS_COLLAPSE
            s_end[alive] = s[alive]
            final[alive] = y[alive]
            break
        ya = y[alive]
        ka = k1[alive]
        sa = s[alive]
        ha = h[alive]
        remaining = horizon - sa
        clip = ha >= remaining
        h_use = np.where(clip, remaining, ha)

        y_new, k_fsal, err = _rk_step(rhs, ya, ka, h_use)
        enorm = _error_norm(err, ya, y_new, rel_tol, abs_tol)
        ok = np.isfinite(enorm) & (enorm <= 1.0)

        with np.errstate(all="ignore"):
            factor = _SAFETY * enorm**-0.2
        factor = np.where(np.isfinite(factor), factor, _MIN_FACTOR)
        factor[enorm == 0.0] = _MAX_FACTOR
        factor = np.clip(factor, _MIN_FACTOR, _MAX_FACTOR)
        h_next = np.minimum(ha * factor, max_step)

        frozen = np.zeros(alive.size, dtype=bool)

        rej = ~ok
        if rej.any():
            h[alive[rej]] = h_next[rej]
            dead = rej & (h_next < _h_floor(sa))
            if dead.any():
                ids = alive[dead]
                status[ids] = STATUS_COLLAPSE
                s_end[ids] = s[ids]
                final[ids] = y[ids]
                frozen |= dead

        if ok.any():
            acc = np.flatnonzero(ok)
            ids = alive[acc]
            yn = y_new[acc]
            hu = h_use[acc]
            sn = np.where(clip[acc], horizon, sa[acc] + hu)

            with np.errstate(invalid="ignore"):
                inside = np.isfinite(yn).all(axis=-1) & chart.contains(yn[:, :n])
            out = ~inside
            theta = np.ones(acc.size)
            stop_y = yn.copy()
            stop_s = sn.copy()
            if out.any():
                th, yb = _bisect_boundary(
                    rhs,
                    chart,
                    ya[acc][out],
                    ka[acc][out],
                    hu[out],
                    sa[acc][out],
                    options.event_resolution,
                )
                theta[out] = th
                stop_y[out] = yb
                stop_s[out] = sa[acc][out] + th * hu[out]

            crossed = np.zeros(acc.size, dtype=bool)
            if mon is not None:
                mv = mon(stop_y[:, :n], stop_y[:, n:])
                crossed = ~np.isfinite(mv) | (
                    np.abs(mv) >= options.blowup_threshold
                )
                if crossed.any():
                    thc, yc, mc = _bisect_monitor(
                        rhs,
                        mon,
                        ya[acc][crossed],
                        ka[acc][crossed],
                        hu[crossed],
                        theta[crossed],
                        stop_y[crossed],
                        mv[crossed],
                        sa[acc][crossed],
                        options.blowup_threshold,
                        options.event_resolution,
                    )
                    cid = ids[crossed]
                    status[cid] = STATUS_BLOWUP
                    s_end[cid] = sa[acc][crossed] + thc * hu[crossed]
                    final[cid] = yc
                    mon_last[cid] = mc
                    mon_peak[cid] = np.fmax(mon_peak[cid], np.abs(mc))
                quiet = ids[~crossed]
                mon_last[quiet] = mv[~crossed]
                mon_peak[quiet] = np.fmax(mon_peak[quiet], np.abs(mv[~crossed]))

            exits = out & ~crossed
            if exits.any():
                eid = ids[exits]
                status[eid] = STATUS_EXIT
                s_end[eid] = stop_s[exits]
                final[eid] = stop_y[exits]
            done = ~out & ~crossed & clip[acc]
            if done.any():
                did = ids[done]
                status[did] = STATUS_HORIZON
                s_end[did] = horizon
                final[did] = yn[done]
            cont = ~out & ~crossed & ~clip[acc]
            if cont.any():
                cid = ids[cont]
                y[cid] = yn[cont]
                s[cid] = sn[cont]
                k1[cid] = k_fsal[acc][cont]
                h[cid] = h_next[acc][cont]
            steps[ids] += 1

            if record:
                for j, i in enumerate(ids):
                    if status[i]:
                        point_s, point_y = float(s_end[i]), final[i].copy()
                    else:
                        point_s, point_y = float(sn[j]), yn[j].copy()
                    if rec_s[i] and rec_s[i][-1] == point_s:
                        continue
                    rec_s[i].append(point_s)
                    rec_y[i].append(point_y)
                    if mon is not None:
                        rec_m[i].append(float(mon_last[i]))

            tmp = np.zeros(alive.size, dtype=bool)
            tmp[acc] = crossed | exits | done
            frozen |= tmp

        alive = alive[~frozen]

    return {
        "status": status,
        "s_end": s_end,
        "final": final,
        "steps": steps,
        "monitor_last": mon_last,
        "monitor_peak": mon_peak,
        "records": (rec_s, rec_y, rec_m) if record else None,
    }


# ---------------------------------------------------------------------------
# single-trajectory interface


@dataclass(frozen=True)
class GeodesicTrajectory:
    """Accepted integration samples of one geodesic plus its terminal event."""

    chart: Chart = field(repr=False)
    s: np.ndarray
    states: np.ndarray
    speed_norm: np.ndarray
    monitor: Optional[np.ndarray]
    monitor_name: Optional[str]
    status: str
    s_end: float

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, : self.dim]

    @property
    def velocities(self) -> np.ndarray:
        return self.states[:, self.dim :]

    @property
    def final_position(self) -> np.ndarray:
        return self.positions[-1]

    @property
    def final_velocity(self) -> np.ndarray:
        return self.velocities[-1]

    def energy_drift(self) -> float:
        """Worst deviation of g(v, v) from its starting value, relative to
        max(1, |initial|); exactly conserved along true geodesics."""
        q0 = self.speed_norm[0]
        return float(np.max(np.abs(self.speed_norm - q0)) / max(1.0, abs(q0)))

    def write_csv(self, path) -> None:
        names = list(self.chart.coords)
        header = ["affine_param"] + names + [f"v_{c}" for c in names]
        header.append("speed_norm")
        if self.monitor is not None:
            header.append("monitor")
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for i in range(len(self.s)):
                row = [repr(float(self.s[i]))]
                row += [repr(float(v)) for v in self.states[i]]
                row.append(repr(float(self.speed_norm[i])))
                if self.monitor is not None:
                    row.append(repr(float(self.monitor[i])))
                writer.writerow(row)


def integrate(chart, point, velocity, horizon, options=None) -> GeodesicTrajectory:
    """Integrate one geodesic, recording every accepted step."""
    options = options or IntegrationOptions()
    point = np.asarray(point, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    state = np.concatenate([point, velocity])[None, :]
    res = _integrate_batch(chart, state, horizon, options, record=True)
    rec_s, rec_y, rec_m = res["records"]
    svals = np.asarray(rec_s[0])
    states = np.vstack(rec_y[0])
    n = chart.dim
    g, _ = metric_at(chart, states[:, :n], check=False)
    speed = np.einsum("...ij,...i,...j->...", g, states[:, n:], states[:, n:])
    monitor = np.asarray(rec_m[0]) if options.monitor else None
    return GeodesicTrajectory(
        chart=chart,
        s=svals,
        states=states,
        speed_norm=speed,
        monitor=monitor,
        monitor_name=options.monitor,
        status=str(res["status"][0]),
        s_end=float(res["s_end"][0]),
    )


# ---------------------------------------------------------------------------
# probes


def sample_directions(dim: int, count: int, rng=None) -> np.ndarray:
    """Directions drawn uniformly from the Euclidean unit sphere.

    Sampling is deliberately metric-free; callers report g(v, v) for each
    direction instead of normalizing against an indefinite metric.
    """
    rng = np.random.default_rng(rng)
    v = rng.standard_normal((count, dim))
    norms = np.linalg.norm(v, axis=-1)
    norms[norms == 0.0] = 1.0
    return v / norms[:, None]


def _thread_count() -> int:
    raw = os.environ.get("CURVOPS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_batch(chart, states, horizon, options):
    """Batch integration, chunked across CURVOPS_THREADS worker threads.

    Chunking never changes results: every trajectory is integrated with its
    own step sequence regardless of batch composition.
    """
    threads = _thread_count()
    m = len(states)
    if threads <= 1 or m < 2 * threads:
        return _integrate_batch(chart, states, horizon, options)
    bounds = np.linspace(0, m, threads + 1).astype(int)
    chunks = [states[a:b] for a, b in zip(bounds, bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(
                lambda chunk: _integrate_batch(chart, chunk, horizon, options),
                chunks,
            )
        )
    merged = {
        key: np.concatenate([part[key] for part in parts])
        for key in ("status", "s_end", "final", "steps", "monitor_last", "monitor_peak")
    }
    merged["records"] = None
    return merged


def _causal_class(q: float, scale: float) -> str:
    tol = 1e-10 * max(1.0, scale)
    if q < -tol:
        return "timelike"
    if q > tol:
        return "spacelike"
    return "null"


@dataclass(frozen=True)
class DirectionOutcome:
    direction: tuple
    speed_square: float
    causal_class: str
    status: str
    s_end: float
    steps: int
    monitor_peak: Optional[float]

    def to_json(self) -> dict:
        return {
            "direction": list(self.direction),
            "speed_square": self.speed_square,
            "causal_class": self.causal_class,
            "status": self.status,
            "s_end": self.s_end,
            "steps": self.steps,
            "monitor_peak": self.monitor_peak,
        }


@dataclass(frozen=True)
class CompletenessReport:
    """Outcome of shooting a sphere of directions out to a fixed horizon."""

    point: tuple
    horizon: float
    num_directions: int
    seed: int
    speed: float
    monitor_name: Optional[str]
    blowup_threshold: Optional[float]
    outcomes: tuple

    @property
    def counts(self) -> dict:
        tally: dict = {}
        for outcome in self.outcomes:
            tally[outcome.status] = tally.get(outcome.status, 0) + 1
        return tally

    @property
    def all_reached(self) -> bool:
        return all(o.status == STATUS_HORIZON for o in self.outcomes)

    def to_json(self) -> dict:
        return {
            "point": list(self.point),
            "horizon": self.horizon,
            "num_directions": self.num_directions,
            "seed": self.seed,
            "speed": self.speed,
            "monitor": self.monitor_name,
            "blowup_threshold": self.blowup_threshold,
            "counts": self.counts,
            "all_reached": self.all_reached,
            "outcomes": [o.to_json() for o in self.outcomes],
        }


def completeness_probe(
    chart,
    point,
    horizon,
    num_directions: int = 64,
    seed: int = 0,
    speed: float = 1.0,
    options: Optional[IntegrationOptions] = None,
) -> CompletenessReport:
    """Integrate a seeded sphere of directions and classify every outcome."""
    options = options or IntegrationOptions()
    point = np.asarray(point, dtype=float)
    dirs = speed * sample_directions(chart.dim, num_directions, np.random.default_rng(seed))
    states = np.hstack([np.tile(point, (num_directions, 1)), dirs])
    g, _ = metric_at(chart, point)
    speed_sq = np.einsum("ij,ai,aj->a", g, dirs, dirs)
    scale = float(np.max(np.sum(dirs * dirs, axis=-1)))

    res = _run_batch(chart, states, horizon, options)
    outcomes = []
    for i in range(num_directions):
        peak = res["monitor_peak"][i]
        outcomes.append(
            DirectionOutcome(
                direction=tuple(float(v) for v in dirs[i]),
                speed_square=float(speed_sq[i]),
                causal_class=_causal_class(float(speed_sq[i]), scale),
                status=str(res["status"][i]),
                s_end=float(res["s_end"][i]),
                steps=int(res["steps"][i]),
                monitor_peak=float(peak) if np.isfinite(peak) else None,
            )
        )
    return CompletenessReport(
        point=tuple(float(v) for v in point),
        horizon=float(horizon),
        num_directions=num_directions,
        seed=seed,
        speed=float(speed),
        monitor_name=options.monitor,
        blowup_threshold=options.blowup_threshold if options.monitor else None,
        outcomes=tuple(outcomes),
    )


@dataclass(frozen=True)
class BlowupReport:
    """Single-trajectory curvature blow-up search."""

    found: bool
    status: str
    s_star: Optional[float]
    monitor_name: str
    blowup_threshold: float
    monitor_value: Optional[float]
    position: tuple
    velocity: tuple
    horizon: float
    steps: int
    trajectory: GeodesicTrajectory = field(repr=False, compare=False)

    def summary(self) -> str:
        if self.found:
            return (
                f"monitor |{self.monitor_name}| crossed "
                f"{self.blowup_threshold:g} at s = {self.s_star!r} "
                f"(value {self.monitor_value!r})"
            )
        return (
            f"no blow-up within horizon {self.horizon:g}: trajectory ended "
            f"with {self.status}; search is inconclusive, not a proof of "
            f"completeness"
        )

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "status": self.status,
            "s_star": self.s_star,
            "monitor": self.monitor_name,
            "blowup_threshold": self.blowup_threshold,
            "monitor_value": self.monitor_value,
            "position": list(self.position),
            "velocity": list(self.velocity),
            "horizon": self.horizon,
            "steps": self.steps,
            "summary": self.summary(),
        }


def blowup_probe(
    chart,
    point,
    velocity,
    horizon,
    options: Optional[IntegrationOptions] = None,
) -> BlowupReport:
    """Follow one geodesic and report the first monitor threshold crossing."""
    options = options or IntegrationOptions(monitor="scalar_curvature")
    if options.monitor is None:
        options = replace(options, monitor="scalar_curvature")
    trajectory = integrate(chart, point, velocity, horizon, options)
    found = trajectory.status == STATUS_BLOWUP
    return BlowupReport(
        found=found,
        status=trajectory.status,
        s_star=trajectory.s_end if found else None,
        monitor_name=options.monitor,
        blowup_threshold=options.blowup_threshold,
        monitor_value=float(trajectory.monitor[-1]) if found else None,
        position=tuple(float(v) for v in trajectory.final_position),
        velocity=tuple(float(v) for v in trajectory.final_velocity),
        horizon=float(horizon),
        steps=len(trajectory.s) - 1,
        trajectory=trajectory,
    )


# ---------------------------------------------------------------------------
# exponential map


def exp_map(chart, point, velocity, options=None) -> np.ndarray:
    """Point reached at affine parameter 1 along the geodesic with the given
    initial velocity; raises if any event fires before s = 1."""
    point = np.asarray(point, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    state = np.concatenate([point, velocity])[None, :]
    res = _integrate_batch(chart, state, 1.0, options)
    outcome = str(res["status"][0])
    if outcome != STATUS_HORIZON:
        raise GeodesicError(
            f"exponential map undefined for this velocity: geodesic stopped "
            f"with {outcome} at s = {float(res['s_end'][0])!r}"
        )
    return res["final"][0, : chart.dim].copy()


@dataclass(frozen=True)
class UncoveredCell:
    index: tuple
    center: tuple

    def to_json(self) -> dict:
        return {"index": list(self.index), "center": list(self.center)}


@dataclass(frozen=True)
class CoverageReport:
    """How much of a target box the exponential map image covers.

    A velocity grid is shot out to s = 1; a target cell counts as covered
    when at least one endpoint lands in it.
    """

    base_point: tuple
    velocity_box: tuple
    velocity_counts: tuple
    target_box: tuple
    target_bins: tuple
    num_geodesics: int
    num_reached: int
    num_inside: int
    total_cells: int
    covered_cells: int
    coverage: float
    uncovered: tuple

    def uncovered_index_set(self) -> set:
        return {cell.index for cell in self.uncovered}

    def to_json(self) -> dict:
        return {
            "base_point": list(self.base_point),
            "velocity_box": [list(pair) for pair in self.velocity_box],
            "velocity_counts": list(self.velocity_counts),
            "target_box": [list(pair) for pair in self.target_box],
            "target_bins": list(self.target_bins),
            "num_geodesics": self.num_geodesics,
            "num_reached": self.num_reached,
            "num_inside": self.num_inside,
            "total_cells": self.total_cells,
            "covered_cells": self.covered_cells,
            "coverage": self.coverage,
            "uncovered": [cell.to_json() for cell in self.uncovered],
        }


def exp_coverage(
    chart,
    base_point,
    velocity_box: Sequence,
    velocity_counts: Sequence,
    target_box: Sequence,
    target_bins: Sequence,
    options: Optional[IntegrationOptions] = None,
) -> CoverageReport:
    """Shoot a full velocity grid from one base point and bin the endpoints.

    ``velocity_box`` / ``target_box`` are per-axis (low, high) pairs;
    ``velocity_counts`` are grid points per velocity axis and ``target_bins``
    are bin counts per target axis.
    """
    options = options or IntegrationOptions()
    n = chart.dim
    base_point = np.asarray(base_point, dtype=float)
    if len(velocity_box) != n or len(velocity_counts) != n:
        raise GeodesicError(f"velocity box and counts need {n} axes")
    if len(target_box) != n or len(target_bins) != n:
        raise GeodesicError(f"target box and bins need {n} axes")
    if any(hi <= lo for lo, hi in target_box):
        raise GeodesicError("target box axes need low < high")
    if any(int(c) < 1 for c in velocity_counts) or any(
        int(b) < 1 for b in target_bins
    ):
        raise GeodesicError("grid counts and bin counts must be at least 1")

    axes = [
        np.linspace(lo, hi, int(count))
        for (lo, hi), count in zip(velocity_box, velocity_counts)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    velocities = np.stack([m.ravel() for m in mesh], axis=-1)
    num = velocities.shape[0]
    states = np.hstack([np.tile(base_point, (num, 1)), velocities])

    res = _run_batch(chart, states, 1.0, options)
    reached = res["status"] == STATUS_HORIZON
    endpoints = res["final"][reached][:, :n]

    bins = tuple(int(b) for b in target_bins)
    lows = np.array([pair[0] for pair in target_box])
    highs = np.array([pair[1] for pair in target_box])
    widths = highs - lows
    rel = (endpoints - lows) / widths
    inside = np.all((rel >= 0.0) & (rel < 1.0), axis=-1) & np.all(
        np.isfinite(rel), axis=-1
    )
    idx = np.floor(rel[inside] * np.array(bins)).astype(int)

    covered = np.zeros(bins, dtype=bool)
    if len(idx):
        covered[tuple(idx.T)] = True
    uncovered = []
    for index in np.argwhere(~covered):
        center = lows + (index + 0.5) * widths / np.array(bins)
        uncovered.append(
            UncoveredCell(
                index=tuple(int(v) for v in index),
                center=tuple(float(v) for v in center),
            )
        )
    total = int(covered.size)
    hit = int(covered.sum())
    return CoverageReport(
        base_point=tuple(float(v) for v in base_point),
        velocity_box=tuple((float(lo), float(hi)) for lo, hi in velocity_box),
        velocity_counts=tuple(int(c) for c in velocity_counts),
        target_box=tuple((float(lo), float(hi)) for lo, hi in target_box),
        target_bins=bins,
        num_geodesics=int(num),
        num_reached=int(reached.sum()),
        num_inside=int(inside.sum()),
        total_cells=total,
        covered_cells=hit,
        coverage=hit / total,
        uncovered=tuple(uncovered),
    )
