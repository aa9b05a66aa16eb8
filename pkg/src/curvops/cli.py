"""Command-line front end.

Subcommands map one-to-one onto the library: chart construction from a
family id or a TOML config, pointwise curvature and algebra checks, the
geodesic engine's probes, and the bundled verification suite.

Exit codes: 0 success, 1 property-check or verification failure, 2 for
usage, configuration, or domain errors.  Reports are JSON (floats are
serialized via repr, so they round-trip exactly); trajectories are CSV
with a fixed column order.  Identical config and seed give byte-identical
reports when timestamps are suppressed with --no-timestamp.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from typing import Optional

import numpy as np
import tomli

from . import __version__, acceptance
from .catalog import CatalogError, describe_families, spec_from_config
from .chart import ChartError, curvature_at, model_at
from .expr import ExpressionError
from .geodesics import (
    MONITORS,
    GeodesicError,
    IntegrationOptions,
    blowup_probe,
    completeness_probe,
    exp_coverage,
    integrate,
)
from .model import (
    DecompositionError,
    ModelError,
    check_symmetries,
    decompose,
    is_skew_tsankov,
    load_model,
    nilpotency_order,
)

__all__ = ["main"]


class UsageError(ValueError):
    """Bad flags or configuration; exits with status 2."""


class CheckFailure(RuntimeError):
    """A property check did not hold; exits with status 1."""


# ---------------------------------------------------------------------------
# Config plumbing

_CONFIG_TABLES = {"chart", "parameters"}
_PARAMETER_KEYS = {
    "point",
    "velocity",
    "horizon",
    "seed",
    "directions",
    "speed",
    "tol",
    "max_order",
    "expect",
    "monitor",
    "blowup_threshold",
    "rel_tol",
    "abs_tol",
    "max_step",
    "velocity_box",
    "velocity_counts",
    "target_box",
    "target_bins",
    "output",
    "csv",
}


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as handle:
            doc = tomli.load(handle)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomli.TOMLDecodeError as err:
        raise UsageError(f"config file {path}: {err}")
    unknown = set(doc) - _CONFIG_TABLES
    if unknown:
        raise UsageError(
            f"config file {path}: unknown tables {sorted(unknown)}; "
            f"expected {sorted(_CONFIG_TABLES)}"
        )
    params = doc.get("parameters", {})
    bad = set(params) - _PARAMETER_KEYS
    if bad:
        raise UsageError(f"config file {path}: unknown parameter keys {sorted(bad)}")
    return doc


def _parse_floats(text: str, what: str) -> tuple:
    try:
        return tuple(float(part) for part in str(text).split(","))
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r} as comma-separated numbers")


def _parse_ints(text: str, what: str) -> tuple:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r} as comma-separated integers")


def _parse_box(text, what: str) -> tuple:
    """A box is lo:hi intervals joined by commas, e.g. '-3.6:3.6,-1:1'."""
    if isinstance(text, (list, tuple)):  # already structured (from TOML)
        box = tuple(tuple(float(v) for v in pair) for pair in text)
    else:
        box = []
        for part in str(text).split(","):
            pieces = part.split(":")
            if len(pieces) != 2:
                raise UsageError(f"{what}: interval {part!r} is not lo:hi")
            try:
                box.append((float(pieces[0]), float(pieces[1])))
            except ValueError:
                raise UsageError(f"{what}: interval {part!r} is not numeric")
        box = tuple(box)
    if any(len(pair) != 2 for pair in box):
        raise UsageError(f"{what}: every interval needs exactly two endpoints")
    return box


def _param(args, config: dict, name: str, default=None):
    """Flag value if given, else config [parameters] entry, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get("parameters", {}).get(name, default)


# ---------------------------------------------------------------------------
# Chart resolution

_FAMILY_FLAGS = ("alpha", "beta", "p", "psi", "nu", "xi", "f", "preset")


def _add_chart_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("chart selection")
    group.add_argument("--config", help="TOML file with a [chart] table")
    group.add_argument("--family", help="family id (see `catalog list`)")
    group.add_argument("--alpha", help="warped3d: surface exponent expression")
    group.add_argument("--beta", type=float, help="mbeta: positive shape parameter")
    group.add_argument("--p", type=int, help="dunn: block size")
    group.add_argument(
        "--psi", help="dunn: potential grid, rows joined by ';', entries by ','"
    )
    group.add_argument("--nu", type=int, help="fiedler: core dimension")
    group.add_argument(
        "--xi", help="fiedler: symmetric matrix, rows joined by ';', entries by ','"
    )
    group.add_argument("--f", help="fiedler / lorentz_mf: profile expression")
    group.add_argument("--preset", help="lorentz_mf: named profile")


def _chart_config(args, config: dict) -> dict:
    if args.config and (args.family or any(getattr(args, k) is not None for k in _FAMILY_FLAGS)):
        raise UsageError("give either --config or inline --family flags, not both")
    if args.config:
        if "chart" not in config:
            raise UsageError(f"config file {args.config} has no [chart] table")
        return dict(config["chart"])
    if not args.family:
        raise UsageError("no chart given: use --config FILE or --family ID")
    body = {"family": args.family}
    if args.alpha is not None:
        body["alpha"] = args.alpha
    if args.beta is not None:
        body["beta"] = args.beta
    if args.p is not None:
        body["p"] = args.p
    if args.psi is not None:
        body["psi"] = [row.split(",") for row in args.psi.split(";")]
    if args.nu is not None:
        body["nu"] = args.nu
    if args.xi is not None:
        body["xi"] = [
            [float(v) for v in row.split(",")] for row in args.xi.split(";")
        ]
    if args.f is not None:
        body["f"] = args.f
    if args.preset is not None:
        body["preset"] = args.preset
    if body.get("family") == "fiedler" and "nu" in body and "xi" not in body:
        body["xi"] = np.eye(int(body["nu"])).tolist()  # default inner core
    return body


def _resolve_chart(args, config: dict):
    body = _chart_config(args, config)
    spec = spec_from_config(body)
    canonical = {"family": spec.family}
    canonical.update(dataclasses.asdict(spec))
    return spec, spec.build(), canonical


def _integration_options(args, config: dict) -> Optional[IntegrationOptions]:
    fields = {}
    for name in ("rel_tol", "abs_tol", "max_step", "monitor", "blowup_threshold"):
        value = _param(args, config, name)
        if value is not None:
            fields[name] = value
    if not fields:
        return None
    return IntegrationOptions(**fields)


# ---------------------------------------------------------------------------
# Report plumbing


def _plain(value):
    """Recursively convert numpy containers to JSON-ready python types."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _emit_report(args, command: str, chart_config, parameters: dict, result: dict) -> None:
    report = {
        "tool": "curvops",
        "version": __version__,
        "command": command,
        "chart": _plain(chart_config),
        "parameters": _plain(parameters),
        "seed": _plain(parameters.get("seed")),
        "result": _plain(result),
    }
    if not getattr(args, "no_timestamp", False):
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    output = getattr(args, "output", None)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"report written to {output}")
    else:
        sys.stdout.write(text)


def _require_point(args, config: dict, chart, name: str = "point") -> np.ndarray:
    raw = _param(args, config, name)
    if raw is None:
        raise UsageError(f"missing --{name}")
    values = _parse_floats(raw, name) if isinstance(raw, str) else tuple(float(v) for v in raw)
    if len(values) != chart.dim:
        raise UsageError(
            f"--{name} has {len(values)} components, chart has dimension {chart.dim}"
        )
    return np.asarray(values, dtype=float)


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_catalog_list(args, config):
    if args.json:
        print(json.dumps({"families": describe_families()}, indent=2))
    else:
        for line in describe_families():
            print(line)
    return 0


def _cmd_curvature(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    data = curvature_at(chart, point)
    _emit_report(
        args, "curvature", chart_config, {"point": point.tolist()}, data.to_json()
    )
    return 0


def _cmd_check_skew(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    tol = float(_param(args, config, "tol", 1e-10))
    model = model_at(chart, point)
    sym = check_symmetries(model, tol=tol)
    comm = is_skew_tsankov(model, tol=tol)
    passed = sym.passed and comm.passed
    result = {
        "passed": passed,
        "symmetries": sym.to_json(),
        "commutativity": comm.to_json(),
    }
    _emit_report(
        args,
        "check skew-tsankov",
        chart_config,
        {"point": point.tolist(), "tol": tol},
        result,
    )
    if not passed:
        worst = "symmetry" if not sym.passed else "commutativity"
        raise CheckFailure(f"skew-tsankov check failed ({worst}) at {point.tolist()}")
    return 0


def _cmd_check_nilpotency(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    tol = float(_param(args, config, "tol", 1e-10))
    max_order = int(_param(args, config, "max_order", 6))
    expect = _param(args, config, "expect")
    model = model_at(chart, point)
    result = nilpotency_order(model, max_order=max_order, tol=tol)
    _emit_report(
        args,
        "check nilpotency",
        chart_config,
        {
            "point": point.tolist(),
            "tol": tol,
            "max_order": max_order,
            "expect": expect,
        },
        result.to_json(),
    )
    if result.order is None:
        raise CheckFailure(
            f"operators are not nilpotent within {max_order} factors at {point.tolist()}"
        )
    if expect is not None and result.order != int(expect):
        raise CheckFailure(f"nilpotency order {result.order}, expected {expect}")
    print(f"nilpotency order {result.order}")
    return 0


def _cmd_decompose(args, config):
    tol = float(_param(args, config, "tol", 1e-10))
    seed = _param(args, config, "seed")
    rng = np.random.default_rng(int(seed)) if seed is not None else None
    if args.model_file:
        try:
            model = load_model(args.model_file)
        except FileNotFoundError:
            raise UsageError(f"model file not found: {args.model_file}")
        except (ModelError, json.JSONDecodeError) as err:
            raise UsageError(f"model file {args.model_file}: {err}")
        chart_config = {"model_file": args.model_file}
        point = None
    else:
        spec, chart, chart_config = _resolve_chart(args, config)
        point = _require_point(args, config, chart)
        model = model_at(chart, point)
    sym = check_symmetries(model, tol=tol)
    if not sym.passed:
        worst = max(
            ("pair_symmetry", sym.pair_symmetry),
            ("antisymmetry", sym.antisymmetry),
            ("bianchi", sym.bianchi),
            key=lambda kv: kv[1],
        )
        raise CheckFailure(
            f"tensor violates {worst[0]} by {worst[1]:g} (tolerance {sym.tolerance:g})"
        )
    try:
        result = decompose(model, tol=tol, rng=rng)
    except (DecompositionError, ModelError) as err:
        raise CheckFailure(str(err))
    parameters = {"tol": tol, "seed": seed}
    if point is not None:
        parameters["point"] = point.tolist()
    _emit_report(args, "decompose", chart_config, parameters, result.to_json())
    return 0


def _cmd_geodesic(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    velocity = _require_point(args, config, chart, "velocity")
    horizon = float(_param(args, config, "horizon", 10.0))
    options = _integration_options(args, config)
    trajectory = integrate(chart, point, velocity, horizon, options)
    result = {
        "status": trajectory.status,
        "s_end": float(trajectory.s_end),
        "samples": int(len(trajectory.s)),
        "final_position": trajectory.final_position.tolist(),
        "final_velocity": trajectory.final_velocity.tolist(),
        "speed_norm_initial": float(trajectory.speed_norm[0]),
        "speed_norm_final": float(trajectory.speed_norm[-1]),
        "speed_norm_drift": float(trajectory.energy_drift()),
    }
    if trajectory.monitor_name is not None:
        result["monitor"] = trajectory.monitor_name
        result["monitor_final"] = float(trajectory.monitor[-1])
    csv_path = _param(args, config, "csv")
    if csv_path:
        trajectory.write_csv(csv_path)
        result["csv"] = csv_path
    parameters = {
        "point": point.tolist(),
        "velocity": velocity.tolist(),
        "horizon": horizon,
    }
    _emit_report(args, "geodesic", chart_config, parameters, result)
    return 0


def _cmd_probe_completeness(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    horizon = float(_param(args, config, "horizon", 50.0))
    directions = int(_param(args, config, "directions", 64))
    seed = int(_param(args, config, "seed", 0))
    speed = float(_param(args, config, "speed", 1.0))
    options = _integration_options(args, config)
    report = completeness_probe(
        chart,
        point,
        horizon,
        num_directions=directions,
        seed=seed,
        speed=speed,
        options=options,
    )
    parameters = {
        "point": point.tolist(),
        "horizon": horizon,
        "directions": directions,
        "seed": seed,
        "speed": speed,
    }
    _emit_report(args, "probe completeness", chart_config, parameters, report.to_json())
    return 0


def _cmd_probe_blowup(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    velocity = _require_point(args, config, chart, "velocity")
    horizon = float(_param(args, config, "horizon", 10.0))
    options = _integration_options(args, config)
    report = blowup_probe(chart, point, velocity, horizon, options)
    parameters = {
        "point": point.tolist(),
        "velocity": velocity.tolist(),
        "horizon": horizon,
    }
    _emit_report(args, "probe blowup", chart_config, parameters, report.to_json())
    print(report.summary())
    return 0


def _cmd_expmap_coverage(args, config):
    spec, chart, chart_config = _resolve_chart(args, config)
    point = _require_point(args, config, chart)
    velocity_box = _parse_box(_param(args, config, "velocity_box"), "--velocity-box")
    target_box = _parse_box(_param(args, config, "target_box"), "--target-box")
    raw_counts = _param(args, config, "velocity_counts")
    raw_bins = _param(args, config, "target_bins")
    if raw_counts is None or raw_bins is None:
        raise UsageError("expmap coverage needs --velocity-counts and --target-bins")
    counts = (
        _parse_ints(raw_counts, "--velocity-counts")
        if isinstance(raw_counts, str)
        else tuple(int(v) for v in raw_counts)
    )
    bins = (
        _parse_ints(raw_bins, "--target-bins")
        if isinstance(raw_bins, str)
        else tuple(int(v) for v in raw_bins)
    )
    options = _integration_options(args, config)
    report = exp_coverage(chart, point, velocity_box, counts, target_box, bins, options)
    parameters = {
        "point": point.tolist(),
        "velocity_box": [list(pair) for pair in velocity_box],
        "velocity_counts": list(counts),
        "target_box": [list(pair) for pair in target_box],
        "target_bins": list(bins),
    }
    _emit_report(args, "expmap coverage", chart_config, parameters, report.to_json())
    return 0


def _cmd_verify(args, config):
    numbers = None
    if args.criteria:
        numbers = _parse_ints(args.criteria, "--criteria")
    results = acceptance.run_all(numbers, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    if args.output:
        doc = {
            "tool": "curvops",
            "version": __version__,
            "command": "verify paper",
            "passed": not failed,
            "criteria": [r.to_json() for r in results],
        }
        if not args.no_timestamp:
            doc["generated_at"] = datetime.now(timezone.utc).isoformat()
        with open(args.output, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=2, sort_keys=True)
            handle.write("\n")
        print(f"report written to {args.output}")
    if failed:
        raise CheckFailure(
            f"{len(failed)} of {len(results)} criteria failed: "
            + ", ".join(str(r.number) for r in failed)
        )
    print(f"all {len(results)} criteria passed")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_common(parser: argparse.ArgumentParser, chart: bool = True) -> None:
    if chart:
        _add_chart_args(parser)
    parser.add_argument("--point", help="comma-separated coordinates")
    parser.add_argument("--output", help="write the JSON report here (default stdout)")
    parser.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit the timestamp so identical runs are byte-identical",
    )


def _add_integration_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rel-tol", dest="rel_tol", type=float)
    parser.add_argument("--abs-tol", dest="abs_tol", type=float)
    parser.add_argument("--max-step", dest="max_step", type=float)
    parser.add_argument("--monitor", choices=MONITORS)
    parser.add_argument("--blowup-threshold", dest="blowup_threshold", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvops",
        description="curvature-operator toolkit: charts, algebra checks, geodesic probes",
    )
    parser.add_argument("--version", action="version", version=f"curvops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="chart family catalog")
    cat_sub = cat.add_subparsers(dest="subcommand", required=True)
    cat_list = cat_sub.add_parser("list", help="list the built-in families")
    cat_list.add_argument("--json", action="store_true")
    cat_list.set_defaults(handler=_cmd_catalog_list)

    curv = sub.add_parser("curvature", help="curvature tensors at a point")
    _add_common(curv)
    curv.set_defaults(handler=_cmd_curvature)

    check = sub.add_parser("check", help="pointwise algebra checks")
    check_sub = check.add_subparsers(dest="subcommand", required=True)
    skew = check_sub.add_parser(
        "skew-tsankov", help="do all curvature operators commute?"
    )
    _add_common(skew)
    skew.add_argument("--tol", type=float)
    skew.set_defaults(handler=_cmd_check_skew)
    nil = check_sub.add_parser("nilpotency", help="smallest vanishing product length")
    _add_common(nil)
    nil.add_argument("--tol", type=float)
    nil.add_argument("--max-order", dest="max_order", type=int)
    nil.add_argument("--expect", type=int, help="fail unless the order equals this")
    nil.set_defaults(handler=_cmd_check_nilpotency)

    dec = sub.add_parser("decompose", help="split a model into curvature two-planes")
    _add_common(dec)
    dec.add_argument("--model-file", dest="model_file", help="JSON model document")
    dec.add_argument("--tol", type=float)
    dec.add_argument("--seed", type=int)
    dec.set_defaults(handler=_cmd_decompose)

    geo = sub.add_parser("geodesic", help="integrate one geodesic")
    _add_common(geo)
    geo.add_argument("--velocity", help="comma-separated initial velocity")
    geo.add_argument("--horizon", type=float)
    geo.add_argument("--csv", help="write the trajectory as CSV here")
    _add_integration_flags(geo)
    geo.set_defaults(handler=_cmd_geodesic)

    probe = sub.add_parser("probe", help="geodesic probes")
    probe_sub = probe.add_subparsers(dest="subcommand", required=True)
    comp = probe_sub.add_parser("completeness", help="fan of directions to a horizon")
    _add_common(comp)
    comp.add_argument("--horizon", type=float)
    comp.add_argument("--directions", type=int)
    comp.add_argument("--seed", type=int)
    comp.add_argument("--speed", type=float)
    _add_integration_flags(comp)
    comp.set_defaults(handler=_cmd_probe_completeness)
    blow = probe_sub.add_parser("blowup", help="hunt a curvature blow-up event")
    _add_common(blow)
    blow.add_argument("--velocity", help="comma-separated initial velocity")
    blow.add_argument("--horizon", type=float)
    _add_integration_flags(blow)
    blow.set_defaults(handler=_cmd_probe_blowup)

    exp = sub.add_parser("expmap", help="exponential-map probes")
    exp_sub = exp.add_subparsers(dest="subcommand", required=True)
    cov = exp_sub.add_parser("coverage", help="image coverage of a velocity grid")
    _add_common(cov)
    cov.add_argument(
        "--velocity-box",
        dest="velocity_box",
        help="lo:hi intervals joined by commas, one per coordinate",
    )
    cov.add_argument("--velocity-counts", dest="velocity_counts")
    cov.add_argument("--target-box", dest="target_box")
    cov.add_argument("--target-bins", dest="target_bins")
    _add_integration_flags(cov)
    cov.set_defaults(handler=_cmd_expmap_coverage)

    verify = sub.add_parser("verify", help="verification suites")
    verify_sub = verify.add_subparsers(dest="subcommand", required=True)
    paper = verify_sub.add_parser(
        "paper", help="run every acceptance criterion and fail on any miss"
    )
    paper.add_argument("--criteria", help="comma-separated subset, e.g. 1,4,11")
    paper.add_argument("--output", help="write a JSON summary here")
    paper.add_argument("--no-timestamp", action="store_true")
    paper.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config) if getattr(args, "config", None) else {}
        return args.handler(args, config)
    except CheckFailure as err:
        print(f"FAIL: {err}", file=sys.stderr)
        return 1
    except (UsageError, CatalogError, ChartError, ExpressionError, ModelError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except GeodesicError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
