"""Command-line frontend: file-based configs, CSV/JSON emission, figures.

Every command is a pure function of its effective configuration (defaults,
overridden by a ``key=value`` config file, overridden by ``--key=value``
flags): re-running with the same inputs reproduces the delimited outputs
byte for byte.  Floats are printed with 17 significant digits so plots can
be regenerated exactly.  Exit codes: 0 success, 2 usage/validation error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import barrier as bar
from . import hartman, measurement, plotting
from .errors import TunnelPulseError
from .numerics import ComplexField, SpatialGrid, positive_axis_weight
from .wavepacket import GaussianPulse, Regime

USAGE_ERROR = 2
NUMERICAL_ERROR = 3

_PI = math.pi


class ConfigError(ValueError):
    """Bad key, malformed value, or failed validation in the effective config."""


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"malformed number {text!r}") from exc


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"malformed integer {text!r}") from exc


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = text.split()
    if not items:
        raise ConfigError("empty list value")
    return tuple(_parse_float(item) for item in items)


def _parse_complex_vector(text: str) -> tuple[complex, ...]:
    """Vectors are space-separated entries, each complex as "re,im"."""
    entries = []
    for item in text.split():
        parts = item.split(",")
        if len(parts) == 1:
            entries.append(complex(_parse_float(parts[0]), 0.0))
        elif len(parts) == 2:
            entries.append(complex(_parse_float(parts[0]), _parse_float(parts[1])))
        else:
            raise ConfigError(f"malformed complex entry {item!r} (want re,im)")
    if not entries:
        raise ConfigError("empty vector value")
    return tuple(entries)


def _parse_str(text: str) -> str:
    return text


@dataclass(frozen=True)
class Param:
    name: str
    convert: Callable
    default: object
    help: str


def _positive(cfg: dict, *names: str) -> None:
    for name in names:
        val = cfg.get(name)
        if val is not None and not val > 0:
            raise ConfigError(f"{name} must be positive, got {val}")


def _at_least(cfg: dict, n: int, *names: str) -> None:
    for name in names:
        val = cfg.get(name)
        if val is not None and val < n:
            raise ConfigError(f"{name} must be >= {n}, got {val}")


_COMMON_GRID = [
    Param("n_x", _parse_int, 2001, "spatial sample count"),
    Param("n_p", _parse_int, 4097, "momentum quadrature points"),
]

PARAMS: dict[str, list[Param]] = {
    "transmit": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("d", _parse_float, 5.0, "barrier width"),
        Param("p0", _parse_float, 1.0, "pulse mean momentum"),
        Param("sigma", _parse_float, 50.0, "pulse spatial width"),
        Param("x0", _parse_float, None, "pulse centre at t=0 (default -10 sigma)"),
        Param("t", _parse_float, None, "evaluation time (default (d+10 sigma)/p0)"),
        *_COMMON_GRID,
    ],
    "shifts": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("d", _parse_float, 5.0, "barrier width"),
        Param("n_points", _parse_int, 2**14, "shift-spectrum points (power of two)"),
    ],
    "barrier-scan": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("p0", _parse_float, 1.0, "momentum for the shift/phase-time columns"),
        Param("d_min", _parse_float, 1.0, "smallest width"),
        Param("d_max", _parse_float, 1000.0, "largest width"),
        Param("n_d", _parse_int, 13, "number of widths (geometric ladder)"),
    ],
    "weakvalue": [
        Param("family", _parse_str, "spin-half", "selection family (spin-half or custom)"),
        Param("d", _parse_float, 5.0, "spin-half overlap parameter"),
        Param("eigenvalues", _parse_float_list, None, "custom operator eigenvalues"),
        Param("pre", _parse_complex_vector, None, "custom pre-selected state (re,im ...)"),
        Param("post", _parse_complex_vector, None, "custom post-selected state"),
        Param("p_lo", _parse_float, -_PI, "amplitude sweep start"),
        Param("p_hi", _parse_float, _PI, "amplitude sweep end"),
        Param("n_points", _parse_int, 801, "amplitude sweep samples"),
    ],
    "pointer": [
        Param("family", _parse_str, "spin-half", "selection family (spin-half or custom)"),
        Param("d", _parse_float, 2.0, "spin-half overlap parameter"),
        Param("eigenvalues", _parse_float_list, None, "custom operator eigenvalues"),
        Param("pre", _parse_complex_vector, None, "custom pre-selected state"),
        Param("post", _parse_complex_vector, None, "custom post-selected state"),
        Param("sigma", _parse_float, 20.0, "pointer width"),
        Param("x_lo", _parse_float, None, "window start (default automatic)"),
        Param("x_hi", _parse_float, None, "window end (default automatic)"),
        Param("n_x", _parse_int, 2001, "spatial sample count"),
    ],
    "nrw-limit": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("p0", _parse_float, 1.0, "expansion momentum"),
        Param("d", _parse_float, 1000.0, "large parameter (barrier width)"),
        Param("gamma", _parse_float, 0.8, "width-schedule gamma"),
        Param("epsilon", _parse_float, 0.85, "width-schedule epsilon"),
        Param("n_x", _parse_int, 2001, "spatial sample count"),
    ],
    "hartman-scan": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("p0", _parse_float, 1.0, "pulse mean momentum"),
        Param("gamma", _parse_float, 0.8, "width-schedule gamma"),
        Param("epsilon", _parse_float, 0.85, "width-schedule epsilon"),
        Param("d_list", _parse_float_list, hartman.DEFAULT_WIDTH_LADDER, "widths to scan"),
        Param("n_x", _parse_int, 4097, "spatial sample count"),
        Param("n_p", _parse_int, 4097, "momentum quadrature points"),
    ],
    "fig1": [
        Param("w", _parse_float, 1.0, "barrier height"),
        Param("d", _parse_float, 1000.0, "barrier width"),
        Param("p0", _parse_float, 1.0, "pulse mean momentum"),
        Param("epsilon", _parse_float, 0.85, "width-schedule epsilon"),
        Param("gamma", _parse_float, 0.8, "width-schedule gamma"),
        Param("t", _parse_float, 5765.0, "evaluation time"),
        Param("n_x", _parse_int, 4097, "spatial sample count"),
        Param("n_p", _parse_int, 8193, "momentum quadrature points"),
    ],
}


def _read_config_file(path: Path, spec: dict[str, Param]) -> dict:
    values = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in spec:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = spec[key].convert(val.strip())
    return values


def effective_config(command: str, flag_values: dict, config_file: str | None) -> dict:
    """defaults <- config file <- explicit flags, with per-key validation."""
    spec = {p.name: p for p in PARAMS[command]}
    cfg = {p.name: p.default for p in PARAMS[command]}
    if config_file:
        cfg.update(_read_config_file(Path(config_file), spec))
    for key, raw in flag_values.items():
        if raw is None:
            continue
        if key not in spec:
            raise ConfigError(f"unknown key {key!r}")
        cfg[key] = spec[key].convert(raw)
    _positive(cfg, *(n for n in ("w", "d", "p0", "sigma", "gamma", "t") if n in cfg))
    _at_least(cfg, 2, *(n for n in ("n_x", "n_p", "n_points", "n_d") if n in cfg))
    return cfg


def _config_lines(command: str, cfg: dict) -> list[str]:
    lines = [f"# command={command}"]
    for key in sorted(cfg):
        val = cfg[key]
        if val is None:
            continue
        if isinstance(val, tuple):
            if val and isinstance(val[0], complex):
                text = " ".join(f"{_fmt(v.real)},{_fmt(v.imag)}" for v in val)
            else:
                text = " ".join(_fmt(float(v)) for v in val)
        else:
            text = _fmt(val)
        lines.append(f"# {key}={text}")
    return lines


def emit_field_csv(field: ComplexField, path: Path, comments: list[str]) -> None:
    """Header comments, ``x,re,im,abs`` header, one row per grid point."""
    rows = [*comments, "x,re,im,abs"]
    x = field.grid.points()
    v = field.values
    for i in range(field.grid.n_points):
        rows.append(
            f"{_fmt(float(x[i]))},{_fmt(float(v[i].real))},"
            f"{_fmt(float(v[i].imag))},{_fmt(float(abs(v[i])))}"
        )
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


SCAN_COLUMNS = "d,sigma,advancement,width,log10_PT,log10_bound,n_osc,log10_tail,phase_time"


def emit_scan_csv(rows: list[hartman.HartmanScanRow], path: Path, comments: list[str]) -> None:
    out = list(comments)
    for row in rows:
        if row.failed:
            out.append(f"# error d={_fmt(row.d)}: {row.error}")
    out.append(SCAN_COLUMNS)
    for r in rows:
        out.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.d,
                    r.sigma,
                    r.advancement,
                    r.width,
                    r.log10_trans_prob,
                    r.log10_bound,
                    r.n_osc,
                    r.log10_tail_bound,
                    r.phase_time,
                )
            )
        )
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


def write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _selection_from_config(cfg: dict):
    custom = [cfg.get("eigenvalues"), cfg.get("pre"), cfg.get("post")]
    if any(v is not None for v in custom):
        if not all(v is not None for v in custom):
            raise ConfigError("custom selections need eigenvalues, pre and post together")
        op = measurement.MeasuredOperator(np.asarray(cfg["eigenvalues"], dtype=float))
        sel = measurement.SelectionPair(
            pre_state=np.asarray(cfg["pre"], dtype=complex),
            post_state=np.asarray(cfg["post"], dtype=complex),
        )
        return op, sel
    if cfg["family"] != "spin-half":
        raise ConfigError(f"unknown selection family {cfg['family']!r}")
    return measurement.spin_half_selection(cfg["d"])


# ---------------------------------------------------------------------------
# command implementations


def _run_transmit(cfg: dict, out_dir: Path, plot: bool) -> None:
    from .barrier import RectangularBarrier, kappa, log_transmission
    from .wavepacket import scaled_transmitted_state

    b = RectangularBarrier(cfg["w"], cfg["d"])
    sigma = cfg["sigma"]
    x0 = cfg["x0"] if cfg["x0"] is not None else -10.0 * sigma
    t = cfg["t"] if cfg["t"] is not None else (cfg["d"] + 10.0 * sigma) / cfg["p0"]
    pulse = GaussianPulse(sigma=sigma, p0=cfg["p0"], x0=x0)
    kap0 = complex(kappa(b, cfg["p0"])).real
    log_scale = kap0 * cfg["d"] if kap0 * cfg["d"] > 200.0 else 0.0
    centre = x0 + cfg["p0"] * t
    half = cfg["d"] + 8.0 * sigma
    grid = SpatialGrid(centre - half, centre + half, cfg["n_x"])
    fld, report = scaled_transmitted_state(
        pulse,
        lambda p: log_transmission(b, p),
        grid,
        t,
        log_scale=log_scale,
        momentum_grid=pulse.default_momentum_grid(cfg["n_p"]),
    )
    comments = _config_lines("transmit", cfg) + [
        f"# t={_fmt(t)}",
        f"# x0={_fmt(x0)}",
        f"# log_scale={_fmt(log_scale)}  (values are exp(log_scale) * Psi^T)",
        f"# convergence rel_change={_fmt(report.rel_change)} "
        f"n={report.n_points} refined={report.n_refined}",
        f"# neglected_momentum_weight={_fmt(report.neglected_weight)}",
    ]
    emit_field_csv(fld, out_dir / "transmit.csv", comments)
    adv = hartman.measure_advancement(pulse, b, t, n_x=cfg["n_x"], n_p=cfg["n_p"])
    write_json(
        {
            "config": {k: v for k, v in cfg.items() if v is not None},
            "t": t,
            "x0": x0,
            "log_scale": log_scale,
            "advancement": adv.advancement,
            "width": adv.width,
            "quadrature_rel_change": report.rel_change,
            "neglected_momentum_weight": report.neglected_weight,
        },
        out_dir / "transmit.json",
    )
    if plot:
        plotting.save_field_plot(
            fld, out_dir / "transmit.png", "transmitted pulse (rescaled)"
        )


def _run_shifts(cfg: dict, out_dir: Path, plot: bool) -> None:
    b = bar.RectangularBarrier(cfg["w"], cfg["d"])
    xi = bar.causal_shift_spectrum(b, n_points=cfg["n_points"])
    weight = positive_axis_weight(xi)
    comments = _config_lines("shifts", cfg) + [
        f"# positive_shift_weight={_fmt(weight)}",
        "# column x is the spatial shift y",
    ]
    emit_field_csv(xi, out_dir / "shifts.csv", comments)
    write_json(
        {
            "config": {k: v for k, v in cfg.items() if v is not None},
            "positive_shift_weight": weight,
            "y_min": xi.grid.x_min,
            "y_max": xi.grid.x_max,
        },
        out_dir / "shifts.json",
    )
    if plot:
        plotting.save_field_plot(
            xi, out_dir / "shifts.png", "shift spectrum xi(y)", xlabel="shift y"
        )


def _run_barrier_scan(cfg: dict, out_dir: Path, plot: bool) -> None:
    ds = np.geomspace(cfg["d_min"], cfg["d_max"], cfg["n_d"])
    lines = _config_lines("barrier-scan", cfg)
    lines.append("d,re_shift,im_shift,phase_time,log10_T2")
    re_over_d = []
    taus = []
    for d in ds:
        b = bar.RectangularBarrier(cfg["w"], float(d))
        shift = bar.weak_shift(b, cfg["p0"])
        tau = bar.phase_time(b, cfg["p0"])
        log10_t2 = 2.0 * complex(bar.log_transmission(b, cfg["p0"])).real / math.log(10.0)
        lines.append(
            ",".join(
                _fmt(v) for v in (float(d), shift.re_shift, shift.im_shift, tau, log10_t2)
            )
        )
        re_over_d.append(shift.re_shift / d)
        taus.append(tau)
    (out_dir / "barrier_scan.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if plot:
        plotting.save_barrier_scan_plot(ds, taus, re_over_d, out_dir / "barrier_scan.png")


def _run_weakvalue(cfg: dict, out_dir: Path, plot: bool) -> None:
    op, sel = _selection_from_config(cfg)
    wv = measurement.weak_value(op, sel)
    routes = {
        "eigen_sum": wv.value,
        "log_derivative": measurement.weak_value_log_derivative(op, sel),
        "improper_average": measurement.improper_average(op, sel),
    }
    overlap = complex(np.sum(np.conj(sel.post_state) * sel.pre_state))
    grid = SpatialGrid(cfg["p_lo"], cfg["p_hi"], cfg["n_points"])
    amp = measurement.selection_amplitude(op, sel, grid.points())
    fld = ComplexField(grid, amp)
    comments = _config_lines("weakvalue", cfg) + [
        "# column x is the pointer momentum p",
        f"# weak_value={_fmt(wv.value.real)},{_fmt(wv.value.imag)}",
    ]
    emit_field_csv(fld, out_dir / "selection_amplitude.csv", comments)
    write_json(
        {
            "config": {
                k: (list(v) if isinstance(v, tuple) and not isinstance(v, str) else v)
                for k, v in cfg.items()
                if v is not None and k not in ("pre", "post")
            },
            "weak_value": {"re": wv.value.real, "im": wv.value.imag},
            "routes": {
                name: {"re": val.real, "im": val.imag} for name, val in routes.items()
            },
            "overlap": {"re": overlap.real, "im": overlap.imag, "abs": abs(overlap)},
            "max_amplitude_modulus": float(np.abs(amp).max()),
        },
        out_dir / "weakvalue.json",
    )
    if plot:
        plotting.save_field_plot(
            fld,
            out_dir / "weakvalue.png",
            "state-dependent transmission amplitude",
            xlabel="pointer momentum p",
        )


def _run_pointer(cfg: dict, out_dir: Path, plot: bool) -> None:
    op, sel = _selection_from_config(cfg)
    pulse = GaussianPulse(sigma=cfg["sigma"], p0=0.0, x0=0.0, regime=Regime.STATIC)
    abar = measurement.weak_value(op, sel).value
    amin = float(op.eigenvalues.min())
    amax = float(op.eigenvalues.max())
    x_lo = cfg["x_lo"] if cfg["x_lo"] is not None else min(amin, abar.real) - 4.0 * cfg["sigma"]
    x_hi = cfg["x_hi"] if cfg["x_hi"] is not None else max(amax, abar.real) + 4.0 * cfg["sigma"]
    grid = SpatialGrid(x_lo, x_hi, cfg["n_x"])
    xs = grid.points()
    exact = measurement.pointer_final_state(op, sel, pulse, xs, 0.0, verify=True)
    approx = measurement.gaussian_pointer_approx(op, sel, pulse, xs)
    comments = _config_lines("pointer", cfg)
    emit_field_csv(ComplexField(grid, exact), out_dir / "pointer_exact.csv", comments)
    emit_field_csv(ComplexField(grid, approx), out_dir / "pointer_approx.csv", comments)
    scale = math.sqrt(float(np.sum(np.abs(exact) ** 2)))
    rel = (
        math.sqrt(float(np.sum(np.abs(exact - approx) ** 2))) / scale if scale > 0 else 0.0
    )
    write_json(
        {
            "config": {
                k: (list(v) if isinstance(v, tuple) and not isinstance(v, str) else v)
                for k, v in cfg.items()
                if v is not None and k not in ("pre", "post")
            },
            "weak_value": {"re": abar.real, "im": abar.imag},
            "approx_rel_l2_error": rel,
        },
        out_dir / "pointer.json",
    )
    if plot:
        plotting.save_overlay_plot(
            xs,
            {
                "|exact|^2": np.abs(exact) ** 2,
                "|gaussian approx|^2": np.abs(approx) ** 2,
            },
            out_dir / "pointer.png",
            "post-selected pointer density",
        )


def _run_nrw_limit(cfg: dict, out_dir: Path, plot: bool) -> None:
    b = bar.RectangularBarrier(cfg["w"], cfg["d"])
    family = measurement.barrier_nrw_family(b, cfg["p0"])
    sigma = measurement.sigma_schedule(cfg["d"], cfg["gamma"], cfg["epsilon"])
    kap0 = math.sqrt(2.0 * cfg["w"] - cfg["p0"] ** 2)
    log_scale = kap0 * cfg["d"]
    centre = cfg["d"]  # F1'(0) = 1 for the tunnelling family
    grid = SpatialGrid(centre - 5.0 * sigma, centre + 5.0 * sigma, cfg["n_x"])
    vals = measurement.nrw_limit_state(
        family, cfg["gamma"], cfg["epsilon"], grid.points(), log_scale=log_scale
    )
    fld = ComplexField(grid, vals)
    comments = _config_lines("nrw-limit", cfg) + [
        f"# sigma={_fmt(sigma)}",
        f"# log_scale={_fmt(log_scale)}  (values are exp(log_scale) * Psi)",
        "# column x is the pointer position relative to the free centre",
    ]
    emit_field_csv(fld, out_dir / "nrw_limit.csv", comments)
    write_json(
        {
            "config": {k: v for k, v in cfg.items() if v is not None},
            "sigma": sigma,
            "log_scale": log_scale,
            "predicted_centre": cfg["d"],
            "predicted_density_width": sigma / math.sqrt(2.0),
        },
        out_dir / "nrw_limit.json",
    )
    if plot:
        plotting.save_field_plot(
            fld, out_dir / "nrw_limit.png", "wide-d pointer state (rescaled)"
        )


def _run_hartman_scan(cfg: dict, out_dir: Path, plot: bool) -> None:
    rows = hartman.hartman_scan(
        cfg["w"],
        cfg["p0"],
        cfg["gamma"],
        cfg["epsilon"],
        d_list=cfg["d_list"],
        n_x=cfg["n_x"],
        n_p=cfg["n_p"],
    )
    emit_scan_csv(rows, out_dir / "hartman_scan.csv", _config_lines("hartman-scan", cfg))
    write_json(
        {
            "config": {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in cfg.items()
                if v is not None
            },
            "rows": [
                {
                    "d": r.d,
                    "sigma": r.sigma,
                    "advancement": r.advancement,
                    "width": r.width,
                    "log10_PT": r.log10_trans_prob,
                    "log10_bound": r.log10_bound,
                    "n_osc": r.n_osc,
                    "log10_tail": r.log10_tail_bound,
                    "log10_tail_integral": r.log10_tail_integral,
                    "phase_time": r.phase_time,
                    "validity": r.validity,
                    "error": r.error,
                }
                for r in rows
            ],
        },
        out_dir / "hartman_scan.json",
    )
    if plot:
        plotting.save_scan_plot(rows, out_dir / "hartman_scan.png")


def _run_fig1(cfg: dict, out_dir: Path, plot: bool) -> None:
    result = hartman.fig1_reproduce(
        w=cfg["w"],
        d=cfg["d"],
        p0=cfg["p0"],
        epsilon=cfg["epsilon"],
        gamma=cfg["gamma"],
        t=cfg["t"],
        n_x=cfg["n_x"],
        n_p=cfg["n_p"],
    )
    comments = _config_lines("fig1", cfg) + [
        f"# sigma={_fmt(result.metadata['sigma'])}",
        f"# z2=exp({_fmt(result.metadata['z2_log_abs'])} + i {_fmt(result.metadata['z2_phase'])})",
        f"# convergence rel_change={_fmt(result.metadata['quadrature_rel_change'])}",
    ]
    emit_field_csv(result.exact, out_dir / "fig1_exact.csv", comments)
    emit_field_csv(result.approx, out_dir / "fig1_approx.csv", comments)
    emit_field_csv(result.free_initial, out_dir / "fig1_free_initial.csv", comments)
    emit_field_csv(result.free_final, out_dir / "fig1_free_final.csv", comments)
    write_json({"metadata": result.metadata}, out_dir / "fig1_metadata.json")
    if plot:
        plotting.save_fig1_plot(result, out_dir / "fig1.png")


_RUNNERS = {
    "transmit": _run_transmit,
    "shifts": _run_shifts,
    "barrier-scan": _run_barrier_scan,
    "weakvalue": _run_weakvalue,
    "pointer": _run_pointer,
    "nrw-limit": _run_nrw_limit,
    "hartman-scan": _run_hartman_scan,
    "fig1": _run_fig1,
}

_DESCRIPTIONS = {
    "transmit": "transmitted pulse on a spatial grid",
    "shifts": "shift spectrum xi(y) of the barrier (causality diagnostic)",
    "barrier-scan": "weak shift and phase time across barrier widths",
    "weakvalue": "weak value of a pre/post-selected operator",
    "pointer": "post-selected pointer state, exact vs gaussian approximation",
    "nrw-limit": "closed-form wide-d pointer state of the width schedule",
    "hartman-scan": "advancement/width/probability ladder over barrier widths",
    "fig1": "exact vs linear-expansion transmitted envelope benchmark",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunnelpulse",
        description="wavepacket tunnelling as a weak measurement of the spatial delay",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, params in PARAMS.items():
        p = sub.add_parser(command, help=_DESCRIPTIONS[command])
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        for param in params:
            p.add_argument(
                f"--{param.name.replace('_', '-')}",
                dest=param.name,
                default=None,
                metavar="V",
                help=param.help,
            )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    flag_values = {p.name: getattr(args, p.name) for p in PARAMS[command]}
    try:
        cfg = effective_config(command, flag_values, args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        _RUNNERS[command](cfg, out_dir, plot=not args.no_plot)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (TunnelPulseError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
