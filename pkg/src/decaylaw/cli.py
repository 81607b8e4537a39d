"""Command-line front end.

Exit codes: 0 success, 1 unexpected numerical failure, 2 invalid
configuration, 3 quadrature failed to converge at some point (output is
still written, failed points flagged), 4 closed form and quadrature
disagree (``compare`` only).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, plotting
from .analysis import (
    TimeGrid,
    closed_form_curve,
    count_sign_changes,
    decay_law_by_quadrature,
    dominant_oscillation_frequency,
    effective_hamiltonian,
    effective_hamiltonian_sampled,
    envelope_trend,
    extremum_frequency,
    fit_power_law,
    isolated_zero_check,
    window_maxima,
)
from .config import COMMANDS, RunConfig, as_dict, auto_points, defaults_for, load, parse_window
from .errors import ConfigError, DecayLawError
from .output import fmt_number, to_csv, to_json
from .quadrature import QuadratureConfig
from .spectral import BreitWigner, GeneralDensity, omega_bw, omega_general

OUTPUT_DIR_ENV = "DECAYLAW_OUTPUT_DIR"
AGREEMENT_TOL = 1e-6
HIGH_RESIDUAL = 0.05

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_DISAGREE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value file; flags override it")
    common.add_argument("--model", choices=("bw", "general"))
    common.add_argument("--s-r", dest="s_r", type=float, metavar="S", help="E_R / Gamma_0")
    common.add_argument("--x-min", dest="x_min", type=float)
    common.add_argument("--x-max", dest="x_max", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--spacing", choices=("lin", "log"))
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--method", choices=("closed", "quadrature"), help="amplitude route (bw only)")
    common.add_argument("--output", metavar="PATH")
    common.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--max-panels", dest="max_panels", type=int)
    common.add_argument("--tail-cutoff", dest="tail_cutoff", type=float)
    common.add_argument("--alpha", type=float, help="fractional threshold exponent (general model)")
    common.add_argument("--ell", type=int, help="angular momentum l (general model)")
    common.add_argument("--form-scale", dest="form_scale", type=float, help="F(E) = exp(-E/scale) (general model)")
    common.add_argument("--workers", type=int, help="threads for per-point quadrature")
    common.add_argument("--timings", action="store_true", help="add wall-clock timings to JSON meta")

    parser = _Parser(prog="decaylaw", description="Survival amplitude and decay-law diagnostics.")
    parser.add_argument("--version", action="version", version=f"decaylaw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("curve", parents=[common], help="a(x), P(x) and P_c(x)")
    sub.add_parser("deviation", parents=[common], help="zeta(x) and f(x) = |zeta|^2 - 1 with a summary")
    sub.add_parser("hamiltonian", parents=[common], help="effective Hamiltonian h(x)")
    p_tail = sub.add_parser("tail", parents=[common], help="late-time power-law exponent")
    p_tail.add_argument("--window", metavar="LO:HI")
    p_tail.add_argument("--input", metavar="PATH", help="CSV with x and P columns to fit instead of the model")
    p_cmp = sub.add_parser("compare", parents=[common], help="closed form against quadrature")
    p_cmp.add_argument("--unnormalized", action="store_true", default=None, help="corrupt N in the closed form")
    p_sp = sub.add_parser("spectrum", parents=[common], help="omega(E) samples")
    p_sp.add_argument("--e-min", dest="e_min", type=float)
    p_sp.add_argument("--e-max", dest="e_max", type=float)
    return parser


def effective_config(args) -> RunConfig:
    flags = RunConfig(command=args.command)
    for key in ("model", "s_r", "x_min", "x_max", "points", "spacing", "format", "method", "abs_tol",
                "rel_tol", "max_panels", "tail_cutoff", "alpha", "ell", "form_scale", "workers",
                "window", "unnormalized", "e_min", "e_max"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(flags, key, val)
    cfg = defaults_for(args.command)
    if args.config:
        from_file = load(args.config)
        from_file.command = None
        cfg = cfg.merged(from_file)
    cfg = cfg.merged(flags)
    if cfg.method is None:
        cfg.method = "closed" if cfg.model == "bw" else "quadrature"
    if cfg.points is None and cfg.s_r is not None and cfg.x_max is not None:
        cfg.points = auto_points(cfg)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.points is None or cfg.points < 1:
        raise ConfigError("empty grid: --points must be at least 1")
    if not cfg.s_r > 0:
        raise ConfigError("--s-r must be positive")
    if cfg.command != "spectrum":
        if cfg.x_min < 0:
            raise ConfigError("--x-min must be non-negative")
        if cfg.points > 1 and not cfg.x_max > cfg.x_min:
            raise ConfigError("--x-max must exceed --x-min")
        if cfg.spacing == "log" and cfg.x_min <= 0:
            raise ConfigError("logarithmic spacing needs --x-min > 0")
    if cfg.model == "general" and cfg.method == "closed":
        raise ConfigError("the closed form exists for the bw model only")
    if cfg.command == "compare" and cfg.model != "bw":
        raise ConfigError("compare needs the bw model")
    if cfg.workers is not None and cfg.workers < 1:
        raise ConfigError("--workers must be at least 1")


def _grid(cfg: RunConfig) -> TimeGrid:
    if cfg.spacing == "log":
        return TimeGrid.logarithmic(cfg.x_min, cfg.x_max, cfg.points)
    return TimeGrid.linear(cfg.x_min, cfg.x_max, cfg.points)


def _quad_cfg(cfg: RunConfig) -> QuadratureConfig:
    try:
        return QuadratureConfig(cfg.abs_tol, cfg.rel_tol, cfg.max_panels, cfg.tail_cutoff)
    except DecayLawError as exc:
        raise ConfigError(str(exc)) from None


def _density(cfg: RunConfig):
    if cfg.model == "bw":
        return BreitWigner(cfg.s_r)
    form = None
    if cfg.form_scale is not None:
        scale = cfg.form_scale
        form = lambda E: np.exp(-np.asarray(E) / scale)  # noqa: E731
    try:
        return GeneralDensity(alpha=cfg.alpha, l=cfg.ell, pole=complex(cfg.s_r, -0.5), form_factor=form,
                              tail_cutoff=cfg.tail_cutoff)
    except DecayLawError as exc:
        raise ConfigError(f"invalid general density: {exc}") from None


def _curve(cfg: RunConfig, with_deviation=True):
    grid = _grid(cfg)
    if cfg.method == "closed":
        model = BreitWigner(cfg.s_r, normalized=not cfg.unnormalized)
        return closed_form_curve(grid, model, with_deviation=with_deviation)
    return decay_law_by_quadrature(grid, _density(cfg), _quad_cfg(cfg), workers=cfg.workers or 1)


def _status(curve, i):
    return "failed" if curve.failed is not None and curve.failed[i] else "ok"


def _exit_for(curve):
    return EXIT_CONVERGENCE if curve.failed is not None and curve.failed.any() else EXIT_OK


def cmd_curve(cfg: RunConfig):
    c = _curve(cfg, with_deviation=False)
    P, P_c = c.P, c.P_c
    cols = ["x", "re_a", "im_a", "P", "P_c", "a_error", "status"]
    rows = []
    for i in range(c.x.size):
        err = "exact" if c.error is None else float(c.error[i])
        rows.append([c.x[i], c.a[i].real, c.a[i].imag, P[i], P_c[i], err, _status(c, i)])
    summary = {"points": int(c.x.size), "route": cfg.method}
    if c.failed is not None:
        summary["failed_points"] = int(c.failed.sum())
    plot = lambda path: plotting.decay_curves(path, c.x, P, P_c, cfg.s_r)  # noqa: E731
    return cols, rows, summary, _exit_for(c), plot


def _deviation_summary(cfg, c, f):
    x = c.x
    summary = {"route": cfg.method}
    expected = cfg.s_r / (2 * math.pi)
    uniform = cfg.spacing == "lin" and x.size >= 256
    if uniform:
        try:
            summary["dominant_frequency"] = dominant_oscillation_frequency(x, f, expected)
            summary["extremum_frequency"] = extremum_frequency(x, f)
        except DecayLawError as exc:
            summary["dominant_frequency"] = f"n/a ({exc})"
    else:
        summary["dominant_frequency"] = "n/a (needs a uniform grid of at least 256 points)"
    summary["expected_frequency"] = expected
    summary["sign_changes"] = count_sign_changes(f - f.mean())
    start = math.ceil(x[0])
    n_win = int(math.floor(x[-1] - start))
    if n_win >= 2:
        maxima = window_maxima(x, f, start, start + n_win, 1.0)
        summary["envelope_trend"] = envelope_trend(maxima)
        summary["envelope_window_maxima"] = [float(m) for m in maxima]
    else:
        summary["envelope_trend"] = "undetermined"
    pos = x > 0
    if pos.sum() >= 3:
        if cfg.method == "closed":
            d = np.abs(BreitWigner(cfg.s_r, normalized=not cfg.unnormalized).dzeta_dx(x[pos]))
        else:
            d = np.abs(np.gradient(c.zeta[pos], x[pos]))
        rep = isolated_zero_check(x[pos], d)
        summary["isolated_zero_verdict"] = rep.verdict
        summary["max_low_derivative_run"] = rep.max_run_length
    return summary


def cmd_deviation(cfg: RunConfig):
    c = _curve(cfg, with_deviation=True)
    if c.zeta is None:
        raise DecayLawError("zeta is unavailable on this grid")
    f = c.f
    cols = ["x", "re_zeta", "im_zeta", "f", "status"]
    rows = [[c.x[i], c.zeta[i].real, c.zeta[i].imag, f[i], _status(c, i)] for i in range(c.x.size)]
    summary = _deviation_summary(cfg, c, f)
    plot = lambda path: plotting.deviation(path, c.x, f, cfg.s_r)  # noqa: E731
    return cols, rows, summary, _exit_for(c), plot


def cmd_hamiltonian(cfg: RunConfig):
    grid = _grid(cfg)
    if grid.points[0] <= 0:
        raise ConfigError("hamiltonian needs --x-min > 0")
    if cfg.method == "closed":
        model = BreitWigner(cfg.s_r, normalized=not cfg.unnormalized)
        pts = [effective_hamiltonian(model, x) for x in grid.points]
        code = EXIT_OK
    else:
        if cfg.spacing != "lin":
            raise ConfigError("sampled hamiltonian needs --spacing lin")
        c = decay_law_by_quadrature(grid, _density(cfg), _quad_cfg(cfg), workers=cfg.workers or 1)
        pts = effective_hamiltonian_sampled(c.x, c.a)
        code = _exit_for(c)
    cols = ["x", "re_h", "im_h", "energy", "rate", "h_error"]
    rows = [[p.x, p.h.real, p.h.imag, p.instantaneous_energy, p.instantaneous_rate, p.error_estimate] for p in pts]
    summary = {"points": len(rows), "route": cfg.method}
    xs = [p.x for p in pts]
    plot = lambda path: plotting.hamiltonian(  # noqa: E731
        path, xs, [p.instantaneous_energy for p in pts], [p.instantaneous_rate for p in pts], cfg.s_r)
    return cols, rows, summary, code, plot


def _read_xp(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read input {path}: {exc.strerror}") from None
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or "x" not in reader.fieldnames or "P" not in reader.fieldnames:
        raise ConfigError(f"input {path} needs a header with columns x and P")
    xs, ps = [], []
    for lineno, row in enumerate(reader, start=2):
        try:
            xs.append(float(row["x"]))
            ps.append(float(row["P"]))
        except (TypeError, ValueError):
            raise ConfigError(f"non-numeric x or P in {path}", line=lineno) from None
    return np.array(xs), np.array(ps)


def cmd_tail(cfg: RunConfig, input_path=None):
    window = parse_window(cfg.window)
    code = EXIT_OK
    if input_path:
        x, P = _read_xp(input_path)
    else:
        c = _curve(cfg, with_deviation=False)
        x, P = c.x, c.P
        code = _exit_for(c)
    fit = fit_power_law(x, P, window)
    summary = {
        "exponent": fit.exponent,
        "intercept": fit.intercept,
        "window": list(fit.fit_window),
        "residual_rms": fit.residual_rms,
        "n_points": fit.n_points,
    }
    if fit.residual_rms > HIGH_RESIDUAL:
        summary["warning"] = "high residual: P is not a power law in this window"
    cols = ["x", "P", "in_window"]
    rows = [[x[i], P[i], bool(window[0] <= x[i] <= window[1])] for i in range(x.size)]
    plot = lambda path: plotting.tail(path, x, P, fit.exponent, fit.intercept, window)  # noqa: E731
    return cols, rows, summary, code, plot


def cmd_compare(cfg: RunConfig):
    grid = _grid(cfg)
    closed = BreitWigner(cfg.s_r, normalized=not cfg.unnormalized).amplitude(grid.points)
    c = decay_law_by_quadrature(grid, BreitWigner(cfg.s_r), _quad_cfg(cfg), workers=cfg.workers or 1)
    diff = np.abs(closed - c.a)
    cols = ["x", "re_closed", "im_closed", "re_quad", "im_quad", "abs_diff", "quad_error", "status"]
    rows = [[grid.points[i], closed[i].real, closed[i].imag, c.a[i].real, c.a[i].imag, diff[i],
             float(c.error[i]), _status(c, i)] for i in range(diff.size)]
    max_diff = float(np.max(np.where(np.isfinite(diff), diff, np.inf)))
    summary = {
        "max_abs_diff": max_diff,
        "rms_abs_diff": float(np.sqrt(np.mean(diff**2))),
        "tolerance": AGREEMENT_TOL,
        "failed_points": int(c.failed.sum()),
    }
    if max_diff >= AGREEMENT_TOL:
        worst = np.argsort(-np.nan_to_num(diff, nan=np.inf), kind="stable")[:5]
        summary["worst_offenders"] = [{"x": float(grid.points[i]), "abs_diff": float(diff[i])} for i in worst]
        summary["verdict"] = "DISAGREE"
        code = EXIT_DISAGREE
    else:
        summary["verdict"] = "AGREE"
        code = _exit_for(c)
    plot = lambda path: plotting.comparison(path, grid.points, diff)  # noqa: E731
    return cols, rows, summary, code, plot


def cmd_spectrum(cfg: RunConfig):
    e_min = 0.0 if cfg.e_min is None else cfg.e_min
    e_max = 2.0 * cfg.s_r if cfg.e_max is None else cfg.e_max
    if cfg.points > 1 and not e_max > e_min:
        raise ConfigError("--e-max must exceed --e-min")
    E = np.linspace(e_min, e_max, cfg.points) if cfg.points > 1 else np.array([e_min])
    dens = _density(cfg)
    om = omega_bw(E, dens) if cfg.model == "bw" else omega_general(E, dens)
    om = np.atleast_1d(om)
    cols = ["E", "omega"]
    rows = [[E[i], om[i]] for i in range(E.size)]
    summary = {"normalization": dens.N}
    plot = lambda path: plotting.spectrum(path, E, om)  # noqa: E731
    return cols, rows, summary, EXIT_OK, plot


_COMMANDS = {
    "curve": cmd_curve,
    "deviation": cmd_deviation,
    "hamiltonian": cmd_hamiltonian,
    "tail": cmd_tail,
    "compare": cmd_compare,
    "spectrum": cmd_spectrum,
}
assert set(_COMMANDS) == set(COMMANDS)


def _report_lines(summary: dict) -> str:
    out = []
    for k, v in summary.items():
        if isinstance(v, (list, tuple)):
            v = " ".join(fmt_number(i) if not isinstance(i, dict) else
                         "(" + ", ".join(f"{a}={fmt_number(b)}" for a, b in i.items()) + ")" for i in v)
        else:
            v = fmt_number(v)
        out.append(f"{k}: {v}")
    return "\n".join(out) + "\n"


def _destination(cfg: RunConfig, output):
    if output:
        return Path(output)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / f"{cfg.command}.{cfg.format}"
    return None


def run(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        cfg = effective_config(args)
    except ConfigError as exc:
        print(f"decaylaw: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    started = time.perf_counter()
    try:
        handler = _COMMANDS[cfg.command]
        if cfg.command == "tail":
            cols, rows, summary, code, plot = handler(cfg, getattr(args, "input", None))
        else:
            cols, rows, summary, code, plot = handler(cfg)
    except ConfigError as exc:
        print(f"decaylaw: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DecayLawError as exc:
        print(f"decaylaw: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    elapsed = time.perf_counter() - started

    if cfg.format == "json":
        meta = {"command": cfg.command, "version": __version__, "config": as_dict(cfg), "summary": summary}
        if args.timings:
            meta["timings"] = {"compute_seconds": elapsed}
        text = to_json(cols, rows, meta)
    else:
        text = to_csv(cols, rows)

    dest = _destination(cfg, args.output)
    report = _report_lines(summary)
    if dest is None:
        sys.stdout.write(text)
        sys.stderr.write(report)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        sys.stdout.write(report)
    if args.plot:
        plot(args.plot)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
