"""Command-line surface: scans and pseudo-experiments emitting CSV/JSON
artifacts for plotting and golden-file tests.

Subcommands
    map           phase-space maps of concurrence/discriminant per channel
    avg           direction-averaged correlations vs invariant mass
    window        mass-window integrated observables (WindowSeries CSV)
    tomo          pseudo-experiment + tomography report (JSON)
    significance  detection-significance grid over (M_max, rel. uncertainty)

Every output embeds provenance (package version, config hash, table
source, seed) and is a deterministic function of flags + input files.
Exit codes: 0 ok, 1 usage, 2 bad input data, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__, angular, events, lumi, window
from .errors import (
    BelowThreshold,
    EmptyWindow,
    EnvelopeFailure,
    InsufficientEvents,
    NoSignChange,
    OutOfRange,
    QuadratureNoConvergence,
    TableError,
    ZeroLuminosity,
)
from .kinematics import HBARC2_PB, PhysicsConfig, beta_of_mass, mass_of_beta
from .kinematics import PhasePoint
from .parton import Channel, coefficient_arrays, critical_betas, delta_point, mix_point

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_DATA_ERRORS = (TableError, OutOfRange, EmptyWindow, BelowThreshold, ZeroLuminosity,
                FileNotFoundError, InsufficientEvents, ValueError)
_NUMERIC_ERRORS = (QuadratureNoConvergence, NoSignChange, EnvelopeFailure)

TABLE_ENV_VAR = "TT_ENT_TABLE"


class UsageError(Exception):
    """Malformed flag value (exit code 1, like any other usage error)."""


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_grid(spec: str, name: str) -> np.ndarray:
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise UsageError(f"{name} expects MIN:MAX:COUNT, got {spec!r}") from None
    if n < 2 or hi <= lo:
        raise UsageError(f"{name}: need COUNT >= 2 and MAX > MIN")
    return np.linspace(lo, hi, n)


def _config_from_args(args) -> PhysicsConfig:
    overrides = {"m_t": args.m_t, "alpha_s": args.alpha_s, "sqrt_s": args.sqrt_s}
    if args.config:
        return PhysicsConfig.from_file(args.config, overrides=overrides)
    return PhysicsConfig(**{k: v for k, v in overrides.items() if v is not None})


def _table_from_args(args) -> lumi.LuminosityTable:
    path = args.table or os.environ.get(TABLE_ENV_VAR) or lumi.bundled_table_path()
    return lumi.load_table(path)


def _config_hash(cfg: PhysicsConfig) -> str:
    blob = f"m_t={cfg.m_t!r} alpha_s={cfg.alpha_s!r} sqrt_s={cfg.sqrt_s!r}"
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _provenance_lines(schema: str, cfg: PhysicsConfig, table, seed=None, extra=None) -> list[str]:
    lines = [
        f"# {schema}",
        f"# version={__version__}",
        f"# config=m_t:{cfg.m_t:g} alpha_s:{cfg.alpha_s:g} sqrt_s:{cfg.sqrt_s:g} hash:{_config_hash(cfg)}",
        f"# table={table.source}",
    ]
    if seed is not None:
        lines.append(f"# seed={seed}")
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val}")
    return lines


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _fmt_row(values) -> str:
    return ",".join(f"{v:.10g}" for v in values)


# -- subcommands -------------------------------------------------------


def cmd_map(args) -> int:
    cfg = _config_from_args(args)
    table = _table_from_args(args)
    m_grid = (
        _parse_grid(args.grid_m, "--grid-m")
        if args.grid_m
        else np.linspace(cfg.threshold + 1.0, 1000.0, 100)
    )
    n_theta = args.grid_theta or 61
    thetas = np.linspace(0.0, math.pi, n_theta + 2)[1:-1]  # open grid: poles excluded

    lines = _provenance_lines("ttspin map v1", cfg, table)
    lines.append(
        "m,theta,beta,conc_qq,delta_qq,conc_gg,delta_gg,conc_mixed,delta_mixed,w_gg,"
        "dsigma_dm_dtheta,beta_c1,beta_c2,m_c1,m_c2"
    )
    for theta in thetas:
        cos_t = math.cos(theta)
        b_c1, b_c2 = critical_betas(theta)
        m_c1, m_c2 = mass_of_beta(b_c1, cfg), mass_of_beta(b_c2, cfg)
        for m in m_grid:
            pp = PhasePoint.from_mass(float(m), cos_t, cfg)
            l_qq, l_gg = lumi.interpolate(table, float(m))
            d_qq = delta_point(Channel.QQBAR, pp)
            d_gg = delta_point(Channel.GG, pp)
            mixed, _, w_gg = mix_point(pp, l_qq, l_gg)
            c_mix = mixed.c
            d_mix = -c_mix[2, 2] + abs(c_mix[0, 0] + c_mix[1, 1]) - 1.0
            a_qq = coefficient_arrays(Channel.QQBAR, pp.beta, cos_t)[0]
            a_gg = coefficient_arrays(Channel.GG, pp.beta, cos_t)[0]
            dsig = (
                2.0 * math.pi * math.sin(theta) * cfg.alpha_s**2 * pp.beta / m**2
                * (l_qq * a_qq + l_gg * a_gg) * HBARC2_PB
            )
            lines.append(_fmt_row([
                m, theta, pp.beta,
                max(d_qq, 0.0) / 2.0, d_qq,
                max(d_gg, 0.0) / 2.0, d_gg,
                max(d_mix, 0.0) / 2.0, d_mix,
                w_gg, dsig, b_c1, b_c2, m_c1, m_c2,
            ]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_avg(args) -> int:
    cfg = _config_from_args(args)
    table = _table_from_args(args)
    m_grid = (
        _parse_grid(args.grid_m, "--grid-m")
        if args.grid_m
        else np.linspace(cfg.threshold + 0.5, 1500.0, 200)
    )
    lines = _provenance_lines("ttspin avg v1", cfg, table)
    lines.append(
        "m,beta,w_qq,w_gg,cperp_qq,cz_qq,conc_qq,cperp_gg,cz_gg,conc_gg,"
        "cperp_mixed,cz_mixed,delta_mixed,conc_mixed"
    )
    for m in m_grid:
        beta = beta_of_mass(float(m), cfg)
        avg_qq = angular.averaged_coefficients(Channel.QQBAR, beta)
        avg_gg = angular.averaged_coefficients(Channel.GG, beta)
        w_qq, w_gg = lumi.weights_averaged(table, float(m), avg_qq.a_tilde_avg, avg_gg.a_tilde_avg)
        cperp_mix = w_qq * avg_qq.c_perp + w_gg * avg_gg.c_perp
        cz_mix = w_qq * avg_qq.c_z + w_gg * avg_gg.c_z
        d_qq = angular.delta_avg(Channel.QQBAR, beta)
        d_gg = angular.delta_avg(Channel.GG, beta)
        d_mix = -cz_mix + 2.0 * abs(cperp_mix) - 1.0
        lines.append(_fmt_row([
            m, beta, w_qq, w_gg,
            avg_qq.c_perp, avg_qq.c_z, max(d_qq, 0.0) / 2.0,
            avg_gg.c_perp, avg_gg.c_z, max(d_gg, 0.0) / 2.0,
            cperp_mix, cz_mix, d_mix, max(d_mix, 0.0) / 2.0,
        ]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_window(args) -> int:
    cfg = _config_from_args(args)
    table = _table_from_args(args)
    m_grid = (
        _parse_grid(args.grid_m, "--grid-m")
        if args.grid_m
        else np.linspace(cfg.threshold + 4.0, 1500.0, 150)
    )
    gg_only = args.gg_only or args.channel == "gg"
    series = window.window_series(
        m_grid, table, cfg, gg_only=gg_only,
        provenance={"version": __version__, "config_hash": _config_hash(cfg)},
    )
    _write_text(args.out, series.to_csv())
    if args.json_out:
        _write_text(args.json_out, series.to_json())
    return EXIT_OK


def cmd_tomo(args) -> int:
    cfg = _config_from_args(args)
    table = _table_from_args(args)
    m_max = args.window_max or 450.0
    gg_only = args.gg_only or args.channel == "gg"
    sample = events.sample_events(
        args.events, (cfg.threshold, m_max), table, cfg, seed=args.seed, gg_only=gg_only
    )
    result = events.tomography_report(sample, assumption_level=args.level)
    d_est, d_err = events.estimate_D(sample)
    moments = window.window_moments(m_max, table, cfg, gg_only=gg_only)
    payload = {
        "provenance": {
            "version": __version__,
            "config_hash": _config_hash(cfg),
            "table_source": table.source,
            "seed": args.seed,
            "window": [cfg.threshold, m_max],
            "gg_only": gg_only,
        },
        "d_estimate": {"value": d_est, "stderr": d_err},
        "d_theory": moments.d_observable,
        "witness": events.witness(d_est),
        "tomography": result.to_dict(),
    }
    _write_text(args.out, json.dumps(payload, indent=1) + "\n")
    return EXIT_OK


def cmd_significance(args) -> int:
    cfg = _config_from_args(args)
    table = _table_from_args(args)
    m_grid = (
        _parse_grid(args.grid_m, "--grid-m")
        if args.grid_m
        else np.linspace(380.0, 800.0, 60)
    )
    unc_grid = (
        _parse_grid(args.rel_unc, "--rel-unc")
        if args.rel_unc
        else np.linspace(0.01, 0.12, 45)
    )
    gg_only = args.gg_only or args.channel == "gg"
    lines = _provenance_lines("ttspin significance v1", cfg, table,
                              extra={"gg_only": gg_only})
    lines.append("m_max,rel_unc,d,n_delta")
    for m in m_grid:
        d_theory = window.window_moments(float(m), table, cfg, gg_only=gg_only).d_observable
        for unc in unc_grid:
            lines.append(_fmt_row([m, unc, d_theory, events.significance(d_theory, float(unc))]))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ttspin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ttspin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--table", help=f"luminosity CSV (default: ${TABLE_ENV_VAR} or bundled fixture)")
        p.add_argument("--config", help="key=value physics config file")
        p.add_argument("--m-t", type=float, dest="m_t", help="top mass in GeV (overrides config)")
        p.add_argument("--alpha-s", type=float, dest="alpha_s", help="strong coupling (overrides config)")
        p.add_argument("--sqrt-s", type=float, dest="sqrt_s", help="pp energy in GeV (overrides config)")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--channel", choices=("qq", "gg", "mixed"), default="mixed")
        p.add_argument("--gg-only", action="store_true", help="pure gluon-fusion mode (w_gg = 1)")
        p.add_argument("--seed", type=int, default=1)

    p_map = sub.add_parser("map", help="phase-space concurrence/discriminant maps")
    add_common(p_map)
    p_map.add_argument("--grid-m", help="mass grid MIN:MAX:COUNT (GeV)")
    p_map.add_argument("--grid-theta", type=int, help="number of production angles (open grid)")
    p_map.set_defaults(func=cmd_map)

    p_avg = sub.add_parser("avg", help="direction-averaged correlations vs mass")
    add_common(p_avg)
    p_avg.add_argument("--grid-m", help="mass grid MIN:MAX:COUNT (GeV)")
    p_avg.set_defaults(func=cmd_avg)

    p_win = sub.add_parser("window", help="mass-window integrated observables")
    add_common(p_win)
    p_win.add_argument("--grid-m", help="upper-cut grid MIN:MAX:COUNT (GeV)")
    p_win.add_argument("--json-out", help="also write the series as JSON")
    p_win.set_defaults(func=cmd_window)

    p_tomo = sub.add_parser("tomo", help="pseudo-experiment tomography report")
    add_common(p_tomo)
    p_tomo.add_argument("--events", type=int, default=100_000, help="number of pseudo-events")
    p_tomo.add_argument("--window-max", type=float, help="upper mass cut in GeV (default 450)")
    p_tomo.add_argument("--level", type=int, choices=(2, 4, 15), default=15,
                        help="tomography assumption level (fitted parameter count)")
    p_tomo.set_defaults(func=cmd_tomo)

    p_sig = sub.add_parser("significance", help="detection-significance contours")
    add_common(p_sig)
    p_sig.add_argument("--grid-m", help="upper-cut grid MIN:MAX:COUNT (GeV)")
    p_sig.add_argument("--rel-unc", help="relative-uncertainty grid MIN:MAX:COUNT")
    p_sig.set_defaults(func=cmd_significance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ttspin: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"ttspin: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _DATA_ERRORS as exc:
        print(f"ttspin: bad input: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
