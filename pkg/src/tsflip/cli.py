"""Command-line interface: ``tsflip {privatize,simulate,metrics,compare-noise}``.

Exit codes: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from ._json import dump_json
from .errors import FlipError
from .metrics import d_acf, d_path, sample_acf
from .pipeline import FlipConfig, flip_compare_noise, flip_privatize
from .series import detrend_ols, load_csv, write_csv
from .simulate import DEFAULT_TRENDS, McConfig, run_monte_carlo


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_flip_flags(p):
    p.add_argument("--x", required=True, help="CSV with the sensitive series")
    p.add_argument("--z", required=True, help="CSV with the attacker's series")
    p.add_argument("--x-column", help="column of --x to use (default: last)")
    p.add_argument("--z-column", help="column of --z to use (default: last)")
    p.add_argument("--config", help="JSON file of pipeline settings; explicit flags take precedence")
    p.add_argument("--delta", type=float, help="privacy budget, 0 <= delta < 1 (default 0)")
    p.add_argument("--trend-order", type=int, dest="d", help="polynomial trend order d (default 0)")
    p.add_argument("--K", type=int, help="cepstral truncation (default 25)")
    p.add_argument("--M", type=int, help="impulse half-length and extension length (default 45)")
    p.add_argument("--grid-N", type=int, dest="N", help="frequency grid size (default 2048)")
    p.add_argument("--estimator", help="'var:<p>' or 'flattop' (default var:1)")
    p.add_argument("--threshold-C", type=float, dest="threshold_C",
                   help="flat-top correlation threshold (default max(1/T, 2 sqrt(log10 T / T)))")
    p.add_argument("--H", type=int, help="ACF lags for D_ACF (default 24)")
    p.add_argument("--mode", choices=("detrend", "direct"), help="trend handling (default detrend)")
    p.add_argument("--standardize", action="store_true", default=None,
                   help="standardize both series before filtering and invert afterwards")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tsflip", description="Privatize a time series with a randomized all-pass filter.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("privatize", help="privatize --x against --z")
    _add_flip_flags(p)
    p.add_argument("--out", required=True,
                   help="output prefix: writes <out>.csv, .report.json, .filter.json, .paths.csv, .acf.csv, .spectrum.csv")

    s = sub.add_parser("simulate", help="Monte Carlo study on a bivariate VAR(1)")
    s.add_argument("--rho", type=float, default=0.1, help="cross-correlation (default 0.1)")
    s.add_argument("--sigma2", type=float, default=0.5, help="innovation variance (default 0.5)")
    s.add_argument("--T", type=int, default=200, help="sample length (default 200)")
    s.add_argument("--reps", type=int, default=100, help="replications (default 100)")
    s.add_argument("--delta", type=float, default=0.0, help="privacy budget (default 0)")
    s.add_argument("--K", type=int, default=25, help="default 25")
    s.add_argument("--M", type=int, default=45, help="default 45")
    s.add_argument("--H", type=int, default=24, help="default 24")
    s.add_argument("--grid-N", type=int, default=2048, dest="N", help="default 2048")
    s.add_argument("--estimator", default="var:1", help="default var:1")
    s.add_argument("--trend", action="store_true",
                   help="add linear trends 30 + 0.05 t (x) and 10 + 0.06 t (z)")
    s.add_argument("--trend-order", type=int, default=None, dest="d",
                   help="trend order used by the pipeline (default 1 with --trend, else 0)")
    s.add_argument("--seed", type=int, default=0, help="default 0")
    s.add_argument("--out", required=True, help="output prefix: <out>.replicates.csv, <out>.summary.json")

    m = sub.add_parser("metrics", help="D_path and D_ACF between two series")
    m.add_argument("--original", required=True)
    m.add_argument("--privatized", required=True)
    m.add_argument("--original-column")
    m.add_argument("--privatized-column")
    m.add_argument("--H", type=int, default=24, help="default 24")
    m.add_argument("--trend-order", type=int, default=None, dest="d",
                   help="remove an OLS trend of this order from both series first (default: none)")

    c = sub.add_parser("compare-noise", help="FLIP versus i.i.d. noise addition")
    _add_flip_flags(c)
    c.add_argument("--snr", type=float, default=1.0, help="signal-to-noise ratio (default 1)")
    c.add_argument("--out", help="optional path for the JSON comparison")
    return parser


def _flip_config(args) -> FlipConfig:
    settings = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                settings = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read --config: {exc}") from exc
        if not isinstance(settings, dict):
            raise UsageError("--config must hold a JSON object")
    for key in ("delta", "d", "K", "M", "N", "estimator", "threshold_C", "H", "mode", "standardize"):
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    try:
        return FlipConfig.from_dict(settings)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_privatize(args) -> int:
    cfg = _flip_config(args)
    x = load_csv(args.x, args.x_column)
    z = load_csv(args.z, args.z_column)
    res = flip_privatize(x, z, cfg, np.random.default_rng(args.seed))
    res.provenance["seed"] = args.seed
    out = args.out
    t = np.arange(1, x.T + 1)
    write_csv(f"{out}.csv", {"t": t, x.label: res.privatized.values})
    res.report.to_json(f"{out}.report.json")
    res.filter.to_json(f"{out}.filter.json")
    write_csv(f"{out}.paths.csv", {"t": t, "original": x.values, "privatized": res.privatized.values,
                                   "original_residual": res.residuals,
                                   "privatized_residual": res.privatized_residuals})
    lags = np.arange(cfg.H + 1)
    write_csv(f"{out}.acf.csv", {"lag": lags, "original": sample_acf(res.residuals, cfg.H),
                                 "privatized": sample_acf(res.privatized_residuals, cfg.H)})
    F = res.spectral_matrix
    write_csv(f"{out}.spectrum.csv", {"lambda": F.grid.points, "f_X": F.fx.real, "f_Z": F.fz.real,
                                      "f_XZ_re": F.fxz.real, "f_XZ_im": F.fxz.imag,
                                      "f_X_given_Z": res.residual_spectrum.values,
                                      "phase": res.phase.values})
    print(res.report.table())
    return 0


def cmd_simulate(args) -> int:
    d = args.d if args.d is not None else (1 if args.trend else 0)
    try:
        cfg = McConfig(reps=args.reps, T=args.T, rho=args.rho, sigma2=args.sigma2, delta=args.delta,
                       K=args.K, M=args.M, H=args.H, N=args.N,
                       trend=DEFAULT_TRENDS if args.trend else None, d=d,
                       estimator=args.estimator, seed=args.seed)
        cfg.flip_config()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = run_monte_carlo(cfg)
    res.write(args.out)
    s = res.summary
    print(f"mean privacy      {s['mean_privacy']:.6g}")
    print(f"median D_path     {s['d_path']['q50']:.6g}")
    print(f"median D_ACF      {s['d_acf']['q50']:.6g}")
    return 0


def cmd_metrics(args) -> int:
    x = load_csv(args.original, args.original_column).values
    y = load_csv(args.privatized, args.privatized_column).values
    if args.d is not None:
        if x.size != y.size:
            raise FlipError(f"lengths differ: {x.size} vs {y.size}")
        x = detrend_ols(x, args.d).residuals
        y = detrend_ols(y, args.d).residuals
    dp = d_path(x, y)
    da = d_acf(x, y, args.H)
    print(f"{'D_path':<16}{dp:.6g}")
    print(f"{f'D_ACF (H={args.H})':<16}{da:.6g}")
    return 0


def cmd_compare_noise(args) -> int:
    cfg = _flip_config(args)
    x = load_csv(args.x, args.x_column)
    z = load_csv(args.z, args.z_column)
    res = flip_compare_noise(x, z, cfg, args.snr, np.random.default_rng(args.seed))
    d = res.to_dict()
    if args.out:
        dump_json(args.out, d)
    print(json.dumps(d, indent=2, sort_keys=True))
    return 0


COMMANDS = {"privatize": cmd_privatize, "simulate": cmd_simulate,
            "metrics": cmd_metrics, "compare-noise": cmd_compare_noise}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.verb](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tsflip: error: {exc}", file=sys.stderr)
        return 1
    except (FlipError, OSError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"tsflip: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
