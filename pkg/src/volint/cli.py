"""Command-line interface.

Exit codes: 0 success, 2 configuration or usage error, 3 data error,
4 statistical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, validate_config
from .errors import ConfigError, DataError, StageError, VolintError
from .intervals import extract_intervals, scaled_pdf, empirical_cdf
from .kstest import ks_matrix
from .pipeline import _write_csv, fit_threshold, load_normalized, run_analyze
from .moments import ess_xi, fit_alpha, moment_curve
from .synth import SynthSpec, generate_minute_csv


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _series_config(args) -> RunConfig:
    raw = {"input": args.input}
    if getattr(args, "calendar", None):
        raw["calendar"] = args.calendar
    if getattr(args, "keep_overnight", False):
        raw["drop_overnight"] = False
    if getattr(args, "same_day_only", False):
        raw["cross_day"] = False
    for attr, key in (
        ("thresholds", "thresholds"),
        ("bins_per_decade", "bins_per_decade"),
        ("n_boot", "n_boot"),
        ("seed", "seed"),
        ("mode", "fit_mode"),
        ("q_min", "q_min"),
        ("q_max", "q_max"),
        ("q_step", "q_step"),
        ("orders", "moment_orders"),
        ("region", "region"),
        ("jobs", "jobs"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    if getattr(args, "refit", False):
        raw["refit"] = True
    if getattr(args, "whole_sample_cv", False):
        raw["overlap_counts"] = False
    return validate_config(raw)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args) -> int:
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"bad --param {item!r}; expected key=value")
        try:
            params[key] = float(value)
        except ValueError:
            params[key] = value
    try:
        spec = SynthSpec(kind=args.kind, n=args.n, seed=args.seed, params=params)
        ms = generate_minute_csv(spec, args.out)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    print(f"wrote {args.out} ({len(ms.days)} days, {ms.n_present} minute prices)")
    return 0


def cmd_volatility(args) -> int:
    cfg = _series_config(args)
    v, pattern, sd, ms, meta = load_normalized(cfg)
    out = _out_dir(args)
    _write_csv(
        out / "volatility.csv",
        ["day", "slot", "v"],
        (
            (ms.days[d].isoformat(), int(s), float(x))
            for d, s, x in zip(v.day, v.slot, v.values)
        ),
    )
    _write_csv(
        out / "pattern.csv",
        ["slot", "value", "count"],
        zip(pattern.slots.tolist(), pattern.values.tolist(), pattern.counts.tolist()),
    )
    print(f"{len(v)} volatility points over {meta['n_days']} days; deseasonalized sd {sd:.6g}")
    return 0


def _load_samples(args, cfg: RunConfig):
    v, *_ = load_normalized(cfg)
    return v, [extract_intervals(v, q, cross_day=cfg.cross_day) for q in cfg.thresholds]


def cmd_intervals(args) -> int:
    cfg = _series_config(args)
    _, samples = _load_samples(args, cfg)
    out = _out_dir(args)
    _write_csv(out / "intervals.csv", ["q", "tau"], ((s.q, int(t)) for s in samples for t in s.tau))
    rows = []
    for s in samples:
        table = scaled_pdf(s, cfg.bins_per_decade)
        rows.extend((s.q, float(x), float(d), int(c)) for x, d, c in zip(table.center, table.density, table.count))
    _write_csv(out / "pdf.csv", ["q", "x", "density", "count"], rows)
    cdf_rows = []
    for s in samples:
        table = empirical_cdf(s)
        cdf_rows.extend((s.q, float(x), float(f)) for x, f in zip(table.x, table.F))
    _write_csv(out / "cdf.csv", ["q", "x", "F"], cdf_rows)
    for s in samples:
        print(f"q={s.q:g}: {len(s)} intervals, mean {s.mean_interval:.3f}")
    return 0


def cmd_ks_matrix(args) -> int:
    cfg = _series_config(args)
    _, samples = _load_samples(args, cfg)
    matrix = ks_matrix(samples, overlap_counts=cfg.overlap_counts)
    header = ["q_i", "q_j", "ks", "cv", "m", "n", "decision"]
    rows = [
        (r["q_i"], r["q_j"], r["ks"], r["cv"], r["m"], r["n"], r["decision"])
        for r in matrix.to_rows()
    ]
    if args.out:
        _write_csv(Path(args.out), header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(str(x) if not isinstance(x, float) else repr(x) for x in row) + "\n")
    print(f"verdict: {matrix.verdict}", file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_fit(args) -> int:
    cfg = _series_config(args)
    _, samples = _load_samples(args, cfg)
    reports = [fit_threshold(cfg, s) for s in samples]
    out = _out_dir(args)
    _write_csv(
        out / "fits.csv",
        ["q", "mode", "c", "a", "gamma", "n", "ks", "p", "n_boot", "seed"],
        (
            (r.q, r.mode, r.model.c, r.model.a, r.model.gamma, r.n, r.ks, r.p, r.n_boot, r.seed)
            for r in reports
        ),
    )
    (out / "fits.json").write_text(
        json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    )
    for r in reports:
        print(
            f"q={r.q:g}: c={r.model.c:.3f} a={r.model.a:.3f} gamma={r.model.gamma:.3f} p={r.p:.3f}"
        )
    return 0


def cmd_moments(args) -> int:
    cfg = _series_config(args)
    v, *_ = load_normalized(cfg)
    out = _out_dir(args)
    grid = cfg.q_grid
    rows, alpha_rows, ess_rows = [], [], []
    for m in cfg.moment_orders:
        curve = moment_curve(v, m, grid, cross_day=cfg.cross_day)
        alpha = fit_alpha(curve, region=cfg.region)
        ess = ess_xi(v, m, 1.0, grid, region=cfg.region, cross_day=cfg.cross_day)
        rows.extend(
            (m, float(q), float(mt), float(mu), int(k))
            for q, mt, mu, k in zip(curve.q, curve.mean_tau, curve.mu, curve.n_intervals)
        )
        alpha_rows.append((m, alpha.alpha, alpha.stderr, alpha.n_points))
        ess_rows.append((ess.m, ess.n, ess.xi, ess.stderr, ess.alpha, ess.identity_gap, ess.n_points))
        print(f"m={m:g}: alpha={alpha.alpha:+.4f} (se {alpha.stderr:.4f}), xi(m,1)={ess.xi:.4f}")
    _write_csv(out / "moments.csv", ["m", "q", "mean_tau", "mu", "n_intervals"], rows)
    _write_csv(out / "alpha.csv", ["m", "alpha", "stderr", "n_points"], alpha_rows)
    _write_csv(
        out / "ess.csv",
        ["m", "n", "xi", "stderr", "alpha", "identity_gap", "n_points"],
        ess_rows,
    )
    return 0


def cmd_analyze(args) -> int:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("input", "out_dir", "seed", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    cfg = validate_config(raw)
    summary = run_analyze(cfg)
    print(f"verdict: {summary['ks']['verdict']}; artifacts in {cfg.out_dir}")
    return 0


def _add_series_args(p: argparse.ArgumentParser, thresholds: bool = True) -> None:
    p.add_argument("--input", required=True, help="tick or minute CSV (timestamp,price)")
    p.add_argument("--calendar", help="calendar JSON (defaults to two standard sessions)")
    p.add_argument("--keep-overnight", action="store_true", help="keep returns spanning session breaks")
    p.add_argument("--same-day-only", action="store_true", help="discard intervals crossing days")
    if thresholds:
        p.add_argument("--thresholds", type=_floats, help="comma-separated thresholds (default 2,3,4,5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volint",
        description="Return-interval analysis of threshold exceedances in volatility series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic minute CSV")
    p.add_argument("--kind", choices=("iid_gaussian_abs", "shuffled_from_file", "se_intervals"), default="iid_gaussian_abs")
    p.add_argument("--n", type=int, default=140000, help="minimum volatility points after the pipeline")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--param", action="append", help="kind-specific key=value (repeatable)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("volatility", help="normalized deseasonalized volatility")
    _add_series_args(p, thresholds=False)
    p.add_argument("--out-dir", "-o", default="out")
    p.set_defaults(func=cmd_volatility)

    p = sub.add_parser("intervals", help="exceedance intervals, PDF and CDF tables")
    _add_series_args(p)
    p.add_argument("--bins-per-decade", type=int)
    p.add_argument("--out-dir", "-o", default="out")
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("ks-matrix", help="pairwise scaling tests across thresholds")
    _add_series_args(p)
    p.add_argument("--whole-sample-cv", action="store_true", help="use whole-sample sizes in the critical value")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_ks_matrix)

    p = sub.add_parser("fit", help="stretched-exponential fits with bootstrap p-values")
    _add_series_args(p)
    p.add_argument("--mode", choices=("mle", "lsq"))
    p.add_argument("--n-boot", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--refit", action="store_true", help="refit each bootstrap replicate")
    p.add_argument("--bins-per-decade", type=int)
    p.add_argument("--out-dir", "-o", default="out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("moments", help="moment scaling diagnostics")
    _add_series_args(p, thresholds=False)
    p.add_argument("--orders", type=_floats, help="comma-separated moment orders")
    p.add_argument("--q-min", type=float)
    p.add_argument("--q-max", type=float)
    p.add_argument("--q-step", type=float)
    p.add_argument("--region", type=_floats, help="mean-interval fit window, e.g. 10,100")
    p.add_argument("--out-dir", "-o", default="out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("analyze", help="full pipeline from a config file")
    p.add_argument("--config", help="JSON config; flags below override it")
    p.add_argument("--input")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        if isinstance(e.cause, ConfigError):
            return 2
        if isinstance(e.cause, (DataError, OSError)):
            return 3
        return 4
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (VolintError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
