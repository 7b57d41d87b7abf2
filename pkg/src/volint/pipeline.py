"""End-to-end analysis pipeline.

Stages: ingest -> volatility -> intervals -> ks -> fit -> moments. Each
stage writes its artifacts under the output directory as it completes; a
stage failure writes a summary naming the failed stage (partial artifacts
stay on disk, flagged) and re-raises. Reports contain no timestamps, so a
rerun with the same config and seed is byte-identical.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig, derive_seed
from .errors import ConfigError, EmptySeriesError, StageError, VolintError
from .ingest import (
    MinuteSeries,
    TradingCalendar,
    parse_ticks,
    sample_minutely,
    tick_days,
    write_minute_csv,
)
from .intervals import IntervalSample, empirical_cdf, extract_intervals, scaled_pdf
from .kstest import KsMatrix, bootstrap_pvalue, ks_matrix
from .moments import ess_xi, fit_alpha, moment_curve, moment_vs_order
from .semodel import FitReport, fit_lsq, fit_mle
from .volatility import (
    IntradayPattern,
    NormVolSeries,
    compute_volatility,
    deseasonalize,
    intraday_pattern,
    normalize,
)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def load_minutes(cfg: RunConfig) -> tuple[MinuteSeries, dict]:
    """Parse the input ticks and align them to the calendar's minute marks."""
    if not cfg.input:
        raise ConfigError("input is required for analysis")
    ticks, skipped = parse_ticks(cfg.input)
    if cfg.calendar:
        cal = TradingCalendar.from_json(cfg.calendar)
    else:
        if not ticks:
            raise EmptySeriesError("no tick records in input")
        cal = TradingCalendar.for_days(tick_days(ticks))
    ms = sample_minutely(ticks, cal)
    meta = {
        "n_ticks": len(ticks),
        "n_skipped_lines": skipped,
        "n_days": len(ms.days),
        "n_present_minutes": ms.n_present,
    }
    return ms, meta


def build_volatility(
    ms: MinuteSeries, cfg: RunConfig
) -> tuple[NormVolSeries, IntradayPattern, float]:
    """Raw volatility -> intraday pattern -> deseasonalize -> normalize."""
    raw = compute_volatility(ms, drop_overnight=cfg.drop_overnight)
    pattern = intraday_pattern(raw)
    flat = deseasonalize(raw, pattern)
    sd = float(np.std(flat.values))
    return normalize(flat), pattern, sd


def load_normalized(cfg: RunConfig) -> tuple[NormVolSeries, IntradayPattern, float, MinuteSeries, dict]:
    """Convenience composition of ``load_minutes`` and ``build_volatility``."""
    ms, meta = load_minutes(cfg)
    v, pattern, sd = build_volatility(ms, cfg)
    return v, pattern, sd, ms, meta


def fit_threshold(cfg: RunConfig, sample: IntervalSample) -> FitReport:
    """Fit one threshold's scaled intervals and bootstrap its p-value."""
    if cfg.fit_mode == "lsq":
        model = fit_lsq(scaled_pdf(sample, cfg.bins_per_decade))
    else:
        model = fit_mle(sample.scaled())
    seed = derive_seed(cfg.seed, f"fit:q={sample.q:g}")
    return bootstrap_pvalue(
        sample, model, n_boot=cfg.n_boot, seed=seed, refit=cfg.refit, mode=cfg.fit_mode
    )


def _write_summary(out: Path, summary: dict) -> None:
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def run_analyze(cfg: RunConfig) -> dict:
    """Run every stage and write all artifacts plus ``summary.json``.

    Returns the summary dict. On a stage failure the summary names the
    failed stage and the partial artifact list before the error propagates
    as ``StageError``.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {
        "schema_version": 1,
        "config": asdict(cfg),
        "failed_stage": None,
        "artifacts": [],
    }

    def emit(name: str) -> Path:
        summary["artifacts"].append(name)
        summary["artifacts"].sort()
        return out / name

    try:
        stage = "ingest"
        ms, meta = load_minutes(cfg)
        summary["ingest"] = meta
        write_minute_csv(ms, emit("minutes.csv"))

        stage = "volatility"
        v, pattern, sd = build_volatility(ms, cfg)
        summary["volatility"] = {"n_points": len(v), "sd_deseasonalized": sd}
        _write_csv(
            emit("volatility.csv"),
            ["day", "slot", "v"],
            (
                (ms.days[d].isoformat(), int(s), float(x))
                for d, s, x in zip(v.day, v.slot, v.values)
            ),
        )
        _write_csv(
            emit("pattern.csv"),
            ["slot", "value", "count"],
            zip(pattern.slots.tolist(), pattern.values.tolist(), pattern.counts.tolist()),
        )

        stage = "intervals"
        samples = [extract_intervals(v, q, cross_day=cfg.cross_day) for q in cfg.thresholds]
        summary["thresholds"] = [
            {"q": s.q, "n_intervals": len(s), "mean_interval": s.mean_interval}
            for s in samples
        ]
        _write_csv(
            emit("intervals.csv"),
            ["q", "tau"],
            ((s.q, int(t)) for s in samples for t in s.tau),
        )
        _write_csv(
            emit("pdf.csv"),
            ["q", "x", "density", "count"],
            (
                (s.q, float(x), float(d), int(c))
                for s in samples
                for x, d, c in zip(*_pdf_cols(s, cfg.bins_per_decade))
            ),
        )
        _write_csv(
            emit("cdf.csv"),
            ["q", "x", "F"],
            (
                (s.q, float(x), float(f))
                for s in samples
                for x, f in zip(*_cdf_cols(s))
            ),
        )

        stage = "ks"
        matrix = ks_matrix(samples, overlap_counts=cfg.overlap_counts)
        summary["ks"] = {"verdict": matrix.verdict, "pairs": matrix.to_rows()}
        _write_csv(
            emit("ks_matrix.csv"),
            ["q_i", "q_j", "ks", "cv", "m", "n", "decision"],
            (
                (r["q_i"], r["q_j"], r["ks"], r["cv"], r["m"], r["n"], r["decision"])
                for r in matrix.to_rows()
            ),
        )

        stage = "fit"
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                reports = list(pool.map(lambda s: fit_threshold(cfg, s), samples))
        else:
            reports = [fit_threshold(cfg, s) for s in samples]
        summary["fits"] = [r.to_dict() for r in reports]
        _write_csv(
            emit("fits.csv"),
            ["q", "mode", "c", "a", "gamma", "n", "ks", "p", "n_boot", "seed"],
            (
                (r.q, r.mode, r.model.c, r.model.a, r.model.gamma, r.n, r.ks, r.p, r.n_boot, r.seed)
                for r in reports
            ),
        )
        (emit("fits.json")).write_text(
            json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
        )

        stage = "moments"
        grid = cfg.q_grid
        curves = [moment_curve(v, m, grid, cross_day=cfg.cross_day) for m in cfg.moment_orders]
        alphas = [fit_alpha(c, region=cfg.region) for c in curves]
        esses = [
            ess_xi(v, m, 1.0, grid, region=cfg.region, cross_day=cfg.cross_day)
            for m in cfg.moment_orders
        ]
        order_curves = moment_vs_order(
            v, cfg.mean_targets, cfg.order_grid, tol=cfg.tol_mean, cross_day=cfg.cross_day
        )
        summary["alpha"] = [
            {"m": c.m, "alpha": a.alpha, "stderr": a.stderr, "n_points": a.n_points}
            for c, a in zip(curves, alphas)
        ]
        summary["ess"] = [
            {
                "m": e.m,
                "n": e.n,
                "xi": e.xi,
                "stderr": e.stderr,
                "alpha": e.alpha,
                "identity_gap": e.identity_gap,
                "n_points": e.n_points,
            }
            for e in esses
        ]
        summary["order_curves"] = [
            {"target_mean": oc.target_mean, "q": oc.q, "achieved_mean": oc.achieved_mean}
            for oc in order_curves
        ]
        _write_csv(
            emit("moments.csv"),
            ["m", "q", "mean_tau", "mu", "n_intervals"],
            (
                (c.m, float(q), float(mt), float(mu), int(k))
                for c in curves
                for q, mt, mu, k in zip(c.q, c.mean_tau, c.mu, c.n_intervals)
            ),
        )
        _write_csv(
            emit("alpha.csv"),
            ["m", "alpha", "stderr", "n_points"],
            ((c.m, a.alpha, a.stderr, a.n_points) for c, a in zip(curves, alphas)),
        )
        _write_csv(
            emit("ess.csv"),
            ["m", "n", "xi", "stderr", "alpha", "identity_gap", "n_points"],
            (
                (e.m, e.n, e.xi, e.stderr, e.alpha, e.identity_gap, e.n_points)
                for e in esses
            ),
        )
        _write_csv(
            emit("order_curves.csv"),
            ["target_mean", "q", "achieved_mean", "m", "mu", "mu_model"],
            (
                (oc.target_mean, oc.q, oc.achieved_mean, float(m), float(mu), float(mm))
                for oc in order_curves
                for m, mu, mm in zip(oc.m, oc.mu, oc.mu_model)
            ),
        )
    except ConfigError:
        raise
    except (VolintError, ValueError, OSError) as e:
        summary["failed_stage"] = stage
        summary["error"] = str(e)
        _write_summary(out, summary)
        raise StageError(stage, e) from e

    _write_summary(out, summary)
    return summary


def _pdf_cols(sample: IntervalSample, bins_per_decade: int):
    table = scaled_pdf(sample, bins_per_decade)
    return table.center, table.density, table.count


def _cdf_cols(sample: IntervalSample):
    table = empirical_cdf(sample)
    return table.x, table.F
