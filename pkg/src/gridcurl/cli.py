"""Command-line pipeline: score corpora, build grids, simulate training.

Exit codes: 0 success, 1 usage, 2 data error, 3 internal error. Errors are
printed as single machine-parsable lines on stderr. The environment
variable ``CURL_LOG`` (debug/info/warning/error) controls log verbosity.

Batch scoring never aborts on one bad sample: failures land in a
``<out>.failures`` sidecar and the remaining records are written sorted by
id, so output bytes are identical for any worker count.
"""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .cognitive import BuiltinNgramProvider, FileNllProvider
from .errors import GridcurlError, MalformedRecord, MissingField
from .grid import build_grid, load_grid, save_grid
from .ingest import load_frames, load_manifest
from .jsonl import read_json, read_jsonl, write_json, write_jsonl
from .scheduler import SchedulerConfig
from .simharness import (
    ExperimentConfig,
    ExperimentRun,
    config_from_dict,
    correlate,
    make_synthetic_grid,
    sweep_k,
)
from .visual import BACKENDS, FlowConfig, score_sample

log = logging.getLogger("gridcurl")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit code 1, not its default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"gridcurl: error: usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    """Console formatting: 6 significant digits. Files keep full precision."""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


# --- score-visual ----------------------------------------------------------------


def _score_visual_one(task):
    """Worker-pool unit: returns ('ok', id, record) or ('fail', id, message)."""
    entry, cfg, verbose = task
    started = time.perf_counter()
    try:
        seq = load_frames(entry.frames_dir, sample_id=entry.id)
        proxies = score_sample(seq, cfg)
    except GridcurlError as exc:
        return ("fail", entry.id, str(exc), time.perf_counter() - started)
    record = {"id": entry.id, "phi_flow": proxies.phi_flow, "phi_ent": proxies.phi_ent}
    if verbose:
        record["per_frame_m"] = proxies.per_frame_m
        record["per_frame_E"] = proxies.per_frame_E
    return ("ok", entry.id, record, time.perf_counter() - started)


def cmd_score_visual(ns) -> int:
    entries = load_manifest(ns.manifest)
    cfg = FlowConfig(backend=ns.flow_backend)
    cfg.validate()
    tasks = [(entry, cfg, ns.verbose) for entry in entries]
    if ns.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=ns.workers) as pool:
            outcomes = list(pool.map(_score_visual_one, tasks))
    else:
        outcomes = [_score_visual_one(task) for task in tasks]

    records, failures = [], []
    for status, sample_id, payload, elapsed in outcomes:
        log.info("scored %s in %.1f ms (%s)", sample_id, elapsed * 1e3, status)
        if status == "ok":
            records.append(payload)
        else:
            failures.append({"id": sample_id, "error": payload})
    records.sort(key=lambda r: r["id"])
    failures.sort(key=lambda r: r["id"])
    write_jsonl(ns.out, records)
    if failures:
        write_jsonl(f"{ns.out}.failures", failures)
        log.warning("%d sample(s) failed; see %s.failures", len(failures), ns.out)
    print(f"scored {len(records)} samples, {len(failures)} failures -> {ns.out}")
    return EXIT_OK


# --- score-text --------------------------------------------------------------------


def cmd_score_text(ns) -> int:
    entries = load_manifest(ns.manifest)
    if ns.nll_file:
        provider = FileNllProvider(ns.nll_file)
    else:
        provider = BuiltinNgramProvider().fit(entries)

    records, failures = [], []
    for entry in entries:
        try:
            pair = provider.nll_pair(entry)
        except GridcurlError as exc:
            failures.append({"id": entry.id, "error": str(exc)})
            continue
        records.append({"id": entry.id, "s_cog": pair.nll_conditional - pair.nll_unconditional})
    records.sort(key=lambda r: r["id"])
    failures.sort(key=lambda r: r["id"])
    write_jsonl(ns.out, records)
    if failures:
        write_jsonl(f"{ns.out}.failures", failures)
        log.warning("%d sample(s) failed; see %s.failures", len(failures), ns.out)
    print(f"scored {len(records)} samples, {len(failures)} failures -> {ns.out}")
    return EXIT_OK


# --- build-grid ---------------------------------------------------------------------


def cmd_build_grid(ns) -> int:
    visual_scores = []
    for line_no, rec in read_jsonl(ns.visual_scores):
        for key in ("id", "phi_flow", "phi_ent"):
            if key not in rec:
                raise MissingField(key, line_no)
        visual_scores.append((rec["id"], float(rec["phi_flow"]), float(rec["phi_ent"])))
    text_scores = []
    for line_no, rec in read_jsonl(ns.text_scores):
        for key in ("id", "s_cog"):
            if key not in rec:
                raise MissingField(key, line_no)
        text_scores.append((rec["id"], float(rec["s_cog"])))

    grid, samples = build_grid(visual_scores, text_scores, k=ns.k, alpha=ns.alpha, seed=ns.seed)
    save_grid(ns.out, grid, samples)
    occupied = len(grid.nonempty())
    print(f"grid {ns.k}x{ns.k}: {grid.size()} samples, {occupied}/{ns.k * ns.k} buckets occupied -> {ns.out}")
    return EXIT_OK


# --- train-sim ------------------------------------------------------------------------


def _load_experiment_configs(ns) -> list[ExperimentConfig]:
    doc = read_json(ns.config) if ns.config else {}
    strategies = doc.pop("strategies", None)
    if strategies is None:
        strategies = [doc.get("strategy", "wavefront")]
    if ns.strategy:
        strategies = [ns.strategy]

    configs = []
    for strategy in strategies:
        merged = dict(doc)
        merged["strategy"] = strategy
        cfg = config_from_dict(merged)
        sched = cfg.scheduler
        if ns.gamma is not None:
            sched = replace(sched, gamma=ns.gamma)
        if ns.threshold is not None:
            sched = replace(sched, threshold=ns.threshold)
        if ns.rho is not None:
            sched = replace(sched, revisit_prob=ns.rho)
        cfg = replace(cfg, scheduler=sched)
        if ns.steps is not None:
            cfg = replace(cfg, steps=ns.steps)
        if ns.seed is not None:
            cfg = replace(cfg, seeds=(ns.seed,))
        if ns.beta is not None:
            cfg = replace(cfg, beta=ns.beta)
        if ns.clip_eps is not None:
            cfg = replace(cfg, clip_eps=ns.clip_eps)
        cfg.validate()
        configs.append(cfg)
    return configs


def _run_name(strategy: str, seed: int) -> str:
    return f"{strategy}_seed{seed}"


def cmd_train_sim(ns) -> int:
    grid, samples = load_grid(ns.grid)
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = _load_experiment_configs(ns)

    summary_rows = []
    for cfg in configs:
        for seed in cfg.seeds:
            name = _run_name(cfg.strategy, seed)
            if ns.resume:
                snap_path = Path(ns.resume) / f"snapshot_{name}.json"
                run = ExperimentRun.restore(cfg, grid, samples, read_json(snap_path))
            else:
                run = ExperimentRun(cfg, grid, samples, seed=int(seed))
            run.run(cfg.steps)

            write_jsonl(out_dir / f"trace_{name}.jsonl", run.trace)
            if run.sched is not None:
                write_jsonl(out_dir / f"events_{name}.jsonl", run.sched.events)
            write_json(out_dir / f"snapshot_{name}.json", run.snapshot())
            m = run.metrics()
            summary_rows.append(
                {
                    "strategy": m.strategy,
                    "seed": m.seed,
                    "steps_to_threshold": m.steps_to_threshold,
                    "final_mean_reward": m.final_mean_reward,
                    "forgetting_gap": m.forgetting_gap,
                }
            )
            log.info("run %s: steps_to_threshold=%s final=%s", name,
                     m.steps_to_threshold, _fmt(m.final_mean_reward))

    _write_summary(out_dir, summary_rows)
    for row in summary_rows:
        print(
            f"{row['strategy']:>22} seed={row['seed']:<4d} "
            f"steps_to_threshold={row['steps_to_threshold']} "
            f"final={_fmt(row['final_mean_reward'])} "
            f"forgetting_gap={_fmt(row['forgetting_gap'])}"
        )
    return EXIT_OK


def _write_summary(out_dir: Path, rows) -> None:
    headers = ["strategy", "seed", "steps_to_threshold", "final_mean_reward", "forgetting_gap"]
    with open(out_dir / "summary.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(headers) + "\n")
        for row in rows:
            fh.write(",".join("" if row[h] is None else repr(row[h]) if isinstance(row[h], float) else str(row[h]) for h in headers) + "\n")
    lines = ["  ".join(f"{h:>22}" for h in headers)]
    for row in rows:
        lines.append("  ".join(f"{_fmt(row[h]) if row[h] is not None else '-':>22}" for h in headers))
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- correlate -----------------------------------------------------------------------


_SCORE_KEYS = ("score", "s_cog", "d_visual", "d_text", "phi_flow", "phi_ent")


def _read_score_file(path) -> list[tuple[str, float]]:
    rows = []
    for line_no, rec in read_jsonl(path):
        if "id" not in rec:
            raise MissingField("id", line_no)
        value = None
        for key in _SCORE_KEYS:
            if key in rec:
                value = float(rec[key])
                break
        if value is None:
            numeric = [v for k, v in rec.items() if k != "id" and isinstance(v, (int, float))]
            if len(numeric) != 1:
                raise MalformedRecord(line_no, "expected exactly one numeric score field")
            value = float(numeric[0])
        rows.append((rec["id"], value))
    return rows


def _read_outcome_file(path) -> list[tuple[str, float]]:
    rows = []
    for line_no, rec in read_jsonl(path):
        if "id" not in rec:
            raise MissingField("id", line_no)
        value = rec.get("outcome", rec.get("correct"))
        if value is None:
            raise MissingField("outcome", line_no)
        rows.append((rec["id"], float(value)))
    return rows


def cmd_correlate(ns) -> int:
    scores = _read_score_file(ns.scores)
    outcomes = _read_outcome_file(ns.outcomes)
    table = correlate(scores, outcomes, bins=ns.bins)
    records = [
        {"bin": i, "center": center, "accuracy": acc, "n": n}
        for i, (center, acc, n) in enumerate(table)
    ]
    if ns.out:
        write_jsonl(ns.out, records)
    print(f"{'bin':>4} {'center':>12} {'accuracy':>10} {'n':>6}")
    for rec in records:
        print(f"{rec['bin']:>4d} {_fmt(rec['center']):>12} {_fmt(rec['accuracy']):>10} {rec['n']:>6d}")
    return EXIT_OK


# --- sweep-k -------------------------------------------------------------------------


def cmd_sweep_k(ns) -> int:
    doc = read_json(ns.config) if ns.config else {}
    doc.pop("strategies", None)
    doc.pop("k", None)
    cfg = config_from_dict(doc)
    ks = [int(v) for v in ns.k_values.split(",") if v.strip()]
    rows = sweep_k(cfg, ks, per_cell=ns.per_cell, corpus_seed=ns.seed or 0)

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    headers = ["k", "seeds", "median_steps_to_threshold", "mean_final_reward", "violations"]
    with open(out_dir / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(headers) + "\n")
        for row in rows:
            fh.write(",".join("" if row[h] is None else str(row[h]) for h in headers) + "\n")
    lines = ["  ".join(f"{h:>26}" for h in headers)]
    for row in rows:
        lines.append("  ".join(f"{_fmt(row[h]) if row[h] is not None else '-':>26}" for h in headers))
    report = "\n".join(lines) + "\n"
    (out_dir / "sweep.txt").write_text(report, encoding="utf-8")
    print(report, end="")
    return EXIT_OK


# --- wiring --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridcurl", description=__doc__)
    parser.add_argument("--version", action="version", version=f"gridcurl {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("score-visual", help="compute motion/entropy proxies per sample")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--flow-backend", choices=BACKENDS, default="farneback")
    p.add_argument("--verbose", action="store_true", help="include per-frame arrays")
    p.set_defaults(func=cmd_score_visual)

    p = sub.add_parser("score-text", help="compute calibrated surprisal per sample")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--nll-file", help="precomputed NLL pairs from an external LM")
    group.add_argument("--nll-builtin", action="store_true",
                       help="use the built-in n-gram model (default)")
    p.set_defaults(func=cmd_score_text)

    p = sub.add_parser("build-grid", help="normalize scores and bin into the KxK grid")
    p.add_argument("--visual-scores", required=True)
    p.add_argument("--text-scores", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_build_grid)

    p = sub.add_parser("train-sim", help="run the synthetic-learner simulation")
    p.add_argument("--grid", required=True)
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--strategy", choices=("wavefront", "random", "scalar_length",
                                          "scalar_generation_sim"))
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--clip-eps", type=float, dest="clip_eps")
    p.add_argument("--resume", help="directory holding snapshots of a previous run")
    p.set_defaults(func=cmd_train_sim)

    p = sub.add_parser("correlate", help="quantile-bin scores against outcomes")
    p.add_argument("--scores", required=True)
    p.add_argument("--outcomes", required=True)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("sweep-k", help="rerun the experiment across grid sizes")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--k-values", default="3,4,5")
    p.add_argument("--out", required=True)
    p.add_argument("--per-cell", type=int, default=6)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep_k)

    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("CURL_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not getattr(ns, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return ns.func(ns)
    except GridcurlError as exc:
        print(f"gridcurl: error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        log.exception("internal error")
        print(f"gridcurl: error: internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
