"""Command-line entry point.

Subcommands: scan, report, correlate, shcmp, aggregate. Exit codes:
0 success, 1 runtime/data error, 2 usage error. All randomness flows from
--seed, and identical inputs + flags + seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .annotate import aggregate as aggregate_ratings
from .annotate import load_ratings_csv, shcmp
from .corpus import IngestTally, ingest, scan, stats_from_json, stats_to_json
from .errors import SomascopeError
from .healthcorr import correlate, load_health_csv
from .lexicon import load_bp_terms, load_emotion_lexicon, load_vad_lexicon
from .reports import REPORT_NAMES, build_report, metadata, write_table

log = logging.getLogger(__name__)


_UNHASHED_KEYS = {
    # File locations do not affect computation; excluding them keeps outputs
    # byte-identical when the same inputs live at different paths.
    "func", "input", "out", "stats", "health", "ratings",
    "bp_lexicon", "emotion_lexicon", "vad_lexicon",
}


def _config_hash(args: argparse.Namespace) -> str:
    payload = {k: str(v) for k, v in sorted(vars(args).items()) if k not in _UNHASHED_KEYS}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:12]


def _load_stats(path):
    return stats_from_json(Path(path).read_text(encoding="utf-8"))


def cmd_scan(args) -> int:
    bp_lex = load_bp_terms(args.bp_lexicon)
    emo_lex = load_emotion_lexicon(args.emotion_lexicon) if args.emotion_lexicon else None
    vad_lex = (
        load_vad_lexicon(args.vad_lexicon, hi=args.vad_hi, lo=args.vad_lo)
        if args.vad_lexicon
        else None
    )
    tally = IngestTally()
    with open(args.input, "r", encoding="utf-8") as f:
        instances = list(ingest(f, tally=tally))
    stats = scan(instances, bp_lex, emo_lex, vad_lex, threads=args.threads)
    stats.ingest_skipped = tally.skipped
    Path(args.out).write_text(stats_to_json(stats) + "\n", encoding="utf-8")
    log.info(
        "scanned %d instances (%d records skipped) -> %s",
        stats.total_instances,
        tally.skipped,
        args.out,
    )
    return 0


def cmd_report(args) -> int:
    stats = _load_stats(args.stats)
    names = args.reports or list(REPORT_NAMES)
    for name in names:
        if name not in REPORT_NAMES:
            raise UsageError(f"unknown report {name!r}; available: {', '.join(REPORT_NAMES)}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = metadata(_config_hash(args), args.seed)
    for name in names:
        kwargs = {}
        if name == "ba3_type_deltas":
            kwargs["min_count"] = args.min_count
        header, rows = build_report(name, stats, **kwargs)
        write_table(out_dir / f"{name}.{args.format}", header, rows, args.format, meta)
    return 0


def cmd_correlate(args) -> int:
    stats = _load_stats(args.stats)
    health = load_health_csv(args.health)
    rows = correlate(stats, health)
    header = ["feature", "metric", "n", "rho", "p", "significant"]
    table = [
        [r.feature, r.metric, r.n, f"{r.rho:.6f}", f"{r.p:.6f}", r.significant] for r in rows
    ]
    meta = metadata(_config_hash(args), args.seed)
    write_table(args.out, header, table, args.format, meta)
    return 0


def cmd_shcmp(args) -> int:
    records = load_ratings_csv(args.ratings)
    value = shcmp(records, n_bins=args.bins, n_trials=args.trials, seed=args.seed)
    doc = {
        "_meta": metadata(_config_hash(args), args.seed),
        "n_bins": args.bins,
        "n_trials": args.trials,
        "seed": args.seed,
        "value": value,
    }
    Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return 0


def cmd_aggregate(args) -> int:
    records = load_ratings_csv(args.ratings)
    labels = aggregate_ratings(records, presence_threshold=args.presence_threshold)
    header = ["item_id", "emotion", "mean_rating", "present", "n_raters"]
    rows = [[l.item_id, l.emotion, f"{l.mean_rating:.6f}", l.present, l.n_raters] for l in labels]
    meta = metadata(_config_hash(args), args.seed)
    write_table(args.out, header, rows, args.format, meta)
    return 0


class UsageError(SomascopeError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="somascope", description=__doc__)
    parser.add_argument("--version", action="version", version=f"somascope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="scan a JSONL corpus into a stats checkpoint")
    p_scan.add_argument("--input", required=True, help="JSONL corpus file")
    p_scan.add_argument("--bp-lexicon", required=True, help="body-part term list")
    p_scan.add_argument("--emotion-lexicon", help="categorical emotion lexicon TSV")
    p_scan.add_argument("--vad-lexicon", help="VAD lexicon TSV")
    p_scan.add_argument("--vad-hi", type=float, default=0.67)
    p_scan.add_argument("--vad-lo", type=float, default=0.33)
    p_scan.add_argument("--threads", type=int, default=1)
    p_scan.add_argument("--out", required=True, help="output stats JSON path")
    p_scan.set_defaults(func=cmd_scan, seed=0)

    p_report = sub.add_parser("report", help="emit report tables from a stats checkpoint")
    p_report.add_argument("--stats", required=True, help="stats JSON from scan")
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.add_argument("--format", choices=("csv", "json"), default="csv")
    p_report.add_argument("--min-count", type=int, default=100)
    p_report.add_argument("--seed", type=int, default=0)
    p_report.add_argument("--reports", nargs="*", help=f"subset of: {', '.join(REPORT_NAMES)}")
    p_report.set_defaults(func=cmd_report)

    p_corr = sub.add_parser("correlate", help="correlate city features with health outcomes")
    p_corr.add_argument("--stats", required=True)
    p_corr.add_argument("--health", required=True, help="health CSV (city,metric,value)")
    p_corr.add_argument("--out", required=True)
    p_corr.add_argument("--format", choices=("csv", "json"), default="csv")
    p_corr.add_argument("--seed", type=int, default=0)
    p_corr.set_defaults(func=cmd_correlate)

    p_shcmp = sub.add_parser("shcmp", help="split-half reliability of crowd ratings")
    p_shcmp.add_argument("--ratings", required=True, help="ratings CSV")
    p_shcmp.add_argument("--bins", type=int, default=2)
    p_shcmp.add_argument("--trials", type=int, default=1000)
    p_shcmp.add_argument("--seed", type=int, default=0)
    p_shcmp.add_argument("--out", required=True)
    p_shcmp.set_defaults(func=cmd_shcmp)

    p_agg = sub.add_parser("aggregate", help="aggregate crowd ratings into binary labels")
    p_agg.add_argument("--ratings", required=True)
    p_agg.add_argument("--presence-threshold", type=float, default=1.5)
    p_agg.add_argument("--format", choices=("csv", "json"), default="csv")
    p_agg.add_argument("--out", required=True)
    p_agg.set_defaults(func=cmd_aggregate, seed=0)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SomascopeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
