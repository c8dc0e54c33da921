"""Deterministic report files derived from a CorpusStats checkpoint.

Every report is a flat table with a stable column order. CSV output renders
percentages with one decimal; JSON keeps full precision. Both carry a
metadata header (tool version, config hash, seed) for reproducibility.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .affect import (
    binned_profiles,
    class_profiles,
    length_report,
    per_type_deltas,
    top_types,
    type_diversity,
)
from .corpus import WEEKDAY_NAMES, CorpusStats
from .errors import DataError
from .lexicon import ALL_DIMS
from .textscan import POSSESSION_CLASSES

REPORT_NAMES = (
    "b1_prevalence",
    "b2_possession",
    "b3_top_types",
    "b4_month",
    "b4_weekday",
    "b5_region",
    "ba1_class_profiles",
    "ba3_type_deltas",
    "length",
    "bins",
    "diversity",
    "cooccur",
)


def _pct(numer: int, denom: int) -> float:
    return 100.0 * numer / denom if denom else 0.0


def report_b1(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["class", "instances", "total", "percent"]
    rows = []
    for cls in ("BPM", "NOBPM"):
        rows.append([cls, stats.per_class.get(cls, 0), stats.total_instances,
                     _pct(stats.per_class.get(cls, 0), stats.total_instances)])
    return header, rows


def report_b2(stats: CorpusStats) -> tuple[list[str], list[list]]:
    """Possession shares as percentages of BPM-containing instances."""
    header = ["class", "instances", "bpm_instances", "percent_of_bpm"]
    bpm = stats.per_class.get("BPM", 0)
    rows = []
    possessed = ("MY", "YOUR", "HIS", "HER", "THEIR", "P3")
    for cls in possessed:
        rows.append([cls, stats.per_class.get(cls, 0), bpm, _pct(stats.per_class.get(cls, 0), bpm)])
    return header, rows


def report_b3(stats: CorpusStats, k: int = 20) -> tuple[list[str], list[list]]:
    header = ["possession", "rank", "canonical", "instances", "share_percent"]
    rows = []
    for possession in POSSESSION_CLASSES + ("P3", "ANY"):
        for rank, (term, share) in enumerate(top_types(stats, possession, k), start=1):
            rows.append([possession, rank, term, stats.per_type[(possession, term)], share])
    return header, rows


def _group_rows(stats: CorpusStats, kind: str, keys: list[str]) -> list[list]:
    rows = []
    for key in keys:
        total = stats.group_totals.get((kind, key), 0)
        if total == 0:
            continue
        bpm = stats.per_group.get((kind, key, "BPM"), 0)
        my = stats.per_group.get((kind, key, "MY"), 0)
        rows.append([kind, key, total, _pct(bpm, total), _pct(my, total)])
    return rows


def report_b4_month(stats: CorpusStats) -> tuple[list[str], list[list]]:
    """Monthly profiles under both poolings: months pooled across years, and
    individual year-months."""
    header = ["group", "key", "instances", "bpm_percent", "my_bpm_percent"]
    months = [f"{m:02d}" for m in range(1, 13)]
    year_months = sorted({k for (kind, k, _c) in stats.per_group if kind == "year_month"})
    return header, _group_rows(stats, "month", months) + _group_rows(stats, "year_month", year_months)


def report_b4_weekday(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["group", "key", "instances", "bpm_percent", "my_bpm_percent"]
    return header, _group_rows(stats, "weekday", list(WEEKDAY_NAMES))


def report_b5(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["group", "key", "instances", "bpm_percent", "my_bpm_percent"]
    rows = []
    for kind in ("city", "country", "year_country"):
        keys = sorted({k for (g, k, _c) in stats.per_group if g == kind})
        rows.extend(_group_rows(stats, kind, keys))
    return header, rows


def report_ba1(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["class", "n"] + [f"{d}_percent" for d in ALL_DIMS]
    rows = []
    for cls, profile in class_profiles(stats).items():
        rows.append([cls, profile.n] + [100.0 * profile.dim_props[d] for d in ALL_DIMS])
    return header, rows


def report_ba3(stats: CorpusStats, min_count: int = 100, top_k=None) -> tuple[list[str], list[list]]:
    header = ["term", "n"] + [f"{d}_delta" for d in ALL_DIMS]
    try:
        deltas = per_type_deltas(stats, min_count=min_count, top_k=top_k)
    except DataError:
        return header, []
    rows = []
    for rep in deltas:
        rows.append([rep.term, rep.n] + [100.0 * rep.dim_deltas[d] for d in ALL_DIMS])
    return header, rows


def report_length(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["class", "n", "mean_chars", "mean_tokens"]
    rows = []
    rep = length_report(stats)
    for cls, entry in rep.items():
        if cls == "ratio":
            continue
        rows.append([cls, entry["n"], entry["mean_chars"], entry["mean_tokens"]])
    if "ratio" in rep:
        rows.append(["BPM/NOBPM_ratio", 0, rep["ratio"]["chars"], rep["ratio"]["tokens"]])
    return header, rows


def report_bins(stats: CorpusStats) -> tuple[list[str], list[list]]:
    header = ["bin", "class", "n"] + [f"{d}_percent" for d in ALL_DIMS]
    rows = []
    for row in binned_profiles(stats):
        rows.append([row["bin"], row["class"], row["n"]] + [100.0 * row[d] for d in ALL_DIMS])
    return header, rows


def report_diversity(stats: CorpusStats, threshold: float = 0.001) -> tuple[list[str], list[list]]:
    header = ["possession", "types_above_threshold", "threshold"]
    # The threshold is a parameter echo, not a percentage; keep its digits.
    rows = [[p, n, f"{threshold:g}"] for p, n in sorted(type_diversity(stats, threshold).items())]
    return header, rows


def report_cooccur(stats: CorpusStats, k_types: int = 20, k_words: int = 20) -> tuple[list[str], list[list]]:
    """Top co-occurring context words for the most common "my <BPM>" types."""
    header = ["canonical", "rank", "word", "count"]
    rows = []
    for term, _share in top_types(stats, "MY", k_types):
        words = [(w, c) for (t, w), c in stats.cooccur.items() if t == term]
        words.sort(key=lambda kv: (-kv[1], kv[0]))
        for rank, (word, count) in enumerate(words[:k_words], start=1):
            rows.append([term, rank, word, count])
    return header, rows


_BUILDERS = {
    "b1_prevalence": report_b1,
    "b2_possession": report_b2,
    "b3_top_types": report_b3,
    "b4_month": report_b4_month,
    "b4_weekday": report_b4_weekday,
    "b5_region": report_b5,
    "ba1_class_profiles": report_ba1,
    "ba3_type_deltas": report_ba3,
    "length": report_length,
    "bins": report_bins,
    "diversity": report_diversity,
    "cooccur": report_cooccur,
}


def build_report(name: str, stats: CorpusStats, **kwargs) -> tuple[list[str], list[list]]:
    if name not in _BUILDERS:
        raise DataError(f"unknown report {name!r}; available: {', '.join(REPORT_NAMES)}")
    return _BUILDERS[name](stats, **kwargs)


def _fmt_csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.1f}"
    return str(value)


def metadata(config_hash: str, seed: int) -> dict:
    return {"tool_version": __version__, "config_hash": config_hash, "seed": seed}


def write_table(path, header: list[str], rows: list[list], fmt: str, meta: dict) -> None:
    """Write a report table as CSV (1-decimal floats, '#' metadata header)
    or JSON (full precision, '_meta' block)."""
    path = Path(path)
    if fmt == "csv":
        lines = [f"# {k}: {v}" for k, v in meta.items()]
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt_csv_cell(c) for c in row))
        path.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    elif fmt == "json":
        doc = {"_meta": meta, "header": header, "rows": rows}
        path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    else:
        raise DataError(f"unknown format {fmt!r}")
