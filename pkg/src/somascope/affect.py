"""Emotion analytics over a scanned CorpusStats: class profiles, per-type
deltas, length and bin tables, type diversity, and lexicon-side profiles of
the body-part words themselves."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .corpus import CorpusStats
from .errors import DataError
from .lexicon import ALL_DIMS, EMOTIONS, VAD_DIMS, BodyPartLexicon, EmotionLexicon, VadLexicon
from .textscan import POSSESSION_CLASSES

log = logging.getLogger(__name__)

# Classes reported by class_profiles: possession granularity plus the pooled
# third-person view and the no-BPM baseline.
PROFILE_CLASSES = ("MY", "YOUR", "HIS", "HER", "THEIR", "P3", "NOBPM", "BPM")


@dataclass(frozen=True)
class EmotionProfile:
    class_or_type: str
    dim_props: dict[str, float]
    n: int


@dataclass(frozen=True)
class DeltaReport:
    term: str
    dim_deltas: dict[str, float]
    mean: dict[str, float]
    std: dict[str, float]
    n: int


def class_profiles(stats: CorpusStats, classes=PROFILE_CLASSES) -> dict[str, EmotionProfile]:
    """Per-class proportion of instances with >= 1 associated word, for all
    14 dimensions. Zero-instance classes are omitted with a notice."""
    out = {}
    for cls in classes:
        n = stats.per_class.get(cls, 0)
        if n == 0:
            log.info("class %s has no instances; omitted from profiles", cls)
            continue
        props = {d: stats.emotion_by_class.get((cls, d), 0) / n for d in ALL_DIMS}
        out[cls] = EmotionProfile(class_or_type=cls, dim_props=props, n=n)
    return out


def qualifying_my_types(stats: CorpusStats, min_count: int = 100, top_k: int | None = None) -> list[str]:
    """Canonical "my <BPM>" types with at least min_count instances,
    optionally truncated to the top_k most frequent."""
    counts = [
        (canonical, c)
        for (possession, canonical), c in stats.per_type.items()
        if possession == "MY" and c >= min_count
    ]
    counts.sort(key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        counts = counts[:top_k]
    return [t for t, _ in counts]


def per_type_deltas(
    stats: CorpusStats, min_count: int = 100, top_k: int | None = None
) -> list[DeltaReport]:
    """Per-dimension deltas of each qualifying "my <BPM>" type against the
    unweighted mean over the type set; std is the population form."""
    types = qualifying_my_types(stats, min_count, top_k)
    if len(types) < 2:
        raise DataError(
            f"need at least 2 'my <BPM>' types with >= {min_count} instances, found {len(types)}"
        )
    props = {
        t: {
            d: stats.emotion_by_my_type.get((t, d), 0) / stats.per_type[("MY", t)]
            for d in ALL_DIMS
        }
        for t in types
    }
    mean = {d: sum(props[t][d] for t in types) / len(types) for d in ALL_DIMS}
    std = {
        d: math.sqrt(sum((props[t][d] - mean[d]) ** 2 for t in types) / len(types))
        for d in ALL_DIMS
    }
    return [
        DeltaReport(
            term=t,
            dim_deltas={d: props[t][d] - mean[d] for d in ALL_DIMS},
            mean=mean,
            std=std,
            n=stats.per_type[("MY", t)],
        )
        for t in sorted(types)
    ]


def top_types(stats: CorpusStats, possession: str, k: int) -> list[tuple[str, float]]:
    """Top-k canonical types for a possession class, with shares (percent of
    that class's possessed-type instance count). Ties break lexicographically."""
    if k <= 0:
        raise DataError(f"k must be positive, got {k}")
    counts = [(t, c) for (p, t), c in stats.per_type.items() if p == possession]
    total = sum(c for _, c in counts)
    if total == 0:
        return []
    counts.sort(key=lambda kv: (-kv[1], kv[0]))
    return [(t, 100.0 * c / total) for t, c in counts[:k]]


def length_report(stats: CorpusStats) -> dict[str, dict[str, float]]:
    """Per-class mean character/token lengths, plus the BPM/NOBPM mean-length
    ratios. Zero-count classes are omitted."""
    out: dict[str, dict[str, float]] = {}
    for cls in ("BPM", "NOBPM") + POSSESSION_CLASSES + ("P3",):
        n = stats.per_class.get(cls, 0)
        if n == 0:
            continue
        out[cls] = {
            "n": n,
            "mean_chars": stats.char_sums.get(cls, 0) / n,
            "mean_tokens": stats.token_sums.get(cls, 0) / n,
        }
    if "BPM" in out and "NOBPM" in out and out["NOBPM"]["mean_chars"] > 0:
        out["ratio"] = {
            "chars": out["BPM"]["mean_chars"] / out["NOBPM"]["mean_chars"],
            "tokens": out["BPM"]["mean_tokens"] / out["NOBPM"]["mean_tokens"]
            if out["NOBPM"]["mean_tokens"] > 0
            else float("nan"),
        }
    return out


def binned_profiles(stats: CorpusStats, classes=("MY", "NOBPM")) -> list[dict]:
    """Per word-count bin and class: proportion of instances with >= 1 word
    per dimension. Empty (bin, class) cells are omitted."""
    bins = sorted(
        {k for (kind, k, _cls) in stats.per_group if kind == "length_bin"},
        key=lambda b: int(b[1:].split(",")[0]),
    )
    rows = []
    for b in bins:
        for cls in classes:
            n = stats.per_group.get(("length_bin", b, cls), 0)
            if n == 0:
                continue
            rows.append(
                {
                    "bin": b,
                    "class": cls,
                    "n": n,
                    **{d: stats.emotion_by_bin.get((b, cls, d), 0) / n for d in ALL_DIMS},
                }
            )
    return rows


def type_diversity(stats: CorpusStats, threshold: float = 0.001) -> dict[str, int]:
    """Per possession class: number of canonical types whose share of that
    class's possessed-type instances exceeds the threshold."""
    out = {}
    for possession in POSSESSION_CLASSES + ("P3", "ANY"):
        counts = [(t, c) for (p, t), c in stats.per_type.items() if p == possession]
        total = sum(c for _, c in counts)
        if total == 0:
            out[possession] = 0
            continue
        out[possession] = sum(1 for _, c in counts if c / total > threshold)
    return out


def lexicon_profile_of_bp_words(
    bp_lex: BodyPartLexicon,
    emo_lex: EmotionLexicon,
    vad_lex: VadLexicon,
    frequent_set: frozenset[str] | set[str],
) -> dict:
    """Mean VAD scores and emotion-membership rates for three word groups:
    frequent body-part words, all body-part words, and non-body-part words.

    Rates are over each group's intersection with the relevant lexicon;
    membership counts report how many body-part words each lexicon covers.
    """
    unknown = set(frequent_set) - set(bp_lex.terms)
    if unknown:
        raise DataError(f"frequent_set contains non-lexicon terms: {sorted(unknown)[:5]}")
    groups = {
        "frequent_bp": set(frequent_set),
        "all_bp": set(bp_lex.terms),
        "non_bp": (set(vad_lex.scores) | set(emo_lex.assoc)) - set(bp_lex.terms),
    }
    report: dict = {
        "membership": {
            "bp_in_emotion_lexicon": sum(1 for t in bp_lex.terms if t in emo_lex.assoc),
            "bp_in_vad_lexicon": sum(1 for t in bp_lex.terms if t in vad_lex.scores),
        },
        "groups": {},
    }
    for name, words in groups.items():
        vad_words = sorted(words & set(vad_lex.scores))
        emo_words = sorted(words & set(emo_lex.assoc))
        if not vad_words and not emo_words:
            raise DataError(f"group {name!r} has no words in either lexicon")
        entry: dict = {"n_vad": len(vad_words), "n_emotion": len(emo_words)}
        if vad_words:
            for i, dim in enumerate(VAD_DIMS):
                entry[f"mean_{dim}"] = sum(vad_lex.scores[w][i] for w in vad_words) / len(vad_words)
        if emo_words:
            for e in EMOTIONS:
                entry[f"rate_{e}"] = sum(
                    1 for w in emo_words if e in emo_lex.assoc[w]
                ) / len(emo_words)
        report["groups"][name] = entry
    return report
