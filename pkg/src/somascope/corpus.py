"""JSONL ingestion, sentence splitting, and the mergeable corpus scan.

CorpusStats is the substrate of every downstream report: a bag of integer
counters keyed by (group x class x dimension), with an exact merge so
parallel scans over disjoint chunks reproduce the single-pass result.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import ParseError
from .lexicon import (
    BodyPartLexicon,
    EmotionLexicon,
    VadLexicon,
    load_abbreviations,
    load_stopwords,
)
from .textscan import POSSESSION_CLASSES, annotate_instance

log = logging.getLogger(__name__)

STATS_SCHEMA_VERSION = 1

# Instance-level classes. P3 is the union of HIS/HER/THEIR, kept separately
# because per-instance union counts are not derivable from the three parts.
BPM_CLASSES = ("BPM", "NOBPM", "MY", "YOUR", "HIS", "HER", "THEIR", "P3")

GROUP_KINDS = ("month", "year_month", "weekday", "city", "country", "year_country", "length_bin")

LENGTH_BIN_WIDTH = 10  # words per bin: (0,10], (10,20], ...

WEEKDAY_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")


@dataclass(frozen=True)
class Instance:
    id: str
    text: str
    medium: str  # "blog" | "tweet"
    timestamp: str | None = None  # ISO-8601
    city: str | None = None
    country: str | None = None


@dataclass
class IngestTally:
    records: int = 0
    skipped: int = 0


def _parse_timestamp(value: str) -> datetime:
    # Python 3.10 fromisoformat rejects a trailing Z.
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc)
    return dt


def sentence_split(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split after . ! ? followed by whitespace or end of text.

    A period does not split when it terminates a listed abbreviation
    ("dr.", "e.g.") or sits inside a decimal number. Empty fragments are
    dropped.
    """
    if abbreviations is None:
        abbreviations = load_abbreviations()
    sentences = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?":
            # Consume a run of terminal punctuation ("?!", "...").
            j = i
            while j + 1 < n and text[j + 1] in ".!?":
                j += 1
            at_boundary = j + 1 >= n or text[j + 1].isspace()
            splits = at_boundary
            if splits and ch == "." and i == j:
                # Decimal number: digit on both sides of the dot.
                if 0 < i < n - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
                    splits = False
                else:
                    # Abbreviation guard: the word ending at this dot.
                    k = i - 1
                    while k >= 0 and not text[k].isspace():
                        k -= 1
                    word = text[k + 1 : i + 1].lower()
                    if word in abbreviations:
                        splits = False
            if splits:
                fragment = text[start : j + 1].strip()
                if fragment:
                    sentences.append(fragment)
                start = j + 1
            i = j + 1
        else:
            i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def ingest(stream, tally: IngestTally | None = None, abbreviations=None):
    """Yield Instances from a JSONL stream of {id, text, medium, ...} records.

    Blog records are sentence-split into one instance per sentence (ids
    suffixed #0, #1, ...); tweets pass through whole. Malformed lines or
    records are skipped and counted in the tally; stream-level I/O errors
    propagate.
    """
    if tally is None:
        tally = IngestTally()
    if abbreviations is None:
        abbreviations = load_abbreviations()
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        line = raw.strip()
        if not line:
            continue
        tally.records += 1
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            tally.skipped += 1
            log.warning("line %d: invalid JSON, skipped", lineno)
            continue
        if not isinstance(rec, dict):
            tally.skipped += 1
            continue
        rid, text, medium = rec.get("id"), rec.get("text"), rec.get("medium")
        if not isinstance(rid, str) or not rid or not isinstance(text, str) or medium not in ("blog", "tweet"):
            tally.skipped += 1
            log.warning("line %d: record failed schema, skipped", lineno)
            continue
        timestamp = rec.get("timestamp")
        if timestamp is not None:
            try:
                _parse_timestamp(timestamp)
            except (ValueError, TypeError):
                tally.skipped += 1
                log.warning("line %d: bad timestamp, skipped", lineno)
                continue
        city = rec.get("city")
        country = rec.get("country")
        common = dict(medium=medium, timestamp=timestamp, city=city, country=country)
        if medium == "blog":
            for k, sent in enumerate(sentence_split(text, abbreviations)):
                yield Instance(id=f"{rid}#{k}", text=sent, **common)
        else:
            yield Instance(id=rid, text=text, **common)


def length_bin(token_count: int) -> str:
    """Word-count bin label, width 10: (0,10], (10,20], ... Zero-token
    instances land in the first bin."""
    idx = max(0, (token_count - 1) // LENGTH_BIN_WIDTH)
    lo = idx * LENGTH_BIN_WIDTH
    return f"({lo},{lo + LENGTH_BIN_WIDTH}]"


@dataclass
class CorpusStats:
    """Mergeable integer counters over one scanned corpus (or chunk)."""

    total_instances: int = 0
    ingest_skipped: int = 0
    per_class: Counter = field(default_factory=Counter)  # class -> instances
    per_type: Counter = field(default_factory=Counter)  # (possession, canonical) -> instances
    per_group: Counter = field(default_factory=Counter)  # (kind, key, class) -> instances
    group_totals: Counter = field(default_factory=Counter)  # (kind, key) -> instances
    emotion_by_class: Counter = field(default_factory=Counter)  # (class, dim) -> instances
    emotion_by_bin: Counter = field(default_factory=Counter)  # (bin, class, dim) -> instances
    emotion_by_my_type: Counter = field(default_factory=Counter)  # (canonical, dim) -> instances
    emotion_by_city: Counter = field(default_factory=Counter)  # (city, dim) -> instances
    char_sums: Counter = field(default_factory=Counter)  # class -> total chars
    token_sums: Counter = field(default_factory=Counter)  # class -> total tokens
    cooccur: Counter = field(default_factory=Counter)  # (canonical, word) -> occurrences

    def check_invariants(self) -> None:
        """Raise AssertionError if a partition identity is violated."""
        assert self.per_class["BPM"] + self.per_class["NOBPM"] == self.total_instances
        for p in POSSESSION_CLASSES + ("P3",):
            assert self.per_class[p] <= self.per_class["BPM"]
        for kind, key in {(k[0], k[1]) for k in self.per_group}:
            slice_total = self.group_totals[(kind, key)]
            bpm = self.per_group[(kind, key, "BPM")]
            nobpm = self.per_group[(kind, key, "NOBPM")]
            assert bpm + nobpm == slice_total
            for p in POSSESSION_CLASSES + ("P3",):
                assert self.per_group[(kind, key, p)] <= bpm


def _instance_classes(ann) -> list[str]:
    classes = ["BPM" if ann.has_bpm else "NOBPM"]
    classes.extend(sorted(ann.possession_flags))
    if ann.possession_flags & {"HIS", "HER", "THEIR"}:
        classes.append("P3")
    return classes


def _group_keys(inst: Instance, ann) -> list[tuple[str, str]]:
    keys = [("length_bin", length_bin(ann.token_count))]
    if inst.timestamp:
        dt = _parse_timestamp(inst.timestamp)
        keys.append(("month", f"{dt.month:02d}"))
        keys.append(("year_month", f"{dt.year:04d}-{dt.month:02d}"))
        keys.append(("weekday", WEEKDAY_NAMES[dt.weekday()]))
    if inst.city:
        keys.append(("city", inst.city))
    if inst.country:
        keys.append(("country", inst.country))
        if inst.timestamp:
            dt = _parse_timestamp(inst.timestamp)
            keys.append(("year_country", f"{dt.year:04d}|{inst.country}"))
    return keys


def scan_one(
    stats: CorpusStats,
    inst: Instance,
    bp_lex: BodyPartLexicon,
    emo_lex: EmotionLexicon | None,
    vad_lex: VadLexicon | None,
    stopwords: frozenset[str],
) -> None:
    """Accumulate one instance into stats (in place)."""
    ann = annotate_instance(inst.id, inst.text, bp_lex, emo_lex, vad_lex)
    classes = _instance_classes(ann)
    dims = sorted(ann.emotion_hits | ann.vad_hits)
    groups = _group_keys(inst, ann)
    bin_key = groups[0][1]

    stats.total_instances += 1
    for c in classes:
        stats.per_class[c] += 1
        stats.char_sums[c] += ann.char_count
        stats.token_sums[c] += ann.token_count
        for d in dims:
            stats.emotion_by_class[(c, d)] += 1
            stats.emotion_by_bin[(bin_key, c, d)] += 1
        for kind, key in groups:
            stats.per_group[(kind, key, c)] += 1
    for kind, key in groups:
        stats.group_totals[(kind, key)] += 1

    # Per-type instance counts: one per distinct (possession, canonical) pair,
    # plus an ANY row per distinct canonical and a pooled P3 row.
    pairs = set()
    for span in ann.spans:
        pairs.add(("ANY", span.canonical))
        if span.possession != "NONE":
            pairs.add((span.possession, span.canonical))
            if span.possession in ("HIS", "HER", "THEIR"):
                pairs.add(("P3", span.canonical))
    for pair in pairs:
        stats.per_type[pair] += 1
    for possession, canonical in pairs:
        if possession == "MY":
            for d in dims:
                stats.emotion_by_my_type[(canonical, d)] += 1
    if inst.city:
        for d in dims:
            stats.emotion_by_city[(inst.city, d)] += 1

    # Co-occurrence: whole-instance window minus BP tokens, their possessive
    # pronouns, and stopwords.
    if ann.spans:
        excluded = set()
        for span in ann.spans:
            excluded.add(span.token_index)
            if span.possession != "NONE":
                excluded.add(span.token_index - 1)
        canonicals = {span.canonical for span in ann.spans}
        for i, tok in enumerate(ann.tokens):
            if i in excluded or tok.text in stopwords:
                continue
            for canonical in canonicals:
                stats.cooccur[(canonical, tok.text)] += 1


def scan(
    instances,
    bp_lex: BodyPartLexicon,
    emo_lex: EmotionLexicon | None = None,
    vad_lex: VadLexicon | None = None,
    stopwords: frozenset[str] | None = None,
    threads: int = 1,
    chunk_size: int = 2000,
) -> CorpusStats:
    """Scan instances into a CorpusStats.

    With threads > 1, disjoint chunks are annotated into private stats and
    merged; merge is exact integer arithmetic, so the result is identical to
    the single-threaded scan.
    """
    if stopwords is None:
        stopwords = load_stopwords()

    def scan_chunk(chunk) -> CorpusStats:
        s = CorpusStats()
        for inst in chunk:
            scan_one(s, inst, bp_lex, emo_lex, vad_lex, stopwords)
        return s

    if threads <= 1:
        return scan_chunk(instances)

    instances = list(instances)
    chunks = [instances[i : i + chunk_size] for i in range(0, len(instances), chunk_size)]
    total = CorpusStats()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(scan_chunk, chunks):
            total = merge(total, part)
    return total


def merge(a: CorpusStats, b: CorpusStats) -> CorpusStats:
    """Componentwise sum; commutative, associative, identity = CorpusStats()."""
    return CorpusStats(
        total_instances=a.total_instances + b.total_instances,
        ingest_skipped=a.ingest_skipped + b.ingest_skipped,
        per_class=a.per_class + b.per_class,
        per_type=a.per_type + b.per_type,
        per_group=a.per_group + b.per_group,
        group_totals=a.group_totals + b.group_totals,
        emotion_by_class=a.emotion_by_class + b.emotion_by_class,
        emotion_by_bin=a.emotion_by_bin + b.emotion_by_bin,
        emotion_by_my_type=a.emotion_by_my_type + b.emotion_by_my_type,
        emotion_by_city=a.emotion_by_city + b.emotion_by_city,
        char_sums=a.char_sums + b.char_sums,
        token_sums=a.token_sums + b.token_sums,
        cooccur=a.cooccur + b.cooccur,
    )


def _nest(counter: Counter, depth: int) -> dict:
    out: dict = {}
    for key, value in counter.items():
        node = out
        parts = key if isinstance(key, tuple) else (key,)
        assert len(parts) == depth
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _flatten(nested: dict, depth: int) -> Counter:
    out: Counter = Counter()

    def walk(node, prefix):
        if len(prefix) == depth:
            key = prefix[0] if depth == 1 else tuple(prefix)
            out[key] = node
            return
        for k, v in node.items():
            walk(v, prefix + [k])

    walk(nested, [])
    return out


_COUNTER_FIELDS = {
    "per_class": 1,
    "per_type": 2,
    "per_group": 3,
    "group_totals": 2,
    "emotion_by_class": 2,
    "emotion_by_bin": 3,
    "emotion_by_my_type": 2,
    "emotion_by_city": 2,
    "char_sums": 1,
    "token_sums": 1,
    "cooccur": 2,
}


def stats_to_json(stats: CorpusStats) -> str:
    """Stable JSON document for checkpointing and cross-run merging."""
    doc = {
        "schema_version": STATS_SCHEMA_VERSION,
        "total_instances": stats.total_instances,
        "ingest_skipped": stats.ingest_skipped,
    }
    for name, depth in _COUNTER_FIELDS.items():
        doc[name] = _nest(getattr(stats, name), depth)
    return json.dumps(doc, sort_keys=True, indent=1)


def stats_from_json(text: str) -> CorpusStats:
    doc = json.loads(text)
    if doc.get("schema_version") != STATS_SCHEMA_VERSION:
        raise ParseError(f"unsupported stats schema version {doc.get('schema_version')!r}")
    stats = CorpusStats(
        total_instances=doc["total_instances"],
        ingest_skipped=doc.get("ingest_skipped", 0),
    )
    for name, depth in _COUNTER_FIELDS.items():
        setattr(stats, name, _flatten(doc.get(name, {}), depth))
    return stats
