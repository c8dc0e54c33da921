"""Term resources: body-part word list, categorical emotion lexicon, VAD lexicon.

All three loaders return immutable lookup structures that are safe to share
across threads.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError, ParseError

log = logging.getLogger(__name__)

EMOTIONS = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

VAD_DIMS = ("valence", "arousal", "dominance")

# High/Low pole labels for the three VAD dimensions, in stable output order.
VAD_POLES = (
    "high_valence",
    "low_valence",
    "high_arousal",
    "low_arousal",
    "high_dominance",
    "low_dominance",
)

# 8 categorical emotions + 6 VAD poles: every per-class profile covers these.
ALL_DIMS = EMOTIONS + VAD_POLES


def data_dir() -> Path:
    """Directory holding bundled data tables; SOMASCOPE_DATA_DIR overrides."""
    override = os.environ.get("SOMASCOPE_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise ConfigurationError(f"file not found: {path}") from e
    return text.splitlines()


def load_irregular_plurals(path=None) -> dict[str, str]:
    """Bundled plural -> singular pair table."""
    if path is None:
        path = data_dir() / "irregular_plurals.tsv"
    pairs = {}
    for i, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"expected 2 tab-separated columns, got {len(cols)}", line=i)
        pairs[cols[0].strip().lower()] = cols[1].strip().lower()
    return pairs


def load_stopwords(path=None) -> frozenset[str]:
    if path is None:
        path = data_dir() / "stopwords.txt"
    return frozenset(
        w.strip().lower() for w in _read_lines(path) if w.strip() and not w.startswith("#")
    )


def load_abbreviations(path=None) -> frozenset[str]:
    """Sentence-splitter abbreviation list (terms stored with their final dot)."""
    if path is None:
        path = data_dir() / "abbreviations.txt"
    return frozenset(
        w.strip().lower() for w in _read_lines(path) if w.strip() and not w.startswith("#")
    )


@dataclass(frozen=True)
class BodyPartLexicon:
    """The authoritative set of body-part surface forms.

    ``canonical_of`` maps every surface form to its canonical singular;
    canonical forms map to themselves. Plural surface forms are linked to
    their singulars only when both appear in the source file: the file is
    treated as exhaustive and no forms are ever generated.
    """

    terms: frozenset[str]
    canonical_of: dict[str, str] = field(hash=False)

    def __contains__(self, term: str) -> bool:
        return term in self.terms

    def canonical(self, term: str) -> str:
        return self.canonical_of[term]

    def canonicals(self) -> frozenset[str]:
        return frozenset(self.canonical_of.values())


def _link_plurals(terms: frozenset[str], irregular: dict[str, str]) -> dict[str, str]:
    canonical_of = {t: t for t in terms}
    for t in terms:
        if t in irregular and irregular[t] in terms:
            canonical_of[t] = irregular[t]
            continue
        # Regular "+s" / "+es" pairs, only when the singular is itself listed.
        if t.endswith("es") and t[:-2] in terms:
            canonical_of[t] = t[:-2]
        elif t.endswith("s") and t[:-1] in terms:
            canonical_of[t] = t[:-1]
    return canonical_of


def load_bp_terms(path, irregular_plurals: dict[str, str] | None = None) -> BodyPartLexicon:
    """Load the body-part term list: UTF-8, one lowercase term per line.

    Lines starting with ``#`` are comments. Duplicates are dropped with a
    warning; an empty term set is a configuration error.
    """
    if irregular_plurals is None:
        irregular_plurals = load_irregular_plurals()
    seen = set()
    for i, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        term = line.lower()
        if term in seen:
            log.warning("%s: duplicate term %r at line %d, ignored", path, term, i)
            continue
        seen.add(term)
    if not seen:
        raise ConfigurationError(f"body-part term list is empty: {path}")
    terms = frozenset(seen)
    return BodyPartLexicon(terms=terms, canonical_of=_link_plurals(terms, irregular_plurals))


def dump_bp_terms(lex: BodyPartLexicon, path) -> None:
    """Serialize a BodyPartLexicon back to its one-term-per-line format."""
    Path(path).write_text("".join(t + "\n" for t in sorted(lex.terms)), encoding="utf-8")


@dataclass(frozen=True)
class EmotionLexicon:
    """word -> subset of the 8 categorical emotions."""

    assoc: dict[str, frozenset[str]] = field(hash=False)

    def emotions_of(self, word: str) -> frozenset[str]:
        return self.assoc.get(word, frozenset())

    def __contains__(self, word: str) -> bool:
        return word in self.assoc


def load_emotion_lexicon(path) -> EmotionLexicon:
    """Load TSV rows ``word<TAB>emotion<TAB>flag`` with flag in {0,1}."""
    assoc: dict[str, set[str]] = {}
    valid = set(EMOTIONS)
    for i, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", line=i)
        word, emotion, flag = cols[0].strip().lower(), cols[1].strip().lower(), cols[2].strip()
        if emotion not in valid:
            raise ParseError(f"unknown emotion label {emotion!r}", line=i)
        if flag not in ("0", "1"):
            raise ParseError(f"flag must be 0 or 1, got {flag!r}", line=i)
        assoc.setdefault(word, set())
        if flag == "1":
            assoc[word].add(emotion)
    return EmotionLexicon(assoc={w: frozenset(s) for w, s in assoc.items()})


@dataclass(frozen=True)
class VadLexicon:
    """word -> (valence, arousal, dominance) in [0,1], with high/low binarization.

    ``binarize`` is boundary-inclusive: score >= hi is High, score <= lo is Low.
    """

    scores: dict[str, tuple[float, float, float]] = field(hash=False)
    hi_threshold: float = 0.67
    lo_threshold: float = 0.33

    def __contains__(self, word: str) -> bool:
        return word in self.scores

    def binarize(self, word: str, dim: str) -> str | None:
        """Return 'high', 'low', 'neutral', or None if the word is absent."""
        if word not in self.scores:
            return None
        score = self.scores[word][VAD_DIMS.index(dim)]
        if score >= self.hi_threshold:
            return "high"
        if score <= self.lo_threshold:
            return "low"
        return "neutral"

    def poles_of(self, word: str) -> frozenset[str]:
        """High/Low pole labels the word activates, e.g. {'low_valence'}."""
        if word not in self.scores:
            return frozenset()
        hits = []
        for dim in VAD_DIMS:
            b = self.binarize(word, dim)
            if b in ("high", "low"):
                hits.append(f"{b}_{dim}")
        return frozenset(hits)


def load_vad_lexicon(path, hi: float = 0.67, lo: float = 0.33) -> VadLexicon:
    """Load TSV rows ``word<TAB>v<TAB>a<TAB>d``, all values in [0,1]."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigurationError(f"need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}")
    scores = {}
    for i, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ParseError(f"expected 4 tab-separated columns, got {len(cols)}", line=i)
        word = cols[0].strip().lower()
        try:
            vals = tuple(float(c) for c in cols[1:])
        except ValueError as e:
            raise ParseError(f"non-numeric score: {e}", line=i) from e
        for v in vals:
            if not 0.0 <= v <= 1.0:
                raise ParseError(f"score {v} outside [0,1]", line=i)
        scores[word] = vals
    return VadLexicon(scores=scores, hi_threshold=hi, lo_threshold=lo)
