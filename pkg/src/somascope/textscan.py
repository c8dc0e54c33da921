"""Tokenization, body-part mention detection, and possession classification.

Everything here is a pure function over immutable lexicons, so instances can
be annotated concurrently without coordination.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lexicon import BodyPartLexicon, EmotionLexicon, VadLexicon

POSSESSION_PRONOUNS = {
    "my": "MY",
    "your": "YOUR",
    "his": "HIS",
    "her": "HER",
    "their": "THEIR",
}

POSSESSION_CLASSES = ("MY", "YOUR", "HIS", "HER", "THEIR")

_WS_CHUNK = re.compile(r"\S+")


@dataclass(frozen=True)
class Token:
    text: str
    start: int  # character offset into the original text
    end: int


@dataclass(frozen=True)
class BpmSpan:
    token_index: int
    surface: str
    canonical: str
    possession: str = "NONE"  # MY/YOUR/HIS/HER/THEIR/NONE


@dataclass(frozen=True)
class InstanceAnnotation:
    instance_id: str
    spans: tuple[BpmSpan, ...]
    has_bpm: bool
    possession_flags: frozenset[str]
    emotion_hits: frozenset[str]
    vad_hits: frozenset[str]
    token_count: int
    char_count: int
    tokens: tuple[Token, ...] = field(repr=False, default=())


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, strip outer punctuation, lowercase.

    Intra-token apostrophes and hyphens survive ("don't", "well-being");
    hashtag/mention sigils are stripped so "#sore" matches "sore". Tokens
    that strip to nothing are dropped.
    """
    tokens = []
    for m in _WS_CHUNK.finditer(text):
        start, end = m.start(), m.end()
        # Outside-in strip: remove non-alphanumerics from both ends only.
        while start < end and not text[start].isalnum():
            start += 1
        while end > start and not text[end - 1].isalnum():
            end -= 1
        if start >= end:
            continue
        tokens.append(Token(text=text[start:end].lower(), start=start, end=end))
    return tokens


def detect_bpms(tokens: list[Token], lex: BodyPartLexicon) -> list[BpmSpan]:
    """One span per token whose text is in the lexicon, in token order.

    Possession is left as NONE; classify_possession fills it in.
    """
    return [
        BpmSpan(token_index=i, surface=tok.text, canonical=lex.canonical_of[tok.text])
        for i, tok in enumerate(tokens)
        if tok.text in lex.terms
    ]


def classify_possession(tokens: list[Token], spans: list[BpmSpan]) -> list[BpmSpan]:
    """Set possession when the immediately preceding token is a possessive pronoun."""
    out = []
    for span in spans:
        possession = "NONE"
        if span.token_index > 0:
            prev = tokens[span.token_index - 1].text
            possession = POSSESSION_PRONOUNS.get(prev, "NONE")
        out.append(
            BpmSpan(
                token_index=span.token_index,
                surface=span.surface,
                canonical=span.canonical,
                possession=possession,
            )
        )
    return out


def annotate_instance(
    instance_id: str,
    text: str,
    bp_lex: BodyPartLexicon,
    emo_lex: EmotionLexicon | None = None,
    vad_lex: VadLexicon | None = None,
) -> InstanceAnnotation:
    """Full per-instance annotation.

    Emotion and VAD hits are computed over all tokens of the instance, not
    only the matched body-part tokens.
    """
    tokens = tokenize(text)
    spans = classify_possession(tokens, detect_bpms(tokens, bp_lex))
    emotion_hits: set[str] = set()
    vad_hits: set[str] = set()
    for tok in tokens:
        if emo_lex is not None:
            emotion_hits |= emo_lex.emotions_of(tok.text)
        if vad_lex is not None:
            vad_hits |= vad_lex.poles_of(tok.text)
    return InstanceAnnotation(
        instance_id=instance_id,
        spans=tuple(spans),
        has_bpm=bool(spans),
        possession_flags=frozenset(s.possession for s in spans if s.possession != "NONE"),
        emotion_hits=frozenset(emotion_hits),
        vad_hits=frozenset(vad_hits),
        token_count=len(tokens),
        char_count=len(text),
        tokens=tuple(tokens),
    )
