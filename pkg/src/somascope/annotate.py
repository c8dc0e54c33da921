"""Crowd emotion-rating aggregation and split-half reliability.

Ratings are ordinal 0-4 (no / slight / moderate / high / very high) per
(item, annotator, emotion). Reliability is the average proportion of items
whose two random rater halves land in the same equal-width bin of the mean
rating, over many random splits.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParseError

log = logging.getLogger(__name__)

RATING_EMOTIONS = ("joy", "fear", "sadness", "anger", "disgust", "trust")
RATING_MAX = 4


@dataclass(frozen=True)
class RatingRecord:
    item_id: str
    annotator_id: str
    emotion: str
    rating: int


@dataclass(frozen=True)
class AggregatedLabel:
    item_id: str
    emotion: str
    mean_rating: float
    present: bool
    n_raters: int


def load_ratings_csv(path) -> list[RatingRecord]:
    """CSV with header item_id,annotator_id,emotion,rating."""
    records = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"item_id", "annotator_id", "emotion", "rating"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ParseError(f"ratings CSV must have columns {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            emotion = row["emotion"].strip().lower()
            if emotion not in RATING_EMOTIONS:
                raise ParseError(f"unknown emotion {emotion!r}", line=i)
            try:
                rating = int(row["rating"])
            except ValueError as e:
                raise ParseError(f"rating must be an integer 0-4: {row['rating']!r}", line=i) from e
            if not 0 <= rating <= RATING_MAX:
                raise ParseError(f"rating {rating} outside 0-4", line=i)
            records.append(
                RatingRecord(
                    item_id=row["item_id"].strip(),
                    annotator_id=row["annotator_id"].strip(),
                    emotion=emotion,
                    rating=rating,
                )
            )
    return records


def _grouped(records) -> dict[tuple[str, str], list[int]]:
    """Ratings per (item, emotion), rejecting duplicate triples."""
    seen = set()
    groups: dict[tuple[str, str], list[int]] = defaultdict(list)
    for rec in records:
        triple = (rec.item_id, rec.annotator_id, rec.emotion)
        if triple in seen:
            raise DataError(f"duplicate rating for {triple}")
        seen.add(triple)
        groups[(rec.item_id, rec.emotion)].append(rec.rating)
    return groups


def aggregate(records, presence_threshold: float = 1.5) -> list[AggregatedLabel]:
    """Mean rating per (item, emotion); present iff mean >= threshold."""
    labels = []
    for (item, emotion), ratings in sorted(_grouped(records).items()):
        mean = sum(ratings) / len(ratings)
        labels.append(
            AggregatedLabel(
                item_id=item,
                emotion=emotion,
                mean_rating=mean,
                present=mean >= presence_threshold,
                n_raters=len(ratings),
            )
        )
    return labels


def bin_of(mean_rating: float, n_bins: int) -> int:
    """Equal-width bin index over [0, RATING_MAX], top edge right-inclusive."""
    width = RATING_MAX / n_bins
    return min(int(mean_rating / width), n_bins - 1)


def shcmp(records, n_bins: int, n_trials: int = 1000, seed: int = 0) -> float:
    """Split-half class match percentage.

    Per trial, each (item, emotion)'s raters are randomly split into two
    halves (the surplus rater of an odd count goes to a uniformly chosen
    half); each half's mean rating is binned into n_bins equal-width bins
    and the item matches when both halves share a bin. The result is the
    mean match rate over trials, as a percentage. Deterministic per seed:
    each trial uses an RNG stream derived from (seed, trial).
    """
    if n_bins < 2:
        raise DataError(f"n_bins must be >= 2, got {n_bins}")
    if n_trials < 1:
        raise DataError(f"n_trials must be >= 1, got {n_trials}")
    eligible = []
    excluded = 0
    for key, ratings in sorted(_grouped(records).items()):
        if len(ratings) >= 2:
            eligible.append(np.asarray(ratings, dtype=float))
        else:
            excluded += 1
    if excluded:
        log.info("shcmp: %d (item, emotion) pairs with < 2 raters excluded", excluded)
    if not eligible:
        raise DataError("no (item, emotion) pairs with >= 2 raters")

    trial_scores = np.empty(n_trials)
    for trial in range(n_trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        matches = 0
        for ratings in eligible:
            perm = rng.permutation(len(ratings))
            k = len(ratings) // 2
            if len(ratings) % 2 == 1 and rng.random() < 0.5:
                k += 1  # surplus rater joins the first half
            first, second = ratings[perm[:k]], ratings[perm[k:]]
            if bin_of(first.mean(), n_bins) == bin_of(second.mean(), n_bins):
                matches += 1
        trial_scores[trial] = matches / len(eligible)
    return float(trial_scores.mean() * 100.0)
