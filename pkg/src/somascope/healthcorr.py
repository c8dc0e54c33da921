"""City-level health-outcome correlations against corpus-derived features."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

from .corpus import CorpusStats
from .errors import DataError, ParseError
from .inference import spearman
from .lexicon import ALL_DIMS

log = logging.getLogger(__name__)

BASE_FEATURES = ("tweet_count", "bpm_share", "my_bpm_share")

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class HealthRecord:
    city: str
    metric: str
    value: float


@dataclass(frozen=True)
class CorrelationRow:
    feature: str
    metric: str
    n: int
    rho: float
    p: float
    significant: bool


def normalize_city(name: str) -> str:
    return name.strip().casefold()


def load_health_csv(path) -> list[HealthRecord]:
    """CSV with header city,metric,value; (city, metric) pairs must be unique."""
    records = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"city", "metric", "value"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ParseError(f"health CSV must have columns {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            city = normalize_city(row["city"])
            metric = row["metric"].strip()
            if (city, metric) in seen:
                raise DataError(f"duplicate health record for ({city!r}, {metric!r})")
            seen.add((city, metric))
            try:
                value = float(row["value"])
            except ValueError as e:
                raise ParseError(f"unparseable value {row['value']!r}", line=i) from e
            records.append(HealthRecord(city=city, metric=metric, value=value))
    return records


def default_features() -> list[str]:
    return list(BASE_FEATURES) + [f"emotion_share({d})" for d in ALL_DIMS]


def city_feature_values(stats: CorpusStats, feature: str) -> dict[str, float]:
    """Per-city value of one corpus feature, keyed by normalized city name."""
    cities = sorted({key for (kind, key, _cls) in stats.per_group if kind == "city"})
    out = {}
    for city in cities:
        total = stats.group_totals[("city", city)]
        if total == 0:
            continue
        if feature == "tweet_count":
            value = float(total)
        elif feature == "bpm_share":
            value = stats.per_group.get(("city", city, "BPM"), 0) / total
        elif feature == "my_bpm_share":
            value = stats.per_group.get(("city", city, "MY"), 0) / total
        elif feature.startswith("emotion_share(") and feature.endswith(")"):
            dim = feature[len("emotion_share(") : -1]
            if dim not in ALL_DIMS:
                raise DataError(f"unknown emotion dimension {dim!r}")
            value = stats.emotion_by_city.get((city, dim), 0) / total
        else:
            raise DataError(f"unknown feature {feature!r}")
        out[normalize_city(city)] = value
    return out


def correlate(
    stats: CorpusStats, health: list[HealthRecord], features: list[str] | None = None
) -> list[CorrelationRow]:
    """Spearman correlation of each corpus feature against each health metric
    over the intersection of cities; cities missing on either side are
    dropped and logged."""
    if features is None:
        features = default_features()
    metrics = sorted({r.metric for r in health})
    if not metrics:
        raise DataError("health data is empty")
    by_metric: dict[str, dict[str, float]] = {m: {} for m in metrics}
    for r in health:
        by_metric[r.metric][r.city] = r.value

    rows = []
    for feature in features:
        fvals = city_feature_values(stats, feature)
        for metric in metrics:
            mvals = by_metric[metric]
            cities = sorted(set(fvals) & set(mvals))
            dropped = sorted((set(fvals) | set(mvals)) - set(cities))
            if dropped:
                log.info("correlate(%s, %s): dropped cities %s", feature, metric, dropped)
            if len(cities) < 3:
                raise DataError(
                    f"need >= 3 cities shared by corpus and health data for "
                    f"({feature}, {metric}), got {len(cities)}"
                )
            res = spearman([fvals[c] for c in cities], [mvals[c] for c in cities])
            rows.append(
                CorrelationRow(
                    feature=feature,
                    metric=metric,
                    n=res.n,
                    rho=res.rho,
                    p=res.p,
                    significant=res.p < SIGNIFICANCE_LEVEL,
                )
            )
    return rows
