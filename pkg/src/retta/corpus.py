"""Crowd-text corpus loading, filtering, and summary statistics.

The on-disk format is UTF-8 JSON Lines, one record per line:

    {"id": "t1", "text": "...", "source": "twitter",
     "ts": "2024-05-01T08:30:00Z", "lat": 51.05, "lon": -114.07,
     "tags": ["#yyc"], "meta": {"author": "@a"}}

``id``, ``text``, ``source``, and ``ts`` are required; unknown fields are
ignored.  ``tags`` is folded into ``meta["hashtags"]`` (space-joined) so a
document's hashtags travel with it for pooling.  Corpus values are treated
as immutable after load; filtering returns fresh documents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .errors import IntegrityError, ParseError, ValidationError

SOURCE_KINDS = ("twitter", "historical", "camera_log", "sensor_log", "manual")

_EARTH_RADIUS_KM = 6371.0088


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 instant into a UTC datetime at seconds precision."""
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError):
        raise ValidationError(f"bad timestamp {value!r}")
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _canon_hashtag(tag: str) -> str:
    return tag.lower().lstrip("#")


@dataclass
class RawDocument:
    """One crowd text record; the unit of ingestion."""

    id: str
    source_kind: str
    text: str
    timestamp: datetime
    geo: tuple[float, float] | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def validate(self):
        if not self.id:
            raise ValidationError("document id must be nonempty")
        if self.source_kind not in SOURCE_KINDS:
            raise ValidationError(f"unknown source kind {self.source_kind!r}")
        if not self.text.strip():
            raise ValidationError(f"document {self.id!r} has empty text")
        if self.geo is not None:
            lat, lon = self.geo
            if not (-90.0 <= lat <= 90.0):
                raise ValidationError(f"document {self.id!r}: latitude {lat} out of range")
            if not (-180.0 <= lon <= 180.0):
                raise ValidationError(f"document {self.id!r}: longitude {lon} out of range")

    @property
    def hashtags(self) -> list[str]:
        """Distinct canonical hashtags (lowercase, no '#'), first-seen order."""
        raw = self.meta.get("hashtags", "")
        seen = []
        for tag in raw.split():
            c = _canon_hashtag(tag)
            if c and c not in seen:
                seen.append(c)
        return seen

    @property
    def language(self) -> str:
        return self.meta.get("lang", "en")


@dataclass
class Corpus:
    """Ordered, duplicate-free collection of raw documents."""

    documents: list[RawDocument]

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise IntegrityError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def by_id(self, doc_id: str) -> RawDocument:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise IntegrityError(f"unknown document id {doc_id!r}")

    @property
    def source_counts(self) -> dict[str, int]:
        counts = {kind: 0 for kind in SOURCE_KINDS}
        for doc in self.documents:
            counts[doc.source_kind] += 1
        return counts


@dataclass
class ContextSpec:
    """Constraints characterizing what to retrieve for one data source."""

    keywords: list[str] = field(default_factory=list)
    hashtags: list[str] = field(default_factory=list)
    date_range: tuple[datetime, datetime] | None = None
    language: str = "en"
    max_documents: int = 1000
    geo_filter: tuple[float, float, float] | None = None  # lat, lon, radius km

    def validate(self):
        if self.max_documents < 1:
            raise ValidationError("max_documents must be >= 1")
        if self.date_range is not None:
            start, end = self.date_range
            if start > end:
                raise ValidationError("date_range start must not exceed end")
        if self.geo_filter is not None and self.geo_filter[2] <= 0:
            raise ValidationError("geo_filter radius must be positive")


def _parse_record(obj: dict) -> RawDocument:
    for key in ("id", "text", "source", "ts"):
        if key not in obj:
            raise ValidationError(f"missing required field {key!r}")
    meta = dict(obj.get("meta") or {})
    for k, v in meta.items():
        if not isinstance(k, str) or not isinstance(v, str):
            raise ValidationError("meta must map strings to strings")
    tags = obj.get("tags")
    if tags is not None:
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise ValidationError("tags must be a list of strings")
        meta["hashtags"] = " ".join(tags)
    geo = None
    if obj.get("lat") is not None or obj.get("lon") is not None:
        if obj.get("lat") is None or obj.get("lon") is None:
            raise ValidationError("lat and lon must be given together")
        geo = (float(obj["lat"]), float(obj["lon"]))
    doc = RawDocument(
        id=str(obj["id"]),
        source_kind=str(obj["source"]),
        text=str(obj["text"]),
        timestamp=parse_timestamp(str(obj["ts"])),
        geo=geo,
        meta=meta,
    )
    doc.validate()
    return doc


def load_jsonl(path) -> Corpus:
    """Load a corpus file, preserving line order.

    Raises :class:`ParseError` (with the 1-based line number) for a
    malformed line and :class:`IntegrityError` for a duplicate id.
    """
    documents = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno, path=str(path))
            if not isinstance(obj, dict):
                raise ParseError("record must be an object", line=lineno, path=str(path))
            try:
                doc = _parse_record(obj)
            except IntegrityError:
                raise
            except ValidationError as exc:
                raise ParseError(str(exc), line=lineno, path=str(path))
            if doc.id in seen:
                raise IntegrityError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)
            documents.append(doc)
    return Corpus(documents=documents)


def save_jsonl(corpus: Corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            rec = {
                "id": doc.id,
                "text": doc.text,
                "source": doc.source_kind,
                "ts": format_timestamp(doc.timestamp),
            }
            if doc.geo is not None:
                rec["lat"], rec["lon"] = doc.geo
            if doc.meta:
                rec["meta"] = doc.meta
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def _haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    lat1, lon1, lat2, lon2 = map(math.radians, (*a, *b))
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * _EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def _textual_match(doc: RawDocument, spec: ContextSpec) -> tuple[bool, str | None]:
    """Any keyword (case-insensitive substring of the raw text) or any
    hashtag counts; returns the first matching keyword for provenance."""
    if not spec.keywords and not spec.hashtags:
        return True, None
    text = doc.text.lower()
    matched_kw = next((kw for kw in spec.keywords if kw.lower() in text), None)
    if matched_kw is not None:
        return True, matched_kw
    doc_tags = set(doc.hashtags)
    if any(_canon_hashtag(tag) in doc_tags for tag in spec.hashtags):
        return True, None
    return False, None


def filter_by_context(corpus: Corpus, spec: ContextSpec) -> Corpus:
    """Keep documents matching every present constraint, sorted by
    (timestamp, id) and truncated to ``max_documents`` earliest.

    The matched keyword, when there is one, is recorded in the returned
    document's ``meta["query_term"]`` so query-term pooling can group by it.
    The input corpus is not modified.
    """
    spec.validate()
    kept = []
    for doc in corpus:
        ok, matched_kw = _textual_match(doc, spec)
        if not ok:
            continue
        if spec.date_range is not None:
            start, end = spec.date_range
            if not (start <= doc.timestamp <= end):
                continue
        if doc.language != spec.language:
            continue
        if spec.geo_filter is not None:
            lat, lon, radius = spec.geo_filter
            if doc.geo is None or _haversine_km(doc.geo, (lat, lon)) > radius:
                continue
        kept.append((doc, matched_kw))
    kept.sort(key=lambda pair: (pair[0].timestamp, pair[0].id))
    kept = kept[: spec.max_documents]
    out = []
    for doc, matched_kw in kept:
        if matched_kw is not None and doc.meta.get("query_term") != matched_kw.lower():
            doc = replace(doc, meta={**doc.meta, "query_term": matched_kw.lower()})
        out.append(doc)
    return Corpus(documents=out)


@dataclass
class CorpusStats:
    per_source: dict[str, int]
    min_timestamp: datetime | None
    max_timestamp: datetime | None
    distinct_hashtags: int

    @property
    def total(self) -> int:
        return sum(self.per_source.values())


def corpus_stats(corpus: Corpus) -> CorpusStats:
    timestamps = [doc.timestamp for doc in corpus]
    tags = {tag for doc in corpus for tag in doc.hashtags}
    return CorpusStats(
        per_source=corpus.source_counts,
        min_timestamp=min(timestamps) if timestamps else None,
        max_timestamp=max(timestamps) if timestamps else None,
        distinct_hashtags=len(tags),
    )


def time_bucket(ts: datetime, width_minutes: int) -> datetime:
    """Start of the fixed window containing ``ts``."""
    epoch = int(ts.timestamp())
    width = width_minutes * 60
    return datetime.fromtimestamp(epoch - epoch % width, tz=timezone.utc)


__all__ = [
    "SOURCE_KINDS",
    "RawDocument",
    "Corpus",
    "ContextSpec",
    "CorpusStats",
    "load_jsonl",
    "save_jsonl",
    "filter_by_context",
    "corpus_stats",
    "parse_timestamp",
    "format_timestamp",
    "time_bucket",
]
