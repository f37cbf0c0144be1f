"""Corpus ingestion, text normalization, and gazetteer-based geocoding.

Corpus files are CSV/TSV with columns id,text,timestamp[,location][,lat,lon]
or JSONL with the same keys. Row numbers in errors are 1-based over data rows.
"""

from __future__ import annotations

import csv
import json
import string
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    ConflictError,
    DomainError,
    FormatError,
    RowError,
    SchemaError,
    UnknownKeyError,
)
from .geotime import GeoPoint
from .stopwords import DEFAULT_STOPWORDS, load_stopwords  # noqa: F401  (re-export)

CORPUS_FORMATS = ("csv", "tsv", "jsonl")
_URL_PREFIXES = ("http://", "https://", "www.")
_EDGE_PUNCT = string.punctuation


@dataclass(frozen=True)
class Record:
    """One text item with its timestamp and optional geospatial context."""

    id: str
    text: str
    timestamp: int
    location: str | None = None
    coords: GeoPoint | None = None

    def __post_init__(self):
        if not self.id:
            raise DomainError("record id must be nonempty")
        if self.timestamp < 0:
            raise DomainError(f"record {self.id!r}: timestamp {self.timestamp} is negative")


@dataclass(frozen=True)
class CleanDoc:
    """Normalized lowercase token stream for one record."""

    id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Gazetteer:
    """Case-insensitive lookup table from location strings to coordinates."""

    entries: dict[str, GeoPoint]

    @staticmethod
    def normalize(location: str) -> str:
        return location.strip().casefold()


def preprocess(
    text: str,
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
    *,
    drop_social_tags: bool = False,
) -> list[str]:
    """Normalize raw text into tokens.

    Splits on whitespace, lowercases, strips punctuation from token edges,
    and drops URL tokens and stopwords. Mention/hashtag tokens pass through
    the same edge rules by default; drop_social_tags removes them outright.
    """
    tokens = []
    for raw in text.split():
        token = raw.lower()
        if drop_social_tags and token[:1] in ("@", "#"):
            continue
        token = token.strip(_EDGE_PUNCT)
        if not token or token.startswith(_URL_PREFIXES):
            continue
        if token in stopwords:
            continue
        tokens.append(token)
    return tokens


def clean_corpus(
    records: Sequence[Record],
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
    *,
    drop_social_tags: bool = False,
) -> list[CleanDoc]:
    """Apply preprocess() to every record, preserving order."""
    return [
        CleanDoc(id=r.id, tokens=tuple(preprocess(r.text, stopwords, drop_social_tags=drop_social_tags)))
        for r in records
    ]


def geocode(location: str, gazetteer: Gazetteer) -> GeoPoint:
    """Resolve a location string by exact case-insensitive gazetteer lookup."""
    point = gazetteer.entries.get(Gazetteer.normalize(location))
    if point is None:
        raise UnknownKeyError(location, f"location {location!r} not in gazetteer")
    return point


def resolve_coordinates(records: Sequence[Record], gazetteer: Gazetteer) -> list[Record]:
    """Fill in coords for records that only carry a location string.

    Records that already have coordinates are kept as-is; records with
    neither location nor coords pass through unchanged.
    """
    resolved = []
    for record in records:
        if record.coords is None and record.location is not None:
            record = replace(record, coords=geocode(record.location, gazetteer))
        resolved.append(record)
    return resolved


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Read a gazetteer CSV with columns location,lat,lon."""
    entries: dict[str, GeoPoint] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for column in ("location", "lat", "lon"):
            if column not in fields:
                raise SchemaError(f"{path}: missing column {column!r}")
        for rownum, row in enumerate(reader, start=1):
            key = Gazetteer.normalize(row["location"] or "")
            if not key:
                raise RowError(rownum, "empty location")
            if key in entries:
                raise ConflictError(f"duplicate gazetteer entry {key!r}")
            try:
                entries[key] = GeoPoint(float(row["lat"]), float(row["lon"]))
            except (TypeError, ValueError, DomainError) as exc:
                raise RowError(rownum, f"bad coordinates for {key!r}: {exc}") from None
    return Gazetteer(entries=entries)


def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower().lstrip(".")
    if suffix in CORPUS_FORMATS:
        return suffix
    raise FormatError(f"cannot infer corpus format from {path.name!r}; pass format explicitly")


def _coords_from_fields(lat: str | None, lon: str | None) -> GeoPoint | None:
    has_lat = lat is not None and lat != ""
    has_lon = lon is not None and lon != ""
    if not has_lat and not has_lon:
        return None
    if has_lat != has_lon:
        raise ValueError("lat and lon must be given together")
    return GeoPoint(float(lat), float(lon))


def load_corpus(path: str | Path, format: str | None = None) -> list[Record]:
    """Read records from a corpus file, preserving file order.

    Duplicate ids and malformed rows are rejected; row errors carry the
    1-based data-row number.
    """
    path = Path(path)
    fmt = format or _infer_format(path)
    if fmt not in CORPUS_FORMATS:
        raise FormatError(f"unknown corpus format {fmt!r}; expected one of {CORPUS_FORMATS}")
    if fmt == "jsonl":
        records = list(_read_jsonl(path))
    else:
        records = list(_read_delimited(path, delimiter="\t" if fmt == "tsv" else ","))
    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            raise ConflictError(f"duplicate record id {record.id!r}")
        seen.add(record.id)
    return records


def _read_delimited(path: Path, delimiter: str) -> Iterable[Record]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        fields = reader.fieldnames or []
        for column in ("id", "text", "timestamp"):
            if column not in fields:
                raise SchemaError(f"{path}: missing column {column!r}")
        for rownum, row in enumerate(reader, start=1):
            yield _record_from_mapping(row, rownum)


def _read_jsonl(path: Path) -> Iterable[Record]:
    with open(path, encoding="utf-8") as fh:
        rownum = 0
        for line in fh:
            if not line.strip():
                continue
            rownum += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RowError(rownum, f"invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise RowError(rownum, "expected a JSON object")
            for key in ("id", "text", "timestamp"):
                if key not in obj:
                    raise SchemaError(f"{path}: row {rownum}: missing key {key!r}")
            mapping = {k: obj.get(k) for k in ("id", "text", "timestamp", "location", "lat", "lon")}
            yield _record_from_mapping(
                {k: v if v is None else str(v) for k, v in mapping.items()}, rownum
            )


def _record_from_mapping(row: dict, rownum: int) -> Record:
    rid = row.get("id") or ""
    text = row.get("text")
    if text is None:
        raise RowError(rownum, "missing text value")
    try:
        timestamp = int(str(row.get("timestamp")))
    except (TypeError, ValueError):
        raise RowError(rownum, f"timestamp {row.get('timestamp')!r} is not an integer") from None
    try:
        coords = _coords_from_fields(row.get("lat"), row.get("lon"))
        return Record(
            id=rid,
            text=text,
            timestamp=timestamp,
            location=(row.get("location") or None),
            coords=coords,
        )
    except (ValueError, DomainError) as exc:
        raise RowError(rownum, str(exc)) from None


def save_corpus(records: Sequence[Record], path: str | Path, format: str | None = None) -> None:
    """Write records so that load_corpus() round-trips them exactly."""
    path = Path(path)
    fmt = format or _infer_format(path)
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                obj: dict = {"id": r.id, "text": r.text, "timestamp": r.timestamp}
                if r.location is not None:
                    obj["location"] = r.location
                if r.coords is not None:
                    obj["lat"] = r.coords.lat
                    obj["lon"] = r.coords.lon
                fh.write(json.dumps(obj) + "\n")
        return
    delimiter = "\t" if fmt == "tsv" else ","
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["id", "text", "timestamp", "location", "lat", "lon"])
        for r in records:
            writer.writerow(
                [
                    r.id,
                    r.text,
                    r.timestamp,
                    r.location or "",
                    repr(r.coords.lat) if r.coords else "",
                    repr(r.coords.lon) if r.coords else "",
                ]
            )
