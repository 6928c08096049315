"""Dataset and feature files.

Dataset file (UTF-8, one JSON object per line, one line per resource)::

    {"query_id": "q00001", "query_text": "...", "url": "...", "title": "...",
     "snippet": "...", "source_rank": 3, "label": 1, "is_ideal": false,
     "is_known_bad": false, "id": null}

Lines of one query are contiguous and keep the list order. ``label`` may be
null for unjudged lists.

Feature file (LETOR convention, documents in presentation order)::

    # schema: s_read s_edu s_bad mixer
    2 qid:q00001 1:3.5 2:0.9 3:0.1 4:12.3 cost:0.1 # https://example.org/a

Values are written with ``repr`` so a read returns the exact floats written.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DataError, MissingFeatures, ParseError, RedorankError
from ..model import FeatureTable, JudgedList, LtrRow, Resource

_FIELDS = ("query_id", "query_text", "url", "title", "snippet", "source_rank", "label", "is_ideal", "is_known_bad", "id")
SCHEMA_PREFIX = "# schema:"


def _resource_line(judged: JudgedList, r: Resource) -> str:
    rec = {
        "query_id": judged.query_id,
        "query_text": judged.query_text,
        "url": r.url,
        "title": r.title,
        "snippet": r.snippet,
        "source_rank": r.source_rank,
        "label": r.label,
        "is_ideal": r.is_ideal,
        "is_known_bad": r.is_known_bad,
        "id": r.id,
    }
    return json.dumps(rec, ensure_ascii=False, sort_keys=True)


def dumps_dataset(lists: Iterable[JudgedList]) -> str:
    lines = []
    for judged in lists:
        if not judged.resources:
            raise DataError(f"{judged.query_id}: cannot write a list without resources")
        lines.extend(_resource_line(judged, r) for r in judged.resources)
    return "".join(line + "\n" for line in lines)


def write_dataset(lists: Iterable[JudgedList], path: str | Path) -> None:
    Path(path).write_text(dumps_dataset(lists), encoding="utf-8")


def loads_dataset(text: str) -> list[JudgedList]:
    groups: list[tuple[str, str, list[Resource]]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(rec, dict):
            raise ParseError("record is not an object", lineno)
        missing = [f for f in _FIELDS if f not in rec and f != "id"]
        if missing:
            raise ParseError(f"missing fields {missing}", lineno)
        label = rec["label"]
        if label is not None and (isinstance(label, bool) or label not in (0, 1, 2)):
            raise ParseError(f"label {label!r} outside {{0, 1, 2}}", lineno)
        if isinstance(rec["source_rank"], bool) or not isinstance(rec["source_rank"], int):
            raise ParseError(f"source_rank {rec['source_rank']!r} is not an integer", lineno)
        try:
            res = Resource(
                url=str(rec["url"]),
                title=str(rec["title"]),
                snippet=str(rec["snippet"]),
                source_rank=rec["source_rank"],
                label=label,
                is_known_bad=bool(rec["is_known_bad"]),
                is_ideal=bool(rec["is_ideal"]),
                id=rec.get("id"),
            )
        except RedorankError as exc:
            raise ParseError(str(exc), lineno) from exc
        qid = str(rec["query_id"])
        if groups and groups[-1][0] == qid:
            groups[-1][2].append(res)
            continue
        if qid in seen:
            raise ParseError(f"query {qid} appears in two separate groups", lineno)
        seen.add(qid)
        groups.append((qid, str(rec["query_text"]), [res]))
    return [JudgedList(qid, text_, tuple(res)) for qid, text_, res in groups]


def read_dataset(path: str | Path) -> list[JudgedList]:
    return loads_dataset(Path(path).read_text(encoding="utf-8"))


def _fmt(value: float) -> str:
    return repr(float(value))


def dumps_features(rows: Sequence[LtrRow], schema: Sequence[str]) -> str:
    schema = tuple(schema)
    if not schema or any(not s or any(ch.isspace() for ch in s) for s in schema):
        raise DataError(f"feature names must be non-empty and without whitespace: {schema}")
    out = [f"{SCHEMA_PREFIX} {' '.join(schema)}\n"]
    for row in rows:
        if len(row.features) != len(schema):
            raise MissingFeatures(
                f"row {row.doc_id} has {len(row.features)} features, schema declares {len(schema)}"
            )
        if any(ch.isspace() for ch in row.query_id) or not row.query_id:
            raise DataError(f"query id {row.query_id!r} must be non-empty and without whitespace")
        if not row.doc_id or row.doc_id != row.doc_id.strip() or len(row.doc_id.splitlines()) != 1:
            raise DataError(f"doc id {row.doc_id!r} must be one line without surrounding whitespace")
        feats = " ".join(f"{i}:{_fmt(v)}" for i, v in enumerate(row.features, 1))
        out.append(f"{row.label} qid:{row.query_id} {feats} cost:{_fmt(row.cost)} # {row.doc_id}\n")
    return "".join(out)


def write_features(rows: Sequence[LtrRow] | FeatureTable, path: str | Path, schema: Sequence[str] | None = None) -> None:
    if isinstance(rows, FeatureTable):
        schema, rows = rows.schema, rows.rows
    if schema is None:
        raise DataError("write_features needs a schema")
    Path(path).write_text(dumps_features(rows, schema), encoding="utf-8")


def loads_features(text: str) -> FeatureTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(SCHEMA_PREFIX):
        raise ParseError(f"first line must declare '{SCHEMA_PREFIX} <names...>'", 1)
    schema = tuple(lines[0][len(SCHEMA_PREFIX) :].split())
    if not schema:
        raise ParseError("empty feature schema", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        body, sep, doc_id = line.partition(" # ")
        if not sep or not doc_id:
            raise ParseError("missing '# <doc_id>' trailer", lineno)
        tokens = body.split()
        if len(tokens) != len(schema) + 3:
            raise ParseError(f"expected {len(schema)} features plus label, qid and cost", lineno)
        try:
            label = int(tokens[0])
        except ValueError as exc:
            raise ParseError(f"bad label {tokens[0]!r}", lineno) from exc
        if label not in (0, 1, 2):
            raise ParseError(f"label {label} outside {{0, 1, 2}}", lineno)
        if not tokens[1].startswith("qid:") or len(tokens[1]) == 4:
            raise ParseError(f"expected qid:<id>, got {tokens[1]!r}", lineno)
        feats = []
        for i, tok in enumerate(tokens[2:-1], 1):
            key, _, val = tok.partition(":")
            if key != str(i):
                raise ParseError(f"expected feature {i}, got {tok!r}", lineno)
            try:
                feats.append(float(val))
            except ValueError as exc:
                raise ParseError(f"bad value in {tok!r}", lineno) from exc
        key, _, val = tokens[-1].partition(":")
        if key != "cost":
            raise ParseError(f"expected cost:<c>, got {tokens[-1]!r}", lineno)
        try:
            rows.append(LtrRow(tokens[1][4:], doc_id, label, tuple(feats), float(val)))
        except (ValueError, RedorankError) as exc:
            raise ParseError(str(exc), lineno) from exc
    return FeatureTable(schema, rows)


def read_features(path: str | Path) -> FeatureTable:
    return loads_features(Path(path).read_text(encoding="utf-8"))
