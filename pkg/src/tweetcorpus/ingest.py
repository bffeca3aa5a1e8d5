"""Streaming archive ingestion: parse line-delimited JSON and dedup.

A tweet is dropped when either its id or the FNV-1a hash of its
whitespace-collapsed, lowercased text was already seen; the first
occurrence always wins. State grows with the number of unique tweets
only, never with archive size.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator

from .errors import InvalidEncoding, MalformedRecord
from .hashing import fnv1a64_text

_MAX_ID = 2**64 - 1
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class RawTweet:
    id: int
    text: str
    created_at: int = 0  # unix seconds, UTC
    declared_lang: str | None = None


@dataclass
class DedupState:
    seen_ids: set[int] = field(default_factory=set)
    seen_text_hashes: set[int] = field(default_factory=set)


@dataclass
class IngestStats:
    read: int = 0
    malformed: int = 0
    duplicates_id: int = 0
    duplicates_text: int = 0
    emitted: int = 0

    def as_dict(self) -> dict:
        return {
            "read": self.read,
            "malformed": self.malformed,
            "duplicates_id": self.duplicates_id,
            "duplicates_text": self.duplicates_text,
            "emitted": self.emitted,
        }


def _parse_timestamp(value: str) -> int:
    # RFC 3339; Python 3.10's fromisoformat rejects the Z suffix
    try:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise MalformedRecord(f"bad created_at: {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def parse_record(line: str | bytes) -> RawTweet:
    """Parse one archive line into a RawTweet.

    Required fields: id (integer or decimal string), text (non-empty
    string). Optional: created_at (RFC 3339, defaults to epoch 0) and
    lang (ISO 639-1 code).
    """
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidEncoding(str(exc)) from exc
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
        raise MalformedRecord("record must be an object with id and text")

    raw_id = obj["id"]
    if isinstance(raw_id, str) and raw_id.isdigit():
        raw_id = int(raw_id)
    if not isinstance(raw_id, int) or isinstance(raw_id, bool) or not 0 <= raw_id <= _MAX_ID:
        raise MalformedRecord(f"id must be an unsigned 64-bit integer, got {obj['id']!r}")

    text = obj["text"]
    if not isinstance(text, str) or not text:
        raise MalformedRecord("text must be a non-empty string")

    created_at = 0
    if obj.get("created_at") is not None:
        if not isinstance(obj["created_at"], str):
            raise MalformedRecord("created_at must be an RFC 3339 string")
        created_at = _parse_timestamp(obj["created_at"])

    lang = obj.get("lang")
    if lang is not None and not isinstance(lang, str):
        raise MalformedRecord("lang must be a string")

    return RawTweet(id=raw_id, text=text, created_at=created_at, declared_lang=lang)


def serialize_record(tweet: RawTweet) -> str:
    """Inverse of parse_record: parse_record(serialize_record(t)) == t."""
    obj: dict = {"id": tweet.id, "text": tweet.text}
    if tweet.created_at:
        dt = datetime.fromtimestamp(tweet.created_at, tz=timezone.utc)
        obj["created_at"] = dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    if tweet.declared_lang is not None:
        obj["lang"] = tweet.declared_lang
    return json.dumps(obj, ensure_ascii=False)


def text_dedup_key(text: str) -> int:
    return fnv1a64_text(_WS_RE.sub(" ", text).strip().lower())


def dedup(
    tweets: Iterable[RawTweet],
    state: DedupState | None = None,
    stats: IngestStats | None = None,
) -> Iterator[RawTweet]:
    """Drop id and near-verbatim text duplicates, keeping first occurrences."""
    state = state if state is not None else DedupState()
    for tweet in tweets:
        if tweet.id in state.seen_ids:
            if stats:
                stats.duplicates_id += 1
            continue
        key = text_dedup_key(tweet.text)
        if key in state.seen_text_hashes:
            if stats:
                stats.duplicates_text += 1
            continue
        state.seen_ids.add(tweet.id)
        state.seen_text_hashes.add(key)
        if stats:
            stats.emitted += 1
        yield tweet


def read_archive(path, stats: IngestStats | None = None) -> Iterator[RawTweet]:
    """Stream an archive file, counting malformed and undecodable lines."""
    with open(path, "rb") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            if stats:
                stats.read += 1
            try:
                yield parse_record(raw)
            except (MalformedRecord, InvalidEncoding):
                if stats:
                    stats.malformed += 1
