"""Rule-based sentence splitting and document-file layout.

Document files feed the pretraining-instance generator: one sentence per
line, one empty line between documents, trailing newline at EOF.
"""

from __future__ import annotations

import importlib.resources
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .errors import EmptyText, MalformedLayout, SinkFailure

DEFAULT_TERMINATORS = frozenset({".", "!", "?", "…"})

_WS_RE = re.compile(r"\s+")


def load_abbreviations(path) -> frozenset[str]:
    """Read one lowercase abbreviation per line; '#' starts a comment."""
    if hasattr(path, "read_text"):
        content = path.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            content = fh.read()
    out = set()
    for line in content.splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            out.add(word if word.endswith(".") else word + ".")
    return frozenset(out)


def default_abbreviations() -> frozenset[str]:
    return load_abbreviations(importlib.resources.files("tweetcorpus.data") / "abbreviations.txt")


class SentenceSplitter:
    """Terminator-driven splitter with an abbreviation stoplist."""

    def __init__(self, abbreviations: frozenset[str] | None = None,
                 terminators: frozenset[str] = DEFAULT_TERMINATORS):
        if not terminators:
            raise ValueError("terminators must be non-empty")
        self.abbreviations = abbreviations if abbreviations is not None else default_abbreviations()
        self.terminators = frozenset(terminators)
        self._boundary_re = re.compile("[%s]+" % re.escape("".join(sorted(self.terminators))))

    def split(self, text: str) -> list[str]:
        return split_sentences(text, self)


def _starts_sentence(ch: str) -> bool:
    return ch.isupper() or ch.isdigit()


def split_sentences(text: str, splitter: SentenceSplitter | None = None) -> list[str]:
    """Split a tweet into sentences.

    A boundary sits after a terminator run that is followed by
    whitespace and an uppercase letter or digit (placeholder tokens are
    uppercase, so they qualify), unless the token holding a lone "." is
    a known abbreviation. Whitespace runs are collapsed to single
    spaces first, so no sentence ever contains a newline.
    """
    text = _WS_RE.sub(" ", text).strip()
    if not text:
        raise EmptyText("cannot split empty text")
    splitter = splitter or _default_splitter()
    sentences = []
    start = 0
    for m in splitter._boundary_re.finditer(text):
        end = m.end()
        if end >= len(text):
            break
        # collapsed text never ends in a space, so end+1 is in range
        if text[end] != " " or not _starts_sentence(text[end + 1]):
            continue
        if m.group() == ".":
            token_start = text.rfind(" ", 0, m.start()) + 1
            if text[token_start:end].lower() in splitter.abbreviations:
                continue
        sentences.append(text[start:end])
        start = end + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class Document:
    """Ordered sentences of one tweet; all non-empty, newline-free."""

    sentences: tuple[str, ...]

    def __post_init__(self):
        if not self.sentences:
            raise MalformedLayout("document has no sentences")
        for s in self.sentences:
            if not s or "\n" in s:
                raise MalformedLayout(f"bad sentence {s!r}")

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)


def write_documents(documents: Iterable[Document], sink: TextIO) -> int:
    """One sentence per line, one empty line between documents."""
    count = 0
    try:
        for doc in documents:
            if count:
                sink.write("\n")
            for sentence in doc.sentences:
                sink.write(sentence)
                sink.write("\n")
            count += 1
    except OSError as exc:
        raise SinkFailure(str(exc)) from exc
    return count


def read_documents(source: Iterable[str]) -> Iterator[Document]:
    """Inverse of write_documents; rejects layout damage early."""
    pending: list[str] = []
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\n")
        if line:
            pending.append(line)
        else:
            if not pending:
                raise MalformedLayout(f"line {lineno}: empty document")
            yield Document(tuple(pending))
            pending = []
    if pending:
        yield Document(tuple(pending))


def read_document_file(path) -> Iterator[Document]:
    with open(path, encoding="utf-8") as fh:
        yield from read_documents(fh)


_SPLITTER_CACHE: list[SentenceSplitter] = []


def _default_splitter() -> SentenceSplitter:
    if not _SPLITTER_CACHE:
        _SPLITTER_CACHE.append(SentenceSplitter())
    return _SPLITTER_CACHE[0]
