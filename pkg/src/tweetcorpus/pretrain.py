"""MLM/NSP pretraining instance generation and record serialization.

Each (document, duplicate) pair gets its own RNG seeded from
mix64(seed, document index, duplicate index), so generation is
reproducible and embarrassingly parallel: worker count changes wall
time, never bytes.

RNG protocol per (document, duplicate), in draw order:

1. one ``random()``; if below short_seq_prob, one ``randint(2, T)``
   picking the reduced target length (T = max_seq_length - 3);
2. per flushed chunk of two or more sentences, one ``randint`` choosing
   the segment-A boundary, then one ``random()`` for the NSP coin
   (single-sentence chunks force a random next without a coin draw);
3. on a random next, one ``randrange(len(docs) - 1)`` picking the
   foreign document (skipping self by offset) and one ``randint``
   picking its start sentence; unused chunk sentences are pushed back;
4. the longer segment is truncated from its end, without randomness;
5. masking (see mask_sequence) continues on the same stream.
"""

from __future__ import annotations

import json
import multiprocessing
import random
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Sequence

from .errors import (
    ConfigInvalid,
    CorruptRecord,
    DataError,
    NoCandidates,
    TooFewDocuments,
    VersionMismatch,
)
from .hashing import mix64
from .segment import Document
from .vocab import Vocabulary, encode, wordpiece_tokenize

RECORD_MAGIC = b"RBTW"
RECORD_VERSION = 1
_HEADER = struct.Struct("<4sHII")
_U32 = struct.Struct("<I")


@dataclass(frozen=True)
class PretrainConfig:
    max_seq_length: int = 128
    masked_lm_prob: float = 0.15
    mask_token_frac: float = 0.8
    keep_frac: float = 0.1
    random_frac: float = 0.1
    max_predictions_per_seq: int = 20
    dupe_factor: int = 10
    short_seq_prob: float = 0.1
    nsp_random_prob: float = 0.5
    seed: int = 0

    def validate(self) -> "PretrainConfig":
        if abs(self.mask_token_frac + self.keep_frac + self.random_frac - 1.0) > 1e-12:
            raise ConfigInvalid("mask/keep/random fractions must sum to 1")
        if not 0 < self.masked_lm_prob < 1:
            raise ConfigInvalid("masked_lm_prob must be in (0, 1)")
        if self.dupe_factor < 1:
            raise ConfigInvalid("dupe_factor must be >= 1")
        if self.max_seq_length < 5:
            raise ConfigInvalid("max_seq_length must be >= 5 ([CLS] a [SEP] b [SEP])")
        if self.max_predictions_per_seq < 1:
            raise ConfigInvalid("max_predictions_per_seq must be >= 1")
        if not 0 <= self.short_seq_prob <= 1:
            raise ConfigInvalid("short_seq_prob must be in [0, 1]")
        if not 0 <= self.nsp_random_prob <= 1:
            raise ConfigInvalid("nsp_random_prob must be in [0, 1]")
        return self


@dataclass(frozen=True)
class PretrainInstance:
    token_ids: tuple[int, ...]
    segment_ids: tuple[int, ...]
    is_random_next: bool
    masked_positions: tuple[int, ...]
    masked_label_ids: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "token_ids": list(self.token_ids),
            "segment_ids": list(self.segment_ids),
            "is_random_next": self.is_random_next,
            "masked_positions": list(self.masked_positions),
            "masked_label_ids": list(self.masked_label_ids),
        }


def mask_sequence(token_ids: Sequence[int], vocab: Vocabulary, cfg: PretrainConfig,
                  rng: random.Random) -> tuple[list[int], list[int], list[int]]:
    """Apply the MLM corruption to one assembled sequence.

    Candidates are all non-[CLS]/[SEP] positions. The number selected is
    min(max_predictions_per_seq, max(1, round(masked_lm_prob * candidates))),
    drawn uniformly without replacement via ``rng.sample``. For each
    selected position, ascending, one ``random()`` decides the fate:
    below mask_token_frac -> [MASK]; below mask_token_frac + keep_frac
    -> unchanged; otherwise one ``randrange`` over the replacement pool
    (vocabulary minus [CLS]/[SEP]/[MASK]/[PAD]) picks a random token.
    """
    cls_id, sep_id = vocab.cls_id, vocab.sep_id
    candidates = [i for i, t in enumerate(token_ids) if t != cls_id and t != sep_id]
    if not candidates:
        raise NoCandidates("sequence contains only [CLS]/[SEP]")
    count = min(cfg.max_predictions_per_seq,
                max(1, int(round(cfg.masked_lm_prob * len(candidates)))))
    positions = sorted(rng.sample(candidates, count))

    pool = vocab.replacement_pool
    keep_cutoff = cfg.mask_token_frac + cfg.keep_frac
    masked = list(token_ids)
    labels = []
    for pos in positions:
        labels.append(token_ids[pos])
        r = rng.random()
        if r < cfg.mask_token_frac:
            masked[pos] = vocab.mask_id
        elif r < keep_cutoff:
            pass
        else:
            masked[pos] = pool[rng.randrange(len(pool))]
    return masked, positions, labels


def _truncate_pair(tokens_a: list[int], tokens_b: list[int], max_num_tokens: int) -> None:
    # longer segment loses tokens from its end; segments never drop below 1
    while len(tokens_a) + len(tokens_b) > max_num_tokens:
        longer = tokens_a if len(tokens_a) >= len(tokens_b) else tokens_b
        if len(longer) <= 1:
            break
        longer.pop()


def _instances_for_document(all_docs: Sequence[Sequence[Sequence[int]]], doc_index: int,
                            rng: random.Random, vocab: Vocabulary,
                            cfg: PretrainConfig) -> list[PretrainInstance]:
    document = all_docs[doc_index]
    max_num_tokens = cfg.max_seq_length - 3
    target_seq_length = max_num_tokens
    if rng.random() < cfg.short_seq_prob:
        target_seq_length = rng.randint(2, max_num_tokens)

    instances = []
    current_chunk: list[Sequence[int]] = []
    current_length = 0
    i = 0
    while i < len(document):
        segment = document[i]
        current_chunk.append(segment)
        current_length += len(segment)
        if i == len(document) - 1 or current_length >= target_seq_length:
            a_end = 1
            if len(current_chunk) >= 2:
                a_end = rng.randint(1, len(current_chunk) - 1)
            tokens_a = [t for seg in current_chunk[:a_end] for t in seg]

            tokens_b: list[int] = []
            if len(current_chunk) == 1 or rng.random() < cfg.nsp_random_prob:
                is_random_next = True
                target_b_length = target_seq_length - len(tokens_a)
                j = rng.randrange(len(all_docs) - 1)
                if j >= doc_index:
                    j += 1
                foreign = all_docs[j]
                start = rng.randint(0, len(foreign) - 1)
                for k in range(start, len(foreign)):
                    tokens_b.extend(foreign[k])
                    if len(tokens_b) >= target_b_length:
                        break
                # unused sentences go back into the stream
                i -= len(current_chunk) - a_end
            else:
                is_random_next = False
                for seg in current_chunk[a_end:]:
                    tokens_b.extend(seg)

            _truncate_pair(tokens_a, tokens_b, max_num_tokens)
            ids = [vocab.cls_id] + tokens_a + [vocab.sep_id] + tokens_b + [vocab.sep_id]
            segment_ids = [0] * (len(tokens_a) + 2) + [1] * (len(tokens_b) + 1)
            masked, positions, labels = mask_sequence(ids, vocab, cfg, rng)
            instances.append(PretrainInstance(
                token_ids=tuple(masked),
                segment_ids=tuple(segment_ids),
                is_random_next=is_random_next,
                masked_positions=tuple(positions),
                masked_label_ids=tuple(labels),
            ))
            current_chunk = []
            current_length = 0
        i += 1
    return instances


@dataclass
class BuildStats:
    documents: int = 0
    degenerate_documents: int = 0
    instances: int = 0

    def as_dict(self) -> dict:
        return {
            "documents": self.documents,
            "degenerate_documents": self.degenerate_documents,
            "instances": self.instances,
        }


def tokenize_documents(documents: Iterable[Document], vocab: Vocabulary,
                       stats: BuildStats | None = None) -> list[list[list[int]]]:
    """Sentence token-id lists per document; empty documents are dropped."""
    out = []
    for doc in documents:
        if stats:
            stats.documents += 1
        sentences = []
        for sentence in doc:
            ids = encode(wordpiece_tokenize(sentence, vocab), vocab)
            if ids:
                sentences.append(ids)
        if sentences:
            out.append(sentences)
        elif stats:
            stats.degenerate_documents += 1
    return out


_WORKER_CTX: dict = {}


def _init_worker(tok_docs, vocab, cfg):
    _WORKER_CTX["docs"] = tok_docs
    _WORKER_CTX["vocab"] = vocab
    _WORKER_CTX["cfg"] = cfg


def _run_chunk(bounds: tuple[int, int]) -> list[PretrainInstance]:
    docs = _WORKER_CTX["docs"]
    vocab = _WORKER_CTX["vocab"]
    cfg = _WORKER_CTX["cfg"]
    lo, hi = bounds
    out = []
    for i in range(lo, hi):
        for d in range(cfg.dupe_factor):
            rng = random.Random(mix64(cfg.seed, i, d))
            out.extend(_instances_for_document(docs, i, rng, vocab, cfg))
    return out


def build_instances(documents: Iterable[Document], vocab: Vocabulary,
                    cfg: PretrainConfig, workers: int = 1,
                    stats: BuildStats | None = None) -> Iterator[PretrainInstance]:
    """Generate instances in (document index, duplicate index) order.

    Requires at least two non-degenerate documents so a foreign document
    always exists for random-next sampling.
    """
    cfg.validate()
    tok_docs = tokenize_documents(documents, vocab, stats)
    if len(tok_docs) < 2:
        raise TooFewDocuments(
            f"need at least 2 tokenizable documents, got {len(tok_docs)}")

    if workers <= 1:
        for i in range(len(tok_docs)):
            for d in range(cfg.dupe_factor):
                rng = random.Random(mix64(cfg.seed, i, d))
                for inst in _instances_for_document(tok_docs, i, rng, vocab, cfg):
                    if stats:
                        stats.instances += 1
                    yield inst
        return

    chunk = max(1, (len(tok_docs) + workers - 1) // workers)
    bounds = [(lo, min(lo + chunk, len(tok_docs)))
              for lo in range(0, len(tok_docs), chunk)]
    with multiprocessing.Pool(workers, initializer=_init_worker,
                              initargs=(tok_docs, vocab, cfg)) as pool:
        for result in pool.imap(_run_chunk, bounds):
            for inst in result:
                if stats:
                    stats.instances += 1
                yield inst


# --- record serialization ---------------------------------------------------


def _pack_instance(inst: PretrainInstance) -> bytes:
    n = len(inst.token_ids)
    m = len(inst.masked_positions)
    parts = [
        _U32.pack(n),
        struct.pack("<%dI" % n, *inst.token_ids),
        struct.pack("<%dB" % n, *inst.segment_ids),
        struct.pack("<B", 1 if inst.is_random_next else 0),
        _U32.pack(m),
        struct.pack("<%dI" % m, *inst.masked_positions),
        struct.pack("<%dI" % m, *inst.masked_label_ids),
    ]
    return b"".join(parts)


def _unpack_instance(payload: bytes) -> PretrainInstance:
    view = memoryview(payload)
    offset = 0

    def take(size: int) -> memoryview:
        nonlocal offset
        if offset + size > len(payload):
            raise CorruptRecord("payload shorter than its declared contents")
        chunk = view[offset:offset + size]
        offset += size
        return chunk

    (n,) = _U32.unpack(take(4))
    token_ids = struct.unpack("<%dI" % n, take(4 * n))
    segment_ids = struct.unpack("<%dB" % n, take(n))
    (flag,) = struct.unpack("<B", take(1))
    (m,) = _U32.unpack(take(4))
    positions = struct.unpack("<%dI" % m, take(4 * m))
    labels = struct.unpack("<%dI" % m, take(4 * m))
    if offset != len(payload):
        raise CorruptRecord(f"{len(payload) - offset} trailing bytes in payload")
    return PretrainInstance(token_ids, segment_ids, bool(flag), positions, labels)


def _open(sink, mode: str):
    if isinstance(sink, (str, Path)):
        return open(sink, mode), True
    return sink, False


def write_records(instances: Iterable[PretrainInstance], sink: BinaryIO | str | Path,
                  cfg: PretrainConfig) -> int:
    """Length-prefixed, CRC-protected binary records.

    The header self-describes max_seq_length and max_predictions_per_seq
    and carries its own CRC32 so corruption anywhere in the file is
    detectable.
    """
    out, owned = _open(sink, "wb")
    try:
        header = _HEADER.pack(RECORD_MAGIC, RECORD_VERSION,
                              cfg.max_seq_length, cfg.max_predictions_per_seq)
        out.write(header)
        out.write(_U32.pack(zlib.crc32(header)))
        count = 0
        for inst in instances:
            if len(inst.token_ids) > cfg.max_seq_length:
                raise DataError(
                    f"instance of {len(inst.token_ids)} tokens exceeds "
                    f"max_seq_length {cfg.max_seq_length}")
            if len(inst.masked_positions) > cfg.max_predictions_per_seq:
                raise DataError("instance exceeds max_predictions_per_seq")
            payload = _pack_instance(inst)
            out.write(_U32.pack(len(payload)))
            out.write(payload)
            out.write(_U32.pack(zlib.crc32(payload)))
            count += 1
        return count
    finally:
        if owned:
            out.close()


@dataclass
class RecordHeader:
    version: int
    max_seq_length: int
    max_predictions_per_seq: int


def read_header(fh: BinaryIO) -> RecordHeader:
    raw = fh.read(_HEADER.size + 4)
    if len(raw) != _HEADER.size + 4:
        raise CorruptRecord("file too short for a record header")
    header, (crc,) = raw[:_HEADER.size], _U32.unpack(raw[_HEADER.size:])
    if zlib.crc32(header) != crc:
        raise CorruptRecord("header CRC mismatch")
    magic, version, max_seq, max_preds = _HEADER.unpack(header)
    if magic != RECORD_MAGIC:
        raise CorruptRecord(f"bad magic {magic!r}")
    if version != RECORD_VERSION:
        raise VersionMismatch(f"record version {version}, expected {RECORD_VERSION}")
    return RecordHeader(version, max_seq, max_preds)


def read_records(source: BinaryIO | str | Path,
                 header_out: list | None = None) -> Iterator[PretrainInstance]:
    """Stream instances back; raises CorruptRecord on any damage.

    Pass a list as ``header_out`` to also receive the RecordHeader.
    """
    fh, owned = _open(source, "rb")
    try:
        header = read_header(fh)
        if header_out is not None:
            header_out.append(header)
        while True:
            prefix = fh.read(4)
            if not prefix:
                break
            if len(prefix) != 4:
                raise CorruptRecord("truncated record length prefix")
            (size,) = _U32.unpack(prefix)
            body = fh.read(size + 4)
            if len(body) != size + 4:
                raise CorruptRecord("truncated record body")
            payload, (crc,) = body[:size], _U32.unpack(body[size:])
            if zlib.crc32(payload) != crc:
                raise CorruptRecord("payload CRC mismatch")
            inst = _unpack_instance(payload)
            if len(inst.token_ids) > header.max_seq_length:
                raise CorruptRecord("record exceeds file max_seq_length")
            if len(inst.masked_positions) > header.max_predictions_per_seq:
                raise CorruptRecord("record exceeds file max_predictions_per_seq")
            yield inst
    finally:
        if owned:
            fh.close()


def write_records_jsonl(instances: Iterable[PretrainInstance],
                        sink, cfg: PretrainConfig) -> int:
    """Line-delimited JSON twin of the binary format, for debugging."""
    out, owned = _open(sink, "w")
    try:
        count = 0
        out.write(json.dumps({
            "max_seq_length": cfg.max_seq_length,
            "max_predictions_per_seq": cfg.max_predictions_per_seq,
        }) + "\n")
        for inst in instances:
            out.write(json.dumps(inst.as_dict()) + "\n")
            count += 1
        return count
    finally:
        if owned:
            out.close()
