"""Downstream task datasets and every reported evaluation metric.

Three tasks: multi-label emotion detection (7 emotions, optional
real-valued intensities), sexist-language identification (5 raw labels
collapsed to binary and three-way views), and BIO named-entity
recognition over 9 entity types with first-subword alignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidBIO,
    LengthMismatch,
    MalformedRow,
    ShapeMismatch,
    UnknownLabel,
)
from .vocab import Vocabulary, wordpiece_tokenize

EMOTIONS = ("anger", "fear", "happiness", "sadness", "surprise", "trust", "neutral")

SEXISM_LABELS = (
    "sexist direct",
    "sexist descriptive",
    "sexist reporting",
    "non-sexist offensive",
    "non-sexist non-offensive",
)
SEXIST_BINARY = "sexist"
NONSEXIST_BINARY = "non-sexist"

ENTITY_TYPES = ("PER", "LOC", "ORG", "TM", "LEG", "DIS", "CHM", "MD", "ANT")


@dataclass(frozen=True)
class EmotionExample:
    text: str
    labels: tuple[int, ...]
    intensities: tuple[float, ...] | None = None


@dataclass(frozen=True)
class SexismExample:
    text: str
    raw_label: str
    binary_label: str
    threeway_label: str | None


@dataclass(frozen=True)
class NerExample:
    words: tuple[str, ...]
    tags: tuple[str, ...]
    first_subword_index: tuple[int, ...]


@dataclass
class MetricReport:
    metrics: dict[str, float]
    per_class: dict[str, dict[str, float]] | None = None

    def to_json(self) -> str:
        payload = {"metrics": self.metrics}
        if self.per_class is not None:
            payload["per_class"] = self.per_class
        return json.dumps(payload, indent=2, sort_keys=True)


def derive_sli_labels(raw_label: str) -> tuple[str, str | None]:
    """Collapse a 5-way sexism label into (binary, optional three-way)."""
    if raw_label not in SEXISM_LABELS:
        raise UnknownLabel(f"unknown sexism label {raw_label!r}")
    if raw_label.startswith("sexist "):
        return SEXIST_BINARY, raw_label.split(" ", 1)[1]
    return NONSEXIST_BINARY, None


def align_first_subwords(words: Sequence[str], vocab: Vocabulary) -> tuple[int, ...]:
    """Index of each word's first WordPiece in the [CLS]-prefixed sequence.

    A word that tokenizes to [UNK] points at that [UNK].
    """
    indices = []
    position = 1  # slot 0 is [CLS]
    for word in words:
        indices.append(position)
        position += len(wordpiece_tokenize(word, vocab))
    return tuple(indices)


# --- multi-label metrics -----------------------------------------------------


def _as_matrix(y, name: str) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def _check_shapes(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    t = _as_matrix(y_true, "y_true")
    p = _as_matrix(y_pred, "y_pred")
    if t.shape != p.shape:
        raise ShapeMismatch(f"shape mismatch: {t.shape} vs {p.shape}")
    return t, p


def hamming_loss(y_true, y_pred) -> float:
    """Fraction of label positions predicted incorrectly."""
    t, p = _check_shapes(y_true, y_pred)
    return float(np.mean(t != p))


def subset_accuracy(y_true, y_pred) -> float:
    """Fraction of rows whose whole label vector matches."""
    t, p = _check_shapes(y_true, y_pred)
    return float(np.mean(np.all(t == p, axis=1)))


def _per_label_confusion(t: np.ndarray, p: np.ndarray):
    tp = np.sum((t == 1) & (p == 1), axis=0).astype(float)
    fp = np.sum((t == 0) & (p == 1), axis=0).astype(float)
    fn = np.sum((t == 1) & (p == 0), axis=0).astype(float)
    return tp, fp, fn


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # zero denominators score 0, the documented zero-division rule
    out = np.zeros_like(num, dtype=float)
    np.divide(num, den, out=out, where=den > 0)
    return out


def f1_multilabel(y_true, y_pred, averaging: str) -> float:
    """F1 under explicit micro/macro/weighted averaging.

    The averaging scheme is a required argument: silent defaults make
    reported numbers irreproducible.
    """
    t, p = _check_shapes(y_true, y_pred)
    tp, fp, fn = _per_label_confusion(t, p)
    if averaging == "micro":
        tp_sum, fp_sum, fn_sum = tp.sum(), fp.sum(), fn.sum()
        precision = tp_sum / (tp_sum + fp_sum) if tp_sum + fp_sum else 0.0
        recall = tp_sum / (tp_sum + fn_sum) if tp_sum + fn_sum else 0.0
        return 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    per_label_p = _safe_div(tp, tp + fp)
    per_label_r = _safe_div(tp, tp + fn)
    per_label_f1 = _safe_div(2 * per_label_p * per_label_r, per_label_p + per_label_r)
    if averaging == "macro":
        return float(per_label_f1.mean())
    if averaging == "weighted":
        support = (t == 1).sum(axis=0).astype(float)
        if support.sum() == 0:
            return 0.0
        return float((per_label_f1 * support).sum() / support.sum())
    raise ValueError(f"averaging must be micro/macro/weighted, got {averaging!r}")


def mse(y_true, y_pred, scale: float = 1.0) -> float:
    """Mean squared error over all cells, times an optional report scale."""
    t, p = _check_shapes(y_true, y_pred)
    return float(np.mean((t.astype(float) - p.astype(float)) ** 2) * scale)


def threshold_intensities(y_scores, threshold: float = 0.5) -> np.ndarray:
    """Regression-to-classification bridge for the intensity variant."""
    arr = _as_matrix(y_scores, "y_scores")
    return (arr >= threshold).astype(int)


# --- single-label metrics ----------------------------------------------------


def prf_singlelabel(y_true: Sequence, y_pred: Sequence, averaging: str) -> MetricReport:
    """Per-class and averaged precision/recall/F1 for one label per row."""
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} gold vs {len(y_pred)} predicted")
    if averaging not in ("micro", "macro", "weighted"):
        raise ValueError(f"averaging must be micro/macro/weighted, got {averaging!r}")
    classes = sorted(set(y_true) | set(y_pred))
    per_class = {}
    tps, fps, fns, supports = [], [], [], []
    for cls in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[str(cls)] = {
            "precision": precision, "recall": recall, "f1": f1,
            "support": float(tp + fn),
        }
        tps.append(tp)
        fps.append(fp)
        fns.append(fn)
        supports.append(tp + fn)

    if averaging == "micro":
        tp, fp, fn = sum(tps), sum(fps), sum(fns)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    else:
        rows = list(per_class.values())
        if averaging == "macro":
            weights = [1.0 / len(rows)] * len(rows)
        else:
            total = sum(supports)
            weights = [s / total if total else 0.0 for s in supports]
        precision = sum(w * r["precision"] for w, r in zip(weights, rows))
        recall = sum(w * r["recall"] for w, r in zip(weights, rows))
        f1 = sum(w * r["f1"] for w, r in zip(weights, rows))

    return MetricReport(
        metrics={"precision": precision, "recall": recall, "f1": f1},
        per_class=per_class,
    )


# --- BIO / entity metrics ----------------------------------------------------


def bio_decode(tags: Sequence[str], repair: bool = False) -> list[tuple[str, int, int]]:
    """(type, start, end-exclusive) spans from a BIO tag sequence.

    Strict mode rejects orphan I- tags; repair mode coerces them to B-.
    """
    spans = []
    current_type = None
    start = 0
    for i, tag in enumerate(tags):
        if tag == "O":
            if current_type is not None:
                spans.append((current_type, start, i))
                current_type = None
            continue
        if len(tag) < 3 or tag[1] != "-" or tag[0] not in "BI":
            raise InvalidBIO(f"position {i}: malformed tag {tag!r}")
        marker, entity = tag[0], tag[2:]
        if marker == "B":
            if current_type is not None:
                spans.append((current_type, start, i))
            current_type, start = entity, i
        else:  # I-
            if current_type == entity:
                continue
            if not repair:
                raise InvalidBIO(f"position {i}: orphan {tag!r}")
            if current_type is not None:
                spans.append((current_type, start, i))
            current_type, start = entity, i
    if current_type is not None:
        spans.append((current_type, start, len(tags)))
    return spans


def _as_sentences(tags) -> list[list[str]]:
    if tags and isinstance(tags[0], str):
        return [list(tags)]
    return [list(t) for t in tags]


def entity_f1(true_tags, pred_tags, repair: bool = False) -> MetricReport:
    """Exact-span entity F1: type and both boundaries must match.

    Accepts one tag sequence or a list of per-sentence sequences;
    reports per-type precision/recall/F1 plus a micro-averaged total.
    """
    gold_sents = _as_sentences(true_tags)
    pred_sents = _as_sentences(pred_tags)
    if len(gold_sents) != len(pred_sents):
        raise LengthMismatch(f"{len(gold_sents)} gold vs {len(pred_sents)} predicted sentences")

    gold_count: dict[str, int] = {}
    pred_count: dict[str, int] = {}
    match_count: dict[str, int] = {}
    for gold, pred in zip(gold_sents, pred_sents):
        if len(gold) != len(pred):
            raise LengthMismatch(f"sentence length {len(gold)} vs {len(pred)}")
        gold_spans = set(bio_decode(gold, repair=repair))
        pred_spans = set(bio_decode(pred, repair=repair))
        for span in gold_spans:
            gold_count[span[0]] = gold_count.get(span[0], 0) + 1
        for span in pred_spans:
            pred_count[span[0]] = pred_count.get(span[0], 0) + 1
        for span in gold_spans & pred_spans:
            match_count[span[0]] = match_count.get(span[0], 0) + 1

    per_class = {}
    types = sorted(set(gold_count) | set(pred_count))
    for entity in types:
        tp = match_count.get(entity, 0)
        n_pred = pred_count.get(entity, 0)
        n_gold = gold_count.get(entity, 0)
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[entity] = {
            "precision": precision, "recall": recall, "f1": f1,
            "support": float(n_gold),
        }

    tp = sum(match_count.values())
    n_pred = sum(pred_count.values())
    n_gold = sum(gold_count.values())
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricReport(
        metrics={"precision": precision, "recall": recall, "f1": f1},
        per_class=per_class,
    )


# --- dataset loading ---------------------------------------------------------


def _parse_binary(value: str, path, lineno: int) -> int:
    if value == "0":
        return 0
    if value == "1":
        return 1
    raise MalformedRow(f"{path}:{lineno}: expected 0/1, got {value!r}")


def _parse_intensity(value: str, path, lineno: int) -> float:
    try:
        x = float(value)
    except ValueError as exc:
        raise MalformedRow(f"{path}:{lineno}: bad intensity {value!r}") from exc
    if not 0.0 <= x <= 1.0:
        raise MalformedRow(f"{path}:{lineno}: intensity {x} outside [0, 1]")
    return x


def load_emotion_dataset(path) -> list[EmotionExample]:
    """TSV rows: text, 7 binary labels, optionally 7 real intensities."""
    n = len(EMOTIONS)
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) not in (1 + n, 1 + 2 * n):
                raise MalformedRow(
                    f"{path}:{lineno}: expected {1 + n} or {1 + 2 * n} columns, got {len(cols)}")
            labels = tuple(_parse_binary(v, path, lineno) for v in cols[1:1 + n])
            intensities = None
            if len(cols) == 1 + 2 * n:
                intensities = tuple(_parse_intensity(v, path, lineno) for v in cols[1 + n:])
            out.append(EmotionExample(cols[0], labels, intensities))
    return out


def load_sexism_dataset(path) -> list[SexismExample]:
    """TSV rows: text, raw 5-way label."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise MalformedRow(f"{path}:{lineno}: expected text<TAB>label")
            try:
                binary, threeway = derive_sli_labels(cols[1])
            except UnknownLabel as exc:
                raise UnknownLabel(f"{path}:{lineno}: {exc}") from exc
            out.append(SexismExample(cols[0], cols[1], binary, threeway))
    return out


def load_ner_dataset(path, vocab: Vocabulary, repair: bool = False) -> list[NerExample]:
    """CoNLL-style two-column file: ``word tag``, blank line between sentences."""
    out = []
    words: list[str] = []
    tags: list[str] = []

    def flush(lineno: int) -> None:
        if not words:
            return
        try:
            bio_decode(tags, repair=repair)
        except InvalidBIO as exc:
            raise InvalidBIO(f"{path}: sentence ending at line {lineno}: {exc}") from exc
        for tag in tags:
            if tag != "O" and tag[2:] not in ENTITY_TYPES:
                raise UnknownLabel(f"{path}: unknown entity type in {tag!r}")
        out.append(NerExample(tuple(words), tuple(tags),
                              align_first_subwords(words, vocab)))
        words.clear()
        tags.clear()

    with open(path, encoding="utf-8") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            cols = line.split(" ")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise MalformedRow(f"{path}:{lineno}: expected 'word tag'")
            words.append(cols[0])
            tags.append(cols[1])
        flush(lineno)
    return out


def load_task_dataset(path, task: str, vocab: Vocabulary | None = None,
                      repair_bio: bool = False):
    if task == "red_v2":
        return load_emotion_dataset(path)
    if task == "coroseof":
        return load_sexism_dataset(path)
    if task == "ner":
        if vocab is None:
            raise ValueError("ner loading needs a vocabulary for subword alignment")
        return load_ner_dataset(path, vocab, repair=repair_bio)
    raise ValueError(f"unknown task {task!r}")
