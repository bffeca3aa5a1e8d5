"""Character n-gram language identification.

A multinomial Naive Bayes classifier over character n-grams stands in
for external language detectors; two models trained with different
n-gram ranges form an agreement ensemble, and a tweet passes only when
both rank the target language first with enough posterior mass.
"""

from __future__ import annotations

import math
import re
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    CorruptRecord,
    EmptyAfterStripping,
    EmptySample,
    InsufficientLanguages,
    VersionMismatch,
)

MODEL_MAGIC = b"RLID"
MODEL_VERSION = 1

_STRIP_RE = re.compile(r"\b(USER|HTTPURL|HASHTAG)\b|\d+")
_WS_RE = re.compile(r"\s+")


def _prepare(text: str) -> str:
    # placeholders and digits carry no language signal
    return _WS_RE.sub(" ", _STRIP_RE.sub(" ", text)).strip()


def _extract_ngrams(text: str, min_n: int, max_n: int) -> Counter:
    grams: Counter = Counter()
    size = len(text)
    for n in range(min_n, max_n + 1):
        for i in range(size - n + 1):
            grams[text[i:i + n]] += 1
    return grams


@dataclass(frozen=True)
class LangScore:
    language: str
    probability: float


class LangModel:
    """Multinomial NB with add-alpha smoothing over a fixed n-gram vocabulary.

    N-grams never seen in training are dropped at classification time;
    n-grams seen for some other language score with the smoothing mass
    alpha / (total + alpha * |V|).
    """

    def __init__(self, languages: Sequence[str], ngram_range: tuple[int, int],
                 smoothing_alpha: float, log_priors: dict[str, float],
                 log_likelihoods: dict[str, dict[str, float]],
                 log_unseen: dict[str, float], vocabulary: frozenset[str]):
        self.languages = list(languages)
        self.ngram_range = ngram_range
        self.smoothing_alpha = smoothing_alpha
        self.log_priors = log_priors
        self.log_likelihoods = log_likelihoods
        self.log_unseen = log_unseen
        self.vocabulary = vocabulary

    def classify(self, text: str) -> list[LangScore]:
        return classify(self, text)

    def save(self, path: str | Path) -> None:
        save_model(self, path)

    @classmethod
    def load(cls, path: str | Path) -> "LangModel":
        return load_model(path)


def train(samples: Iterable[tuple[str, str]], ngram_range: tuple[int, int] = (1, 3),
          smoothing_alpha: float = 1.0) -> LangModel:
    """Fit the classifier from (text, language-code) pairs.

    Deterministic: counts are integers and every derived float comes
    from the final tallies, so sample order never changes the model.
    """
    min_n, max_n = ngram_range
    if not (1 <= min_n <= max_n <= 5):
        raise ValueError(f"ngram_range must satisfy 1 <= min <= max <= 5, got {ngram_range}")
    if smoothing_alpha <= 0:
        raise ValueError("smoothing_alpha must be positive")

    gram_counts: dict[str, Counter] = {}
    sample_counts: Counter = Counter()
    for text, lang in samples:
        if not text.strip():
            raise EmptySample("training sample with empty text")
        stripped = _prepare(text)
        if not stripped:
            raise EmptySample(f"training sample empty after stripping: {text!r}")
        sample_counts[lang] += 1
        gram_counts.setdefault(lang, Counter()).update(
            _extract_ngrams(stripped, min_n, max_n))

    if len(sample_counts) < 2:
        raise InsufficientLanguages(
            f"need at least 2 languages, got {sorted(sample_counts)}")

    languages = sorted(sample_counts)
    vocab = sorted(set().union(*gram_counts.values()))
    v = len(vocab)
    total_samples = sum(sample_counts.values())

    log_priors = {}
    log_unseen = {}
    log_likelihoods: dict[str, dict[str, float]] = {lang: {} for lang in languages}
    for lang in languages:
        counts = gram_counts[lang]
        total = sum(counts.values())
        denom = math.log(total + smoothing_alpha * v)
        log_priors[lang] = math.log(sample_counts[lang] / total_samples)
        log_unseen[lang] = math.log(smoothing_alpha) - denom
        table = log_likelihoods[lang]
        for gram in vocab:
            c = counts.get(gram, 0)
            if c:
                table[gram] = math.log(c + smoothing_alpha) - denom
    return LangModel(languages, (min_n, max_n), smoothing_alpha,
                     log_priors, log_likelihoods, log_unseen, frozenset(vocab))


def classify(model: LangModel, text: str) -> list[LangScore]:
    """Full posterior over the model's languages, descending.

    Ties break by language code ascending; probabilities sum to 1.
    """
    stripped = _prepare(text)
    if not stripped:
        raise EmptyAfterStripping(f"nothing classifiable in {text!r}")
    grams = _extract_ngrams(stripped, *model.ngram_range)
    known = [(gram, count) for gram, count in grams.items() if gram in model.vocabulary]
    scores = {}
    for lang in model.languages:
        table = model.log_likelihoods[lang]
        unseen = model.log_unseen[lang]
        total = model.log_priors[lang]
        for gram, count in known:
            total += count * table.get(gram, unseen)
        scores[lang] = total

    peak = max(scores.values())
    exps = {lang: math.exp(s - peak) for lang, s in scores.items()}
    z = sum(exps.values())
    ranked = sorted(((lang, e / z) for lang, e in exps.items()),
                    key=lambda pair: (-pair[1], pair[0]))
    return [LangScore(lang, p) for lang, p in ranked]


def agreement_filter(text: str, model_a: LangModel, model_b: LangModel,
                     target: str, threshold: float = 0.5) -> bool:
    """True iff both models rank ``target`` first at or above ``threshold``."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    for model in (model_a, model_b):
        top = classify(model, text)[0]
        if top.language != target or top.probability < threshold:
            return False
    return True


def _write_str(out, value: str) -> None:
    data = value.encode("utf-8")
    out.write(struct.pack("<H", len(data)))
    out.write(data)


def _read_exact(fh, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise CorruptRecord("unexpected end of model file")
    return data


def _read_str(fh) -> str:
    (size,) = struct.unpack("<H", _read_exact(fh, 2))
    return _read_exact(fh, size).decode("utf-8")


def save_model(model: LangModel, path: str | Path) -> None:
    """Versioned binary layout: language table, then an n-gram table of
    float64 little-endian log-likelihood rows (one column per language,
    unseen entries materialized). Grams are sorted, so identical models
    produce identical bytes."""
    vocab = sorted(model.vocabulary)
    if not vocab:
        raise CorruptRecord("refusing to save a model with an empty vocabulary")
    with open(path, "wb") as out:
        out.write(MODEL_MAGIC)
        out.write(struct.pack("<H", MODEL_VERSION))
        out.write(struct.pack("<BB", *model.ngram_range))
        out.write(struct.pack("<d", model.smoothing_alpha))
        out.write(struct.pack("<H", len(model.languages)))
        for lang in model.languages:
            _write_str(out, lang)
            out.write(struct.pack("<dd", model.log_priors[lang], model.log_unseen[lang]))
        out.write(struct.pack("<I", len(vocab)))
        for gram in vocab:
            _write_str(out, gram)
            row = [model.log_likelihoods[lang].get(gram, model.log_unseen[lang])
                   for lang in model.languages]
            out.write(struct.pack("<%dd" % len(row), *row))


def load_model(path: str | Path) -> LangModel:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != MODEL_MAGIC:
            raise CorruptRecord(f"{path}: not a language model file")
        (version,) = struct.unpack("<H", _read_exact(fh, 2))
        if version != MODEL_VERSION:
            raise VersionMismatch(f"{path}: model version {version}, expected {MODEL_VERSION}")
        min_n, max_n = struct.unpack("<BB", _read_exact(fh, 2))
        (alpha,) = struct.unpack("<d", _read_exact(fh, 8))
        (n_langs,) = struct.unpack("<H", _read_exact(fh, 2))
        languages, log_priors, log_unseen = [], {}, {}
        for _ in range(n_langs):
            lang = _read_str(fh)
            prior, unseen = struct.unpack("<dd", _read_exact(fh, 16))
            languages.append(lang)
            log_priors[lang] = prior
            log_unseen[lang] = unseen
        (n_grams,) = struct.unpack("<I", _read_exact(fh, 4))
        log_likelihoods: dict[str, dict[str, float]] = {lang: {} for lang in languages}
        vocab = []
        for _ in range(n_grams):
            gram = _read_str(fh)
            vocab.append(gram)
            row = struct.unpack("<%dd" % n_langs, _read_exact(fh, 8 * n_langs))
            for lang, value in zip(languages, row):
                log_likelihoods[lang][gram] = value
    return LangModel(languages, (min_n, max_n), alpha, log_priors,
                     log_likelihoods, log_unseen, frozenset(vocab))


def read_training_corpus(path: str | Path) -> list[tuple[str, str]]:
    """Lines of ``code<TAB>text``."""
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise CorruptRecord(f"{path}:{lineno}: expected code<TAB>text")
            code, text = line.split("\t", 1)
            samples.append((text, code))
    return samples
