import json
import random

import pytest

from tweetcorpus.errors import ConfigInvalid, InputMissing
from tweetcorpus.pipeline import (
    build_config,
    file_digest,
    parse_config_file,
    run_pipeline,
    stage_clean,
    stage_ingest,
    stage_langid_train,
    stage_pretrain_data,
    stage_segment,
    stage_stats,
    stage_vocab,
)
from tweetcorpus.vocab import STRUCTURAL_TOKENS

from conftest import EN_WORDS, RO_WORDS, make_text


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# comment\n"
        "filter.min_words = 5\n"
        "pretrain.dupe_factor=2\n"
        "langid.target = ro\n",
        encoding="utf-8")
    values = parse_config_file(path)
    assert values["filter.min_words"] == "5"
    assert values["pretrain.dupe_factor"] == "2"


def test_parse_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("filter.min_wordz = 5\n", encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        parse_config_file(path)


def test_defaults_are_paper_faithful():
    cfg = build_config()
    assert cfg.filters.min_words == 5
    assert cfg.filters.max_words == 256
    assert (cfg.filters.max_mentions == cfg.filters.max_hashtags
            == cfg.filters.max_urls == cfg.filters.max_emojis == 3)
    assert cfg.pretrain.masked_lm_prob == 0.15
    assert cfg.pretrain.mask_token_frac == 0.8
    assert cfg.pretrain.keep_frac == 0.1
    assert cfg.pretrain.random_frac == 0.1
    assert cfg.pretrain.dupe_factor == 10
    assert cfg.pretrain.nsp_random_prob == 0.5
    assert cfg.emoji_fraction == 0.25
    assert cfg.langid_threshold == 0.5


def test_flag_beats_file_beats_default(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("filter.min_words = 7\nfilter.max_words = 100\n", encoding="utf-8")
    file_values = parse_config_file(path)
    cfg = build_config(file_values, {"filter.min_words": 9})
    assert cfg.filters.min_words == 9      # flag wins
    assert cfg.filters.max_words == 100    # file wins
    assert cfg.filters.max_urls == 3       # default


def test_build_config_validates():
    with pytest.raises(ConfigInvalid):
        build_config(overrides={"io.workers": 0})
    with pytest.raises(ConfigInvalid):
        build_config(overrides={"filter.min_words": 0})
    with pytest.raises(ConfigInvalid):
        build_config(overrides={"pretrain.dupe_factor": "abc"})


def _write_archive(path, texts, start_id=1):
    with open(path, "w", encoding="utf-8") as fh:
        for i, text in enumerate(texts, start_id):
            fh.write(json.dumps({"id": i, "text": text}, ensure_ascii=False) + "\n")


def _write_langid_corpus(path, rng, n=120):
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n):
            if i % 2 == 0:
                fh.write("ro\t" + make_text(rng, RO_WORDS, 8) + "\n")
            else:
                fh.write("en\t" + make_text(rng, EN_WORDS, 8) + "\n")


def _write_base_vocab(path, extra=200):
    tokens = list(STRUCTURAL_TOKENS) + sorted(set(RO_WORDS + EN_WORDS))
    tokens += [f"tok{i:04}" for i in range(extra)]
    path.write_text("\n".join(tokens) + "\n", encoding="utf-8")


@pytest.fixture
def workspace(tmp_path):
    rng = random.Random(77)
    archive = tmp_path / "raw.jsonl"
    texts = []
    for i in range(60):
        sentences = [make_text(rng, RO_WORDS, rng.randint(5, 8)).capitalize() + "."
                     for _ in range(rng.randint(1, 3))]
        text = " ".join(sentences)
        if i % 7 == 0:
            text += " \U0001F600"
        texts.append(text)
    _write_archive(archive, texts)

    corpus = tmp_path / "langid.tsv"
    _write_langid_corpus(corpus, rng)
    base_vocab = tmp_path / "base-vocab.txt"
    _write_base_vocab(base_vocab)

    out = tmp_path / "out"
    cfg = build_config(overrides={
        "io.input": str(archive),
        "io.output_dir": str(out),
        "io.shards": 2,
        "seed": 5,
        "vocab.base": str(base_vocab),
        "pretrain.max_seq_length": 48,
        "pretrain.dupe_factor": 2,
    })
    models = stage_langid_train(cfg, corpus, tmp_path / "models")
    cfg.langid_model_a = str(tmp_path / "models" / "model-a.rlid")
    cfg.langid_model_b = str(tmp_path / "models" / "model-b.rlid")
    return cfg, tmp_path


def test_ingest_stage_counts_and_shards(workspace, tmp_path):
    cfg, root = workspace
    manifest = stage_ingest(cfg)
    assert manifest.counts["read"] == 60
    assert manifest.counts["emitted"] == manifest.counts["read"] - \
        manifest.counts["malformed"] - manifest.counts["duplicates_id"] - \
        manifest.counts["duplicates_text"]
    assert len(manifest.outputs) == 2
    assert (root / "out" / "ingest" / "manifest-ingest.json").exists()


def test_clean_stage_hand_fixture(tmp_path):
    """Three tweets with known verdicts: one foreign, one spam, one good."""
    rng = random.Random(3)
    archive = tmp_path / "raw.jsonl"
    good = make_text(rng, RO_WORDS, 8)
    foreign = make_text(rng, EN_WORDS, 8)
    spam = "@a @b @c @d " + make_text(rng, RO_WORDS, 6)
    _write_archive(archive, [good, foreign, spam])

    corpus = tmp_path / "langid.tsv"
    _write_langid_corpus(corpus, rng)
    out = tmp_path / "out"
    cfg = build_config(overrides={
        "io.input": str(archive), "io.output_dir": str(out), "seed": 1})
    stage_langid_train(cfg, corpus, tmp_path / "models")
    cfg.langid_model_a = str(tmp_path / "models" / "model-a.rlid")
    cfg.langid_model_b = str(tmp_path / "models" / "model-b.rlid")

    stage_ingest(cfg)
    manifest = stage_clean(cfg)
    assert manifest.counts["read"] == 3
    assert manifest.counts["emitted"] == 1
    assert manifest.counts["rejected"]["not_target_language"] == 1
    assert manifest.counts["rejected"]["too_many_mentions"] == 1


def test_clean_conservation_identity(workspace):
    cfg, _ = workspace
    stage_ingest(cfg)
    manifest = stage_clean(cfg)
    total = manifest.counts["emitted"] + sum(manifest.counts["rejected"].values())
    assert manifest.counts["read"] == total


def test_full_pipeline_and_rerun_determinism(workspace, tmp_path):
    cfg, root = workspace
    manifest1 = run_pipeline(cfg)
    assert manifest1.counts["pretrain-data"]["instances"] > 0
    # emoji made it into the vocabulary
    vocab_text = (root / "out" / "vocab" / "vocab.txt").read_text(encoding="utf-8")
    assert "USER" in vocab_text.splitlines()

    cfg2 = build_config(overrides={**{k: v for k, v in cfg.flat().items()},
                                   "io.output_dir": str(root / "out2")})
    manifest2 = run_pipeline(cfg2)
    assert manifest1.outputs == manifest2.outputs
    assert manifest1.counts == manifest2.counts


def test_pipeline_workers_do_not_change_digests(workspace, tmp_path):
    cfg, root = workspace
    manifest1 = run_pipeline(cfg)
    flat = cfg.flat()
    flat.update({"io.output_dir": str(root / "out-w4"), "io.workers": 4})
    manifest2 = run_pipeline(build_config(overrides=flat))
    assert manifest1.outputs == manifest2.outputs


def test_pipeline_all_spam_is_success_with_warning(tmp_path, capsys):
    rng = random.Random(9)
    archive = tmp_path / "raw.jsonl"
    _write_archive(archive, ["@a @b @c @d spam aici " + str(i) + " x y z"
                             for i in range(10)])
    base_vocab = tmp_path / "base.txt"
    _write_base_vocab(base_vocab)
    cfg = build_config(overrides={
        "io.input": str(archive),
        "io.output_dir": str(tmp_path / "out"),
        "vocab.base": str(base_vocab),
    })
    manifest = run_pipeline(cfg)
    assert manifest.counts["clean"]["emitted"] == 0
    assert manifest.counts["pretrain-data"]["instances"] == 0
    assert manifest.counts["pretrain-data"].get("skipped") is True


def test_pretrain_stage_rerun_identical_digest(workspace, tmp_path):
    cfg, root = workspace
    stage_ingest(cfg)
    stage_vocab(cfg)
    stage_clean(cfg)
    stage_segment(cfg)
    m1 = stage_pretrain_data(cfg)
    m2 = stage_pretrain_data(cfg, out_dir=root / "again")
    assert m1.outputs == m2.outputs


def test_stats_stage_zero_input(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    cfg = build_config(overrides={
        "io.input": str(empty), "io.output_dir": str(tmp_path / "out")})
    manifest = stage_stats(cfg)
    assert manifest.counts["read"] == 0
    assert manifest.counts["emitted"] == 0
    assert manifest.counts["words"] == 0


def test_missing_input_raises(tmp_path):
    cfg = build_config(overrides={
        "io.input": str(tmp_path / "nu-exista.jsonl"),
        "io.output_dir": str(tmp_path / "out")})
    with pytest.raises(InputMissing):
        stage_ingest(cfg)


def test_vocab_stage_requires_base(workspace):
    cfg, _ = workspace
    stage_ingest(cfg)
    cfg.base_vocab_path = ""
    with pytest.raises(ConfigInvalid):
        stage_vocab(cfg)


def test_manifest_is_deterministic_json(workspace, tmp_path):
    cfg, root = workspace
    stage_ingest(cfg)
    text1 = (root / "out" / "ingest" / "manifest-ingest.json").read_text()
    payload = json.loads(text1)
    assert payload["tool"] == "tweetcorpus"
    assert payload["stage"] == "ingest"
    assert "seed" in payload and "config" in payload
    digest1 = file_digest(root / "out" / "ingest" / "tweets-00000.jsonl")
    assert payload["outputs"]["tweets-00000.jsonl"] == digest1


def test_run_stage_dispatch_names(workspace):
    from tweetcorpus.pipeline import run_stage
    cfg, _ = workspace
    manifest = run_stage("ingest", cfg)
    assert manifest.stage == "ingest"
    with pytest.raises(ConfigInvalid):
        run_stage("nu-exista", cfg)


def test_run_stage_attaches_stage_name(tmp_path):
    from tweetcorpus.pipeline import run_stage
    cfg = build_config(overrides={
        "io.input": str(tmp_path / "absent.jsonl"),
        "io.output_dir": str(tmp_path / "out")})
    with pytest.raises(InputMissing) as err:
        run_stage("ingest", cfg)
    assert "stage ingest" in str(err.value)


def test_pipeline_failure_writes_partial_manifest(tmp_path):
    archive = tmp_path / "raw.jsonl"
    _write_archive(archive, ["un text destul de lung aici"])
    cfg = build_config(overrides={
        "io.input": str(archive),
        "io.output_dir": str(tmp_path / "out"),
        "vocab.base": str(tmp_path / "no-base.txt"),  # vocab stage will fail
    })
    with pytest.raises(InputMissing):
        run_pipeline(cfg)
    payload = json.loads((tmp_path / "out" / "manifest-pipeline.json").read_text())
    assert payload["counts"]["failed_stage"] == "vocab"
    assert "ingest" in payload["counts"]


def test_pretrain_stage_debug_jsonl(workspace, tmp_path):
    cfg, root = workspace
    stage_ingest(cfg)
    stage_vocab(cfg)
    stage_clean(cfg)
    stage_segment(cfg)
    manifest = stage_pretrain_data(cfg, debug_jsonl=True)
    jsonl = [name for name in manifest.outputs if name.endswith(".jsonl")]
    assert len(jsonl) == 2
    lines = (root / "out" / "pretrain" / jsonl[0]).read_text().splitlines()
    assert json.loads(lines[0])["max_seq_length"] == cfg.pretrain.max_seq_length
    row = json.loads(lines[1])
    assert set(row) == {"token_ids", "segment_ids", "is_random_next",
                        "masked_positions", "masked_label_ids"}


def test_record_count_matches_manifest_accounting(workspace, tmp_path):
    from tweetcorpus.pretrain import read_records
    cfg, root = workspace
    stage_ingest(cfg)
    stage_vocab(cfg)
    stage_clean(cfg)
    stage_segment(cfg)
    manifest = stage_pretrain_data(cfg)
    on_disk = 0
    for name in manifest.outputs:
        on_disk += sum(1 for _ in read_records(root / "out" / "pretrain" / name))
    assert on_disk == manifest.counts["instances"]
