"""End-to-end pipeline on a generated archive, twice, comparing digests.

Creates a synthetic raw archive and a bilingual language-ID training
file, trains the agreement models, then runs ingest -> vocab -> clean
-> segment -> pretrain-data and proves the run is reproducible.
"""

import json
import random
import tempfile
from pathlib import Path

from tweetcorpus.pipeline import build_config, run_pipeline, stage_langid_train
from tweetcorpus.vocab import STRUCTURAL_TOKENS

RO_WORDS = ("salut lume astazi vreme frumoasa soare bucurie prieteni oras "
            "munte mare carte scoala copii paine lapte noapte floare").split()
EN_WORDS = ("hello world today weather lovely sunshine joy friends city "
            "mountain sea book school children bread milk night flower").split()


def make_inputs(root: Path, rng: random.Random):
    archive = root / "raw.jsonl"
    with open(archive, "w", encoding="utf-8") as fh:
        for i in range(300):
            words = RO_WORDS if i % 5 else EN_WORDS  # every 5th tweet is foreign
            sentences = [
                " ".join(rng.choice(words) for _ in range(rng.randint(5, 8))).capitalize() + "."
                for _ in range(rng.randint(1, 3))
            ]
            text = " ".join(sentences)
            if i % 6 == 0:
                text += " \U0001F600"
            fh.write(json.dumps({"id": i, "text": text}, ensure_ascii=False) + "\n")

    corpus = root / "langid.tsv"
    with open(corpus, "w", encoding="utf-8") as fh:
        for i in range(200):
            words, code = (RO_WORDS, "ro") if i % 2 == 0 else (EN_WORDS, "en")
            fh.write(code + "\t" + " ".join(rng.choice(words) for _ in range(8)) + "\n")

    base_vocab = root / "base-vocab.txt"
    base_vocab.write_text(
        "\n".join(list(STRUCTURAL_TOKENS) + sorted(set(RO_WORDS + EN_WORDS))) + "\n",
        encoding="utf-8")
    return archive, corpus, base_vocab


def main():
    rng = random.Random(17)
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        archive, corpus, base_vocab = make_inputs(root, rng)

        overrides = {
            "io.input": str(archive),
            "io.shards": 2,
            "seed": 42,
            "vocab.base": str(base_vocab),
            "pretrain.max_seq_length": 48,
            "pretrain.dupe_factor": 2,
        }
        cfg = build_config(overrides={**overrides, "io.output_dir": str(root / "warm")})
        stage_langid_train(cfg, corpus, root / "models")
        overrides["langid.model_a"] = str(root / "models" / "model-a.rlid")
        overrides["langid.model_b"] = str(root / "models" / "model-b.rlid")

        manifests = []
        for run_name in ("run-a", "run-b"):
            cfg = build_config(overrides={**overrides,
                                          "io.output_dir": str(root / run_name)})
            manifests.append(run_pipeline(cfg))

        counts = manifests[0].counts
        print("stage counters:")
        for stage in ("ingest", "vocab", "clean", "segment", "pretrain-data"):
            print(f"  {stage}: {counts[stage]}")
        rejected = counts["clean"]["rejected"]
        print("rejections by reason:",
              {k: v for k, v in rejected.items() if v})

        same = manifests[0].outputs == manifests[1].outputs
        print(f"two runs, identical output digests: {same}")
        assert same


if __name__ == "__main__":
    main()
