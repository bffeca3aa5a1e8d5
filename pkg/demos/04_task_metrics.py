"""Every downstream evaluation metric on small worked examples.

Multi-label emotion metrics (Hamming loss, subset accuracy, F1 under
each averaging, MSE), single-label precision/recall/F1 for the sexism
task views, and exact-span entity F1 for NER.
"""

from tweetcorpus import (
    bio_decode,
    derive_sli_labels,
    entity_f1,
    f1_multilabel,
    hamming_loss,
    mse,
    prf_singlelabel,
    subset_accuracy,
)
from tweetcorpus.tasks import EMOTIONS, threshold_intensities


def main():
    print("emotion order:", EMOTIONS)
    y_true = [
        [1, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 0, 0],
    ]
    y_pred = [
        [1, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0],
        [0, 1, 0, 1, 0, 0, 0],
    ]
    print(f"hamming loss:    {hamming_loss(y_true, y_pred):.4f}")
    print(f"subset accuracy: {subset_accuracy(y_true, y_pred):.4f}")
    for averaging in ("micro", "macro", "weighted"):
        print(f"F1 ({averaging}):   {f1_multilabel(y_true, y_pred, averaging):.4f}")

    intensities = [[0.9, 0.2, 0.1, 0.0, 0.3, 0.1, 0.0]]
    bridged = threshold_intensities(intensities)
    print("intensities", intensities[0], "-> labels", bridged[0].tolist())
    print(f"MSE vs hard labels: {mse([[1, 0, 0, 0, 0, 0, 0]], intensities):.4f}")

    print()
    for raw in ("sexist reporting", "non-sexist offensive"):
        print(f"{raw!r} -> {derive_sli_labels(raw)}")
    report = prf_singlelabel(
        ["sexist", "non-sexist", "sexist", "sexist"],
        ["sexist", "non-sexist", "non-sexist", "sexist"],
        averaging="macro")
    print("binary view:", {k: round(v, 4) for k, v in report.metrics.items()})

    print()
    gold = [["B-PER", "I-PER", "O", "B-LOC"], ["B-TM", "O"]]
    pred = [["B-PER", "I-PER", "O", "B-ORG"], ["B-TM", "O"]]
    print("gold spans:", [bio_decode(tags) for tags in gold])
    report = entity_f1(gold, pred)
    for entity, row in report.per_class.items():
        print(f"  {entity}: P={row['precision']:.2f} R={row['recall']:.2f} "
              f"F1={row['f1']:.2f}")
    print("micro total:", {k: round(v, 4) for k, v in report.metrics.items()})


if __name__ == "__main__":
    main()
