#!/usr/bin/env python3
"""Writes tests/data/predictions_fixture.csv.

A deterministic 3-class prediction set whose evaluation report reads
AUC 0.880 (melanoma), 0.950 (seborrheic keratosis), mean 0.915 and
accuracy 81.6%. Scores are integers / 1e6; the predicted class score lies
in [0.5, 1), the others in [0, 0.5), so the argmax is fixed by the chosen
confusion matrix and only the within-band ordering moves the AUCs.
"""

import argparse
import bisect
import pathlib
import random

CLASSES = ["melanoma", "nevus", "seborrheic_keratosis"]
# confusion[true][predicted]; diagonal sums to 816 of 1000
CONFUSION = [[130, 55, 10], [60, 570, 25], [14, 20, 116]]
# positive-over-negative pair counts giving AUC 0.880 and 0.950 exactly
TARGETS = {0: (138138, 195 * 805), 2: (121125, 150 * 850)}
SCALE = 1_000_000


def pair_count(scores, positive):
    """Mann-Whitney U doubled (ties count one)."""
    pos = sorted(s for s, p in zip(scores, positive) if p)
    neg = sorted(s for s, p in zip(scores, positive) if not p)
    u2 = 0
    for s in pos:
        lo = bisect.bisect_left(neg, s)
        hi = bisect.bisect_right(neg, s)
        u2 += 2 * lo + (hi - lo)
    return u2


def tune(rng, scores, bands, positive, target2):
    """Resamples single scores inside their band until U*2 hits target2."""
    u2 = pair_count(scores, positive)
    while u2 != target2:
        i = rng.randrange(len(scores))
        lo, hi = bands[i]
        old = scores[i]
        # Move towards the target: positives up / negatives down raise U.
        want_up = (u2 < target2) == positive[i]
        new = rng.randrange(old, hi) if want_up else rng.randrange(lo, old + 1)
        scores[i] = new
        cand = pair_count(scores, positive)
        if abs(cand - target2) < abs(u2 - target2):
            u2 = cand
        else:
            scores[i] = old
    return scores


def build(seed):
    rng = random.Random(seed)
    truth, pred = [], []
    for t, row in enumerate(CONFUSION):
        for p, n in enumerate(row):
            truth += [t] * n
            pred += [p] * n
    order = list(range(len(truth)))
    rng.shuffle(order)
    truth = [truth[i] for i in order]
    pred = [pred[i] for i in order]

    half = SCALE // 2
    cols = []
    for c in range(3):
        bands = [(half, SCALE) if p == c else (0, half) for p in pred]
        scores = [rng.randrange(lo, hi) for lo, hi in bands]
        if c in TARGETS:
            positive = [t == c for t in truth]
            scores = tune(rng, scores, bands, positive, 2 * TARGETS[c][0])
        cols.append(scores)
    return truth, cols


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent / "tests/data/predictions_fixture.csv")
    args = ap.parse_args()
    truth, cols = build(args.seed)
    lines = ["# classes: " + ",".join(CLASSES),
             "item_id,true_label," + ",".join("score_" + c for c in CLASSES)]
    for i, t in enumerate(truth):
        scores = ",".join(f"{cols[c][i] / SCALE:.6f}" for c in range(3))
        lines.append(f"item_{i:04d},{CLASSES[t]},{scores}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n")
    for c, (u, n) in TARGETS.items():
        got = pair_count(cols[c], [t == c for t in truth]) / 2
        print(f"{CLASSES[c]}: U={got:.0f}/{n} auc={got / n:.6f} (target {u / n:.6f})")


if __name__ == "__main__":
    main()
