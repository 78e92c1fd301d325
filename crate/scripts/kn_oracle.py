"""Reference interpolated Kneser-Ney scorer used to freeze LM test values.

Computes p(w | h) straight from the recursive definition (no backoff
tables) over the toy corpus and prints natural-log sentence probabilities.
"""
import math
import re
import sys
from collections import Counter, defaultdict

D = 0.75


def words(line):
    return re.findall(r"\w+|[^\w\s]", line.lower())


def build(sentences, order, threshold):
    freq = Counter(w for s in sentences for w in s)
    vocab = {w for w, c in freq.items() if c >= threshold} | {"</s>", "<unk>"}
    grams = [Counter() for _ in range(order + 1)]  # grams[k]: raw k-gram counts
    for s in sentences:
        seq = ["<s>"] * (order - 1) + [w if w in vocab else "<unk>" for w in s] + ["</s>"]
        for i in range(order - 1, len(seq)):
            for k in range(1, order + 1):
                grams[k][tuple(seq[i - k + 1 : i + 1])] += 1
    # modified counts
    mod = [None] * (order + 1)
    mod[order] = Counter(grams[order])
    for k in range(order - 1, 0, -1):
        c = Counter()
        for g in mod[k + 1]:
            c[g[1:]] += 1
        mod[k] = c
    return vocab, mod


def prob(vocab, mod, h, w):
    k = len(h) + 1
    if k == 1:
        total = sum(mod[1].values())
        return max(mod[1].get((w,), 0) - D, 0) / total + D * len(mod[1]) / total / len(vocab)
    rows = {g: c for g, c in mod[k].items() if g[:-1] == h}
    lower = prob(vocab, mod, h[1:], w)
    if not rows:
        return lower
    denom = sum(rows.values())
    return max(rows.get(h + (w,), 0) - D, 0) / denom + D * len(rows) / denom * lower


def log_prob(vocab, mod, order, s):
    seq = ["<s>"] * (order - 1) + [w if w in vocab else "<unk>" for w in s] + ["</s>"]
    return sum(
        math.log(prob(vocab, mod, tuple(seq[i - order + 1 : i]), seq[i]))
        for i in range(order - 1, len(seq))
    )


def main(path):
    sentences = [words(l) for l in open(path, encoding="utf-8") if l.strip()]
    queries = [
        "The cat sat on the mat.",
        "The dog saw the cat.",
        "A dog sat on a log.",
        "the zebra sat.",
        "cat",
    ]
    for order in (2, 3):
        vocab, mod = build(sentences, order, 1)
        for q in queries:
            print(f"order={order}\t{q}\t{log_prob(vocab, mod, order, words(q))!r}")
    vocab, mod = build(sentences, 2, 1)
    print("bigrams", sorted(mod[2].items()))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/toy_corpus.txt")
