"""Shared tree builders and random generators for the test suite."""

from __future__ import annotations

import random

from headparse.conllu import DepTree, Token, Treebank, validate

NONROOT_LABELS = ["nsubj", "obj", "obl", "nmod", "amod", "det", "case",
                  "punct", "compound", "flat", "mark", "nsubj:pass", "xcomp"]
UPOS_POOL = ["NOUN", "VERB", "PROPN", "ADJ", "ADP", "DET", "PART", "PUNCT"]


def tree(rows, sent_id=None, comments=()):
    """rows: (form, upos, head, deprel) tuples in surface order."""
    return DepTree(tokens=tuple(Token(id=i, form=f, upos=u, head=h, deprel=d)
                                for i, (f, u, h, d) in enumerate(rows, start=1)),
                   comments=tuple(comments), sent_id=sent_id)


def tree_from_heads(heads, labels=None, forms=None, upos=None, sent_id=None):
    n = len(heads)
    labels = labels or ["root" if h == 0 else "dep" for h in heads]
    forms = forms or [f"w{i}" for i in range(1, n + 1)]
    upos = upos or ["NOUN"] * n
    return tree(list(zip(forms, upos, heads, labels)), sent_id=sent_id)


def random_arborescence(n: int, rng: random.Random) -> list[int]:
    """Uniform single-rooted head function over tokens 1..n (rejection
    sampling over uniform head functions)."""
    while True:
        heads = [rng.choice([h for h in range(0, n + 1) if h != d])
                 for d in range(1, n + 1)]
        candidate = tree_from_heads(heads)
        if not validate(candidate):
            return heads


def random_valid_tree(n: int, rng: random.Random, with_punct: bool = False,
                      sent_id=None) -> DepTree:
    heads = random_arborescence(n, rng)
    labels = ["root" if h == 0 else rng.choice(NONROOT_LABELS) for h in heads]
    upos = [rng.choice(UPOS_POOL if with_punct else UPOS_POOL[:-1])
            for _ in range(n)]
    forms = [f"w{i}" for i in range(1, n + 1)]
    return tree(list(zip(forms, upos, heads, labels)), sent_id=sent_id)


def random_projective_tree(n: int, rng: random.Random, sent_id=None) -> DepTree:
    """Random projective tree via recursive span bracketing."""
    heads = [0] * (n + 1)  # 1-based

    def build(lo: int, hi: int, parent: int) -> None:
        if lo > hi:
            return
        head = rng.randint(lo, hi)
        heads[head] = parent
        # split [lo, head-1] and [head+1, hi] into contiguous child spans
        for a, b in ((lo, head - 1), (head + 1, hi)):
            i = a
            while i <= b:
                j = rng.randint(i, b)
                build(i, j, head)
                i = j + 1

    build(1, n, 0)
    labels = ["root" if heads[i] == 0 else rng.choice(NONROOT_LABELS)
              for i in range(1, n + 1)]
    forms = [rng.choice(["the", "fund", "plan", "cut", "jobs", "in", "talks",
                         "court"]) for _ in range(n)]
    upos = [rng.choice(UPOS_POOL[:-1]) for _ in range(n)]
    return tree(list(zip(forms, upos, heads[1:], labels)), sent_id=sent_id)


def as_treebank(trees, name="fixture"):
    return Treebank(trees=tuple(trees), source_name=name)
