"""Trainable, deterministic transition-based dependency parser.

Arc-standard transitions scored by an averaged perceptron over sparse
indicator features. Greedy decoding; training replays the static oracle and
updates on each wrongly predicted transition. Non-projective trees have no
arc-standard derivation and are skipped (and counted) during training.

Feature templates (version ``v1``), where s0/s1 are the top two stack items
and b0/b1 the first two buffer items, ``w`` a surface form and ``p`` a UPOS
tag: bias; s0w s0p s1w s1p b0w b0p b1w b1p; s0w|s1w s0p|s1p s0w|s1p s0p|s1w
s0p|b0p s1p|b0p b0p|b1p; label of the leftmost and of the rightmost
dependent collected so far for s0; the bucketed linear distance s0-s1
(1,2,3,4,5+) alone and conjoined with s0p|s1p. Absent items pad with
``<NONE>``; the virtual root reads as form/POS ``<ROOT>``.

Transition ids: SHIFT = 0, then LEFT-ARC for every label in sorted order,
then RIGHT-ARC likewise; score ties are broken toward the smallest id.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .conllu import DepTree, Token, Treebank, validate, write_conllu
from .errors import ContractError, FormatError

TEMPLATES_VERSION = "v1"
SHIFT = 0
MAGIC = "headparse-model 1"

Table = dict[str, dict[int, float]]


@dataclass
class Configuration:
    """Arc-standard parser state: stack, buffer cursor, and arcs built so
    far (dep -> (head, label))."""

    n: int
    stack: list[int] = field(default_factory=lambda: [0])
    next_buf: int = 1
    arcs: dict[int, tuple[int, str]] = field(default_factory=dict)
    # per-head (position, label) of the leftmost/rightmost dependent so far
    lmost: dict[int, tuple[int, str]] = field(default_factory=dict)
    rmost: dict[int, tuple[int, str]] = field(default_factory=dict)

    def buffer_empty(self) -> bool:
        return self.next_buf > self.n

    def is_terminal(self) -> bool:
        return self.buffer_empty() and len(self.stack) == 1

    def _note_child(self, head: int, dep: int, label: str) -> None:
        if head not in self.lmost or dep < self.lmost[head][0]:
            self.lmost[head] = (dep, label)
        if head not in self.rmost or dep > self.rmost[head][0]:
            self.rmost[head] = (dep, label)

    def shift(self) -> None:
        self.stack.append(self.next_buf)
        self.next_buf += 1

    def left_arc(self, label: str) -> None:
        dep = self.stack.pop(-2)
        head = self.stack[-1]
        self.arcs[dep] = (head, label)
        self._note_child(head, dep, label)

    def right_arc(self, label: str) -> None:
        dep = self.stack.pop()
        head = self.stack[-1]
        self.arcs[dep] = (head, label)
        self._note_child(head, dep, label)


def is_projective(tree: DepTree) -> bool:
    """True iff no two arcs cross (root arcs included, root at position 0)."""
    arcs = [(min(t.head, t.id), max(t.head, t.id)) for t in tree.tokens]
    for i, (a1, b1) in enumerate(arcs):
        for a2, b2 in arcs[i + 1:]:
            if a1 < a2 < b1 < b2 or a2 < a1 < b2 < b1:
                return False
    return True


def static_oracle(tree: DepTree) -> list[tuple[str, str | None]] | None:
    """Canonical SHIFT / LEFT-ARC(l) / RIGHT-ARC(l) derivation of ``tree``,
    or None when the tree is non-projective (no derivation exists).

    Arcs are built as eagerly as possible: an item is attached once all of
    its own dependents have been collected.
    """
    if validate(tree):
        raise ContractError("static_oracle requires a validated tree")
    heads = {t.id: t.head for t in tree.tokens}
    labels = {t.id: t.deprel for t in tree.tokens}
    pending = {i: 0 for i in range(0, len(tree) + 1)}
    for t in tree.tokens:
        pending[t.head] += 1

    seq: list[tuple[str, str | None]] = []
    config = Configuration(n=len(tree))
    while not config.is_terminal():
        done = False
        if len(config.stack) >= 2:
            s0, s1 = config.stack[-1], config.stack[-2]
            if s1 != 0 and heads[s1] == s0 and pending[s1] == 0:
                seq.append(("left", labels[s1]))
                config.left_arc(labels[s1])
                pending[s0] -= 1
                done = True
            elif (heads[s0] == s1 and pending[s0] == 0
                  and (s1 != 0 or (config.buffer_empty() and len(config.stack) == 2))):
                seq.append(("right", labels[s0]))
                config.right_arc(labels[s0])
                pending[s1] -= 1
                done = True
        if not done:
            if config.buffer_empty():
                return None  # stuck: non-projective
            seq.append(("shift", None))
            config.shift()
    return seq


def _features(config: Configuration, forms: Sequence[str],
              upos: Sequence[str]) -> list[str]:
    def w(i):
        if i is None:
            return "<NONE>"
        return "<ROOT>" if i == 0 else forms[i - 1]

    def p(i):
        if i is None:
            return "<NONE>"
        return "<ROOT>" if i == 0 else upos[i - 1]

    s0 = config.stack[-1] if len(config.stack) >= 1 else None
    s1 = config.stack[-2] if len(config.stack) >= 2 else None
    b0 = config.next_buf if config.next_buf <= config.n else None
    b1 = config.next_buf + 1 if config.next_buf + 1 <= config.n else None

    s0w, s0p, s1w, s1p = w(s0), p(s0), w(s1), p(s1)
    b0w, b0p, b1w, b1p = w(b0), p(b0), w(b1), p(b1)
    lm = config.lmost.get(s0)[1] if s0 is not None and s0 in config.lmost else "<NONE>"
    rm = config.rmost.get(s0)[1] if s0 is not None and s0 in config.rmost else "<NONE>"
    if s0 is not None and s1 is not None:
        d = s0 - s1
        dist = str(d) if d < 5 else "5+"
    else:
        dist = "<NONE>"

    return [
        "bias",
        "s0w=" + s0w, "s0p=" + s0p, "s1w=" + s1w, "s1p=" + s1p,
        "b0w=" + b0w, "b0p=" + b0p, "b1w=" + b1w, "b1p=" + b1p,
        "s0w|s1w=" + s0w + "|" + s1w,
        "s0p|s1p=" + s0p + "|" + s1p,
        "s0w|s1p=" + s0w + "|" + s1p,
        "s0p|s1w=" + s0p + "|" + s1w,
        "s0p|b0p=" + s0p + "|" + b0p,
        "s1p|b0p=" + s1p + "|" + b0p,
        "b0p|b1p=" + b0p + "|" + b1p,
        "s0lc=" + lm,
        "s0rc=" + rm,
        "dist=" + dist,
        "s0p|s1p|dist=" + s0p + "|" + s1p + "|" + dist,
    ]


@dataclass
class ParserModel:
    labels: tuple[str, ...]
    root_labels: tuple[str, ...]  # labels observed on root attachments
    nonroot_labels: tuple[str, ...]  # labels observed elsewhere
    weights: Table
    averaged: Table
    feature_templates_version: str
    meta: dict


def _transition_id(labels: Sequence[str], kind: str, label: str | None) -> int:
    if kind == "shift":
        return SHIFT
    j = labels.index(label)
    return 1 + j if kind == "left" else 1 + len(labels) + j


def _valid_transitions(config: Configuration,
                       left_ids: Sequence[int], right_nonroot: Sequence[int],
                       right_root: Sequence[int]) -> list[int]:
    valid: list[int] = []
    if not config.buffer_empty():
        valid.append(SHIFT)
    if len(config.stack) >= 2:
        s1 = config.stack[-2]
        if s1 != 0:
            valid.extend(left_ids)
            valid.extend(right_nonroot)
        elif config.buffer_empty() and len(config.stack) == 2:
            valid.extend(right_root)
    return valid


def _argmax(table: Table, feats: Sequence[str], valid: Sequence[int]) -> int:
    scores: dict[int, float] = {}
    for f in feats:
        row = table.get(f)
        if row:
            for tid, wt in row.items():
                scores[tid] = scores.get(tid, 0.0) + wt
    best = valid[0]
    best_score = scores.get(best, 0.0)
    for tid in valid[1:]:
        s = scores.get(tid, 0.0)
        if s > best_score:
            best, best_score = tid, s
    return best


def _apply(config: Configuration, tid: int, labels: Sequence[str]) -> None:
    if tid == SHIFT:
        config.shift()
    elif tid <= len(labels):
        config.left_arc(labels[tid - 1])
    else:
        config.right_arc(labels[tid - 1 - len(labels)])


def _transition_sets(labels: Sequence[str], root_labels: Sequence[str],
                     nonroot_labels: Sequence[str],
                     ) -> tuple[list[int], list[int], list[int]]:
    n = len(labels)
    root_set = set(root_labels) or set(labels)
    nonroot_set = set(nonroot_labels) or set(labels)
    left_ids = [1 + j for j, lab in enumerate(labels) if lab in nonroot_set]
    right_nonroot = [1 + n + j for j, lab in enumerate(labels) if lab in nonroot_set]
    right_root = [1 + n + j for j, lab in enumerate(labels) if lab in root_set]
    return left_ids, right_nonroot, right_root


def _fingerprint(tb: Treebank) -> str:
    return hashlib.sha256(write_conllu(tb).encode("utf-8")).hexdigest()[:16]


def train(stages: Sequence[tuple[Treebank, int]], seed: int) -> ParserModel:
    """Averaged-perceptron training over one or more (treebank, epochs)
    stages, continuing weights and averaging across stages.

    One stage over a concatenated corpus gives the Concat regime; a gold
    stage followed by a silver stage gives the Finetune regime. Sentence
    order is shuffled each epoch from a stream seeded once with ``seed``.
    """
    if not stages:
        raise ContractError("at least one training stage required")
    label_set: set[str] = set()
    root_label_set: set[str] = set()
    nonroot_label_set: set[str] = set()
    for tb, _ in stages:
        for tree in tb.trees:
            for tok in tree.tokens:
                label_set.add(tok.deprel)
                if tok.head == 0:
                    root_label_set.add(tok.deprel)
                else:
                    nonroot_label_set.add(tok.deprel)
    labels = sorted(label_set)
    root_labels = sorted(root_label_set)
    nonroot_labels = sorted(nonroot_label_set)
    left_ids, right_nonroot, right_root = _transition_sets(labels, root_labels,
                                                           nonroot_labels)

    weights: Table = {}
    totals: Table = {}
    stamps: dict[str, dict[int, int]] = {}
    step = 0
    updates = 0

    def upd(f: str, tid: int, delta: float) -> None:
        row = weights.setdefault(f, {})
        tot = totals.setdefault(f, {})
        stp = stamps.setdefault(f, {})
        cur = row.get(tid, 0.0)
        tot[tid] = tot.get(tid, 0.0) + (step - stp.get(tid, 0)) * cur
        stp[tid] = step
        row[tid] = cur + delta

    rng = random.Random(seed)
    skipped: list[int] = []
    fingerprints: list[str] = []
    epochs_run: list[int] = []
    trained_sentences = 0

    for tb, epochs in stages:
        usable: list[tuple[DepTree, list[tuple[str, str | None]]]] = []
        skip = 0
        for tree in tb.trees:
            seq = static_oracle(tree)
            if seq is None:
                skip += 1
            else:
                usable.append((tree, seq))
        skipped.append(skip)
        fingerprints.append(_fingerprint(tb))
        epochs_run.append(epochs)
        if not usable:
            raise ContractError("training stage has no projective trees")
        order = list(range(len(usable)))
        for _ in range(epochs):
            rng.shuffle(order)
            for idx in order:
                tree, seq = usable[idx]
                trained_sentences += 1
                forms, upos = tree.forms(), tree.upos_tags()
                config = Configuration(n=len(tree))
                for kind, label in seq:
                    step += 1
                    gold_tid = _transition_id(labels, kind, label)
                    feats = _features(config, forms, upos)
                    valid = _valid_transitions(config, left_ids,
                                               right_nonroot, right_root)
                    pred_tid = _argmax(weights, feats, valid)
                    if pred_tid != gold_tid:
                        updates += 1
                        for f in feats:
                            upd(f, gold_tid, 1.0)
                            upd(f, pred_tid, -1.0)
                    _apply(config, gold_tid, labels)

    averaged: Table = {}
    if step:
        for f, row in weights.items():
            arow = {}
            for tid, wt in row.items():
                total = totals[f][tid] + (step - stamps[f][tid]) * wt
                arow[tid] = total / step
            averaged[f] = arow

    meta = {
        "seed": seed,
        "iterations": step,
        "updates": updates,
        "trained_sentences": trained_sentences,
        "stages": [{"fingerprint": fp, "epochs": ep, "skipped_nonprojective": sk}
                   for fp, ep, sk in zip(fingerprints, epochs_run, skipped)],
    }
    return ParserModel(labels=tuple(labels), root_labels=tuple(root_labels),
                       nonroot_labels=tuple(nonroot_labels),
                       weights=weights, averaged=averaged,
                       feature_templates_version=TEMPLATES_VERSION, meta=meta)


def parse(model: ParserModel, forms: Sequence[str], upos: Sequence[str],
          ) -> tuple[list[int], list[str]]:
    """Greedy decode with averaged weights; always yields a projective
    single-rooted analysis. Returns (heads, deprels) for tokens 1..n."""
    if len(forms) != len(upos):
        raise ContractError("forms and UPOS sequences must have equal length")
    if not forms:
        return [], []
    labels = list(model.labels)
    left_ids, right_nonroot, right_root = _transition_sets(
        labels, model.root_labels, model.nonroot_labels)
    config = Configuration(n=len(forms))
    while not config.is_terminal():
        feats = _features(config, forms, upos)
        valid = _valid_transitions(config, left_ids, right_nonroot, right_root)
        _apply(config, _argmax(model.averaged, feats, valid), labels)
    heads = [config.arcs[i][0] for i in range(1, len(forms) + 1)]
    deprels = [config.arcs[i][1] for i in range(1, len(forms) + 1)]
    return heads, deprels


def parse_tree(model: ParserModel, tree: DepTree) -> DepTree:
    """Re-parse one sentence, keeping its surface columns and comments."""
    heads, deprels = parse(model, tree.forms(), tree.upos_tags())
    tokens = tuple(Token(id=t.id, form=t.form, upos=t.upos, head=heads[i],
                         deprel=deprels[i], lemma=t.lemma, misc=t.misc)
                   for i, t in enumerate(tree.tokens))
    return DepTree(tokens=tokens, comments=tree.comments, sent_id=tree.sent_id)


def parse_treebank(model: ParserModel, trees: Iterable[DepTree],
                   source_name: str = "parsed") -> Treebank:
    return Treebank(trees=tuple(parse_tree(model, t) for t in trees),
                    source_name=source_name)


def holdout_split(tb: Treebank, holdout_size: int, seed: int,
                  ) -> tuple[Treebank, Treebank]:
    """Deterministic (rest, holdout) split; holdout indices are a fixed-seed
    sample, both halves keep original order."""
    if not 0 <= holdout_size <= len(tb):
        raise ContractError(f"holdout size {holdout_size} out of range 0..{len(tb)}")
    rng = random.Random(seed)
    chosen = set(rng.sample(range(len(tb)), holdout_size))
    rest = tuple(t for i, t in enumerate(tb.trees) if i not in chosen)
    held = tuple(t for i, t in enumerate(tb.trees) if i in chosen)
    return (Treebank(trees=rest, source_name=tb.source_name),
            Treebank(trees=held, source_name=f"{tb.source_name}-holdout"))


def save_model(model: ParserModel, path) -> None:
    """Line-based model file: magic, template version, label tables, meta,
    and sorted weight quadruples (feature, transition, raw, averaged)."""
    rows = []
    for f in sorted(model.weights):
        arow = model.averaged.get(f, {})
        for tid in sorted(model.weights[f]):
            rows.append(f"{f}\t{tid}\t{model.weights[f][tid]!r}\t{arow.get(tid, 0.0)!r}")
    lines = [
        MAGIC,
        f"templates\t{model.feature_templates_version}",
        "labels\t" + "\t".join(model.labels),
        "rootlabels\t" + "\t".join(model.root_labels),
        "nonrootlabels\t" + "\t".join(model.nonroot_labels),
        "meta\t" + json.dumps(model.meta, sort_keys=True),
        f"weights\t{len(rows)}",
        *rows,
        "end",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> ParserModel:
    """Inverse of save_model; fails loudly on version mismatch, truncation,
    or malformed content."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read model file {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise FormatError(f"{path}: not a model file (bad magic)")

    def expect(i: int, key: str) -> list[str]:
        if i >= len(lines) or not lines[i].startswith(key + "\t"):
            if i < len(lines) and lines[i] == key:  # empty tail allowed
                return []
            raise FormatError(f"{path}: missing '{key}' section")
        return lines[i].split("\t")[1:]

    templates = expect(1, "templates")
    if templates != [TEMPLATES_VERSION]:
        raise FormatError(f"{path}: feature template version "
                          f"{templates[0] if templates else '?'} does not match "
                          f"this build ({TEMPLATES_VERSION})")
    labels = tuple(expect(2, "labels"))
    root_labels = tuple(expect(3, "rootlabels"))
    nonroot_labels = tuple(expect(4, "nonrootlabels"))
    meta_cols = expect(5, "meta")
    count_cols = expect(6, "weights")
    try:
        meta = json.loads(meta_cols[0]) if meta_cols else {}
        count = int(count_cols[0])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed header: {exc}") from exc

    body = lines[7:]
    if len(body) < count + 1 or body[count] != "end":
        raise FormatError(f"{path}: truncated model file "
                          f"(expected {count} weight rows plus end marker)")
    weights: Table = {}
    averaged: Table = {}
    for lineno, row in enumerate(body[:count], start=8):
        cols = row.split("\t")
        if len(cols) != 4:
            raise FormatError(f"{path}:{lineno}: malformed weight row")
        try:
            f, tid, raw, avg = cols[0], int(cols[1]), float(cols[2]), float(cols[3])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: malformed weight row: {exc}") from exc
        weights.setdefault(f, {})[tid] = raw
        averaged.setdefault(f, {})[tid] = avg
    return ParserModel(labels=labels, root_labels=root_labels,
                       nonroot_labels=nonroot_labels, weights=weights,
                       averaged=averaged, feature_templates_version=TEMPLATES_VERSION,
                       meta=meta)
