"""Combine k predicted trees per sentence by arc voting plus maximum
spanning arborescence reparsing (Chu-Liu/Edmonds).

Determinism: vote aggregation is order-free; weight ties inside the
arborescence search prefer the smaller head index, then the shorter arc;
label ties prefer the lexicographically smallest label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .conllu import DepTree, Token, Treebank, validate
from .errors import ContractError


@dataclass(frozen=True)
class VoteGraph:
    """Arc votes for one sentence: weight[(head, dep)] and, per arc, the
    weight each proposed label received."""

    n: int
    weight: dict[tuple[int, int], float]
    labels: dict[tuple[int, int], dict[str, float]]


def build_votes(trees: Sequence[DepTree],
                voter_weights: Sequence[float] | None = None) -> VoteGraph:
    """Aggregate arcs of k parallel trees over identical token sequences.

    ``voter_weights`` defaults to uniform 1.0 per tree.
    """
    if not trees:
        raise ContractError("need at least one tree to ensemble")
    if voter_weights is None:
        voter_weights = [1.0] * len(trees)
    if len(voter_weights) != len(trees):
        raise ContractError("one weight per voter required")
    first = trees[0]
    forms = first.forms()
    weight: dict[tuple[int, int], float] = {}
    labels: dict[tuple[int, int], dict[str, float]] = {}
    for tree, w in zip(trees, voter_weights):
        if tree.forms() != forms:
            raise ContractError("voter trees must share an identical token sequence")
        if validate(tree):
            raise ContractError(f"voter tree {tree.sent_id!r} is not a valid tree")
        for tok in tree.tokens:
            arc = (tok.head, tok.id)
            weight[arc] = weight.get(arc, 0.0) + w
            lab = labels.setdefault(arc, {})
            lab[tok.deprel] = lab.get(tok.deprel, 0.0) + w
    return VoteGraph(n=len(first), weight=weight, labels=labels)


def _best_incoming(arcs: dict[tuple[int, int], float], nodes: set[int],
                   dep: int) -> tuple[int, float]:
    best = None
    for (h, d), w in arcs.items():
        if d != dep or h not in nodes:
            continue
        key = (-w, h, abs(h - d))
        if best is None or key < best[0]:
            best = (key, h, w)
    if best is None:
        raise ContractError(f"no incoming arc for node {dep}")
    return best[1], best[2]


def _max_arborescence(nodes: set[int], root: int,
                      arcs: dict[tuple[int, int], float]) -> dict[int, int]:
    """Maximum-weight spanning arborescence over ``nodes`` rooted at
    ``root``; returns dep -> head. Assumes one exists (voter trees always
    provide one). Recursive contraction form."""
    in_arc = {d: _best_incoming(arcs, nodes, d) for d in nodes if d != root}

    # Detect a cycle among the chosen in-arcs.
    color: dict[int, int] = {}
    cycle: list[int] | None = None
    for start in sorted(in_arc):
        if start in color:
            continue
        path = []
        cur = start
        while cur != root and cur not in color and cur not in path:
            path.append(cur)
            cur = in_arc[cur][0]
        if cur != root and cur not in color:  # closed a new cycle
            cycle = path[path.index(cur):]
            break
        for p in path:
            color[p] = 1
    if cycle is None:
        return {d: h for d, (h, _) in in_arc.items()}

    cyc = set(cycle)
    super_node = max(nodes) + 1
    new_nodes = (nodes - cyc) | {super_node}
    new_arcs: dict[tuple[int, int], float] = {}
    # original arc represented by each contracted arc
    origin: dict[tuple[int, int], tuple[int, int]] = {}
    for (h, d), w in arcs.items():
        if h not in nodes or d not in nodes or (h in cyc and d in cyc):
            continue
        if d in cyc:
            key, adj = (h, super_node), w - in_arc[d][1]
        elif h in cyc:
            key, adj = (super_node, d), w
        else:
            key, adj = (h, d), w
        if (key not in new_arcs or adj > new_arcs[key]
                or (adj == new_arcs[key] and (h, d) < origin[key])):
            new_arcs[key] = adj
            origin[key] = (h, d)

    contracted = _max_arborescence(new_nodes, root, new_arcs)

    result: dict[int, int] = {}
    entry_dep = None
    for d, h in contracted.items():
        oh, od = origin[(h, d)]
        result[od] = oh
        if d == super_node:
            entry_dep = od
    assert entry_dep is not None, "contracted node must have an in-arc"
    # Keep all cycle arcs except the one displaced by the entering arc.
    for d in cycle:
        if d != entry_dep:
            result[d] = in_arc[d][0]
    return result


def reparse(votes: VoteGraph, force_single_root: bool = False,
            ) -> tuple[list[int], list[str]]:
    """Heads and labels of the maximum-vote arborescence.

    Returns (heads, labels) where position i describes token i+1. With
    ``force_single_root``, each candidate root child is tried with root
    out-degree fixed to one and the best total kept.
    """
    nodes = set(range(votes.n + 1))
    arcs = {arc: w for arc, w in votes.weight.items() if w > 0}

    def solve(restricted: dict[tuple[int, int], float]) -> tuple[float, dict[int, int]]:
        tree = _max_arborescence(nodes, 0, restricted)
        total = sum(restricted[(h, d)] for d, h in tree.items())
        return total, tree

    if not force_single_root:
        _, tree = solve(arcs)
    else:
        candidates = sorted(d for (h, d) in arcs if h == 0)
        best = None
        for cand in candidates:
            sub = {(h, d): w for (h, d), w in arcs.items()
                   if h != 0 or d == cand}
            total, tree = solve(sub)
            if best is None or total > best[0]:
                best = (total, tree)
        assert best is not None
        tree = best[1]

    heads = [tree[d] for d in range(1, votes.n + 1)]
    labels = []
    for d in range(1, votes.n + 1):
        lab = votes.labels[(tree[d], d)]
        labels.append(sorted(lab.items(), key=lambda kv: (-kv[1], kv[0]))[0][0])
    return heads, labels


def combine(trees: Sequence[DepTree], force_single_root: bool = False,
            voter_weights: Sequence[float] | None = None) -> DepTree:
    """Ensemble k parallel trees into one tree; surface columns are taken
    from the first voter."""
    votes = build_votes(trees, voter_weights=voter_weights)
    heads, labels = reparse(votes, force_single_root=force_single_root)
    base = trees[0]
    tokens = tuple(Token(id=t.id, form=t.form, upos=t.upos, head=heads[i],
                         deprel=labels[i], lemma=t.lemma, misc=t.misc)
                   for i, t in enumerate(base.tokens))
    return DepTree(tokens=tokens, comments=base.comments, sent_id=base.sent_id)


def combine_treebanks(banks: Sequence[Treebank], force_single_root: bool = False,
                      ) -> Treebank:
    """Sentence-wise ensemble of k parallel treebanks."""
    if not banks:
        raise ContractError("need at least one treebank")
    sizes = {len(tb) for tb in banks}
    if len(sizes) != 1:
        raise ContractError(f"treebanks disagree on sentence count: {sorted(sizes)}")
    combined = tuple(combine([tb.trees[i] for tb in banks],
                             force_single_root=force_single_root)
                     for i in range(len(banks[0])))
    return Treebank(trees=combined, source_name="ensemble")
