"""Project a lead sentence's dependency tree onto its headline tokens.

The headline is a (possibly non-contiguous) subsequence of the lead
sentence. Projection keeps the union of root-paths of all headline tokens,
then repeatedly removes the remaining non-headline nodes: each removed
node's retained children are re-attached to the promoted child, which takes
over the removed node's position in the tree and its incoming relation
label.

Two behaviors are pinned for determinism:

* the node removed next is the first non-headline node found by a
  depth-first walk from the virtual root in which children are pushed in
  ascending index order and examined last-in-first-out;
* the promoted child is the removed node's largest-index retained child,
  so an omitted matrix verb hands its role to the complement on its right
  ("X said it plans to cut jobs" -> headline root "cut") rather than to its
  subject.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .align import Alignment, align_subsequence
from .conllu import DepTree, Token, Treebank, validate
from .errors import ContractError, HeadparseError


@dataclass(frozen=True)
class ProjectionResult:
    """Projected headline tree plus a trace of the promotion loop.

    ``promotions`` records (removed sentence id, promoted sentence id,
    inherited label) in removal order; ``promoted_ids`` are the sentence
    token ids that received a new incoming label.
    """

    tree: DepTree
    collapsed_count: int
    promoted_ids: tuple[int, ...]
    promotions: tuple[tuple[int, int, str], ...] = ()


def extract_subtree(sentence: DepTree, headline_nodes: Iterable[int],
                    ) -> tuple[set[int], set[tuple[int, int]]]:
    """Union of root-paths of all headline nodes, plus every sentence edge
    with both endpoints inside that union. Node 0 (virtual root) is always
    part of the returned node set."""
    wanted = set(headline_nodes)
    n = len(sentence)
    if not wanted:
        raise ContractError("headline node set must be non-empty")
    if any(i < 1 or i > n for i in wanted):
        raise ContractError(f"headline node out of range 1..{n}: {sorted(wanted)}")
    heads = {t.id: t.head for t in sentence.tokens}
    nodes = {0}
    for i in wanted:
        cur = i
        while cur != 0 and cur not in nodes:
            nodes.add(cur)
            cur = heads[cur]
    edges = {(heads[i], i) for i in nodes if i != 0 and heads[i] in nodes}
    return nodes, edges


def project_tree(sentence: DepTree, alignment: Alignment) -> ProjectionResult:
    """Prune ``sentence`` down to the aligned headline tokens.

    Token ids are renumbered 1..len(alignment) in surface order; form, UPOS,
    lemma and misc are copied from the sentence tokens.
    """
    n = len(sentence)
    subset = alignment.sentence_indices()
    if any(i < 1 or i > n for i in subset):
        raise ContractError(f"alignment index out of range 1..{n}")
    subset_set = set(subset)

    nodes, _ = extract_subtree(sentence, subset_set)
    included = nodes - {0}
    head = {t.id: t.head for t in sentence.tokens if t.id in included}
    rel = {t.id: t.deprel for t in sentence.tokens if t.id in included}

    def children_map() -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i in sorted(included):
            out.setdefault(head[i], []).append(i)
        return out

    promotions: list[tuple[int, int, str]] = []
    while len(included) > len(subset_set):
        children = children_map()
        # Depth-first, children pushed ascending and popped LIFO.
        stack = [0]
        target = None
        while stack:
            cur = stack.pop()
            if cur != 0 and cur not in subset_set:
                target = cur
                break
            stack.extend(children.get(cur, ()))
        assert target is not None, "extra node unreachable from root"
        siblings = children.get(target)
        assert siblings, "every removable node governs a retained node"
        promoted = siblings[-1]
        for c in siblings:
            head[c] = promoted
        head[promoted] = head[target]
        rel[promoted] = rel[target]
        promotions.append((target, promoted, rel[promoted]))
        included.discard(target)
        del head[target], rel[target]

    order = sorted(subset_set)
    renumber = {old: new for new, old in enumerate(order, start=1)}
    tokens = []
    for old in order:
        src = sentence.tokens[old - 1]
        tokens.append(Token(id=renumber[old], form=src.form, upos=src.upos,
                            head=renumber.get(head[old], 0), deprel=rel[old],
                            lemma=src.lemma, misc=src.misc))
    tree = DepTree(tokens=tuple(tokens), sent_id=sentence.sent_id)
    violations = validate(tree)
    assert not violations, f"projection produced an invalid tree: {violations}"
    return ProjectionResult(tree=tree, collapsed_count=len(promotions),
                            promoted_ids=tuple(p for _, p, _ in promotions),
                            promotions=tuple(promotions))


@dataclass(frozen=True)
class PairOutcome:
    index: int
    sent_id: str | None
    status: str  # projected | no-alignment | invalid-sentence | error
    collapsed: int = 0
    headline_len: int = 0
    detail: str = ""


@dataclass
class SilverReport:
    outcomes: list[PairOutcome] = field(default_factory=list)

    @property
    def kept(self) -> int:
        return sum(1 for o in self.outcomes if o.status == "projected")

    @property
    def dropped(self) -> int:
        return len(self.outcomes) - self.kept

    @property
    def collapsed_total(self) -> int:
        return sum(o.collapsed for o in self.outcomes)


def _project_pair(item: tuple[int, Sequence[str], DepTree, bool],
                  ) -> tuple[PairOutcome, DepTree | None]:
    index, headline, tree, case_sensitive = item
    sent_id = tree.sent_id or f"pair-{index}"
    if validate(tree):
        return PairOutcome(index, sent_id, "invalid-sentence"), None
    if not headline or not len(tree):
        return PairOutcome(index, sent_id, "no-alignment"), None
    alignment = align_subsequence(headline, tree.forms(),
                                  case_sensitive=case_sensitive)
    if alignment is None:
        return PairOutcome(index, sent_id, "no-alignment"), None
    try:
        result = project_tree(tree, alignment)
    except HeadparseError as exc:  # recorded, never fatal
        return PairOutcome(index, sent_id, "error", detail=str(exc)), None
    out_tree = DepTree(tokens=result.tree.tokens, sent_id=sent_id)
    outcome = PairOutcome(index, sent_id, "projected",
                          collapsed=result.collapsed_count,
                          headline_len=len(alignment))
    return outcome, out_tree


def build_silver_corpus(pairs: Sequence[tuple[Sequence[str], DepTree]],
                        case_sensitive: bool = False,
                        jobs: int = 1) -> tuple[Treebank, SilverReport]:
    """Align and project every (headline, sentence tree) pair.

    Per-pair failures are recorded in the report and never abort the run.
    Output tree order follows input order regardless of ``jobs``.
    """
    items = [(i, headline, tree, case_sensitive)
             for i, (headline, tree) in enumerate(pairs)]
    if jobs > 1 and len(items) > 1:
        from concurrent.futures import ProcessPoolExecutor
        chunk = max(1, len(items) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_project_pair, items, chunksize=chunk))
    else:
        results = [_project_pair(item) for item in items]
    report = SilverReport()
    trees = []
    for outcome, tree in results:
        report.outcomes.append(outcome)
        if tree is not None:
            trees.append(tree)
    return Treebank(trees=tuple(trees), source_name="silver"), report
