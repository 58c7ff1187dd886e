"""Corpus descriptive statistics and relation-distribution comparisons."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .conllu import Treebank
from .errors import ContractError

DEFAULT_EXCLUDE = frozenset({"punct", "root"})
PERCENTILE_POINTS = (25, 50, 75, 90, 95)


@dataclass(frozen=True)
class RelationDistribution:
    corpus_name: str
    proportions: dict[str, float]
    counted_tokens: int
    excluded: frozenset[str]


def relation_distribution(tb: Treebank, exclude: Iterable[str] = DEFAULT_EXCLUDE,
                          coarse: bool = True, name: str | None = None,
                          ) -> RelationDistribution:
    """Normalized relation-label frequencies over a treebank.

    Labels are truncated at the colon by default (``coarse``); exclusion is
    tested on the coarse form either way.
    """
    excluded = frozenset(exclude)
    counts: dict[str, int] = {}
    total = 0
    for tree in tb.trees:
        for tok in tree.tokens:
            coarse_label = tok.deprel.split(":", 1)[0]
            if coarse_label in excluded:
                continue
            label = coarse_label if coarse else tok.deprel
            counts[label] = counts.get(label, 0) + 1
            total += 1
    proportions = {lab: c / total for lab, c in sorted(counts.items())} if total else {}
    return RelationDistribution(corpus_name=name or tb.source_name,
                                proportions=proportions, counted_tokens=total,
                                excluded=excluded)


@dataclass(frozen=True)
class CorpusSummary:
    sentence_count: int
    token_count: int
    mean_length: float | None  # None when the treebank is empty
    percentiles: dict[int, int]


def corpus_summary(tb: Treebank) -> CorpusSummary:
    """Sentence/token counts, mean length, and nearest-rank length
    percentiles."""
    lengths = sorted(len(t) for t in tb.trees)
    tokens = sum(lengths)
    if not lengths:
        return CorpusSummary(0, 0, None, {})
    pct = {}
    for p in PERCENTILE_POINTS:
        rank = max(1, -(-p * len(lengths) // 100))  # ceil
        pct[p] = lengths[rank - 1]
    return CorpusSummary(sentence_count=len(lengths), token_count=tokens,
                         mean_length=tokens / len(lengths), percentiles=pct)


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    shares: dict[str, float]  # corpus name -> proportion (0 when absent)
    max_share: float


def compare_distributions(dists: Sequence[RelationDistribution],
                          min_share: float = 0.02) -> list[ComparisonRow]:
    """Side-by-side label shares for labels reaching ``min_share`` in at
    least one corpus, sorted by max share descending."""
    if len(dists) < 2:
        raise ContractError("need at least two distributions to compare")
    labels = set()
    for d in dists:
        labels |= {lab for lab, share in d.proportions.items() if share >= min_share}
    rows = []
    for lab in labels:
        shares = {d.corpus_name: d.proportions.get(lab, 0.0) for d in dists}
        rows.append(ComparisonRow(label=lab, shares=shares,
                                  max_share=max(shares.values())))
    rows.sort(key=lambda r: (-r.max_share, r.label))
    return rows


def comparison_tsv(rows: Sequence[ComparisonRow],
                   corpus_names: Sequence[str]) -> str:
    lines = ["label\t" + "\t".join(corpus_names)]
    for row in rows:
        lines.append(row.label + "\t"
                     + "\t".join(f"{row.shares.get(c, 0.0):.4f}" for c in corpus_names))
    return "\n".join(lines) + "\n"
