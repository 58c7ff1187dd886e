"""Subsequence alignment between a headline and its lead sentence.

A headline is usable for projection only when its tokens embed, in order,
into the lead sentence. The embedding chosen is the greedy leftmost one,
which is the lexicographically smallest by sentence-index vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

from .conllu import DepTree
from .errors import ContractError, ParseError


@dataclass(frozen=True)
class Alignment:
    """Injective order-preserving map: (headline_index, sentence_index),
    both 1-based, sentence indices strictly increasing."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def sentence_indices(self) -> list[int]:
        return [s for _, s in self.pairs]


def align_subsequence(headline: Sequence[str], sentence: Sequence[str],
                      case_sensitive: bool = False) -> Alignment | None:
    """Greedy leftmost embedding of headline tokens into sentence tokens.

    Scans the sentence left to right, matching each headline token to the
    earliest unconsumed sentence token with equal form (case-folded unless
    ``case_sensitive``). Returns None when the sentence is exhausted first.
    """
    if not headline or not sentence:
        raise ContractError("align_subsequence requires non-empty token sequences")

    def key(tok: str) -> str:
        return tok if case_sensitive else tok.casefold()

    pairs: list[tuple[int, int]] = []
    si = 0
    for hi, htok in enumerate(headline, start=1):
        want = key(htok)
        while si < len(sentence) and key(sentence[si]) != want:
            si += 1
        if si == len(sentence):
            return None
        pairs.append((hi, si + 1))
        si += 1
    return Alignment(pairs=tuple(pairs))


class FilterCounts(NamedTuple):
    kept: int
    dropped: int


def filter_pairs(pairs: Sequence[tuple[Sequence[str], DepTree]],
                 case_sensitive: bool = False,
                 ) -> tuple[list[tuple[Alignment, DepTree]], FilterCounts]:
    """Keep only (headline, sentence tree) pairs satisfying the subsequence
    constraint; headline tokens are matched against the tree's forms."""
    kept: list[tuple[Alignment, DepTree]] = []
    dropped = 0
    for headline, tree in pairs:
        alignment = None
        if headline and len(tree):
            alignment = align_subsequence(headline, tree.forms(),
                                          case_sensitive=case_sensitive)
        if alignment is None:
            dropped += 1
        else:
            kept.append((alignment, tree))
    return kept, FilterCounts(kept=len(kept), dropped=dropped)


def read_pairs_tsv(source) -> list[tuple[list[str], list[str]]]:
    """Read headline/lead-sentence pairs from a two-column UTF-8 TSV.

    Each column is pre-tokenized with single spaces. Returns a list of
    (headline tokens, sentence tokens).
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
        name = str(source)
    else:
        text = source.read()
        name = "<stream>"
    out: list[tuple[list[str], list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"{name}:{lineno}: expected 2 tab-separated columns, "
                             f"got {len(cols)}")
        out.append((cols[0].split(), cols[1].split()))
    return out
