"""Syntax-driven predicate-argument tuple extraction from dependency parses.

A deliberately small, fully documented ruleset:

* predicate heads are tokens tagged VERB, plus any token governing an
  ``nsubj``, ``nsubj:pass`` or ``csubj`` dependent (copular and nominal
  predicates);
* the predicate phrase is the head together with its ``aux``, ``aux:pass``,
  ``cop``, ``mark`` and ``compound:prt`` dependents plus negation
  ``advmod`` dependents (forms not / n't / never / no), in surface order;
* arguments are the full subtree yields of dependents attached as
  ``nsubj``, ``obj``, ``iobj``, ``ccomp``, ``xcomp`` or ``obl`` (subtypes
  included), in surface order.

One tuple per predicate head, emitted in head-index order. Conjunction
expansion, relative-clause borrowing and other argument-resolution rules
are out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .conllu import DepTree, validate
from .errors import ContractError

SUBJECT_TRIGGER_RELS = {"nsubj", "nsubj:pass", "csubj"}
PREDICATE_PHRASE_RELS = {"aux", "aux:pass", "cop", "mark", "compound:prt"}
NEGATION_FORMS = {"not", "n't", "never", "no"}
ARGUMENT_RELS = ("nsubj", "obj", "iobj", "ccomp", "xcomp", "obl")


def _is_argument_rel(deprel: str) -> bool:
    base = deprel.split(":", 1)[0]
    return base in ARGUMENT_RELS


@dataclass(frozen=True)
class Argument:
    rel: str
    indices: tuple[int, ...]
    text: str


@dataclass(frozen=True)
class ExtractionTuple:
    predicate: tuple[int, ...]
    pred_text: str
    arguments: tuple[Argument, ...]
    sent_id: str | None = None


def _subtree_yield(children: dict[int, list[int]], node: int) -> list[int]:
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        out.append(cur)
        stack.extend(children.get(cur, ()))
    return sorted(out)


def extract(tree: DepTree) -> list[ExtractionTuple]:
    """Extract one predicate-argument tuple per predicate head."""
    if validate(tree):
        raise ContractError(f"extract requires a validated tree "
                            f"(sent_id={tree.sent_id!r})")
    children = tree.children()
    tokens = tree.tokens
    forms = tree.forms()

    heads_with_subjects = set()
    for tok in tokens:
        if tok.deprel in SUBJECT_TRIGGER_RELS:
            heads_with_subjects.add(tok.head)
    predicate_heads = sorted(
        {t.id for t in tokens if t.upos == "VERB"}
        | {h for h in heads_with_subjects if h != 0})

    def text(indices) -> str:
        return " ".join(forms[i - 1] for i in indices)

    tuples = []
    for head in predicate_heads:
        phrase = {head}
        args = []
        for dep in children.get(head, ()):
            dtok = tokens[dep - 1]
            if dtok.deprel in PREDICATE_PHRASE_RELS:
                phrase.add(dep)
            elif dtok.deprel == "advmod" and dtok.form.lower() in NEGATION_FORMS:
                phrase.add(dep)
            elif _is_argument_rel(dtok.deprel):
                span = tuple(_subtree_yield(children, dep))
                assert head not in span, "argument span overlaps predicate head"
                args.append(Argument(rel=dtok.deprel, indices=span,
                                     text=text(span)))
        args.sort(key=lambda a: a.indices[0])
        pred = tuple(sorted(phrase))
        tuples.append(ExtractionTuple(predicate=pred, pred_text=text(pred),
                                      arguments=tuple(args), sent_id=tree.sent_id))
    return tuples


def _normalize(t: ExtractionTuple) -> tuple:
    return (t.predicate, tuple(sorted((a.rel, a.indices) for a in t.arguments)))


def diff_extractions(a: Sequence[Sequence[ExtractionTuple]],
                     b: Sequence[Sequence[ExtractionTuple]]) -> list[int]:
    """Indices of sentences whose normalized tuple sets differ.

    Symmetric: diff(a, b) == diff(b, a).
    """
    if len(a) != len(b):
        raise ContractError(f"parallel corpora required: {len(a)} vs {len(b)} "
                            "sentences")
    out = []
    for i, (ta, tb) in enumerate(zip(a, b)):
        if {_normalize(t) for t in ta} != {_normalize(t) for t in tb}:
            out.append(i)
    return out


def tuple_to_json(t: ExtractionTuple) -> dict:
    return {
        "sent_id": t.sent_id,
        "predicate": list(t.predicate),
        "pred_text": t.pred_text,
        "args": [{"rel": a.rel, "indices": list(a.indices), "text": a.text}
                 for a in t.arguments],
    }


def write_tuples_jsonl(tuple_lists: Sequence[Sequence[ExtractionTuple]]) -> str:
    lines = []
    for tuples in tuple_lists:
        for t in tuples:
            lines.append(json.dumps(tuple_to_json(t), ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")
