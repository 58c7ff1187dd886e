"""Treebank scoring: attachment/exact-match scores, per-relation P/R/F1,
relative error reduction, and the two statistical tests used for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .conllu import Treebank
from .errors import ContractError


@dataclass(frozen=True)
class RelationScore:
    precision: float
    recall: float
    f1: float
    gold_support: int
    predicted_count: int


@dataclass(frozen=True)
class EvalReport:
    """Aggregate scores as percentages plus per-relation breakdown.

    A predicted edge counts as a per-relation true positive only when both
    its head and its full label match gold.
    """

    uas: float
    las: float
    uem: float
    lem: float
    per_relation: dict[str, RelationScore]
    token_count: int
    sentence_count: int
    punct_excluded: bool
    coarse_labels: bool = False


def _pct(num: int, den: int) -> float:
    return 100.0 * num / den if den else 100.0


def score(pred: Treebank, gold: Treebank, exclude_punct: bool = False,
          coarse_labels: bool = False) -> EvalReport:
    """Score a predicted treebank against gold.

    Requires identical sentence segmentation and token forms. With
    ``exclude_punct``, tokens whose gold UPOS is PUNCT are removed from all
    token-level and exact-match counts. Labels are compared as full strings
    (including subtype) unless ``coarse_labels`` truncates at the colon.
    """
    if len(pred) != len(gold):
        raise ContractError(f"sentence count mismatch: predicted {len(pred)}, "
                            f"gold {len(gold)}")

    def lab(s: str) -> str:
        return s.split(":", 1)[0] if coarse_labels else s

    head_correct = 0
    labeled_correct = 0
    token_count = 0
    uem_count = 0
    lem_count = 0
    tp: dict[str, int] = {}
    gold_support: dict[str, int] = {}
    predicted_count: dict[str, int] = {}

    for idx, (pt, gt) in enumerate(zip(pred.trees, gold.trees)):
        if pt.forms() != gt.forms():
            where = gt.sent_id or f"#{idx}"
            raise ContractError(f"token mismatch at sentence {where}: "
                                f"predicted {pt.forms()}, gold {gt.forms()}")
        sent_ok_heads = True
        sent_ok_labels = True
        for ptok, gtok in zip(pt.tokens, gt.tokens):
            if exclude_punct and gtok.upos == "PUNCT":
                continue
            token_count += 1
            plab, glab = lab(ptok.deprel), lab(gtok.deprel)
            gold_support[glab] = gold_support.get(glab, 0) + 1
            predicted_count[plab] = predicted_count.get(plab, 0) + 1
            if ptok.head == gtok.head:
                head_correct += 1
                if plab == glab:
                    labeled_correct += 1
                    tp[plab] = tp.get(plab, 0) + 1
                else:
                    sent_ok_labels = False
            else:
                sent_ok_heads = False
                sent_ok_labels = False
        uem_count += sent_ok_heads
        lem_count += sent_ok_labels

    per_relation: dict[str, RelationScore] = {}
    for rel in sorted(set(gold_support) | set(predicted_count)):
        hits = tp.get(rel, 0)
        p_den = predicted_count.get(rel, 0)
        g_den = gold_support.get(rel, 0)
        p = 100.0 * hits / p_den if p_den else 0.0
        r = 100.0 * hits / g_den if g_den else 0.0
        f1 = 2 * p * r / (p + r) if (p + r) else 0.0
        per_relation[rel] = RelationScore(p, r, f1, g_den, p_den)

    return EvalReport(
        uas=_pct(head_correct, token_count),
        las=_pct(labeled_correct, token_count),
        uem=_pct(uem_count, len(gold)),
        lem=_pct(lem_count, len(gold)),
        per_relation=per_relation,
        token_count=token_count,
        sentence_count=len(gold),
        punct_excluded=exclude_punct,
        coarse_labels=coarse_labels,
    )


def relative_error_reduction(base: EvalReport, improved: EvalReport,
                             ) -> dict[str, float | None]:
    """Per-relation relative error reduction of F1, as a percentage.

    RER = 100 * ((1-f_base) - (1-f_improved)) / (1-f_base) with F1 on a 0-1
    scale. A relation already at F1 = 1 in the base maps to 0.0 when it
    stays perfect and to None (undefined) otherwise.
    """
    if (base.token_count, base.sentence_count) != (improved.token_count,
                                                   improved.sentence_count):
        raise ContractError("reports cover different gold sets")
    out: dict[str, float | None] = {}
    for rel in sorted(set(base.per_relation) | set(improved.per_relation)):
        fb = base.per_relation[rel].f1 / 100.0 if rel in base.per_relation else 0.0
        fi = improved.per_relation[rel].f1 / 100.0 if rel in improved.per_relation else 0.0
        if fb >= 1.0:
            out[rel] = 0.0 if fi >= 1.0 else None
        else:
            out[rel] = 100.0 * ((1.0 - fb) - (1.0 - fi)) / (1.0 - fb)
    return out


# Survival function of the standard normal, via the classic five-term
# rational approximation of the tail (Abramowitz & Stegun 26.2.17,
# coefficients due to Zelen & Severo); max absolute error 7.5e-8.
_P = 0.2316419
_B = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429)


def normal_sf(z: float) -> float:
    """P(Z > z) for standard normal Z; absolute error <= 7.5e-8."""
    if z < 0:
        return 1.0 - normal_sf(-z)
    t = 1.0 / (1.0 + _P * z)
    poly = t * (_B[0] + t * (_B[1] + t * (_B[2] + t * (_B[3] + t * _B[4]))))
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return max(0.0, pdf * poly)


class TwoProportionResult(NamedTuple):
    z: float
    p_value: float
    degenerate: bool


def two_proportion_test(successes_a: int, n_a: int,
                        successes_b: int, n_b: int) -> TwoProportionResult:
    """Pooled two-population proportion z-test with two-sided p-value."""
    if n_a < 1 or n_b < 1:
        raise ContractError("sample sizes must be >= 1")
    if not (0 <= successes_a <= n_a and 0 <= successes_b <= n_b):
        raise ContractError("successes must lie in [0, n]")
    pooled = (successes_a + successes_b) / (n_a + n_b)
    if pooled <= 0.0 or pooled >= 1.0:
        return TwoProportionResult(z=0.0, p_value=1.0, degenerate=True)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b))
    z = (successes_a / n_a - successes_b / n_b) / se
    p = min(1.0, 2.0 * normal_sf(abs(z)))
    return TwoProportionResult(z=z, p_value=p, degenerate=False)


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float | None:
    """Cohen's kappa with empirical marginals; None when undefined
    (chance agreement 1 but observed agreement below 1)."""
    if len(labels_a) != len(labels_b):
        raise ContractError("label sequences must have equal length")
    n = len(labels_a)
    if n < 1:
        raise ContractError("label sequences must be non-empty")
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a: dict = {}
    counts_b: dict = {}
    for a in labels_a:
        counts_a[a] = counts_a.get(a, 0) + 1
    for b in labels_b:
        counts_b[b] = counts_b.get(b, 0) + 1
    p_e = sum(counts_a.get(k, 0) * counts_b.get(k, 0)
              for k in set(counts_a) | set(counts_b)) / (n * n)
    if p_e >= 1.0:
        return 1.0 if p_o >= 1.0 else None
    return (p_o - p_e) / (1.0 - p_e)


def format_report(report: EvalReport) -> str:
    """Human-readable score table (per-relation rows sorted by support)."""
    lines = [
        f"sentences: {report.sentence_count}   tokens: {report.token_count}"
        f"   punct excluded: {'yes' if report.punct_excluded else 'no'}"
        f"   coarse labels: {'yes' if report.coarse_labels else 'no'}",
        f"UAS {report.uas:6.2f}   LAS {report.las:6.2f}   "
        f"UEM {report.uem:6.2f}   LEM {report.lem:6.2f}",
        "",
        f"{'relation':<16}{'gold':>6}{'pred':>6}{'P':>8}{'R':>8}{'F1':>8}",
    ]
    for rel, rs in sorted(report.per_relation.items(),
                          key=lambda kv: (-kv[1].gold_support, kv[0])):
        lines.append(f"{rel:<16}{rs.gold_support:>6}{rs.predicted_count:>6}"
                     f"{rs.precision:>8.2f}{rs.recall:>8.2f}{rs.f1:>8.2f}")
    return "\n".join(lines)


def report_to_json(report: EvalReport) -> dict:
    return {
        "schema_version": 1,
        "uas": report.uas,
        "las": report.las,
        "uem": report.uem,
        "lem": report.lem,
        "token_count": report.token_count,
        "sentence_count": report.sentence_count,
        "punct_excluded": report.punct_excluded,
        "coarse_labels": report.coarse_labels,
        "per_relation": {
            rel: {
                "precision": rs.precision,
                "recall": rs.recall,
                "f1": rs.f1,
                "gold_support": rs.gold_support,
                "predicted_count": rs.predicted_count,
            }
            for rel, rs in report.per_relation.items()
        },
    }
