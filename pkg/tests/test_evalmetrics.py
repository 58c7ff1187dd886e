"""Scoring, error-reduction arithmetic, and the two statistical tests."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headparse.conllu import Token, DepTree
from headparse.errors import ContractError
from headparse.evalmetrics import (cohen_kappa, normal_sf,
                                   relative_error_reduction, score,
                                   two_proportion_test)

from fixtures import as_treebank, random_valid_tree, tree


def test_identity_scores_100_everywhere():
    rng = random.Random(3)
    gold = as_treebank([random_valid_tree(rng.randint(1, 8), rng)
                        for _ in range(10)])
    report = score(gold, gold)
    assert (report.uas, report.las, report.uem, report.lem) == (100, 100, 100, 100)
    for rs in report.per_relation.values():
        assert (rs.precision, rs.recall, rs.f1) == (100, 100, 100)


def _five(forms, heads, labels, upos=None):
    upos = upos or ["NOUN"] * len(forms)
    return tree(list(zip(forms, upos, heads, labels)))


def test_hand_scored_two_sentence_fixture():
    forms = ["a", "b", "c", "d", "e"]
    gold1 = _five(forms, [2, 0, 2, 3, 3], ["nsubj", "root", "obj", "nmod", "amod"])
    gold2 = _five(forms, [3, 3, 0, 3, 4], ["det", "nsubj", "root", "obj", "nmod"])
    # sentence 1: one head error (token 4)
    pred1 = _five(forms, [2, 0, 2, 2, 3], ["nsubj", "root", "obj", "nmod", "amod"])
    # sentence 2: one head error (token 2) plus one label-only error (token 4)
    pred2 = _five(forms, [3, 1, 0, 3, 4], ["det", "nsubj", "root", "obl", "nmod"])
    report = score(as_treebank([pred1, pred2]), as_treebank([gold1, gold2]))
    assert report.uas == pytest.approx(80.0)
    assert report.las == pytest.approx(70.0)
    assert report.uem == pytest.approx(0.0)
    assert report.lem == pytest.approx(0.0)
    assert report.token_count == 10


def test_per_relation_counts_on_label_confusion():
    gold = _five(["x", "y"], [2, 0], ["nsubj", "root"])
    pred = _five(["x", "y"], [2, 0], ["obj", "root"])
    report = score(as_treebank([pred]), as_treebank([gold]))
    nsubj = report.per_relation["nsubj"]
    obj = report.per_relation["obj"]
    assert nsubj.gold_support == 1 and nsubj.predicted_count == 0
    assert nsubj.recall == 0.0
    assert obj.predicted_count == 1 and obj.gold_support == 0
    assert obj.precision == 0.0


def test_root_recall_shape():
    # three sentences; predicted root correct in two of them
    gold = [_five(["a", "b"], [2, 0], ["nsubj", "root"]) for _ in range(3)]
    preds = [
        _five(["a", "b"], [2, 0], ["nsubj", "root"]),
        _five(["a", "b"], [2, 0], ["nsubj", "root"]),
        _five(["a", "b"], [0, 1], ["root", "obj"]),
    ]
    report = score(as_treebank(preds), as_treebank(gold))
    assert report.per_relation["root"].recall == pytest.approx(100 * 2 / 3)


def test_exclude_punct_removes_gold_punct_tokens():
    gold = _five(["a", "b", "."], [2, 0, 2], ["nsubj", "root", "punct"],
                 upos=["NOUN", "VERB", "PUNCT"])
    pred = _five(["a", "b", "."], [2, 0, 1], ["nsubj", "root", "punct"],
                 upos=["NOUN", "VERB", "PUNCT"])
    full = score(as_treebank([pred]), as_treebank([gold]))
    filtered = score(as_treebank([pred]), as_treebank([gold]), exclude_punct=True)
    assert full.uas == pytest.approx(100 * 2 / 3)
    assert full.uem == 0.0
    assert filtered.token_count == 2
    assert filtered.uas == 100.0
    assert filtered.uem == 100.0  # exact match computed on the filtered set
    assert "punct" not in filtered.per_relation


def test_coarse_labels_flag():
    gold = _five(["a", "b"], [2, 0], ["nsubj:pass", "root"])
    pred = _five(["a", "b"], [2, 0], ["nsubj", "root"])
    strict = score(as_treebank([pred]), as_treebank([gold]))
    coarse = score(as_treebank([pred]), as_treebank([gold]), coarse_labels=True)
    assert strict.las == pytest.approx(50.0)
    assert coarse.las == pytest.approx(100.0)
    assert "nsubj" in coarse.per_relation and "nsubj:pass" not in coarse.per_relation


def test_mismatch_errors_name_first_divergent_sentence():
    g = as_treebank([_five(["a", "b"], [2, 0], ["nsubj", "root"])])
    with pytest.raises(ContractError, match="sentence count"):
        score(as_treebank([]), g)
    p = as_treebank([_five(["a", "zz"], [2, 0], ["nsubj", "root"])])
    with pytest.raises(ContractError, match="#0"):
        score(p, g)


def _mutate(rng, gold):
    toks = []
    for t in gold.tokens:
        head, label = t.head, t.deprel
        if rng.random() < 0.4:
            head = rng.choice([h for h in range(0, len(gold) + 1) if h != t.id])
        if rng.random() < 0.3:
            label = rng.choice(["nsubj", "obj", "nmod", "root"])
        toks.append(Token(id=t.id, form=t.form, upos=t.upos, head=head,
                          deprel=label))
    return DepTree(tokens=tuple(toks))


def test_score_orderings_fuzz():
    # LAS <= UAS and LEM <= UEM on arbitrary (not necessarily valid) preds
    rng = random.Random(17)
    for _ in range(300):
        gold = [random_valid_tree(rng.randint(1, 7), rng, with_punct=True)
                for _ in range(rng.randint(1, 4))]
        pred = [_mutate(rng, g) for g in gold]
        for flag in (False, True):
            report = score(as_treebank(pred), as_treebank(gold),
                           exclude_punct=flag)
            assert report.las <= report.uas + 1e-9
            assert report.lem <= report.uem + 1e-9
            # micro consistency: recall mass equals labeled-correct mass
            mass = sum(rs.recall * rs.gold_support
                       for rs in report.per_relation.values())
            assert mass == pytest.approx(report.las * report.token_count)


def test_sentence_order_permutation_invariance():
    rng = random.Random(5)
    gold = [random_valid_tree(5, rng) for _ in range(6)]
    pred = [_mutate(rng, g) for g in gold]
    base = score(as_treebank(pred), as_treebank(gold))
    perm = list(range(6))
    rng.shuffle(perm)
    permuted = score(as_treebank([pred[i] for i in perm]),
                     as_treebank([gold[i] for i in perm]))
    assert permuted.uas == pytest.approx(base.uas)
    assert permuted.las == pytest.approx(base.las)
    assert permuted.uem == pytest.approx(base.uem)


def _report_with_f1(f1_map, tokens=100):
    from headparse.evalmetrics import EvalReport, RelationScore
    per = {rel: RelationScore(f1, f1, f1, 10, 10) for rel, f1 in f1_map.items()}
    return EvalReport(uas=0, las=0, uem=0, lem=0, per_relation=per,
                      token_count=tokens, sentence_count=10,
                      punct_excluded=False)


def test_rer_halved_error_is_50():
    base = _report_with_f1({"nsubj": 50.0})
    improved = _report_with_f1({"nsubj": 75.0})
    assert relative_error_reduction(base, improved)["nsubj"] == pytest.approx(50.0)


def test_rer_unchanged_is_zero():
    r = _report_with_f1({"obj": 80.0})
    assert relative_error_reduction(r, r)["obj"] == pytest.approx(0.0)


def test_rer_passive_subject_movement():
    base = _report_with_f1({"nsubj:pass": 11.1})
    improved = _report_with_f1({"nsubj:pass": 90.5})
    rer = relative_error_reduction(base, improved)["nsubj:pass"]
    assert round(rer, 1) == 89.3


def test_rer_perfect_base_flags():
    base = _report_with_f1({"det": 100.0})
    same = relative_error_reduction(base, _report_with_f1({"det": 100.0}))
    worse = relative_error_reduction(base, _report_with_f1({"det": 90.0}))
    assert same["det"] == 0.0
    assert worse["det"] is None


def test_rer_requires_same_gold_set():
    with pytest.raises(ContractError):
        relative_error_reduction(_report_with_f1({}, tokens=5),
                                 _report_with_f1({}, tokens=6))


def _phi_series(x):
    # High-precision standard normal CDF from the Taylor series of erf,
    # summed with fsum; independent of the production approximation.
    z = x / math.sqrt(2.0)
    terms = []
    k = 0
    while True:
        term = ((-1) ** k) * z ** (2 * k + 1) / (math.factorial(k) * (2 * k + 1))
        terms.append(term)
        if abs(term) < 1e-18 and k > abs(z) ** 2:
            break
        k += 1
    erf = 2.0 / math.sqrt(math.pi) * math.fsum(terms)
    return 0.5 * (1.0 + erf)


def test_normal_sf_against_series_oracle():
    for z in [0.0, 0.1, 0.5, 1.0, 1.5, 1.96, 2.5, 2.81, 3.3, 4.0, 5.47, -1.0,
              -2.81]:
        oracle = 1.0 - _phi_series(z)
        assert normal_sf(z) == pytest.approx(oracle, abs=1e-7)


def test_two_proportion_correct_rates_significant():
    result = two_proportion_test(41, 50, 28, 50)
    assert result.p_value < 0.01
    assert not result.degenerate
    assert result.z == pytest.approx(2.8108, abs=1e-3)


def test_two_proportion_identical_is_flat():
    result = two_proportion_test(10, 20, 10, 20)
    assert result.z == 0.0 and result.p_value == pytest.approx(1.0)


def test_two_proportion_extreme_vs_series_oracle():
    result = two_proportion_test(49, 50, 25, 50)
    pooled = 74 / 100
    se = math.sqrt(pooled * (1 - pooled) * (2 / 50))
    z = (49 / 50 - 25 / 50) / se
    oracle_p = 2 * (1.0 - _phi_series(abs(z)))
    assert result.p_value == pytest.approx(oracle_p, abs=1e-6)


def test_two_proportion_degenerate_pool():
    result = two_proportion_test(0, 10, 0, 10)
    assert result.degenerate and result.p_value == 1.0
    assert two_proportion_test(10, 10, 5, 5).degenerate


def test_two_proportion_preconditions():
    with pytest.raises(ContractError):
        two_proportion_test(1, 0, 1, 2)
    with pytest.raises(ContractError):
        two_proportion_test(3, 2, 1, 2)


def test_kappa_identity():
    assert cohen_kappa(list("abcabc"), list("abcabc")) == pytest.approx(1.0)


def test_kappa_independent_labels():
    # p_o = 0.5 equals chance agreement for these marginals
    assert cohen_kappa(list("xxyy"), list("xyxy")) == pytest.approx(0.0)


def test_kappa_hand_contingency():
    # 2x2 contingency a=20 b=5 c=10 d=15: p_o=0.7, p_e=0.5, kappa=0.4
    a = ["y"] * 20 + ["y"] * 5 + ["n"] * 10 + ["n"] * 15
    b = ["y"] * 20 + ["n"] * 5 + ["y"] * 10 + ["n"] * 15
    assert cohen_kappa(a, b) == pytest.approx(0.4)


def test_kappa_constant_sequences():
    assert cohen_kappa(["x", "x"], ["x", "x"]) == 1.0


def test_kappa_preconditions():
    with pytest.raises(ContractError):
        cohen_kappa(["a"], ["a", "b"])
    with pytest.raises(ContractError):
        cohen_kappa([], [])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from("abc"), min_size=1, max_size=30),
       st.data())
def test_kappa_bounded_property(a, data):
    b = data.draw(st.lists(st.sampled_from("abc"), min_size=len(a),
                           max_size=len(a)))
    k = cohen_kappa(a, b)
    if k is not None:
        assert -1.0 - 1e-9 <= k <= 1.0 + 1e-9
