"""Projection semantics: worked examples, reference-oracle equivalence,
and structural invariants."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headparse.align import Alignment, align_subsequence
from headparse.conllu import validate
from headparse.errors import ContractError
from headparse.project import build_silver_corpus, extract_subtree, project_tree

from fixtures import random_valid_tree, tree
from reference_projection import reference_project

PROMISED = tree([
    ("Researchers", "NOUN", 2, "nsubj"),
    ("promised", "VERB", 0, "root"),
    ("to", "PART", 4, "mark"),
    ("release", "VERB", 2, "xcomp"),
    ("data", "NOUN", 4, "obj"),
])


def test_promoted_root_example():
    alignment = align_subsequence(["Researchers", "to", "release", "data"],
                                  PROMISED.forms())
    result = project_tree(PROMISED, alignment)
    got = [(t.form, t.head, t.deprel) for t in result.tree.tokens]
    assert got == [
        ("Researchers", 3, "nsubj"),
        ("to", 3, "mark"),
        ("release", 0, "root"),
        ("data", 3, "obj"),
    ]
    assert result.collapsed_count == 1
    assert result.promoted_ids == (4,)


def test_promoted_root_with_filler_obliques():
    # same construction with extra material on either side of the verb
    sent = tree([
        ("Researchers", "NOUN", 3, "nsubj"),
        ("quietly", "ADV", 3, "advmod"),
        ("promised", "VERB", 0, "root"),
        ("to", "PART", 5, "mark"),
        ("release", "VERB", 3, "xcomp"),
        ("data", "NOUN", 5, "obj"),
        ("Friday", "PROPN", 5, "obl"),
    ])
    alignment = align_subsequence(["Researchers", "to", "release", "data"],
                                  sent.forms())
    result = project_tree(sent, alignment)
    assert [(t.form, t.head, t.deprel) for t in result.tree.tokens] == [
        ("Researchers", 3, "nsubj"),
        ("to", 3, "mark"),
        ("release", 0, "root"),
        ("data", 3, "obj"),
    ]


def test_full_coverage_is_identity_modulo_renumbering():
    alignment = align_subsequence(PROMISED.forms(), PROMISED.forms())
    result = project_tree(PROMISED, alignment)
    assert result.collapsed_count == 0
    assert [(t.form, t.head, t.deprel) for t in result.tree.tokens] == \
        [(t.form, t.head, t.deprel) for t in PROMISED.tokens]


def test_chain_collapse_matches_reference_and_inherits_label():
    # chain a <- b <- c <- d with d the root; keep {a, d}
    chain = tree([
        ("a", "NOUN", 2, "la"),
        ("b", "NOUN", 3, "lb"),
        ("c", "NOUN", 4, "lc"),
        ("d", "NOUN", 0, "root"),
    ])
    alignment = Alignment(pairs=((1, 1), (2, 4)))
    result = project_tree(chain, alignment)
    heads = [-1] + chain.heads()
    rels = ["root"] + chain.deprels()
    ref_heads, ref_rels = reference_project(heads, rels, [1, 4])
    assert [t.head - 1 if t.head else -1 for t in result.tree.tokens] == ref_heads
    assert [t.deprel for t in result.tree.tokens] == ref_rels
    # c collapses first, then b: a ends up under d carrying c's old label
    assert [(t.form, t.head, t.deprel) for t in result.tree.tokens] == \
        [("a", 2, "lc"), ("d", 0, "root")]
    assert [p[0] for p in result.promotions] == [3, 2]


def test_extract_subtree_leaf_pulls_ancestor_path():
    chain = tree([("x", "NOUN", 2, "dep"), ("y", "NOUN", 3, "dep"),
                  ("z", "NOUN", 0, "root")])
    nodes, edges = extract_subtree(chain, {1})
    assert nodes == {0, 1, 2, 3}
    assert edges == {(2, 1), (3, 2), (0, 3)}


def test_extract_subtree_all_nodes_identity():
    nodes, edges = extract_subtree(PROMISED, {1, 2, 3, 4, 5})
    assert nodes == {0, 1, 2, 3, 4, 5}
    assert edges == {(t.head, t.id) for t in PROMISED.tokens}


def test_extract_subtree_keeps_on_path_node():
    nodes, _ = extract_subtree(PROMISED, {1, 3, 4, 5})
    assert 2 in nodes  # "promised" sits on the root path


def test_extract_subtree_rejects_bad_input():
    with pytest.raises(ContractError):
        extract_subtree(PROMISED, set())
    with pytest.raises(ContractError):
        extract_subtree(PROMISED, {99})
    with pytest.raises(ContractError):
        project_tree(PROMISED, Alignment(pairs=((1, 99),)))


def _project_via_reference(sent, subset):
    heads = [-1] + sent.heads()
    rels = ["root"] + sent.deprels()
    return reference_project(heads, rels, subset)


def _project_via_toolkit(sent, subset):
    alignment = Alignment(pairs=tuple((i + 1, s)
                                      for i, s in enumerate(subset)))
    result = project_tree(sent, alignment)
    heads = [t.head - 1 if t.head else -1 for t in result.tree.tokens]
    rels = [t.deprel for t in result.tree.tokens]
    return result, heads, rels


def test_reference_equivalence_fuzz():
    rng = random.Random(20240817)
    checked = 0
    for _ in range(1200):
        n = rng.randint(1, 10)
        sent = random_valid_tree(n, rng)
        k = rng.randint(1, n)
        subset = sorted(rng.sample(range(1, n + 1), k))
        ref_heads, ref_rels = _project_via_reference(sent, subset)
        _, got_heads, got_rels = _project_via_toolkit(sent, subset)
        assert got_heads == ref_heads, (sent.heads(), subset)
        assert got_rels == ref_rels, (sent.deprels(), subset)
        checked += 1
    assert checked == 1200


def test_projection_invariants_fuzz():
    rng = random.Random(99)
    for _ in range(500):
        n = rng.randint(1, 10)
        sent = random_valid_tree(n, rng)
        k = rng.randint(1, n)
        subset = sorted(rng.sample(range(1, n + 1), k))
        alignment = Alignment(pairs=tuple((i + 1, s)
                                          for i, s in enumerate(subset)))
        result = project_tree(sent, alignment)
        # size equals headline size
        assert len(result.tree) == k
        # output validates
        assert validate(result.tree) == []
        # retained-edge preservation
        renumber = {old: new for new, old in enumerate(subset, start=1)}
        out = {t.id: t for t in result.tree.tokens}
        for tok in sent.tokens:
            if tok.id in renumber and tok.head in renumber:
                projected = out[renumber[tok.id]]
                assert projected.head == renumber[tok.head]
                assert projected.deprel == tok.deprel
        # label inheritance along the promotion trace
        labels = {t.id: t.deprel for t in sent.tokens}
        labels[0] = "root"
        for removed, promoted, label in result.promotions:
            assert label == labels[removed]
            labels[promoted] = label


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=10 ** 9))
def test_projection_size_and_validity_property(n, seed):
    rng = random.Random(seed)
    sent = random_valid_tree(n, rng)
    k = rng.randint(1, n)
    subset = sorted(rng.sample(range(1, n + 1), k))
    alignment = Alignment(pairs=tuple((i + 1, s) for i, s in enumerate(subset)))
    result = project_tree(sent, alignment)
    assert len(result.tree) == k
    assert validate(result.tree) == []
    assert result.collapsed_count == len(result.promotions)


def test_collapse_selection_follows_stack_order_not_breadth_first():
    # Two removable nodes at different depths: node 5 (shallow, left) and
    # node 4 (deep, right). The LIFO walk explores the rightmost child
    # first, so it removes the deeper node 4 before the shallower node 5;
    # a closest-to-root rule would pick node 5 first.
    sent = tree([
        ("k1", "NOUN", 5, "dep"),   # 1 under removable 5
        ("r", "VERB", 0, "root"),   # 2 root (kept)
        ("k2", "NOUN", 4, "dep"),   # 3 under removable 4
        ("x4", "NOUN", 2, "mid"),   # 4 removable, right subtree
        ("x5", "NOUN", 2, "top"),   # 5 removable, left subtree... id order decides
    ])
    # kept: {1, 2, 3}; removable: {4, 5}
    alignment = Alignment(pairs=((1, 1), (2, 2), (3, 3)))
    result = project_tree(sent, alignment)
    assert [p[0] for p in result.promotions] == [5, 4]
    # both orders converge to the same final tree here; record that fact
    assert [(t.form, t.head, t.deprel) for t in result.tree.tokens] == [
        ("k1", 2, "top"), ("r", 0, "root"), ("k2", 2, "mid")]


def test_build_silver_corpus_keeps_alignable_pairs():
    pairs = []
    for i in range(5):
        sent = tree([
            ("The", "DET", 2, "det"),
            ("court", "NOUN", 3, "nsubj"),
            ("backed", "VERB", 0, "root"),
            ("the", "DET", 5, "det"),
            ("ruling", "NOUN", 3, "obj"),
        ], sent_id=f"p{i}")
        headline = ["court", "backed", "ruling"] if i % 2 == 0 else ["no", "match"]
        pairs.append((headline, sent))
    silver, report = build_silver_corpus(pairs)
    assert report.kept == 3 and report.dropped == 2
    assert len(silver.trees) == 3
    assert [o.status for o in report.outcomes] == [
        "projected", "no-alignment", "projected", "no-alignment", "projected"]
    for t in silver.trees:
        assert validate(t) == []
        assert t.forms() == ["court", "backed", "ruling"]


def test_build_silver_corpus_empty():
    silver, report = build_silver_corpus([])
    assert len(silver.trees) == 0
    assert report.kept == 0 and report.dropped == 0


def test_build_silver_corpus_records_invalid_sentence():
    from fixtures import tree_from_heads
    bad = tree_from_heads([2, 1])  # 2-cycle
    silver, report = build_silver_corpus([(["w1"], bad)])
    assert report.outcomes[0].status == "invalid-sentence"
    assert len(silver.trees) == 0
