"""Deterministic synthetic two-register corpus generator.

Builds matched headline / lead-sentence material for experiments and tests
without shipping any scraped data. The body register looks like edited
long-form text (determiners, auxiliaries, copulas, final punctuation); the
headline register is the telegraphic compression of a body sentence,
obtained by deleting exactly the function words a headline drops, so every
headline is a subsequence of its lead sentence by construction.

The generator is seeded and template-based; trees come out of the same
projection code the silver pipeline uses, so headline gold trees and
projected silver trees agree on the constructions that matter (promoted
roots for "X to VERB ..." headlines, ``nsubj:pass`` without the auxiliary,
compound- and flat-heavy nominals).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .align import align_subsequence
from .conllu import DepTree, Token, Treebank
from .errors import ContractError
from .project import project_tree

NOUNS = ("shares data jobs plan talks deal bank workers prices report strike "
         "vote economy exports profits market tax budget funds growth sales "
         "output rates debt losses merger contract factory airline drought "
         "protest election inquiry ruling deadline wages imports stocks crops "
         "traffic tourism housing crime pollution").split()

VERBS = [("cut", "cut"), ("release", "released"), ("raise", "raised"),
         ("approve", "approved"), ("reject", "rejected"), ("delay", "delayed"),
         ("announce", "announced"), ("expand", "expanded"), ("probe", "probed"),
         ("sell", "sold"), ("launch", "launched"), ("halt", "halted"),
         ("back", "backed"), ("seek", "sought"), ("win", "won"),
         ("open", "opened"), ("close", "closed"), ("sign", "signed"),
         ("test", "tested"), ("move", "moved")]

MATRIX_VERBS = "said announced confirmed reported".split()
EMBED_VERBS = "plans expects hopes aims wants".split()

ORGS = ("Acme Globex Initech Vandelay Norwood Eastport Kingsford Shelby "
        "Marwood Calder Renton Haverton Welford Brockton Ashby Delmar "
        "Fairmont Grafton Holbrook Ivydale").split()
FIRST_NAMES = "Maria John Wei Anika Tomas Lena Omar Priya Jonas Carmen".split()
LAST_NAMES = ("Alvarez Novak Okafor Lindqvist Tanaka Moreau Haddad Petrov "
              "Osei Varga").split()
ADJS = ("new major local federal annual key top rural global joint record "
        "sharp brief rival senior").split()
TIMES = "Monday Tuesday Wednesday Thursday Friday Saturday Sunday".split()
ADVS = "sharply quickly quietly formally abruptly".split()

Row = tuple[str, str, int, str]  # form, upos, head, deprel


def _tree(rows: Sequence[Row], sent_id: str | None = None) -> DepTree:
    tokens = tuple(Token(id=i, form=f, upos=u, head=h, deprel=d)
                   for i, (f, u, h, d) in enumerate(rows, start=1))
    return DepTree(tokens=tokens, sent_id=sent_id)


@dataclass(frozen=True)
class SynthPair:
    headline: tuple[str, ...]
    body: DepTree


def _transitive_pair(rng: random.Random) -> SynthPair:
    """"The N V-ed the N on DAY ." -> "N V-ed N [on DAY]"."""
    subj = rng.choice(NOUNS)
    _, vpast = rng.choice(VERBS)
    obj = rng.choice([n for n in NOUNS if n != subj])
    day = rng.choice(TIMES)
    rows = [
        ("The", "DET", 2, "det"),
        (subj, "NOUN", 3, "nsubj"),
        (vpast, "VERB", 0, "root"),
        ("the", "DET", 5, "det"),
        (obj, "NOUN", 3, "obj"),
        ("on", "ADP", 7, "case"),
        (day, "PROPN", 3, "obl"),
        (".", "PUNCT", 3, "punct"),
    ]
    keep = [2, 3, 5]
    if rng.random() < 0.35:
        keep += [6, 7]
    return SynthPair(tuple(rows[i - 1][0] for i in keep), _tree(rows))


def _promotion_pair(rng: random.Random) -> SynthPair:
    """"The N said it plans to V the N ." -> "N to V N"; the headline root
    is the embedded verb, which only exists in the body as an xcomp."""
    subj = rng.choice(NOUNS + ORGS)
    subj_pos = "PROPN" if subj in ORGS else "NOUN"
    matrix = rng.choice(MATRIX_VERBS)
    embed = rng.choice(EMBED_VERBS)
    base, _ = rng.choice(VERBS)
    obj = rng.choice(NOUNS)
    rows = [
        ("The", "DET", 2, "det"),
        (subj, subj_pos, 3, "nsubj"),
        (matrix, "VERB", 0, "root"),
        ("it", "PRON", 5, "nsubj"),
        (embed, "VERB", 3, "ccomp"),
        ("to", "PART", 7, "mark"),
        (base, "VERB", 5, "xcomp"),
        ("the", "DET", 9, "det"),
        (obj, "NOUN", 7, "obj"),
        (".", "PUNCT", 3, "punct"),
    ]
    return SynthPair((subj, "to", base, obj), _tree(rows))


def _passive_pair(rng: random.Random) -> SynthPair:
    """"The N was V-ed by the ORG ." -> "N V-ed [by ORG]"."""
    subj = rng.choice(NOUNS)
    _, vpast = rng.choice(VERBS)
    org = rng.choice(ORGS)
    rows = [
        ("The", "DET", 2, "det"),
        (subj, "NOUN", 4, "nsubj:pass"),
        ("was", "AUX", 4, "aux:pass"),
        (vpast, "VERB", 0, "root"),
        ("by", "ADP", 7, "case"),
        ("the", "DET", 7, "det"),
        (org, "PROPN", 4, "obl"),
        (".", "PUNCT", 4, "punct"),
    ]
    keep = [2, 4] if rng.random() < 0.5 else [2, 4, 5, 7]
    return SynthPair(tuple(rows[i - 1][0] for i in keep), _tree(rows))


def _compound_pair(rng: random.Random) -> SynthPair:
    """"The ORG N V-ed in ORG ." -> "ORG N V-ed in ORG"."""
    org = rng.choice(ORGS)
    noun = rng.choice(NOUNS)
    _, vpast = rng.choice(VERBS)
    place = rng.choice([o for o in ORGS if o != org])
    rows = [
        ("The", "DET", 3, "det"),
        (org, "PROPN", 3, "compound"),
        (noun, "NOUN", 4, "nsubj"),
        (vpast, "VERB", 0, "root"),
        ("in", "ADP", 6, "case"),
        (place, "PROPN", 4, "obl"),
        (".", "PUNCT", 4, "punct"),
    ]
    return SynthPair((org, noun, vpast, "in", place), _tree(rows))


def _name_pair(rng: random.Random) -> SynthPair:
    """"FIRST LAST , a N , V-ed the N ." -> "FIRST LAST V-ed N"."""
    first = rng.choice(FIRST_NAMES)
    last = rng.choice(LAST_NAMES)
    role = rng.choice(NOUNS)
    _, vpast = rng.choice(VERBS)
    obj = rng.choice(NOUNS)
    rows = [
        (first, "PROPN", 7, "nsubj"),
        (last, "PROPN", 1, "flat"),
        (",", "PUNCT", 5, "punct"),
        ("a", "DET", 5, "det"),
        (role, "NOUN", 1, "appos"),
        (",", "PUNCT", 5, "punct"),
        (vpast, "VERB", 0, "root"),
        ("the", "DET", 9, "det"),
        (obj, "NOUN", 7, "obj"),
        (".", "PUNCT", 7, "punct"),
    ]
    return SynthPair((first, last, vpast, obj), _tree(rows))


def _copular_pair(rng: random.Random) -> SynthPair:
    """"The N is a ADJ N ." -> "N ADJ N" (nominal-root headline)."""
    subj = rng.choice(NOUNS)
    adj = rng.choice(ADJS)
    pred = rng.choice([n for n in NOUNS if n != subj])
    rows = [
        ("The", "DET", 2, "det"),
        (subj, "NOUN", 6, "nsubj"),
        ("is", "AUX", 6, "cop"),
        ("a", "DET", 6, "det"),
        (adj, "ADJ", 6, "amod"),
        (pred, "NOUN", 0, "root"),
        (".", "PUNCT", 6, "punct"),
    ]
    return SynthPair((subj, adj, pred), _tree(rows))


_TEMPLATES = [
    (_transitive_pair, 0.26),
    (_promotion_pair, 0.26),
    (_passive_pair, 0.18),
    (_compound_pair, 0.14),
    (_name_pair, 0.10),
    (_copular_pair, 0.06),
]


def sample_pair(rng: random.Random) -> SynthPair:
    x = rng.random()
    acc = 0.0
    for fn, w in _TEMPLATES:
        acc += w
        if x < acc:
            return fn(rng)
    return _TEMPLATES[-1][0](rng)


def build_gold_treebank(count: int, seed: int) -> Treebank:
    """Body-register (long-form) gold treebank."""
    rng = random.Random(seed)
    trees = []
    for i in range(count):
        pair = sample_pair(rng)
        trees.append(DepTree(tokens=pair.body.tokens, sent_id=f"body-{seed}-{i}"))
    return Treebank(trees=tuple(trees), source_name="synth-body")


def build_pairs(count: int, seed: int, unalignable_frac: float = 0.04,
                ) -> list[tuple[list[str], DepTree]]:
    """(headline tokens, parsed lead sentence) pairs; a small fraction get a
    headline token absent from the lead, so they fail the subsequence
    constraint downstream."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        pair = sample_pair(rng)
        headline = list(pair.headline)
        if rng.random() < unalignable_frac:
            headline[rng.randrange(len(headline))] = "unrelated"
        body = DepTree(tokens=pair.body.tokens, sent_id=f"lead-{seed}-{i}")
        out.append((headline, body))
    return out


def build_headline_treebank(count: int, seed: int) -> Treebank:
    """Headline-register gold trees (the projection of each pair)."""
    rng = random.Random(seed)
    trees = []
    for i in range(count):
        pair = sample_pair(rng)
        alignment = align_subsequence(pair.headline, pair.body.forms())
        assert alignment is not None
        result = project_tree(pair.body, alignment)
        trees.append(DepTree(tokens=result.tree.tokens, sent_id=f"hl-{seed}-{i}"))
    return Treebank(trees=tuple(trees), source_name="synth-headline")


# --- exact-size fixtures -------------------------------------------------

def _headline_rows(length: int, rng: random.Random, deck_weight: float) -> list[Row]:
    """One headline-register tree of exactly ``length`` tokens (>= 3)."""
    if length < 3:
        raise ContractError("headline trees need at least 3 tokens")
    budget = length - 3
    use_flat = False
    to_verb = False
    deck = False
    subj_compounds = 0
    obj_mods: list[str] = []
    pps = 0
    time_obl = False
    options = ["subj_compound", "obj_compound", "pp", "time", "amod",
               "nummod", "to", "flat", "deck"]
    weights = {"subj_compound": 3.0, "obj_compound": 1.5, "pp": 2.0,
               "time": 1.0, "amod": 1.0, "nummod": 1.0, "to": 1.5,
               "flat": 1.5, "deck": deck_weight}
    sizes = {"subj_compound": 1, "obj_compound": 1, "pp": 2, "time": 1,
             "amod": 1, "nummod": 1, "to": 1, "flat": 1, "deck": 2}
    while budget > 0:
        usable = [o for o in options if sizes[o] <= budget and weights[o] > 0]
        usable = [o for o in usable
                  if not (o == "flat" and (use_flat or subj_compounds))
                  and not (o == "to" and to_verb)
                  and not (o == "deck" and deck)
                  and not (o == "time" and time_obl)
                  and not (o == "subj_compound" and (subj_compounds >= 2 or use_flat))
                  and not (o == "pp" and pps >= 2)
                  and not (o in obj_mods)]
        if not usable:  # stacked adjectives absorb any leftover budget
            obj_mods.append("amod")
            budget -= 1
            continue
        total = sum(weights[o] for o in usable)
        x = rng.random() * total
        acc = 0.0
        pick = usable[-1]
        for o in usable:
            acc += weights[o]
            if x < acc:
                pick = o
                break
        if pick == "flat":
            use_flat = True
        elif pick == "to":
            to_verb = True
        elif pick == "deck":
            deck = True
        elif pick == "time":
            time_obl = True
        elif pick == "subj_compound":
            subj_compounds += 1
        elif pick == "pp":
            pps += 1
        else:
            obj_mods.append(pick)
        budget -= sizes[pick]

    rows: list[Row] = []

    def add(form, upos, head, deprel) -> int:
        rows.append((form, upos, head, deprel))
        return len(rows)

    # subject zone
    comp_ids = [add(rng.choice(ORGS), "PROPN", 0, "compound")
                for _ in range(subj_compounds)]
    if use_flat:
        subj = add(rng.choice(FIRST_NAMES), "PROPN", 0, "nsubj")
        add(rng.choice(LAST_NAMES), "PROPN", subj, "flat")
    else:
        subj_form = rng.choice(NOUNS) if subj_compounds else rng.choice(NOUNS + ORGS)
        subj_pos = "PROPN" if subj_form in ORGS else "NOUN"
        subj = add(subj_form, subj_pos, 0, "nsubj")
    # verb zone
    if to_verb:
        mark = add("to", "PART", 0, "mark")
    base, vpast = rng.choice(VERBS)
    verb = add(base if to_verb else vpast, "VERB", 0, "root")
    if to_verb:
        rows[mark - 1] = ("to", "PART", verb, "mark")
    rows[subj - 1] = (rows[subj - 1][0], rows[subj - 1][1], verb, "nsubj")
    for cid in comp_ids:
        rows[cid - 1] = (rows[cid - 1][0], "PROPN", subj, "compound")
    # object zone
    pre_obj = []
    for mod in obj_mods:
        if mod == "amod":
            pre_obj.append(add(rng.choice(ADJS), "ADJ", 0, "amod"))
        elif mod == "nummod":
            pre_obj.append(add(str(rng.randrange(100, 9900, 100)), "NUM", 0, "nummod"))
        elif mod == "obj_compound":
            pre_obj.append(add(rng.choice(ORGS), "PROPN", 0, "compound"))
    obj = add(rng.choice(NOUNS), "NOUN", verb, "obj")
    for pid in pre_obj:
        rows[pid - 1] = (rows[pid - 1][0], rows[pid - 1][1], obj, rows[pid - 1][3])
    # post-verbal zone
    for _ in range(pps):
        case = add("in", "ADP", 0, "case")
        pobj = add(rng.choice(ORGS), "PROPN", verb, "obl")
        rows[case - 1] = ("in", "ADP", pobj, "case")
    if time_obl:
        add(rng.choice(TIMES), "PROPN", verb, "obl:tmod")
    if deck:
        colon = add(":", "PUNCT", 0, "punct")
        deck_head = add(rng.choice(ORGS), "PROPN", verb, "parataxis")
        rows[colon - 1] = (":", "PUNCT", deck_head, "punct")
    assert len(rows) == length
    return rows


def _body_rows(length: int, rng: random.Random) -> list[Row]:
    """One body-register tree of exactly ``length`` tokens (>= 6)."""
    if length < 6:
        raise ContractError("body trees need at least 6 tokens")
    budget = length - 6
    has_aux = False
    has_advmod = False
    amod_count = 0
    has_compound = False
    pps = 0
    times = 0
    sizes = {"aux": 1, "advmod": 1, "pp": 3, "time": 2, "amod": 1,
             "compound": 1}
    weights = {"aux": 2.0, "advmod": 1.5, "pp": 2.5, "time": 1.5,
               "amod": 1.5, "compound": 0.4}
    while budget > 0:
        usable = [o for o in sizes if sizes[o] <= budget]
        usable = [o for o in usable
                  if not (o == "aux" and has_aux)
                  and not (o == "advmod" and has_advmod)
                  and not (o == "amod" and amod_count)
                  and not (o == "compound" and has_compound)
                  and not (o == "pp" and pps >= 2)
                  and not (o == "time" and times >= 1)]
        if not usable:  # stacked adjectives absorb any leftover budget
            amod_count += 1
            budget -= 1
            continue
        total = sum(weights[o] for o in usable)
        x = rng.random() * total
        acc = 0.0
        pick = usable[-1]
        for o in usable:
            acc += weights[o]
            if x < acc:
                pick = o
                break
        if pick == "aux":
            has_aux = True
        elif pick == "advmod":
            has_advmod = True
        elif pick == "amod":
            amod_count += 1
        elif pick == "compound":
            has_compound = True
        elif pick == "pp":
            pps += 1
        else:
            times += 1
        budget -= sizes[pick]

    rows: list[Row] = []

    def add(form, upos, head, deprel) -> int:
        rows.append((form, upos, head, deprel))
        return len(rows)

    add("The", "DET", 0, "det")
    comp = add(rng.choice(ORGS), "PROPN", 0, "compound") if has_compound else None
    subj = add(rng.choice(NOUNS), "NOUN", 0, "nsubj")
    rows[0] = ("The", "DET", subj, "det")
    if comp:
        rows[comp - 1] = (rows[comp - 1][0], "PROPN", subj, "compound")
    if has_aux:
        aux = add("has", "AUX", 0, "aux")
    if has_advmod:
        adv = add(rng.choice(ADVS), "ADV", 0, "advmod")
    _, vpast = rng.choice(VERBS)
    verb = add(vpast, "VERB", 0, "root")
    rows[subj - 1] = (rows[subj - 1][0], "NOUN", verb, "nsubj")
    if has_aux:
        rows[aux - 1] = ("has", "AUX", verb, "aux")
    if has_advmod:
        rows[adv - 1] = (rows[adv - 1][0], "ADV", verb, "advmod")
    det2 = add("the", "DET", 0, "det")
    pre_ids = [add(rng.choice(ADJS), "ADJ", 0, "amod") for _ in range(amod_count)]
    obj = add(rng.choice(NOUNS), "NOUN", verb, "obj")
    rows[det2 - 1] = ("the", "DET", obj, "det")
    for pid in pre_ids:
        rows[pid - 1] = (rows[pid - 1][0], "ADJ", obj, "amod")
    for _ in range(pps):
        case = add("in", "ADP", 0, "case")
        det3 = add("the", "DET", 0, "det")
        pobj = add(rng.choice(NOUNS), "NOUN", verb, "obl")
        rows[case - 1] = ("in", "ADP", pobj, "case")
        rows[det3 - 1] = ("the", "DET", pobj, "det")
    for _ in range(times):
        case = add("on", "ADP", 0, "case")
        pobj = add(rng.choice(TIMES), "PROPN", verb, "obl")
        rows[case - 1] = ("on", "ADP", pobj, "case")
    add(".", "PUNCT", verb, "punct")
    assert len(rows) == length
    return rows


def build_sized_treebank(sentences: int, tokens: int, seed: int,
                         register: str = "headline", name: str = "",
                         deck_weight: float = 0.0) -> Treebank:
    """Treebank with exactly ``sentences`` trees and ``tokens`` tokens.

    ``register`` is ``headline`` (lengths 4-12) or ``body`` (lengths 6-16).
    """
    if register == "headline":
        lo, hi = 4, 12
    elif register == "body":
        lo, hi = 6, 16
    else:
        raise ContractError(f"unknown register {register!r}")
    if not sentences * lo <= tokens <= sentences * hi:
        raise ContractError(f"{tokens} tokens infeasible for {sentences} "
                            f"sentences of length {lo}..{hi}")
    rng = random.Random(seed)
    lengths = []
    remaining = tokens
    for i in range(sentences):
        rest = sentences - i - 1
        lo_i = max(lo, remaining - rest * hi)
        hi_i = min(hi, remaining - rest * lo)
        pick = rng.randint(lo_i, hi_i)
        lengths.append(pick)
        remaining -= pick
    trees = []
    for i, length in enumerate(lengths):
        rows = (_headline_rows(length, rng, deck_weight) if register == "headline"
                else _body_rows(length, rng))
        trees.append(_tree(rows, sent_id=f"{name or register}-{i}"))
    return Treebank(trees=tuple(trees), source_name=name or f"synth-{register}")
