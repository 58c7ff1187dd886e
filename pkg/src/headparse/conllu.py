"""CoNLL-U reading/writing and the in-memory dependency tree model.

Only the columns this toolkit consumes are modeled: ID, FORM, UPOS, HEAD,
DEPREL, plus LEMMA and MISC carried as opaque strings. XPOS, FEATS and DEPS
are not modeled and are written back as ``_``. Multiword-token range lines
(``1-2``) and empty nodes (``3.1``) are skipped and counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .errors import ContractError, ParseError, ValidationError


@dataclass(frozen=True)
class Token:
    """One word line. ``head`` is 0 for the root attachment.

    ``lemma`` and ``misc`` hold the raw column text (``_`` when absent) and
    are never interpreted.
    """

    id: int
    form: str
    upos: str
    head: int
    deprel: str
    lemma: str = "_"
    misc: str = "_"


@dataclass(frozen=True)
class DepTree:
    """A sentence: tokens in surface order plus pass-through comments."""

    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()
    sent_id: str | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def upos_tags(self) -> list[str]:
        return [t.upos for t in self.tokens]

    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]

    def children(self) -> dict[int, list[int]]:
        """Map head id (0 = root) to dependent ids in ascending order."""
        out: dict[int, list[int]] = {}
        for t in self.tokens:
            out.setdefault(t.head, []).append(t.id)
        return out

    def root_id(self) -> int:
        for t in self.tokens:
            if t.head == 0:
                return t.id
        raise ValidationError(f"sentence {self.sent_id!r} has no root attachment")


@dataclass(frozen=True)
class Treebank:
    """Ordered collection of trees; read→write round-trips preserve order."""

    trees: tuple[DepTree, ...]
    source_name: str = ""
    skipped_lines: int = 0
    skipped_sentences: int = 0

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)


@dataclass(frozen=True)
class Violation:
    """One structural defect: machine-readable kind plus offending token id."""

    kind: str
    token_id: int
    detail: str = ""


def validate(tree: DepTree) -> list[Violation]:
    """Return all structural violations; empty iff the head function is an
    arborescence rooted at the virtual node 0 with consecutive ids 1..n."""
    out: list[Violation] = []
    n = len(tree.tokens)
    for pos, tok in enumerate(tree.tokens, start=1):
        if tok.id != pos:
            out.append(Violation("nonconsecutive-ids", tok.id, f"expected id {pos}"))
    if out:
        return out

    head_ok = {}
    for tok in tree.tokens:
        if tok.head < 0 or tok.head > n:
            out.append(Violation("head-out-of-range", tok.id, f"head {tok.head}"))
            head_ok[tok.id] = False
        elif tok.head == tok.id:
            out.append(Violation("self-head", tok.id))
            head_ok[tok.id] = False
        else:
            head_ok[tok.id] = True

    heads = {t.id: t.head for t in tree.tokens}
    # Reachability walk; any token that cannot reach node 0 sits on or under
    # a cycle. Report each distinct cycle once, keyed by its smallest id.
    state: dict[int, str] = {}
    reported_cycles: set[int] = set()
    for start in heads:
        if state.get(start):
            continue
        path = []
        cur = start
        while True:
            if cur == 0 or state.get(cur) == "ok":
                for p in path:
                    state[p] = "ok"
                break
            if state.get(cur) == "dead":
                for p in path:
                    state[p] = "dead"
                break
            if cur in path:
                cycle = path[path.index(cur):]
                key = min(cycle)
                if key not in reported_cycles and all(head_ok[c] for c in cycle):
                    reported_cycles.add(key)
                    out.append(Violation("cycle", key, "->".join(map(str, cycle))))
                for p in path:
                    state[p] = "dead"
                break
            if not head_ok[cur]:
                for p in path:
                    state[p] = "dead"
                state[cur] = "dead"
                break
            path.append(cur)
            cur = heads[cur]

    roots = [t.id for t in tree.tokens if t.head == 0]
    if len(roots) > 1:
        out.append(Violation("multiple-roots", roots[1], f"roots {roots}"))
    elif not roots and not out:
        out.append(Violation("no-root", 1))
    return out


def _open_source(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8"), True
    return source, False


_SENT_ID_PREFIX = "# sent_id"


def _sent_id_from_comments(comments: Iterable[str]) -> str | None:
    for c in comments:
        if c.startswith(_SENT_ID_PREFIX):
            rest = c[len(_SENT_ID_PREFIX):].lstrip()
            if rest.startswith("="):
                return rest[1:].strip()
    return None


def read_conllu(source, strict: bool = False, source_name: str = "") -> Treebank:
    """Read a CoNLL-U stream or path into a Treebank.

    Range lines and empty nodes are dropped (counted in ``skipped_lines``).
    Malformed token lines or invalid tree structure raise under ``strict``;
    otherwise the offending sentence is skipped and counted.
    """
    stream, owned = _open_source(source)
    if not source_name and isinstance(source, (str, Path)):
        source_name = str(source)
    trees: list[DepTree] = []
    skipped_lines = 0
    skipped_sentences = 0

    comments: list[str] = []
    rows: list[Token] = []
    bad: str | None = None

    def fail(lineno: int, msg: str) -> str:
        full = f"{source_name or '<stream>'}:{lineno}: {msg}"
        if strict:
            raise ParseError(full)
        return full

    def flush():
        nonlocal comments, rows, bad, skipped_sentences
        if bad is not None:
            skipped_sentences += 1
        elif rows:
            tree = DepTree(tokens=tuple(rows), comments=tuple(comments),
                           sent_id=_sent_id_from_comments(comments))
            violations = validate(tree)
            if violations:
                msg = (f"invalid tree (sent_id={tree.sent_id!r}): "
                       + "; ".join(f"{v.kind}@{v.token_id}" for v in violations))
                if strict:
                    raise ValidationError(msg)
                skipped_sentences += 1
            else:
                trees.append(tree)
        comments, rows, bad = [], [], None

    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush()
                continue
            if line.startswith("#"):
                comments.append(line)
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                bad = fail(lineno, f"expected 10 tab-separated columns, got {len(cols)}")
                continue
            tid = cols[0]
            if "-" in tid or "." in tid:
                skipped_lines += 1
                continue
            if not tid.isdigit():
                bad = fail(lineno, f"non-integer token id {tid!r}")
                continue
            if not cols[6].lstrip("-").isdigit():
                bad = fail(lineno, f"non-integer head {cols[6]!r}")
                continue
            rows.append(Token(id=int(tid), form=cols[1], upos=cols[3],
                              head=int(cols[6]), deprel=cols[7],
                              lemma=cols[2], misc=cols[9]))
        flush()
    finally:
        if owned:
            stream.close()
    return Treebank(trees=tuple(trees), source_name=source_name,
                    skipped_lines=skipped_lines, skipped_sentences=skipped_sentences)


def write_conllu(tb: Treebank) -> str:
    """Serialize; inverse of read_conllu on the modeled columns.

    Raises ContractError when any tree fails validation.
    """
    chunks: list[str] = []
    for tree in tb.trees:
        violations = validate(tree)
        if violations:
            raise ContractError(
                f"cannot write invalid tree (sent_id={tree.sent_id!r}): "
                + "; ".join(f"{v.kind}@{v.token_id}" for v in violations))
        lines = list(tree.comments)
        for t in tree.tokens:
            lines.append("\t".join((str(t.id), t.form, t.lemma, t.upos, "_", "_",
                                    str(t.head), t.deprel, "_", t.misc)))
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)


def write_conllu_path(tb: Treebank, path) -> None:
    Path(path).write_text(write_conllu(tb), encoding="utf-8")


def read_tagged(source, source_name: str = "") -> list[DepTree]:
    """Lenient loader for parser input: only FORM and UPOS are required.

    HEAD/DEPREL may be ``_`` (they default to 0 / ``_``); no structural
    validation is applied. Range lines and empty nodes are dropped.
    """
    stream, owned = _open_source(source)
    sentences: list[DepTree] = []
    comments: list[str] = []
    rows: list[Token] = []

    def flush():
        nonlocal comments, rows
        if rows:
            sentences.append(DepTree(tokens=tuple(rows), comments=tuple(comments),
                                     sent_id=_sent_id_from_comments(comments)))
        comments, rows = [], []

    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush()
                continue
            if line.startswith("#"):
                comments.append(line)
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ParseError(f"{source_name or '<stream>'}:{lineno}: "
                                 f"expected 10 tab-separated columns, got {len(cols)}")
            tid = cols[0]
            if "-" in tid or "." in tid:
                continue
            head = int(cols[6]) if cols[6].lstrip("-").isdigit() else 0
            rows.append(Token(id=len(rows) + 1, form=cols[1], upos=cols[3],
                              head=head, deprel=cols[7], lemma=cols[2], misc=cols[9]))
        flush()
    finally:
        if owned:
            stream.close()
    return sentences
