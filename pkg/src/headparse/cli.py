"""Single entry-point command exposing every pipeline stage.

Exit codes: 0 success, 1 validation/contract error, 2 usage error. Machine
output goes to ``--out`` (or the flag named for it); human summaries and
the run manifest (one JSON line) go to standard error.

Input formats:
  pairs TSV      two UTF-8 columns per line, headline TAB lead sentence,
                 both pre-tokenized with single spaces;
  CoNLL-U        ten tab-separated columns, ``#`` comments, blank-line
                 sentence separation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .align import align_subsequence, read_pairs_tsv
from .conllu import read_conllu, read_tagged, write_conllu_path, Treebank
from .ensemble import combine_treebanks
from .errors import ContractError, HeadparseError
from .evalmetrics import format_report, report_to_json, score
from .openie import diff_extractions, extract, tuple_to_json, write_tuples_jsonl
from .parser import load_model, parse_treebank, save_model, train
from .project import build_silver_corpus
from .stats import (comparison_tsv, compare_distributions, corpus_summary,
                    relation_distribution)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _emit_manifest(args: argparse.Namespace, inputs: list[str], started: float,
                   seed: int | None = None) -> None:
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "schema_version": 1,
        "subcommand": args.command,
        "flags": {k: str(v) if isinstance(v, Path) else v for k, v in flags.items()},
        "inputs": {str(p): _sha256(p) for p in inputs},
        "seed": seed,
        "version": __version__,
        "duration_s": round(time.monotonic() - started, 3),
    }
    line = json.dumps(manifest, sort_keys=True)
    print(line, file=sys.stderr)
    if getattr(args, "manifest", None):
        Path(args.manifest).write_text(line + "\n", encoding="utf-8")


def _load_pairs(args) -> list[tuple[list[str], list[str]]]:
    if args.pairs:
        return [(h, s) for h, s in read_pairs_tsv(args.pairs)]
    headlines = read_tagged(args.headlines)
    sentences = read_tagged(args.sentences)
    if len(headlines) != len(sentences):
        raise ContractError(f"{args.headlines} has {len(headlines)} sentences "
                            f"but {args.sentences} has {len(sentences)}")
    return [(h.forms(), s.forms()) for h, s in zip(headlines, sentences)]


def _cmd_align(args) -> int:
    started = time.monotonic()
    pairs = _load_pairs(args)
    kept = 0
    lines = []
    for i, (headline, sentence) in enumerate(pairs):
        alignment = None
        if headline and sentence:
            alignment = align_subsequence(headline, sentence,
                                          case_sensitive=args.case_sensitive)
        if alignment is not None:
            kept += 1
        lines.append(json.dumps({
            "schema_version": 1,
            "index": i,
            "aligned": alignment is not None,
            "pairs": [list(p) for p in alignment.pairs] if alignment else None,
        }))
    Path(args.out).write_text("\n".join(lines) + ("\n" if lines else ""),
                              encoding="utf-8")
    print(f"aligned {kept}/{len(pairs)} pairs (dropped {len(pairs) - kept})",
          file=sys.stderr)
    inputs = [args.pairs] if args.pairs else [args.headlines, args.sentences]
    _emit_manifest(args, inputs, started)
    return 0


def _cmd_project(args) -> int:
    started = time.monotonic()
    pairs_text = read_pairs_tsv(args.pairs)
    leads = read_conllu(args.sentences, strict=args.strict)
    if len(pairs_text) != len(leads.trees):
        raise ContractError(
            f"{args.pairs} has {len(pairs_text)} pairs but {args.sentences} "
            f"has {len(leads.trees)} parsed sentences; they must be parallel")
    pairs = [(h, tree) for (h, _), tree in zip(pairs_text, leads.trees)]
    silver, report = build_silver_corpus(pairs, case_sensitive=args.case_sensitive,
                                         jobs=args.jobs)
    write_conllu_path(silver, args.out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            for o in report.outcomes:
                f.write(json.dumps({
                    "schema_version": 1, "record": "pair", "index": o.index,
                    "sent_id": o.sent_id, "status": o.status,
                    "collapsed": o.collapsed, "headline_len": o.headline_len,
                    "detail": o.detail}) + "\n")
            f.write(json.dumps({
                "schema_version": 1, "record": "summary", "kept": report.kept,
                "dropped": report.dropped,
                "collapsed_total": report.collapsed_total}) + "\n")
    print(f"projected {report.kept}/{len(pairs)} pairs "
          f"(dropped {report.dropped}, collapsed {report.collapsed_total} nodes)",
          file=sys.stderr)
    _emit_manifest(args, [args.pairs, args.sentences], started)
    return 0


def _parse_stage(spec: str) -> tuple[str, int]:
    path, sep, epochs = spec.rpartition(":")
    if not sep or not epochs.isdigit():
        raise ContractError(f"stage must look like FILE.conllu:EPOCHS, got {spec!r}")
    return path, int(epochs)


def _cmd_train(args) -> int:
    started = time.monotonic()
    stages = []
    stage_paths = []
    for spec in args.stage:
        path, epochs = _parse_stage(spec)
        stage_paths.append(path)
        stages.append((read_conllu(path, strict=args.strict), epochs))
    model = train(stages, seed=args.seed)
    save_model(model, args.out)
    totals = model.meta["stages"]
    skipped = sum(s["skipped_nonprojective"] for s in totals)
    print(f"trained {len(stages)} stage(s), {model.meta['iterations']} states, "
          f"{model.meta['updates']} updates, skipped {skipped} non-projective "
          f"trees; {len(model.labels)} labels", file=sys.stderr)
    _emit_manifest(args, stage_paths, started, seed=args.seed)
    return 0


def _cmd_parse(args) -> int:
    started = time.monotonic()
    model = load_model(args.model)
    sentences = read_tagged(args.input)
    parsed = parse_treebank(model, sentences)
    write_conllu_path(parsed, args.out)
    print(f"parsed {len(parsed.trees)} sentences", file=sys.stderr)
    _emit_manifest(args, [args.model, args.input], started)
    return 0


def _cmd_ensemble(args) -> int:
    started = time.monotonic()
    banks = [read_conllu(p, strict=True) for p in args.inputs]
    combined = combine_treebanks(banks, force_single_root=args.force_single_root)
    write_conllu_path(combined, args.out)
    print(f"ensembled {len(args.inputs)} parsers over {len(combined.trees)} "
          f"sentences", file=sys.stderr)
    _emit_manifest(args, list(args.inputs), started)
    return 0


def _cmd_eval(args) -> int:
    started = time.monotonic()
    pred = read_conllu(args.pred, strict=True)
    gold = read_conllu(args.gold, strict=True)
    report = score(pred, gold, exclude_punct=args.exclude_punct,
                   coarse_labels=args.coarse_labels)
    if args.json:
        Path(args.json).write_text(json.dumps(report_to_json(report), indent=2)
                                   + "\n", encoding="utf-8")
    print(format_report(report), file=sys.stderr)
    _emit_manifest(args, [args.pred, args.gold], started)
    return 0


def _cmd_stats(args) -> int:
    started = time.monotonic()
    banks = [read_conllu(p, strict=args.strict) for p in args.inputs]
    exclude = frozenset(x for x in args.exclude.split(",") if x)
    dists = [relation_distribution(tb, exclude=exclude, coarse=not args.full_labels,
                                   name=Path(p).stem)
             for tb, p in zip(banks, args.inputs)]
    payload = {
        "schema_version": 1,
        "corpora": [],
        "comparison": None,
    }
    for p, tb, dist in zip(args.inputs, banks, dists):
        summary = corpus_summary(tb)
        payload["corpora"].append({
            "name": Path(p).stem,
            "sentences": summary.sentence_count,
            "tokens": summary.token_count,
            "mean_length": summary.mean_length,
            "length_percentiles": summary.percentiles,
            "relation_shares": dist.proportions,
        })
        print(f"{Path(p).stem}: {summary.sentence_count} sentences, "
              f"{summary.token_count} tokens", file=sys.stderr)
    if len(dists) >= 2:
        rows = compare_distributions(dists, min_share=args.min_share)
        names = [d.corpus_name for d in dists]
        payload["comparison"] = {
            "min_share": args.min_share,
            "rows": [{"label": r.label, "shares": r.shares} for r in rows],
        }
        if args.tsv:
            Path(args.tsv).write_text(comparison_tsv(rows, names), encoding="utf-8")
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n",
                              encoding="utf-8")
    _emit_manifest(args, list(args.inputs), started)
    return 0


def _cmd_extract(args) -> int:
    started = time.monotonic()
    tb = read_conllu(args.input, strict=args.strict)
    if args.jobs > 1 and len(tb.trees) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            tuple_lists = list(pool.map(extract, tb.trees,
                                        chunksize=max(1, len(tb.trees) // (4 * args.jobs))))
    else:
        tuple_lists = [extract(t) for t in tb.trees]
    Path(args.out).write_text(write_tuples_jsonl(tuple_lists), encoding="utf-8")
    total = sum(len(ts) for ts in tuple_lists)
    print(f"extracted {total} tuples from {len(tb.trees)} sentences",
          file=sys.stderr)
    _emit_manifest(args, [args.input], started)
    return 0


def _cmd_diff_extract(args) -> int:
    started = time.monotonic()
    tb_a = read_conllu(args.a, strict=True)
    tb_b = read_conllu(args.b, strict=True)
    tuples_a = [extract(t) for t in tb_a.trees]
    tuples_b = [extract(t) for t in tb_b.trees]
    differing = diff_extractions(tuples_a, tuples_b)
    payload = {
        "schema_version": 1,
        "differing": [
            {
                "index": i,
                "sent_id": tb_a.trees[i].sent_id,
                "a": [tuple_to_json(t) for t in tuples_a[i]],
                "b": [tuple_to_json(t) for t in tuples_b[i]],
            }
            for i in differing
        ],
    }
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n",
                              encoding="utf-8")
    print(f"{len(differing)}/{len(tb_a.trees)} sentences extract differently",
          file=sys.stderr)
    _emit_manifest(args, [args.a, args.b], started)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="headparse", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, jobs=False):
        p.add_argument("--manifest", help="also write the run manifest JSON here")
        p.add_argument("--strict", action="store_true",
                       help="abort on malformed input instead of skipping")
        if jobs:
            p.add_argument("--jobs", type=int, default=1,
                           help="per-sentence worker processes (default 1)")

    p = sub.add_parser("align", help="subsequence-align headlines to lead sentences")
    p.add_argument("--pairs", help="two-column TSV of headline TAB lead sentence")
    p.add_argument("--headlines", help="CoNLL-U headlines (alternative to --pairs)")
    p.add_argument("--sentences", help="CoNLL-U lead sentences (with --headlines)")
    p.add_argument("--case-sensitive", action="store_true")
    p.add_argument("--out", required=True, help="JSON-lines alignment output")
    common(p)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("project", help="build a silver headline treebank")
    p.add_argument("--pairs", required=True)
    p.add_argument("--sentences", required=True,
                   help="parsed lead sentences, parallel to --pairs")
    p.add_argument("--case-sensitive", action="store_true")
    p.add_argument("--out", required=True, help="silver CoNLL-U output")
    p.add_argument("--report", help="JSON-lines per-pair outcome report")
    common(p, jobs=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("train", help="train the averaged-perceptron parser")
    p.add_argument("--stage", action="append", required=True,
                   metavar="FILE.conllu:EPOCHS",
                   help="training stage; repeat for fine-tuning regimes")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", "-o", required=True, help="model file output")
    common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("parse", help="parse tagged sentences with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True,
                   help="CoNLL-U with forms and UPOS (heads may be _)")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("ensemble", help="combine parallel predictions by reparsing")
    p.add_argument("--inputs", nargs="+", required=True,
                   metavar="PRED.conllu")
    p.add_argument("--force-single-root", action="store_true")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--exclude-punct", action="store_true",
                   help="drop tokens whose gold UPOS is PUNCT from all counts")
    p.add_argument("--coarse-labels", action="store_true",
                   help="compare labels truncated at the colon")
    p.add_argument("--json", help="write the JSON report here")
    common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="corpus statistics and label distributions")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--exclude", default="punct,root",
                   help="comma-separated labels to exclude (default punct,root)")
    p.add_argument("--full-labels", action="store_true",
                   help="keep label subtypes instead of coarse labels")
    p.add_argument("--min-share", type=float, default=0.02,
                   help="comparison rows need this share somewhere (default 0.02)")
    p.add_argument("--out", required=True, help="JSON output")
    p.add_argument("--tsv", help="also write the comparison as TSV")
    common(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("extract", help="extract predicate-argument tuples")
    p.add_argument("--input", required=True, help="parsed CoNLL-U")
    p.add_argument("--out", required=True, help="JSON-lines tuples")
    common(p, jobs=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("diff-extract",
                       help="sentences whose extractions differ between two parses")
    p.add_argument("--a", required=True, metavar="A.conllu")
    p.add_argument("--b", required=True, metavar="B.conllu")
    p.add_argument("--out", required=True, help="JSON output")
    common(p)
    p.set_defaults(func=_cmd_diff_extract)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command == "align" and not args.pairs and not (args.headlines
                                                           and args.sentences):
        print("error: align needs --pairs or both --headlines and --sentences",
              file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except HeadparseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
