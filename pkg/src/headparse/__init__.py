"""Headline dependency parsing toolkit.

Turns headline / lead-sentence pairs into silver dependency-annotated
training data by tree projection, trains and ensembles a deterministic
transition-based parser on gold+silver mixtures, scores treebanks with
attachment, exact-match and per-relation metrics, and extracts
predicate-argument tuples from the resulting parses.
"""

__version__ = "0.1.0"

from .align import Alignment, align_subsequence, filter_pairs, read_pairs_tsv
from .conllu import (DepTree, Token, Treebank, Violation, read_conllu,
                     validate, write_conllu, write_conllu_path)
from .ensemble import VoteGraph, build_votes, combine, combine_treebanks, reparse
from .errors import (ContractError, FormatError, HeadparseError, ParseError,
                     ValidationError)
from .evalmetrics import (EvalReport, RelationScore, cohen_kappa, normal_sf,
                          relative_error_reduction, score, two_proportion_test)
from .openie import ExtractionTuple, diff_extractions, extract
from .parser import (ParserModel, holdout_split, is_projective, load_model,
                     parse, parse_tree, parse_treebank, save_model,
                     static_oracle, train)
from .project import (ProjectionResult, build_silver_corpus, extract_subtree,
                      project_tree)
from .stats import (RelationDistribution, compare_distributions,
                    corpus_summary, relation_distribution)

__all__ = [
    "__version__",
    "Alignment", "align_subsequence", "filter_pairs", "read_pairs_tsv",
    "DepTree", "Token", "Treebank", "Violation", "read_conllu", "validate",
    "write_conllu", "write_conllu_path",
    "VoteGraph", "build_votes", "combine", "combine_treebanks", "reparse",
    "ContractError", "FormatError", "HeadparseError", "ParseError",
    "ValidationError",
    "EvalReport", "RelationScore", "cohen_kappa", "normal_sf",
    "relative_error_reduction", "score", "two_proportion_test",
    "ExtractionTuple", "diff_extractions", "extract",
    "ParserModel", "holdout_split", "is_projective", "load_model", "parse",
    "parse_tree", "parse_treebank", "save_model", "static_oracle", "train",
    "ProjectionResult", "build_silver_corpus", "extract_subtree",
    "project_tree",
    "RelationDistribution", "compare_distributions", "corpus_summary",
    "relation_distribution",
]
