"""Exception hierarchy shared across the toolkit."""


class HeadparseError(Exception):
    """Base class for all toolkit errors."""


class ParseError(HeadparseError):
    """Malformed input file (CoNLL-U or TSV); message names the line."""


class ValidationError(HeadparseError):
    """A dependency tree violates the structural contract."""


class ContractError(HeadparseError):
    """An operation was called with inputs outside its precondition."""


class FormatError(HeadparseError):
    """A model file is corrupt, truncated, or from an incompatible version."""
