"""Exception hierarchy shared by every coder in the package."""

from __future__ import annotations


class QIError(ValueError):
    """Base class for all data and parameter errors raised by qindex."""

    #: short kebab-case name printed by the CLI
    name = "qi-error"


class CapacityError(QIError):
    name = "capacity"


class OutOfRangeError(QIError):
    name = "out-of-range"


class BlockTooLongError(QIError):
    name = "block-too-long"


class RankOutOfRangeError(QIError):
    name = "rank-out-of-range"


class DigitOutOfRangeError(QIError):
    name = "digit-out-of-range"


class SymbolOutOfAlphabetError(QIError):
    name = "symbol-out-of-alphabet"


class DegenerateAlphabetError(QIError):
    name = "degenerate-alphabet"


class InconsistentParametersError(QIError):
    name = "inconsistent-parameters"


class CorruptStreamError(QIError):
    name = "corrupt-stream"


class CorruptIndexError(CorruptStreamError):
    name = "corrupt-index"


class BadMagicError(CorruptStreamError):
    name = "bad-magic"


class BadVersionError(CorruptStreamError):
    name = "bad-version"


class TruncatedStreamError(CorruptStreamError):
    name = "truncated-stream"
