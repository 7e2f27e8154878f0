"""Exception types shared across the package."""


class RelDivError(Exception):
    """Base class for all library errors."""


class ZeroVector(RelDivError):
    """Vector norm too small to normalize."""

    def __init__(self, message="vector norm below 1e-12", line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimensionMismatch(RelDivError):
    """Embedding dimensions disagree."""

    def __init__(self, message="embedding dimensions disagree", line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(RelDivError):
    """A token file line could not be parsed."""

    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")


class SelfPair(RelDivError):
    """Diversity weight requested for a token paired with itself."""


class DuplicateToken(RelDivError):
    """Subset contains the same token id twice."""


class EmptySubset(RelDivError):
    """Objective evaluated on an empty subset."""


class EmptyInput(RelDivError):
    """Operation requires at least one token."""


class EmptyTracklet(RelDivError):
    """Tracklet has no frames."""


class InvalidCount(RelDivError):
    """Requested sample count outside the valid range."""


class TooLarge(RelDivError):
    """Candidate count exceeds the exhaustive-search limit."""


class WindowOverflow(RelDivError):
    """Stream window holds more tokens than the configured size."""


class UnsortedInput(RelDivError):
    """Tokens must be sorted by start time."""


class InfeasibleMargin(RelDivError):
    """Planted relevance margin unachievable; retry budget exhausted."""


class LengthMismatch(RelDivError):
    """Prediction and ground-truth lists differ in length."""
