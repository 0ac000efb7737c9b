"""Exception hierarchy. The CLI maps each family to an exit code."""


class TopicExplainError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(TopicExplainError, ValueError):
    """Bad input: malformed files, violated preconditions, refused comparisons."""


class ParseError(ValidationError):
    """A line-oriented input could not be parsed.

    ``line`` is 1-based; ``source`` names the file or stream when known.
    """

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class EmptyCorpusError(ValidationError):
    pass


class EnumerationBoundError(ValidationError):
    pass


class ComparisonRefusedError(ValidationError):
    pass


class DegenerateExplanationError(ValidationError):
    pass


class InvariantViolation(TopicExplainError, AssertionError):
    """An internal consistency check failed. Always a bug, never bad input."""
