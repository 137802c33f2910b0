"""Exception types raised across the package."""


class AkgeoError(Exception):
    """Base class for all errors raised by akgeo."""


class FrameMismatchError(AkgeoError, ValueError):
    """Objects expressed in different frames were combined."""


class InvariantViolation(AkgeoError, ValueError):
    """A structural invariant failed; ``residual`` holds the offending size."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DomainError(AkgeoError, ValueError):
    """Parameters lie outside the domain where a family is defined."""


class OracleDisagreement(AkgeoError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class SpecError(AkgeoError, ValueError):
    """A manifold-spec document could not be parsed or validated."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class PipelineError(AkgeoError, RuntimeError):
    """An error raised inside one stage of :func:`akgeo.report.run_pipeline`."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
