"""Exception types shared across the package."""

from __future__ import annotations


class DivergenceError(RuntimeError):
    """Training loss became non-finite."""


class PipelineError(RuntimeError):
    """A pipeline stage failed; carries the tick at which it happened."""

    def __init__(self, message: str, tick: int | None = None):
        super().__init__(message if tick is None else f"{message} (tick {tick})")
        self.tick = tick


class ConfigValidationError(ValueError):
    """Configuration rejected; ``errors`` lists every violated field."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(errors))
        self.errors = list(errors)
