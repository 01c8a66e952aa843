"""
Exceptions raised by the pipeline. Each one carries the CLI error code it maps to.
"""

from subgrain.cli.constants import PipelineErrorCodes


class SubgrainError(Exception):
    """The root exception for all pipeline errors."""

    code: PipelineErrorCodes = PipelineErrorCodes.UNKNOWN_ERROR


class SubtitleParseError(SubgrainError):
    """A SubRip file could not be parsed. Stores the offending line number."""

    code = PipelineErrorCodes.PARSE_ERROR

    def __init__(self, message: str, line: int, source: str | None = None) -> None:
        self.line = line
        self.source = source
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {message}")


class TimeSpanError(SubtitleParseError, ValueError):
    """A subtitle span ends before it starts."""


class FilterConfigError(SubgrainError, ValueError):
    code = PipelineErrorCodes.INVALID_CONFIG


class EmptyCorpusError(SubgrainError):
    code = PipelineErrorCodes.EMPTY_CORPUS


class FrameFormatError(SubgrainError):
    code = PipelineErrorCodes.PARSE_ERROR


class InputNotFoundError(SubgrainError, FileNotFoundError):
    code = PipelineErrorCodes.INPUT_NOT_FOUND


class BackendError(SubgrainError):
    """A model backend failed to produce a completion."""

    code = PipelineErrorCodes.BACKEND_FAILURE


class RetriableBackendError(BackendError):
    """A transient failure (timeout, transport). Retried by the backend."""


class BackendHardError(BackendError):
    """A failure that is not retried, such as a non-2xx response."""


class EmptyOutputError(BackendError):
    """The backend answered with an empty completion."""


class EmptyPromptError(BackendError, ValueError):
    """A completion was requested with no prompt text."""


class ScoringError(SubgrainError, ValueError):
    code = PipelineErrorCodes.SCORES_INVALID


class ScoreFormatError(ScoringError):
    pass


class MissingScoresError(SubgrainError):
    code = PipelineErrorCodes.SCORES_MISSING

    def __init__(self, message: str, missing: list | None = None) -> None:
        self.missing = missing or []
        super().__init__(message)


class ArtifactMismatchError(SubgrainError):
    """An artifact was produced by a different configuration than the current one."""

    code = PipelineErrorCodes.ARTIFACT_MISMATCH


class ConfigNotFoundError(InputNotFoundError):
    code = PipelineErrorCodes.CONFIG_NOT_FOUND


class InvalidConfigError(SubgrainError, ValueError):
    code = PipelineErrorCodes.INVALID_CONFIG


class StageIncompleteError(SubgrainError):
    """Some segments failed a stage. Finished segments are kept so a re-run resumes."""

    code = PipelineErrorCodes.STAGE_INCOMPLETE

    def __init__(self, message: str, failed: list[int] | None = None) -> None:
        self.failed = failed or []
        super().__init__(message)
