"""Exception hierarchy shared across the toolkit.

Every error carries a short machine-readable ``code`` so that callers
(CLI, HTTP service, bindings) can surface it without parsing messages.
"""


class CurationError(Exception):
    """Base class for all data-level errors raised by this package."""

    code = "error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ParseError(CurationError):
    """Malformed subtitle or manifest content."""

    code = "parse-error"

    def __init__(self, message: str, *, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatDetectionError(ParseError):
    code = "format-detection-error"


class ManifestError(CurationError):
    code = "manifest-error"


class DuplicateDocIdError(ManifestError):
    code = "duplicate-doc-id"


class EmptyReferenceError(CurationError):
    """Reference text normalizes to zero words; WER is undefined."""

    code = "empty-reference"


class ParamMismatchError(CurationError):
    """MinHash signatures built with different parameters or seeds."""

    code = "param-mismatch"


class TooShortToShingleError(CurationError):
    code = "too-short-to-shingle"


class GridMismatchError(CurationError):
    """Manual and machine segments were cut on different window grids."""

    code = "grid-mismatch"


class ConfigError(CurationError):
    code = "config-error"
