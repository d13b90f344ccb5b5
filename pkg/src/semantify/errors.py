"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: data problems (corpus, model files)
exit with 3, remote-service problems with 4.
"""


class SemantifyError(Exception):
    """Base class for all package errors."""


class CorpusFormatError(SemantifyError):
    """A corpus file could not be parsed. Message carries a record locator."""


class CorpusValidationError(SemantifyError):
    """Parsed corpus data violates an invariant (empty description, ...)."""


class ModelFormatError(SemantifyError):
    """A persisted model file has an unknown version or kind."""


class EvaluationError(SemantifyError):
    """Evaluation precondition violated (e.g. train/test assay overlap)."""


class RemoteServiceError(SemantifyError):
    """The inference service could not be reached or reported a failure."""


class ProtocolError(RemoteServiceError):
    """The inference service answered outside the wire contract."""
