"""Exception types shared across the package."""


class FreephishError(Exception):
    """Base class for all package errors."""


class RegistryError(FreephishError):
    """Registry file could not be parsed or violates registry invariants."""


class UrlError(FreephishError):
    """Input string could not be canonicalized into a URL."""


class TransportError(FreephishError):
    """A fetch or entity-client call failed at the transport level."""


class CorpusError(FreephishError):
    """A snapshot corpus record is corrupt or the corpus is unreadable."""


class ScannerError(FreephishError):
    """The detection-count scanner failed at the transport level."""


class UndefinedSimilarityError(FreephishError):
    """Similarity requested for an empty source tag sequence."""


class DatasetError(FreephishError):
    """Labeled dataset violates training preconditions."""


class SchemaMismatchError(FreephishError):
    """Feature schema versions of model and data do not agree."""


class ObservationLogError(FreephishError):
    """Observation log record violates log invariants."""


class ReportError(FreephishError):
    """Abuse report construction precondition failed."""
