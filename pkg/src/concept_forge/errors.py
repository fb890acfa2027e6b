"""Exception types shared across the pipeline."""

from __future__ import annotations


class ConceptForgeError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(ConceptForgeError):
    """A corpus or artifact file violates its declared schema."""

    def __init__(self, message: str, line_number: int | None = None, path: str | None = None):
        self.line_number = line_number
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line_number is not None:
            prefix += f"line {line_number}: "
        super().__init__(prefix + message)


class VocabularyError(ConceptForgeError):
    """A vocabulary file or entry set violates its invariants."""


class UnknownConceptError(ConceptForgeError):
    """A concept id was not found in the graph or vocabulary."""


class YearRangeError(ConceptForgeError):
    """A year fell outside the valid snapshot range for the operation."""


class UniverseMismatchError(ConceptForgeError):
    """Prediction and truth disagree on the concept universe."""

    def __init__(self, extra_concepts):
        self.extra_concepts = sorted(extra_concepts)
        super().__init__(
            "predicted edges reference concepts absent from the truth graph: "
            + ", ".join(self.extra_concepts)
        )


class UnboundQuintupleError(ConceptForgeError):
    """A quintuple operation required bound evidence sentences."""


class ScorerProtocolError(ConceptForgeError):
    """A scorer returned a response that violates the wire protocol."""


class ScorerTransportError(ConceptForgeError):
    """The scorer endpoint could not be reached."""

    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{message} (after {attempts} attempt(s))")


class ConfigError(ConceptForgeError):
    """Pipeline configuration is invalid or references missing paths."""


class MissingArtifactError(ConceptForgeError):
    """A command needs an artifact another command has not produced yet."""

    def __init__(self, path: str, producer: str):
        self.path = path
        self.producer = producer
        super().__init__(f"missing artifact {path}; run `{producer}` first")
