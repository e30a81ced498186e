"""Error taxonomy shared by the library and the CLI.

Every error carries the exit code the CLI maps it to.
"""

from bfd_fileprint.mappings import EXIT_DATA_ERROR, EXIT_NOT_CONVERGED


class FileprintError(ValueError):
    exit_code = EXIT_DATA_ERROR


class EmptyInput(FileprintError):
    """Zero-length input; a zero vector is not a distribution."""


class DimensionMismatch(FileprintError):
    pass


class NotSymmetric(FileprintError):
    pass


class NotConverged(FileprintError):
    exit_code = EXIT_NOT_CONVERGED


class OutOfRange(FileprintError):
    pass


class InsufficientSamples(FileprintError):
    pass


class BadArchitecture(FileprintError):
    pass


class NonFiniteLoss(FileprintError):
    exit_code = EXIT_NOT_CONVERGED


class NoClasses(FileprintError):
    pass


class EmptyClass(FileprintError):
    pass


class InsufficientFiles(FileprintError):
    pass


class UnknownLabel(FileprintError):
    pass


class EmptyCorpus(FileprintError):
    pass


class VersionMismatch(FileprintError):
    pass


class CorruptModel(FileprintError):
    def __init__(self, field_path: str, reason: str):
        self.field_path = field_path
        self.reason = reason
        super().__init__(f"Corrupt model at '{field_path}': {reason}")


class BadSpec(FileprintError):
    pass
