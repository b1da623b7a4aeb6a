class WorkbenchError(Exception):
    """Base class for every error raised by the workbench"""


class MeshError(WorkbenchError):
    pass


class CoefficientError(WorkbenchError):
    pass


class ConfigurationError(WorkbenchError):
    pass


class ClassificationError(WorkbenchError):
    pass


class FactorizationError(WorkbenchError):
    """A factorization that must succeed did not (singular interior, S-tilde or coarse block)"""


class CoarseSpaceError(WorkbenchError):
    """A build-time matrix inequality between eigenproblem forms was violated"""


class IndefiniteOperatorError(WorkbenchError):
    pass


class SpectrumCapError(WorkbenchError):
    pass


class BoundViolation(WorkbenchError):
    """The condition number exceeded C times the selection tolerance"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
