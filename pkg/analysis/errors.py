# analysis/errors.py


class ThetaSphError(Exception):
    """
    Base error of the library.

    Every error names the module that raised it and the condition that was
    violated, so the command line runner can report it verbatim.
    """

    def __init__(self, module: str, condition: str, details: str = ""):
        self.module = module
        self.condition = condition
        self.details = details
        message = f"{module}: {condition}"
        if details:
            message = f"{message} ({details})"
        super().__init__(message)

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "module": self.module,
            "condition": self.condition,
            "details": self.details,
        }


class InvalidSpecError(ThetaSphError):
    """Malformed input: unsupported root system, bad Θ, inconsistent job"""
    pass


class NumericFailure(ThetaSphError):
    """A numerical precondition failed during evaluation"""
    pass


class NonGenericError(NumericFailure):
    pass


class PoleError(NumericFailure):
    pass


class DomainError(NumericFailure):
    pass


class CapExceededError(NumericFailure):
    pass


class ConvergenceError(NumericFailure):
    pass
