"""Exception hierarchy shared by every module."""


class LRUError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DSLSyntaxError(LRUError):
    def __init__(self, message, offset, text=""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class BoundExceeded(LRUError):
    pass


class BudgetExceeded(LRUError):
    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(f"candidate space {needed} exceeds budget {budget}")


class ZeroRingError(LRUError):
    def __init__(self):
        super().__init__("the zero ring has no maximal ideal")


class NotLocalError(LRUError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"ring is not local; witness {witness}")


class NotAnIdealError(LRUError):
    def __init__(self, witness, reason):
        self.witness = witness
        super().__init__(f"not an ideal ({reason}); witness {witness}")


class HomomorphismError(LRUError):
    pass


class TheoremViolation(LRUError):
    """Raised when a computation contradicts a proven statement; always a bug."""


class ConvergenceError(TheoremViolation):
    pass


class InseparableError(LRUError):
    pass
