"""Runtime failures; input validation uses django's ValidationError."""


class DvqoaError(Exception):
    """Base class for runtime failures of the optimizer and its oracles."""


class ObjectiveError(DvqoaError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class BlackBoxError(DvqoaError):
    def __init__(self, message, assignment=None):
        super().__init__(message)
        self.assignment = assignment


class MemoryGuardError(DvqoaError):
    pass


class OracleCapError(DvqoaError):
    def __init__(self, message, work=None):
        super().__init__(message)
        self.work = work


class TransmissionError(DvqoaError):
    pass


class RunError(DvqoaError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or []
