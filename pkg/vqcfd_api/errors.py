"""Exception hierarchy shared by the solvers, the CLI and the HTTP surface."""


class VqcfdError(Exception):
    """Base class for every failure the toolkit reports on purpose."""


class ConfigurationError(VqcfdError):
    pass


class DegenerateStateError(VqcfdError):
    def __init__(self, message: str, cell: tuple[int, int]):
        super().__init__(message)
        self.cell = cell


class InstabilityError(VqcfdError):
    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class DimensionError(VqcfdError):
    pass


class QubitLimitError(VqcfdError):
    pass


class OptimizationError(VqcfdError):
    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class SchemaError(VqcfdError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class FitError(VqcfdError):
    pass


class CapacityError(VqcfdError):
    pass
