"""Exception hierarchy shared by every module."""


class QCantorError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure."""

    exit_code = 1
    kind = "error"


class DomainError(QCantorError, ValueError):
    exit_code = 3
    kind = "domain"


class PreconditionError(QCantorError, ValueError):
    exit_code = 6
    kind = "precondition"


class RangeError(QCantorError, IndexError):
    """A finite sequence was queried past its end."""

    exit_code = 3
    kind = "range"


class HorizonError(QCantorError, RuntimeError):
    """A first-crossing search ran out of its configured horizon."""

    exit_code = 4
    kind = "horizon"


class ConstructionError(QCantorError, RuntimeError):
    exit_code = 5
    kind = "construction"


class ConfigError(QCantorError, ValueError):
    exit_code = 2
    kind = "config"
