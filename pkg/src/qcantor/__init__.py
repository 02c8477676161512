"""Exact Q-Cantor series tools: expansions, normality statistics, Moran bounds and witness streams."""

from .basis import (BasicSequence, DigitStream, RuleSequence, digits_of_rational, explicit, log_rule,
                    parse_rule, power_of_two, qnk, successor, t_map, value_of_digits)
from .errors import (ConfigError, ConstructionError, DomainError, HorizonError, PreconditionError,
                     QCantorError, RangeError)

__version__ = "0.1.0"

__all__ = [
    "BasicSequence", "DigitStream", "RuleSequence", "digits_of_rational", "explicit", "log_rule",
    "parse_rule", "power_of_two", "qnk", "successor", "t_map", "value_of_digits",
    "ConfigError", "ConstructionError", "DomainError", "HorizonError", "PreconditionError",
    "QCantorError", "RangeError", "__version__",
]
