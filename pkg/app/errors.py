"""Exception hierarchy for the workbench.

Library code raises these eagerly; the suite pipeline and the CLI are the
only places that turn them into reports or exit codes.
"""

from fractions import Fraction
from typing import Any, Optional, Tuple


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class MalformedIntervalError(WorkbenchError, ValueError):
    """An interval with lo >= hi, a negative endpoint, or an unparsable rational."""


class AmbientError(WorkbenchError, ValueError):
    """A set does not fit its ambient, or the ambient has no unit element."""


class NullSetError(WorkbenchError, ValueError):
    """An operation that needs positive measure received a null set."""


class ArityMismatchError(WorkbenchError, TypeError):
    def __init__(self, op_name: str, expected: int, got: int):
        self.op_name = op_name
        self.expected = expected
        self.got = got
        super().__init__(f"operation '{op_name}' has arity {expected}, got {got} arguments")


class AlgebraError(WorkbenchError, ValueError):
    """Malformed finite algebra description or missing ring operations."""


class StepFunctionError(WorkbenchError, ValueError):
    """Pieces of a step function do not partition [0,1) with distinct labels."""


class PartitionError(WorkbenchError, ValueError):
    """Per-label limit sets overlap or fail to fill [0,1)."""

    def __init__(
        self,
        message: str,
        overlap: Optional[Tuple[str, str, Any]] = None,
        deficit: Optional[Fraction] = None,
    ):
        super().__init__(message)
        self.overlap = overlap
        self.deficit = deficit

    def __repr__(self) -> str:
        return f"PartitionError('{self}', overlap={self.overlap!r}, deficit={self.deficit!r})"


class ContractBreachError(WorkbenchError, RuntimeError):
    """A materialized value violates a bound that was promised for it."""


class HorizonExceededError(WorkbenchError, RuntimeError):
    def __init__(self, target: Fraction, horizon: int):
        self.target = target
        self.horizon = horizon
        super().__init__(f"tail bound does not reach {target} within horizon {horizon}")


class WeakCarrierError(WorkbenchError, ValueError):
    """The carrier lacks the Lipschitz join hypothesis the completion proof needs."""


class ConfigError(WorkbenchError, ValueError):
    """Invalid command-line or environment configuration."""


class ChainError(WorkbenchError, ValueError):
    """Input is not a strictly increasing chain of finite subsets."""
