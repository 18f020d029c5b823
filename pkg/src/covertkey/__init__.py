"""Covert and wiretap secret-key generation over binary-input two-user MACs."""

from .channel import (BinaryMacPair, CovertConfig, dump_channel, load_channel, table1_channel,
                      validate)
from .errors import (BudgetExceeded, CovertKeyError, DegenerateChannel, EmptyRegion,
                     InfeasiblePlan)

__version__ = "0.1.0"

__all__ = [
    "BinaryMacPair", "BudgetExceeded", "CovertConfig", "CovertKeyError", "DegenerateChannel",
    "EmptyRegion", "InfeasiblePlan", "dump_channel", "load_channel", "table1_channel",
    "validate",
]
