"""Bipartite process matrices: validity, the generalized Born rule, a causal
guessing game, and the decomposition of classical processes into one-way parts."""

from .cj import CPMapCJ, Instrument
from .process import ProcessMatrix, joint_distribution, probability, validate
from .tensor import LabSystems

__version__ = "0.1.0"

__all__ = [
    "CPMapCJ",
    "Instrument",
    "LabSystems",
    "ProcessMatrix",
    "joint_distribution",
    "probability",
    "validate",
    "__version__",
]
