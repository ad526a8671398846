"""Entanglement of rotating few-body systems in the lowest Landau level."""

__version__ = "0.1.0"

from .fock import EmptySubspace, Statistics, SubspaceBasis, enumerate_basis  # noqa: E402
from .interaction import InteractionKind, element_table  # noqa: E402
from .solver import build_hamiltonian, ground_state, ground_state_dense  # noqa: E402
from .entanglement import report  # noqa: E402

__all__ = [
    "EmptySubspace",
    "InteractionKind",
    "Statistics",
    "SubspaceBasis",
    "build_hamiltonian",
    "element_table",
    "enumerate_basis",
    "ground_state",
    "ground_state_dense",
    "report",
]
