"""Entanglement and Bell nonlocality under a permutation superselection rule."""

from .core import (
    Atom,
    BudgetError,
    DensityOperator,
    EnsembleLayout,
    SSRError,
    StateVector,
    ValidationError,
    entropy_bits,
    is_ppt,
    partial_trace,
    partial_transpose,
    tensor_compose,
)
from .entanglement import (
    ConstrainedEntanglementReport,
    bell_ensemble_constrained_entanglement,
    biorthogonal_entanglement,
    constrained_entanglement_bruteforce,
    multicopy_recovery,
    pure_entanglement,
)
from .symmetry import Permutation, global_twirl, local_twirl, sector_projectors, spin_sectors

__version__ = "0.1.0"
