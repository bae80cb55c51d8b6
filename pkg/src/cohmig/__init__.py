"""Coherence migration between two qubits: measures, experiments, tomography."""

from .core import (
    density_matrix,
    partial_trace,
    purity,
    random_global_unitary,
    random_pure_state_2q,
    tensor_product,
)
from .measures import (
    accessible_coherence_S2,
    correlation_T2,
    decompose,
    local_coherence_sq,
    mean_coherence_sq,
    witness,
)

__version__ = "0.1.0"
