"""Coherence and correlation measures of two-qubit states.

Local coherence ``D_i^2 = Tr[rho_i^2] - 1/2``, correlation
``T^2 = (1 + sum t_ij^2) / 4`` and the accessible coherence
``S^2 = D^2 + T^2``, which equals the purity ``Tr[rho^2]`` for every
two-qubit state and is therefore invariant under global unitaries.

Pauli convention: sigma_1 = X, sigma_2 = Y with Y|H> = i|V>, sigma_3 = Z
with Z|H> = |H>. Under this convention |Phi+> has t = diag(1, -1, 1).

``T^2`` is bounded below by 1/4 (maximally mixed state). The value 1/2
often quoted as the minimum applies to pure product states only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import I2, PAULIS, partial_trace, purity

WITNESS_T2_THRESHOLD = 5 / 8


@dataclass(frozen=True)
class CorrelationDecomposition:
    """Pauli expansion rho = (I + a.sigma x I + I x b.sigma + sum t_ij sigma_i x sigma_j) / 4."""

    bloch_a: np.ndarray
    bloch_b: np.ndarray
    tensor_t: np.ndarray

    def reconstruct(self) -> np.ndarray:
        rho = np.kron(I2, I2).astype(complex)
        for i, s in enumerate(PAULIS):
            rho += self.bloch_a[i] * np.kron(s, I2)
            rho += self.bloch_b[i] * np.kron(I2, s)
            for j, s2 in enumerate(PAULIS):
                rho += self.tensor_t[i, j] * np.kron(s, s2)
        return rho / 4


@dataclass(frozen=True)
class WitnessReport:
    T2: float
    trace_R: float
    min_eig_R: float
    B: float
    B_lower_bound: float
    nonlocal_witnessed: bool
    clamped: bool = False


_SIGMA_A = np.array([np.kron(s, I2) for s in PAULIS])
_SIGMA_B = np.array([np.kron(I2, s) for s in PAULIS])
_SIGMA_AB = np.array([[np.kron(s, s2) for s2 in PAULIS] for s in PAULIS])


def decompose(rho) -> CorrelationDecomposition:
    """All 15 Pauli expectation values of a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    # Tr[rho O] = sum_ij rho_ij O_ji
    a = np.einsum("ij,kji->k", rho, _SIGMA_A).real
    b = np.einsum("ij,kji->k", rho, _SIGMA_B).real
    t = np.einsum("ij,klji->kl", rho, _SIGMA_AB).real
    return CorrelationDecomposition(a, b, t)


def local_coherence_sq(rho_i) -> float:
    """D_i^2 = Tr[rho_i^2] - 1/2, i.e. half the squared Bloch radius."""
    return purity(rho_i) - 0.5


def local_coherences_sq(rho) -> tuple[float, float]:
    """(D_A^2, D_B^2) of a two-qubit state."""
    return (
        local_coherence_sq(partial_trace(rho, "A")),
        local_coherence_sq(partial_trace(rho, "B")),
    )


def mean_coherence_sq(rho) -> float:
    da, db = local_coherences_sq(rho)
    return (da + db) / 2


def correlation_T2(rho) -> float:
    t = decompose(rho).tensor_t
    return float((1 + np.sum(t**2)) / 4)


def accessible_coherence_S2(rho) -> float:
    """S^2 = D^2 + T^2 (numerically equal to the purity of ``rho``)."""
    return mean_coherence_sq(rho) + correlation_T2(rho)


def horodecki_matrix(t) -> np.ndarray:
    """R = t^T t; symmetric PSD with Tr R = sum of squared t_ij."""
    t = np.asarray(t, dtype=float)
    return t.T @ t


def witness(rho) -> WitnessReport:
    """Maximal CHSH value B from the correlation tensor, plus its T^2 lower bound.

    ``B = 2 sqrt(Tr R - min eig R)`` and ``B >= 2 sqrt((8 T^2 - 2) / 3)``;
    nonlocality is witnessed when ``T^2 > 5/8``. A negative radicand can only
    come from rounding; it is clamped to zero and reported via ``clamped``.
    """
    t = decompose(rho).tensor_t
    T2 = float((1 + np.sum(t**2)) / 4)
    R = horodecki_matrix(t)
    trace_R = float(np.trace(R))
    min_eig = float(np.linalg.eigvalsh(R)[0])
    clamped = False

    rad = trace_R - min_eig
    if rad < 0:
        rad, clamped = 0.0, True
    rad_lb = (8 * T2 - 2) / 3
    if rad_lb < 0:
        rad_lb, clamped = 0.0, True

    return WitnessReport(
        T2=T2,
        trace_R=trace_R,
        min_eig_R=min_eig,
        B=2 * math.sqrt(rad),
        B_lower_bound=2 * math.sqrt(rad_lb),
        nonlocal_witnessed=T2 > WITNESS_T2_THRESHOLD,
        clamped=clamped,
    )


def chsh_lower_bound(T2: float) -> float:
    """2 sqrt((8 T^2 - 2)/3), the B bound implied by min eig R <= Tr R / 3."""
    return 2 * math.sqrt(max(0.0, (8 * T2 - 2) / 3))
