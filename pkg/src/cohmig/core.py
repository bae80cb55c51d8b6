"""Small fixed-size quantum linear algebra for one and two polarization qubits.

States are plain numpy arrays. Two-qubit objects use the basis order
``(HH, HV, VH, VV)`` with qubit A as the slow (leftmost) Kronecker index;
``|H>`` is the Z-up state ``(1, 0)``.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10

# single-qubit kets
KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_D = (KET_H + KET_V) / np.sqrt(2)
KET_A = (KET_H - KET_V) / np.sqrt(2)
KET_R = (KET_H + 1j * KET_V) / np.sqrt(2)
KET_L = (KET_H - 1j * KET_V) / np.sqrt(2)

SINGLE_KETS = {"H": KET_H, "V": KET_V, "D": KET_D, "A": KET_A, "R": KET_R, "L": KET_L}

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class StateValidationError(ValueError):
    """Raised when a matrix is not a valid density matrix (or not Hermitian)."""


def ket(*labels: str) -> np.ndarray:
    """Product ket from polarization labels, e.g. ``ket("H", "V")`` is |HV>."""
    out = np.array([1], dtype=complex)
    for lab in labels:
        try:
            out = np.kron(out, SINGLE_KETS[lab])
        except KeyError:
            raise ValueError(f"unknown polarization label {lab!r}") from None
    return out


def projector(psi) -> np.ndarray:
    """|psi><psi| for a (not necessarily normalized) ket."""
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def bell_state(name: str) -> np.ndarray:
    """Bell kets ``phi+``, ``phi-``, ``psi+``, ``psi-`` in the HH/HV/VH/VV basis."""
    s = 1 / np.sqrt(2)
    table = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    try:
        return np.array(table[name.lower()], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown Bell state {name!r}") from None


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateValidationError(f"expected a square matrix, got shape {m.shape}")
    err = np.max(np.abs(m - m.conj().T))
    if err > tol:
        raise StateValidationError(f"matrix is not Hermitian (max deviation {err:.3e})")
    return m


def eigenvalues_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a 2x2 or 4x4 Hermitian matrix.

    Raises
    ------
    StateValidationError
        If ``m`` deviates from Hermitian by more than ``tol``.
    """
    m = check_hermitian(m, tol)
    if m.shape[0] not in (2, 4):
        raise StateValidationError(f"only dimensions 2 and 4 are supported, got {m.shape[0]}")
    h = (m + m.conj().T) / 2
    return np.linalg.eigvalsh(h)


def validate_state(rho, dim: int | None = None) -> np.ndarray:
    """Check that ``rho`` is a density matrix and return it as a complex array.

    The checks are Hermiticity, unit trace and positivity, each to an absolute
    tolerance of 1e-10. ``dim`` optionally pins the dimension (2 or 4).
    """
    rho = check_hermitian(rho)
    d = rho.shape[0]
    if dim is not None and d != dim:
        raise StateValidationError(f"expected dimension {dim}, got {d}")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise StateValidationError(f"trace is {tr.real:.12g}, expected 1")
    lo = eigenvalues_hermitian(rho)[0]
    if lo < -PSD_TOL:
        raise StateValidationError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")
    return rho


def project_to_state(m) -> np.ndarray:
    """Nearest-by-clipping density matrix: Hermitize, clip negative eigenvalues, renormalize."""
    m = np.asarray(m, dtype=complex)
    h = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise StateValidationError("matrix has no positive spectral weight")
    out = (v * w) @ v.conj().T
    out = (out + out.conj().T) / 2
    return out / np.trace(out).real


def density_matrix(psi) -> np.ndarray:
    """Density matrix of a pure state; the ket is normalized first."""
    psi = np.asarray(psi, dtype=complex).ravel()
    n = np.linalg.norm(psi)
    if n == 0:
        raise StateValidationError("zero vector is not a state")
    return projector(psi / n)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``a`` (qubit A) as the slow index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho, keep: str = "A") -> np.ndarray:
    """Reduced 2x2 state of qubit ``keep`` ("A" or "B") of a 4x4 state."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    key = keep.upper()
    if key == "A":
        return np.einsum("ijkj->ik", r)
    if key == "B":
        return np.einsum("jijk->ik", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def purity(rho) -> float:
    """Tr[rho^2]."""
    rho = np.asarray(rho, dtype=complex)
    # Tr[rho rho] = sum_ij rho_ij rho_ji = sum |rho_ij|^2 for Hermitian rho
    return float(np.real(np.vdot(rho.conj().T, rho)))


def evolve(rho, u) -> np.ndarray:
    """U rho U^dagger."""
    u = np.asarray(u, dtype=complex)
    return u @ np.asarray(rho, dtype=complex) @ u.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = sq @ sigma @ sq
    ev = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_state(dim: int, seed=None) -> np.ndarray:
    """Haar-random unit ket in ``dim`` dimensions (normalized complex Gaussian)."""
    rng = _rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_pure_state_2q(seed=None) -> np.ndarray:
    """Haar-random two-qubit ket, deterministic for a fixed integer seed."""
    return random_pure_state(4, seed)


def random_mixed_state_2q(seed=None, ancilla_dim: int = 4) -> np.ndarray:
    """Random two-qubit density matrix from the induced measure.

    A Haar-random pure state on the 4 x ``ancilla_dim`` space is drawn and the
    ancilla traced out; ``ancilla_dim=4`` gives the Hilbert-Schmidt ensemble.
    """
    psi = random_pure_state(4 * ancilla_dim, seed).reshape(4, ancilla_dim)
    rho = psi @ psi.conj().T
    return (rho + rho.conj().T) / 2


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_global_unitary(seed=None) -> np.ndarray:
    """Haar-random 4x4 unitary acting on both qubits."""
    return random_unitary(4, seed)


def random_local_unitary(seed=None) -> np.ndarray:
    """U_A (x) U_B with independent Haar-random single-qubit factors."""
    rng = _rng(seed)
    return np.kron(random_unitary(2, rng), random_unitary(2, rng))
