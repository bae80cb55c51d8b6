"""Simulated two-qubit polarization tomography and maximum-likelihood reconstruction.

Each qubit is measured in the H/V, D/A and R/L bases, giving 9 settings of
4 outcomes each (36 projectors). Counts carry Poisson shot noise. The
reconstruction is the iterative R rho R fixed point, falling back to a
diluted step whenever a plain step would lower the likelihood.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import SINGLE_KETS, ket, project_to_state, projector
from .measures import accessible_coherence_S2, correlation_T2, local_coherences_sq

log = logging.getLogger(__name__)

BASES = ("HV", "DA", "RL")
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DEFAULT_DILUTION = 0.1
_LIKELIHOOD_SLACK = 1e-13
_MIN_DILUTION = 1e-9


@dataclass(frozen=True)
class ProjectorSet:
    labels: tuple[tuple[str, str], ...]
    matrices: np.ndarray  # (K, 4, 4)
    settings: np.ndarray  # (K,) measurement-setting index of each projector

    @classmethod
    def standard(cls) -> "ProjectorSet":
        """The 36 products of {H, V, D, A, R, L} eigenprojectors, grouped by setting."""
        labels, mats, settings = [], [], []
        for s, (ba, bb) in enumerate(itertools.product(BASES, repeat=2)):
            for a in ba:
                for b in bb:
                    labels.append((a, b))
                    mats.append(projector(ket(a, b)))
                    settings.append(s)
        return cls(tuple(labels), np.array(mats), np.array(settings))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_settings(self) -> int:
        return int(self.settings.max()) + 1

    def index(self) -> dict[tuple[str, str], int]:
        return {lab: k for k, lab in enumerate(self.labels)}

    def probabilities(self, rho) -> np.ndarray:
        """Born probabilities Tr[rho P_k]."""
        return np.einsum("kij,ji->k", self.matrices, np.asarray(rho, dtype=complex)).real


@dataclass(frozen=True)
class MeasurementRecord:
    projector_label: tuple[str, str]
    counts: int
    total_per_setting: int

    def __post_init__(self):
        if self.counts < 0:
            raise ValueError(f"negative counts for {self.projector_label}: {self.counts}")
        if any(s not in SINGLE_KETS for s in self.projector_label):
            raise ValueError(f"unknown projector label {self.projector_label}")


@dataclass
class MLEResult:
    rho: np.ndarray
    converged: bool
    iterations: int
    diluted_steps: int = 0
    log_likelihood: list[float] = field(default_factory=list)


def expected_counts(rho, pset: ProjectorSet, N: float) -> np.ndarray:
    return N * np.clip(pset.probabilities(rho), 0.0, None)


def records_from_counts(counts, pset: ProjectorSet, N: int) -> list[MeasurementRecord]:
    return [
        MeasurementRecord(lab, int(c), int(N)) for lab, c in zip(pset.labels, counts)
    ]


def simulate_counts(rho, pset: ProjectorSet, N: int, seed=None) -> list[MeasurementRecord]:
    """Poisson-distributed coincidence counts with mean N Tr[rho P_k]."""
    if N <= 0:
        raise ValueError("N must be positive")
    rng = np.random.default_rng(seed)
    counts = rng.poisson(expected_counts(rho, pset, N))
    return records_from_counts(counts, pset, N)


def _frequencies(records, pset: ProjectorSet) -> tuple[np.ndarray, np.ndarray]:
    """Counts in projector order and their per-setting normalized frequencies.

    Frequencies are divided by the realized setting total and by the number of
    settings, so they sum to one and the R operator is the identity at the
    fixed point of a full-rank estimate.
    """
    idx = pset.index()
    counts = np.full(len(pset), -1, dtype=float)
    for rec in records:
        k = idx.get(tuple(rec.projector_label))
        if k is None:
            raise ValueError(f"record label {rec.projector_label} not in projector set")
        counts[k] = rec.counts
    if np.any(counts < 0):
        missing = [pset.labels[k] for k in np.flatnonzero(counts < 0)]
        raise ValueError(f"records do not cover projectors {missing}")
    totals = np.bincount(pset.settings, weights=counts, minlength=pset.n_settings)
    if np.any(totals <= 0):
        raise ValueError("every measurement setting needs at least one count")
    freqs = counts / totals[pset.settings] / pset.n_settings
    return counts, freqs


def _log_likelihood(freqs: np.ndarray, probs: np.ndarray) -> float:
    mask = freqs > 0
    if np.any(probs[mask] <= 0):
        return -np.inf
    return float(np.sum(freqs[mask] * np.log(probs[mask])))


def log_likelihood(rho, records, pset: ProjectorSet) -> float:
    """Frequency-weighted log-likelihood sum_k f_k log Tr[rho P_k]."""
    _, freqs = _frequencies(records, pset)
    return _log_likelihood(freqs, pset.probabilities(rho))


def _diluted_step(rho, probs, L, step, freqs, born, dilution):
    """Largest eps in dilution * 2^-k with L((1-eps) rho + eps step) >= L.

    Returns the current state unchanged if no such eps above _MIN_DILUTION exists.
    """
    eps = dilution
    while eps >= _MIN_DILUTION:
        cand = (1 - eps) * rho + eps * step
        cand_probs = (born @ cand.ravel()).real
        cand_L = _log_likelihood(freqs, cand_probs)
        if cand_L >= L - _LIKELIHOOD_SLACK:
            return cand, cand_probs, cand_L
        eps /= 2
    return rho, probs, L


def mle_reconstruct(
    records,
    pset: ProjectorSet,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    dilution: float = DEFAULT_DILUTION,
    track_likelihood: bool = False,
) -> MLEResult:
    """Maximum-likelihood density matrix by R rho R iteration.

    Starts from I/4. Each step tries ``rho <- N[R rho R]``; if that lowers the
    likelihood (oscillation, or a zero-probability projector with counts) the
    diluted step ``rho <- (1 - eps) rho + eps N[R rho R]`` is used instead,
    halving ``eps`` from ``dilution`` until the likelihood does not decrease.
    Stops once the largest entry change is below ``tol``.
    """
    _, freqs = _frequencies(records, pset)
    P = pset.matrices
    flat = P.reshape(len(pset), 16)
    # Tr[rho P_k] = sum_ij P_k,ji rho_ij
    born = P.transpose(0, 2, 1).reshape(len(pset), 16)

    rho = np.eye(4, dtype=complex) / 4
    probs = (born @ rho.ravel()).real
    L = _log_likelihood(freqs, probs)
    history = [L] if track_likelihood else []
    diluted = 0
    converged = False
    it = 0

    for it in range(1, max_iter + 1):
        ratio = np.divide(freqs, probs, out=np.zeros_like(freqs), where=probs > 0)
        R = (ratio @ flat).reshape(4, 4)
        step = R @ rho @ R
        step = (step + step.conj().T) / 2
        step /= np.trace(step).real

        cand = step
        cand_probs = (born @ cand.ravel()).real
        cand_L = _log_likelihood(freqs, cand_probs)
        if cand_L < L - _LIKELIHOOD_SLACK:
            diluted += 1
            cand, cand_probs, cand_L = _diluted_step(rho, probs, L, step, freqs, born, dilution)

        delta = float(np.max(np.abs(cand - rho)))
        rho, probs, L = cand, cand_probs, cand_L
        if track_likelihood:
            history.append(L)
        if delta < tol:
            converged = True
            break

    if not converged:
        log.warning("R rho R did not converge within %d iterations", max_iter)
    return MLEResult(project_to_state(rho), converged, it, diluted, history)


def state_summary(rho) -> dict[str, float]:
    """D_A, D_B (square roots of local coherence), T^2 and S^2 of a state."""
    da2, db2 = local_coherences_sq(rho)
    return {
        "D_A": float(np.sqrt(max(da2, 0.0))),
        "D_B": float(np.sqrt(max(db2, 0.0))),
        "T2": correlation_T2(rho),
        "S2": accessible_coherence_S2(rho),
    }


def _spread(samples: list[dict[str, float]]) -> dict[str, float]:
    keys = samples[0].keys()
    return {k: float(np.std([s[k] for s in samples], ddof=1)) for k in keys}


def resample_uncertainty(
    records,
    pset: ProjectorSet,
    replicates: int,
    seed=None,
    tol: float = 1e-8,
    max_iter: int = 20_000,
) -> dict[str, float]:
    """Parametric-bootstrap standard deviations of D_A, D_B, T^2 and S^2.

    Each replicate redraws every count from a Poisson distribution centred on
    the observed value and repeats the reconstruction.
    """
    if replicates < 10:
        raise ValueError("replicates must be at least 10")
    counts, _ = _frequencies(records, pset)
    N = records[0].total_per_setting
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(replicates):
        redrawn = rng.poisson(counts)
        res = mle_reconstruct(records_from_counts(redrawn, pset, N), pset, tol, max_iter)
        out.append(state_summary(res.rho))
    return _spread(out)


def repeat_uncertainty(
    rho,
    pset: ProjectorSet,
    N: int,
    replicates: int,
    seed=None,
    tol: float = 1e-8,
    max_iter: int = 20_000,
) -> dict[str, float]:
    """Standard deviations over independent simulated repetitions of the experiment."""
    if replicates < 10:
        raise ValueError("replicates must be at least 10")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(replicates):
        recs = simulate_counts(rho, pset, N, rng)
        res = mle_reconstruct(recs, pset, tol, max_iter)
        out.append(state_summary(res.rho))
    return _spread(out)
