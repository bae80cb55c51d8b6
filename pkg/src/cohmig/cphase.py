"""Coherence migration through a tunable controlled-phase gate.

The gate multiplies |VV> by exp(i phi) and leaves the other basis states
alone. Fed with |++>, it moves local coherence into correlations:
D^2 = cos^2(phi/2)/2 and T^2 = 1 - cos^2(phi/2)/2, with S^2 = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tomography
from .core import density_matrix, evolve, ket, purity
from .tomography import state_summary

TABLE1_PHIS_OVER_PI = (0.0, 0.05, 0.125, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ScenarioResult:
    """One row of a sweep table: the scan coordinate plus the coherence budget.

    ``x`` is phi/pi for the gate sweep and the displacement in micrometres for
    the SPDC sweep. ``D_A``/``D_B`` are local coherences (not squared).
    """

    x: float
    D_A: float
    D_B: float
    T2: float
    S2: float
    D2_norm: float
    T2_norm: float
    dD_A: float = 0.0
    dD_B: float = 0.0
    dT2: float = 0.0
    dS2: float = 0.0
    S2_in: float | None = None

    @property
    def D2(self) -> float:
        return (self.D_A**2 + self.D_B**2) / 2

    @property
    def abs_diff(self) -> float | None:
        return None if self.S2_in is None else abs(self.S2 - self.S2_in)


@dataclass(frozen=True)
class CPhaseConfig:
    phis: tuple[float, ...] = tuple(math.pi * x for x in TABLE1_PHIS_OVER_PI)
    input_state: np.ndarray = field(default_factory=lambda: ket("D", "D"))
    white_noise_weight: float = 0.0
    # tomography; counts_per_setting == 0 means exact states, zero uncertainties
    counts_per_setting: int = 0
    replicates: int = 30
    uncertainty: str = "poisson"
    seed: int = 0

    def __post_init__(self):
        if not all(math.isfinite(p) for p in self.phis):
            raise ValueError("phase values must be finite")
        if not 0.0 <= self.white_noise_weight <= 1.0:
            raise ValueError("white_noise_weight must lie in [0, 1]")
        if abs(np.linalg.norm(self.input_state) - 1) > 1e-12:
            raise ValueError("input_state must be normalized")
        if self.uncertainty not in ("poisson", "repeated"):
            raise ValueError("uncertainty must be 'poisson' or 'repeated'")


def cphase_unitary(phi: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * phi)]).astype(complex)


def ideal_curves(phi: float) -> tuple[float, float]:
    """(D^2, T^2) for a perfect gate acting on |++>."""
    c2 = math.cos(phi / 2) ** 2
    return c2 / 2, 1 - c2 / 2


def add_white_noise(rho, w: float) -> np.ndarray:
    return (1 - w) * np.asarray(rho, dtype=complex) + w * np.eye(4) / 4


def output_state(phi: float, cfg: CPhaseConfig | None = None) -> np.ndarray:
    cfg = cfg or CPhaseConfig()
    rho = evolve(density_matrix(cfg.input_state), cphase_unitary(phi))
    if cfg.white_noise_weight:
        rho = add_white_noise(rho, cfg.white_noise_weight)
    return rho


def _row(x: float, rho, errors: dict[str, float] | None = None) -> ScenarioResult:
    s = state_summary(rho)
    P = purity(rho)
    D2 = (s["D_A"] ** 2 + s["D_B"] ** 2) / 2
    errors = errors or {}
    return ScenarioResult(
        x=x,
        D_A=s["D_A"],
        D_B=s["D_B"],
        T2=s["T2"],
        S2=s["S2"],
        D2_norm=D2 / P,
        T2_norm=s["T2"] / P,
        dD_A=errors.get("D_A", 0.0),
        dD_B=errors.get("D_B", 0.0),
        dT2=errors.get("T2", 0.0),
        dS2=errors.get("S2", 0.0),
    )


def run_sweep(cfg: CPhaseConfig) -> list[ScenarioResult]:
    """Evaluate the gate output at every phase in ``cfg.phis``.

    With ``counts_per_setting > 0`` each output is measured by simulated
    tomography, reconstructed by maximum likelihood, and given bootstrap error
    bars; otherwise the exact output state is used. Rows keep the order of
    ``cfg.phis`` and each phase gets its own seed derived from ``cfg.seed``.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(len(cfg.phis))
    pset = tomography.ProjectorSet.standard() if cfg.counts_per_setting else None
    rows = []
    for phi, ss in zip(cfg.phis, children):
        rho = output_state(phi, cfg)
        x = phi / math.pi
        if pset is None:
            rows.append(_row(x, rho))
            continue
        sim_seed, err_seed = ss.spawn(2)
        recs = tomography.simulate_counts(rho, pset, cfg.counts_per_setting, np.random.default_rng(sim_seed))
        est = tomography.mle_reconstruct(recs, pset).rho
        if cfg.uncertainty == "poisson":
            errs = tomography.resample_uncertainty(recs, pset, cfg.replicates, np.random.default_rng(err_seed))
        else:
            errs = tomography.repeat_uncertainty(
                rho, pset, cfg.counts_per_setting, cfg.replicates, np.random.default_rng(err_seed)
            )
        rows.append(_row(x, est, errs))
    return rows


def theory_curve(n_points: int = 201) -> list[dict[str, float]]:
    """Densely sampled ideal D, T, their squares and the migrated fraction vs phi/pi.

    The migrated fraction is the share of the input local coherence that has
    turned into correlation, 1 - D^2(phi)/D^2(0) = sin^2(phi/2).
    """
    out = []
    for x in np.linspace(0.0, 1.0, n_points):
        D2, T2 = ideal_curves(math.pi * x)
        out.append(
            {
                "phi_over_pi": float(x),
                "D": math.sqrt(D2),
                "T": math.sqrt(T2),
                "D2": D2,
                "T2": T2,
                "migration_ratio": 1 - 2 * D2,
            }
        )
    return out


def noise_weight_for_purity(target: float) -> float:
    """White-noise weight w giving a pure input's output purity ``target``.

    The purity of (1-w)|psi><psi| + w I/4 is P(w) = 1 - 3w/2 + 3w^2/4;
    this returns the root in [0, 1].
    """
    if not 0.25 <= target <= 1.0:
        raise ValueError("purity target must lie in [1/4, 1]")
    # 3/4 w^2 - 3/2 w + (1 - P) = 0, smaller root
    return 1 - math.sqrt(1 - 4 * (1 - target) / 3)
