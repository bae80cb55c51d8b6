"""Entangled-pair generation from a partially coherent pump (crossed Type-I crystals).

Model chain for a pump whose H and V components are displaced by ``d``:

    V(d) = offset + amplitude * exp(-(d/sigma)^2),  sigma = FWHM / (2 sqrt(ln 2))
    S2_in = (1 + V^2) / 2                           pump polarization purity
    p = (1 + V) / 2                                 singlet weight
    rho = p |Psi-><Psi-| + (1 - p) |Psi+><Psi+|

The mixture has D^2 = 0 and T^2 = (1 + (1 - 2p)^2) / 2 = S2_in, so the pump
coherence reappears entirely as correlation. The singlet weight is read out
through beam-splitter antibunching, P = (1 - v)/2 + p v, where ``v`` is the
two-photon interference visibility measured on a triplet state.

Note on the pump purity: a 2x2 polarization state with off-diagonal V/2 has
purity (1 + V^2)/2. The (1 - V^2)/2 form sometimes printed for it disagrees
with every tabulated S2_in value and is not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import bell_state, density_matrix
from .cphase import ScenarioResult
from .tomography import state_summary

TABLE2_D_UM = (0, 26, 42, 56, 72, 86, 100, 120, 138, 158)
TABLE2_S2_IN = (0.974, 0.896, 0.796, 0.706, 0.620, 0.568, 0.535, 0.512, 0.505, 0.502)

PSI_MINUS = density_matrix(bell_state("psi-"))
PSI_PLUS = density_matrix(bell_state("psi+"))


class OutOfModelError(ValueError):
    """Observed antibunching probability lies outside the band the model can produce."""

    def __init__(self, message: str, clamped: "SingletMixture"):
        super().__init__(message)
        self.clamped = clamped


@dataclass(frozen=True)
class SpdcConfig:
    displacements_um: tuple[float, ...] = TABLE2_D_UM
    fit_offset: float = 0.029
    fit_amplitude: float = 0.945
    fwhm_um: float = 142.0
    triplet_visibility: float = 0.94
    bias_um: float = 84.0
    # displacements are raw measured delays that still contain the bias
    raw_delays: bool = False
    # coincidences per antibunching measurement; 0 = noiseless readout
    coincidences: int = 0
    seed: int = 0

    def __post_init__(self):
        if not self.fwhm_um > 0:
            raise ValueError("fwhm_um must be positive")
        if self.fit_offset < 0 or self.fit_amplitude < 0:
            raise ValueError("fit_offset and fit_amplitude must be non-negative")
        if self.fit_offset + self.fit_amplitude > 1 + 1e-6:
            raise ValueError("fit_offset + fit_amplitude must not exceed 1")
        if not 0 < self.triplet_visibility <= 1:
            raise ValueError("triplet_visibility must lie in (0, 1]")
        if self.coincidences < 0:
            raise ValueError("coincidences must be non-negative")

    @property
    def sigma_um(self) -> float:
        return self.fwhm_um / (2 * math.sqrt(math.log(2)))

    def effective_displacements(self) -> tuple[float, ...]:
        if self.raw_delays:
            return tuple(d - self.bias_um for d in self.displacements_um)
        return tuple(self.displacements_um)


@dataclass(frozen=True)
class SingletMixture:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"singlet fraction {self.p} outside [0, 1]")


def visibility(d_um: float, cfg: SpdcConfig | None = None) -> float:
    cfg = cfg or SpdcConfig()
    return cfg.fit_offset + cfg.fit_amplitude * math.exp(-((d_um / cfg.sigma_um) ** 2))


def pump_coherence_S2in(V: float) -> float:
    return (1 + V**2) / 2


def singlet_fraction(V: float) -> SingletMixture:
    return SingletMixture((1 + V) / 2)


def mixture_state(m: SingletMixture) -> np.ndarray:
    return m.p * PSI_MINUS + (1 - m.p) * PSI_PLUS


def antibunch_probability(m: SingletMixture, interference_visibility: float) -> float:
    v = interference_visibility
    if not 0 < v <= 1:
        raise ValueError("interference visibility must lie in (0, 1]")
    return (1 - v) / 2 + m.p * v


def invert_antibunch(P: float, interference_visibility: float) -> SingletMixture:
    """Singlet fraction that explains an observed antibunching probability.

    Raises
    ------
    OutOfModelError
        If ``P`` falls outside [(1-v)/2, (1+v)/2] by more than 1e-9. The
        nearest attainable mixture is attached as ``err.clamped``.
    """
    v = interference_visibility
    if not 0 < v <= 1:
        raise ValueError("interference visibility must lie in (0, 1]")
    p = (P - (1 - v) / 2) / v
    if p < 0 or p > 1:
        clamped = SingletMixture(min(1.0, max(0.0, p)))
        if p < -1e-9 / v or p > 1 + 1e-9 / v:
            raise OutOfModelError(
                f"antibunching probability {P} outside [{(1 - v) / 2}, {(1 + v) / 2}]", clamped
            )
        return clamped
    return SingletMixture(p)


def run_spdc_sweep(cfg: SpdcConfig) -> list[ScenarioResult]:
    """One row per displacement: the model state read out through antibunching.

    The true singlet weight is turned into an antibunching probability with the
    triplet visibility, optionally sampled with ``cfg.coincidences`` binomial
    trials, and inverted back to a mixture before the measures are evaluated.
    """
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for d in cfg.effective_displacements():
        V = visibility(d, cfg)
        P = antibunch_probability(singlet_fraction(V), cfg.triplet_visibility)
        if cfg.coincidences:
            P = rng.binomial(cfg.coincidences, P) / cfg.coincidences
        try:
            mix = invert_antibunch(P, cfg.triplet_visibility)
        except OutOfModelError as err:
            mix = err.clamped
        rho = mixture_state(mix)
        s = state_summary(rho)
        D2 = (s["D_A"] ** 2 + s["D_B"] ** 2) / 2
        rows.append(
            ScenarioResult(
                x=float(d),
                D_A=s["D_A"],
                D_B=s["D_B"],
                T2=s["T2"],
                S2=s["S2"],
                D2_norm=D2 / s["S2"],
                T2_norm=s["T2"] / s["S2"],
                S2_in=pump_coherence_S2in(V),
            )
        )
    return rows


def theory_curve(cfg: SpdcConfig | None = None, d_max_um: float = 200.0, n_points: int = 201) -> list[dict[str, float]]:
    """Dense model curves vs bias-corrected displacement."""
    cfg = cfg or SpdcConfig()
    out = []
    for d in np.linspace(0.0, d_max_um, n_points):
        V = visibility(float(d), cfg)
        m = singlet_fraction(V)
        out.append(
            {
                "d_um": float(d),
                "visibility": V,
                "S2_in": pump_coherence_S2in(V),
                "singlet_fraction": m.p,
                "antibunch_probability": antibunch_probability(m, cfg.triplet_visibility),
                "T2": (1 + (1 - 2 * m.p) ** 2) / 2,
            }
        )
    return out
