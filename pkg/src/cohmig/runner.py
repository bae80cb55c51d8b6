"""Scenario execution and CSV emission.

Table files carry one row per sweep point; curve files carry densely sampled
model curves for plotting. Table values are written with six decimals, error
magnitudes that are expected to sit near machine precision in scientific
notation with six significant digits.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import core, cphase, spdc, tomography
from .config import RunConfig
from .measures import accessible_coherence_S2, correlation_T2

log = logging.getLogger(__name__)

CPHASE_COLUMNS = ("phi_over_pi", "D_A", "dD_A", "D_B", "dD_B", "T2", "dT2", "S2", "dS2", "D2_norm", "T2_norm")
CPHASE_CURVE_COLUMNS = ("phi_over_pi", "D", "T", "D2", "T2", "migration_ratio")
SPDC_COLUMNS = ("d_um", "D_A", "D_B", "T2", "S2_out", "S2_in", "abs_diff")
SPDC_CURVE_COLUMNS = ("d_um", "visibility", "S2_in", "singlet_fraction", "antibunch_probability", "T2")
CONSERVATION_COLUMNS = ("index", "kind", "S2_before", "S2_after", "abs_dS2", "abs_S2_minus_purity")
CONSERVATION_SUMMARY_COLUMNS = (
    "samples", "pure", "mixed", "max_abs_dS2", "max_abs_S2_minus_purity", "max_unitarity_error", "tolerance", "passed",
)
TOMO_COLUMNS = ("index", "fidelity", "T2_true", "T2_est", "S2_true", "S2_est", "iterations", "converged")


def fixed(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def sci(x: float) -> str:
    return f"{x:.5e}"


@dataclass
class RunOutcome:
    files: list[Path]
    ok: bool = True
    message: str = ""


def _write(path: Path, columns, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    return path


def _formatted(row: dict, columns, formatter=fixed) -> list[str]:
    out = []
    for c in columns:
        v = row[c]
        if isinstance(v, bool):
            out.append("true" if v else "false")
        elif isinstance(v, (int, np.integer)):
            out.append(str(int(v)))
        elif isinstance(v, str):
            out.append(v)
        else:
            out.append(formatter(float(v)))
    return out


def run_cphase(cfg: RunConfig, out: Path) -> RunOutcome:
    p = cfg.params
    ccfg = cphase.CPhaseConfig(
        phis=tuple(math.pi * x for x in p["phis_over_pi"]),
        white_noise_weight=p["white_noise_weight"],
        counts_per_setting=p["counts_per_setting"],
        replicates=p["replicates"],
        uncertainty=p["uncertainty"],
        seed=cfg.seed,
    )
    rows = []
    for r in cphase.run_sweep(ccfg):
        d = {
            "phi_over_pi": r.x, "D_A": r.D_A, "dD_A": r.dD_A, "D_B": r.D_B, "dD_B": r.dD_B,
            "T2": r.T2, "dT2": r.dT2, "S2": r.S2, "dS2": r.dS2, "D2_norm": r.D2_norm, "T2_norm": r.T2_norm,
        }
        rows.append(_formatted(d, CPHASE_COLUMNS))
    curve = [_formatted(c, CPHASE_CURVE_COLUMNS) for c in cphase.theory_curve(p["curve_points"])]
    return RunOutcome([
        _write(out / "cphase_table.csv", CPHASE_COLUMNS, rows),
        _write(out / "cphase_curves.csv", CPHASE_CURVE_COLUMNS, curve),
    ])


def run_spdc(cfg: RunConfig, out: Path) -> RunOutcome:
    p = cfg.params
    scfg = spdc.SpdcConfig(
        displacements_um=p["displacements_um"],
        fit_offset=p["fit_offset"],
        fit_amplitude=p["fit_amplitude"],
        fwhm_um=p["fwhm_um"],
        triplet_visibility=p["triplet_visibility"],
        bias_um=p["bias_um"],
        raw_delays=p["raw_delays"],
        coincidences=p["coincidences"],
        seed=cfg.seed,
    )
    rows = []
    for r in spdc.run_spdc_sweep(scfg):
        d = {
            "d_um": r.x, "D_A": r.D_A, "D_B": r.D_B, "T2": r.T2,
            "S2_out": r.S2, "S2_in": r.S2_in, "abs_diff": r.abs_diff,
        }
        rows.append(_formatted(d, SPDC_COLUMNS))
    curve = [
        _formatted(c, SPDC_CURVE_COLUMNS)
        for c in spdc.theory_curve(scfg, p["curve_max_um"], p["curve_points"])
    ]
    return RunOutcome([
        _write(out / "spdc_table.csv", SPDC_COLUMNS, rows),
        _write(out / "spdc_curves.csv", SPDC_CURVE_COLUMNS, curve),
    ])


def conservation_check(samples: int, pure_fraction: float, seed) -> dict:
    """S^2 before and after a Haar-random global unitary for random states.

    The first ``round(samples * pure_fraction)`` states are Haar-random pure
    states, the rest Hilbert-Schmidt random mixed states.
    """
    rng = np.random.default_rng(seed)
    n_pure = int(round(samples * pure_fraction))
    rows = []
    max_unitarity = 0.0
    for i in range(samples):
        kind = "pure" if i < n_pure else "mixed"
        if kind == "pure":
            rho = core.density_matrix(core.random_pure_state_2q(rng))
        else:
            rho = core.random_mixed_state_2q(rng)
        u = core.random_global_unitary(rng)
        max_unitarity = max(max_unitarity, float(np.max(np.abs(u @ u.conj().T - np.eye(4)))))
        before = accessible_coherence_S2(rho)
        after = accessible_coherence_S2(core.evolve(rho, u))
        rows.append({
            "index": i, "kind": kind, "S2_before": before, "S2_after": after,
            "abs_dS2": abs(after - before), "abs_S2_minus_purity": abs(before - core.purity(rho)),
        })
    return {
        "rows": rows,
        "samples": samples,
        "pure": n_pure,
        "mixed": samples - n_pure,
        "max_abs_dS2": max((r["abs_dS2"] for r in rows), default=0.0),
        "max_abs_S2_minus_purity": max((r["abs_S2_minus_purity"] for r in rows), default=0.0),
        "max_unitarity_error": max_unitarity,
    }


def run_conservation(cfg: RunConfig, out: Path) -> RunOutcome:
    p = cfg.params
    res = conservation_check(p["samples"], p["pure_fraction"], cfg.seed)
    tol = p["tolerance"]
    passed = res["max_abs_dS2"] < tol and res["max_abs_S2_minus_purity"] < tol
    summary = dict(res, tolerance=tol, passed=passed)
    rows = [
        [str(r["index"]), r["kind"], fixed(r["S2_before"]), fixed(r["S2_after"]),
         sci(r["abs_dS2"]), sci(r["abs_S2_minus_purity"])]
        for r in res["rows"]
    ]
    files = [
        _write(out / "conservation.csv", CONSERVATION_COLUMNS, rows),
        _write(out / "conservation_summary.csv", CONSERVATION_SUMMARY_COLUMNS,
               [_formatted(summary, CONSERVATION_SUMMARY_COLUMNS, sci)]),
    ]
    msg = f"max |dS2| = {res['max_abs_dS2']:.3e} over {res['samples']} samples"
    return RunOutcome(files, passed, msg)


def tomo_roundtrip(states: int, kind: str, N: int, seed, tol: float, max_iter: int) -> list[dict]:
    pset = tomography.ProjectorSet.standard()
    rows = []
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(states)):
        state_seed, count_seed = ss.spawn(2)
        rng = np.random.default_rng(state_seed)
        if kind == "pure":
            rho = core.density_matrix(core.random_pure_state_2q(rng))
        else:
            rho = core.random_mixed_state_2q(rng)
        recs = tomography.simulate_counts(rho, pset, N, np.random.default_rng(count_seed))
        res = tomography.mle_reconstruct(recs, pset, tol=tol, max_iter=max_iter)
        rows.append({
            "index": i,
            "fidelity": core.fidelity(rho, res.rho),
            "T2_true": correlation_T2(rho),
            "T2_est": correlation_T2(res.rho),
            "S2_true": accessible_coherence_S2(rho),
            "S2_est": accessible_coherence_S2(res.rho),
            "iterations": res.iterations,
            "converged": res.converged,
        })
    return rows


def run_tomo(cfg: RunConfig, out: Path) -> RunOutcome:
    p = cfg.params
    rows = tomo_roundtrip(p["states"], p["state_kind"], p["counts_per_setting"], cfg.seed, p["tol"], p["max_iter"])
    path = _write(out / "tomo_roundtrip.csv", TOMO_COLUMNS, [_formatted(r, TOMO_COLUMNS) for r in rows])
    unconverged = sum(not r["converged"] for r in rows)
    worst = min(r["fidelity"] for r in rows)
    msg = f"min fidelity {worst:.6f}, {unconverged} of {len(rows)} reconstructions unconverged"
    return RunOutcome([path], unconverged == 0, msg)


RUNNERS = {
    "cphase": run_cphase,
    "spdc": run_spdc,
    "conservation": run_conservation,
    "tomo-roundtrip": run_tomo,
}


def run(cfg: RunConfig, out_dir: str | Path | None = None) -> RunOutcome:
    out = Path(out_dir if out_dir is not None else cfg.output_path)
    log.info("running %s scenario (seed %d) into %s", cfg.scenario, cfg.seed, out)
    return RUNNERS[cfg.scenario](cfg, out)
