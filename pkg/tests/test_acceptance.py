"""Exit criteria. Each test records one PASS/FAIL line, printed after the run."""

import configparser
import filecmp
import math
import time

import numpy as np
import pytest

from cohmig import cli, config, core, cphase, measures, spdc, tomography as tomo
from cohmig.runner import conservation_check

TABLE2 = dict(zip(spdc.TABLE2_D_UM, spdc.TABLE2_S2_IN))


def test_1_conservation_under_global_unitaries(criterion):
    t0 = time.perf_counter()
    res = conservation_check(10_000, 0.5, seed=20180101)
    elapsed = time.perf_counter() - t0
    ok = res["max_abs_dS2"] < 1e-10 and res["max_unitarity_error"] < 1e-10 and elapsed < 30
    criterion(
        "1 conservation",
        ok,
        f"max|dS2|={res['max_abs_dS2']:.2e} over {res['pure']} pure + {res['mixed']} mixed, {elapsed:.1f}s",
    )


def test_2_purity_identity(criterion):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10_000):
        rho = core.random_mixed_state_2q(rng)
        worst = max(worst, abs(measures.accessible_coherence_S2(rho) - core.purity(rho)))
    criterion("2 S2 = purity", worst < 1e-10, f"max|S2-P|={worst:.2e}")


def test_3_cphase_table_row_and_shape(criterion):
    first = cphase.run_sweep(cphase.CPhaseConfig())[0]
    row_ok = (
        abs(first.D_A - 0.707107) <= 1e-6
        and abs(first.D_B - 0.707107) <= 1e-6
        and abs(first.T2 - 0.5) <= 1e-10
        and abs(first.S2 - 1.0) <= 1e-12
    )
    phis = np.linspace(0, math.pi, 100)
    rows = cphase.run_sweep(cphase.CPhaseConfig(phis=tuple(phis)))
    D2 = np.array([r.D2 for r in rows])
    T2 = np.array([r.T2 for r in rows])
    monotone = bool(np.all(np.diff(D2) <= 1e-12) and np.all(np.diff(T2) >= -1e-12))
    curve_err = max(abs(d - math.cos(p / 2) ** 2 / 2) for d, p in zip(D2, phis))
    noisy = cphase.run_sweep(cphase.CPhaseConfig(white_noise_weight=cphase.noise_weight_for_purity(0.944)))
    norm_err = max(abs(r.D2_norm + r.T2_norm - 1) for r in noisy)
    ok = row_ok and monotone and curve_err < 1e-10 and norm_err < 1e-10
    criterion(
        "3 c-phase table",
        ok,
        f"phi=0: D_A={first.D_A:.6f} T2={first.T2:.10f} S2={first.S2:.12f}; monotone={monotone}; "
        f"curve err={curve_err:.1e}; norm err={norm_err:.1e}",
    )


def test_4_spdc_pump_coherence(criterion):
    t0 = time.perf_counter()
    rows = spdc.run_spdc_sweep(spdc.SpdcConfig(displacements_um=tuple(TABLE2)))
    elapsed = time.perf_counter() - t0
    sigma = 142 / (2 * math.sqrt(math.log(2)))
    worst = max(abs(r.S2_in - TABLE2[int(r.x)]) for r in rows)
    ok = worst <= 0.005 and elapsed < 1 and abs(spdc.SpdcConfig().sigma_um - sigma) < 1e-12
    criterion("4 SPDC S2_in column", ok, f"max dev={worst:.4f}, {elapsed * 1e3:.1f} ms")


def test_5_spdc_model_conservation(criterion):
    rows = spdc.run_spdc_sweep(spdc.SpdcConfig())
    worst = max(r.abs_diff for r in rows)
    criterion("5 SPDC S2_out = S2_in", len(rows) == 10 and worst < 1e-10, f"max|dS2|={worst:.2e}")


def test_6_witness_chain(criterion):
    lb = measures.chsh_lower_bound(0.625)
    p = math.sqrt(0.5)  # Werner weight with T^2 = 5/8
    werner = p * core.density_matrix(core.bell_state("phi+")) + (1 - p) * np.eye(4) / 4
    w_thr = measures.witness(werner)
    bell = measures.witness(core.density_matrix(core.bell_state("phi+")))
    counterexamples = 0
    witnessed = 0
    rng = np.random.default_rng(6)
    for i in range(10_000):
        rho = core.density_matrix(core.random_pure_state_2q(rng)) if i % 2 else core.random_mixed_state_2q(rng)
        rep = measures.witness(rho)
        if rep.T2 > 0.625 + 1e-9:
            witnessed += 1
            counterexamples += rep.B <= 2
    ok = (
        abs(lb - 2) <= 1e-9
        and abs(w_thr.B_lower_bound - 2) <= 1e-9
        and abs(bell.B - 2 * math.sqrt(2)) <= 1e-10
        and counterexamples == 0
        and witnessed > 0
    )
    criterion(
        "6 witness chain",
        ok,
        f"B_lb(5/8)={lb:.12f}, B(phi+)={bell.B:.12f}, {witnessed} witnessed states, {counterexamples} counterexamples",
    )


def test_7_tomography_round_trip(criterion):
    pset = tomo.ProjectorSet.standard()
    t0 = time.perf_counter()
    fids, monotone = [], True
    for ss in np.random.SeedSequence(7).spawn(50):
        a, b = ss.spawn(2)
        rho = core.density_matrix(core.random_pure_state_2q(np.random.default_rng(a)))
        res = tomo.mle_reconstruct(
            tomo.simulate_counts(rho, pset, 10_000, np.random.default_rng(b)), pset, track_likelihood=True
        )
        fids.append(core.fidelity(rho, res.rho))
        monotone &= bool(np.all(np.diff(res.log_likelihood) >= -1e-12))
    phi = core.density_matrix(core.bell_state("phi+"))
    exact = tomo.records_from_counts(np.rint(tomo.expected_counts(phi, pset, 10**6)), pset, 10**6)
    res = tomo.mle_reconstruct(exact, pset, track_likelihood=True)
    noiseless_fid = core.fidelity(phi, res.rho)
    monotone &= bool(np.all(np.diff(res.log_likelihood) >= -1e-12))
    elapsed = time.perf_counter() - t0
    ok = min(fids) > 0.99 and noiseless_fid > 0.999 and monotone and elapsed < 120
    criterion(
        "7 tomography",
        ok,
        f"min F={min(fids):.5f}, noiseless F={noiseless_fid:.6f}, monotone={monotone}, {elapsed:.1f}s",
    )


def test_8_antibunch_inversion(criterion):
    worst = 0.0
    for p in np.linspace(0, 1, 10):
        for v in np.linspace(0.1, 1, 10):
            P = spdc.antibunch_probability(spdc.SingletMixture(p), v)
            worst = max(worst, abs(spdc.invert_antibunch(P, v).p - p))
    criterion("8 antibunch inversion", worst < 1e-12, f"max err={worst:.1e} on 100 points")


@pytest.mark.parametrize(
    "scenario,overrides",
    [
        ("cphase", {}),
        ("cphase", {"counts_per_setting": "5000", "replicates": "10", "white_noise_weight": "0.05"}),
        ("spdc", {"coincidences": "5000"}),
        ("conservation", {}),
        ("tomo-roundtrip", {}),
    ],
)
def test_9_determinism(criterion, tmp_path, scenario, overrides):
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(config.default_config_text(scenario))
    parser[scenario].update(overrides)
    cfg_path = tmp_path / "cfg.ini"
    with cfg_path.open("w") as fh:
        parser.write(fh)
    codes = [cli.main(["run", str(cfg_path), "--out", str(tmp_path / d)]) for d in ("a", "b")]
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", files, shallow=False)
    ok = codes == [0, 0] and bool(files) and not mismatch and not errors
    label = scenario + (" (noisy)" if overrides else "")
    criterion(f"9 determinism [{label}]", ok, f"{len(match)} identical files")
