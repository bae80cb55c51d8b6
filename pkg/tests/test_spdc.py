import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohmig import core, measures, spdc

CFG = spdc.SpdcConfig()


class TestVisibility:
    def test_peak(self):
        assert spdc.visibility(0.0) == pytest.approx(0.974, abs=1e-12)

    def test_floor(self):
        assert spdc.visibility(1e4) == pytest.approx(0.029, abs=1e-12)

    def test_sigma_from_fwhm(self):
        assert CFG.sigma_um == pytest.approx(85.2797, abs=1e-3)

    def test_at_100um(self):
        # 0.029 + 0.945 exp(-(100/85.2797)^2)
        assert spdc.visibility(100.0) == pytest.approx(0.26793, abs=1e-4)

    def test_half_maximum_at_half_fwhm(self):
        assert spdc.visibility(71.0) - 0.029 == pytest.approx(0.945 / 2, abs=1e-12)

    def test_monotone_and_symmetric(self):
        d = np.linspace(0, 400, 401)
        v = np.array([spdc.visibility(x) for x in d])
        assert np.all(np.diff(v) < 0)
        assert np.all(v > 0.029)
        assert spdc.visibility(-30) == spdc.visibility(30)


class TestPumpCoherence:
    def test_peak(self):
        assert spdc.pump_coherence_S2in(0.974) == pytest.approx(0.974, abs=5e-4)

    def test_incoherent(self):
        assert spdc.pump_coherence_S2in(0.0) == 0.5

    def test_d56(self):
        V = spdc.visibility(56)
        assert V == pytest.approx(0.643, abs=1e-3)
        assert spdc.pump_coherence_S2in(V) == pytest.approx(0.706, abs=1e-3)

    @pytest.mark.parametrize("V", [0.0, 0.3, 0.8, 1.0])
    def test_is_pump_polarization_purity(self, V):
        pump = np.array([[0.5, V / 2], [V / 2, 0.5]])
        assert spdc.pump_coherence_S2in(V) == pytest.approx(core.purity(pump), abs=1e-15)


class TestMixture:
    def test_pure_singlet(self):
        m = spdc.singlet_fraction(1.0)
        assert m.p == 1.0
        assert np.allclose(spdc.mixture_state(m), core.density_matrix(core.bell_state("psi-")))

    def test_balanced(self):
        m = spdc.singlet_fraction(0.0)
        assert m.p == 0.5
        expected = (core.projector(core.ket("H", "V")) + core.projector(core.ket("V", "H"))) / 2
        assert np.allclose(spdc.mixture_state(m), expected, atol=1e-15)
        assert measures.correlation_T2(spdc.mixture_state(m)) == pytest.approx(0.5, abs=1e-15)

    def test_peak_visibility(self):
        m = spdc.singlet_fraction(0.974)
        assert m.p == pytest.approx(0.987, abs=1e-12)
        assert measures.correlation_T2(spdc.mixture_state(m)) == pytest.approx(0.974, abs=5e-4)

    def test_invalid_fraction(self):
        with pytest.raises(ValueError):
            spdc.SingletMixture(1.2)

    @given(st.floats(0, 1))
    def test_closure_through_measures(self, V):
        rho = spdc.mixture_state(spdc.singlet_fraction(V))
        core.validate_state(rho, dim=4)
        p = (1 + V) / 2
        assert measures.correlation_T2(rho) == pytest.approx((1 + (1 - 2 * p) ** 2) / 2, abs=1e-12)
        assert measures.correlation_T2(rho) == pytest.approx(spdc.pump_coherence_S2in(V), abs=1e-12)
        da, db = measures.local_coherences_sq(rho)
        assert abs(da) < 1e-12 and abs(db) < 1e-12


class TestAntibunching:
    def test_ideal_singlet(self):
        assert spdc.antibunch_probability(spdc.SingletMixture(1.0), 1.0) == 1.0

    def test_triplet_with_imperfect_visibility(self):
        assert spdc.antibunch_probability(spdc.SingletMixture(0.0), 0.94) == pytest.approx(0.03, abs=1e-15)

    @pytest.mark.parametrize("v", [0.1, 0.5, 0.94, 1.0])
    def test_balanced_mixture(self, v):
        assert spdc.antibunch_probability(spdc.SingletMixture(0.5), v) == pytest.approx(0.5, abs=1e-15)

    def test_invert(self):
        assert spdc.invert_antibunch(0.97, 0.94).p == pytest.approx(1.0, abs=1e-12)
        for v in (0.3, 0.94, 1.0):
            assert spdc.invert_antibunch(0.5, v).p == pytest.approx(0.5, abs=1e-15)

    def test_out_of_band(self):
        with pytest.raises(spdc.OutOfModelError) as exc:
            spdc.invert_antibunch(0.99, 0.94)
        assert exc.value.clamped.p == 1.0
        with pytest.raises(spdc.OutOfModelError) as exc:
            spdc.invert_antibunch(0.0, 0.94)
        assert exc.value.clamped.p == 0.0

    def test_edge_within_tolerance(self):
        assert spdc.invert_antibunch(0.97 + 5e-10, 0.94).p == 1.0

    @given(st.floats(0, 1), st.floats(1e-3, 1))
    def test_round_trip(self, p, v):
        P = spdc.antibunch_probability(spdc.SingletMixture(p), v)
        assert spdc.invert_antibunch(P, v).p == pytest.approx(p, abs=1e-12)


class TestSweep:
    def test_table_two(self):
        rows = spdc.run_spdc_sweep(CFG)
        assert [r.x for r in rows] == list(spdc.TABLE2_D_UM)
        for r, expected in zip(rows, spdc.TABLE2_S2_IN):
            assert r.S2_in == pytest.approx(expected, abs=0.005)
            assert r.abs_diff < 1e-10
            assert r.D_A == pytest.approx(0.0, abs=1e-6)

    def test_first_and_last(self):
        rows = spdc.run_spdc_sweep(CFG)
        assert rows[0].S2_in == pytest.approx(0.974, abs=5e-4)
        assert rows[0].S2 == pytest.approx(rows[0].S2_in, abs=1e-12)
        assert rows[-1].S2_in == pytest.approx(0.502, abs=5e-4)

    def test_raw_delays_subtract_bias(self):
        raw = spdc.SpdcConfig(displacements_um=(84.0, 110.0), raw_delays=True)
        assert raw.effective_displacements() == (0.0, 26.0)
        rows = spdc.run_spdc_sweep(raw)
        assert rows[0].S2_in == pytest.approx(spdc.pump_coherence_S2in(0.974))

    def test_noisy_readout_is_seeded(self):
        cfg = spdc.SpdcConfig(coincidences=2000, seed=9)
        a, b = spdc.run_spdc_sweep(cfg), spdc.run_spdc_sweep(cfg)
        assert a == b
        assert max(r.abs_diff for r in a) > 0
        assert max(r.abs_diff for r in a) < 0.1

    @pytest.mark.parametrize(
        "kwargs",
        [dict(fwhm_um=-1), dict(fit_offset=0.5, fit_amplitude=0.6), dict(triplet_visibility=0.0)],
    )
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            spdc.SpdcConfig(**kwargs)


def test_theory_curve_conserves():
    for row in spdc.theory_curve(n_points=51):
        assert row["T2"] == pytest.approx(row["S2_in"], abs=1e-12)
        assert math.isclose(row["visibility"], spdc.visibility(row["d_um"]))
