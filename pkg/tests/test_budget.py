import math

import numpy as np
import pytest

from eoreadout import budget as b
from eoreadout.constants import TWO_PI


class TestBoseOccupation:
    def test_vanishes_at_low_temperature(self, params):
        assert b.bose_occupation(1e-6, params.omega_c) == 0.0
        assert b.bose_occupation(1e-3, params.omega_c) < 1e-180

    def test_reference_cavity_occupation(self, params):
        # 75 mK at the common cavity frequency
        assert b.bose_occupation(0.075, params.omega_c) == \
            pytest.approx(3.5836e-3, rel=1e-3)

    def test_monotonicity(self, params, rng):
        temps = np.sort(rng.uniform(0.005, 0.5, 100))
        occ = [b.bose_occupation(t, params.omega_c) for t in temps]
        assert np.all(np.diff(occ) > 0)
        freqs = np.sort(rng.uniform(0.5, 3, 100)) * params.omega_c
        occ_w = [b.bose_occupation(0.075, w) for w in freqs]
        assert np.all(np.diff(occ_w) < 0)

    def test_inversion_round_trip(self, params, rng):
        for temp in rng.uniform(0.01, 0.3, 50):
            n = b.bose_occupation(temp, params.omega_q)
            assert b.invert_bose_temperature(n, params.omega_q) == \
                pytest.approx(temp, rel=1e-12)

    def test_thermometry_of_reference_excitation(self, params):
        # 1.5% excited population read as a Bose occupation
        t = b.invert_bose_temperature(0.015, params.omega_q)
        assert 0.068 <= t <= 0.075

    def test_validation(self, params):
        with pytest.raises(ValueError):
            b.bose_occupation(0.0, params.omega_c)
        with pytest.raises(ValueError):
            b.invert_bose_temperature(0.0, params.omega_c)


class TestTempPowerLaw:
    def test_zero_power_returns_base(self):
        assert b.temp_power_law(0.0, 0.075, 40.0, 0.54) == 0.075

    def test_power_law_dominates_at_high_power(self):
        t = b.temp_power_law(1.0, 0.0001, 40.0, 0.54)
        assert t == pytest.approx(40.0, rel=1e-6)

    def test_excess_scaling_exponent(self):
        # doubling the power multiplies the heating term by 2^0.54
        q = 4.0
        p0 = 1e-5
        t1 = b.temp_power_law(p0, 0.075, 40.0, 0.54, q=q)
        t2 = b.temp_power_law(2 * p0, 0.075, 40.0, 0.54, q=q)
        excess1 = t1 ** q - 0.075 ** q
        excess2 = t2 ** q - 0.075 ** q
        assert excess2 / excess1 == pytest.approx(2 ** (0.54 * q), rel=1e-9)

    def test_average_power_of_pulsed_drive(self):
        # 0.14 W pulse of 2 us at 100 Hz repetition
        e_pulse = 0.14 * 2e-6
        assert e_pulse * 100.0 == pytest.approx(2.8e-5)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            b.temp_power_law(-1.0, 0.075, 40.0, 0.54)


class TestQuasiparticles:
    def test_reference_density(self, params):
        # frozen from direct evaluation of the closed form at 75 mK
        assert b.qp_density_equilibrium(0.075, params.gap) == \
            pytest.approx(7.4651e-15, rel=1e-3)

    def test_negligible_against_nonequilibrium_floor(self, params):
        x = b.qp_density_equilibrium(0.075, params.gap)
        assert x + 1e-7 == pytest.approx(1e-7, rel=1e-6)

    def test_vanishes_faster_than_any_power(self, params):
        temps = np.geomspace(0.1, 0.02, 12)
        ratios = [b.qp_density_equilibrium(t, params.gap) / t ** 10
                  for t in temps]
        assert np.all(np.diff(ratios) < 0)

    def test_validation(self, params):
        with pytest.raises(ValueError):
            b.qp_density_equilibrium(-1.0, params.gap)


class TestT1Budget:
    def test_rates_sum_exactly(self, params):
        cb = b.t1_budget(params, 0.075, 0.075)
        assert 1.0 / cb.t1 == pytest.approx(
            cb.gamma_qp + cb.gamma_purcell + cb.gamma_rad, rel=1e-14)

    def test_cold_limit_is_purcell_only(self, params):
        model = b.T1Model()
        cb = b.t1_budget(params, 1e-3, 1e-3, x_neq=0.0, model=model)
        assert cb.gamma_qp == pytest.approx(0.0, abs=1e-60)
        assert cb.gamma_rad == pytest.approx(0.0, abs=1e-60)
        assert cb.t1 == pytest.approx(1.0 / cb.gamma_purcell, rel=1e-12)

    def test_quasiparticle_rate_scale(self, params):
        cb = b.t1_budget(params, 0.075, 0.075, x_neq=1e-7)
        assert cb.gamma_qp == pytest.approx(8824.7, rel=1e-3)
        assert cb.gamma_qp < 1.0 / 33e-6

    def test_doubling_x_neq_doubles_gamma_qp(self, params):
        # at 20 mK the equilibrium density is negligible
        a = b.t1_budget(params, 0.020, 0.075, x_neq=1e-7)
        c = b.t1_budget(params, 0.020, 0.075, x_neq=2e-7)
        assert c.gamma_qp == pytest.approx(2 * a.gamma_qp, rel=1e-9)

    def test_calibrated_model_hits_dark_value(self, params):
        model = b.T1Model.calibrated(params, t1_dark=33e-6, t_dark=0.075)
        cb = b.t1_budget(params, 0.075, 0.075, model=model)
        assert cb.t1 == pytest.approx(33e-6, rel=1e-9)

    def test_broadening_inflates_purcell_with_temperature(self, params):
        cold = b.t1_budget(params, 0.075, 0.075)
        warm = b.t1_budget(params, 0.075, 0.200)
        assert warm.gamma_purcell > cold.gamma_purcell

    def test_temperature_validation(self, params):
        with pytest.raises(ValueError):
            b.t1_budget(params, -0.1, 0.075)


class TestShotNoiseDephasing:
    def test_zero_occupation_no_dephasing(self, params):
        gamma, t2 = b.shot_noise_dephasing(0.0, params.chi, params.kappa_c,
                                           t1=33e-6)
        assert gamma == 0.0
        assert t2 == pytest.approx(2 * 33e-6, rel=1e-12)

    def test_reference_t2_limit(self, params):
        n_th = b.bose_occupation(0.075, params.omega_c)
        gamma, t2 = b.shot_noise_dephasing(n_th, params.chi, params.kappa_c,
                                           t1=33e-6)
        assert gamma == pytest.approx(31169.0, rel=1e-3)
        assert 15e-6 <= t2 <= 25e-6

    def test_monotone_in_occupation(self, params):
        ns = np.linspace(0, 0.05, 60)
        gammas = [b.shot_noise_dephasing(n, params.chi, params.kappa_c)[0]
                  for n in ns]
        assert np.all(np.diff(gammas) >= 0)

    def test_negative_occupation_rejected(self, params):
        with pytest.raises(ValueError):
            b.shot_noise_dephasing(-0.1, params.chi, params.kappa_c)


class TestConversionBookkeeping:
    def test_cooperativity_zero_coupling(self, params):
        assert b.cooperativity(0.0, params) == 0.0

    def test_cooperativity_quadratic_in_g(self, params):
        g = TWO_PI * 0.5e6
        assert b.cooperativity(2 * g, params) == \
            pytest.approx(4 * b.cooperativity(g, params), rel=1e-12)

    def test_reference_coupling_round_trip(self, params):
        g = b.cooperativity_to_g(0.0039, params)
        assert g / TWO_PI == pytest.approx(874.8e3, rel=1e-3)
        assert b.cooperativity(g, params) == pytest.approx(0.0039, rel=1e-12)

    def test_efficiency_impedance_matching(self):
        assert b.conversion_efficiency(1.0, 0.5, 0.5) == \
            pytest.approx(0.25, rel=1e-12)
        assert b.conversion_efficiency(0.0, 0.5, 0.5) == 0.0

    def test_efficiency_maximal_at_unit_cooperativity(self):
        cs = np.linspace(0.0, 5.0, 2001)
        eff = [b.conversion_efficiency(c, 0.353, 0.543) for c in cs]
        assert cs[int(np.argmax(eff))] == pytest.approx(1.0, abs=0.01)

    def test_reference_efficiency_value(self):
        assert b.conversion_efficiency(0.00393, 0.353, 0.543) == \
            pytest.approx(0.0030, abs=2e-4)

    def test_inversion_from_target_efficiency(self):
        c = b.cooperativity_for_efficiency(0.003, 0.353, 0.543)
        assert c == pytest.approx(0.003944, rel=1e-3)
        assert b.conversion_efficiency(c, 0.353, 0.543) == \
            pytest.approx(0.003, rel=1e-12)

    def test_validation(self, params):
        with pytest.raises(ValueError):
            b.cooperativity(-1.0, params)
        with pytest.raises(ValueError):
            b.conversion_efficiency(-0.1, 0.5, 0.5)
        with pytest.raises(ValueError):
            b.conversion_efficiency(1.0, 1.5, 0.5)
        with pytest.raises(ValueError):
            b.cooperativity_for_efficiency(0.5, 0.353, 0.543)


class TestPredictions:
    def test_zero_rate_reduces_to_dark_values(self, params):
        pts = b.predict_fidelity_vs_power([0.0, 50.0], params)
        dark = pts[0]
        assert dark.p_avg == 0.0
        assert dark.thermal.t_qubit == pytest.approx(0.075)
        assert dark.budget.t1 == pytest.approx(33e-6, rel=1e-6)

    def test_survival_factor_enters_qnd(self, params):
        pts = b.predict_fidelity_vs_power([0.0], params, qnd_gap=2e-6,
                                          thermal_excitation=0.015)
        expect = 0.5 * ((1 - 0.015) + math.exp(-2e-6 / pts[0].budget.t1))
        assert pts[0].qnd == pytest.approx(expect, rel=1e-12)
        assert math.exp(-2 / 33) == pytest.approx(0.9412, abs=1e-4)

    def test_monotone_in_repetition_rate(self, params):
        rates = np.linspace(0.0, 200.0, 41)
        pts = b.predict_fidelity_vs_power(rates, params)
        fid = [p.fidelity for p in pts]
        qnd = [p.qnd for p in pts]
        t1 = [p.budget.t1 for p in pts]
        assert np.all(np.diff(fid) <= 1e-12)
        assert np.all(np.diff(qnd) <= 1e-12)
        assert np.all(np.diff(t1) <= 1e-12)

    def test_thermal_point_validation(self):
        with pytest.raises(ValueError):
            b.ThermalPoint(p_opt=0.0, t_mxc=0.0, t_eo=0.075, t_cavity=0.075,
                           t_qubit=0.075)

    def test_negative_rate_rejected(self, params):
        with pytest.raises(ValueError):
            b.predict_fidelity_vs_power([-1.0], params)


class TestCrossModuleConsistency:
    def test_budget_matches_detection_monte_carlo(self, params, mw_envelopes):
        """Zero-power fidelity prediction vs the shot-level pipeline."""
        from eoreadout import detection as det

        env = mw_envelopes
        point = det.OperatingPoint(snr=13.0, thermal_excitation=0.015,
                                   t1=33e-6)
        cfg = det.calibrate_shot_config(point, env["avg_g"], env["avg_e"],
                                        env["dt"])
        shots = det.simulate_shots(env["avg_g"], env["avg_e"], env["dt"],
                                   cfg.sigma_det, 30000, seed=314,
                                   t1=33e-6, thermal_excitation=0.015)
        rep = det.assignment_fidelity(*shots.class_scores(),
                                      threshold=cfg.threshold_clean)
        pred = b.predict_fidelity_vs_power(
            [0.0], params, decay_window=cfg.t_half, residual=0.0,
            thermal_excitation=0.015,
            t1_model=b.T1Model.calibrated(params, t1_dark=33e-6))[0]
        # binomial error of the Monte Carlo at n = 15000 per state
        se = 0.5 * math.sqrt(0.015 * 0.985 / 15000 + 0.035 * 0.965 / 15000)
        assert abs(rep.fidelity - pred.fidelity) < 4 * se
