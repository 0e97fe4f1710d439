import math

import numpy as np
import pytest
from scipy.special import erfc

from eoreadout import detection as det
from eoreadout.errors import DegenerateWeightError, GridError


def synthetic_envelopes(nt=160, dt=10e-9, kind="scenario"):
    """Simple complex envelope pair with a positive separation."""
    t = dt * np.arange(nt)
    ramp = 1.0 - np.exp(-t / (12 * dt))
    if kind == "scenario":
        avg_g = (1.4 + 0.5j) * ramp
        avg_e = (0.6 + 0.2j) * ramp
    elif kind == "imag_const":
        avg_g = np.full(nt, 0.3 + 0.0j)
        avg_e = avg_g + 2.0j
    else:
        raise ValueError(kind)
    return t, avg_g, avg_e


class TestWeightFunction:
    def test_identical_envelopes_degenerate(self):
        _, avg_g, _ = synthetic_envelopes()
        with pytest.raises(DegenerateWeightError):
            det.weight_function(avg_g, avg_g.copy(), 10e-9)

    def test_grid_mismatch(self):
        _, avg_g, avg_e = synthetic_envelopes()
        with pytest.raises(GridError):
            det.weight_function(avg_g[:-1], avg_e, 10e-9)

    def test_imaginary_constant_difference(self):
        _, avg_g, avg_e = synthetic_envelopes(kind="imag_const")
        w = det.weight_function(avg_g, avg_e, 10e-9)
        assert math.isclose(abs(math.sin(w.theta)), 1.0, abs_tol=1e-9)
        np.testing.assert_allclose(w.f, w.f[0])
        assert np.max(np.abs(w.f)) == pytest.approx(1.0)

    def test_weight_supported_where_traces_differ(self):
        t, avg_g, avg_e = synthetic_envelopes()
        # suppress the difference over a sub-window
        avg_e = avg_e.copy()
        avg_e[40:80] = avg_g[40:80]
        w = det.weight_function(avg_g, avg_e, 10e-9)
        assert np.max(np.abs(w.f[40:80])) < 1e-9

    def test_separation_positive_by_construction(self, rng):
        for _ in range(50):
            nt = 64
            avg_g = rng.standard_normal(nt) + 1j * rng.standard_normal(nt)
            avg_e = rng.standard_normal(nt) + 1j * rng.standard_normal(nt)
            w = det.weight_function(avg_g, avg_e, 1e-8)
            mu_g = np.sum(w.f * w.rotate(avg_g)) * 1e-8
            mu_e = np.sum(w.f * w.rotate(avg_e)) * 1e-8
            assert mu_e > mu_g


class TestSimulateShots:
    def test_zero_noise_reproduces_envelopes(self):
        _, avg_g, avg_e = synthetic_envelopes()
        shots = det.simulate_shots(avg_g, avg_e, 10e-9, 0.0, 6, seed=3)
        np.testing.assert_array_equal(shots.iq[0], avg_g)
        np.testing.assert_array_equal(shots.iq[1], avg_e)
        assert list(shots.prepared[:4]) == ["g", "e", "g", "e"]

    def test_deterministic_under_seed(self):
        _, avg_g, avg_e = synthetic_envelopes()
        a = det.simulate_shots(avg_g, avg_e, 10e-9, 0.4, 40, seed=11,
                               t1=33e-6, thermal_excitation=0.2)
        b = det.simulate_shots(avg_g, avg_e, 10e-9, 0.4, 40, seed=11,
                               t1=33e-6, thermal_excitation=0.2)
        np.testing.assert_array_equal(a.iq, b.iq)
        np.testing.assert_array_equal(a.envelope_label, b.envelope_label)

    def test_per_shot_substreams_are_batch_independent(self):
        _, avg_g, avg_e = synthetic_envelopes()
        big = det.simulate_shots(avg_g, avg_e, 10e-9, 0.4, 64, seed=7)
        small = det.simulate_shots(avg_g, avg_e, 10e-9, 0.4, 8, seed=7)
        np.testing.assert_array_equal(big.iq[:8], small.iq)

    def test_score_variance_calibration(self):
        _, avg_g, avg_e = synthetic_envelopes()
        sigma = math.sqrt(0.5)
        shots = det.simulate_shots(avg_g, avg_e, 10e-9, sigma, 15000, seed=21)
        sg, se = shots.class_scores()
        for s in (sg, se):
            assert np.var(s) == pytest.approx(0.5, rel=0.03)

    def test_grid_mismatch(self):
        _, avg_g, avg_e = synthetic_envelopes()
        with pytest.raises(GridError):
            det.simulate_shots(avg_g[:-1], avg_e, 10e-9, 0.1, 4)

    def test_decay_produces_tail_labels(self):
        _, avg_g, avg_e = synthetic_envelopes()
        window = 160 * 10e-9
        shots = det.simulate_shots(avg_g, avg_e, 10e-9, 0.0, 2000, seed=5,
                                   t1=window)
        tails = shots.envelope_label == "tail"
        # ~63% of excited preparations decay inside a one-T1 window
        frac = tails.sum() / (shots.prepared == "e").sum()
        assert 0.55 < frac < 0.72
        assert np.all(np.isnan(shots.decay_time[shots.prepared == "g"]))

    def test_record_view(self):
        _, avg_g, avg_e = synthetic_envelopes()
        shots = det.simulate_shots(avg_g, avg_e, 10e-9, 0.3, 10, seed=9)
        rec = shots[3]
        assert rec.label == "e"
        assert rec.seed == (9, 3)
        score_a = det.integrate_shot(rec, shots.weight)
        score_b = shots.scores()[3]
        assert score_a == pytest.approx(score_b, rel=1e-12)


class TestIntegrateShot:
    def test_zero_record_zero_score(self):
        _, avg_g, avg_e = synthetic_envelopes()
        w = det.weight_function(avg_g, avg_e, 10e-9)
        rec = det.ShotRecord(i=np.zeros_like(w.f), q=np.zeros_like(w.f),
                             label="g", seed=(0, 0), dt=10e-9)
        assert det.integrate_shot(rec, w) == 0.0

    def test_noiseless_scores_are_class_means_and_linear(self):
        _, avg_g, avg_e = synthetic_envelopes()
        w = det.weight_function(avg_g, avg_e, 10e-9)
        shots = det.simulate_shots(avg_g, avg_e, 10e-9, 0.0, 2, seed=0, weight=w)
        s_g, s_e = shots.class_scores()
        assert s_e[0] > s_g[0]
        rec = shots[0]
        doubled = det.ShotRecord(i=2 * rec.i, q=2 * rec.q, label="g",
                                 seed=rec.seed, dt=rec.dt)
        assert det.integrate_shot(doubled, w) == pytest.approx(2 * s_g[0])

    def test_grid_mismatch(self):
        _, avg_g, avg_e = synthetic_envelopes()
        w = det.weight_function(avg_g, avg_e, 10e-9)
        rec = det.ShotRecord(i=np.zeros(3), q=np.zeros(3), label="g",
                             seed=(0, 0), dt=10e-9)
        with pytest.raises(GridError):
            det.integrate_shot(rec, w)


class TestDoubleGaussian:
    def test_synthetic_recovery(self, rng):
        n = 20000
        x = np.concatenate([rng.normal(0.0, 1.0, n // 2),
                            rng.normal(5.0, 1.0, n // 2)])
        fit = det.fit_double_gaussian(x)
        assert fit.converged
        assert fit.mu_g == pytest.approx(0.0, abs=0.05)
        assert fit.mu_e == pytest.approx(5.0, abs=0.05)
        assert fit.sigma_g == pytest.approx(1.0, abs=0.05)
        assert fit.sigma_e == pytest.approx(1.0, abs=0.05)
        assert fit.w_g + fit.w_e == pytest.approx(1.0, abs=1e-12)
        assert 0.0 < fit.threshold < 5.0
        assert not fit.degenerate

    def test_unbalanced_mixture(self, rng):
        x = np.concatenate([rng.normal(-2.0, 0.7, 17000),
                            rng.normal(3.0, 1.3, 3000)])
        fit = det.fit_double_gaussian(x)
        assert fit.w_g == pytest.approx(0.85, abs=0.02)
        assert fit.sigma_e == pytest.approx(1.3, abs=0.08)

    def test_single_gaussian_flags_degenerate(self, rng):
        x = rng.normal(1.0, 2.0, 5000)
        fit = det.fit_double_gaussian(x)
        assert fit.degenerate
        assert abs(fit.mu_e - fit.mu_g) < max(fit.sigma_g, fit.sigma_e)

    def test_canonical_order_and_labels(self, rng):
        x = np.concatenate([rng.normal(4.0, 0.5, 3000),
                            rng.normal(-1.0, 0.5, 3000)])
        labels = np.array(["e"] * 3000 + ["g"] * 3000)
        fit = det.fit_double_gaussian(x, labels=labels)
        assert fit.mu_g < fit.mu_e
        assert fit.class_stats["g"][0] == pytest.approx(-1.0, abs=0.05)
        assert fit.class_stats["e"][0] == pytest.approx(4.0, abs=0.05)

    def test_needs_enough_scores(self, rng):
        with pytest.raises(ValueError):
            det.fit_double_gaussian(rng.normal(0, 1, 99))

    def test_equal_likelihood_threshold_midpoint_for_symmetric(self):
        thr = det.equal_likelihood_threshold(0.0, 1.0, 0.5, 4.0, 1.0, 0.5)
        assert thr == pytest.approx(2.0, abs=1e-12)


class TestAssignmentFidelity:
    def test_separated_classes(self, rng):
        sg = rng.normal(0, 0.1, 4000)
        se = rng.normal(10, 0.1, 4000)
        rep = det.assignment_fidelity(sg, se)
        assert rep.fidelity == 1.0
        assert rep.eps_overlap < 1e-300

    def test_identical_distributions(self, rng):
        sg = rng.normal(0, 1, 20000)
        se = rng.normal(0, 1, 20000)
        rep = det.assignment_fidelity(sg, se, threshold=0.0)
        assert rep.fidelity == pytest.approx(0.5, abs=0.02)

    def test_threshold_ties_go_to_ground(self):
        rep = det.assignment_fidelity([0.0, 0.0], [0.0, 1.0], threshold=0.0)
        assert rep.p_e_given_g == 0.0
        assert rep.p_g_given_e == 0.5

    def test_empirical_overlap_matches_erfc(self, rng):
        # pure Gaussian classes: every misassignment is overlap error
        n = 100000
        snr = 4.0
        sg = rng.normal(0.0, 1.0, n)
        se = rng.normal(snr, 1.0, n)
        rep = det.assignment_fidelity(sg, se, threshold=snr / 2)
        analytic = 0.5 * erfc(snr / (2 * math.sqrt(2.0)))
        se_bin = math.sqrt(analytic * (1 - analytic) / n)
        assert abs(rep.p_e_given_g - analytic) < 3 * se_bin
        assert abs(rep.p_g_given_e - analytic) < 3 * se_bin

    def test_fidelity_bounds_with_mean_threshold(self, rng):
        # orientation from the class means, binomial slack on the lower edge
        n_cls = 300
        slack = 3 * math.sqrt(2 * 0.25 / n_cls) / 2
        for _ in range(200):
            mu = rng.normal(0, 3, 2)
            sig = rng.uniform(0.1, 2, 2)
            sg = rng.normal(mu[0], sig[0], n_cls)
            se = rng.normal(mu[1], sig[1], n_cls)
            if se.mean() < sg.mean():
                sg, se = -sg, -se
            thr = 0.5 * (np.mean(sg) + np.mean(se))
            rep = det.assignment_fidelity(sg, se, threshold=thr)
            assert 0.5 - slack <= rep.fidelity <= 1.0

    def test_empty_scores_rejected(self):
        with pytest.raises(ValueError):
            det.assignment_fidelity([], [1.0])


class TestInvariances:
    def test_global_phase(self):
        _, avg_g, avg_e = synthetic_envelopes()
        dt = 10e-9
        w0 = det.weight_function(avg_g, avg_e, dt)
        base = det.simulate_shots(avg_g, avg_e, dt, 0.0, 400, seed=2,
                                  t1=1e-6, thermal_excitation=0.1)
        s0 = base.scores()
        thr0 = 0.5 * (np.sum(w0.f * w0.rotate(avg_g))
                      + np.sum(w0.f * w0.rotate(avg_e))) * dt
        rep0 = det.assignment_fidelity(*base.class_scores(), threshold=thr0)
        for phi in (0.3, -1.2, 2.9):
            ph = np.exp(1j * phi)
            w = det.weight_function(ph * avg_g, ph * avg_e, dt)
            dtheta = (w.theta - w0.theta - phi) % math.pi
            assert min(dtheta, math.pi - dtheta) < 1e-9
            rot = det.simulate_shots(ph * avg_g, ph * avg_e, dt, 0.0, 400,
                                     seed=2, t1=1e-6, thermal_excitation=0.1)
            np.testing.assert_allclose(rot.scores(), s0, rtol=1e-9, atol=1e-12)
            rep = det.assignment_fidelity(*rot.class_scores(), threshold=thr0)
            assert rep.fidelity == rep0.fidelity
            assert rep.p_e_given_g == rep0.p_e_given_g

    def test_amplitude_scale(self):
        _, avg_g, avg_e = synthetic_envelopes()
        dt = 10e-9
        lam = 7.3
        a = det.simulate_shots(avg_g, avg_e, dt, 0.5, 600, seed=4, t1=2e-6,
                               thermal_excitation=0.05)
        b = det.simulate_shots(lam * avg_g, lam * avg_e, dt, lam * 0.5, 600,
                               seed=4, t1=2e-6, thermal_excitation=0.05)
        ra = det.assignment_fidelity(*a.class_scores())
        rb = det.assignment_fidelity(*b.class_scores())
        assert ra.fidelity == rb.fidelity
        assert ra.p_g_given_e == rb.p_g_given_e
        np.testing.assert_allclose(b.scores(), lam * a.scores(), rtol=1e-12)


class TestQND:
    def test_perfect_agreement(self):
        first = np.array(["g", "e", "g", "e"])
        rep = det.qnd_metric(first, first.copy())
        assert rep.q == 1.0

    def test_independent_outcomes(self, rng):
        first = np.where(rng.uniform(size=20000) < 0.5, "g", "e")
        second = np.where(rng.uniform(size=20000) < 0.5, "g", "e")
        rep = det.qnd_metric(first, second)
        assert rep.q == pytest.approx(0.5, abs=0.02)

    def test_decay_between_measurements_closed_form(self, rng):
        t, t1 = 2e-6, 33e-6
        p_decay = 1 - math.exp(-t / t1)
        n = 30000
        first = np.where(np.arange(n) % 2 == 0, "g", "e")
        second = first.copy()
        flips = (first == "e") & (rng.uniform(size=n) < p_decay)
        second[flips] = "g"
        rep = det.qnd_metric(first, second)
        assert rep.p_ee == pytest.approx(math.exp(-2 / 33), abs=0.006)
        assert rep.p_gg == 1.0
        assert rep.q == pytest.approx(0.5 * (1 + math.exp(-2 / 33)), abs=0.004)

    def test_validation(self):
        with pytest.raises(ValueError):
            det.qnd_metric([], [])
        with pytest.raises(ValueError):
            det.qnd_metric(["g"], ["g", "e"])
        with pytest.raises(ValueError):
            det.qnd_metric(["g", "x"], ["g", "e"])
        with pytest.raises(ValueError):
            det.qnd_metric(["g", "g"], ["g", "g"])  # no excited outcomes

    def test_simulated_experiment_near_ideal_assignment(self):
        first, second, rep = det.simulate_qnd_experiment(
            0.0, 10.0, 0.5, 30000, gap=2e-6, t1=33e-6,
            thermal_excitation=0.015, seed=8)
        assert rep.p_ee == pytest.approx(math.exp(-2 / 33), abs=0.01)
        assert rep.p_gg == pytest.approx(0.985, abs=0.01)


class TestQuantumEfficiency:
    def _fit(self, mu_g, mu_e, sigma):
        return det.DoubleGaussianFit(
            mu_g=mu_g, mu_e=mu_e, sigma_g=sigma, sigma_e=sigma, w_g=0.5,
            w_e=0.5, threshold=0.5 * (mu_g + mu_e), converged=True, n_iter=1,
            degenerate=False)

    def test_ideal_amplifier(self):
        # separation scaled to sqrt(n_meas): sigma_det^2 = 0.5 -> eta = 1
        n_sqrt = 122.0
        fit = self._fit(0.0, n_sqrt, math.sqrt(0.5))
        eff = det.quantum_efficiency(fit, n_sqrt)
        assert eff.eta_det == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("eta_target,n_sqrt", [(1.3e-3, 122.0),
                                                   (1.5e-4, 116.0)])
    def test_round_trip_reference_points(self, eta_target, n_sqrt):
        sigma_det = math.sqrt(0.5 / eta_target)
        fit = self._fit(0.0, 13.0, 13.0 * sigma_det / n_sqrt)
        eff = det.quantum_efficiency(fit, n_sqrt)
        assert eff.eta_det == pytest.approx(eta_target, rel=1e-9)
        assert eff.sigma_det == pytest.approx(sigma_det, rel=1e-9)

    def test_zero_separation_rejected(self):
        fit = self._fit(1.0, 1.0, 0.3)
        with pytest.raises(ValueError):
            det.quantum_efficiency(fit, 122.0)


class TestOperatingPoint:
    def test_reference_calibration(self, mw_envelopes):
        env = mw_envelopes
        cfg = det.calibrate_shot_config(env["point"], env["avg_g"],
                                        env["avg_e"], env["dt"])
        assert cfg.separation > 0
        assert cfg.sigma_det == pytest.approx(cfg.separation / 13.0)
        # overlap at the reference SNR is negligible
        assert det.overlap_error(cfg.separation, cfg.sigma_det) < 1e-10
        assert 0 < cfg.t_half < env["point"].integration_time
        assert 0 <= cfg.induced_ge < 0.07
        assert 0 <= cfg.induced_eg < 0.15

    def test_presets_exist_for_all_schemes(self):
        assert set(det.REFERENCE_OPERATING_POINTS) == {"mw-mw", "mw-opt",
                                                       "opt-opt"}
