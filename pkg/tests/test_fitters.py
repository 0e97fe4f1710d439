import numpy as np
import pytest

from eoreadout.errors import FitError
from eoreadout.fitters import fit_ramsey, fit_t1


class TestT1:
    def test_exact_recovery(self):
        t = np.linspace(0, 120e-6, 40)
        y = 0.9 * np.exp(-t / 33e-6) + 0.05
        fit = fit_t1(t, y)
        assert fit.t1 == pytest.approx(33e-6, rel=0.01)
        assert not fit.unbounded

    def test_constant_data_flags_unbounded(self):
        t = np.linspace(0, 100e-6, 20)
        fit = fit_t1(t, np.full(20, 0.4))
        assert fit.unbounded

    def test_needs_five_points(self):
        with pytest.raises(ValueError):
            fit_t1([0, 1e-6, 2e-6], [1, 0.5, 0.2])

    def test_noisy_confidence_coverage(self, rng):
        t = np.linspace(0, 120e-6, 30)
        truth = 33e-6
        hits = 0
        n_trials = 200
        for _ in range(n_trials):
            y = 0.9 * np.exp(-t / truth) + 0.05 + rng.normal(0, 0.02, t.size)
            fit = fit_t1(t, y)
            lo, hi = fit.ci95
            hits += lo <= truth <= hi
        assert hits / n_trials >= 0.95


class TestRamsey:
    def test_exact_recovery(self):
        t = np.linspace(0, 5e-6, 200)
        y = 0.45 * np.exp(-t / 1.5e-6) * np.cos(2 * np.pi * 2e6 * t + 0.3) + 0.5
        fit = fit_ramsey(t, y)
        assert fit.t2_star == pytest.approx(1.5e-6, rel=0.02)
        assert fit.detuning == pytest.approx(2e6, rel=0.02)
        assert not fit.aliased

    def test_zero_amplitude_degenerate(self):
        t = np.linspace(0, 5e-6, 100)
        with pytest.raises(FitError):
            fit_ramsey(t, np.full(100, 0.5))

    def test_aliased_flag(self):
        # 2 MHz oscillation sampled every 0.3 us: < 4 samples per period
        t = np.arange(0, 6e-6, 0.3e-6)
        y = 0.45 * np.exp(-t / 3e-6) * np.cos(2 * np.pi * 2e6 * t) + 0.5
        fit = fit_ramsey(t, y)
        assert fit.aliased

    def test_recovery_across_noise_levels(self, rng):
        # synthetic runs at the three readout signal-to-noise levels land
        # inside the reference window of fitted transverse decays
        t = np.linspace(0, 6e-6, 240)
        truth, delta = 1.5e-6, 2e6
        for noise in (0.01, 0.03, 0.05):
            y = (0.45 * np.exp(-t / truth) * np.cos(2 * np.pi * delta * t)
                 + 0.5 + rng.normal(0, noise, t.size))
            fit = fit_ramsey(t, y)
            assert 1.16e-6 <= fit.t2_star <= 1.73e-6
