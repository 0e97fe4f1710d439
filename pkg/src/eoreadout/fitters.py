"""Coherence-time extraction from decay and Ramsey data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit
from scipy.stats import t as t_dist

from .errors import FitError

__all__ = ["T1Fit", "RamseyFit", "fit_t1", "fit_ramsey"]


@dataclass(frozen=True)
class T1Fit:
    """Exponential-decay fit A exp(-t/T1) + B."""

    t1: float
    t1_std: float
    ci95: tuple
    amplitude: float
    offset: float
    unbounded: bool      # decay slower than the sampled window resolves


@dataclass(frozen=True)
class RamseyFit:
    """Damped-oscillation fit A exp(-t/T2*) cos(2 pi delta t + phi) + B."""

    t2_star: float
    t2_std: float
    ci95: tuple
    detuning: float      # Hz
    phase: float
    amplitude: float
    offset: float
    aliased: bool        # fewer than 4 samples per fitted oscillation


def _decay(t, a, t1, b):
    return a * np.exp(-t / t1) + b


def fit_t1(delays, populations) -> T1Fit:
    """Least-squares exponential fit of an energy-relaxation curve.

    Flags the fit as unbounded (instead of failing) when the data do not
    decay over the sampled window, e.g. constant input.
    """
    t = np.asarray(delays, dtype=float)
    y = np.asarray(populations, dtype=float)
    if t.size < 5:
        raise ValueError("need at least 5 points to fit a decay")
    span = t.max() - t.min()
    a0 = y[0] - y[-1]
    if abs(a0) < 1e-12 * max(1.0, abs(y).max()):
        return T1Fit(t1=math.inf, t1_std=math.inf, ci95=(0.0, math.inf),
                     amplitude=0.0, offset=float(np.mean(y)), unbounded=True)
    try:
        popt, pcov = curve_fit(_decay, t, y, p0=[a0, span / 3.0, y[-1]],
                               maxfev=10000)
    except RuntimeError as exc:
        raise FitError(f"decay fit did not converge: {exc}")
    a, t1, b = popt
    t1_std = float(np.sqrt(np.abs(pcov[1, 1])))
    # noise level is estimated from the residuals, so the interval uses
    # the t quantile with n - 3 degrees of freedom
    quant = float(t_dist.ppf(0.975, max(t.size - 3, 1)))
    unbounded = not (0 < t1 < 100.0 * span) or not np.isfinite(t1_std)
    return T1Fit(t1=float(t1), t1_std=t1_std,
                 ci95=(float(t1 - quant * t1_std), float(t1 + quant * t1_std)),
                 amplitude=float(a), offset=float(b), unbounded=unbounded)


def _ramsey(t, a, t2, f, phi, b):
    return a * np.exp(-t / t2) * np.cos(2.0 * np.pi * f * t + phi) + b


def fit_ramsey(delays, populations) -> RamseyFit:
    """Damped-cosine fit of Ramsey oscillations.

    The initial detuning guess comes from the dominant FFT bin.  A fit
    resolved by fewer than 4 samples per oscillation is flagged as
    aliased; a vanishing oscillation amplitude is a degenerate-fit error.
    """
    t = np.asarray(delays, dtype=float)
    y = np.asarray(populations, dtype=float)
    if t.size < 8:
        raise ValueError("need at least 8 points to fit Ramsey oscillations")
    dt = float(np.mean(np.diff(t)))
    span = t.max() - t.min()

    yc = y - np.mean(y)
    amp0 = float(np.max(np.abs(yc)))
    if amp0 < 1e-12 * max(1.0, abs(y).max()):
        raise FitError("no oscillation amplitude; degenerate Ramsey data")

    spectrum = np.abs(np.fft.rfft(yc))
    freqs = np.fft.rfftfreq(t.size, d=dt)
    f0 = float(freqs[np.argmax(spectrum[1:]) + 1])
    if f0 <= 0:
        f0 = 1.0 / span

    try:
        popt, pcov = curve_fit(_ramsey, t, y,
                               p0=[amp0, span / 3.0, f0, 0.0, np.mean(y)],
                               maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"Ramsey fit did not converge: {exc}")
    a, t2, f, phi, b = popt
    if abs(a) < 1e-12 * max(1.0, abs(y).max()):
        raise FitError("fitted oscillation amplitude vanishes")
    t2_std = float(np.sqrt(np.abs(pcov[1, 1])))
    quant = float(t_dist.ppf(0.975, max(t.size - 5, 1)))
    return RamseyFit(t2_star=float(abs(t2)), t2_std=t2_std,
                     ci95=(float(abs(t2) - quant * t2_std),
                           float(abs(t2) + quant * t2_std)),
                     detuning=float(abs(f)), phase=float(phi),
                     amplitude=float(a), offset=float(b),
                     aliased=bool(abs(f) >= 0.25 / dt))
