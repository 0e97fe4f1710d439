"""Drive-pulse envelopes sampled on the integration grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError

__all__ = ["PulseEnvelope"]

_SHAPES = ("rectangular", "flat_top_gaussian", "flat_top_cosine", "tabulated")


@dataclass(frozen=True)
class PulseEnvelope:
    """Complex drive envelope in photon-flux^(1/2) units.

    ``detuning`` is the carrier offset (rad/s) from the mode's rotating
    frame; the sampled envelope carries the factor exp(-i*detuning*t).
    ``rise`` is the ramp length of the smooth flat-top shapes (Gaussian
    edges with sigma = rise/2, or half-cosine edges).
    """

    shape: str = "rectangular"
    amplitude: complex = 1.0
    start: float = 0.0
    duration: float = 1e-6
    rise: float = 0.0
    detuning: float = 0.0
    table_t: np.ndarray | None = field(default=None, repr=False)
    table_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; "
                             f"expected one of {_SHAPES}")
        if not self.duration > 0:
            raise ValueError("pulse duration must be > 0")
        if self.rise < 0:
            raise ValueError("pulse rise must be >= 0")
        if self.shape == "tabulated":
            if self.table_t is None or self.table_values is None:
                raise ValueError("tabulated pulse needs table_t and table_values")
            t = np.asarray(self.table_t, dtype=float)
            if t.ndim != 1 or t.size < 2:
                raise GridError("tabulated pulse grid needs >= 2 points")
            steps = np.diff(t)
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise GridError("tabulated pulse must be sampled on a uniform grid")

    def sample(self, t: np.ndarray) -> np.ndarray:
        """Evaluate the envelope on arbitrary times (vectorized)."""
        t = np.asarray(t, dtype=float)
        s = self._shape_profile(t)
        out = self.amplitude * s
        if self.detuning != 0.0:
            out = out * np.exp(-1j * self.detuning * t)
        return np.asarray(out, dtype=complex)

    def _shape_profile(self, t: np.ndarray) -> np.ndarray:
        t0, dur, rise = self.start, self.duration, self.rise
        if self.shape == "tabulated":
            re = np.interp(t, self.table_t, np.real(self.table_values), left=0.0, right=0.0)
            im = np.interp(t, self.table_t, np.imag(self.table_values), left=0.0, right=0.0)
            return re + 1j * im
        inside = (t >= t0) & (t < t0 + dur)
        if self.shape == "rectangular" or rise == 0.0:
            return inside.astype(float)
        prof = np.zeros_like(t)
        up = inside & (t < t0 + rise)
        flat = inside & (t >= t0 + rise) & (t < t0 + dur - rise)
        down = inside & (t >= t0 + dur - rise)
        prof[flat] = 1.0
        if self.shape == "flat_top_gaussian":
            sigma = rise / 2.0
            prof[up] = np.exp(-0.5 * ((t[up] - (t0 + rise)) / sigma) ** 2)
            prof[down] = np.exp(-0.5 * ((t[down] - (t0 + dur - rise)) / sigma) ** 2)
        else:  # flat_top_cosine
            prof[up] = 0.5 * (1.0 - np.cos(np.pi * (t[up] - t0) / rise))
            prof[down] = 0.5 * (1.0 - np.cos(np.pi * (t0 + dur - t[down]) / rise))
        return prof
