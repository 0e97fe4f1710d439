"""Steady-state, exact-propagator and frequency-domain solutions.

These are the linear-algebra counterparts of the time stepper: the same
state-space matrices solved exactly with dense solvers.  They serve both
as production operations (steady-state references, reflection spectra,
conversion transfer) and as the independent oracle against which the
integrator is verified.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SingularSystemError
from .params import DeviceParams, QubitState
from .system import (N_PORTS, PORT_EO, PORT_MW, PORT_OPT, LinearSystem,
                     ModeVector, build_system)

__all__ = ["SteadyState", "steady_state", "propagate_exact",
           "reflection_spectrum", "conversion_transfer", "TransferFunction"]

_PORT_INDEX = {"mw": PORT_MW, "eo": PORT_EO, "opt": PORT_OPT}


class SteadyState:
    """Fixed point of the driven system: mode amplitudes and output fields."""

    def __init__(self, modes: np.ndarray, outputs: np.ndarray, inputs: np.ndarray):
        self.modes = modes
        self.outputs = outputs
        self.inputs = inputs

    @property
    def a_c(self):
        return self.modes[0]

    @property
    def a_e(self):
        return self.modes[1]

    @property
    def a_o(self):
        return self.modes[2]

    @property
    def a_c_out(self):
        return self.outputs[0]

    @property
    def a_e_out(self):
        return self.outputs[1]

    @property
    def a_o_out(self):
        return self.outputs[2]

    def mode_vector(self, a_p_bar: complex = 0.0) -> ModeVector:
        return ModeVector.from_state(self.modes, a_p_bar=a_p_bar)


def steady_state(sys: LinearSystem, *, mw_in: complex = 0.0, eo_in: complex = 0.0,
                 opt_in: complex = 0.0, g: complex = 0.0) -> SteadyState:
    """Solve the fixed-point equations 0 = M v + B u exactly.

    Requires a time-independent drift (constant g) and constant drives.
    """
    u = np.array([mw_in, eo_in, opt_in], dtype=complex)
    m = sys.drift(g)
    try:
        v = np.linalg.solve(m, -(sys.b @ u))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    y = sys.c @ v + sys.d @ u
    return SteadyState(modes=v, outputs=y, inputs=u)


def propagate_exact(sys: LinearSystem, t: float, *, mw_in: complex = 0.0,
                    eo_in: complex = 0.0, opt_in: complex = 0.0,
                    g: complex = 0.0, v0: np.ndarray | None = None) -> np.ndarray:
    """Exact state at time t for constant drives: v_ss + e^{Mt}(v0 - v_ss).

    Matrix-exponential propagation; independent of the time stepper, used
    as the trajectory oracle in convergence tests.
    """
    ss = steady_state(sys, mw_in=mw_in, eo_in=eo_in, opt_in=opt_in, g=g)
    if v0 is None:
        v0 = np.zeros_like(ss.modes)
    m = sys.drift(g)
    return ss.modes + scipy.linalg.expm(m * t) @ (np.asarray(v0, complex) - ss.modes)


def frequency_response(sys: LinearSystem, omegas, *, g: complex = 0.0,
                       drive_port: str = "mw") -> np.ndarray:
    """Output fields per unit drive e^{-i omega t} at one port.

    Returns an array of shape (len(omegas), 3) with the complex transfer
    from the chosen port to (a_c_out, a_e_out, a_o_out).
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    j = _PORT_INDEX[drive_port]
    u = np.zeros(N_PORTS, dtype=complex)
    u[j] = 1.0
    m = sys.drift(g)
    bu = sys.b @ u
    du = sys.d @ u
    out = np.empty((omegas.size, 3), dtype=complex)
    eye = np.eye(m.shape[0])
    for k, w in enumerate(omegas):
        try:
            v = np.linalg.solve(m + 1j * w * eye, -bu)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from exc
        out[k] = sys.c @ v + du
    return out


def reflection_spectrum(p: DeviceParams, state: QubitState, omegas, *,
                        scheme: str = "mw-mw", g: complex = 0.0,
                        port: str = "eo") -> np.ndarray:
    """Amplitude reflection S11(omega) of the microwave chain.

    ``omegas`` are drive detunings (rad/s) from the common cavity frame.
    By default the reflection is taken at the EO-cavity side of the chain
    (the signal path of the experiment); ``port='mw'`` returns the bare
    readout-cavity reflection instead.
    """
    sys = build_system(p, state, scheme)
    resp = frequency_response(sys, omegas, g=g, drive_port="mw")
    col = {"eo": 1, "mw": 0}[port]
    return resp[:, col]


class TransferFunction:
    """Microwave-to-optical transfer S_oe(omega) and its bandwidth."""

    def __init__(self, omegas, s_oe, s_ee, fwhm, peak):
        self.omegas = omegas
        self.s_oe = s_oe
        self.s_ee = s_ee
        self.fwhm = fwhm              # rad/s
        self.peak = peak              # |S_oe(0)|^2

    @property
    def fwhm_hz(self) -> float:
        return self.fwhm / (2.0 * np.pi)

    @property
    def peak_efficiency(self) -> float:
        return self.peak


def conversion_transfer(p: DeviceParams, g: float, omegas=None, *,
                        stokes: bool = True) -> TransferFunction:
    """Transfer from the EO microwave port to the optical output.

    The FWHM of |S_oe|^2 is located by bisection between grid points; for
    weak coupling it approaches the EO cavity linewidth.  The peak
    conversion at zero detuning has the closed form
    eta_e * eta_o * 4C / (1 + C)^2 with C the cooperativity.
    """
    if g < 0:
        raise ValueError("pump-enhanced coupling g must be >= 0")
    sys = build_system(p, QubitState("e"), "mw-opt", stokes=stokes)
    if omegas is None:
        span = 4.0 * max(p.kappa_e, p.kappa_o)
        omegas = np.linspace(-span, span, 4001)
    omegas = np.asarray(omegas, dtype=float)
    resp = frequency_response(sys, omegas, g=g, drive_port="eo")
    s_oe = resp[:, 2]
    s_ee = resp[:, 1]

    peak = abs(frequency_response(sys, [0.0], g=g, drive_port="eo")[0, 2]) ** 2

    def power(w):
        return abs(frequency_response(sys, [w], g=g, drive_port="eo")[0, 2]) ** 2

    fwhm = _fwhm_bisect(omegas, np.abs(s_oe) ** 2, power, peak)
    return TransferFunction(omegas, s_oe, s_ee, fwhm, peak)


def _fwhm_bisect(omegas, powers, power_fn, peak) -> float:
    """Full width at half maximum of a single-peaked |S|^2 curve."""
    if peak <= 0.0:
        return 0.0
    half = 0.5 * peak
    above = powers >= half
    if not above.any():
        return 0.0
    idx = np.nonzero(above)[0]
    lo, hi = idx[0], idx[-1]

    def cross(w_out, w_in):
        for _ in range(60):
            mid = 0.5 * (w_out + w_in)
            if power_fn(mid) >= half:
                w_in = mid
            else:
                w_out = mid
        return 0.5 * (w_out + w_in)

    left = omegas[lo] if lo == 0 else cross(omegas[lo - 1], omegas[lo])
    right = omegas[hi] if hi == len(omegas) - 1 else cross(omegas[hi + 1], omegas[hi])
    return float(right - left)
