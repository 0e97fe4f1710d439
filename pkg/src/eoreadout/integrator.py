"""Fixed-step time-domain integration of the mean-field model.

``integrate`` marches the state-space system built by
:func:`eoreadout.system.build_system` with classical fourth-order
Runge-Kutta.  Drive envelopes are sampled on a half-step grid so the RK4
stages see exact midpoint values and the method keeps its full order for
smooth pulses.

A cable delay ``tau > 0`` switches to a slower pure-Python driver that
propagates the inter-cavity link through an integer-step circular buffer
(zero-order held within a step); the default ``tau = 0`` folds the link
into the matrices and runs in the selected kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridError, NonFiniteError, StepSizeError
from .params import DeviceParams
from .pulses import PulseEnvelope
from .system import (MODE_CAVITY, MODE_EO, MODE_OPTICAL, N_MODES, N_PORTS,
                     PORT_EO, PORT_MW, PORT_OPT, LinearSystem, ModeVector)

__all__ = ["Trajectory", "PumpTrajectory", "integrate", "pump_trajectory",
           "suggested_dt"]


@dataclass(frozen=True)
class Trajectory:
    """Integrated trajectory: states, output fields and the drives used."""

    t: np.ndarray          # (N+1,) seconds
    dt: float
    modes: np.ndarray      # (N+1, 5) internal state (Stokes/TM conjugated)
    outputs: np.ndarray    # (N+1, 3) output fields (a_c_out, a_e_out, a_o_out)
    inputs: np.ndarray     # (N+1, 3) port drives on the same grid
    g: np.ndarray          # (N+1,) pump-enhanced coupling
    scheme: str
    config_hash: str

    @property
    def a_c(self):
        return self.modes[:, MODE_CAVITY]

    @property
    def a_e(self):
        return self.modes[:, MODE_EO]

    @property
    def a_o(self):
        return self.modes[:, MODE_OPTICAL]

    @property
    def a_c_out(self):
        return self.outputs[:, 0]

    @property
    def a_e_out(self):
        return self.outputs[:, 1]

    @property
    def a_o_out(self):
        return self.outputs[:, 2]

    def final_state(self) -> ModeVector:
        g_last = self.g[-1] if self.g.size else 0.0
        return ModeVector.from_state(self.modes[-1], a_p_bar=g_last)


@dataclass(frozen=True)
class PumpTrajectory:
    """Pump amplitude and the derived coupling g(t) = a_p(t) * g0."""

    t: np.ndarray          # (N+1,) main integration grid
    dt: float
    a_p: np.ndarray        # (N+1,)
    g_fine: np.ndarray     # (2N+1,) on the half-step grid for the integrator
    config_hash: str

    @property
    def g(self) -> np.ndarray:
        return self.g_fine[::2]

    @property
    def g_max(self) -> float:
        return float(np.max(np.abs(self.g_fine))) if self.g_fine.size else 0.0


def suggested_dt(p: DeviceParams, g_max: float = 0.0, factor: float = 20.0) -> float:
    """Largest step satisfying dt <= 1/(factor * fastest rate)."""
    rates = [p.kappa_c, p.kappa_e, p.kappa_o, p.kappa_s, p.kappa_tm, p.kappa_p,
             p.chi0, abs(p.delta_o), abs(p.delta_s), abs(p.delta_tm),
             abs(p.delta_p), p.J, abs(g_max)]
    return 1.0 / (factor * max(rates))


def _sample_port(spec, t: np.ndarray) -> np.ndarray:
    """Normalize a drive specification to samples on the given times."""
    if spec is None:
        return np.zeros_like(t, dtype=complex)
    if isinstance(spec, PulseEnvelope):
        return spec.sample(t)
    if callable(spec):
        return np.asarray(spec(t), dtype=complex)
    if np.isscalar(spec):
        return np.full(t.shape, complex(spec))
    arr = np.asarray(spec, dtype=complex)
    if arr.shape != t.shape:
        raise GridError(f"drive array has {arr.shape[0]} samples; the "
                        f"half-step grid needs {t.shape[0]}")
    return arr


def _sample_g(g, t: np.ndarray) -> np.ndarray:
    if g is None:
        return np.zeros_like(t, dtype=complex)
    if isinstance(g, PumpTrajectory):
        if g.g_fine.shape != t.shape:
            raise GridError("pump trajectory was computed on a different grid")
        return g.g_fine
    return _sample_port(g, t)


def integrate(sys: LinearSystem, dt: float, t_final: float, *,
              mw_in=None, eo_in=None, opt_in=None, g=None,
              v0: np.ndarray | None = None,
              check_every: int = 1024) -> Trajectory:
    """Integrate the mean-field equations over [0, t_final].

    Drives may be PulseEnvelope instances, callables of t, scalars,
    half-step-grid arrays, or None; ``g`` additionally accepts a
    PumpTrajectory computed with the same (dt, t_final).

    Raises StepSizeError when dt violates the 1/(20 * max rate)
    precondition and NonFiniteError (with the step index) if the state
    leaves the finite range.
    """
    if not t_final > 0:
        raise ValueError("t_final must be > 0")
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError("t_final shorter than one step")

    t_fine = 0.5 * dt * np.arange(2 * n_steps + 1)
    g_fine = np.ascontiguousarray(_sample_g(g, t_fine))
    g_max = float(np.max(np.abs(g_fine))) if g_fine.size else 0.0

    max_rate = sys.max_rate(g_max)
    if dt > (1.0 + 1e-12) / (20.0 * max_rate):
        raise StepSizeError(
            f"dt = {dt:.3e} s exceeds 1/(20 * max rate) = "
            f"{1.0 / (20.0 * max_rate):.3e} s")

    u_fine = np.empty((2 * n_steps + 1, N_PORTS), dtype=complex)
    u_fine[:, PORT_MW] = _sample_port(mw_in, t_fine)
    u_fine[:, PORT_EO] = _sample_port(eo_in, t_fine)
    u_fine[:, PORT_OPT] = _sample_port(opt_in, t_fine)

    if v0 is None:
        v0 = np.zeros(N_MODES, dtype=complex)
    else:
        v0 = np.asarray(v0, dtype=complex)

    if sys.params.tau > 0:
        modes, out_c, out_e = _integrate_delay(sys, u_fine, g_fine, v0, dt, n_steps)
        u_full = u_fine[::2]
        s_o = math.sqrt(sys.params.kappa_o_ext)
        outputs = np.empty((modes.shape[0], 3), dtype=complex)
        outputs[:, 0] = out_c
        outputs[:, 1] = out_e
        outputs[:, 2] = u_full[:, PORT_OPT] - s_o * modes[:, MODE_OPTICAL]
    else:
        drive = np.ascontiguousarray(u_fine @ sys.b.T)
        modes, bad = _kernels.rk4_run(sys.a0, sys.ga, sys.gb, drive, g_fine,
                                      v0, dt, n_steps, check_every)
        if bad >= 0:
            raise NonFiniteError(bad, bad * dt)
        u_full = u_fine[::2]
        outputs = sys.outputs(modes, u_full)

    t = dt * np.arange(n_steps + 1)
    return Trajectory(t=t, dt=dt, modes=modes, outputs=outputs, inputs=u_full,
                      g=g_fine[::2], scheme=sys.scheme,
                      config_hash=sys.params.config_hash)


def pump_trajectory(pulse, p: DeviceParams, dt: float, t_final: float) -> PumpTrajectory:
    """Integrate the pump mode and return g(t) = a_p(t) * g0.

    The pump equation is marched at dt/2 so that g is available on the
    half-step grid of the main integrator.
    """
    if not t_final > 0:
        raise ValueError("t_final must be > 0")
    n_steps = int(round(t_final / dt))
    dt_p = 0.5 * dt
    pump_rate = max(p.kappa_p, abs(p.delta_p))
    if dt_p > (1.0 + 1e-12) / (20.0 * pump_rate):
        raise StepSizeError(
            f"pump step dt/2 = {dt_p:.3e} s exceeds 1/(20 * pump rate) = "
            f"{1.0 / (20.0 * pump_rate):.3e} s")

    t_quarter = 0.5 * dt_p * np.arange(4 * n_steps + 1)
    u = _sample_port(pulse, t_quarter)

    a0 = np.array([[1j * p.delta_p - 0.5 * p.kappa_p]], dtype=complex)
    zero = np.zeros_like(a0)
    drive = np.ascontiguousarray(
        (math.sqrt(p.eta_p * p.kappa_p) * u)[:, None])
    g_grid = np.zeros(4 * n_steps + 1, dtype=complex)
    states, bad = _kernels.rk4_run(a0, zero, zero, drive, g_grid,
                                   np.zeros(1, dtype=complex), dt_p,
                                   2 * n_steps, 4096)
    if bad >= 0:
        raise NonFiniteError(bad, bad * dt_p)

    a_p_fine = states[:, 0]
    return PumpTrajectory(t=dt * np.arange(n_steps + 1), dt=dt,
                          a_p=a_p_fine[::2], g_fine=p.g0 * a_p_fine,
                          config_hash=p.config_hash)


# ---------------------------------------------------------------------------
# tau > 0: explicit link propagation with an integer-step circular buffer

def _integrate_delay(sys: LinearSystem, u_fine, g_fine, v0, dt, n_steps):
    p = sys.params
    n_delay = max(1, int(round(p.tau / dt)))

    s_c = math.sqrt(p.eta_c * p.kappa_c)
    s_e = math.sqrt(p.eta_e * p.kappa_e)
    bidirectional = sys.scheme == "opt-opt"

    # unlinked drift: strip the fold terms, keep everything else
    from .system import build_system
    unlinked = build_system(p.with_updates(eta_ec=0.0, eta_ce=0.0),
                            sys.state, sys.scheme)
    a0, ga, gb = unlinked.a0, unlinked.ga, unlinked.gb

    modes = np.empty((n_steps + 1, N_MODES), dtype=complex)
    modes[0] = v0
    v = np.array(v0, dtype=complex)

    # hist_*[n] is the output field produced at step n; the link reads
    # it back n_delay steps later (zero before the history begins)
    hist_c = np.zeros(n_steps + 1, dtype=complex)
    hist_e = np.zeros(n_steps + 1, dtype=complex)

    half = 0.5 * dt
    sixth = dt / 6.0
    b_t = unlinked.b.T

    def link_vector(step):
        # delayed link contribution, held constant within the step
        delayed_c = hist_c[step - n_delay] if step >= n_delay else 0.0
        delayed_e = hist_e[step - n_delay] if step >= n_delay else 0.0
        link = np.zeros(N_PORTS, dtype=complex)
        link[PORT_EO] = p.eta_ec * delayed_c
        if bidirectional:
            link[PORT_MW] = p.eta_ce * delayed_e
        return link

    for step in range(n_steps):
        i0 = 2 * step
        link = link_vector(step)
        c_in = u_fine[i0, PORT_MW] + link[PORT_MW]
        e_in = u_fine[i0, PORT_EO] + link[PORT_EO]
        hist_c[step] = c_in - s_c * v[MODE_CAVITY]
        hist_e[step] = e_in - s_e * v[MODE_EO]

        # direct drives sampled on the half grid, the link held
        d0 = (u_fine[i0] + link) @ b_t
        d1 = (u_fine[i0 + 1] + link) @ b_t
        d2 = (u_fine[i0 + 2] + link) @ b_t

        m0 = a0 + g_fine[i0] * ga + np.conj(g_fine[i0]) * gb
        m1 = a0 + g_fine[i0 + 1] * ga + np.conj(g_fine[i0 + 1]) * gb
        m2 = a0 + g_fine[i0 + 2] * ga + np.conj(g_fine[i0 + 2]) * gb
        k1 = m0 @ v + d0
        k2 = m1 @ (v + half * k1) + d1
        k3 = m1 @ (v + half * k2) + d1
        k4 = m2 @ (v + dt * k3) + d2
        v = v + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        modes[step + 1] = v
        if (step + 1) % 1024 == 0 and not np.all(np.isfinite(v.view(float))):
            raise NonFiniteError(step + 1, (step + 1) * dt)

    if not np.all(np.isfinite(v.view(float))):
        raise NonFiniteError(n_steps, n_steps * dt)

    link = link_vector(n_steps)
    hist_c[n_steps] = u_fine[-1, PORT_MW] + link[PORT_MW] - s_c * v[MODE_CAVITY]
    hist_e[n_steps] = u_fine[-1, PORT_EO] + link[PORT_EO] - s_e * v[MODE_EO]
    return modes, hist_c, hist_e
