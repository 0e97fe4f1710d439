"""State-space form of the cascaded cQED + electro-optic mean-field model.

The complex mode vector is

    v = (a_c, a_e, a_o, s, m)

with ``a_c`` the readout-cavity amplitude, ``a_e`` the EO microwave
cavity, ``a_o`` the optical (anti-Stokes) mode, and ``s``/``m`` the
conjugated Stokes and TM amplitudes.  Tracking the conjugates makes the
parametric (Stokes) coupling linear in v, so the whole model is

    dv/dt = [A0 + g(t) GA + conj(g(t)) GB] v + B u(t)
    y(t)  = C v(t) + D u(t)

where u = (u_mw, u_eo, u_opt) are the external drives at the readout
cavity port, the EO cavity port, and the optical port, and
y = (a_c_out, a_e_out, a_o_out) are the output fields.

The inter-cavity link enters the matrices directly:  with zero cable
delay the unidirectional cascade substitutes a_e_in = eta_ec * a_c_out,
while the bidirectional (circulator-free) topology closes the loop in
both directions, which resolves to a geometric factor 1/(1 - eta_ec*eta_ce)
from the multiple reflections between the two ports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SchemeError
from .params import DeviceParams, QubitState

__all__ = [
    "MODE_CAVITY", "MODE_EO", "MODE_OPTICAL", "MODE_STOKES", "MODE_TM",
    "PORT_MW", "PORT_EO", "PORT_OPT",
    "SCHEMES", "ModeVector", "LinearSystem", "build_system",
]

MODE_CAVITY, MODE_EO, MODE_OPTICAL, MODE_STOKES, MODE_TM = range(5)
PORT_MW, PORT_EO, PORT_OPT = range(3)
N_MODES = 5
N_PORTS = 3

SCHEMES = ("mw-mw", "mw-opt", "opt-opt")

MODE_NAMES = ("a_c", "a_e", "a_o", "a_s", "a_tm")
OUTPUT_NAMES = ("a_c_out", "a_e_out", "a_o_out")


@dataclass(frozen=True)
class ModeVector:
    """Mean-field amplitudes of all modes at one instant.

    ``a_s`` and ``a_tm`` are the physical (unconjugated) amplitudes; the
    integrator state stores their conjugates internally.
    """

    a_c: complex
    a_e: complex
    a_o: complex
    a_s: complex
    a_tm: complex
    a_p_bar: complex = 0.0

    @classmethod
    def from_state(cls, v: np.ndarray, a_p_bar: complex = 0.0) -> "ModeVector":
        return cls(a_c=complex(v[MODE_CAVITY]), a_e=complex(v[MODE_EO]),
                   a_o=complex(v[MODE_OPTICAL]),
                   a_s=complex(np.conj(v[MODE_STOKES])),
                   a_tm=complex(np.conj(v[MODE_TM])),
                   a_p_bar=complex(a_p_bar))


@dataclass(frozen=True)
class LinearSystem:
    """Drift/input/output matrices for one scheme and one qubit branch."""

    scheme: str
    a0: np.ndarray      # (5, 5) constant drift
    ga: np.ndarray      # (5, 5) multiplies g(t)
    gb: np.ndarray      # (5, 5) multiplies conj(g(t))
    b: np.ndarray       # (5, 3) input coupling
    c: np.ndarray       # (3, 5) output map
    d: np.ndarray       # (3, 3) input feedthrough
    params: DeviceParams
    state: QubitState

    def __post_init__(self):
        if np.any(np.real(np.diag(self.a0)) > 0):
            raise ValueError("drift diagonal must have non-positive real part")

    def drift(self, g: complex = 0.0) -> np.ndarray:
        """Full drift matrix at a fixed pump-enhanced coupling g."""
        return self.a0 + g * self.ga + np.conj(g) * self.gb

    def max_rate(self, g_max: float = 0.0) -> float:
        """Fastest rate in the system, used for the step-size precondition."""
        decay = 2.0 * np.abs(np.real(np.diag(self.a0)))
        detune = np.abs(np.imag(np.diag(self.a0)))
        rates = [decay.max(), detune.max(), abs(g_max), self.params.J]
        return float(max(rates))

    def outputs(self, v: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Output fields y = C v + D u for states/drives of shape (..., 5)/(..., 3)."""
        return v @ self.c.T + u @ self.d.T


def build_system(p: DeviceParams, state: QubitState, scheme: str,
                 *, stokes: bool = True) -> LinearSystem:
    """Assemble the state-space model for one readout scheme.

    ``stokes=False`` removes the parametric coupling to the conjugated
    Stokes mode, leaving the pure beam-splitter (passive) converter; this
    is the configuration for which conversion is bounded by unity.
    """
    if scheme not in SCHEMES:
        raise SchemeError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")

    s_c = math.sqrt(p.eta_c * p.kappa_c)
    s_e = math.sqrt(p.eta_e * p.kappa_e)
    s_o = math.sqrt(p.kappa_o_ext)

    # circulator-free topology feeds the EO reflection back into the
    # readout cavity; with the circulator the link is one-way
    f_ec = p.eta_ec
    f_ce = p.eta_ce if scheme == "opt-opt" else 0.0
    loop = f_ec * f_ce
    if loop >= 1.0:
        raise SchemeError("cable-loop gain eta_ec*eta_ce must be < 1")
    den = 1.0 - loop

    a0 = np.zeros((N_MODES, N_MODES), dtype=complex)
    a0[MODE_CAVITY, MODE_CAVITY] = -1j * state.cavity_detuning(p) - 0.5 * p.kappa_c
    a0[MODE_EO, MODE_EO] = -0.5 * p.kappa_e
    a0[MODE_OPTICAL, MODE_OPTICAL] = 1j * p.delta_o - 0.5 * p.kappa_o
    a0[MODE_STOKES, MODE_STOKES] = -1j * p.delta_s - 0.5 * p.kappa_s
    a0[MODE_TM, MODE_TM] = -1j * p.delta_tm - 0.5 * p.kappa_tm
    a0[MODE_STOKES, MODE_TM] = 1j * p.J
    a0[MODE_TM, MODE_STOKES] = 1j * p.J

    # link-mediated drive of each microwave cavity by the other's output
    a0[MODE_CAVITY, MODE_CAVITY] += -s_c * loop * s_c / den
    a0[MODE_CAVITY, MODE_EO] += -s_c * f_ce * s_e / den
    a0[MODE_EO, MODE_CAVITY] += -s_e * f_ec * s_c / den
    a0[MODE_EO, MODE_EO] += -s_e * loop * s_e / den

    ga = np.zeros_like(a0)
    gb = np.zeros_like(a0)
    ga[MODE_EO, MODE_OPTICAL] = -1j
    ga[MODE_OPTICAL, MODE_EO] = -1j
    if stokes:
        ga[MODE_STOKES, MODE_EO] = 1j
        gb[MODE_EO, MODE_STOKES] = -1j

    b = np.zeros((N_MODES, N_PORTS), dtype=complex)
    b[MODE_CAVITY, PORT_MW] = s_c / den
    b[MODE_CAVITY, PORT_EO] = s_c * f_ce / den
    b[MODE_EO, PORT_MW] = s_e * f_ec / den
    b[MODE_EO, PORT_EO] = s_e / den
    b[MODE_OPTICAL, PORT_OPT] = s_o

    c = np.zeros((N_PORTS, N_MODES), dtype=complex)
    d = np.zeros((N_PORTS, N_PORTS), dtype=complex)
    c[0, MODE_CAVITY] = -s_c / den
    c[0, MODE_EO] = -f_ce * s_e / den
    d[0, PORT_MW] = 1.0 / den
    d[0, PORT_EO] = f_ce / den
    c[1, MODE_CAVITY] = -f_ec * s_c / den
    c[1, MODE_EO] = -s_e / den
    d[1, PORT_MW] = f_ec / den
    d[1, PORT_EO] = 1.0 / den
    c[2, MODE_OPTICAL] = -s_o
    d[2, PORT_OPT] = 1.0

    for arr in (a0, ga, gb, b, c, d):
        arr.flags.writeable = False

    return LinearSystem(scheme=scheme, a0=a0, ga=ga, gb=gb, b=b, c=c, d=d,
                        params=p, state=state)
