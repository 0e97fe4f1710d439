"""Scalar physics models: thermal occupations, coherence budgets, efficiencies.

Everything here is closed-form or a composition of closed forms; these
are the quantities plotted against optical power and repetition rate in
a transducer-heating study, plus the conversion-efficiency bookkeeping
of the electro-optic link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import HBAR, K_B
from .params import DeviceParams

__all__ = [
    "bose_occupation", "invert_bose_temperature", "excited_state_population",
    "temp_power_law", "qp_density_equilibrium", "shot_noise_dephasing",
    "cooperativity", "cooperativity_to_g", "cooperativity_for_efficiency",
    "conversion_efficiency", "T1Model", "ThermalModel", "PowerLaw",
    "CoherenceBudget", "t1_budget", "coherence_budget", "ThermalPoint",
    "BudgetPoint", "predict_fidelity_vs_power",
]


# ---------------------------------------------------------------------------
# occupations and thermometry

def bose_occupation(temperature: float, omega: float) -> float:
    """Bose-Einstein occupation 1 / (exp(hbar w / kT) - 1)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    x = HBAR * omega / (K_B * temperature)
    if x > 700.0:  # expm1 would overflow; occupation is e^-x to 1e-300
        return math.exp(-x) if x < 745.0 else 0.0
    return 1.0 / math.expm1(x)


def invert_bose_temperature(n_th: float, omega: float) -> float:
    """Temperature at which a mode of frequency omega holds n_th quanta."""
    if n_th <= 0:
        raise ValueError("occupation must be > 0")
    return HBAR * omega / (K_B * math.log1p(1.0 / n_th))


def excited_state_population(temperature: float, omega: float) -> float:
    """Two-level thermal excited-state probability 1 / (exp(hbar w/kT) + 1)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    x = HBAR * omega / (K_B * temperature)
    if x > 700.0:
        return math.exp(-x) if x < 745.0 else 0.0
    return 1.0 / (math.exp(x) + 1.0)


def temp_power_law(p_avg: float, t0: float, coeff: float, exponent: float,
                   q: float = 4.0) -> float:
    """Component temperature under average optical power.

    Smoothly joins the base temperature t0 with the heating power law
    coeff * P^exponent through a power mean of order q, so T -> t0 as
    P -> 0 and T -> the power law when heating dominates.
    """
    if p_avg < 0:
        raise ValueError("average power must be >= 0")
    if p_avg == 0.0:
        return t0
    excess = coeff * p_avg ** exponent
    return (t0 ** q + excess ** q) ** (1.0 / q)


def qp_density_equilibrium(temperature: float, gap: float) -> float:
    """Thermal-equilibrium quasiparticle density sqrt(2 pi kT/D) exp(-D/kT)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    ratio = K_B * temperature / gap
    return math.sqrt(2.0 * math.pi * ratio) * math.exp(-1.0 / ratio)


# ---------------------------------------------------------------------------
# conversion bookkeeping

def cooperativity(g: float, p: DeviceParams) -> float:
    """C = 4 g^2 / (kappa_e kappa_o)."""
    if g < 0:
        raise ValueError("coupling g must be >= 0")
    return 4.0 * g * g / (p.kappa_e * p.kappa_o)


def cooperativity_to_g(c: float, p: DeviceParams) -> float:
    """Pump-enhanced coupling g reaching cooperativity c."""
    if c < 0:
        raise ValueError("cooperativity must be >= 0")
    return 0.5 * math.sqrt(c * p.kappa_e * p.kappa_o)


def conversion_efficiency(c: float, eta_e: float, eta_o: float) -> float:
    """Total conversion efficiency eta_e * eta_o * 4C / (1 + C)^2."""
    if c < 0:
        raise ValueError("cooperativity must be >= 0")
    if not (0.0 <= eta_e <= 1.0 and 0.0 <= eta_o <= 1.0):
        raise ValueError("coupling efficiencies must lie in [0, 1]")
    return eta_e * eta_o * 4.0 * c / (1.0 + c) ** 2


def cooperativity_for_efficiency(eta_eo: float, eta_e: float, eta_o: float) -> float:
    """Smaller root of eta_eo = eta_e eta_o 4C/(1+C)^2 (undercoupled branch)."""
    y = eta_eo / (eta_e * eta_o)
    if not 0.0 < y <= 1.0:
        raise ValueError("target efficiency must satisfy 0 < eta_eo <= eta_e*eta_o")
    a = 2.0 / y - 1.0
    return a - math.sqrt(a * a - 1.0)


# ---------------------------------------------------------------------------
# coherence budget

@dataclass(frozen=True)
class T1Model:
    """Fitted scalars of the energy-decay budget.

    ``purcell_participation`` scales the bare Purcell rate
    kappa_c (g_qc/Delta)^2 for the filtering by the detuned output chain;
    ``rad_coefficient`` converts the cavity thermal occupation into a
    radiation-induced decay rate; ``broadening_slope`` models the
    linewidth increase of the readout cavity with its thermal occupation
    (the broadening factor stays >= 1).
    """

    purcell_participation: float = 0.1
    rad_coefficient: float = 2.0e6
    broadening_slope: float = 30.0
    t_dark: float = 0.075
    x_neq: float = 1.0e-7

    @classmethod
    def calibrated(cls, p: DeviceParams, t1_dark: float = 33e-6,
                   t_dark: float = 0.075, x_neq: float = 1.0e-7,
                   purcell_participation: float = 0.1,
                   broadening_slope: float = 30.0) -> "T1Model":
        """Fix the radiation coefficient so the dark budget reproduces t1_dark."""
        gamma_target = 1.0 / t1_dark
        gamma_qp = _gamma_qp(p, t_dark, x_neq)
        gamma_purcell = purcell_participation * _gamma_purcell_bare(p)
        gamma_rad = gamma_target - gamma_qp - gamma_purcell
        if gamma_rad < 0:
            raise ValueError(
                "quasiparticle + Purcell rates already exceed 1/t1_dark; "
                "lower purcell_participation or x_neq")
        n_dark = bose_occupation(t_dark, p.omega_c)
        return cls(purcell_participation=purcell_participation,
                   rad_coefficient=gamma_rad / n_dark,
                   broadening_slope=broadening_slope,
                   t_dark=t_dark, x_neq=x_neq)


@dataclass(frozen=True)
class CoherenceBudget:
    """Energy-decay decomposition and the dephasing-limited T2."""

    gamma_qp: float
    gamma_purcell: float
    gamma_rad: float
    t1: float
    gamma_phi: float
    t2_limit: float


def _gamma_purcell_bare(p: DeviceParams) -> float:
    delta_qc = p.omega_q - p.omega_c
    return p.kappa_c * (p.g_qc / delta_qc) ** 2


def _gamma_qp(p: DeviceParams, t_qubit: float, x_neq: float) -> float:
    x_total = qp_density_equilibrium(t_qubit, p.gap) + x_neq
    return x_total * math.sqrt(2.0 * p.gap / (math.pi * HBAR * p.omega_q)) * p.omega_q


def t1_budget(p: DeviceParams, t_qubit: float, t_cavity: float,
              x_neq: float = 1.0e-7, model: T1Model | None = None) -> CoherenceBudget:
    """Decompose 1/T1 into quasiparticle, Purcell and radiation channels.

    The three rates sum exactly to 1/T1; the dephasing fields are filled
    by :func:`coherence_budget`, here they are zero.
    """
    if t_qubit <= 0 or t_cavity <= 0:
        raise ValueError("temperatures must be > 0")
    if model is None:
        model = T1Model()
    gamma_qp = _gamma_qp(p, t_qubit, x_neq)

    n_cav = bose_occupation(t_cavity, p.omega_c)
    n_dark = bose_occupation(model.t_dark, p.omega_c)
    broadening = 1.0 + model.broadening_slope * max(0.0, n_cav - n_dark)
    gamma_purcell = model.purcell_participation * _gamma_purcell_bare(p) * broadening

    gamma_rad = model.rad_coefficient * n_cav

    t1 = 1.0 / (gamma_qp + gamma_purcell + gamma_rad)
    return CoherenceBudget(gamma_qp=gamma_qp, gamma_purcell=gamma_purcell,
                           gamma_rad=gamma_rad, t1=t1, gamma_phi=0.0,
                           t2_limit=2.0 * t1)


def shot_noise_dephasing(n_th: float, chi: float, kappa_c: float,
                         t1: float | None = None) -> tuple[float, float | None]:
    """Pure dephasing from thermal photon-number fluctuations.

    Gaussian-adiabatic expression
    Gamma_phi = (kappa/2) Re[sqrt((1 + 2i chi/kappa)^2 + 8i chi n_th/kappa) - 1].
    Returns (Gamma_phi, t2_limit); the T2 limit 1/(1/(2 T1) + Gamma_phi)
    is None when no T1 is supplied.
    """
    if n_th < 0:
        raise ValueError("thermal occupation must be >= 0")
    z = (1.0 + 2j * chi / kappa_c) ** 2 + 8j * chi * n_th / kappa_c
    gamma_phi = 0.5 * kappa_c * float(np.real(np.sqrt(z) - 1.0))
    gamma_phi = max(0.0, gamma_phi)
    if t1 is None:
        return gamma_phi, None
    return gamma_phi, 1.0 / (0.5 / t1 + gamma_phi)


def coherence_budget(p: DeviceParams, t_qubit: float, t_cavity: float,
                     x_neq: float = 1.0e-7,
                     model: T1Model | None = None) -> CoherenceBudget:
    """Full T1 decomposition plus the shot-noise-dephasing T2 limit."""
    base = t1_budget(p, t_qubit, t_cavity, x_neq, model)
    n_th = bose_occupation(t_cavity, p.omega_c)
    gamma_phi, t2 = shot_noise_dephasing(n_th, p.chi, p.kappa_c, t1=base.t1)
    return CoherenceBudget(gamma_qp=base.gamma_qp,
                           gamma_purcell=base.gamma_purcell,
                           gamma_rad=base.gamma_rad, t1=base.t1,
                           gamma_phi=gamma_phi, t2_limit=t2)


# ---------------------------------------------------------------------------
# thermal model and fidelity/QND predictions vs optical power

@dataclass(frozen=True)
class PowerLaw:
    """T(P) = smooth-floor(t0, coeff * P^exponent)."""

    t0: float = 0.075
    coeff: float = 40.0
    exponent: float = 0.54

    def __call__(self, p_avg: float) -> float:
        return temp_power_law(p_avg, self.t0, self.coeff, self.exponent)


@dataclass(frozen=True)
class ThermalModel:
    """Per-component heating laws under the time-averaged optical power."""

    mxc: PowerLaw = field(default_factory=lambda: PowerLaw(t0=0.007))
    eo: PowerLaw = field(default_factory=PowerLaw)
    cavity: PowerLaw = field(default_factory=lambda: PowerLaw(coeff=8.0))
    qubit: PowerLaw = field(default_factory=lambda: PowerLaw(coeff=8.0))

    def at_power(self, p_avg: float) -> "ThermalPoint":
        return ThermalPoint(p_opt=p_avg, t_mxc=self.mxc(p_avg),
                            t_eo=self.eo(p_avg), t_cavity=self.cavity(p_avg),
                            t_qubit=self.qubit(p_avg))


@dataclass(frozen=True)
class ThermalPoint:
    """Component temperatures at one average optical power."""

    p_opt: float
    t_mxc: float
    t_eo: float
    t_cavity: float
    t_qubit: float

    def __post_init__(self):
        for name in ("t_mxc", "t_eo", "t_cavity", "t_qubit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class BudgetPoint:
    """One row of a repetition-rate sweep."""

    rep_rate: float
    p_avg: float
    thermal: ThermalPoint
    budget: CoherenceBudget
    thermal_excitation: float
    fidelity: float
    qnd: float


def predict_fidelity_vs_power(rep_rates, p: DeviceParams,
                              thermal: ThermalModel | None = None,
                              t1_model: T1Model | None = None, *,
                              pulse_energy: float = 0.14 * 2e-6,
                              decay_window: float = 1.8e-6,
                              qnd_gap: float = 2.0e-6,
                              residual: float = 0.01,
                              x_neq: float = 1.0e-7,
                              thermal_excitation: float | None = None) -> list[BudgetPoint]:
    """Predicted assignment fidelity and QND metric vs pulse repetition rate.

    For each rate the average power pulse_energy * rate sets the component
    temperatures, which set the thermal excitation and the T1 budget; the
    fidelity loses the thermal ground-state error, the decay probability
    over ``decay_window`` and a fitted residual; the QND metric loses the
    decay over ``qnd_gap`` and the thermal excitation.
    """
    if thermal is None:
        thermal = ThermalModel()
    if t1_model is None:
        t1_model = T1Model.calibrated(p, x_neq=x_neq)
    points = []
    for rate in np.atleast_1d(np.asarray(rep_rates, dtype=float)):
        if rate < 0:
            raise ValueError("repetition rates must be >= 0")
        p_avg = pulse_energy * rate
        tp = thermal.at_power(p_avg)
        budget = coherence_budget(p, tp.t_qubit, tp.t_cavity, x_neq, t1_model)
        p_th = (excited_state_population(tp.t_qubit, p.omega_q)
                if thermal_excitation is None else thermal_excitation)
        eps_g = p_th
        eps_e = 1.0 - math.exp(-decay_window / budget.t1)
        fidelity = 1.0 - 0.5 * (eps_g + eps_e) - residual
        qnd = 0.5 * ((1.0 - p_th) + math.exp(-qnd_gap / budget.t1))
        points.append(BudgetPoint(rep_rate=float(rate), p_avg=p_avg, thermal=tp,
                                  budget=budget, thermal_excitation=p_th,
                                  fidelity=fidelity, qnd=qnd))
    return points
