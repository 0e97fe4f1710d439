"""Desk-scale simulator and analysis toolkit for dispersive qubit readout
through a triply resonant electro-optic transceiver.

The package covers the full chain: mean-field dynamics of the cascaded
readout-cavity / transducer system for three readout schemes, synthesis
of noisy single-shot heterodyne records, matched-filter discrimination
with double-Gaussian fits and fidelity/QND statistics, and the scalar
thermal/coherence/efficiency budget models.
"""

from ._kernels import BACKEND, COMPILED_AVAILABLE
from .budget import (CoherenceBudget, T1Model, ThermalModel, ThermalPoint,
                     bose_occupation, coherence_budget, conversion_efficiency,
                     cooperativity, cooperativity_to_g,
                     excited_state_population, invert_bose_temperature,
                     predict_fidelity_vs_power, qp_density_equilibrium,
                     shot_noise_dephasing, t1_budget, temp_power_law)
from .detection import (DoubleGaussianFit, FidelityReport, QNDReport,
                        REFERENCE_OPERATING_POINTS, ShotRecord, ShotSet,
                        WeightFunction, assignment_fidelity,
                        calibrate_shot_config, fit_double_gaussian,
                        integrate_shot, qnd_metric, quantum_efficiency,
                        simulate_qnd_experiment, simulate_shots,
                        weight_function)
from .fitters import RamseyFit, T1Fit, fit_ramsey, fit_t1
from .integrator import (PumpTrajectory, Trajectory, integrate,
                         pump_trajectory, suggested_dt)
from .params import (EXCITED, GROUND, DeviceParams, DerivedQuantities,
                     QubitState, derived_quantities, load_config,
                     reference_params, save_config)
from .pulses import PulseEnvelope
from .scenarios import ScenarioResult, readout_scenario
from .steady import (TransferFunction, conversion_transfer, propagate_exact,
                     reflection_spectrum, steady_state)
from .system import SCHEMES, LinearSystem, ModeVector, build_system

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "COMPILED_AVAILABLE", "__version__",
    # core
    "DeviceParams", "DerivedQuantities", "QubitState", "GROUND", "EXCITED",
    "PulseEnvelope", "load_config", "save_config", "derived_quantities",
    "reference_params",
    # dynamics
    "SCHEMES", "LinearSystem", "ModeVector", "build_system", "Trajectory",
    "PumpTrajectory", "integrate", "pump_trajectory", "suggested_dt",
    "steady_state", "propagate_exact", "reflection_spectrum",
    "conversion_transfer", "TransferFunction", "ScenarioResult",
    "readout_scenario",
    # detection
    "ShotRecord", "ShotSet", "WeightFunction", "weight_function",
    "simulate_shots", "integrate_shot", "DoubleGaussianFit",
    "fit_double_gaussian", "FidelityReport", "assignment_fidelity",
    "QNDReport", "qnd_metric", "simulate_qnd_experiment",
    "quantum_efficiency", "REFERENCE_OPERATING_POINTS",
    "calibrate_shot_config", "T1Fit", "RamseyFit", "fit_t1", "fit_ramsey",
    # budget
    "bose_occupation", "invert_bose_temperature", "excited_state_population",
    "temp_power_law", "qp_density_equilibrium", "shot_noise_dephasing",
    "cooperativity", "cooperativity_to_g", "conversion_efficiency",
    "T1Model", "ThermalModel", "ThermalPoint", "CoherenceBudget",
    "t1_budget", "coherence_budget", "predict_fidelity_vs_power",
]
