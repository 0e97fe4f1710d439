"""Device parameters, qubit-state convention, config I/O and derived quantities.

All frequencies, rates, couplings and detunings are stored internally as
angular quantities (rad/s).  Config files quote the linear values
(omega/2pi) in the unit named by each key suffix, mirroring how such
device tables are usually published.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, fields, replace

from .constants import MICRO_EV, TWO_PI
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = [
    "DeviceParams",
    "DerivedQuantities",
    "QubitState",
    "GROUND",
    "EXCITED",
    "load_config",
    "save_config",
    "derived_quantities",
    "reference_params",
]


@dataclass(frozen=True)
class QubitState:
    """Discrete qubit label with the fixed sigma_z convention.

    ``|e>`` has ``sigma_z = -1`` and leaves the readout cavity at its bare
    frequency (zero detuning); ``|g>`` has ``sigma_z = +1`` and detunes the
    cavity by the full ground-state shift chi0.
    """

    label: str

    def __post_init__(self):
        if self.label not in ("g", "e"):
            raise ValueError(f"qubit state label must be 'g' or 'e', got {self.label!r}")

    @property
    def sigma_z(self) -> int:
        return +1 if self.label == "g" else -1

    def cavity_detuning(self, p: "DeviceParams") -> float:
        """Readout-cavity detuning (rad/s) of this branch: chi0/2 * (sigma_z + 1)."""
        return 0.5 * p.chi0 * (self.sigma_z + 1)

    @classmethod
    def from_label(cls, label: str) -> "QubitState":
        return cls(label)


GROUND = QubitState("g")
EXCITED = QubitState("e")


@dataclass(frozen=True)
class DeviceParams:
    """All physical rates, frequencies and couplings of the cQED + EO chain.

    Immutable after construction and safe to share between workers.  Angular
    units (rad/s) throughout; energies in joules; times in seconds;
    efficiencies dimensionless.
    """

    # qubit
    omega_q: float
    nu: float
    g_qc: float
    chi: float
    chi0: float
    # readout (cQED) cavity
    omega_c: float
    kappa_c: float
    kappa_c_ext: float
    # EO microwave cavity
    omega_e: float
    kappa_e: float
    kappa_e_ext: float
    # optical (anti-Stokes) mode
    omega_o: float
    kappa_o: float
    kappa_o_ext: float
    delta_o: float = 0.0
    # Stokes mode
    kappa_s: float = TWO_PI * 81e6
    delta_s: float = 0.0
    # TM mode
    kappa_tm: float = TWO_PI * 81e6
    delta_tm: float = 0.0
    J: float = 0.0
    # optical pump mode
    kappa_p: float = TWO_PI * 81e6
    delta_p: float = 0.0
    eta_p: float = 44.0 / 81.0
    g0: float = TWO_PI * 30.0
    # cable link between the two microwave cavities
    eta_ec: float = 1.0
    eta_ce: float = 1.0
    tau: float = 0.0
    # material / reference quantities
    gap: float = 205.0 * MICRO_EV
    t1_ref: float = 40e-6
    t2_ref: float = 1.5e-6

    def __post_init__(self):
        _validate(self)

    # -- derived coupling efficiencies ------------------------------------
    @property
    def eta_c(self) -> float:
        return self.kappa_c_ext / self.kappa_c

    @property
    def eta_e(self) -> float:
        return self.kappa_e_ext / self.kappa_e

    @property
    def eta_o(self) -> float:
        return self.kappa_o_ext / self.kappa_o

    @property
    def config_hash(self) -> str:
        """Short stable hash of the full parameter set, stamped on all outputs."""
        blob = json.dumps(to_config_dict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def with_updates(self, **kwargs) -> "DeviceParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class DerivedQuantities:
    """Coupling efficiencies and the microwave reflectivity of the converter."""

    eta_c: float
    eta_e: float
    eta_o: float
    mw_reflectivity: float
    cooperativity: float


def derived_quantities(p: DeviceParams, g: float = 0.0) -> DerivedQuantities:
    """Efficiencies, converter reflectivity (1 - 2 eta_e)^2 and cooperativity.

    The cooperativity slot is 0 unless a pump-enhanced coupling ``g`` is
    supplied (it needs a pump strength, not just device rates).
    """
    return DerivedQuantities(
        eta_c=p.eta_c,
        eta_e=p.eta_e,
        eta_o=p.eta_o,
        mw_reflectivity=(1.0 - 2.0 * p.eta_e) ** 2,
        cooperativity=4.0 * g * g / (p.kappa_e * p.kappa_o),
    )


# ---------------------------------------------------------------------------
# validation

_POSITIVE = ("omega_q", "omega_c", "omega_e", "omega_o",
             "kappa_c", "kappa_e", "kappa_o", "kappa_s", "kappa_tm", "kappa_p",
             "gap", "t1_ref", "t2_ref")
_NONNEGATIVE = ("nu", "g_qc", "chi", "chi0", "J", "g0", "tau",
                "kappa_c_ext", "kappa_e_ext", "kappa_o_ext")
_UNIT_INTERVAL = ("eta_ec", "eta_ce", "eta_p")
_EXT_PAIRS = (("kappa_c_ext", "kappa_c"), ("kappa_e_ext", "kappa_e"),
              ("kappa_o_ext", "kappa_o"))


def _validate(p: DeviceParams) -> None:
    for name in _POSITIVE:
        v = getattr(p, name)
        if not (math.isfinite(v) and v > 0):
            raise ConfigError(f"must be finite and > 0, got {v!r}", field=name)
    for name in _NONNEGATIVE:
        v = getattr(p, name)
        if not (math.isfinite(v) and v >= 0):
            raise ConfigError(f"must be finite and >= 0, got {v!r}", field=name)
    for name in _UNIT_INTERVAL:
        v = getattr(p, name)
        if not (0.0 <= v <= 1.0):
            raise ConfigError(f"must lie in [0, 1], got {v!r}", field=name)
    for ext, tot in _EXT_PAIRS:
        if getattr(p, ext) > getattr(p, tot):
            raise ConfigError(
                f"external rate exceeds total rate {tot} = {getattr(p, tot):.6g}",
                field=ext)


# ---------------------------------------------------------------------------
# config file schema
#
# (section, key, attribute, multiplier to rad/s or SI)

_GHZ = TWO_PI * 1e9
_MHZ = TWO_PI * 1e6
_HZ = TWO_PI
_THZ = TWO_PI * 1e12

_SCHEMA = [
    ("qubit", "omega_q_ghz", "omega_q", _GHZ),
    ("qubit", "anharmonicity_mhz", "nu", _MHZ),
    ("qubit", "coupling_g_qc_mhz", "g_qc", _MHZ),
    ("qubit", "dispersive_shift_chi_mhz", "chi", _MHZ),
    ("qubit", "lamb_shift_chi0_mhz", "chi0", _MHZ),
    ("qubit", "t1_ref_us", "t1_ref", 1e-6),
    ("qubit", "t2_ref_us", "t2_ref", 1e-6),
    ("qubit", "gap_uev", "gap", MICRO_EV),
    ("cqed_cavity", "omega_c_ghz", "omega_c", _GHZ),
    ("cqed_cavity", "kappa_c_mhz", "kappa_c", _MHZ),
    ("cqed_cavity", "kappa_c_ext_mhz", "kappa_c_ext", _MHZ),
    ("eo_microwave_cavity", "omega_e_ghz", "omega_e", _GHZ),
    ("eo_microwave_cavity", "kappa_e_mhz", "kappa_e", _MHZ),
    ("eo_microwave_cavity", "kappa_e_ext_mhz", "kappa_e_ext", _MHZ),
    ("optical_mode", "omega_o_thz", "omega_o", _THZ),
    ("optical_mode", "kappa_o_mhz", "kappa_o", _MHZ),
    ("optical_mode", "kappa_o_ext_mhz", "kappa_o_ext", _MHZ),
    ("optical_mode", "detuning_o_mhz", "delta_o", _MHZ),
    ("stokes_mode", "kappa_s_mhz", "kappa_s", _MHZ),
    ("stokes_mode", "detuning_s_mhz", "delta_s", _MHZ),
    ("tm_mode", "kappa_tm_mhz", "kappa_tm", _MHZ),
    ("tm_mode", "detuning_tm_mhz", "delta_tm", _MHZ),
    ("tm_mode", "coupling_j_mhz", "J", _MHZ),
    ("pump", "kappa_p_mhz", "kappa_p", _MHZ),
    ("pump", "detuning_p_mhz", "delta_p", _MHZ),
    ("pump", "eta_p", "eta_p", 1.0),
    ("pump", "g0_hz", "g0", _HZ),
    ("link", "eta_ec", "eta_ec", 1.0),
    ("link", "eta_ce", "eta_ce", 1.0),
    ("link", "tau_ns", "tau", 1e-9),
]

# keys that must be present in every config file; the rest fall back to
# the dataclass defaults
_MANDATORY = {
    ("qubit", "omega_q_ghz"),
    ("qubit", "anharmonicity_mhz"),
    ("qubit", "coupling_g_qc_mhz"),
    ("qubit", "dispersive_shift_chi_mhz"),
    ("qubit", "lamb_shift_chi0_mhz"),
    ("cqed_cavity", "omega_c_ghz"),
    ("cqed_cavity", "kappa_c_mhz"),
    ("cqed_cavity", "kappa_c_ext_mhz"),
    ("eo_microwave_cavity", "omega_e_ghz"),
    ("eo_microwave_cavity", "kappa_e_mhz"),
    ("eo_microwave_cavity", "kappa_e_ext_mhz"),
    ("optical_mode", "omega_o_thz"),
    ("optical_mode", "kappa_o_mhz"),
    ("optical_mode", "kappa_o_ext_mhz"),
}


def from_config_dict(doc: dict) -> DeviceParams:
    """Build validated DeviceParams from a parsed config mapping."""
    kwargs = {}
    known = {f.name for f in fields(DeviceParams)}
    for section, key, attr, mult in _SCHEMA:
        table = doc.get(section, {})
        if not isinstance(table, dict):
            raise ConfigError("expected a table", field=section)
        if key in table:
            value = table[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"expected a number, got {value!r}",
                                  field=f"{section}.{key}")
            kwargs[attr] = float(value) * mult
        elif (section, key) in _MANDATORY:
            raise ConfigError("mandatory key missing", field=f"{section}.{key}")
    # reject unknown keys early: typos silently falling back to defaults
    # are the usual way wrong parameters sneak into a sweep
    schema_keys = {(s, k) for s, k, _, _ in _SCHEMA}
    for section, table in doc.items():
        if not isinstance(table, dict):
            raise ConfigError("top-level keys must be tables", field=str(section))
        for key in table:
            if (section, key) not in schema_keys:
                raise ConfigError("unknown key", field=f"{section}.{key}")
    assert set(kwargs) <= known
    return DeviceParams(**kwargs)


def to_config_dict(p: DeviceParams) -> dict:
    """Inverse of :func:`from_config_dict` (exact round trip)."""
    doc: dict = {}
    for section, key, attr, mult in _SCHEMA:
        doc.setdefault(section, {})[key] = getattr(p, attr) / mult
    return doc


def load_config(path) -> DeviceParams:
    """Load and validate a TOML device config.

    Raises ConfigError naming the offending field on parse failures,
    missing mandatory keys, unknown keys, or invariant violations.
    """
    try:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config parse failure: {exc}")
    return from_config_dict(doc)


def save_config(p: DeviceParams, path) -> None:
    """Write the TOML representation (round-trips through load_config)."""
    doc = to_config_dict(p)
    lines = ["# eoreadout device configuration",
             "# frequencies/rates are linear (omega/2pi) values in the unit"
             " named by each key; times in ns/us; energies in ueV", ""]
    for section, table in doc.items():
        lines.append(f"[{section}]")
        for key, value in table.items():
            lines.append(f"{key} = {value!r}")
        lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))


def reference_params() -> DeviceParams:
    """The packaged reference-device parameter set."""
    from importlib.resources import files

    ref = files("eoreadout.data").joinpath("reference_device.toml")
    doc = _toml.loads(ref.read_text(encoding="utf-8"))
    return from_config_dict(doc)
