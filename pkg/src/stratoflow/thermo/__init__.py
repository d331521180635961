"""Constitutive framework: equation of state, entropy, transport laws."""

from .eos import (
    EquationOfState,
    ThermoState,
    entropy,
    ideal_monoatomic,
    internal_energy,
    load_structural_table,
    pressure,
    tabulated,
    thermo_partials,
    third_law_compliant,
)
from .transport import TransportCoefficients, heat_flux, stress_tensor
from .validate import CheckResult, ValidationReport, validate_structural

__all__ = [
    "EquationOfState",
    "ThermoState",
    "TransportCoefficients",
    "CheckResult",
    "ValidationReport",
    "entropy",
    "heat_flux",
    "ideal_monoatomic",
    "internal_energy",
    "load_structural_table",
    "pressure",
    "stress_tensor",
    "tabulated",
    "thermo_partials",
    "third_law_compliant",
    "validate_structural",
]
