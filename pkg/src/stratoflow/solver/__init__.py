"""Layered vorticity solver on the torus-times-interval domain."""

from .diagnostics import CSV_HEADER, DiagnosticsRecord, diagnostics, velocity_gradient_sup
from .grid import LayeredGrid
from .runner import RunResult, run
from .spectral import biot_savart_layer, curl_h, div_h, grad_h
from .stepping import (
    LayeredState,
    SolverConfig,
    advect_diffuse_step,
    apply_cutoff,
    cfl_limit,
    default_cutoff_level,
    mean_flow_step,
    picard_solve,
    step,
    total_velocity,
    validate_state,
)

__all__ = [
    "CSV_HEADER",
    "DiagnosticsRecord",
    "LayeredGrid",
    "LayeredState",
    "RunResult",
    "SolverConfig",
    "advect_diffuse_step",
    "apply_cutoff",
    "biot_savart_layer",
    "cfl_limit",
    "curl_h",
    "default_cutoff_level",
    "diagnostics",
    "div_h",
    "grad_h",
    "mean_flow_step",
    "picard_solve",
    "run",
    "step",
    "total_velocity",
    "validate_state",
    "velocity_gradient_sup",
]
