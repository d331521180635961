"""Run configuration: TOML loading, validation, defaults, echo.

Every key is validated at load time and unknown keys are rejected with their
section-qualified name; problems are collected so one load reports the full
list, not just the first failure.  A run writes the fully resolved
configuration (defaults included) next to its outputs, and re-running from
that echo reproduces the results bit for bit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

from .errors import ConfigError
from .hydrostatic import StaticProfile, solve_static, viscosity_profile
from .solver.grid import LayeredGrid
from .solver.stepping import SolverConfig
from .thermo.eos import EquationOfState, ideal_monoatomic, load_structural_table, third_law_compliant
from .thermo.transport import TransportCoefficients

__all__ = ["RunConfig", "load_config", "resolve_config", "write_config_echo"]

OUTPUT_ENV_VAR = "STRATOFLOW_OUTPUT_DIR"

EOS_PRESETS = ("ideal-monoatomic", "third-law-compliant", "tabulated")
IC_PRESETS = ("taylor-green", "random-bandlimited", "shear-layer")
MODES = ("imex", "picard")


@dataclass(frozen=True)
class EosSection:
    preset: str = "ideal-monoatomic"
    p_inf: float = 1.0
    a: float = 0.0
    table: str = ""
    mu0: float = 1.0
    lambda0: float = 0.0
    kappa0: float = 1.0
    beta: float = 7.0


@dataclass(frozen=True)
class ProfileSection:
    g: float = 1.0
    Theta: float = 1.0
    r_bott: float = 1.0
    n_nodes: int = 0  # 0: follow the grid (n3 + 1 nodes)
    nu_table: str = ""  # optional direct nu(x3) override, two columns


@dataclass(frozen=True)
class GridSection:
    n1: int = 32
    n2: int = 32
    n3: int = 32


@dataclass(frozen=True)
class SolverSection:
    mode: str = "imex"
    cfl: float = 0.5
    dt_max: float = 0.05
    t_final: float = 1.0
    dealias: bool = True
    cutoff: float = 0.0  # 0: disabled
    picard_tol: float = 1e-10
    picard_max_iter: int = 50


@dataclass(frozen=True)
class ICSection:
    preset: str = "taylor-green"
    seed: int = 0
    kmax: int = 4
    amplitude: float = 1.0


@dataclass(frozen=True)
class OutputSection:
    directory: str = ""
    snapshot_every: int = 0
    diagnostics_every: int = 1


@dataclass(frozen=True)
class ExperimentSection:
    epsilons: tuple = (1.0,)
    perturbation_amplitude: float = 1e-6
    perturbation_seed: int = 1


@dataclass(frozen=True)
class RunConfig:
    eos: EosSection = field(default_factory=EosSection)
    profile: ProfileSection = field(default_factory=ProfileSection)
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    ic: ICSection = field(default_factory=ICSection)
    output: OutputSection = field(default_factory=OutputSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)


_SECTIONS = {
    "eos": EosSection,
    "profile": ProfileSection,
    "grid": GridSection,
    "solver": SolverSection,
    "ic": ICSection,
    "output": OutputSection,
    "experiment": ExperimentSection,
}


def _coerce(section: str, key: str, raw, target_type, problems):
    where = f"{section}.{key}"
    if target_type is float:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            problems.append(f"{where}: expected a number, got {raw!r}")
            return None
        return float(raw)
    if target_type is int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            problems.append(f"{where}: expected an integer, got {raw!r}")
            return None
        return int(raw)
    if target_type is bool:
        if not isinstance(raw, bool):
            problems.append(f"{where}: expected a boolean, got {raw!r}")
            return None
        return raw
    if target_type is str:
        if not isinstance(raw, str):
            problems.append(f"{where}: expected a string, got {raw!r}")
            return None
        return raw
    if target_type is tuple:
        if not isinstance(raw, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
        ):
            problems.append(f"{where}: expected a list of numbers, got {raw!r}")
            return None
        return tuple(float(v) for v in raw)
    raise AssertionError(f"unhandled schema type {target_type}")


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _validate(cfg: RunConfig, problems: list):
    e, p, g, s, ic, out, ex = (
        cfg.eos, cfg.profile, cfg.grid, cfg.solver, cfg.ic, cfg.output, cfg.experiment,
    )
    if e.preset not in EOS_PRESETS:
        problems.append(f"eos.preset: {e.preset!r} not one of {EOS_PRESETS}")
    if e.preset == "tabulated" and not e.table:
        problems.append("eos.table: required for the tabulated preset")
    if e.p_inf <= 0:
        problems.append(f"eos.p_inf: must be positive, got {e.p_inf}")
    if e.a < 0:
        problems.append(f"eos.a: must be nonnegative, got {e.a}")
    if e.mu0 <= 0:
        problems.append(f"eos.mu0: must be positive, got {e.mu0}")
    if e.lambda0 < 0:
        problems.append(f"eos.lambda0: must be nonnegative, got {e.lambda0}")
    if e.kappa0 <= 0:
        problems.append(f"eos.kappa0: must be positive, got {e.kappa0}")
    if e.beta <= 6:
        problems.append(f"eos.beta: conductivity growth exponent must exceed 6, got {e.beta}")
    if p.g < 0:
        problems.append(f"profile.g: must be nonnegative, got {p.g}")
    if p.Theta <= 0:
        problems.append(f"profile.Theta: must be positive, got {p.Theta}")
    if p.r_bott <= 0:
        problems.append(f"profile.r_bott: must be positive, got {p.r_bott}")
    if p.n_nodes < 0 or p.n_nodes == 1:
        problems.append(f"profile.n_nodes: must be 0 (grid-matched) or >= 2, got {p.n_nodes}")
    for name, n in (("grid.n1", g.n1), ("grid.n2", g.n2)):
        if n < 8 or not _is_pow2(n):
            problems.append(f"{name}: must be a power of two >= 8, got {n}")
    if g.n3 < 2:
        problems.append(f"grid.n3: needs at least 2 vertical intervals, got {g.n3}")
    if s.mode not in MODES:
        problems.append(f"solver.mode: {s.mode!r} not one of {MODES}")
    if not (0 < s.cfl <= 1):
        problems.append(f"solver.cfl: must lie in (0, 1], got {s.cfl}")
    if s.dt_max <= 0:
        problems.append(f"solver.dt_max: must be positive, got {s.dt_max}")
    if s.t_final < 0:
        problems.append(f"solver.t_final: must be nonnegative, got {s.t_final}")
    if s.cutoff < 0:
        problems.append(f"solver.cutoff: must be nonnegative (0 disables), got {s.cutoff}")
    if s.picard_tol <= 0:
        problems.append(f"solver.picard_tol: must be positive, got {s.picard_tol}")
    if s.picard_max_iter < 1:
        problems.append(f"solver.picard_max_iter: must be >= 1, got {s.picard_max_iter}")
    if ic.preset not in IC_PRESETS:
        problems.append(f"ic.preset: {ic.preset!r} not one of {IC_PRESETS}")
    if ic.seed < 0:
        problems.append(f"ic.seed: must be nonnegative, got {ic.seed}")
    if ic.kmax < 1:
        problems.append(f"ic.kmax: must be >= 1, got {ic.kmax}")
    if not math.isfinite(ic.amplitude):
        problems.append(f"ic.amplitude: must be finite, got {ic.amplitude}")
    if out.snapshot_every < 0:
        problems.append(f"output.snapshot_every: must be >= 0, got {out.snapshot_every}")
    if out.diagnostics_every < 0:
        problems.append(f"output.diagnostics_every: must be >= 0, got {out.diagnostics_every}")
    if not ex.epsilons or any(v <= 0 for v in ex.epsilons):
        problems.append(f"experiment.epsilons: every entry must be positive, got {ex.epsilons}")
    if ex.perturbation_amplitude <= 0:
        problems.append(
            f"experiment.perturbation_amplitude: must be positive, got {ex.perturbation_amplitude}"
        )
    if ex.perturbation_seed < 0:
        problems.append(f"experiment.perturbation_seed: must be nonnegative, got {ex.perturbation_seed}")


def parse_config_text(text: str) -> RunConfig:
    """Parse and fully validate a TOML document; collects every problem."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError([f"TOML parse error: {exc}"])

    problems: list[str] = []
    kwargs = {}
    for section_name, raw in data.items():
        if section_name not in _SECTIONS:
            problems.append(f"unknown section [{section_name}]")
            continue
        if not isinstance(raw, dict):
            problems.append(f"[{section_name}] must be a table of keys, got {raw!r}")
            continue
        cls = _SECTIONS[section_name]
        known = {f.name: f.type for f in fields(cls)}
        types = {f.name: type(getattr(cls(), f.name)) for f in fields(cls)}
        sec_kwargs = {}
        for key, value in raw.items():
            if key not in known:
                problems.append(f"unknown key {section_name}.{key}")
                continue
            coerced = _coerce(section_name, key, value, types[key], problems)
            if coerced is not None:
                sec_kwargs[key] = coerced
        kwargs[section_name] = cls(**sec_kwargs)
    cfg = RunConfig(**kwargs)
    _validate(cfg, problems)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Load a config file; missing files raise ConfigError mentioning the path."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    return parse_config_text(path.read_text())


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, tuple):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_to_toml(cfg: RunConfig) -> str:
    lines = []
    for section_name, section in (
        ("eos", cfg.eos), ("profile", cfg.profile), ("grid", cfg.grid),
        ("solver", cfg.solver), ("ic", cfg.ic), ("output", cfg.output),
        ("experiment", cfg.experiment),
    ):
        lines.append(f"[{section_name}]")
        for f in fields(section):
            lines.append(f"{f.name} = {_toml_value(getattr(section, f.name))}")
        lines.append("")
    return "\n".join(lines)


def write_config_echo(cfg: RunConfig, directory: str | Path) -> Path:
    path = Path(directory) / "config.resolved.toml"
    path.write_text(config_to_toml(cfg))
    return path


@dataclass(frozen=True)
class ResolvedSetup:
    """Everything a run needs, built from a validated RunConfig."""

    config: RunConfig
    eos: EquationOfState
    transport: TransportCoefficients
    grid: LayeredGrid
    profile: StaticProfile
    solver: SolverConfig
    output_dir: Path


def _build_eos(cfg: RunConfig) -> EquationOfState:
    e = cfg.eos
    if e.preset == "ideal-monoatomic":
        return ideal_monoatomic(a=e.a)
    if e.preset == "third-law-compliant":
        return third_law_compliant(p_inf=e.p_inf, a=e.a)
    return load_structural_table(e.table, a=e.a)


def resolve_config(cfg: RunConfig, output_override: str | None = None) -> ResolvedSetup:
    """Instantiate eos, transport laws, grid, hydrostatic profile and solver
    parameters from a validated config."""
    eos = _build_eos(cfg)
    tc = TransportCoefficients.linear(
        mu0=cfg.eos.mu0, lam0=cfg.eos.lambda0, kappa0=cfg.eos.kappa0, beta=cfg.eos.beta
    )
    grid = LayeredGrid(n1=cfg.grid.n1, n2=cfg.grid.n2, n3=cfg.grid.n3)
    n_nodes = cfg.profile.n_nodes if cfg.profile.n_nodes else grid.n_layers
    profile = solve_static(
        eos, Theta=cfg.profile.Theta, g=cfg.profile.g, r_bott=cfg.profile.r_bott,
        n_nodes=n_nodes,
    )
    if profile.r.size != grid.n_layers:
        raise ConfigError(
            [f"profile.n_nodes = {n_nodes} does not match the grid's {grid.n_layers} nodes"]
        )
    if cfg.profile.nu_table:
        data = np.loadtxt(cfg.profile.nu_table, dtype=float, ndmin=2)
        if data.shape[1] != 2 or data.shape[0] != grid.n_layers:
            raise ConfigError(
                [f"profile.nu_table: expected {grid.n_layers} rows of (x3, nu)"]
            )
        nu = data[:, 1]
        if np.any(nu <= 0):
            raise ConfigError(["profile.nu_table: nu must be positive"])
    else:
        nu = viscosity_profile(profile, tc)
    mu_theta = float(tc.mu(cfg.profile.Theta))
    solver = SolverConfig(
        nu_profile=nu,
        r_profile=profile.r,
        mu_theta=mu_theta,
        t_final=cfg.solver.t_final,
        cfl=cfg.solver.cfl,
        dt_max=cfg.solver.dt_max,
        dealias=cfg.solver.dealias,
        mode=cfg.solver.mode,
        picard_tol=cfg.solver.picard_tol,
        picard_max_iter=cfg.solver.picard_max_iter,
        cutoff_level=cfg.solver.cutoff if cfg.solver.cutoff > 0 else None,
    )
    out_dir = output_override or cfg.output.directory or os.environ.get(OUTPUT_ENV_VAR, "out")
    return ResolvedSetup(
        config=cfg, eos=eos, transport=tc, grid=grid, profile=profile,
        solver=solver, output_dir=Path(out_dir),
    )
