"""Command-line surface.

Subcommands:
    run             advance a configured flow and persist snapshots/diagnostics
    validate-eos    print the structural validation report for a preset
    static-profile  print or save the hydrostatic (x3, r) table
    rel-energy      weighted relative energy between two snapshots
    stability-gap   twin-trajectory distance with its exponential envelope
    info            package and configuration summary

Usage errors exit with 2; runtime invariant violations exit with 1 and point
at the partial diagnostics; success exits 0.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .config import (
    OUTPUT_ENV_VAR,
    load_config,
    resolve_config,
    write_config_echo,
)
from .energy import CompressibleState, ReferenceTriple, rel_energy_total, stability_gap
from .errors import ConfigError, StratoflowError
from .hydrostatic import balance_residual
from .initial import build_initial, random_bandlimited
from .snapshots import read_snapshot
from .solver.runner import run as run_solver
from .solver.stepping import LayeredState, total_velocity
from .thermo.eos import ideal_monoatomic, third_law_compliant
from .thermo.validate import validate_structural

__all__ = ["cli_main", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratoflow",
        description="Layered stratified-flow solver with thermodynamic diagnostics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance a configured flow")
    p_run.add_argument("--config", required=True, help="TOML configuration file")
    p_run.add_argument("--output", default=None, help=f"output dir (default: config, then ${OUTPUT_ENV_VAR})")
    p_run.add_argument("--seed", type=int, default=None, help="override ic.seed")
    p_run.add_argument("--threads", type=int, default=1, help="worker threads (results are thread-count independent)")
    p_run.add_argument("--snapshot-every", type=int, default=None, help="override output.snapshot_every")
    p_run.add_argument("--quiet", action="store_true")

    p_eos = sub.add_parser("validate-eos", help="structural validation report")
    p_eos.add_argument("--preset", choices=["ideal", "ideal-monoatomic", "third-law", "third-law-compliant"])
    p_eos.add_argument("--config", default=None)
    p_eos.add_argument("--z-max", type=float, default=1e6)
    p_eos.add_argument("--samples", type=int, default=400)

    p_prof = sub.add_parser("static-profile", help="hydrostatic density table")
    p_prof.add_argument("--config", required=True)
    p_prof.add_argument("--output", default=None, help="write the table here instead of stdout")

    p_rel = sub.add_parser("rel-energy", help="relative energy between two snapshots")
    p_rel.add_argument("--config", required=True)
    p_rel.add_argument("--state", required=True, help="snapshot of the state")
    p_rel.add_argument("--reference", required=True, help="snapshot of the reference")

    p_gap = sub.add_parser("stability-gap", help="twin-trajectory continuous dependence")
    p_gap.add_argument("--config", required=True)
    p_gap.add_argument("--output", default=None)
    p_gap.add_argument("--quiet", action="store_true")

    p_info = sub.add_parser("info", help="package / configuration summary")
    p_info.add_argument("--config", default=None)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, ic=dataclasses.replace(cfg.ic, seed=args.seed))
    if args.snapshot_every is not None:
        cfg = dataclasses.replace(
            cfg, output=dataclasses.replace(cfg.output, snapshot_every=args.snapshot_every)
        )
    setup = resolve_config(cfg, output_override=args.output)
    out_dir = setup.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg_echo = dataclasses.replace(
        cfg, output=dataclasses.replace(cfg.output, directory=str(out_dir))
    )
    echo_path = write_config_echo(cfg_echo, out_dir)
    initial = build_initial(
        setup.grid, cfg.ic.preset, seed=cfg.ic.seed, kmax=cfg.ic.kmax, amplitude=cfg.ic.amplitude
    )
    try:
        result = run_solver(
            setup.grid,
            initial,
            setup.solver,
            output_dir=out_dir,
            snapshot_every=cfg_echo.output.snapshot_every,
            diagnostics_every=cfg_echo.output.diagnostics_every or 1,
        )
    except StratoflowError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        print(f"partial diagnostics: {out_dir / 'diagnostics.csv'}", file=sys.stderr)
        return 1
    if not args.quiet:
        last = result.records[-1]
        print(f"run complete: t = {last.t:.6g}, {result.n_steps} steps")
        print(f"  energy {last.energy:.6e}, enstrophy {last.enstrophy:.6e}, "
              f"max|omega| {last.max_vorticity:.6e}")
        print(f"  outputs in {out_dir} (config echo: {echo_path.name})")
    return 0


def _cmd_validate_eos(args) -> int:
    if args.config:
        setup = resolve_config(load_config(args.config))
        eos = setup.eos
    elif args.preset in ("ideal", "ideal-monoatomic"):
        eos = ideal_monoatomic()
    elif args.preset in ("third-law", "third-law-compliant"):
        eos = third_law_compliant()
    else:
        print("validate-eos: need --preset or --config", file=sys.stderr)
        return 2
    report = validate_structural(eos, z_max=args.z_max, n_samples=args.samples)
    print(report)
    return 0


def _cmd_static_profile(args) -> int:
    cfg = load_config(args.config)
    setup = resolve_config(cfg)
    profile = setup.profile
    res = balance_residual(setup.eos, profile)
    if args.output:
        profile.save_table(args.output)
        print(f"wrote {args.output} (balance residual: max {res.max:.3e}, l2 {res.l2:.3e})")
    else:
        for x, r in zip(profile.grid_x3, profile.r):
            print(f"{x:.17g} {r:.17g}")
        print(f"# balance residual: max {res.max:.3e}, l2 {res.l2:.3e}", file=sys.stderr)
    return 0


def _snapshot_to_compressible(setup, path, epsilon):
    grid_s, state = read_snapshot(path)
    if (grid_s.n1, grid_s.n2, grid_s.n3) != (setup.grid.n1, setup.grid.n2, setup.grid.n3):
        raise ConfigError([f"snapshot {path} grid does not match the configuration"])
    u_h = total_velocity(setup.grid, state)
    u = np.concatenate([u_h, np.zeros((1,) + setup.grid.shape)])
    rho = np.broadcast_to(setup.profile.r[:, None, None], setup.grid.shape).copy()
    theta = np.full(setup.grid.shape, setup.config.profile.Theta)
    return CompressibleState(rho=rho, theta=theta, u=u, epsilon=epsilon), u


def _cmd_rel_energy(args) -> int:
    cfg = load_config(args.config)
    setup = resolve_config(cfg)
    for eps in cfg.experiment.epsilons:
        state, _ = _snapshot_to_compressible(setup, args.state, eps)
        _, u_ref = _snapshot_to_compressible(setup, args.reference, eps)
        ref = ReferenceTriple(
            r_tilde=state.rho, theta_tilde=state.theta, u_tilde=u_ref
        )
        total = rel_energy_total(setup.eos, state, ref, setup.grid)
        print(f"epsilon = {eps:g}: relative energy = {total:.17g}")
    return 0


def _cmd_stability_gap(args) -> int:
    cfg = load_config(args.config)
    setup = resolve_config(cfg, output_override=args.output)
    out_dir = setup.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    base = build_initial(
        setup.grid, cfg.ic.preset, seed=cfg.ic.seed, kmax=cfg.ic.kmax, amplitude=cfg.ic.amplitude
    )
    bump = random_bandlimited(
        setup.grid,
        seed=cfg.experiment.perturbation_seed,
        kmax=cfg.ic.kmax,
        amplitude=cfg.experiment.perturbation_amplitude,
    )
    twin = LayeredState(t=0.0, omega=base.omega + bump.omega, u_mean=base.u_mean.copy())
    series = stability_gap(setup.grid, base, twin, setup.solver)
    csv_path = out_dir / "stability_gap.csv"
    series.write_csv(csv_path)
    if not args.quiet:
        print(f"stability gap over t in [0, {cfg.solver.t_final:g}]: "
              f"D(0) = {series.D[0]:.6e}, D(T) = {series.D[-1]:.6e}, fitted C = {series.C_fit:.6g}")
        print(f"wrote {csv_path}")
    return 0


def _cmd_info(args) -> int:
    print(f"stratoflow {__version__}")
    if args.config:
        cfg = load_config(args.config)
        g = cfg.grid
        print(f"  grid: {g.n1} x {g.n2} x {g.n3} (torus x interval)")
        print(f"  eos preset: {cfg.eos.preset}; ic preset: {cfg.ic.preset}")
        print(f"  solver: mode={cfg.solver.mode}, cfl={cfg.solver.cfl}, t_final={cfg.solver.t_final}")
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "run": _cmd_run,
        "validate-eos": _cmd_validate_eos,
        "static-profile": _cmd_static_profile,
        "rel-energy": _cmd_rel_energy,
        "stability-gap": _cmd_stability_gap,
        "info": _cmd_info,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except StratoflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
