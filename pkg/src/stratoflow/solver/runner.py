"""Run loop: advance a state to t_final, emitting snapshots and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InvariantViolationError
from .diagnostics import CSV_HEADER, DiagnosticsRecord, diagnostics
from .grid import LayeredGrid
from .stepping import LayeredState, SolverConfig, picard_solve, step, validate_state

__all__ = ["RunResult", "run"]

_WALL_TOL = 0.0  # walls are pinned exactly by construction


@dataclass
class RunResult:
    """Trajectory handle: final state, diagnostics series, emitted snapshot paths."""

    final_state: LayeredState
    records: list[DiagnosticsRecord]
    snapshot_paths: list[Path] = field(default_factory=list)
    diagnostics_path: Path | None = None
    n_steps: int = 0


def run(
    grid: LayeredGrid,
    initial: LayeredState,
    config: SolverConfig,
    *,
    output_dir: str | Path | None = None,
    snapshot_every: int = 0,
    diagnostics_every: int = 1,
    on_step=None,
) -> RunResult:
    """Advance ``initial`` to ``config.t_final``.

    snapshot_every / diagnostics_every are step cadences (0 disables file
    snapshots; the initial and final snapshots are always written when an
    output directory is given).  Diagnostics rows are flushed as they are
    produced so partial output survives a failure.  The loop is deterministic:
    a restart from any emitted snapshot under the same config reproduces the
    continuation that a fresh run from that snapshot would produce.
    """
    from ..snapshots import write_snapshot  # local import to avoid a cycle

    validate_state(grid, initial, tol=_WALL_TOL)
    state = initial.copy()
    records: list[DiagnosticsRecord] = []
    result = RunResult(final_state=state, records=records)

    out_dir = None
    diag_file = None
    if output_dir is not None:
        out_dir = Path(output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        result.diagnostics_path = out_dir / "diagnostics.csv"
        diag_file = open(result.diagnostics_path, "w")
        diag_file.write(CSV_HEADER + "\n")

    def emit_diag(s: LayeredState):
        rec = diagnostics(grid, s, config.r_profile)
        records.append(rec)
        if diag_file is not None:
            diag_file.write(rec.csv_row() + "\n")
            diag_file.flush()
        return rec

    def emit_snapshot(s: LayeredState, index: int):
        if out_dir is None:
            return
        path = out_dir / f"snapshot_{index:06d}.bin"
        write_snapshot(path, grid, s)
        result.snapshot_paths.append(path)

    try:
        emit_diag(state)
        emit_snapshot(state, 0)
        n = 0
        t_end = config.t_final
        while state.t < t_end - 1e-14:
            remaining = t_end - state.t
            if config.mode == "picard":
                dt = min(config.dt_max, remaining)
                state = picard_solve(grid, state, dt, config)
            else:
                state = step(grid, state, config, dt=None, dt_cap=remaining)
            n += 1
            if not np.all(np.isfinite(state.omega)):
                raise InvariantViolationError(f"non-finite vorticity at step {n}")
            if diagnostics_every and n % diagnostics_every == 0:
                emit_diag(state)
            if snapshot_every and n % snapshot_every == 0:
                emit_snapshot(state, n)
            if on_step is not None:
                on_step(state)
        if records and records[-1].t != state.t:
            emit_diag(state)
        if out_dir is not None and (not result.snapshot_paths or result.snapshot_paths[-1].stem != f"snapshot_{n:06d}"):
            emit_snapshot(state, n)
        result.final_state = state
        result.n_steps = n
        return result
    finally:
        if diag_file is not None:
            diag_file.close()
