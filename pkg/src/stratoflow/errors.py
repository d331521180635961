"""Exception types shared across the package."""


class StratoflowError(Exception):
    """Base class for all package errors."""


class DomainError(StratoflowError):
    """A thermodynamic state left the admissible domain (rho > 0, theta > 0)."""


class ThermodynamicStabilityError(StratoflowError):
    """Thermodynamic stability violated; names the failing inequality."""

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        msg = f"thermodynamic stability violated: {inequality}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class StratificationCollapseError(StratoflowError):
    """The hydrostatic density hit zero (or stability failed) below the top plate."""

    def __init__(self, height: float, reason: str):
        self.height = height
        self.reason = reason
        super().__init__(f"stratification collapse at x3 = {height:.6g}: {reason}")


class CFLViolationError(StratoflowError):
    """Requested advective step exceeds the stability limit."""

    def __init__(self, dt: float, dt_admissible: float):
        self.dt = dt
        self.dt_admissible = dt_admissible
        super().__init__(
            f"dt = {dt:.6g} exceeds admissible advective step {dt_admissible:.6g}"
        )


class PicardConvergenceError(StratoflowError):
    """Fixed-point iteration failed to reach tolerance."""

    def __init__(self, residuals, tol: float):
        self.residuals = list(residuals)
        self.tol = tol
        super().__init__(
            f"Picard iteration did not reach tol={tol:.3g} after "
            f"{len(self.residuals)} iterations; residual history: "
            + ", ".join(f"{r:.3e}" for r in self.residuals)
        )


class ConfigError(StratoflowError):
    """Configuration file invalid; collects every problem, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


class SnapshotFormatError(StratoflowError):
    """Snapshot container malformed; reports the offending byte offset."""

    def __init__(self, offset: int, detail: str):
        self.offset = offset
        super().__init__(f"malformed snapshot at byte {offset}: {detail}")


class InvariantViolationError(StratoflowError):
    """A runtime solver invariant was breached (NaN fields, boundary leakage, ...)."""
