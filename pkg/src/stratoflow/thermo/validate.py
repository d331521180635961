"""Structural validation of an equation of state.

Each hypothesis on the structural function P is checked on a sampled grid and
reported rather than enforced: a preset that fails (the plain ideal gas fails
the high-compression limit and the entropy decay, by design) is still usable
for flow runs whose states stay in a compact box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eos import EquationOfState

__all__ = ["CheckResult", "ValidationReport", "validate_structural"]

# asymptotic statements are tested at Z = z_max with this tolerance
LIMIT_RTOL = 1e-3
H_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    preset: str
    z_max: float
    n_samples: int
    checks: tuple[CheckResult, ...]
    empirical_c_bound: float = field(default=float("nan"))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.passed)

    def __str__(self) -> str:
        lines = [f"structural validation: preset={self.preset} z_max={self.z_max:g} "
                 f"samples={self.n_samples}"]
        for c in self.checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        lines.append(f"  empirical sup h(Z) = {self.empirical_c_bound:.9g}")
        return "\n".join(lines)


def validate_structural(eos: EquationOfState, z_max: float = 1e6, n_samples: int = 400) -> ValidationReport:
    """Check every structural hypothesis of the constitutive framework.

    Checks, on a log-spaced grid in (0, z_max]:
      ``P0``             P(0) = 0
      ``P_increasing``   P'(Z) > 0
      ``h_bounds``       0 < h(Z) <= c_bound (+ slack); empirical sup reported
      ``decay_monotone`` P(Z)/Z**(5/3) nonincreasing
      ``high_z_limit``   P(z_max)/z_max**(5/3) within LIMIT_RTOL of p_inf
      ``entropy_decay``  |S(z_max)| <= LIMIT_RTOL (third law, limit is zero)
    """
    if z_max <= 0.0:
        raise ValueError("z_max must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")

    zg = np.geomspace(min(1e-6, z_max * 1e-8), z_max, n_samples)
    P = eos.P(zg)
    Pp = eos.P_prime(zg)
    h = eos.h(zg)
    ratio = P / zg ** (5.0 / 3.0)
    checks = []

    p0 = float(eos.P(np.array([0.0]))[0])
    checks.append(CheckResult("P0", abs(p0) <= 1e-12, f"P(0) = {p0:.3e}"))

    checks.append(
        CheckResult(
            "P_increasing",
            bool(np.all(Pp > 0.0)),
            f"min P' = {float(np.min(Pp)):.6g}",
        )
    )

    sup_h = float(np.max(h))
    h_ok = bool(np.all(h > 0.0)) and sup_h <= eos.c_bound + H_BOUND_SLACK
    checks.append(
        CheckResult(
            "h_bounds",
            h_ok,
            f"h in [{float(np.min(h)):.6g}, {sup_h:.9g}], bound {eos.c_bound:.6g}",
        )
    )

    mono = bool(np.all(np.diff(ratio) <= 1e-12 * np.abs(ratio[:-1])))
    checks.append(
        CheckResult("decay_monotone", mono, "P(Z)/Z^(5/3) nonincreasing on the grid")
    )

    lim = float(ratio[-1])
    lim_ok = abs(lim - eos.p_inf) <= LIMIT_RTOL * abs(eos.p_inf)
    checks.append(
        CheckResult(
            "high_z_limit",
            lim_ok,
            f"P/Z^(5/3) at z_max = {lim:.6g}, target p_inf = {eos.p_inf:.6g}",
        )
    )

    s_tail = float(eos.S_structural(np.array([z_max]))[0])
    checks.append(
        CheckResult(
            "entropy_decay",
            abs(s_tail) <= LIMIT_RTOL,
            f"S(z_max) = {s_tail:.6g}",
        )
    )

    return ValidationReport(
        preset=eos.preset,
        z_max=float(z_max),
        n_samples=int(n_samples),
        checks=tuple(checks),
        empirical_c_bound=sup_h,
    )
