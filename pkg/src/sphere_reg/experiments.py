"""Synthetic-problem harness comparing the three regularization methods.

Each trial draws a random solution with prescribed per-degree decay,
pushes it through the forward operator, samples on the canonical cubature
points, adds Gaussian noise, and then solves three ways: the nested
two-parameter search, presmoothing with direct inversion (alpha = 0), and
regularized collocation on raw data (lambda = 0).  Five built-in cases
cover a severely ill-posed geometric symbol and a moderately ill-posed
polynomial one at two smoothness levels and three penalty growth rates.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .collocation import CollocationParams, two_step_solve
from .errors import ValidationError
from .operators import (
    HarmonicCoefficients,
    SphericalSymbol,
    apply_forward,
    symbol_preset,
    synthesize,
)
from .quadrature import CubatureRule, sphere_rule
from .selection import (
    EvalGrid,
    ParameterGrid,
    grid_values,
    select_two_step,
    sup_norm,
)
from .smoothing import PenaltyWeights, SmoothingParams

DEFAULT_SEED = 31415

METHOD_TWO_STEP = "two_step"
METHOD_SMOOTHING = "smoothing_only"
METHOD_COLLOCATION = "collocation_only"
METHODS = (METHOD_TWO_STEP, METHOD_SMOOTHING, METHOD_COLLOCATION)

_BETA_RULE = "inv_symbol_half_pow"

_STANDARD_GRID = ParameterGrid(base=1.78e-5, factor=1.25, count=50, include_zero=True)


@dataclass(frozen=True)
class ExperimentCase:
    """Full description of one synthetic comparison run."""

    name: str
    symbol: str
    upsilon: float
    beta_exponent: float = 0.0
    beta_rule: str = _BETA_RULE
    epsilon: float = 0.05
    M: int = 30
    R: float = 1.0
    rho: float = 1.0
    trials: int = 10
    seed: int = DEFAULT_SEED
    alpha_grid: ParameterGrid | Sequence[float] = _STANDARD_GRID
    lambda_grid: ParameterGrid | Sequence[float] = _STANDARD_GRID

    def __post_init__(self):
        if not self.upsilon > 0:
            raise ValidationError(f"upsilon must be positive, got {self.upsilon!r}")
        if not self.epsilon >= 0:
            raise ValidationError(f"epsilon must be nonnegative, got {self.epsilon!r}")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.M < 0:
            raise ValidationError(f"M must be nonnegative, got {self.M}")
        if self.beta_rule != _BETA_RULE:
            raise ValidationError(f"unknown beta rule {self.beta_rule!r}")
        grid_values(self.alpha_grid)
        grid_values(self.lambda_grid)

    def build_symbol(self) -> SphericalSymbol:
        return symbol_preset(self.symbol, self.R, self.rho, self.M)


@dataclass(frozen=True)
class TrialResult:
    """Relative error and chosen parameters of one method on one trial."""

    trial: int
    method: str
    relative_error: float
    chosen_alpha: float
    chosen_lambda: float

    def __post_init__(self):
        if not self.relative_error >= 0:
            raise ValidationError("relative error must be nonnegative")


def penalty_from_symbol(
    symbol: SphericalSymbol, exponent: float = 0.0
) -> PenaltyWeights:
    """Penalties with beta_k^2 = (k+1/2)^exponent / a_k for k >= 1.

    The captions' rule starts at k = 1; beta_0 is set equal to beta_1 so
    the sequence stays positive and nondecreasing.
    """
    k = np.arange(symbol.M + 1, dtype=float)
    beta_sq = (k + 0.5) ** exponent / symbol.a
    if symbol.M >= 1:
        beta_sq[0] = beta_sq[1]
    return PenaltyWeights(beta=np.sqrt(beta_sq))


FIGURE1_CASES = {
    "fig1a": ExperimentCase(
        name="fig1a", symbol="geometric(1.48)", upsilon=1.5, beta_exponent=0.0
    ),
    "fig1b": ExperimentCase(
        name="fig1b", symbol="geometric(1.48)", upsilon=5.5, beta_exponent=3.5
    ),
    "fig1c": ExperimentCase(
        name="fig1c", symbol="polynomial(2)", upsilon=1.5, beta_exponent=0.0
    ),
    "fig1d": ExperimentCase(
        name="fig1d", symbol="polynomial(2)", upsilon=5.5, beta_exponent=3.5
    ),
    "fig1e": ExperimentCase(
        name="fig1e", symbol="polynomial(2)", upsilon=5.5, beta_exponent=5.5
    ),
}


@functools.lru_cache(maxsize=8)
def canonical_rule(M: int, rho: float) -> CubatureRule:
    """Shared rule instance per (M, rho) so basis caches are reused."""
    return sphere_rule(M, rho)


@functools.lru_cache(maxsize=8)
def _shared_eval_grid(M: int, R: float) -> EvalGrid:
    return EvalGrid(canonical_rule(2 * M, R).points)


def trial_seed(case_seed: int, trial: int) -> int:
    """Deterministic per-trial seed; derived, not sequential, so cases with
    nearby seeds do not share noise streams."""
    return case_seed * 100000 + trial


def simulate_problem(case: ExperimentCase, trial_seed: int):
    """Draw one synthetic problem instance.

    Returns (x_true, clean, noisy): the true solution coefficients with
    rows decaying like (k+1/2)^(-upsilon) and uniform [-1, 1] mode draws,
    the exact data samples at the canonical rule points, and the samples
    with i.i.d. Gaussian noise of standard deviation epsilon added.
    """
    symbol = case.build_symbol()
    rule = canonical_rule(case.M, case.rho)
    rng = np.random.default_rng(trial_seed)

    g = rng.uniform(-1.0, 1.0, (case.M + 1) * (case.M + 1))
    k = np.arange(case.M + 1, dtype=float)
    decay = np.repeat((k + 0.5) ** (-case.upsilon), 2 * np.arange(case.M + 1) + 1)
    x_true = HarmonicCoefficients(M=case.M, radius=case.R, values=decay * g)

    clean = synthesize(apply_forward(symbol, x_true), rule.points)
    noisy = clean + case.epsilon * rng.standard_normal(rule.n_points)
    return x_true, clean, noisy


def relative_sup_error(
    x_true: HarmonicCoefficients, x_approx: HarmonicCoefficients, eval_grid
) -> float:
    """sup|x_true - x_approx| / sup|x_true| over the grid."""
    denom = sup_norm(x_true, eval_grid)
    if denom == 0.0:
        raise ValidationError("true solution has zero sup norm")
    return sup_norm(x_true - x_approx, eval_grid) / denom


def run_case(
    case: ExperimentCase,
    *,
    force_params: tuple[float, float] | None = None,
) -> list[TrialResult]:
    """Run every trial of a case with all three methods.

    ``force_params = (alpha, lam)`` bypasses parameter selection and solves
    all three methods at exactly that pair; this is the harness self-check
    mode (with clean data and (0, 0) every method recovers the truth).

    Results are ordered by trial, then two_step / smoothing_only /
    collocation_only, and are deterministic given the case (seed included).
    """
    symbol = case.build_symbol()
    beta = penalty_from_symbol(symbol, case.beta_exponent)
    rule = canonical_rule(case.M, case.rho)
    grid = _shared_eval_grid(case.M, case.R)

    results: list[TrialResult] = []
    for t in range(case.trials):
        x_true, _, noisy = simulate_problem(case, trial_seed(case.seed, t))

        if force_params is not None:
            alpha0, lam0 = force_params
            sol = two_step_solve(
                noisy,
                rule,
                SmoothingParams(lam=lam0, beta=beta),
                CollocationParams(alpha=alpha0, symbol=symbol),
            )
            picks = [(m, alpha0, lam0, sol) for m in METHODS]
        else:
            two = select_two_step(
                noisy, rule, symbol, beta, case.alpha_grid, case.lambda_grid, grid
            )
            smo = select_two_step(
                noisy, rule, symbol, beta, [0.0], case.lambda_grid, grid
            )
            col = select_two_step(
                noisy, rule, symbol, beta, case.alpha_grid, [0.0], grid
            )
            picks = [
                (METHOD_TWO_STEP, two.alpha, two.lam, two.solution),
                (METHOD_SMOOTHING, smo.alpha, smo.lam, smo.solution),
                (METHOD_COLLOCATION, col.alpha, col.lam, col.solution),
            ]

        for method, alpha, lam, sol in picks:
            results.append(
                TrialResult(
                    trial=t,
                    method=method,
                    relative_error=relative_sup_error(x_true, sol, grid),
                    chosen_alpha=float(alpha),
                    chosen_lambda=float(lam),
                )
            )
    return results


@dataclass(frozen=True)
class LeaderSummary:
    """Median errors per method and the follows-the-leader verdict."""

    case: str
    median_two_step: float
    median_smoothing: float
    median_collocation: float
    ratio: float
    follows_leader: bool


def leader_following_summary(
    case_name: str, results: Sequence[TrialResult], factor: float = 1.2
) -> LeaderSummary:
    """Check whether the two-step median tracks the better single method."""
    medians = {}
    for method in METHODS:
        errs = [r.relative_error for r in results if r.method == method]
        if not errs:
            raise ValidationError(f"no results for method {method!r}")
        medians[method] = float(np.median(errs))
    best_single = min(medians[METHOD_SMOOTHING], medians[METHOD_COLLOCATION])
    ratio = medians[METHOD_TWO_STEP] / best_single if best_single > 0 else math.inf
    return LeaderSummary(
        case=case_name,
        median_two_step=medians[METHOD_TWO_STEP],
        median_smoothing=medians[METHOD_SMOOTHING],
        median_collocation=medians[METHOD_COLLOCATION],
        ratio=ratio,
        follows_leader=bool(ratio <= factor),
    )


def case_with_overrides(base: ExperimentCase, **overrides) -> ExperimentCase:
    """Copy a case with selected fields replaced (validation re-runs)."""
    return replace(base, **overrides)
