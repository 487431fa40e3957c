"""Self-contained invariant suite behind the `verify` CLI subcommand.

Each check recomputes a mathematical identity the library depends on and
reports the worst deviation it saw.  The suite is deliberately independent
of pytest so a deployed installation can be sanity-checked in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collocation import CollocationParams, composite_norm_bound, two_step_solve
from .harmonics import basis_matrix, legendre_table, sph_harm_matrix
from .operators import (
    HarmonicCoefficients,
    analyze,
    apply_forward,
    symbol_preset,
    synthesize,
)
from .quadrature import gauss_legendre, sphere_rule
from .smoothing import PenaltyWeights, SmoothingParams, smooth, smooth_oracle


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_directions(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _check_gauss_legendre() -> CheckResult:
    rule = gauss_legendre(2)
    dev = max(
        abs(rule.nodes[0] + 1.0 / math.sqrt(3.0)),
        abs(rule.nodes[1] - 1.0 / math.sqrt(3.0)),
        abs(rule.weights[0] - 1.0),
        abs(rule.weights[1] - 1.0),
    )
    five = gauss_legendre(5)
    dev = max(dev, abs(float(five.weights @ five.nodes**8) - 2.0 / 9.0))
    for n in (1, 7, 31, 64):
        r = gauss_legendre(n)
        dev = max(dev, abs(float(np.sum(r.weights)) - 2.0))
    passed = dev < 1e-13
    return CheckResult("gauss-legendre", passed, f"max deviation {dev:.2e}")


def _check_cubature_gram(M: int, corrupt_weight: bool) -> CheckResult:
    rule = sphere_rule(M, 1.0)
    weights = rule.weights.copy()
    if corrupt_weight:
        weights[0] *= 1.0 + 1e-6
    B = basis_matrix(M, rule.points, rule.rho)
    gram = B.T @ (weights[:, None] * B)
    dev = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    passed = dev < 1e-9
    return CheckResult(
        f"cubature-gram-M{M}", passed, f"max |Gram - I| = {dev:.2e}"
    )


def _check_addition_theorem(k_max: int) -> CheckResult:
    rng = np.random.default_rng(2)
    u = _random_directions(rng, 20)
    v = _random_directions(rng, 20)
    Yu = sph_harm_matrix(k_max, u)
    Yv = sph_harm_matrix(k_max, v)
    cos_uv = np.clip(np.sum(u * v, axis=1), -1.0, 1.0)
    p = legendre_table(k_max, cos_uv)
    dev = 0.0
    for k in range(k_max + 1):
        lo, hi = k * k, (k + 1) * (k + 1)
        lhs = np.sum(Yu[:, lo:hi] * Yv[:, lo:hi], axis=1)
        rhs = (2 * k + 1) / (4.0 * math.pi) * p[k]
        dev = max(dev, float(np.max(np.abs(lhs - rhs))))
    passed = dev < 1e-10
    return CheckResult(
        f"addition-theorem-k{k_max}", passed, f"max deviation {dev:.2e}"
    )


def _check_oracle_equivalence() -> CheckResult:
    rng = np.random.default_rng(3)
    rule = sphere_rule(6, 1.0)
    beta = PenaltyWeights(beta=np.arange(7, dtype=float) + 1.0)
    dev = 0.0
    for lam in (0.0, 1e-4, 0.1, 1.0):
        samples = rng.standard_normal(rule.n_points)
        params = SmoothingParams(lam=lam, beta=beta)
        closed = smooth(samples, rule, params)
        direct = smooth_oracle(samples, rule, params)
        dev = max(dev, float(np.max(np.abs(closed.values - direct.values))))
    passed = dev < 1e-8
    return CheckResult("smoothing-oracle", passed, f"max deviation {dev:.2e}")


def _limit_setup(M: int):
    rng = np.random.default_rng(4)
    rule = sphere_rule(M, 1.0)
    symbol = symbol_preset("polynomial(2)", 1.0, 1.0, M)
    beta = PenaltyWeights(beta=np.arange(M + 1, dtype=float) + 1.0)
    samples = rng.standard_normal(rule.n_points)
    return rule, symbol, beta, samples


def _check_limiting_identities() -> CheckResult:
    from .collocation import invert_regularized

    rule, symbol, beta, samples = _limit_setup(8)
    cp = CollocationParams(alpha=3e-3, symbol=symbol)
    via_two_step = two_step_solve(
        samples, rule, SmoothingParams(lam=0.0, beta=beta), cp
    )
    raw = invert_regularized(analyze(samples, rule, rule.M), cp)
    dev = float(np.max(np.abs(via_two_step.values - raw.values)))

    sp = SmoothingParams(lam=0.2, beta=beta)
    via_two_step = two_step_solve(
        samples, rule, sp, CollocationParams(alpha=0.0, symbol=symbol)
    )
    direct = invert_regularized(
        smooth(samples, rule, sp), CollocationParams(alpha=0.0, symbol=symbol)
    )
    dev = max(dev, float(np.max(np.abs(via_two_step.values - direct.values))))
    passed = dev < 1e-14
    return CheckResult("limiting-identities", passed, f"max deviation {dev:.2e}")


def _check_exact_recovery(M: int) -> CheckResult:
    rng = np.random.default_rng(5)
    rule = sphere_rule(M, 1.0)
    symbol = symbol_preset("geometric(1.48)", 1.0, 1.0, M)
    beta = PenaltyWeights(beta=np.ones(M + 1))
    x = HarmonicCoefficients(
        M=M, radius=1.0, values=rng.uniform(-1.0, 1.0, (M + 1) ** 2)
    )
    clean = synthesize(apply_forward(symbol, x), rule.points)
    sol = two_step_solve(
        clean,
        rule,
        SmoothingParams(lam=0.0, beta=beta),
        CollocationParams(alpha=0.0, symbol=symbol),
    )
    dev = float(np.max(np.abs(sol.values - x.values)) / np.max(np.abs(x.values)))
    passed = dev < 1e-8
    return CheckResult(f"exact-recovery-M{M}", passed, f"relative deviation {dev:.2e}")


def _check_norm_bound_constant() -> CheckResult:
    rule = sphere_rule(0, 1.0)
    symbol = symbol_preset("polynomial(1)", 1.0, 1.0, 0)
    sp = SmoothingParams(lam=0.0, beta=PenaltyWeights(beta=np.ones(1)))
    cp = CollocationParams(alpha=0.0, symbol=symbol)
    grid = sphere_rule(2, 1.0).points
    value = composite_norm_bound(sp, cp, rule, grid)
    dev = abs(value - 1.0)
    passed = dev < 1e-10
    return CheckResult("norm-bound-constant", passed, f"|bound - 1| = {dev:.2e}")


def run_checks(quick: bool = False, corrupt_weight: bool = False) -> list[CheckResult]:
    """Run the invariant suite; quick mode uses smaller degrees."""
    gram_M = 12 if quick else 30
    addition_k = 25 if quick else 61
    recovery_M = 10 if quick else 20
    return [
        _check_gauss_legendre(),
        _check_cubature_gram(gram_M, corrupt_weight),
        _check_addition_theorem(addition_k),
        _check_oracle_equivalence(),
        _check_limiting_identities(),
        _check_exact_recovery(recovery_M),
        _check_norm_bound_constant(),
    ]
