"""Two-sided estimates of bounded Bernstein constants.

For a prefix of a Müntz sequence and ``a in (0, 1)`` we estimate

    c(a) = sup { ||p'||_[0,a] : p in span, ||p||_[0,1] <= 1 }.

Each LP step maximizes ``p'(t*)`` subject to ``|p(t_j)| <= 1`` on a finite
constraint grid.  Its optimizer, rescaled by its certified norm, gives a
rigorous lower bound on ``c(a)``; the LP values themselves form a refinable
upper estimate that is only heuristic, because the constraints are sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    MuntzError,
    MuntzPolynomial,
    MuntzSequence,
    certify_terms,
    derivative,
    sup_norm_certified,
)
from .simplex import INFEASIBLE, OPTIMAL, simplex

DEFAULT_SAFETY = 1.25


class BernsteinError(RuntimeError):
    """The estimator could not produce a bounded estimate."""


class LPUnbounded(BernsteinError):
    """Sampled constraints leave some coefficient direction free."""


@dataclass(frozen=True)
class BernsteinConfig:
    constraint_points: int = 129
    objective_points: int = 9
    rel_gap: float = 1e-3
    max_refinements: int = 6
    max_objective_points: int = 65
    norm_rel_tol: float = 1e-12


@dataclass(frozen=True)
class BernsteinEstimate:
    sequence: MuntzSequence
    n: int
    a: float
    lower: float
    upper_heuristic: float
    witness: MuntzPolynomial
    constraint_grid_size: int
    objective_grid_size: int
    converged: bool
    refinements: int = 0
    derivative_norm: float = field(default=0.0)
    witness_norm: float = field(default=1.0)

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence.to_dict(),
            "n": self.n,
            "a": self.a,
            "lower": self.lower,
            "upper_heuristic": self.upper_heuristic,
            "witness": self.witness.to_dict(),
            "constraint_grid_size": self.constraint_grid_size,
            "objective_grid_size": self.objective_grid_size,
            "converged": self.converged,
            "refinements": self.refinements,
            "derivative_norm_lower": self.derivative_norm,
            "witness_norm_upper": self.witness_norm,
        }

    def csv_row(self) -> list:
        return [self.n, self.a, self.lower, self.upper_heuristic, self.converged]


CSV_HEADER = ["N", "a", "lower", "upper_heuristic", "converged"]


def _check_exponents(exps) -> None:
    bad = [e for e in exps if 0 < e < 1]
    if bad:
        raise MuntzError(f"positive exponents must be >= 1, got {bad[0]}")


def trivial_derivative_bound(p: MuntzPolynomial) -> float:
    """``sum |a_i| lam_i``, an upper bound for ``||p'||_[0,1]``."""
    _check_exponents(p.exponents)
    return math.fsum(abs(a) * lam for a, lam in zip(p.coefficients, p.exponents))


def _derivative_row(exps: np.ndarray, t: float) -> np.ndarray:
    out = np.zeros(len(exps))
    for i, lam in enumerate(exps):
        if lam == 0:
            continue
        out[i] = lam if lam == 1 else lam * t ** (lam - 1)
    return out


def bernstein_lp_step(
    seq: MuntzSequence, n: int, a: float, t_star: float, constraint_grid
) -> tuple[float, np.ndarray]:
    """Maximize ``p'(t_star)`` over the prefix span with ``|p| <= 1`` on the grid.

    Returns ``(value, coefficients)``.  Solved through the LP dual
    ``min sum(y+ + y-)  s.t.  G^T (y+ - y-) = grad, y >= 0``, whose
    infeasibility signals an unbounded primal.
    """
    if not 0 <= t_star <= a:
        raise MuntzError(f"t_star={t_star} outside [0, {a}]")
    exps = np.asarray(seq.exponents[: seq.prefix_size(n)])
    grid = np.unique(np.asarray(constraint_grid, dtype=float))
    if len(grid) == 0 or grid[0] < 0 or grid[-1] > 1:
        raise MuntzError("constraint grid must be a non-empty subset of [0, 1]")
    G = np.power(grid[:, None], exps[None, :])
    grad = _derivative_row(exps, t_star)
    A = np.hstack([G.T, -G.T])
    res = simplex(A, grad, np.ones(A.shape[1]))
    if res.status == INFEASIBLE:
        raise LPUnbounded(
            f"LP unbounded at t*={t_star:g} with {len(grid)} constraint points; refine the grid"
        )
    if res.status != OPTIMAL:
        raise BernsteinError(f"simplex stopped with status {res.status}")
    B = A[:, res.basis]
    x, *_ = np.linalg.lstsq(B.T, np.ones(len(res.basis)), rcond=None)
    return float(grad @ x), x


def chebyshev_lobatto(n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    k = np.arange(n)
    pts = 0.5 * (1 - np.cos(np.pi * k / (n - 1)))
    pts[0], pts[-1] = 0.0, 1.0
    return lo + (hi - lo) * pts


def objective_grid(n: int, a: float) -> np.ndarray:
    """Points on [0, a] clustered towards ``a``."""
    k = np.arange(n)
    pts = a * np.sin(0.5 * np.pi * k / (n - 1))
    pts[0], pts[-1] = 0.0, a
    return pts


def witness_ratio(p: MuntzPolynomial, a: float, rel_tol: float = 1e-12) -> tuple[float, float, float]:
    """``(ratio, ||p'||_[0,a] lower, ||p||_[0,1] upper)`` from certificates."""
    d = derivative(p)
    if not d.exponents:
        return 0.0, 0.0, sup_norm_certified(p, (0.0, 1.0), rel_tol).upper
    if d.unbounded_at_zero:
        raise MuntzError("witness derivative is unbounded at 0")
    scale = max(1.0, max(abs(c) for c in p.coefficients))
    norm = sup_norm_certified(p, (0.0, 1.0), rel_tol * scale)
    dscale = max(1.0, sum(abs(c) for c in d.coefficients))
    dnorm = certify_terms(d.exponents, d.coefficients, (0.0, a), rel_tol * dscale)
    return dnorm.lower / norm.upper, dnorm.lower, norm.upper


def bernstein_constant(
    seq: MuntzSequence, n: int, a: float, config: BernsteinConfig | None = None
) -> BernsteinEstimate:
    """Estimate the constant ``c(a)`` for the span of exponents with index <= n."""
    config = config or BernsteinConfig()
    if n < 1:
        raise MuntzError("need n >= 1")
    if not 0 < a < 1:
        raise MuntzError(f"a={a} must lie in (0, 1)")
    size = seq.prefix_size(n)
    exps = seq.exponents[:size]
    _check_exponents(exps)

    nc, no = config.constraint_points, config.objective_points
    last_error: Exception | None = None
    best = None
    for level in range(config.max_refinements + 1):
        cgrid = chebyshev_lobatto(nc)
        ogrid = objective_grid(no, a)
        try:
            steps = [bernstein_lp_step(seq, n, a, float(t), cgrid) for t in ogrid]
        except LPUnbounded as exc:
            last_error = exc
        else:
            upper = max(v for v, _ in steps)
            lower, witness, dn, wn = -1.0, None, 0.0, 1.0
            for _, x in steps:
                p = MuntzPolynomial(seq, tuple(x))
                r, dlow, nup = witness_ratio(p, a, config.norm_rel_tol)
                if r > lower:
                    lower, witness, dn, wn = r, p, dlow, nup
            # the certified lower bound is always a valid floor for the estimate
            upper = max(upper, lower)
            converged = lower > 0 and (upper - lower) / lower <= config.rel_gap
            best = BernsteinEstimate(
                seq.prefix(n), n, a, lower, upper, witness, len(cgrid), len(ogrid),
                converged, level, dn, wn,
            )
            if converged:
                return best
        nc = 2 * nc - 1
        no = min(2 * no - 1, config.max_objective_points)
    if best is None:
        raise BernsteinError(f"LP stayed unbounded after refinement: {last_error}")
    return best


def k_sequence(
    seq: MuntzSequence,
    n: int,
    anchors,
    safety: float = DEFAULT_SAFETY,
    config: BernsteinConfig | None = None,
) -> list[float]:
    """Safety-factored derivative constants for each anchor, made non-decreasing."""
    anchors = [float(x) for x in anchors]
    if not anchors:
        raise MuntzError("need at least one anchor")
    for i, x in enumerate(anchors):
        if not 0 < x < 1:
            raise MuntzError(f"anchor {x} outside (0, 1)")
        if i and x <= anchors[i - 1]:
            raise MuntzError(f"anchors not strictly increasing at index {i}")
    ks, running = [], 0.0
    for x in anchors:
        est = bernstein_constant(seq, n, x, config)
        running = max(running, safety * est.upper_heuristic)
        ks.append(running)
    return ks
