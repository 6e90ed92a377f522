"""Quantitative probes of local almost-squareness and octahedrality.

All probes work on the constant-free span ``span(t**lam_i, lam_i >= 1)``,
where every ``f`` satisfies ``f(0) = 0``.  With ``c`` dominating the
derivative constant on ``[0, x]`` and ``a = min(1 / (2c), x)``, every unit
``f`` has ``|f| <= 1/2`` on ``[0, a]``.  For ``g = t**lam`` this forces
``max(||g + h||, ||g - h||) >= 1 + a**lam / 2`` for every unit ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .bernstein import DEFAULT_SAFETY, BernsteinConfig, bernstein_constant
from .core import (
    MuntzError,
    MuntzPolynomial,
    MuntzSequence,
    certify_terms,
    monomial,
    random_unit_polynomial,
    split_head_tail,
    sup_norm_certified,
    validate_sequence,
)

HALF_BALL_SLACK = 1e-6
LASQ_SLACK = 1e-4
_NORM_TOL = 1e-9
_UNIT_TOL = 1e-10


@dataclass(frozen=True)
class DefectReport:
    kind: str  # "half_ball", "lasq" or "oh_probe"
    n: int
    x: float | None
    a: float | None
    threshold_epsilon_star: float | None
    trials: int
    extremal_value: float
    violations: int
    seed: int
    witness_g: MuntzPolynomial | None = None
    best_candidate: MuntzPolynomial | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "x": self.x,
            "a": self.a,
            "threshold_epsilon_star": self.threshold_epsilon_star,
            "trials": self.trials,
            "extremal_value": self.extremal_value,
            "violations": self.violations,
            "seed": self.seed,
            "witness_g": self.witness_g.to_dict() if self.witness_g else None,
            "best_candidate": self.best_candidate.to_dict() if self.best_candidate else None,
        }

    def csv_row(self) -> list:
        return [self.kind, self.n, self.x, self.a, self.threshold_epsilon_star,
                self.extremal_value, self.violations, self.trials, self.seed]


DEFECT_CSV_HEADER = ["kind", "N", "x", "a", "epsilon_star", "extremal_value",
                     "violations", "trials", "seed"]


def _constant_free(seq: MuntzSequence, n: int) -> tuple[MuntzSequence, int]:
    """Constant-free version of the prefix with index <= n, and its size."""
    size = seq.prefix_size(n)
    free = MuntzSequence(seq.exponents[:size], seq.family, seq.parameter).constant_free()
    bad = [e for e in free.exponents if e < 1]
    if bad:
        raise MuntzError(f"positive exponents must be >= 1, got {bad[0]}")
    return free, len(free)


def radius_from_constant(c: float, x: float) -> float:
    return min(1.0 / (2.0 * c), x)


def small_ball_radius(
    seq: MuntzSequence,
    n: int,
    x: float,
    safety: float = DEFAULT_SAFETY,
    config: BernsteinConfig | None = None,
) -> tuple[float, float]:
    """``(a, c_used)`` with ``c_used`` the safety-factored estimate on ``[0, x]``."""
    if not 0 < x < 1:
        raise MuntzError(f"x={x} must lie in (0, 1)")
    free, size = _constant_free(seq, n)
    est = bernstein_constant(free, size, x, config)
    c_used = safety * est.upper_heuristic
    return radius_from_constant(c_used, x), c_used


def half_ball_check(seq: MuntzSequence, n: int, a: float, trials: int, seed: int) -> DefectReport:
    """Largest certified ``||f||_[0,a]`` over random constant-free unit ``f``."""
    if trials < 1:
        raise MuntzError("need at least one trial")
    if not 0 <= a <= 1:
        raise MuntzError(f"a={a} must lie in [0, 1]")
    free, size = _constant_free(seq, n)
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def one(ss):
        f = random_unit_polynomial(free, size, ss, _UNIT_TOL)
        return sup_norm_certified(f, (0.0, a), _NORM_TOL).upper

    vals = np.array(pmap(one, seeds))
    return DefectReport(
        kind="half_ball", n=n, x=None, a=a, threshold_epsilon_star=None, trials=trials,
        extremal_value=float(vals.max()),
        violations=int(np.sum(vals > 0.5 + HALF_BALL_SLACK)), seed=seed,
    )


def lasq_threshold_from_radius(a: float, lam: float) -> float:
    return a**lam / 2.0


def lasq_threshold(
    seq: MuntzSequence,
    n: int,
    x: float,
    safety: float = DEFAULT_SAFETY,
    config: BernsteinConfig | None = None,
) -> tuple[float, MuntzPolynomial, float]:
    """``(eps_star, g, a)`` with ``g = t**lam_first`` and ``eps_star = a**lam_first / 2``."""
    free, _ = _constant_free(seq, n)
    a, _ = small_ball_radius(seq, n, x, safety, config)
    g = monomial(free, 0)
    return lasq_threshold_from_radius(a, free.exponents[0]), g, a


def lasq_objective(g: MuntzPolynomial, h: MuntzPolynomial, tol: float = _NORM_TOL) -> float:
    """Certified lower bound on ``max(||g + h||, ||g - h||)``."""
    plus = g + h
    minus = g - h
    np_ = certify_terms(plus.exponents, plus.coefficients, (0.0, 1.0), tol).lower
    nm = certify_terms(minus.exponents, minus.coefficients, (0.0, 1.0), tol).lower
    return max(np_, nm)


def _unit(seq: MuntzSequence, coefs: np.ndarray) -> MuntzPolynomial | None:
    cert = certify_terms(seq.exponents[: len(coefs)], coefs, (0.0, 1.0), _UNIT_TOL)
    if cert.lower == 0:
        return None
    return MuntzPolynomial(seq, tuple(coefs / cert.lower))


def coordinate_descent(
    objective, seq: MuntzSequence, start: MuntzPolynomial, iterations: int = 200, step: float = 0.25
) -> tuple[MuntzPolynomial, float, list[float]]:
    """Minimize ``objective`` over the unit sphere by coordinate perturbations.

    Each sweep tries ``+-step`` on every coefficient, renormalizing to unit
    norm; the step halves after a sweep without improvement.  Returns the
    best point, its value and every value evaluated along the way.
    """
    best = start
    best_val = objective(start)
    seen = [best_val]
    for _ in range(iterations):
        improved = False
        base = np.asarray(best.coefficients)
        for i in range(len(base)):
            for sgn in (1.0, -1.0):
                trial = base.copy()
                trial[i] += sgn * step * max(1.0, abs(base[i]))
                h = _unit(seq, trial)
                if h is None:
                    continue
                val = objective(h)
                seen.append(val)
                if val < best_val:
                    best, best_val, improved = h, val, True
                    base = np.asarray(best.coefficients)
        if not improved:
            step /= 2
            if step < 1e-12:
                break
    return best, best_val, seen


def lasq_empirical_defect(
    seq: MuntzSequence,
    n: int,
    x: float,
    trials: int,
    seed: int,
    refine_iterations: int = 200,
    safety: float = DEFAULT_SAFETY,
    config: BernsteinConfig | None = None,
) -> DefectReport:
    """Random search plus local refinement for a unit ``h`` with small LASQ objective.

    A violation is any candidate whose certified objective falls below
    ``1 + eps_star - 1e-4``.
    """
    if trials < 1:
        raise MuntzError("need at least one trial")
    free, size = _constant_free(seq, n)
    eps_star, g, a = lasq_threshold(seq, n, x, safety, config)
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def one(ss):
        h = random_unit_polynomial(free, size, ss, _UNIT_TOL)
        return lasq_objective(g, h), h

    results = pmap(one, seeds)
    vals = [v for v, _ in results]
    k = int(np.argmin(vals))
    best, best_val, seen = coordinate_descent(
        lambda h: lasq_objective(g, h), free, results[k][1], refine_iterations
    )
    allvals = np.array(vals + seen)
    threshold = 1 + eps_star - LASQ_SLACK
    return DefectReport(
        kind="lasq", n=n, x=x, a=a, threshold_epsilon_star=eps_star, trials=trials,
        extremal_value=float(allvals.min()), violations=int(np.sum(allvals < threshold)),
        seed=seed, witness_g=g, best_candidate=best,
    )


def asq_tail_defect(
    seq: MuntzSequence, n: int, head: int, x: float, trials: int, seed: int, **kw
) -> DefectReport:
    """LASQ probe on the tail span left after removing coefficients with index <= ``head``.

    The tail has finite codimension, so its failure to be locally almost
    square rules out almost squareness of the whole space.
    """
    size = seq.prefix_size(n)
    _, tail = split_head_tail(MuntzPolynomial(seq, (1.0,) * size), head)
    tail_exps = [e for e, c in zip(tail.exponents, tail.coefficients) if c]
    if not tail_exps:
        raise MuntzError("tail span is empty")
    tail_seq = validate_sequence(tail_exps)
    return lasq_empirical_defect(tail_seq, len(tail_exps), x, trials, seed, **kw)


def oh_defect_probe(
    x_points, seq: MuntzSequence, n: int, trials: int, seed: int, tol: float = 1e-6
) -> DefectReport:
    """Observed ``sup_y min_{x, +-} ||x +- y||`` over random unit ``y``.

    Exploratory only: the value is reported, never asserted.
    """
    x_points = list(x_points)
    if not x_points:
        raise MuntzError("need at least one point x")
    if trials < 1:
        raise MuntzError("need at least one trial")
    for xp in x_points:
        nrm = sup_norm_certified(xp, (0.0, 1.0), tol)
        if abs(nrm.mid - 1) > 1e-6:
            raise MuntzError("x points must have unit norm")
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def one(ss):
        y = random_unit_polynomial(seq, n, ss, _UNIT_TOL)
        return oh_value(x_points, y, tol), y

    results = pmap(one, seeds)
    k = int(np.argmax([v for v, _ in results]))
    return DefectReport(
        kind="oh_probe", n=n, x=None, a=None, threshold_epsilon_star=None, trials=trials,
        extremal_value=float(results[k][0]), violations=0, seed=seed,
        witness_g=x_points[0], best_candidate=results[k][1],
    )


def oh_value(x_points, y: MuntzPolynomial, tol: float = 1e-6) -> float:
    """``min_{x, +-} ||x +- y||`` for a single ``y``."""
    return min(
        sup_norm_certified(s, (0.0, 1.0), tol).mid
        for xp in x_points
        for s in (xp + y, xp - y)
    )
