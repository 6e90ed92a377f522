"""Sampling grids and the almost-isometric embedding into convergent sequences.

A function ``f`` is sent to its values on a grid ``0 = s_0 < s_1 < ...``
that is fine enough, band by band, relative to the derivative constants
``K_i``.  The infinite grid is truncated at the last anchor and the limit
coordinate ``f(1)`` is appended.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .bernstein import DEFAULT_SAFETY, BernsteinConfig, k_sequence
from .core import (
    MuntzError,
    MuntzPolynomial,
    MuntzSequence,
    evaluate,
    random_unit_polynomial,
    sup_norm_certified,
)

# certification tolerance for the norms compared in the sandwich
_NORM_TOL = 1e-10
SANDWICH_SLACK = 1e-6


def default_anchors(m: int) -> list[float]:
    """``1 - 2**-i`` for ``i = 1..m``."""
    if m < 1:
        raise MuntzError("need at least one anchor")
    return [1.0 - 2.0**-i for i in range(1, m + 1)]


@dataclass(frozen=True)
class SamplingGrid:
    epsilon: float
    anchors: tuple[float, ...]  # starts with a_0 = 0
    constants: tuple[float, ...]  # K_i, used on the band [a_{i-1}, a_i]
    points: np.ndarray
    includes_limit_point: bool = True

    def band_slices(self):
        """Yield ``(band index, points in that band)`` including both anchors."""
        idx = np.searchsorted(self.points, self.anchors)
        for i in range(1, len(self.anchors)):
            yield i, self.points[idx[i - 1] : idx[i] + 1]

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "anchors": list(self.anchors),
            "constants": list(self.constants),
            "points": self.points.tolist(),
            "includes_limit_point": self.includes_limit_point,
        }


def spacing_violations(grid: SamplingGrid) -> list[tuple[int, int, float]]:
    """``(band, position, step)`` for every step exceeding ``eps / K`` in its band."""
    out = []
    for i, band in grid.band_slices():
        limit = grid.epsilon / grid.constants[i - 1]
        steps = np.diff(band)
        for j in np.flatnonzero(steps > limit):
            out.append((i, int(j), float(steps[j])))
    return out


def _band_points(lo: float, hi: float, max_step: float) -> np.ndarray:
    n = max(1, math.ceil((hi - lo) / max_step))
    while True:
        pts = lo + (hi - lo) * np.arange(n + 1) / n
        pts[-1] = hi
        # the scan is exact in binary64, so roundoff may cost one more point
        if np.all(np.diff(pts) <= max_step):
            return pts
        n += 1


def build_grid(
    seq: MuntzSequence | None,
    n: int | None,
    epsilon: float,
    anchors,
    constants,
) -> SamplingGrid:
    """Uniform points in each band ``[a_{i-1}, a_i]`` with step at most ``eps / K_i``.

    ``seq`` and ``n`` only document which span the constants belong to.
    """
    if not 0 < epsilon < 1:
        raise MuntzError(f"epsilon={epsilon} must lie in (0, 1)")
    anchors = [float(a) for a in anchors]
    constants = [float(k) for k in constants]
    if anchors and anchors[0] == 0.0:
        anchors = anchors[1:]
    if len(anchors) != len(constants):
        raise MuntzError(f"{len(anchors)} anchors but {len(constants)} constants")
    if not anchors:
        raise MuntzError("need at least one anchor")
    full = [0.0] + anchors
    for i in range(1, len(full)):
        if not full[i - 1] < full[i] < 1:
            raise MuntzError(f"anchors must increase strictly inside (0, 1); index {i}")
    for i, k in enumerate(constants):
        if not k > 0:
            raise MuntzError(f"constant K_{i + 1} must be positive")
        if i and k < constants[i - 1]:
            raise MuntzError("constants must be non-decreasing")

    pieces = []
    for i in range(1, len(full)):
        band = _band_points(full[i - 1], full[i], epsilon / constants[i - 1])
        pieces.append(band if i == 1 else band[1:])
    grid = SamplingGrid(epsilon, tuple(full), tuple(constants), np.concatenate(pieces))
    bad = spacing_violations(grid)
    if bad:
        raise AssertionError(f"grid spacing rule broken: {bad[:3]}")
    return grid


def apply_embedding(f: MuntzPolynomial, grid: SamplingGrid) -> np.ndarray:
    """``(f(s_0), ..., f(s_last), f(1))``."""
    vals = evaluate(f, grid.points)
    if grid.includes_limit_point:
        vals = np.append(vals, evaluate(f, 1.0))
    return vals


def embedding_csv_rows(f: MuntzPolynomial, grid: SamplingGrid) -> list[list]:
    vals = apply_embedding(f, grid)
    ss = list(grid.points) + ([1.0] if grid.includes_limit_point else [])
    return [[i, float(s), float(v)] for i, (s, v) in enumerate(zip(ss, vals))]


@dataclass(frozen=True)
class EmbeddingReport:
    trials: int
    min_ratio: float
    max_ratio: float
    epsilon: float
    violations: int
    band_violations: int
    band_min_margin: float
    grid_points: int
    anchors: tuple[float, ...]
    constants: tuple[float, ...]
    seed: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.max_ratio <= 1 + 1e-9

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "epsilon": self.epsilon,
            "violations": self.violations,
            "band_violations": self.band_violations,
            "band_min_margin": self.band_min_margin,
            "grid_points": self.grid_points,
            "anchors": list(self.anchors),
            "constants": list(self.constants),
            "seed": self.seed,
        }

    def csv_row(self) -> list:
        return [self.trials, self.epsilon, self.min_ratio, self.max_ratio, self.violations,
                self.band_violations, self.grid_points, self.seed]


EMBEDDING_CSV_HEADER = ["trials", "epsilon", "min_ratio", "max_ratio", "violations",
                        "band_violations", "grid_points", "seed"]


def _sandwich_trial(f: MuntzPolynomial, grid: SamplingGrid):
    norm = sup_norm_certified(f, (0.0, 1.0), _NORM_TOL)
    coords = np.abs(apply_embedding(f, grid))
    ratio = float(coords.max()) / norm.upper
    # certified form on [0, a_m]: grid values alone must reach (1 - eps) of the band norm
    a_m = grid.anchors[-1]
    band_norm = sup_norm_certified(f, (0.0, a_m), _NORM_TOL).lower
    margin = float(coords[: len(grid.points)].max()) - (1 - grid.epsilon) * band_norm
    return ratio, margin


def verify_sandwich(
    seq: MuntzSequence,
    n: int,
    epsilon: float,
    trials: int,
    seed: int,
    m: int = 8,
    safety: float = DEFAULT_SAFETY,
    config: BernsteinConfig | None = None,
    constants=None,
) -> EmbeddingReport:
    """Check ``(1 - eps) ||f|| <= ||J f|| <= ||f||`` on random unit polynomials."""
    if trials < 1:
        raise MuntzError("need at least one trial")
    if any(0 < e < 1 for e in seq.exponents[: seq.prefix_size(n)]):
        raise MuntzError("positive exponents must be >= 1")
    anchors = default_anchors(m)
    if constants is None:
        constants = k_sequence(seq, n, anchors, safety, config)
    grid = build_grid(seq, n, epsilon, anchors, constants)
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def one(ss):
        return _sandwich_trial(random_unit_polynomial(seq, n, ss), grid)

    results = pmap(one, seeds)
    ratios = np.array([r for r, _ in results])
    margins = np.array([mg for _, mg in results])
    threshold = (1 - epsilon) - SANDWICH_SLACK
    return EmbeddingReport(
        trials=trials,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        epsilon=epsilon,
        violations=int(np.sum(ratios < threshold)),
        band_violations=int(np.sum(margins < -SANDWICH_SLACK)),
        band_min_margin=float(margins.min()),
        grid_points=len(grid.points),
        anchors=tuple(anchors),
        constants=tuple(float(k) for k in constants),
        seed=seed,
    )
