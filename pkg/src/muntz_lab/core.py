"""Müntz sequences, Müntz polynomials and certified sup-norms.

A Müntz polynomial is a finite sum ``p(t) = sum_i a_i t**lam_i`` on [0, 1]
with strictly increasing non-negative exponents.  Everything here works in
binary64; certified quantities come with explicit two-sided bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# relative tolerance used when checking that exponents match a family rule
_FAMILY_RTOL = 1e-12
# initial number of uniform cells used by the certifier
_INITIAL_CELLS = 64
DEFAULT_MAX_POINTS = 10_000_000


class MuntzError(ValueError):
    """Invalid Müntz sequence or polynomial input."""


class CertificationError(RuntimeError):
    """A sup-norm certificate could not reach the requested tolerance."""


@dataclass(frozen=True)
class MuntzSequence:
    """Finite prefix of a Müntz exponent sequence.

    ``family`` is ``"explicit"``, ``"power"`` or ``"geometric"``; ``parameter``
    holds ``s`` for power families (nonzero exponents ``1**s, 2**s, ...``) and
    the ratio ``r`` for geometric ones (nonzero exponents ``r**0, r**1, ...``).
    """

    exponents: tuple[float, ...]
    family: str = "explicit"
    parameter: float | None = None

    @property
    def includes_constant(self) -> bool:
        return self.exponents[0] == 0.0

    @property
    def positive_exponents(self) -> tuple[float, ...]:
        return tuple(e for e in self.exponents if e > 0)

    def __len__(self) -> int:
        return len(self.exponents)

    def prefix_size(self, n: int) -> int:
        """Number of stored exponents with index at most ``n``.

        Indices follow the usual convention: the constant exponent, when
        present, has index 0 and the first positive exponent has index 1.
        """
        size = n + 1 if self.includes_constant else n
        if n < 0 or size > len(self.exponents):
            raise MuntzError(
                f"prefix index {n} out of range for a sequence of length {len(self)}"
            )
        return size

    def prefix(self, n: int) -> MuntzSequence:
        return MuntzSequence(self.exponents[: self.prefix_size(n)], self.family, self.parameter)

    def constant_free(self) -> MuntzSequence:
        """The same sequence with the constant exponent removed."""
        if not self.includes_constant:
            return self
        if len(self.exponents) == 1:
            raise MuntzError("sequence has no positive exponents")
        return MuntzSequence(self.exponents[1:], self.family, self.parameter)

    @classmethod
    def power(cls, s: float, count: int, include_constant: bool = False) -> MuntzSequence:
        exps = [float(i) ** s for i in range(1, count + 1)]
        if include_constant:
            exps.insert(0, 0.0)
        return validate_sequence(exps, "power", s)

    @classmethod
    def geometric(cls, r: float, count: int, include_constant: bool = False) -> MuntzSequence:
        exps = [float(r) ** i for i in range(count)]
        if include_constant:
            exps.insert(0, 0.0)
        return validate_sequence(exps, "geometric", r)

    def to_dict(self) -> dict:
        d: dict = {"exponents": list(self.exponents), "family": self.family}
        if self.family == "geometric":
            d["ratio"] = self.parameter
        elif self.family == "power":
            d["power"] = self.parameter
        return d

    @classmethod
    def from_dict(cls, d: dict) -> MuntzSequence:
        family = d.get("family", "explicit")
        param = d.get("ratio") if family == "geometric" else d.get("power")
        return validate_sequence(d["exponents"], family, param)


def validate_sequence(
    raw_exponents: Sequence[float], family: str = "explicit", parameter: float | None = None
) -> MuntzSequence:
    """Check exponents and wrap them in a :class:`MuntzSequence`."""
    exps = [float(e) for e in raw_exponents]
    if not exps:
        raise MuntzError("exponent list is empty")
    for i, e in enumerate(exps):
        if not math.isfinite(e):
            raise MuntzError(f"exponent at index {i} is not finite: {e}")
        if e < 0:
            raise MuntzError(f"exponent at index {i} is negative: {e}")
        if i > 0 and e <= exps[i - 1]:
            raise MuntzError(
                f"exponents not strictly increasing at index {i}: {exps[i - 1]} >= {e}"
            )

    if family == "explicit":
        parameter = None
    elif family in ("power", "geometric"):
        if parameter is None:
            raise MuntzError(f"family {family!r} needs a parameter")
        parameter = float(parameter)
        if family == "power" and parameter <= 0:
            raise MuntzError("power family needs s > 0")
        if family == "geometric" and parameter <= 1:
            raise MuntzError("geometric family needs ratio r > 1")
        offset = 1 if exps[0] == 0.0 else 0
        for j, e in enumerate(exps[offset:]):
            expected = (j + 1) ** parameter if family == "power" else parameter**j
            if not math.isclose(e, expected, rel_tol=_FAMILY_RTOL):
                raise MuntzError(
                    f"exponent at index {j + offset} is {e}, {family} family expects {expected}"
                )
    else:
        raise MuntzError(f"unknown family kind {family!r}")
    return MuntzSequence(tuple(exps), family, parameter)


@dataclass(frozen=True)
class ConvergenceReport:
    partial_sum: float
    verdict: str
    rationale: str

    def to_dict(self) -> dict:
        return {"partial_sum": self.partial_sum, "verdict": self.verdict, "rationale": self.rationale}


def check_muntz_condition(seq: MuntzSequence) -> ConvergenceReport:
    """Partial reciprocal sum and a verdict on whether sum 1/lam_i converges."""
    partial = math.fsum(1.0 / e for e in seq.positive_exponents)
    if seq.family == "power":
        if seq.parameter > 1:
            return ConvergenceReport(partial, "convergent", "p-series with s > 1")
        return ConvergenceReport(partial, "divergent", "p-series with s <= 1")
    if seq.family == "geometric":
        return ConvergenceReport(partial, "convergent", "geometric series with ratio 1/r < 1")
    return ConvergenceReport(partial, "inconclusive", "explicit finite list")


@dataclass(frozen=True, eq=False)
class MuntzPolynomial:
    """``sum_i coefficients[i] * t**sequence.exponents[i]``."""

    sequence: MuntzSequence
    coefficients: tuple[float, ...] = field(default=())

    def __post_init__(self):
        coefs = tuple(float(c) for c in self.coefficients)
        if not coefs:
            coefs = (0.0,)
        if len(coefs) > len(self.sequence):
            raise MuntzError(
                f"{len(coefs)} coefficients for a sequence of length {len(self.sequence)}"
            )
        object.__setattr__(self, "coefficients", coefs)

    @property
    def exponents(self) -> tuple[float, ...]:
        return self.sequence.exponents[: len(self.coefficients)]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __call__(self, t):
        return evaluate(self, t)

    def _combine(self, other: MuntzPolynomial, sign: float) -> MuntzPolynomial:
        seq = self.sequence if len(self.sequence) >= len(other.sequence) else other.sequence
        n = max(len(self), len(other))
        if self.exponents != seq.exponents[: len(self)] or other.exponents != seq.exponents[: len(other)]:
            raise MuntzError("polynomials live on different exponent sequences")
        a = np.zeros(n)
        a[: len(self)] += self.coefficients
        a[: len(other)] += sign * np.asarray(other.coefficients)
        return MuntzPolynomial(seq, tuple(a))

    def __add__(self, other: MuntzPolynomial) -> MuntzPolynomial:
        return self._combine(other, 1.0)

    def __sub__(self, other: MuntzPolynomial) -> MuntzPolynomial:
        return self._combine(other, -1.0)

    def __neg__(self) -> MuntzPolynomial:
        return self.scaled(-1.0)

    def scaled(self, factor: float) -> MuntzPolynomial:
        return MuntzPolynomial(self.sequence, tuple(factor * c for c in self.coefficients))

    def to_dict(self) -> dict:
        d = self.sequence.to_dict()
        d["coefficients"] = list(self.coefficients)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> MuntzPolynomial:
        return cls(MuntzSequence.from_dict(d), tuple(d["coefficients"]))


def monomial(seq: MuntzSequence, index: int, coef: float = 1.0) -> MuntzPolynomial:
    """``coef * t**seq.exponents[index]``."""
    a = [0.0] * (index + 1)
    a[index] = coef
    return MuntzPolynomial(seq, tuple(a))


def _power_table(t: np.ndarray, exps: np.ndarray) -> np.ndarray:
    # numpy gives 0.0**0.0 == 1.0, which is the convention for the constant term
    return np.power(t[:, None], exps[None, :])


def evaluate_terms(exponents, coefficients, t) -> np.ndarray | float:
    exps = np.asarray(exponents, dtype=float)
    coefs = np.asarray(coefficients, dtype=float)
    ts = np.asarray(t, dtype=float)
    flat = np.atleast_1d(ts).ravel()
    vals = _power_table(flat, exps) @ coefs
    if ts.ndim == 0:
        return float(vals[0])
    return vals.reshape(ts.shape)


def evaluate(p: MuntzPolynomial, t):
    """Value of ``p`` at ``t`` (scalar or array) in [0, 1]."""
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0) or np.any(ts > 1) or np.any(np.isnan(ts)):
        raise MuntzError("evaluation point outside [0, 1]")
    return evaluate_terms(p.exponents, p.coefficients, ts)


@dataclass(frozen=True)
class Derivative:
    """Derivative of a Müntz polynomial as a plain power sum.

    ``unbounded_at_zero`` is set when some exponent ``lam - 1`` is negative,
    i.e. the original polynomial used an exponent in (0, 1).
    """

    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]
    unbounded_at_zero: bool

    def __call__(self, t):
        ts = np.asarray(t, dtype=float)
        if self.unbounded_at_zero and np.any(ts == 0):
            raise MuntzError("derivative is unbounded at t = 0")
        if not self.exponents:
            return np.zeros_like(ts) if ts.ndim else 0.0
        return evaluate_terms(self.exponents, self.coefficients, ts)

    def as_polynomial(self) -> MuntzPolynomial:
        if self.unbounded_at_zero:
            raise MuntzError("derivative is unbounded at t = 0 and is not a Müntz polynomial")
        if not self.exponents:
            return MuntzPolynomial(validate_sequence([0.0]), (0.0,))
        return MuntzPolynomial(validate_sequence(self.exponents), self.coefficients)


def derivative(p: MuntzPolynomial) -> Derivative:
    exps, coefs = [], []
    for lam, a in zip(p.exponents, p.coefficients):
        if lam == 0:
            continue
        exps.append(lam - 1.0)
        coefs.append(a * lam)
    return Derivative(tuple(exps), tuple(coefs), any(e < 0 for e in exps))


def _modulus(exps: np.ndarray, abs_coefs: np.ndarray, h: float) -> float:
    holder = (exps > 0) & (exps < 1)
    lip = exps >= 1
    return float(np.sum(abs_coefs[holder] * h ** exps[holder]) + h * np.sum(abs_coefs[lip] * exps[lip]))


def continuity_modulus(p: MuntzPolynomial, h: float) -> float:
    """Uniform modulus of continuity of ``p`` on [0, 1] at step ``h``.

    Uses ``|t**lam - s**lam| <= lam |t - s|`` for ``lam >= 1`` and
    ``<= |t - s|**lam`` for ``0 < lam < 1``.
    """
    if h <= 0:
        raise MuntzError("modulus step must be positive")
    return _modulus(np.asarray(p.exponents), np.abs(np.asarray(p.coefficients)), h)


@dataclass(frozen=True)
class NormCertificate:
    """Two-sided enclosure ``lower <= sup_[lo, hi] |p| <= upper``."""

    interval: tuple[float, float]
    lower: float
    upper: float
    witness_t: float
    grid_step: float
    modulus_bound: float
    tol: float
    points: int

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "lower": self.lower,
            "upper": self.upper,
            "witness_t": self.witness_t,
            "grid_step": self.grid_step,
            "modulus_bound": self.modulus_bound,
            "tol": self.tol,
            "points": self.points,
        }


def _cell_upper(exps, abs_coefs, u, v, pu, pv):
    """Upper bound on sup |p| over each cell [u, v].

    Three valid bounds are combined by taking the minimum: a local Lipschitz
    bound, a Hölder bound (for exponents in (0, 1)) and a curvature bound
    ``max(|p(u)|, |p(v)|) + M2 w**2 / 8`` from the linear interpolant.
    """
    w = v - u
    au, av = np.abs(pu), np.abs(pv)
    E = exps[None, :]
    U = u[:, None]
    V = v[:, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # local Lipschitz constant of each term on [u, v]
        d1 = np.where(E >= 1, E * V ** (E - 1), np.where(E > 0, E * U ** (E - 1), 0.0))
        L = d1 @ abs_coefs
        b1 = 0.5 * (au + av + L * w)

        # Hölder part for 0 < lam < 1, Lipschitz part for lam >= 1
        hold = np.where((E > 0) & (E < 1), w[:, None] ** E, 0.0) @ abs_coefs
        lipv = np.where(E >= 1, E * V ** (E - 1), 0.0) @ abs_coefs
        bh = np.minimum(au, av) + hold + w * lipv

        c2 = np.abs(E * (E - 1))
        d2 = np.where(E >= 2, c2 * V ** (E - 2), np.where((E > 0) & (E != 1), c2 * U ** (E - 2), 0.0))
        M2 = d2 @ abs_coefs
        b2 = np.maximum(au, av) + M2 * w * w / 8.0

    b1 = np.where(np.isfinite(b1), b1, np.inf)
    b2 = np.where(np.isfinite(b2), b2, np.inf)
    return np.minimum(np.minimum(b1, bh), b2)


def certify_terms(
    exponents,
    coefficients,
    interval: tuple[float, float] = (0.0, 1.0),
    tol: float = 1e-6,
    max_points: int = DEFAULT_MAX_POINTS,
) -> NormCertificate:
    """Certified sup of ``|sum a_i t**e_i|`` on ``interval`` (exponents >= 0)."""
    lo, hi = float(interval[0]), float(interval[1])
    if not (0.0 <= lo <= hi <= 1.0):
        raise MuntzError(f"interval [{lo}, {hi}] is not inside [0, 1]")
    if tol <= 0:
        raise MuntzError("tolerance must be positive")
    exps = np.asarray(exponents, dtype=float)
    coefs = np.asarray(coefficients, dtype=float)
    if np.any(exps < 0):
        raise MuntzError("certification needs non-negative exponents")
    nz = coefs != 0
    exps, coefs = exps[nz], coefs[nz]
    abs_coefs = np.abs(coefs)
    # floating-point evaluation error of a sum with |t**e| <= 1
    pad = 4 * np.finfo(float).eps * (len(coefs) + 1) * float(abs_coefs.sum())

    def f(t):
        return _power_table(t, exps) @ coefs

    if lo == hi or len(coefs) == 0:
        val = abs(float(f(np.array([lo]))[0])) if len(coefs) else 0.0
        return NormCertificate((lo, hi), val, float(val + pad), lo, 0.0, 0.0, tol, 1)

    ts = np.linspace(lo, hi, _INITIAL_CELLS + 1)
    vals = f(ts)
    points = len(ts)
    k = int(np.argmax(np.abs(vals)))
    lower, witness = float(abs(vals[k])), float(ts[k])

    u, v = ts[:-1], ts[1:]
    pu, pv = vals[:-1], vals[1:]
    done_upper = lower
    min_step = float(v[0] - u[0])
    max_excess = 0.0
    while len(u):
        ub = _cell_upper(exps, abs_coefs, u, v, pu, pv)
        settled = ub + pad <= lower + tol
        if np.any(settled):
            done_upper = max(done_upper, float(ub[settled].max()))
            ex = ub[settled] - np.maximum(np.abs(pu[settled]), np.abs(pv[settled]))
            max_excess = max(max_excess, float(ex.max()))
            min_step = min(min_step, float((v[settled] - u[settled]).min()))
        keep = ~settled
        u, v, pu, pv = u[keep], v[keep], pu[keep], pv[keep]
        if not len(u):
            break
        if points + len(u) > max_points:
            raise CertificationError(
                f"tolerance {tol:g} not reached on [{lo}, {hi}] within {max_points} points"
            )
        m = 0.5 * (u + v)
        pm = f(m)
        points += len(m)
        j = int(np.argmax(np.abs(pm)))
        if abs(pm[j]) > lower:
            lower, witness = float(abs(pm[j])), float(m[j])
        u, v = np.concatenate([u, m]), np.concatenate([m, v])
        pu, pv = np.concatenate([pu, pm]), np.concatenate([pm, pv])

    upper = float(max(lower, done_upper) + pad)
    return NormCertificate((lo, hi), lower, upper, witness, min_step, max_excess, tol, points)


def sup_norm_certified(
    p: MuntzPolynomial,
    interval: tuple[float, float] = (0.0, 1.0),
    tol: float = 1e-6,
    max_points: int = DEFAULT_MAX_POINTS,
) -> NormCertificate:
    """Certified enclosure of ``sup_{t in interval} |p(t)|``.

    The interval is cut into cells that are bisected until every cell's upper
    bound is within ``tol`` of the best value seen so far.
    """
    return certify_terms(p.exponents, p.coefficients, interval, tol, max_points)


def random_unit_polynomial(
    seq: MuntzSequence, n: int, seed, norm_tol: float = 1e-10
) -> MuntzPolynomial:
    """Random element of the unit sphere of the span of the first ``n`` exponents.

    Coefficients are independent uniform draws on [-1, 1], then divided by the
    certified lower bound of the sup-norm, so the true norm of the result lies
    in ``[1, 1 + norm_tol]`` up to rounding.  ``seed`` is anything accepted by
    :func:`numpy.random.default_rng`.
    """
    size = seq.prefix_size(n)
    rng = np.random.default_rng(seed)
    while True:
        a = rng.uniform(-1.0, 1.0, size)
        if np.any(a != 0):
            break
    cert = certify_terms(seq.exponents[:size], a, (0.0, 1.0), norm_tol)
    if cert.lower == 0:
        raise MuntzError("sampled polynomial vanishes identically")
    return MuntzPolynomial(seq, tuple(a / cert.lower))


def normalized(p: MuntzPolynomial, norm_tol: float = 1e-10) -> MuntzPolynomial:
    cert = sup_norm_certified(p, (0.0, 1.0), norm_tol)
    if cert.lower == 0:
        raise MuntzError("cannot normalize the zero polynomial")
    return p.scaled(1.0 / cert.lower)


def split_head_tail(p: MuntzPolynomial, n: int) -> tuple[MuntzPolynomial, MuntzPolynomial]:
    """Coefficients with index <= n go to the head, the rest to the tail."""
    if n < 0:
        raise MuntzError("split index must be non-negative")
    a = p.coefficients
    head = a[: n + 1]
    tail = tuple(0.0 for _ in head) + a[n + 1 :]
    return MuntzPolynomial(p.sequence, head), MuntzPolynomial(p.sequence, tail)
