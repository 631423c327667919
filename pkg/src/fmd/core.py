"""Predictive vectors, mass functions and the exact calculus between them.

A predictive vector holds ``p[a] = P(E_{N+1} | S_N = a)`` for ``a = 0..N``.
A mass function holds ``q[a] = P(S_{N+1} = a)`` for ``a = 0..N+1`` and is
stored as natural logarithms: at ``N = 10**5`` the products of odds ratios
that link the two span tens of thousands of orders of magnitude.

All objects are immutable and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import (
    DegenerateMassError,
    DimensionError,
    InvalidMassError,
    InvalidPredictiveError,
    PrecisionError,
)
from .special import log_hypergeom_pmf, logsumexp

__all__ = [
    "MASS_SUM_TOL",
    "PredictiveVector",
    "MassFunction",
    "DensityHistogram",
    "invert_to_mass",
    "mass_to_predictive",
    "roundtrip_check",
    "reduce_mass_one",
    "reduce_mass_to",
    "reduce_predictive",
    "harmonic_sum",
    "density_histogram",
]

#: Largest accepted deviation of an input mass function's total from one.
MASS_SUM_TOL = 1e-9
#: Number of hypergeometric weights evaluated per block in ``reduce_mass_to``.
_REDUCE_BLOCK = 1 << 20
#: Relative cost of one hypergeometric weight to one step update.
_DIRECT_COST = 12
#: Fixed per-step cost of the one-step recursion, in element updates.
_STEP_OVERHEAD = 600


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PredictiveVector:
    """Conditional probabilities ``p[a] = P(E_{N+1} | S_N = a)``, ``a = 0..N``.

    Every entry must lie in the open interval (0, 1).

    Attributes:
        values: Read-only float array of length ``N + 1``.
        log_odds: Optional read-only ``log(p / (1 - p))`` of the same length.
            When a vector is derived from a mass function it keeps the log
            odds it was computed from, since ``1 - p`` cannot be recovered
            from a double ``p`` close to one.
    """

    values: np.ndarray
    log_odds: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_log_odds(cls, log_odds: Sequence[float] | np.ndarray) -> "PredictiveVector":
        """Build from log odds, keeping them for later inversion.

        Raises:
            PrecisionError: if some ``p`` rounds to exactly 0 or 1.
        """
        lo = np.asarray(log_odds, dtype=float)
        if np.isnan(lo).any():
            raise InvalidPredictiveError("log odds contain NaN")
        p = expit(lo)
        if ((p <= 0.0) | (p >= 1.0)).any():
            raise PrecisionError("a predictive probability rounds to 0 or 1 in double precision")
        return cls(p, lo)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidPredictiveError("a predictive vector is a non-empty 1-D array")
        bad = ~((arr > 0.0) & (arr < 1.0))
        if bad.any():
            a = int(np.flatnonzero(bad)[0])
            raise InvalidPredictiveError(
                f"p[{a}] = {arr[a]!r} is outside the open interval (0, 1)"
            )
        object.__setattr__(self, "values", _readonly(arr))
        if self.log_odds is not None:
            lo = np.asarray(self.log_odds, dtype=float)
            if lo.shape != arr.shape or not np.isfinite(lo).all():
                raise InvalidPredictiveError("log odds must be finite and match the values in length")
            object.__setattr__(self, "log_odds", _readonly(lo))

    @property
    def N(self) -> int:
        """Number of conditioning events."""
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"PredictiveVector(N={self.N})"


@dataclass(frozen=True, eq=False)
class MassFunction:
    """Probability mass function ``q[a] = P(S_{N+1} = a)``, ``a = 0..N+1``.

    Stored as natural logarithms (``-inf`` marks an exact zero). The
    constructor accepts totals within :data:`MASS_SUM_TOL` of one and
    renormalizes them exactly; use :meth:`from_log_weights` for unnormalized
    input.

    Attributes:
        log_values: Read-only array of ``log q[a]``, length ``N + 2``.
    """

    log_values: np.ndarray

    def __post_init__(self) -> None:
        lq = np.asarray(self.log_values, dtype=float)
        if lq.ndim != 1 or lq.size < 2:
            raise InvalidMassError("a mass function needs at least two components")
        if np.isnan(lq).any() or np.isposinf(lq).any():
            raise InvalidMassError("log masses must be finite or -inf")
        total = logsumexp(lq)
        if not abs(math.expm1(total)) <= MASS_SUM_TOL:
            raise InvalidMassError(
                f"masses sum to {math.exp(total)!r}, not 1 within {MASS_SUM_TOL:g}"
            )
        object.__setattr__(self, "log_values", _readonly(lq - total))

    @classmethod
    def from_linear(cls, values: Sequence[float] | np.ndarray) -> "MassFunction":
        """Build from ordinary probabilities (nonnegative, summing to 1)."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or not np.isfinite(arr).all() or (arr < 0).any():
            raise InvalidMassError("masses must be finite and nonnegative")
        with np.errstate(divide="ignore"):
            return cls(np.log(arr))

    @classmethod
    def from_log(cls, log_values: Sequence[float] | np.ndarray) -> "MassFunction":
        """Build from log masses whose exponentials sum to 1."""
        return cls(np.asarray(log_values, dtype=float))

    @classmethod
    def from_log_weights(cls, log_weights: Sequence[float] | np.ndarray) -> "MassFunction":
        """Build from unnormalized log weights by max-shifted log-sum-exp."""
        lw = np.asarray(log_weights, dtype=float)
        if lw.ndim != 1 or np.isnan(lw).any() or np.isposinf(lw).any():
            raise InvalidMassError("log weights must be finite or -inf")
        total = logsumexp(lw)
        if not np.isfinite(total):
            raise InvalidMassError("all weights are zero")
        return cls(lw - total)

    @property
    def Nplus1(self) -> int:
        """Number of summed events."""
        return self.log_values.size - 1

    @property
    def values(self) -> np.ndarray:
        """Linear-space masses (entries below the double range become 0)."""
        return np.exp(self.log_values)

    @property
    def is_strictly_positive(self) -> bool:
        return bool(np.isfinite(self.log_values).all())

    def __len__(self) -> int:
        return self.log_values.size

    def __repr__(self) -> str:
        return f"MassFunction(Nplus1={self.Nplus1})"


@dataclass(frozen=True, eq=False)
class DensityHistogram:
    """Mass function rescaled to a histogram of unit area.

    Attributes:
        bin_centers: Abscissae ``a / (N + 1)``.
        densities: ``(N + 2) * q[a]``.
        bin_width: ``1 / (N + 2)``.
    """

    bin_centers: np.ndarray
    densities: np.ndarray
    bin_width: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "bin_centers", _readonly(self.bin_centers))
        object.__setattr__(self, "densities", _readonly(self.densities))


def _cumsum_compensated(x: np.ndarray) -> np.ndarray:
    """Prefix sums carrying the exact rounding error of every step.

    ``np.cumsum`` adds sequentially, so each step's error can be recovered
    exactly with the TwoSum transformation and summed separately.
    """
    s = np.cumsum(x)
    prev = np.concatenate(([0.0], s[:-1]))
    bp = s - prev
    ap = s - bp
    err = (prev - ap) + (x - bp)
    return s + np.cumsum(err)


def _log_odds(p: np.ndarray) -> np.ndarray:
    return np.log(p) - np.log1p(-p)


def invert_to_mass(p: PredictiveVector) -> MassFunction:
    """Mass function of ``S_{N+1}`` implied by a predictive vector.

    Uses the recursion ``q[a+1] / q[a] = (N+1-a)/(a+1) * p[a]/(1-p[a])``,
    accumulated in log space and normalized by log-sum-exp.

    Args:
        p: Predictive vector of length ``N + 1``.

    Returns:
        MassFunction of length ``N + 2``; all components strictly positive.
    """
    if not isinstance(p, PredictiveVector):
        p = PredictiveVector(np.asarray(p, dtype=float))
    N = p.N
    a = np.arange(N + 1, dtype=float)
    log_odds = p.log_odds if p.log_odds is not None else _log_odds(p.values)
    steps = np.log(N + 1 - a) - np.log(a + 1.0) + log_odds
    lq = np.concatenate(([0.0], _cumsum_compensated(steps)))
    return MassFunction.from_log_weights(lq)


def mass_to_predictive(q: MassFunction) -> PredictiveVector:
    """Predictive vector implied by a strictly positive mass function.

    ``p[a] = (a+1) q[a+1] / [(a+1) q[a+1] + (N+1-a) q[a]]``, evaluated as the
    logistic of a log-space difference.

    Raises:
        DegenerateMassError: if any component of ``q`` is zero.
        PrecisionError: if a predictive value rounds to exactly 0 or 1.
    """
    lq = q.log_values
    if not np.isfinite(lq).all():
        a = int(np.flatnonzero(~np.isfinite(lq))[0])
        raise DegenerateMassError(f"q[{a}] = 0; zero components are not supported")
    N = q.Nplus1 - 1
    a = np.arange(N + 1, dtype=float)
    u = np.log(a + 1.0) + lq[1:]
    v = np.log(N + 1 - a) + lq[:-1]
    return PredictiveVector.from_log_odds(u - v)


def roundtrip_check(q: MassFunction) -> float:
    """Max absolute error of ``invert_to_mass(mass_to_predictive(q))`` against ``q``."""
    back = invert_to_mass(mass_to_predictive(q))
    return float(np.max(np.abs(back.values - q.values)))


def reduce_mass_one(q: MassFunction) -> MassFunction:
    """Mass of ``S_N`` implied by the mass of ``S_{N+1}``.

    ``q'[a] = [(N+1-a) q[a] + (a+1) q[a+1]] / (N+1)``.

    Raises:
        DimensionError: if ``q`` describes fewer than two events.
    """
    n = q.Nplus1
    if n < 2:
        raise DimensionError("reduction needs at least two events")
    lq = q.log_values
    a = np.arange(n, dtype=float)
    lw = np.logaddexp(np.log(n - a) + lq[:-1], np.log(a + 1.0) + lq[1:]) - math.log(n)
    return MassFunction.from_log_weights(lw)


def _reduce_stepwise(lq: np.ndarray, M: int) -> np.ndarray:
    """Repeated one-step reduction in log space, normalized only at the end."""
    for n in range(len(lq) - 1, M, -1):
        a = np.arange(n, dtype=float)
        lq = np.logaddexp(np.log(n - a) + lq[:-1], np.log(a + 1.0) + lq[1:]) - math.log(n)
    return lq


def reduce_mass_to(q: MassFunction, M: int) -> MassFunction:
    """Mass of ``S_M`` implied by the mass of ``S_{N+1}``, for ``M <= N+1``.

    ``q'[a] = sum_A w(A, a) q[A]`` with hypergeometric weights
    ``w = C(A, a) C(N+1-A, M-a) / C(N+1, M)``, in log space, ``O(M N)`` work.

    Raises:
        DimensionError: if ``M`` is not in ``1..N+1``.
    """
    n = q.Nplus1
    M = int(M)
    if not 1 <= M <= n:
        raise DimensionError(f"cannot reduce {n} events to {M}")
    if M == n:
        return q
    lq = q.log_values
    # one-step recursion costs ~(n+M)/2 cheap updates plus a fixed overhead
    # per step; the direct sum costs (M+1)(n-M+1) saddle-point weights, each
    # ~_DIRECT_COST times dearer than an update
    if (n - M) * ((n + M) / 2 + _STEP_OVERHEAD) < _DIRECT_COST * (M + 1) * (n - M + 1):
        return MassFunction.from_log_weights(_reduce_stepwise(lq, M))
    width = n - M + 1  # number of source counts A = a .. a + width - 1
    offsets = np.arange(width)
    rows = max(1, _REDUCE_BLOCK // width)
    out = np.empty(M + 1)
    for start in range(0, M + 1, rows):
        a = np.arange(start, min(M + 1, start + rows))[:, None]
        A = a + offsets
        lw = log_hypergeom_pmf(a.astype(float), A.astype(float), (n - A).astype(float), M)
        out[start : start + a.shape[0]] = logsumexp(lw + lq[A], axis=1)
    return MassFunction.from_log_weights(out)


def reduce_predictive(p: PredictiveVector) -> PredictiveVector:
    """Predictive vector for ``N - 1`` conditioning events.

    ``p'[a] = p[a] / (1 - p[a+1] + p[a])``.

    Raises:
        DimensionError: if ``N < 1``.
    """
    if p.N < 1:
        raise DimensionError("reduction needs N >= 1")
    v = p.values
    return PredictiveVector(v[:-1] / (1.0 - v[1:] + v[:-1]))


def harmonic_sum(N: int) -> float:
    """``H(N) = 1 + 1/2 + ... + 1/N`` (``H(0) = 0``), exactly rounded."""
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    return math.fsum(1.0 / k for k in range(N, 0, -1))


def density_histogram(q: MassFunction) -> DensityHistogram:
    """Unit-area histogram: heights ``(N+2) q[a]`` at abscissae ``a/(N+1)``."""
    n = q.Nplus1
    return DensityHistogram(
        bin_centers=np.arange(n + 1, dtype=float) / n,
        densities=(n + 1) * q.values,
        bin_width=1.0 / (n + 1),
    )
