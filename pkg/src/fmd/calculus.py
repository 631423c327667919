"""Consequences of frequency-mimicking assertions.

* Closed forms for mass functions that mimic frequencies at every interior
  count, with the bound on ``q[1]`` that keeps them valid.
* The assertions at smaller ``N`` implied by an assertion at ``N``, and the
  wider windows forced at larger ``N`` once one extra value is fixed.
* The mass left strictly inside an extended window.
* The line geometry in which each conditional probability ``p[a]`` at size
  ``N`` is drawn as a line through ``(-a, -(N-a))`` with slope
  ``(1-p)/p``; coherent triples of lines are concurrent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np

from .completions import PaNAssertion, build_predictive, completion_values
from .core import (
    MassFunction,
    harmonic_sum,
    invert_to_mass,
    reduce_mass_to,
    reduce_predictive,
)
from .errors import (
    BoundViolationError,
    DimensionError,
    InvalidExtensionError,
    NonCoherentTripleError,
    NotExtendibleError,
)
from .special import logsumexp

__all__ = [
    "theorem1_bound",
    "theorem1_mass",
    "theorem2_sum_bound_check",
    "implied_reductions",
    "verify_theorem3",
    "exact_predictive",
    "reduce_exact",
    "forced_extension",
    "ExtensionScenario",
    "extend_assertion",
    "InteriorMass",
    "interior_mass",
    "ConditionalLine",
    "Concurrency",
    "line_for_conditional",
    "concurrency_check",
    "line_system",
]

Number = Union[float, Fraction]

#: Relative slack under which a ``q[1]`` slightly above the bound is accepted.
BOUND_SLACK = 1e-12
#: Tolerance for floating-point concurrency and coherence checks.
GEOMETRY_TOL = 1e-10
_LOG_DBL_MAX = math.log(np.finfo(float).max)


# ---------------------------------------------------------------------------
# Fully frequency-mimicking mass functions


def theorem1_bound(N: int, q0: float) -> float:
    """Largest admissible ``q[1]`` given ``q[0]``: ``(1-q0) / (2 [N/(N+1)] H(N))``."""
    if N < 1:
        raise DimensionError("N must be at least 1")
    if not 0.0 <= q0 < 1.0:
        raise BoundViolationError(f"q0 must lie in [0, 1), got {q0!r}")
    return (1.0 - q0) / (2.0 * (N / (N + 1)) * harmonic_sum(N))


def theorem1_mass(N: int, q0: float, q1: float) -> MassFunction:
    """Mass of ``S_{N+1}`` with ``p[a] = a/N`` for every ``1 <= a <= N-1``.

    The free values ``q[0]`` and ``q[1]`` determine the rest:
    ``q[a] = q1 N / (a (N-a+1))`` for ``1 <= a <= N`` and
    ``q[N+1] = 1 - q0 - 2 q1 [N/(N+1)] H(N)``.

    Raises:
        BoundViolationError: if ``q1`` is negative or exceeds
            :func:`theorem1_bound`.
    """
    bound = theorem1_bound(N, q0)
    if q1 < 0.0 or q1 > bound * (1.0 + BOUND_SLACK):
        raise BoundViolationError(f"q1 = {q1!r} is outside [0, {bound!r}]")
    a = np.arange(1, N + 1, dtype=float)
    interior = q1 * (N / (a * (N - a + 1.0)))
    last = 1.0 - q0 - 2.0 * q1 * (N / (N + 1)) * harmonic_sum(N)
    if last < 0.0:
        # q1 sits on the bound up to rounding
        last = 0.0
    return MassFunction.from_linear(np.concatenate(([q0], interior, [last])))


def theorem2_sum_bound_check(N: int, M: int, q0: float, q1: float) -> tuple[float, float]:
    """Interior mass after reducing a fully mimicking mass to ``M`` events.

    Returns:
        ``(lhs, rhs)`` with ``lhs = sum_{a=1}^{M-1} q[a]`` of the reduced
        mass and ``rhs = 2**M [(N+2-M)/(N+1)] q1``; ``lhs <= rhs`` holds.
        ``rhs`` is ``inf`` when it exceeds the double range.
    """
    if not 1 <= M < N + 1:
        raise DimensionError(f"need 1 <= M < N+1, got M={M}, N={N}")
    reduced = reduce_mass_to(theorem1_mass(N, q0, q1), M)
    lhs = math.fsum(reduced.values[1:M])
    if q1 == 0.0:
        return lhs, 0.0
    log_rhs = M * math.log(2.0) + math.log((N + 2 - M) / (N + 1)) + math.log(q1)
    rhs = math.exp(log_rhs) if log_rhs < _LOG_DBL_MAX else math.inf
    return lhs, rhs


# ---------------------------------------------------------------------------
# Implied reductions and forced extensions


def implied_reductions(assertion: PaNAssertion) -> list[PaNAssertion]:
    """Assertions at ``n = N-1, ..., N-(a2-a1)`` implied by coherency.

    Each level keeps ``a1`` and the bounds and drops the top of the window by
    one: ``Pa n [a1, a2 - (N-n), pL, pU]``.
    """
    N, a1, a2 = assertion.N, assertion.a1, assertion.a2
    n0 = N - (a2 - a1)
    return [
        PaNAssertion(n, a1, a2 - (N - n), assertion.pL, assertion.pU)
        for n in range(N - 1, n0 - 1, -1)
    ]


def exact_predictive(assertion: PaNAssertion, kind) -> list[Fraction]:
    """Predictive vector as exact rationals: ``a/N`` in the window, and the
    binary value of the floating completion outside it."""
    values = completion_values(assertion, kind, np.arange(assertion.N + 1))
    return [
        Fraction(a, assertion.N) if assertion.a1 <= a <= assertion.a2 else Fraction(float(v))
        for a, v in enumerate(values)
    ]


def reduce_exact(p: list[Fraction]) -> list[Fraction]:
    return [p[a] / (1 - p[a + 1] + p[a]) for a in range(len(p) - 1)]


def verify_theorem3(assertion: PaNAssertion, kind, exact: bool = False) -> Number:
    """Largest ``|p[a, n] - a/n|`` over all implied windows.

    Builds the completed predictive vector and reduces it one level at a
    time down to ``n0 = N - (a2 - a1)``, comparing each level's window
    ``[a1, a2 - (N-n)]`` with frequency mimicking.

    Args:
        exact: Reduce in rational arithmetic; the result is then exactly 0.
    """
    N, a1, a2 = assertion.N, assertion.a1, assertion.a2
    worst: Number = Fraction(0) if exact else 0.0
    if exact:
        p = exact_predictive(assertion, kind)
        for n in range(N - 1, N - (a2 - a1) - 1, -1):
            p = reduce_exact(p)
            top = a2 - (N - n)
            worst = max(worst, max(abs(p[a] - Fraction(a, n)) for a in range(a1, top + 1)))
        return worst
    p = build_predictive(assertion, kind)
    for n in range(N - 1, N - (a2 - a1) - 1, -1):
        p = reduce_predictive(p)
        top = a2 - (N - n)
        a = np.arange(a1, top + 1)
        worst = max(worst, float(np.max(np.abs(p.values[a1 : top + 1] - a / n))))
    return worst


def forced_extension(assertion: PaNAssertion, a_star: int) -> list[tuple[int, Fraction]]:
    """Values ``p[a, N+1]`` forced by asserting ``p[a_star, N+1] = a_star/(N+1)``.

    Starting from ``a_star``, the reduction relation between sizes ``N+1``
    and ``N`` is solved forward,
    ``p[a+1, N+1] = 1 + p[a, N+1] - p[a, N+1] / p[a, N]``,
    and then backward,
    ``p[a-1, N+1] = r (1 - p[a, N+1]) / (1 - r)`` with ``r = p[a-1, N]``,
    using the mimicking values ``p[a, N] = a/N`` on the window. All
    arithmetic is exact.

    Returns:
        ``[(a, p[a, N+1])]`` for ``a = a1 .. a2+1``; every value is
        ``a/(N+1)``.

    Raises:
        NotExtendibleError: unless ``a1/N <= a_star/(N+1) <= a2/N``
            (equivalently ``a1 + 1 <= a_star <= a2``).
    """
    N, a1, a2 = assertion.N, assertion.a1, assertion.a2
    a_star = int(a_star)
    x = Fraction(a_star, N + 1)
    if not Fraction(a1, N) <= x <= Fraction(a2, N):
        raise NotExtendibleError(
            f"{a_star}/{N + 1} lies outside [{a1}/{N}, {a2}/{N}]; "
            f"admissible anchors are {a1 + 1}..{a2}"
        )
    forced = {a_star: x}
    for a in range(a_star, a2 + 1):
        y, r = forced[a], Fraction(a, N)
        forced[a + 1] = 1 + y - y / r
    for a in range(a_star, a1, -1):
        y, r = forced[a], Fraction(a - 1, N)
        forced[a - 1] = r * (1 - y) / (1 - r)
    return sorted(forced.items())


@dataclass(frozen=True)
class ExtensionScenario:
    """An assertion at ``N`` extended to ``N + K`` with new extreme bounds.

    ``pL_ext``/``pU_ext`` default to the base bounds, tightened where needed
    to ``a1/(N+K+1)`` and ``(a2+K)/(N+K)``.
    """

    base: PaNAssertion
    K: int
    pL_ext: float | None = field(default=None)
    pU_ext: float | None = field(default=None)

    def __post_init__(self) -> None:
        base, K = self.base, self.K
        if int(K) != K or K < 0:
            raise InvalidExtensionError(f"K must be a nonnegative integer, got {K!r}")
        object.__setattr__(self, "K", int(K))
        NK = base.N + self.K
        lo_cap = base.a1 / (NK + 1)
        hi_floor = (base.a2 + self.K) / NK
        pL = min(base.pL, lo_cap) if self.pL_ext is None else float(self.pL_ext)
        pU = max(base.pU, hi_floor) if self.pU_ext is None else float(self.pU_ext)
        if not 0.0 < pL <= lo_cap:
            raise InvalidExtensionError(
                f"pL_ext = {pL!r} must lie in (0, a1/(N+K+1) = {lo_cap!r}]"
            )
        if not hi_floor <= pU < 1.0:
            raise InvalidExtensionError(
                f"pU_ext = {pU!r} must lie in [(a2+K)/(N+K) = {hi_floor!r}, 1)"
            )
        object.__setattr__(self, "pL_ext", pL)
        object.__setattr__(self, "pU_ext", pU)


def extend_assertion(scenario: ExtensionScenario) -> PaNAssertion:
    """``Pa(N+K)[a1, a2+K, pL_ext, pU_ext]``."""
    b, K = scenario.base, scenario.K
    return PaNAssertion(b.N + K, b.a1, b.a2 + K, scenario.pL_ext, scenario.pU_ext)


class InteriorMass(NamedTuple):
    direct_sum: float
    closed_form: float


def interior_mass(scenario: ExtensionScenario, kind) -> InteriorMass:
    """Mass on the extended window ``a1 <= a <= a2+K``, two ways.

    ``direct_sum`` adds up the completed, extended mass function.
    ``closed_form`` uses the window's structure ``q[a] ~ 1/(a (M-a))`` with
    ``M = N+K+1``:
    ``q[a1] [a1 (M-a1)/M] [H(a2+K) - H(a1-1) + H(M-a1) - H(N-a2)]``.
    Both depend only on frequency mimicking inside the window, so they agree
    for every completion.
    """
    ext = extend_assertion(scenario)
    q = invert_to_mass(build_predictive(ext, kind))
    b, K = scenario.base, scenario.K
    a1, top = b.a1, b.a2 + K
    M = b.N + K + 1
    direct = math.exp(logsumexp(q.log_values[a1 : top + 1]))
    bracket = (
        harmonic_sum(top)
        - harmonic_sum(a1 - 1)
        + harmonic_sum(M - a1)
        - harmonic_sum(b.N - b.a2)
    )
    closed = math.exp(q.log_values[a1] + math.log(a1 * (M - a1) / M) + math.log(bracket))
    return InteriorMass(direct, closed)


# ---------------------------------------------------------------------------
# Line geometry


@dataclass(frozen=True)
class ConditionalLine:
    """The line representing ``p = p[a, N]``: through ``(-a, -(N-a))`` with
    slope ``(1-p)/p``. Exact when ``p`` is a :class:`~fractions.Fraction`."""

    a: int
    N: int
    p: Number

    @property
    def anchor_point(self) -> tuple[int, int]:
        return (-self.a, -(self.N - self.a))

    @property
    def slope(self) -> Number:
        return (1 - self.p) / self.p

    def beta_at(self, alpha: Number) -> Number:
        """Ordinate of the line at abscissa ``alpha``."""
        return -(self.N - self.a) + (self.a + alpha) * self.slope


def line_for_conditional(a: int, N: int, p: Number) -> ConditionalLine:
    """Line for the conditional probability ``p[a, N] = p``."""
    if not 0 <= a <= N:
        raise DimensionError(f"need 0 <= a <= N, got a={a}, N={N}")
    if not 0 < p < 1:
        raise NonCoherentTripleError(f"p must lie in (0, 1), got {p!r}")
    return ConditionalLine(int(a), int(N), p)


class Concurrency(NamedTuple):
    """Common point of a coherent triple, or ``parallel=True`` when all three
    lines share one slope."""

    point: tuple[Number, Number] | None
    parallel: bool


def _close(x: Number, y: Number) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    return abs(float(x) - float(y)) <= GEOMETRY_TOL * max(1.0, abs(float(x)), abs(float(y)))


def concurrency_check(
    lower: ConditionalLine, upper: ConditionalLine, reduced: ConditionalLine
) -> Concurrency:
    """Verify that the lines for ``p[a,N]``, ``p[a+1,N]``, ``p[a,N-1]`` meet.

    Raises:
        NonCoherentTripleError: if the indices do not form a triple, the
            values violate ``p[a,N-1] = p[a,N] / (1 - p[a+1,N] + p[a,N])``, or
            the third line misses the common point.
    """
    a, N = lower.a, lower.N
    if (upper.a, upper.N) != (a + 1, N) or (reduced.a, reduced.N) != (a, N - 1):
        raise NonCoherentTripleError(
            f"lines ({lower.a},{lower.N}), ({upper.a},{upper.N}), ({reduced.a},{reduced.N}) "
            "are not p[a,N], p[a+1,N], p[a,N-1]"
        )
    implied = lower.p / (1 - upper.p + lower.p)
    if not _close(implied, reduced.p):
        raise NonCoherentTripleError(
            f"p[{a},{N - 1}] = {reduced.p!r} but coherence requires {implied!r}"
        )
    s1, s2 = lower.slope, upper.slope
    if _close(s1, s2):
        if not _close(reduced.slope, s1):
            raise NonCoherentTripleError("parallel pair but the reduced line is not parallel")
        return Concurrency(None, True)
    (x1, y1), (x2, y2) = lower.anchor_point, upper.anchor_point
    alpha = (y2 - y1 + x1 * s1 - x2 * s2) / (s1 - s2)
    beta = lower.beta_at(alpha)
    if not _close(reduced.beta_at(alpha), beta):
        raise NonCoherentTripleError(
            f"line for p[{a},{N - 1}] misses the intersection ({alpha!r}, {beta!r})"
        )
    return Concurrency((alpha, beta), False)


class TripleResult(NamedTuple):
    N: int
    a: int
    in_window: bool
    concurrency: Concurrency


def line_system(assertion: PaNAssertion, kind) -> list[TripleResult]:
    """Concurrency of every triple along the whole implied reduction chain.

    Works in exact arithmetic, so triples drawn from the mimicking window
    meet at the origin exactly.
    """
    N, a1, a2 = assertion.N, assertion.a1, assertion.a2
    p = exact_predictive(assertion, kind)
    results = []
    for n in range(N, N - (a2 - a1), -1):
        reduced = reduce_exact(p)
        top = a2 - (N - n)
        for a in range(n):
            c = concurrency_check(
                line_for_conditional(a, n, p[a]),
                line_for_conditional(a + 1, n, p[a + 1]),
                line_for_conditional(a, n - 1, reduced[a]),
            )
            results.append(TripleResult(n, a, a1 <= a and a + 1 <= top, c))
        p = reduced
    return results
