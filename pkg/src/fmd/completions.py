"""PaN assertions and the four reference completions.

An assertion ``PaN[a1, a2, pL, pU]`` fixes ``p[a] = a/N`` on the window
``a1 <= a <= a2`` and bounds the extreme predictive probabilities by ``pL``
(at ``a = 0``) and ``pU`` (at ``a = N``). A completion fills in the values
outside the window:

* ``LINEAR``  -- straight lines joining ``(0, pL)`` to ``(a1/N, a1/N)`` and
  ``(a2/N, a2/N)`` to ``(1, pU)``;
* ``QUARTIC`` -- smooth monotone quartics with the same endpoints, unit
  slope where they meet the window and zero slope and curvature at 0 and 1;
* ``WEAK``    -- the extreme bounds ``pL`` and ``pU`` themselves;
* ``STRICT``  -- the window's edge values ``a1/N`` and ``a2/N``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .core import PredictiveVector
from .errors import InvalidAssertionError, NonMonotoneCompletionError

__all__ = [
    "PaNAssertion",
    "CompletionKind",
    "QuarticPiece",
    "parse_assertion",
    "completion_value",
    "completion_values",
    "build_predictive",
    "quartic_coefficients",
]


@dataclass(frozen=True)
class PaNAssertion:
    """Frequency-mimicking assertion ``PaN[a1, a2, pL, pU]``.

    Attributes:
        N: Number of conditioning events.
        a1: Lowest count with ``p[a] = a/N``; at least 1.
        a2: Highest count with ``p[a] = a/N``; at most ``N - 1``.
        pL: Floor on ``p[0]``; ``0 < pL <= a1/N``.
        pU: Ceiling on ``p[N]``; ``a2/N <= pU < 1``.
    """

    N: int
    a1: int
    a2: int
    pL: float
    pU: float

    def __post_init__(self) -> None:
        for name in ("N", "a1", "a2"):
            value = getattr(self, name)
            if isinstance(value, (bool, np.bool_)) or int(value) != value:
                raise InvalidAssertionError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "pL", float(self.pL))
        object.__setattr__(self, "pU", float(self.pU))
        N, a1, a2, pL, pU = self.N, self.a1, self.a2, self.pL, self.pU
        if N < 2:
            raise InvalidAssertionError(f"N must be at least 2, got {N}")
        if not 1 <= a1 <= a2 <= N - 1:
            raise InvalidAssertionError(
                f"need 1 <= a1 <= a2 <= N-1, got a1={a1}, a2={a2}, N={N}"
            )
        if not 0.0 < pL <= a1 / N:
            raise InvalidAssertionError(f"need 0 < pL <= a1/N = {a1 / N!r}, got pL={pL!r}")
        if not a2 / N <= pU < 1.0:
            raise InvalidAssertionError(f"need a2/N = {a2 / N!r} <= pU < 1, got pU={pU!r}")

    @property
    def x1(self) -> float:
        return self.a1 / self.N

    @property
    def x2(self) -> float:
        return self.a2 / self.N

    def __str__(self) -> str:
        return f"Pa{self.N}[{self.a1},{self.a2},{self.pL!r},{self.pU!r}]"


_ASSERTION_RE = re.compile(
    r"^\s*Pa(?P<N>\d+)\s*\[\s*(?P<a1>\d+)\s*,\s*(?P<a2>\d+)\s*,"
    r"\s*(?P<pL>[^,\]]+)\s*,\s*(?P<pU>[^,\]]+)\s*\]\s*$",
    re.IGNORECASE,
)


def parse_assertion(text: str) -> PaNAssertion:
    """Parse ``"Pa100[25,60,.1,.7]"`` into a :class:`PaNAssertion`."""
    m = _ASSERTION_RE.match(text)
    if m is None:
        raise InvalidAssertionError(f"cannot parse assertion {text!r}; expected PaN[a1,a2,pL,pU]")
    try:
        pL, pU = float(m["pL"]), float(m["pU"])
    except ValueError as exc:
        raise InvalidAssertionError(f"bad probability in {text!r}") from exc
    return PaNAssertion(int(m["N"]), int(m["a1"]), int(m["a2"]), pL, pU)


class CompletionKind(enum.Enum):
    LINEAR = "linear"
    QUARTIC = "quartic"
    WEAK = "weak"
    STRICT = "strict"

    @classmethod
    def parse(cls, value: "str | CompletionKind") -> "CompletionKind":
        """Accept an enum member, its name/value in any case, or L/Q/W/S."""
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        for kind in cls:
            if text in (kind.value, kind.value[0]):
                return kind
        raise InvalidAssertionError(
            f"unknown completion {value!r}; choose from linear, quartic, weak, strict"
        )


@dataclass(frozen=True)
class QuarticPiece:
    """Quartic ``Q(x) = sum_k coef[k] * (x - origin)**k`` on one side of the window."""

    origin: float
    coef: tuple[float, float, float, float, float]

    @property
    def polynomial(self) -> Polynomial:
        """The quartic in the local variable ``x - origin``."""
        return Polynomial(self.coef)

    def __call__(self, x):
        return self.polynomial(np.asarray(x, dtype=float) - self.origin)

    def deriv(self, m: int = 1):
        """Derivative as a callable of the global variable ``x``."""
        poly = self.polynomial.deriv(m)
        return lambda x: poly(np.asarray(x, dtype=float) - self.origin)


def quartic_coefficients(assertion: PaNAssertion, side: str) -> QuarticPiece:
    """Quartic completion piece for ``side`` in ``{"lower", "upper"}``.

    The four endpoint conditions (value and unit slope at the window edge,
    value and zero slope at 0 or 1) leave one coefficient free in a quartic;
    it is fixed by also requiring zero curvature at 0 or 1. The derivative
    then has a double root there, and the piece is monotone exactly when the
    normalized secant slope is at least 1/4.

    Lower side, with ``x1 = a1/N`` and ``d = (x1 - pL)/x1``::

        Q(x) = pL + (alpha/3) x**3 + (beta/4) x**4,
        alpha = (12 d - 3)/x1**2,  beta = (4 - 12 d)/x1**3.

    Upper side, with ``s = x - x2``, ``L = 1 - x2``, ``d = (pU - x2)/L``::

        Q'(x) = (L - s)**2 (1/L**2 + b s),  b = 12 (d - 1/3)/L**3.
    """
    if side == "lower":
        x1, pL = assertion.x1, assertion.pL
        d = (x1 - pL) / x1
        alpha = (12.0 * d - 3.0) / x1**2
        beta = (4.0 - 12.0 * d) / x1**3
        return QuarticPiece(0.0, (pL, 0.0, 0.0, alpha / 3.0, beta / 4.0))
    if side == "upper":
        x2, pU = assertion.x2, assertion.pU
        L = 1.0 - x2
        d = (pU - x2) / L
        alpha = 1.0 / L**2
        beta = 12.0 * (d - 1.0 / 3.0) / L**3
        return QuarticPiece(
            x2,
            (
                x2,
                1.0,
                (beta * L**2 - 2.0 * alpha * L) / 2.0,
                (alpha - 2.0 * beta * L) / 3.0,
                beta / 4.0,
            ),
        )
    raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")


def _window_values(assertion: PaNAssertion, a: np.ndarray) -> np.ndarray:
    return a / assertion.N


def completion_values(assertion: PaNAssertion, kind, a) -> np.ndarray:
    """Vectorized :func:`completion_value` over an array of counts ``a``.

    Raises:
        NonMonotoneCompletionError: if a quartic side is not nondecreasing
            on the integer grid.
    """
    kind = CompletionKind.parse(kind)
    N, a1, a2, pL, pU = (
        assertion.N,
        assertion.a1,
        assertion.a2,
        assertion.pL,
        assertion.pU,
    )
    a = np.asarray(a)
    if a.size and (a.min() < 0 or a.max() > N):
        raise InvalidAssertionError(f"counts must lie in 0..{N}")
    af = a.astype(float)
    out = _window_values(assertion, af)
    lo = a < a1
    hi = a > a2
    if kind is CompletionKind.STRICT:
        out = np.where(lo, a1 / N, out)
        out = np.where(hi, a2 / N, out)
    elif kind is CompletionKind.WEAK:
        out = np.where(lo, pL, out)
        out = np.where(hi, pU, out)
    elif kind is CompletionKind.LINEAR:
        x1, x2 = a1 / N, a2 / N
        out = np.where(lo, pL + (x1 - pL) * (af / a1), out)
        out = np.where(hi, x2 + (pU - x2) * ((af - a2) / (N - a2)), out)
        out = np.where(a == 0, pL, out)
        out = np.where(a == N, pU, out)
    else:
        lower = _checked_quartic(assertion, "lower")
        upper = _checked_quartic(assertion, "upper")
        out = np.where(lo, lower(af / N), out)
        out = np.where(hi, upper(af / N), out)
        out = np.where(a == 0, pL, out)
        out = np.where(a == N, pU, out)
    return out


def _checked_quartic(assertion: PaNAssertion, side: str) -> QuarticPiece:
    """Quartic piece after verifying monotonicity on its integer grid."""
    piece = quartic_coefficients(assertion, side)
    N = assertion.N
    if side == "lower":
        grid = np.arange(0, assertion.a1 + 1)
        vals = piece(grid / N)
        vals[0], vals[-1] = assertion.pL, assertion.a1 / N
    else:
        grid = np.arange(assertion.a2, N + 1)
        vals = piece(grid / N)
        vals[0], vals[-1] = assertion.a2 / N, assertion.pU
    steps = np.diff(vals)
    if (steps < 0).any():
        k = int(grid[np.flatnonzero(steps < 0)[0]])
        raise NonMonotoneCompletionError(
            f"quartic {side} completion of {assertion} decreases between a={k} and a={k + 1}"
        )
    return piece


def completion_value(assertion: PaNAssertion, kind, a: int) -> float:
    """``p[a]`` under the given completion; ``a/N`` inside the window."""
    return float(completion_values(assertion, kind, np.array([int(a)]))[0])


def build_predictive(assertion: PaNAssertion, kind) -> PredictiveVector:
    """Full predictive vector ``p[0..N]`` for the assertion and completion."""
    values = completion_values(assertion, kind, np.arange(assertion.N + 1))
    return PredictiveVector(values)
