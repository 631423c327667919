"""The large-``N`` limit of frequency mimicking over a fixed real interval.

When ``p[a, N] = a/N`` is asserted for every count with ``theta1 <= a/N <=
theta2`` and the completion is Strict or Linear, the mass of ``S_{N+1}``
approaches a Binomial mixture whose mixing density is
``1 / (Z theta (1 - theta))`` on ``(theta1, theta2)``, with
``Z = logit(theta2) - logit(theta1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .completions import PaNAssertion
from .core import MassFunction, density_histogram
from .errors import EmptyWindowError, PrecisionError, UnsupportedParametersError
from .special import log_betainc, log_boundary_integral, log_diff_exp, logsumexp

__all__ = [
    "MIXTURE_SUM_TOL",
    "IncompleteBetaParams",
    "fm_window",
    "fm_assertion",
    "incomplete_beta_density",
    "incomplete_beta_mixture_log_weights",
    "incomplete_beta_mixture_mass",
    "default_margin",
    "compare_to_limit",
]

#: Allowed deviation of the mixture's total from one before renormalizing.
MIXTURE_SUM_TOL = 1e-10


@dataclass(frozen=True)
class IncompleteBetaParams:
    """Parameters ``(theta1, theta2, alpha, beta)`` of the restricted density.

    Only ``alpha = beta = 0`` is supported by the density and mixture
    functions; other values are accepted here but rejected there.
    """

    theta1: float
    theta2: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        t1, t2 = float(self.theta1), float(self.theta2)
        if not 0.0 < t1 < t2 < 1.0:
            raise UnsupportedParametersError(f"need 0 < theta1 < theta2 < 1, got ({t1}, {t2})")
        if self.alpha < 0 or self.beta < 0:
            raise UnsupportedParametersError("alpha and beta must be nonnegative")
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)

    @property
    def Z(self) -> float:
        """Normalizer ``log[t2/(1-t2)] - log[t1/(1-t1)]``."""
        t1, t2 = self.theta1, self.theta2
        return (math.log(t2) - math.log1p(-t2)) - (math.log(t1) - math.log1p(-t1))

    def reflected(self) -> "IncompleteBetaParams":
        """Parameters under ``theta -> 1 - theta``."""
        return IncompleteBetaParams(1.0 - self.theta2, 1.0 - self.theta1, self.beta, self.alpha)

    def _require_plain(self) -> None:
        if self.alpha != 0 or self.beta != 0:
            raise UnsupportedParametersError(
                "only the alpha = beta = 0 member of the family is implemented"
            )


def _exact(x) -> Fraction:
    """Decimal reading of ``x``: ``0.2`` means exactly ``1/5``."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(str(x))


def fm_window(N: int, theta1, theta2) -> tuple[int, int]:
    """Integer window ``[a1, a2]`` of counts with ``theta1 <= a/N <= theta2``.

    Thetas are read as exact decimals, so ``N = 100, theta1 = .2`` gives
    ``a1 = 20`` rather than 21 from the binary value of ``.2``.

    Raises:
        EmptyWindowError: if no integer count qualifies.
    """
    t1, t2 = _exact(theta1), _exact(theta2)
    if not 0 < t1 <= t2 < 1:
        raise UnsupportedParametersError(f"need 0 < theta1 <= theta2 < 1, got ({theta1}, {theta2})")
    a1 = math.ceil(N * t1)
    a2 = math.floor(N * t2)
    if a1 > a2:
        raise EmptyWindowError(f"no count a with {theta1} <= a/{N} <= {theta2}")
    return a1, a2


def fm_assertion(N: int, theta1, theta2, pL: float, pU: float) -> PaNAssertion:
    """``PaN[a1, a2, pL, pU]`` with the window from :func:`fm_window`."""
    a1, a2 = fm_window(N, theta1, theta2)
    return PaNAssertion(N, a1, a2, pL, pU)


def incomplete_beta_density(theta, params: IncompleteBetaParams):
    """``1 / (Z theta (1-theta))`` inside ``(theta1, theta2)``, 0 elsewhere."""
    params._require_plain()
    t = np.asarray(theta, dtype=float)
    inside = (t > params.theta1) & (t < params.theta2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(inside, 1.0 / (params.Z * t * (1.0 - t)), 0.0)
    return out[()] if out.ndim == 0 else out


def incomplete_beta_mixture_log_weights(Nplus1: int, params: IncompleteBetaParams) -> np.ndarray:
    """Unnormalized ``log q[a]`` of the mixture, ``a = 0..N+1``.

    For ``1 <= a <= N`` the integral is a difference of regularized
    incomplete beta values, ``q[a] = (N+1)/(a (N+1-a) Z) [I_t2 - I_t1]``,
    taken from whichever tail keeps the difference well conditioned. The two
    end terms have a ``1/theta`` (or ``1/(1-theta)``) kernel and are
    integrated numerically.
    """
    params._require_plain()
    n = int(Nplus1)
    if n < 1:
        raise UnsupportedParametersError("Nplus1 must be at least 1")
    t1, t2 = params.theta1, params.theta2
    log_z = math.log(params.Z)
    out = np.empty(n + 1)
    out[0] = log_boundary_integral(n - 1, t1, t2) - log_z
    out[n] = log_boundary_integral(n - 1, 1.0 - t2, 1.0 - t1) - log_z
    if n >= 2:
        a = np.arange(1, n, dtype=float)
        b = n - a
        lo2, up2 = log_betainc(a, b, np.full_like(a, t2))
        lo1, up1 = log_betainc(a, b, np.full_like(a, t1))
        use_lower = lo2 <= up1
        with np.errstate(invalid="ignore", divide="ignore"):
            diff = np.where(use_lower, log_diff_exp(lo2, lo1), log_diff_exp(up1, up2))
        if not np.isfinite(diff).all():
            raise PrecisionError("incomplete beta difference lost all precision")
        out[1:n] = math.log(n) - np.log(a) - np.log(b) - log_z + diff
    return out


def incomplete_beta_mixture_mass(Nplus1: int, params: IncompleteBetaParams) -> MassFunction:
    """Mass of ``S_{N+1}`` under the Binomial mixture with the restricted density.

    Raises:
        PrecisionError: if the unnormalized masses miss a total of one by more
            than :data:`MIXTURE_SUM_TOL`, or a quadrature fails.
    """
    lw = incomplete_beta_mixture_log_weights(Nplus1, params)
    total = logsumexp(lw)
    if abs(math.expm1(total)) > MIXTURE_SUM_TOL:
        raise PrecisionError(f"mixture masses sum to {math.exp(total)!r}")
    return MassFunction.from_log_weights(lw)


def default_margin(params: IncompleteBetaParams) -> float:
    """Interior margin used by :func:`compare_to_limit`: 2% of the interval."""
    return 0.02 * (params.theta2 - params.theta1)


def compare_to_limit(
    q: MassFunction, params: IncompleteBetaParams, interior_margin: float | None = None
) -> float:
    """Sup distance between the density histogram of ``q`` and the limit density.

    Only histogram abscissae ``a/(N+1)`` strictly inside
    ``(theta1 + margin, theta2 - margin)`` are compared; an empty grid gives 0.
    """
    margin = default_margin(params) if interior_margin is None else float(interior_margin)
    hist = density_histogram(q)
    x = hist.bin_centers
    inside = (x > params.theta1 + margin) & (x < params.theta2 - margin)
    if not inside.any():
        return 0.0
    gap = np.abs(hist.densities[inside] - incomplete_beta_density(x[inside], params))
    return float(gap.max())
