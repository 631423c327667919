"""Log-space special functions used by the mass calculus and the limit module.

The regularized incomplete beta is evaluated with the Lentz continued
fraction, but the prefactor ``x**a * (1-x)**b / B(a, b)`` is kept in log
space so that tail values far below the double-precision floor keep their
logarithms.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp

from .errors import PrecisionError

__all__ = [
    "log_factorials",
    "log_binom",
    "logsumexp",
    "log1mexp",
    "log_diff_exp",
    "stirlerr",
    "bd0",
    "log_binom_pmf",
    "log_hypergeom_pmf",
    "log_betainc",
    "log_boundary_integral",
]

_TINY = 1e-300
_CF_RTOL = 1e-12
_CF_MAXIT = 100_000
#: Largest population for which integer stirlerr values are tabulated.
_TABLE_MAX = 10_000_000
#: Series terms used by ``bd0`` on its near branch.
_BD0_TERMS = 9


def log_factorials(n: int) -> np.ndarray:
    """Table of ``log(k!)`` for ``k = 0..n``."""
    return gammaln(np.arange(n + 1, dtype=float) + 1.0)


def log_binom(n, k):
    """Elementwise ``log C(n, k)``; ``-inf`` outside ``0 <= k <= n``."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    valid = (k >= 0) & (k <= n)
    with np.errstate(invalid="ignore"):
        out = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    out = np.where(valid, out, -np.inf)
    return out[()] if out.ndim == 0 else out


def log1mexp(x):
    """``log(1 - exp(x))`` for ``x <= 0``, accurate at both ends."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(
            x > -math.log(2.0),
            np.log(-np.expm1(np.minimum(x, 0.0))),
            np.log1p(-np.exp(np.minimum(x, 0.0))),
        )
    return out[()] if out.ndim == 0 else out


def log_diff_exp(big, small):
    """``log(exp(big) - exp(small))`` assuming ``big >= small``."""
    big = np.asarray(big, dtype=float)
    small = np.asarray(small, dtype=float)
    with np.errstate(invalid="ignore"):
        out = big + log1mexp(np.where(np.isfinite(big), small - big, -np.inf))
    return out[()] if out.ndim == 0 else out


def _betacf(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction for the incomplete beta (modified Lentz), vectorized.

    Converges quickly for ``x < (a + 1) / (a + b + 2)``; callers use the
    symmetry relation outside that region.
    """
    a, b, x = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(x, float)
    )
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(a)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.arange(a.size)
    a_f, b_f, x_f = a.ravel(), b.ravel(), x.ravel()
    qab_f, qap_f, qam_f = qab.ravel(), qap.ravel(), qam.ravel()
    c_f, d_f, h_f = c.ravel(), d.ravel(), h.ravel()
    for m in range(1, _CF_MAXIT + 1):
        if active.size == 0:
            break
        aa_, bb_, xx = a_f[active], b_f[active], x_f[active]
        m2 = 2.0 * m
        cc, dd, hh = c_f[active], d_f[active], h_f[active]

        num = m * (bb_ - m) * xx / ((qam_f[active] + m2) * (aa_ + m2))
        dd = 1.0 + num * dd
        dd = np.where(np.abs(dd) < _TINY, _TINY, dd)
        cc = 1.0 + num / cc
        cc = np.where(np.abs(cc) < _TINY, _TINY, cc)
        dd = 1.0 / dd
        hh = hh * dd * cc

        num = -(aa_ + m) * (qab_f[active] + m) * xx / ((aa_ + m2) * (qap_f[active] + m2))
        dd = 1.0 + num * dd
        dd = np.where(np.abs(dd) < _TINY, _TINY, dd)
        cc = 1.0 + num / cc
        cc = np.where(np.abs(cc) < _TINY, _TINY, cc)
        dd = 1.0 / dd
        delta = dd * cc
        hh = hh * delta

        c_f[active], d_f[active], h_f[active] = cc, dd, hh
        active = active[np.abs(delta - 1.0) > _CF_RTOL]
    else:
        raise PrecisionError(
            f"incomplete beta continued fraction did not converge for {active.size} argument(s)"
        )
    return h_f.reshape(a.shape)


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# stirlerr(k) for k = 1..15, evaluated to 40 digits offline; the asymptotic
# series below is only accurate to double precision from k = 15 upward.
_STIRLERR_TABLE = np.array([
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
])


def stirlerr(z) -> np.ndarray:
    """Stirling remainder ``lgamma(z) - [(z - 1/2) log z - z + log(2 pi)/2]``.

    This is the small correction term of Loader's saddle-point binomial
    formulas; it is returned to full relative precision, which the naive
    ``gammaln`` difference cannot do for large ``z``.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    big = z >= 15.0
    zb = z[big]
    r = 1.0 / (zb * zb)
    out[big] = (
        1.0 / 12.0
        - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))
    ) / zb
    zs = z[~big]
    tabled = zs == np.floor(zs)
    small = np.empty(zs.shape)
    small[tabled] = _STIRLERR_TABLE[zs[tabled].astype(int)]
    zf = zs[~tabled]
    small[~tabled] = gammaln(zf) - (zf - 0.5) * np.log(zf) + zf - _HALF_LOG_2PI
    out[~big] = small
    return out[()] if out.ndim == 0 else out


def bd0(x, m) -> np.ndarray:
    """Deviance term ``x log(x/m) + m - x`` without cancellation when ``x ~ m``."""
    x, m = np.broadcast_arrays(np.asarray(x, float), np.asarray(m, float))
    out = np.empty(x.shape)
    near = np.abs(x - m) < 0.1 * (x + m)
    xf, mf = x[~near], m[~near]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~near] = np.where(xf > 0, xf * np.log(xf / mf), 0.0) + mf - xf
    xn, mn = x[near], m[near]
    v = (xn - mn) / (xn + mn)
    s = (xn - mn) * v
    # |v| < 0.1 on this branch, so nine terms of the odd series in v leave a
    # relative truncation below v**19 < 1e-19; evaluated by Horner in v**2
    v2 = v * v
    tail = np.zeros_like(v)
    for jj in range(_BD0_TERMS, 0, -1):
        tail = tail * v2 + 1.0 / (2 * jj + 1)
    s = s + 2.0 * xn * v * v2 * tail
    out[near] = s
    return out[()] if out.ndim == 0 else out


@functools.lru_cache(maxsize=8)
def _stirlerr_table(n: int) -> np.ndarray:
    """``stirlerr(0..n)`` for integer lookups (entry 0 is never used)."""
    table = np.zeros(n + 1)
    table[1:] = stirlerr(np.arange(1, n + 1, dtype=float))
    table.setflags(write=False)
    return table


def log_binom_pmf(k, n, p, q, _table: np.ndarray | None = None) -> np.ndarray:
    """``log[C(n, k) p**k q**(n-k)]`` by the saddle-point form; ``q = 1 - p``.

    Passing ``q`` separately lets callers supply it exactly when ``p`` is
    close to one. ``_table`` (internal) replaces ``stirlerr`` by a lookup
    when ``k`` and ``n`` are integers no larger than its length.
    """
    se = stirlerr if _table is None else (lambda z: _table[z.astype(np.intp)])
    k, n, p, q = np.broadcast_arrays(
        np.asarray(k, float), np.asarray(n, float), np.asarray(p, float), np.asarray(q, float)
    )
    out = np.empty(k.shape)
    with np.errstate(divide="ignore"):
        lo = k == 0
        out[lo] = np.where(n[lo] == 0, 0.0, n[lo] * np.log(q[lo]))
        hi = (k == n) & ~lo
        out[hi] = n[hi] * np.log(p[hi])
    mid = ~(lo | hi)
    km, nm, pm, qm = k[mid], n[mid], p[mid], q[mid]
    lc = (
        se(nm)
        - se(km)
        - se(nm - km)
        - bd0(km, nm * pm)
        - bd0(nm - km, nm * qm)
    )
    out[mid] = lc - 0.5 * (math.log(2.0 * math.pi) + np.log(km) + np.log1p(-km / nm))
    return out[()] if out.ndim == 0 else out


def log_hypergeom_pmf(k, good, bad, draws) -> np.ndarray:
    """``log[C(good, k) C(bad, draws - k) / C(good + bad, draws)]``.

    Evaluated as a ratio of three saddle-point binomial terms at
    ``p = draws / (good + bad)``, so no large log-factorials cancel. Requires
    ``0 < draws < good + bad``.
    """
    k = np.asarray(k, float)
    good = np.asarray(good, float)
    bad = np.asarray(bad, float)
    draws = np.asarray(draws, float)
    total = good + bad
    p = draws / total
    q = (total - draws) / total
    table = None
    top = float(np.max(total)) if total.size else 0.0
    if top <= _TABLE_MAX and all(np.array_equal(x, np.floor(x)) for x in (k, good, bad, draws)):
        table = _stirlerr_table(int(top))
    return (
        log_binom_pmf(k, good, p, q, table)
        + log_binom_pmf(draws - k, bad, p, q, table)
        - _log_binom_pmf_shared(draws, total, p, q, table)
    )


def _log_binom_pmf_shared(k, n, p, q, table) -> np.ndarray:
    """``log_binom_pmf`` evaluated once when all arguments are constant."""
    args = np.broadcast_arrays(k, n, p, q)
    if args[0].size > 1 and all(np.ptp(x) == 0 for x in args):
        value = log_binom_pmf(*(x.flat[0] for x in args), table)
        return np.full(args[0].shape, float(value))
    return log_binom_pmf(k, n, p, q, table)


def _log_beta_front(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``log[x**a (1-x)**b / B(a, b)]`` without cancelling large log-gammas."""
    n = a + b
    # a log(x n / a) with the ratio's deviation from 1 formed before the log
    t1 = a * np.log1p((x * n - a) / a)
    t2 = b * np.log1p(((1.0 - x) * n - b) / b)
    return (
        t1
        + t2
        + 0.5 * (np.log(a) + np.log(b) - np.log(n))
        - _HALF_LOG_2PI
        - (stirlerr(a) + stirlerr(b) - stirlerr(n))
    )


def log_betainc(a, b, x):
    """Return ``(log I_x(a, b), log(1 - I_x(a, b)))`` elementwise.

    ``a, b > 0`` and ``0 < x < 1``. Each branch evaluates the tail that the
    continued fraction delivers directly and derives the other by
    ``log1mexp``, so whichever tail is tiny is accurate in log space.
    """
    a, b, x = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(x, float)
    )
    front = _log_beta_front(a, b, x)
    # mirror form: log(1 - I_x(a, b)) = log I_{1-x}(b, a) has the same front factor
    direct = x < (a + 1.0) / (a + b + 2.0)
    log_lower = np.empty(a.shape)
    log_upper = np.empty(a.shape)
    if np.any(direct):
        cf = _betacf(a[direct], b[direct], x[direct])
        lo = front[direct] + np.log(cf) - np.log(a[direct])
        log_lower[direct] = lo
        log_upper[direct] = log1mexp(np.minimum(lo, 0.0))
    mirror = ~direct
    if np.any(mirror):
        cf = _betacf(b[mirror], a[mirror], 1.0 - x[mirror])
        up = front[mirror] + np.log(cf) - np.log(b[mirror])
        log_upper[mirror] = up
        log_lower[mirror] = log1mexp(np.minimum(up, 0.0))
    return log_lower, log_upper


def log_boundary_integral(n: int, lo: float, hi: float) -> float:
    """``log`` of the integral of ``t**-1 * (1 - t)**n`` over ``(lo, hi)``.

    The integrand is decreasing, so it is shifted by its value at ``lo``
    and integrated adaptively; the decay scale ``(1 - lo) / n`` is passed as
    breakpoints so the quadrature resolves the spike next to ``lo``.
    """
    if not 0.0 < lo < hi < 1.0:
        raise ValueError("need 0 < lo < hi < 1")
    if n == 0:
        return math.log(math.log(hi) - math.log(lo))
    log_peak = -math.log(lo) + n * math.log1p(-lo)

    def shifted(t: float) -> float:
        return math.exp(-math.log(t) + n * math.log1p(-t) - log_peak)

    scale = (1.0 - lo) / max(n, 1)
    points = [lo + scale * f for f in (1.0, 4.0, 16.0, 64.0) if lo + scale * f < hi]
    value, abserr, info, *rest = integrate.quad(
        shifted,
        lo,
        hi,
        epsabs=1e-14 * 1e-3,
        epsrel=1e-13,
        limit=500,
        points=points or None,
        full_output=1,
    )
    if rest or value <= 0.0 or abserr > 1e-11 * value:
        raise PrecisionError(
            f"boundary quadrature failed (n={n}, interval=({lo}, {hi}), error={abserr:.3g})"
        )
    return log_peak + math.log(value)
