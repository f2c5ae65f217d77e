"""Beta-distribution tools for order statistics of uniform samples, and
numerical checks of the inequalities the displacement bounds rest on.

All densities and binomial weights are evaluated in log space so that
parameters in the millions do not overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special

QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-14


@dataclass(frozen=True)
class BetaParams:
    c: int
    d: int

    def __post_init__(self):
        if int(self.c) != self.c or int(self.d) != self.d or self.c < 1 or self.d < 1:
            raise ValueError("Beta parameters must be positive integers")

    @classmethod
    def order_statistic(cls, l: int, n: int) -> "BetaParams":
        """Law of the l-th smallest of n uniforms."""
        if not 1 <= l <= n:
            raise ValueError("need 1 <= l <= n")
        return cls(l, n - l + 1)

    @property
    def mean(self) -> float:
        return self.c / (self.c + self.d)

    @property
    def sd(self) -> float:
        c, d = self.c, self.d
        return math.sqrt(c * d / ((c + d) ** 2 * (c + d + 1)))


@dataclass(frozen=True)
class MomentQuery:
    """``E[(|Beta(l, n-l+1) - rate*l|^+)^a]`` for kind "upper",
    ``E[(|rate*l - Beta(l, n-l+1)|^+)^a]`` for kind "lower"."""

    l: int
    n: int
    a: float
    rate: float
    kind: str = "upper"

    def __post_init__(self):
        if not 1 <= self.l <= self.n:
            raise ValueError("need 1 <= l <= n")
        if not self.a > 0 or self.rate < 0:
            raise ValueError("need a > 0 and rate >= 0")
        if self.kind not in ("upper", "lower"):
            raise ValueError("kind must be 'upper' or 'lower'")

    @property
    def cut(self) -> float:
        return self.rate * self.l

    @property
    def beta(self) -> BetaParams:
        return BetaParams.order_statistic(self.l, self.n)


def gamma_fn(x: float) -> float:
    if not 0 < x <= 50:
        raise ValueError("gamma_fn is defined here for 0 < x <= 50")
    return math.gamma(x)


def log_beta_norm(p: BetaParams) -> float:
    """log of ``c * binom(c + d - 1, c)``, the normalising constant 1/B(c, d)."""
    return math.lgamma(p.c + p.d) - math.lgamma(p.c) - math.lgamma(p.d)


def beta_pdf(p: BetaParams, t):
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        logf = (
            log_beta_norm(p)
            + special.xlogy(p.c - 1, t)
            + special.xlog1py(p.d - 1, -t)
        )
    out = np.exp(logf)
    return float(out) if out.ndim == 0 else out


def incomplete_beta(p: BetaParams, z):
    """Regularised incomplete Beta function ``I_z(c, d)``, the Beta cdf."""
    z = np.asarray(z, dtype=float)
    if np.any((z < 0) | (z > 1)):
        raise ValueError("z must lie in [0, 1]")
    out = special.betainc(p.c, p.d, z)
    return float(out) if out.ndim == 0 else out


def binomial_lower_tail(c: int, d: int, z: float) -> float:
    """``sum_{j<c} binom(c+d-1, j) z^j (1-z)^(c+d-1-j)``, summed from log-space terms."""
    m = c + d - 1
    if z == 0.0:
        return 1.0
    if z == 1.0:
        return 1.0 if c - 1 >= m else 0.0
    j = np.arange(c)
    logw = (
        special.gammaln(m + 1) - special.gammaln(j + 1) - special.gammaln(m - j + 1)
        + j * math.log(z) + (m - j) * math.log1p(-z)
    )
    return float(math.fsum(np.exp(logw)))


def _breakpoints(p: BetaParams, lo: float, hi: float, extra=()) -> np.ndarray:
    mode = (p.c - 1) / (p.c + p.d - 2) if p.c + p.d > 2 else 0.5
    sd = p.sd
    pts = [lo, hi, mode, *extra]
    for k in (1.0, 3.0, 8.0, 20.0, 50.0):
        pts += [mode - k * sd, mode + k * sd]
    pts = np.clip(np.asarray(pts, dtype=float), lo, hi)
    return np.unique(pts)


def integrate_against_beta(p: BetaParams, fn, lo: float = 0.0, hi: float = 1.0, extra=()) -> float:
    """``int_lo^hi fn(t) f_{c,d}(t) dt`` by adaptive Gauss-Kronrod on pieces
    split at the mode and at multiples of the standard deviation."""
    if hi <= lo:
        return 0.0
    cuts = _breakpoints(p, lo, hi, extra)
    total = 0.0
    for u, v in zip(cuts[:-1], cuts[1:]):
        if v - u <= 0:
            continue
        val, _ = integrate.quad(
            lambda t: fn(t) * beta_pdf(p, min(max(t, 0.0), 1.0)),
            u, v, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200,
        )
        total += val
    return total


def beta_normalization(p: BetaParams) -> float:
    return integrate_against_beta(p, lambda t: 1.0)


def positive_part_moment(q: MomentQuery) -> float:
    p, cut, a = q.beta, q.cut, q.a
    w = p.sd
    if q.kind == "upper":
        if cut >= 1.0:
            return 0.0
        extra = [cut + k * w for k in (0.5, 2.0, 6.0, 20.0)]
        return integrate_against_beta(p, lambda t: (t - cut) ** a, cut, 1.0, extra)
    if cut <= 0.0:
        return 0.0
    hi = min(cut, 1.0)
    extra = [hi - k * w for k in (0.5, 2.0, 6.0, 20.0)]
    return integrate_against_beta(p, lambda t: (cut - t) ** a, 0.0, hi, extra)


def positive_part_moment_mc(q: MomentQuery, draws: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate and its standard error, from numpy's Beta sampler."""
    t = rng.beta(q.beta.c, q.beta.d, size=draws)
    v = np.maximum(t - q.cut, 0.0) if q.kind == "upper" else np.maximum(q.cut - t, 0.0)
    v = v ** q.a
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(draws))


def _moment_upper_bound(q: MomentQuery) -> float:
    """Cheap bound ``reach**a * Pr[positive part > 0]`` used to skip negligible terms."""
    p = q.beta
    if q.kind == "upper":
        if q.cut >= 1.0:
            return 0.0
        return (1.0 - q.cut) ** q.a * float(special.betaincc(p.c, p.d, q.cut))
    if q.cut <= 0.0:
        return 0.0
    return min(q.cut, 1.0) ** q.a * float(special.betainc(p.c, p.d, min(q.cut, 1.0)))


def lemma_sum_bound(n: int, a: float, rate: float, kind: str = "upper", skip_rel: float = 1e-18) -> float:
    """``sum_{l=1}^{n} (n/l) * positive_part_moment(l, n, a, rate, kind)``.

    Terms whose cheap upper bound is below ``skip_rel`` times the largest
    bound are dropped; their total is at most ``n * skip_rel`` relative.
    """
    queries = [MomentQuery(l, n, a, rate, kind) for l in range(1, n + 1)]
    bounds = np.array([n / q.l * _moment_upper_bound(q) for q in queries])
    if bounds.max() <= 0:
        return 0.0
    floor = skip_rel * bounds.max()
    terms = [n / q.l * positive_part_moment(q) for q, b in zip(queries, bounds) if b > floor]
    return float(math.fsum(terms))


def max_positive_part_moment(n: int, a: float, rate: float, kind: str = "upper") -> tuple[int, float]:
    """Largest moment over l and the l attaining it."""
    queries = [MomentQuery(l, n, a, rate, kind) for l in range(1, n + 1)]
    bounds = np.array([_moment_upper_bound(q) for q in queries])
    best_l, best = 1, 0.0
    for q, b in sorted(zip(queries, bounds), key=lambda qb: -qb[1]):
        if b <= best:
            break
        v = positive_part_moment(q)
        if v > best:
            best_l, best = q.l, v
    return best_l, best


def verify_lemma_first(n: int, a: float) -> bool:
    """``Pr[Beta(n,1) < 1 - n^(-a/(1+a))] < exp(-n^(1/(1+a)))`` via ``I_z(n,1) = z^n``."""
    if n < 1 or not a > 0:
        raise ValueError("need n >= 1 and a > 0")
    x = n ** (-a / (1 + a))
    log_lhs = n * math.log1p(-x) if x < 1 else -math.inf
    return log_lhs < -(n ** (1 / (1 + a)))


def prohorov_m1(n: int, x: float) -> int:
    """The integer in ``(n(1-x) - 1, n(1-x)]``."""
    return math.floor(n * (1 - x))


def verify_prohorov(n: int, j: int, x: float) -> bool:
    """Binomial weight against the scaled Poisson weight, both in log space."""
    if not (n >= 1 and 0 <= j <= n and 0 <= x < 1):
        raise ValueError("need n >= 1, 0 <= j <= n and 0 <= x < 1")
    m1 = prohorov_m1(n, x)
    if m1 < 1:
        raise ValueError("inadmissible triple: n(1 - x) < 1")
    log_lhs = (
        math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
        + float(special.xlogy(j, x)) + (n - j) * math.log1p(-x)
    )
    log_rhs = 0.5 * math.log(n / m1) - n * x + float(special.xlogy(j, n * x)) - math.lgamma(j + 1)
    if log_lhs == -math.inf:
        return True
    return log_lhs <= log_rhs + 1e-12 * max(1.0, abs(log_rhs))


def series_coefficient(k: int) -> mpmath.mpf:
    """``(-1)^k k! / ((2k)! 2^k (1 + 2k))``."""
    return (-1) ** k * mpmath.factorial(k) / (mpmath.factorial(2 * k) * mpmath.mpf(2) ** k * (1 + 2 * k))


def series_integral_closed_form(a: float) -> float:
    """``sqrt(pi) / 2^(2 + 3a/2) * cot(a pi / 2) * Gamma(-1/2 - a/2)``.

    At odd ``a`` the product cot * Gamma is 0 * inf; there the removable
    singularity is filled with the equivalent ``-pi / (sin(a pi/2) Gamma((a+3)/2))``.
    """
    with mpmath.workdps(30):
        a = mpmath.mpf(a)
        pref = mpmath.sqrt(mpmath.pi) / mpmath.mpf(2) ** (2 + 3 * a / 2)
        if abs(a - (2 * mpmath.floor(a / 2) + 1)) < mpmath.mpf("1e-9"):
            prod = -mpmath.pi / (mpmath.sin(a * mpmath.pi / 2) * mpmath.gamma((a + 3) / 2))
        else:
            prod = mpmath.cot(a * mpmath.pi / 2) * mpmath.gamma(-(1 + a) / 2)
        return float(pref * prod)


def _series_tail(y, K: int, a) -> mpmath.mpf:
    """``sum_{k > K} c_k y^(2k - a - 1)``, summed until terms drop below 1e-16 of the running sum."""
    y2 = y * y
    k = K + 1
    term = series_coefficient(k) * y ** (2 * k)
    total = term
    while True:
        k += 1
        term = -term * y2 * k / ((2 * k) * (2 * k - 1) * 2) * (2 * k - 1) / (2 * k + 1)
        total += term
        if abs(term) < mpmath.mpf("1e-16") * abs(total) and k > y2:
            break
    return total / y ** (a + 1)


def series_integral_numeric(a: float, y_split: float = 20.0) -> float:
    """Integral over y of the tail series, numerically.

    ``(0, y_split]`` is integrated directly with the series summed in extended
    precision; beyond ``y_split`` the series' full sum is replaced by its large-y
    expansion ``sum_m (2m-1)!! 4^(m+1) / y^(2m+2)`` and the integral is
    extrapolated term by term.
    """
    K = math.floor(a / 2)
    dps = 30 + int(y_split ** 2 / 8 / math.log(10)) + 5
    with mpmath.workdps(dps):
        am = mpmath.mpf(a)
        Y = mpmath.mpf(y_split)
        head = mpmath.quad(lambda y: _series_tail(y, K, am), [0, 0.5, 2, 5, 10, Y])
        tail = mpmath.mpf(0)
        for k in range(K + 1):
            tail += series_coefficient(k) * Y ** (2 * k - am) / (2 * k - am)
        prev = None
        m = 0
        dfact = mpmath.mpf(1)
        while True:
            if m > 0:
                dfact *= 2 * m - 1
            term = dfact * mpmath.mpf(4) ** (m + 1) * Y ** (-2 * m - 2 - am) / (2 * m + 2 + am)
            if prev is not None and abs(term) >= abs(prev):
                break
            tail += term
            prev = term
            m += 1
            if abs(term) < mpmath.mpf("1e-30"):
                break
        return float(head + tail)


def verify_series_integral_identity(a: float, rtol: float = 1e-6) -> bool:
    if not a > 0:
        raise ValueError("a must be positive")
    if abs(a / 2 - round(a / 2)) * 2 < 1e-3:
        raise ValueError("the identity is stated for a away from even integers")
    lhs = series_integral_numeric(a)
    rhs = series_integral_closed_form(a)
    return abs(lhs - rhs) <= rtol * abs(rhs)
