"""Closed-form outage, throughput and transmission-capacity results.

Everything here works in linear units.  The outage CDF of the generic SINR
model  gamma = W / (Y + sum_l |D_l|^-alpha Psi_l + 1)  with gamma-distributed
W, Y, Psi and a Poisson interferer field of effective density intensity*p is
an alternating double sum over Stirling numbers; all asymptotic forms,
optimizers and capacity expressions below derive from it.

Solvers are bracketed bisection or golden-section only, with the brackets
stated at each call site; nothing depends on a starting guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .errors import (
    DomainError,
    InfeasibleError,
    NoRootError,
    NonConvergenceError,
    NumericalInstabilityError,
)
from .schemes import GammaLawParams, NetworkParams, OstbcCode, SchemeSpec, gamma_params

#: cancellation guard for the alternating Stirling sum
CANCELLATION_GUARD = 1e12

#: rounding slack absorbed when clamping a probability to [0, 1]
_CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class OutageQuery:
    glp: GammaLawParams
    net: NetworkParams

    def __post_init__(self):
        ratio = self.glp.omega / self.glp.theta
        expected = self.net.r_tr ** self.net.alpha
        if abs(ratio - expected) > 1e-9 * expected:
            raise DomainError(
                "gamma laws inconsistent with network geometry: "
                f"omega/theta = {ratio}, r_tr^alpha = {expected}"
            )


@dataclass(frozen=True)
class TcQuery:
    glp: GammaLawParams
    epsilon: float
    net: NetworkParams

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must sit in (0, 1), got {self.epsilon}")

    @property
    def zeta(self) -> float:
        return self.glp.zeta


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def eta(n: float, p: float, alpha: float) -> float:
    """Geometry constant pi*p*Gamma(n + 2/alpha)*Gamma(1 - 2/alpha)/Gamma(n)."""
    if not alpha > 2.0:
        raise DomainError(f"alpha must exceed 2, got {alpha}")
    if not n > 0:
        raise DomainError(f"interference shape must be positive, got {n}")
    if p == 0.0:
        return 0.0
    x = 2.0 / alpha
    return math.pi * p * math.exp(
        specfun.ln_gamma(n + x) + specfun.ln_gamma(1.0 - x) - specfun.ln_gamma(n)
    )


def self_interference_moment(
    u: Optional[float], upsilon: Optional[float], beta: float, theta: float, tau: int
) -> float:
    """E[exp(-beta*Y/theta) * Y^tau] for Y ~ Gamma(u, upsilon); Y == 0 when u is None."""
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if u is None:
        return 1.0 if tau == 0 else 0.0
    log_val = (
        specfun.ln_gamma(tau + u)
        - specfun.ln_gamma(u)
        - u * math.log(upsilon)
        - (tau + u) * math.log(beta / theta + 1.0 / upsilon)
    )
    return math.exp(log_val)


def _self_moments(glp: GammaLawParams, beta: float, up_to: int):
    return [
        self_interference_moment(glp.u, glp.upsilon, beta, glp.theta, t)
        for t in range(up_to + 1)
    ]


def _binom_weighted_moments(glp: GammaLawParams, beta: float, up_to: int):
    """T_l = sum_tau C(l, tau) E[e^(-beta Y/theta) Y^tau] for l = 0..up_to."""
    moments = _self_moments(glp, beta, up_to)
    return [
        math.fsum(math.comb(l, t) * moments[t] for t in range(l + 1))
        for l in range(up_to + 1)
    ]


def interference_exponent(glp: GammaLawParams, net: NetworkParams, beta: float) -> float:
    """The Poisson-field exponent intensity*(beta*omega/theta)^(2/alpha)*eta(n)."""
    return (
        net.intensity
        * (beta * glp.omega / glp.theta) ** (2.0 / net.alpha)
        * eta(glp.n, net.p, net.alpha)
    )


def _bell_polynomials(m: int, minus_a: float):
    """P_i(-A) = sum_j S(i, j) (-A)^j for i = 0..m-1 (shared across the l-sum)."""
    vals = [1.0]
    for i in range(1, m):
        acc = 0.0
        power = 1.0
        for j in range(1, i + 1):
            power *= minus_a
            acc += specfun.stirling_second(i, j) * power
        vals.append(acc)
    return vals


def _outage_tail_poly(glp: GammaLawParams, alpha: float, beta: float, big_a: float) -> float:
    """Polynomial factor of the success probability.

    The success probability factors as  poly * exp(-A - b) / Gamma(m)  with
    poly the signed Stirling sum (nonnegative up to rounding).  Keeping the
    factors apart lets validity-gap ratios cancel exponentials that would
    otherwise underflow.
    """
    m = glp.m
    b = beta / glp.theta
    x = 2.0 / alpha
    bell = _bell_polynomials(m, -big_a)
    t_weights = _binom_weighted_moments(glp, beta, m - 1)
    terms = []
    for l in range(m):
        outer = math.comb(m - 1, l) * (-b) ** l * t_weights[l]
        if outer == 0.0:
            continue
        x_pow = 1.0
        for i in range(m - l):
            s1 = specfun.stirling_first_signed(m - l, i + 1)
            terms.append(outer * s1 * x_pow * bell[i])
            x_pow *= x
    total = math.fsum(terms)
    if not math.isfinite(total):
        raise NumericalInstabilityError("outage sum overflowed; parameters too extreme")
    peak = max(abs(t) for t in terms)
    if abs(total) * CANCELLATION_GUARD < peak:
        raise NumericalInstabilityError(
            f"cancellation beyond guard: max|term|/|sum| = {peak / max(abs(total), 1e-300):.3g}"
        )
    signed = total if m % 2 == 1 else -total
    if signed < 0.0:
        if signed >= -_CLAMP_SLACK * peak:
            return 0.0
        raise NumericalInstabilityError(f"negative success polynomial: {signed}")
    return signed


def _outage_tail_at(glp: GammaLawParams, alpha: float, beta: float, big_a: float) -> float:
    """Success probability 1 - F for exponent coefficient big_a.

    Computed directly (never as 1 minus something), so it keeps full relative
    precision deep in the tail where the CDF would saturate at 1.
    """
    m = glp.m
    b = beta / glp.theta
    if m == 1 and glp.u is None:
        return math.exp(-big_a - b)
    poly = _outage_tail_poly(glp, alpha, beta, big_a)
    if poly == 0.0:
        return 0.0
    tail = math.exp(math.log(poly) - big_a - b - specfun.ln_gamma(m))
    if tail > 1.0:
        if tail <= 1.0 + _CLAMP_SLACK:
            return 1.0
        raise NumericalInstabilityError(f"success probability above 1: {tail}")
    return tail


def _outage_cdf_at(glp: GammaLawParams, alpha: float, beta: float, big_a: float) -> float:
    """Outage CDF for exponent coefficient big_a (= effective density term)."""
    return 1.0 - _outage_tail_at(glp, alpha, beta, big_a)


# ---------------------------------------------------------------------------
# outage and throughput
# ---------------------------------------------------------------------------

def outage_cdf(q: OutageQuery) -> float:
    """Exact outage probability Pr(SINR <= beta) of the generic gamma model."""
    beta = q.net.beta
    return _outage_cdf_at(q.glp, q.net.alpha, beta, interference_exponent(q.glp, q.net, beta))


def outage_cdf_simple(q: OutageQuery) -> float:
    """Closed form for a unit signal shape and no self-interference."""
    if q.glp.m != 1 or q.glp.u is not None:
        raise DomainError("outage_cdf_simple needs m == 1 and no self-interference")
    beta = q.net.beta
    return -math.expm1(-interference_exponent(q.glp, q.net, beta) - beta / q.glp.theta)


def single_user_outage(glp: GammaLawParams, beta: float) -> float:
    """Outage floor with no multi-node interference (noise and own streams only)."""
    m = glp.m
    b = beta / glp.theta
    t_weights = _binom_weighted_moments(glp, beta, m - 1)
    log_b = math.log(b) if b > 0 else -math.inf
    tail = math.fsum(
        math.exp(k * log_b - specfun.ln_gamma(k + 1) - b) * t_weights[k]
        for k in range(m)
    )
    return min(1.0, max(0.0, 1.0 - tail))


def throughput(scheme: SchemeSpec, net: NetworkParams) -> float:
    """Successful symbols per channel use per unit area: zeta*p*intensity*(1-F)."""
    if net.intensity == 0.0 or net.p == 0.0:
        return 0.0
    glp = gamma_params(scheme, net)
    f = outage_cdf(OutageQuery(glp, net))
    return glp.zeta * net.p * net.intensity * (1.0 - f)


# ---------------------------------------------------------------------------
# asymptotic forms and their validity boundaries
# ---------------------------------------------------------------------------

def _dense_tail(glp: GammaLawParams, net: NetworkParams) -> float:
    beta = net.beta
    big_a = interference_exponent(glp, net, beta)
    if big_a == 0.0 and glp.m > 1:
        return 0.0
    e0 = self_interference_moment(glp.u, glp.upsilon, beta, glp.theta, 0)
    log_tail = (
        (glp.m - 1) * math.log(2.0 * big_a / net.alpha)
        - specfun.ln_gamma(glp.m)
        - big_a - beta / glp.theta
        + math.log(e0)
    )
    return math.exp(log_tail) if log_tail > -745.0 else 0.0


def dense_cdf(q: OutageQuery) -> float:
    """Large-intensity expansion of the outage CDF."""
    return min(1.0, max(0.0, 1.0 - _dense_tail(q.glp, q.net)))


def _highbeta_tail(glp: GammaLawParams, net: NetworkParams) -> float:
    beta = net.beta
    big_a = interference_exponent(glp, net, beta)
    b = beta / glp.theta
    e0 = self_interference_moment(glp.u, glp.upsilon, beta, glp.theta, 0)
    log_tail = (glp.m - 1) * math.log(b) - specfun.ln_gamma(glp.m) - big_a - b + math.log(e0)
    return math.exp(log_tail) if log_tail > -745.0 else 0.0


def highbeta_cdf(q: OutageQuery) -> float:
    """Large-threshold expansion of the outage CDF."""
    return min(1.0, max(0.0, 1.0 - _highbeta_tail(q.glp, q.net)))


def lowbeta_cdf(q: OutageQuery) -> float:
    """Small-threshold expansion: the outage vanishes like beta^(2/alpha)."""
    glp, net = q.glp, q.net
    x = 2.0 / net.alpha
    if glp.m <= x:
        raise DomainError(f"needs m > 2/alpha, got m = {glp.m}, 2/alpha = {x}")
    coeff = math.exp(specfun.ln_gamma(glp.m - x) - specfun.ln_gamma(glp.m))
    return (
        net.intensity
        * coeff
        * eta(glp.n, net.p, net.alpha)
        / math.exp(specfun.ln_gamma(1.0 - x))
        * (net.beta * glp.omega / glp.theta) ** x
    )


def _tail_gap(tail_asym: float, tail_exact: float) -> float:
    """|F_asym - F| / (1 - F) evaluated on success probabilities."""
    if tail_exact <= 0.0:
        # both underflowed to zero counts as agreement in the deep tail
        return 0.0 if tail_asym <= 0.0 else math.inf
    return abs(tail_asym - tail_exact) / tail_exact


def dense_validity_threshold(q: OutageQuery, tol: float = 0.15) -> float:
    """Smallest intensity beyond which the dense expansion stays within tol.

    The gap |F_dense - F| / (1 - F) is a ratio of success probabilities whose
    common exp(-A - b) factor is cancelled analytically, so the scan stays
    meaningful deep in the tail.  Log grid over [1e-8, 1e4], final crossing
    refined by bisection.
    """
    glp = q.glp

    def gap(lam: float) -> float:
        net = q.net.replace(intensity=lam)
        beta = net.beta
        big_a = interference_exponent(glp, net, beta)
        poly = _outage_tail_poly(glp, net.alpha, beta, big_a)
        e0 = self_interference_moment(glp.u, glp.upsilon, beta, glp.theta, 0)
        asym = e0 * (2.0 * big_a / net.alpha) ** (glp.m - 1)
        return _tail_gap(asym, poly)

    return _last_crossing_scan(gap, 1e-8, 1e4, tol, what="dense-intensity threshold")


def asymptotic_validity_threshold(kind: str, q: OutageQuery, tol: float = 0.15) -> float:
    """Threshold-beta boundary where a high/low-beta expansion reaches tol.

    high_beta: smallest beta above which the large-beta form stays within tol.
    low_beta : largest beta below which the small-beta form stays within tol.
    Scanned over [-60 dB, +60 dB] in log beta and refined by bisection.
    """
    if kind not in ("high_beta", "low_beta"):
        raise DomainError(f"kind must be high_beta or low_beta, got {kind!r}")
    glp = q.glp

    if kind == "high_beta":
        def gap(beta: float) -> float:
            net = q.net.replace(beta=beta)
            big_a = interference_exponent(glp, net, beta)
            poly = _outage_tail_poly(glp, net.alpha, beta, big_a)
            e0 = self_interference_moment(glp.u, glp.upsilon, beta, glp.theta, 0)
            asym = e0 * (beta / glp.theta) ** (glp.m - 1)
            return _tail_gap(asym, poly)

        return _last_crossing_scan(gap, 1e-6, 1e6, tol, what="high-beta threshold")

    def gap(beta: float) -> float:
        # the small-beta form approximates the (vanishing) outage value, so the
        # deviation is measured relative to F rather than to 1 - F
        net = q.net.replace(beta=beta)
        tail = _outage_tail_at(glp, net.alpha, beta, interference_exponent(glp, net, beta))
        cdf = 1.0 - tail
        if cdf <= 0.0:
            return 0.0
        return abs(lowbeta_cdf(OutageQuery(glp, net)) - cdf) / cdf

    return _first_crossing_scan(gap, 1e-6, 1e6, tol, what="low-beta threshold")


def _last_crossing_scan(gap, lo, hi, tol, what, points_per_decade=16):
    """Boundary x*: gap(x) <= tol for every grid x >= x*, refined by bisection."""
    grid = np.geomspace(lo, hi, int(math.log10(hi / lo) * points_per_decade) + 1)
    vals = [gap(x) for x in grid]
    if vals[-1] > tol:
        raise NoRootError(f"{what}: gap never drops below {tol} on [{lo}, {hi}]")
    above = [i for i, v in enumerate(vals) if v > tol]
    if not above:
        return 0.0
    i = above[-1]
    a, b = grid[i], grid[i + 1]
    for _ in range(100):
        mid = math.sqrt(a * b)
        if gap(mid) > tol:
            a = mid
        else:
            b = mid
    return b


def _first_crossing_scan(gap, lo, hi, tol, what, points_per_decade=16):
    """Boundary x*: gap(x) <= tol for every grid x <= x*, refined by bisection."""
    grid = np.geomspace(lo, hi, int(math.log10(hi / lo) * points_per_decade) + 1)
    vals = [gap(x) for x in grid]
    if vals[0] > tol:
        raise NoRootError(f"{what}: gap already exceeds {tol} at {lo}")
    above = [i for i, v in enumerate(vals) if v > tol]
    if not above:
        return float(grid[-1])
    i = above[0]
    a, b = grid[i - 1], grid[i]
    for _ in range(100):
        mid = math.sqrt(a * b)
        if gap(mid) > tol:
            b = mid
        else:
            a = mid
    return a


# ---------------------------------------------------------------------------
# throughput optimizers
# ---------------------------------------------------------------------------

def lambda_opt_zf(n_antennas: int, net: NetworkParams) -> float:
    """Throughput-maximizing intensity for full-stream ZF (M = N)."""
    x = 2.0 / net.alpha
    log_val = (
        specfun.ln_gamma(n_antennas)
        - math.log(math.pi * net.p)
        - specfun.ln_gamma(n_antennas + x)
        - specfun.ln_gamma(1.0 - x)
    )
    return math.exp(log_val) / (net.beta ** x * net.r_tr ** 2)


def _bisect_decreasing(func, target, lo, hi, iters=200):
    """Root of func(x) = target for func decreasing on [lo, hi]."""
    f_lo, f_hi = func(lo), func(hi)
    if f_lo < target or f_hi > target:
        raise NoRootError(
            f"no root in [{lo}, {hi}]: f(lo) = {f_lo:.6g}, f(hi) = {f_hi:.6g}, target = {target:.6g}"
        )
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if func(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _bisect_increasing(func, target, lo, hi, iters=200):
    f_lo, f_hi = func(lo), func(hi)
    if f_lo > target or f_hi < target:
        raise NoRootError(
            f"no root in [{lo}, {hi}]: f(lo) = {f_lo:.6g}, f(hi) = {f_hi:.6g}, target = {target:.6g}"
        )
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def n_opt_zf(net: NetworkParams) -> int:
    """Throughput-maximizing antenna count for full-stream ZF (M = N).

    Solves the crossover of consecutive antenna counts,
    T(x+1) = T(x):  [ln(1+1/x) - beta r^alpha / rho] Gamma(x+1)/Gamma(x+2/alpha)
                    = 2 pi p lambda Gamma(1-2/alpha) beta^(2/alpha) r^2 / alpha,
    whose left side is decreasing, on x in [1e-3, 512]; then returns whichever
    of the neighboring integers gives the better throughput when evaluated
    directly.  (In the vanishing-noise limit the noise term drops and the
    balance reduces to its interference-only form.)
    """
    x_exp = 2.0 / net.alpha
    noise = net.beta * net.r_tr ** net.alpha / net.rho

    def lhs(x: float) -> float:
        return (math.log1p(1.0 / x) - noise) * math.exp(
            specfun.ln_gamma(x + 1.0) - specfun.ln_gamma(x + x_exp)
        )

    rhs = (
        2.0 * math.pi * net.p * net.intensity
        * math.exp(specfun.ln_gamma(1.0 - x_exp))
        * net.beta ** x_exp * net.r_tr ** 2 / net.alpha
    )
    root = _bisect_decreasing(lhs, rhs, 1e-3, 512.0)
    candidates = sorted({max(1, math.floor(root)), max(1, math.ceil(root))})

    def objective(n: int) -> float:
        return throughput(SchemeSpec.sm_zf(n, n), net)

    return max(candidates, key=objective)


def m_opt_lowbeta(receiver: str, n_antennas: int, net: NetworkParams) -> int:
    """Stream count maximizing low-threshold throughput for MRC or ZF.

    The balance equation's right side is increasing in x on the bracket, so
    the root is unique; when the target falls off the bracket the optimum
    saturates at 1 or N.
    """
    if receiver not in ("mrc", "zf"):
        raise DomainError(f"receiver must be 'mrc' or 'zf', got {receiver!r}")
    x_exp = 2.0 / net.alpha
    # the balance is dimensionless through the lambda*pi*p*r^2 area factor
    target = 1.0 / (
        net.intensity * math.pi * net.p * net.r_tr ** 2 * net.beta ** x_exp
    )

    def rhs_mrc(x: float) -> float:
        return (
            math.exp(specfun.ln_gamma(n_antennas - x_exp) - specfun.ln_gamma(n_antennas))
            * math.exp(specfun.ln_gamma(x - 1.0 + x_exp) - specfun.ln_gamma(x - 1.0))
            * (1.0 + 2.0 * x / (net.alpha * (x - 1.0)))
        )

    def rhs_zf(x: float) -> float:
        return (
            math.exp(
                specfun.ln_gamma(n_antennas - x + 1.0 - x_exp)
                - specfun.ln_gamma(n_antennas - x + 1.0)
            )
            * math.exp(specfun.ln_gamma(x - 1.0 + x_exp) - specfun.ln_gamma(x - 1.0))
            * (
                1.0
                + 2.0 * x / (net.alpha * (x - 1.0))
                + 2.0 * (x - 1.0) / (net.alpha * (n_antennas - x + 1.0))
            )
        )

    lo = 1.0 + 1e-9
    if receiver == "mrc":
        rhs, hi = rhs_mrc, max(4.0 * n_antennas, 1e3)
    else:
        rhs, hi = rhs_zf, n_antennas + 1.0 - x_exp - 1e-9
    if target <= rhs(lo):
        return 1
    if target >= rhs(hi):
        return n_antennas
    root = _bisect_increasing(rhs, target, lo, hi)
    return min(max(math.floor(root), 1), n_antennas)


def kappa_opt_lowbeta(receiver: str, net: NetworkParams) -> float:
    """Limiting stream fraction M/N in the many-antenna, low-threshold regime."""
    if receiver not in ("mrc", "zf"):
        raise DomainError(f"receiver must be 'mrc' or 'zf', got {receiver!r}")
    prefactor = (
        net.alpha / (net.intensity * math.pi * net.p * net.r_tr ** 2 * (net.alpha + 2.0))
    ) ** (net.alpha / 2.0) / net.beta
    if receiver == "mrc":
        return min(prefactor, 1.0)

    def step(k: float) -> float:
        ratio = k / (1.0 - k)
        return prefactor * (1.0 - k) / (1.0 + ratio * 2.0 / (net.alpha + 2.0)) ** (
            net.alpha / 2.0
        )

    # damped iteration; the map is decreasing, so halve the damping whenever
    # the residual changes sign and the iteration contracts onto the fixed point
    kappa = 0.5
    damping = 0.5
    last_sign = 0.0
    for _ in range(10_000):
        residual = min(max(step(kappa), 1e-12), 1.0 - 1e-12) - kappa
        if abs(residual) < 1e-10:
            return min(max(kappa, 0.0), 1.0)
        if last_sign and math.copysign(1.0, residual) != last_sign:
            damping *= 0.5
        last_sign = math.copysign(1.0, residual)
        kappa = min(max(kappa + damping * residual, 1e-12), 1.0 - 1e-12)
    raise NonConvergenceError("stream-fraction fixed point did not converge")


# ---------------------------------------------------------------------------
# transmission capacity
# ---------------------------------------------------------------------------
# Contention density is defined against the *effective* transmitter density
# intensity*p, so capacity expressions use the p = 1 geometry constant and do
# not depend on the ALOHA probability.

def invert_outage_for_density(
    glp: GammaLawParams, beta: float, epsilon: float, alpha: float
) -> float:
    """Effective density lambda*p at which the outage equals epsilon.

    Bisection on a geometrically expanded bracket; the CDF is monotone
    increasing in the density.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must sit in (0, 1), got {epsilon}")
    floor = single_user_outage(glp, beta)
    if epsilon <= floor:
        raise InfeasibleError(
            f"epsilon = {epsilon} at or below the no-interference floor {floor:.6g}"
        )
    coeff = (beta * glp.omega / glp.theta) ** (2.0 / alpha) * eta(glp.n, 1.0, alpha)

    def cdf(dens: float) -> float:
        return _outage_cdf_at(glp, alpha, beta, dens * coeff)

    hi = 1e-6
    while cdf(hi) < epsilon:
        hi *= 4.0
        if hi > 1e12:
            raise NoRootError("outage never reaches epsilon below density 1e12")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < epsilon:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def tc_exact_zf_full(n_antennas: int, epsilon: float, net: NetworkParams) -> float:
    """Exact transmission capacity of full-stream ZF (M = N), floored at zero."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must sit in (0, 1), got {epsilon}")
    x = 2.0 / net.alpha
    margin = math.log(1.0 / (1.0 - epsilon)) - (
        net.beta * net.r_tr ** net.alpha * n_antennas / net.rho
    )
    if margin <= 0.0:
        return 0.0
    geom = (net.beta * net.r_tr ** net.alpha) ** x * eta(float(n_antennas), 1.0, net.alpha)
    return n_antennas * (1.0 - epsilon) * margin / geom


def hypergeom_capacity_denominator(glp: GammaLawParams, beta: float, alpha: float) -> float:
    """E[e^(-beta(Y+1)/theta) 1F1(1-m, 1+2/alpha-m, beta(Y+1)/theta)].

    Evaluated along two independent routes (the binomial/gamma finite sum and
    the truncated confluent series) that must agree; disagreement signals a
    numerical problem and raises.
    """
    m = glp.m
    b = beta / glp.theta
    x = 2.0 / alpha
    t_weights = _binom_weighted_moments(glp, beta, m - 1)

    log_b = math.log(b) if b > 0 else -math.inf
    gamma_route = math.fsum(
        math.exp(
            specfun.ln_gamma(m) - specfun.ln_gamma(l + 1) - specfun.ln_gamma(m - l)
            + l * log_b
            + specfun.ln_gamma(m - l - x) - specfun.ln_gamma(m - x)
            - b
        ) * t_weights[l]
        for l in range(m)
    )

    # same object via the truncated confluent-series coefficients
    coeff = 1.0
    series_route_terms = [math.exp(-b) * t_weights[0]]
    for j in range(1, m):
        coeff *= (1.0 - m + (j - 1)) * 1.0 / ((1.0 + x - m + (j - 1)) * j)
        series_route_terms.append(coeff * b ** j * math.exp(-b) * t_weights[j])
    series_route = math.fsum(series_route_terms)

    if abs(series_route - gamma_route) > 1e-9 * max(abs(gamma_route), 1e-300):
        raise NumericalInstabilityError(
            f"capacity denominator routes disagree: {gamma_route} vs {series_route}"
        )
    return gamma_route


def tc_small_eps(tq: TcQuery) -> float:
    """First-order transmission capacity just above the no-interference floor."""
    glp, net = tq.glp, tq.net
    beta = net.beta
    floor = single_user_outage(glp, beta)
    margin = tq.epsilon - floor
    if margin <= 0.0:
        return 0.0
    x = 2.0 / net.alpha
    log_pref = (
        x * math.log(glp.theta)
        + specfun.ln_gamma(glp.n)
        + specfun.ln_gamma(glp.m)
        - math.log(math.pi)
        - x * math.log(beta * glp.omega)
        - specfun.ln_gamma(glp.n + x)
        - specfun.ln_gamma(glp.m - x)
    )
    denom = hypergeom_capacity_denominator(glp, beta, net.alpha)
    return tq.zeta * math.exp(log_pref) * margin / denom


def tc_large_antenna(tq: TcQuery) -> float:
    """Many-antenna capacity limit: gamma laws concentrate on their means."""
    glp, net = tq.glp, tq.net
    beta = net.beta
    floor = single_user_outage(glp, beta)
    margin = tq.epsilon - floor
    if margin <= 0.0:
        return 0.0
    u = glp.u if glp.u is not None else 0.0
    ups = glp.upsilon if glp.upsilon is not None else 0.0
    mean_margin = glp.m * glp.theta - beta - beta * u * ups
    if mean_margin <= 0.0:
        return 0.0
    x = 2.0 / net.alpha
    return (
        tq.zeta
        * (mean_margin / (glp.n * glp.omega)) ** x
        * margin
        / (math.pi * net.r_tr ** 2 * beta ** x)
    )


@dataclass(frozen=True)
class ScalingVerdict:
    beta_bar: float          # threshold below which capacity grows linearly in N
    linear: bool             # whether the operating threshold sits below it
    zf_window_wider: bool    # whether ZF's linear-scaling window beats MRC's


def linear_scaling_region(receiver: str, kappa: float, net: NetworkParams) -> ScalingVerdict:
    """Linear-vs-zero capacity scaling verdict for M = kappa*N as N grows."""
    if receiver not in ("mrc", "zf"):
        raise DomainError(f"receiver must be 'mrc' or 'zf', got {receiver!r}")
    snr_rx = net.rho / net.r_tr ** net.alpha
    if receiver == "mrc":
        if not 0.0 < kappa <= 1.0:
            raise DomainError(f"MRC needs 0 < kappa <= 1, got {kappa}")
        beta_bar = 1.0 / (kappa * (1.0 / snr_rx + 1.0))
    else:
        if not 0.0 < kappa < 1.0:
            raise DomainError(f"ZF needs 0 < kappa < 1, got {kappa}")
        beta_bar = snr_rx * (1.0 / kappa - 1.0)
    return ScalingVerdict(
        beta_bar=beta_bar,
        linear=net.beta < beta_bar,
        zf_window_wider=snr_rx > kappa / (1.0 - kappa),
    )


def kappa_star(receiver: str, net: NetworkParams, n_antennas: int) -> int:
    """Capacity-optimal stream count via the limiting optimal fraction."""
    if receiver not in ("mrc", "zf"):
        raise DomainError(f"receiver must be 'mrc' or 'zf', got {receiver!r}")
    x = 2.0 / net.alpha
    ratio = net.r_tr ** net.alpha / net.rho
    if receiver == "mrc":
        frac = (1.0 - x) / (net.beta * (1.0 + ratio))
    else:
        frac = (1.0 - x) / (1.0 + ratio * net.beta)
    return max(1, min(math.floor(n_antennas * frac), n_antennas))


# ---------------------------------------------------------------------------
# space-time-code capacity scaling
# ---------------------------------------------------------------------------

def ostbc_g(code: OstbcCode, alpha: float) -> float:
    """Leading capacity factor R * M^(2/alpha) * Gamma(n_I/M)/Gamma(n_I/M + 2/alpha)."""
    x = 2.0 / alpha
    shape = code.n_interf_uniform() / code.M
    return float(code.rate) * code.M ** x * math.exp(
        specfun.ln_gamma(shape) - specfun.ln_gamma(shape + x)
    )


def ostbc_g_bounds(m_tx: int, alpha: float) -> tuple:
    """Bounds on the capacity factor over all maximum-rate codes with M antennas.

    The upper bound carries an extra Gamma(1 - 2/alpha) factor relative to the
    bare even/odd rate-and-shape bound; without it the Alamouti code itself
    violates the bound, so the factor is required for a true envelope.  The
    argmax over M is unaffected.
    """
    if m_tx < 2:
        raise DomainError(f"bounds defined for M >= 2, got {m_tx}")
    x = 2.0 / alpha
    lb = (2.0 * m_tx / (m_tx + 2.0)) ** x / (2.0 * math.gamma(1.0 + x))
    if m_tx % 2 == 0:
        ub_core = (2.0 * m_tx / (m_tx + 2.0)) ** (x - 1.0)
    else:
        ub_core = (m_tx + 3.0) / (2.0 * (m_tx + 1.0)) * (2.0 * m_tx / (m_tx + 1.0)) ** x
    return lb, math.gamma(1.0 - x) * ub_core


def sm_beats_ostbc(
    receiver: str, m_tx: int, n_rx: int, code: OstbcCode, net: NetworkParams
) -> bool:
    """Whether spatial multiplexing out-scales the given code in capacity."""
    if receiver not in ("mrc", "zf"):
        raise DomainError(f"receiver must be 'mrc' or 'zf', got {receiver!r}")
    x = 2.0 / net.alpha
    n_i = code.n_interf_uniform()
    room = 1.0 - m_tx / n_rx if receiver == "zf" else 1.0 - m_tx * net.beta / n_rx
    if room <= 0.0:
        return False
    rhs = m_tx / math.gamma(1.0 + x) * (n_i / m_tx ** 3 * room) ** x
    return float(code.rate) < rhs


def alamouti_beats_simo(n_rx: int, alpha: float) -> bool:
    """Advisory low-threshold comparison of the two maximum-rate choices."""
    x = 2.0 / alpha
    lhs = math.exp(
        specfun.ln_gamma(n_rx - x) + specfun.ln_gamma(2 * n_rx)
        - specfun.ln_gamma(n_rx) - specfun.ln_gamma(2 * n_rx - x)
    )
    return lhs > 1.0 + x


# ---------------------------------------------------------------------------
# coordinated-access protocol
# ---------------------------------------------------------------------------

def ca_density(intensity: float, r_gz: float) -> float:
    """Scheduled-transmitter density of the guard-zone TDMA protocol."""
    if not r_gz > 0:
        raise DomainError(f"guard half-width must be positive, got {r_gz}")
    if math.isinf(intensity):
        return 1.0 / (4.0 * r_gz ** 2)
    return -math.expm1(-4.0 * intensity * r_gz ** 2) / (4.0 * r_gz ** 2)


def ca_throughput_bound(intensity: float, r_gz: float, net: NetworkParams) -> float:
    """Upper bound on guard-zone TDMA throughput for single-antenna pairs.

    Pass intensity = inf for the saturated dense-network limit.
    """
    lam_ca = ca_density(intensity, r_gz)
    x = 2.0 / net.alpha
    s = net.beta * net.r_tr ** net.alpha
    full_plane = 2.0 * s ** x * math.gamma(x) * math.gamma(1.0 - x) / net.alpha
    c = 2.0 * r_gz / math.sqrt(math.pi)
    carved = c ** 2 * specfun.gauss_2f1(x, 1.0, 1.0 + x, -(c / net.r_tr) ** net.alpha / net.beta)
    return (
        math.exp(-s / net.rho)
        * lam_ca
        * math.exp(-math.pi * lam_ca * (full_plane - carved))
    )


def ca_optimal_guard(intensity: float, net: NetworkParams) -> float:
    """Guard half-width maximizing the TDMA throughput bound.

    Coarse log-grid sweep over (0, 100*r_tr] picks the global basin, then
    golden-section refines to 1e-6 relative.
    """
    if not intensity > 0:
        raise DomainError(f"intensity must be positive, got {intensity}")

    def objective(r: float) -> float:
        return ca_throughput_bound(intensity, r, net)

    grid = np.geomspace(1e-3 * net.r_tr, 100.0 * net.r_tr, 200)
    vals = [objective(r) for r in grid]
    best = int(np.argmax(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - inv_phi * (b - a)
    c2 = a + inv_phi * (b - a)
    f1, f2 = objective(c1), objective(c2)
    while b - a > 1e-6 * b:
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + inv_phi * (b - a)
            f2 = objective(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - inv_phi * (b - a)
            f1 = objective(c1)
    return 0.5 * (a + b)


def aloha_vs_ca_region(
    scheme: SchemeSpec, intensities, probabilities, net: NetworkParams
) -> np.ndarray:
    """Boolean matrix: does ALOHA throughput beat the optimized TDMA bound?

    Rows follow the intensity grid, columns the transmit-probability grid.
    The coordinated baseline is single-antenna, so the ALOHA scheme must use
    a single transmit stream for a like-for-like comparison.
    """
    if scheme.M != 1:
        raise DomainError("the MAC comparison is defined for single-stream schemes")
    intensities = np.asarray(list(intensities), dtype=float)
    probabilities = np.asarray(list(probabilities), dtype=float)
    wins = np.zeros((intensities.size, probabilities.size), dtype=bool)
    for i, lam in enumerate(intensities):
        base = net.replace(intensity=float(lam))
        r_star = ca_optimal_guard(float(lam), base)
        bound = ca_throughput_bound(float(lam), r_star, base)
        for j, p in enumerate(probabilities):
            if p == 0.0:
                continue
            wins[i, j] = throughput(scheme, base.replace(p=float(p))) > bound
    return wins
