"""Exact combinatorics and the special functions needed by the closed forms.

Stirling numbers are kept as exact Python integers (the outage CDF is an
alternating sum over them, so rounding them is not an option).  The
hypergeometric evaluations are plain truncated/transformed series with
explicit convergence guards; everything here is a pure function of its
arguments and safe to call concurrently.
"""

from __future__ import annotations

import math

from scipy import special as _sp

from .errors import DomainError, NonConvergenceError, PoleError

STIRLING_MAX_N = 64

_SERIES_TOL = 1e-16
_SERIES_MAX_TERMS = 10_000


def _build_stirling_triangles(n_max: int):
    # s(n+1,k) = s(n,k-1) - n*s(n,k);  S(n+1,k) = k*S(n,k) + S(n,k-1)
    s1 = [[0] * (n_max + 1) for _ in range(n_max + 1)]
    s2 = [[0] * (n_max + 1) for _ in range(n_max + 1)]
    s1[0][0] = 1
    s2[0][0] = 1
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            s1[n][k] = s1[n - 1][k - 1] - (n - 1) * s1[n - 1][k]
            s2[n][k] = s2[n - 1][k - 1] + k * s2[n - 1][k]
    return s1, s2


# Built once at import; read-only afterwards, so concurrent reads are safe.
_S1, _S2 = _build_stirling_triangles(STIRLING_MAX_N)


def _check_stirling_args(n: int, k: int) -> None:
    if n < 0 or k < 0:
        raise DomainError(f"Stirling numbers need n, k >= 0, got ({n}, {k})")
    if k > n:
        raise DomainError(f"Stirling numbers need k <= n, got ({n}, {k})")
    if n > STIRLING_MAX_N:
        raise DomainError(f"Stirling table capped at n = {STIRLING_MAX_N}, got n = {n}")


def stirling_first_signed(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s(n, k), exact."""
    _check_stirling_args(n, k)
    return _S1[n][k]


def stirling_second(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k), exact."""
    _check_stirling_args(n, k)
    return _S2[n][k]


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def kummer_1f1_polynomial(a: int, b: float, z: float) -> float:
    """Confluent hypergeometric sum with nonpositive-integer first parameter.

    With a in {0, -1, -2, ...} the series terminates; this returns the exact
    truncation  sum_{j=0}^{-a} (a)_j z^j / ((b)_j j!).
    """
    a_int = int(a)
    if a_int != a or a_int > 0:
        raise DomainError(f"first parameter must be a nonpositive integer, got {a}")
    terms = [1.0]
    t = 1.0
    for j in range(-a_int):
        den = b + j
        if den == 0.0:
            raise PoleError(f"(b)_j vanishes at j = {j + 1} for b = {b}")
        t *= (a_int + j) * z / (den * (j + 1))
        terms.append(t)
    return math.fsum(terms)


def _hyp2f1_series(a: float, b: float, c: float, z: float) -> float:
    """Direct Gauss series; caller guarantees |z| < 1."""
    t = 1.0
    terms = [t]
    for j in range(_SERIES_MAX_TERMS):
        t *= (a + j) * (b + j) * z / ((c + j) * (j + 1))
        terms.append(t)
        if abs(t) < _SERIES_TOL * max(1.0, abs(math.fsum(terms))) and j > 2:
            return math.fsum(terms)
    raise NonConvergenceError(
        f"2F1 series did not converge after {_SERIES_MAX_TERMS} terms (z = {z})"
    )


def _hyp2f1_pfaff(a: float, b: float, c: float, z: float) -> float:
    # 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), mapping z<0 into [0,1)
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, w)


def _hyp2f1_large_neg(a: float, b: float, c: float, z: float) -> float:
    # Connection formula at z -> -inf; needs a - b non-integer.
    if abs((a - b) - round(a - b)) < 1e-8:
        # fall back on the Pfaff route; may be slow but stays correct
        return _hyp2f1_pfaff(a, b, c, z)
    ga = math.gamma(c) * math.gamma(b - a) / (math.gamma(b) * math.gamma(c - a))
    gb = math.gamma(c) * math.gamma(a - b) / (math.gamma(a) * math.gamma(c - b))
    inv = 1.0 / z
    term_a = ga * (-z) ** (-a) * _hyp2f1_series(a, a - c + 1.0, a - b + 1.0, inv)
    term_b = gb * (-z) ** (-b) * _hyp2f1_series(b, b - c + 1.0, b - a + 1.0, inv)
    return term_a + term_b


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function on the nonpositive real axis.

    The direct series is used on (-0.9, 0]; more negative arguments go
    through the Pfaff transformation, and once even the transformed series
    becomes slow (z << -1) the large-argument connection formula takes over.
    """
    if z > 0:
        raise DomainError(f"gauss_2f1 implemented for z <= 0 only, got z = {z}")
    if c <= 0 and c == int(c):
        raise DomainError(f"c must not be a nonpositive integer, got c = {c}")
    if z == 0.0:
        return 1.0
    if z > -0.9:
        return _hyp2f1_series(a, b, c, z)
    if z > -9.0:
        return _hyp2f1_pfaff(a, b, c, z)
    return _hyp2f1_large_neg(a, b, c, z)


def gamma_cdf(x: float, shape: float, scale: float) -> float:
    """Regularized lower incomplete gamma CDF P(shape, x/scale)."""
    if not (shape > 0 and scale > 0):
        raise DomainError(f"gamma_cdf needs shape, scale > 0, got ({shape}, {scale})")
    if x < 0:
        raise DomainError(f"gamma_cdf needs x >= 0, got {x}")
    return float(_sp.gammainc(shape, x / scale))
