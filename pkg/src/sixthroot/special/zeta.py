"""Zeta and Hurwitz-zeta values by Euler-Maclaurin summation.

The tail machinery lives here because three other subsystems reuse it: the
unit-circle polylogarithm expansion needs zeta at integer arguments, the
nested-sum engine needs Hurwitz tails sum_{n>=0} (a+n)^(-s) at large shifts,
and the constants registry needs zeta(2)..zeta(5).

Euler-Maclaurin with f(x) = (b+x)^(-s):

    sum_{n>=0} (a+n)^(-s) = sum_{n<N} (a+n)^(-s) + b^(1-s)/(s-1) + b^(-s)/2
                            + sum_{k=1}^{K} B_{2k}/(2k)! (s)_{2k-1} b^(-s-2k+1) + R_K

with b = a+N.  Because x^(-s) is completely monotone the remainder R_K is
bounded in magnitude by the first neglected correction term; parameters (N, K)
are chosen at runtime from that bound.  Even zeta arguments use the classical
closed forms in pi instead.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath as mp

from ..precision import BigReal, mpf_from_fraction, working_dps

_LN_2PI = math.log(2 * math.pi)

_cache_lock = threading.Lock()
_zeta_cache: dict[tuple[int, int], mp.mpf] = {}


def _log10_em_remainder(s: int, b: float, k: int) -> float:
    """log10 of the Euler-Maclaurin remainder bound after k correction terms."""
    # |B_{2k+2}|/(2k+2)! <= 2*zeta(2k+2)/(2pi)^(2k+2) <= 4/(2pi)^(2k+2)
    ln = (
        math.log(4.0)
        - (2 * k + 2) * _LN_2PI
        + math.lgamma(s + 2 * k + 1)
        - math.lgamma(s)
        - (s + 2 * k + 1) * math.log(b)
    )
    return ln / math.log(10.0)


def _choose_em_parameters(s: int, a: float, log10_eps: float) -> tuple[int, int]:
    """Smallest-cost (N, K) with remainder below 10**log10_eps."""
    shift = 0
    while shift < 10**8:
        b = a + shift
        # corrections shrink only while s+2k < 2*pi*b; scan k up to that point
        k_cap = max(4, int(math.pi * b - s / 2))
        best_k = None
        prev = math.inf
        for k in range(1, k_cap):
            cur = _log10_em_remainder(s, b, k)
            if cur <= log10_eps:
                best_k = k
                break
            if cur > prev + 0.5:  # diverging; larger k cannot help
                break
            prev = cur
        if best_k is not None:
            return shift, best_k
        shift = max(8, shift * 2)
    raise RuntimeError("Euler-Maclaurin parameter search failed")  # pragma: no cover


def hurwitz_tail(s: int, a, extra_log10: int = 5):
    """sum_{n>=0} (a+n)^(-s) at the current working precision.

    ``s`` is an integer >= 2 and ``a`` a positive mpf/int/Fraction.  The
    result is accurate to roughly current-dps + extra_log10 spare digits of
    the leading magnitude, i.e. the absolute error is below
    a^(1-s) * 10^-(dps + extra_log10 - slack).
    """
    if s < 2:
        raise ValueError(f"hurwitz_tail needs s >= 2, got {s}")
    a = mpf_from_fraction(a) if isinstance(a, Fraction) else mp.mpf(a)
    if a <= 0:
        raise ValueError("hurwitz_tail needs a > 0")
    dps = mp.mp.dps
    # target absolute error relative to the a^(1-s)/(s-1) leading scale
    lead = (1 - s) * math.log10(float(a)) if a > 1 else 0.0
    log10_eps = lead - dps - extra_log10
    shift, k_terms = _choose_em_parameters(s, float(a), log10_eps)

    total = mp.mpf(0)
    for n in range(shift):
        total += (a + n) ** (-s)
    b = a + shift
    binv = 1 / b
    total += b ** (1 - s) / (s - 1)
    total += b ** (-s) / 2
    # incremental Pochhammer (s)_{2k-1} and power b^(-s-2k+1)
    poch = mp.mpf(s)  # (s)_1
    bpow = b ** (-s - 1)
    binv2 = binv * binv
    for k in range(1, k_terms + 1):
        if k > 1:
            poch *= (s + 2 * k - 3) * (s + 2 * k - 2)
            bpow *= binv2
        total += mp.bernoulli(2 * k) / (mp.factorial(2 * k)) * poch * bpow
    return total


def zeta_even_exact(s: int) -> tuple[Fraction, int]:
    """zeta(2m) as (rational, power): zeta(2m) = rational * pi^(2m)."""
    if s < 2 or s % 2:
        raise ValueError("zeta_even_exact needs even s >= 2")
    m = s // 2
    b2m = Fraction(*(int(x) for x in mp.bernfrac(2 * m)))
    coeff = (-1) ** (m + 1) * b2m * Fraction(4**m, 2) / Fraction(math.factorial(2 * m))
    return coeff, s


def zeta_mpf(s: int, dps: int):
    """zeta(s) for integer s >= 2 as an mpf accurate at ``dps`` places."""
    if s < 2:
        raise ValueError(f"zeta is evaluated for integer s >= 2 only, got {s}")
    key = (s, dps)
    with _cache_lock:
        hit = _zeta_cache.get(key)
    if hit is not None:
        return hit
    with mp.workdps(dps):
        if s % 2 == 0:
            coeff, power = zeta_even_exact(s)
            val = mpf_from_fraction(coeff) * mp.pi**power
        else:
            val = hurwitz_tail(s, 1)
        val = +val
    with _cache_lock:
        _zeta_cache[key] = val
    return val


def zeta_int(n: int, dps: int):
    """zeta at any integer n != 1 (negative arguments via Bernoulli numbers)."""
    if n == 1:
        raise ValueError("zeta(1) diverges")
    if n >= 2:
        return zeta_mpf(n, dps)
    with mp.workdps(dps):
        if n == 0:
            return mp.mpf(-0.5)
        m = -n
        if m % 2 == 0:
            return mp.mpf(0)
        return +(-mp.bernoulli(m + 1) / (m + 1))


def zeta(s: int, digits: int) -> BigReal:
    """zeta(s) with ``digits`` guaranteed significant digits (s >= 2)."""
    dps = working_dps(digits)
    return BigReal(zeta_mpf(s, dps), digits)
