"""Classical polylogarithms on the unit circle and Clausen functions.

Li_a(e^{i*theta}) is evaluated through the expansion around the logarithmic
singularity at theta = 0 (integer a >= 2, mu = i*theta, |mu| < 2*pi):

    Li_a(e^mu) = mu^(a-1)/(a-1)! * (H_{a-1} - log(-mu))
                 + sum_{n>=0, n != a-1} zeta(a-n) mu^n / n!

The zeta values at non-positive integers are Bernoulli rationals, so after
conjugating angles above pi into (0, pi] the series converges geometrically
with ratio theta/(2*pi) <= 1/2 and carries the explicit tail bound
3.3 (2pi)^(a-1) q^(M+1)/(1-q).  This is the only place the package needs
circle polylogs, so no attempt is made at |z| != 1.
"""

from __future__ import annotations

import math

import mpmath as mp

from ..precision import Angle, BigReal, working_dps
from .zeta import zeta_int, zeta_mpf


def _series_length(a: int, theta: float, dps: int) -> int:
    q = theta / (2 * math.pi)
    # 3.3 (2pi)^(a-1) q^(M+1)/(1-q) < 10^-(dps+2)
    log10_pref = math.log10(3.3) + (a - 1) * math.log10(2 * math.pi) - math.log10(1 - q)
    m = int((dps + 2 + log10_pref) / -math.log10(q)) + 2
    return max(m, a + 3)


def li_unit_circle(a: int, theta, dps: int):
    """Li_a(e^{i*theta}) as an mpc, for integer a >= 2 and real theta in [0, 2pi).

    Must be called with mp.mp.dps already >= dps; theta is consumed at that
    precision.
    """
    if a < 2:
        raise ValueError(f"series diverges on the circle for a < 2 (got a={a})")
    theta = mp.mpf(theta)
    if theta == 0:
        return mp.mpc(zeta_mpf(a, dps), 0)
    if theta > mp.pi:
        return mp.conj(li_unit_circle(a, 2 * mp.pi - theta, dps))
    if theta == mp.pi:
        eta = (1 - mp.mpf(2) ** (1 - a)) * zeta_mpf(a, dps)
        return mp.mpc(-eta, 0)

    terms = _series_length(a, float(theta), dps)
    mu = mp.mpc(0, theta)
    h = sum(mp.mpf(1) / k for k in range(1, a))
    log_neg_mu = mp.log(theta) - mp.mpc(0, mp.pi / 2)  # log(-i*theta), theta > 0
    total = mu ** (a - 1) / mp.factorial(a - 1) * (h - log_neg_mu)
    mu_pow = mp.mpc(1, 0)
    fact = mp.mpf(1)
    for n in range(terms + 1):
        if n:
            mu_pow *= mu
            fact *= n
        if n == a - 1:
            continue
        z = zeta_int(a - n, dps)
        if z:
            total += z * mu_pow / fact
    return total


def polylog_on_circle(a: int, theta: Angle, digits: int) -> tuple[BigReal, BigReal]:
    """(Re, Im) of sum_{n>=1} e^{i n theta}/n^a, each accurate to ``digits``."""
    dps = working_dps(digits)
    theta.require_digits(digits)
    with mp.workdps(dps):
        th = theta.radians()
        if th >= 2 * mp.pi:  # k = 6 wraps to the same circle point as 0
            th -= 2 * mp.pi
        val = li_unit_circle(a, th, dps)
        return BigReal(+val.real, digits), BigReal(+val.imag, digits)


def clausen(j: int, theta: Angle, digits: int) -> BigReal:
    """Cl_j(theta): sin series for even j, cos series for odd j."""
    if j < 2:
        raise ValueError(f"Clausen needs j >= 2, got {j}")
    re, im = polylog_on_circle(j, theta, digits)
    return im if j % 2 == 0 else re
