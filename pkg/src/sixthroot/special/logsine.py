"""Generalized log-sine integrals by singular series plus Gauss-Legendre panels.

The target is

    ls(j, k, theta) = -int_0^theta phi^k ln^(j-k-1)|2 sin(phi/2)| dphi,

whose integrand is singular only through powers of ln(phi) at phi = 0 and,
mirrored, at phi = 2*pi.  The quadrature scheme:

* on [0, min(theta, 1/2)] write ln(2 sin(phi/2)) = ln(phi) + g(phi) with the
  even power series g(phi) = sum_m c_m phi^(2m), c_m = (-1)^m B_{2m}/(2m (2m)!),
  expand the p-th power binomially and integrate phi^A ln^t(phi) termwise in
  closed form.  Tail control: |[phi^(2m)] g^r| <= 0.43^r / 9^m (Cauchy bound on
  |phi| = 3), so truncation at M terms leaves less than 200 * 36^-M.
* on [1/2, min(theta, 2*pi - 1/2)] use composite Gauss-Legendre with panels
  bisected until each panel's distance to the nearest singularity is at least
  twice its half-width (Bernstein ellipse rho >= 2 + sqrt(3)); node counts come
  from the rho^(-2n) decay estimate and every panel is re-evaluated at doubled
  order as an a-posteriori check.
* beyond 2*pi - 1/2 substitute psi = 2*pi - phi, which maps the integrand back
  onto the singular series with binomial (2*pi - psi)^k weights.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath as mp

from ..errors import PrecisionError
from ..precision import Angle, BigReal, working_dps

_node_lock = threading.Lock()
_node_cache: dict[tuple[int, int], tuple[list, list]] = {}

_series_lock = threading.Lock()
_series_cache: dict[tuple[int, int, int], list[list]] = {}


@dataclass(frozen=True)
class LogSineSpec:
    """Weight index j >= 2, angular power k with 0 <= k <= j-2, angle in (0, 2pi]."""

    j: int
    k: int
    theta: Angle

    def __post_init__(self):
        if self.j < 2:
            raise ValueError(f"log-sine weight index must be >= 2, got j={self.j}")
        if not 0 <= self.k <= self.j - 2:
            raise ValueError(f"need 0 <= k <= j-2, got k={self.k}, j={self.j}")


def _sin_log_series(pmax: int, m_terms: int, dps: int) -> list[list]:
    """Coefficient tables for g(phi)^r, r = 0..pmax, up to phi^(2*m_terms)."""
    key = (pmax, m_terms, dps)
    with _series_lock:
        hit = _series_cache.get(key)
    if hit is not None:
        return hit
    with mp.workdps(dps):
        g = [mp.mpf(0)] * (m_terms + 1)
        for m in range(1, m_terms + 1):
            g[m] = (-1) ** m * mp.bernoulli(2 * m) / (2 * m * mp.factorial(2 * m))
        powers = [[mp.mpf(1)] + [mp.mpf(0)] * m_terms, g]
        for _ in range(2, pmax + 1):
            prev = powers[-1]
            nxt = [mp.mpf(0)] * (m_terms + 1)
            for i in range(m_terms + 1):
                if prev[i]:
                    for l in range(1, m_terms - i + 1):
                        nxt[i + l] += prev[i] * g[l]
            powers.append(nxt)
    with _series_lock:
        _series_cache[key] = powers
    return powers


def _int_pow_log(a_plus_1, t: int, x, ln_x) -> mp.mpf:
    """int_0^x phi^A ln^t(phi) dphi with a_plus_1 = A+1 (> 0), x > 0."""
    inv = mp.mpf(1) / a_plus_1
    total = mp.mpf(0)
    coeff = mp.mpf(1)  # t!/(t-i)! * (-1)^i
    lnpow = ln_x**t if t else mp.mpf(1)
    for i in range(t + 1):
        total += coeff * lnpow * inv ** (i + 1)
        if i < t:
            coeff *= -(t - i)
            lnpow = ln_x ** (t - i - 1)
    return x**a_plus_1 * total


def _singular_piece(k: int, p: int, x, gpowers: list[list]) -> mp.mpf:
    """int_0^x phi^k (ln(phi) + g(phi))^p dphi for 0 <= x <= 1/2."""
    if x <= 0:
        return mp.mpf(0)
    ln_x = mp.log(x)
    m_terms = len(gpowers[0]) - 1
    total = mp.mpf(0)
    for t in range(p + 1):
        gr = gpowers[p - t]
        binom = mp.binomial(p, t)
        for m in range(m_terms + 1):
            if gr[m]:
                total += binom * gr[m] * _int_pow_log(k + 2 * m + 1, t, x, ln_x)
    return total


def _legendre_eval(n: int, x):
    """(P_n(x), P_n'(x)) by the three-term recurrence."""
    p0, p1 = mp.mpf(1), x
    for i in range(1, n):
        p0, p1 = p1, ((2 * i + 1) * x * p1 - i * p0) / (i + 1)
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _gl_nodes(n: int, dps: int) -> tuple[list, list]:
    """Gauss-Legendre nodes and weights on [-1, 1] at ``dps`` digits."""
    key = (n, dps)
    with _node_lock:
        hit = _node_cache.get(key)
    if hit is not None:
        return hit
    half = (n + 1) // 2
    nodes = [mp.mpf(0)] * n
    weights = [mp.mpf(0)] * n
    for ladder in (40, dps + 10):
        with mp.workdps(ladder):
            eps = mp.mpf(10) ** (-(ladder - 3))
            for i in range(half):
                x = nodes[i] if nodes[i] else mp.mpf(math.cos(math.pi * (i + 0.75) / (n + 0.5)))
                for _ in range(100):
                    pn, dpn = _legendre_eval(n, x)
                    dx = pn / dpn
                    x -= dx
                    if abs(dx) < eps:
                        break
                else:  # pragma: no cover
                    raise RuntimeError("Legendre root refinement failed to converge")
                nodes[i] = x
    with mp.workdps(dps + 10):
        for i in range(half):
            x = nodes[i]
            _, dpn = _legendre_eval(n, x)
            w = 2 / ((1 - x * x) * dpn * dpn)
            weights[i] = w
            nodes[n - 1 - i] = -x
            weights[n - 1 - i] = w
        if n % 2:
            nodes[half - 1] = mp.mpf(0)
    result = (nodes, weights)
    with _node_lock:
        _node_cache[key] = result
    return result


def _gl_integrate(f, lo, hi, n: int, dps: int):
    nodes, weights = _gl_nodes(n, dps)
    center = (lo + hi) / 2
    halfw = (hi - lo) / 2
    total = mp.mpf(0)
    for x, w in zip(nodes, weights):
        total += w * f(center + halfw * x)
    return halfw * total


def _panels(lo, hi, two_pi) -> list[tuple]:
    """Bisect [lo, hi] until every panel sits well clear of 0 and 2*pi."""
    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        c = (a + b) / 2
        h = (b - a) / 2
        d = min(c, two_pi - c)
        if d >= 2 * h or h < mp.mpf("1e-3"):
            out.append((a, b, float(d / h)))
        else:
            stack.append((a, c))
            stack.append((c, b))
    return sorted(out)


def _panel_order(ratio: float, dps: int) -> int:
    rho = ratio + math.sqrt(ratio * ratio - 1) if ratio > 1 else 1.5
    n = int(dps * math.log(10) / (2 * math.log(rho))) + 8
    return ((n // 16) + 1) * 16


def _gl_region(k: int, p: int, lo, hi, dps: int):
    """Composite GL of phi^k ln^p(2 sin(phi/2)) over [lo, hi] with doubling check."""

    def integrand(phi):
        return phi**k * mp.log(2 * mp.sin(phi / 2)) ** p

    total = mp.mpf(0)
    for a, b, ratio in _panels(lo, hi, 2 * mp.pi):
        n = _panel_order(ratio, dps)
        coarse = _gl_integrate(integrand, a, b, n, dps)
        for _ in range(3):
            fine = _gl_integrate(integrand, a, b, 2 * n, dps)
            if abs(fine - coarse) <= mp.mpf(10) ** (-(dps - 3)) * (1 + abs(fine)):
                break
            coarse, n = fine, 2 * n
        else:  # pragma: no cover
            raise RuntimeError("Gauss-Legendre doubling did not stabilise")
        total += fine
    return total


def log_sine(spec: LogSineSpec, digits: int) -> BigReal:
    """Ls with indices (j, k) at spec.theta, accurate to ``digits`` digits."""
    dps = working_dps(digits)
    spec.theta.require_digits(digits)
    p = spec.j - spec.k - 1
    k = spec.k
    with mp.workdps(dps + 8):
        theta = spec.theta.radians()
        two_pi = 2 * mp.pi
        if theta == 0:
            return BigReal(mp.mpf(0), digits)
        # tolerate representation fuzz of raw angles constructed at lower precision
        if theta > two_pi:
            if theta - two_pi > mp.mpf(10) ** (-(digits - 2)):
                raise ValueError("log-sine integrals are defined for theta <= 2*pi")
            theta = two_pi
        m_terms = int((dps + 10) / math.log10(36.0)) + 3
        gpow = _sin_log_series(p, m_terms, dps + 8)
        half = mp.mpf(1) / 2
        phi0 = min(theta, half)
        total = _singular_piece(k, p, phi0, gpow)
        if theta > half:
            hi = min(theta, two_pi - half)
            total += _gl_region(k, p, half, hi, dps + 8)
        if theta > two_pi - half:
            x2 = two_pi - theta
            if x2 < mp.mpf(10) ** (-(dps + 2)):
                x2 = mp.mpf(0)  # theta == 2*pi up to representation fuzz
            for i in range(k + 1):
                coeff = mp.binomial(k, i) * two_pi ** (k - i) * (-1) ** i
                total += coeff * (
                    _singular_piece(i, p, half, gpow) - _singular_piece(i, p, x2, gpow)
                )
        return BigReal(+(-total), digits)


def log_sine_value(j: int, k: int, theta: Angle, digits: int) -> BigReal:
    return log_sine(LogSineSpec(j, k, theta), digits)
