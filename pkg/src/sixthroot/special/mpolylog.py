"""Multiple polylogarithms: nested sums with per-index sign twists.

The object is

    sum_{m_1 > m_2 > ... > m_n > 0} z^{m_1} sigma_1^{m_1} ... sigma_n^{m_n}
                                     / (m_1^{s_1} ... m_n^{s_n}),

with sigma_k = +-1.  Evaluation strategy by argument:

* |z| < 1: dynamic-programming recursion over the outer index with a
  geometric tail bound (ratio |z| up to slowly varying harmonic factors).
* z = +-1 or a sixth-root-of-unity Angle: every per-level weight is a root of
  unity of order q <= 6.  The outer sum is split at a large N; the tail

      T_k(e, u) = sum_{l>N} zeta6^{u l} l^{-e} P_k(l)

  (P_k = inner partial sums, available exactly from the same DP) satisfies

      T_k(e, u) = P_k(N+1) Z_u(e; N)
                  + sum_{m>N} zeta6^{u_k m} m^{-s_k} P_{k+1}(m) Z_u(e; m),

  where Z_u(e; m) = sum_{l>m} zeta6^{ul} l^{-e} splits over residue classes
  mod q into Hurwitz tails whose Euler-Maclaurin expansions are explicit
  power series in 1/m.  Substituting those expansions closes the recursion in
  the family T_k(e, u) with exponents bounded by a cutoff, so the whole tail
  reduces to a small memoised table.  Every truncation (Euler-Maclaurin
  remainder, series rebasing, exponent cutoff) carries an explicit majorant
  and the error estimates propagate through the recursion alongside the
  values; the total is checked against the guard digits before returning.
* any other |z| = 1 point at depth >= 2 is refused (depth 1 delegates to the
  circle expansion); the sums this package cares about live at +-1 and the
  sixth-root points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from ..errors import PrecisionError
from ..precision import Angle, BigReal, working_dps
from .circle import li_unit_circle
from .zeta import _log10_em_remainder, hurwitz_tail


@dataclass(frozen=True)
class MultiPolylogSpec:
    """Depth-n nested sum description: weights s_vec, signs sigma_vec, argument."""

    s_vec: tuple
    sigma_vec: tuple
    argument: object  # number with |z| <= 1, or Angle for exp(i*theta)

    def __post_init__(self):
        object.__setattr__(self, "s_vec", tuple(int(s) for s in self.s_vec))
        object.__setattr__(self, "sigma_vec", tuple(int(s) for s in self.sigma_vec))
        if len(self.s_vec) != len(self.sigma_vec) or not self.s_vec:
            raise ValueError("s_vec and sigma_vec must have equal length >= 1")
        if any(s < 1 for s in self.s_vec):
            raise ValueError("weights s_k must be positive integers")
        if any(s not in (1, -1) for s in self.sigma_vec):
            raise ValueError("sign twists must be +1 or -1")

    @property
    def depth(self) -> int:
        return len(self.s_vec)


def _log10_add(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf or a - b > 30:
        return a
    return a + math.log10(1 + 10 ** (b - a))


def _log10_abs(x) -> float:
    ax = abs(x)
    if ax == 0:
        return -math.inf
    return float(mp.log10(ax))


class _UnitTailEngine:
    """Tail machinery for root-of-unity weights (exponents mod 6 of e^{i pi/3}).

    All error bookkeeping is in log10 floats; ``_t`` returns (value, err)
    pairs so that truncation errors of memoised entries propagate with the
    coefficients they are later multiplied by.
    """

    def __init__(self, s_vec, u_vec, dps):
        self.s = s_vec
        self.u = u_vec
        self.n = len(s_vec)
        self.dps = dps
        # coefficient-weighted error propagation loses O(log10(e_cut*q)) per
        # level, so the per-piece target tightens with depth
        self.eps_log10 = -(dps + 4 + 4 * self.n)
        self._choose_parameters()
        half_sqrt3 = mp.sqrt(3) / 2
        self.zeta6 = [
            mp.mpc(1, 0),
            mp.mpc(mp.mpf(1) / 2, half_sqrt3),
            mp.mpc(-mp.mpf(1) / 2, half_sqrt3),
            mp.mpc(-1, 0),
            mp.mpc(-mp.mpf(1) / 2, -half_sqrt3),
            mp.mpc(mp.mpf(1) / 2, -half_sqrt3),
        ]
        self._zexp_cache: dict = {}
        self._zpt_cache: dict = {}
        self._t_cache: dict = {}

    def _choose_parameters(self):
        ones = sum(1 for s in self.s if s == 1)
        self.ones = ones
        self.log10_pbound = sum(math.log10(1.65) for s in self.s if s >= 2)
        n_min = max(1200, int(math.exp(2 * ones + 1)) + 1)
        n = 1 << max(11, (n_min - 1).bit_length())
        while True:
            e_cut = self._solve_exponent_cutoff(n)
            if e_cut is not None and n >= 14 * e_cut and self._em_feasible(e_cut, n):
                break
            n *= 2
        self.N = n
        self.e_cut = e_cut

    def _solve_exponent_cutoff(self, n: int) -> int | None:
        """Smallest cutoff E whose worst dropped piece stays below target.

        The dominant truncation piece behaves like
        4 E! (6/(2pi))^E * coarse-tail(E+1); the q <= 6 residue split is what
        erodes the (2pi)^-E gain of the Euler-Maclaurin coefficients.
        """
        target = self.eps_log10 - 10
        ln10 = math.log(10)
        for e in range(6, max(12, int(math.pi * n / 13))):
            piece = (
                math.log10(4.0)
                + math.lgamma(e + 1) / ln10
                - e * math.log10(2 * math.pi / 6)
                + self._coarse_with(e + 1, n)
            )
            if piece <= target:
                return e
        return None

    def _coarse_with(self, e, n: int) -> float:
        lead = self.ones * math.log10(1 + math.log(n)) - 0.5 * math.log10(n)
        return lead + (1.5 - e) * math.log10(n) - math.log10(max(e - 1.5, 0.5))

    def _em_feasible(self, e_max: int, n: int) -> bool:
        a = (n + 2) / 6
        return any(
            _log10_em_remainder(e_max, a, k) <= self.eps_log10 - 10
            for k in range(1, int(math.pi * a))
        )

    def _coarse_tail_log10(self, e) -> float:
        """log10 bound of sum_{m>N} (1+ln m)^ones m^-e (needs e >= 2)."""
        e = min(e, self.e_cut + 60)  # flooring only enlarges the bound
        return self._coarse_with(e, self.N)

    # -- Hurwitz tails -------------------------------------------------------
    def _z_point(self, e: int, u: int):
        """(Z_u(e; N), err): the exact tail sum_{m>N} zeta6^{um} m^{-e}."""
        key = (e, u)
        hit = self._zpt_cache.get(key)
        if hit is not None:
            return hit
        if u == 0:
            val = mp.mpc(hurwitz_tail(e, Fraction(self.N + 1)), 0)
        else:
            q = 6 // math.gcd(u, 6)
            val = mp.mpc(0, 0)
            for r in range(1, q + 1):
                w = self.zeta6[(u * (self.N + r)) % 6]
                val += w * hurwitz_tail(e, Fraction(self.N + r, q))
            val *= mp.mpf(6 // math.gcd(u, 6)) ** (-e)
        # hurwitz_tail is good to ~dps+5 relative digits of its N^(1-e) scale
        err = (1 - e) * math.log10(self.N) - (self.dps + 4)
        result = (val, err)
        self._zpt_cache[key] = result
        return result

    def _z_expansion(self, e: int, u: int):
        """Z_u(e; m) = zeta6^{um} * sum_t c_t m^{-x_t} + R(m) for m > N.

        Returns (terms, rem_pieces): terms = [(x_t, c_t)], and rem_pieces is a
        list of (log10_C, x) certifying |R(m)| <= sum 10^log10_C * m^-x.
        """
        key = (e, u)
        hit = self._zexp_cache.get(key)
        if hit is not None:
            return hit
        q = 1 if u == 0 else 6 // math.gcd(u, 6)
        a_min = (self.N + 1) / q
        k_terms = None
        for k in range(1, int(math.pi * a_min)):
            if e - 1 + 2 * (k + 1) > self.e_cut + 2:
                k_terms = k
                break
            if _log10_em_remainder(e, a_min, k) <= self.eps_log10 - 10:
                k_terms = k
                break
        if k_terms is None:  # pragma: no cover
            raise PrecisionError("tail expansion parameters exhausted; raise digits")
        rem_pieces = []
        # Euler-Maclaurin remainder: |R_em(a)| <= bound(a_min) (a_min/a)^(e+2k+1),
        # rescaled from a = (m+r)/q >= m/q to powers of m
        rem_exp = e + 2 * k_terms + 1
        em_log10 = (
            _log10_em_remainder(e, a_min, k_terms)
            + rem_exp * math.log10(a_min)
            + (rem_exp - e + 1) * math.log10(q)
        )
        rem_pieces.append((em_log10, rem_exp))

        # zeta(e, a) = sum over (coeff, x): coeff * a^-x, truncated at k_terms
        base = [(mp.mpf(1) / (e - 1), e - 1), (mp.mpf(1) / 2, e)]
        poch = mp.mpf(e)
        for k in range(1, k_terms + 1):
            if k > 1:
                poch *= (e + 2 * k - 3) * (e + 2 * k - 2)
            x = e + 2 * k - 1
            if x <= self.e_cut + 1:
                base.append((mp.bernoulli(2 * k) / mp.factorial(2 * k) * poch, x))

        terms: dict[int, mp.mpc] = {}
        qm = mp.mpf(q)
        for coeff, x in base:
            for r in range(1, q + 1):
                wr = self.zeta6[(u * r) % 6] if u else mp.mpc(1, 0)
                pref = coeff * qm ** (x - e) * wr
                binom = mp.mpf(1)
                j_stop = self.e_cut + 2 - x
                for j in range(0, max(j_stop, 0)):
                    c = pref * binom * mp.mpf(r) ** j
                    terms[x + j] = terms.get(x + j, mp.mpc(0, 0)) + c
                    binom *= mp.mpf(-(x + j)) / (j + 1)
                if j_stop >= 0:
                    # dropped rebase tail of (m+r)^-x: successive terms shrink by
                    # (x+j) r / (m (j+1)) <= 1/2 for m > N >= 14 e_cut, so the
                    # tail is twice its first term |binom(-x, j_stop)| r^j_stop
                    log_c = (
                        _log10_abs(pref)
                        + _log10_binom(x, j_stop)
                        + j_stop * math.log10(max(r, 1))
                        + math.log10(2.0)
                    )
                    rem_pieces.append((log_c, x + j_stop))
        result = (sorted(terms.items()), rem_pieces)
        self._zexp_cache[key] = result
        return result

    # -- the tail recursion ----------------------------------------------------
    def tail(self, partials):
        """(T_2(s_1, u_1), err) given partials[k] = P_k(N+1), k = 2..n+1."""
        self.partials = partials
        return self._t(2, self.s[0], self.u[0])

    def _t(self, k: int, e: int, u: int):
        key = (k, e, u)
        hit = self._t_cache.get(key)
        if hit is not None:
            return hit
        if e > self.e_cut:
            result = (mp.mpc(0, 0), self.log10_pbound + self._coarse_tail_log10(e))
            self._t_cache[key] = result
            return result
        if k == self.n + 1:
            result = self._z_point(e, u)
            self._t_cache[key] = result
            return result
        zpt, zpt_err = self._z_point(e, u)
        val = self.partials[k] * zpt
        err = _log10_abs(self.partials[k]) + zpt_err
        terms, rem_pieces = self._z_expansion(e, u)
        s_k = self.s[k - 1]
        u_k = self.u[k - 1]
        for x, c in terms:
            e_next = s_k + x
            log_c = _log10_abs(c)
            if e_next > self.e_cut:
                err = _log10_add(
                    err, log_c + self.log10_pbound + self._coarse_tail_log10(e_next)
                )
                continue
            child, child_err = self._t(k + 1, e_next, (u + u_k) % 6)
            val += c * child
            err = _log10_add(err, log_c + child_err)
        for log_c, x in rem_pieces:
            err = _log10_add(
                err, log_c + self.log10_pbound + self._coarse_tail_log10(s_k + x)
            )
        result = (val, err)
        self._t_cache[key] = result
        return result


def _log10_binom(x: int, j: int) -> float:
    """log10 |binomial(-x, j)| = log10 C(x+j-1, j)."""
    if j <= 0:
        return 0.0
    return (math.lgamma(x + j) - math.lgamma(x) - math.lgamma(j + 1)) / math.log(10)


def _unit_value(s_vec, u_vec, dps, digits):
    """Full nested sum when every weight is zeta6^{u_k}."""
    engine = _UnitTailEngine(s_vec, u_vec, dps)
    n = engine.n
    zeta6 = engine.zeta6

    p = [None] * (n + 2)
    for k in range(2, n + 2):
        p[k] = mp.mpc(1, 0) if k == n + 1 else mp.mpc(0, 0)
    total = mp.mpc(0, 0)
    u1, s1 = u_vec[0], s_vec[0]
    for m in range(1, engine.N + 1):
        total += zeta6[(u1 * m) % 6] * mp.mpf(m) ** (-s1) * p[2]
        for k in range(2, n + 1):
            p[k] = p[k] + zeta6[(u_vec[k - 1] * m) % 6] * mp.mpf(m) ** (-s_vec[k - 1]) * p[k + 1]
    tail, err = engine.tail(p)
    if err > -(digits + 3):
        raise PrecisionError(  # pragma: no cover
            f"tail error budget 1e{err:.0f} breaks the {digits}-digit contract"
        )
    return total + tail


def _interior_value(s_vec, sigma_vec, z, dps):
    """Direct summation for |z| < 1 with a geometric tail bound."""
    n = len(s_vec)
    absz = abs(z)
    eps = mp.mpf(10) ** (-(dps + 4))
    p = [None] * (n + 2)
    for k in range(2, n + 2):
        p[k] = mp.mpc(1, 0) if k == n + 1 else mp.mpc(0, 0)
    w1 = z * sigma_vec[0]
    wpow = mp.mpc(1, 0)
    total = mp.mpc(0, 0)
    m = 0
    while True:
        m += 1
        wpow *= w1
        total += wpow * mp.mpf(m) ** (-s_vec[0]) * p[2]
        for k in range(2, n + 1):
            sign = -1 if (sigma_vec[k - 1] == -1 and m % 2) else 1
            p[k] = p[k] + sign * mp.mpf(m) ** (-s_vec[k - 1]) * p[k + 1]
        if m > 8 and m % 4 == 0:
            # majorant ratio |z| (1+ln(m+1))^n/(1+ln m)^n <= |z|(1+2/m) < 1 eventually
            ratio = absz * (1 + mp.mpf(2) / m)
            if ratio < (1 + absz) / 2:
                bound = (
                    absz ** (m + 1)
                    * (1 + mp.log(m + 1)) ** n
                    * mp.mpf(m + 1) ** (-s_vec[0])
                    / (1 - ratio)
                )
                if bound < eps:
                    return total
        if m > 10_000_000:  # pragma: no cover
            raise PrecisionError("interior series did not meet its bound")


def multiple_polylog(spec: MultiPolylogSpec, digits: int) -> tuple[BigReal, BigReal]:
    """(Re, Im) of the nested twisted sum, each accurate to ``digits``."""
    dps = working_dps(digits) + 10
    s_vec, sigma_vec = spec.s_vec, spec.sigma_vec
    arg = spec.argument

    with mp.workdps(dps):
        if isinstance(arg, Angle):
            arg.require_digits(digits)
            if s_vec[0] < 2:
                raise ValueError("unit-circle argument needs leading weight s_1 >= 2")
            if arg.is_sixth:
                uz = arg.k % 6
                u_vec = [(uz + (3 if sigma_vec[0] == -1 else 0)) % 6]
                u_vec += [3 if s == -1 else 0 for s in sigma_vec[1:]]
                val = _unit_value(s_vec, u_vec, dps, digits)
                if all(u in (0, 3) for u in u_vec):
                    return BigReal(+val.real, digits), BigReal(mp.mpf(0), digits)
                return BigReal(+val.real, digits), BigReal(+val.imag, digits)
            if spec.depth > 1:
                raise ValueError(
                    "depth >= 2 on the unit circle needs a sixth-root Angle or z = +-1"
                )
            theta = arg.radians()
            if sigma_vec[0] == -1:
                theta = mp.fmod(theta + mp.pi, 2 * mp.pi)
            val = li_unit_circle(s_vec[0], theta, dps)
            return BigReal(+val.real, digits), BigReal(+val.imag, digits)

        z = mp.mpc(arg)
        absz = abs(z)
        if absz > 1 + mp.mpf(10) ** (-digits):
            raise ValueError("argument must satisfy |z| <= 1")
        if z == 1 or z == -1:
            if s_vec[0] < 2:
                raise ValueError("unit-circle argument needs leading weight s_1 >= 2")
            u_vec = [0 if (z == 1) == (sigma_vec[0] == 1) else 3]
            u_vec += [3 if s == -1 else 0 for s in sigma_vec[1:]]
            val = _unit_value(s_vec, u_vec, dps, digits)
            return BigReal(+val.real, digits), BigReal(mp.mpf(0), digits)
        if absz > mp.mpf("0.999"):
            raise ValueError(
                "arguments this close to the unit circle are not supported; "
                "use an exact Angle or +-1 for circle points"
            )
        val = _interior_value(s_vec, sigma_vec, z, dps)
        return BigReal(+val.real, digits), BigReal(+val.imag, digits)
