"""Harmonic sums, their exponential combinations, and inverse binomial sums.

The central object is

    sum_{j>=1} S_{a_1}(j-1) ... S_{a_p}(j-1) L_{b_1}(j) ... L_{b_q}(j)
               / ( C(2j, j) * j^c ),

optionally multiplied by sqrt(3).  S_a(j) = sum_{l<=j} l^-a are harmonic
sums; the L_b ("Lambda") factors are the polynomial combinations of
S-bar_k = S_k(2j-1) generated by exponentiating their series:

    1 + sum_b L_b eps^b = exp( sum_k S-bar_k eps^k / k ),

equivalently B_0 = 1, B_n = (1/n) sum_{k=1}^{n} S-bar_k B_{n-k}, L_n = n! B_n.

All per-term quantities are exact rationals maintained incrementally (two
rational additions per weight per step, binomial update
C(2j,j) = C(2j-2,j-1) * 2(2j-1)/j); each assembled numerator is converted to
floating point only for the final division and accumulation.  Terms decay
like 4^-j, and the truncation machinery proves it: with V = p + sum b_q,

    term_{j+1}/term_j <= (1/4) (1 + 1/j)^(V + 1/2),

because S_a(j)/S_a(j-1) <= 1+1/j, each Lambda_b grows by at most
(1+1/j)^b (a degree-b positive polynomial in the S-bar), and the central
binomial steps by 2(2j+1)/(j+1) >= 4/sqrt(1+1/j).  A geometric majorant from
any index where that ratio is provably below 1/3 gives the tail bound.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .errors import SumSpecParseError
from .precision import BigReal, mpf_from_fraction, working_dps

_ZETA_CAP = 1.65  # upper bound for zeta(a), a >= 2


def harmonic(a: int, j: int) -> Fraction:
    """Exact S_a(j) = sum_{l=1}^{j} l^-a."""
    if a < 1 or j < 1:
        raise ValueError("harmonic sums need a >= 1 and j >= 1")
    return sum(Fraction(1, l**a) for l in range(1, j + 1))


def sbar(a: int, j: int) -> Fraction:
    """S_a evaluated at the doubled argument 2j-1."""
    if a < 1 or j < 1:
        raise ValueError("sbar needs a >= 1 and j >= 1")
    return harmonic(a, 2 * j - 1)


def _lambda_from_sbar(values: dict[int, Fraction], b: int) -> Fraction:
    bb = [Fraction(1)]
    for n in range(1, b + 1):
        bb.append(sum(values[k] * bb[n - k] for k in range(1, n + 1)) / n)
    return Fraction(math.factorial(b)) * bb[b]


def lambda_(b: int, j: int) -> Fraction:
    """L_b(j) from the exponential recurrence, in exact rational arithmetic."""
    if b < 1 or j < 1:
        raise ValueError("lambda_ needs b >= 1 and j >= 1")
    values = {k: sbar(k, j) for k in range(1, b + 1)}
    return _lambda_from_sbar(values, b)


def central_binomial(j: int) -> int:
    """C(2j, j) exactly."""
    if j < 1:
        raise ValueError("central_binomial needs j >= 1")
    return math.comb(2 * j, j)


@dataclass(frozen=True)
class SumSpec:
    """One inverse binomial sum: S indices, Lambda indices, j-power, prefactor."""

    s_indices: tuple = ()
    lambda_indices: tuple = ()
    c: int = 1
    prefactor: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "s_indices", tuple(sorted(int(a) for a in self.s_indices)))
        object.__setattr__(
            self, "lambda_indices", tuple(sorted(int(b) for b in self.lambda_indices))
        )
        if any(a < 1 for a in self.s_indices) or any(b < 1 for b in self.lambda_indices):
            raise ValueError("S and Lambda indices must be positive")
        if self.c < 1:
            raise ValueError("denominator power c must be >= 1")
        if self.prefactor not in ("none", "sqrt3"):
            raise ValueError("prefactor must be 'none' or 'sqrt3'")

    @property
    def weight(self) -> int:
        return sum(self.s_indices) + sum(self.lambda_indices) + self.c + 1

    def to_spec_string(self) -> str:
        parts = []
        if self.prefactor == "sqrt3":
            parts.append("sqrt3")
        parts.extend(f"S{a}" for a in self.s_indices)
        parts.extend(f"L{b}" for b in self.lambda_indices)
        parts.append("/")
        parts.append(f"j^{self.c}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "SumSpec":
        """Parse the grammar ``[sqrt3] S<a>*... L<b>*... / j^<c>``."""
        tokens = text.split()
        if not tokens:
            raise SumSpecParseError(_GRAMMAR_HINT)
        prefactor = "none"
        if tokens[0] == "sqrt3":
            prefactor = "sqrt3"
            tokens = tokens[1:]
        try:
            slash = tokens.index("/")
        except ValueError:
            raise SumSpecParseError(_GRAMMAR_HINT) from None
        s_idx, l_idx = [], []
        for tok in tokens[:slash]:
            m = re.fullmatch(r"([SL])(\d+)", tok)
            if not m:
                raise SumSpecParseError(_GRAMMAR_HINT)
            (s_idx if m.group(1) == "S" else l_idx).append(int(m.group(2)))
        rest = tokens[slash + 1 :]
        if len(rest) != 1 or not re.fullmatch(r"j\^\d+", rest[0]):
            raise SumSpecParseError(_GRAMMAR_HINT)
        c = int(rest[0][2:])
        try:
            return cls(tuple(s_idx), tuple(l_idx), c, prefactor)
        except ValueError as exc:
            raise SumSpecParseError(str(exc)) from None


_GRAMMAR_HINT = (
    "sum spec grammar: [sqrt3] S<a>*... L<b>*... / j^<c>  "
    "(e.g. 'sqrt3 S4 / j^1', 'S1 S1 S1 / j^2', '/ j^2')"
)


@dataclass(frozen=True)
class TailBound:
    """Proven bound on the tail beyond truncation index J."""

    J: int
    bound: BigReal


class _SumState:
    """Incremental exact state: S_a(j-1), S-bar_a(2j-1), C(2j,j), Lambda_b(j)."""

    def __init__(self, spec: SumSpec):
        self.spec = spec
        self.s_weights = sorted(set(spec.s_indices))
        self.bmax = max(spec.lambda_indices, default=0)
        self.s_vals = {a: Fraction(0) for a in self.s_weights}   # S_a(j-1)
        self.sb_vals = {a: Fraction(0) for a in range(1, self.bmax + 1)}
        self.binom = 1
        self.j = 0

    def advance(self):
        self.j += 1
        j = self.j
        if j >= 2:
            for a in self.s_vals:
                self.s_vals[a] += Fraction(1, (j - 1) ** a)
        if self.bmax:
            if j == 1:
                for a in self.sb_vals:
                    self.sb_vals[a] = Fraction(1)
            else:
                for a in self.sb_vals:
                    self.sb_vals[a] += Fraction(1, (2 * j - 2) ** a) + Fraction(
                        1, (2 * j - 1) ** a
                    )
        self.binom = self.binom * 2 * (2 * j - 1) // j if j > 1 else 2

    def numerator(self) -> Fraction:
        om = Fraction(1)
        for a in self.spec.s_indices:
            om *= self.s_vals[a]
            if not om:
                return om
        if self.bmax:
            bb = [Fraction(1)]
            for n in range(1, self.bmax + 1):
                bb.append(sum(self.sb_vals[k] * bb[n - k] for k in range(1, n + 1)) / n)
            for b in self.spec.lambda_indices:
                om *= Fraction(math.factorial(b)) * bb[b]
        return om


def _log_omega_bound(spec: SumSpec, j: int) -> float:
    """ln of the majorant of the numerator product at index j."""
    total = 0.0
    for a in spec.s_indices:
        total += math.log(1 + math.log(max(j - 1, 1))) if a == 1 else math.log(_ZETA_CAP)
    if spec.lambda_indices:
        lbar = 1 + math.log(2 * j - 1)
        for b in spec.lambda_indices:
            total += b * math.log(lbar + b)
    return total


def _ratio_bound(spec: SumSpec, j: int) -> float:
    """Provable bound on term_{i+1}/term_i for every i >= j."""
    v = len(spec.s_indices) + sum(spec.lambda_indices)
    return 0.25 * (1 + 1 / j) ** (v + 0.5)


def truncation_bound(spec: SumSpec, J: int, digits: int = 30) -> TailBound:
    """Proven majorant of the tail sum_{j>J} |term_j| via a geometric argument."""
    ratio = _ratio_bound(spec, J)
    if ratio >= 1 / 3:
        raise ValueError(
            f"cannot certify the 1/3 term-ratio bound at J={J} for this spec; increase J"
        )
    dps = working_dps(digits)
    with mp.workdps(dps):
        log_t = (
            _log_omega_bound(spec, J + 1)
            - float(mp.log(central_binomial(J + 1)))
            - spec.c * math.log(J + 1)
        )
        bound = mp.e ** mp.mpf(log_t) / (1 - mp.mpf(ratio))
        if spec.prefactor == "sqrt3":
            bound *= mp.sqrt(3)
        # head-room for the float-domain log arithmetic above
        bound *= mp.mpf("1.000001")
        return TailBound(J, BigReal(+bound, digits))


def _log10_tail_estimate(spec: SumSpec, j: int, log10_binom: float) -> float:
    """log10 of the tail bound past j, with log10_binom = log10 C(2j, j)."""
    ratio = _ratio_bound(spec, j)
    if ratio >= 1 / 3:
        return math.inf
    log10_binom_next = log10_binom + math.log10(2 * (2 * j + 1) / (j + 1))
    log10_t = (
        _log_omega_bound(spec, j + 1) / math.log(10)
        - log10_binom_next
        - spec.c * math.log10(j + 1)
    )
    return log10_t - math.log10(1 - ratio)


def binomial_sum_detailed(spec: SumSpec, digits: int) -> tuple[BigReal, TailBound]:
    """The sum and the proven tail bound at the truncation index actually used."""
    dps = working_dps(digits)
    target = -(dps + 2)
    with mp.workdps(dps + 5):
        state = _SumState(spec)
        total = mp.mpf(0)
        while True:
            state.advance()
            j = state.j
            om = state.numerator()
            if om:
                total += mpf_from_fraction(om) / (mp.mpf(state.binom) * mp.mpf(j) ** spec.c)
            if j >= 32 and _log10_tail_estimate(spec, j, math.log10(state.binom)) < target:
                break
        if spec.prefactor == "sqrt3":
            total *= mp.sqrt(3)
        value = BigReal(+total, digits)
    tail = truncation_bound(spec, state.j, digits)
    return value, tail


def binomial_sum(spec: SumSpec, digits: int) -> BigReal:
    """Evaluate the inverse binomial sum to ``digits`` accurate digits."""
    return binomial_sum_detailed(spec, digits)[0]
