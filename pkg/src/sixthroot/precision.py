"""Working-precision plumbing: guarded digit budgets, BigReal, Angle, decimal I/O.

Every public operation in this package takes a ``digits`` argument (guaranteed
correct significant decimal digits of the result) and computes internally at
``digits + guard_digits(digits)`` decimal places.  The uniform guard makes the
accuracy contract testable: doubling ``digits`` must reproduce the shorter
result as a prefix.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

MIN_DIGITS = 10

# Angles that are exact multiples of pi/3 are kept symbolically so they can be
# re-materialised at any precision.  k = 6 (theta = 2*pi) is admitted solely as
# the upper endpoint of log-sine integration.
_MAX_SIXTH = 6


def guard_digits(digits: int) -> int:
    """Guard digits added to every internal computation: 10 + ceil(digits/10)."""
    return 10 + -(-digits // 10)


def working_dps(digits: int) -> int:
    if digits < MIN_DIGITS:
        raise ValueError(f"digits must be >= {MIN_DIGITS}, got {digits}")
    return digits + guard_digits(digits)


def workdps(dps: int):
    """Context manager pinning mpmath's decimal working precision."""
    return mp.workdps(dps)


@dataclass(frozen=True)
class BigReal:
    """Arbitrary-precision real plus the number of trusted significant digits.

    ``value`` is an mpf carrying at least ``digits`` correct significant
    decimal digits; producing operations guarantee |value - exact| < ulp at
    position ``digits``.
    """

    value: mp.mpf
    digits: int

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise ValueError(f"BigReal.digits must be >= {MIN_DIGITS}, got {self.digits}")

    def to_decimal(self, digits: int | None = None, rounding: str = "half-even") -> str:
        """Decimal string with ``digits`` significant digits.

        ``rounding`` is "half-even" (display) or "truncate" (cache files; keeps
        longer strings prefix-consistent with shorter ones).
        """
        sig = self.digits if digits is None else digits
        if sig > self.digits:
            raise _precision_error(sig, self.digits)
        return format_decimal(self.value, sig, rounding=rounding)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.to_decimal()


def _precision_error(requested, available):
    from .errors import PrecisionError

    return PrecisionError(
        f"requested {requested} digits from a value carrying only {available}",
        required_digits=requested,
    )


def format_decimal(x, sig: int, rounding: str = "half-even") -> str:
    """Render ``x`` with exactly ``sig`` significant digits.

    Round-half-even at the final digit; plain positional notation for
    magnitudes below 1e6 (and above 1e-6), scientific otherwise.
    """
    if sig < 1:
        raise ValueError("need at least one significant digit")
    if mp.isnan(x) or mp.isinf(x):
        raise ValueError(f"cannot format {x}")
    with mp.workdps(max(sig + 15, 25)):
        raw = mp.nstr(mp.mpf(x), sig + 10, strip_zeros=False)
    d = decimal.Decimal(raw)
    if d == 0:
        return "0." + "0" * (sig - 1) if sig > 1 else "0"
    mode = decimal.ROUND_HALF_EVEN if rounding == "half-even" else decimal.ROUND_DOWN
    with decimal.localcontext() as ctx:
        ctx.prec = sig + 20
        quantum = decimal.Decimal(1).scaleb(d.adjusted() - sig + 1)
        q = d.quantize(quantum, rounding=mode)
        # rounding may carry into a new leading digit (0.999 -> 1.00)
        if q.adjusted() != d.adjusted():
            quantum = decimal.Decimal(1).scaleb(q.adjusted() - sig + 1)
            q = q.quantize(quantum, rounding=mode)
    if -6 < q.adjusted() < 6:
        text = format(q, "f")
        # guarantee the digit count survives formatting ("3" -> "3.0000...")
        ndigits = sum(c.isdigit() for c in text)
        if ndigits < sig:
            if "." not in text:
                text += "."
            text += "0" * (sig - ndigits)
        return text
    return format(q, "E").replace("E", "e")


def mpf_from_fraction(q: Fraction):
    """Correctly rounded mpf of an exact rational at the current precision."""
    return mp.mpf(q.numerator) / mp.mpf(q.denominator)


@dataclass(frozen=True)
class Angle:
    """An angle in [0, 2*pi]: either an exact multiple k*pi/3 or a raw value.

    The sixth-multiple form is precision-free (pi is re-evaluated on demand);
    a raw angle carries the finite precision it was constructed with.
    """

    k: int | None = None
    raw: BigReal | None = None

    def __post_init__(self):
        if (self.k is None) == (self.raw is None):
            raise ValueError("Angle needs exactly one of k (sixth multiple) or raw")
        if self.k is not None and not 0 <= self.k <= _MAX_SIXTH:
            raise ValueError(f"sixth-multiple k must be in 0..{_MAX_SIXTH}, got {self.k}")
        if self.raw is not None:
            v = self.raw.value
            with mp.workdps(self.raw.digits):
                if not (0 <= v <= 2 * mp.pi):
                    raise ValueError("raw angle must lie in [0, 2*pi]")

    @classmethod
    def sixth(cls, k: int) -> "Angle":
        return cls(k=k)

    @classmethod
    def from_radians(cls, theta, digits: int) -> "Angle":
        with mp.workdps(working_dps(digits)):
            val = mp.mpf(theta)
        return cls(raw=BigReal(val, digits))

    @property
    def is_sixth(self) -> bool:
        return self.k is not None

    def radians(self):
        """The angle as an mpf at the caller's current working precision.

        Raw angles are returned as stored; callers needing more digits than
        the raw form carries must construct a sharper Angle.
        """
        if self.k is not None:
            # keep k = 3, 6 exactly pi and 2*pi at working precision
            if self.k % 3 == 0:
                return (self.k // 3) * mp.pi
            return self.k * mp.pi / 3
        return self.raw.value

    def require_digits(self, digits: int):
        if self.raw is not None and self.raw.digits < digits:
            raise _precision_error(digits, self.raw.digits)

    def __str__(self) -> str:
        if self.k is not None:
            names = {0: "0", 1: "pi/3", 2: "2pi/3", 3: "pi", 4: "4pi/3", 5: "5pi/3", 6: "2pi"}
            return names[self.k]
        return f"~{mp.nstr(self.raw.value, 12)}"


PI_THIRD = Angle.sixth(1)
TWO_PI_THIRD = Angle.sixth(2)
PI_ANGLE = Angle.sixth(3)
FULL_TURN = Angle.sixth(6)
