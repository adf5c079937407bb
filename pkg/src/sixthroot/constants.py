"""Registry of the transcendental constants of weights 1-5.

Two families generate everything the weight-5 reduction identities need: the
"omega" set (partnered with sqrt(3)-prefactored sums) and the "sigma" set
(plain sums), built from pi, ln 2, ln 3, zeta values, log-sine integrals at
pi/3 and 2pi/3, the log-sine combinations C_3..C_5 and D_1, and the sum
constant chi_5.  Every constant carries exactly one canonical recipe; the
omega_r_k / sigma_r_k names resolve through an alias table when a descriptive
canonical name exists (sigma_4_5 -> chi_5 and so on).

Values are memoised in-process per working precision and can additionally be
persisted in a line-oriented cache file (name, digits, recipe-hash, value).
Cache strings are digit-truncated, never rounded, so entries written at
higher precision stay prefix-consistent with lower tiers; a changed recipe
changes the hash and silently invalidates stale lines.
"""

from __future__ import annotations

import difflib
import hashlib
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from .errors import UnknownConstantError
from .precision import MIN_DIGITS, Angle, BigReal, format_decimal, mpf_from_fraction, working_dps
from .special.logsine import log_sine_value
from .special.zeta import zeta_mpf
from .sums import SumSpec, binomial_sum


@dataclass(frozen=True)
class Primitive:
    """Directly evaluable constant: pi, ln(n), zeta(s), a log-sine value, a sum."""

    kind: str
    params: tuple = ()

    def describe(self) -> str:
        if self.kind == "pi":
            return "pi"
        if self.kind == "ln":
            return f"ln({self.params[0]})"
        if self.kind == "zeta":
            return f"zeta({self.params[0]})"
        if self.kind == "logsine":
            j, k, sixth = self.params
            angle = {1: "pi/3", 2: "2pi/3"}[sixth]
            return f"Ls({j},{k};{angle})"
        if self.kind == "binsum":
            s_idx, l_idx, c, pref = self.params
            return f"binsum({SumSpec(s_idx, l_idx, c, pref).to_spec_string()})"
        raise ValueError(f"unknown primitive kind {self.kind!r}")


@dataclass(frozen=True)
class Combination:
    """Rational linear combination of products of registered constants."""

    terms: tuple  # ((Fraction, ((name, power), ...)), ...)

    def describe(self) -> str:
        parts = []
        for coeff, factors in self.terms:
            prod = "*".join(
                name if power == 1 else f"{name}^{power}" for name, power in factors
            )
            parts.append(f"({coeff})*{prod}" if prod else f"({coeff})")
        return " + ".join(parts)


@dataclass(frozen=True)
class BasisConstant:
    name: str
    weight: int
    recipe: object  # Primitive | Combination

    @property
    def recipe_hash(self) -> str:
        return hashlib.sha256(self.recipe.describe().encode()).hexdigest()[:16]


def _comb(*terms) -> Combination:
    packed = []
    for coeff, *factors in terms:
        fac = tuple(f if isinstance(f, tuple) else (f, 1) for f in factors)
        packed.append((Fraction(coeff), fac))
    return Combination(tuple(packed))


_REGISTRY: dict[str, BasisConstant] = {}
_ALIASES: dict[str, str] = {}


def _register(name: str, weight: int, recipe, aliases=()):
    _REGISTRY[name] = BasisConstant(name, weight, recipe)
    for alias in aliases:
        _ALIASES[alias] = name


def _build_registry():
    _register("pi", 1, Primitive("pi"), aliases=["omega_1_1"])
    _register("ln2", 1, Primitive("ln", (2,)))
    _register("ln3", 1, Primitive("ln", (3,)))
    for s in (2, 3, 4, 5):
        _register(f"zeta_{s}", s, Primitive("zeta", (s,)))
    _ALIASES["sigma_1_2"] = "zeta_2"
    _ALIASES["sigma_1_3"] = "zeta_3"
    _ALIASES["sigma_3_4"] = "zeta_4"
    _ALIASES["sigma_5_5"] = "zeta_5"

    _register("Ls_2(pi/3)", 2, Primitive("logsine", (2, 0, 1)), aliases=["omega_1_2"])
    _register("Ls_3(2pi/3)", 3, Primitive("logsine", (3, 0, 2)))
    _register("Ls_4(pi/3)", 4, Primitive("logsine", (4, 0, 1)), aliases=["omega_2_4"])
    _register("Ls_4(2pi/3)", 4, Primitive("logsine", (4, 0, 2)))
    _register("Ls_5(pi/3)", 5, Primitive("logsine", (5, 0, 1)), aliases=["omega_3_5"])
    _register("Ls_5(2pi/3)", 5, Primitive("logsine", (5, 0, 2)))
    _register("Ls_5^(2)(2pi/3)", 5, Primitive("logsine", (5, 2, 2)))
    _register("Ls_4^(1)(2pi/3)", 4, Primitive("logsine", (4, 1, 2)))

    _register(
        "chi_5", 5, Primitive("binsum", ((1, 1, 1), (), 2, "none")), aliases=["sigma_4_5"]
    )
    _register("zeta_2_zeta_3", 5, _comb((1, "zeta_2", "zeta_3")), aliases=["sigma_6_5"])

    _register(
        "C_3",
        3,
        _comb((3, "Ls_3(2pi/3)"), (-2, "Ls_2(pi/3)", "ln3")),
        aliases=["omega_1_3"],
    )
    _register(
        "C_4",
        4,
        _comb(
            (2, "Ls_4(2pi/3)"),
            (-3, "Ls_3(2pi/3)", "ln3"),
            (1, "Ls_2(pi/3)", ("ln3", 2)),
        ),
        aliases=["omega_1_4"],
    )
    _register(
        "C_5",
        5,
        _comb(
            (1, "Ls_5(2pi/3)"),
            (-2, "Ls_4(2pi/3)", "ln3"),
            (Fraction(3, 2), "Ls_3(2pi/3)", ("ln3", 2)),
            (Fraction(-1, 3), "Ls_2(pi/3)", ("ln3", 3)),
        ),
        aliases=["omega_1_5"],
    )
    _register(
        "D_1",
        5,
        _comb(
            (3, "Ls_5^(2)(2pi/3)"),
            (-4, "pi", "Ls_4^(1)(2pi/3)"),
            (Fraction(32, 27), "Ls_4(pi/3)", "ln3"),
            (8, "zeta_2", "Ls_3(2pi/3)"),
        ),
        aliases=["omega_2_5"],
    )

    _register("omega_2_2", 2, _comb((1, "pi", "ln3")))
    _register("omega_2_3", 3, _comb((1, "pi", ("ln3", 2))))
    _register("omega_3_3", 3, _comb((1, "pi", "zeta_2")))
    _register("omega_3_4", 4, _comb((1, "pi", "zeta_3")))
    _register("omega_4_4", 4, _comb((1, "pi", ("ln3", 3))))
    _register("omega_5_4", 4, _comb((1, "zeta_2", "Ls_2(pi/3)")))
    _register("omega_6_4", 4, _comb((1, "zeta_2", "pi", "ln3")))
    _register("omega_4_5", 5, _comb((1, "pi", "zeta_4")))
    _register("omega_5_5", 5, _comb((1, "pi", "zeta_3", "ln3")))
    _register("omega_6_5", 5, _comb((1, "pi", "zeta_2", ("ln3", 2))))
    _register("omega_7_5", 5, _comb((1, "pi", ("ln3", 4))))
    _register("omega_8_5", 5, _comb((1, "pi", ("Ls_2(pi/3)", 2))))
    _register("omega_9_5", 5, _comb((1, "zeta_3", "Ls_2(pi/3)")))
    _register("omega_10_5", 5, _comb((1, "zeta_2", "C_3")))

    _register("sigma_2_3", 3, _comb((1, "pi", "Ls_2(pi/3)")))
    _register("sigma_1_4", 4, _comb((1, "pi", "Ls_3(2pi/3)")))
    _register("sigma_2_4", 4, _comb((1, ("Ls_2(pi/3)", 2))))
    _register("sigma_1_5", 5, _comb((1, "pi", "Ls_4(pi/3)")))
    _register("sigma_2_5", 5, _comb((1, "pi", "Ls_4(2pi/3)")))
    _register("sigma_3_5", 5, _comb((1, "pi", "zeta_2", "Ls_2(pi/3)")))


_build_registry()

_OMEGA_SETS = {
    1: ["omega_1_1"],
    2: ["omega_1_2", "omega_2_2"],
    3: ["omega_1_3", "omega_2_3", "omega_3_3"],
    4: ["omega_1_4", "omega_2_4", "omega_3_4", "omega_4_4", "omega_5_4", "omega_6_4"],
    5: [f"omega_{r}_5" for r in range(1, 11)],
}
_SIGMA_SETS = {
    1: [],
    2: ["sigma_1_2"],
    3: ["sigma_1_3", "sigma_2_3"],
    4: ["sigma_1_4", "sigma_2_4", "sigma_3_4"],
    5: [f"sigma_{r}_5" for r in range(1, 7)],
}


def resolve(name: str) -> BasisConstant:
    canonical = _ALIASES.get(name, name)
    entry = _REGISTRY.get(canonical)
    if entry is None:
        pool = list(_REGISTRY) + list(_ALIASES)
        raise UnknownConstantError(name, difflib.get_close_matches(name, pool, n=3))
    return entry


def registered_names(include_aliases: bool = False) -> list[str]:
    names = sorted(_REGISTRY)
    if include_aliases:
        names += sorted(_ALIASES)
    return names


@dataclass(frozen=True)
class BasisSets:
    weight: int
    omega: tuple
    sigma: tuple


def list_basis(weight: int) -> BasisSets:
    """The omega- and sigma-set members of the requested weight."""
    if not 1 <= weight <= 5:
        raise ValueError("basis sets are defined for weights 1..5")
    return BasisSets(
        weight,
        tuple(resolve(n) for n in _OMEGA_SETS[weight]),
        tuple(resolve(n) for n in _SIGMA_SETS[weight]),
    )


class ConstantCache:
    """Line-oriented persistent cache: name, digits, recipe-hash, value."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._mem: dict[tuple[str, int], tuple[str, str]] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            self._load()

    def _load(self):
        for line in self.path.read_text(encoding="utf-8").splitlines():
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                continue
            name, digits, rhash, value = parts
            self._mem[(name, int(digits))] = (rhash, value)

    def lookup(self, name: str, digits: int, rhash: str) -> str | None:
        with self._lock:
            hit = self._mem.get((name, digits))
        if hit and hit[0] == rhash:
            return hit[1]
        return None

    def store(self, name: str, digits: int, rhash: str, value: str):
        with self._lock:
            if self._mem.get((name, digits)) == (rhash, value):
                return
            self._mem[(name, digits)] = (rhash, value)
            if self.path:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(f"{name}\t{digits}\t{rhash}\t{value}\n")

    def rewrite(self):
        """Rewrite the backing file deduplicated and deterministically sorted."""
        if not self.path:
            return
        with self._lock:
            lines = [
                f"{name}\t{digits}\t{rhash}\t{value}\n"
                for (name, digits), (rhash, value) in sorted(self._mem.items())
            ]
            self.path.write_text("".join(lines), encoding="utf-8")


_default_cache = ConstantCache()
_eval_lock = threading.Lock()
_eval_memo: dict[tuple[str, int], mp.mpf] = {}


def set_cache(cache: ConstantCache | None):
    global _default_cache
    _default_cache = cache if cache is not None else ConstantCache()


def get_cache() -> ConstantCache:
    return _default_cache


def _eval_canonical(name: str, dps: int):
    """Canonical constant as an mpf carrying ~dps accurate digits."""
    key = (name, dps)
    with _eval_lock:
        hit = _eval_memo.get(key)
    if hit is not None:
        return hit
    entry = _REGISTRY[name]
    recipe = entry.recipe
    if isinstance(recipe, Primitive):
        if recipe.kind == "pi":
            with mp.workdps(dps):
                val = +mp.pi
        elif recipe.kind == "ln":
            with mp.workdps(dps):
                val = mp.log(recipe.params[0])
        elif recipe.kind == "zeta":
            val = zeta_mpf(recipe.params[0], dps)
        elif recipe.kind == "logsine":
            j, k, sixth = recipe.params
            val = log_sine_value(j, k, Angle.sixth(sixth), dps).value
        elif recipe.kind == "binsum":
            s_idx, l_idx, c, pref = recipe.params
            val = binomial_sum(SumSpec(s_idx, l_idx, c, pref), dps).value
        else:  # pragma: no cover
            raise ValueError(f"unknown primitive {recipe.kind!r}")
    else:
        with mp.workdps(dps + 5):
            val = mp.mpf(0)
            for coeff, factors in recipe.terms:
                term = mpf_from_fraction(coeff)
                for fname, power in factors:
                    term *= _eval_canonical(_ALIASES.get(fname, fname), dps + 5) ** power
                val += term
            val = +val
    with _eval_lock:
        _eval_memo[key] = val
    return val


def constant(name: str, digits: int) -> BigReal:
    """Evaluate a registered constant to ``digits`` digits, cache-aware."""
    if digits < MIN_DIGITS:
        raise ValueError(f"digits must be >= {MIN_DIGITS}, got {digits}")
    entry = resolve(name)
    rhash = entry.recipe_hash
    cached = _default_cache.lookup(entry.name, digits, rhash)
    dps = working_dps(digits)
    if cached is not None:
        with mp.workdps(dps):
            return BigReal(mp.mpf(cached), digits)
    value = _eval_canonical(entry.name, dps)
    result = BigReal(value, digits)
    _default_cache.store(entry.name, digits, rhash, result.to_decimal(rounding="truncate"))
    return result


def constant_mpf(name: str, dps: int):
    """Full-working-precision value for internal consumers (no file cache)."""
    entry = resolve(name)
    return _eval_canonical(entry.name, dps)


def c_generating_check(order: int, digits: int) -> list[BigReal]:
    """Residuals of the log-sine generating identity for C_1..C_order.

    The exponential generating function of Ls_{i+1}(2pi/3), damped by 3^-eps
    and scaled by 3/2, reproduces the C-constants order by order (the i = 0
    term is excluded; with it the zeroth coefficient would be -pi rather than
    the 0 the C-family starts from).  Returns |C_{j+1} - coefficient_j| for
    j = 0..order-1, using C_1 = 0 and C_2 = 2 Ls_2(pi/3).
    """
    if not 1 <= order <= 5:
        raise ValueError("the generating check supports orders 1..5 only")
    dps = working_dps(digits)
    with mp.workdps(dps + 5):
        ls = {i: log_sine_value(i + 1, 0, Angle.sixth(2), dps).value for i in range(1, order)}
        ln3 = mp.log(3)
        c_reg = {
            1: mp.mpf(0),
            2: 2 * constant_mpf("Ls_2(pi/3)", dps),
            3: constant_mpf("C_3", dps),
            4: constant_mpf("C_4", dps),
            5: constant_mpf("C_5", dps),
        }
        residuals = []
        for j in range(order):
            coeff = mp.mpf(0)
            for i in range(1, j + 1):
                coeff += (
                    mp.mpf(2) ** i
                    / mp.factorial(i)
                    * ls[i]
                    * (-ln3) ** (j - i)
                    / mp.factorial(j - i)
                )
            coeff *= mp.mpf(3) / 2
            residuals.append(BigReal(abs(c_reg[j + 1] - coeff), digits))
    return residuals


def check_weight_bookkeeping() -> list[str]:
    """Names whose declared weight disagrees with the sum of factor weights."""
    bad = []
    for name, entry in _REGISTRY.items():
        if isinstance(entry.recipe, Combination):
            for _, factors in entry.recipe.terms:
                w = sum(resolve(f).weight * p for f, p in factors)
                if w != entry.weight:
                    bad.append(name)
                    break
    return bad
