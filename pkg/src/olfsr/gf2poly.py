"""Polynomial arithmetic over GF(2) and counting of primitive polynomials.

Polynomials are plain integers: bit ``i`` holds the coefficient of ``x**i``.
With that convention the feedback taps of an LFSR are the low ``g`` bits of
its generator polynomial.

Primitivity needs the factorization of the multiplicative group order
``2**g - 1``, so the module also carries a small integer factoring toolkit
(trial division, Pollard-Brent rho, Miller-Rabin).
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Iterator

EXACT_DEGREE_LIMIT = 64
TRIAL_DIVISION_BOUND = 10**6


class CapacityError(ValueError):
    """More polynomials were requested than exist."""


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


def degree(a: int) -> int:
    """Degree of ``a``; the zero polynomial has degree -1."""
    return a.bit_length() - 1


@dataclass(frozen=True, order=True)
class GenPoly:
    """A binary generator polynomial of degree ``g``.

    ``mask`` holds all ``g + 1`` coefficients, so ``x^4 + x + 1`` is ``0b10011``.
    """

    mask: int

    def __post_init__(self):
        if self.mask < 2:
            raise ValueError(f"generator polynomial must have degree >= 1, got {self.mask:#x}")

    @cached_property
    def degree(self) -> int:
        return degree(self.mask)

    @cached_property
    def taps(self) -> int:
        """Feedback tap mask: the coefficients below the leading term."""
        return self.mask ^ (1 << self.degree)

    @property
    def coeffs(self) -> list[int]:
        """Coefficients from the constant term up to the leading term."""
        return [(self.mask >> i) & 1 for i in range(self.degree + 1)]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> GenPoly:
        return cls(sum((int(c) & 1) << i for i, c in enumerate(coeffs)))

    @classmethod
    def from_exponents(cls, *exponents: int) -> GenPoly:
        """``GenPoly.from_exponents(4, 1, 0)`` is ``x^4 + x + 1``."""
        mask = 0
        for e in exponents:
            mask ^= 1 << e
        return cls(mask)

    @classmethod
    def from_hex(cls, text: str) -> GenPoly:
        return cls(int(text, 16))

    def to_hex(self) -> str:
        return format(self.mask, "x")

    def is_generator(self) -> bool:
        """True if the constant term is set (otherwise ``x`` divides it)."""
        return bool(self.mask & 1)

    def __str__(self) -> str:
        return to_string(self.mask)


def to_string(a: int) -> str:
    """Human readable form, e.g. ``x^4 + x + 1``."""
    if a == 0:
        return "0"
    terms = []
    for i in range(degree(a), -1, -1):
        if (a >> i) & 1:
            terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return " + ".join(terms)


def _as_int(p) -> int:
    return p.mask if isinstance(p, GenPoly) else int(p)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two polynomials."""
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def poly_mod(a: int, m: int) -> int:
    """Remainder of ``a`` divided by ``m``."""
    if m == 0:
        raise ZeroDivisionError("division by zero polynomial")
    dm = degree(m)
    da = degree(a)
    while da >= dm:
        a ^= m << (da - dm)
        da = degree(a)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_mod_mul(a: int, b: int, modulus) -> int:
    """``a * b mod modulus`` for residues ``a``, ``b`` of lower degree than the modulus."""
    m = _as_int(modulus)
    dm = degree(m)
    if dm < 1:
        raise ValueError("modulus must have degree >= 1")
    if degree(a) >= dm or degree(b) >= dm:
        raise ValueError(
            f"operands must have degree < {dm}, got {degree(a)} and {degree(b)}"
        )
    # Shift-and-add with reduction on the fly keeps intermediates below 2**dm.
    top = 1 << dm
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= m
    return result


def poly_pow_mod(base: int, exponent: int, modulus) -> int:
    m = _as_int(modulus)
    result = poly_mod(1, m)
    base = poly_mod(base, m)
    while exponent:
        if exponent & 1:
            result = poly_mod_mul(result, base, m)
        exponent >>= 1
        if exponent:
            base = poly_mod_mul(base, base, m)
    return result


def is_irreducible(p) -> bool:
    """Ben-Or test: ``gcd(x^(2^i) - x, p) == 1`` for every ``i <= g/2``."""
    p = _as_int(p)
    g = degree(p)
    if g < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if g == 1:
        return True
    x = poly_mod(0b10, p)
    power = x
    for _ in range(g // 2):
        power = poly_mod_mul(power, power, p)
        if poly_gcd(p, power ^ x) != 1:
            return False
    return True


def is_primitive(p, factors_of_order: FactoredInt | None = None) -> bool:
    """True iff ``p`` is irreducible and ``x`` has order ``2^g - 1`` modulo ``p``.

    ``factors_of_order`` must factor ``2^g - 1``; it is computed (and cached)
    when omitted.
    """
    p = _as_int(p)
    g = degree(p)
    if g < 1:
        raise ValueError("primitivity is defined for degree >= 1")
    order = (1 << g) - 1
    if factors_of_order is None:
        factors_of_order = mersenne_factors(g)
    elif factors_of_order.value != order:
        raise ValueError(
            f"factorization is of {factors_of_order.value}, expected 2^{g}-1 = {order}"
        )
    if not p & 1:
        return False
    if not is_irreducible(p):
        return False
    if g == 1:
        return True
    for q, _ in factors_of_order.factors:
        if poly_pow_mod(0b10, order // q, p) == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Integer factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredInt:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        product = 1
        for p, e in self.factors:
            if e < 1:
                raise ValueError(f"exponent of {p} must be positive")
            product *= p**e
        if product != self.value:
            raise ValueError(f"factors multiply to {product}, not {self.value}")

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def __str__(self) -> str:
        return " ".join(f"{p}^{e}" for p, e in self.factors)


@lru_cache(maxsize=1)
def _small_primes(bound: int = TRIAL_DIVISION_BOUND) -> tuple[int, ...]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int, rounds: int = 16) -> bool:
    """Miller-Rabin. Deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = pow(a, d, n)
        if x in (1, n - 1):
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    if any(witness(a) for a in _MR_BASES):
        return False
    if n < 3_317_044_064_679_887_385_961_981:
        return True
    rng = random.Random(n)
    return not any(witness(rng.randrange(2, n - 1)) for _ in range(rounds))


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, rng: random.Random) -> Iterator[int]:
    if n == 1:
        return
    if is_probable_prime(n):
        yield n
        return
    d = _pollard_brent(n, rng)
    yield from _split(d, rng)
    yield from _split(n // d, rng)


def factor(n: int) -> FactoredInt:
    """Complete prime factorization of ``n >= 1``."""
    if n < 1:
        raise ValueError("factor() needs a positive integer")
    counts: dict[int, int] = {}
    rest = n
    for p in _small_primes():
        if p * p > rest:
            break
        while rest % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rest //= p
    if rest > 1:
        rng = random.Random(rest)
        for p in _split(rest, rng):
            counts[p] = counts.get(p, 0) + 1
    return FactoredInt(n, tuple(sorted(counts.items())))


def euler_phi(f: FactoredInt) -> int:
    result = 1
    for p, e in f.factors:
        result *= p ** (e - 1) * (p - 1)
    return result


_FACTOR_CACHE: dict[int, FactoredInt] = {}


def mersenne_factors(g: int) -> FactoredInt:
    """Factorization of ``2**g - 1`` (memoized)."""
    if g < 1:
        raise ValueError("degree must be positive")
    if g not in _FACTOR_CACHE:
        _FACTOR_CACHE[g] = factor((1 << g) - 1)
    return _FACTOR_CACHE[g]


_TABLE_LINE = re.compile(r"^\s*(\d+)\s*:(.*)$")


def load_factor_table(path: str | Path) -> dict[int, FactoredInt]:
    """Read a ``mersenne_factors.txt`` table (``g: p1^e1 p2^e2 ...``) and prime the cache.

    Every entry is checked: the factors must reassemble ``2^g - 1`` and be prime.
    """
    table = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        match = _TABLE_LINE.match(line)
        if not match:
            raise ValueError(f"{path}:{lineno}: malformed line {line!r}")
        g = int(match.group(1))
        factors = []
        for term in match.group(2).split():
            base, _, exp = term.partition("^")
            factors.append((int(base), int(exp or 1)))
        entry = FactoredInt((1 << g) - 1, tuple(sorted(factors)))
        if not all(is_probable_prime(p) for p, _ in entry.factors):
            raise ValueError(f"{path}:{lineno}: non-prime factor for g={g}")
        table[g] = entry
    _FACTOR_CACHE.update(table)
    return table


def dump_factor_table(path: str | Path, degrees: Iterable[int]) -> None:
    lines = [f"{g}: {mersenne_factors(g)}" for g in degrees]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Counting and enumerating primitive polynomials
# ---------------------------------------------------------------------------


def count_primitive(g: int) -> int:
    """Exact number of primitive polynomials of degree ``g``: ``phi(2^g - 1) / g``."""
    if not 1 <= g <= EXACT_DEGREE_LIMIT:
        raise ValueError(
            f"exact counts are supported for 1 <= g <= {EXACT_DEGREE_LIMIT}; "
            "use count_primitive_log2 for larger degrees"
        )
    phi = euler_phi(mersenne_factors(g))
    count, rem = divmod(phi, g)
    assert rem == 0, f"phi(2^{g}-1) not divisible by {g}"
    return count


def count_primitive_log2(g: int) -> tuple[float, bool]:
    """``log2`` of the primitive count and whether it is exact.

    Above the exact regime the bound ``(2^g - 1) / g`` is returned, flagged
    as approximate (``exact=False``).
    """
    if g <= EXACT_DEGREE_LIMIT:
        return math.log2(count_primitive(g)), True
    return g - math.log2(g), False


def _capacity(g: int) -> float:
    if g <= EXACT_DEGREE_LIMIT:
        return count_primitive(g)
    return 2.0 ** count_primitive_log2(g)[0]


def iter_primitive(g: int) -> Iterator[GenPoly]:
    """All primitive polynomials of degree ``g`` in increasing order."""
    factors = mersenne_factors(g)
    top = 1 << g
    for low in range(1, top, 2):
        # An even number of terms means p(1) = 0, so x + 1 divides p.
        if g > 1 and not (top | low).bit_count() & 1:
            continue
        if is_primitive(top | low, factors):
            yield GenPoly(top | low)


@lru_cache(maxsize=32)
def all_primitive(g: int) -> tuple[GenPoly, ...]:
    """Every primitive polynomial of degree ``g`` (exhaustive; keep g small)."""
    return tuple(iter_primitive(g))


def enumerate_primitive(g: int, limit: int, seed: int | None = None) -> list[GenPoly]:
    """Return ``limit`` distinct primitive polynomials of degree ``g``.

    Without a seed the smallest ones are returned (ascending scan, g <= 32).
    With a seed, candidates are drawn at random from a ``random.Random(seed)``
    stream, so the result is reproducible for a given seed.
    """
    if g < 1 or limit < 1:
        raise ValueError("degree and limit must be positive")
    if limit > _capacity(g):
        raise CapacityError(
            f"requested {limit} primitive polynomials of degree {g}, "
            f"only {count_primitive(g) if g <= EXACT_DEGREE_LIMIT else '~' + str(_capacity(g))} exist"
        )
    if seed is None:
        if g > 32:
            raise ValueError("ascending scan is limited to g <= 32; pass a seed")
        found = []
        for poly in iter_primitive(g):
            found.append(poly)
            if len(found) == limit:
                break
        return found

    rng = random.Random(seed)
    if g <= 16:
        pool = list(all_primitive(g))
        return sorted(rng.sample(pool, limit))
    factors = mersenne_factors(g)
    found: set[int] = set()
    top = 1 << g
    while len(found) < limit:
        candidate = top | rng.getrandbits(g) | 1
        if candidate not in found and is_primitive(candidate, factors):
            found.add(candidate)
    return [GenPoly(m) for m in sorted(found)]
