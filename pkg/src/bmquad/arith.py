"""Exact integer primitives: factorization, symbols, modular square roots, sieves.

Everything here works on Python ints except the table builders at the bottom,
which return numpy arrays for the census kernels.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FACTOR_LIMIT = 1 << 63
TRIAL_LIMIT = 10**6

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeFactorization:
    sign: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = self.sign
        for p, e in self.pairs:
            out *= p**e
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def exponent(self, p: int) -> int:
        for r, e in self.pairs:
            if r == p:
                return e
        return 0


class ResidueClass(enum.Enum):
    NON_RESIDUE = "non_residue"
    SQUARE_NOT_FOURTH = "square_not_fourth"
    FOURTH_POWER = "fourth_power"
    ZERO = "zero"


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(TRIAL_LIMIT))


def _rho(n: int, rng: random.Random) -> int:
    # Brent's variant; n is odd, composite, without small factors.
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
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


def _split(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _rho(n, rng)
    _split(d, out, rng)
    _split(n // d, out, rng)


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> PrimeFactorization:
    """Factor a nonzero integer with |n| < 2**63.

    >>> factorize(-12)
    PrimeFactorization(sign=-1, pairs=((2, 2), (3, 1)))
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    if abs(n) >= FACTOR_LIMIT:
        raise ValueError(f"|n| must be below 2**63, got {n}")
    sign = -1 if n < 0 else 1
    m = abs(n)
    found: dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
    if m > 1:
        # the rho path is seeded so the result never depends on global state
        _split(m, found, random.Random(m))
    return PrimeFactorization(sign, tuple(sorted(found.items())))


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def split_valuation(n: int, p: int) -> tuple[int, int]:
    """Return (v, u) with n = p**v * u and p not dividing u."""
    v = valuation(n, p)
    return v, n // p**v


def squarefree_kernel(n: int) -> int:
    """Signed squarefree part: n = kernel * square."""
    f = factorize(n)
    out = f.sign
    for p, e in f.pairs:
        if e % 2:
            out *= p
    return out


def jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd m >= 1, with (a/1) = 1."""
    if m <= 0 or m % 2 == 0:
        raise ValueError(f"modulus must be odd and positive, got {m}")
    a %= m
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                t = -t
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker extension of the Jacobi symbol to every nonzero n."""
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    v, n = split_valuation(n, 2)
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            t = -t
    return t * jacobi(a, n)


def _tonelli(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _unit_sqrt(u: int, p: int, k: int) -> int | None:
    """Square root of a unit u modulo p**k, or None."""
    mod = p**k
    u %= mod
    if p == 2:
        if k == 1:
            return 1
        if k == 2:
            return 1 if u % 4 == 1 else None
        if u % 8 != 1:
            return None
        r = 1
        for i in range(3, k):
            # r^2 = u mod 2^i; fix bit i
            if (r * r - u) % (1 << (i + 1)):
                r += 1 << (i - 1)
        return r % mod
    r = _tonelli(u, p)
    if r is None:
        return None
    pk = p
    while pk < mod:
        pk = min(pk * pk, mod)
        r = (r - (r * r - u) * pow(2 * r, -1, pk)) % pk
    return r % mod


def sqrt_mod(a: int, p: int, k: int = 1) -> int | None:
    """A residue r modulo p**k with r*r = a (mod p**k), or None if a is not a square."""
    if k < 1:
        raise ValueError("k must be positive")
    mod = p**k
    a %= mod
    if a == 0:
        return 0
    v, u = split_valuation(a, p)
    if v % 2:
        return None
    s = _unit_sqrt(u, p, k - v)
    if s is None:
        return None
    return s * p ** (v // 2) % mod


def power_residue_class(a: int, q: int) -> ResidueClass:
    """Classify a modulo a prime q = 1 (mod 8) by square / fourth-power status."""
    if q % 8 != 1 or not is_prime(q):
        raise ValueError(f"q must be a prime congruent to 1 mod 8, got {q}")
    a %= q
    if a == 0:
        return ResidueClass.ZERO
    if pow(a, (q - 1) // 2, q) != 1:
        return ResidueClass.NON_RESIDUE
    if pow(a, (q - 1) // 4, q) == 1:
        return ResidueClass.FOURTH_POWER
    return ResidueClass.SQUARE_NOT_FOURTH


def moebius_tau(n: int) -> tuple[int, int]:
    if n < 1:
        raise ValueError("n must be positive")
    f = factorize(n)
    mu = 0 if any(e > 1 for _, e in f.pairs) else (-1) ** len(f.pairs)
    return mu, math.prod(e + 1 for _, e in f.pairs)


def moebius(n: int) -> int:
    return moebius_tau(n)[0]


def squarefree_divisors(n: int) -> list[int]:
    """Squarefree positive divisors of n, in increasing order."""
    divs = [1]
    for p in factorize(n).primes:
        divs += [d * p for d in divs]
    return sorted(divs)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).pairs:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


@lru_cache(maxsize=64)
def primitive_root(p: int) -> int:
    """Smallest positive primitive root of an odd prime p."""
    if not is_prime(p) or p == 2:
        raise ValueError(f"expected an odd prime, got {p}")
    fs = factorize(p - 1).primes
    g = 2
    while any(pow(g, (p - 1) // r, p) == 1 for r in fs):
        g += 1
    return g


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# numpy tables


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=4)
def spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..n (entries 0 and 1 are 0 and 1)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in primes_up_to(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    spf.setflags(write=False)
    return spf


@lru_cache(maxsize=4)
def mobius_table(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    mu.setflags(write=False)
    return mu
