"""Local solvability of diagonal ternary quadrics a x^2 + b y^2 + c z^2 = n over R and Z_p.

The decider is a residue search with a certified depth.  Any Z_p-point has a
coordinate i with v(a_i x_i^2) <= v(n), so its gradient valuation is at most
v(2) + max v(coeffs); reducing it modulo p**K with

    K = 2 * max(v_p(a), v_p(b), v_p(c), v_p(n)) + 2 * v_p(2) + 3

yields a residue solution that passes the Hensel test.  Exhausting residues
modulo p**K therefore certifies a negative answer.

Coefficients are first reduced to a canonical representative of their
p-adic square class (units only matter up to squares), so verdicts are cached
on a small key.  `solvable_by_reduction` is a second, independent decider
based on the classical valuation-peeling argument; the tests compare the two.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import factorize, is_prime, jacobi, split_valuation, sqrt_mod

REAL = "real"

SEARCH_FRONTIER_LIMIT = 2_000_000


@dataclass(frozen=True)
class QuadricInstance:
    """a x^2 + b y^2 + c z^2 = n with every entry nonzero."""

    a: int
    b: int
    c: int
    n: int

    def __post_init__(self):
        if 0 in (self.a, self.b, self.c, self.n):
            raise ValueError(f"coefficients and n must be nonzero: {self}")

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def indefinite(self) -> bool:
        signs = {x > 0 for x in self.coeffs}
        return len(signs) == 2

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.coeffs)

    def __call__(self, x: int, y: int, z: int) -> int:
        return self.a * x * x + self.b * y * y + self.c * z * z - self.n

    def bad_primes(self) -> tuple[int, ...]:
        """Primes dividing 2abcn."""
        ps = {2}
        for v in (self.a, self.b, self.c, self.n):
            ps.update(factorize(v).primes)
        return tuple(sorted(ps))


@dataclass(frozen=True)
class FamilyInstance:
    """Parameters of a q^2 c^2 x^2 - a d^2 y^2 + e^2 q z^2 = 1."""

    q: int
    a: int
    c: int
    d: int
    e: int

    def __post_init__(self):
        if self.q % 8 != 1 or not is_prime(self.q):
            raise ValueError(f"q must be a prime congruent to 1 mod 8, got {self.q}")
        if 0 in (self.a, self.c, self.d, self.e):
            raise ValueError("a, c, d, e must be nonzero")
        c, d, e = self.c, self.d, self.e
        if math.gcd(c, d) != 1 or math.gcd(c, e) != 1 or math.gcd(d, e) != 1:
            raise ValueError(f"c, d, e must be pairwise coprime, got {(c, d, e)}")

    def quadric(self) -> QuadricInstance:
        q, a, c, d, e = self.q, self.a, self.c, self.d, self.e
        return QuadricInstance(a * q * q * c * c, -a * d * d, e * e * q, 1)


@dataclass(frozen=True)
class LocalVerdict:
    place: int | str
    solvable: bool
    witness: tuple[int, int, int] | None = None
    modulus: int | None = None
    searched_depth: int | None = None


def solvable_real(Q: QuadricInstance) -> bool:
    if Q.indefinite:
        return True
    return (Q.a > 0) == (Q.n > 0)


def certified_depth(Q: QuadricInstance, p: int) -> int:
    top = max(split_valuation(v, p)[0] for v in (Q.a, Q.b, Q.c, Q.n))
    return 2 * top + 2 * (1 if p == 2 else 0) + 3


def _vp(x: int, p: int, cap: int) -> int:
    """Valuation of x truncated at cap (x is only known modulo p**cap)."""
    if x == 0:
        return cap
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def is_hensel_witness(coeffs, n: int, p: int, point, k: int) -> bool:
    """True if point solves the equation mod p**k and some partial derivative
    has valuation at most (k - 1) / 2."""
    mod = p**k
    a, b, c = coeffs
    x, y, z = point
    if (a * x * x + b * y * y + c * z * z - n) % mod:
        return False
    m = min(_vp(2 * ai * xi % mod, p, k) for ai, xi in zip(coeffs, point))
    return 2 * m + 1 <= k


def _canonical_unit(u: int, p: int) -> int:
    if p == 2:
        return u % 8
    if jacobi(u % p, p) == 1:
        return 1
    return _smallest_nonresidue(p)


@lru_cache(maxsize=None)
def _smallest_nonresidue(p: int) -> int:
    r = 2
    while jacobi(r, p) != -1:
        r += 1
    return r


@lru_cache(maxsize=1 << 16)
def _canonical(x: int, p: int) -> tuple[int, int, int]:
    """(canonical value, valuation, unit) with canonical = p^v * canonical unit."""
    v, u = split_valuation(x, p)
    return p**v * _canonical_unit(u, p), v, u


def _digits(k: int, v: int, v2: int) -> int:
    # a (x + p^j t)^2 = a x^2 mod p^k, and the gradient is unchanged, once
    # j >= k - v - v2 and 2j >= k - v
    return max(0, k - v - v2, -((v - k) // 2))


@lru_cache(maxsize=1 << 16)
def _search(p: int, coeffs: tuple[int, int, int], n: int, depth: int):
    """Level-by-level residue search.  Returns (witness, k) or (None, depth).

    Coordinate i is stored modulo p**j_i(k) (see _digits): higher digits do
    not affect the equation or the Hensel test mod p**k, which keeps the set
    of surviving residues small.
    """
    v2 = 1 if p == 2 else 0
    vals = [split_valuation(a, p)[0] for a in coeffs]
    prev = [0, 0, 0]
    frontier = {(0, 0, 0)}
    for k in range(1, depth + 1):
        mod = p**k
        cur = [_digits(k, v, v2) for v in vals]
        steps = [
            [t * p ** prev[i] for t in range(p ** (cur[i] - prev[i]))] for i in range(3)
        ]
        nxt = set()
        for base in sorted(frontier):
            for d in itertools.product(*steps):
                pt = tuple(b + e for b, e in zip(base, d))
                if (sum(a * x * x for a, x in zip(coeffs, pt)) - n) % mod:
                    continue
                m = min(_vp(2 * a * x % mod, p, k) for a, x in zip(coeffs, pt))
                if 2 * m + 1 <= k:
                    return pt, k
                nxt.add(pt)
            if len(nxt) > SEARCH_FRONTIER_LIMIT:
                raise RuntimeError(f"residue search frontier exceeded at p={p}, k={k}")
        frontier, prev = nxt, cur
        if not frontier:
            break
    return None, depth


def residue_search(Q: QuadricInstance, p: int, depth: int | None = None) -> LocalVerdict:
    """Exhaustive residue search up to p**depth (default: the certified depth).

    Cost grows like p**3 per surviving node, so this is meant for small p;
    solvable_at_prime uses the peeling decider and keeps this as a cross-check.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if depth is None:
        depth = certified_depth(Q, p)
    vals = [_canonical(v, p) for v in (Q.a, Q.b, Q.c, Q.n)]
    can = tuple(v[0] for v in vals)
    wit, k = _search(p, can[:3], can[3], depth)
    if wit is None:
        return LocalVerdict(p, False, searched_depth=depth)
    mod = p**k
    # unit ratios are squares by construction; lift their roots to p**k
    scale = []
    for (cv, v, u) in vals:
        cu = cv // p**v
        r = sqrt_mod(u * pow(cu, -1, mod) % mod, p, k)
        assert r is not None
        scale.append(r)
    t = scale[3]
    point = tuple(t * X * pow(s, -1, mod) % mod for X, s in zip(wit, scale[:3]))
    if not is_hensel_witness(Q.coeffs, Q.n, p, point, k):
        raise ArithmeticError(f"transported witness failed at p={p}: {Q}")
    return LocalVerdict(p, True, witness=point, modulus=mod, searched_depth=k)


def _fp_point(units: dict[int, int], n: int, p: int):
    """A point mod p of sum units[i] x_i^2 = n with a nonzero coordinate j.

    Returns (point dict, j) or None.  Odd p only; at most a few Legendre
    tests are needed, so large p is cheap.
    """
    idx = sorted(units)
    n %= p
    if not idx:
        return None
    c = [units[i] % p for i in idx]
    if n:
        if len(idx) == 1:
            r = sqrt_mod(n * pow(c[0], -1, p), p)
            return None if r is None else ({idx[0]: r}, idx[0])
        for y in range(p):
            r = sqrt_mod((n - c[1] * y * y) * pow(c[0], -1, p), p)
            if r is not None:
                if r:
                    return {idx[0]: r, idx[1]: y}, idx[0]
                return {idx[0]: 0, idx[1]: y}, idx[1]
        return None
    if len(idx) == 1:
        return None
    if len(idx) == 2:
        r = sqrt_mod(-c[0] * pow(c[1], -1, p), p)
        return None if r is None else ({idx[0]: 1, idx[1]: r}, idx[0])
    for z in range(p):
        r = sqrt_mod(-(c[1] + c[2] * z * z) * pow(c[0], -1, p), p)
        if r is not None:
            return {idx[0]: r, idx[1]: 1, idx[2]: z}, idx[1]
    return None


def _mod8_point(coeffs: list[int], n: int, units: list[int]):
    for pt in itertools.product(range(8), repeat=3):
        odd = [i for i in units if pt[i] % 2]
        if odd and (sum(a * x * x for a, x in zip(coeffs, pt)) - n) % 8 == 0:
            return dict(enumerate(pt)), odd[0]
    return None


def solvable_at_prime(Q: QuadricInstance, p: int) -> LocalVerdict:
    """Decide Q(Z_p) != 0 by valuation peeling, with a Hensel witness.

    At each round either some unit-coefficient coordinate can be a unit
    (a point mod p, or mod 8 when p = 2, decides this and lifts), or all
    such coordinates are divisible by p: substitute x_i = p x_i' and divide
    the equation by p.  v_p(n) drops by one per round, so a negative answer
    arrives within v_p(n) + 1 rounds.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    coeffs = list(Q.coeffs)
    n, s = Q.n, 0
    expo = [0, 0, 0]
    v2 = 1 if p == 2 else 0
    while True:
        units = [i for i, a in enumerate(coeffs) if a % p]
        if p == 2:
            found = _mod8_point(coeffs, n, units) if units else None
        else:
            found = _fp_point({i: coeffs[i] for i in units}, n, p)
        if found is not None:
            break
        if n % p:
            return LocalVerdict(p, False, searched_depth=certified_depth(Q, p))
        for i in units:
            coeffs[i] *= p * p
            expo[i] += 1
        coeffs = [a // p for a in coeffs]
        n //= p
        s += 1
    pt, j = found
    X = [pt.get(i, 0) for i in range(3)]
    # lift coordinate j so that the reduced equation holds mod p**L
    L = s + 2 * v2 + 3
    modL = p**L
    rest = n - sum(coeffs[i] * X[i] * X[i] for i in range(3) if i != j)
    r = sqrt_mod(rest * pow(coeffs[j], -1, modL) % modL, p, L)
    if r is None:
        raise ArithmeticError(f"lift failed at p={p}: {Q}")
    X[j] = r
    k = s + L
    mod = p**k
    point = tuple(p ** expo[i] * X[i] % mod for i in range(3))
    if not is_hensel_witness(Q.coeffs, Q.n, p, point, k):
        raise ArithmeticError(f"witness failed at p={p}: {Q}")
    return LocalVerdict(p, True, witness=point, modulus=mod, searched_depth=k)


@lru_cache(maxsize=1 << 18)
def _solvable_cached(p: int, can: tuple[int, int, int, int]) -> bool:
    a, b, c, n = sorted(can[:3]) + [can[3]]
    return solvable_by_reduction(QuadricInstance(a, b, c, n), p)


def locally_solvable_at(Q: QuadricInstance, p: int) -> bool:
    """Boolean form of solvable_at_prime, cached on the square-class key."""
    can = tuple(_canonical(v, p)[0] for v in (Q.a, Q.b, Q.c, Q.n))
    return _solvable_cached(p, can)


def solvable_everywhere(Q: QuadricInstance) -> tuple[bool, list]:
    failing: list = []
    if not solvable_real(Q):
        failing.append(REAL)
    for p in Q.bad_primes():
        if not locally_solvable_at(Q, p):
            failing.append(p)
    return not failing, failing


# ---------------------------------------------------------------------------
# independent decider: peel valuations


def _fp_represents(units: list[int], n: int, p: int) -> bool:
    """Does sum u_i x_i^2 = n have a solution over F_p (odd p) with some x_i != 0?"""
    n %= p
    k = len(units)
    if k == 0:
        return False
    if n:
        if k >= 2:
            return True
        return jacobi(n * units[0], p) == 1
    if k >= 3:
        return True
    if k == 2:
        return jacobi(-units[0] * units[1], p) == 1
    return False


def _mod8_unit_point(coeffs: list[int], n: int, units: list[int]) -> bool:
    return _mod8_point(coeffs, n, units) is not None


def solvable_by_reduction(Q: QuadricInstance, p: int) -> bool:
    """Z_p-solvability by splitting on whether a unit-coefficient coordinate is a unit.

    Same recursion as solvable_at_prime, but the existence of a point mod p
    is read off from Legendre symbols rather than constructed.
    """
    coeffs = list(Q.coeffs)
    n = Q.n
    while True:
        units = [i for i, a in enumerate(coeffs) if a % p]
        if p == 2:
            if units and _mod8_unit_point(coeffs, n, units):
                return True
        else:
            if _fp_represents([coeffs[i] for i in units], n, p):
                return True
        for i in units:
            coeffs[i] *= p * p
        if n % p:
            return False
        coeffs = [a // p for a in coeffs]
        n //= p


# ---------------------------------------------------------------------------
# the family


def family_local_criterion(F: FamilyInstance) -> bool:
    """Closed-form local solvability of the family at every prime."""
    q, a = F.q, F.a
    if math.gcd(a, F.e * q) != 1 or math.gcd(F.d, q) != 1:
        return False
    for p in factorize(a).primes:
        if p != 2 and jacobi(q, p) != 1:
            return False
    return True
