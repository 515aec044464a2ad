"""Exact counts for the family census and the identities behind them.

The lower-bound count is

    N'(B) = 2 sum_{a <= B/q^2, alpha(a) = 1, a in S} L(C_a, D_a, E; 1, q, a)

with L the pairwise-coprime triple count, C_a = floor(sqrt(B/(q^2 a))),
D_a = floor(sqrt(B/a)), E = floor(sqrt(B/q)).  It is evaluated three ways:
directly, after Mobius inversion of the condition (e, a) = 1, and through
Dirichlet characters mod q.  All range bounds are exact integer square
roots.
"""

from __future__ import annotations

import cmath
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from . import _kernels
from .arith import (
    ResidueClass,
    divisors,
    factorize,
    is_prime,
    jacobi,
    mobius_table,
    moebius,
    moebius_tau,
    power_residue_class,
    primes_up_to,
    primitive_root,
    spf_table,
)
from .local import QuadricInstance, solvable_everywhere

DEFAULT_Q = 17


class NumericalInconsistency(ArithmeticError):
    pass


class NoDecomposition(ValueError):
    def __init__(self, msg: str, witness: int | None = None):
        super().__init__(msg)
        self.witness = witness


def _check_q(q: int) -> None:
    if q % 8 != 1 or not is_prime(q):
        raise ValueError(f"q must be a prime congruent to 1 mod 8, got {q}")


# ---------------------------------------------------------------------------
# characters


class CharacterTable:
    """All Dirichlet characters mod a prime q.

    chi_j(g^k) = exp(2 pi i j k / (q - 1)) with g the least primitive root,
    so j = 0 is principal and j = (q - 1)/2 is the Legendre symbol.
    """

    def __init__(self, q: int):
        if not is_prime(q) or q == 2:
            raise ValueError(f"expected an odd prime, got {q}")
        self.q = q
        self.order = q - 1
        self.g = primitive_root(q)
        ind = [-1] * q
        x = 1
        for k in range(q - 1):
            ind[x] = k
            x = x * self.g % q
        self.ind = ind
        self.principal = 0
        self.legendre = (q - 1) // 2
        roots = np.exp(2j * np.pi * np.arange(self.order) / self.order)
        vals = np.zeros((self.order, q), dtype=complex)
        for j in range(self.order):
            for r in range(1, q):
                vals[j, r] = roots[j * ind[r] % self.order]
        self.values = vals

    def __len__(self):
        return self.order

    def exponent(self, j: int, a: int) -> int | None:
        """k with chi_j(a) = zeta^k, zeta = exp(2 pi i / (q-1)); None if q | a."""
        r = a % self.q
        if r == 0:
            return None
        return j * self.ind[r] % self.order

    def __call__(self, j: int, a: int) -> complex:
        return complex(self.values[j, a % self.q])

    def conj(self, j: int) -> int:
        return (-j) % self.order

    def orthogonality_defect(self) -> float:
        """max |sum_chi conj(chi(s)) chi(a) - (q-1)[a = s]| over units."""
        v = self.values[:, 1:]
        gram = v.conj().T @ v
        return float(np.max(np.abs(gram - self.order * np.eye(self.q - 1))))


@lru_cache(maxsize=16)
def character_table(q: int) -> CharacterTable:
    return CharacterTable(q)


def S_residues(q: int) -> list[int]:
    """Residues mod q that are squares but not fourth powers."""
    _check_q(q)
    return [r for r in range(1, q) if power_residue_class(r, q) == ResidueClass.SQUARE_NOT_FOURTH]


# ---------------------------------------------------------------------------
# indicators


def indicator_alpha(a: int, q: int = DEFAULT_Q) -> int:
    """1 iff every prime p dividing a has (p/q) = 1."""
    if a < 1:
        raise ValueError("a must be positive")
    return int(all(jacobi(p, q) == 1 for p in factorize(a).primes)) if a > 1 else 1


def alpha_sieve(N: int, q: int = DEFAULT_Q) -> np.ndarray:
    """alpha(a) for 0 <= a <= N as a uint8 array (entry 0 is 0)."""
    out = np.ones(N + 1, dtype=np.uint8)
    out[0] = 0
    ps = primes_up_to(N)
    leg = np.array([0] + [jacobi(r, q) for r in range(1, q)])
    bad = ps[leg[ps % q] != 1]
    for p in bad:
        out[p::p] = 0
    return out


def indicator_S(a: int, q: int = DEFAULT_Q) -> int:
    _check_q(q)
    return int(power_residue_class(a, q) == ResidueClass.SQUARE_NOT_FOURTH)


def indicator_S_characters(a: int, q: int = DEFAULT_Q) -> float:
    """(1/(q-1)) sum_{s in S} sum_chi chi(s) chi(a); S is closed under inverses."""
    tab = character_table(q)
    r = a % q
    tot = sum(tab.values[j, s] * tab.values[j, r] for s in S_residues(q) for j in range(tab.order))
    val = tot / tab.order
    if abs(val.imag) > 1e-9:
        raise NumericalInconsistency(f"imaginary part {val.imag} in indicator_S")
    return float(val.real)


def indicator_beta(c: int, d: int, e: int) -> int:
    return int(math.gcd(c, d) == 1 and math.gcd(c, e) == 1 and math.gcd(d, e) == 1)


def beta_encoding(x: int, y: int, z: int) -> int:
    """sum_{t|(x,y,z)} sum_{u|(x,y)} sum_{v|(x,z)} sum_{w|(y,z)} mu(uvwt) mu(t) tau(t)."""
    gxyz = math.gcd(x, math.gcd(y, z))
    tot = 0
    for t in divisors(gxyz):
        mt, tt = moebius_tau(t)
        if mt == 0:
            continue
        for u in divisors(math.gcd(x, y)):
            for v in divisors(math.gcd(x, z)):
                for w in divisors(math.gcd(y, z)):
                    m = moebius(u * v * w * t)
                    if m:
                        tot += m * mt * tt
    return tot


def beta_encoding_table(N: int) -> np.ndarray:
    """The encoding sum for all 1 <= x, y, z <= N at once (index 0 unused).

    A term (t, u, v, w) with uvwt squarefree contributes to (x, y, z) exactly
    when tuv | x, tuw | y, tvw | z, so it is added on a strided block.
    """
    out = np.zeros((N + 1, N + 1, N + 1), dtype=np.int64)
    sqf = [n for n in range(1, N + 1) if moebius(n)]
    for t in sqf:
        mt, tt = moebius_tau(t)
        ct = mt * tt
        for u in sqf:
            if t * u > N:
                break
            for v in sqf:
                if t * u * v > N:
                    break
                for w in sqf:
                    if t * v * w > N:
                        break
                    if t * u * w > N:
                        break
                    m = moebius(u * v * w * t)
                    if m == 0:
                        continue
                    a, b, c = t * u * v, t * u * w, t * v * w
                    out[a::a, b::b, c::c] += m * ct
    return out


def beta_table(N: int) -> np.ndarray:
    r = np.arange(N + 1)
    gxy = np.gcd.outer(r, r)
    ok = gxy == 1
    out = ok[:, :, None] & ok[:, None, :] & ok[None, :, :]
    out[0, :, :] = out[:, 0, :] = out[:, :, 0] = False
    return out.astype(np.int64)


def indicator_epsilon(v: int, n: int) -> int:
    """1 iff every prime dividing v divides 2n."""
    if v < 1 or n == 0:
        raise ValueError("need v >= 1 and n != 0")
    return int(all((2 * n) % p == 0 for p in factorize(v).primes)) if v > 1 else 1


def indicator_delta(u: int, v: int) -> int:
    """1 iff u is squarefree, odd, and (v/p) = 1 for every p | u."""
    if u < 1 or v == 0:
        raise ValueError("need u >= 1 and v != 0")
    if u == 1:
        return 1
    f = factorize(u)
    if u % 2 == 0 or any(e > 1 for _, e in f.pairs):
        return 0
    return int(all(jacobi(v, p) == 1 for p in f.primes))


def delta_rewrite(u: int, v: int) -> Fraction:
    """1_{(u,2v)=1} mu^2(u)/tau(u) sum_{d | u} (v/d)."""
    if u < 1 or v == 0:
        raise ValueError("need u >= 1 and v != 0")
    if math.gcd(u, 2 * v) != 1:
        return Fraction(0)
    mu, tau = moebius_tau(u)
    if mu == 0:
        return Fraction(0)
    return Fraction(sum(jacobi(v, d) for d in divisors(u)), tau)


# ---------------------------------------------------------------------------
# pairwise-coprime triple counts


def _primes_arr(m: int) -> np.ndarray:
    m = abs(m)
    if m <= 1:
        return np.empty(0, dtype=np.int64)
    return np.array(factorize(m).primes, dtype=np.int64)


def _tables(n: int):
    n = max(n, 2)
    return spf_table(n), mobius_table(n)


def _L(X: int, Y: int, Z: int, pa, pb, pc, spf, mu) -> int:
    # put the shortest range on the outer loop; the count is symmetric
    trip = sorted([(X, 0, pa), (Y, 1, pb), (Z, 2, pc)], key=lambda t: (t[0], t[1]))
    (x, _, qa), (y, _, qb), (z, _, qc) = trip
    return int(_kernels.triple_count(x, y, z, qa, qb, qc, spf, mu))


def coprime_triple_count(X: int, Y: int, Z: int, a: int = 1, b: int = 1, c: int = 1) -> int:
    """#{x <= X, y <= Y, z <= Z pairwise coprime, (x,a) = (y,b) = (z,c) = 1}."""
    if min(X, Y, Z) < 1:
        raise ValueError("bounds must be positive")
    if 0 in (a, b, c):
        raise ValueError("a, b, c must be nonzero")
    spf, mu = _tables(max(X, Y, Z))
    return _L(X, Y, Z, _primes_arr(a), _primes_arr(b), _primes_arr(c), spf, mu)


# ---------------------------------------------------------------------------
# the lower-bound count


@dataclass
class CountReport:
    B: int
    q: int | None
    count: int
    route: str
    elapsed: float = 0.0
    predicted: float | None = None
    meta: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = {
            "b": self.B,
            "q": self.q,
            "count": self.count,
            "route": self.route,
            "predicted": self.predicted,
        }
        rec.update(self.meta)
        rec["elapsed"] = round(self.elapsed, 6)
        return rec


def _blocks(items: list, threads: int) -> list[list]:
    if threads < 1:
        raise ValueError("threads must be >= 1")
    k = max(1, min(threads, len(items)))
    size = -(-len(items) // k) if items else 0
    return [items[i * size : (i + 1) * size] for i in range(k)]


def _run_blocks(fn, items: list, threads: int) -> list:
    """Apply fn to contiguous blocks of items, in threads, results in block order."""
    blocks = _blocks(items, threads)
    if len(blocks) == 1:
        return [fn(blocks[0])]
    with ThreadPoolExecutor(max_workers=len(blocks)) as ex:
        return list(ex.map(fn, blocks))


def _admissible_a(limit: int, q: int) -> list[int]:
    if limit < 1:
        return []
    alpha = alpha_sieve(limit, q)
    S = set(S_residues(q))
    return [a for a in range(1, limit + 1) if alpha[a] and a % q in S]


def count_nbr_direct(B: int, q: int = DEFAULT_Q, threads: int = 1) -> CountReport:
    """2 * sum over a in S with alpha(a) = 1 of L(C, D, E; 1, q, a)."""
    _check_q(q)
    if B < 1:
        raise ValueError("B must be positive")
    t0 = time.perf_counter()
    E = math.isqrt(B // q)
    avals = _admissible_a(B // (q * q), q)
    spf, mu = _tables(math.isqrt(B) + 1)
    none = np.empty(0, dtype=np.int64)
    pq = _primes_arr(q)

    def block(items):
        s = 0
        for a in items:
            C = math.isqrt(B // (q * q * a))
            D = math.isqrt(B // a)
            s += _L(C, D, E, none, pq, _primes_arr(a), spf, mu)
        return s

    total = 2 * sum(_run_blocks(block, avals, threads))
    return CountReport(B, q, total, "direct", time.perf_counter() - t0, meta={"threads": threads})


def v_triple(B: int, a: int, f: int, q: int = DEFAULT_Q) -> int:
    """V(B, a, f): triples c, d, e with q^2 a f c^2 <= B, a f d^2 <= B,
    q f^2 e^2 <= B, pairwise coprime, (c, f) = 1 and (d, q f) = 1."""
    C = math.isqrt(B // (q * q * a * f))
    D = math.isqrt(B // (a * f))
    E = math.isqrt(B // (q * f * f))
    if min(C, D, E) < 1:
        return 0
    spf, mu = _tables(max(C, D, E))
    return _L(C, D, E, _primes_arr(f), _primes_arr(q * f), np.empty(0, np.int64), spf, mu)


def _pairs(B: int, q: int) -> list[tuple[int, int, int]]:
    """(f, a, mu(f)) with mu(f) alpha(f) alpha(a) != 0, a f <= B/q^2, q f^2 <= B."""
    lim = B // (q * q)
    if lim < 1:
        return []
    alpha = alpha_sieve(lim, q)
    mu = mobius_table(max(lim, 2))
    out = []
    for f in range(1, lim + 1):
        if q * f * f > B:
            break
        if mu[f] == 0 or not alpha[f]:
            continue
        for a in range(1, lim // f + 1):
            if alpha[a]:
                out.append((f, a, int(mu[f])))
    return out


def count_nbr_mobius(B: int, q: int = DEFAULT_Q, threads: int = 1) -> CountReport:
    """2 sum_f mu(f) sum_a alpha(af) 1_S(af) V(B, a, f), from (e, a) = 1
    written as sum_{f | (e, a)} mu(f)."""
    _check_q(q)
    t0 = time.perf_counter()
    S = set(S_residues(q))
    items = [(f, a, m) for f, a, m in _pairs(B, q) if (a * f) % q in S]

    def block(its):
        return sum(m * v_triple(B, a, f, q) for f, a, m in its)

    total = 2 * sum(_run_blocks(block, items, threads))
    return CountReport(B, q, total, "mobius", time.perf_counter() - t0, meta={"threads": threads})


@lru_cache(maxsize=32)
def _residue_totals(B: int, q: int) -> tuple[int, ...]:
    """T[r] = sum of mu(f) V(B, a, f) over admissible (a, f) with a f = r mod q."""
    T = [0] * q
    for f, a, m in _pairs(B, q):
        T[(a * f) % q] += m * v_triple(B, a, f, q)
    return tuple(T)


def u_chi_coefficients(B: int, q: int, j: int) -> list[int]:
    """U_chi as an exact element of Z[zeta], zeta = exp(2 pi i/(q-1)):
    coefficient k collects the residues r with chi_j(r) = zeta^k."""
    tab = character_table(q)
    T = _residue_totals(B, q)
    coef = [0] * tab.order
    for r in range(1, q):
        coef[tab.exponent(j, r)] += T[r]
    return coef


def u_chi(B: int, q: int, j: int) -> complex:
    """U_chi(B) = sum_f mu(f) alpha(f) chi(f) W_chi(B, f)."""
    coef = u_chi_coefficients(B, q, j)
    n = len(coef)
    return sum(c * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(coef) if c)


def w_chi(B: int, f: int, q: int, j: int) -> complex:
    """W_chi(B, f) = sum_a alpha(a) chi(a) V(B, a, f)."""
    tab = character_table(q)
    lim = B // (q * q * f)
    tot = 0j
    for a in range(1, lim + 1):
        if indicator_alpha(a, q):
            tot += tab(j, a) * v_triple(B, a, f, q)
    return tot


def count_nbr_characters(B: int, q: int = DEFAULT_Q, tol: float = 1e-6) -> CountReport:
    """(2/(q-1)) sum_{s in S} sum_chi chi(s) U_chi(B), rounded."""
    _check_q(q)
    t0 = time.perf_counter()
    tab = character_table(q)
    S = S_residues(q)
    total = 0j
    for j in range(tab.order):
        U = u_chi(B, q, j)
        total += sum(tab(j, s) for s in S) * U
    val = 2 * total / tab.order
    if abs(val.imag) > tol:
        raise NumericalInconsistency(f"imaginary part {val.imag} at B={B}, q={q}")
    count = round(val.real)
    if abs(val.real - count) > tol * max(1.0, abs(val.real)):
        raise NumericalInconsistency(f"non-integral total {val.real} at B={B}, q={q}")
    return CountReport(B, q, count, "characters", time.perf_counter() - t0,
                       meta={"residual": abs(val.real - count) + abs(val.imag)})


# ---------------------------------------------------------------------------
# locally soluble census


def _perm_count(t: tuple[int, int, int]) -> int:
    return len(set(permutations(t)))


def count_nloc(B: int, n: int = 1, threads: int = 1) -> CountReport:
    """Ordered indefinite triples (a, b, c) in [-B, B]^3, nonzero, with
    a x^2 + b y^2 + c z^2 = n soluble over R and every Z_p.

    Solubility is symmetric in the coefficients, so sorted triples are
    decided once and weighted by their number of distinct orderings.
    """
    if B < 1 or n == 0:
        raise ValueError("need B >= 1 and n != 0")
    t0 = time.perf_counter()
    vals = [v for v in range(-B, B + 1) if v]

    def block(firsts):
        s = 0
        for a in firsts:
            for b in vals:
                if b < a:
                    continue
                for c in vals:
                    if c < b:
                        continue
                    if (a > 0) == (c > 0):
                        continue  # sorted, so same sign at the ends means definite
                    if solvable_everywhere(QuadricInstance(a, b, c, n))[0]:
                        s += _perm_count((a, b, c))
        return s

    total = sum(_run_blocks(block, vals, threads))
    return CountReport(B, None, total, "nloc", time.perf_counter() - t0,
                       meta={"n": n, "ordered": True, "indefinite_only": True})


# ---------------------------------------------------------------------------
# triple decomposition


@dataclass(frozen=True)
class TripleDecomposition:
    n: int
    v1: int
    v2: int
    v3: int
    u12: int
    u13: int
    u23: int
    w12: int
    w13: int
    w21: int
    w23: int
    w31: int
    w32: int
    a1: int
    b1: int
    c1: int


def recompose_triple(T: TripleDecomposition) -> tuple[int, int, int]:
    a = T.v1 * T.u12 * T.u13 * T.w12 * T.w13 * T.w21**2 * T.w31**2 * T.a1**2
    b = T.v2 * T.u12 * T.u23 * T.w21 * T.w23 * T.w12**2 * T.w32**2 * T.b1**2
    c = T.v3 * T.u13 * T.u23 * T.w31 * T.w32 * T.w13**2 * T.w23**2 * T.c1**2
    return a, b, c


def decompose_triple(a: int, b: int, c: int, n: int = 1) -> TripleDecomposition:
    """Split (a, b, c) into the 2n-part v_i, the shared odd-valuation parts
    u_ij, the odd/even parts w_ij and squares.

    Raises NoDecomposition when an odd prime not dividing 2n has odd
    valuation in exactly one coordinate (the lemma's witness), or divides
    all three coordinates with some odd valuation (the construction then
    assigns it twice).
    """
    if 0 in (a, b, c) or n == 0:
        raise ValueError("a, b, c, n must be nonzero")
    coords = (a, b, c)
    v = [1 if x > 0 else -1 for x in coords]
    u = {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    w = {(i, j): 1 for i in range(3) for j in range(3) if i != j}
    primes = set()
    for x in coords:
        primes.update(factorize(x).primes)
    for p in sorted(primes):
        vals = [factorize(x).exponent(p) for x in coords]
        if (2 * n) % p == 0:
            for i in range(3):
                v[i] *= p ** vals[i]
            continue
        div = [i for i in range(3) if vals[i]]
        odd = [i for i in div if vals[i] % 2]
        if not odd:
            continue
        if len(div) == 1:
            raise NoDecomposition(f"{p} has odd valuation in one coordinate only", witness=p)
        if len(div) == 3:
            raise NoDecomposition(f"{p} divides all three coordinates with valuations {vals}")
        i, j = div
        if len(odd) == 2:
            u[(i, j)] *= p
        elif odd == [i]:
            w[(i, j)] *= p
        else:
            w[(j, i)] *= p
    T0 = dict(
        v1=v[0], v2=v[1], v3=v[2], u12=u[(0, 1)], u13=u[(0, 2)], u23=u[(1, 2)],
        w12=w[(0, 1)], w13=w[(0, 2)], w21=w[(1, 0)], w23=w[(1, 2)], w31=w[(2, 0)], w32=w[(2, 1)],
    )
    base = recompose_triple(TripleDecomposition(n=n, a1=1, b1=1, c1=1, **T0))
    sq = []
    for x, y in zip(coords, base):
        r = x // y
        s = math.isqrt(r)
        if x % y or s * s != r:
            raise ArithmeticError(f"cofactor of {x} is not a square")
        sq.append(s)
    return TripleDecomposition(n=n, a1=sq[0], b1=sq[1], c1=sq[2], **T0)


# ---------------------------------------------------------------------------
# the S and T sums


@lru_cache(maxsize=1 << 14)
def _delta_data(u: int):
    """None if u is not odd squarefree, else its prime factors."""
    if u % 2 == 0:
        return None
    if u == 1:
        return ()
    f = factorize(u)
    if any(e > 1 for _, e in f.pairs):
        return None
    return f.primes


def _delta(u: int, v: int) -> int:
    ps = _delta_data(u)
    if ps is None:
        return 0
    return int(all(jacobi(v, p) == 1 for p in ps))


def sum_S_direct(X: int, Y: int, Z: int, k: int, l: int, m: int, weighted: bool = False):
    """sum over u23 <= X, u13 <= Y, u12 <= Z of
    delta(u23; k u12 u13) delta(u13; l u12 u23) delta(u12; m u13 u23),
    optionally weighted by 1/(u12 u13 u23).  Exact."""
    if min(X, Y, Z) < 1 or 0 in (k, l, m):
        raise ValueError("bounds must be positive and k, l, m nonzero")
    total = Fraction(0) if weighted else 0
    for u23 in range(1, X + 1, 2):
        if _delta_data(u23) is None:
            continue
        for u13 in range(1, Y + 1, 2):
            if _delta_data(u13) is None:
                continue
            for u12 in range(1, Z + 1, 2):
                if _delta_data(u12) is None:
                    continue
                if (_delta(u23, k * u12 * u13) and _delta(u13, l * u12 * u23)
                        and _delta(u12, m * u13 * u23)):
                    total += Fraction(1, u12 * u13 * u23) if weighted else 1
    return total
