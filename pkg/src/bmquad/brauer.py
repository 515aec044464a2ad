"""Quaternion classes on affine quadric surfaces and their local invariants.

For X: a x^2 + b y^2 + c z^2 = n with a rational point M on the projective
closure, the form splits as

    a x^2 + b y^2 + c z^2 - n t^2 = l1 l2 + c0 (l3^2 - d l4^2)

with l1 the tangent form at M.  The class (l1 / t, d) generates the
quotient of the Brauer group by constants when d = -abcn is not a square.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .arith import (
    factorize,
    is_prime,
    jacobi,
    power_residue_class,
    primes_up_to,
    split_valuation,
    sqrt_mod,
    squarefree_kernel,
    ResidueClass,
)
from .local import REAL, FamilyInstance, QuadricInstance, family_local_criterion

HALF = Fraction(1, 2)
ZERO = Fraction(0)


class NoNontrivialClass(ValueError):
    """-abcn is a square, so the Brauer group has no nonconstant class."""


class ChartFailure(ArithmeticError):
    """Both l1 and l2 vanish at the point."""


class PreconditionError(ValueError):
    pass


class Obstruction(enum.Enum):
    OBSTRUCTED = "obstructed"
    NO_OBSTRUCTION = "no_obstruction"


# ---------------------------------------------------------------------------
# Hilbert symbols


def _as_int_class(u) -> int:
    """An integer in the same square class as the nonzero rational u."""
    u = Fraction(u)
    if u == 0:
        raise ValueError("Hilbert symbol arguments must be nonzero")
    return u.numerator * u.denominator


def hilbert_symbol(u, v, place) -> int:
    """(u, v)_place for nonzero rationals; place is a prime or REAL."""
    u, v = _as_int_class(u), _as_int_class(v)
    if place == REAL:
        return -1 if (u < 0 and v < 0) else 1
    p = place
    a, u1 = split_valuation(u, p)
    b, v1 = split_valuation(v, p)
    if p == 2:
        eps_u = ((u1 - 1) // 2) % 2
        eps_v = ((v1 - 1) // 2) % 2
        om_u = ((u1 * u1 - 1) // 8) % 2
        om_v = ((v1 * v1 - 1) // 8) % 2
        e = eps_u * eps_v + a * om_v + b * om_u
        return -1 if e % 2 else 1
    sign = -1 if (a * b * ((p - 1) // 2)) % 2 else 1
    s = sign
    if b % 2:
        s *= jacobi(u1, p)
    if a % 2:
        s *= jacobi(v1, p)
    return s


def invariant(symbol: int) -> Fraction:
    """inv of a quaternion class from its Hilbert symbol: +1 -> 0, -1 -> 1/2."""
    return ZERO if symbol == 1 else HALF


def relevant_places(*values) -> list:
    """REAL plus 2 and every prime dividing a numerator or denominator."""
    ps = {2}
    for v in values:
        v = Fraction(v)
        for m in (v.numerator, v.denominator):
            if abs(m) > 1:
                ps.update(factorize(m).primes)
    return [REAL] + sorted(ps)


# ---------------------------------------------------------------------------
# linear forms and the decomposition


def _primitive(vec) -> tuple[Fraction, tuple[int, ...]]:
    """Write a nonzero rational vector as scale * primitive integer vector
    whose first nonzero entry is positive."""
    vec = [Fraction(x) for x in vec]
    den = math.lcm(*(x.denominator for x in vec))
    ints = [int(x * den) for x in vec]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero linear form")
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return Fraction(g, den), tuple(x // g for x in ints)


@dataclass(frozen=True)
class LinearForm:
    """Coefficients on (x, y, z, t)."""

    coeffs: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if len(self.coeffs) != 4 or not any(self.coeffs):
            raise ValueError("a linear form needs four coefficients, not all zero")

    def __call__(self, x, y, z, t=1):
        a, b, c, d = self.coeffs
        return a * x + b * y + c * z + d * t

    def scaled(self, r) -> "LinearForm":
        return LinearForm(tuple(Fraction(r) * c for c in self.coeffs))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __str__(self):
        names = ("x", "y", "z", "t")
        parts = [f"{c}*{v}" for c, v in zip(self.coeffs, names) if c]
        return " + ".join(parts)


@dataclass(frozen=True)
class ProjectivePoint:
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if len(self.coords) != 4 or not any(self.coords):
            raise ValueError("projective point needs four coordinates, not all zero")

    def on(self, Q: QuadricInstance) -> bool:
        x, y, z, t = self.coords
        return Q.a * x * x + Q.b * y * y + Q.c * z * z - Q.n * t * t == 0


@dataclass(frozen=True)
class BrauerDecomposition:
    quadric: QuadricInstance
    point: ProjectivePoint
    l1: LinearForm
    l2: LinearForm
    l3: LinearForm
    l4: LinearForm
    c0: Fraction
    d: int

    def expanded(self) -> dict[tuple[int, int], Fraction]:
        """Coefficients of l1 l2 + c0 (l3^2 - d l4^2) as a symmetric table
        keyed by index pairs (i <= j)."""
        out: dict[tuple[int, int], Fraction] = {}

        def add(u, v, w):
            for i in range(4):
                for j in range(4):
                    key = (min(i, j), max(i, j))
                    out[key] = out.get(key, ZERO) + w * u[i] * v[j]

        add(self.l1.coeffs, self.l2.coeffs, Fraction(1))
        add(self.l3.coeffs, self.l3.coeffs, self.c0)
        add(self.l4.coeffs, self.l4.coeffs, -self.c0 * self.d)
        return out

    def identity_holds(self) -> bool:
        Q = self.quadric
        diag = (Q.a, Q.b, Q.c, -Q.n)
        exp = self.expanded()
        for i in range(4):
            for j in range(i, 4):
                want = diag[i] if i == j else 0
                if exp.get((i, j), ZERO) != want:
                    return False
        return True

    def independent(self) -> bool:
        rows = [list(f.coeffs) for f in (self.l1, self.l2, self.l3, self.l4)]
        return _rank(rows) == 4


def _rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank, col, ncol = 0, 0, len(m[0])
    while rank < len(m) and col < ncol:
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _nullspace(rows) -> list[list[Fraction]]:
    """Basis of the rational nullspace of a matrix given by rows."""
    m = [list(map(Fraction, r)) for r in rows]
    ncol = len(m[0])
    pivots = []
    r = 0
    for col in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncol) if c not in pivots]
    basis = []
    for fcol in free:
        v = [ZERO] * ncol
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fcol]
        basis.append(v)
    return basis


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def brauer_decomposition(
    Q: QuadricInstance, M: ProjectivePoint, require_nontrivial: bool = True
) -> BrauerDecomposition:
    """Split the quaternary form through a hyperbolic pair at M.

    e1 = M; e2 = e_j - F(e_j)/(2 B(M, e_j)) M for the first basis vector
    e_j off the tangent hyperplane; W = <e1, e2>^perp is diagonalized as
    alpha s3^2 + beta s4^2.  Then F = (2/h) B(., e1) B(., e2) + ... with
    h = B(e1, e2).
    """
    if not M.on(Q):
        raise ValueError(f"{M.coords} does not lie on {Q}")
    d = squarefree_kernel(-Q.a * Q.b * Q.c * Q.n)
    if d == 1 and require_nontrivial:
        raise NoNontrivialClass(f"-abcn is a square for {Q}")
    G = (Fraction(Q.a), Fraction(Q.b), Fraction(Q.c), Fraction(-Q.n))

    def bil(u, v):
        return sum(g * x * y for g, x, y in zip(G, u, v))

    e1 = list(M.coords)
    ge1 = [g * x for g, x in zip(G, e1)]
    j = next(i for i in range(4) if ge1[i])
    ej = [Fraction(int(i == j)) for i in range(4)]
    lam = -bil(ej, ej) / (2 * bil(e1, ej))
    e2 = [a + lam * b for a, b in zip(ej, e1)]
    h = bil(e1, e2)
    ge2 = [g * x for g, x in zip(G, e2)]
    u, v = _nullspace([ge1, ge2])
    # W is anisotropic unless d is a square; then pick a non-isotropic w3
    w3 = next(w for w in (u, v, [x + y for x, y in zip(u, v)]) if bil(w, w))
    w4 = v if w3 is u else u
    alpha = bil(w3, w3)
    w4 = [a - bil(w3, w4) / alpha * b for a, b in zip(w4, w3)]
    beta = bil(w4, w4)

    # F = (2/h) l1 l2' + alpha s3^2 + beta s4^2
    l1_raw = ge1
    l2_raw = [2 / h * x for x in ge2]
    s3 = [g * x / alpha for g, x in zip(G, w3)]
    s4 = [g * x / beta for g, x in zip(G, w4)]
    # alpha s3^2 + beta s4^2 = alpha (s3^2 - d (r s4)^2) with r^2 = -beta / (alpha d)
    r = _rational_sqrt(-beta / (alpha * d))
    if r is None:
        raise ArithmeticError("complement discriminant does not match -abcn")

    k1, l1 = _primitive(l1_raw)
    l2 = [k1 * x for x in l2_raw]
    k3, l3 = _primitive(s3)
    c0 = alpha * k3 * k3
    l4 = [r * x / k3 for x in s4]
    if next(x for x in l4 if x) < 0:
        l4 = [-x for x in l4]
    dec = BrauerDecomposition(
        Q, M, LinearForm(l1), LinearForm(l2), LinearForm(l3), LinearForm(l4), c0, d
    )
    if not dec.identity_holds():
        raise ArithmeticError(f"decomposition identity failed for {Q}")
    return dec


def family_point(F: FamilyInstance) -> ProjectivePoint:
    """The point (d : -qc : 0 : 0) on the closure of the family surface."""
    return ProjectivePoint((F.d, -F.q * F.c, 0, 0))


def _is_local_square(u: int, place) -> bool:
    if place == REAL:
        return u > 0
    v, w = split_valuation(u, place)
    if v % 2:
        return False
    return w % 8 == 1 if place == 2 else jacobi(w, place) == 1


def has_rational_point(Q: QuadricInstance) -> bool:
    """Whether a x^2 + b y^2 + c z^2 - n t^2 has a nontrivial rational zero.

    By Hasse-Minkowski it suffices to check every place.  A rank-4 form over
    Q_p is anisotropic exactly when its discriminant is a square and its
    Hasse invariant differs from (-1, -1)_p.
    """
    cs = (Q.a, Q.b, Q.c, -Q.n)
    disc = Q.a * Q.b * Q.c * -Q.n
    for place in relevant_places(*cs):
        if not _is_local_square(disc, place):
            continue
        hasse = 1
        for i in range(4):
            for j in range(i + 1, 4):
                hasse *= hilbert_symbol(cs[i], cs[j], place)
        if hasse != hilbert_symbol(-1, -1, place):
            return False
    return True


def find_rational_point(Q: QuadricInstance, height: int = 1000) -> ProjectivePoint | None:
    """First point of a x^2 + b y^2 + c z^2 = n t^2 found with nonnegative
    coordinates, scanning max(x, y, t) = 1, 2, ... up to height.  Returns
    None at once when no rational point exists."""
    if not has_rational_point(Q):
        return None
    found, x, y, z, t = _kernels.projective_scan(
        np.int64(Q.a), np.int64(Q.b), np.int64(Q.c), np.int64(Q.n), height
    )
    if not found:
        return None
    return ProjectivePoint((int(x), int(y), int(z), int(t)))


# ---------------------------------------------------------------------------
# local evaluation


def _l1_at(dec: BrauerDecomposition, pt) -> Fraction:
    return dec.l1(*pt)


def evaluate_invariant(dec: BrauerDecomposition, point, place) -> Fraction:
    """inv_place of (l1/t, d) at an affine point.

    point is a rational triple, or for a prime place an integer triple
    approximating a Z_p-point closely enough to fix the square class of l1
    (see LocalPoint.evaluate for automatic precision control).  Falls back
    to the l2 chart, where the class is (-c0, d)(l2/t, d).
    """
    v1 = _l1_at(dec, point)
    if v1 != 0:
        return invariant(hilbert_symbol(v1, dec.d, place))
    v2 = dec.l2(*point)
    if v2 == 0:
        raise ChartFailure(f"l1 and l2 both vanish at {point}")
    return invariant(hilbert_symbol(-dec.c0, dec.d, place) * hilbert_symbol(v2, dec.d, place))


def evaluate_invariant_l2(dec: BrauerDecomposition, point, place) -> Fraction:
    v2 = dec.l2(*point)
    if v2 == 0:
        raise ChartFailure(f"l2 vanishes at {point}")
    return invariant(hilbert_symbol(-dec.c0, dec.d, place) * hilbert_symbol(v2, dec.d, place))


def _fp_val(x: Fraction, p: int) -> int:
    return split_valuation(x.numerator, p)[0] - split_valuation(x.denominator, p)[0]


def hensel_lift(Q: QuadricInstance, p: int, point, k: int, K: int) -> tuple[int, int, int]:
    """Lift a Hensel witness mod p**k to a solution mod p**K (K >= k).

    Newton steps on the coordinate whose partial derivative has the least
    valuation m; each step at least doubles v(f) - 2m.
    """
    mod = p**K
    pt = [int(c) % mod for c in point]
    coeffs = Q.coeffs
    grads = [2 * a * x for a, x in zip(coeffs, pt)]
    vals = [split_valuation(g, p)[0] if g % p**k else k for g in grads]
    j = min(range(3), key=lambda i: vals[i])
    m = vals[j]
    if 2 * m + 1 > k:
        raise ValueError("point is not a Hensel witness")
    for _ in range(4 * K + 8):
        f = (sum(a * x * x for a, x in zip(coeffs, pt)) - Q.n) % mod
        if f == 0:
            return tuple(pt)
        g = 2 * coeffs[j] * pt[j]
        vg, ug = split_valuation(g, p)
        vf, uf = split_valuation(f, p)
        # x_j <- x_j - f / g
        step = p ** (vf - vg) * uf * pow(ug, -1, mod)
        pt[j] = (pt[j] - step) % mod
    raise ArithmeticError("Hensel iteration did not converge")


@dataclass(frozen=True)
class LocalPoint:
    """A Z_p-point given by a Hensel witness mod p**k."""

    quadric: QuadricInstance
    p: int
    witness: tuple[int, int, int]
    k: int

    def approx(self, K: int) -> tuple[int, int, int]:
        return hensel_lift(self.quadric, self.p, self.witness, self.k, max(K, self.k))

    def evaluate(self, dec: BrauerDecomposition, chart: int | None = None, max_precision: int = 60) -> Fraction:
        """Invariant at p with precision escalation.

        The square class of l(P) is fixed by l(P) mod p**(v(l(P)) + 3); an
        approximation mod p**K moves l(P) by at most p**(K - k) times the
        denominators of l, so K is raised until the margin is safe.  With
        chart None the l1 chart is tried first, then l2.
        """
        if chart is None:
            try:
                return self.evaluate(dec, 1, max_precision)
            except ChartFailure:
                return self.evaluate(dec, 2, max_precision)
        p = self.p
        form = dec.l1 if chart == 1 else dec.l2
        den_v = max(split_valuation(c.denominator, p)[0] for c in form.coeffs)
        K = 3
        while K <= max_precision:
            pt = self.approx(K)
            val = form(*pt)
            if val != 0:
                v = _fp_val(val, p)
                if v + 3 <= K - self.k - den_v:
                    if chart == 1:
                        return invariant(hilbert_symbol(val, dec.d, p))
                    return invariant(
                        hilbert_symbol(-dec.c0, dec.d, p) * hilbert_symbol(val, dec.d, p)
                    )
            K += 2
        raise ChartFailure(f"chart l{chart} vanishes to precision p^{max_precision}")


def sample_local_points(
    Q: QuadricInstance, p: int, count: int, seed: int = 0, k: int = 3, avoid=None
) -> list[LocalPoint]:
    """Random Hensel witnesses mod p**k: two coordinates at random, the
    third solved by a square root (on a coordinate with unit coefficient).

    With avoid set to a decomposition, witnesses where both l1 and l2 are
    divisible by p**k are skipped (they may sit on the locus l1 = l2 = 0).
    """
    rng = random.Random(seed * 1_000_003 + p)
    mod = p**k
    units = [i for i, a in enumerate(Q.coeffs) if a % p]
    if not units:
        raise ValueError(f"no unit coefficient at p={p}")
    out: list[LocalPoint] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 10_000 * count:
            raise RuntimeError(f"could not sample points of {Q} at p={p}")
        j = units[rng.randrange(len(units))]
        pt = [rng.randrange(mod) for _ in range(3)]
        rest = Q.n - sum(Q.coeffs[i] * pt[i] ** 2 for i in range(3) if i != j)
        r = sqrt_mod(rest * pow(Q.coeffs[j], -1, mod) % mod, p, k)
        if r is None:
            continue
        pt[j] = r
        grads = [2 * a * x % mod for a, x in zip(Q.coeffs, pt)]
        m = min(split_valuation(g, p)[0] if g else k for g in grads)
        if 2 * m + 1 > k:
            continue
        if avoid is not None and all(
            _fp_val(f(*pt), p) >= k if f(*pt) else True for f in (avoid.l1, avoid.l2)
        ):
            continue
        out.append(LocalPoint(Q, p, tuple(pt), k))
    return out


# ---------------------------------------------------------------------------
# the family


def family_invariant_profile(F: FamilyInstance) -> dict:
    """Closed-form local invariants of (qcx + dy, q) on the family surface.

    Keys are REAL and the primes dividing 2 a c d e q; every other place
    has invariant 0 as well.
    """
    if not family_local_criterion(F):
        raise PreconditionError(f"{F} is not locally solvable")
    ps = {2, F.q}
    for v in (F.a, F.c, F.d, F.e):
        if abs(v) > 1:
            ps.update(factorize(v).primes)
    prof: dict = {REAL: ZERO}
    for p in sorted(ps):
        prof[p] = ZERO
    if power_residue_class(F.a, F.q) == ResidueClass.SQUARE_NOT_FOURTH:
        prof[F.q] = HALF
    return prof


def obstruction_decision(F: FamilyInstance) -> Obstruction:
    prof = family_invariant_profile(F)
    total = sum(prof.values(), ZERO) % 1
    return Obstruction.OBSTRUCTED if total else Obstruction.NO_OBSTRUCTION


def no_obstruction_witness(Q: QuadricInstance) -> int | None:
    """Smallest odd prime p with v_p of one coefficient odd and p not
    dividing the other two coefficients or n."""
    cs = Q.coeffs
    best = None
    for i in range(3):
        others = [cs[j] for j in range(3) if j != i] + [Q.n]
        for p, e in factorize(cs[i]).pairs:
            if p == 2 or e % 2 == 0:
                continue
            if any(o % p == 0 for o in others):
                continue
            if best is None or p < best:
                best = p
    return best


# ---------------------------------------------------------------------------
# integral points


INT64_SAFE = 1 << 62


@lru_cache(maxsize=8)
def _sieve_primes(limit: int) -> np.ndarray:
    return primes_up_to(limit)


@lru_cache(maxsize=4)
def _value_factors(ck: int, n: int, N: int):
    top = abs(n) + abs(ck) * N * N
    primes = _sieve_primes(math.isqrt(top) + 1)
    return _kernels.quadratic_value_factors(np.int64(n), np.int64(ck), N, primes)


def _factor_arrays(m: int):
    if m == 1:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    f = factorize(m)
    return (
        np.array([p for p, _ in f.pairs], dtype=np.int64),
        np.array([e for _, e in f.pairs], dtype=np.int64),
    )


def hyperbolic_pair(Q: QuadricInstance):
    """First (i, j) with c_i c_j < 0 and -c_i c_j a square, or None."""
    cs = Q.coeffs
    for i in range(3):
        for j in range(3):
            if i != j and cs[i] * cs[j] < 0:
                s = math.isqrt(-cs[i] * cs[j])
                if s * s == -cs[i] * cs[j]:
                    return i, j, s
    return None


def integral_point_search(Q: QuadricInstance, bound: int) -> tuple[int, int, int] | None:
    """The least integral point with max(|x|,|y|,|z|) <= bound under the
    order (|x|, x, y, z), or None.

    When two coefficients satisfy -c_i c_j = s^2 the equation factors as
    (c' X - s' Y)(c' X + s' Y) = c' m / g over each value of the third
    coordinate, and points come from divisor pairs; otherwise a direct
    scan over (x, y) is used.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    cs = Q.coeffs
    pair = hyperbolic_pair(Q)
    hyper = False
    if pair is not None:
        i, j, s = pair
        k = 3 - i - j
        g = math.gcd(abs(cs[i]), s)
        c1, s1 = cs[i] // g, s // g
        # the kernel forms |c1| m / g with |m| <= |n| + |c_k| N^2
        hyper = abs(c1) * (abs(Q.n) + abs(cs[k]) * bound * bound) < INT64_SAFE
    top_m = abs(Q.n) + max(abs(c) for c in cs) * bound * bound
    if hyper:
        sign, fp, fe, cnt = _value_factors(cs[k], Q.n, bound)
        cp_p, cp_e = _factor_arrays(abs(c1))
        g_p, g_e = _factor_arrays(g)
        found, x, y, z = _kernels.hyperbola_search(
            sign, fp, fe, cnt, cp_p, cp_e, g_p, g_e, np.int64(c1), np.int64(s1), i, j, k, bound
        )
    else:
        if top_m >= INT64_SAFE:
            raise ValueError("search bound too large for 64-bit arithmetic")
        found, x, y, z = _kernels.scan_search(
            np.int64(Q.a), np.int64(Q.b), np.int64(Q.c), np.int64(Q.n), bound
        )
    if not found:
        return None
    pt = (int(x), int(y), int(z))
    if Q(*pt) != 0:
        raise ArithmeticError(f"search returned a non-solution {pt} for {Q}")
    return pt
