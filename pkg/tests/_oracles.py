"""Brute-force reference implementations, deliberately independent of bmquad.

Nothing here imports the package; everything is trial division and
exhaustive enumeration so it can serve as a ground truth for small inputs.
"""

from fractions import Fraction
from math import gcd, isqrt


def prime_factors(n):
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n):
    return n > 1 and all(n % d for d in range(2, isqrt(n) + 1))


def squares_mod(m):
    return {x * x % m for x in range(m)}


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if a in squares_mod(p) else -1


def alpha(a, q):
    sq = squares_mod(q)
    return int(all(p % q in sq and p % q for p in prime_factors(a)))


def s_set(q):
    units = range(1, q)
    squares = {x * x % q for x in units}
    fourth = {pow(x, 4, q) for x in units}
    return sorted(squares - fourth)


def nbr_naive(B, q):
    """N' by the quadruple loop over (a, c, d, e)."""
    S = set(s_set(q))
    total = 0
    a = 1
    while q * q * a <= B:
        if alpha(a, q) and a % q in S:
            for c in range(1, isqrt(B // (q * q * a)) + 1):
                for d in range(1, isqrt(B // a) + 1):
                    if d % q == 0 or gcd(c, d) != 1:
                        continue
                    for e in range(1, isqrt(B // q) + 1):
                        if gcd(e, a) == 1 and gcd(c, e) == 1 and gcd(d, e) == 1:
                            total += 1
        a += 1
    return 2 * total


def coprime_count_naive(X, Y, Z, a, b, c):
    return sum(
        1
        for x in range(1, X + 1) if gcd(x, a) == 1
        for y in range(1, Y + 1) if gcd(y, b) == 1 and gcd(x, y) == 1
        for z in range(1, Z + 1) if gcd(z, c) == 1 and gcd(x, z) == 1 and gcd(y, z) == 1
    )


def delta_naive(u, v):
    if u % 2 == 0:
        return 0
    ps = prime_factors(u)
    prod = 1
    for p in ps:
        prod *= p
    if prod != u:
        return 0
    return int(all(legendre(v, p) == 1 for p in ps))


def sum_s_naive(X, Y, Z, k, l, m, weighted=False):
    tot = Fraction(0)
    for u23 in range(1, X + 1):
        for u13 in range(1, Y + 1):
            for u12 in range(1, Z + 1):
                if (delta_naive(u23, k * u12 * u13) and delta_naive(u13, l * u12 * u23)
                        and delta_naive(u12, m * u13 * u23)):
                    tot += Fraction(1, u12 * u13 * u23) if weighted else 1
    return tot


def represents_mod(coeffs, n, m):
    """Points of sum a_i x_i^2 = n modulo m, by exhaustion."""
    a, b, c = coeffs
    sq = [x * x % m for x in range(m)]
    return [(x, y, z) for x in range(m) for y in range(m) for z in range(m)
            if (a * sq[x] + b * sq[y] + c * sq[z] - n) % m == 0]


def hilbert_brute(u, v, p):
    """(u, v)_p for squarefree nonzero integers u, v, by searching primitive
    solutions of z^2 = u x^2 + v y^2 modulo p^k.

    With valuations at most 1 every primitive solution mod p^3 (odd p) or
    2^6 has a partial derivative of valuation at most (k - 1)/2, so it lifts.
    """
    k = 6 if p == 2 else 3
    m = p**k
    sq_all = {z * z % m for z in range(m)}
    sq_unit = {z * z % m for z in range(m) if z % p}
    for x in range(m):
        for y in range(m):
            t = (u * x * x + v * y * y) % m
            if t in (sq_all if (x % p or y % p) else sq_unit):
                return 1
    return -1


def abs_val(n, p):
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def divisor_sum_L(q, terms):
    """Partial sum of (r/q)/n over n <= terms, plain floats with Kahan summation."""
    sq = squares_mod(q)
    s = c = 0.0
    for n in range(1, terms + 1):
        r = n % q
        if r == 0:
            continue
        y = (1.0 if r in sq else -1.0) / n - c
        t = s + y
        c = (t - s) - y
        s = t
    return s
