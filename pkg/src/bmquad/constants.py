"""Euler products and the main-term constants of the census.

Products are accumulated as sums of log1p terms with math.fsum, so a value
depends only on its inputs and the truncation P, not on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import factorize, is_prime, jacobi, primes_up_to

DEFAULT_P = 10**6


@dataclass(frozen=True)
class ConstantReport:
    name: str
    value: float
    truncation_prime: int
    error_estimate: float
    inputs: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = {"name": self.name, "value": self.value, "truncation_prime": self.truncation_prime,
               "error_estimate": self.error_estimate}
        rec.update(self.inputs)
        return rec


def _check_P(P: int) -> None:
    if P < 2:
        raise ValueError(f"truncation bound must be at least 2, got {P}")


def _check_q(q: int) -> None:
    if q % 8 != 1 or not is_prime(q):
        raise ValueError(f"q must be a prime congruent to 1 mod 8, got {q}")


@lru_cache(maxsize=8)
def _primes(P: int) -> np.ndarray:
    return primes_up_to(P).astype(np.float64)


@lru_cache(maxsize=8)
def _log_generic(P: int) -> float:
    # sum over p <= P of log(1 - 3/p^2 + 2/p^3) = log((1 - 1/p)^2 (1 + 2/p))
    p = _primes(P)
    return math.fsum((2 * np.log1p(-1 / p) + np.log1p(2 / p)).tolist())


def local_factor(p: int, i: int) -> float:
    """C_p = (1 - 1/p)^2 (1 + (2 - i)/p) for a prime dividing exactly i of a, b, c."""
    return (1 - 1 / p) ** 2 * (1 + (2 - i) / p)


def euler_C(a: int, b: int, c: int, P: int = DEFAULT_P) -> ConstantReport:
    """prod_p C_p, the density of pairwise coprime triples with (x,a) = (y,b)
    = (z,c) = 1.  The tail beyond P is at most sum_{p > P} 3/p^2 < 3/P in
    log, and primes of abc beyond P are included exactly."""
    _check_P(P)
    if 0 in (a, b, c):
        raise ValueError("a, b, c must be nonzero")
    special: dict[int, int] = {}
    for v in (a, b, c):
        if abs(v) > 1:
            for p in factorize(v).primes:
                special[p] = special.get(p, 0) + 1
    logs = [_log_generic(P)]
    for p, i in sorted(special.items()):
        if p <= P:
            logs.append(-math.log(local_factor(p, 0)))
        logs.append(math.log(local_factor(p, i)))
    value = math.exp(math.fsum(logs))
    err = value * math.expm1(3 / P)
    return ConstantReport("C", value, P, err, {"a": a, "b": b, "c": c})


def euler_C_f(f: int, q: int = 17, P: int = DEFAULT_P) -> ConstantReport:
    """C_f = (q+1)/(q+2) prod_{p | f} (1 + 2/p)^-1 prod_p (1 - 3/p^2 + 2/p^3)."""
    _check_P(P)
    _check_q(q)
    if f < 1:
        raise ValueError("f must be positive")
    fs = factorize(f) if f > 1 else None
    if fs is not None and any(e > 1 for _, e in fs.pairs):
        raise ValueError(f"f must be squarefree, got {f}")
    logs = [math.log((q + 1) / (q + 2)), _log_generic(P)]
    if fs is not None:
        logs += [-math.log1p(2 / p) for p in fs.primes]
    value = math.exp(math.fsum(logs))
    return ConstantReport("Cf", value, P, value * math.expm1(3 / P), {"f": f, "q": q})


def legendre_table(q: int) -> np.ndarray:
    """psi(r) = (r/q) for r = 0..q-1."""
    return np.array([0] + [jacobi(r, q) for r in range(1, q)], dtype=np.int64)


@lru_cache(maxsize=16)
def dirichlet_L1(q: int = 17, tol: float = 1e-8, periods: int | None = None) -> ConstantReport:
    """L(psi, 1) for psi = (./q) by summing complete periods.

    psi is even, so sum psi(r) = sum psi(r) r = 0 over a period and the
    k-th block sum_r psi(r)/(kq + r) is at most 1/(3 k^3).  The tail after
    K blocks is then at most 1/(6 (K - 1)^2).
    """
    _check_q(q)
    if periods is None:
        periods = int(math.ceil(1 / math.sqrt(6 * tol))) + 2
    K = periods
    psi = legendre_table(q)[1:].astype(np.float64)
    r = np.arange(1, q, dtype=np.float64)
    parts = []
    for k0 in range(0, K, 4096):
        k = np.arange(k0, min(K, k0 + 4096), dtype=np.float64)[:, None]
        parts.append(psi[None, :] / (k * q + r[None, :]))
    terms = np.concatenate([p.ravel() for p in parts])
    value = math.fsum(terms.tolist())
    err = 1 / (6 * (K - 1) ** 2)
    if value <= 0:
        raise ArithmeticError("L(psi, 1) must be positive")
    return ConstantReport("L1", value, K * q, err, {"q": q, "terms": K * q})


def _primes_with_psi(q: int, P: int, sign: int) -> np.ndarray:
    """Primes p <= P with (p/q) = sign, as floats."""
    p = primes_up_to(P)
    return p[legendre_table(q)[p % q] == sign].astype(np.float64)


@lru_cache(maxsize=16)
def constant_D(q: int = 17, P: int = DEFAULT_P) -> ConstantReport:
    """D = pi^(-1/2) (1 - 1/q)^(1/2) L(psi,1)^(1/2) prod_{psi(p) = -1} (1 - p^-2)^(1/2).

    This is the value at s = 1 of F(s) (s - 1)^(1/2) / Gamma(1/2) for
    F(s) = sum alpha(n) n^-s = (1 - q^-s)^(1/2) (zeta L)^(1/2) prod_inert (1 - p^-2s)^(1/2).
    """
    _check_P(P)
    _check_q(q)
    L = dirichlet_L1(q)
    inert = _primes_with_psi(q, P, -1)
    logs = [
        -0.5 * math.log(math.pi),
        0.5 * math.log1p(-1 / q),
        0.5 * math.log(L.value),
        math.fsum((0.5 * np.log1p(-1 / inert**2)).tolist()),
    ]
    value = math.exp(math.fsum(logs))
    rel = 1 / (2 * P) + L.error_estimate / (2 * L.value)
    return ConstantReport("D", value, P, value * rel, {"q": q, "L1": L.value})


@lru_cache(maxsize=16)
def constant_E(q: int = 17, P: int = DEFAULT_P) -> ConstantReport:
    """E = 2 C_1 D / q^(3/2) prod_{psi(p) = 1} (1 - 1/(p (p + 2)))."""
    C1 = euler_C_f(1, q, P)
    D = constant_D(q, P)
    split = _primes_with_psi(q, P, 1)
    logs = [
        math.log(2 * C1.value * D.value),
        -1.5 * math.log(q),
        math.fsum(np.log1p(-1 / (split * (split + 2))).tolist()),
    ]
    value = math.exp(math.fsum(logs))
    rel = C1.error_estimate / C1.value + D.error_estimate / D.value + 1 / P
    return ConstantReport("E", value, P, value * rel, {"q": q, "C1": C1.value, "D": D.value})
