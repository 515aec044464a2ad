import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bmquad.arith import jacobi, moebius
from bmquad.census import (
    CharacterTable,
    NoDecomposition,
    S_residues,
    alpha_sieve,
    beta_encoding,
    beta_encoding_table,
    beta_table,
    coprime_triple_count,
    count_nbr_characters,
    count_nbr_direct,
    count_nbr_mobius,
    count_nloc,
    decompose_triple,
    delta_rewrite,
    indicator_alpha,
    indicator_beta,
    indicator_delta,
    indicator_epsilon,
    indicator_S,
    indicator_S_characters,
    recompose_triple,
    sum_S_direct,
    u_chi,
    u_chi_coefficients,
    v_triple,
)
from bmquad.local import QuadricInstance, residue_search, solvable_real

from _oracles import (
    alpha as alpha_naive,
    coprime_count_naive,
    delta_naive,
    nbr_naive,
    s_set,
    sum_s_naive,
)

# --- characters -------------------------------------------------------------


@pytest.mark.parametrize("q", [17, 41])
def test_character_table_invariants(q):
    T = CharacterTable(q)
    assert len(T) == q - 1
    assert T.orthogonality_defect() < 1e-9
    for r in range(1, q):
        assert abs(T(T.legendre, r) - jacobi(r, q)) < 1e-12
        assert abs(T(T.legendre, r) ** 2 - 1) < 1e-12
        assert T(T.principal, r) == 1
    for j in range(q - 1):
        for r in range(1, q):
            assert abs(T(T.conj(j), r) - T(j, r).conjugate()) < 1e-12
    assert T(3, q) == 0


def test_s_set():
    assert S_residues(17) == [2, 8, 9, 15]
    for q in (17, 41, 73, 89):
        S = S_residues(q)
        assert S == s_set(q)
        assert len(S) == (q - 1) // 4
        assert sorted((-s) % q for s in S) == S


def test_indicator_s_routes():
    assert indicator_S(2) == 1 and indicator_S(13) == 0 and indicator_S(17) == 0
    for a in range(-60, 60):
        assert abs(indicator_S_characters(a) - indicator_S(a)) < 1e-9


# --- indicators -------------------------------------------------------------


def test_alpha_examples_and_sieve():
    assert indicator_alpha(1) == 1 and indicator_alpha(13) == 1 and indicator_alpha(3) == 0
    sieve = alpha_sieve(3000)
    for a in range(1, 3001):
        assert sieve[a] == indicator_alpha(a) == alpha_naive(a, 17)


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_alpha_completely_multiplicative(a, b):
    assert indicator_alpha(a * b) == indicator_alpha(a) * indicator_alpha(b)


def test_beta_examples():
    assert indicator_beta(1, 1, 1) == 1
    assert indicator_beta(6, 10, 15) == 0
    assert indicator_beta(4, 9, 25) == 1 == beta_encoding(4, 9, 25)


def test_beta_tables():
    N = 40
    enc, direct = beta_encoding_table(N), beta_table(N)
    for x in range(1, N + 1):
        for y in range(1, N + 1):
            for z in range(1, N + 1):
                want = int(math.gcd(x, y) == math.gcd(x, z) == math.gcd(y, z) == 1)
                assert enc[x, y, z] == direct[x, y, z] == want


def test_epsilon_examples():
    assert indicator_epsilon(8, 1) == 1
    assert indicator_epsilon(6, 1) == 0
    assert indicator_epsilon(12, 3) == 1


def test_delta_examples_and_routes():
    assert indicator_delta(1, 5) == 1
    assert indicator_delta(3, 4) == 1
    assert indicator_delta(9, 2) == 0
    for u in range(1, 120):
        for v in range(-25, 26):
            if v:
                assert indicator_delta(u, v) == delta_naive(u, v)
                assert delta_rewrite(u, v) == indicator_delta(u, v)


# --- N' routes --------------------------------------------------------------


def test_small_b_counts_vanish():
    for B in (1, 289, 577):
        assert count_nbr_direct(B).count == 0
        assert count_nbr_characters(B).count == 0
        assert count_nbr_mobius(B).count == 0


@pytest.mark.parametrize("B", [578, 1000, 2000, 4913, 10**4])
def test_routes_match_naive_loop(B):
    want = nbr_naive(B, 17)
    assert count_nbr_direct(B).count == want
    assert count_nbr_mobius(B).count == want
    assert count_nbr_characters(B).count == want


def test_routes_other_q():
    for B in (2 * 41 * 41, 10**4, 3 * 10**4):
        want = nbr_naive(B, 41)
        assert count_nbr_direct(B, 41).count == want
        assert count_nbr_characters(B, 41).count == want


def test_thread_determinism():
    B = 3 * 10**5
    ref = count_nbr_direct(B, threads=1).count
    for t in (2, 4, 8):
        assert count_nbr_direct(B, threads=t).count == ref
        assert count_nbr_mobius(B, threads=t).count == ref


def _v_naive(B, a, f, q):
    n = 0
    for c in range(1, math.isqrt(B // (q * q * a * f)) + 1):
        if math.gcd(c, f) > 1:
            continue
        for d in range(1, math.isqrt(B // (a * f)) + 1):
            if math.gcd(d, q * f) > 1 or math.gcd(c, d) > 1:
                continue
            for e in range(1, math.isqrt(B // (q * f * f)) + 1):
                if math.gcd(c, e) == 1 and math.gcd(d, e) == 1:
                    n += 1
    return n


def test_v_triple_matches_loop():
    for B in (578, 5000, 20000):
        for a in range(1, 8):
            for f in range(1, 6):
                assert v_triple(B, a, f) == _v_naive(B, a, f, 17)


def test_u_chi_against_naive_sum():
    q, T = 17, CharacterTable(17)
    assert all(u_chi(1, q, j) == 0 for j in range(16))
    for B in (578, 5000, 20000):
        for j in range(q - 1):
            want = 0j
            f = 1
            while q * f * f <= B and q * q * f <= B:
                if moebius(f) and alpha_naive(f, q):
                    w = sum(T(j, a) * _v_naive(B, a, f, q)
                            for a in range(1, B // (q * q * f) + 1) if alpha_naive(a, q))
                    want += moebius(f) * T(j, f) * w
                f += 1
            got = u_chi(B, q, j)
            assert abs(got - want) < 1e-6 * max(1.0, abs(want))
            assert abs(u_chi(B, q, T.conj(j)) - got.conjugate()) < 1e-6 * max(1.0, abs(got))


def test_u_chi_exact_coefficients_real_characters():
    # principal and Legendre characters give integer values exactly
    for B in (10**4, 10**5):
        for j in (0, 8):
            coef = u_chi_coefficients(B, 17, j)
            val = sum(c * cmath.exp(2j * math.pi * k / 16) for k, c in enumerate(coef))
            assert abs(val.imag) < 1e-6
            assert all(c == 0 for k, c in enumerate(coef) if k not in (0, 8))


# --- N_loc ------------------------------------------------------------------


def _nloc_naive(B, n):
    tot = 0
    vals = [v for v in range(-B, B + 1) if v]
    for a in vals:
        for b in vals:
            for c in vals:
                Q = QuadricInstance(a, b, c, n)
                if not Q.indefinite or not solvable_real(Q):
                    continue
                if all(residue_search(Q, p).solvable for p in Q.bad_primes()):
                    tot += 1
    return tot


def test_nloc_small():
    assert count_nloc(1).count == _nloc_naive(1, 1) == 6
    assert count_nloc(2).count == _nloc_naive(2, 1)
    assert count_nloc(3, n=2).count == _nloc_naive(3, 2)
    assert count_nloc(2).count >= count_nloc(1).count


def test_nloc_threads():
    assert count_nloc(6, threads=3).count == count_nloc(6, threads=1).count


# --- coprime triples --------------------------------------------------------


def test_coprime_examples():
    assert coprime_triple_count(1, 1, 1) == 1
    assert coprime_triple_count(2, 2, 2) == 4 == coprime_count_naive(2, 2, 2, 1, 1, 1)


def test_coprime_random_against_naive():
    rng = random.Random(9)
    for _ in range(60):
        X, Y, Z = (rng.randint(1, 25) for _ in range(3))
        a, b, c = (rng.choice([-1, 1]) * rng.randint(1, 40) for _ in range(3))
        assert coprime_triple_count(X, Y, Z, a, b, c) == coprime_count_naive(X, Y, Z, a, b, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.integers(1, 60),
       st.integers(1, 50), st.integers(1, 50), st.integers(1, 50))
def test_coprime_permutation_symmetry(X, Y, Z, a, b, c):
    base = coprime_triple_count(X, Y, Z, a, b, c)
    assert coprime_triple_count(Y, X, Z, b, a, c) == base
    assert coprime_triple_count(Z, Y, X, c, b, a) == base
    assert coprime_triple_count(Y, Z, X, b, c, a) == base


# --- triple decomposition ---------------------------------------------------


def test_decompose_examples():
    T = decompose_triple(18, 1, 1, 1)
    assert (T.v1, T.a1) == (2, 3)
    assert (T.u12, T.u13, T.u23) == (1, 1, 1)
    assert (T.w12, T.w13, T.w21, T.w23, T.w31, T.w32) == (1,) * 6
    with pytest.raises(NoDecomposition) as err:
        decompose_triple(3, 1, 1, 1)
    assert err.value.witness == 3
    # 5 and 7 each divide one coordinate to an odd power
    with pytest.raises(NoDecomposition) as err:
        decompose_triple(18, 5, 7, 1)
    assert err.value.witness == 5
    T = decompose_triple(15, 21, 35, 1)
    assert (T.u12, T.u13, T.u23) == (3, 5, 7)
    assert (T.v1, T.v2, T.v3) == (1, 1, 1)


def _admissible(a, b, c, n):
    try:
        return decompose_triple(a, b, c, n)
    except NoDecomposition:
        return None


@settings(max_examples=400, deadline=None)
@given(st.integers(-3000, 3000).filter(bool), st.integers(-3000, 3000).filter(bool),
       st.integers(-3000, 3000).filter(bool), st.sampled_from([1, 2, 3, -5, 6]))
def test_decompose_roundtrip_and_invariants(a, b, c, n):
    T = _admissible(a, b, c, n)
    if T is None:
        return
    assert recompose_triple(T) == (a, b, c)
    for u in (T.u12, T.u13, T.u23):
        assert u % 2 and math.gcd(u, 2 * n) == 1 and moebius(u) != 0
    for v in (T.v1, T.v2, T.v3):
        m = abs(v)
        for p in range(2, m + 1):
            if m % p == 0 and all(p % r for r in range(2, p)):
                assert (2 * n) % p == 0


# --- S sums -----------------------------------------------------------------


def test_sum_s_examples():
    assert sum_S_direct(1, 1, 1, 3, -7, 11) == 1
    assert sum_S_direct(5, 5, 5, 1, 1, 1) == sum_s_naive(5, 5, 5, 1, 1, 1)
    assert sum_S_direct(3, 7, 11, 2, 3, 5) == sum_S_direct(7, 3, 11, 3, 2, 5)


def test_sum_s_against_naive():
    rng = random.Random(21)
    for _ in range(25):
        X, Y, Z = (rng.randint(1, 15) for _ in range(3))
        k, l, m = (rng.choice([-1, 1]) * rng.randint(1, 30) for _ in range(3))
        assert sum_S_direct(X, Y, Z, k, l, m) == sum_s_naive(X, Y, Z, k, l, m)
        w = sum_S_direct(X, Y, Z, k, l, m, weighted=True)
        assert isinstance(w, Fraction) and w == sum_s_naive(X, Y, Z, k, l, m, weighted=True)


def test_counts_monotone_in_b():
    prev = -1
    for B in range(500, 40001, 1500):
        c = count_nbr_direct(B).count
        assert c >= prev
        prev = c
