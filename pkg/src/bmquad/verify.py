"""Self-checks runnable from the command line: identities and cross-route oracles."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .brauer import (
    REAL,
    brauer_decomposition,
    family_point,
    hilbert_symbol,
    invariant,
    relevant_places,
)
from .census import (
    CharacterTable,
    NoDecomposition,
    S_residues,
    beta_encoding,
    coprime_triple_count,
    count_nbr_characters,
    count_nbr_direct,
    count_nbr_mobius,
    decompose_triple,
    delta_rewrite,
    indicator_beta,
    indicator_delta,
    indicator_S,
    indicator_S_characters,
    recompose_triple,
    sum_S_direct,
)
from .local import (
    FamilyInstance,
    QuadricInstance,
    family_local_criterion,
    residue_search,
    solvable_by_reduction,
    solvable_at_prime,
    solvable_everywhere,
)


def _check(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"check": name, "passed": bool(ok), "detail": detail}


def _beta_identity():
    bad = [(x, y, z) for x, y, z in itertools.product(range(1, 13), repeat=3)
           if beta_encoding(x, y, z) != indicator_beta(x, y, z)]
    return not bad, f"{12**3} triples, {len(bad)} mismatches"


def _delta_identity():
    bad = [(u, v) for u in range(1, 61) for v in range(-30, 31)
           if v and delta_rewrite(u, v) != indicator_delta(u, v)]
    return not bad, f"{len(bad)} mismatches"


def _orthogonality():
    d = CharacterTable(17).orthogonality_defect()
    return d < 1e-9, f"max defect {d:.2e}"


def _s_set():
    S = S_residues(17)
    routes = all(abs(indicator_S_characters(a) - indicator_S(a)) < 1e-9 for a in range(-40, 41))
    return S == [2, 8, 9, 15] and routes, f"S = {S}"


def _sum_s_symmetry(rng):
    def run():
        for _ in range(20):
            X, Y, Z = (rng.randint(1, 9) for _ in range(3))
            k, l, m = (rng.choice([-1, 1]) * rng.randint(1, 12) for _ in range(3))
            base = sum_S_direct(X, Y, Z, k, l, m)
            if sum_S_direct(Y, X, Z, l, k, m) != base or sum_S_direct(Z, Y, X, m, l, k) != base:
                return False, f"asymmetric at {(X, Y, Z, k, l, m)}"
        return True, "20 random inputs"
    return run


def _roundtrip():
    count = 0
    for a, b, c in itertools.product(range(1, 21), repeat=3):
        for sa, sb, sc in ((1, 1, 1), (1, -1, 1)):
            t = (sa * a, sb * b, sc * c)
            try:
                dec = decompose_triple(*t, 1)
            except NoDecomposition:
                continue
            if recompose_triple(dec) != t:
                return False, f"round trip failed for {t}"
            count += 1
    return True, f"{count} decomposable triples"


def _product_formula(rng):
    def run():
        for _ in range(200):
            u = Fraction(rng.choice([-1, 1]) * rng.randint(1, 100), rng.randint(1, 100))
            v = Fraction(rng.choice([-1, 1]) * rng.randint(1, 100), rng.randint(1, 100))
            tot = sum(invariant(hilbert_symbol(u, v, p)) for p in relevant_places(u, v)) % 1
            if tot:
                return False, f"sum of invariants {tot} for {(u, v)}"
        return True, "200 random pairs"
    return run


def _family_decomposition():
    F = FamilyInstance(17, 2, 1, 1, 1)
    dec = brauer_decomposition(F.quadric(), family_point(F))
    want = (17, 1, 0, 0)
    ok = dec.identity_holds() and tuple(dec.l1.coeffs) == want and dec.independent()
    return ok and dec.d == 17, f"l1 = {dec.l1}, d = {dec.d}"


def identities(seed: int = 0) -> list[dict]:
    rng = random.Random(seed)
    return [
        _check("beta_encoding", _beta_identity),
        _check("delta_rewrite", _delta_identity),
        _check("character_orthogonality", _orthogonality),
        _check("s_set", _s_set),
        _check("sum_s_symmetry", _sum_s_symmetry(rng)),
        _check("decompose_roundtrip", _roundtrip),
        _check("hilbert_product_formula", _product_formula(rng)),
        _check("family_decomposition", _family_decomposition),
    ]


def _routes():
    for B in (578, 1000, 10**4):
        r = (count_nbr_direct(B).count, count_nbr_mobius(B).count, count_nbr_characters(B).count)
        if len(set(r)) != 1:
            return False, f"routes disagree at B={B}: {r}"
    return True, "B in (578, 1000, 10000)"


def _family_lemma():
    n = 0
    for a, c, d, e in itertools.product(range(1, 7), repeat=4):
        if math.gcd(c, d) > 1 or math.gcd(c, e) > 1 or math.gcd(d, e) > 1:
            continue
        F = FamilyInstance(17, a, c, d, e)
        n += 1
        if family_local_criterion(F) != solvable_everywhere(F.quadric())[0]:
            return False, f"mismatch at {F}"
    return True, f"{n} family instances"


def _local_deciders(rng):
    def run():
        for _ in range(300):
            Q = QuadricInstance(*(rng.choice([-1, 1]) * rng.randint(1, 40) for _ in range(4)))
            for p in Q.bad_primes():
                v = solvable_at_prime(Q, p).solvable
                if v != solvable_by_reduction(Q, p):
                    return False, f"peeling deciders disagree at {Q}, p={p}"
                if p <= 7 and v != residue_search(Q, p).solvable:
                    return False, f"residue search disagrees at {Q}, p={p}"
        return True, "300 random quadrics"
    return run


def _coprime_brute():
    for X, Y, Z, a, b, c in ((6, 7, 8, 1, 1, 1), (9, 5, 7, 2, 3, 5), (8, 8, 8, 6, 10, 15)):
        brute = sum(
            1
            for x in range(1, X + 1) if math.gcd(x, a) == 1
            for y in range(1, Y + 1) if math.gcd(y, b) == 1
            for z in range(1, Z + 1) if math.gcd(z, c) == 1
            if indicator_beta(x, y, z)
        )
        if brute != coprime_triple_count(X, Y, Z, a, b, c):
            return False, f"mismatch at {(X, Y, Z, a, b, c)}"
    return True, "3 parameter sets"


def oracles(seed: int = 0) -> list[dict]:
    rng = random.Random(seed)
    return [
        _check("route_equality", _routes),
        _check("family_lemma_vs_decider", _family_lemma),
        _check("local_deciders", _local_deciders(rng)),
        _check("coprime_count_brute_force", _coprime_brute),
    ]


SUITES = {"identities": identities, "oracles": oracles}


def run_suite(name: str, seed: int = 0) -> list[dict]:
    if name == "all":
        return identities(seed) + oracles(seed)
    return SUITES[name](seed)


__all__ = ["run_suite", "identities", "oracles", "REAL"]
