"""Compiled inner loops.  Everything here is integer arithmetic on int64 and
releases the GIL, so callers may run independent blocks in threads."""

from __future__ import annotations

import numpy as np
from numba import njit

MAXP = 64


@njit(cache=True, nogil=True)
def isqrt64(n):
    if n <= 0:
        return 0
    r = np.int64(np.sqrt(np.float64(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True, nogil=True)
def _merge(dst, k, src, ks):
    # append primes of src[:ks] to dst[:k] skipping duplicates
    for i in range(ks):
        p = src[i]
        seen = False
        for j in range(k):
            if dst[j] == p:
                seen = True
                break
        if not seen:
            dst[k] = p
            k += 1
    return k


@njit(cache=True, nogil=True)
def _signed_divisors(primes, k, limit, vals, signs):
    # squarefree divisors g of prod(primes[:k]) with g <= limit, with mu(g)
    vals[0] = 1
    signs[0] = 1
    m = 1
    for i in range(k):
        p = primes[i]
        cur = m
        for j in range(cur):
            g = vals[j] * p
            if g <= limit:
                vals[m] = g
                signs[m] = -signs[j]
                m += 1
    return m


@njit(cache=True, nogil=True)
def triple_count(X, Y, Z, pa, pb, pc, spf, mu):
    """#{x<=X, y<=Y, z<=Z pairwise coprime, (x,a)=(y,b)=(z,c)=1}.

    For fixed x the (y, z) pairs are counted by Mobius inversion over
    w = gcd(y, z):  sum_w mu(w) N_{bx}(Y/w) N_{cx}(Z/w), where N_m(t) counts
    integers up to t coprime to m.  spf and mu must cover max(X, Y, Z).
    """
    if X <= 0 or Y <= 0 or Z <= 0:
        return np.int64(0)
    W = min(Y, Z)
    px = np.empty(MAXP, np.int64)
    ly = np.empty(MAXP, np.int64)
    lz = np.empty(MAXP, np.int64)
    lw = np.empty(MAXP, np.int64)
    gy = np.empty(1 << 16, np.int64)
    sy = np.empty(1 << 16, np.int64)
    gz = np.empty(1 << 16, np.int64)
    sz = np.empty(1 << 16, np.int64)
    total = np.int64(0)
    for x in range(1, X + 1):
        ok = True
        for i in range(pa.shape[0]):
            if x % pa[i] == 0:
                ok = False
                break
        if not ok:
            continue
        kx = 0
        m = x
        while m > 1:
            p = spf[m]
            px[kx] = p
            kx += 1
            while m % p == 0:
                m //= p
        ky = _merge(ly, 0, pb, pb.shape[0])
        ky = _merge(ly, ky, px, kx)
        kz = _merge(lz, 0, pc, pc.shape[0])
        kz = _merge(lz, kz, px, kx)
        kw = _merge(lw, 0, ly, ky)
        kw = _merge(lw, kw, lz, kz)
        ny = _signed_divisors(ly, ky, Y, gy, sy)
        nz = _signed_divisors(lz, kz, Z, gz, sz)
        sub = np.int64(0)
        for w in range(1, W + 1):
            mw = mu[w]
            if mw == 0:
                continue
            good = True
            for i in range(kw):
                if w % lw[i] == 0:
                    good = False
                    break
            if not good:
                continue
            yw = Y // w
            zw = Z // w
            cy = np.int64(0)
            for i in range(ny):
                if gy[i] <= yw:
                    cy += sy[i] * (yw // gy[i])
            cz = np.int64(0)
            for i in range(nz):
                if gz[i] <= zw:
                    cz += sz[i] * (zw // gz[i])
            sub += mw * cy * cz
        total += sub
    return total


# ---------------------------------------------------------------------------
# factoring the values n - c t^2 for t = 0..N


@njit(cache=True, nogil=True)
def _powmod(b, e, m):
    r = np.int64(1)
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def _tonelli64(a, p):
    # square root of a mod odd prime p, or -1
    a %= p
    if a == 0:
        return np.int64(0)
    if _powmod(a, (p - 1) // 2, p) != 1:
        return np.int64(-1)
    if p % 4 == 3:
        return _powmod(a, (p + 1) // 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = np.int64(2)
    while _powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m = s
    c = _powmod(z, q, p)
    t = _powmod(a, q, p)
    r = _powmod(a, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = b * b % p
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


@njit(cache=True, nogil=True)
def _strip(res, fp, fe, cnt, t, p):
    e = 0
    while res[t] % p == 0:
        res[t] //= p
        e += 1
    if e:
        j = cnt[t]
        fp[t, j] = p
        fe[t, j] = e
        cnt[t] = j + 1


@njit(cache=True, nogil=True)
def quadratic_value_factors(n, c, N, primes):
    """Factor v_t = n - c t^2 for 0 <= t <= N.

    primes must contain every prime up to sqrt(max |v_t|).  Returns
    (sign, fp, fe, cnt) with v_t = sign[t] * prod fp[t,j]**fe[t,j]; sign 0
    marks v_t = 0.
    """
    sign = np.empty(N + 1, np.int64)
    res = np.empty(N + 1, np.int64)
    for t in range(N + 1):
        v = n - c * t * t
        sign[t] = 1 if v > 0 else (-1 if v < 0 else 0)
        res[t] = abs(v)
    fp = np.zeros((N + 1, 16), np.int64)
    fe = np.zeros((N + 1, 16), np.int64)
    cnt = np.zeros(N + 1, np.int64)
    for i in range(primes.shape[0]):
        p = primes[i]
        cm = c % p
        nm = n % p
        if cm == 0:
            if nm != 0:
                continue
            for t in range(N + 1):
                if res[t] != 0:
                    _strip(res, fp, fe, cnt, t, p)
            continue
        target = nm * _powmod(cm, p - 2, p) % p if p > 2 else nm * cm % 2
        if p == 2:
            r = target
        else:
            r = _tonelli64(target, p)
            if r < 0:
                continue
        nroots = 1 if (r == 0 or p == 2) else 2
        for h in range(nroots):
            t = r if h == 0 else p - r
            while t <= N:
                if res[t] != 0:
                    _strip(res, fp, fe, cnt, t, p)
                t += p
    for t in range(N + 1):
        if res[t] > 1:
            j = cnt[t]
            fp[t, j] = res[t]
            fe[t, j] = 1
            cnt[t] = j + 1
    return sign, fp, fe, cnt


@njit(cache=True, nogil=True)
def _key_less(x, y, z, bx, by, bz):
    ax = abs(x)
    abx = abs(bx)
    if ax != abx:
        return ax < abx
    if x != bx:
        return x < bx
    if y != by:
        return y < by
    return z < bz


@njit(cache=True, nogil=True)
def hyperbola_search(sign, fp, fe, cnt, cp_p, cp_e, g_p, g_e, c1, s1, i, j, k, N):
    """Minimal integral point via (c1 X - s1 Y)(c1 X + s1 Y) = c1 m / g.

    Here coordinate k is the free one (|t| <= N, m = n - c_k t^2, factored
    in sign/fp/fe/cnt), coordinates i, j carry the hyperbolic pair with
    c_i = g c1, -c_i c_j = (g s1)^2.  cp_*/g_* are the factorizations of
    |c1| and g.  Returns (found, x, y, z) minimal under (|x|, x, y, z).
    """
    L = (abs(c1) + abs(s1)) * N
    found = False
    best = np.zeros(3, np.int64)
    cur = np.zeros(3, np.int64)
    pr = np.empty(MAXP, np.int64)
    ex = np.empty(MAXP, np.int64)
    divs = np.empty(1 << 18, np.int64)
    for t in range(N + 1):
        if sign[t] == 0:
            # m = 0: c1 X = +-s1 Y, so X = s1 h, Y = +-|c1| h
            for h in range(-N, N + 1):
                X = s1 * h
                for sg in (-1, 1):
                    Y = sg * abs(c1) * h
                    if abs(X) > N or abs(Y) > N:
                        continue
                    for st in (-1, 1):
                        cur[i] = X
                        cur[j] = Y
                        cur[k] = st * t
                        if not found or _key_less(cur[0], cur[1], cur[2], best[0], best[1], best[2]):
                            found = True
                            best[:] = cur
            continue
        # factorization of |P| = |c1| m / g
        kp = 0
        for q in range(cnt[t]):
            pr[kp] = fp[t, q]
            ex[kp] = fe[t, q]
            kp += 1
        for q in range(cp_p.shape[0]):
            hit = False
            for r in range(kp):
                if pr[r] == cp_p[q]:
                    ex[r] += cp_e[q]
                    hit = True
            if not hit:
                pr[kp] = cp_p[q]
                ex[kp] = cp_e[q]
                kp += 1
        ok = True
        for q in range(g_p.shape[0]):
            hit = False
            for r in range(kp):
                if pr[r] == g_p[q]:
                    ex[r] -= g_e[q]
                    hit = True
                    if ex[r] < 0:
                        ok = False
            if not hit:
                ok = False
        if not ok:
            continue
        P = sign[t] * (1 if c1 > 0 else -1)
        for r in range(kp):
            for _ in range(ex[r]):
                P *= pr[r]
        absP = abs(P)
        # divisors of |P| up to L; larger ones violate the bound on u
        nd = 1
        divs[0] = 1
        for r in range(kp):
            cur_n = nd
            for q in range(cur_n):
                v = divs[q]
                for _ in range(ex[r]):
                    v *= pr[r]
                    if v > L:
                        break
                    divs[nd] = v
                    nd += 1
        for q in range(nd):
            dlt = divs[q]
            if absP // dlt > L:
                continue
            for su in (-1, 1):
                u = su * dlt
                w = P // u
                a2 = u + w
                b2 = w - u
                if a2 % (2 * c1) != 0 or b2 % (2 * s1) != 0:
                    continue
                X = a2 // (2 * c1)
                Y = b2 // (2 * s1)
                if abs(X) > N or abs(Y) > N:
                    continue
                for st in (-1, 1):
                    cur[i] = X
                    cur[j] = Y
                    cur[k] = st * t
                    if not found or _key_less(cur[0], cur[1], cur[2], best[0], best[1], best[2]):
                        found = True
                        best[:] = cur
    return found, best[0], best[1], best[2]


@njit(cache=True, nogil=True)
def scan_search(a, b, c, n, N):
    """Plain O(N^2) scan in (|x|, x, y, z) order, solving for z."""
    for ax in range(N + 1):
        for x in (-ax, ax):
            for y in range(-N, N + 1):
                rem = n - a * x * x - b * y * y
                if rem % c != 0:
                    continue
                z2 = rem // c
                if z2 < 0:
                    continue
                r = isqrt64(z2)
                if r * r == z2 and r <= N:
                    return True, x, y, -r
            if ax == 0:
                break
    return False, 0, 0, 0


@njit(cache=True, nogil=True)
def projective_scan(a, b, c, n, H):
    """First nonnegative (x, y, z, t) != 0 with a x^2 + b y^2 + c z^2 = n t^2,
    by increasing h = max(x, y, t) <= H."""
    for h in range(1, H + 1):
        for x in range(h + 1):
            for y in range(h + 1):
                t0 = 0 if (x == h or y == h) else h
                for t in range(t0, h + 1):
                    rem = n * t * t - a * x * x - b * y * y
                    if rem % c != 0:
                        continue
                    z2 = rem // c
                    if z2 < 0:
                        continue
                    r = isqrt64(z2)
                    if r * r == z2:
                        return True, x, y, r, t
    return False, 0, 0, 0, 0
