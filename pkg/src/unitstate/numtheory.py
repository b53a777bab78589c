"""Arithmetic functions and brute-force lattice point counts in dilated simplexes."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import geometry as geo
from . import lattice as lat


def factorize(k: int) -> dict[int, int]:
    if k < 1:
        raise ValueError(f"cannot factor {k}")
    out = {}
    p = 2
    while p * p <= k:
        while k % p == 0:
            out[p] = out.get(p, 0) + 1
            k //= p
        p += 1 if p == 2 else 2
    if k > 1:
        out[k] = out.get(k, 0) + 1
    return out


def divisors(k: int) -> list[int]:
    ds = [1]
    for p, e in factorize(k).items():
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def mobius(k: int) -> int:
    if k < 1:
        raise ValueError("the Mobius function is defined for k >= 1")
    f = factorize(k)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def jordan_phi(d: int, k: int) -> int:
    """Jordan's totient: k^d * prod_{p | k} (1 - p^-d)."""
    if d < 1 or k < 1:
        raise ValueError("jordan_phi needs d >= 1 and k >= 1")
    r = k**d
    for p in factorize(k):
        r = r // p**d * (p**d - 1)
    return r


def jordan_table(d: int, k: int) -> list[int]:
    """``[phi_d(0)=0, phi_d(1), ..., phi_d(k)]`` by a smallest-prime-factor sieve."""
    spf = list(range(k + 1))
    for p in range(2, math.isqrt(k) + 1):
        if spf[p] == p:
            for q in range(p * p, k + 1, p):
                if spf[q] == q:
                    spf[q] = p
    phi = [0] * (k + 1)
    if k >= 1:
        phi[1] = 1
    for t in range(2, k + 1):
        p = spf[t]
        r = t // p
        if r % p == 0:
            phi[t] = phi[r] * p**d
        else:
            phi[t] = phi[r] * (p**d - 1)
    return phi


def jordan_sum(d: int, k: int) -> int:
    """Summatory Jordan totient: sum_{t <= k} phi_d(t)."""
    if d < 1 or k < 1:
        raise ValueError("jordan_sum needs d >= 1 and k >= 1")
    return sum(jordan_table(d, k))


def zeta(s: float, terms: int = 2000) -> float:
    """Riemann zeta for real s > 1: partial sum plus Euler-Maclaurin tail.

    With the default number of terms the truncation error is far below 1e-12
    for s >= 2.
    """
    if s <= 1:
        raise ValueError("zeta(s) needs s > 1")
    N = terms
    head = math.fsum(n ** -s for n in range(1, N))
    tail = (
        N ** (1 - s) / (s - 1)
        + 0.5 * N**-s
        + s * N ** (-s - 1) / 12
        - s * (s + 1) * (s + 2) * N ** (-s - 3) / 720
    )
    return head + tail


# -- lattice points in dilates ------------------------------------------------


def _membership(S: geo.Simplex):
    """Integer data testing ``x in t*S``: ``gam @ x >= 0``, ``eqs @ x == 0``, ``sum(gam @ x) == t*D``."""
    verts = S.vertices
    if lat.rank(verts) != len(verts):
        raise ValueError(f"affine span of {S} passes through the origin")
    m = S.ambient
    coeff_forms = [lat.solve(verts, [Fraction(int(j == i)) for j in range(len(verts))]) for i in range(len(verts))]
    D = lat.denominator([x for f in coeff_forms for x in f])
    gam = [tuple(int(x * D) for x in f) for f in coeff_forms]
    eqs = lat.annihilator(verts, m) if len(verts) < m else []
    return gam, eqs, D


def _box(S: geo.Simplex, t: int):
    lo = [math.floor(min(v[i] for v in S.vertices) * t) for i in range(S.ambient)]
    hi = [math.ceil(max(v[i] for v in S.vertices) * t) for i in range(S.ambient)]
    return [range(a, b + 1) for a, b in zip(lo, hi)]


def lattice_points(S, t: int) -> list[tuple[int, ...]]:
    """Integer points of the dilate ``t*S`` by a bounding-box scan."""
    S = S if isinstance(S, geo.Simplex) else geo.Simplex(S)
    gam, eqs, D = _membership(S)
    out = []
    for x in product(*_box(S, t)):
        vals = [sum(a * b for a, b in zip(g, x)) for g in gam]
        if min(vals) < 0 or sum(vals) != t * D:
            continue
        if any(sum(a * b for a, b in zip(e, x)) for e in eqs):
            continue
        out.append(x)
    return out


@lru_cache(maxsize=4096)
def _ehrhart_cached(S: geo.Simplex, t: int) -> int:
    return len(lattice_points(S, t))


def ehrhart_count(S, t: int) -> int:
    S = S if isinstance(S, geo.Simplex) else geo.Simplex(S)
    return _ehrhart_cached(S, t)


def primitive_count(S, t: int) -> int:
    """Primitive integer points of ``t*S``, counted directly."""
    return sum(1 for x in lattice_points(S, t) if lat.gcd_vec(x) == 1)


def primitive_by_inversion(S, t: int) -> int:
    """Primitive points of ``t*S`` from the Ehrhart counts by Mobius inversion."""
    return sum(mobius(t // h) * ehrhart_count(S, h) for h in divisors(t))
