import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from unitstate import lattice as lat

from conftest import S1, S3


def test_denominator_examples():
    assert lat.denominator((F(1, 2), F(1, 2), 1)) == 2
    assert lat.denominator((F(2, 7), F(1, 7), 1)) == 7
    assert lat.denominator((3, -4, 0)) == 1


def test_is_primitive():
    assert lat.is_primitive((1, 2))
    assert not lat.is_primitive((2, 4))
    assert lat.is_primitive((0, 1))
    with pytest.raises(ValueError, match="undefined gcd normalization"):
        lat.is_primitive((0, 0))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@given(st.lists(rationals, min_size=1, max_size=4).filter(lambda w: any(w)))
def test_denominator_clears_and_is_primitive(w):
    b = lat.denominator(w)
    v = [x * b for x in w]
    assert all(x.denominator == 1 for x in v)
    g = lat.gcd_vec([int(x) for x in v])
    prim = lat.primitive_of(w)
    assert lat.is_primitive(prim) and tuple(int(x) // g for x in v) == prim
    # b*w itself is primitive exactly when the reduced numerators are coprime
    assert lat.is_primitive([int(x) for x in v]) == (g == 1)
    assert all(any((x * k).denominator != 1 for x in w) for k in range(1, b))


def _is_column_hnf(H):
    cols = list(zip(*H))
    last = -1
    seen_zero = False
    for c in cols:
        nz = [i for i, x in enumerate(c) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        piv = nz[0]
        if piv <= last or c[piv] <= 0:
            return False
        last = piv
    return True


def _check_hnf(A):
    H, U = lat.hnf(A)
    assert lat.matmul(A, U) == H
    assert abs(lat.det(U)) == 1
    assert _is_column_hnf(H)
    assert lat.same_lattice(lat.transpose(A), lat.transpose(H))
    return H, U


def test_hnf_identity():
    H, U = lat.hnf(lat.identity(3))
    assert H == lat.identity(3) and U == lat.identity(3)


def test_hnf_defining_relations():
    _check_hnf(((2, 4), (6, 8)))


def test_hnf_permutation():
    H, _ = _check_hnf(((0, 1), (1, 0)))
    assert H == ((1, 0), (0, 1))


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
def test_hnf_random(A):
    if not any(any(r) for r in A):
        return
    _check_hnf(A)


def test_lattice_basis_paper_module():
    B = lat.lattice_basis([(0, 0, 1), (2, 1, 0)])
    assert lat.same_lattice(B, [(0, 0, 1), (2, 1, 0)])


def test_lattice_basis_full_space():
    B = lat.lattice_basis([(1, 0, 0), (F(1, 2), 3, 0), (0, 7, F(2, 3))])
    assert len(B) == 3 and abs(lat.det(B)) == 1


def test_lattice_basis_line():
    # shortest nonzero integer point on the line by brute force
    pts = [(a, b) for a in range(-10, 11) for b in range(-10, 11) if (a, b) != (0, 0) and 2 * a == b]
    best = min(pts, key=lambda p: p[0] ** 2 + p[1] ** 2)
    B = lat.lattice_basis([(F(1, 2), 1)])
    assert len(B) == 1 and lat.same_lattice(B, [best])


def test_lattice_basis_empty():
    assert lat.lattice_basis([(0, 0, 0)]) == []


def test_lattice_basis_random_combinations():
    rng = random.Random(7)
    for _ in range(5):
        gens = [tuple(rng.randint(-4, 4) for _ in range(4)) for _ in range(2)]
        if lat.rank(gens) < 2:
            continue
        V = [tuple(F(x, k) for x in g) for g, k in zip(gens, (rng.randint(1, 5), rng.randint(1, 5)))]
        B = lat.lattice_basis(V, 4)
        cols = lat.transpose(B)
        for _ in range(100):
            a, b = rng.randint(-6, 6), rng.randint(-6, 6)
            q = tuple(a * x + b * y for x, y in zip(*gens))
            c = lat.solve(cols, q)
            assert c is not None and all(x.denominator == 1 for x in c)


def test_span_index_examples():
    assert lat.span_index(S1[0], [lat.vsub(v, S1[0]) for v in S1[1:]]) == 1
    assert lat.span_index(S3[0], [lat.vsub(S3[1], S3[0])]) == 3
    assert lat.span_index((2, -1, 5), [(F(1, 3), 1, 0)]) == 1


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _brute_hits(p0, dirs, k):
    """Does k*(p0 + span(dirs)) meet Z^3?  Exhaustive over a box that must contain a hit if one exists."""
    R = int(max(abs(x) for x in p0) * k) + 1 + sum(max(abs(x) for x in d) for d in dirs)
    if dirs and len(dirs) == 2:
        normals = [_cross(*dirs)]
    elif dirs:
        cands = [n for n in (_cross(dirs[0], e) for e in lat.identity(3)) if any(n)]
        normals = [cands[0], next(n for n in cands if any(_cross(cands[0], n)))]
    else:
        normals = list(lat.identity(3))
    axis = np.arange(-R, R + 1)
    X = np.array(list(itertools.product(axis, repeat=3)))
    ok = np.ones(len(X), dtype=bool)
    for nrm in normals:
        target = k * sum(F(a) * b for a, b in zip(nrm, p0))
        if target.denominator != 1:
            return False
        ok &= X @ np.array(nrm) == int(target)
    return bool(ok.any())


small_rat = st.fractions(min_value=0, max_value=1, max_denominator=3)
direction = st.tuples(*[st.integers(-2, 2)] * 3)


@given(st.tuples(small_rat, small_rat, small_rat), st.lists(direction, max_size=2))
def test_span_index_brute_force(p0, dirs):
    if dirs and lat.rank(dirs) != len(dirs):
        return
    b = lat.span_index(p0, dirs)
    assert _brute_hits(p0, dirs, b)
    assert not any(_brute_hits(p0, dirs, k) for k in range(1, b))
    z = lat.integer_point(p0, dirs, b)
    diff = lat.vsub(z, tuple(b * x for x in p0))
    assert lat.rank(list(dirs) + [diff]) == lat.rank(dirs) if dirs else not any(diff)
