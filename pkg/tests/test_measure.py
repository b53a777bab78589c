import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unitstate import geometry as geo
from unitstate import lattice as lat
from unitstate import measure as ms
from unitstate import numtheory as nt
from unitstate.terms import LinearForm

from conftest import S1, S2, S3, S4, S5

EX28 = geo.PolytopalComplex((S1, S2, S3, S4, S5))


def test_nu_example28():
    assert ms.nu_simplex(S1) == F(1, 18)
    assert ms.nu_simplex(S2) == F(1, 4)
    assert ms.nu_simplex(S3) == F(2, 15)
    assert ms.nu_simplex(S4) == 1 and ms.nu_simplex(S5) == 1


@pytest.mark.parametrize("S", [S1, S2, S3])
def test_routes_agree(S):
    assert ms.nu_simplex(S, method="det") == ms.nu_simplex(S, method="chart")


def test_det_route_refuses_off_level_segment():
    seg = ((1, 0), (0, 2))
    with pytest.raises(ValueError):
        ms.nu_simplex(seg, method="det")
    assert ms.nu_simplex(seg) == ms.nu_simplex(seg, method="chart") == 1


def test_degenerate_simplex():
    with pytest.raises(ms.DegenerateSimplexError):
        ms.nu_simplex(((0, 1), (0, 1)))


@pytest.mark.parametrize("S,t_mult", [(S1, 200), (S2, 2000), (S3, 1000)])
def test_nu_matches_lattice_point_density(S, t_mult):
    # at dilations t in b*Z the count of integer points in tS grows like b * nu * t^d
    s = geo.Simplex(S)
    b = lat.span_index(s.vertices[0], s.directions())
    t = b * t_mult
    approx = F(nt.ehrhart_count(s, t), b * t ** s.dim)
    assert abs(float(approx - ms.nu_simplex(S))) < 0.02 * float(ms.nu_simplex(S)) + 2 / t


def test_chart_explicit_formula_segments():
    for S in (S2, S3, ((0, 1), (1, 1)), ((F(1, 5), 1), (F(4, 7), 1))):
        ch = ms.chart(S)
        img = [ch(tuple(ch.index * x for x in v)) for v in geo.Simplex(S).vertices]
        length = abs(img[1][0] - img[0][0])
        assert length / ch.index ** 2 == ms.nu_simplex(S)


def test_integrate_affine():
    assert ms.integrate_affine(LinearForm((0, 0, 1)), S1) == F(1, 18)
    assert ms.integrate_affine(LinearForm((1, 0, 0)), S2) == F(3, 16)
    assert ms.integrate_affine(LinearForm((0, 0, 0)), S3) == 0
    # oracle for the S2 value: the lattice step along aff(S2) is (2, 1, 0) and S2 is a quarter of it
    steps = 1000
    mid = sum(F(1, 2) + F(2 * k + 1, 4 * steps) for k in range(steps)) / steps
    assert F(1, 4) * mid == F(3, 16)


def test_nu_level():
    assert ms.nu_level(EX28, 1) == F(23, 60)
    assert ms.nu_level(EX28, 0) == 2
    assert ms.nu_level(EX28, 2, region=[S2]) == 0
    assert ms.nu_level(EX28, 2, region=[S1]) == F(1, 18)


def test_nu_level_partial_region():
    tri = S1
    # a region cutting S1 in two: the part with x1 <= 1/6
    big = ((0, 0, 1), (F(1, 6), 0, 1), (F(1, 6), 1, 1), (0, 1, 1))
    pieces = geo.pulling_triangulation(big)
    inside = ms.nu_level(EX28, 2, region=pieces)
    R = geo.refine_by_hyperplanes(geo.PolytopalComplex((tri,)), [(6, 0, -1)])
    expect = sum(ms.nu_simplex(s) for s in R if all(6 * v[0] <= 1 for v in s.vertices))
    assert inside == expect and 0 < inside < F(1, 18)


def _rand_simplex(rng, d, m=3):
    while True:
        pts = [tuple(F(rng.randint(0, 12), rng.randint(1, 6)) for _ in range(m - 1)) + (F(1),) for _ in range(d + 1)]
        try:
            return geo.Simplex(pts)
        except ValueError:
            continue


def _rand_unimodular(rng, m=3):
    T = [list(r) for r in lat.identity(m)]
    for _ in range(6):
        i, j = rng.sample(range(m), 2)
        k = rng.randint(-2, 2)
        for r in range(m):
            T[r][i] += k * T[r][j]
    return T


def test_nu_unimodular_invariance():
    rng = random.Random(11)
    for _ in range(50):
        S = _rand_simplex(rng, rng.randint(1, 2))
        T = _rand_unimodular(rng)
        img = geo.Simplex([lat.matvec(T, v) for v in S.vertices])
        assert ms.nu_simplex(img) == ms.nu_simplex(S)


def test_nu_additivity_under_splits():
    rng = random.Random(5)
    done = 0
    while done < 50:
        S = _rand_simplex(rng, rng.randint(1, 2))
        form = tuple(rng.randint(-4, 4) for _ in range(3))
        pieces = geo.split_simplex(S, form)
        if len(pieces) == 1:
            continue
        top = [p for p in pieces if p.dim == S.dim]
        assert sum(ms.nu_simplex(p) for p in top) == ms.nu_simplex(S)
        done += 1


def test_quadrature_constant():
    for level in range(4):
        q = ms.quadrature_rational(lambda X: np.ones(len(X)), S1, level)
        assert q.value == pytest.approx(1 / 18, abs=1e-15)
        assert level == 0 or q.error_bound < 1e-15


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=25)
def test_quadrature_exact_on_affine(a, b, c):
    f = LinearForm((a, b, c))
    for S in (S1, S2, S3):
        q = ms.quadrature_rational(lambda X: X @ np.array([a, b, c], dtype=float), S, 0)
        assert abs(q.value - float(ms.integrate_affine(f, S))) <= 1e-12


def test_quadrature_converges_on_segment():
    # S2 is x1 = 1/2 + s/2, s in [0, 1], with nu = 1/4
    exact = 0.25 * 2 * math.log(2 / 1.5)
    errs = []
    for level in (0, 2, 4, 6, 8):
        q = ms.quadrature_rational(lambda X: 1 / (X[:, 0] + 1), S2, level)
        errs.append(abs(q.value - exact))
    assert errs == sorted(errs, reverse=True) and errs[-1] < 1e-6


def test_quadrature_error_bound_shrinks():
    g = lambda X: np.sqrt(X[:, 0] + X[:, 1])
    bounds = [ms.quadrature_rational(g, S1, k).error_bound for k in range(1, 6)]
    assert bounds == sorted(bounds, reverse=True)


def test_subdivision_cells_partition():
    for d in (1, 2, 3):
        cells, scale = ms.subdivide(d, 2)
        assert len(cells) == 2 ** (2 * d) and scale == 4
        for c in cells:
            assert all(sum(r) == scale for r in c)
            assert abs(lat.det([lat.vsub(r, c[0])[1:] for r in c[1:]])) == 1


def test_montecarlo_seeded():
    g = lambda X: X[:, 0]
    a = ms.quadrature_montecarlo(g, S1, samples=20_000, seed=3)
    b = ms.quadrature_montecarlo(g, S1, samples=20_000, seed=3)
    assert a == b
    assert abs(a.value - float(ms.integrate_affine(LinearForm((1, 0, 0)), S1))) < a.error_bound
