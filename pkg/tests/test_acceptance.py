"""One test per acceptance criterion; each prints a PASS/FAIL line with the measured values."""

import math
import random
import time
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st_

from unitstate import enumeration as en
from unitstate import geometry as geo
from unitstate import lattice as lat
from unitstate import measure as ms
from unitstate import numtheory as nt
from unitstate import problem
from unitstate import states as st
from unitstate import terms as tm

from conftest import S1, S2, S3, S4, S5, TENT1
from test_enumeration import _brute


def test_criterion_01_relative_volumes(criterion):
    t0 = time.perf_counter()
    got = [ms.nu_simplex(S) for S in (S1, S2, S3, S4, S5)]
    dt = time.perf_counter() - t0
    want = [F(1, 18), F(1, 4), F(2, 15), 1, 1]
    assert criterion(1, got == want and dt < 1, f"nu(S1..S5) = {[str(x) for x in got]} in {dt:.3f}s")


def test_criterion_02_indices(criterion):
    i1 = lat.span_index(S1[0], geo.Simplex(S1).directions())
    i3 = lat.span_index(S3[0], geo.Simplex(S3).directions())
    assert criterion(2, (i1, i3) == (1, 3), f"index(aff S1) = {i1}, index(aff S3) = {i3}")


def test_criterion_03_level_zero_and_tau0(criterion):
    W = problem.load("example28").complex
    m0 = st.state_level("x1", "1", W, 0).value
    tau = st.tau0_reference("x1", W)
    assert criterion(3, m0 == F(11, 28) and tau == F(19, 42), f"m0(x1) = {m0}, tau0(x1) = {tau}")


def test_criterion_04_discrete_states_of_denominator_one(criterion):
    t0 = time.perf_counter()
    W = geo.PolytopalComplex((((0, 1), (1, 1)),))
    ok, parts = True, []
    for k in (1, 2, 3):
        run = en.enumerate_primitive(W, f"x1 \\/ (1 - {k}*x1)", 1)
        pts = sorted(s.base_point[0] for s in run.states if s.unit_value == 1)
        want = sorted([F(0), F(1)] + [F(1, j) for j in range(2, k + 2)])
        ok &= len(pts) == k + 2 and pts == want
        parts.append(f"k={k}: {[str(p) for p in pts]}")
    dt = time.perf_counter() - t0
    assert criterion(4, ok and dt < 5, "; ".join(parts) + f" in {dt:.2f}s")


def test_criterion_05_cesaro_farey(criterion):
    t0 = time.perf_counter()
    spec = problem.load("farey")
    exact = st.state("x1", "1", spec.complex).value
    avg = {t: en.cesaro_partials(en.enumerate_primitive(spec.complex, "1", t), "x1")[-1] for t in (50, 300)}
    d50, d300 = abs(avg[50] - F(1, 2)), abs(avg[300] - F(1, 2))
    dt = time.perf_counter() - t0
    ok = exact == F(1, 2) and d300 <= F(1, 20) and d300 <= d50 and dt < 30
    assert criterion(5, ok, f"m_u(x1) = {exact}, |avg-1/2| at t=50: {float(d50):.3g}, at t=300: {float(d300):.3g}, {dt:.1f}s")


ORDER_CASES = [
    ("example28", "one", ["x1", "x2", "hat_s3"]),
    ("farey", "one", ["x1", "one_minus_x1"]),
    ("farey", "tent1", ["x1", "tent2"]),
    ("farey", "tent2", ["x1", "one_minus_x1"]),
    ("farey", "tent3", ["x1"]),
    ("square", "one", ["x1", "peak"]),
    ("square", "peak", ["x2"]),
    ("twopoint", "one", ["x1"]),
    ("twopoint", "u2", ["x1"]),
]


def test_criterion_06_order_robustness(criterion):
    ok, n = True, 0
    for name, unit, hs in ORDER_CASES:
        spec = problem.load(name)
        run = en.enumerate_primitive(spec.complex, spec.unit(unit), 100)
        rev = en.reorder_within_blocks(run)
        for h in hs:
            el = spec.term(h)
            ok &= en.block_sums(run, el) == en.block_sums(rev, el)
            ok &= en.block_partials(run, el) == en.block_partials(rev, el)
            n += 1
    assert criterion(6, ok, f"{n} (fixture, unit, element) cases at t = 100, reversed intra-block order")


def test_criterion_07_mobius_inversion(criterion):
    t0 = time.perf_counter()
    shapes = {"segment": ((0, 1), (1, 1)), "triangle": ((0, 0, 1), (1, 0, 1), (0, 1, 1)), "S3": S3}
    bad = [(k, t) for k, S in shapes.items() for t in range(1, 51) if nt.primitive_by_inversion(S, t) != nt.primitive_count(S, t)]
    dt = time.perf_counter() - t0
    assert criterion(7, not bad and dt < 60, f"150 (shape, t) pairs, mismatches {bad}, {dt:.1f}s")


def test_criterion_08_jordan_asymptotics(criterion):
    t0 = time.perf_counter()
    k = 10**5
    r1 = nt.jordan_sum(1, k) * 2 * nt.zeta(2) / k**2
    r2 = nt.jordan_sum(2, k) * 3 * nt.zeta(3) / k**3
    dt = time.perf_counter() - t0
    ok = abs(r1 - 1) <= 0.01 and abs(r2 - 1) <= 0.01 and dt < 10
    assert criterion(8, ok, f"Phi_1 ratio {r1:.6f}, Phi_2 ratio {r2:.6f}, {dt:.2f}s")


def test_criterion_09_dimension(criterion):
    farey, square = problem.load("farey"), problem.load("square")
    sf, df = st.dimension_estimate(farey.complex, farey.unit("one"), [50, 100, 200, 500])
    st_, dt_ = st.dimension_estimate(farey.complex, farey.unit("tent1"), [50, 100, 200, 500])
    ss, ds = st.dimension_estimate(square.complex, square.unit("one"), [25, 50, 100, 150])
    ok = df == dt_ == 1 and ds == 2
    ok &= abs(sf[-1] - 2) <= 0.2 and abs(ss[-1] - 3) <= 0.2
    detail = (
        f"Farey dim {df} (u=1) / {dt_} (tent), slope at t=500 {sf[-1]:.3f}; "
        f"square dim {ds}, slope at t=150 {ss[-1]:.3f} (needs |slope-3| <= 0.2)"
    )
    assert criterion(9, ok, detail)


def test_criterion_10_density(criterion):
    t0 = time.perf_counter()
    tp = problem.load("twopoint")
    r0 = st.verify_density("x1", tp.unit("one"), tp.unit("u2"), tp.complex)
    exact0 = r0.d == 0 and all(a == b for _, a, b in r0.point_checks) and r0.lhs == r0.rhs
    seg = geo.PolytopalComplex((((0, 1), (1, 1)),))
    discs = [st.verify_density("x1", "1", TENT1, seg, level=k).discrepancy for k in (4, 6, 8, 10)]
    dt = time.perf_counter() - t0
    ok = exact0 and discs[-1] <= 1e-4 and discs == sorted(discs, reverse=True) and dt < 10
    assert criterion(10, ok, f"d=0 exact: {exact0}; d=1 discrepancy at levels 4..10: {['%.2e' % x for x in discs]}, {dt:.1f}s")


def test_criterion_11_faithfulness(criterion):
    spec = problem.load("example28")
    W, hat = spec.complex, spec.term("hat_s3")
    a = st.state(hat, "1", W).value
    b = st.state_weighted(hat, "1", W, (F(1, 3),) * 3).value
    c = st.state_weighted(hat, "1", W, (F(1, 2), 0, F(1, 2))).value
    assert criterion(11, a == 0 and b > 0 and c == 0, f"m_u = {a}, m^p(1/3,1/3,1/3) = {b}, m^p(1/2,0,1/2) = {c}")


def test_criterion_12_reflection_invariance(criterion):
    seg = geo.PolytopalComplex((((0, 1), (1, 1)),))
    a = st.state("x1", TENT1, seg).value
    b = st.state("1 - x1", TENT1, seg).value
    assert criterion(12, a == b == F(3, 4), f"state(x1) = {a}, state(1 - x1) = {b} (pinned 3/4)")


def test_criterion_13_property_suites(criterion):
    rng = random.Random(2024)
    # nu additivity under splitting hyperplanes
    add_ok, done = True, 0
    while done < 50:
        pts = [tuple(F(rng.randint(0, 12), rng.randint(1, 6)) for _ in range(2)) + (F(1),) for _ in range(3)]
        try:
            S = geo.Simplex(pts)
        except ValueError:
            continue
        pieces = geo.split_simplex(S, tuple(rng.randint(-4, 4) for _ in range(3)))
        if len(pieces) == 1:
            continue
        add_ok &= sum(ms.nu_simplex(p) for p in pieces if p.dim == S.dim) == ms.nu_simplex(S)
        done += 1
    # homogeneity of the homogeneous correspondent
    terms = ["x1 \\/ (1 - 2*x1)", "(x1 /\\ x2) + 1", "x1 - x2 \\/ 0", "(3*x1 /\\ (1 - x2)) \\/ x2"]
    hom_ok = True
    for i in range(100):
        h = tm.homogenize(tm.parse(terms[i % 4], 2), 2)
        v = tuple(F(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(3))
        lam = F(rng.randint(0, 30), rng.randint(1, 7))
        hom_ok &= h(tuple(lam * x for x in v)) == lam * h(v)
    # enumeration completeness against a full box scan
    comp_ok = True
    for name, unit, inv_min, ts in [("farey", "one", 1, (20,)), ("farey", "tent1", 2, (20,)), ("farey", "tent3", 4, (20,)), ("square", "peak", 1, (12,)), ("example28", "one", 1, (12,))]:
        spec = problem.load(name)
        for t in ts:
            run = en.enumerate_primitive(spec.complex, spec.unit(unit), t)
            comp_ok &= [(s.unit_value, s.primitive) for s in run.states] == _brute(spec.complex, spec.unit(unit), t, spec.n, inv_min)
    ok = add_ok and hom_ok and comp_ok
    assert criterion(13, ok, f"additivity (50): {add_ok}, homogeneity (100): {hom_ok}, completeness vs box scan: {comp_ok}")
