"""Primitive points of Cone(W) below a unit bound, their blocks, and Cesàro averages.

A primitive integer vector ``v`` with ``v/v[-1]`` in W corresponds to the
discrete state of denominator ``u(v)``; the enumeration lists these sorted
by unit value and then lexicographically.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import geometry as geo
from . import lattice as lat
from . import terms as tm
from .geometry import NotAUnitError, PolytopalComplex, Simplex


@dataclass(frozen=True, order=True)
class DiscreteState:
    unit_value: int
    primitive: tuple

    @property
    def denominator(self) -> int:
        return self.unit_value

    @property
    def section_point(self) -> tuple:
        b = self.unit_value
        return tuple(Fraction(x, b) for x in self.primitive)

    @property
    def base_point(self) -> tuple:
        """The point of W on the ray of the primitive vector."""
        q = self.primitive[-1]
        return tuple(Fraction(x, q) for x in self.primitive)

    def value(self, h) -> Fraction:
        """``e(h) = h(v) / u(v)``."""
        return Fraction(h(self.primitive)) / self.unit_value


@dataclass(frozen=True)
class EnumerationRun:
    unit: object
    bound: int
    states: tuple
    block_size: int
    block_boundaries: tuple = field(default=())  # n_k: number of states in B_1 ∪ ... ∪ B_k

    def __len__(self):
        return len(self.states)

    def blocks(self) -> list[tuple]:
        out, start = [], 0
        for n in self.block_boundaries:
            out.append(self.states[start:n])
            start = n
        return out


def _cone_forms(s: Simplex):
    """Integer forms ``gam`` (rows) and ``eqs`` with Cone(s) = {gam x >= 0, eqs x = 0}."""
    verts = s.vertices
    m = s.ambient
    coeff = [lat.solve(verts, [Fraction(int(j == i)) for j in range(len(verts))]) for i in range(len(verts))]
    D = lat.denominator([x for f in coeff for x in f])
    gam = [[int(x * D) for x in f] for f in coeff]
    eqs = [list(e) for e in lat.annihilator(verts, m)] if len(verts) < m else []
    return gam, eqs


def _check_range(rows, qmax: int, n: int):
    big = max((abs(a) for row in rows for a in row), default=1) * (qmax + 1) * (n + 1)
    if big >= 2**62:
        raise OverflowError("coordinates too large for the vectorized scan")


def _slice_job(args):
    gam, eqs, lo, hi, form, qs, t = args
    n = len(lo)
    _check_range(gam + eqs + [form], max(qs, default=1), n)
    G = np.array(gam, dtype=np.int64)
    E = np.array(eqs, dtype=np.int64).reshape(len(eqs), n + 1)
    f = np.array(form, dtype=np.int64)
    found = [np.zeros((0, n + 2), dtype=np.int64)]
    for q in qs:
        axes = [np.arange(math.floor(a * q), math.ceil(b * q) + 1, dtype=np.int64) for a, b in zip(lo, hi)]
        grid = np.meshgrid(*axes, indexing="ij")
        X = np.stack([g.ravel() for g in grid] + [np.full(grid[0].size, q, dtype=np.int64)], axis=1)
        ok = (X @ G.T >= 0).all(axis=1)
        if len(eqs):
            ok &= (X @ E.T == 0).all(axis=1)
        X = X[ok]
        uval = X @ f
        keep = (uval <= t) & (np.gcd.reduce(X, axis=1) == 1)
        found.append(np.column_stack([uval[keep], X[keep]]))
    return np.concatenate(found)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("UNITSTATE_THREADS", "1")))
    except ValueError:
        return 1


def _unit_data(W: PolytopalComplex, u):
    hu = tm.as_element(u, W.ambient - 1)
    refined, forms = tm.affinize(hu, W)
    vals = [(hu(v), v) for v in refined.vertices()]
    m, where = min(vals)
    if m <= 0:
        raise NotAUnitError(f"not a unit on W: value {m} at vertex {geo.fmt_point(where)}")
    return hu, refined, forms, m


def block_size(W: PolytopalComplex, u) -> int:
    """Least common multiple of the indices of the top-dimensional section simplexes."""
    section = geo.cone_section(W, u if not isinstance(u, str) else tm.parse(u, W.ambient - 1))
    d = section.dim
    c = 1
    for s in section.simplices:
        if s.dim == d:
            c = math.lcm(c, lat.span_index(s.vertices[0], s.directions()))
    return c


def primitive_array(W: PolytopalComplex, u, t: int) -> np.ndarray:
    """Rows ``(u(v), v)`` for the enumeration, deduplicated and in enumeration order."""
    if t < 1:
        raise ValueError("the bound t must be >= 1")
    hu, refined, forms, m = _unit_data(W, u)
    qmax = math.floor(Fraction(t) / m)
    cones = [_cone_forms(s) for s in refined.simplices]
    for (gam, eqs), f in zip(cones, forms):
        _check_range(gam + eqs + [list(f.coeffs)], qmax, W.ambient - 1)
    qs = range(1, qmax + 1)
    nthreads = _threads()
    jobs = []
    for s, f, (gam, eqs) in zip(refined.simplices, forms, cones):
        lo = [min(v[i] for v in s.vertices) for i in range(s.ambient - 1)]
        hi = [max(v[i] for v in s.vertices) for i in range(s.ambient - 1)]
        chunks = [qs[i::nthreads] for i in range(nthreads)] if nthreads > 1 else [qs]
        for ch in chunks:
            jobs.append((gam, eqs, lo, hi, list(f.coeffs), ch, t))
    if nthreads > 1:
        with ProcessPoolExecutor(max_workers=nthreads) as ex:
            results = list(ex.map(_slice_job, jobs))
    else:
        results = [_slice_job(j) for j in jobs]
    # row-lexicographic unique sorts by unit value, then by coordinates
    return np.unique(np.concatenate(results), axis=0)


def enumerate_primitive(W: PolytopalComplex, u, t: int) -> EnumerationRun:
    """All primitive ``v`` with ``v/v[-1]`` in W and ``u(v) <= t``."""
    rows = primitive_array(W, u, t)
    states = tuple(DiscreteState(int(r[0]), tuple(int(x) for x in r[1:])) for r in rows.tolist())
    c = block_size(W, u)
    bounds = []
    i = 0
    for k in range(1, t // c + 1):
        while i < len(states) and states[i].unit_value <= k * c:
            i += 1
        bounds.append(i)
    return EnumerationRun(u, t, states, c, tuple(bounds))


def xi_counts(W: PolytopalComplex, u, t_grid: Sequence[int]) -> list[int]:
    """``Xi(W, t)`` for every t of the grid from a single scan at the largest t."""
    rows = primitive_array(W, u, max(t_grid))
    uv = rows[:, 0]
    return [int(np.searchsorted(uv, t, side="right")) for t in t_grid]


def xi_count(W: PolytopalComplex, u, t: int) -> int:
    return len(primitive_array(W, u, t))


def _element(run: EnumerationRun, h):
    nvars = len(run.states[0].primitive) - 1 if run.states else 0
    return tm.as_element(h, nvars)


def state_values(run: EnumerationRun, h) -> list[Fraction]:
    if not run.states:
        return []
    el = _element(run, h)
    return [s.value(el) for s in run.states]


def cesaro_partials(run: EnumerationRun, h) -> list[Fraction]:
    """Running averages ``(1/k) sum_{i<=k} e_i(h)`` for k = 1..len(run)."""
    out, acc = [], Fraction(0)
    for k, x in enumerate(state_values(run, h), 1):
        acc += x
        out.append(acc / k)
    return out


def block_sums(run: EnumerationRun, h) -> list[Fraction]:
    vals = state_values(run, h)
    out, start = [], 0
    for n in run.block_boundaries:
        out.append(sum(vals[start:n], Fraction(0)))
        start = n
    return out


def block_partials(run: EnumerationRun, h) -> list[Fraction | None]:
    """Partial averages at the block boundaries n_k (None while no state has appeared)."""
    sums = block_sums(run, h)
    out, acc = [], Fraction(0)
    for n, s in zip(run.block_boundaries, sums):
        acc += s
        out.append(acc / n if n else None)
    return out


def reorder_within_blocks(run: EnumerationRun, key=None, reverse: bool = True) -> EnumerationRun:
    """Same run with every block re-sorted (by default simply reversed)."""
    new = []
    for b in run.blocks():
        new.extend(sorted(b, key=key, reverse=reverse) if key else (b[::-1] if reverse else b))
    new.extend(run.states[len(new):])
    return EnumerationRun(run.unit, run.bound, tuple(new), run.block_size, run.block_boundaries)
