"""Exact invariant states, level states, faithful weighted states and density checks.

Every state here is an average over a cone section ``W_u = Cone(W) ∩ {u = 1}``
against its lattice-normalized volume.  Elements may be terms (strings or
parsed), homogenized terms, or per-simplex integer forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import enumeration as en
from . import geometry as geo
from . import lattice as lat
from . import measure as ms
from . import terms as tm
from .geometry import NotAUnitError, PolytopalComplex, Simplex


class NegativeElementError(ValueError):
    pass


class EmptyLevelError(ValueError):
    pass


@dataclass(frozen=True)
class SimplexContribution:
    id: int
    parent: int  # simplex of W the piece came from
    nu: Fraction
    average: Fraction  # vertex average of the element on the section simplex
    vertices: tuple


@dataclass(frozen=True)
class StateReport:
    value: Fraction
    total_mass: Fraction
    level: int
    per_simplex: tuple = field(default=())


@dataclass(frozen=True)
class WeightVector:
    levels: tuple
    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != len(self.levels):
            raise ValueError(f"{len(w)} weights given for {len(self.levels)} nonempty levels {list(self.levels)}")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if sum(w) != 1:
            raise ValueError(f"weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class DensityReport:
    d: int
    D1: Fraction
    D2: Fraction
    C: Fraction
    lhs: Fraction | None = None
    rhs: ms.QuadratureEstimate | Fraction | None = None
    discrepancy: float | None = None
    point_checks: tuple = field(default=())  # d = 0: (point, mu2, (u1/u2)*mu1)


# -- sections ---------------------------------------------------------------------


def _nvars(W: PolytopalComplex) -> int:
    return W.ambient - 1


def _element(h, W: PolytopalComplex):
    return tm.as_element(h, _nvars(W))


def _hyperplanes(el) -> list:
    return el.hyperplanes() if hasattr(el, "hyperplanes") else []


def _value(el, parent: int, w) -> Fraction:
    if isinstance(el, tm.PiecewiseForm):
        return el.form_on(parent)(w)
    return Fraction(el(w))


@dataclass(frozen=True)
class Section:
    """Cone section of W by a unit, refined so the listed elements are linear per piece."""

    complex: PolytopalComplex
    parents: tuple  # parent W-simplex index, aligned with complex.simplices
    unit: object

    def parent_of(self, i: int) -> int:
        return self.parents[i]


def section(W: PolytopalComplex, u, *elements) -> Section:
    hu = _element(u, W)
    forms = list(_hyperplanes(hu))
    for e in elements:
        forms += _hyperplanes(_element(e, W))
    pieces = geo.refine_with_parents(W, forms)
    out = []
    for parent, s in pieces:
        verts = []
        for v in s.vertices:
            x = hu(v)
            if x <= 0:
                raise NotAUnitError(f"not a unit on W: value {x} at vertex {geo.fmt_point(v)}")
            verts.append(tuple(c / x for c in v))
        out.append((Simplex(verts), parent))
    out.sort(key=lambda t: (t[0].dim, t[0].vertices))
    return Section(PolytopalComplex(tuple(s for s, _ in out)), tuple(p for _, p in out), u)


def _check_nonnegative(el, sec: Section):
    for i, s in enumerate(sec.complex.simplices):
        for w in s.vertices:
            x = _value(el, sec.parent_of(i), w)
            if x < 0:
                raise NegativeElementError(f"element is negative ({x}) at section vertex {geo.fmt_point(w)}")


def levels_of(W: PolytopalComplex) -> list[int]:
    return geo.local_dim_partition(W).nonempty_levels


def _level_report(el, sec: Section, l: int) -> StateReport:
    C = sec.complex
    index = {s: i for i, s in enumerate(C.simplices)}
    faces = geo.max_faces(C, l)
    if not faces:
        raise EmptyLevelError(f"level {l} is empty (nonempty levels: {levels_of(C)})")
    contribs = []
    total = Fraction(0)
    weighted = Fraction(0)
    for S in faces:
        i = index[S]
        nu = ms.nu_simplex(S)
        vals = [_value(el, sec.parent_of(i), w) for w in S.vertices]
        avg = sum(vals, Fraction(0)) / len(vals)
        contribs.append(SimplexContribution(i, sec.parent_of(i), nu, avg, S.vertices))
        total += nu
        weighted += nu * avg
    return StateReport(weighted / total, total, l, tuple(contribs))


def state_level(h, u, W: PolytopalComplex, l: int) -> StateReport:
    """``m_u^l(h)``: average of h over the level-l part of the section."""
    el = _element(h, W)
    sec = section(W, u, el)
    _check_nonnegative(el, sec)
    return _level_report(el, sec, l)


def state(h, u, W: PolytopalComplex) -> StateReport:
    """The invariant state ``m_u(h)``, i.e. the top-level average."""
    el = _element(h, W)
    sec = section(W, u, el)
    _check_nonnegative(el, sec)
    return _level_report(el, sec, sec.complex.dim)


def state_weighted(h, u, W: PolytopalComplex, p) -> StateReport:
    """``sum_i p_i m_u^{l_i}(h)`` over the nonempty levels, in increasing order."""
    el = _element(h, W)
    sec = section(W, u, el)
    _check_nonnegative(el, sec)
    lv = levels_of(sec.complex)
    wv = p if isinstance(p, WeightVector) else WeightVector(tuple(lv), tuple(p))
    if tuple(wv.levels) != tuple(lv):
        raise ValueError(f"weights are over levels {list(wv.levels)}, nonempty levels are {lv}")
    value = Fraction(0)
    contribs = []
    for l, w in zip(lv, wv.weights):
        r = _level_report(el, sec, l)
        value += w * r.value
        contribs.extend(r.per_simplex)
    return StateReport(value, sum((c.nu for c in contribs), Fraction(0)), -1, tuple(contribs))


def tau0_reference(h, W: PolytopalComplex, u="1") -> Fraction:
    """Denominator-weighted average of h over the isolated points of the section."""
    el = _element(h, W)
    sec = section(W, u, el)
    pts = geo.max_faces(sec.complex, 0)
    if not pts:
        raise EmptyLevelError("level 0 is empty")
    index = {s: i for i, s in enumerate(sec.complex.simplices)}
    num = den = Fraction(0)
    for S in pts:
        w = S.vertices[0]
        weight = Fraction(1, lat.denominator(w))
        num += weight * _value(el, sec.parent_of(index[S]), w)
        den += weight
    return num / den


# -- density ------------------------------------------------------------------------


def density_constant(u1, u2, W: PolytopalComplex) -> DensityReport:
    """``C = D1 / D2`` with ``D_i`` the top-level volume of the section by ``u_i``."""
    s1 = section(W, u1)
    s2 = section(W, u2)
    d = s1.complex.dim
    D1 = sum((ms.nu_simplex(S) for S in geo.max_faces(s1.complex, d)), Fraction(0))
    D2 = sum((ms.nu_simplex(S) for S in geo.max_faces(s2.complex, d)), Fraction(0))
    return DensityReport(d, D1, D2, D1 / D2)


def _float_eval(el, parent, X):
    if isinstance(el, tm.PiecewiseForm):
        return X @ np.array(el.form_on(parent).coeffs, dtype=float)
    if isinstance(el, tm.LinearForm):
        return X @ np.array(el.coeffs, dtype=float)
    return tm.eval_array(el, X)


def verify_density(f, u1, u2, W: PolytopalComplex, level: int = 8, seed: int = 0) -> DensityReport:
    """Compare ``m_{u2}(f)`` with the section integral ``(1/D2) int_{W1} f / u2^(d+2) dnu``.

    In dimension 0 both measures are finite sums and the comparison is the
    exact pointwise identity ``mu2 = (u1/u2) mu1``.  From dimension 3 on the
    subdivision grows too fast and a seeded Monte Carlo estimate is used.
    """
    el = _element(f, W)
    h1, h2 = _element(u1, W), _element(u2, W)
    base = density_constant(u1, u2, W)
    d, D1, D2 = base.d, base.D1, base.D2
    lhs = state(el, h2, W).value
    if d == 0:
        checks = []
        rhs = Fraction(0)
        for s in W.simplices:
            p = s.vertices[0]
            mu1 = 1 / (D1 * h1(p))
            mu2 = 1 / (D2 * h2(p))
            pred = h1(p) / h2(p) * mu1
            checks.append((p, mu2, pred))
            rhs += _value(el, W.simplices.index(s), p) * pred
        ok = all(a == b for _, a, b in checks)
        disc = float(abs(lhs - rhs)) if ok else math.inf
        return DensityReport(d, D1, D2, base.C, lhs, rhs, disc, tuple(checks))
    sec = section(W, h1, el, h2)

    def integral(lv: int) -> float:
        total = 0.0
        for i, S in enumerate(sec.complex.simplices):
            if S.dim != d:
                continue
            parent = sec.parent_of(i)

            def g(X, parent=parent):
                return _float_eval(el, parent, X) / tm.eval_array(h2, X) ** (d + 2)

            if d >= 3:
                total += ms.quadrature_montecarlo(g, S, samples=20_000 * (lv + 1), seed=seed + i).value
            else:
                total += ms.quadrature_rational(g, S, lv).value
        return total / float(D2)

    rhs_val = integral(level)
    err = abs(rhs_val - integral(level - 1)) if level > 0 else math.inf
    rhs = ms.QuadratureEstimate(rhs_val, err, level)
    return DensityReport(d, D1, D2, base.C, lhs, rhs, abs(float(lhs) - rhs_val))


# -- dimension ----------------------------------------------------------------------


def dimension_estimate(W: PolytopalComplex, u, t_grid: Sequence[int]) -> tuple[list[float], int]:
    """Slopes ``log Xi(t) / log t`` on the grid and the resulting dimension.

    The dimension is ``round(last slope) - 1``, except that it is 0 when the
    count has stopped growing over a window of consecutive t ending at the
    last grid point (finitely many discrete states).
    """
    grid = sorted(int(t) for t in t_grid)
    if not grid or grid[0] < 2:
        raise ValueError("t_grid needs integers >= 2")
    T = grid[-1]
    c = en.block_size(W, u)
    window = max(3, 2 * c + 1)
    tail = list(range(max(1, T - window + 1), T + 1))
    counts = en.xi_counts(W, u, sorted(set(grid) | set(tail)))
    by_t = dict(zip(sorted(set(grid) | set(tail)), counts))
    slopes = [math.log(by_t[t]) / math.log(t) if by_t[t] > 0 else float("-inf") for t in grid]
    if len({by_t[t] for t in tail}) == 1:
        return slopes, 0
    return slopes, round(slopes[-1]) - 1
