"""Lattice-normalized volume on rational affine spans, and integration against it.

Two independent routes compute the relative volume of a simplex:

* ``"det"`` expresses the vertices in a Z-basis of the lattice points of their
  linear span and takes ``|det M| / d!``.  This is only valid when the
  vertices lie on ``{a = 1}`` for an integer functional ``a``.
* ``"chart"`` finds the index ``b`` of the affine span, an integer point of
  ``b*aff(S)`` and a lattice basis of its direction space, measures ``b*S``
  in those lattice coordinates and divides by ``b**(d+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from . import lattice as lat
from .geometry import PolytopalComplex, Simplex


class DegenerateSimplexError(ValueError):
    pass


def _simplex(S) -> Simplex:
    if isinstance(S, Simplex):
        return S
    try:
        return Simplex(S)
    except ValueError as e:
        raise DegenerateSimplexError(str(e)) from None


def _det_route(S: Simplex) -> Fraction | None:
    d = S.dim
    W = S.vertices
    if lat.rank(W) != d + 1:
        return None
    B = lat.lattice_basis(W, S.ambient)
    Bcols = [[b[i] for b in B] for i in range(S.ambient)]
    cols = [lat.solve(Bcols, w) for w in W]
    M = lat.transpose(cols)  # W = B M
    # the functional equal to 1 on every vertex takes the values 1^T M^{-1} on B
    a = lat.solve(lat.transpose(M), [Fraction(1)] * (d + 1))
    if any(x.denominator != 1 for x in a):
        return None
    return abs(lat.det(M)) / math.factorial(d)


@dataclass(frozen=True)
class Chart:
    """Affine chart of ``b*aff(S)`` onto R^d sending its lattice points onto Z^d."""

    index: int
    origin: tuple  # integer point of b*aff(S)
    basis: tuple  # Z-basis of the direction lattice

    def __call__(self, x) -> tuple:
        if not self.basis:
            return ()
        rows = [[b[i] for b in self.basis] for i in range(len(self.origin))]
        c = lat.solve(rows, lat.vsub(lat.ratvec(x), self.origin))
        if c is None:
            raise ValueError("point is off the charted affine span")
        return c


def chart(S) -> Chart:
    S = _simplex(S)
    v0 = S.vertices[0]
    dirs = S.directions()
    b = lat.span_index(v0, dirs)
    z = lat.integer_point(v0, dirs, b)
    L = lat.lattice_basis(dirs, S.ambient) if dirs else []
    return Chart(b, z, tuple(L))


def _chart_route(S: Simplex) -> Fraction:
    d = S.dim
    ch = chart(S)
    b = ch.index
    pts = [ch(lat.vscale(b, w)) for w in S.vertices]
    D = [lat.vsub(p, pts[0]) for p in pts[1:]]
    lam = abs(lat.det(D)) / math.factorial(d)
    return lam / Fraction(b) ** (d + 1)


def nu_simplex(S, method: str = "auto") -> Fraction:
    """Relative volume of S in its own affine span (1 for a point)."""
    S = _simplex(S)
    if S.dim == 0:
        return Fraction(1)
    if method == "chart":
        return _chart_route(S)
    val = _det_route(S)
    if method == "det":
        if val is None:
            raise ValueError(f"vertices of {S} do not lie on an integral level set")
        return val
    return val if val is not None else _chart_route(S)


def integrate_affine(f, S) -> Fraction:
    """Integral of the linear (homogeneous) form ``f`` over S against its relative volume."""
    S = _simplex(S)
    vals = [Fraction(f(w)) for w in S.vertices]
    return nu_simplex(S) * sum(vals) / len(vals)


# -- level measures ---------------------------------------------------------


def _barycentric_forms(R: Simplex) -> list[tuple]:
    """Linear forms on R^m equal to the barycentric coordinates of R on its span."""
    m = R.ambient
    verts = R.vertices
    if lat.rank(verts) != len(verts):
        raise ValueError(f"affine span of {R} passes through the origin")
    forms = []
    for i in range(len(verts)):
        rhs = [Fraction(int(j == i)) for j in range(len(verts))]
        forms.append(lat.solve(verts, rhs))
    return forms


def measure_in(S: Simplex, region: Simplex) -> Fraction:
    """``nu_{aff(S)}(S ∩ region)``."""
    l = S.dim
    if region.dim < l or any(region.barycentric(v) is None for v in S.vertices):
        # S ∩ region sits in a proper affine subspace of aff(S)
        return Fraction(0)
    forms = _barycentric_forms(region)
    pieces = geo.refine_by_hyperplanes(PolytopalComplex((S,)), forms).simplices
    total = Fraction(0)
    for p in pieces:
        c = p.barycenter()
        if p.dim == l and all(lat.dot(f, c) >= 0 for f in forms):
            total += nu_simplex(p)
    return total


def nu_level(C: PolytopalComplex, l: int, region: Sequence | None = None) -> Fraction:
    """The level-``l`` measure of ``region`` (default: all of C)."""
    total = Fraction(0)
    for S in geo.max_faces(C, l):
        if region is None:
            total += nu_simplex(S)
        else:
            total += sum((measure_in(S, _simplex(R)) for R in region), Fraction(0))
    return total


# -- quadrature ---------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureEstimate:
    value: float
    error_bound: float
    refinement_level: int


def _kuhn_children(d: int) -> list[list[tuple]]:
    """Barycentric rows (scaled by 2) of the 2^d cells of one edgewise subdivision."""
    cells = []
    for corner in product((0, 1), repeat=d):
        for perm in permutations(range(d)):
            y = list(corner)
            path = [tuple(y)]
            for j in perm:
                y[j] += 1
                path.append(tuple(y))
            if all(2 >= p[0] and all(p[i] >= p[i + 1] for i in range(d - 1)) and p[-1] >= 0 for p in path):
                rows = []
                for p in path:
                    lam = [2 - p[0]] + [p[i] - p[i + 1] for i in range(d - 1)] + [p[-1]]
                    rows.append(tuple(lam))
                cells.append(rows)
    return cells


def subdivide(d: int, level: int) -> tuple[list[tuple], int]:
    """Cells of the ``level``-fold edgewise subdivision of a d-simplex.

    Each cell is a tuple of integer barycentric rows w.r.t. the original
    vertices, all at scale ``2**level``; the cells have equal volume.
    """
    eye = tuple(tuple(int(i == j) for j in range(d + 1)) for i in range(d + 1))
    cells = [eye]
    if d == 0:
        return cells, 1
    kids = _kuhn_children(d)
    for _ in range(level):
        nxt = []
        for cell in cells:
            for kid in kids:
                nxt.append(tuple(
                    tuple(sum(lam[j] * cell[j][c] for j in range(d + 1)) for c in range(d + 1))
                    for lam in kid
                ))
        cells = nxt
    return cells, 2 ** level


def _vertex_rule(g, S: Simplex, level: int, vectorized: bool) -> float:
    d = S.dim
    cells, scale = subdivide(d, level)
    rows = sorted({r for c in cells for r in c})
    idx = {r: i for i, r in enumerate(rows)}
    V = np.array([[float(x) for x in v] for v in S.vertices])
    P = np.array(rows, dtype=float) @ V / scale
    vals = np.asarray(g(P), dtype=float) if vectorized else np.array([g(p) for p in P], dtype=float)
    cell_avg = np.array([vals[[idx[r] for r in c]].mean() for c in cells])
    return float(nu_simplex(S)) * float(cell_avg.mean())


def quadrature_rational(g: Callable, S, level: int, vectorized: bool = True) -> QuadratureEstimate:
    """Vertex-average rule on the ``level``-fold edgewise subdivision of S.

    ``g`` maps an ``(N, m)`` array of homogeneous points to ``N`` values (or a
    single point to a value when ``vectorized`` is false).  The error bound is
    the change from the previous level; it is infinite at level 0.
    """
    S = _simplex(S)
    est = _vertex_rule(g, S, level, vectorized)
    if level == 0:
        return QuadratureEstimate(est, math.inf, 0)
    prev = _vertex_rule(g, S, level - 1, vectorized)
    return QuadratureEstimate(est, abs(est - prev), level)


def quadrature_montecarlo(g: Callable, S, samples: int = 100_000, seed: int = 0) -> QuadratureEstimate:
    """Seeded Monte Carlo estimate, for simplexes where subdivision grows too fast."""
    S = _simplex(S)
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(S.dim + 1), size=samples)
    V = np.array([[float(x) for x in v] for v in S.vertices])
    vals = np.asarray(g(lam @ V), dtype=float)
    nu = float(nu_simplex(S))
    return QuadratureEstimate(nu * float(vals.mean()), 3 * nu * float(vals.std()) / math.sqrt(samples), samples)
