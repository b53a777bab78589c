"""Rational simplexes and simplicial complexes in homogeneous coordinates.

A point of the cube ``[0,1]^n`` is stored as the vector ``(x_1, ..., x_n, 1)``
of ``Q^(n+1)``; cone sections live elsewhere in ``Q^(n+1)`` but use the same
types.  A complex keeps only its maximal simplexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import lattice as lat
from .lattice import RatVec


@dataclass(frozen=True)
class Simplex:
    vertices: tuple

    def __post_init__(self):
        verts = tuple(sorted(lat.ratvec(v) for v in self.vertices))
        if not verts:
            raise ValueError("a simplex needs at least one vertex")
        m = len(verts[0])
        if any(len(v) != m for v in verts):
            raise ValueError("vertices of different lengths")
        if len(set(verts)) != len(verts) or (
            len(verts) > 1 and lat.rank([lat.vsub(v, verts[0]) for v in verts[1:]]) != len(verts) - 1
        ):
            raise ValueError(f"degenerate simplex: vertices {fmt_points(verts)} are affinely dependent")
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient(self) -> int:
        return len(self.vertices[0])

    def barycentric(self, p: Sequence) -> tuple | None:
        """Barycentric coordinates of ``p`` w.r.t. the vertices, or None off the affine span."""
        p = lat.ratvec(p)
        A = [[v[i] for v in self.vertices] for i in range(self.ambient)]
        A.append([Fraction(1)] * len(self.vertices))
        return lat.solve(A, p + (Fraction(1),))

    def __contains__(self, p) -> bool:
        lam = self.barycentric(p)
        return lam is not None and all(x >= 0 for x in lam)

    def barycenter(self) -> RatVec:
        k = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / k for i in range(self.ambient))

    def directions(self) -> list[RatVec]:
        v0 = self.vertices[0]
        return [lat.vsub(v, v0) for v in self.vertices[1:]]

    def faces(self, k: int) -> list["Simplex"]:
        return [Simplex(c) for c in combinations(self.vertices, k + 1)]

    def is_face_of(self, other: "Simplex") -> bool:
        return all(p in other for p in self.vertices)

    def __str__(self):
        return fmt_points(self.vertices)


def fmt_point(p) -> str:
    return "(" + ", ".join(str(x) for x in p) + ")"


def fmt_points(ps) -> str:
    return "[" + ", ".join(fmt_point(p) for p in ps) + "]"


def affine_span_key(points: Sequence[Sequence]) -> tuple:
    """Canonical description of aff(points): reduced directions and reduced base point."""
    pts = [lat.ratvec(p) for p in points]
    base = pts[0]
    red, piv = lat.rref([lat.vsub(p, base) for p in pts[1:]]) if len(pts) > 1 else ([], [])
    b = list(base)
    for row, c in zip(red, piv):
        f = b[c]
        if f:
            b = [x - f * y for x, y in zip(b, row)]
    return tuple(tuple(r) for r in red), tuple(b)


@dataclass(frozen=True)
class PolytopalComplex:
    simplices: tuple
    ambient: int = field(default=0)

    def __post_init__(self):
        simps = tuple(s if isinstance(s, Simplex) else Simplex(s) for s in self.simplices)
        if not simps:
            raise ValueError("empty complex")
        amb = simps[0].ambient
        if any(s.ambient != amb for s in simps):
            raise ValueError("simplexes of different ambient dimensions")
        object.__setattr__(self, "simplices", simps)
        object.__setattr__(self, "ambient", amb)

    @property
    def dim(self) -> int:
        return max(s.dim for s in self.simplices)

    def vertices(self) -> list[RatVec]:
        return sorted({v for s in self.simplices for v in s.vertices})

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)


def complex_of(simplices: Iterable, ambient: int | None = None) -> PolytopalComplex:
    return PolytopalComplex(tuple(simplices))


# -- validation -------------------------------------------------------------


def _bbox_disjoint(s: Simplex, t: Simplex) -> bool:
    for i in range(s.ambient):
        if max(v[i] for v in s.vertices) < min(v[i] for v in t.vertices):
            return True
        if max(v[i] for v in t.vertices) < min(v[i] for v in s.vertices):
            return True
    return False


def intersection_vertices(s: Simplex, t: Simplex) -> set:
    """Vertices of the polytope ``s ∩ t``.

    Every vertex of the intersection is the unique common point of aff(F) and
    aff(G) for some faces F of s and G of t, so enumerating face pairs finds
    all of them.
    """
    if _bbox_disjoint(s, t):
        return set()
    m = s.ambient
    found = set()
    fs = [c for k in range(1, s.dim + 2) for c in combinations(s.vertices, k)]
    gs = [c for k in range(1, t.dim + 2) for c in combinations(t.vertices, k)]
    for F in fs:
        for G in gs:
            ncol = len(F) + len(G)
            if ncol > m + 2:
                continue
            A = [[f[i] for f in F] + [-g[i] for g in G] for i in range(m)]
            A.append([Fraction(1)] * len(F) + [Fraction(0)] * len(G))
            A.append([Fraction(0)] * len(F) + [Fraction(1)] * len(G))
            rhs = [Fraction(0)] * m + [Fraction(1), Fraction(1)]
            if lat.rank(A) != ncol:
                continue
            sol = lat.solve(A, rhs)
            if sol is None or any(x < 0 for x in sol):
                continue
            found.add(tuple(sum(a * f[i] for a, f in zip(sol, F)) for i in range(m)))
    return found


def validate_complex(C: PolytopalComplex, unit_cube: bool = False) -> list[str]:
    """Diagnostics for every violated complex invariant; empty when valid.

    With ``unit_cube`` the vertices must also have the form ``(x, 1)`` with
    ``x`` in the unit cube, as required of an input set W.
    """
    problems = []
    simps = C.simplices
    if unit_cube:
        for i, s in enumerate(simps):
            for v in s.vertices:
                if v[-1] != 1 or any(x < 0 or x > 1 for x in v[:-1]):
                    problems.append(f"simplex {i}: vertex {fmt_point(v)} is not a unit-cube point with last coordinate 1")
    for i, j in combinations(range(len(simps)), 2):
        s, t = simps[i], simps[j]
        shared = sorted(set(s.vertices) & set(t.vertices))
        face = Simplex(shared) if shared else None
        for p in sorted(intersection_vertices(s, t)):
            if face is None or p not in face:
                problems.append(
                    f"simplexes {i} and {j} do not meet in a common face (e.g. at {fmt_point(p)})"
                )
                break
    return problems


def contains(C: PolytopalComplex, p: Sequence) -> bool:
    p = lat.ratvec(p)
    return any(p in s for s in C.simplices)


# -- refinement -------------------------------------------------------------


def _coeffs(form) -> tuple:
    c = getattr(form, "coeffs", form)
    return tuple(Fraction(x) for x in c)


def _lift(p):
    return tuple(p) + (Fraction(1),)


def _facets(pts: list, k: int) -> list[list]:
    lifted = {p: _lift(p) for p in pts}
    seen = set()
    out = []
    for sub in combinations(pts, k):
        key = frozenset(sub)
        if any(key <= f for f in seen):
            continue
        if k > 1 and lat.rank([lat.vsub(q, sub[0]) for q in sub[1:]]) != k - 1:
            continue
        normal = None
        for y in lat.nullspace([lifted[q] for q in sub], len(pts[0]) + 1):
            if any(lat.dot(y, lifted[q]) != 0 for q in pts):
                normal = y
                break
        if normal is None:
            continue
        vals = [lat.dot(normal, lifted[q]) for q in pts]
        if all(x >= 0 for x in vals) or all(x <= 0 for x in vals):
            facet = frozenset(q for q, x in zip(pts, vals) if x == 0)
            if facet not in seen:
                seen.add(facet)
                out.append(sorted(facet))
    return out


def _affine_dim(pts) -> int:
    if len(pts) == 1:
        return 0
    return lat.rank([lat.vsub(p, pts[0]) for p in pts[1:]])


def pulling_triangulation(points: Iterable) -> list[tuple]:
    """Triangulate conv(points) by pulling the lexicographically first vertex.

    ``points`` must be the vertex set of the polytope.  The construction
    restricts to the same rule on every face, so neighbouring cells cut by the
    same hyperplanes triangulate their common faces identically.
    """
    pts = sorted(set(lat.ratvec(p) for p in points))
    k = _affine_dim(pts)
    if len(pts) == k + 1:
        return [tuple(pts)]
    apex = pts[0]
    out = []
    for F in _facets(pts, k):
        if apex in F:
            continue
        for tau in pulling_triangulation(F):
            out.append(tuple(sorted((apex,) + tau)))
    return out


def split_simplex(s: Simplex, form) -> list[Simplex]:
    c = _coeffs(form)
    vals = [lat.dot(c, v) for v in s.vertices]
    if all(x >= 0 for x in vals) or all(x <= 0 for x in vals):
        return [s]
    pos = [v for v, x in zip(s.vertices, vals) if x > 0]
    neg = [v for v, x in zip(s.vertices, vals) if x < 0]
    zero = [v for v, x in zip(s.vertices, vals) if x == 0]
    val = dict(zip(s.vertices, vals))
    cross = []
    for p in pos:
        for q in neg:
            t = val[p] / (val[p] - val[q])
            cross.append(tuple(a + t * (b - a) for a, b in zip(p, q)))
    pieces = pulling_triangulation(pos + zero + cross) + pulling_triangulation(neg + zero + cross)
    return [Simplex(p) for p in pieces]


def _sort_key(s: Simplex):
    return (s.dim, s.vertices)


def refine_by_hyperplanes(C: PolytopalComplex, forms: Sequence) -> PolytopalComplex:
    """Subdivide C so every simplex lies on one side of each hyperplane {f = 0}."""
    simps = list(C.simplices)
    for f in forms:
        c = _coeffs(f)
        if not any(c):
            continue
        simps = [piece for s in simps for piece in split_simplex(s, c)]
    return PolytopalComplex(tuple(sorted(simps, key=_sort_key)))


def refine_with_parents(C: PolytopalComplex, forms: Sequence) -> list[tuple[int, Simplex]]:
    """Like :func:`refine_by_hyperplanes` but tags each piece with its source simplex index."""
    tagged = [(i, s) for i, s in enumerate(C.simplices)]
    for f in forms:
        c = _coeffs(f)
        if not any(c):
            continue
        tagged = [(i, piece) for i, s in tagged for piece in split_simplex(s, c)]
    return sorted(tagged, key=lambda t: (t[0], _sort_key(t[1])))


# -- cone sections, faces, levels -------------------------------------------


class NotAUnitError(ValueError):
    pass


def section(C: PolytopalComplex, unit_value: Callable) -> PolytopalComplex:
    """Map every vertex v to v / unit_value(v); the unit must be linear on each simplex."""
    out = []
    for s in C.simplices:
        verts = []
        for v in s.vertices:
            u = Fraction(unit_value(v))
            if u <= 0:
                raise NotAUnitError(f"not a unit on W: value {u} at vertex {fmt_point(v)}")
            verts.append(tuple(x / u for x in v))
        out.append(Simplex(verts))
    return PolytopalComplex(tuple(out))


def cone_section(C: PolytopalComplex, u) -> PolytopalComplex:
    """The section Cone(C) ∩ {u = 1}, after refining C so ``u`` is linear per simplex.

    ``u`` is a Term or HomTerm; it is homogenized here if needed.
    """
    from .terms import HomTerm, affinize, homogenize

    hu = u if isinstance(u, HomTerm) else homogenize(u, C.ambient - 1)
    refined, _ = affinize(hu, C)
    return section(refined, hu)


def max_faces(C: PolytopalComplex, l: int) -> list[Simplex]:
    """Simplexes of dimension ``l`` not properly contained in another simplex of C."""
    cand = [s for s in C.simplices if s.dim == l]
    return [
        s for s in cand
        if not any(t is not s and t.dim > l and s.is_face_of(t) for t in C.simplices)
    ]


@dataclass(frozen=True)
class LevelPartition:
    levels: dict  # level -> list[Simplex]
    spans: dict  # level -> list of affine span keys

    @property
    def nonempty_levels(self) -> list[int]:
        return sorted(self.levels)


def local_dim_partition(C: PolytopalComplex) -> LevelPartition:
    levels, spans = {}, {}
    for l in range(C.dim + 1):
        faces = max_faces(C, l)
        if faces:
            levels[l] = faces
            keys = []
            for s in faces:
                k = affine_span_key(s.vertices)
                if k not in keys:
                    keys.append(k)
            spans[l] = keys
    return LevelPartition(levels, spans)


# -- unimodular transformations ----------------------------------------------


def affine_map(A: Sequence[Sequence[int]], c: Sequence[int]) -> tuple:
    """Homogeneous matrix of ``x -> A x + c``."""
    n = len(A)
    rows = [tuple(A[i]) + (c[i],) for i in range(n)]
    rows.append(tuple([0] * n + [1]))
    return tuple(rows)


def transform_problem(C: PolytopalComplex, T: Sequence[Sequence[int]]) -> PolytopalComplex:
    """Image of C under the integer matrix T (acting on homogeneous coordinates)."""
    if abs(lat.det(T)) != 1:
        raise ValueError("transformation is not unimodular")
    return PolytopalComplex(tuple(Simplex([lat.matvec(T, v) for v in s.vertices]) for s in C.simplices))
