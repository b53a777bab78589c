"""Exact rational vectors and integer lattice algebra.

Vectors are plain tuples of :class:`fractions.Fraction` (or ``int``), matrices
are tuples of row tuples.  Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

RatVec = tuple  # tuple[Fraction, ...]
IntVec = tuple  # tuple[int, ...]


def rat(x) -> Fraction:
    """Coerce ``x`` (int, Fraction, or a ``"p/q"`` string) to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def ratvec(xs) -> RatVec:
    return tuple(rat(x) for x in xs)


def format_rat(x) -> str:
    return str(Fraction(x))


def denominator(w: Sequence) -> int:
    """Least ``b >= 1`` with ``b*w`` integral."""
    b = 1
    for x in w:
        b = lcm(b, Fraction(x).denominator)
    return b


def gcd_vec(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def is_primitive(v: Sequence[int]) -> bool:
    g = gcd_vec(v)
    if g == 0:
        raise ValueError("undefined gcd normalization: zero vector")
    return g == 1


def primitive_of(w: Sequence) -> IntVec:
    """The primitive integer vector on the ray through the nonzero rational ``w``."""
    b = denominator(w)
    v = [int(Fraction(x) * b) for x in w]
    g = gcd_vec(v)
    if g == 0:
        raise ValueError("undefined gcd normalization: zero vector")
    return tuple(x // g for x in v)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0)) if a else Fraction(0)


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vscale(k, a):
    return tuple(k * x for x in a)


# -- rational linear algebra ------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Rational basis of ``{y : rows @ y = 0}``."""
    if ncols is None:
        ncols = len(rows[0])
    red, piv = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        y = [Fraction(0)] * ncols
        y[f] = Fraction(1)
        for row, c in zip(red, piv):
            y[c] = -row[f]
        basis.append(tuple(y))
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> tuple | None:
    """One exact solution x of ``A x = b`` (A is m x k), or None if inconsistent.

    When the solution is not unique, free variables are set to zero.
    """
    k = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    red, piv = rref(aug)
    if k in piv:
        return None
    x = [Fraction(0)] * k
    for row, c in zip(red, piv):
        x[c] = row[k]
    return tuple(x)


def det(M: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in M]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def transpose(M):
    return tuple(zip(*M))


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def identity(n: int):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def to_integer_rows(rows) -> list[tuple[int, ...]]:
    """Scale each rational row to a primitive integer row (zero rows dropped)."""
    out = []
    for r in rows:
        if any(x != 0 for x in r):
            out.append(primitive_of(r))
    return out


# -- Hermite normal form ----------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(A: Sequence[Sequence[int]]) -> tuple[tuple, tuple]:
    """Column Hermite normal form.

    Returns ``(H, U)`` with ``H = A @ U``, ``U`` unimodular, and ``H`` lower
    triangular in the column sense: each nonzero column has a positive pivot
    strictly below the pivot of the previous column, entries to the left of
    a pivot are reduced into ``[0, pivot)``, and zero columns come last.
    """
    m = len(A)
    if m == 0:
        raise ValueError("hnf of an empty matrix")
    k = len(A[0])
    H = [[int(x) for x in row] for row in A]
    U = [[int(i == j) for j in range(k)] for i in range(k)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for M in (H, U):
            for row in M:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y

    col = 0
    for r in range(m):
        if col == k:
            break
        for j in range(col + 1, k):
            b = H[r][j]
            if b == 0:
                continue
            a = H[r][col]
            g, x, y = _xgcd(a, b)
            colop(col, j, x, y, -b // g, a // g)
        p = H[r][col]
        if p == 0:
            continue
        if p < 0:
            for M in (H, U):
                for row in M:
                    row[col] = -row[col]
            p = -p
        for j in range(col):
            q = H[r][j] // p
            if q:
                for M in (H, U):
                    for row in M:
                        row[j] -= q * row[col]
        col += 1
    return tuple(map(tuple, H)), tuple(map(tuple, U))


def integer_kernel(N: Sequence[Sequence[int]], ncols: int) -> list[IntVec]:
    """Z-basis of ``{x in Z^ncols : N x = 0}``."""
    if not N:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    H, U = hnf(N)
    r = sum(1 for j in range(ncols) if any(H[i][j] for i in range(len(H))))
    return [tuple(U[i][j] for i in range(ncols)) for j in range(r, ncols)]


def annihilator(V: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    """Integer rows spanning the forms vanishing on span(V)."""
    rows = [v for v in V if any(x != 0 for x in v)]
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    return to_integer_rows(nullspace(rows, ncols))


def lattice_basis(V: Sequence[Sequence], ncols: int | None = None) -> list[IntVec]:
    """Z-basis of ``Z^m ∩ span(V)``; empty when the span is zero."""
    if ncols is None:
        if not V:
            raise ValueError("ambient dimension unknown for an empty spanning set")
        ncols = len(V[0])
    if not any(any(x != 0 for x in v) for v in V):
        return []
    return integer_kernel(annihilator(V, ncols), ncols)


def same_lattice(B1: Sequence[Sequence[int]], B2: Sequence[Sequence[int]]) -> bool:
    """True iff the row sets generate the same subgroup of Z^m."""
    if not B1 or not B2:
        return not B1 and not B2
    h1 = hnf(transpose(B1))[0]
    h2 = hnf(transpose(B2))[0]

    def nonzero_cols(H):
        cols = transpose(H)
        return [c for c in cols if any(c)]

    return nonzero_cols(h1) == nonzero_cols(h2)


def _affine_congruence(p0: Sequence, directions: Sequence[Sequence]):
    """Data for integer points of dilates of ``p0 + span(directions)``.

    Returns ``(y, Ur)`` where ``b*(p0 + span) ∩ Z^m`` is nonempty iff ``b*y``
    is integral, and then ``Ur @ (b*y)`` is such an integer point.
    """
    m = len(p0)
    N = annihilator(directions, m)
    if not N:
        return (), ()
    H, U = hnf(N)
    r = len(N)
    c = [dot(row, p0) for row in N]
    # H[:, :r] is lower triangular and invertible
    y = []
    for i in range(r):
        s = c[i] - sum(H[i][j] * y[j] for j in range(i))
        y.append(Fraction(s) / H[i][i])
    Ur = tuple(tuple(U[i][j] for j in range(r)) for i in range(m))
    return tuple(y), Ur


def span_index(p0: Sequence, directions: Sequence[Sequence] = ()) -> int:
    """Least ``b >= 1`` such that ``b*A`` meets Z^m, for ``A = p0 + span(directions)``."""
    p0 = ratvec(p0)
    y, _ = _affine_congruence(p0, [ratvec(d) for d in directions])
    return denominator(y) if y else 1


def integer_point(p0: Sequence, directions: Sequence[Sequence], b: int) -> IntVec:
    """An integer point of ``b*(p0 + span(directions))``; ``b`` must be a multiple of the index."""
    p0 = ratvec(p0)
    y, Ur = _affine_congruence(p0, [ratvec(d) for d in directions])
    if not y:
        return tuple(0 for _ in p0)
    by = [b * x for x in y]
    if any(Fraction(x).denominator != 1 for x in by):
        raise ValueError(f"{b} is not a multiple of the index")
    return tuple(int(sum(Ur[i][j] * by[j] for j in range(len(by)))) for i in range(len(p0)))
