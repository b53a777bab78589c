"""Terms of the l-group / hoop language and their homogeneous correspondents.

Concrete syntax::

    x1 \\/ (1 - 2*x1)        join of x1 and 1 - 2 x1
    x1 /\\ x2                meet
    x1 -. x2                 truncated difference max(0, x1 - x2)

``\\/`` and ``/\\`` bind looser than ``+``, ``-``, ``-.``, which bind looser
than the integer prefix ``k*``.  Printing is fully parenthesized so that
``parse(str(t)) == t``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import geometry as geo
from . import lattice as lat


class TermSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<HERE>{text[pos:]}")
        self.pos = pos


# -- AST ----------------------------------------------------------------------


class Term:
    __slots__ = ()

    def __repr__(self):
        return f"Term({str(self)!r})"


@dataclass(frozen=True, repr=False)
class Var(Term):
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True, repr=False)
class One(Term):
    def __str__(self):
        return "1"


@dataclass(frozen=True, repr=False)
class Scale(Term):
    k: int
    arg: Term

    def __str__(self):
        return f"({self.k}*{self.arg})"


@dataclass(frozen=True, repr=False)
class _Binary(Term):
    left: Term
    right: Term
    op = ""

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


class Add(_Binary):
    op = "+"


class Sub(_Binary):
    op = "-"


class Monus(_Binary):
    op = "-."


class Join(_Binary):
    op = "\\/"


class Meet(_Binary):
    op = "/\\"


_ADDITIVE = {"+": Add, "-": Sub, "-.": Monus}
_LATTICE = {"\\/": Join, "/\\": Meet}

_TOKEN = re.compile(r"(x\d+)|(\d+)|(-\.|\\/|/\\|[-+*()])")


def _tokenize(text: str):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError("unexpected character", text, pos)
        toks.append((m.group(), m.lastindex, pos))
        pos = m.end()
    toks.append(("", 0, len(text)))
    return toks


class _Parser:
    def __init__(self, text, nvars):
        self.text = text
        self.nvars = nvars
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg):
        raise TermSyntaxError(msg, self.text, self.peek()[2])

    def expect(self, s):
        if self.peek()[0] != s:
            self.error(f"expected {s!r}")
        self.take()

    def parse(self):
        t = self.lattice()
        if self.peek()[1] != 0:
            self.error("unexpected token")
        return t

    def lattice(self):
        t = self.additive()
        while self.peek()[0] in _LATTICE:
            op = self.take()[0]
            t = _LATTICE[op](t, self.additive())
        return t

    def additive(self):
        t = self.term()
        while self.peek()[0] in _ADDITIVE:
            op = self.take()[0]
            t = _ADDITIVE[op](t, self.term())
        return t

    def term(self):
        tok, kind, pos = self.peek()
        if tok == "-":
            self.take()
            tok2, kind2, _ = self.peek()
            if kind2 == 2:
                self.take()
                k = int(tok2)
                if self.peek()[0] == "*":
                    self.take()
                    return Scale(-k, self.term())
                return Scale(-k, One())
            return Scale(-1, self.term())
        if kind == 2:
            self.take()
            k = int(tok)
            if self.peek()[0] == "*":
                self.take()
                return Scale(k, self.term())
            return One() if k == 1 else Scale(k, One())
        return self.factor()

    def factor(self):
        tok, kind, pos = self.peek()
        if kind == 1:
            self.take()
            i = int(tok[1:])
            if i < 1:
                raise TermSyntaxError("variable indices start at 1", self.text, pos)
            if self.nvars is not None and i > self.nvars:
                raise TermSyntaxError(
                    f"variable x{i} exceeds the ambient dimension {self.nvars}", self.text, pos
                )
            return Var(i)
        if tok == "(":
            self.take()
            t = self.lattice()
            self.expect(")")
            return t
        self.error("expected a variable, an integer, or '('")


def parse(text: str, nvars: int | None = None) -> Term:
    """Parse a term over the variables ``x1..x{nvars}``."""
    return _Parser(text, nvars).parse()


def substitute(t: Term, mapping: dict) -> Term:
    """Replace variables ``x_i`` by ``mapping[i]``."""
    if isinstance(t, Var):
        return mapping.get(t.index, t)
    if isinstance(t, One):
        return t
    if isinstance(t, Scale):
        return Scale(t.k, substitute(t.arg, mapping))
    return type(t)(substitute(t.left, mapping), substitute(t.right, mapping))


def max_var(t: Term) -> int:
    if isinstance(t, Var):
        return t.index
    if isinstance(t, One):
        return 0
    if isinstance(t, Scale):
        return max_var(t.arg)
    return max(max_var(t.left), max_var(t.right))


def is_hoop_term(t: Term) -> bool:
    """True if ``t`` avoids unrestricted subtraction and negative scalars."""
    if isinstance(t, (Var, One)):
        return True
    if isinstance(t, Scale):
        return t.k >= 0 and is_hoop_term(t.arg)
    if isinstance(t, Sub):
        return False
    return is_hoop_term(t.left) and is_hoop_term(t.right)


# -- evaluation -------------------------------------------------------------------


def _eval(t: Term, v, one):
    if isinstance(t, Var):
        return v[t.index - 1]
    if isinstance(t, One):
        return one
    if isinstance(t, Scale):
        return t.k * _eval(t.arg, v, one)
    a = _eval(t.left, v, one)
    b = _eval(t.right, v, one)
    if isinstance(t, Add):
        return a + b
    if isinstance(t, Sub):
        return a - b
    if isinstance(t, Monus):
        return max(a - b, 0)
    if isinstance(t, Join):
        return max(a, b)
    return min(a, b)


def evaluate(t: Term, x: Sequence) -> Fraction:
    """Value of ``t`` as a function on R^n (the constant 1 is 1)."""
    return Fraction(_eval(t, lat.ratvec(x), Fraction(1)))


@dataclass(frozen=True)
class LinearForm:
    """Integer linear form on R^(n+1)."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(self.coeffs)
        if any(Fraction(x).denominator != 1 for x in c):
            raise ValueError(f"non-integer coefficients {c}")
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    def __call__(self, v):
        return sum((a * x for a, x in zip(self.coeffs, v)), Fraction(0))

    def __add__(self, other):
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return LinearForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scaled(self, k: int):
        return LinearForm(tuple(k * a for a in self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def normalized(self):
        """Primitive representative with positive leading coefficient (same hyperplane)."""
        g = lat.gcd_vec(self.coeffs)
        if g == 0:
            return self
        c = [a // g for a in self.coeffs]
        lead = next(a for a in c if a)
        if lead < 0:
            c = [-a for a in c]
        return LinearForm(tuple(c))

    @staticmethod
    def zero(m):
        return LinearForm((0,) * m)

    @staticmethod
    def unit(i, m):
        return LinearForm(tuple(int(j == i) for j in range(m)))

    def __str__(self):
        parts = [f"{a}*x{i + 1}" for i, a in enumerate(self.coeffs) if a]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomTerm:
    """Homogeneous correspondent: ``term`` over x1..x{n+1} with 1 replaced by x{n+1}."""

    term: Term
    nvars: int  # n; the ambient space is R^(n+1)

    @property
    def ambient(self):
        return self.nvars + 1

    def __call__(self, v) -> Fraction:
        return Fraction(_eval(self.term, v, None))

    def hyperplanes(self) -> list[LinearForm]:
        return comparison_forms(self)

    def __str__(self):
        return str(self.term)


def homogenize(t: Term, nvars: int) -> HomTerm:
    if max_var(t) > nvars:
        raise ValueError(f"term {t} uses variables beyond x{nvars}")
    return HomTerm(_replace_one(t, Var(nvars + 1)), nvars)


def _replace_one(t, repl):
    if isinstance(t, One):
        return repl
    if isinstance(t, Var):
        return t
    if isinstance(t, Scale):
        return Scale(t.k, _replace_one(t.arg, repl))
    return type(t)(_replace_one(t.left, repl), _replace_one(t.right, repl))


def eval_hom(t: HomTerm, v) -> Fraction:
    return t(lat.ratvec(v))


# -- linear pieces and affinization ---------------------------------------------


def _pieces(t: Term, m: int) -> frozenset:
    if isinstance(t, Var):
        return frozenset([LinearForm.unit(t.index - 1, m)])
    if isinstance(t, One):
        raise ValueError("candidate pieces need a homogenized term")
    if isinstance(t, Scale):
        return frozenset(p.scaled(t.k) for p in _pieces(t.arg, m))
    a, b = _pieces(t.left, m), _pieces(t.right, m)
    if isinstance(t, Add):
        return frozenset(p + q for p in a for q in b)
    if isinstance(t, Sub):
        return frozenset(p - q for p in a for q in b)
    if isinstance(t, Monus):
        return frozenset([p - q for p in a for q in b] + [LinearForm.zero(m)])
    return a | b


def candidate_pieces(t: HomTerm) -> frozenset:
    """Integer linear forms among which ``t`` takes its value at every point."""
    return _pieces(t.term, t.ambient)


def _comparisons(t: Term, m: int, out: set):
    if isinstance(t, (Var, One)):
        return
    if isinstance(t, Scale):
        _comparisons(t.arg, m, out)
        return
    _comparisons(t.left, m, out)
    _comparisons(t.right, m, out)
    if isinstance(t, (Join, Meet, Monus)):
        for p in _pieces(t.left, m):
            for q in _pieces(t.right, m):
                d = p - q
                if not d.is_zero():
                    out.add(d.normalized())


def comparison_forms(t: HomTerm) -> list[LinearForm]:
    """Hyperplanes {p - q = 0} for piece pairs meeting at a join, meet, or monus.

    On any cell lying on one side of all of them every comparison in the term
    has constant sign, hence the term is linear there.
    """
    out: set = set()
    _comparisons(t.term, t.ambient, out)
    return sorted(out, key=lambda f: f.coeffs)


def affinize(t: HomTerm, C: geo.PolytopalComplex):
    """Refine C until ``t`` is a single linear form on each simplex.

    Returns the refined complex and the per-simplex forms (aligned with
    ``refined.simplices``).
    """
    refined = geo.refine_by_hyperplanes(C, comparison_forms(t))
    pieces = sorted(candidate_pieces(t), key=lambda f: f.coeffs)
    table = []
    for s in refined.simplices:
        vals = [t(v) for v in s.vertices]
        form = next((f for f in pieces if all(f(v) == x for v, x in zip(s.vertices, vals))), None)
        if form is None or form(s.barycenter()) != t(s.barycenter()):
            raise AssertionError(f"term {t} is not linear on refined simplex {s}")
        table.append(form)
    return refined, table


def unit_violation(t, C: geo.PolytopalComplex):
    """First refined vertex where the homogenized ``t`` is not strictly positive, else None."""
    ht = t if isinstance(t, HomTerm) else homogenize(t, C.ambient - 1)
    refined = geo.refine_by_hyperplanes(C, comparison_forms(ht))
    for v in refined.vertices():
        if ht(v) <= 0:
            return v
    return None


def check_unit(t, C: geo.PolytopalComplex) -> bool:
    return unit_violation(t, C) is None


# -- per-simplex elements ---------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseForm:
    """A homogeneous piecewise-linear element given by one integer form per simplex of W.

    Simplexes missing from ``forms`` carry the zero form.
    """

    complex: geo.PolytopalComplex
    forms: tuple  # tuple of (simplex index, LinearForm), sorted

    @classmethod
    def from_dict(cls, C, forms: dict):
        items = []
        for k, f in forms.items():
            i = int(k)
            if not 0 <= i < len(C.simplices):
                raise ValueError(f"no simplex with id {i}")
            f = f if isinstance(f, LinearForm) else LinearForm(tuple(f))
            if len(f.coeffs) != C.ambient:
                raise ValueError(f"simplex {i}: expected {C.ambient} coefficients, got {len(f.coeffs)}")
            items.append((i, f))
        return cls(C, tuple(sorted(items, key=lambda t: t[0])))

    def form_on(self, i: int) -> LinearForm:
        for j, f in self.forms:
            if j == i:
                return f
        return LinearForm.zero(self.complex.ambient)

    def __call__(self, v) -> Fraction:
        v = lat.ratvec(v)
        top = v[-1]
        if top <= 0:
            raise ValueError(f"point {geo.fmt_point(v)} is not in Cone(W)")
        p = tuple(x / top for x in v)
        for i, s in enumerate(self.complex.simplices):
            if p in s:
                return self.form_on(i)(v)
        raise ValueError(f"point {geo.fmt_point(v)} is not in Cone(W)")

    def hyperplanes(self) -> list:
        return []

    def disagreements(self) -> list[str]:
        """Shared vertices where adjacent simplex forms differ."""
        out = []
        simps = self.complex.simplices
        for i in range(len(simps)):
            for j in range(i + 1, len(simps)):
                for v in sorted(set(simps[i].vertices) & set(simps[j].vertices)):
                    if self.form_on(i)(v) != self.form_on(j)(v):
                        out.append(f"simplexes {i} and {j} disagree at {geo.fmt_point(v)}")
        return out


def as_element(h, nvars: int):
    """Callable on homogeneous points for a Term, HomTerm, or PiecewiseForm."""
    if isinstance(h, str):
        h = parse(h, nvars)
    if isinstance(h, Term):
        return homogenize(h, nvars)
    if isinstance(h, (HomTerm, PiecewiseForm, LinearForm)):
        return h
    raise TypeError(f"not an element: {h!r}")


def eval_array(t: HomTerm, X):
    """Float evaluation of a homogenized term on the rows of an ``(N, n+1)`` array."""
    import numpy as np

    X = np.asarray(X, dtype=float)

    def go(s):
        if isinstance(s, Var):
            return X[:, s.index - 1]
        if isinstance(s, One):
            raise ValueError("eval_array needs a homogenized term")
        if isinstance(s, Scale):
            return s.k * go(s.arg)
        a, b = go(s.left), go(s.right)
        if isinstance(s, Add):
            return a + b
        if isinstance(s, Sub):
            return a - b
        if isinstance(s, Monus):
            return np.maximum(a - b, 0.0)
        if isinstance(s, Join):
            return np.maximum(a, b)
        return np.minimum(a, b)

    return go(t.term)
