"""Problem files: a complex W, named terms, units and per-simplex elements.

Schema (JSON)::

    {
      "n": 2,
      "complex": [[["0", "1/3", "1"], ["1/3", "1", "1"], ...], ...],
      "terms": {"one": "1", "x1": "x1"},
      "units": ["one"],
      "elements": {"hat": {"2": [0, -1, 1]}}
    }

Coordinates are homogeneous rational strings whose last entry is "1".
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import geometry as geo
from . import lattice as lat
from . import terms as tm

FIXTURES = ("example28", "farey", "square", "twopoint")


class ProblemError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    complex: geo.PolytopalComplex
    terms: dict
    units: tuple
    elements: dict = field(default_factory=dict)
    source: str = ""
    digest: str = ""

    def term(self, name: str):
        if name in self.terms:
            return self.terms[name]
        if name in self.elements:
            return self.elements[name]
        known = sorted(self.terms) + sorted(self.elements)
        raise ProblemError([f"unknown term or element {name!r} (known: {', '.join(known)})"])

    def unit(self, name: str):
        if name not in self.terms:
            raise ProblemError([f"unknown unit {name!r}"])
        if name not in self.units:
            raise ProblemError([f"term {name!r} is not declared as a unit"])
        return self.terms[name]


def fixture_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    return Path(str(resources.files("unitstate") / "fixtures" / f"{stem}.json"))


def resolve(path) -> Path:
    """A filesystem path, or the bundled fixture of that name."""
    p = Path(path)
    if p.exists():
        return p
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if p.parent == Path(".") and stem in FIXTURES:
        return fixture_path(stem)
    raise ProblemError([f"problem file not found: {path}"])


def _coords(raw, where: str, m: int, errs: list):
    if not isinstance(raw, list) or len(raw) != m:
        errs.append(f"{where}: expected {m} coordinates, got {raw!r}")
        return None
    try:
        return lat.ratvec(raw)
    except (ValueError, TypeError, ZeroDivisionError):
        errs.append(f"{where}: coordinates must be rational strings, got {raw!r}")
        return None


def parse_problem(data: dict, source: str = "", digest: str = "") -> ProblemSpec:
    errs: list[str] = []
    if not isinstance(data, dict):
        raise ProblemError(["top level must be a JSON object"])
    n = data.get("n")
    if not isinstance(n, int) or n < 0:
        raise ProblemError([f"'n' must be a nonnegative integer, got {n!r}"])
    m = n + 1
    simps = []
    for i, s in enumerate(data.get("complex") or []):
        verts = [_coords(v, f"simplex {i} vertex {j}", m, errs) for j, v in enumerate(s)]
        if any(v is None for v in verts):
            continue
        try:
            simps.append(geo.Simplex(verts))
        except ValueError as e:
            errs.append(f"simplex {i}: {e}")
    if not simps:
        errs.append("'complex' must list at least one simplex")
    if errs:
        raise ProblemError(errs)
    C = geo.PolytopalComplex(tuple(simps))
    # keep the file's simplex order so element ids refer to it
    errs.extend(geo.validate_complex(C, unit_cube=True))

    terms = {}
    for name, text in (data.get("terms") or {}).items():
        try:
            terms[name] = tm.parse(str(text), n)
        except tm.TermSyntaxError as e:
            errs.append(f"term {name!r}: {e}")
    units = tuple(data.get("units") or ())
    for name in units:
        if name not in terms:
            errs.append(f"unit {name!r} is not a named term")
            continue
        if errs:
            continue
        bad = tm.unit_violation(terms[name], C)
        if bad is not None:
            val = tm.homogenize(terms[name], n)(bad)
            errs.append(f"unit {name!r}: not a unit on W: value {val} at vertex {geo.fmt_point(bad)}")

    elements = {}
    for name, forms in (data.get("elements") or {}).items():
        if name in terms:
            errs.append(f"element {name!r} clashes with a term name")
            continue
        try:
            el = tm.PiecewiseForm.from_dict(C, forms)
        except (ValueError, TypeError) as e:
            errs.append(f"element {name!r}: {e}")
            continue
        for msg in el.disagreements():
            errs.append(f"element {name!r}: {msg}")
        elements[name] = el
    if errs:
        raise ProblemError(errs)
    return ProblemSpec(n, C, terms, units, elements, source, digest)


def load(path) -> ProblemSpec:
    p = resolve(path)
    raw = p.read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ProblemError([f"{p}: JSON parse error at line {e.lineno} column {e.colno}: {e.msg}"]) from None
    return parse_problem(data, str(p), hashlib.sha256(raw).hexdigest())
