"""JSON ingestion and serialisation of measure specifications.

Grammar (every number is an integer or a ``"p/q"`` string)::

    {"atoms":   [[loc, wt], ...]}
    {"density": {"breakpoints": [0, ..., 1], "coeffs": [[c0, c1, ...], ...]}}
    {"cantor":  wt}
    {"scale":   [factor, <spec>]}
    {"sum":     [<spec>, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .exceptions import InvalidMeasure, SpecError
from .intervals import as_rational, format_rational
from .measures import Atoms, Cantor, Density, Measure, Scale, Sum

_KINDS = ("atoms", "density", "cantor", "scale", "sum")


def _number(value, path):
    if isinstance(value, float):
        raise SpecError(path, f"floats are not accepted, write {value!r} as an integer or 'p/q' string")
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(path, str(exc)) from None


def _nonnegative(value, path):
    q = _number(value, path)
    if q < 0:
        raise SpecError(path, f"must be nonnegative, got {format_rational(q)}")
    return q


def _list(value, path):
    if not isinstance(value, list):
        raise SpecError(path, f"expected a list, got {type(value).__name__}")
    return value


def parse_measure(doc, path: str = "$") -> Measure:
    """Build a :class:`Measure` from a decoded JSON document."""
    if not isinstance(doc, dict) or len(doc) != 1:
        raise SpecError(path, f"expected an object with exactly one of {', '.join(_KINDS)}")
    (kind, body), = doc.items()
    sub = f"{path}.{kind}"
    if kind == "atoms":
        pts = []
        for i, pair in enumerate(_list(body, sub)):
            if not isinstance(pair, list) or len(pair) != 2:
                raise SpecError(f"{sub}[{i}]", "expected [location, weight]")
            loc = _number(pair[0], f"{sub}[{i}][0]")
            if not (0 <= loc < 1):
                raise SpecError(f"{sub}[{i}][0]", "atom location must lie in [0, 1)")
            pts.append((loc, _nonnegative(pair[1], f"{sub}[{i}][1]")))
        return _wrap(Atoms, sub, tuple(pts))
    if kind == "density":
        if not isinstance(body, dict) or set(body) != {"breakpoints", "coeffs"}:
            raise SpecError(sub, "expected {'breakpoints': [...], 'coeffs': [[...], ...]}")
        bps = tuple(_number(b, f"{sub}.breakpoints[{i}]") for i, b in enumerate(_list(body["breakpoints"], f"{sub}.breakpoints")))
        rows = []
        for i, row in enumerate(_list(body["coeffs"], f"{sub}.coeffs")):
            rows.append(tuple(_number(c, f"{sub}.coeffs[{i}][{k}]") for k, c in enumerate(_list(row, f"{sub}.coeffs[{i}]"))))
        return _wrap(Density, sub, bps, tuple(rows))
    if kind == "cantor":
        return Cantor(_nonnegative(body, sub))
    if kind == "scale":
        body = _list(body, sub)
        if len(body) != 2:
            raise SpecError(sub, "expected [factor, spec]")
        return Scale(_nonnegative(body[0], f"{sub}[0]"), parse_measure(body[1], f"{sub}[1]"))
    if kind == "sum":
        return Sum(tuple(parse_measure(p, f"{sub}[{i}]") for i, p in enumerate(_list(body, sub))))
    raise SpecError(path, f"unknown measure kind {kind!r}")


def _wrap(cls, path, *args):
    try:
        return cls(*args)
    except InvalidMeasure as exc:
        raise SpecError(path, str(exc)) from None


def measure_to_json(m: Measure):
    """Inverse of :func:`parse_measure`; numbers are emitted as strings."""
    f = format_rational
    if isinstance(m, Atoms):
        return {"atoms": [[f(loc), f(wt)] for loc, wt in m.points]}
    if isinstance(m, Density):
        return {"density": {"breakpoints": [f(b) for b in m.breakpoints], "coeffs": [[f(c) for c in row] for row in m.coeffs]}}
    if isinstance(m, Cantor):
        return {"cantor": f(m.weight)}
    if isinstance(m, Scale):
        return {"scale": [f(m.factor), measure_to_json(m.inner)]}
    if isinstance(m, Sum):
        return {"sum": [measure_to_json(p) for p in m.parts]}
    raise TypeError(f"cannot serialise {type(m).__name__}")


def loads_measure(text: str) -> Measure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"invalid JSON: {exc}") from None
    return parse_measure(doc)


def load_measure(path) -> Measure:
    return loads_measure(Path(path).read_text())


def dumps_measure(m: Measure) -> str:
    return json.dumps(measure_to_json(m))
