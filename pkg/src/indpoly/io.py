"""File formats: graph, activity, order and model JSON, DIMACS CNF, and output encoding.

Graph:       {"n": 3, "edges": [[0, 1], [1, 2]]}
Activities:  [0.2, {"re": 0.1, "im": -0.3}, 0.0]
Order:       [2, 0, 1]
Model:       {"m": 4, "z": [0.5, 0.5, 0.5, 0.5],
              "events": [{"clause": [1, -2, 3]},
                         {"scope": [0, 3], "table": [0, 0, 0, 1]}]}

In a model, ``z`` defaults to all 1/2; ``clause`` uses DIMACS literals
(1-based) and means "clause falsified"; ``table[key]`` is the event
indicator where bit ``k`` of ``key`` is the value of ``scope[k]``.

Floats are written with ``repr``, the shortest string that round-trips
the double exactly.
"""
from __future__ import annotations

import io as _io
import json
import os
from typing import Any, TextIO, Union

import numpy as np

from .errors import IndPolyError, ParseError
from .graph import Graph
from .lll import Event, VariableModel
from .validation import check_graph

PathOrFile = Union[str, "os.PathLike[str]", TextIO]


def _read_text(source: PathOrFile) -> str:
    if hasattr(source, "read"):
        return source.read()
    try:
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror}") from None


def _read_json(source: PathOrFile) -> Any:
    text = _read_text(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def parse_graph(obj: Any) -> Graph:
    if not isinstance(obj, dict) or "n" not in obj:
        raise ParseError('graph must be an object with "n" and "edges"')
    edges = obj.get("edges", [])
    if not isinstance(obj["n"], int) or isinstance(obj["n"], bool):
        raise ParseError('"n" must be an integer')
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
        raise ParseError('"edges" must be a list of [u, v] pairs')
    try:
        return check_graph({"n": obj["n"], "edges": edges})
    except IndPolyError as exc:
        raise ParseError(str(exc)) from None


def load_graph(source: PathOrFile) -> Graph:
    return parse_graph(_read_json(source))


def decode_complex(item: Any) -> complex:
    if isinstance(item, bool):
        raise ParseError("booleans are not activities")
    if isinstance(item, (int, float)):
        return complex(item)
    if isinstance(item, dict) and set(item) <= {"re", "im"} and "re" in item:
        re, im = item["re"], item.get("im", 0.0)
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            return complex(re, im)
    raise ParseError(f"cannot read {item!r} as a real or {{'re', 'im'}} number")


def encode_complex(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def parse_activities(obj: Any, n: int) -> np.ndarray:
    if not isinstance(obj, list):
        raise ParseError("activities must be a JSON array")
    if len(obj) != n:
        raise ParseError(f"expected {n} activities, got {len(obj)}")
    return np.array([decode_complex(x) for x in obj], dtype=complex)


def load_activities(source: PathOrFile, n: int) -> np.ndarray:
    return parse_activities(_read_json(source), n)


def load_order(source: PathOrFile) -> list[int]:
    obj = _read_json(source)
    if not isinstance(obj, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in obj):
        raise ParseError("order must be a JSON array of vertex indices")
    return obj


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF into ``(variable_count, clauses)``.

    Comment lines start with ``c``; clauses may span lines and end with 0;
    a ``%`` line ends the clause section.
    """
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed problem line")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed problem line") from None
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before the problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(f"line {lineno}: literal {lit} exceeds variable count {header[0]}")
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing problem line")
    if current:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return header[0], clauses


def load_dimacs(source: PathOrFile) -> tuple[int, list[list[int]]]:
    return parse_dimacs(_read_text(source))


def cnf_to_model(m: int, clauses: list[list[int]], z=None) -> VariableModel:
    z = np.full(m, 0.5) if z is None else np.asarray(z, dtype=float)
    return VariableModel(m, z, [Event.from_clause(c) for c in clauses])


def parse_model(obj: Any) -> VariableModel:
    if not isinstance(obj, dict) or "m" not in obj or "events" not in obj:
        raise ParseError('model must be an object with "m" and "events"')
    m = obj["m"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise ParseError('"m" must be a nonnegative integer')
    z = obj.get("z", [0.5] * m)
    try:
        events = []
        for k, ev in enumerate(obj["events"]):
            if not isinstance(ev, dict):
                raise ParseError(f"event {k} must be an object")
            if "clause" in ev:
                events.append(Event.from_clause([int(x) for x in ev["clause"]]))
            elif "scope" in ev and "table" in ev:
                events.append(Event(tuple(int(v) for v in ev["scope"]), tuple(bool(b) for b in ev["table"])))
            else:
                raise ParseError(f'event {k} needs "clause" or "scope" and "table"')
        return VariableModel(m, np.asarray(z, dtype=float), events)
    except IndPolyError as exc:
        raise ParseError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed model: {exc}") from None


def load_model(source: PathOrFile) -> VariableModel:
    return parse_model(_read_json(source))


def model_to_dict(vm: VariableModel) -> dict:
    return {
        "m": vm.m,
        "z": [float(x) for x in vm.z],
        "events": [{"scope": list(ev.scope), "table": [int(b) for b in ev.table]} for ev in vm.events],
    }


def dumps(obj: Any) -> str:
    """Deterministic JSON (sorted keys; floats via repr)."""
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def rows_to_csv(header: list[str], rows: list[list[float]]) -> str:
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(format(float(v), ".17g") for v in row) + "\n")
    return buf.getvalue()
