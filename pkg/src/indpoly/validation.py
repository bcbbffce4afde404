"""Input validation helpers shared by the functional API and the estimators."""
from __future__ import annotations

from collections.abc import Mapping
from numbers import Real

import numpy as np

from .errors import InvalidInputError
from .graph import Graph, build_graph


def check_graph(g) -> Graph:
    """Coerce ``g`` to a :class:`Graph`.

    Accepts a :class:`Graph`, a mapping ``{"n": int, "edges": [[u, v], ...]}``
    or any object exposing networkx-style ``nodes`` and ``edges`` (nodes are
    mapped to dense indices in sorted order).
    """
    if isinstance(g, Graph):
        return g
    if isinstance(g, Mapping):
        try:
            return build_graph(int(g["n"]), g.get("edges", []))
        except KeyError as exc:
            raise InvalidInputError(f"graph mapping is missing {exc}") from None
    if hasattr(g, "nodes") and hasattr(g, "edges"):
        nodes = sorted(g.nodes)
        index = {v: i for i, v in enumerate(nodes)}
        return build_graph(len(nodes), [(index[u], index[v]) for u, v in g.edges])
    raise InvalidInputError(f"cannot interpret {type(g).__name__} as a graph")


def check_activities(p, n: int) -> np.ndarray:
    """Return ``p`` as a complex vector of length ``n`` with finite entries."""
    arr = np.asarray(p, dtype=complex).reshape(-1)
    if arr.shape[0] != n:
        raise InvalidInputError(f"expected {n} activities, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("activities must be finite")
    return arr


def check_magnitudes(p, n: int, *, strictly_positive: bool = False) -> np.ndarray:
    """Return a real vector of length ``n`` with entries in ``[0, 1)``.

    With ``strictly_positive`` the entries must lie in ``(0, 1)``.
    """
    arr = np.asarray(p)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise InvalidInputError("magnitude vector must be real; pass np.abs(p)")
        arr = arr.real
    arr = np.asarray(arr, dtype=float).reshape(-1)
    if arr.shape[0] != n:
        raise InvalidInputError(f"expected {n} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("entries must be finite")
    low_ok = arr > 0 if strictly_positive else arr >= 0
    if not np.all(low_ok) or not np.all(arr < 1):
        interval = "(0, 1)" if strictly_positive else "[0, 1)"
        raise InvalidInputError(f"entries must lie in {interval}")
    return arr


def check_fraction(name: str, value, *, allow_zero: bool = False) -> float:
    """Validate a scalar in ``(0, 1]`` (or ``[0, 1]`` with ``allow_zero``)."""
    if not isinstance(value, Real):
        raise InvalidInputError(f"{name} must be a real number")
    value = float(value)
    low_ok = value >= 0 if allow_zero else value > 0
    if not (low_ok and value <= 1):
        raise InvalidInputError(f"{name} must lie in {'[0' if allow_zero else '(0'}, 1], got {value}")
    return value


def check_vertex(g: Graph, v) -> int:
    v = int(v)
    if not 0 <= v < g.n:
        raise InvalidInputError(f"vertex {v} out of range for n={g.n}")
    return v


def check_order(g: Graph, order) -> list[int]:
    """Validate an elimination order (a permutation of ``range(g.n)``)."""
    if order is None:
        return list(range(g.n))
    order = [int(v) for v in order]
    if sorted(order) != list(range(g.n)):
        raise InvalidInputError("order must be a permutation of the vertices")
    return order
