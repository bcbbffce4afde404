"""Graph and instance generators for tests, benchmarks and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph, build_graph
from .lll import Event, VariableModel
from .univariate import lambda_prime_c


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(v, v + 1) for v in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        return path_graph(n)
    return build_graph(n, [(v, (v + 1) % n) for v in range(n)])


def grid_graph(rows: int, cols: int) -> Graph:
    """Rows-by-cols grid, vertex ``r * cols + c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(rows * cols, edges)


def random_bounded_degree_graph(n: int, max_degree: int, rng, density: float = 0.5) -> Graph:
    """Random graph with maximum degree at most ``max_degree``.

    Candidate edges are visited in random order and accepted with
    probability ``density`` while both endpoints have spare degree.
    """
    rng = np.random.default_rng(rng)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = rng.permutation(len(pairs))
    deg = [0] * n
    edges = []
    for k in order:
        u, v = pairs[k]
        if deg[u] < max_degree and deg[v] < max_degree and rng.random() < density:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return build_graph(n, edges)


def random_activities(n: int, magnitude, rng, complex_phase: bool = False) -> np.ndarray:
    """Activities of fixed magnitude (scalar or per-vertex) with optional random phases."""
    rng = np.random.default_rng(rng)
    mags = np.broadcast_to(np.asarray(magnitude, dtype=float), (n,))
    if not complex_phase:
        return mags.astype(complex)
    return mags * np.exp(2j * np.pi * rng.random(n))


def random_bounded_cnf(
    m: int,
    n_clauses: int,
    rng,
    width: int = 3,
    max_occurrence: int = 2,
) -> list[list[int]]:
    """Random ``width``-CNF over ``m`` variables, each variable used in at most ``max_occurrence`` clauses.

    Returns DIMACS-style literal lists; fewer clauses are produced when the
    occurrence budget runs out.
    """
    rng = np.random.default_rng(rng)
    uses = [0] * m
    clauses = []
    for _ in range(n_clauses):
        free = [v for v in range(m) if uses[v] < max_occurrence]
        if len(free) < width:
            break
        chosen = rng.choice(free, size=width, replace=False)
        lits = []
        for v in sorted(int(c) for c in chosen):
            uses[v] += 1
            lits.append((v + 1) if rng.random() < 0.5 else -(v + 1))
        clauses.append(lits)
    return clauses


def cnf_model(m: int, clauses: list[list[int]], z: Optional[np.ndarray] = None) -> VariableModel:
    z = np.full(m, 0.5) if z is None else z
    return VariableModel(m, z, [Event.from_clause(c) for c in clauses])


def four_event_path_model() -> VariableModel:
    """Fifteen fair bits and four events whose dependency graph is a path.

    E1: bits 0..5 sum to 0, 2 or 6.  E2: bits 5, 6, 7 all zero.
    E3: bits 7, 8, 9 all one.  E4: bits 9..14 sum to 0, 2 or 6.
    Probabilities are (17/64, 1/8, 1/8, 17/64).
    """
    events = [
        Event.from_predicate(range(0, 6), lambda v: sum(v) in (0, 2, 6)),
        Event.from_predicate((5, 6, 7), lambda v: v == (0, 0, 0)),
        Event.from_predicate((7, 8, 9), lambda v: v == (1, 1, 1)),
        Event.from_predicate(range(9, 15), lambda v: sum(v) in (0, 2, 6)),
    ]
    return VariableModel(15, np.full(15, 0.5), events)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    p: np.ndarray
    max_degree: int


def random_corpus(
    count: int,
    seed: int = 0,
    n_range: tuple[int, int] = (2, 12),
    max_degree: int = 4,
    magnitude_factor: float = 0.5,
) -> list[Instance]:
    """Seeded graphs with at least one edge and activities of magnitude ``factor * lambda_prime_c(d)``.

    Even-indexed instances get real positive activities, odd-indexed ones
    random complex phases.
    """
    rng = np.random.default_rng(seed)
    out = []
    k = 0
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        cap = int(rng.integers(1, max_degree + 1))
        g = random_bounded_degree_graph(n, cap, rng, density=float(rng.uniform(0.3, 0.9)))
        if g.edge_count == 0:
            continue
        d = g.max_degree
        p = random_activities(n, magnitude_factor * lambda_prime_c(d), rng, complex_phase=bool(k % 2))
        out.append(Instance(g, p, d))
        k += 1
    return out
