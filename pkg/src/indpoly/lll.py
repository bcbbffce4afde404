"""Constructive Lovasz Local Lemma in the variable model.

``m`` independent binary variables with ``P[x_j = 1] = z_j`` drive a list of
events, each depending on a scope of variables.  Event probabilities are
multilinear in ``z`` and so is ``qb(V)(p(z))`` over the dependency graph, so
each fractional ``z_i`` can be pushed to 0 or 1 along the direction in which
``qb`` does not decrease.  Doing this for every variable yields an
assignment avoiding all events whenever ``p(z)`` is in the Shearer region.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .decay import DEFAULT_NODE_BUDGET, fptas_eval
from .errors import (
    GraphTooLargeError,
    InvalidInputError,
    NearSingularError,
    NodeBudgetExceeded,
    SlackViolationError,
)
from .exact import N_LIMIT, breve_q_exact, membership_exact
from .graph import Graph, build_graph
from .validation import check_fraction

MAX_SCOPE = 24


@dataclass(frozen=True)
class Event:
    """Event over the variables in ``scope``.

    ``table[key]`` is True iff the event occurs, where bit ``k`` of ``key``
    is the value of ``scope[k]``.
    """

    scope: tuple[int, ...]
    table: tuple[bool, ...]

    def __post_init__(self):
        if list(self.scope) != sorted(set(self.scope)):
            raise InvalidInputError("event scope must be sorted without repeats")
        if len(self.scope) > MAX_SCOPE:
            raise InvalidInputError(f"event scope larger than {MAX_SCOPE} variables")
        if len(self.table) != 1 << len(self.scope):
            raise InvalidInputError("truth table length must be 2**len(scope)")

    @classmethod
    def from_predicate(cls, scope: Sequence[int], predicate: Callable[[tuple[int, ...]], bool]) -> "Event":
        """Tabulate ``predicate(values)`` where ``values[k]`` is the value of ``scope[k]``."""
        scope = tuple(sorted(set(int(v) for v in scope)))
        k = len(scope)
        if k > MAX_SCOPE:
            raise InvalidInputError(f"event scope larger than {MAX_SCOPE} variables")
        table = tuple(bool(predicate(tuple(key >> b & 1 for b in range(k)))) for key in range(1 << k))
        return cls(scope, table)

    @classmethod
    def from_clause(cls, literals: Sequence[int]) -> "Event":
        """Event "clause is falsified" for DIMACS-style literals (1-based, negative = negated)."""
        if any(int(lit) == 0 for lit in literals):
            raise InvalidInputError("literal 0 is not a variable")
        scope = sorted({abs(int(lit)) - 1 for lit in literals})
        pos = {i: k for k, i in enumerate(scope)}

        def falsified(values):
            for lit in literals:
                v = values[pos[abs(lit) - 1]]
                if (lit > 0 and v == 1) or (lit < 0 and v == 0):
                    return False
            return True

        return cls.from_predicate(scope, falsified)

    def key(self, assignment) -> int:
        out = 0
        for b, v in enumerate(self.scope):
            out |= int(assignment[v]) << b
        return out

    def occurs(self, assignment) -> bool:
        return self.table[self.key(assignment)]


def event_probability(ev: Event, z) -> float:
    """Exact ``P[event]`` under independent bits with ``P[x_j = 1] = z_j``."""
    z = np.asarray(z, dtype=float)
    if ev.scope and ev.scope[-1] >= z.shape[0]:
        raise InvalidInputError("event scope exceeds the number of variables")
    w = np.ones(1)
    # key bit b is the value of scope[b], so each new variable doubles the block on top
    for v in ev.scope:
        w = np.concatenate((w * (1 - z[v]), w * z[v]))
    return float(w[np.asarray(ev.table, dtype=bool)].sum())


@dataclass
class VariableModel:
    m: int
    z: np.ndarray
    events: list[Event]

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float).reshape(-1)
        if self.z.shape[0] != self.m:
            raise InvalidInputError(f"expected {self.m} marginals, got {self.z.shape[0]}")
        if np.any(self.z < 0) or np.any(self.z > 1) or not np.all(np.isfinite(self.z)):
            raise InvalidInputError("marginals must lie in [0, 1]")
        for ev in self.events:
            if ev.scope and ev.scope[-1] >= self.m:
                raise InvalidInputError("event scope exceeds the number of variables")
        self._graph: Optional[Graph] = None

    @property
    def dep_graph(self) -> Graph:
        if self._graph is None:
            self._graph = build_dependency_graph(self)
        return self._graph

    def probabilities(self, z=None) -> np.ndarray:
        z = self.z if z is None else np.asarray(z, dtype=float)
        return np.array([event_probability(ev, z) for ev in self.events])


def build_dependency_graph(vm: VariableModel) -> Graph:
    """Events are adjacent iff their scopes share a variable."""
    by_var: dict[int, list[int]] = {}
    for i, ev in enumerate(vm.events):
        for v in ev.scope:
            by_var.setdefault(v, []).append(i)
    edges = {(a, b) for evs in by_var.values() for a in evs for b in evs if a < b}
    return build_graph(len(vm.events), sorted(edges))


def verify_assignment(vm: VariableModel, omega) -> bool:
    """True iff no event occurs at ``omega``."""
    omega = [int(x) for x in omega]
    if len(omega) != vm.m or any(x not in (0, 1) for x in omega):
        raise InvalidInputError("assignment must be a 0/1 vector of length m")
    return not any(ev.occurs(omega) for ev in vm.events)


def in_shearer_exact(g: Graph, p) -> bool:
    """Oracle membership that also accepts (and rejects) entries at or above 1."""
    p = np.asarray(p, dtype=float)
    if np.any(p >= 1):
        return False
    return membership_exact(g, p)


def breve_q_of_z(vm: VariableModel, z, scale: float = 1.0) -> float:
    """Exact ``qb(V)`` of ``scale * p(z)`` over the dependency graph."""
    return breve_q_exact(vm.dep_graph, scale * vm.probabilities(z)).real


# --- rounding --------------------------------------------------------------


def round_variables_exact(vm: VariableModel) -> np.ndarray:
    """Round every fractional marginal using exact derivatives of ``qb(V)(p(z))``.

    Raises :class:`SlackViolationError` unless ``p(z)`` starts in the region.
    """
    g = vm.dep_graph
    if g.n > N_LIMIT:
        raise GraphTooLargeError(f"exact rounding supports at most {N_LIMIT} events")
    z = vm.z.copy()
    if not in_shearer_exact(g, vm.probabilities(z)):
        raise SlackViolationError("p(z) is not in the Shearer region")
    for i in range(vm.m):
        if z[i] in (0.0, 1.0):
            continue
        up, down = z.copy(), z.copy()
        up[i], down[i] = 1.0, 0.0
        # multilinear in z_i, so the derivative is a plain difference
        deriv = breve_q_of_z(vm, up) - breve_q_of_z(vm, down)
        z = up if deriv >= 0 else down
        if not in_shearer_exact(g, vm.probabilities(z)):
            raise SlackViolationError(f"rounding variable {i} left the Shearer region")
    return z.astype(int)


@dataclass(frozen=True)
class RoundingStep:
    iteration: int
    variable: int
    direction: int
    scale: float
    delta: float
    eps: float
    q0_est: float
    qdelta_est: float
    derivative_est: float
    band: float
    z_before: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "variable": self.variable,
            "direction": self.direction,
            "scale": self.scale,
            "delta": self.delta,
            "eps": self.eps,
            "Q0": self.q0_est,
            "Qdelta": self.qdelta_est,
            "A": self.derivative_est,
            "band": self.band,
        }


@dataclass
class RoundingTrace:
    alpha: float
    m: int
    working_slack: float
    steps: list[RoundingStep] = field(default_factory=list)
    preprocessed: dict[int, int] = field(default_factory=dict)
    preprocess_checked: bool = False
    assignment: Optional[list[int]] = None
    verified: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "m": self.m,
            "working_slack": self.working_slack,
            "preprocessed": {str(k): v for k, v in sorted(self.preprocessed.items())},
            "preprocess_checked": self.preprocess_checked,
            "steps": [s.to_dict() for s in self.steps],
            "assignment": self.assignment,
            "verified": self.verified,
        }


def schedule(alpha: float, m: int, i: int) -> float:
    """Scale ``s_i = 1 + alpha (m - i) / (2m)`` used in iteration ``i`` (1-based)."""
    return 1 + alpha * (m - i) / (2 * m)


def round_variables(
    vm: VariableModel,
    alpha: float,
    budget: int = DEFAULT_NODE_BUDGET,
    n_jobs: Optional[int] = 1,
) -> tuple[np.ndarray, RoundingTrace]:
    """Round ``z`` to an assignment avoiding every event, using FPTAS estimates only.

    Contract: ``(1 + alpha) p(z)`` is in the Shearer region.  A false contract
    surfaces as :class:`SlackViolationError`.
    """
    alpha = check_fraction("alpha", alpha)
    m = vm.m
    g = vm.dep_graph
    delta = alpha**2 / (36 * max(m, 1))
    eps = delta / 4
    working = alpha / (8 * max(m, 1))
    a_eval = math.sqrt(1 + working) - 1
    trace = RoundingTrace(alpha=alpha, m=m, working_slack=working)

    z = vm.z.copy()
    for i in range(m):
        if 0 < z[i] <= alpha / 4:
            z[i] = 0.0
            trace.preprocessed[i] = 0
        elif 1 - alpha / 4 <= z[i] < 1:
            z[i] = 1.0
            trace.preprocessed[i] = 1
    p = vm.probabilities(z)
    if np.any(p >= 1):
        raise InvalidInputError("some event is certain under the marginals; instance infeasible")
    if g.n <= N_LIMIT:
        trace.preprocess_checked = True
        if not in_shearer_exact(g, (1 + alpha / 2) * p):
            raise SlackViolationError("slack below alpha/2 after preprocessing")

    def estimate(point) -> float:
        try:
            rep = fptas_eval(g, point, a_eval, eps / 2, budget=budget, n_jobs=n_jobs)
        except (NearSingularError, NodeBudgetExceeded) as exc:
            raise SlackViolationError(f"slack assertion violated: {exc}") from exc
        # one-sided estimate in [1 - eps, 1] times the true value
        return rep.value.real / (1 + eps / 2)

    for i in range(m):
        if z[i] in (0.0, 1.0):
            continue
        it = i + 1
        s = schedule(alpha, m, it)
        zd = z.copy()
        zd[i] -= delta
        q0 = estimate(s * vm.probabilities(z))
        qd = estimate(s * vm.probabilities(zd))
        A = (q0 - qd) / delta
        direction = 1 if A >= 0 else 0
        band = eps / delta * max(q0, qd) / (1 - eps)
        trace.steps.append(RoundingStep(it, i, direction, s, delta, eps, q0, qd, A, band, tuple(z)))
        z[i] = float(direction)

    omega = z.astype(int)
    trace.assignment = omega.tolist()
    trace.verified = verify_assignment(vm, omega)
    return omega, trace


def exact_step_derivative(vm: VariableModel, step: RoundingStep) -> float:
    """Oracle value of the finite difference that ``step`` estimated."""
    z = np.asarray(step.z_before)
    zd = z.copy()
    zd[step.variable] -= step.delta
    return (breve_q_of_z(vm, z, step.scale) - breve_q_of_z(vm, zd, step.scale)) / step.delta


# --- the classical region L ------------------------------------------------


def in_lll_region(g: Graph, p, x) -> bool:
    """Check ``p_i <= x_i * prod_{j ~ i} (1 - x_j)`` for all ``i`` (the asymmetric local lemma)."""
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    if p.shape != (g.n,) or x.shape != (g.n,):
        raise InvalidInputError("p and x must have length n")
    if np.any(x < 0) or np.any(x >= 1):
        raise InvalidInputError("x must lie in [0, 1)")
    for i in range(g.n):
        bound = x[i] * math.prod(1 - x[j] for j in g.adjacency[i])
        if p[i] > bound:
            return False
    return True


def edge_in_lll_region(p1: float, p2: float) -> bool:
    """Region L of a single edge: ``sqrt(p1) + sqrt(p2) <= 1``."""
    return math.sqrt(p1) + math.sqrt(p2) <= 1
