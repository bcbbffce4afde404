"""Truncated correlation-decay evaluation of the alternating-sign independence polynomial.

The estimate of ``qb(V)`` is the telescoping product over an elimination
order ``v_1..v_n`` of ``1 - R(S_i, v_i)`` with ``S_i = {v_i, ..., v_n}``.
Each occupation ratio estimate ``R(S, u)`` expands the computation tree

    R(S, u) = p_u * prod_children 1 / (1 - R(child)),

where the children of ``(S, u)`` are ``(S - {u}, w_1)``,
``(S - {u, w_1}, w_2)``, ... over the neighbours ``w_1 < w_2 < ...`` of
``u`` inside ``S``, and truncates at depth ``depth`` by returning 0.

Slack convention: :func:`fptas_eval` requires ``(1 + alpha)**2 * |p|`` to lie
in the Shearer region.  A caller who only knows that ``(1 + a) * |p|`` lies in
the region should pass ``alpha = sqrt(1 + a) - 1``.

Arithmetic is double precision; the accuracy guarantee assumes rounding is
negligible against ``eps``, which holds comfortably for ``eps >= 1e-6``.
"""
from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, NearSingularError, NodeBudgetExceeded, SlackViolationError
from .graph import Graph
from .validation import check_activities, check_fraction, check_order, check_vertex

DEFAULT_NODE_BUDGET = 10**8
#: ``|1 - R_child|`` below this aborts the recursion.
SINGULAR_THRESHOLD = 1e-12

BOUNDED_DEGREE = "bounded-degree"
CONNECTIVE = "connective-constant"


@dataclass(frozen=True)
class DecayParams:
    """Depth and accuracy settings for one evaluation.

    ``connective_a`` and ``connective_delta`` are the constants ``a`` and
    ``Delta`` of a connective-constant bound; only ``a`` affects the depth,
    ``Delta`` is kept for runtime estimates.
    """

    depth: Optional[int] = None
    alpha: float = 1.0
    eps: float = 0.1
    node_budget: int = DEFAULT_NODE_BUDGET
    depth_policy: str = BOUNDED_DEGREE
    connective_a: Optional[float] = None
    connective_delta: Optional[float] = None

    def __post_init__(self):
        if self.depth is not None and self.depth < 0:
            raise InvalidInputError("depth must be nonnegative")
        check_fraction("alpha", self.alpha)
        check_fraction("eps", self.eps)
        if self.node_budget <= 0:
            raise InvalidInputError("node_budget must be positive")
        if self.depth_policy not in (BOUNDED_DEGREE, CONNECTIVE):
            raise InvalidInputError(f"unknown depth policy {self.depth_policy!r}")
        if self.depth_policy == CONNECTIVE and self.connective_a is None:
            raise InvalidInputError("connective-constant policy needs the constant a")

    def resolve_depth(self, n: int, d: int) -> int:
        if self.depth is not None:
            return self.depth
        return depth_for(n, d, self.alpha, self.eps, policy=self.depth_policy, a=self.connective_a)


@dataclass
class EvalReport:
    value: complex
    step_ratios: list[complex]
    step_factors: list[complex]
    nodes_expanded: int
    depth_used: int
    apriori_root_bound: Optional[float] = None
    order: list[int] = field(default_factory=list)
    max_root_nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "value": _cplx(self.value),
            "step_ratios": [_cplx(z) for z in self.step_ratios],
            "step_factors": [_cplx(z) for z in self.step_factors],
            "nodes_expanded": self.nodes_expanded,
            "max_root_nodes": self.max_root_nodes,
            "depth_used": self.depth_used,
            "apriori_root_bound": self.apriori_root_bound,
            "order": list(self.order),
        }


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


class NodeBudget:
    """Counts computation-tree nodes and fails loudly past ``limit``."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int = DEFAULT_NODE_BUDGET):
        self.limit = int(limit)
        self.used = 0


@contextmanager
def _recursion_room(depth: int):
    old = sys.getrecursionlimit()
    need = depth + 200
    if need > old:
        sys.setrecursionlimit(need)
    try:
        yield
    finally:
        if need > old:
            sys.setrecursionlimit(old)


def _make_ratio(adj, p, budget: NodeBudget):
    limit = budget.limit

    def ratio(u: int, s: int, depth: int) -> complex:
        budget.used += 1
        if budget.used > limit:
            raise NodeBudgetExceeded(f"node budget of {limit} exceeded")
        if depth == 0:
            return 0j
        r = p[u]
        rest = s & ~(1 << u)
        for w in adj[u]:
            if rest >> w & 1:
                den = 1 - ratio(w, rest, depth - 1)
                if abs(den) < SINGULAR_THRESHOLD:
                    raise NearSingularError(
                        "near-singular denominator: point at/outside the admissible polydisc "
                        "or depth inconsistent with slack"
                    )
                r /= den
                rest &= ~(1 << w)
        return r

    return ratio


def _subset_arg(g: Graph, s: Optional[int]) -> int:
    if s is None:
        return g.full_mask
    s = int(s)
    if s < 0 or s >> g.n:
        raise InvalidInputError("subset mask has bits outside the vertex range")
    return s


def occupation_ratio_truncated(
    g: Graph,
    p,
    depth: int,
    s: Optional[int],
    u: int,
    budget: Optional[NodeBudget] = None,
) -> complex:
    """Estimate ``R(S, u)`` by expanding the computation tree ``depth`` levels."""
    if depth < 0:
        raise InvalidInputError("depth must be nonnegative")
    s = _subset_arg(g, s)
    u = check_vertex(g, u)
    if not s >> u & 1:
        raise InvalidInputError(f"vertex {u} is not in the subset")
    p = [complex(x) for x in check_activities(p, g.n)]
    budget = budget if budget is not None else NodeBudget()
    with _recursion_room(min(depth, g.n)):
        return _make_ratio(g.adjacency, p, budget)(u, s, depth)


def _root_ratio(adj, p, u, s, depth, limit, n) -> tuple[complex, int]:
    budget = NodeBudget(limit)
    with _recursion_room(min(depth, n)):
        r = _make_ratio(adj, p, budget)(u, s, depth)
    return r, budget.used


def eval_polynomial(
    g: Graph,
    p,
    depth: int,
    budget: int = DEFAULT_NODE_BUDGET,
    order=None,
    subset: Optional[int] = None,
    alpha: Optional[float] = None,
    n_jobs: Optional[int] = 1,
) -> EvalReport:
    """Estimate ``qb(subset)`` as the product of ``1 - R(S_i, v_i)``.

    ``order`` is the elimination order (default ascending); vertices outside
    ``subset`` are skipped.  ``budget`` caps the tree size of each root.  The
    roots are independent, so ``n_jobs`` may fan them out with joblib; the
    product is always reduced in elimination order.  If ``alpha`` is given
    the report carries the a-priori per-root error bound.
    """
    if depth < 0:
        raise InvalidInputError("depth must be nonnegative")
    if budget <= 0:
        raise InvalidInputError("budget must be positive")
    p_vals = [complex(x) for x in check_activities(p, g.n)]
    order = check_order(g, order)
    mask = _subset_arg(g, subset)
    steps: list[tuple[int, int]] = []
    remaining = mask
    for v in order:
        if remaining >> v & 1:
            steps.append((v, remaining))
            remaining &= ~(1 << v)

    jobs = 1 if n_jobs is None else n_jobs
    if jobs != 1 and len(steps) > 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=jobs)(
            delayed(_root_ratio)(g.adjacency, p_vals, v, s, depth, budget, g.n) for v, s in steps
        )
    else:
        results = [_root_ratio(g.adjacency, p_vals, v, s, depth, budget, g.n) for v, s in steps]

    ratios = [r for r, _ in results]
    factors = [1 - r for r in ratios]
    value = complex(1.0)
    for f in factors:
        value *= f
    bound = None
    if alpha is not None and steps:
        bound = max(error_bound_root(g.degree(v), alpha, depth) for v, _ in steps)
    return EvalReport(
        value=value,
        step_ratios=ratios,
        step_factors=factors,
        nodes_expanded=sum(c for _, c in results),
        depth_used=depth,
        apriori_root_bound=bound,
        order=[v for v, _ in steps],
        max_root_nodes=max((c for _, c in results), default=0),
    )


def depth_for(
    n: int,
    d: int,
    alpha: float,
    eps: float,
    policy: str = BOUNDED_DEGREE,
    a: Optional[float] = None,
) -> int:
    """Truncation depth that guarantees relative error ``eps``.

    Bounded degree: ``ceil(2 log_{1+sqrt(alpha)}(2 (1+alpha)(1+d/alpha) n / (eps alpha)))``.
    Connective constant: ``max(ceil(a log n), ceil(4/sqrt(alpha) * log(n / (eps alpha))))``.
    """
    check_fraction("alpha", alpha)
    check_fraction("eps", eps)
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    if policy == BOUNDED_DEGREE:
        d = max(int(d), 1)
        arg = 2 * (1 + alpha) * (1 + d / alpha) * n / (eps * alpha)
        return math.ceil(2 * math.log(arg) / math.log(1 + math.sqrt(alpha)))
    if policy == CONNECTIVE:
        if a is None:
            raise InvalidInputError("connective-constant policy needs the constant a")
        return max(
            math.ceil(a * math.log(n)),
            math.ceil(4 / math.sqrt(alpha) * math.log(n / (eps * alpha))),
        )
    raise InvalidInputError(f"unknown depth policy {policy!r}")


def error_bound_root(d_a: int, alpha: float, depth: int) -> float:
    """A-priori bound ``(1 + d_a/alpha) / (1 + sqrt(alpha))**(depth/2)`` on ``|r - R|`` at a root."""
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    return (1 + d_a / alpha) / (1 + math.sqrt(alpha)) ** (depth / 2)


def fptas_eval(
    g: Graph,
    p,
    alpha: float,
    eps: float,
    budget: int = DEFAULT_NODE_BUDGET,
    order=None,
    subset: Optional[int] = None,
    depth_policy: str = BOUNDED_DEGREE,
    connective_a: Optional[float] = None,
    n_jobs: Optional[int] = 1,
) -> EvalReport:
    """``(1 + eps)``-approximation of ``qb(V)`` assuming ``(1+alpha)**2 |p|`` is in the Shearer region.

    The assumption is a contract: it is not checked, and a false assertion
    typically surfaces as :class:`NearSingularError` or
    :class:`NodeBudgetExceeded`.
    """
    params = DecayParams(
        alpha=alpha, eps=eps, node_budget=budget, depth_policy=depth_policy, connective_a=connective_a
    )
    mask = _subset_arg(g, subset)
    n_eff = max(bin(mask).count("1"), 1)
    depth = params.resolve_depth(n_eff, g.max_degree)
    return eval_polynomial(
        g, p, depth, budget=budget, order=order, subset=mask, alpha=alpha, n_jobs=n_jobs
    )


# --- instrumentation -------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    """One node of an expanded computation tree with its estimate ``R``."""

    subset: int
    vertex: int
    depth: int
    estimate: complex


def trace_computation_tree(g: Graph, p, depth: int, s: Optional[int], u: int) -> list[TreeNode]:
    """Expand the depth-``depth`` tree rooted at ``(s, u)`` and record every node (post-order)."""
    s = _subset_arg(g, s)
    u = check_vertex(g, u)
    p = [complex(x) for x in check_activities(p, g.n)]
    adj = g.adjacency
    out: list[TreeNode] = []

    def visit(v: int, mask: int, level: int) -> complex:
        if level == depth:
            out.append(TreeNode(mask, v, level, 0j))
            return 0j
        r = p[v]
        rest = mask & ~(1 << v)
        for w in adj[v]:
            if rest >> w & 1:
                den = 1 - visit(w, rest, level + 1)
                if abs(den) < SINGULAR_THRESHOLD:
                    raise NearSingularError("near-singular denominator")
                r /= den
                rest &= ~(1 << w)
        out.append(TreeNode(mask, v, level, r))
        return r

    with _recursion_room(min(depth, g.n)):
        visit(u, s, 0)
    return out


@dataclass(frozen=True)
class NodeSensitivity:
    subset: int
    vertex: int
    depth: int
    rho: float
    beta: float
    rho_prime: float
    beta_prime: float


@dataclass
class SensitivityReport:
    """Exact ``rho`` and ``beta`` at ``|p|`` and at ``(1+alpha)|p|`` over a computation tree.

    ``rho`` is the occupation ratio at the magnitudes and ``beta`` its
    derivative along ``t -> (1+t)|p|`` at ``t = 0``.  The primed values are
    the same quantities at ``(1+alpha)|p|``.
    """

    rho: float
    beta: float
    rho_prime: float
    beta_prime: float
    alpha: float
    nodes: list[NodeSensitivity]

    @property
    def max_rho(self) -> float:
        return max(nd.rho for nd in self.nodes)

    @property
    def min_rho(self) -> float:
        return min(nd.rho for nd in self.nodes)

    @property
    def max_beta(self) -> float:
        return max(nd.beta for nd in self.nodes)

    @property
    def min_beta(self) -> float:
        return min(nd.beta for nd in self.nodes)

    def lookup(self) -> dict[tuple[int, int], NodeSensitivity]:
        return {(nd.subset, nd.vertex): nd for nd in self.nodes}


def _rho_beta_table(adj, mags):
    memo: dict[tuple[int, int], tuple[float, float]] = {}

    def rec(s: int, u: int) -> tuple[float, float]:
        key = (s, u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        rho = mags[u]
        acc = 0.0
        rest = s & ~(1 << u)
        for w in adj[u]:
            if rest >> w & 1:
                rc, bc = rec(rest, w)
                den = 1.0 - rc
                if den < SINGULAR_THRESHOLD:
                    raise NearSingularError("near-singular denominator in magnitude recursion")
                rho /= den
                acc += bc / den
                rest &= ~(1 << w)
        val = (rho, rho * (1.0 + acc))
        memo[key] = val
        return val

    return rec


def sensitivity_profile(
    g: Graph,
    p,
    alpha: float,
    root: int,
    depth: Optional[int] = None,
    subset: Optional[int] = None,
    check: bool = True,
) -> SensitivityReport:
    """Exact ``(rho, beta, rho', beta')`` at every node of the tree rooted at ``(subset, root)``.

    Values are exact (the recursion runs to the leaves); ``depth`` only
    limits which nodes are listed.  With ``check`` the inequality
    ``beta < (1 - rho)/alpha`` is enforced at every node, which must hold
    whenever ``(1+alpha)|p|`` is in the Shearer region.
    """
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    s = _subset_arg(g, subset)
    root = check_vertex(g, root)
    if not s >> root & 1:
        raise InvalidInputError(f"vertex {root} is not in the subset")
    mags = np.abs(check_activities(p, g.n)).tolist()
    mags_prime = [(1 + alpha) * m for m in mags]
    adj = g.adjacency
    at_p = _rho_beta_table(adj, mags)
    at_prime = _rho_beta_table(adj, mags_prime)
    limit = g.n if depth is None else depth
    nodes: list[NodeSensitivity] = []

    def walk(v: int, mask: int, level: int):
        rho, beta = at_p(mask, v)
        rho_p, beta_p = at_prime(mask, v)
        if check and not beta < (1 - rho) / alpha:
            raise SlackViolationError(
                f"beta={beta:.6g} >= (1-rho)/alpha={(1 - rho) / alpha:.6g}: slack assertion false"
            )
        nodes.append(NodeSensitivity(mask, v, level, rho, beta, rho_p, beta_p))
        if level == limit:
            return
        rest = mask & ~(1 << v)
        for w in adj[v]:
            if rest >> w & 1:
                walk(w, rest, level + 1)
                rest &= ~(1 << w)

    with _recursion_room(g.n):
        walk(root, s, 0)
    head = nodes[0]
    return SensitivityReport(
        rho=head.rho,
        beta=head.beta,
        rho_prime=head.rho_prime,
        beta_prime=head.beta_prime,
        alpha=alpha,
        nodes=nodes,
    )
