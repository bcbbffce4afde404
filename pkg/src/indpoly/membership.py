"""Approximate membership in the Shearer region and univariate threshold estimation.

For ``p`` in the region the slack estimator

    gamma(p) = q_empty(p) / sum_i q_{i}(p),   q_{i}(p) = p_i * qb(V - N[i])(p),

brackets the true slack within ``[gamma, n * gamma]``.  The membership test
walks a scaled copy ``s * p`` from ``s = 1/(2n)`` towards ``s = 1`` and stops
as soon as the estimated slack becomes too small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .decay import DEFAULT_NODE_BUDGET, fptas_eval
from .errors import (
    IndPolyError,
    IterationCapError,
    InvalidInputError,
    NearSingularError,
    NodeBudgetExceeded,
    SlackViolationError,
)
from .exact import SubsetTable
from .graph import Graph
from .validation import check_fraction, check_magnitudes

#: Relative accuracy of every FPTAS call made by the membership test.
MEMBERSHIP_EPS = 0.2
#: Multiplier turning a ``(1 +- 1/5)`` estimate into a one-sided ``[1, 3/2]`` estimate.
ONE_SIDED_FACTOR = 1.25
CAP_CONSTANT = 48


class Verdict(str, Enum):
    IN_REGION = "IN_REGION"
    SCALED_OUT = "SCALED_OUT"


@dataclass
class MembershipVerdict:
    """Outcome of :func:`test_membership`.

    ``IN_REGION`` certifies ``p`` is in the region; ``SCALED_OUT`` certifies
    ``(1 + alpha) p`` is not.
    """

    verdict: Verdict
    iterations: int
    final_scale: float
    gamma_history: list[float] = field(default_factory=list)
    scale_history: list[float] = field(default_factory=list)
    alpha: float = 0.0
    exact: bool = False

    @property
    def in_region(self) -> bool:
        return self.verdict is Verdict.IN_REGION

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "iterations": self.iterations,
            "final_scale": self.final_scale,
            "gamma_history": list(self.gamma_history),
            "scale_history": list(self.scale_history),
            "alpha": self.alpha,
            "exact": self.exact,
        }


def iteration_cap(n: int, alpha: float, constant: float = CAP_CONSTANT) -> int:
    return math.ceil(constant * n * max(math.log(n / alpha), 1.0))


def _shearer_singletons_exact(g: Graph, p_abs: np.ndarray) -> tuple[float, list[float]]:
    table = SubsetTable(g, p_abs)
    full = g.full_mask
    q0 = float(table.breve_q(full))
    qs = [float(p_abs[i]) * float(table.breve_q(full & ~g.closed_neighbor_mask(i))) for i in range(g.n)]
    return q0, qs


def _shearer_singletons_fptas(
    g: Graph, p_abs: np.ndarray, working_slack: float, eps: float, budget: int, n_jobs
) -> tuple[float, list[float]]:
    # evaluator contract is (1+a)^2 |p| in the region, so convert the slack
    a = math.sqrt(1 + working_slack) - 1
    full = g.full_mask
    try:
        q0 = fptas_eval(g, p_abs, a, eps, budget=budget, n_jobs=n_jobs).value.real
        qs = [
            float(p_abs[i])
            * fptas_eval(
                g, p_abs, a, eps, budget=budget, subset=full & ~g.closed_neighbor_mask(i), n_jobs=n_jobs
            ).value.real
            for i in range(g.n)
        ]
    except (NearSingularError, NodeBudgetExceeded) as exc:
        raise SlackViolationError(f"insufficient working slack: {exc}") from exc
    return q0, qs


def _gamma(q0: float, qs: list[float]) -> float:
    total = sum(qs)
    if q0 <= 0 or total <= 0:
        raise SlackViolationError("insufficient working slack: nonpositive Shearer polynomial estimate")
    return q0 / total


def slack_bounds(
    g: Graph,
    p_abs,
    eps_rel: float = MEMBERSHIP_EPS,
    exact: bool = False,
    working_slack: Optional[float] = None,
    budget: int = DEFAULT_NODE_BUDGET,
    n_jobs: Optional[int] = 1,
) -> tuple[float, float]:
    """Conservative bracket ``(lower, upper)`` on the slack of ``p_abs``.

    Exact mode returns ``(gamma, n * gamma)``.  Otherwise every Shearer
    polynomial is estimated to relative error ``eps_rel`` and the bracket is
    widened by ``(1 - eps_rel)/(1 + eps_rel)`` on both sides.  The FPTAS
    needs a lower bound ``working_slack`` on the slack of ``p_abs``.
    """
    p_abs = check_magnitudes(p_abs, g.n, strictly_positive=True)
    if exact:
        q0, qs = _shearer_singletons_exact(g, p_abs)
        if q0 <= 0:
            raise SlackViolationError("point is outside the Shearer region")
        gamma = _gamma(q0, qs)
        return gamma, g.n * gamma
    if working_slack is None or working_slack <= 0:
        raise InvalidInputError("approximate slack bounds need a positive working_slack")
    if not 0 < eps_rel < 1:
        raise InvalidInputError("eps_rel must lie in (0, 1)")
    q0, qs = _shearer_singletons_fptas(g, p_abs, working_slack, eps_rel, budget, n_jobs)
    gamma = _gamma(q0, qs)
    shrink = (1 - eps_rel) / (1 + eps_rel)
    return gamma * shrink, g.n * gamma / shrink


def test_membership(
    g: Graph,
    p_abs,
    alpha: float,
    exact: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
    cap_constant: float = CAP_CONSTANT,
    n_jobs: Optional[int] = 1,
) -> MembershipVerdict:
    """Decide ``p in S`` versus ``(1 + alpha) p not in S``.

    Each iterate ``s * p`` keeps slack at least ``alpha/(8n)``; the next
    scale is ``s * (1 + gamma_est/3)``, capped at 1.  With ``exact`` the
    Shearer polynomials come from the subset oracle instead of the FPTAS.
    """
    p_abs = check_magnitudes(p_abs, g.n, strictly_positive=True)
    alpha = check_fraction("alpha", alpha)
    n = g.n
    if n == 0:
        return MembershipVerdict(Verdict.IN_REGION, 0, 1.0, alpha=alpha, exact=exact)
    cap = iteration_cap(n, alpha, cap_constant)
    working = alpha / (8 * n)
    scale = 1 / (2 * n)
    gammas: list[float] = []
    scales: list[float] = []
    for it in range(1, cap + 1):
        point = scale * p_abs
        scales.append(scale)
        if exact:
            q0, qs = _shearer_singletons_exact(g, point)
            if q0 <= 0:
                raise IndPolyError("iterate left the region; invariant broken")
        else:
            q0, qs = _shearer_singletons_fptas(g, point, working, MEMBERSHIP_EPS, budget, n_jobs)
            q0 *= ONE_SIDED_FACTOR
            qs = [ONE_SIDED_FACTOR * q for q in qs]
        gamma = _gamma(q0, qs)
        gammas.append(gamma)
        if gamma <= alpha / (2 * n):
            return MembershipVerdict(Verdict.SCALED_OUT, it, scale, gammas, scales, alpha, exact)
        nxt = scale * (1 + gamma / 3)
        if nxt >= 1:
            return MembershipVerdict(Verdict.IN_REGION, it, 1.0, gammas, scales, alpha, exact)
        scale = nxt
    raise IterationCapError(f"membership test exceeded {cap} iterations")


def estimate_lambda_G(
    g: Graph,
    alpha: float,
    exact: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
    n_jobs: Optional[int] = 1,
) -> tuple[float, float]:
    """Bracket ``(lo, hi)`` with ``hi/lo <= (1+alpha)**2`` around the uniform threshold.

    Geometric bisection over ``lambda * 1``: ``lo`` always lies in the
    region and ``hi`` never does.
    """
    alpha = check_fraction("alpha", alpha)
    if g.n == 0:
        raise InvalidInputError("threshold of the empty graph is undefined")
    sub = alpha / 3
    lo, hi = 1 / (2 * g.n), 1.0
    target = (1 + alpha) ** 2
    while hi / lo > target:
        mid = math.sqrt(lo * hi)
        res = test_membership(g, np.full(g.n, mid), sub, exact=exact, budget=budget, n_jobs=n_jobs)
        if res.in_region:
            lo = mid
        else:
            hi = min(hi, (1 + sub) * mid)
    return lo, hi


# keep pytest from collecting the function when it is imported into a test module
test_membership.__test__ = False
