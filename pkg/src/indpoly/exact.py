"""Exact evaluation by exhaustive subset recursion.

Everything here is exponential in ``n`` and serves as ground truth for the
correlation-decay evaluator, the membership tester and the LLL rounding.

The alternating-sign polynomial of a subset ``S`` obeys

    qb(S) = qb(S - {u}) - p[u] * qb(S - N[u]),      qb(empty) = 1,

with ``u`` the lowest-index member of ``S`` and ``N[u]`` its closed
neighbourhood.  Occupation ratios and Shearer polynomials are quotients and
products of such values.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import GraphTooLargeError, InvalidInputError, OutsideRegionError
from .graph import Graph, connected_components, lowest_member, members
from .validation import check_activities, check_magnitudes, check_vertex

#: Largest n for which every subset is tabulated (2**24 entries).
N_LIMIT = 24
#: Largest n accepted for a single-subset query (memoised depth-first recursion).
SINGLE_QUERY_LIMIT = 30


def _as_scalars(p: np.ndarray) -> list:
    if np.iscomplexobj(p) and np.any(p.imag != 0):
        return [complex(x) for x in p]
    return [float(x) for x in np.real(p)]


class SubsetTable:
    """Memo of ``qb(S)`` values for one graph and one activity vector."""

    def __init__(self, g: Graph, p, n_limit: int = SINGLE_QUERY_LIMIT):
        if g.n > n_limit:
            raise GraphTooLargeError(f"exact mode supports n <= {n_limit}, got n={g.n}")
        self.g = g
        self.p = _as_scalars(check_activities(p, g.n))
        self.memo: dict[int, complex | float] = {0: 1.0}

    def breve_q(self, mask: int):
        memo = self.memo
        val = memo.get(mask)
        if val is not None:
            return val
        nbr = self.g.neighbor_masks
        p = self.p
        # explicit stack keeps this safe for n up to SINGLE_QUERY_LIMIT without recursion
        stack = [mask]
        while stack:
            s = stack[-1]
            if s in memo:
                stack.pop()
                continue
            u = lowest_member(s)
            rest = s & ~(1 << u)
            far = rest & ~nbr[u]
            a = memo.get(rest)
            b = memo.get(far)
            if a is None:
                stack.append(rest)
            if b is None:
                stack.append(far)
            if a is not None and b is not None:
                memo[s] = a - p[u] * b
                stack.pop()
        return memo[mask]

    def shearer_q(self, mask: int):
        """Shearer polynomial ``q_S``: product of ``p`` over ``S`` times ``qb(V - N[S])``."""
        g = self.g
        if not g.is_independent(mask):
            return 0.0
        closed = 0
        prod = 1.0
        for v in members(mask):
            closed |= g.closed_neighbor_mask(v)
            prod *= self.p[v]
        return prod * self.breve_q(g.full_mask & ~closed)

    def occupation_ratio(self, mask: int, u: int):
        if not mask >> u & 1:
            raise InvalidInputError(f"vertex {u} is not in the subset")
        rest = mask & ~(1 << u)
        den = self.breve_q(rest)
        if den == 0:
            raise OutsideRegionError("evaluation point outside admissible region (zero denominator)")
        return self.p[u] * self.breve_q(rest & ~self.g.neighbor_masks[u]) / den


def _mask_or_full(g: Graph, s: Optional[int]) -> int:
    if s is None:
        return g.full_mask
    s = int(s)
    if s < 0 or s >> g.n:
        raise InvalidInputError("subset mask has bits outside the vertex range")
    return s


def breve_q_exact(g: Graph, p, s: Optional[int] = None) -> complex:
    """Exact alternating-sign independence polynomial of the subset ``s`` (default: all of V)."""
    return complex(SubsetTable(g, p).breve_q(_mask_or_full(g, s)))


def q_S_exact(g: Graph, p, s: int) -> complex:
    """Exact Shearer polynomial ``q_S`` (zero when ``s`` is not independent)."""
    return complex(SubsetTable(g, p).shearer_q(_mask_or_full(g, s)))


def occupation_ratio_exact(g: Graph, p, s: Optional[int], u: int) -> complex:
    """Exact occupation ratio ``r_{S,u} = p_u qb(S - N[u]) / qb(S - u)``."""
    u = check_vertex(g, u)
    return complex(SubsetTable(g, p).occupation_ratio(_mask_or_full(g, s), u))


def breve_q_table(g: Graph, p) -> np.ndarray:
    """``qb(S)`` for every subset ``S``, indexed by bitmask.

    Vectorised over blocks of subsets sharing the same lowest member, so the
    pivot matches :class:`SubsetTable`.  Real input gives a real table.
    """
    if g.n > N_LIMIT:
        raise GraphTooLargeError(f"full subset table supports n <= {N_LIMIT}, got n={g.n}")
    p = check_activities(p, g.n)
    dtype = complex if np.any(p.imag != 0) else float
    vals = p if dtype is complex else p.real
    n = g.n
    table = np.empty(1 << n, dtype=dtype)
    table[0] = 1
    for u in range(n - 1, -1, -1):
        upper = np.arange(1 << (n - u - 1), dtype=np.int64) << (u + 1)
        far = upper & ~np.int64(g.neighbor_masks[u])
        table[upper | (1 << u)] = table[upper] - vals[u] * table[far]
    return table


def membership_exact(g: Graph, p_abs) -> bool:
    """True iff ``qb(S)(p_abs) > 0`` for every subset ``S``."""
    p_abs = check_magnitudes(p_abs, g.n)
    return bool(np.all(breve_q_table(g, p_abs) > 0))


def ray_polynomial(g: Graph, p_abs) -> np.ndarray:
    """Coefficients (ascending) of ``t -> qb(V)(t * p_abs)``.

    Same subset recursion as :class:`SubsetTable`, carried out in the ring of
    polynomials in ``t``.
    """
    if g.n > SINGLE_QUERY_LIMIT:
        raise GraphTooLargeError(f"exact mode supports n <= {SINGLE_QUERY_LIMIT}, got n={g.n}")
    p_abs = np.asarray(p_abs, dtype=float).reshape(-1)
    nbr = g.neighbor_masks
    memo: dict[int, np.ndarray] = {0: np.array([1.0])}

    def rec(s: int) -> np.ndarray:
        val = memo.get(s)
        if val is not None:
            return val
        u = lowest_member(s)
        rest = s & ~(1 << u)
        a = rec(rest)
        b = rec(rest & ~nbr[u])
        val = P.polysub(a, P.polymulx(b) * p_abs[u])
        memo[s] = val
        return val

    return rec(g.full_mask)


def first_root_on_ray(
    g: Graph,
    p_abs,
    t_max: float,
    tol: float,
    scan_step: Optional[float] = None,
) -> Optional[float]:
    """Smallest ``t`` in ``(0, t_max]`` with ``qb(V)(t * p_abs) = 0``, or ``None``.

    The ray is scanned on a uniform grid (``scan_step``, default
    ``max(tol, t_max / 65536)``) for the first sign change, which is then
    bisected to absolute accuracy ``tol``.  Roots of even multiplicity that
    fall between grid points are not detected.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    if t_max <= 0:
        return None
    p_abs = np.asarray(p_abs, dtype=float).reshape(-1)
    if p_abs.shape[0] != g.n or np.any(p_abs < 0) or not np.all(np.isfinite(p_abs)):
        raise InvalidInputError("p_abs must be a finite nonnegative vector of length n")
    coeffs = ray_polynomial(g, p_abs)
    step = scan_step if scan_step is not None else max(tol, t_max / 65536)
    count = int(np.ceil(t_max / step))
    grid = np.minimum(np.arange(count + 1) * step, t_max)
    values = P.polyval(grid, coeffs)
    hits = np.nonzero(values <= 0)[0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    if values[k] == 0:
        return float(grid[k])
    lo, hi = float(grid[k - 1]), float(grid[k])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if P.polyval(mid, coeffs) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ray_boundary(g: Graph, p_abs, tol: float = 1e-12) -> float:
    """Largest ``t`` with ``t * p_abs`` in the closure of the Shearer region.

    The boundary of a disjoint union is the nearest boundary of its parts,
    and on a connected part it is the first zero of ``qb(V)`` on the ray, a
    sign change; so components are handled one at a time.  Zero entries of
    ``p_abs`` impose no constraint.
    """
    p_abs = np.asarray(p_abs, dtype=float).reshape(-1)
    if p_abs.shape[0] != g.n or np.any(p_abs < 0) or not np.all(np.isfinite(p_abs)):
        raise InvalidInputError("p_abs must be a finite nonnegative vector of length n")
    best = np.inf
    for comp in connected_components(g):
        sub, _ = g.induced(comp)
        q = p_abs[comp]
        if not np.any(q > 0):
            continue
        # a single vertex already fails at t = 1/max(q)
        root = first_root_on_ray(sub, q, 1.0 / float(q.max()) * (1 + 1e-9), tol)
        if root is not None:
            best = min(best, root)
    if not np.isfinite(best):
        raise InvalidInputError("p_abs is zero; the ray never leaves the region")
    return float(best)
