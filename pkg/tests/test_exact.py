import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indpoly.errors import GraphTooLargeError, InvalidInputError, OutsideRegionError
from indpoly.exact import (
    SubsetTable,
    breve_q_exact,
    breve_q_table,
    first_root_on_ray,
    membership_exact,
    occupation_ratio_exact,
    q_S_exact,
    ray_boundary,
    ray_polynomial,
)
from indpoly.graph import build_graph, members, subset_mask
from indpoly.testing import complete_graph, path_graph, random_bounded_degree_graph
from indpoly.univariate import lambda_prime_c

K1 = build_graph(1, [])
K2 = complete_graph(2)
K3 = complete_graph(3)
P3 = path_graph(3)


def _brute(g, p, mask):
    """Sum over independent subsets by direct enumeration."""
    total = 0
    verts = members(mask)
    for bits in range(1 << len(verts)):
        sub = subset_mask(v for k, v in enumerate(verts) if bits >> k & 1)
        if g.is_independent(sub):
            total += np.prod([-p[v] for v in members(sub)]) if sub else 1
    return total


@st.composite
def instances(draw, max_n=9, complex_phase=None):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    g = random_bounded_degree_graph(n, draw(st.integers(1, 4)), seed)
    rng = np.random.default_rng(seed)
    scale = draw(st.floats(0.05, 0.9)) * lambda_prime_c(max(g.max_degree, 1))
    mags = scale * rng.uniform(0.2, 1.0, n)
    phase = draw(st.booleans()) if complex_phase is None else complex_phase
    p = mags * np.exp(2j * np.pi * rng.random(n)) if phase else mags.astype(complex)
    return g, p


def test_empty_subset_is_one():
    assert breve_q_exact(P3, [0.2, 0.3, 0.4], 0) == 1


def test_examples():
    assert breve_q_exact(K2, [0.3, 0.4]) == pytest.approx(0.3)
    assert breve_q_exact(K1, [0.1j]) == pytest.approx(1 - 0.1j)
    assert breve_q_exact(P3, [0.2] * 3) == pytest.approx(0.44)


def test_shearer_polynomials():
    p = [0.3, 0.3]
    assert q_S_exact(K2, p, 0) == pytest.approx(breve_q_exact(K2, p))
    assert q_S_exact(K2, p, 0b01) == pytest.approx(0.3)
    assert q_S_exact(K2, p, 0b11) == 0


def test_occupation_ratio_examples():
    assert occupation_ratio_exact(P3, [0.2, 0.5, 0.7], 0b010, 1) == pytest.approx(0.5)
    assert occupation_ratio_exact(K2, [0.3, 0.4], None, 0) == pytest.approx(0.5)
    assert occupation_ratio_exact(P3, [0.2] * 3, None, 1) == pytest.approx(0.3125)


def test_occupation_ratio_errors():
    with pytest.raises(OutsideRegionError):
        occupation_ratio_exact(K2, [0.5, 1.0], None, 0)
    with pytest.raises(InvalidInputError):
        occupation_ratio_exact(K2, [0.1, 0.1], 0b10, 0)


def test_membership_examples():
    assert membership_exact(K2, [0.4, 0.4])
    assert not membership_exact(K2, [0.6, 0.6])
    assert membership_exact(K1, [0.99])


def test_membership_rejects_bad_magnitudes():
    with pytest.raises(InvalidInputError):
        membership_exact(K2, [0.4, 1.2])


def test_size_limits():
    big = path_graph(25)
    with pytest.raises(GraphTooLargeError):
        breve_q_table(big, np.full(25, 0.1))
    with pytest.raises(GraphTooLargeError):
        breve_q_exact(path_graph(31), np.full(31, 0.1))
    # single queries go further than the full table
    assert breve_q_exact(big, np.full(25, 0.1)).real > 0


def test_first_root_examples():
    tol = 1e-9
    assert first_root_on_ray(K1, [0.5], 4, tol) == pytest.approx(2.0, abs=tol)
    assert first_root_on_ray(K2, [0.3, 0.3], 4, tol) == pytest.approx(5 / 3, abs=tol)
    assert first_root_on_ray(K3, [0.2] * 3, 4, tol) == pytest.approx(5 / 3, abs=tol)
    assert first_root_on_ray(K2, [0.3, 0.3], 1.5, tol) is None


def test_ray_boundary_handles_repeated_components():
    g = build_graph(4, [(0, 1), (2, 3)])
    p = [0.3] * 4
    # qb(V) = (1 - 0.6 t)^2 never changes sign
    assert first_root_on_ray(g, p, 4, 1e-9) is None
    assert ray_boundary(g, p) == pytest.approx(5 / 3, abs=1e-9)


def test_ray_polynomial_matches_evaluation():
    p = np.array([0.2, 0.3, 0.1])
    coeffs = ray_polynomial(P3, p)
    for t in (0.0, 0.7, 1.9):
        assert np.polynomial.polynomial.polyval(t, coeffs) == pytest.approx(breve_q_exact(P3, t * p).real)


@settings(max_examples=40, deadline=None)
@given(instances(max_n=8))
def test_matches_brute_force(inst):
    g, p = inst
    table = breve_q_table(g, p)
    for mask in range(1 << g.n):
        assert table[mask] == pytest.approx(_brute(g, p, mask), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(instances(), st.randoms(use_true_random=False))
def test_telescoping_identity(inst, rnd):
    g, p = inst
    order = list(range(g.n))
    rnd.shuffle(order)
    tab = SubsetTable(g, p)
    mask, prod = g.full_mask, 1
    for v in order:
        prod *= 1 - tab.occupation_ratio(mask, v)
        mask &= ~(1 << v)
    truth = tab.breve_q(g.full_mask)
    assert abs(prod - truth) <= 1e-12 * abs(truth)


@settings(max_examples=40, deadline=None)
@given(instances())
def test_child_recurrence(inst):
    g, p = inst
    tab = SubsetTable(g, p)
    for mask in range(1, 1 << g.n, 3):
        for u in members(mask):
            r = p[u]
            rest = mask & ~(1 << u)
            for w in g.adjacency[u]:
                if rest >> w & 1:
                    r /= 1 - tab.occupation_ratio(rest, w)
                    rest &= ~(1 << w)
            assert abs(r - tab.occupation_ratio(mask, u)) <= 1e-12 * max(1, abs(r))


@settings(max_examples=40, deadline=None)
@given(instances(complex_phase=False))
def test_monotone_positive_and_bounded(inst):
    g, p = inst
    mags = p.real
    assert membership_exact(g, mags)
    table = breve_q_table(g, mags)
    full = g.full_mask
    for mask in range(1 << g.n):
        assert table[mask] >= table[full] > 0
        for v in members(mask):
            assert table[mask & ~(1 << v)] >= table[mask]
    tab = SubsetTable(g, mags)
    for mask in range(1, 1 << g.n):
        for u in members(mask):
            r = tab.occupation_ratio(mask, u)
            assert mags[u] - 1e-15 <= r < 1


@settings(max_examples=40, deadline=None)
@given(instances(complex_phase=True))
def test_complex_ratios_dominated_by_magnitude_ratios(inst):
    g, p = inst
    tab = SubsetTable(g, p)
    mag = SubsetTable(g, np.abs(p))
    for mask in range(1, 1 << g.n):
        for u in members(mask):
            assert abs(tab.occupation_ratio(mask, u)) <= mag.occupation_ratio(mask, u) + 1e-12


@settings(max_examples=30, deadline=None)
@given(instances(complex_phase=False))
def test_ray_boundary_is_region_boundary(inst):
    g, p = inst
    t = ray_boundary(g, p.real)
    assert membership_exact(g, np.minimum((t - 1e-7) * p.real, 0.999999))
    beyond = (t + 1e-7) * p.real
    assert np.any(beyond >= 1) or not membership_exact(g, beyond)


def test_unit_modulus_phase_is_irrelevant_for_single_vertex():
    z = 0.4 * cmath.exp(1j)
    assert breve_q_exact(K1, [z]) == pytest.approx(1 - z)
