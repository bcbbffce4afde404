import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indpoly.errors import InvalidInputError, SlackViolationError
from indpoly.exact import ray_boundary
from indpoly.lll import (
    Event,
    VariableModel,
    breve_q_of_z,
    build_dependency_graph,
    edge_in_lll_region,
    event_probability,
    exact_step_derivative,
    in_lll_region,
    in_shearer_exact,
    round_variables,
    round_variables_exact,
    schedule,
    verify_assignment,
)
from indpoly.testing import cnf_model, four_event_path_model, random_bounded_cnf


def _brute_probability(ev, z):
    total = 0.0
    for vals in itertools.product((0, 1), repeat=len(ev.scope)):
        w = np.prod([z[v] if b else 1 - z[v] for v, b in zip(ev.scope, vals)])
        key = sum(b << k for k, b in enumerate(vals))
        total += w * ev.table[key]
    return total


@st.composite
def models(draw, max_m=8, max_events=5):
    m = draw(st.integers(1, max_m))
    events = []
    for _ in range(draw(st.integers(1, max_events))):
        scope = draw(st.lists(st.integers(0, m - 1), min_size=0, max_size=min(m, 4), unique=True))
        k = len(set(scope))
        table = draw(st.lists(st.booleans(), min_size=1 << k, max_size=1 << k))
        events.append(Event(tuple(sorted(scope)), tuple(table)))
    z = draw(st.lists(st.floats(0, 1), min_size=m, max_size=m))
    return VariableModel(m, np.array(z), events)


def test_clause_probability():
    ev = Event.from_clause([1, 2, 3])
    assert event_probability(ev, np.full(3, 0.5)) == 1 / 8
    assert event_probability(Event.from_clause([-1]), [0.3]) == pytest.approx(0.3)


def test_empty_scope_events():
    assert event_probability(Event((), (False,)), [0.5]) == 0
    assert event_probability(Event((), (True,)), [0.5]) == 1


def test_fixture_probabilities_and_graph():
    vm = four_event_path_model()
    assert list(vm.probabilities()) == [17 / 64, 1 / 8, 1 / 8, 17 / 64]
    assert vm.dep_graph.edges() == [(0, 1), (1, 2), (2, 3)]


def test_fixture_cannot_be_rounded_within_lll_region():
    vm = four_event_path_model()
    p = vm.probabilities()
    assert in_lll_region(vm.dep_graph, p, [0.4, 0.3, 0.3, 0.4])
    for value, pair in ((0.0, (0, 1)), (1.0, (2, 3))):
        z = vm.z.copy()
        z[7] = value
        q = vm.probabilities(z)
        assert 0.0 in q
        assert not edge_in_lll_region(q[pair[0]], q[pair[1]])
    z = vm.z.copy()
    z[7] = 0.0
    assert list(vm.probabilities(z)) == [17 / 64, 1 / 4, 0.0, 17 / 64]


def test_fixture_rounds_in_shearer_region():
    vm = four_event_path_model()
    assert verify_assignment(vm, round_variables_exact(vm))
    alpha = min(0.5, 0.9 * (ray_boundary(vm.dep_graph, vm.probabilities()) - 1))
    omega, trace = round_variables(vm, alpha)
    assert trace.verified and verify_assignment(vm, omega)


def test_dependency_graph_examples():
    disjoint = VariableModel(4, [0.5] * 4, [Event.from_clause([1, 2]), Event.from_clause([3, 4])])
    assert build_dependency_graph(disjoint).edge_count == 0
    star = VariableModel(3, [0.5] * 3, [Event.from_clause([1, k]) for k in (1, 2, 3)] + [Event.from_clause([-1])])
    assert build_dependency_graph(star).edge_count == 6


def test_verify_examples():
    assert verify_assignment(VariableModel(3, [0.5] * 3, []), [0, 1, 0])
    vm = cnf_model(3, [[1, -2, 3]])
    assert verify_assignment(vm, [0, 0, 0])
    assert not verify_assignment(vm, [0, 1, 0])
    fixture = four_event_path_model()
    assert not verify_assignment(fixture, [1] * 15)
    with pytest.raises(InvalidInputError):
        verify_assignment(vm, [0, 2, 0])


def test_event_validation():
    with pytest.raises(InvalidInputError):
        Event((1, 0), (False,) * 4)
    with pytest.raises(InvalidInputError):
        Event((0,), (False,))
    with pytest.raises(InvalidInputError):
        VariableModel(2, [0.5, 1.5], [])
    with pytest.raises(InvalidInputError):
        VariableModel(1, [0.5], [Event.from_clause([2])])


def test_exact_rounding_examples():
    single = VariableModel(1, [0.5], [Event((0,), (False, True))])
    assert list(round_variables_exact(single)) == [0]
    vm = cnf_model(6, [[1, 2, 3], [-4, 5, -6]])
    omega = round_variables_exact(vm)
    assert verify_assignment(vm, omega)
    assert any(verify_assignment(vm, w) for w in itertools.product((0, 1), repeat=6))


def test_exact_rounding_rejects_outside_region():
    vm = VariableModel(1, [0.5], [Event((0,), (True, True))])
    with pytest.raises(SlackViolationError):
        round_variables_exact(vm)


def test_single_event_one_iteration():
    vm = VariableModel(1, [0.5], [Event((0,), (False, True))])
    omega, trace = round_variables(vm, 0.5)
    assert list(omega) == [0] and len(trace.steps) == 1 and trace.verified


def test_disjoint_clauses_decisions_match_oracle():
    vm = cnf_model(6, [[1, 2, 3], [4, 5, 6]])
    omega, trace = round_variables(vm, 0.5)
    assert trace.verified
    for step in trace.steps:
        a = exact_step_derivative(vm, step)
        assert (a >= 0) == (step.derivative_est >= 0) or abs(step.derivative_est) <= step.band


def test_schedule_and_working_slack_recorded():
    vm = cnf_model(8, [[1, 2, 3], [3, -4, 5], [6, 7, -8]])
    alpha = 0.4
    _, trace = round_variables(vm, alpha)
    assert trace.working_slack == alpha / 64
    for step in trace.steps:
        assert step.scale == 1 + alpha * (8 - step.iteration) / 16 == schedule(alpha, 8, step.iteration)
        assert step.scale >= 1
        assert step.delta == alpha**2 / (36 * 8) and step.eps == step.delta / 4


def test_preprocessing_rounds_nearly_integral_marginals():
    vm = VariableModel(3, [0.05, 0.97, 0.5], [Event.from_clause([1, -2, 3])])
    omega, trace = round_variables(vm, 0.4)
    assert trace.preprocessed == {0: 0, 1: 1}
    assert [s.variable for s in trace.steps] == [2]
    assert trace.verified


def test_preprocessing_slack_check():
    # two copies of one event: p = 0.45 on K2 has slack 1/9, well short of alpha/2 = 0.4
    vm = VariableModel(1, [0.45], [Event((0,), (False, True)), Event((0,), (False, True))])
    with pytest.raises(SlackViolationError):
        round_variables(vm, 0.8)


def test_certain_event_is_infeasible():
    vm = VariableModel(1, [0.5], [Event((), (True,))])
    with pytest.raises(InvalidInputError):
        round_variables(vm, 0.5)


@settings(max_examples=60, deadline=None)
@given(models())
def test_probability_matches_enumeration(vm):
    for ev in vm.events:
        assert event_probability(ev, vm.z) == pytest.approx(_brute_probability(ev, vm.z), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(models(), st.data())
def test_qb_is_multilinear_in_each_marginal(vm, data):
    p = vm.probabilities()
    if np.any(p >= 1):
        return
    j = data.draw(st.integers(0, vm.m - 1))
    z0, z1, zh = vm.z.copy(), vm.z.copy(), vm.z.copy()
    z0[j], z1[j], zh[j] = 0.0, 1.0, 0.5
    mid = breve_q_of_z(vm, zh)
    assert mid == pytest.approx((breve_q_of_z(vm, z0) + breve_q_of_z(vm, z1)) / 2, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(models(), st.floats(0.05, 1.0), st.data())
def test_coordinatewise_perturbation_bound(vm, alpha, data):
    m = vm.m
    i = data.draw(st.integers(0, m - 1))
    z = vm.z.copy()
    z[i] = data.draw(st.floats(alpha / 4, 1 - alpha / 4)) if alpha < 2 else z[i]
    delta = alpha**2 / (36 * m)
    zd = z.copy()
    zd[i] -= delta
    p, pd = vm.probabilities(z), vm.probabilities(zd)
    assert np.all(pd <= (1 + alpha / (9 * m)) * p + 1e-15)


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(6, 16))
    clauses = random_bounded_cnf(m, int(rng.integers(1, m // 2 + 1)), rng)
    return cnf_model(m, clauses)


@pytest.mark.parametrize("seed", range(10))
def test_exact_rounding_never_decreases_objective(seed):
    vm = _random_instance(seed)
    z = vm.z.copy()
    prev = breve_q_of_z(vm, z)
    for i in range(vm.m):
        up, down = z.copy(), z.copy()
        up[i], down[i] = 1.0, 0.0
        z = up if breve_q_of_z(vm, up) - breve_q_of_z(vm, down) >= 0 else down
        cur = breve_q_of_z(vm, z)
        assert cur >= prev - 1e-12
        prev = cur
    assert list(z.astype(int)) == list(round_variables_exact(vm))


@pytest.mark.parametrize("seed", range(10))
def test_random_cnf_end_to_end(seed):
    vm = _random_instance(seed)
    p = vm.probabilities()
    alpha = min(0.5, 0.9 * (ray_boundary(vm.dep_graph, p) - 1))
    assert in_shearer_exact(vm.dep_graph, (1 + alpha) * p)
    omega, trace = round_variables(vm, alpha)
    assert verify_assignment(vm, omega) and trace.verified
    assert trace.to_dict()["assignment"] == list(omega)
