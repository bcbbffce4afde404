"""Independence polynomial at negative and complex activities.

Exact subset recursion, truncated correlation decay inside the Shearer
region, approximate region membership, constructive local-lemma rounding
and experiments on the univariate tree recurrence.
"""
from .decay import (
    DecayParams,
    EvalReport,
    SensitivityReport,
    depth_for,
    error_bound_root,
    eval_polynomial,
    fptas_eval,
    occupation_ratio_truncated,
    sensitivity_profile,
)
from .errors import IndPolyError
from .exact import (
    breve_q_exact,
    breve_q_table,
    first_root_on_ray,
    membership_exact,
    occupation_ratio_exact,
    q_S_exact,
)
from .graph import Graph, build_graph, count_saw, subset_mask
from .lll import (
    Event,
    RoundingTrace,
    VariableModel,
    build_dependency_graph,
    event_probability,
    round_variables,
    round_variables_exact,
    verify_assignment,
)
from .membership import MembershipVerdict, Verdict, estimate_lambda_G, slack_bounds, test_membership
from .univariate import DecayFit, FixedPoints, contraction_rate, fixed_points, lambda_c, lambda_prime_c, scaling_fit

__version__ = "0.1.0"
