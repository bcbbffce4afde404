"""The univariate tree recurrence ``f(x) = lam / (1 - x)**d`` and its rate of decay.

On the infinite ``(d+1)``-regular tree the occupation ratio obeys this
recurrence; it has a fixed point in ``(0, 1)`` iff ``lam <= lambda_prime_c(d+1)``.
With ``lam = (1 - alpha) * lambda_prime_c(d+1)`` the iterates ``f^l(0)``
converge geometrically at rate ``f'(x*)``, and ``1 - f'(x*)`` scales like
``sqrt(alpha)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, InvalidInputError, NoFixedPointError

#: Iterates stop once ``|x* - x_l|`` falls below this.
ERROR_FLOOR = 1e-9
#: Rates are measured only after the error drops below this.
WINDOW_START = 1e-4
WINDOW_FRACTION = 0.25
DEFAULT_ITERS = 1_000_000


def lambda_prime_c(d: int) -> float:
    """Univariate Shearer threshold of maximum degree ``d``: ``(d-1)^(d-1) / d^d``, and 1/2 for ``d = 1``."""
    d = int(d)
    if d < 1:
        raise InvalidInputError("degree must be at least 1")
    if d == 1:
        return 0.5
    return (d - 1) ** (d - 1) / d**d


def lambda_c(d: int) -> float:
    """Positive-activity uniqueness threshold ``(d-1)^(d-1) / (d-2)^d``."""
    d = int(d)
    if d < 3:
        raise InvalidInputError("lambda_c is defined for d >= 3")
    return (d - 1) ** (d - 1) / (d - 2) ** d


def critical_activity(d: int) -> float:
    """Largest ``lam`` for which ``f`` has a fixed point: ``d^d / (d+1)^(d+1)``."""
    return lambda_prime_c(int(d) + 1)


def f(x, d: int, lam: float):
    return lam / (1 - x) ** d


def f_prime(x, d: int, lam: float):
    return d * lam / (1 - x) ** (d + 1)


@dataclass(frozen=True)
class FixedPoints:
    d: int
    lam: float
    x_star: float
    x_dagger: Optional[float]
    f_prime_at_star: float

    @property
    def tangential(self) -> bool:
        return self.x_dagger is not None and self.x_dagger == self.x_star


def fixed_points(d: int, lam: float) -> FixedPoints:
    """Both fixed points of ``f`` in ``(0, 1)``.

    ``f'`` equals 1 at ``x_m = 1 - (d lam)^(1/(d+1))`` and ``f(x) - x`` is
    convex, so ``x*`` is the root in ``[0, x_m]`` and ``x_dagger`` the one in
    ``[x_m, 1)``; both are found by Brent's method.  At the critical
    activity (up to rounding) the two coincide at ``x_m``.
    """
    d = int(d)
    if d < 1:
        raise InvalidInputError("degree must be at least 1")
    if not lam > 0:
        raise InvalidInputError("activity must be positive")
    crit = critical_activity(d)
    if lam > crit * (1 + 1e-12):
        raise NoFixedPointError(f"lam={lam} exceeds the critical activity {crit} for d={d}")
    xm = 1 - (d * lam) ** (1 / (d + 1))

    def gap(x):
        return f(x, d, lam) - x

    if gap(xm) >= 0:
        x = xm
        return FixedPoints(d, lam, x, x, f_prime(x, d, lam))
    x_star = brentq(gap, 0.0, xm, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    hi = xm
    while gap(hi) <= 0:
        hi = 1 - (1 - hi) / 2
    x_dag = brentq(gap, xm, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    return FixedPoints(d, lam, x_star, x_dag, f_prime(x_star, d, lam))


def contraction_rate(d: int, alpha: float, iters: int = DEFAULT_ITERS) -> float:
    """Measured contraction factor of ``f^l(0) -> x*`` at ``lam = (1 - alpha) * critical``.

    Iterates from 0 until the error falls below ``ERROR_FLOOR``, then averages
    the ratios of successive errors over the last quarter of the iterates
    whose error is already below ``WINDOW_START``.
    """
    if not 0 < alpha < 1:
        raise InvalidInputError("alpha must lie in (0, 1)")
    lam = (1 - alpha) * critical_activity(d)
    x_star = fixed_points(d, lam).x_star
    errs = [x_star]
    x = 0.0
    for _ in range(iters):
        x = f(x, d, lam)
        e = x_star - x
        errs.append(e)
        if e < ERROR_FLOOR:
            break
    else:
        raise ConvergenceError(f"no convergence within {iters} iterations")
    ratios = [b / a for a, b in zip(errs, errs[1:]) if a < WINDOW_START and a > 0 and b > 0]
    if not ratios:
        ratios = [b / a for a, b in zip(errs, errs[1:]) if a > 0 and b > 0]
    if not ratios:
        # exact arithmetic hit the fixed point at once; nothing to contract
        return 0.0
    k = max(1, math.ceil(WINDOW_FRACTION * len(ratios)))
    return float(np.mean(ratios[-k:]))


@dataclass
class DecayFit:
    d: int
    alphas: list[float]
    rates: list[float]
    analytic_rates: list[float]
    fitted_exponent: float
    prefactor: float
    sqrt_constant: float

    @property
    def one_minus_rho(self) -> list[float]:
        return [1 - r for r in self.rates]

    @property
    def max_rate_mismatch(self) -> float:
        return max(abs(a - b) for a, b in zip(self.rates, self.analytic_rates))

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "alphas": list(self.alphas),
            "rates": list(self.rates),
            "analytic_rates": list(self.analytic_rates),
            "fitted_exponent": self.fitted_exponent,
            "prefactor": self.prefactor,
            "sqrt_constant": self.sqrt_constant,
            "max_rate_mismatch": self.max_rate_mismatch,
        }


def scaling_fit(d: int, alphas: Sequence[float], iters: int = DEFAULT_ITERS) -> DecayFit:
    """Fit ``1 - rho(alpha) ~ prefactor * alpha**exponent`` by least squares in log-log space.

    ``sqrt_constant`` is the mean of ``(1 - rho)/sqrt(alpha)``.
    """
    values = sorted({float(a) for a in alphas}, reverse=True)
    if len(values) < 2:
        raise InvalidInputError("scaling fit needs at least two distinct alphas")
    rates = [contraction_rate(d, a, iters) for a in values]
    analytic = [fixed_points(d, (1 - a) * critical_activity(d)).f_prime_at_star for a in values]
    gaps = np.array([1 - r for r in rates])
    if np.any(gaps <= 0):
        raise ConvergenceError("measured rate is not below 1")
    slope, intercept = np.polyfit(np.log(values), np.log(gaps), 1)
    sqrt_c = float(np.mean(gaps / np.sqrt(values)))
    return DecayFit(int(d), values, rates, analytic, float(slope), float(math.exp(intercept)), sqrt_c)


def decay_identity_residual(d: int, alpha: float) -> float:
    """``(1 - delta)(1 - delta/(d+1))^-(d+1) - (1 - alpha)`` with ``delta = 1 - f'(x*)``."""
    lam = (1 - alpha) * critical_activity(d)
    delta = 1 - fixed_points(d, lam).f_prime_at_star
    return (1 - delta) * (1 - delta / (d + 1)) ** (-(d + 1)) - (1 - alpha)
