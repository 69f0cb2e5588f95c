"""Aggregate buzz/backlash dynamics under logistic praise and attack responses.

Many small agents react to the same observable x: the praise rate P and
attack rate N are logistic in the (shaped, one-sided) surprise and norm
deviation signals net of a representative cost.  The macro state follows

    x' = x + kappa * (P - N) - rho * (x - x_bar)

Perturbations around a fixed point are governed by J = 1 + G - rho where G
is the local gain of kappa * (P - N) with respect to x:  |J| < 1 decays,
J > 1 diverges monotonically (buzz), J < -1 diverges with alternating sign
(backlash).  At exact kinks (surprise or deviation equal to zero) the
one-sided contributions are taken to be zero, which makes the gain a total
deterministic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .reference import (
    Identity,
    Observation,
    ShapeFn,
    differences,
    negative_part,
    positive_part,
)


class NoFixedPointFound(RuntimeError):
    """Damped fixed-point iteration on the drift failed to converge."""


class StabilityLabel(Enum):
    STABLE = "Stable"
    BUZZ = "Buzz"
    BACKLASH = "Backlash"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class MassParams:
    """Population-average response parameters of the macro dynamics."""

    eta: float
    c_bar: float
    kappa: float
    rho: float
    x_bar: float
    beta_plus: float = 0.0
    beta_minus: float = 0.0
    gamma_plus: float = 0.0
    gamma_minus: float = 0.0
    g2: ShapeFn = Identity()
    g3: ShapeFn = Identity()

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError("eta must satisfy eta > 0")
        if not self.kappa > 0:
            raise ValueError("kappa must satisfy kappa > 0")
        if not self.rho > 0:
            raise ValueError("rho must satisfy rho > 0")
        weights = (self.beta_plus, self.beta_minus, self.gamma_plus, self.gamma_minus)
        if any(w < 0 for w in weights):
            raise ValueError("population weights must satisfy weight >= 0")


@dataclass(frozen=True)
class MassState:
    x: float
    forecast: float
    reference: float

    def __post_init__(self) -> None:
        if not all(
            math.isfinite(v) for v in (self.x, self.forecast, self.reference)
        ):
            raise ValueError("mass state fields must be finite")


def logistic(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _logistic_slope(z: float) -> float:
    s = logistic(z)
    return s * (1.0 - s)


def _signals(params: MassParams, epsilon: float, xi: float) -> tuple[float, float]:
    s_plus = (
        params.eta
        * (
            params.beta_plus * params.g2(positive_part(epsilon))
            + params.gamma_plus * params.g3(positive_part(xi))
        )
        - params.c_bar
    )
    s_minus = (
        params.eta
        * (
            params.beta_minus * params.g2(negative_part(epsilon))
            + params.gamma_minus * params.g3(negative_part(xi))
        )
        - params.c_bar
    )
    return s_plus, s_minus


def response_rates(params: MassParams, epsilon: float, xi: float) -> tuple[float, float]:
    """Praise and attack rates (both strictly inside (0, 1))."""
    s_plus, s_minus = _signals(params, epsilon, xi)
    return logistic(s_plus), logistic(s_minus)


def step(state: MassState, params: MassParams) -> float:
    """One macro update of x (forecast and reference held exogenous)."""
    obs = Observation(
        x=state.x, x_prev=state.x, forecast=state.forecast, reference=state.reference
    )
    _, epsilon, xi = differences(obs)
    praise, attack = response_rates(params, epsilon, xi)
    return state.x + params.kappa * (praise - attack) - params.rho * (state.x - params.x_bar)


def local_gain(params: MassParams, epsilon: float, xi: float) -> float:
    """Derivative of kappa * (P - N) with respect to x at (epsilon, xi).

    Both response sides feed back positively: raising x strengthens the
    praise signals (d(eps_+)/dx = +1 where eps > 0) and weakens the attack
    signals (d(eps_-)/dx = -1 where eps < 0, entering through -N), so

        G = kappa * eta * (sigma'(s+) * [up-side slopes]
                           + sigma'(s-) * [down-side slopes]) >= 0

    and alternating escape (J < -1) can only come from over-damping
    (rho > 2).  Indicators are strict, so a signal sitting exactly at its
    kink contributes zero.
    """
    s_plus, s_minus = _signals(params, epsilon, xi)
    up = 0.0
    if epsilon > 0:
        up += params.beta_plus * params.g2.derivative(positive_part(epsilon))
    if xi > 0:
        up += params.gamma_plus * params.g3.derivative(positive_part(xi))
    down = 0.0
    if epsilon < 0:
        down += params.beta_minus * params.g2.derivative(negative_part(epsilon))
    if xi < 0:
        down += params.gamma_minus * params.g3.derivative(negative_part(xi))
    return params.kappa * params.eta * (
        _logistic_slope(s_plus) * up + _logistic_slope(s_minus) * down
    )


def jacobian(gain: float, rho: float) -> float:
    return 1.0 + gain - rho


def classify_stability(j: float, tol: float = 1e-9) -> StabilityLabel:
    """Stable if |J| < 1, Buzz if J > 1, Backlash if J < -1, else Boundary."""
    if not tol >= 0:
        raise ValueError("tol must satisfy tol >= 0")
    if abs(j) < 1.0 - tol:
        return StabilityLabel.STABLE
    if j > 1.0 + tol:
        return StabilityLabel.BUZZ
    if j < -1.0 - tol:
        return StabilityLabel.BACKLASH
    return StabilityLabel.BOUNDARY


def find_fixed_point(
    params: MassParams,
    forecast: float,
    reference: float,
    start: float,
    tolerance: float = 1e-10,
    max_iterations: int = 10_000,
    damping: float = 0.5,
) -> float:
    """Damped iteration on the drift, seeded at ``start``.

    The damped map is contracting near stable and backlash fixed points;
    monotone-unstable (buzz) fixed points are found only when the seed is
    already at or extremely close to them.
    """
    x = float(start)
    for _ in range(max_iterations):
        fx = step(MassState(x=x, forecast=forecast, reference=reference), params)
        residual = fx - x
        if abs(residual) < tolerance:
            return x
        x += damping * residual
        if not math.isfinite(x) or abs(x) > 1e12:
            raise NoFixedPointFound("fixed-point search diverged")
    raise NoFixedPointFound(
        f"fixed-point search did not converge within {max_iterations} iterations"
    )


@dataclass(eq=False)
class MassSimResult:
    fixed_point: float
    gain: float
    jacobian: float
    analytic_label: StabilityLabel
    empirical_label: StabilityLabel
    xs: np.ndarray
    deviations: np.ndarray


def _empirical_label(deviations: np.ndarray) -> StabilityLabel:
    d0 = deviations[0]
    if d0 == 0.0 or np.all(np.abs(deviations) < 1e-300):
        return StabilityLabel.STABLE
    last = deviations[-1]
    if abs(last) < 0.5 * abs(d0):
        return StabilityLabel.STABLE
    if abs(last) <= 2.0 * abs(d0):
        return StabilityLabel.BOUNDARY
    # Growing: read the sign pattern inside the local window before the
    # trajectory leaves the linear regime.
    exceed = np.nonzero(np.abs(deviations) > 100.0 * abs(d0))[0]
    cut = int(exceed[0]) + 1 if exceed.size else deviations.size
    window = deviations[: max(cut, 4)]
    signs = [1 if v > 0 else -1 for v in window if v != 0.0]
    if len(signs) < 2:
        return StabilityLabel.BOUNDARY
    if all(s == signs[0] for s in signs):
        return StabilityLabel.BUZZ
    if all(b == -a for a, b in zip(signs, signs[1:])):
        return StabilityLabel.BACKLASH
    return StabilityLabel.BOUNDARY


def simulate_mass(
    state0: MassState,
    params: MassParams,
    steps: int,
    perturbation: float,
) -> MassSimResult:
    """Perturb a fixed point and label the deviation behavior empirically.

    The fixed point is located by damped iteration seeded at ``state0.x``
    (forecast and reference held fixed throughout).  The trajectory starts
    at the fixed point plus ``perturbation`` and runs ``steps`` updates,
    stopping early if the deviation leaves the local window.  Deterministic:
    there is no noise anywhere in the dynamics.
    """
    if steps < 2:
        raise ValueError("steps must satisfy steps >= 2")
    fp = find_fixed_point(params, state0.forecast, state0.reference, start=state0.x)
    _, eps_fp, xi_fp = differences(
        Observation(x=fp, x_prev=fp, forecast=state0.forecast, reference=state0.reference)
    )
    gain = local_gain(params, eps_fp, xi_fp)
    j = jacobian(gain, params.rho)

    xs = [fp + perturbation]
    guard = 1e9 * max(abs(perturbation), 1e-12)
    for _ in range(steps):
        nxt = step(
            MassState(x=xs[-1], forecast=state0.forecast, reference=state0.reference),
            params,
        )
        xs.append(nxt)
        if not math.isfinite(nxt) or abs(nxt - fp) > guard:
            break
    xs_arr = np.array(xs)
    deviations = xs_arr - fp
    return MassSimResult(
        fixed_point=fp,
        gain=gain,
        jacobian=j,
        analytic_label=classify_stability(j),
        empirical_label=_empirical_label(deviations),
        xs=xs_arr,
        deviations=deviations,
    )
