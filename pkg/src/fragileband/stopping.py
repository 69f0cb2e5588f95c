"""The adversary's stop/continue problem over the cooperative surplus.

State is the harvestable surplus phi = 2*R - 2*P, the gap between the
cooperative total and the defection baseline.  Each period the adversary
either stops (induces collapse, harvesting phi minus the collapse cost; the
system then repeats mutual defection forever and the continuation value is
zero) or continues (pays the fragility-maintenance cost and keeps the
discounted expected future value alive):

    V(phi) = max( phi - C_c,  delta * E[V(phi')] - C_m )

Three surplus processes are supported: deterministic growth, i.i.d. discrete
growth shocks (both act multiplicatively on phi and are discretized onto a
log-spaced grid truncated at a cap, with off-grid successors mapped by
linear interpolation), and an explicit Markov chain on an R grid.  Costs may
be constants, per-period tables (last entry held forever), or per-period
per-state tables.

The per-state diagnostics

    delta_gain = delta * E[V'] - phi        (continuation pull)
    cost_differential = C_m - C_c           (cost of waiting vs acting)

drive the regime trichotomy: continuing is strictly preferred when
delta_gain exceeds the cost differential (rational stagnation), stopping
when delta_gain <= -cost_differential (immediate destruction), and the
band |delta_gain| <= |cost_differential| is read as rational nonintervention
(intervention abandonment).  With zero costs and deterministic growth g the
stagnation condition collapses to delta > 1/(1+g).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Union

import numpy as np


class InvalidProcess(ValueError):
    """A surplus process violates its structural invariants."""


class NonConvergence(RuntimeError):
    """Value iteration hit the iteration budget before meeting tolerance.

    Usually means the discount factor is too close to 1 for the requested
    tolerance.
    """

    def __init__(self, message: str, iterations: int, residual: float) -> None:
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class Decision(Enum):
    STOP = "stop"
    CONTINUE = "continue"


class RegimeLabel(Enum):
    IMMEDIATE_DESTRUCTION = "ImmediateDestruction"
    RATIONAL_STAGNATION = "RationalStagnation"
    INTERVENTION_ABANDONMENT = "InterventionAbandonment"


def _check_common(defection_payoff: float, initial_r: float) -> None:
    if not (math.isfinite(defection_payoff) and math.isfinite(initial_r)):
        raise InvalidProcess("process payoffs must be finite")
    if not initial_r > defection_payoff:
        raise InvalidProcess("initial cooperative payoff must satisfy R_0 > P")


@dataclass(frozen=True)
class Deterministic:
    """Surplus grows by a fixed factor (1 + growth) each period."""

    growth: float
    defection_payoff: float
    initial_r: float

    def __post_init__(self) -> None:
        _check_common(self.defection_payoff, self.initial_r)
        if not self.growth > -1:
            raise InvalidProcess("growth rates must satisfy g > -1")

    def growth_rates(self) -> tuple[float, ...]:
        return (self.growth,)

    def cooperative_learning(self) -> bool:
        return self.growth >= 0


@dataclass(frozen=True)
class DiscreteShocks:
    """Surplus multiplied by (1 + g_k) with probability p_k each period."""

    support: tuple[tuple[float, float], ...]
    defection_payoff: float
    initial_r: float

    def __post_init__(self) -> None:
        _check_common(self.defection_payoff, self.initial_r)
        support = tuple((float(g), float(p)) for g, p in self.support)
        object.__setattr__(self, "support", support)
        if not support:
            raise InvalidProcess("shock support must be nonempty")
        if any(not g > -1 for g, _ in support):
            raise InvalidProcess("growth rates must satisfy g > -1")
        if any(p < 0 for _, p in support):
            raise InvalidProcess("shock probabilities must be nonnegative")
        if abs(sum(p for _, p in support) - 1.0) > 1e-12:
            raise InvalidProcess("shock probabilities must sum to 1")

    def growth_rates(self) -> tuple[float, ...]:
        return tuple(g for g, _ in self.support)

    def mean_growth(self) -> float:
        return sum(g * p for g, p in self.support)

    def cooperative_learning(self) -> bool:
        return self.mean_growth() >= 0


@dataclass(frozen=True)
class MarkovGrid:
    """Explicit Markov chain on an ascending grid of cooperative payoffs."""

    r_grid: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...]
    defection_payoff: float
    initial_r: float

    def __post_init__(self) -> None:
        _check_common(self.defection_payoff, self.initial_r)
        grid = tuple(float(r) for r in self.r_grid)
        rows = tuple(tuple(float(p) for p in row) for row in self.transition)
        object.__setattr__(self, "r_grid", grid)
        object.__setattr__(self, "transition", rows)
        if len(grid) < 1:
            raise InvalidProcess("grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidProcess("grid values strictly ascending")
        if any(r <= self.defection_payoff for r in grid):
            raise InvalidProcess("grid values must exceed the defection payoff")
        n = len(grid)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InvalidProcess("transition matrix must be square over the grid")
        for row in rows:
            if any(p < 0 for p in row) or abs(sum(row) - 1.0) > 1e-12:
                raise InvalidProcess("transition rows not stochastic")
        distances = [abs(r - self.initial_r) for r in grid]
        idx = distances.index(min(distances))
        tol = 1e-9 * max(1.0, abs(self.initial_r))
        if distances[idx] > tol:
            raise InvalidProcess("initial_r must be one of the grid values")
        object.__setattr__(self, "initial_r", grid[idx])

    @property
    def initial_index(self) -> int:
        return self.r_grid.index(self.initial_r)

    def matrix(self) -> np.ndarray:
        return np.array(self.transition, dtype=float)

    def cooperative_learning(self) -> bool:
        grid = np.array(self.r_grid)
        expected = self.matrix() @ grid
        return bool(np.all(expected >= grid - 1e-12))


SurplusProcess = Union[Deterministic, DiscreteShocks, MarkovGrid]

CostValue = Union[float, Sequence[float], Sequence[Sequence[float]]]


def _canonical_cost(value: CostValue):
    arr = np.asarray(value, dtype=float)
    if arr.ndim > 2:
        raise ValueError("cost tables must be scalar, per-period, or period x state")
    if arr.size == 0:
        raise ValueError("cost tables must be nonempty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("costs must be nonnegative")
    if arr.ndim == 0:
        return float(arr)
    if arr.ndim == 1:
        return tuple(float(v) for v in arr)
    return tuple(tuple(float(v) for v in row) for row in arr)


def _cost_table(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(-1, 1)
    return arr


@dataclass(frozen=True)
class CostSchedule:
    """Collapse-induction and fragility-maintenance costs.

    Each entry is a nonnegative constant, a per-period sequence (the last
    value is held for all later periods), or a period x state table whose
    width must match the solver's state grid.
    """

    collapse: CostValue = 0.0
    maintain: CostValue = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "collapse", _canonical_cost(self.collapse))
        object.__setattr__(self, "maintain", _canonical_cost(self.maintain))
        object.__setattr__(self, "_collapse_table", _cost_table(self.collapse))
        object.__setattr__(self, "_maintain_table", _cost_table(self.maintain))

    @staticmethod
    def _at(table: np.ndarray, t: int, n_states: int) -> np.ndarray:
        row = table[min(int(t), table.shape[0] - 1)]
        if row.size == 1:
            return np.full(n_states, row[0])
        if row.size != n_states:
            raise ValueError("state-dependent cost table width must match grid size")
        return row.copy()

    def collapse_at(self, t: int, n_states: int) -> np.ndarray:
        return self._at(self._collapse_table, t, n_states)

    def maintain_at(self, t: int, n_states: int) -> np.ndarray:
        return self._at(self._maintain_table, t, n_states)

    @staticmethod
    def _at_scalar(table: np.ndarray, t: int, state_index: int) -> float:
        row = table[min(int(t), table.shape[0] - 1)]
        return float(row[0] if row.size == 1 else row[state_index])

    def collapse_scalar(self, t: int, state_index: int = 0) -> float:
        return self._at_scalar(self._collapse_table, t, state_index)

    def maintain_scalar(self, t: int, state_index: int = 0) -> float:
        return self._at_scalar(self._maintain_table, t, state_index)

    def horizon_len(self) -> int:
        return max(self._collapse_table.shape[0], self._maintain_table.shape[0])

    def stationary(self) -> bool:
        return self.horizon_len() == 1


@dataclass(frozen=True)
class DPConfig:
    """Solver settings: discount, stopping criterion, and grid truncation."""

    delta: float
    tolerance: float = 1e-9
    max_iterations: int = 10**6
    r_cap: float | None = None
    grid_points: int = 200

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ValueError("delta must satisfy 0 < delta < 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must satisfy tolerance > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must satisfy max_iterations >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must satisfy grid_points >= 2")


def initial_phi(process: SurplusProcess) -> float:
    return 2.0 * (process.initial_r - process.defection_payoff)


def stop_value(r_t: float, p: float, collapse_cost: float) -> float:
    """Immediate harvest from inducing collapse: (2*R - 2*P) - C_c."""
    return 2.0 * (r_t - p) - collapse_cost


def stagnation_sufficient(delta: float, g: float) -> bool:
    """Growth alone justifies waiting: true iff delta > 1 / (1 + g).

    Sufficient condition for continuation with zero costs and expected
    surplus growth at rate g.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must satisfy 0 < delta < 1")
    if not g > -1:
        raise ValueError("growth rates must satisfy g > -1")
    return delta > 1.0 / (1.0 + g)


def classify_regime(delta_gain: float, cost_differential: float) -> RegimeLabel:
    """Map the (delta_gain, cost_differential) diagnostics to a regime.

    The nonintervention band |delta_gain| <= |cost_differential| is
    evaluated first, so the function is total even where the three raw
    conditions overlap; the remaining cases split on the strict stagnation
    inequality delta_gain > cost_differential.
    """
    if abs(delta_gain) <= abs(cost_differential):
        return RegimeLabel.INTERVENTION_ABANDONMENT
    if delta_gain > cost_differential:
        return RegimeLabel.RATIONAL_STAGNATION
    return RegimeLabel.IMMEDIATE_DESTRUCTION


def _state_grid(
    process: SurplusProcess, r_cap: float | None, grid_points: int
) -> tuple[np.ndarray, int]:
    """Phi grid and the index of the initial state (an exact grid point)."""
    p = process.defection_payoff
    phi0 = initial_phi(process)
    if isinstance(process, MarkovGrid):
        grid = 2.0 * (np.array(process.r_grid) - p)
        return grid, process.initial_index
    rates = process.growth_rates()
    if max(rates) > 0:
        if r_cap is None:
            raise ValueError("r_cap must be set for growing processes")
        if not r_cap >= process.initial_r:
            raise ValueError("r_cap must be at least initial_r")
        phi_hi = 2.0 * (r_cap - p)
    else:
        phi_hi = phi0
    phi_lo = phi0 * 1e-4 if min(rates) < 0 else phi0
    if phi_hi <= phi_lo * (1.0 + 1e-12):
        return np.array([phi0]), 0
    base = np.geomspace(phi_lo, phi_hi, grid_points)
    base = base[np.abs(base - phi0) > 1e-9 * phi0]
    grid = np.sort(np.concatenate([base, [phi0]]))
    index = int(np.nonzero(grid == phi0)[0][0])
    return grid, index


def _interp_weights(grid: np.ndarray, targets: np.ndarray):
    """Linear-interpolation indices/weights with clamping at both grid ends."""
    n = grid.size
    clamped = np.clip(targets, grid[0], grid[-1])
    if n == 1:
        zeros = np.zeros(clamped.shape, dtype=int)
        return zeros, zeros, np.ones_like(clamped), np.zeros_like(clamped)
    hi = np.clip(np.searchsorted(grid, clamped, side="left"), 1, n - 1)
    lo = hi - 1
    width = grid[hi] - grid[lo]
    w_hi = (clamped - grid[lo]) / width
    return lo, hi, 1.0 - w_hi, w_hi


def _expectation_fn(
    process: SurplusProcess, grid: np.ndarray
) -> Callable[[np.ndarray], np.ndarray]:
    """E[V(successor)] as a function of the value vector on the grid."""
    if isinstance(process, MarkovGrid):
        matrix = process.matrix()
        return lambda values: matrix @ values
    if isinstance(process, Deterministic):
        lo, hi, w_lo, w_hi = _interp_weights(grid, grid * (1.0 + process.growth))
        return lambda values: w_lo * values[lo] + w_hi * values[hi]
    pieces = []
    for g, p in process.support:
        lo, hi, w_lo, w_hi = _interp_weights(grid, grid * (1.0 + g))
        pieces.append((p, lo, hi, w_lo, w_hi))

    def expect(values: np.ndarray) -> np.ndarray:
        total = np.zeros_like(values)
        for p, lo, hi, w_lo, w_hi in pieces:
            total += p * (w_lo * values[lo] + w_hi * values[hi])
        return total

    return expect


@dataclass(eq=False)
class ValueSolution:
    """Converged values, greedy policy and regime diagnostics per state.

    For time-varying cost tables the reported layer is period 0: the solver
    finds the stationary fixed point under the held tail costs and then
    backward-inducts the finite prefix.  ``values`` satisfies the max
    structure, and ``policy`` is Stop exactly where the stop value is at
    least the continuation value (ties stop).
    """

    phi_grid: np.ndarray
    r_grid: np.ndarray
    values: np.ndarray
    policy: tuple[Decision, ...]
    delta_gain: np.ndarray
    cost_differential: np.ndarray
    iterations: int
    residual: float
    residuals: tuple[float, ...]
    delta: float
    initial_index: int
    process: SurplusProcess
    costs: CostSchedule
    _tail_values: np.ndarray
    _expect: Callable[[np.ndarray], np.ndarray]

    @property
    def initial_value(self) -> float:
        return float(self.values[self.initial_index])

    def value_at(self, phi: float) -> float:
        return float(np.interp(phi, self.phi_grid, self.values))

    def regime_at(self, index: int) -> RegimeLabel:
        return classify_regime(
            float(self.delta_gain[index]), float(self.cost_differential[index])
        )

    def regimes(self) -> tuple[RegimeLabel, ...]:
        return tuple(self.regime_at(i) for i in range(self.phi_grid.size))

    def _nearest_index(self, phi: float) -> int:
        grid = self.phi_grid
        pos = int(np.searchsorted(grid, phi))
        if pos <= 0:
            return 0
        if pos >= grid.size:
            return grid.size - 1
        return pos if grid[pos] - phi < phi - grid[pos - 1] else pos - 1

    def continuation_value_at(self, phi: float, t: int = 0) -> float:
        """Greedy continuation estimate at an arbitrary surplus level.

        Uses the stationary-tail values (exact for constant costs; for
        tabulated costs the prefix layers are approximated by the tail).
        """
        tail = self._tail_values
        if isinstance(self.process, MarkovGrid):
            row = self.process.matrix()[self._nearest_index(phi)]
            expected = float(row @ tail)
        elif isinstance(self.process, Deterministic):
            expected = float(
                np.interp(phi * (1.0 + self.process.growth), self.phi_grid, tail)
            )
        else:
            expected = sum(
                p * float(np.interp(phi * (1.0 + g), self.phi_grid, tail))
                for g, p in self.process.support
            )
        maintain = self.costs.maintain_scalar(t, self._nearest_index(phi))
        return self.delta * expected - maintain

    def stop_value_at(self, phi: float, t: int = 0) -> float:
        return phi - self.costs.collapse_scalar(t, self._nearest_index(phi))

    def decision_at(self, phi: float, t: int = 0) -> Decision:
        if self.stop_value_at(phi, t) >= self.continuation_value_at(phi, t):
            return Decision.STOP
        return Decision.CONTINUE


def value_iteration(
    process: SurplusProcess, costs: CostSchedule, config: DPConfig
) -> ValueSolution:
    """Solve the stop/continue problem to the configured sup-norm tolerance.

    The backup operator is a delta-contraction, so successive residuals
    shrink at least geometrically; the iteration budget is a guard against
    discounts too close to 1 for the tolerance.
    """
    grid, initial_index = _state_grid(process, config.r_cap, config.grid_points)
    n = grid.size
    expect = _expectation_fn(process, grid)

    tail_t = costs.horizon_len() - 1
    stop_tail = grid - costs.collapse_at(tail_t, n)
    maintain_tail = costs.maintain_at(tail_t, n)

    values = np.zeros(n)
    residuals: list[float] = []
    converged = False
    for _ in range(config.max_iterations):
        updated = np.maximum(stop_tail, config.delta * expect(values) - maintain_tail)
        residual = float(np.max(np.abs(updated - values)))
        residuals.append(residual)
        values = updated
        if residual < config.tolerance:
            converged = True
            break
    if not converged:
        raise NonConvergence(
            "value iteration did not reach tolerance "
            f"{config.tolerance:g} within {config.max_iterations} iterations "
            f"(residual {residuals[-1]:.3e}); delta may be too close to 1",
            iterations=len(residuals),
            residual=residuals[-1],
        )

    # Backward-induct the nonstationary cost prefix down to period 1.
    values_next = values
    for t in range(tail_t - 1, 0, -1):
        values_next = np.maximum(
            grid - costs.collapse_at(t, n),
            config.delta * expect(values_next) - costs.maintain_at(t, n),
        )

    expected_next = expect(values_next)
    stop_now = grid - costs.collapse_at(0, n)
    continue_now = config.delta * expected_next - costs.maintain_at(0, n)
    values_now = np.maximum(stop_now, continue_now)
    stop_mask = stop_now >= continue_now

    return ValueSolution(
        phi_grid=grid,
        r_grid=process.defection_payoff + grid / 2.0,
        values=values_now,
        policy=tuple(Decision.STOP if m else Decision.CONTINUE for m in stop_mask),
        delta_gain=config.delta * expected_next - grid,
        cost_differential=costs.maintain_at(0, n) - costs.collapse_at(0, n),
        iterations=len(residuals),
        residual=residuals[-1],
        residuals=tuple(residuals),
        delta=config.delta,
        initial_index=initial_index,
        process=process,
        costs=costs,
        _tail_values=values,
        _expect=expect,
    )


def finite_horizon_oracle(
    process: SurplusProcess,
    costs: CostSchedule,
    delta: float,
    horizon: int,
    r_cap: float | None = None,
    grid_points: int = 200,
) -> np.ndarray:
    """Exact backward induction from terminal value 0 over ``horizon`` periods.

    Independent check for :func:`value_iteration`: on the same grid the two
    agree within delta**horizon times the value scale.
    """
    if horizon < 1:
        raise ValueError("horizon must satisfy horizon >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must satisfy 0 < delta < 1")
    grid, _ = _state_grid(process, r_cap, grid_points)
    n = grid.size
    expect = _expectation_fn(process, grid)
    values = np.zeros(n)
    for t in range(horizon - 1, -1, -1):
        values = np.maximum(
            grid - costs.collapse_at(t, n),
            delta * expect(values) - costs.maintain_at(t, n),
        )
    return values


def bellman_backup(
    values,
    phi: float,
    process: SurplusProcess,
    costs: CostSchedule,
    delta: float,
    t: int = 0,
) -> float:
    """One backup at surplus level phi: max(stop, delta*E[V'] - C_m).

    ``values`` is either a callable phi -> value or a vector over the
    process's natural grid (MarkovGrid only; the diffuse processes have no
    intrinsic grid, so pass a callable for them).
    """
    if isinstance(process, MarkovGrid):
        grid = 2.0 * (np.array(process.r_grid) - process.defection_payoff)
        index = int(np.argmin(np.abs(grid - phi)))
        if abs(grid[index] - phi) > 1e-9 * max(1.0, abs(phi)):
            raise ValueError("phi must be one of the grid values")
        if callable(values):
            successor_values = np.array([values(float(s)) for s in grid])
        else:
            successor_values = np.asarray(values, dtype=float)
        expected = float(process.matrix()[index] @ successor_values)
        state_count = grid.size
        state_index = index
    else:
        if not callable(values):
            raise TypeError("values must be callable for diffuse surplus processes")
        if isinstance(process, Deterministic):
            support = ((process.growth, 1.0),)
        else:
            support = process.support
        expected = sum(p * float(values(phi * (1.0 + g))) for g, p in support)
        state_count = 1
        state_index = 0
    collapse = float(costs.collapse_at(t, state_count)[state_index])
    maintain = float(costs.maintain_at(t, state_count)[state_index])
    return max(phi - collapse, delta * expected - maintain)


@dataclass(frozen=True)
class PathStep:
    """One period of a simulated trajectory."""

    t: int
    r: float
    phi: float
    action: str
    stage_payoff: float
    objective_total: float


@dataclass(eq=False)
class Trajectory:
    steps: list[PathStep]
    stop_time: int | None
    discounted_payoff: float
    seed: int


PolicyRule = Union[ValueSolution, str, Callable[[int, float], Decision]]


def _resolve_decision(policy: PolicyRule, t: int, phi: float) -> Decision:
    if isinstance(policy, ValueSolution):
        return policy.decision_at(phi, t)
    if isinstance(policy, str):
        if policy == "always_stop":
            return Decision.STOP
        if policy == "never_stop":
            return Decision.CONTINUE
        raise ValueError("policy string must be 'always_stop' or 'never_stop'")
    return policy(t, phi)


def simulate_path(
    process: SurplusProcess,
    costs: CostSchedule,
    policy: PolicyRule,
    delta: float,
    horizon: int,
    seed: int = 0,
) -> Trajectory:
    """Simulate one seeded trajectory under a policy.

    Stage payoffs: stopping harvests phi - C_c once; continuing pays -C_m.
    After the first stop the state is absorbing: stage payoffs are exactly 0
    and the players' total payoff is pinned at 2P (the surplus column
    reports 0, there being nothing left to harvest).  The discounted sum of
    stage payoffs is the adversary's realized payoff.
    """
    if horizon < 1:
        raise ValueError("horizon must satisfy horizon >= 1")
    rng = np.random.default_rng(seed)
    p = process.defection_payoff
    markov = isinstance(process, MarkovGrid)
    state_index = 0
    if markov:
        matrix = process.matrix()
        cumulative_rows = np.cumsum(matrix, axis=1)
        state_index = process.initial_index
        r = process.r_grid[state_index]
    else:
        if costs._collapse_table.shape[1] > 1 or costs._maintain_table.shape[1] > 1:
            raise ValueError("state-dependent costs require a MarkovGrid process")
        r = process.initial_r
        if isinstance(process, DiscreteShocks):
            shock_growths = np.array([g for g, _ in process.support])
            shock_cumulative = np.cumsum([q for _, q in process.support])
    phi = 2.0 * (r - p)

    steps: list[PathStep] = []
    stop_time: int | None = None
    discounted = 0.0
    absorbed = False
    for t in range(horizon):
        if absorbed:
            steps.append(PathStep(t, r, 0.0, "absorbed", 0.0, 2.0 * p))
            continue
        decision = _resolve_decision(policy, t, phi)
        if decision is Decision.STOP:
            stage = phi - costs.collapse_scalar(t, state_index)
            steps.append(PathStep(t, r, phi, "stop", stage, 2.0 * p))
            discounted += delta**t * stage
            stop_time = t
            absorbed = True
            continue
        stage = -costs.maintain_scalar(t, state_index)
        steps.append(PathStep(t, r, phi, "continue", stage, 2.0 * r))
        discounted += delta**t * stage
        if markov:
            state_index = int(
                np.searchsorted(cumulative_rows[state_index], rng.random(), side="right")
            )
            state_index = min(state_index, matrix.shape[0] - 1)
            r = process.r_grid[state_index]
            phi = 2.0 * (r - p)
        elif isinstance(process, Deterministic):
            phi *= 1.0 + process.growth
            r = p + phi / 2.0
        else:
            k = min(
                int(np.searchsorted(shock_cumulative, rng.random(), side="right")),
                shock_growths.size - 1,
            )
            phi *= 1.0 + shock_growths[k]
            r = p + phi / 2.0
    return Trajectory(
        steps=steps, stop_time=stop_time, discounted_payoff=discounted, seed=seed
    )
