"""Static analysis of the recognition-transformed Prisoner's Dilemma.

The objective game is the classic PD parameterized by T > R > P > S.  An
outside actor shifts how much each player weighs the other's payoff, so the
subjective utilities become u'_i = a*u_i + b*u_j.  Only the recognition
ratio w = b/a matters for best responses.  Two thresholds derived from the
matrix,

    w_min = (T - R) / (R - S)    (mutual cooperation becomes stable)
    w_max = (P - S) / (T - P)    (mutual defection stays stable)

partition the w axis into a distrust phase, a cooperation phase and, when
w_min <= w_max, a fragile band on which (C,C) and (D,D) coexist as pure
equilibria.  When the band vanishes (w_min > w_max) the game turns
Hawk-Dove-like and only the asymmetric profiles survive in the middle.

Everything in this module is a pure function of immutable inputs; the Monte
Carlo smoothing takes an explicit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri


class CurveError(ValueError):
    """A recognition curve violates monotonicity, range, or F(0) = 0."""


class Action(Enum):
    C = "C"
    D = "D"


@dataclass(frozen=True)
class Profile:
    """Pure strategy profile: what player A and player B play."""

    action_a: Action
    action_b: Action

    @property
    def name(self) -> str:
        return self.action_a.value + self.action_b.value

    def swapped(self) -> "Profile":
        return Profile(self.action_b, self.action_a)


CC = Profile(Action.C, Action.C)
CD = Profile(Action.C, Action.D)
DC = Profile(Action.D, Action.C)
DD = Profile(Action.D, Action.D)
PROFILES = (CC, CD, DC, DD)


@dataclass(frozen=True)
class PayoffMatrix:
    """Objective PD payoffs with the strict ordering T > R > P > S."""

    T: float
    R: float
    P: float
    S: float

    def __post_init__(self) -> None:
        values = (self.T, self.R, self.P, self.S)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("payoff values must be finite")
        if not (self.T > self.R > self.P > self.S):
            raise ValueError("payoff matrix must satisfy T > R > P > S")


@dataclass(frozen=True)
class Recognition:
    """Subjective weights (a, b) on own and other payoff; w = b/a."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("recognition weights must be finite")
        if not self.a > 0:
            raise ValueError("recognition weight a must satisfy a > 0")
        if not self.b >= 0:
            raise ValueError("recognition weight b must satisfy b >= 0")

    @property
    def w(self) -> float:
        return self.b / self.a


@dataclass(frozen=True)
class FragileBand:
    """Threshold pair [w_min, w_max]; the band exists iff w_min <= w_max."""

    w_min: float
    w_max: float
    exists: bool


class PhaseLabel(Enum):
    DISTRUST = "Distrust"
    FRAGILE_BAND = "FragileBand"
    COOPERATION = "Cooperation"
    ASYMMETRIC_ONLY = "AsymmetricOnly"


def objective_payoffs(pd: PayoffMatrix, profile: Profile) -> tuple[float, float]:
    """Objective payoff pair (u_A, u_B) for a profile."""
    table = {
        CC: (pd.R, pd.R),
        DD: (pd.P, pd.P),
        CD: (pd.S, pd.T),
        DC: (pd.T, pd.S),
    }
    return table[profile]


def transform_utilities(
    pd: PayoffMatrix, rec: Recognition, profile: Profile
) -> tuple[float, float]:
    """Subjective utilities u'_i = a*u_i + b*u_j for both players."""
    u_a, u_b = objective_payoffs(pd, profile)
    return rec.a * u_a + rec.b * u_b, rec.a * u_b + rec.b * u_a


def adversary_utility(pd: PayoffMatrix, profile: Profile) -> float:
    """Potential loss harvested by the adversary: 2R - (u_A + u_B).

    The reference point is the total under mutual cooperation, so (C,C)
    yields exactly zero.  Uses objective payoffs; the adversary is
    indifferent to how the total splits between the players.
    """
    u_a, u_b = objective_payoffs(pd, profile)
    return 2.0 * pd.R - (u_a + u_b)


def band(pd: PayoffMatrix) -> FragileBand:
    """Compute [w_min, w_max] and whether the dual-equilibrium band exists.

    The ordering T > R > P > S guarantees R > S and T > P, so the two
    ratios are always well defined.
    """
    w_min = (pd.T - pd.R) / (pd.R - pd.S)
    w_max = (pd.P - pd.S) / (pd.T - pd.P)
    return FragileBand(w_min=w_min, w_max=w_max, exists=w_min <= w_max)


def _deviation(profile: Profile, player: int) -> Profile:
    flip = {Action.C: Action.D, Action.D: Action.C}
    if player == 0:
        return Profile(flip[profile.action_a], profile.action_b)
    return Profile(profile.action_a, flip[profile.action_b])


def nash_equilibria(pd: PayoffMatrix, rec: Recognition) -> set[Profile]:
    """Brute-force pure Nash equilibria of the transformed game.

    A profile is an equilibrium when no unilateral deviation strictly
    improves the deviator's transformed utility (weak inequalities, so
    indifferent deviations do not break an equilibrium).
    """
    stable = set()
    for profile in PROFILES:
        utilities = transform_utilities(pd, rec, profile)
        ok = True
        for player in (0, 1):
            deviated = transform_utilities(pd, rec, _deviation(profile, player))
            if deviated[player] > utilities[player]:
                ok = False
                break
        if ok:
            stable.add(profile)
    return stable


def _label_from_thresholds(effective_w: float, fb: FragileBand) -> PhaseLabel:
    cc_stable = effective_w >= fb.w_min
    dd_stable = effective_w <= fb.w_max
    if cc_stable and dd_stable:
        return PhaseLabel.FRAGILE_BAND
    if cc_stable:
        return PhaseLabel.COOPERATION
    if dd_stable:
        return PhaseLabel.DISTRUST
    return PhaseLabel.ASYMMETRIC_ONLY


def classify_phase(pd: PayoffMatrix, w: float) -> PhaseLabel:
    """Closed-form phase of the transformed game at recognition ratio w.

    Labels follow membership of (C,C) and (D,D) in the equilibrium set:
    both stable -> FragileBand, only (C,C) -> Cooperation, only (D,D) ->
    Distrust, neither -> AsymmetricOnly.  Band boundaries are inclusive
    (w = w_min or w = w_max count as FragileBand when the band exists),
    matching the weak best-response inequalities used by nash_equilibria.
    Comparisons are exact; callers wanting fuzzy thresholds should use
    tipping_band_probability.
    """
    if not w >= 0:
        raise ValueError("w must satisfy w >= 0")
    return _label_from_thresholds(w, band(pd))


class RecognitionCurve:
    """Monotone response F(w) mapping raw recognition into effective weight.

    Valid curves satisfy F(0) = 0, F nondecreasing and 0 <= F(w) <= 1.
    Subclasses implement ``__call__``; ``validate`` checks the contract by
    dense sampling and raises :class:`CurveError` on violation.
    """

    def __call__(self, w: float) -> float:
        raise NotImplementedError

    def validate(self, upper: float, points: int = 257) -> None:
        upper = max(float(upper), 1.0)
        ws = np.linspace(0.0, upper, points)
        values = np.array([self(float(w)) for w in ws])
        if abs(values[0]) > 1e-12:
            raise CurveError("recognition curve must satisfy F(0) = 0")
        if np.any(np.diff(values) < -1e-12):
            raise CurveError("recognition curve must be nondecreasing")
        if np.any(values < -1e-12) or np.any(values > 1.0 + 1e-12):
            raise CurveError("recognition curve values must lie in [0, 1]")


@dataclass(frozen=True)
class LinearClamped(RecognitionCurve):
    """F(w) = min(w, 1); the identity on [0, 1]."""

    def __call__(self, w: float) -> float:
        return min(float(w), 1.0)


@dataclass(frozen=True)
class SaturatingExponential(RecognitionCurve):
    """Concave response F(w) = 1 - exp(-rate * w) (diminishing empathy)."""

    rate: float

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError("curve rate must satisfy rate > 0")

    def __call__(self, w: float) -> float:
        return 1.0 - math.exp(-self.rate * float(w))


@dataclass(frozen=True)
class LogisticShifted(RecognitionCurve):
    """Convex-then-concave response with a tipping point at the midpoint.

    A logistic in w, shifted and rescaled so that F(0) = 0 and F -> 1.
    """

    steepness: float
    midpoint: float

    def __post_init__(self) -> None:
        if not self.steepness > 0:
            raise ValueError("curve steepness must satisfy steepness > 0")

    def __call__(self, w: float) -> float:
        base = _sigmoid(-self.steepness * self.midpoint)
        raw = _sigmoid(self.steepness * (float(w) - self.midpoint))
        return (raw - base) / (1.0 - base)


@dataclass(frozen=True)
class TabulatedCurve(RecognitionCurve):
    """User-supplied monotone samples with linear interpolation.

    The first sample must be (0, 0); the last value is held for larger w.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        pts = tuple((float(w), float(f)) for w, f in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("tabulated curves need at least two samples")
        ws = [w for w, _ in pts]
        if any(b <= a for a, b in zip(ws, ws[1:])):
            raise ValueError("tabulated curve samples must have strictly ascending w")

    def __call__(self, w: float) -> float:
        ws = [p[0] for p in self.points]
        fs = [p[1] for p in self.points]
        return float(np.interp(float(w), ws, fs))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def classify_phase_nonlinear(
    pd: PayoffMatrix, w: float, curve: RecognitionCurve
) -> PhaseLabel:
    """Phase classification with effective weight F(w) in place of w.

    The curve is checked against its contract by dense sampling before use;
    a violating curve raises :class:`CurveError`.
    """
    if not w >= 0:
        raise ValueError("w must satisfy w >= 0")
    curve.validate(upper=w)
    return _label_from_thresholds(curve(w), band(pd))


def min_total_payoff_profile(pd: PayoffMatrix) -> tuple[Profile, float]:
    """Profile minimizing the players' total payoff, and that total.

    The minimum over the four profiles is min(2P, T + S).  On the tie
    2P = T + S the symmetric profile (D,D) is returned; in the asymmetric
    case (C,D) is returned as the canonical representative of the
    (C,D)/(D,C) pair.
    """
    if 2.0 * pd.P <= pd.T + pd.S:
        return DD, 2.0 * pd.P
    return CD, pd.T + pd.S


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def tipping_band_probability(
    pd: PayoffMatrix,
    w_mean: float,
    w_sd: float,
    samples: int,
    seed: int = 0,
) -> dict[PhaseLabel, float]:
    """Phase probabilities when w is noisy rather than a sharp value.

    Draws w from a Normal(w_mean, w_sd) truncated to w >= 0 (inverse-CDF
    sampling, deterministic for a given seed) and classifies each draw.
    This smooths the deterministic thresholds into a probabilistic tipping
    band; the truncated Normal is one configurable choice of noise, not a
    canonical one.  Returned probabilities cover every label and sum to 1.
    """
    if not w_sd > 0:
        raise ValueError("w_sd must satisfy w_sd > 0")
    if samples < 1:
        raise ValueError("samples must satisfy samples >= 1")
    rng = np.random.default_rng(seed)
    below = _normal_cdf((0.0 - w_mean) / w_sd)
    u = rng.uniform(below, 1.0, size=int(samples))
    ws = w_mean + w_sd * ndtri(u)
    np.maximum(ws, 0.0, out=ws)  # guard roundoff at the truncation edge

    fb = band(pd)
    cc = ws >= fb.w_min
    dd = ws <= fb.w_max
    counts = {
        PhaseLabel.FRAGILE_BAND: int(np.count_nonzero(cc & dd)),
        PhaseLabel.COOPERATION: int(np.count_nonzero(cc & ~dd)),
        PhaseLabel.DISTRUST: int(np.count_nonzero(~cc & dd)),
        PhaseLabel.ASYMMETRIC_ONLY: int(np.count_nonzero(~cc & ~dd)),
    }
    return {label: counts[label] / float(samples) for label in PhaseLabel}
