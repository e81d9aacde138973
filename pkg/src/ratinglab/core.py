"""Rating systems: a skill curve paired with a K-function.

The K-function K(x, y) is the total number of rating points at stake in a
match between current ratings x and y.  The winner's award is
alpha(x, y) = K(x, y) * sigma(y, x), which splits the stake so that two
correctly rated players each have zero expected rating change.  The central
quantity is the expected gain

    gamma(x, x* | y, y*) = K(x, y) * (sigma(x*, y*) - sigma(x, y))

for a player with current rating x and true rating x* against an opponent
with current rating y and true rating y*.

Everything here is a pure function of immutable values and accepts scalars
or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import (
    BisectorTable,
    Separable,
    SkillCurve,
    SonasLike,
    ThresholdedLogistic,
    Trivial,
    eval_sigma,
)

__all__ = [
    "ConstantK",
    "RatingSumK",
    "TabulatedK",
    "KFunction",
    "k_value",
    "RatingSystem",
    "GainQuery",
    "adjustment",
    "expected_gain",
    "expected_gain_definitional",
    "apply_match",
    "fairness_residual",
    "builtin_systems",
]


@dataclass(frozen=True)
class ConstantK:
    """Fixed stake per match (the classic Elo K-factor)."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("K must be positive")


@dataclass(frozen=True)
class RatingSumK:
    """K(x, y) = base + slope * (x + y): symmetric but deliberately
    non-constant, useful for manufacturing systems whose stake varies with
    where on the rating scale the match happens.  Positive for nonnegative
    ratings; callers own keeping their rating domain in the positive range.
    """

    base: float
    slope: float

    def __post_init__(self):
        if not self.base > 0 or self.slope < 0:
            raise ValueError("base must be positive and slope nonnegative")


@dataclass(frozen=True, eq=False)
class TabulatedK:
    """K values on a square rating lattice, bilinearly interpolated and
    symmetrized at construction.  Queries clamp to the lattice edges."""

    xs: np.ndarray
    values: np.ndarray  # values[i, j] = K(xs[i], xs[j])

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if xs.ndim != 1 or vals.shape != (xs.size, xs.size):
            raise ValueError("tabulated K needs a square grid over one axis")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("lattice must be strictly increasing")
        vals = (vals + vals.T) / 2.0
        if np.any(vals <= 0):
            raise ValueError("K must be strictly positive")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vals)

    def _lookup(self, x, y):
        xs = self.xs
        x = np.clip(x, xs[0], xs[-1])
        y = np.clip(y, xs[0], xs[-1])
        xi = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        yi = np.clip(np.searchsorted(xs, y, side="right") - 1, 0, xs.size - 2)
        tx = (x - xs[xi]) / (xs[xi + 1] - xs[xi])
        ty = (y - xs[yi]) / (xs[yi + 1] - xs[yi])
        v = (self.values[xi, yi] * (1 - tx) * (1 - ty)
             + self.values[xi + 1, yi] * tx * (1 - ty)
             + self.values[xi, yi + 1] * (1 - tx) * ty
             + self.values[xi + 1, yi + 1] * tx * ty)
        return float(v) if np.ndim(v) == 0 else v


KFunction = ConstantK | RatingSumK | TabulatedK


def k_value(k: KFunction, x, y):
    """Stake K(x, y); symmetric and positive."""
    if isinstance(k, ConstantK):
        return (x - x) + (y - y) + k.value if isinstance(x, np.ndarray) or isinstance(y, np.ndarray) else k.value
    if isinstance(k, RatingSumK):
        return k.base + k.slope * (x + y)
    if isinstance(k, TabulatedK):
        # evaluate on sorted arguments so interpolation noise cannot break symmetry
        return k._lookup(np.minimum(x, y), np.maximum(x, y))
    raise TypeError(f"unknown K variant: {type(k).__name__}")


@dataclass(frozen=True)
class RatingSystem:
    curve: SkillCurve
    k: KFunction


@dataclass(frozen=True)
class GainQuery:
    """Arguments of the expected gain: the chooser's current and true rating,
    then the opponent's current and true rating."""

    x: float
    x_star: float
    y: float
    y_star: float


def adjustment(sys: RatingSystem, x, y):
    """Points the system awards to a player rated x for beating a player
    rated y: alpha(x, y) = K(x, y) * sigma(y, x).  Always nonnegative, and
    alpha(x, y) + alpha(y, x) recovers the stake K(x, y)."""
    return k_value(sys.k, x, y) * eval_sigma(sys.curve, y, x)


def expected_gain(sys: RatingSystem, q: GainQuery):
    """Expected rating change of the (x, x*) player, K-form:
    K(x, y) * (sigma(x*, y*) - sigma(x, y))."""
    return k_value(sys.k, q.x, q.y) * (
        eval_sigma(sys.curve, q.x_star, q.y_star) - eval_sigma(sys.curve, q.x, q.y)
    )


def expected_gain_definitional(sys: RatingSystem, q: GainQuery):
    """Expected rating change computed from the award functions directly:
    alpha(x, y) * sigma(x*, y*) - alpha(y, x) * sigma(y*, x*).

    Agrees with ``expected_gain`` to rounding error for every draw-free
    curve; kept as the independent cross-check of the K-form.
    """
    return (adjustment(sys, q.x, q.y) * eval_sigma(sys.curve, q.x_star, q.y_star)
            - adjustment(sys, q.y, q.x) * eval_sigma(sys.curve, q.y_star, q.x_star))


def apply_match(sys: RatingSystem, winner_rating: float, loser_rating: float):
    """Settle one match: the winner gains alpha(winner, loser) and the loser
    pays exactly the same amount."""
    transfer = adjustment(sys, winner_rating, loser_rating)
    return winner_rating + transfer, loser_rating - transfer


def fairness_residual(sys: RatingSystem, x, y):
    """Expected rating change of a correctly rated player rated x in a real
    match against a correctly rated player rated y:

        alpha(x, y) * sigma(x, y) - alpha(y, x) * (1 - sigma(x, y))

    The match has two outcomes, win with probability sigma(x, y) and loss
    otherwise, so the loss probability is written as the complement rather
    than sigma(y, x); on a curve that violates the draw-free identity the
    two differ and the residual surfaces the corruption.  For well-formed
    systems this is zero to rounding error.
    """
    s = eval_sigma(sys.curve, x, y)
    return adjustment(sys, x, y) * s - adjustment(sys, y, x) * (1.0 - s)


def _tanh_bisector(lo: float = -4000.0, hi: float = 4000.0, step: float = 25.0,
                   height: float = 0.4, width: float = 500.0) -> BisectorTable:
    xs = np.arange(lo, hi + step / 2, step)
    return BisectorTable(xs, height * np.tanh(xs / width), reference=0.0)


def builtin_systems(k_factor: float = 32.0) -> dict[str, RatingSystem]:
    """The named family of systems the test battery runs on: four curves
    (Sonas-like, clamped logistic, unclamped logistic, tanh-bisector
    separable) crossed with a constant and a rating-sum K, plus the trivial
    system."""
    curves = {
        "sonas": SonasLike(slope=0.001, threshold=400.0),
        "logistic_clamped": ThresholdedLogistic(scale=400.0, clamp=400.0),
        "logistic": ThresholdedLogistic(scale=400.0),
        "tanh_separable": Separable(_tanh_bisector()),
    }
    ks = {
        "const": ConstantK(k_factor),
        "ratingsum": RatingSumK(base=24.0, slope=0.004),
    }
    systems = {
        f"{cn}_{kn}": RatingSystem(curve, k)
        for cn, curve in curves.items()
        for kn, k in ks.items()
    }
    systems["trivial_const"] = RatingSystem(Trivial(), ConstantK(k_factor))
    return systems
