"""Skill curves: win-probability models sigma(x, y) over pairs of ratings.

A skill curve maps two ratings to the probability that the first player
beats the second.  Every curve here is weakly increasing in its first
argument, weakly decreasing in its second, and draw-free:
sigma(x, y) + sigma(y, x) == 1.  For the analytic variants the draw-free
identity holds exactly in floating point because evaluation is canonicalized
to the half-plane x >= y and reflected; tabulated curves instead rely on a
symmetrization pass at load time.

All evaluation functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CurveDomainError",
    "BisectorTable",
    "Trivial",
    "SonasLike",
    "ThresholdedLogistic",
    "Separable",
    "Tabulated",
    "SkillCurve",
    "eval_sigma",
    "extract_bisector",
    "p_close",
]


class CurveDomainError(ValueError):
    """A tabulated curve was queried outside its grid."""


@dataclass(frozen=True, eq=False)
class BisectorTable:
    """Sampled, piecewise-linear bisector: beta(x) such that, on a separable
    region, sigma(x, y) = beta(x) - beta(y) + 0.5.

    ``reference`` records the rating the table was anchored at.  Evaluation
    outside the sampled range extends with the endpoint values, which keeps
    the interpolant weakly increasing.

    Tables that bisect a globally separable curve stay within a band of
    height 0.5; tables extracted on wide domains from merely locally
    separable curves may legitimately exceed that, so the 0.5 bound is a
    property to check (see ``span``), not a construction invariant.
    """

    xs: np.ndarray
    values: np.ndarray
    reference: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size == 0:
            raise ValueError("bisector table needs matching, nonempty x/value arrays")
        if xs.size > 1 and np.any(np.diff(xs) <= 0):
            raise ValueError("bisector sample points must be strictly increasing")
        # small slack: rounding in extraction can produce -1e-16 "decreases"
        if xs.size > 1 and np.any(np.diff(vs) < -1e-12):
            raise ValueError("bisector values must be weakly increasing")
        if not (xs[0] <= self.reference <= xs[-1]):
            raise ValueError("reference point must lie inside the sampled range")

    def value(self, x):
        return np.interp(x, self.xs, self.values)

    def span(self) -> float:
        return float(self.values[-1] - self.values[0])


@dataclass(frozen=True)
class Trivial:
    """sigma identically 0.5: every match is a coin flip."""


@dataclass(frozen=True)
class SonasLike:
    """Linear in the rating difference within a threshold, clamped outside.

    sigma(x, y) = slope * (x - y) + 0.5 for |x - y| <= threshold, and the
    boundary value slope * threshold + 0.5 beyond it.  Clamping keeps the
    curve continuous and weakly monotone on the whole plane.
    """

    slope: float
    threshold: float

    def __post_init__(self):
        if not (self.slope > 0 and self.threshold > 0):
            raise ValueError("slope and threshold must be positive")
        if self.slope * self.threshold > 0.5:
            raise ValueError("slope * threshold must not exceed 0.5")


@dataclass(frozen=True)
class ThresholdedLogistic:
    """Base-10 logistic of the rating difference, with the difference
    clamped to [-clamp, +clamp] first.  Use clamp=inf for the pure
    (unclamped) logistic.
    """

    scale: float
    clamp: float = math.inf

    def __post_init__(self):
        if not (self.scale > 0 and self.clamp > 0):
            raise ValueError("scale and clamp must be positive")


@dataclass(frozen=True, eq=False)
class Separable:
    """sigma(x, y) = beta(x) - beta(y) + 0.5 for a sampled bisector beta,
    clipped to [0, 1] for pairs whose beta difference exceeds 0.5."""

    bisector: BisectorTable


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Measured sigma values on a rectangular (x, y) grid.

    With ``interpolate`` enabled, queries are answered by bilinear
    interpolation inside the grid's bounding box; otherwise only exact grid
    nodes may be queried.  Either way, queries outside the box raise
    CurveDomainError.

    Construct through ``from_points``; pass symmetrize=False only to study
    deliberately broken (non-draw-free) data.
    """

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(xs), len(ys)); values[i, j] = sigma(xs[i], ys[j])
    interpolate: bool = True

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", vals)
        if xs.ndim != 1 or ys.ndim != 1 or vals.shape != (xs.size, ys.size):
            raise ValueError("tabulated grid shape mismatch")
        if xs.size < 2 or ys.size < 2:
            raise ValueError("tabulated grid needs at least 2 points per axis")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if np.any(vals < -1e-9) or np.any(vals > 1 + 1e-9):
            raise ValueError("sigma values must lie in [0, 1]")

    @classmethod
    def from_points(cls, x_col, y_col, sigma_col, symmetrize: bool = True,
                    interpolate: bool = True) -> "Tabulated":
        """Build a grid from (x, y, sigma) triples covering a full lattice."""
        x_col = np.asarray(x_col, dtype=float)
        y_col = np.asarray(y_col, dtype=float)
        s_col = np.asarray(sigma_col, dtype=float)
        xs = np.unique(x_col)
        ys = np.unique(y_col)
        if x_col.size != xs.size * ys.size:
            raise ValueError("points do not cover a complete rectangular lattice")
        vals = np.full((xs.size, ys.size), np.nan)
        xi = np.searchsorted(xs, x_col)
        yi = np.searchsorted(ys, y_col)
        vals[xi, yi] = s_col
        if np.any(np.isnan(vals)):
            raise ValueError("points do not cover a complete rectangular lattice")
        if symmetrize:
            if xs.size != ys.size or not np.array_equal(xs, ys):
                raise ValueError("symmetrization requires identical x and y axes")
            vals = (vals + 1.0 - vals.T) / 2.0
        return cls(xs, ys, vals, interpolate=interpolate)

    def _lookup(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(x < self.xs[0]) or np.any(x > self.xs[-1]) \
                or np.any(y < self.ys[0]) or np.any(y > self.ys[-1]):
            raise CurveDomainError("query outside the tabulated grid")
        if not self.interpolate:
            xi = np.searchsorted(self.xs, x)
            yi = np.searchsorted(self.ys, y)
            if np.any(self.xs[np.minimum(xi, self.xs.size - 1)] != x) \
                    or np.any(self.ys[np.minimum(yi, self.ys.size - 1)] != y):
                raise CurveDomainError("off-grid query with interpolation disabled")
            out = self.values[xi, yi]
            return float(out) if out.ndim == 0 else out
        xi = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        yi = np.clip(np.searchsorted(self.ys, y, side="right") - 1, 0, self.ys.size - 2)
        x0, x1 = self.xs[xi], self.xs[xi + 1]
        y0, y1 = self.ys[yi], self.ys[yi + 1]
        tx = (x - x0) / (x1 - x0)
        ty = (y - y0) / (y1 - y0)
        v = (self.values[xi, yi] * (1 - tx) * (1 - ty)
             + self.values[xi + 1, yi] * tx * (1 - ty)
             + self.values[xi, yi + 1] * (1 - tx) * ty
             + self.values[xi + 1, yi + 1] * tx * ty)
        return float(v) if np.ndim(v) == 0 else v


SkillCurve = Trivial | SonasLike | ThresholdedLogistic | Separable | Tabulated


def _raw(curve: SkillCurve, x, y):
    """sigma on the canonical half-plane x >= y (elementwise)."""
    d = x - y
    if isinstance(curve, Trivial):
        return d * 0.0 + 0.5
    if isinstance(curve, SonasLike):
        return curve.slope * np.minimum(d, curve.threshold) + 0.5
    if isinstance(curve, ThresholdedLogistic):
        return 1.0 / (1.0 + 10.0 ** (-np.minimum(d, curve.clamp) / curve.scale))
    if isinstance(curve, Separable):
        b = curve.bisector
        return np.clip(b.value(x) - b.value(y) + 0.5, 0.5, 1.0)
    raise TypeError(f"unknown curve variant: {type(curve).__name__}")


def eval_sigma(curve: SkillCurve, x, y):
    """Win probability of a player rated x over a player rated y.

    Analytic variants are evaluated with x >= y and reflected, so
    eval_sigma(c, x, y) + eval_sigma(c, y, x) == 1.0 exactly.  Tabulated
    curves read their grid directly (a reflection would mask asymmetric,
    i.e. corrupted, data).
    """
    if isinstance(curve, Tabulated):
        return curve._lookup(x, y)
    swapped = np.less(x, y) if isinstance(x, np.ndarray) or isinstance(y, np.ndarray) else x < y
    if isinstance(swapped, np.ndarray):
        hi = np.maximum(x, y)
        lo = np.minimum(x, y)
        raw = _raw(curve, hi, lo)
        return np.where(swapped, 1.0 - raw, raw)
    if swapped:
        return 1.0 - _raw(curve, y, x)
    return _raw(curve, x, y)


def extract_bisector(curve: SkillCurve, m: float, domain: tuple[float, float],
                     resolution: float) -> BisectorTable:
    """Sample beta(x) = sigma(x, m) on a lattice anchored at m.

    The lattice is m + k * resolution for every integer k that stays inside
    ``domain``, so the table always contains m itself with value exactly 0.5.
    On a globally separable curve this reproduces the curve's bisector up to
    an additive constant; elsewhere it is only the local bisector around m.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError("empty domain")
    if not lo <= m <= hi:
        raise ValueError("reference point must lie inside the domain")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    k_lo = math.ceil((lo - m) / resolution - 1e-9)
    k_hi = math.floor((hi - m) / resolution + 1e-9)
    xs = m + resolution * np.arange(k_lo, k_hi + 1)
    return BisectorTable(xs, eval_sigma(curve, xs, m), reference=m)


def p_close(curve: SkillCurve, x, y, margin: float, eps_open: float = 0.0):
    """True where sigma(x, y) lies strictly inside (0.5 - margin, 0.5 + margin).

    ``eps_open`` shrinks the open interval on both sides; the default 0.0
    keeps the comparison exact, which is what the analytic variants want.
    Interpolated data may need a small positive slack.
    """
    if not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    s = eval_sigma(curve, x, y)
    lo = 0.5 - margin + eps_open
    hi = 0.5 + margin - eps_open
    if isinstance(s, np.ndarray):
        return (s > lo) & (s < hi)
    return bool(lo < s < hi)
