"""Grid-based decision procedures for rating-system properties.

Each check evaluates a property over a finite rating grid and returns a
PropertyReport.  "Holds" therefore means "no violation found on this grid at
this tolerance", a bounded certificate rather than a proof; "Refuted" comes
with a concrete witness tuple whose re-evaluation reproduces a residual
above tolerance.  Checks are pure functions; aggregation always selects the
worst residual by a fixed lexicographic order on tuples, so reports are
reproducible no matter how the tuple space is partitioned for evaluation.

The P-restricted checks quantify over tuples that fit inside an interval
(A, B) with sigma(A, B) > 0.5 - P.  By monotonicity and continuity of the
curve this is equivalent to requiring the extreme pair (min, max) of the
tuple to be P-close, which is how eligibility is computed (mode
"extreme_pair").  Mode "pairwise" instead applies the P-closeness
constraints pairwise between the chooser's ratings and each opponent
rating; the two forms agree on all built-in systems and tests pin that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .curves import BisectorTable, Separable, SkillCurve, Trivial, eval_sigma, p_close
from .core import RatingSystem, k_value

__all__ = [
    "Verdict",
    "Prop",
    "Grid",
    "PropertyReport",
    "ChainResult",
    "is_trivial_on_grid",
    "default_tolerance",
    "check_draw_free",
    "check_fairness",
    "check_opponent_indifference",
    "check_p_opponent_indifference",
    "check_strong_oi",
    "check_p_separable",
    "check_p_constant_k",
    "check_translation_invariance",
    "check_bisector_linear",
    "build_skill_chain",
    "chain_length_bound",
    "verify_chain_identity",
    "full_scale_report",
    "find_max_gain_opponent",
    "cross_check_characterization",
]

DEFAULT_TUPLE_BUDGET = 200_000_000


class Verdict(Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


class Prop(str, Enum):
    DRAW_FREE = "draw_free"
    FAIRNESS = "fairness"
    OI = "opponent_indifference"
    P_OI = "p_opponent_indifference"
    STRONG_OI = "strong_opponent_indifference"
    STRONG_P_OI = "strong_p_opponent_indifference"
    P_SEPARABLE = "p_separable"
    P_CONSTANT_K = "p_constant_k"
    TRANSLATION_INVARIANT = "translation_invariant"
    BISECTOR_LINEAR = "bisector_linear"
    FULL_SCALE = "full_scale"
    CHAIN_IDENTITY = "chain_identity"
    CHARACTERIZATION = "characterization"


@dataclass(frozen=True)
class Grid:
    """Uniform rating lattice lo, lo+step, ..., capped at hi."""

    lo: float
    hi: float
    step: float
    max_points: int = 100_000

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if self.count > self.max_points:
            raise ValueError("grid exceeds the point budget")

    @property
    def count(self) -> int:
        return int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1

    def points(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.count)


@dataclass
class PropertyReport:
    """Outcome of one property check.

    ``witness`` is the tuple of ratings realizing ``max_residual`` when the
    verdict is Refuted (its layout is documented per check); ``parameters``
    records the grid, tolerance and any margin used, so the bounded nature
    of the certificate stays visible.
    """

    prop: Prop
    verdict: Verdict
    max_residual: float
    witness: tuple | None = None
    parameters: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "property": self.prop.value,
            "verdict": self.verdict.value,
            "max_residual": self.max_residual,
            "witness": list(self.witness) if self.witness is not None else None,
            "parameters": self.parameters,
            "note": self.note,
        }

    def one_line(self) -> str:
        extra = f" witness={tuple(round(w, 6) for w in self.witness)}" if self.witness else ""
        note = f" ({self.note})" if self.note else ""
        return (f"{self.prop.value}: {self.verdict.value}"
                f" max_residual={self.max_residual:.6g}{extra}{note}")


@dataclass
class ChainResult:
    """An ascending chain r_1 < r_2 < ... with sigma(r_i, r_{i-1}) >= p.

    ``achieved`` holds the realized sigma of each link.  ``predicted_span``
    holds, for every prefix length N, the value (N-1)p - (N-2)/2 that
    sigma(r_N, r_1) must take when the links are exact and the curve is
    separable; comparing against it is verify_chain_identity's job.
    ``terminated_reason`` is "budget_exhausted", "curve_saturated", or
    "bound_reached" (saturation at exactly the opponent-indifference chain
    length bound floor(2p / (2p - 1))).
    """

    p: float
    ratings: list[float]
    achieved: list[float]
    predicted_span: list[float]
    terminated_reason: str
    length_bound: int


def default_tolerance(curve: SkillCurve) -> float:
    """1e-9 for analytic curves, 1e-4 where interpolation error dominates."""
    from .curves import Tabulated

    return 1e-4 if isinstance(curve, Tabulated) else 1e-9


def _grid_params(grid: Grid, tol: float, **extra) -> dict:
    params = {"grid": [grid.lo, grid.hi, grid.step], "tol": tol}
    params.update(extra)
    return params


def is_trivial_on_grid(curve: SkillCurve, grid: Grid, tol: float) -> bool:
    pts = grid.points()
    s = eval_sigma(curve, pts[:, None], pts[None, :])
    return bool(np.max(np.abs(s - 0.5)) <= tol)


def _masked_worst(resid: np.ndarray, eligible: np.ndarray | None = None):
    """First (C-order) index of the largest eligible residual, or None."""
    if eligible is not None:
        if not eligible.any():
            return None, 0.0
        resid = np.where(eligible, resid, -np.inf)
    flat = int(np.argmax(resid))
    worst = float(resid.flat[flat])
    if not np.isfinite(worst):
        return None, 0.0
    return np.unravel_index(flat, resid.shape), worst


def check_draw_free(curve: SkillCurve, grid: Grid, tol: float,
                    tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """max |sigma(x, y) + sigma(y, x) - 1| over grid pairs.

    Witness layout: (x, y).
    """
    params = _grid_params(grid, tol)
    pts = grid.points()
    if pts.size ** 2 > tuple_budget:
        return PropertyReport(Prop.DRAW_FREE, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    s = eval_sigma(curve, pts[:, None], pts[None, :])
    resid = np.abs(s + s.T - 1.0)
    (i, j), worst = _masked_worst(resid)
    if worst <= tol:
        return PropertyReport(Prop.DRAW_FREE, Verdict.HOLDS, worst, parameters=params)
    return PropertyReport(Prop.DRAW_FREE, Verdict.REFUTED, worst,
                          witness=(float(pts[i]), float(pts[j])), parameters=params)


def check_fairness(sys: RatingSystem, grid: Grid, tol: float,
                   tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """max |expected rating change between correctly rated players| over
    grid pairs.  Witness layout: (x, y)."""
    from .core import fairness_residual

    params = _grid_params(grid, tol)
    pts = grid.points()
    if pts.size ** 2 > tuple_budget:
        return PropertyReport(Prop.FAIRNESS, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    resid = np.abs(fairness_residual(sys, pts[:, None], pts[None, :]))
    (i, j), worst = _masked_worst(resid)
    if worst <= tol:
        return PropertyReport(Prop.FAIRNESS, Verdict.HOLDS, worst, parameters=params)
    return PropertyReport(Prop.FAIRNESS, Verdict.REFUTED, worst,
                          witness=(float(pts[i]), float(pts[j])), parameters=params)


def check_opponent_indifference(sys: RatingSystem, grid: Grid, tol: float,
                                tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """Does the expected gain against a correctly rated opponent depend on
    that opponent's rating?  Residual of tuple (x, x*, y1, y2) is
    |gamma(x, x* | y1, y1) - gamma(x, x* | y2, y2)|.

    Witness layout: (x, x_star, y1, y2).
    """
    params = _grid_params(grid, tol)
    pts = grid.points()
    n = pts.size
    if n ** 4 > tuple_budget:
        return PropertyReport(Prop.OI, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    sig = eval_sigma(sys.curve, pts[:, None], pts[None, :])  # sig[a, k] = sigma(pts_a, y_k)
    kmat = k_value(sys.k, pts[:, None], pts[None, :])
    best_worst, best_witness = 0.0, None
    for i in range(n):
        g = kmat[i][None, :] * (sig - sig[i][None, :])  # g[j, k] = gamma(x_i, x*_j | y_k, y_k)
        hi_k = np.argmax(g, axis=1)
        lo_k = np.argmin(g, axis=1)
        spread = g[np.arange(n), hi_k] - g[np.arange(n), lo_k]
        j = int(np.argmax(spread))
        if spread[j] > best_worst:
            best_worst = float(spread[j])
            best_witness = (float(pts[i]), float(pts[j]),
                            float(pts[hi_k[j]]), float(pts[lo_k[j]]))
    if best_worst <= tol:
        return PropertyReport(Prop.OI, Verdict.HOLDS, best_worst, parameters=params)
    return PropertyReport(Prop.OI, Verdict.REFUTED, best_worst,
                          witness=best_witness, parameters=params)


def _pair_eligibility(curve, x_cur, x_true, margin, ylo, yhi, mode, y, delta=0.0):
    """Eligibility of tuples (x_cur, x_true[j], y[k], y[l]) under margin.

    ylo/yhi: pairwise min/max over (y_k, y_l), already shifted when the
    opponents carry a misrating offset delta.  Returns bool array [j, k, l].
    """
    if mode == "extreme_pair":
        a = np.minimum(x_cur, x_true)
        b = np.maximum(x_cur, x_true)
        lo = np.minimum(a[:, None, None], ylo[None, :, :])
        hi = np.maximum(b[:, None, None], yhi[None, :, :])
        return p_close(curve, lo, hi, margin)
    if mode == "pairwise":
        # chooser current vs opponent current, chooser true vs opponent true
        e_cur = p_close(curve, x_cur, y, margin)
        e_true = p_close(curve, x_true[:, None], y[None, :] + delta, margin)
        e = e_cur[None, :] & e_true
        return e[:, :, None] & e[:, None, :]
    raise ValueError(f"unknown eligibility mode: {mode}")


def check_p_opponent_indifference(sys: RatingSystem, margin: float, grid: Grid,
                                  tol: float, mode: str = "extreme_pair",
                                  tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """Opponent indifference restricted to P-close configurations.

    A tuple (x, x*, y1, y2) is eligible when it fits in an interval (A, B)
    with sigma(A, B) in the open P band (mode "extreme_pair"), or when the
    introduction-style pairwise constraints hold (mode "pairwise").

    Witness layout: (x, x_star, y1, y2).
    """
    if not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    params = _grid_params(grid, tol, P=margin, mode=mode)
    pts = grid.points()
    n = pts.size
    if n ** 4 > tuple_budget:
        return PropertyReport(Prop.P_OI, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    sig = eval_sigma(sys.curve, pts[:, None], pts[None, :])
    kmat = k_value(sys.k, pts[:, None], pts[None, :])
    ylo = np.minimum.outer(pts, pts)
    yhi = np.maximum.outer(pts, pts)
    best_worst, best_witness = 0.0, None
    any_eligible = False
    for i in range(n):
        g = kmat[i][None, :] * (sig - sig[i][None, :])
        elig = _pair_eligibility(sys.curve, pts[i], pts, margin, ylo, yhi, mode, y=pts)
        if not elig.any():
            continue
        any_eligible = True
        diff = np.abs(g[:, :, None] - g[:, None, :])
        idx, worst = _masked_worst(diff, elig)
        if idx is not None and worst > best_worst:
            j, k, l = idx
            best_worst = worst
            best_witness = (float(pts[i]), float(pts[j]), float(pts[k]), float(pts[l]))
    if not any_eligible:
        return PropertyReport(Prop.P_OI, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="no P-close tuples on grid")
    if best_worst <= tol:
        return PropertyReport(Prop.P_OI, Verdict.HOLDS, best_worst, parameters=params)
    return PropertyReport(Prop.P_OI, Verdict.REFUTED, best_worst,
                          witness=best_witness, parameters=params)


def check_strong_oi(sys: RatingSystem, grid: Grid, tol: float,
                    margin: float | None = None, mode: str = "extreme_pair",
                    tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """Indifference between opponents misrated by the same offset delta:
    residual of (x, x*, y1, y2, delta) is
    |gamma(x, x* | y1, y1+delta) - gamma(x, x* | y2, y2+delta)|.

    delta ranges over all (positive and negative) multiples of the grid
    step that fit in the grid span.  With ``margin`` given, tuples are
    restricted to P-close configurations (same modes as the P opponent
    indifference check).

    Witness layout: (x, x_star, y1, y2, delta).
    """
    prop = Prop.STRONG_OI if margin is None else Prop.STRONG_P_OI
    if margin is not None and not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    params = _grid_params(grid, tol, P=margin, mode=mode)
    pts = grid.points()
    n = pts.size
    n_delta = 2 * n - 1
    if n ** 4 * n_delta > tuple_budget:
        return PropertyReport(prop, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    sig = eval_sigma(sys.curve, pts[:, None], pts[None, :])
    kmat = k_value(sys.k, pts[:, None], pts[None, :])
    ylo = np.minimum.outer(pts, pts)
    yhi = np.maximum.outer(pts, pts)
    deltas = grid.step * np.arange(-(n - 1), n)
    best_worst, best_witness = 0.0, None
    any_eligible = False
    for delta in deltas:
        sig_d = eval_sigma(sys.curve, pts[:, None], pts[None, :] + delta)
        ylo_d = ylo + min(delta, 0.0)
        yhi_d = yhi + max(delta, 0.0)
        for i in range(n):
            g = kmat[i][None, :] * (sig_d - sig[i][None, :])
            if margin is None:
                elig = None
            else:
                elig = _pair_eligibility(sys.curve, pts[i], pts, margin,
                                         ylo_d, yhi_d, mode, y=pts, delta=delta)
                if not elig.any():
                    continue
            any_eligible = True
            diff = np.abs(g[:, :, None] - g[:, None, :])
            idx, worst = _masked_worst(diff, elig)
            if idx is not None and worst > best_worst:
                j, k, l = idx
                best_worst = worst
                best_witness = (float(pts[i]), float(pts[j]), float(pts[k]),
                                float(pts[l]), float(delta))
    if margin is not None and not any_eligible:
        return PropertyReport(prop, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="no P-close tuples on grid")
    if best_worst <= tol:
        return PropertyReport(prop, Verdict.HOLDS, best_worst, parameters=params)
    return PropertyReport(prop, Verdict.REFUTED, best_worst,
                          witness=best_witness, parameters=params)


def check_p_separable(curve: SkillCurve, margin: float, grid: Grid,
                      tol: float) -> tuple[PropertyReport, BisectorTable]:
    """Does a single bisector reproduce sigma on all P-close pairs?

    The candidate bisector is built constructively: anchored at the grid
    point nearest the midpoint with value 0.5, then extended along the
    lattice by accumulating sigma(x_{k+1}, x_k) - 0.5.  On overlapping
    P-intervals that is the unique extension, so a curve that is P separable
    in pieces gets the correct global bisector even where a fixed-reference
    extraction would clamp.  Residual of a P-close pair (x, y) is
    |sigma(x, y) - (beta(x) - beta(y) + 0.5)|; additionally the beta
    difference over eligible pairs must stay within 0.5 + tol.

    Witness layout: (x, y).
    """
    if not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    params = _grid_params(grid, tol, P=margin)
    pts = grid.points()
    mid_idx = int(np.argmin(np.abs(pts - (grid.lo + grid.hi) / 2.0)))
    mid = pts[mid_idx]
    step_close = p_close(curve, pts[1:], pts[:-1], margin)
    increments = eval_sigma(curve, pts[1:], pts[:-1]) - 0.5
    cumulative = np.concatenate(([0.0], np.cumsum(increments)))
    beta = 0.5 + (cumulative - cumulative[mid_idx])
    table = BisectorTable(pts, beta, reference=float(mid))
    params["reference"] = float(mid)
    if not np.all(step_close):
        report = PropertyReport(Prop.P_SEPARABLE, Verdict.INCONCLUSIVE, math.nan,
                                parameters=params,
                                note="grid step too coarse: consecutive points not P-close")
        return report, table
    sig = eval_sigma(curve, pts[:, None], pts[None, :])
    predicted = beta[:, None] - beta[None, :] + 0.5
    eligible = p_close(curve, pts[:, None], pts[None, :], margin)
    resid = np.abs(sig - predicted)
    idx, worst = _masked_worst(resid, eligible)
    if idx is None:
        report = PropertyReport(Prop.P_SEPARABLE, Verdict.INCONCLUSIVE, math.nan,
                                parameters=params, note="no P-close pairs on grid")
        return report, table
    span_idx, span = _masked_worst(np.abs(beta[:, None] - beta[None, :]), eligible)
    params["pclose_beta_span"] = span
    if worst <= tol and span <= 0.5 + tol:
        report = PropertyReport(Prop.P_SEPARABLE, Verdict.HOLDS, worst, parameters=params)
    elif worst > tol:
        i, j = idx
        report = PropertyReport(Prop.P_SEPARABLE, Verdict.REFUTED, worst,
                                witness=(float(pts[i]), float(pts[j])), parameters=params)
    else:
        i, j = span_idx
        report = PropertyReport(Prop.P_SEPARABLE, Verdict.REFUTED, span,
                                witness=(float(pts[i]), float(pts[j])), parameters=params,
                                note="bisector exceeds the 0.5 band on P-close pairs")
    return report, table


def check_p_constant_k(sys: RatingSystem, margin: float, grid: Grid,
                       tol: float) -> PropertyReport:
    """Is K constant over P-close pairs?  Residual is max K - min K over
    eligible pairs.  A system that is trivial on the grid is reported
    Inconclusive: a trivial system tolerates any symmetric K, so constancy
    says nothing there.

    Witness layout: (x_at_max, y_at_max, x_at_min, y_at_min).
    """
    if not 0.0 < margin <= 0.5:
        raise ValueError("margin must lie in (0, 0.5]")
    params = _grid_params(grid, tol, P=margin)
    if is_trivial_on_grid(sys.curve, grid, tol):
        return PropertyReport(Prop.P_CONSTANT_K, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="curve is trivial on this grid")
    pts = grid.points()
    kmat = k_value(sys.k, pts[:, None], pts[None, :])
    eligible = p_close(sys.curve, pts[:, None], pts[None, :], margin)
    if not eligible.any():
        return PropertyReport(Prop.P_CONSTANT_K, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="no P-close pairs on grid")
    hi_idx, hi = _masked_worst(kmat, eligible)
    lo_idx, neg_lo = _masked_worst(-kmat, eligible)
    worst = hi + neg_lo
    params["k_max"], params["k_min"] = hi, -neg_lo
    if worst <= tol:
        return PropertyReport(Prop.P_CONSTANT_K, Verdict.HOLDS, worst, parameters=params)
    witness = (float(pts[hi_idx[0]]), float(pts[hi_idx[1]]),
               float(pts[lo_idx[0]]), float(pts[lo_idx[1]]))
    return PropertyReport(Prop.P_CONSTANT_K, Verdict.REFUTED, worst,
                          witness=witness, parameters=params)


def check_translation_invariance(curve: SkillCurve, grid: Grid, tol: float,
                                 tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> PropertyReport:
    """Does sigma depend only on the rating difference?  Residual of
    (x, y, t) is |sigma(x, y) - sigma(x+t, y+t)| for lattice shifts t.

    Witness layout: (x, y, t).
    """
    params = _grid_params(grid, tol)
    pts = grid.points()
    n = pts.size
    if n ** 3 > tuple_budget:
        return PropertyReport(Prop.TRANSLATION_INVARIANT, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="tuple budget exceeded")
    sig = eval_sigma(curve, pts[:, None], pts[None, :])
    best_worst, best_witness = 0.0, None
    for shift in range(1, n):
        m = n - shift
        resid = np.abs(sig[:m, :m] - sig[shift:, shift:])
        (i, j), worst = _masked_worst(resid)
        if worst > best_worst:
            best_worst = worst
            best_witness = (float(pts[i]), float(pts[j]), float(pts[shift] - pts[0]))
    if best_worst <= tol:
        return PropertyReport(Prop.TRANSLATION_INVARIANT, Verdict.HOLDS,
                              best_worst, parameters=params)
    return PropertyReport(Prop.TRANSLATION_INVARIANT, Verdict.REFUTED, best_worst,
                          witness=best_witness, parameters=params)


def check_bisector_linear(bisector: BisectorTable, grid: Grid, tol: float) -> PropertyReport:
    """Two requirements, both at ``tol``: additivity of the normalized
    bisector g(u) = beta(ref+u) - beta(ref) over sampled offset pairs with
    u, v, u+v in range, and the max deviation from the least-squares line
    through the samples.  ``fitted_slope`` lands in the report parameters.

    Witness layout: (u, v) offsets from the reference for an additivity
    failure, (x,) for a fit failure.
    """
    params = _grid_params(grid, tol)
    pts = grid.points()
    pts = pts[(pts >= bisector.xs[0]) & (pts <= bisector.xs[-1])]
    if pts.size < 3:
        return PropertyReport(Prop.BISECTOR_LINEAR, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="fewer than 3 grid points in table range")
    ref = bisector.reference
    base = float(bisector.value(ref))
    offsets = pts - ref
    g = bisector.value(pts) - base
    target = ref + offsets[:, None] + offsets[None, :]
    valid = (target >= bisector.xs[0]) & (target <= bisector.xs[-1])
    g_sum = bisector.value(target) - base
    add_resid = np.abs(g_sum - g[:, None] - g[None, :])
    add_idx, add_worst = _masked_worst(add_resid, valid)
    slope, intercept = np.polyfit(pts, bisector.value(pts), 1)
    fit_resid = np.abs(bisector.value(pts) - (slope * pts + intercept))
    fit_i, fit_worst = _masked_worst(fit_resid)
    params["fitted_slope"] = float(slope)
    worst = max(add_worst, fit_worst)
    if worst <= tol:
        return PropertyReport(Prop.BISECTOR_LINEAR, Verdict.HOLDS, worst, parameters=params)
    if add_worst >= fit_worst:
        witness = (float(offsets[add_idx[0]]), float(offsets[add_idx[1]]))
        note = "additivity failure (witness is an offset pair from the reference)"
    else:
        witness = (float(pts[fit_i[0]]),)
        note = "least-squares line deviation"
    return PropertyReport(Prop.BISECTOR_LINEAR, Verdict.REFUTED, worst,
                          witness=witness, parameters=params, note=note)


def chain_length_bound(p: float) -> int:
    """floor(2p / (2p - 1)), the longest chain an opponent indifferent
    system can sustain at win probability p."""
    return int(math.floor(2.0 * p / (2.0 * p - 1.0)))


def build_skill_chain(curve: SkillCurve, p: float, r1: float, budget: int,
                      ceiling: float, iterations: int = 60) -> ChainResult:
    """Greedily extend a chain: each link is the smallest rating beating the
    previous one with probability >= p, found by bisection up to ``ceiling``.
    Stops at ``budget`` ratings, or when no rating below the ceiling
    reaches p."""
    if not 0.5 < p < 1.0:
        raise ValueError("p must lie in (0.5, 1)")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not ceiling > r1:
        raise ValueError("ceiling must exceed the starting rating")
    bound = chain_length_bound(p)
    ratings = [float(r1)]
    achieved: list[float] = []
    reason = "budget_exhausted"
    while len(ratings) < budget:
        r = ratings[-1]
        if eval_sigma(curve, ceiling, r) < p:
            reason = "bound_reached" if len(ratings) == bound else "curve_saturated"
            break
        lo, hi = r, float(ceiling)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if eval_sigma(curve, mid, r) >= p:
                hi = mid
            else:
                lo = mid
        ratings.append(hi)
        achieved.append(float(eval_sigma(curve, hi, r)))
    predicted = [(n - 1) * p - (n - 2) / 2.0 for n in range(1, len(ratings) + 1)]
    return ChainResult(p=p, ratings=ratings, achieved=achieved,
                       predicted_span=predicted, terminated_reason=reason,
                       length_bound=bound)


def verify_chain_identity(curve: SkillCurve, chain: ChainResult, tol: float,
                          separable: bool | None = None) -> PropertyReport:
    """Check sigma(r_N, r_1) == (N-1)p - (N-2)/2 for every prefix of the
    chain.  The identity is forced for separable curves with exact-p links;
    for curves not declared separable the report is Inconclusive but still
    carries the residual, which quantifies how far the curve escapes the
    identity.

    Witness layout: (r_N, r_1) of the worst prefix.
    """
    if separable is None:
        separable = isinstance(curve, (Separable, Trivial))
    params = {"tol": tol, "p": chain.p, "separable": separable}
    r1 = chain.ratings[0]
    worst, witness = 0.0, None
    for n, (r_n, predicted) in enumerate(zip(chain.ratings, chain.predicted_span), start=1):
        resid = abs(float(eval_sigma(curve, r_n, r1)) - predicted)
        if resid > worst:
            worst, witness = resid, (r_n, r1)
    if not separable:
        return PropertyReport(Prop.CHAIN_IDENTITY, Verdict.INCONCLUSIVE, worst,
                              witness=witness, parameters=params,
                              note="curve not separable: identity not expected to hold")
    if worst <= tol:
        return PropertyReport(Prop.CHAIN_IDENTITY, Verdict.HOLDS, worst, parameters=params)
    return PropertyReport(Prop.CHAIN_IDENTITY, Verdict.REFUTED, worst,
                          witness=witness, parameters=params)


def full_scale_report(chain: ChainResult, budget: int) -> PropertyReport:
    """Bounded full-scale certificate: Holds when the chain ran out of
    budget rather than out of curve."""
    params = {"budget": budget, "p": chain.p, "length": len(chain.ratings),
              "terminated_reason": chain.terminated_reason}
    if chain.terminated_reason == "budget_exhausted" and len(chain.ratings) == budget:
        return PropertyReport(Prop.FULL_SCALE, Verdict.HOLDS, 0.0, parameters=params)
    return PropertyReport(Prop.FULL_SCALE, Verdict.REFUTED,
                          float(len(chain.ratings)), witness=(chain.ratings[-1],),
                          parameters=params,
                          note=f"chain stopped at length {len(chain.ratings)}"
                               f" ({chain.terminated_reason})")


def _golden_section_max(f, lo: float, hi: float, iterations: int = 200,
                        xtol: float = 1e-10):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if b - a < xtol * max(1.0, abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_max_gain_opponent(sys: RatingSystem, x: float, x_star: float,
                           search: tuple[float, float], resolution: float,
                           tol: float = 1e-9) -> float | None:
    """Opponent rating maximizing |gamma(x, x* | y, y)| over the search
    interval: grid scan at ``resolution`` followed by golden-section
    refinement inside the winning cell.  Returns None (indifferent) when
    the objective is flat over the scan to within ``tol``.
    """
    lo, hi = float(search[0]), float(search[1])
    if not lo < hi:
        raise ValueError("empty search interval")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    midpoint = (x + x_star) / 2.0
    if not lo <= midpoint <= hi:
        raise ValueError("search interval must contain the current/true midpoint")
    count = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
    ys = lo + resolution * np.arange(count)

    def objective(y):
        return np.abs(k_value(sys.k, x, y)
                      * (eval_sigma(sys.curve, x_star, y) - eval_sigma(sys.curve, x, y)))

    obj = objective(ys)
    if float(obj.max() - obj.min()) < tol:
        return None
    k = int(np.argmax(obj))
    a = float(ys[max(k - 1, 0)])
    b = float(ys[min(k + 1, count - 1)])
    return float(_golden_section_max(lambda y: float(objective(y)), a, b))


def cross_check_characterization(sys: RatingSystem, margin: float, grid: Grid,
                                 tol: float, mode: str = "extreme_pair") -> PropertyReport:
    """Consistency of the two characterizations on one system:

      P opponent indifference  ==  P separable and P constant K
      strong P opponent indifference  ==  P separable with a linear
                                          bisector and P constant K

    Both sides of each equivalence are checked independently; disagreement
    means a bug in this implementation, never new mathematics, so the
    verdict is Refuted on mismatch.  Trivial systems are Inconclusive (the
    characterizations presuppose nontriviality).
    """
    params = _grid_params(grid, tol, P=margin, mode=mode)
    if is_trivial_on_grid(sys.curve, grid, tol):
        return PropertyReport(Prop.CHARACTERIZATION, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="curve is trivial on this grid")
    poi = check_p_opponent_indifference(sys, margin, grid, tol, mode=mode)
    psep, bisector = check_p_separable(sys.curve, margin, grid, tol)
    pck = check_p_constant_k(sys, margin, grid, tol)
    spoi = check_strong_oi(sys, grid, tol, margin=margin, mode=mode)
    blin = check_bisector_linear(bisector, grid, tol)
    subs = {"p_oi": poi, "p_separable": psep, "p_constant_k": pck,
            "strong_p_oi": spoi, "bisector_linear": blin}
    params["verdicts"] = {name: rep.verdict.value for name, rep in subs.items()}
    if any(rep.verdict is Verdict.INCONCLUSIVE for rep in subs.values()):
        return PropertyReport(Prop.CHARACTERIZATION, Verdict.INCONCLUSIVE, math.nan,
                              parameters=params, note="a sub-check was inconclusive")
    lhs1 = poi.verdict is Verdict.HOLDS
    rhs1 = psep.verdict is Verdict.HOLDS and pck.verdict is Verdict.HOLDS
    lhs2 = spoi.verdict is Verdict.HOLDS
    rhs2 = rhs1 and blin.verdict is Verdict.HOLDS
    if lhs1 == rhs1 and lhs2 == rhs2:
        return PropertyReport(Prop.CHARACTERIZATION, Verdict.HOLDS, 0.0, parameters=params)
    bad = []
    if lhs1 != rhs1:
        bad.append("indifference vs separability+constant-K")
    if lhs2 != rhs2:
        bad.append("strong indifference vs linear-bisector side")
    worst = max(rep.max_residual for rep in subs.values()
                if rep.verdict is Verdict.REFUTED) if any(
        rep.verdict is Verdict.REFUTED for rep in subs.values()) else math.nan
    return PropertyReport(Prop.CHARACTERIZATION, Verdict.REFUTED, worst,
                          parameters=params,
                          note="equivalence mismatch: " + "; ".join(bad))
