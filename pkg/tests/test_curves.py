"""Skill-curve evaluation, bisector extraction, and P-closeness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratinglab import (
    BisectorTable,
    CurveDomainError,
    Separable,
    SonasLike,
    Tabulated,
    ThresholdedLogistic,
    Trivial,
    eval_sigma,
    extract_bisector,
    p_close,
)

# Independently computed with a 40-digit evaluation of 1/(1 + 10^(-d/400)).
LOGISTIC_400_AT_100 = 0.6400649998028851

ratings = st.floats(min_value=-3000.0, max_value=3000.0,
                    allow_nan=False, allow_infinity=False)


def analytic_curves():
    return [
        Trivial(),
        SonasLike(0.001, 400.0),
        SonasLike(0.0004, 1000.0),
        ThresholdedLogistic(400.0, 400.0),
        ThresholdedLogistic(400.0),
        Separable(BisectorTable(np.linspace(-3000, 3000, 41),
                                0.4 * np.tanh(np.linspace(-3000, 3000, 41) / 500.0),
                                reference=0.0)),
    ]


class TestEvalSigma:
    def test_sonas_known_value(self, sonas):
        assert eval_sigma(sonas, 2200.0, 2000.0) == pytest.approx(0.7, abs=1e-15)

    def test_equal_ratings_is_half(self):
        for curve in analytic_curves():
            assert eval_sigma(curve, 1500.0, 1500.0) == 0.5

    def test_logistic_oracle(self, elo_clamped):
        assert eval_sigma(elo_clamped, 1600.0, 1500.0) == pytest.approx(
            LOGISTIC_400_AT_100, abs=1e-15)

    def test_logistic_clamp_caps_probability(self, elo_clamped, elo_unclamped):
        capped = eval_sigma(elo_clamped, 2400.0, 1500.0)
        assert capped == eval_sigma(elo_clamped, 1900.0, 1500.0)  # both beyond clamp
        assert eval_sigma(elo_unclamped, 2400.0, 1500.0) > capped

    def test_sonas_clamps_outside_threshold(self, sonas):
        edge = eval_sigma(sonas, 1900.0, 1500.0)
        assert edge == pytest.approx(0.9, abs=1e-15)
        assert eval_sigma(sonas, 2600.0, 1500.0) == edge

    @given(x=ratings, y=ratings)
    @settings(max_examples=300)
    def test_draw_free_exact(self, x, y):
        for curve in analytic_curves():
            assert eval_sigma(curve, x, y) + eval_sigma(curve, y, x) == 1.0

    @given(x=ratings, y=ratings)
    @settings(max_examples=300)
    def test_range(self, x, y):
        for curve in analytic_curves():
            assert 0.0 <= eval_sigma(curve, x, y) <= 1.0

    def test_monotone_in_first_argument(self):
        xs = np.linspace(-2500, 2500, 401)
        for curve in analytic_curves():
            for y in (-1000.0, 0.0, 1300.0):
                vals = eval_sigma(curve, xs, y)
                assert np.all(np.diff(vals) >= -1e-12)
                dual = eval_sigma(curve, y, xs)
                assert np.all(np.diff(dual) <= 1e-12)

    def test_sonas_linear_inside_threshold(self, sonas):
        # canonical-order evaluation reproduces the linear formula to the bit;
        # the reflected side may differ by one rounding of the final subtraction
        diffs = np.linspace(-400.0, 400.0, 801)
        got = eval_sigma(sonas, 1500.0 + diffs, 1500.0)
        expected = 0.001 * diffs + 0.5
        assert np.max(np.abs(got - expected)) <= 2.3e-16

    def test_vectorized_matches_scalar(self, elo_unclamped):
        xs = np.array([1200.0, 1500.0, 1803.5])
        ys = np.array([1600.0, 1500.0, 1100.25])
        vec = eval_sigma(elo_unclamped, xs, ys)
        for i in range(3):
            assert vec[i] == eval_sigma(elo_unclamped, float(xs[i]), float(ys[i]))


class TestValidation:
    def test_sonas_rejects_overflowing_band(self):
        with pytest.raises(ValueError):
            SonasLike(0.002, 400.0)  # slope * threshold = 0.8 > 0.5
        with pytest.raises(ValueError):
            SonasLike(-0.001, 400.0)
        with pytest.raises(ValueError):
            ThresholdedLogistic(0.0)

    def test_bisector_table_validation(self):
        with pytest.raises(ValueError):
            BisectorTable(np.array([0.0, 0.0, 1.0]), np.zeros(3), reference=0.0)
        with pytest.raises(ValueError):
            BisectorTable(np.array([0.0, 1.0]), np.array([0.5, 0.1]), reference=0.0)
        with pytest.raises(ValueError):
            BisectorTable(np.array([0.0, 1.0]), np.array([0.0, 0.1]), reference=5.0)


class TestTabulated:
    def _grid(self, corrupt=False, symmetrize=True, interpolate=True):
        pts = np.linspace(1000.0, 2000.0, 6)
        logistic = ThresholdedLogistic(400.0)
        x, y = np.meshgrid(pts, pts, indexing="ij")
        sig = np.asarray(eval_sigma(logistic, x, y))
        if corrupt:
            sig[1, 4] += 0.1
        return Tabulated.from_points(x.ravel(), y.ravel(), sig.ravel(),
                                     symmetrize=symmetrize, interpolate=interpolate)

    def test_nodes_reproduced_and_draw_free(self):
        tab = self._grid()
        assert eval_sigma(tab, 1200.0, 1200.0) == pytest.approx(0.5, abs=1e-12)
        s = eval_sigma(tab, 1400.0, 1800.0)
        assert s + eval_sigma(tab, 1800.0, 1400.0) == pytest.approx(1.0, abs=1e-12)

    def test_bilinear_interpolation_between_nodes(self):
        tab = self._grid()
        s = eval_sigma(tab, 1100.0, 1000.0)  # midpoint of first x-cell
        expected = 0.5 * (tab.values[0, 0] + tab.values[1, 0])
        assert s == pytest.approx(expected, abs=1e-12)

    def test_off_grid_without_interpolation(self):
        tab = self._grid(interpolate=False)
        assert eval_sigma(tab, 1200.0, 1400.0) == pytest.approx(
            eval_sigma(self._grid(), 1200.0, 1400.0), abs=1e-12)
        with pytest.raises(CurveDomainError):
            eval_sigma(tab, 1233.0, 1400.0)

    def test_outside_bounding_box(self):
        tab = self._grid()
        with pytest.raises(CurveDomainError):
            eval_sigma(tab, 900.0, 1500.0)

    def test_symmetrization_repairs_corruption(self):
        clean = self._grid(corrupt=True, symmetrize=True)
        pts = np.linspace(1000.0, 2000.0, 6)
        s = eval_sigma(clean, pts[:, None], pts[None, :])
        assert np.max(np.abs(s + s.T - 1.0)) <= 1e-12

    def test_corrupted_grid_violates_draw_free(self):
        bad = self._grid(corrupt=True, symmetrize=False)
        pts = np.linspace(1000.0, 2000.0, 6)
        s = eval_sigma(bad, pts[:, None], pts[None, :])
        assert np.max(np.abs(s + s.T - 1.0)) > 0.09

    def test_incomplete_lattice_rejected(self):
        with pytest.raises(ValueError):
            Tabulated.from_points([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.5, 0.6, 0.4])


class TestExtractBisector:
    def test_sonas_linear_values(self, sonas):
        table = extract_bisector(sonas, 0.0, (-300.0, 300.0), 10.0)
        expected = 0.001 * table.xs + 0.5
        assert np.max(np.abs(table.values - expected)) <= 1e-15
        assert table.value(0.0) == 0.5

    def test_trivial_constant(self):
        table = extract_bisector(Trivial(), 1500.0, (1000.0, 2000.0), 100.0)
        assert np.all(table.values == 0.5)

    def test_logistic_oracle_point(self, elo_clamped):
        table = extract_bisector(elo_clamped, 0.0, (-400.0, 400.0), 100.0)
        assert table.value(100.0) == pytest.approx(LOGISTIC_400_AT_100, abs=1e-15)

    def test_reference_always_sampled(self, sonas):
        table = extract_bisector(sonas, 37.0, (-300.0, 300.0), 50.0)
        assert 37.0 in table.xs
        assert table.value(37.0) == 0.5

    def test_shift_freedom(self, sonas):
        a = extract_bisector(sonas, 0.0, (-300.0, 300.0), 50.0)
        b = extract_bisector(sonas, 100.0, (-300.0, 300.0), 50.0)
        assert np.array_equal(a.xs, b.xs)
        shifts = a.values - b.values
        assert np.max(shifts) - np.min(shifts) <= 1e-12

    def test_separable_curve_reproduced_on_pclose_pairs(self, tanh_bisector):
        curve = Separable(tanh_bisector)
        table = extract_bisector(curve, 0.0, (-800.0, 800.0), 25.0)
        xs = table.xs
        pred = table.values[:, None] - table.values[None, :] + 0.5
        actual = eval_sigma(curve, xs[:, None], xs[None, :])
        from ratinglab import p_close
        eligible = p_close(curve, xs[:, None], xs[None, :], 0.49)
        assert eligible.sum() > 100
        assert np.max(np.abs(actual - pred)[eligible]) <= 1e-9

    def test_empty_domain_rejected(self, sonas):
        with pytest.raises(ValueError):
            extract_bisector(sonas, 0.0, (300.0, -300.0), 10.0)
        with pytest.raises(ValueError):
            extract_bisector(sonas, 900.0, (-300.0, 300.0), 10.0)


class TestPClose:
    def test_interior(self, sonas):
        assert p_close(sonas, 100.0, 0.0, 0.2) is True

    def test_boundary_is_excluded(self, sonas):
        # sigma = 0.7 sits exactly on the open-interval edge for P = 0.2
        assert p_close(sonas, 200.0, 0.0, 0.2) is False

    def test_equal_ratings_always_close(self):
        for curve in analytic_curves():
            assert p_close(curve, 1500.0, 1500.0, 1e-9)

    def test_open_slack(self, sonas):
        assert p_close(sonas, 150.0, 0.0, 0.2) is True
        assert p_close(sonas, 150.0, 0.0, 0.2, eps_open=0.06) is False

    def test_margin_validation(self, sonas):
        with pytest.raises(ValueError):
            p_close(sonas, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            p_close(sonas, 0.0, 0.0, 0.6)
