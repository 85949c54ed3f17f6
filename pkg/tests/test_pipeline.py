"""Resampling, normalization, splitting, and the four metrics."""

import numpy as np
import pytest

from sandfrac.data import Dataset, WellSeries
from sandfrac.errors import (
    InputError,
    OutOfRangeError,
    ParameterError,
    UndefinedMetricError,
)
from sandfrac.pipeline import (
    MinMaxSpec,
    ZScoreSpec,
    aem,
    cc,
    metric_bundle,
    random_split,
    resample_well,
    rmse,
    si,
    spline_resample,
    wells_to_dataset,
)

# population std of {2, 4, 6} is sqrt(8/3)
Z_2_4_6 = 1.224744871391589
# X = (1,2,3) vs Y = (2,2,2), hand arithmetic
RMSE_123_222 = 0.816496580927726
SI_123_222 = 0.408248290463863


class TestSpline:
    def test_linear_data_exact(self):
        t = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        v = 3.0 * t - 1.0
        q = np.array([0.25, 1.7, 3.9])
        np.testing.assert_allclose(spline_resample(t, v, q), 3.0 * q - 1.0, atol=1e-12)

    def test_cubic_reproduced(self):
        # a cubic spline through cubic data is that cubic
        t = np.linspace(-1.0, 2.0, 6)
        v = t**3
        q = np.linspace(-0.95, 1.95, 40)
        np.testing.assert_allclose(spline_resample(t, v, q), q**3, atol=1e-9)

    def test_knot_values_exact(self):
        t = np.array([0.0, 1.0, 2.5, 3.0, 5.0])
        v = np.array([2.0, -1.0, 0.5, 4.0, 4.5])
        np.testing.assert_allclose(spline_resample(t, v, t), v, atol=1e-12)

    def test_fourth_order_convergence(self):
        # halving knot spacing on sin(t) shrinks max error by roughly 16x
        q = np.linspace(0.1, 2 * np.pi - 0.1, 500)

        def max_err(n):
            t = np.linspace(0.0, 2 * np.pi, n)
            return np.max(np.abs(spline_resample(t, np.sin(t), q) - np.sin(q)))

        assert max_err(17) / max_err(33) >= 8.0

    def test_out_of_span_query(self):
        t = np.linspace(0.0, 4.0, 5)
        with pytest.raises(OutOfRangeError, match="4.5"):
            spline_resample(t, t, np.array([1.0, 4.5]))

    def test_too_few_knots(self):
        with pytest.raises(InputError):
            spline_resample(np.array([0.0, 1.0, 2.0]), np.zeros(3), np.array([0.5]))

    def test_non_increasing_knots(self):
        with pytest.raises(InputError):
            spline_resample(np.array([0.0, 1.0, 1.0, 2.0]), np.zeros(4), np.array([0.5]))


class TestResampleWell:
    def test_resamples_all_columns(self):
        t = np.linspace(0.0, 10.0, 11)
        well = WellSeries(
            well_id="W",
            times_ms=t,
            attributes={"imp": 2.0 * t, "amp": t**2},
            sand_fraction=np.linspace(0.0, 1.0, 11),
        )
        new_t = np.array([0.5, 5.5, 9.5])
        out = resample_well(well, new_t)
        np.testing.assert_array_equal(out.times_ms, new_t)
        np.testing.assert_allclose(out.attributes["imp"], 2.0 * new_t, atol=1e-12)
        assert out.sand_fraction.shape == (3,)

    def test_target_clipped_to_unit_interval(self):
        # spline overshoot on the target is clamped back into [0, 1]
        t = np.linspace(0.0, 6.0, 7)
        s = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        well = WellSeries(
            well_id="W", times_ms=t, attributes={"a": t}, sand_fraction=s
        )
        out = resample_well(well, np.linspace(0.2, 5.8, 50))
        assert out.sand_fraction.min() >= 0.0
        assert out.sand_fraction.max() <= 1.0


class TestZScore:
    def test_two_point(self):
        spec = ZScoreSpec.fit(np.array([0.0, 10.0]))
        np.testing.assert_allclose(
            spec.apply(np.array([0.0, 10.0])).ravel(), [-1.0, 1.0], atol=1e-15
        )

    def test_three_point_hand_value(self):
        spec = ZScoreSpec.fit(np.array([2.0, 4.0, 6.0]))
        got = spec.apply(np.array([2.0, 4.0, 6.0])).ravel()
        np.testing.assert_allclose(got, [-Z_2_4_6, 0.0, Z_2_4_6], rtol=1e-14)

    def test_fit_moments(self, rng):
        x = rng.normal(3.0, 7.0, size=(500, 3))
        z = ZScoreSpec.fit(x).apply(x)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-9)

    def test_round_trip(self, rng):
        x = rng.uniform(-100, 100, size=(50, 2))
        spec = ZScoreSpec.fit(x)
        np.testing.assert_allclose(spec.invert(spec.apply(x)), x, atol=1e-12)

    def test_constant_column_floored_with_warning(self):
        x = np.column_stack([np.full(5, 3.0), np.arange(5.0)])
        with pytest.warns(RuntimeWarning):
            spec = ZScoreSpec.fit(x)
        assert np.all(spec.std > 0)
        assert np.all(np.isfinite(spec.apply(x)))

    def test_dict_round_trip(self):
        spec = ZScoreSpec(mean=[1.0, 2.0], std=[3.0, 4.0])
        back = ZScoreSpec.from_dict(spec.to_dict())
        np.testing.assert_array_equal(back.mean, spec.mean)
        np.testing.assert_array_equal(back.std, spec.std)


class TestMinMax:
    def test_endpoints_exact(self):
        spec = MinMaxSpec(low=1.0, high=5.0)
        assert spec.apply(1.0) == 0.0
        assert spec.apply(5.0) == 1.0

    def test_midpoint(self):
        assert MinMaxSpec(low=1.0, high=5.0).apply(3.0) == 0.5

    def test_custom_interval(self):
        spec = MinMaxSpec(low=0.0, high=2.0, new_low=-1.0, new_high=1.0)
        assert spec.apply(0.0) == -1.0
        assert spec.apply(2.0) == 1.0
        assert spec.apply(1.0) == 0.0

    def test_round_trip(self, rng):
        spec = MinMaxSpec(low=-3.0, high=17.0)
        y = rng.uniform(-3.0, 17.0, size=100)
        np.testing.assert_allclose(spec.invert(spec.apply(y)), y, atol=1e-12)

    def test_order_preserving(self, rng):
        spec = MinMaxSpec(low=0.0, high=1.0, new_low=5.0, new_high=9.0)
        y = np.sort(rng.uniform(0, 1, size=30))
        assert np.all(np.diff(spec.apply(y)) >= 0)

    def test_zero_range_rejected(self):
        with pytest.raises(ParameterError):
            MinMaxSpec(low=2.0, high=2.0)
        with pytest.raises(ParameterError):
            MinMaxSpec.fit(np.full(4, 0.3))

    def test_dict_round_trip(self):
        spec = MinMaxSpec(low=0.1, high=0.9, new_low=0.0, new_high=1.0)
        back = MinMaxSpec.from_dict(spec.to_dict())
        assert (back.low, back.high, back.new_low, back.new_high) == (
            spec.low,
            spec.high,
            spec.new_low,
            spec.new_high,
        )


class TestRandomSplit:
    def _ds(self, n):
        return Dataset(
            attribute_names=["a"],
            x=np.arange(float(n)).reshape(-1, 1),
            y=np.linspace(0, 1, n),
        )

    def test_sizes(self):
        train, test = random_split(self._ds(10), 0.7, seed=0)
        assert train.n_samples == 7
        assert test.n_samples == 3

    def test_union_is_original_multiset(self):
        train, test = random_split(self._ds(23), 0.7, seed=5)
        merged = np.sort(np.concatenate([train.x[:, 0], test.x[:, 0]]))
        np.testing.assert_array_equal(merged, np.arange(23.0))

    def test_deterministic_per_seed(self):
        a1, b1 = random_split(self._ds(1000), 0.7, seed=3)
        a2, b2 = random_split(self._ds(1000), 0.7, seed=3)
        np.testing.assert_array_equal(a1.x, a2.x)
        np.testing.assert_array_equal(b1.y, b2.y)
        a3, _ = random_split(self._ds(1000), 0.7, seed=4)
        assert not np.array_equal(a1.x, a3.x)

    def test_degenerate_fraction_rejected(self):
        with pytest.raises(ParameterError):
            random_split(self._ds(10), 0.0, seed=0)
        with pytest.raises(ParameterError):
            random_split(self._ds(3), 0.2, seed=0)  # empty train side


class TestMetrics:
    def test_perfect_prediction(self):
        y = np.array([0.1, 0.5, 0.9, 0.4])
        assert cc(y, y) == pytest.approx(1.0, abs=1e-12)
        assert rmse(y, y) == 0.0
        assert aem(y, y) == 0.0
        assert si(y, y) == 0.0

    def test_hand_values(self):
        x = np.array([1.0, 2.0, 3.0])
        y = np.array([2.0, 2.0, 2.0])
        assert rmse(x, y) == pytest.approx(RMSE_123_222, rel=1e-14)
        assert aem(x, y) == pytest.approx(2.0 / 3.0, rel=1e-14)
        assert si(x, y) == pytest.approx(SI_123_222, rel=1e-14)
        with pytest.raises(UndefinedMetricError):
            cc(x, y)  # zero variance in y

    def test_perfect_anticorrelation(self, rng):
        y = rng.uniform(0, 1, size=20)
        assert cc(-y + 0.3, y) == pytest.approx(-1.0, abs=1e-12)

    def test_cc_affine_invariance(self, rng):
        x = rng.uniform(0, 1, size=50)
        y = rng.uniform(0, 1, size=50)
        base = cc(x, y)
        assert cc(3.0 * x + 11.0, y) == pytest.approx(base, abs=1e-10)
        assert cc(x, 0.25 * y - 2.0) == pytest.approx(base, abs=1e-10)

    def test_si_undefined_on_zero_mean(self):
        with pytest.raises(UndefinedMetricError):
            si(np.array([1.0, 2.0]), np.array([-1.0, 1.0]))

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            rmse(np.array([1.0]), np.array([1.0, 2.0]))

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            rmse(np.array([]), np.array([]))

    def test_bundle_marks_undefined_as_nan(self):
        out = metric_bundle(np.array([1.0, 2.0, 3.0]), np.array([2.0, 2.0, 2.0]))
        assert np.isnan(out["cc"])
        assert out["rmse"] == pytest.approx(RMSE_123_222, rel=1e-14)
        assert set(out) == {"cc", "rmse", "aem", "si"}


class TestWellsToDataset:
    def test_stacking_and_order(self):
        t = np.linspace(0.0, 3.0, 4)
        w1 = WellSeries(
            well_id="A",
            times_ms=t,
            attributes={"p": t, "q": 2 * t},
            sand_fraction=np.full(4, 0.5),
        )
        w2 = WellSeries(
            well_id="B",
            times_ms=t,
            attributes={"p": -t, "q": t},
            sand_fraction=np.full(4, 0.25),
        )
        ds = wells_to_dataset([w1, w2], attributes=["q", "p"])
        assert ds.attribute_names == ["q", "p"]
        assert ds.n_samples == 8
        np.testing.assert_array_equal(ds.x[:4, 0], 2 * t)
        np.testing.assert_array_equal(ds.x[4:, 1], -t)
        assert list(ds.well_ids[:4]) == ["A"] * 4
