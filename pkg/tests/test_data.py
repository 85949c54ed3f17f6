"""Dataset container, CSV readers and writers."""

import numpy as np
import pytest

from sandfrac.data import (
    Dataset,
    WellSeries,
    load_dataset,
    read_locations_csv,
    read_well_csv,
    write_dataset,
)
from sandfrac.errors import InputError


def small_dataset():
    return Dataset(
        attribute_names=["p", "q"],
        x=np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]),
        y=np.array([0.1, 0.2, 0.3]),
        well_ids=np.array(["A", "A", "B"], dtype=object),
        times_ms=np.array([10.0, 12.0, 10.0]),
    )


class TestDataset:
    def test_shape_validation(self):
        with pytest.raises(InputError):
            Dataset(attribute_names=["p"], x=np.zeros((3, 2)), y=np.zeros(3))
        with pytest.raises(InputError):
            Dataset(attribute_names=["p"], x=np.zeros((3, 1)), y=np.zeros(4))

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            Dataset(
                attribute_names=["p"],
                x=np.array([[1.0], [np.nan]]),
                y=np.zeros(2),
            )

    def test_subset_keeps_metadata(self):
        ds = small_dataset()
        sub = ds.subset(np.array([2, 0]))
        np.testing.assert_array_equal(sub.x, [[5.0, 6.0], [1.0, 2.0]])
        assert list(sub.well_ids) == ["B", "A"]
        np.testing.assert_array_equal(sub.times_ms, [10.0, 10.0])

    def test_select_attributes(self):
        ds = small_dataset()
        sub = ds.select_attributes(["q"])
        assert sub.attribute_names == ["q"]
        np.testing.assert_array_equal(sub.x[:, 0], [2.0, 4.0, 6.0])

    def test_select_unknown_attribute(self):
        with pytest.raises(InputError, match="zz"):
            small_dataset().select_attributes(["zz"])

    def test_sample_access(self):
        s = small_dataset().sample(1)
        np.testing.assert_array_equal(s.predictors, [3.0, 4.0])
        assert s.target == 0.2
        assert s.well_id == "A"
        assert s.time_ms == 12.0


class TestDatasetCsv:
    def test_round_trip(self, tmp_path):
        ds = small_dataset()
        path = tmp_path / "ds.csv"
        write_dataset(ds, path)
        back = load_dataset(path)
        assert back.attribute_names == ds.attribute_names
        np.testing.assert_array_equal(back.x, ds.x)
        np.testing.assert_array_equal(back.y, ds.y)
        assert list(back.well_ids) == list(ds.well_ids)

    def test_seventeen_digit_exactness(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = Dataset(
            attribute_names=["p"],
            x=rng.uniform(-1, 1, size=(20, 1)),
            y=rng.uniform(0, 1, size=20),
            well_ids=np.array(["W"] * 20, dtype=object),
            times_ms=np.arange(20.0),
        )
        path = tmp_path / "ds.csv"
        write_dataset(ds, path)
        back = load_dataset(path)
        np.testing.assert_array_equal(back.x, ds.x)
        np.testing.assert_array_equal(back.y, ds.y)

    def test_attribute_subset_load(self, tmp_path):
        path = tmp_path / "ds.csv"
        write_dataset(small_dataset(), path)
        back = load_dataset(path, attributes=["q"])
        assert back.attribute_names == ["q"]

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("well_id,time_ms,p\nA,1,2\n")
        with pytest.raises(InputError, match="sand_fraction"):
            load_dataset(path)

    def test_parse_error_cites_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "well_id,time_ms,p,sand_fraction\nA,1,2,0.5\nA,2,oops,0.6\n"
        )
        with pytest.raises(InputError, match=":3:"):
            load_dataset(path)


class TestWellSeries:
    def test_times_must_increase(self):
        with pytest.raises(InputError):
            WellSeries(
                well_id="W",
                times_ms=np.array([0.0, 2.0, 1.0]),
                attributes={"a": np.zeros(3)},
                sand_fraction=np.full(3, 0.5),
            )

    def test_target_range_checked(self):
        with pytest.raises(InputError):
            WellSeries(
                well_id="W",
                times_ms=np.array([0.0, 1.0]),
                attributes={"a": np.zeros(2)},
                sand_fraction=np.array([0.5, 1.5]),
            )

    def test_attribute_length_checked(self):
        with pytest.raises(InputError):
            WellSeries(
                well_id="W",
                times_ms=np.array([0.0, 1.0]),
                attributes={"a": np.zeros(3)},
                sand_fraction=np.array([0.5, 0.5]),
            )


class TestWellCsv:
    def test_groups_by_well_in_first_appearance_order(self, tmp_path):
        path = tmp_path / "wells.csv"
        path.write_text(
            "well_id,time_ms,imp,sand_fraction\n"
            "B,0,1,0.1\nB,2,2,0.2\nB,4,2,0.2\nB,6,2,0.2\n"
            "A,0,3,0.3\nA,2,4,0.4\nA,4,4,0.4\nA,6,4,0.4\n"
        )
        wells = read_well_csv(path)
        assert [w.well_id for w in wells] == ["B", "A"]
        np.testing.assert_array_equal(wells[0].attributes["imp"], [1.0, 2.0, 2.0, 2.0])
        np.testing.assert_array_equal(wells[1].sand_fraction, [0.3, 0.4, 0.4, 0.4])

    def test_locations(self, tmp_path):
        path = tmp_path / "locations.csv"
        path.write_text("well_id,inline,crossline\nA,3,7\nB,0,11\n")
        locs = read_locations_csv(path)
        assert locs == {"A": (3, 7), "B": (0, 11)}

    def test_locations_malformed(self, tmp_path):
        path = tmp_path / "locations.csv"
        path.write_text("well_id,inline,crossline\nA,3.5,7\n")
        with pytest.raises(InputError):
            read_locations_csv(path)
