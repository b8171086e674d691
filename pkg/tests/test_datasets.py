"""
Tests for CSV loading, column roles and the synthetic generators
"""

import numpy as np
import pandas as pd
import pytest

from arclust.analytics.core import DataError
from arclust.analytics.synthetic import (
    KERNEL_RING_RADII,
    KERNEL_RING_WIDTH,
    RING_RADII,
    RING_WIDTH,
    make_gaussians,
    make_rings,
)
from arclust.datasets import ColumnRoles, dataset_from_frame, load_csv


@pytest.fixture
def school_frame():
    return pd.DataFrame(
        {
            "id": ["0101", "0102", "0103"],
            "lat": [40.1, 40.2, 40.3],
            "lon": [-75.0, -75.1, -75.2],
            "white": [10, 0, 4],
            "black": [2, 8, 4],
        }
    )


class TestColumnRoles:
    def test_infers_conventional_names(self):
        frame = make_gaussians(seed=1)
        roles = ColumnRoles().infer(frame)
        assert roles.id_column == "id"
        assert roles.protected_columns == ("s",)
        assert roles.codification == "raw"
        assert roles.x_columns == ("x1", "x2")

    def test_infers_class_column(self):
        roles = ColumnRoles().infer(make_rings(seed=1, n=40))
        assert roles.class_column == "class"
        assert roles.codification == "one_hot"

    def test_declared_protected_columns_default_to_counts(self, school_frame):
        roles = ColumnRoles(protected_columns=("white", "black")).infer(school_frame)
        assert roles.codification == "counts"
        assert roles.x_columns == ("lat", "lon")

    def test_conflicting_roles(self):
        with pytest.raises(ValueError, match="more than one role"):
            ColumnRoles(x_columns=("a",), protected_columns=("a",))
        with pytest.raises(ValueError, match="either"):
            ColumnRoles(protected_columns=("a",), class_column="b")
        with pytest.raises(ValueError, match="together"):
            ColumnRoles(lat_column="lat")

    def test_from_config(self):
        roles = ColumnRoles.from_config(
            {"x_columns": ["a", "b"], "class_column": "group", "codification": "signed"}
        )
        assert roles.x_columns == ("a", "b")
        assert roles.class_column == "group"


class TestDatasetFromFrame:
    def test_counts_with_locations(self, school_frame):
        roles = ColumnRoles(
            id_column="id",
            protected_columns=("white", "black"),
            lat_column="lat",
            lon_column="lon",
        )
        data = dataset_from_frame(school_frame, roles)
        assert data.ids == ("0101", "0102", "0103")
        assert data.d == 2 and data.p == 2
        np.testing.assert_array_equal(data.latlon, school_frame[["lat", "lon"]].to_numpy())
        matrix, names = data.class_matrix()
        assert names == ("white", "black")
        np.testing.assert_array_equal(matrix[0], [10, 2])

    def test_signed_class_column(self):
        frame = make_rings(seed=2, n=50)
        data = dataset_from_frame(frame, ColumnRoles(class_column="class", codification="signed"))
        assert data.p == 1
        assert set(np.unique(data.s)) == {-1.0, 1.0}
        assert np.all(data.s[np.array(data.class_labels) == "circle"] == 1.0)
        assert data.s_columns == ("class",)

    def test_one_hot_class_column(self):
        data = dataset_from_frame(make_rings(seed=2, n=50), ColumnRoles())
        assert data.s_columns == ("circle", "square")
        np.testing.assert_array_equal(data.s.sum(axis=1), 1.0)

    def test_missing_column(self, school_frame):
        with pytest.raises(DataError, match="Missing columns"):
            dataset_from_frame(school_frame, ColumnRoles(protected_columns=("hispanic",)))

    def test_no_protected_attribute(self):
        frame = pd.DataFrame({"a": [1.0, 2.0], "b": [0.0, 1.0]})
        with pytest.raises(DataError, match="No protected attribute"):
            dataset_from_frame(frame, ColumnRoles())

    def test_missing_value_names_row_and_column(self):
        frame = pd.DataFrame({"x": [1.0, 2.0, np.nan, 4.0], "s": [1.0, -1.0, 1.0, -1.0]})
        with pytest.raises(DataError, match="missing value in column 'x', data row 3"):
            dataset_from_frame(frame, ColumnRoles())

    def test_non_numeric_value_names_row_and_column(self, school_frame):
        school_frame["black"] = ["2", "8", "four"]
        with pytest.raises(DataError, match=r"'four' in column 'black', data row 3"):
            dataset_from_frame(school_frame, ColumnRoles(protected_columns=("white", "black")))

    def test_missing_class_label(self):
        frame = make_rings(seed=2, n=50)
        frame.loc[4, "class"] = None
        with pytest.raises(DataError, match="column 'class', data row 5"):
            dataset_from_frame(frame, ColumnRoles(class_column="class"))

    def test_empty_cell_in_csv(self, tmp_path):
        path = tmp_path / "gap.csv"
        path.write_text("id,x1,x2,s\na,0.1,0.2,1\nb,0.3,0.4,-1\nc,,0.6,1\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(str(path))

    def test_non_integer_counts(self, school_frame):
        school_frame["white"] = [1.5, 2.0, 3.0]
        with pytest.raises(DataError, match="integer"):
            dataset_from_frame(school_frame, ColumnRoles(protected_columns=("white", "black")))


def test_load_csv_keeps_id_strings(tmp_path, school_frame):
    path = tmp_path / "schools.csv"
    school_frame.to_csv(path, index=False)
    data = load_csv(str(path), ColumnRoles(protected_columns=("white", "black")))
    assert data.ids == ("0101", "0102", "0103")
    assert data.x_columns == ("lat", "lon")


class TestSynthetic:
    def test_gaussians_shape(self):
        frame = make_gaussians(seed=3)
        assert len(frame) == 200
        assert list(frame.columns) == ["id", "x1", "x2", "s"]
        assert (frame["s"] == 1).sum() == 100
        assert frame.loc[frame["s"] == 1, "x1"].mean() < 0 < frame.loc[frame["s"] == -1, "x1"].mean()

    def test_gaussians_deterministic(self):
        pd.testing.assert_frame_equal(make_gaussians(seed=11), make_gaussians(seed=11))
        assert not make_gaussians(seed=11).equals(make_gaussians(seed=12))

    def test_rings_counts(self):
        frame = make_rings(seed=4)
        assert len(frame) == 981
        assert (frame["class"] == "circle").sum() == 241

    @pytest.mark.parametrize(
        "radii, width", [(RING_RADII, RING_WIDTH), (KERNEL_RING_RADII, KERNEL_RING_WIDTH)]
    )
    def test_rings_radii(self, radii, width):
        frame = make_rings(seed=4, radii=radii, width=width)
        radius = np.hypot(frame["x1"], frame["x2"])
        circles = radius[frame["class"] == "circle"]
        assert circles.min() >= radii[1] - width / 2 - 1e-12
        assert circles.max() <= radii[1] + width / 2 + 1e-12
        squares = radius[frame["class"] == "square"]
        low, high = (radii[0] + radii[1]) / 2, (radii[1] + radii[2]) / 2
        assert ((squares < low) | (squares > high)).all()
        assert (squares > high).sum() > (squares < low).sum()
        assert squares.max() <= radii[2] + width / 2 + 1e-12

    def test_rings_deterministic(self):
        pd.testing.assert_frame_equal(make_rings(seed=5), make_rings(seed=5))

    def test_rings_fraction_range(self):
        with pytest.raises(ValueError, match="circle_fraction"):
            make_rings(seed=1, circle_fraction=1.0)

    def test_rings_geometry_checks(self):
        with pytest.raises(ValueError, match="increasing"):
            make_rings(seed=1, radii=(3.0, 2.0, 1.0))
        with pytest.raises(ValueError, match="increasing"):
            make_rings(seed=1, radii=(1.0, 2.0))
        with pytest.raises(ValueError, match="overlap"):
            make_rings(seed=1, width=1.0)
