"""
Tests for SVG scatter plots
"""

import re

import numpy as np
import pytest

from arclust.analytics.core import DataError, Partition
from arclust.plotting import plot_scatter


@pytest.fixture
def labelled(blobs):
    partition = Partition.from_labels(np.repeat([0, 1, 2], 5))
    classes = [format(value, "g") for value in blobs.s[:, 0]]
    return blobs.x, partition, classes


def test_one_group_per_cluster_and_class(tmp_path, labelled):
    coords, partition, classes = labelled
    path = plot_scatter(coords, partition, classes, str(tmp_path / "plot.svg"), title="blobs")
    svg = open(path, encoding="utf-8").read()

    groups = set(re.findall(r'id="(points-[^"]+)"', svg))
    assert groups == {f"points-c{c}-{name}" for c in range(3) for name in ("1", "-1")}


def test_deterministic_output(tmp_path, labelled):
    coords, partition, classes = labelled
    first = plot_scatter(coords, partition, classes, str(tmp_path / "a.svg"))
    second = plot_scatter(coords, partition, classes, str(tmp_path / "b.svg"))
    assert open(first, "rb").read() == open(second, "rb").read()


def test_rejects_non_planar_coordinates(tmp_path, labelled):
    coords, partition, classes = labelled
    with pytest.raises(DataError, match="n x 2"):
        plot_scatter(np.hstack([coords, coords]), partition, classes, str(tmp_path / "p.svg"))


def test_rejects_size_mismatch(tmp_path, labelled):
    coords, partition, classes = labelled
    with pytest.raises(DataError):
        plot_scatter(coords[:-1], partition, classes, str(tmp_path / "p.svg"))
    with pytest.raises(DataError):
        plot_scatter(coords, partition, classes[:-1], str(tmp_path / "p.svg"))
