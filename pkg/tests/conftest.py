"""
Shared fixtures for the arclust test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from arclust.analytics.core import Dataset  # noqa: E402
from arclust.analytics.synthetic import make_gaussians  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_signed(rng):
    """12 points in the plane with a signed binary attribute"""
    x = rng.normal(size=(12, 2))
    s = np.where(np.arange(12) % 3 == 0, 1.0, -1.0).reshape(-1, 1)
    return Dataset(x=x, s=s)


@pytest.fixture
def small_counts(rng):
    """15 records with 3-dimensional x and counts over 2 groups"""
    x = rng.normal(size=(15, 3))
    s = rng.integers(1, 20, size=(15, 2)).astype(float)
    return Dataset(x=x, s=s)


@pytest.fixture
def gaussians():
    frame = make_gaussians(seed=7)
    return Dataset(
        x=frame[["x1", "x2"]].to_numpy(),
        s=frame[["s"]].to_numpy(dtype=float),
        ids=tuple(frame["id"]),
    )


@pytest.fixture
def blobs():
    """Three well separated blobs, 5 points each, binary classes interleaved"""
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    offsets = np.array([[0, 0], [0.3, 0], [0, 0.3], [-0.3, 0], [0, -0.3]])
    x = np.vstack([c + offsets for c in centers])
    s = np.tile([1.0, -1.0, 1.0, -1.0, 1.0], 3).reshape(-1, 1)
    return Dataset(x=x, s=s)
