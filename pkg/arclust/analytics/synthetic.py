"""
Synthetic benchmark datasets
"""

import logging

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# Component means; the first two carry s = +1, the last two s = -1
GAUSSIAN_MEANS = ((-1.0, 0.5), (-1.0, -0.5), (1.0, 0.5), (1.0, -0.5))
GAUSSIAN_CLASSES = (1, 1, -1, -1)
GAUSSIAN_STD = 0.5

RING_RADII = (1.0, 2.0, 3.0)
RING_WIDTH = 0.4
# Ring scale at which a delta4 locality of w = 0.05 on squared coordinates stays local
KERNEL_RING_RADII = (3.0, 6.0, 9.0)
KERNEL_RING_WIDTH = 1.2


def make_gaussians(seed: int, n_per_component: int = 50) -> pd.DataFrame:
    """
    Four isotropic Gaussian blobs (variance 0.25) with a binary protected
    attribute that follows the horizontal split

    Args:
        seed: Random seed
        n_per_component: Points per blob

    Returns:
        DataFrame with columns id, x1, x2, s
    """
    rng = np.random.default_rng(seed)
    blocks = []
    for mean, label in zip(GAUSSIAN_MEANS, GAUSSIAN_CLASSES):
        points = rng.normal(loc=mean, scale=GAUSSIAN_STD, size=(n_per_component, 2))
        blocks.append(
            pd.DataFrame({"x1": points[:, 0], "x2": points[:, 1], "s": label})
        )
    frame = pd.concat(blocks, ignore_index=True)
    frame.insert(0, "id", [f"g{i}" for i in range(len(frame))])
    logger.info(f"Generated {len(frame)} gaussian points (seed={seed})")
    return frame


def _annulus(rng: np.random.Generator, n: int, radius: float, width: float) -> np.ndarray:
    inner, outer = radius - width / 2, radius + width / 2
    r = np.sqrt(rng.uniform(inner**2, outer**2, size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def make_rings(
    seed: int,
    n: int = 981,
    circle_fraction: float = 0.246,
    radii=RING_RADII,
    width: float = RING_WIDTH,
) -> pd.DataFrame:
    """
    Three concentric annuli: squares on the inner and outer ring, circles
    on the middle one

    Squares are split between the inner and outer rings in proportion to
    ring length. Pass KERNEL_RING_RADII and KERNEL_RING_WIDTH for the
    kernelized delta4 setting; on the default radii every squared-coordinate
    distance is below 1/w and the perturbation is no longer local.

    Args:
        seed: Random seed
        n: Total number of points
        circle_fraction: Share of circles
        radii: Inner, middle and outer radius
        width: Annulus width

    Returns:
        DataFrame with columns id, x1, x2, class
    """
    if not 0 < circle_fraction < 1:
        raise ValueError("circle_fraction must be in (0, 1)")
    radii = tuple(float(r) for r in radii)
    if len(radii) != 3 or not 0 < radii[0] < radii[1] < radii[2]:
        raise ValueError(f"radii must be three increasing positive values, got {radii}")
    if not 0 < width < min(2 * radii[0], radii[1] - radii[0], radii[2] - radii[1]):
        raise ValueError(f"width {width} makes the annuli overlap or cross the origin")
    rng = np.random.default_rng(seed)
    n_circles = int(round(circle_fraction * n))
    n_squares = n - n_circles
    n_inner = int(round(n_squares * radii[0] / (radii[0] + radii[2])))
    n_outer = n_squares - n_inner

    blocks = []
    for count, radius, label in (
        (n_inner, radii[0], "square"),
        (n_circles, radii[1], "circle"),
        (n_outer, radii[2], "square"),
    ):
        points = _annulus(rng, count, radius, width)
        blocks.append(pd.DataFrame({"x1": points[:, 0], "x2": points[:, 1], "class": label}))
    frame = pd.concat(blocks, ignore_index=True)
    frame.insert(0, "id", [f"r{i}" for i in range(len(frame))])
    logger.info(f"Generated {len(frame)} ring points (seed={seed}, radii={radii}, width={width})")
    return frame
