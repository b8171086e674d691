"""
SVG scatter plots of partitions
"""

import logging
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402

from .analytics.core import DataError, Partition  # noqa: E402
from .storage import atomic_path  # noqa: E402

logger = logging.getLogger(__name__)

# One marker per protected class, one color per cluster
MARKERS = ("s", "o", "^", "D", "v", "P", "X", "*")
PALETTE = "tab10"


def plot_scatter(
    coords: np.ndarray,
    partition: Partition,
    class_labels: Sequence[str],
    path: str,
    title: Optional[str] = None,
) -> str:
    """
    Write a deterministic SVG scatter plot: color by cluster, marker by class

    Each (cluster, class) group is drawn as one element with id
    "points-c{cluster}-{class}", holding one marker per point.

    Args:
        coords: n x 2 coordinates
        partition: Partition of the n points
        class_labels: Class name per point
        path: Output SVG file
        title: Optional title

    Returns:
        Path to the saved file
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise DataError(f"plot_scatter needs n x 2 coordinates, got {coords.shape}")
    if coords.shape[0] != partition.n:
        raise DataError("coords and partition differ in size")
    labels = np.asarray([str(label) for label in class_labels])
    if labels.shape[0] != partition.n:
        raise DataError("class_labels must have one entry per point")

    classes = sorted(set(labels))
    if len(classes) > len(MARKERS):
        raise ValueError(f"At most {len(MARKERS)} classes can be plotted")
    cmap = plt.get_cmap(PALETTE)

    with plt.rc_context({"svg.hashsalt": "arclust", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 6))
        for cluster in range(partition.k):
            color = cmap(cluster % cmap.N)
            for marker, name in zip(MARKERS, classes):
                mask = (partition.labels == cluster) & (labels == name)
                if not mask.any():
                    continue
                (line,) = ax.plot(
                    coords[mask, 0],
                    coords[mask, 1],
                    linestyle="none",
                    marker=marker,
                    markersize=5,
                    color=color,
                    alpha=0.8,
                )
                line.set_gid(f"points-c{cluster}-{name}")

        handles = [
            Line2D([], [], linestyle="none", marker=marker, color="black", label=name)
            for marker, name in zip(MARKERS, classes)
        ]
        handles += [
            Line2D([], [], linestyle="none", marker="o", color=cmap(c % cmap.N), label=f"cluster {c}")
            for c in range(partition.k)
        ]
        ax.legend(handles=handles, loc="best", fontsize="small")
        ax.set_xlabel("coordinate 1")
        ax.set_ylabel("coordinate 2")
        if title:
            ax.set_title(title)

        with atomic_path(path, suffix=".svg") as tmp:
            fig.savefig(tmp, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info(f"Saved scatter plot to {path}")
    return path
