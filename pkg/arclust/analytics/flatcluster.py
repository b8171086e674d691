"""
Partitional clustering on coordinates: k-means (Lloyd) and k-medoids (PAM)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from .core import DataError, Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KMeansResult:
    partition: Partition
    centers: np.ndarray
    within_ss: float
    iterations: int
    seed: int
    restarts: int


@dataclass(frozen=True)
class KMedoidsResult:
    partition: Partition
    medoids: np.ndarray
    objective: float
    iterations: int
    seed: int


def _check_coords(coords: np.ndarray, k: int) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        coords = coords.reshape(-1, 1)
    if coords.ndim != 2 or coords.shape[0] == 0:
        raise DataError(f"Coordinates must be a non-empty n x d array, got {coords.shape}")
    if not np.all(np.isfinite(coords)):
        raise DataError("Coordinates contain NaN or infinite values")
    if not 2 <= k <= coords.shape[0]:
        raise ValueError(f"k must be in 2..{coords.shape[0]}, got {k}")
    return coords


def kmeans(
    coords: np.ndarray,
    k: int,
    restarts: int = 20,
    seed: int = 0,
    classes: Optional[np.ndarray] = None,
    init: Optional[np.ndarray] = None,
) -> KMeansResult:
    """
    Lloyd k-means with k-means++ seeding, best of `restarts` runs

    Iterates until assignments stop changing (at most 300 iterations).
    The run with the lowest within-cluster sum of squares wins; ties go to
    the earliest restart.

    Args:
        coords: n x d coordinates
        k: Number of clusters, 2 <= k <= n
        restarts: Number of seeded restarts
        seed: Random seed
        classes: Optional class membership matrix for proportions
        init: Optional k x d starting centers (disables restarts)

    Returns:
        KMeansResult
    """
    coords = _check_coords(coords, k)
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")

    model = KMeans(
        n_clusters=k,
        init="k-means++" if init is None else np.asarray(init, dtype=float),
        n_init=restarts if init is None else 1,
        max_iter=300,
        tol=0.0,
        algorithm="lloyd",
        random_state=seed,
    )
    labels = model.fit_predict(coords)

    partition = Partition.from_labels(labels, classes=classes)
    if partition.k < k:
        logger.warning(f"k-means found only {partition.k} distinct clusters for k={k}")

    # centers in compacted label order
    centers = np.vstack(
        [coords[partition.labels == c].mean(axis=0) for c in range(partition.k)]
    )
    within_ss = float(np.sum((coords - centers[partition.labels]) ** 2))

    return KMeansResult(
        partition=partition,
        centers=centers,
        within_ss=within_ss,
        iterations=int(model.n_iter_),
        seed=seed,
        restarts=restarts,
    )


def _assign(distances: np.ndarray, medoids: np.ndarray):
    to_medoids = distances[:, medoids]
    nearest = np.argmin(to_medoids, axis=1)
    return nearest, to_medoids[np.arange(distances.shape[0]), nearest]


def kmedoids(
    coords: np.ndarray,
    k: int,
    seed: int = 0,
    classes: Optional[np.ndarray] = None,
    max_iter: int = 100,
) -> KMedoidsResult:
    """
    Partitioning Around Medoids (BUILD then SWAP)

    BUILD starts from the most central point and greedily adds the medoid
    that lowers the total distance most; SWAP then applies the best
    improving (medoid, non-medoid) exchange until none improves. Both
    phases are deterministic; the seed is recorded with the result.

    Args:
        coords: n x d coordinates
        k: Number of clusters, 2 <= k <= n
        seed: Recorded seed
        classes: Optional class membership matrix for proportions
        max_iter: Maximum number of swaps

    Returns:
        KMedoidsResult with medoid record indices
    """
    coords = _check_coords(coords, k)
    distances = cdist(coords, coords)
    n = distances.shape[0]

    # BUILD
    medoids = [int(np.argmin(distances.sum(axis=1)))]
    current = distances[:, medoids[0]].copy()
    while len(medoids) < k:
        gains = np.maximum(current[:, None] - distances, 0.0).sum(axis=0)
        gains[medoids] = -np.inf
        chosen = int(np.argmax(gains))
        medoids.append(chosen)
        current = np.minimum(current, distances[:, chosen])
    medoids = np.array(medoids)

    # SWAP
    iterations = 0
    cost = current.sum()
    tolerance = 1e-12 * max(cost, 1.0)
    while iterations < max_iter:
        to_medoids = distances[:, medoids]
        order = np.argsort(to_medoids, axis=1)
        nearest = order[:, 0]
        first = to_medoids[np.arange(n), nearest]
        second = to_medoids[np.arange(n), order[:, 1]]

        best_cost, best_swap = cost, None
        for slot in range(k):
            without = np.where(nearest == slot, second, first)
            candidate_costs = np.minimum(distances, without[:, None]).sum(axis=0)
            candidate_costs[medoids] = np.inf
            candidate = int(np.argmin(candidate_costs))
            if candidate_costs[candidate] < best_cost - tolerance:
                best_cost, best_swap = candidate_costs[candidate], (slot, candidate)

        if best_swap is None:
            break
        medoids[best_swap[0]] = best_swap[1]
        cost = best_cost
        iterations += 1

    nearest, dist = _assign(distances, medoids)
    partition = Partition.from_labels(nearest, classes=classes)
    # reorder medoids to match compacted labels
    _, first_seen = np.unique(nearest, return_index=True)
    ordered = medoids[np.unique(nearest)[np.argsort(first_seen)]]

    return KMedoidsResult(
        partition=partition,
        medoids=ordered,
        objective=float(dist.sum()),
        iterations=iterations,
        seed=seed,
    )
