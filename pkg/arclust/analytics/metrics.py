"""
Partition quality and fairness metrics
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform
from sklearn.metrics import silhouette_samples

from .core import DataError, Dataset, Partition, cluster_proportions
from .dissim import DissimMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SilhouetteResult:
    values: np.ndarray
    average: float
    per_class: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricsReport:
    """
    Quality and fairness summary of one partition

    Attributes:
        k: Number of clusters
        avg_silhouette: Average silhouette on the evaluation distances
        per_class_silhouette: Average silhouette per protected class
        unfairness: Mean distance of cluster class proportions to the global ones
        balance: Binary balance (None unless exactly two classes)
        proportions: K x q class proportions
        class_names: Names of the q classes
        objectives: Optional k-means / k-median objectives on coordinates
        sizes: Records per cluster
        embedded_silhouette: Average silhouette in the MDS embedding, if any
        embedded_per_class_silhouette: Per-class silhouette in the embedding
    """

    k: int
    avg_silhouette: float
    per_class_silhouette: Dict[str, float]
    unfairness: float
    balance: Optional[float]
    proportions: np.ndarray
    class_names: Sequence[str]
    objectives: Dict[str, float] = field(default_factory=dict)
    sizes: Sequence[int] = ()
    embedded_silhouette: Optional[float] = None
    embedded_per_class_silhouette: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "avg_silhouette": self.avg_silhouette,
            "per_class_silhouette": dict(self.per_class_silhouette),
            "unfairness": self.unfairness,
            "balance": self.balance,
            "class_names": list(self.class_names),
            "proportions": self.proportions.tolist(),
            "objectives": dict(self.objectives),
            "sizes": [int(size) for size in self.sizes],
            "embedded_silhouette": self.embedded_silhouette,
            "embedded_per_class_silhouette": dict(self.embedded_per_class_silhouette),
        }


def silhouette(
    distances: DissimMatrix,
    partition: Partition,
    class_labels: Optional[Sequence[str]] = None,
) -> SilhouetteResult:
    """
    Silhouette of every record under a partition

    Singletons score 0; with K == n every score is 0.

    Args:
        distances: Non-negative evaluation distances with zero diagonal
        partition: Partition with K >= 2
        class_labels: Optional class name per record for per-class averages

    Returns:
        SilhouetteResult
    """
    if distances.n != partition.n:
        raise DataError(f"Distances cover {distances.n} records, partition has {partition.n}")
    if partition.k < 2:
        raise ValueError("Silhouette needs at least two clusters")
    if np.any(distances.values < 0):
        raise DataError("Silhouette needs non-negative distances")

    if partition.k == partition.n:
        values = np.zeros(partition.n)
    else:
        values = silhouette_samples(distances.values, partition.labels, metric="precomputed")

    per_class: Dict[str, float] = {}
    if class_labels is not None:
        labels = np.asarray([str(label) for label in class_labels])
        for name in sorted(set(labels)):
            per_class[name] = float(values[labels == name].mean())

    return SilhouetteResult(values=values, average=float(values.mean()), per_class=per_class)


def class_silhouette(distances: DissimMatrix, class_labels: Sequence[Any]) -> Dict[str, float]:
    """
    How well the protected classes themselves separate under `distances`

    The classes are taken as the partition and the silhouette is averaged
    per class. A perturbation that leaves the class geometry intact keeps
    these values steady.
    """
    partition = Partition.from_labels([str(label) for label in class_labels])
    return silhouette(distances, partition, class_labels=class_labels).per_class


def balance(partition: Partition, binary_class: Sequence[Any]) -> float:
    """
    Minimum over clusters of min(r/b, b/r) for a two-valued class

    A cluster holding only one class scores 0.

    Args:
        partition: Partition
        binary_class: Class value per record, exactly two distinct values

    Returns:
        Balance in [0, 1]
    """
    values = np.asarray(binary_class)
    if values.shape[0] != partition.n:
        raise DataError("binary_class must have one value per record")
    distinct = np.unique(values)
    if len(distinct) != 2:
        raise ValueError(f"balance needs exactly two classes, got {len(distinct)}")

    first = (values == distinct[0]).astype(float)
    r = np.bincount(partition.labels, weights=first, minlength=partition.k)
    b = partition.sizes() - r
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.minimum(np.where(b > 0, r / b, np.inf), np.where(r > 0, b / r, np.inf))
    ratio[(r == 0) | (b == 0)] = 0.0
    return float(np.clip(ratio.min(), 0.0, 1.0))


def unfairness(partition: Partition, class_counts: np.ndarray) -> float:
    """
    (1/K) sum_k || p_k - p_t ||

    p_k are the class proportions of cluster k and p_t the global ones.

    Args:
        partition: Partition
        class_counts: n x q non-negative membership (one-hot or counts)

    Returns:
        Unfairness (0 when every cluster mirrors the population)
    """
    counts = np.asarray(class_counts, dtype=float)
    if counts.ndim == 1:
        counts = counts.reshape(-1, 1)
    if counts.shape[0] != partition.n:
        raise DataError("class_counts must have one row per record")
    total = counts.sum(axis=0)
    if total.sum() == 0:
        raise DataError("class_counts sum to zero")

    global_proportions = total / total.sum()
    proportions = cluster_proportions(partition.labels, partition.k, counts)
    return float(np.linalg.norm(proportions - global_proportions, axis=1).mean())


def partition_objectives(coords: np.ndarray, partition: Partition) -> Dict[str, float]:
    """
    k-means (sum of squares to centroids) and k-median (sum of distances
    to the best member medoid) objectives of a partition
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        coords = coords.reshape(-1, 1)
    if coords.shape[0] != partition.n:
        raise DataError("coords must have one row per record")

    kmeans_ss = 0.0
    kmedian_sum = 0.0
    for c in range(partition.k):
        members = coords[partition.labels == c]
        kmeans_ss += float(np.sum((members - members.mean(axis=0)) ** 2))
        kmedian_sum += float(cdist(members, members).sum(axis=0).min())
    return {"kmeans_ss": kmeans_ss, "kmedian_sum": kmedian_sum}


def evaluate_partition(
    partition: Partition,
    data: Dataset,
    distances: DissimMatrix,
    coords: Optional[np.ndarray] = None,
    embedded: Optional[np.ndarray] = None,
) -> MetricsReport:
    """
    Compute every metric for a partition

    Args:
        partition: Partition
        data: Dataset providing protected classes
        distances: Evaluation distances for the silhouette
        coords: Optional coordinates for the objectives
        embedded: Optional MDS coordinates for the embedded silhouette

    Returns:
        MetricsReport
    """
    class_counts, class_names = data.class_matrix()
    record_classes = data.record_classes()

    result = silhouette(distances, partition, class_labels=record_classes)
    binary = None
    if len(class_names) == 2 and len(set(record_classes)) == 2:
        binary = balance(partition, record_classes)

    in_embedding = None
    if embedded is not None:
        in_embedding = silhouette(
            DissimMatrix(squareform(pdist(np.asarray(embedded, dtype=float))), ids=data.ids),
            partition,
            class_labels=record_classes,
        )

    report = MetricsReport(
        k=partition.k,
        avg_silhouette=result.average,
        per_class_silhouette=result.per_class,
        unfairness=unfairness(partition, class_counts),
        balance=binary,
        proportions=cluster_proportions(partition.labels, partition.k, class_counts),
        class_names=class_names,
        objectives=partition_objectives(coords, partition) if coords is not None else {},
        sizes=tuple(int(size) for size in partition.sizes()),
        embedded_silhouette=in_embedding.average if in_embedding else None,
        embedded_per_class_silhouette=in_embedding.per_class if in_embedding else {},
    )
    logger.debug(
        f"k={report.k} silhouette={report.avg_silhouette:.4f} unfairness={report.unfairness:.4f}"
    )
    return report
