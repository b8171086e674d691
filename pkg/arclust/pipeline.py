"""
Single-run pipeline: dissimilarity, optional embedding, clustering, metrics
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .analytics.core import Dataset, DissimParams, Partition
from .analytics.dissim import DissimMatrix, euclidean_matrix
from .analytics.embed import Embedding
from .analytics.hier import Dendrogram
from .analytics.kernelize import KernelSpec
from .analytics.metrics import MetricsReport, evaluate_partition
from .method_registry import MethodContext, needs_embedding, run_method

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterRun:
    """
    Everything produced by one pipeline run

    Attributes:
        method: Method id
        k: Requested number of clusters
        params: Dissimilarity parameters
        partition: Resulting partition
        metrics: Metrics on the evaluation distances
        matrix: Dissimilarity matrix used
        embedding: MDS embedding (partitional methods)
        dendrogram: Dendrogram (hierarchical methods)
        objective: Method objective, when defined
        seed: Seed used
        details: Method-specific extras
    """

    method: str
    k: int
    params: DissimParams
    partition: Partition
    metrics: MetricsReport
    matrix: DissimMatrix
    embedding: Optional[Embedding] = None
    dendrogram: Optional[Dendrogram] = None
    objective: Optional[float] = None
    seed: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "k": self.k,
            "params": self.params.to_dict(),
            "seed": self.seed,
            "objective": self.objective,
            "labels": self.partition.labels.tolist(),
            "details": self.details,
            "metrics": self.metrics.to_dict(),
            "matrix": self.matrix.metadata(),
            "embedding": self.embedding.metadata() if self.embedding is not None else None,
        }


def fit_pipeline(
    data: Dataset,
    params: DissimParams,
    method: str,
    k: int,
    d_prime: Optional[int] = None,
    kernel: Optional[KernelSpec] = None,
    base: Optional[DissimMatrix] = None,
    distances: Optional[DissimMatrix] = None,
    seed: int = 0,
    restarts: int = 20,
    epsilon: Optional[float] = None,
) -> ClusterRun:
    """
    Run one method with one parameter setting and evaluate the result

    Args:
        data: Dataset
        params: Dissimilarity parameters
        method: Registered method id
        k: Number of clusters
        d_prime: Embedding dimension for partitional methods
        kernel: Optional kernel on x
        base: Optional base distances replacing ||x_i - x_j||
        distances: Evaluation distances (defaults to base, then Euclidean)
        seed: Random seed
        restarts: k-means restarts
        epsilon: Shift margin

    Returns:
        ClusterRun
    """
    context = MethodContext(
        data=data,
        params=params,
        kernel=kernel,
        base=base,
        d_prime=d_prime,
        epsilon=epsilon,
        seed=seed,
    )
    method_params = {"restarts": restarts} if method == "kmeans_mds" else {}
    output = run_method(method, context, k, method_params)

    if distances is None:
        distances = base if base is not None else euclidean_matrix(data)
    embedding = context.embedding() if needs_embedding(method) else None
    metrics = evaluate_partition(
        output.partition,
        data,
        distances,
        coords=np.asarray(data.x),
        embedded=embedding.coords if embedding is not None else None,
    )

    dendrogram = None if needs_embedding(method) else context.dendrogram(method)
    logger.info(
        f"{method} k={k} {params.label()}: silhouette={metrics.avg_silhouette:.4f} "
        f"unfairness={metrics.unfairness:.4f}"
    )
    return ClusterRun(
        method=method,
        k=k,
        params=params,
        partition=output.partition,
        metrics=metrics,
        matrix=context.matrix(),
        embedding=embedding,
        dendrogram=dendrogram,
        objective=output.objective,
        seed=seed,
        details=output.details,
    )
