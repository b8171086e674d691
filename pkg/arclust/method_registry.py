"""
Clustering method registry

Maps method ids to their metadata and runner functions. Every runner
takes a MethodContext, which lazily computes and caches the dissimilarity
matrix, its MDS embedding and dendrograms for one parameter setting.
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import partial
from typing import Any, Dict, List, Optional

import numpy as np

from .analytics.core import Dataset, DissimParams, Partition
from .analytics.dissim import DissimMatrix, dissim_matrix, prepare_for_mds
from .analytics.embed import Embedding, classical_mds
from .analytics.flatcluster import kmeans, kmedoids
from .analytics.hier import Dendrogram, charged_ward, cut, linkage
from .analytics.kernelize import KernelSpec, kernel_dissim_matrix

logger = logging.getLogger(__name__)


@dataclass
class MethodContext:
    """
    Inputs shared by every method and k for one parameter setting

    Attributes:
        data: Dataset
        params: Dissimilarity parameters
        kernel: Optional kernel replacing the Euclidean distance on x
        base: Optional base distances replacing ||x_i - x_j|| (geodesic)
        d_prime: Embedding dimension (defaults to min(d, n - 1))
        epsilon: Margin for shifting non-positive dissimilarities
        seed: Random seed for randomized methods
    """

    data: Dataset
    params: DissimParams
    kernel: Optional[KernelSpec] = None
    base: Optional[DissimMatrix] = None
    d_prime: Optional[int] = None
    epsilon: Optional[float] = None
    seed: int = 0
    _matrix: Optional[DissimMatrix] = field(default=None, repr=False)
    _embedding: Optional[Embedding] = field(default=None, repr=False)
    _dendrograms: Dict[str, Dendrogram] = field(default_factory=dict, repr=False)

    def matrix(self) -> DissimMatrix:
        if self._matrix is None:
            if self.kernel is not None:
                self._matrix = kernel_dissim_matrix(self.data, self.params, self.kernel)
            else:
                self._matrix = dissim_matrix(self.data, self.params, base=self.base)
        return self._matrix

    def embedding(self) -> Embedding:
        if self._embedding is None:
            dim = self.d_prime or min(self.data.d, self.data.n - 1)
            prepared = prepare_for_mds(self.matrix(), epsilon=self.epsilon)
            self._embedding = classical_mds(prepared, dim)
        return self._embedding

    def dendrogram(self, method: str) -> Dendrogram:
        if method not in self._dendrograms:
            if method == "charged_ward":
                if self.kernel is not None or self.base is not None:
                    raise ValueError(
                        "charged_ward works on Euclidean attributes; drop the kernel or base distance"
                    )
                self._dendrograms[method] = charged_ward(
                    self.data, self.params, epsilon=self.epsilon
                )
            else:
                self._dendrograms[method] = linkage(self.matrix(), method)
        return self._dendrograms[method]

    def classes(self) -> np.ndarray:
        return self.data.class_matrix()[0]


@dataclass(frozen=True)
class MethodOutput:
    """
    Attributes:
        partition: Resulting partition
        coords: Embedding coordinates used (partitional methods)
        objective: Method objective (within-SS, medoid distance sum)
        details: Extra serializable information (centers, medoids, seed)
    """

    partition: Partition
    coords: Optional[np.ndarray] = None
    objective: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class MethodParameter:
    """
    Integer setting a method accepts besides k

    Attributes:
        default: Value used when the caller leaves it out
        minimum: Smallest accepted value
    """

    default: int
    minimum: int

    def resolve(self, method_id: str, name: str, value: Any) -> int:
        # bool is an int subclass
        if isinstance(value, (bool, np.bool_)):
            raise ValueError(f"{method_id}: {name} must be an integer, got {value!r}")
        if isinstance(value, str):
            value = value.strip()
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ValueError(f"{method_id}: {name} must be an integer, got {value!r}") from None
        if not number.is_integer():
            raise ValueError(f"{method_id}: {name} must be an integer, got {value!r}")
        if number < self.minimum:
            raise ValueError(f"{method_id}: {name} must be >= {self.minimum}, got {int(number)}")
        return int(number)


def _run_kmeans_mds(context: MethodContext, k: int, restarts: int = 20) -> MethodOutput:
    coords = context.embedding().coords
    result = kmeans(coords, k, restarts=restarts, seed=context.seed, classes=context.classes())
    return MethodOutput(
        partition=result.partition,
        coords=coords,
        objective=result.within_ss,
        details={
            "centers": result.centers.tolist(),
            "iterations": result.iterations,
            "seed": result.seed,
            "restarts": result.restarts,
        },
    )


def _run_kmedoids_mds(context: MethodContext, k: int) -> MethodOutput:
    coords = context.embedding().coords
    result = kmedoids(coords, k, seed=context.seed, classes=context.classes())
    return MethodOutput(
        partition=result.partition,
        coords=coords,
        objective=result.objective,
        details={
            "medoids": [context.data.ids[i] for i in result.medoids],
            "iterations": result.iterations,
            "seed": result.seed,
        },
    )


def _run_hierarchical(context: MethodContext, k: int, method: str) -> MethodOutput:
    dendrogram = context.dendrogram(method)
    partition = cut(dendrogram, k, classes=context.classes())
    return MethodOutput(partition=partition, details={"method": method})


# Method registry mapping method IDs to their metadata and functions
METHODS: Dict[str, Dict[str, Any]] = {
    "kmeans_mds": {
        "label": "k-means on the MDS embedding",
        "description": "Lloyd k-means with k-means++ seeding on classical MDS coordinates",
        "fn": _run_kmeans_mds,
        "category": "partitional",
        "parameters": {
            "restarts": MethodParameter(default=20, minimum=1),
        },
    },
    "kmedoids_mds": {
        "label": "k-medoids on the MDS embedding",
        "description": "PAM (BUILD + SWAP) on classical MDS coordinates",
        "fn": _run_kmedoids_mds,
        "category": "partitional",
        "parameters": {},
    },
    "single": {
        "label": "Single linkage",
        "description": "Agglomerative clustering merging the closest pair of members",
        "fn": partial(_run_hierarchical, method="single"),
        "category": "hierarchical",
        "parameters": {},
    },
    "complete": {
        "label": "Complete linkage",
        "description": "Agglomerative clustering on the farthest pair of members",
        "fn": partial(_run_hierarchical, method="complete"),
        "category": "hierarchical",
        "parameters": {},
    },
    "average": {
        "label": "Average linkage",
        "description": "Agglomerative clustering on the mean member dissimilarity",
        "fn": partial(_run_hierarchical, method="average"),
        "category": "hierarchical",
        "parameters": {},
    },
    "charged_ward": {
        "label": "Charged Ward",
        "description": "Ward-style agglomeration with recursively updated charged dissimilarities",
        "fn": partial(_run_hierarchical, method="charged_ward"),
        "category": "hierarchical",
        "parameters": {},
    },
}


def get_method_list() -> List[Dict[str, Any]]:
    """
    Registered methods in registry order

    Returns:
        List of dicts with id, label, category, description and parameter defaults
    """
    return [
        {
            "id": method_id,
            "label": config["label"],
            "category": config["category"],
            "description": config["description"],
            "parameters": {name: declared.default for name, declared in config["parameters"].items()},
        }
        for method_id, config in METHODS.items()
    ]


def needs_embedding(method_id: str) -> bool:
    return METHODS[method_id]["category"] == "partitional"


def run_method(
    method_id: str,
    context: MethodContext,
    k: int,
    parameters: Optional[Dict[str, Any]] = None,
) -> MethodOutput:
    """
    Run a registered method, raising on failure

    Args:
        method_id: Registered method
        context: Shared inputs for one parameter setting
        k: Number of clusters
        parameters: Optional method parameters (validated against the registry)

    Returns:
        MethodOutput
    """
    if method_id not in METHODS:
        raise ValueError(
            f"Unknown method ID: {method_id}. Available: {', '.join(METHODS)}"
        )
    resolved = _resolve_parameters(method_id, parameters or {})
    logger.debug(f"Running {method_id} k={k} on {context.params.label()}")
    return METHODS[method_id]["fn"](context, k, **resolved)


def execute_method(
    method_id: str,
    context: MethodContext,
    k: int,
    parameters: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Run a registered method and wrap the outcome in a result envelope

    Failures are logged and reported in the envelope instead of raised.

    Returns:
        Dict with method, k, parameters_used, output, success, error, timestamp
    """
    try:
        output = run_method(method_id, context, k, parameters)
        return {
            "method": method_id,
            "k": k,
            "parameters_used": _resolve_parameters(method_id, parameters or {}),
            "output": output,
            "success": True,
            "timestamp": _get_current_timestamp(),
        }
    except Exception as e:
        logger.error(f"Error executing {method_id} (k={k}, {context.params.label()}): {str(e)}")
        return {
            "method": method_id,
            "k": k,
            "output": None,
            "success": False,
            "error": str(e),
            "timestamp": _get_current_timestamp(),
        }


def _resolve_parameters(method_id: str, parameters: Dict[str, Any]) -> Dict[str, int]:
    """Every declared parameter of a method, with defaults filled in"""
    accepted = METHODS[method_id]["parameters"]
    unknown = sorted(set(parameters) - set(accepted))
    if unknown:
        allowed = ", ".join(accepted) or "none"
        raise ValueError(f"Unknown parameters for {method_id}: {unknown} (accepted: {allowed})")
    return {
        name: declared.resolve(method_id, name, parameters.get(name, declared.default))
        for name, declared in accepted.items()
    }


def _get_current_timestamp() -> str:
    """Get current timestamp in ISO format"""
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
