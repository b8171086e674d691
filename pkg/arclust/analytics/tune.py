"""
Parameter tuning: evaluate a grid of dissimilarity parameters for each
clustering method and number of clusters, then pick the fairest setting
whose silhouette clears a threshold
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from src.utils.helpers import parse_matrix

from ..method_registry import METHODS, MethodContext, execute_method, needs_embedding
from .core import (
    INTERACTION_PRESETS,
    Dataset,
    DissimParams,
    Family,
    build_interaction,
)
from .dissim import DissimMatrix, euclidean_matrix
from .kernelize import KernelSpec
from .metrics import silhouette, unfairness

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridCell:
    """
    Outcome of one (method, k, parameter) evaluation

    Attributes:
        method: Clustering method id
        k: Number of clusters
        param_index: Position of the parameter in the grid (-1 for the baseline)
        params: Dissimilarity parameters
        unfairness: Unfairness of the partition (None on failure)
        avg_silhouette: Average silhouette on the evaluation distances
        per_class_silhouette: Silhouette averaged per protected class
        embedded_silhouette: Silhouette in the MDS embedding (partitional methods)
        embedded_per_class_silhouette: Embedded silhouette per protected class
        seed: Seed used
        success: Whether the evaluation completed
        error: Failure message
        baseline: Whether this is the unperturbed reference
    """

    method: str
    k: int
    param_index: int
    params: DissimParams
    unfairness: Optional[float] = None
    avg_silhouette: Optional[float] = None
    per_class_silhouette: Dict[str, float] = field(default_factory=dict)
    embedded_silhouette: Optional[float] = None
    embedded_per_class_silhouette: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    success: bool = True
    error: Optional[str] = None
    baseline: bool = False

    def to_row(self) -> Dict[str, Any]:
        row = {
            "method": self.method,
            "k": self.k,
            "param_index": self.param_index,
            "baseline": self.baseline,
            "params": self.params.label(),
            "unfairness": self.unfairness,
            "avg_silhouette": self.avg_silhouette,
            "embedded_silhouette": self.embedded_silhouette,
            "seed": self.seed,
            "success": self.success,
            "error": self.error or "",
        }
        for name, value in sorted(self.per_class_silhouette.items()):
            row[f"silhouette[{name}]"] = value
        for name, value in sorted(self.embedded_per_class_silhouette.items()):
            row[f"embedded_silhouette[{name}]"] = value
        return row


@dataclass(frozen=True)
class TuneResult:
    """
    Attributes:
        family: Dissimilarity family tuned
        tau: Silhouette threshold
        grid: Parameters in grid order
        cells: Every evaluated cell, in grid order
        best: Selected cell per (method, k); None when no cell is feasible
        baselines: Unperturbed cell per (method, k)
    """

    family: Family
    tau: float
    grid: Tuple[DissimParams, ...]
    cells: Tuple[GridCell, ...]
    best: Dict[Tuple[str, int], Optional[GridCell]]
    baselines: Dict[Tuple[str, int], GridCell] = field(default_factory=dict)

    def infeasible(self) -> List[Tuple[str, int]]:
        return [key for key, cell in self.best.items() if cell is None]

    def summary_rows(self) -> List[Dict[str, Any]]:
        """One row per (method, k): selected parameters next to the baseline"""
        rows = []
        for (method, k), cell in self.best.items():
            reference = self.baselines.get((method, k))
            rows.append(
                {
                    "method": method,
                    "k": k,
                    "feasible": cell is not None,
                    "best_params": cell.params.label() if cell else "",
                    "best_param_index": cell.param_index if cell else None,
                    "unfairness": cell.unfairness if cell else None,
                    "avg_silhouette": cell.avg_silhouette if cell else None,
                    "baseline_unfairness": reference.unfairness if reference else None,
                    "baseline_silhouette": reference.avg_silhouette if reference else None,
                }
            )
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.value,
            "tau": self.tau,
            "grid": [params.to_dict() for params in self.grid],
            "best": [
                {
                    "method": method,
                    "k": k,
                    "param_index": cell.param_index if cell else None,
                    "params": cell.params.to_dict() if cell else None,
                    "unfairness": cell.unfairness if cell else None,
                    "avg_silhouette": cell.avg_silhouette if cell else None,
                }
                for (method, k), cell in self.best.items()
            ],
            "infeasible": [{"method": m, "k": k} for m, k in self.infeasible()],
            "summary": self.summary_rows(),
        }


def select_best(cells: Sequence[GridCell], tau: float) -> Optional[GridCell]:
    """
    Lowest-unfairness cell among those with silhouette >= tau

    Failed and baseline cells never qualify; ties go to the lowest
    parameter index.
    """
    feasible = [
        cell
        for cell in cells
        if cell.success
        and not cell.baseline
        and cell.avg_silhouette is not None
        and cell.avg_silhouette >= tau
    ]
    if not feasible:
        return None
    return min(feasible, key=lambda cell: (cell.unfairness, cell.param_index))


def resolve_matrix(text: Union[str, np.ndarray], p: int, interaction: bool = False) -> np.ndarray:
    """
    Turn a matrix given as text, preset name or array into a symmetric p x p matrix

    A single number c stands for c times the identity.
    """
    if isinstance(text, str) and text.strip() in INTERACTION_PRESETS:
        return build_interaction(text.strip()).symmetric_v()
    matrix = parse_matrix(text) if isinstance(text, str) else np.asarray(text, dtype=float)
    if matrix.shape == (1, 1) and p > 1:
        matrix = matrix[0, 0] * np.eye(p)
    if matrix.shape != (p, p):
        raise ValueError(f"Matrix must be {p}x{p}, got {matrix.shape}")
    if interaction and not np.array_equal(matrix, matrix.T):
        return 0.5 * (matrix + matrix.T)
    return matrix


def _interaction_grid(grid: Dict[str, Any], p: int) -> List[np.ndarray]:
    if grid.get("v_tilde"):
        scales = grid.get("v0") or [1.0]
        return [
            build_interaction(
                vt if vt in INTERACTION_PRESETS else parse_matrix(vt), v0
            ).symmetric_v()
            for v0, vt in itertools.product(scales, grid["v_tilde"])
        ]
    if grid.get("v_matrix"):
        return [resolve_matrix(text, p, interaction=True) for text in grid["v_matrix"]]
    raise ValueError("Grid needs 'v_tilde' (with 'v0') or 'v_matrix'")


def build_grid(family: Union[str, Family], grid: Dict[str, Any], p: int) -> List[DissimParams]:
    """
    Expand per-parameter value lists into the Cartesian grid of DissimParams

    Keys: u, v, w (scalar lists), u_matrix, v_matrix (matrix texts), v0 and
    v_tilde (interaction scales and guideline matrices or preset names).

    Args:
        family: Dissimilarity family
        grid: Value lists per parameter
        p: Number of protected attributes

    Returns:
        Parameters in grid order (last key varies fastest)
    """
    family = Family(family)

    def values(name: str) -> List[float]:
        items = grid.get(name) or []
        if not items:
            raise ValueError(f"{family.value} grid needs values for '{name}'")
        return list(items)

    if family == Family.DELTA1:
        u_matrices = [resolve_matrix(t, p) for t in (grid.get("u_matrix") or ["0"])]
        v_matrices = _interaction_grid(grid, p)
        params = [DissimParams.delta1(u, v) for u, v in itertools.product(u_matrices, v_matrices)]
    elif family == Family.DELTA2:
        params = [DissimParams.delta2(u, v) for u, v in itertools.product(values("u"), values("v"))]
    elif family == Family.DELTA3:
        params = [DissimParams.delta3(u) for u in values("u")]
    else:
        v_matrices = _interaction_grid(grid, p)
        params = [
            DissimParams.delta4(u, v, w, vm)
            for u, v, w, vm in itertools.product(values("u"), values("v"), values("w"), v_matrices)
        ]

    logger.info(f"Built {family.value} grid with {len(params)} parameter settings")
    return params


def _embedded_distances(coords: np.ndarray, ids) -> DissimMatrix:
    return DissimMatrix(squareform(pdist(coords)), ids=ids)


def _evaluate_parameter(
    index: int,
    params: DissimParams,
    data: Dataset,
    methods: Sequence[str],
    ks: Sequence[int],
    distances: DissimMatrix,
    settings: Dict[str, Any],
    baseline: bool = False,
) -> List[GridCell]:
    context = MethodContext(
        data=data,
        params=params,
        kernel=settings["kernel"],
        base=settings["base"],
        d_prime=settings["d_prime"],
        epsilon=settings["epsilon"],
        seed=settings["seed"],
    )
    class_counts, _ = data.class_matrix()
    record_classes = data.record_classes()

    cells = []
    for method in methods:
        method_params = {"restarts": settings["restarts"]} if method == "kmeans_mds" else {}
        for k in ks:
            envelope = execute_method(method, context, k, method_params)
            if not envelope["success"]:
                cells.append(
                    GridCell(method, k, index, params, seed=settings["seed"], success=False,
                             error=envelope["error"], baseline=baseline)
                )
                continue

            output = envelope["output"]
            try:
                result = silhouette(distances, output.partition, class_labels=record_classes)
                embedded = None
                if needs_embedding(method):
                    embedded = silhouette(
                        _embedded_distances(output.coords, data.ids),
                        output.partition,
                        class_labels=record_classes,
                    )
                cells.append(
                    GridCell(
                        method,
                        k,
                        index,
                        params,
                        unfairness=unfairness(output.partition, class_counts),
                        avg_silhouette=result.average,
                        per_class_silhouette=result.per_class,
                        embedded_silhouette=embedded.average if embedded else None,
                        embedded_per_class_silhouette=embedded.per_class if embedded else {},
                        seed=settings["seed"],
                        baseline=baseline,
                    )
                )
            except ValueError as e:
                logger.error(f"Metrics failed for {method} k={k} {params.label()}: {e}")
                cells.append(
                    GridCell(method, k, index, params, seed=settings["seed"], success=False,
                             error=str(e), baseline=baseline)
                )

    logger.info(f"Evaluated parameter {index}: {params.label()}")
    return cells


def tune(
    data: Dataset,
    methods: Sequence[str],
    grid: Sequence[DissimParams],
    k: Union[int, Sequence[int]],
    tau: float = 0.0,
    seed: int = 0,
    distances: Optional[DissimMatrix] = None,
    kernel: Optional[KernelSpec] = None,
    base: Optional[DissimMatrix] = None,
    d_prime: Optional[int] = None,
    epsilon: Optional[float] = None,
    restarts: int = 20,
    n_jobs: int = 1,
    baseline: bool = True,
) -> TuneResult:
    """
    Evaluate every (method, k, parameter) cell and select the best parameter
    per (method, k)

    Silhouettes are always measured on `distances` (by default Euclidean on
    x, or `base` when given), never on the perturbed dissimilarities.

    Args:
        data: Dataset
        methods: Registered method ids
        grid: Parameters to evaluate, all of one family
        k: Number of clusters or a list of them
        tau: Silhouette threshold
        seed: Seed for randomized methods
        distances: Evaluation distances
        kernel: Optional kernel on x
        base: Optional base distances replacing ||x_i - x_j||
        d_prime: Embedding dimension
        epsilon: Shift margin
        restarts: k-means restarts
        n_jobs: Parallel workers over parameter settings
        baseline: Also evaluate the unperturbed setting

    Returns:
        TuneResult
    """
    if not grid:
        raise ValueError("Parameter grid is empty")
    if not -1.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [-1, 1], got {tau}")
    families = {params.family for params in grid}
    if len(families) != 1:
        raise ValueError(f"Grid mixes families: {sorted(f.value for f in families)}")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"Unknown methods: {unknown}")
    if n_jobs < 1:
        raise ValueError("n_jobs must be >= 1")

    ks = [k] if isinstance(k, int) else list(k)
    if distances is None:
        distances = base if base is not None else euclidean_matrix(data)

    settings = {
        "kernel": kernel,
        "base": base,
        "d_prime": d_prime,
        "epsilon": epsilon,
        "seed": seed,
        "restarts": restarts,
    }
    logger.info(
        f"Tuning {len(grid)} settings x {len(methods)} methods x {len(ks)} values of k "
        f"(tau={tau}, n_jobs={n_jobs})"
    )

    def evaluate(item):
        index, params = item
        return _evaluate_parameter(index, params, data, methods, ks, distances, settings)

    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        per_param = list(pool.map(evaluate, enumerate(grid)))
    cells = [cell for group in per_param for cell in group]

    best: Dict[Tuple[str, int], Optional[GridCell]] = {}
    for method in methods:
        for kk in ks:
            group = [c for c in cells if c.method == method and c.k == kk]
            best[(method, kk)] = select_best(group, tau)
            if best[(method, kk)] is None:
                logger.warning(f"No parameter reaches silhouette >= {tau} for {method} k={kk}")

    baselines: Dict[Tuple[str, int], GridCell] = {}
    if baseline:
        reference = _evaluate_parameter(
            -1, grid[0].unperturbed(), data, methods, ks, distances, settings, baseline=True
        )
        baselines = {(cell.method, cell.k): cell for cell in reference}

    return TuneResult(
        family=grid[0].family,
        tau=tau,
        grid=tuple(grid),
        cells=tuple(cells),
        best=best,
        baselines=baselines,
    )
