"""
Agglomerative clustering: classical linkages and charged Ward
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .core import DataError, Dataset, DissimParams, Family, Partition
from .dissim import DissimMatrix, dissim_matrix, _delta4_values

logger = logging.getLogger(__name__)

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class Merge:
    """
    One agglomeration step

    Leaves are 0..n-1 and the cluster created at step t is n + t.
    """

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """
    Sequence of n - 1 merges over n leaves

    Attributes:
        merges: Merges in the order they happened
        n_leaves: Number of leaves
        method: Linkage or "charged_ward"
    """

    merges: Tuple[Merge, ...]
    n_leaves: int
    method: str

    def to_linkage_matrix(self) -> np.ndarray:
        """scipy-compatible (n - 1) x 4 linkage matrix"""
        return np.array(
            [[m.left, m.right, m.height, m.size] for m in self.merges], dtype=float
        ).reshape(-1, 4)

    def to_merge_table(self) -> List[Dict[str, Any]]:
        """
        Rows with signed merge indices: -(leaf + 1) for a leaf, t + 1 for
        the cluster formed at step t
        """

        def signed(node: int) -> int:
            return -(node + 1) if node < self.n_leaves else node - self.n_leaves + 1

        return [
            {
                "step": t + 1,
                "merge_1": signed(m.left),
                "merge_2": signed(m.right),
                "height": m.height,
                "size": m.size,
            }
            for t, m in enumerate(self.merges)
        ]

    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges])

    def is_monotone(self) -> bool:
        heights = self.heights()
        return bool(np.all(np.diff(heights) >= 0))


def _agglomerate(state, method: str) -> Dendrogram:
    """
    Greedy agglomeration over a dense selection matrix

    `state` exposes `selection` (n x n, mutated here), `sizes`,
    `height(a, b)` and `merge(a, b)`; the latter folds slot b into slot a
    and returns the new selection row of a. Ties are broken
    lexicographically on (slot, slot); the merged cluster keeps the
    smaller slot.
    """
    selection = state.selection
    n = selection.shape[0]
    np.fill_diagonal(selection, np.inf)

    nn_idx = np.argmin(selection, axis=1) if n > 1 else np.zeros(1, dtype=int)
    nn_val = selection[np.arange(n), nn_idx]
    active = np.ones(n, dtype=bool)
    node_ids = np.arange(n)
    merges: List[Merge] = []

    for step in range(n - 1):
        i = int(np.argmin(nn_val))
        j = int(nn_idx[i])
        a, b = (i, j) if i < j else (j, i)

        height = float(state.height(a, b))
        row = np.array(state.merge(a, b), dtype=float)
        size = int(state.sizes[a])
        merges.append(Merge(int(node_ids[a]), int(node_ids[b]), height, size))

        active[b] = False
        node_ids[a] = n + step

        row[~active] = np.inf
        row[a] = np.inf
        selection[b, :] = np.inf
        selection[:, b] = np.inf
        selection[a, :] = row
        selection[:, a] = row
        nn_val[b] = np.inf

        stale = np.flatnonzero(active & ((nn_idx == a) | (nn_idx == b)))
        stale = stale[stale != a]
        fresh = np.flatnonzero(
            active & ~np.isin(np.arange(n), stale) & (np.arange(n) != a)
        )
        if fresh.size:
            better = (row[fresh] < nn_val[fresh]) | (
                (row[fresh] == nn_val[fresh]) & (a < nn_idx[fresh])
            )
            nn_val[fresh[better]] = row[fresh[better]]
            nn_idx[fresh[better]] = a
        if stale.size:
            nn_idx[stale] = np.argmin(selection[stale], axis=1)
            nn_val[stale] = selection[stale, nn_idx[stale]]
        nn_idx[a] = int(np.argmin(row))
        nn_val[a] = row[nn_idx[a]]

    dendrogram = Dendrogram(tuple(merges), n, method)
    if not dendrogram.is_monotone():
        logger.warning(f"{method} dendrogram has height reversals")
    return dendrogram


class _LinkageState:
    """Lance-Williams updates for single, complete and average linkage"""

    def __init__(self, values: np.ndarray, method: str):
        self.selection = np.array(values, dtype=float)
        self.sizes = np.ones(values.shape[0], dtype=np.int64)
        self.method = method

    def height(self, a: int, b: int) -> float:
        return self.selection[a, b]

    def merge(self, a: int, b: int) -> np.ndarray:
        row_a, row_b = self.selection[a], self.selection[b]
        if self.method == "single":
            row = np.minimum(row_a, row_b)
        elif self.method == "complete":
            row = np.maximum(row_a, row_b)
        else:
            na, nb = self.sizes[a], self.sizes[b]
            with np.errstate(invalid="ignore"):
                row = (na * row_a + nb * row_b) / (na + nb)
        self.sizes[a] += self.sizes[b]
        self.sizes[b] = 0
        return row


def linkage(m: DissimMatrix, method: str) -> Dendrogram:
    """
    Agglomerative clustering on a dissimilarity matrix

    Negative dissimilarities are accepted; only their order matters for
    single and complete linkage.

    Args:
        m: Symmetric dissimilarity matrix (diagonal ignored)
        method: single, complete or average

    Returns:
        Dendrogram with n - 1 merges
    """
    if method not in LINKAGES:
        raise ValueError(f"Unknown linkage '{method}'. Available: {', '.join(LINKAGES)}")
    if m.n < 2:
        raise DataError("linkage needs at least two records")
    logger.debug(f"{method} linkage on {m.n} records")
    return _agglomerate(_LinkageState(m.values, method), method)


class ClusterState:
    """
    Charged Ward bookkeeping for the active clusters

    Slots 0..n-1 start as singletons; merging b into a keeps slot a.
    Between-cluster values are updated with exact recursions: a Ward-type
    recursion for delta1 and delta3, a Ward recursion on the unprotected
    term times a centroid recursion on the protected distance for delta2,
    and direct re-evaluation from the maintained means for delta4.

    Attributes:
        sizes: Cluster sizes (0 for merged-away slots)
        x_means: Mean unprotected attributes per slot
        s_means: Mean protected attributes per slot
        d2_wx: Ward distance n_i n_j / (n_i + n_j) ||xbar_i - xbar_j||^2
        d2_s: Squared distance between mean protected attributes (delta2)
        delta_w: Raw charged Ward dissimilarities
        shift: Constant added to make every starting value positive
        selection: Values the merge order is taken from (raw + shift terms)
    """

    def __init__(
        self,
        data: Dataset,
        params: DissimParams,
        shift: Optional[float] = None,
        epsilon: Optional[float] = None,
    ):
        params.check_dimension(data.p)
        n = data.n
        self.params = params
        self.sizes = np.ones(n, dtype=np.int64)
        self.x_means = np.array(data.x, dtype=float)
        self.s_means = np.array(data.s, dtype=float)
        self.d2_wx = 0.5 * squareform(pdist(self.x_means, "sqeuclidean"))
        self.d2_s = (
            squareform(pdist(self.s_means, "sqeuclidean"))
            if params.family == Family.DELTA2
            else None
        )
        self.delta_w = 0.5 * np.array(dissim_matrix(data, params).values)
        np.fill_diagonal(self.delta_w, 0.0)

        if shift is None:
            shift = self._starting_shift(epsilon)
        self.shift = float(shift)
        self.selection = self.delta_w + self.shift
        if self.shift:
            logger.info(f"charged_ward: shifting selection values by {self.shift:.6g}")

    def _starting_shift(self, epsilon: Optional[float]) -> float:
        n = self.delta_w.shape[0]
        if n < 2:
            return 0.0
        off = self.delta_w[np.triu_indices(n, k=1)]
        minimum = float(off.min())
        if minimum > 0:
            return 0.0
        if epsilon is None:
            epsilon = max(1e-8 * float(off.max() - minimum), 1e-12)
        return abs(minimum) + epsilon

    def height(self, a: int, b: int) -> float:
        return self.delta_w[a, b]

    def merge(self, a: int, b: int) -> np.ndarray:
        """
        Fold cluster b into cluster a and update every between-cluster value

        Returns:
            New selection row for slot a (entries for a and inactive slots
            are meaningless)
        """
        na, nb = self.sizes[a], self.sizes[b]
        nk = self.sizes.astype(float)
        total = na + nb + nk
        family = self.params.family

        with np.errstate(invalid="ignore", divide="ignore"):
            d2_wx = (
                (na + nk) * self.d2_wx[a] + (nb + nk) * self.d2_wx[b] - nk * self.d2_wx[a, b]
            ) / total

            if family == Family.DELTA1:
                raw = (
                    (na + nk) * self.delta_w[a] + (nb + nk) * self.delta_w[b]
                    - nk * self.d2_wx[a, b]
                ) / total
                selection = (
                    (na + nk) * self.selection[a] + (nb + nk) * self.selection[b]
                    - nk * self.d2_wx[a, b]
                ) / total
            elif family == Family.DELTA3:
                raw = (
                    (na + nk) * self.delta_w[a] + (nb + nk) * self.delta_w[b]
                    - nk * self.delta_w[a, b]
                ) / total
                selection = (
                    (na + nk) * self.selection[a] + (nb + nk) * self.selection[b]
                    - nk * self.selection[a, b]
                ) / total
            elif family == Family.DELTA2:
                pooled = na + nb
                d2_s = (
                    (na * self.d2_s[a] + nb * self.d2_s[b]) / pooled
                    - (na * nb / pooled**2) * self.d2_s[a, b]
                )
                raw = (1.0 + self.params.u * np.exp(-self.params.v * d2_s)) * d2_wx
                selection = raw + self.shift
            else:
                raw = None
                selection = None

        self.x_means[a] = (na * self.x_means[a] + nb * self.x_means[b]) / (na + nb)
        self.s_means[a] = (na * self.s_means[a] + nb * self.s_means[b]) / (na + nb)
        self.sizes[a] = na + nb
        self.sizes[b] = 0

        if family == Family.DELTA4:
            raw = self._direct_delta4(a)
            selection = raw + self.shift

        self._write_row(self.d2_wx, a, b, d2_wx)
        self._write_row(self.delta_w, a, b, raw)
        self._write_row(self.selection, a, b, selection)
        if family == Family.DELTA2:
            self._write_row(self.d2_s, a, b, d2_s)
        return selection

    def _direct_delta4(self, a: int) -> np.ndarray:
        p = self.params
        weight = self.sizes[a] * self.sizes / np.maximum(self.sizes[a] + self.sizes, 1)
        dist = np.sqrt(np.sum((self.x_means - self.x_means[a]) ** 2, axis=1))
        cross = self.s_means @ (p.v_matrix @ self.s_means[a])
        return weight * _delta4_values(dist, cross, p.u, p.v, p.w)

    def _write_row(self, matrix: np.ndarray, a: int, b: int, row: np.ndarray) -> None:
        row = np.array(row)
        row[a] = 0.0
        row[b] = np.inf
        row[self.sizes == 0] = np.inf
        matrix[a, :] = row
        matrix[:, a] = row
        matrix[b, :] = np.inf
        matrix[:, b] = np.inf
        matrix[a, a] = 0.0


def charged_ward(
    data: Dataset,
    params: DissimParams,
    shift: Optional[float] = None,
    epsilon: Optional[float] = None,
) -> Dendrogram:
    """
    Ward-style agglomeration driven by a charged dissimilarity

    Singletons start at half the point dissimilarity; merged clusters are
    updated recursively (delta1, delta2, delta3) or re-evaluated from their
    means (delta4). With zero strength this is classical Ward. Heights are
    the raw charged values; when some starting value is <= 0 a positive
    shift is carried through the recursion for the merge order only.

    Args:
        data: Dataset
        params: Family parameters
        shift: Override the automatic shift (0 disables it)
        epsilon: Margin for the automatic shift

    Returns:
        Dendrogram
    """
    if data.n < 2:
        raise DataError("charged_ward needs at least two records")
    logger.debug(f"charged_ward {params.label()} on {data.n} records")
    return _agglomerate(ClusterState(data, params, shift=shift, epsilon=epsilon), "charged_ward")


def cut(dendrogram: Dendrogram, k: int, classes: Optional[np.ndarray] = None) -> Partition:
    """
    Flat partition obtained by undoing the last k - 1 merges

    Clusters are numbered in order of their smallest leaf.

    Args:
        dendrogram: Dendrogram
        k: Number of clusters, 1 <= k <= n
        classes: Optional class membership matrix for proportions

    Returns:
        Partition
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")

    parent = np.arange(2 * n - 1)

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for t, m in enumerate(dendrogram.merges[: n - k]):
        parent[find(m.left)] = n + t
        parent[find(m.right)] = n + t

    roots = [find(leaf) for leaf in range(n)]
    return Partition.from_labels(roots, classes=classes)
