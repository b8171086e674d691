"""
Attraction-repulsion dissimilarities and their pairwise matrices
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .core import DataError, Dataset, DissimParams, Family

logger = logging.getLogger(__name__)


def _as_vector(values: Any, name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(vector)):
        raise DataError(f"{name} contains NaN or infinite values")
    return vector


def _check_pair(x1, s1, x2, s2, params: DissimParams):
    x1, x2 = _as_vector(x1, "x1"), _as_vector(x2, "x2")
    s1, s2 = _as_vector(s1, "s1"), _as_vector(s2, "s2")
    if x1.shape != x2.shape:
        raise DataError(f"x1 and x2 differ in length: {x1.shape} vs {x2.shape}")
    if s1.shape != s2.shape:
        raise DataError(f"s1 and s2 differ in length: {s1.shape} vs {s2.shape}")
    params.check_dimension(s1.shape[0])
    return x1, s1, x2, s2


def _delta1_values(dist2, cross, u_total):
    return u_total + cross + dist2


def _delta2_values(dist2, ds2, u, v):
    return (1.0 + u * np.exp(-v * ds2)) * dist2


def _delta3_values(dist2, ds2, u):
    return dist2 - u * ds2


def _delta4_values(dist, cross, u, v, w):
    modulation = np.sign(cross) * u * (1.0 - np.exp(-v * cross**2)) * np.exp(-w * dist)
    return (1.0 + modulation) * dist


def delta1(x1, s1, x2, s2, params: DissimParams) -> float:
    """
    Bilinear dissimilarity: 1'U1 + s1'V s2 + ||x1 - x2||^2

    Can be negative; not a metric.
    """
    x1, s1, x2, s2 = _check_pair(x1, s1, x2, s2, params)
    dist2 = float(np.sum((x1 - x2) ** 2))
    return float(
        _delta1_values(dist2, s1 @ params.v_matrix @ s2, params.u_matrix.sum())
    )


def delta2(x1, s1, x2, s2, params: DissimParams) -> float:
    """Repulsion that fades with protected-attribute distance"""
    x1, s1, x2, s2 = _check_pair(x1, s1, x2, s2, params)
    dist2 = float(np.sum((x1 - x2) ** 2))
    ds2 = float(np.sum((s1 - s2) ** 2))
    return float(_delta2_values(dist2, ds2, params.u, params.v))


def delta3(x1, s1, x2, s2, params: DissimParams) -> float:
    """Attraction proportional to protected-attribute distance"""
    x1, s1, x2, s2 = _check_pair(x1, s1, x2, s2, params)
    dist2 = float(np.sum((x1 - x2) ** 2))
    ds2 = float(np.sum((s1 - s2) ** 2))
    return float(_delta3_values(dist2, ds2, params.u))


def delta4(x1, s1, x2, s2, params: DissimParams) -> float:
    """
    Local attraction/repulsion on the (unsquared) distance

    The sign of s1'V s2 decides between repulsion (+) and attraction (-);
    the effect vanishes as the points move apart.
    """
    x1, s1, x2, s2 = _check_pair(x1, s1, x2, s2, params)
    dist = float(np.sqrt(np.sum((x1 - x2) ** 2)))
    cross = float(s1 @ params.v_matrix @ s2)
    return float(_delta4_values(dist, cross, params.u, params.v, params.w))


POINTWISE = {
    Family.DELTA1: delta1,
    Family.DELTA2: delta2,
    Family.DELTA3: delta3,
    Family.DELTA4: delta4,
}


def dissim(x1, s1, x2, s2, params: DissimParams) -> float:
    """Evaluate the family selected by params on one pair"""
    return POINTWISE[params.family](x1, s1, x2, s2, params)


@dataclass(frozen=True)
class DissimMatrix:
    """
    Symmetric n x n dissimilarity matrix

    Attributes:
        values: Matrix entries (diagonal may be non-zero for delta1)
        params: Parameters that produced it (None for plain distances)
        shift_applied: Constant added by prepare_for_mds
        sqrt_applied: Whether prepare_for_mds took square roots
        ids: Record identifiers
        base: Name of the unprotected distance used ("euclidean",
            "geodesic", or a kernel description)
    """

    values: np.ndarray
    params: Optional[DissimParams] = None
    shift_applied: float = 0.0
    sqrt_applied: bool = False
    ids: Optional[Tuple[str, ...]] = None
    base: str = "euclidean"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataError(f"Dissimilarity matrix must be square, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("Dissimilarity matrix contains NaN or infinite values")
        if not np.array_equal(values, values.T):
            raise DataError("Dissimilarity matrix must be exactly symmetric")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.ids is not None:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != values.shape[0]:
                raise DataError("ids must match the matrix size")
            object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """Condensed upper-triangle entries"""
        return self.values[np.triu_indices(self.n, k=1)]

    def metadata(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "params": self.params.to_dict() if self.params is not None else None,
            "shift_applied": self.shift_applied,
            "sqrt_applied": self.sqrt_applied,
            "base": self.base,
        }


def _pair_products(s: np.ndarray, v_matrix: np.ndarray) -> np.ndarray:
    """s_i' V s_j for every unordered pair i < j, condensed"""
    rows, cols = np.triu_indices(s.shape[0], k=1)
    projected = s @ v_matrix
    return np.einsum("ij,ij->i", projected[rows], s[cols])


def family_values(
    s: np.ndarray, params: DissimParams, dist2: np.ndarray
) -> np.ndarray:
    """
    Evaluate a family on condensed pairs given the squared unprotected distances

    Args:
        s: n x p protected attributes
        params: Family parameters
        dist2: Condensed squared distances between the unprotected attributes,
            in scipy pdist order

    Returns:
        Condensed dissimilarities, same order as dist2
    """
    if params.family == Family.DELTA1:
        cross = _pair_products(s, params.v_matrix)
        return _delta1_values(dist2, cross, params.u_matrix.sum())
    if params.family == Family.DELTA2:
        ds2 = pdist(s, "sqeuclidean")
        return _delta2_values(dist2, ds2, params.u, params.v)
    if params.family == Family.DELTA3:
        ds2 = pdist(s, "sqeuclidean")
        return _delta3_values(dist2, ds2, params.u)
    cross = _pair_products(s, params.v_matrix)
    return _delta4_values(np.sqrt(dist2), cross, params.u, params.v, params.w)


def diagonal_values(s: np.ndarray, params: DissimParams) -> np.ndarray:
    """Self-dissimilarities; only delta1 has a non-zero diagonal"""
    if params.family == Family.DELTA1:
        return params.u_matrix.sum() + np.einsum("ij,ij->i", s @ params.v_matrix, s)
    return np.zeros(s.shape[0])


def assemble(
    data: Dataset,
    params: DissimParams,
    dist2: np.ndarray,
    base: str = "euclidean",
) -> DissimMatrix:
    """
    Build the full matrix from condensed squared base distances

    Each unordered pair is evaluated once and mirrored, so the result is
    exactly symmetric.
    """
    params.check_dimension(data.p)
    condensed = family_values(data.s, params, dist2)
    values = squareform(condensed, checks=False)
    np.fill_diagonal(values, diagonal_values(data.s, params))
    if not np.all(np.isfinite(values)):
        raise DataError("Dissimilarity evaluation overflowed")
    return DissimMatrix(values, params=params, ids=data.ids, base=base)


def dissim_matrix(
    data: Dataset, params: DissimParams, base: Optional[DissimMatrix] = None
) -> DissimMatrix:
    """
    Pairwise dissimilarity matrix for a dataset

    Args:
        data: Dataset
        params: Family parameters
        base: Optional distance matrix replacing ||x_i - x_j|| (for example
            geodesic distances between locations)

    Returns:
        DissimMatrix with shift 0 and no square root
    """
    if base is None:
        dist2 = pdist(data.x, "sqeuclidean")
        name = "euclidean"
    else:
        if base.n != data.n:
            raise DataError(f"Base distances cover {base.n} records, data has {data.n}")
        dist2 = base.off_diagonal() ** 2
        name = base.base

    matrix = assemble(data, params, dist2, base=name)
    logger.debug(f"Computed {params.label()} matrix for {data.n} records")
    return matrix


def euclidean_matrix(data: Dataset) -> DissimMatrix:
    """Plain Euclidean distances between the unprotected attributes"""
    values = squareform(pdist(data.x, "euclidean"))
    return DissimMatrix(values, ids=data.ids)


def default_epsilon(values: np.ndarray) -> float:
    """1e-8 times the value range, floored at 1e-12"""
    spread = float(values.max() - values.min()) if values.size else 0.0
    return max(1e-8 * spread, 1e-12)


def prepare_for_mds(m: DissimMatrix, epsilon: Optional[float] = None) -> DissimMatrix:
    """
    Make a dissimilarity matrix usable for classical MDS

    When the smallest entry is <= 0, every entry (diagonal included) is
    shifted by |min| + epsilon. The minimum runs over the off-diagonal
    entries, plus the diagonal when it is not identically zero. For the squared families
    (delta1, delta2, delta3) square roots are then taken; delta4 and plain
    distances are already on a distance scale.

    Args:
        m: Dissimilarity matrix
        epsilon: Positive margin; defaults to default_epsilon of the entries

    Returns:
        New DissimMatrix recording shift_applied and sqrt_applied
    """
    if epsilon is not None and epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")

    values = np.array(m.values)
    shift = 0.0
    if m.n > 1:
        minimum = float(m.off_diagonal().min())
        diagonal = np.diag(values)
        # a non-zero diagonal (delta1) must survive the square root too
        if np.any(diagonal != 0):
            minimum = min(minimum, float(diagonal.min()))
        if minimum <= 0:
            if epsilon is None:
                epsilon = default_epsilon(values)
            shift = abs(minimum) + epsilon
            values = values + shift
            logger.debug(f"Shifted dissimilarities by {shift:.6g}")

    take_sqrt = m.params is not None and m.params.family in (
        Family.DELTA1,
        Family.DELTA2,
        Family.DELTA3,
    )
    if take_sqrt:
        if np.any(values < 0):
            raise DataError(
                "Negative entries remain after shifting; cannot take square roots"
            )
        values = np.sqrt(values)

    return DissimMatrix(
        values,
        params=m.params,
        shift_applied=m.shift_applied + shift,
        sqrt_applied=m.sqrt_applied or take_sqrt,
        ids=m.ids,
        base=m.base,
    )
