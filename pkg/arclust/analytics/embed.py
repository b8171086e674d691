"""
Classical multidimensional scaling
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .core import DataError
from .dissim import DissimMatrix

logger = logging.getLogger(__name__)

# Eigenvalues at or below this fraction of the largest one count as zero
EIGEN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Embedding:
    """
    Coordinates recovered from a dissimilarity matrix

    Attributes:
        coords: n x d_eff coordinates (d_eff <= requested_dim)
        eigenvalues: Full spectrum of the double-centered matrix, descending
        negative_mass: Share of |eigenvalue| mass on negative eigenvalues
        requested_dim: Dimension asked for
        ids: Record identifiers
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    negative_mass: float
    requested_dim: int
    ids: Optional[Tuple[str, ...]] = None

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def metadata(self) -> Dict[str, Any]:
        return {
            "requested_dim": self.requested_dim,
            "effective_dim": self.dim,
            "negative_mass": self.negative_mass,
            "eigenvalues": self.eigenvalues.tolist(),
        }


def double_center(squared: np.ndarray) -> np.ndarray:
    """-1/2 J A J with J the centering matrix"""
    row_means = squared.mean(axis=1, keepdims=True)
    col_means = squared.mean(axis=0, keepdims=True)
    grand_mean = squared.mean()
    centered = -0.5 * (squared - row_means - col_means + grand_mean)
    # restore exact symmetry lost to rounding
    return 0.5 * (centered + centered.T)


def classical_mds(m: DissimMatrix, d_prime: int) -> Embedding:
    """
    Embed a (prepared) dissimilarity matrix into d_prime dimensions

    Columns are eigenvectors of the double-centered squared matrix scaled
    by the square root of their eigenvalue, ordered by descending
    eigenvalue. Only eigenvalues above EIGEN_TOLERANCE times the largest
    are used, so fewer than d_prime columns come back when the matrix has
    too few positive eigenvalues. Each column's largest-magnitude entry
    is made positive.

    Args:
        m: Dissimilarity matrix with non-negative entries
        d_prime: Target dimension, 1 <= d_prime <= n - 1

    Returns:
        Embedding
    """
    n = m.n
    if n < 2:
        raise DataError("MDS needs at least two records")
    if d_prime < 1:
        raise ValueError(f"d_prime must be >= 1, got {d_prime}")
    if d_prime > n - 1:
        raise ValueError(f"d_prime must be <= n - 1 = {n - 1}, got {d_prime}")
    if np.any(m.values < 0):
        raise DataError("MDS needs non-negative dissimilarities; prepare the matrix first")

    centered = double_center(m.values**2)
    eigenvalues, eigenvectors = np.linalg.eigh(centered)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    largest = eigenvalues[0]
    if largest <= 0:
        raise DataError("Double-centered matrix has no positive eigenvalue")
    positive = eigenvalues > EIGEN_TOLERANCE * largest
    keep = min(d_prime, int(positive.sum()))

    vectors = eigenvectors[:, :keep]
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(keep)])
    signs[signs == 0] = 1.0
    coords = vectors * signs * np.sqrt(eigenvalues[:keep])

    total = np.abs(eigenvalues).sum()
    negative_mass = float(np.abs(eigenvalues[eigenvalues < 0]).sum() / total)

    if keep < d_prime:
        logger.warning(
            f"Only {keep} positive eigenvalues; embedding has {keep} of {d_prime} requested dimensions"
        )
    if negative_mass > 0.05:
        logger.warning(f"Non-Euclidean dissimilarity: negative eigenvalue mass {negative_mass:.3f}")

    return Embedding(
        coords=coords,
        eigenvalues=eigenvalues,
        negative_mass=negative_mass,
        requested_dim=d_prime,
        ids=m.ids,
    )
