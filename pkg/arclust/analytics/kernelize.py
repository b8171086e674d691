"""
Kernelized dissimilarities: replace ||x - y|| by the feature-space distance
of a positive-definite kernel
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.spatial.distance import pdist
from sklearn.metrics.pairwise import linear_kernel, polynomial_kernel, rbf_kernel

from .core import DataError, Dataset, DissimParams
from .dissim import DissimMatrix, assemble

logger = logging.getLogger(__name__)

KERNELS = ("linear", "polynomial", "rbf", "squared_coords")

# Radicands above this (negative) value are treated as rounding noise
RADICAND_TOLERANCE = -1e-10


@dataclass(frozen=True)
class KernelSpec:
    """
    Positive-definite kernel on the unprotected attributes

    Attributes:
        kind: linear, polynomial, rbf or squared_coords
        degree: Polynomial degree
        coef: Polynomial offset, (x'y + coef)^degree
        gamma: RBF width, exp(-gamma ||x - y||^2)
    """

    kind: str
    degree: int = 2
    coef: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ValueError(f"Unknown kernel '{self.kind}'. Available: {', '.join(KERNELS)}")
        if self.kind == "polynomial" and (self.degree < 1 or self.coef < 0):
            raise ValueError("polynomial kernel needs degree >= 1 and coef >= 0")
        if self.kind == "rbf" and self.gamma <= 0:
            raise ValueError("rbf kernel needs gamma > 0")

    def gram(self, x: np.ndarray, y: Optional[np.ndarray] = None) -> np.ndarray:
        """Kernel matrix between the rows of x and y"""
        x = np.asarray(x, dtype=float)
        y = x if y is None else np.asarray(y, dtype=float)
        if self.kind == "linear":
            return linear_kernel(x, y)
        if self.kind == "squared_coords":
            return linear_kernel(x**2, y**2)
        if self.kind == "polynomial":
            return polynomial_kernel(x, y, degree=self.degree, gamma=1.0, coef0=self.coef)
        return rbf_kernel(x, y, gamma=self.gamma)

    def feature_map(self) -> Optional[Callable[[np.ndarray], np.ndarray]]:
        """Explicit finite feature map, when the kernel has a simple one"""
        if self.kind == "linear":
            return lambda x: x
        if self.kind == "squared_coords":
            return lambda x: x**2
        return None

    def describe(self) -> str:
        if self.kind == "polynomial":
            return f"kernel:polynomial(degree={self.degree},coef={self.coef:g})"
        if self.kind == "rbf":
            return f"kernel:rbf(gamma={self.gamma:g})"
        return f"kernel:{self.kind}"

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "degree": self.degree, "coef": self.coef, "gamma": self.gamma}


def _clamp(radicand: np.ndarray) -> np.ndarray:
    if np.any(radicand < RADICAND_TOLERANCE):
        raise DataError(
            f"Kernel radicand {radicand.min():.3g} is negative; the kernel is not positive definite"
        )
    return np.maximum(radicand, 0.0)


def d_kappa(x: Any, y: Any, kernel: KernelSpec) -> float:
    """sqrt(k(x, x) + k(y, y) - 2 k(x, y))"""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    y = np.asarray(y, dtype=float).reshape(1, -1)
    if x.shape != y.shape:
        raise DataError(f"x and y differ in length: {x.shape[1]} vs {y.shape[1]}")
    feature_map = kernel.feature_map()
    if feature_map is not None:
        return float(np.sqrt(np.sum((feature_map(x) - feature_map(y)) ** 2)))
    radicand = kernel.gram(x)[0, 0] + kernel.gram(y)[0, 0] - 2.0 * kernel.gram(x, y)[0, 0]
    return float(np.sqrt(_clamp(np.array([radicand]))[0]))


def kernel_distances2(x: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """Condensed squared feature-space distances, scipy pdist order"""
    feature_map = kernel.feature_map()
    if feature_map is not None:
        return pdist(feature_map(np.asarray(x, dtype=float)), "sqeuclidean")
    gram = kernel.gram(x)
    diagonal = np.diag(gram)
    rows, cols = np.triu_indices(gram.shape[0], k=1)
    return _clamp(diagonal[rows] + diagonal[cols] - 2.0 * gram[rows, cols])


def kernel_dissim_matrix(data: Dataset, params: DissimParams, kernel: KernelSpec) -> DissimMatrix:
    """
    Dissimilarity matrix with ||x_i - x_j|| replaced by d_kappa(x_i, x_j)

    Args:
        data: Dataset
        params: Family parameters
        kernel: Kernel on the unprotected attributes

    Returns:
        DissimMatrix whose `base` names the kernel
    """
    dist2 = kernel_distances2(data.x, kernel)
    logger.debug(f"Computed {params.label()} with {kernel.describe()} for {data.n} records")
    return assemble(data, params, dist2, base=kernel.describe())


def joint_kernel_admissible(tau: np.ndarray) -> bool:
    """
    Whether a symmetric 2x2 kernel tau on a binary protected attribute is
    positive semi-definite and rewards same-class pairs less than mixed pairs

    A kernel on (x, s) formed by adding tau to a kernel on x repels
    same-class points only if 2 tau(a, b) > tau(a, a) + tau(b, b), which no
    positive semi-definite tau satisfies; this always returns False for
    valid input.
    """
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (2, 2) or tau[0, 1] != tau[1, 0]:
        raise ValueError("tau must be a symmetric 2x2 matrix")
    a, b, c = tau[0, 0], tau[0, 1], tau[1, 1]
    psd = bool(a >= 0 and c >= 0 and a * c - b * b >= 0)
    repels = bool(2.0 * tau[0, 1] > tau[0, 0] + tau[1, 1])
    return psd and repels
