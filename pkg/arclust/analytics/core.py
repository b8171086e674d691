"""
Core data types: datasets, protected-attribute codification, dissimilarity
parameters, interaction matrices and partitions
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class DataError(ValueError):
    """Raised when input data violates a precondition (NaN, shape, sign...)"""


class Family(str, Enum):
    DELTA1 = "delta1"
    DELTA2 = "delta2"
    DELTA3 = "delta3"
    DELTA4 = "delta4"


class Scheme(str, Enum):
    SIGNED = "signed"
    ONE_HOT = "one_hot"
    COUNTS = "counts"
    FRACTIONS = "fractions"
    RAW = "raw"


def _frozen_array(values: Any, name: str, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise DataError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DataError(f"{name} contains NaN or infinite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """
    Records with unprotected attributes x (n x d) and protected attributes s (n x p)

    Attributes:
        x: Unprotected attributes
        s: Codified protected attributes
        ids: Record identifiers (defaults to "0".."n-1")
        class_labels: Raw categorical label per record, when the protected
            attribute came from a categorical column
        latlon: Optional (lat, lon) degrees per record for geodesic distances
        x_columns: Names of the x columns
        s_columns: Names of the s columns
    """

    x: np.ndarray
    s: np.ndarray
    ids: Optional[Tuple[str, ...]] = None
    class_labels: Optional[Tuple[str, ...]] = None
    latlon: Optional[np.ndarray] = None
    x_columns: Optional[Tuple[str, ...]] = None
    s_columns: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        x = _frozen_array(self.x, "x", 2)
        s = _frozen_array(self.s, "s", 2)
        if x.shape[0] != s.shape[0]:
            raise DataError(
                f"x has {x.shape[0]} records but s has {s.shape[0]} records"
            )
        if x.shape[0] < 1:
            raise DataError("Dataset must contain at least one record")
        n = x.shape[0]
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "s", s)

        ids = self.ids
        if ids is None:
            ids = tuple(str(i) for i in range(n))
        ids = tuple(str(i) for i in ids)
        if len(ids) != n:
            raise DataError(f"Expected {n} ids, got {len(ids)}")
        if len(set(ids)) != n:
            raise DataError("Record ids must be unique")
        object.__setattr__(self, "ids", ids)

        if self.class_labels is not None:
            labels = tuple(str(label) for label in self.class_labels)
            if len(labels) != n:
                raise DataError(f"Expected {n} class labels, got {len(labels)}")
            object.__setattr__(self, "class_labels", labels)

        if self.latlon is not None:
            latlon = _frozen_array(self.latlon, "latlon", 2)
            if latlon.shape != (n, 2):
                raise DataError(f"latlon must have shape ({n}, 2)")
            object.__setattr__(self, "latlon", latlon)

        for name, width in (("x_columns", x.shape[1]), ("s_columns", s.shape[1])):
            columns = getattr(self, name)
            if columns is not None:
                columns = tuple(columns)
                if len(columns) != width:
                    raise DataError(f"{name} must name {width} columns")
                object.__setattr__(self, name, columns)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def p(self) -> int:
        return self.s.shape[1]

    def class_matrix(self) -> Tuple[np.ndarray, Tuple[str, ...]]:
        """
        Non-negative per-record class membership used for proportions

        Returns:
            (n x q matrix, class names). Categorical labels become one-hot
            columns in sorted order; non-negative s (one-hot, counts,
            fractions) is used as is; signed s is split by its distinct rows.
        """
        if self.class_labels is not None:
            categories = tuple(sorted(set(self.class_labels)))
            matrix = _one_hot(self.class_labels, categories)
            return matrix, categories

        if np.all(self.s >= 0):
            names = self.s_columns or tuple(f"s{j + 1}" for j in range(self.p))
            return np.array(self.s), tuple(names)

        rows, inverse = np.unique(self.s, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        # highest code first so +1 precedes -1
        order = np.arange(len(rows))[::-1]
        matrix = np.zeros((self.n, len(rows)))
        matrix[np.arange(self.n), order[inverse]] = 1.0
        names = tuple(
            ",".join(format(value, "g") for value in rows[i]) for i in order
        )
        return matrix, names

    def record_classes(self) -> Tuple[str, ...]:
        """Class name of each record (dominant class for counts)"""
        matrix, names = self.class_matrix()
        return tuple(names[j] for j in np.argmax(matrix, axis=1))


@dataclass(frozen=True)
class Codification:
    """
    How a categorical protected column becomes the numeric matrix s

    Attributes:
        scheme: One of signed, one_hot, counts, fractions, raw
        q: Number of categories expected (one_hot only, optional)
        categories: Explicit category order; sorted distinct labels if None
    """

    scheme: Scheme
    q: Optional[int] = None
    categories: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.categories is not None:
            object.__setattr__(
                self, "categories", tuple(str(c) for c in self.categories)
            )
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1")

    def resolve_categories(self, raw_labels: Sequence[Any]) -> Tuple[str, ...]:
        observed = sorted({str(label) for label in raw_labels})
        if self.categories is None:
            return tuple(observed)
        unknown = [label for label in observed if label not in self.categories]
        if unknown:
            raise DataError(f"Unknown categories: {unknown}")
        return self.categories


def _one_hot(labels: Sequence[str], categories: Sequence[str]) -> np.ndarray:
    index = {category: j for j, category in enumerate(categories)}
    matrix = np.zeros((len(labels), len(categories)))
    for i, label in enumerate(labels):
        matrix[i, index[label]] = 1.0
    return matrix


def encode_classes(raw_labels: Sequence[Any], scheme: Codification) -> np.ndarray:
    """
    Turn a protected attribute into the numeric matrix s

    signed maps a binary label to +1/-1 (first category in order is +1);
    one_hot produces indicator columns; counts, fractions and raw take a
    numeric vector or matrix. fractions normalizes each row to sum to 1.

    Args:
        raw_labels: Labels (signed, one_hot) or numeric rows (counts, fractions, raw)
        scheme: Codification to apply

    Returns:
        n x p float matrix
    """
    if scheme.scheme in (Scheme.SIGNED, Scheme.ONE_HOT):
        labels = [str(label) for label in raw_labels]
        categories = scheme.resolve_categories(labels)

        if scheme.scheme == Scheme.SIGNED:
            if len(categories) != 2:
                raise DataError(
                    f"signed codification needs a binary attribute, got {len(categories)} categories"
                )
            positive = categories[0]
            return np.array(
                [[1.0] if label == positive else [-1.0] for label in labels]
            )

        if scheme.q is not None and len(categories) > scheme.q:
            raise DataError(
                f"Expected at most {scheme.q} categories, got {len(categories)}"
            )
        return _one_hot(labels, categories)

    values = np.array(raw_labels, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if not np.all(np.isfinite(values)):
        raise DataError("Protected attributes contain NaN or infinite values")

    if scheme.scheme == Scheme.RAW:
        return values

    if np.any(values < 0):
        raise DataError(f"{scheme.scheme.value} codification needs non-negative values")
    if scheme.scheme == Scheme.COUNTS:
        if not np.all(values == np.round(values)):
            raise DataError("counts codification needs integer values")
        return values

    totals = values.sum(axis=1, keepdims=True)
    if np.any(totals == 0):
        raise DataError("fractions codification needs a positive total per record")
    return values / totals


def _symmetric(matrix: np.ndarray) -> bool:
    return np.array_equal(matrix, matrix.T)


@dataclass(frozen=True)
class DissimParams:
    """
    Parameters of one dissimilarity family

    Attributes:
        family: delta1..delta4
        u_matrix: p x p matrix U (delta1)
        v_matrix: p x p interaction matrix V (delta1, delta4)
        u: Strength (delta2, delta3, delta4)
        v: Decay in the protected-attribute term (delta2, delta4)
        w: Decay in the unprotected distance (delta4)
    """

    family: Family
    u_matrix: Optional[np.ndarray] = None
    v_matrix: Optional[np.ndarray] = None
    u: Optional[float] = None
    v: Optional[float] = None
    w: Optional[float] = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)

        for name in ("u_matrix", "v_matrix"):
            matrix = getattr(self, name)
            if matrix is None:
                continue
            matrix = _frozen_array(matrix, name, 2)
            if matrix.shape[0] != matrix.shape[1]:
                raise ValueError(f"{name} must be square, got {matrix.shape}")
            if not _symmetric(matrix):
                raise ValueError(f"{name} must be symmetric")
            object.__setattr__(self, name, matrix)

        required = {
            Family.DELTA1: ("u_matrix", "v_matrix"),
            Family.DELTA2: ("u", "v"),
            Family.DELTA3: ("u",),
            Family.DELTA4: ("u", "v", "w", "v_matrix"),
        }[family]
        for name in required:
            if getattr(self, name) is None:
                raise ValueError(f"{family.value} requires '{name}'")

        for name in ("u", "v", "w"):
            value = getattr(self, name)
            if value is None:
                continue
            value = float(value)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite value >= 0, got {value}")
            object.__setattr__(self, name, value)

        if (
            family == Family.DELTA2
            and self.u is not None
            and self.u > 0
            and self.v == 0
        ):
            logger.warning(
                "delta2 with v = 0 is a constant rescaling of the squared distance"
            )
        if family == Family.DELTA4 and self.u is not None and self.u > 1:
            logger.warning(f"delta4 with u = {self.u} > 1 can make attracted pairs negative")

        if self.u_matrix is not None and self.v_matrix is not None:
            if self.u_matrix.shape != self.v_matrix.shape:
                raise ValueError("U and V must have the same shape")

    @classmethod
    def delta1(cls, u_matrix: Any, v_matrix: Any) -> "DissimParams":
        return cls(Family.DELTA1, u_matrix=u_matrix, v_matrix=v_matrix)

    @classmethod
    def delta2(cls, u: float, v: float) -> "DissimParams":
        return cls(Family.DELTA2, u=u, v=v)

    @classmethod
    def delta3(cls, u: float) -> "DissimParams":
        return cls(Family.DELTA3, u=u)

    @classmethod
    def delta4(cls, u: float, v: float, w: float, v_matrix: Any) -> "DissimParams":
        return cls(Family.DELTA4, u=u, v=v, w=w, v_matrix=v_matrix)

    def check_dimension(self, p: int) -> None:
        """Raise if the matrices do not match p protected attributes"""
        for name in ("u_matrix", "v_matrix"):
            matrix = getattr(self, name)
            if matrix is not None and matrix.shape[0] != p:
                raise DataError(
                    f"{name} is {matrix.shape[0]}x{matrix.shape[0]} but s has {p} columns"
                )

    def unperturbed(self) -> "DissimParams":
        """Same family with zero strength: the plain (squared) Euclidean baseline"""
        if self.family == Family.DELTA1:
            zeros = np.zeros_like(self.u_matrix)
            return DissimParams.delta1(zeros, zeros)
        if self.family == Family.DELTA2:
            return DissimParams.delta2(0.0, self.v)
        if self.family == Family.DELTA3:
            return DissimParams.delta3(0.0)
        return DissimParams.delta4(0.0, self.v, self.w, self.v_matrix)

    def is_unperturbed(self) -> bool:
        if self.family == Family.DELTA1:
            return not np.any(self.u_matrix) and not np.any(self.v_matrix)
        return self.u == 0

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"family": self.family.value}
        for name in ("u_matrix", "v_matrix"):
            matrix = getattr(self, name)
            if matrix is not None:
                payload[name] = matrix.tolist()
        for name in ("u", "v", "w"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "DissimParams":
        return cls(
            Family(payload["family"]),
            u_matrix=payload.get("u_matrix"),
            v_matrix=payload.get("v_matrix"),
            u=payload.get("u"),
            v=payload.get("v"),
            w=payload.get("w"),
        )

    def label(self) -> str:
        """Short human-readable description used in logs and tables"""
        parts = [self.family.value]
        for name in ("u", "v", "w"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value:g}")
        for name in ("u_matrix", "v_matrix"):
            matrix = getattr(self, name)
            if matrix is not None:
                parts.append(f"{name[0].upper()}={_matrix_label(matrix)}")
        return " ".join(parts)


def _matrix_label(matrix: np.ndarray) -> str:
    if matrix.shape == (1, 1):
        return format(matrix[0, 0], "g")
    return ";".join(",".join(format(v, "g") for v in row) for row in matrix)


# Interaction guideline matrices for six-category enrollment counts
# (Amer. Indian/Alaska Native, Asian, Hispanic, Pacific Islander, Black, White)
INTERACTION_PRESETS: Dict[str, List[List[int]]] = {
    "two_class_repel_first": [[1, -1], [-1, 0]],
    "crdc_1": [
        [1, -1, -1, -1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [-1, -1, 1, -1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [-1, -1, -1, -1, 1, -1],
        [0, 0, 0, 0, 0, 1],
    ],
    "crdc_2": [
        [1, -1, -1, -1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [-1, -1, -1, -1, 1, -1],
        [0, 0, 0, 0, 0, 1],
    ],
    "crdc_3": [
        [1, -1, -1, -1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [-1, -1, -1, -1, 1, -1],
        [0, 0, 0, 0, 0, 1],
    ],
    "crdc_4": [
        [1, -1, -1, -1, -1, -1],
        [-1, 1, -1, -1, -1, -1],
        [-1, -1, 1, -1, -1, -1],
        [-1, -1, -1, 1, -1, -1],
        [-1, -1, -1, -1, 1, -1],
        [-1, -1, -1, -1, -1, 1],
    ],
    "crdc_5": [
        [1, 0, 0, 0, 0, 0],
        [-1, 1, -1, -1, -1, -1],
        [0, 0, 1, 0, 0, 0],
        [-1, -1, -1, 1, -1, -1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
    ],
    "crdc_6": [
        [0, 0, 0, 0, 0, 0],
        [-1, 1, -1, -1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [-1, -1, -1, 1, -1, -1],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
    ],
}


@dataclass(frozen=True)
class InteractionMatrix:
    """
    Guideline matrix V~ with entries in {-1, 0, 1} scaled by v0 > 0

    +1 on (a, b) repels categories a and b, -1 attracts them, 0 is neutral.

    Attributes:
        v_tilde: p x p guideline matrix
        v0: Positive scale
        name: Preset name, if built from one
    """

    v_tilde: np.ndarray
    v0: float = 1.0
    name: Optional[str] = None

    def __post_init__(self):
        v_tilde = _frozen_array(self.v_tilde, "v_tilde", 2)
        if v_tilde.shape[0] != v_tilde.shape[1]:
            raise ValueError(f"v_tilde must be square, got {v_tilde.shape}")
        if not np.all(np.isin(v_tilde, (-1.0, 0.0, 1.0))):
            raise ValueError("v_tilde entries must be -1, 0 or 1")
        if not np.isfinite(self.v0) or self.v0 <= 0:
            raise ValueError(f"v0 must be > 0, got {self.v0}")
        object.__setattr__(self, "v_tilde", v_tilde)
        object.__setattr__(self, "v0", float(self.v0))

    @property
    def v(self) -> np.ndarray:
        return self.v0 * self.v_tilde

    def symmetric_v(self) -> np.ndarray:
        """
        v0 times the symmetric part of V~

        s1'Vs2 and s2'Vs1 differ for asymmetric guidelines; the symmetric
        part gives their average, which keeps the dissimilarity symmetric.
        """
        if _symmetric(self.v_tilde):
            return self.v
        logger.warning(
            f"Interaction matrix {self.name or ''} is not symmetric; using its symmetric part"
        )
        return self.v0 * 0.5 * (self.v_tilde + self.v_tilde.T)


def build_interaction(
    v_tilde: Any, v0: float = 1.0, name: Optional[str] = None
) -> InteractionMatrix:
    """
    Build an interaction matrix from a guideline matrix or a preset name

    Args:
        v_tilde: p x p matrix with entries in {-1, 0, 1}, or a preset name
        v0: Positive scale
        name: Optional label

    Returns:
        InteractionMatrix
    """
    if isinstance(v_tilde, str):
        if v_tilde not in INTERACTION_PRESETS:
            raise ValueError(
                f"Unknown interaction preset '{v_tilde}'. "
                f"Available: {', '.join(sorted(INTERACTION_PRESETS))}"
            )
        name = name or v_tilde
        v_tilde = INTERACTION_PRESETS[v_tilde]
    return InteractionMatrix(np.array(v_tilde, dtype=float), v0=v0, name=name)


@dataclass(frozen=True)
class Partition:
    """
    Assignment of n records to K non-empty clusters

    Attributes:
        labels: Cluster index in 0..K-1 per record
        k: Number of clusters
        proportions: K x q class proportions per cluster (q = 0 if unknown)
    """

    labels: np.ndarray
    k: int
    proportions: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        if labels.size == 0:
            raise ValueError("Partition must label at least one record")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError("Cluster labels must lie in 0..k-1")
        if len(np.unique(labels)) != self.k:
            raise ValueError("Every cluster index must occur at least once")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

        proportions = np.array(self.proportions, dtype=float)
        if proportions.size == 0:
            proportions = np.zeros((self.k, 0))
        if proportions.shape[0] != self.k:
            raise ValueError("proportions must have one row per cluster")
        proportions.setflags(write=False)
        object.__setattr__(self, "proportions", proportions)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def from_labels(
        cls, labels: Sequence[int], classes: Optional[np.ndarray] = None
    ) -> "Partition":
        """
        Build a partition from arbitrary labels, compacted to 0..K-1 in
        order of first appearance

        Args:
            labels: Any hashable-integer labels
            classes: Optional n x q non-negative class membership matrix

        Returns:
            Partition with proportions filled when classes are given
        """
        labels = np.asarray(labels).reshape(-1)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).reshape(-1)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        compact = rank[inverse]
        k = len(first)

        proportions = np.zeros((k, 0))
        if classes is not None:
            proportions = cluster_proportions(compact, k, classes)
        return cls(compact, k, proportions)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def cluster_proportions(labels: np.ndarray, k: int, classes: np.ndarray) -> np.ndarray:
    """
    Class proportions per cluster

    Args:
        labels: Compact cluster labels
        k: Number of clusters
        classes: n x q non-negative class membership (one-hot or counts)

    Returns:
        K x q matrix whose rows sum to 1
    """
    classes = np.asarray(classes, dtype=float)
    if classes.ndim == 1:
        classes = classes.reshape(-1, 1)
    if classes.shape[0] != len(labels):
        raise DataError("classes must have one row per record")
    if np.any(classes < 0):
        raise DataError("class membership must be non-negative")

    sums = np.zeros((k, classes.shape[1]))
    np.add.at(sums, labels, classes)
    totals = sums.sum(axis=1, keepdims=True)
    if np.any(totals == 0):
        raise DataError("Every cluster needs a positive class total")
    return sums / totals
