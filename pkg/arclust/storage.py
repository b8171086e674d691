"""
Storage utilities for saving matrices, embeddings, partitions and tuning results
"""

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .analytics.core import DataError, Partition
from .analytics.dissim import DissimMatrix
from .analytics.embed import Embedding
from .analytics.hier import Dendrogram

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
BINARY_MAGIC = b"ARDM"


@contextmanager
def atomic_path(path: str, suffix: str = "") -> Iterator[str]:
    """
    Yield a temporary path next to `path`; it replaces `path` only if the
    block finishes without error
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=suffix)
    os.close(fd)
    try:
        yield tmp_path
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def save_result_json(path: str, result_type: str, data: Dict[str, Any]) -> str:
    """
    Save a result with a small metadata envelope

    Args:
        path: Output file
        result_type: Kind of result (partition, metrics, tune, ...)
        data: JSON-serializable payload

    Returns:
        Path to the saved file
    """
    payload = {"result_type": result_type, "data": data}
    with atomic_path(path, suffix=".json") as tmp:
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, default=_json_default)
            f.write("\n")
    logger.info(f"Saved {result_type} to {path}")
    return path


def load_result_json(path: str, result_type: Optional[str] = None) -> Dict[str, Any]:
    """Load a result saved by save_result_json and return its payload"""
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    if result_type is not None and payload.get("result_type") != result_type:
        raise DataError(f"{path} holds '{payload.get('result_type')}', expected '{result_type}'")
    return payload["data"]


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return str(value)


def save_table_csv(path: str, rows: Union[pd.DataFrame, List[Dict[str, Any]]]) -> str:
    """Save rows as CSV with round-trip float precision"""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(rows)
    with atomic_path(path, suffix=".csv") as tmp:
        frame.to_csv(tmp, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Saved {len(frame)} rows to {path}")
    return path


def _ids_or_default(n: int, ids: Optional[Tuple[str, ...]]) -> List[str]:
    return list(ids) if ids is not None else [str(i) for i in range(n)]


def save_dissim_csv(path: str, m: DissimMatrix) -> str:
    """Square CSV with ids as header and first column"""
    ids = _ids_or_default(m.n, m.ids)
    frame = pd.DataFrame(m.values, index=pd.Index(ids, name="id"), columns=ids)
    with atomic_path(path, suffix=".csv") as tmp:
        frame.to_csv(tmp, float_format=FLOAT_FORMAT)
    return path


def load_dissim_csv(path: str) -> DissimMatrix:
    frame = pd.read_csv(path, index_col=0, dtype={"id": str}, float_precision="round_trip")
    frame.index = frame.index.astype(str)
    if list(frame.index) != [str(c) for c in frame.columns]:
        raise DataError(f"{path}: row and column ids differ")
    return DissimMatrix(frame.to_numpy(dtype=float), ids=tuple(frame.index))


def save_dissim_binary(path: str, m: DissimMatrix) -> str:
    """
    Compact binary layout: b"ARDM", u64 n, the lower triangle (diagonal
    included) row by row as f64, f64 shift, u8 sqrt flag; little-endian
    """
    rows, cols = np.tril_indices(m.n)
    with atomic_path(path, suffix=".ardm") as tmp:
        with open(tmp, "wb") as f:
            f.write(BINARY_MAGIC)
            f.write(np.array([m.n], dtype="<u8").tobytes())
            f.write(m.values[rows, cols].astype("<f8").tobytes())
            f.write(np.array([m.shift_applied], dtype="<f8").tobytes())
            f.write(np.array([1 if m.sqrt_applied else 0], dtype="u1").tobytes())
    return path


def load_dissim_binary(path: str) -> DissimMatrix:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != BINARY_MAGIC:
        raise DataError(f"{path} is not a dissimilarity matrix file")
    n = int(np.frombuffer(raw, dtype="<u8", count=1, offset=4)[0])
    count = n * (n + 1) // 2
    expected = 4 + 8 + 8 * count + 8 + 1
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {len(raw)}")
    lower = np.frombuffer(raw, dtype="<f8", count=count, offset=12)
    shift = float(np.frombuffer(raw, dtype="<f8", count=1, offset=12 + 8 * count)[0])
    sqrt_flag = bool(raw[-1])

    values = np.zeros((n, n))
    rows, cols = np.tril_indices(n)
    values[rows, cols] = lower
    values[cols, rows] = lower
    return DissimMatrix(values, shift_applied=shift, sqrt_applied=sqrt_flag)


def save_embedding(path: str, embedding: Embedding) -> str:
    """CSV of coordinates plus a JSON sidecar (path + '.json') with the spectrum"""
    ids = _ids_or_default(embedding.coords.shape[0], embedding.ids)
    frame = pd.DataFrame(
        embedding.coords, columns=[f"coord_{j + 1}" for j in range(embedding.dim)]
    )
    frame.insert(0, "id", ids)
    save_table_csv(path, frame)
    save_result_json(path + ".json", "embedding", embedding.metadata())
    return path


def load_embedding_coords(path: str) -> Tuple[Tuple[str, ...], np.ndarray]:
    frame = pd.read_csv(path, dtype={"id": str}, float_precision="round_trip")
    coords = frame[[c for c in frame.columns if c.startswith("coord_")]].to_numpy(dtype=float)
    return tuple(frame["id"]), coords


def save_partition(path: str, partition: Partition, ids: Tuple[str, ...], extra: Dict[str, Any]) -> str:
    data = {
        "k": partition.k,
        "ids": list(ids),
        "labels": partition.labels.tolist(),
        "proportions": partition.proportions.tolist(),
    }
    data.update(extra)
    return save_result_json(path, "partition", data)


def load_partition(path: str) -> Tuple[Partition, Tuple[str, ...], Dict[str, Any]]:
    data = load_result_json(path, "partition")
    partition = Partition(np.array(data["labels"]), int(data["k"]), np.array(data["proportions"]))
    return partition, tuple(data["ids"]), data


def save_dendrogram(path: str, dendrogram: Dendrogram) -> str:
    """JSON with scipy-style merges plus a CSV (path + '.csv') with signed merge indices"""
    data = {
        "method": dendrogram.method,
        "n_leaves": dendrogram.n_leaves,
        "linkage": dendrogram.to_linkage_matrix().tolist(),
    }
    save_result_json(path, "dendrogram", data)
    save_table_csv(path + ".csv", dendrogram.to_merge_table())
    return path
