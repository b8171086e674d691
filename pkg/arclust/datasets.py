"""
CSV dataset loading with declared column roles
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .analytics.core import Codification, DataError, Dataset, Scheme, encode_classes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ColumnRoles:
    """
    Which CSV columns play which part

    Attributes:
        id_column: Record identifiers (row numbers if None)
        x_columns: Unprotected numeric attributes
        protected_columns: Numeric protected attributes (counts, fractions, raw)
        class_column: Categorical protected attribute (signed, one_hot)
        codification: Scheme for the protected attribute
        lat_column: Latitude in degrees
        lon_column: Longitude in degrees
    """

    id_column: Optional[str] = None
    x_columns: Tuple[str, ...] = ()
    protected_columns: Tuple[str, ...] = ()
    class_column: Optional[str] = None
    codification: Optional[str] = None
    lat_column: Optional[str] = None
    lon_column: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "x_columns", tuple(self.x_columns))
        object.__setattr__(self, "protected_columns", tuple(self.protected_columns))
        if self.protected_columns and self.class_column:
            raise ValueError("Use either protected_columns or class_column, not both")
        if (self.lat_column is None) != (self.lon_column is None):
            raise ValueError("lat_column and lon_column go together")

        used = [c for c in (self.id_column, self.class_column, self.lat_column, self.lon_column) if c]
        used += list(self.x_columns) + list(self.protected_columns)
        duplicates = sorted({c for c in used if used.count(c) > 1})
        if duplicates:
            raise ValueError(f"Columns assigned to more than one role: {duplicates}")

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "ColumnRoles":
        return cls(
            id_column=config.get("id_column"),
            x_columns=tuple(config.get("x_columns") or ()),
            protected_columns=tuple(config.get("protected_columns") or ()),
            class_column=config.get("class_column"),
            codification=config.get("codification"),
            lat_column=config.get("lat_column"),
            lon_column=config.get("lon_column"),
        )

    def infer(self, frame: pd.DataFrame) -> "ColumnRoles":
        """
        Fill unspecified roles from conventional column names

        "id" is the id column, a numeric "s" column is a raw protected
        attribute, a "class" column is one-hot encoded, and remaining
        numeric columns are unprotected attributes.
        """
        id_column = self.id_column
        if id_column is None and "id" in frame.columns:
            id_column = "id"

        protected, class_column = self.protected_columns, self.class_column
        codification = self.codification
        if not protected and class_column is None:
            if "s" in frame.columns and pd.api.types.is_numeric_dtype(frame["s"]):
                protected = ("s",)
                codification = codification or Scheme.RAW.value
            elif "class" in frame.columns:
                class_column = "class"
                codification = codification or Scheme.ONE_HOT.value
        if protected and codification is None:
            codification = Scheme.COUNTS.value
        if class_column and codification is None:
            codification = Scheme.ONE_HOT.value

        x_columns = self.x_columns
        if not x_columns:
            taken = {id_column, class_column, self.lat_column, self.lon_column, *protected}
            x_columns = tuple(
                c
                for c in frame.columns
                if c not in taken and pd.api.types.is_numeric_dtype(frame[c])
            )
        return ColumnRoles(
            id_column=id_column,
            x_columns=x_columns,
            protected_columns=protected,
            class_column=class_column,
            codification=codification,
            lat_column=self.lat_column,
            lon_column=self.lon_column,
        )


def _numeric_block(frame: pd.DataFrame, columns: Sequence[str], role: str) -> np.ndarray:
    """
    Columns as a float matrix, naming the first bad cell on failure

    Rows are counted from 1 over the data rows, header excluded.
    """
    block = frame[list(columns)]
    numeric = block.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().to_numpy()
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raw = block.iat[row, col]
        where = f"column '{columns[col]}', data row {row + 1}"
        if pd.isna(raw):
            raise DataError(f"{role} attribute has a missing value in {where}")
        raise DataError(f"{role} attribute has a non-numeric value {raw!r} in {where}")
    return numeric.to_numpy(dtype=float)


def dataset_from_frame(frame: pd.DataFrame, roles: ColumnRoles) -> Dataset:
    """
    Build a Dataset from a DataFrame

    Args:
        frame: Input table
        roles: Column roles (unspecified roles are inferred)

    Returns:
        Dataset
    """
    roles = roles.infer(frame)
    missing = [
        c
        for c in (
            [roles.id_column, roles.class_column, roles.lat_column, roles.lon_column]
            + list(roles.x_columns)
            + list(roles.protected_columns)
        )
        if c and c not in frame.columns
    ]
    if missing:
        raise DataError(f"Missing columns: {missing}")
    if not roles.protected_columns and not roles.class_column:
        raise DataError("No protected attribute: set protected_columns or class_column")

    latlon = None
    if roles.lat_column:
        latlon = _numeric_block(frame, (roles.lat_column, roles.lon_column), "Location")
    x_columns = roles.x_columns or (
        (roles.lat_column, roles.lon_column) if roles.lat_column else ()
    )
    if not x_columns:
        raise DataError("No unprotected attributes: set x_columns")
    x = _numeric_block(frame, x_columns, "Unprotected")

    scheme = Codification(Scheme(roles.codification))
    class_labels = None
    if roles.class_column:
        absent = np.flatnonzero(frame[roles.class_column].isna().to_numpy())
        if absent.size:
            raise DataError(
                f"Protected attribute has a missing value in column "
                f"'{roles.class_column}', data row {absent[0] + 1}"
            )
        class_labels = tuple(frame[roles.class_column].astype(str))
        s = encode_classes(class_labels, scheme)
        s_columns = (
            (roles.class_column,)
            if scheme.scheme == Scheme.SIGNED
            else scheme.resolve_categories(class_labels)
        )
    else:
        s = encode_classes(_numeric_block(frame, roles.protected_columns, "Protected"), scheme)
        s_columns = roles.protected_columns

    ids = tuple(frame[roles.id_column].astype(str)) if roles.id_column else None
    data = Dataset(
        x=x,
        s=s,
        ids=ids,
        class_labels=class_labels,
        latlon=latlon,
        x_columns=tuple(x_columns),
        s_columns=tuple(s_columns),
    )
    logger.info(f"Loaded {data.n} records (d={data.d}, p={data.p}, {scheme.scheme.value})")
    return data


def load_csv(path: str, roles: Optional[ColumnRoles] = None) -> Dataset:
    """
    Load a dataset from CSV

    Args:
        path: CSV file
        roles: Column roles; inferred from column names when omitted

    Returns:
        Dataset
    """
    id_column = (roles.id_column if roles is not None else None) or "id"
    frame = pd.read_csv(path, dtype={id_column: str}, float_precision="round_trip")
    return dataset_from_frame(frame, roles or ColumnRoles())
