"""
Great-circle distances between (lat, lon) locations
"""

import logging
from typing import Optional, Sequence

import numpy as np
from sklearn.metrics.pairwise import haversine_distances

from .core import DataError
from .dissim import DissimMatrix

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088


def geodesic_matrix(
    lat: Sequence[float], lon: Sequence[float], ids: Optional[Sequence[str]] = None
) -> DissimMatrix:
    """
    Haversine distance matrix in kilometers

    Args:
        lat: Latitudes in degrees, [-90, 90]
        lon: Longitudes in degrees, [-180, 180]
        ids: Optional record identifiers

    Returns:
        DissimMatrix with base "geodesic"
    """
    lat = np.asarray(lat, dtype=float).reshape(-1)
    lon = np.asarray(lon, dtype=float).reshape(-1)
    if lat.shape != lon.shape:
        raise DataError(f"lat and lon differ in length: {lat.shape[0]} vs {lon.shape[0]}")
    if not (np.all(np.isfinite(lat)) and np.all(np.isfinite(lon))):
        raise DataError("Coordinates contain NaN or infinite values")
    if np.any(np.abs(lat) > 90) or np.any(np.abs(lon) > 180):
        raise DataError("Latitude must be in [-90, 90] and longitude in [-180, 180]")

    radians = np.radians(np.column_stack([lat, lon]))
    distances = haversine_distances(radians) * EARTH_RADIUS_KM

    # mirror the upper triangle for exact symmetry and a zero diagonal
    upper = np.triu(distances, k=1)
    values = upper + upper.T
    logger.debug(f"Computed geodesic distances for {lat.shape[0]} locations")
    return DissimMatrix(values, ids=ids, base="geodesic")
