"""
Helper utilities for parsing typed values out of configuration text
"""

import re
from typing import List

import numpy as np


def parse_str_list(text: str) -> List[str]:
    """
    Parse a comma separated list of names

    Args:
        text: Raw text such as "complete, average , kmeans_mds"

    Returns:
        List of stripped, non-empty items
    """
    if not text:
        return []

    # Remove excessive whitespace
    text = re.sub(r"\s+", " ", text.strip())
    return [item.strip() for item in text.split(",") if item.strip()]


def parse_float_list(text: str) -> List[float]:
    """
    Parse a comma separated list of floats

    Args:
        text: Raw text such as "0, 0.5, 1"

    Returns:
        List of floats

    Raises:
        ValueError: If an item is not a number
    """
    values = []
    for item in parse_str_list(text):
        try:
            values.append(float(item))
        except ValueError:
            raise ValueError(f"Expected a number, got '{item}'")
    return values


def parse_int_list(text: str) -> List[int]:
    """
    Parse a comma separated list of integers, allowing ranges like "2-15"

    Args:
        text: Raw text

    Returns:
        List of integers
    """
    values: List[int] = []
    for item in parse_str_list(text):
        match = re.fullmatch(r"(\d+)\s*-\s*(\d+)", item)
        if match:
            start, stop = int(match.group(1)), int(match.group(2))
            if stop < start:
                raise ValueError(f"Empty integer range '{item}'")
            values.extend(range(start, stop + 1))
            continue
        try:
            values.append(int(item))
        except ValueError:
            raise ValueError(f"Expected an integer, got '{item}'")
    return values


def parse_matrix(text: str) -> np.ndarray:
    """
    Parse a matrix written row by row: "1,-1; -1,0"

    A single number parses as a 1x1 matrix.

    Args:
        text: Raw text

    Returns:
        2-D float array
    """
    rows = [row for row in text.split(";") if row.strip()]
    if not rows:
        raise ValueError("Empty matrix")

    parsed = [parse_float_list(row) for row in rows]
    widths = {len(row) for row in parsed}
    if len(widths) != 1:
        raise ValueError(f"Ragged matrix rows in '{text}'")
    return np.array(parsed, dtype=float)


def parse_matrix_list(text: str) -> List[str]:
    """
    Split a list of matrices separated by '|'

    Items are returned as text so callers can resolve preset names
    as well as inline matrices.

    Args:
        text: Raw text such as "crdc_1 | 1,-1;-1,0"

    Returns:
        List of matrix texts
    """
    return [item.strip() for item in text.split("|") if item.strip()]


def format_float(value: float) -> str:
    """Format a float with enough digits to round-trip"""
    return format(float(value), ".17g")
