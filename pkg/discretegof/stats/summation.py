"""Order-independent compensated summation along the last axis."""

import math

import numpy as np

# Above this many terms per row, math.fsum per row beats a column loop.
WIDE_ROW = 256


def canonical_sum(terms) -> np.ndarray:
    """
    Sum along the last axis, bit-identically for any permutation of the terms.

    Narrow rows are sorted and summed with Neumaier compensation; wide rows
    use math.fsum (exactly rounded). The method depends only on the row
    width. Rows containing +inf sum to +inf.
    """
    terms = np.asarray(terms, dtype=np.float64)
    infinite = np.isposinf(terms).any(axis=-1)
    if infinite.any():
        terms = np.where(np.isposinf(terms), 0.0, terms)

    if terms.shape[-1] > WIDE_ROW:
        flat = terms.reshape(-1, terms.shape[-1])
        result = np.array([math.fsum(row) for row in flat]).reshape(terms.shape[:-1])
        return np.where(infinite, np.inf, result)

    terms = np.sort(terms, axis=-1)
    total = np.zeros(terms.shape[:-1])
    compensation = np.zeros_like(total)
    for column in np.moveaxis(terms, -1, 0):
        running = total + column
        compensation += np.where(
            np.abs(total) >= np.abs(column),
            (total - running) + column,
            (column - running) + total,
        )
        total = running
    result = total + compensation
    return np.where(infinite, np.inf, result)
