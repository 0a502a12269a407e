"""Reference aggregators: per-item average and median of received grades.

Both ignore the social and ownership relations and never see ground-truth
labels; they aggregate exactly the stored assessment entries (explicit zero
grades included, self-assessments included when present).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ValidationError
from .graph import SoanGraph


def _aggregate(graph: SoanGraph, item_ids: Sequence[int], fn) -> np.ndarray:
    csc = graph.A.tocsc()
    out = np.empty(len(item_ids))
    for j, item in enumerate(item_ids):
        i = int(item)
        if not 0 <= i < graph.m:
            raise ValidationError(f"unknown item index {i} (m={graph.m})")
        grades = csc.data[csc.indptr[i]:csc.indptr[i + 1]]
        if grades.size == 0:
            raise ValidationError(f"item {graph.item_ids[i]!r} has no assessments")
        out[j] = fn(grades)
    return out


def average_predict(graph: SoanGraph, item_ids: Sequence[int]) -> np.ndarray:
    """Arithmetic mean of each requested item's grades."""
    return _aggregate(graph, item_ids, np.mean)


def median_predict(graph: SoanGraph, item_ids: Sequence[int]) -> np.ndarray:
    """Sample median; even counts take the midpoint of the two middle grades."""
    return _aggregate(graph, item_ids, np.median)
