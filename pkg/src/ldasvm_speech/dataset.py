"""Labeled feature matrices shared by the discriminant and classifier stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LabeledDataset:
    """n feature rows with integer class labels 1..C (at least two classes)."""

    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must form an n x d matrix")
        if self.labels.shape != (self.vectors.shape[0],):
            raise ValueError("need exactly one label per row")
        distinct = np.unique(self.labels)
        if distinct.size < 2:
            raise ValueError("dataset must contain at least two classes")
        if distinct[0] < 1:
            raise ValueError(f"labels must be positive integers, got {distinct.tolist()}")

    @property
    def n_classes(self) -> int:
        return int(np.unique(self.labels).size)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return int(self.vectors.shape[0])
