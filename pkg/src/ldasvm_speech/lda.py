"""Fisher linear discriminant analysis.

Builds within- and between-class scatter from labeled vectors, solves the
ridge-regularized generalized eigenproblem through a Cholesky reduction to a
symmetric one, and projects features onto at most C-1 discriminant
directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .exceptions import BadTargetDim, DimensionMismatch, SingularScatter

_RIDGE_FRACTION = 1e-6


@dataclass
class LdaModel:
    """Projection basis plus the statistics that produced it.

    Basis columns are unit length, mutually orthogonal, ordered by
    nonincreasing eigenvalue, and sign-fixed so the largest-magnitude entry
    of each column is positive.
    """

    basis: np.ndarray  # (d, r)
    eigenvalues: np.ndarray  # (r,), nonincreasing
    global_mean: np.ndarray  # (d,)
    class_means: np.ndarray  # (C, d), rows in ascending label order

    @property
    def input_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def output_dim(self) -> int:
        return int(self.basis.shape[1])


def class_stats(ds: LabeledDataset):
    """Global mean, per-class means, and per-class counts (label order)."""
    labels = np.unique(ds.labels)
    global_mean = ds.vectors.mean(axis=0)
    class_means = np.vstack(
        [ds.vectors[ds.labels == lab].mean(axis=0) for lab in labels]
    )
    counts = np.array([int((ds.labels == lab).sum()) for lab in labels])
    return global_mean, class_means, counts


def scatter_matrices(ds: LabeledDataset):
    """Within-class scatter S_W and between-class scatter S_B.

    S_W sums (x - m_i)(x - m_i)^T over each class; S_B sums
    n_i (m_i - m)(m_i - m)^T over class means about the global mean, so that
    S_W + S_B equals the total scatter about the global mean.
    """
    global_mean, class_means, counts = class_stats(ds)
    dim = ds.dim
    s_w = np.zeros((dim, dim))
    s_b = np.zeros((dim, dim))
    for lab, mean_i, n_i in zip(np.unique(ds.labels), class_means, counts):
        dev = ds.vectors[ds.labels == lab] - mean_i
        s_w += dev.T @ dev
        gap = (mean_i - global_mean)[:, None]
        s_b += n_i * (gap @ gap.T)
    # matmul round-off can leave ~1e-17 asymmetry
    s_w = 0.5 * (s_w + s_w.T)
    s_b = 0.5 * (s_b + s_b.T)
    return s_w, s_b


def _orthonormalized(columns: np.ndarray) -> np.ndarray:
    """Ordered Gram-Schmidt; generalized eigenvectors are not orthogonal."""
    basis = np.array(columns, dtype=np.float64)
    for k in range(basis.shape[1]):
        for prev in range(k):
            basis[:, k] -= (basis[:, prev] @ basis[:, k]) * basis[:, prev]
        norm = np.linalg.norm(basis[:, k])
        if norm < 1e-12:
            raise SingularScatter(
                "discriminant directions are linearly dependent; raise the ridge"
            )
        basis[:, k] /= norm
    return basis


def _sign_fixed(basis: np.ndarray) -> np.ndarray:
    for k in range(basis.shape[1]):
        col = basis[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            basis[:, k] = -col
    return basis


def fit_lda(ds: LabeledDataset, target_dim: int | None = None,
            ridge: float | None = None) -> LdaModel:
    """Fit the discriminant basis maximizing between/within scatter ratio.

    Solves (S_W + ridge*I)^-1 S_B v = lambda v and keeps the target_dim
    eigenvectors of largest eigenvalue. The ridge defaults to
    1e-6 * trace(S_W)/d, enough to survive small-sample scatter degeneracy;
    SingularScatter signals that it must be raised.
    """
    n_classes = ds.n_classes
    dim = ds.dim
    max_dim = min(n_classes - 1, dim)
    if target_dim is None:
        target_dim = max_dim
    if not 1 <= target_dim <= max_dim:
        raise BadTargetDim(
            f"target_dim={target_dim} not in [1, min(C-1, d)] = [1, {max_dim}]"
        )

    s_w, s_b = scatter_matrices(ds)
    if ridge is None:
        ridge = _RIDGE_FRACTION * np.trace(s_w) / dim
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")

    try:
        chol = np.linalg.cholesky(s_w + ridge * np.eye(dim))
    except np.linalg.LinAlgError as exc:
        raise SingularScatter(
            f"S_W + {ridge:g}*I is not positive definite; raise the ridge or add data"
        ) from exc

    # symmetric reduction: L^-1 S_B L^-T shares eigenvalues with S_W^-1 S_B
    half = np.linalg.solve(chol, s_b)
    sym = np.linalg.solve(chol, half.T).T
    sym = 0.5 * (sym + sym.T)
    evals, evecs = np.linalg.eigh(sym)

    sel = np.arange(dim - 1, dim - 1 - target_dim, -1)
    eigenvalues = evals[sel].copy()
    vectors = np.linalg.solve(chol.T, evecs[:, sel])
    basis = _sign_fixed(_orthonormalized(vectors))

    global_mean, class_means, _counts = class_stats(ds)
    return LdaModel(
        basis=basis,
        eigenvalues=eigenvalues,
        global_mean=global_mean,
        class_means=class_means,
    )


def project(model: LdaModel, x) -> np.ndarray:
    """Center on the global mean and project: basis^T (x - m).

    Accepts a single d-vector or an (n, d) batch.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[-1] != model.input_dim:
        raise DimensionMismatch(
            f"vector dim {arr.shape[-1]} != model dim {model.input_dim}"
        )
    return (arr - model.global_mean) @ model.basis
