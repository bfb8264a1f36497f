"""Soft-margin kernel SVM trained by sequential minimal optimization.

Binary training solves the dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

by repeatedly optimizing the maximal violating pair of coefficients
(Platt 1998; working-set rule of Keerthi et al. 2001). Multiclass problems
train one machine per class pair and take a majority vote.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dataset import LabeledDataset
from .exceptions import (
    DegenerateData,
    DimensionMismatch,
    NoConvergence,
    TooFewSamples,
)

_GRAM_CACHE_MAX = 4096  # full kernel matrix cached up to this many rows
_TAU = 1e-12  # stand-in curvature when eta <= 0 (constant-kernel directions)

KERNEL_KINDS = ("linear", "rbf", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and parameters; gamma must be positive for rbf/polynomial."""

    kind: str = "rbf"
    gamma: float = 2.0
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}; pick from {KERNEL_KINDS}")
        if self.kind in ("rbf", "polynomial") and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be at least 1")


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """k(x, y) for a single pair of vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"vector shapes {x.shape} and {y.shape} differ")
    if spec.kind == "linear":
        return float(x @ y)
    if spec.kind == "rbf":
        diff = x - y
        return float(np.exp(-spec.gamma * (diff @ diff)))
    return float((spec.gamma * (x @ y) + spec.coef0) ** spec.degree)


def gram_matrix(spec: KernelSpec, a, b=None) -> np.ndarray:
    """Kernel matrix K[i, j] = k(a_i, b_j); b defaults to a."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = a if b is None else np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"row dims {a.shape[1]} and {b.shape[1]} differ"
        )
    dots = a @ b.T
    if spec.kind == "linear":
        return dots
    if spec.kind == "rbf":
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * dots
        )
        return np.exp(-spec.gamma * np.maximum(sq, 0.0))
    return (spec.gamma * dots + spec.coef0) ** spec.degree


def _kernel_diag(spec: KernelSpec, x: np.ndarray) -> np.ndarray:
    if spec.kind == "linear":
        return np.sum(x * x, axis=1)
    if spec.kind == "rbf":
        return np.ones(x.shape[0])
    return (spec.gamma * np.sum(x * x, axis=1) + spec.coef0) ** spec.degree


def _snap_bounds(value: float, cost_c: float, snap: float) -> float:
    if value < snap:
        return 0.0
    if value > cost_c - snap:
        return cost_c
    return value


def smo_solve(x, y, cost_c: float, spec: KernelSpec,
              tol: float = 1e-3, max_passes: int | None = None):
    """Solve the binary dual; returns (alpha, bias).

    One sweep tries up to n maximal-violating-pair updates; max_passes sweeps
    (default 10*n) bound the work before NoConvergence. At convergence every
    point satisfies its KKT condition within tol. The bias averages y_i - f_i
    over unbounded support vectors, falling back to the midpoint of the
    feasible bias interval when every coefficient sits on a bound.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if y.shape != (n,) or not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be +1/-1, one per row")
    if cost_c <= 0:
        raise ValueError("cost_c must be positive")
    if max_passes is None:
        max_passes = 10 * n

    if n <= _GRAM_CACHE_MAX:
        gram = gram_matrix(spec, x)
        diag = gram.diagonal().copy()

        def column(i: int) -> np.ndarray:
            return gram[:, i]

    else:
        diag = _kernel_diag(spec, x)

        def column(i: int) -> np.ndarray:
            return gram_matrix(spec, x, x[i : i + 1])[:, 0]

    alpha = np.zeros(n)
    f = np.zeros(n)  # f_i = sum_j a_j y_j K_ij (bias excluded)
    snap = 1e-12 * (1.0 + cost_c)
    pos = y > 0
    last_gap = np.inf

    for _ in range(max_passes):
        moved = False
        for _ in range(n):
            e = y - f
            can_up = (pos & (alpha < cost_c)) | (~pos & (alpha > 0.0))
            can_dn = (~pos & (alpha < cost_c)) | (pos & (alpha > 0.0))
            if not can_up.any() or not can_dn.any():
                return alpha, _bias(alpha, e, y, cost_c)
            i = int(np.argmax(np.where(can_up, e, -np.inf)))
            j = int(np.argmin(np.where(can_dn, e, np.inf)))
            gap = e[i] - e[j]
            if gap <= tol:
                return alpha, _bias(alpha, e, y, cost_c)
            last_gap = gap

            col_i = column(i)
            col_j = column(j)
            eta = diag[i] + diag[j] - 2.0 * col_i[j]
            room_i = cost_c - alpha[i] if y[i] > 0 else alpha[i]
            room_j = cost_c - alpha[j] if y[j] < 0 else alpha[j]
            delta = min(gap / max(eta, _TAU), room_i, room_j)
            if delta <= 0.0:  # unreachable with exact bound snapping; stay safe
                break
            alpha[i] = _snap_bounds(alpha[i] + y[i] * delta, cost_c, snap)
            alpha[j] = _snap_bounds(alpha[j] - y[j] * delta, cost_c, snap)
            f += delta * (col_i - col_j)
            moved = True
        if not moved:
            if np.all(x == x[0]):
                raise DegenerateData(
                    "all training vectors identical across both classes"
                )
            raise NoConvergence(
                f"optimizer stalled with KKT violation {last_gap:.3e}"
            )

    raise NoConvergence(
        f"worst KKT violation {last_gap:.3e} > tol {tol:g} "
        f"after {max_passes} sweeps"
    )


def _bias(alpha, e, y, cost_c: float) -> float:
    unbounded = (alpha > 0.0) & (alpha < cost_c)
    if unbounded.any():
        return float(e[unbounded].mean())
    at_zero = alpha == 0.0
    at_cost = alpha == cost_c
    lower = (at_zero & (y > 0)) | (at_cost & (y < 0))
    upper = (at_zero & (y < 0)) | (at_cost & (y > 0))
    if lower.any() and upper.any():
        return float(0.5 * (e[lower].max() + e[upper].min()))
    if lower.any():
        return float(e[lower].max())
    if upper.any():
        return float(e[upper].min())
    return 0.0


@dataclass
class BinarySvm:
    """Support vectors with signed dual weights a_i*y_i and a bias term."""

    support_vectors: np.ndarray  # (s, d)
    alpha_y: np.ndarray  # (s,), nonzero, |a_i| <= C
    bias_b: float
    kernel: KernelSpec

    @property
    def dim(self) -> int:
        return int(self.support_vectors.shape[1])

    def decision_function(self, x):
        """f(x) = sum_i a_i y_i k(x_i, x) + b; batch in, batch out."""
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        values = (
            gram_matrix(self.kernel, np.atleast_2d(arr), self.support_vectors)
            @ self.alpha_y
            + self.bias_b
        )
        return float(values[0]) if single else values


def train_binary(pos, neg, cost_c: float, spec: KernelSpec,
                 tol: float = 1e-3, max_passes: int | None = None) -> BinarySvm:
    """Train one machine on positive vs negative vectors via SMO.

    Only points with nonzero dual coefficient are stored as support vectors.
    """
    pos = np.atleast_2d(np.asarray(pos, dtype=np.float64))
    neg = np.atleast_2d(np.asarray(neg, dtype=np.float64))
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise ValueError("both classes need at least one training vector")
    if pos.shape[1] != neg.shape[1]:
        raise DimensionMismatch(
            f"class dims {pos.shape[1]} and {neg.shape[1]} differ"
        )
    x = np.vstack([pos, neg])
    y = np.concatenate([np.ones(pos.shape[0]), -np.ones(neg.shape[0])])
    alpha, bias = smo_solve(x, y, cost_c, spec, tol=tol, max_passes=max_passes)
    keep = alpha > 0.0
    return BinarySvm(
        support_vectors=x[keep].copy(),
        alpha_y=(alpha * y)[keep],
        bias_b=bias,
        kernel=spec,
    )


@dataclass
class SvmModel:
    """One-vs-one ensemble: one BinarySvm per class pair in canonical order."""

    labels: list[int]  # ascending
    machines: list[BinarySvm]  # ordered (l1,l2), (l1,l3), ..., (l2,l3), ...
    cost_c: float

    @property
    def nr_class(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.machines[0].dim

    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(self.labels, 2))


def train_multiclass(ds: LabeledDataset, cost_c: float, spec: KernelSpec,
                     tol: float = 1e-3) -> SvmModel:
    """Train C(C-1)/2 pairwise machines; the first label of a pair is +1."""
    labels = sorted(int(v) for v in np.unique(ds.labels))
    machines = []
    for label_a, label_b in combinations(labels, 2):
        try:
            machines.append(
                train_binary(
                    ds.vectors[ds.labels == label_a],
                    ds.vectors[ds.labels == label_b],
                    cost_c,
                    spec,
                    tol=tol,
                )
            )
        except (NoConvergence, DegenerateData) as exc:
            raise type(exc)(f"class pair ({label_a}, {label_b}): {exc}") from exc
    return SvmModel(labels=labels, machines=machines, cost_c=cost_c)


def decision_values(model: SvmModel, x) -> np.ndarray:
    """Pairwise decision values for one vector, in canonical pair order."""
    return decision_matrix(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))[0]


def decision_matrix(model: SvmModel, x) -> np.ndarray:
    """(n, C(C-1)/2) decision values for a batch."""
    arr = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if arr.shape[1] != model.dim:
        raise DimensionMismatch(
            f"vector dim {arr.shape[1]} != training dim {model.dim}"
        )
    return np.column_stack([m.decision_function(arr) for m in model.machines])


def vote_counts(model: SvmModel, x) -> np.ndarray:
    """(n, C) pairwise votes; a positive value votes for the first pair label."""
    values = decision_matrix(model, x)
    index_of = {label: k for k, label in enumerate(model.labels)}
    votes = np.zeros((values.shape[0], model.nr_class), dtype=np.int64)
    for p, (label_a, label_b) in enumerate(model.pairs()):
        first = values[:, p] > 0.0
        votes[first, index_of[label_a]] += 1
        votes[~first, index_of[label_b]] += 1
    return votes


def predict_batch(model: SvmModel, x) -> np.ndarray:
    """Majority-vote labels; ties go to the smallest label value."""
    votes = vote_counts(model, x)
    label_arr = np.array(model.labels)
    return label_arr[np.argmax(votes, axis=1)]  # argmax picks first = smallest


def predict(model: SvmModel, x) -> int:
    return int(predict_batch(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))[0])


class _Lcg64:
    """64-bit linear congruential generator; identical streams on any platform."""

    _MULT = 6364136223846793005
    _INC = 1442695040888963407
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self._MASK
        self._next()  # decorrelate small seeds

    def _next(self) -> int:
        self.state = (self._MULT * self.state + self._INC) & self._MASK
        return self.state

    def randrange(self, bound: int) -> int:
        return (self._next() >> 33) % bound

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold ids, one per sample.

    Members of each class are shuffled with a seeded 64-bit LCG, then dealt
    round-robin across folds with a counter running through all classes, so
    fold sizes differ by at most one.
    """
    labels = np.asarray(labels, dtype=np.int64)
    rng = _Lcg64(seed)
    assign = np.empty(labels.shape[0], dtype=np.int64)
    position = 0
    for label in np.unique(labels):
        members = rng.shuffle(list(np.flatnonzero(labels == label)))
        for idx in members:
            assign[idx] = position % folds
            position += 1
    return assign


def cross_validate(ds: LabeledDataset, folds: int, cost_c: float,
                   spec: KernelSpec, seed: int) -> float:
    """Stratified k-fold accuracy percent; each sample predicted exactly once.

    A class with fewer than two members cannot appear in every training
    split; that is reported as a TooFewSamples warning and the affected folds
    degrade to the labels they do have.
    """
    n = len(ds)
    if not 2 <= folds <= n:
        raise ValueError(f"folds={folds} must lie in [2, {n}]")
    label_values, counts = np.unique(ds.labels, return_counts=True)
    thin = label_values[counts < 2]
    if thin.size:
        warnings.warn(
            TooFewSamples(
                f"classes {thin.tolist()} have a single member; "
                "folds missing them degrade to the remaining labels"
            )
        )

    assign = stratified_folds(ds.labels, folds, seed)
    correct = 0
    for fold in range(folds):
        held = assign == fold
        if not held.any():
            continue
        train_labels = np.unique(ds.labels[~held])
        if train_labels.size < 2:
            predictions = np.full(int(held.sum()), train_labels[0])
        else:
            sub = LabeledDataset(ds.vectors[~held], ds.labels[~held])
            model = train_multiclass(sub, cost_c, spec)
            predictions = predict_batch(model, ds.vectors[held])
        correct += int((predictions == ds.labels[held]).sum())
    return 100.0 * correct / n
