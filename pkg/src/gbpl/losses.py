"""Per-sample loss adapters for training on top of the MLP.

An adapter owns the covariates and targets for a dataset and exposes the loss
in output space: ``values(out, rows)`` returns the per-row losses for the
network output ``out`` computed on ``x[rows]``, and ``output_grad(out, rows)``
returns d(sum of those losses)/d(out). Trainers combine the latter with
``nnet.backward`` to get exact parameter gradients.

``rows=None`` means all rows in stored order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gbpl.nnet import Batch


def _rows(a: np.ndarray, rows) -> np.ndarray:
    return a if rows is None else a[rows]


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Overflow-safe logistic function."""
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class BinarySurrogateLoss:
    """Squared surrogate for a bounded scalar score against outcome gaps.

    Per row: 0.5 * (u / sqrt(zeta) - sqrt(zeta) * f)^2, with f the tanh-head
    output and u the (pseudo-)difference in outcomes.
    """

    batch: Batch  # targets: (n,) outcome differences
    zeta: float

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        u = _rows(self.batch.targets, rows)
        f = out[:, 0]
        r = np.sqrt(self.zeta)
        return 0.5 * (u / r - r * f) ** 2

    def output_grad(self, out, rows=None):
        u = _rows(self.batch.targets, rows)
        return (self.zeta * out[:, 0] - u)[:, None]


@dataclass(frozen=True)
class FullVectorSurrogateLoss:
    """Symmetric squared surrogate for a simplex policy against all outcomes.

    Per row: 0.5 * sum_a (y_a / sqrt(zeta) - sqrt(zeta) * delta_a)^2 with
    delta the softmax-head output.
    """

    batch: Batch  # targets: (n, K) outcome vectors
    zeta: float

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        r = np.sqrt(self.zeta)
        return 0.5 * ((y / r - r * out) ** 2).sum(axis=1)

    def output_grad(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        return self.zeta * out - y


@dataclass(frozen=True)
class MaskedRegressionLoss:
    """Squared error on one designated output column per row.

    Used for outcome regressions on logged data: only the column of the
    realized action contributes; gradients on all other columns are exactly
    zero. With a single column and all rows pointing at it, this is plain
    least squares.
    """

    batch: Batch  # targets: (n,) observed values
    cols: np.ndarray  # (n,) int column per row

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        c = _rows(self.cols, rows)
        picked = out[np.arange(out.shape[0]), c]
        return 0.5 * (picked - y) ** 2

    def output_grad(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        c = _rows(self.cols, rows)
        g = np.zeros_like(out)
        idx = np.arange(out.shape[0])
        g[idx, c] = out[idx, c] - y
        return g


@dataclass(frozen=True)
class MultiRegressionLoss:
    """Squared error summed over all output columns (full-feedback regression)."""

    batch: Batch  # targets: (n, K)

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        return 0.5 * ((out - y) ** 2).sum(axis=1)

    def output_grad(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        return out - y


@dataclass(frozen=True)
class WeightedLogisticLoss:
    """Weighted binary cross-entropy on a scalar logit (identity head).

    Per row: w * (log(1 + exp(z)) - t * z) for label t in {0, 1}. Rows with
    weight zero contribute nothing, so ties in the labeling rule are harmless.
    """

    batch: Batch  # targets: (n,) labels in {0, 1}; weights: (n,) nonnegative

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        t = _rows(self.batch.targets, rows)
        w = _rows(self.batch.weights, rows)
        z = out[:, 0]
        return w * (np.logaddexp(0.0, z) - t * z)

    def output_grad(self, out, rows=None):
        t = _rows(self.batch.targets, rows)
        w = _rows(self.batch.weights, rows)
        return (w * (sigmoid(out[:, 0]) - t))[:, None]


@dataclass(frozen=True)
class NegativeWelfareLoss:
    """Negative realized welfare of a softmax policy, per row: -sum_a delta_a * y_a."""

    batch: Batch  # targets: (n, K) outcome (or pseudo-outcome) vectors

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        return -(out * y).sum(axis=1)

    def output_grad(self, out, rows=None):
        y = _rows(self.batch.targets, rows)
        return -y


@dataclass(frozen=True)
class CrossEntropyLogitsLoss:
    """Multinomial logistic loss taken directly on logits (identity head).

    Per row: logsumexp(z) - z[col]. Working in logit space keeps the loss and
    its gradient (softmax(z) - onehot) finite even when the fit saturates;
    predictions afterwards come from the matching softmax-head forward pass.
    """

    batch: Batch
    cols: np.ndarray  # (n,) int class per row

    @property
    def x(self):
        return self.batch.x

    @property
    def n(self):
        return self.batch.n

    def values(self, out, rows=None):
        c = _rows(self.cols, rows)
        m = out.max(axis=1)
        lse = m + np.log(np.exp(out - m[:, None]).sum(axis=1))
        return lse - out[np.arange(out.shape[0]), c]

    def output_grad(self, out, rows=None):
        c = _rows(self.cols, rows)
        shifted = out - out.max(axis=1, keepdims=True)
        p = np.exp(shifted)
        p /= p.sum(axis=1, keepdims=True)
        idx = np.arange(out.shape[0])
        p[idx, c] -= 1.0
        return p
