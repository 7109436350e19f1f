"""Squared-loss welfare surrogates and their exact algebraic equivalences.

The central fact exploited throughout the package: minimizing a scaled squared
error in outcome-difference space equals maximizing empirical welfare minus a
quadratic penalty whose strength is a fixed multiple of the scale ``zeta``.
This module exposes the per-sample losses, the welfare functionals, and
checkers that verify the equivalences exactly on finite policy grids.

Conventions, binary problems (K = 2): actions are labeled 1 and 0; column 0 of
an outcome matrix holds Y(1), column 1 holds Y(0). A bounded score f in [-1, 1]
encodes the randomized policy delta = (f + 1) / 2 = probability of action 1.

Factor-of-two bookkeeping: the per-sample losses ``binary_loss`` and
``fullvector_loss`` carry the 1/2 that the generalized posterior uses, while
``baseline_gap_loss`` is the plain sum of squares without it. The equivalence
checkers average the 1/2 losses, so their affine slopes are -2 (binary and
baseline-gap, penalty weight zeta/4) and -1 (full-vector, penalty weight
zeta/2); each report records the slope in force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIMPLEX_TOL = 1e-9
TIE_TOL = 1e-12

KIND_BINARY = "binary"
KIND_BASELINE_GAP = "baseline_gap"
KIND_FULL_VECTOR = "full_vector"


@dataclass(frozen=True)
class FullFeedbackDataset:
    """Covariates plus the complete outcome vector for every unit."""

    x: np.ndarray  # (n, d)
    y: np.ndarray  # (n, K), column a holds the outcome of action a

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))
        if self.x.ndim != 2 or self.y.ndim != 2:
            raise ValueError("x and y must be 2-D arrays")
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError("x and y row counts differ")
        if self.x.shape[0] < 1:
            raise ValueError("dataset must have at least one row")
        if self.y.shape[1] < 2:
            raise ValueError("need at least two actions")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("dataset entries must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def k(self) -> int:
        return self.y.shape[1]

    def outcome_diff(self) -> np.ndarray:
        """Binary outcome difference U = Y(1) - Y(0); requires K = 2."""
        if self.k != 2:
            raise ValueError("outcome_diff needs a binary dataset")
        return self.y[:, 0] - self.y[:, 1]


@dataclass(frozen=True)
class GibbsConfig:
    """Everything that pins down one generalized posterior.

    ``zeta`` scales the surrogate, ``eta`` is the temperature multiplying the
    total loss, ``tau2`` the variance of the isotropic Gaussian prior over
    network weights, and ``kind`` the surrogate family (``baseline`` names the
    reference action for the baseline-gap kind, 1-based).
    """

    zeta: float
    eta: float = 1.0
    tau2: float = 1.0
    kind: str = KIND_BINARY
    baseline: int | None = None

    def __post_init__(self):
        if self.zeta <= 0 or self.eta <= 0 or self.tau2 <= 0:
            raise ValueError("zeta, eta, tau2 must all be positive")
        if self.kind not in (KIND_BINARY, KIND_BASELINE_GAP, KIND_FULL_VECTOR):
            raise ValueError(f"unknown surrogate kind {self.kind!r}")
        if self.kind == KIND_BASELINE_GAP and self.baseline is None:
            raise ValueError("baseline-gap surrogate needs a baseline action")


def _check_simplex(delta: np.ndarray, tol: float = SIMPLEX_TOL) -> None:
    if np.any(delta < -tol) or np.any(np.abs(delta.sum(axis=-1) - 1.0) > tol):
        raise ValueError("policy rows are off the probability simplex")


# ---------------------------------------------------------------------------
# per-sample losses


def binary_loss(zeta: float | np.ndarray, u: float | np.ndarray, f: float | np.ndarray):
    """0.5 * (u / sqrt(zeta) - sqrt(zeta) * f)^2, zero iff u = zeta * f.

    Broadcasts over array arguments, including the scale.
    """
    if np.any(np.asarray(zeta) <= 0):
        raise ValueError("zeta must be positive")
    r = np.sqrt(zeta)
    return 0.5 * (np.asarray(u) / r - r * np.asarray(f)) ** 2


def binary_loss_decomposition(zeta, u, f):
    """Split the binary loss into (u^2/(2 zeta), -u*f, (zeta/2) f^2).

    The three terms sum to ``binary_loss(zeta, u, f)`` exactly; only the last
    two depend on the score, which is why validation on the raw loss value is
    biased toward large zeta.
    """
    if np.any(np.asarray(zeta) <= 0):
        raise ValueError("zeta must be positive")
    u = np.asarray(u, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    return u**2 / (2.0 * zeta), -u * f, 0.5 * zeta * f**2


def fullvector_loss(zeta: float, y: np.ndarray, delta: np.ndarray):
    """0.5 * sum_a (y_a / sqrt(zeta) - sqrt(zeta) * delta_a)^2 on simplex rows."""
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    y = np.asarray(y, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    _check_simplex(delta)
    r = np.sqrt(zeta)
    return 0.5 * ((y / r - r * delta) ** 2).sum(axis=-1)


def baseline_gap_loss(zeta: float, y: np.ndarray, f: np.ndarray, baseline: int):
    """Sum over non-baseline actions of (gap/sqrt(zeta) - sqrt(zeta) f_a)^2.

    ``baseline`` is the 1-based reference action; gaps are y(a) - y(baseline)
    for the remaining actions in label order, matched to the K-1 entries of
    ``f``. No 1/2 factor here.
    """
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    y = np.asarray(y, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    k = y.shape[-1]
    if not (1 <= baseline <= k):
        raise ValueError(f"baseline action {baseline} out of range 1..{k}")
    others = [a for a in range(k) if a != baseline - 1]
    gaps = y[..., others] - y[..., baseline - 1 : baseline]
    r = np.sqrt(zeta)
    return ((gaps / r - r * f) ** 2).sum(axis=-1)


# ---------------------------------------------------------------------------
# welfare functionals


def empirical_welfare(data: FullFeedbackDataset, delta: np.ndarray) -> float:
    """(1/n) sum_i sum_a delta_{i,a} y_{i,a} for simplex policy rows."""
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != data.y.shape:
        raise ValueError("policy rows must match the dataset shape")
    _check_simplex(delta)
    return float((delta * data.y).sum() / data.n)


def penalty_value(delta: np.ndarray, kind: str, baseline: int | None = None) -> float:
    """Mean quadratic penalty of the given surrogate kind (unit weight)."""
    delta = np.asarray(delta, dtype=np.float64)
    if kind == KIND_BINARY:
        return float(np.mean((2.0 * delta[:, 0] - 1.0) ** 2))
    if kind == KIND_FULL_VECTOR:
        return float(np.mean((delta**2).sum(axis=1)))
    if kind == KIND_BASELINE_GAP:
        if baseline is None:
            raise ValueError("baseline-gap penalty needs a baseline action")
        k = delta.shape[1]
        others = [a for a in range(k) if a != baseline - 1]
        return float(np.mean(((2.0 * delta[:, others] - 1.0) ** 2).sum(axis=1)))
    raise ValueError(f"unknown surrogate kind {kind!r}")


def penalized_welfare(
    data: FullFeedbackDataset,
    delta: np.ndarray,
    lam: float,
    kind: str,
    baseline: int | None = None,
) -> float:
    """Empirical welfare minus ``lam`` times the kind-specific quadratic penalty."""
    if lam < 0:
        raise ValueError("penalty weight must be nonnegative")
    return empirical_welfare(data, delta) - lam * penalty_value(delta, kind, baseline)


# ---------------------------------------------------------------------------
# equivalence checkers


def _argopt_set(values: np.ndarray, maximize: bool) -> tuple[int, ...]:
    best = values.max() if maximize else values.min()
    hits = np.nonzero(np.abs(values - best) <= TIE_TOL)[0]
    return tuple(int(i) for i in hits)


@dataclass(frozen=True)
class EquivalenceReport:
    """Side-by-side objectives over a finite policy grid.

    ``surrogate`` holds the mean surrogate loss per policy, ``penalized`` the
    penalized empirical welfare at the matched penalty weight. ``equal`` is
    true when the two arg-optimum sets (ties within 1e-12) coincide, and
    ``max_affine_error`` bounds |(s_i - s_j) - slope * (w_i - w_j)| over all
    pairs, which certifies the affine identity with the recorded slope.
    """

    surrogate: np.ndarray
    penalized: np.ndarray
    argmin_surrogate: tuple[int, ...]
    argmax_penalized: tuple[int, ...]
    equal: bool
    slope: float
    penalty_weight: float
    max_affine_error: float


def _build_report(surrogate: np.ndarray, penalized: np.ndarray, slope: float, lam: float):
    argmin_s = _argopt_set(surrogate, maximize=False)
    argmax_w = _argopt_set(penalized, maximize=True)
    ds = surrogate[:, None] - surrogate[None, :]
    dw = penalized[:, None] - penalized[None, :]
    err = float(np.abs(ds - slope * dw).max())
    return EquivalenceReport(
        surrogate=surrogate,
        penalized=penalized,
        argmin_surrogate=argmin_s,
        argmax_penalized=argmax_w,
        equal=argmin_s == argmax_w,
        slope=slope,
        penalty_weight=lam,
        max_affine_error=err,
    )


def verify_equivalence_binary(
    data: FullFeedbackDataset, policy_grid, zeta: float
) -> EquivalenceReport:
    """Binary check: mean surrogate loss vs welfare penalized at zeta/4.

    ``policy_grid`` is a sequence of treatment-probability vectors, one value
    in [0, 1] per dataset row. Scores enter the surrogate through f = 2 delta
    - 1, and the two objectives differ by an affine map with slope -2.
    """
    grid = [np.asarray(p, dtype=np.float64) for p in policy_grid]
    if not grid:
        raise ValueError("policy grid must be nonempty")
    u = data.outcome_diff()
    lam = zeta / 4.0
    surrogate = np.empty(len(grid))
    penalized = np.empty(len(grid))
    for j, p in enumerate(grid):
        if p.shape != (data.n,) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("each policy must map rows to [0, 1]")
        f = 2.0 * p - 1.0
        surrogate[j] = float(np.mean(binary_loss(zeta, u, f)))
        delta = np.column_stack([p, 1.0 - p])
        penalized[j] = penalized_welfare(data, delta, lam, KIND_BINARY)
    return _build_report(surrogate, penalized, slope=-2.0, lam=lam)


def verify_equivalence_fullvector(
    data: FullFeedbackDataset, policy_grid, zeta: float
) -> EquivalenceReport:
    """Full-vector check: mean surrogate loss vs welfare penalized at zeta/2.

    ``policy_grid`` is a sequence of (n, K) simplex-row matrices. With the
    1/2 per-sample loss the affine slope is exactly -1, so pairwise penalized
    welfare differences equal pairwise surrogate differences with the sign
    flipped.
    """
    grid = [np.asarray(p, dtype=np.float64) for p in policy_grid]
    if not grid:
        raise ValueError("policy grid must be nonempty")
    lam = zeta / 2.0
    surrogate = np.empty(len(grid))
    penalized = np.empty(len(grid))
    for j, delta in enumerate(grid):
        if delta.shape != data.y.shape:
            raise ValueError("each policy must be an (n, K) matrix matching the data")
        surrogate[j] = float(np.mean(fullvector_loss(zeta, data.y, delta)))
        penalized[j] = penalized_welfare(data, delta, lam, KIND_FULL_VECTOR)
    return _build_report(surrogate, penalized, slope=-1.0, lam=lam)


def verify_equivalence_gap(
    data: FullFeedbackDataset, policy_grid, zeta: float, baseline: int
) -> EquivalenceReport:
    """Baseline-gap check: halved gap loss vs welfare penalized at zeta/4.

    Scores are f_a = 2 delta_a - 1 for the non-baseline actions; the affine
    slope is -2, as in the binary case.
    """
    grid = [np.asarray(p, dtype=np.float64) for p in policy_grid]
    if not grid:
        raise ValueError("policy grid must be nonempty")
    lam = zeta / 4.0
    k = data.k
    others = [a for a in range(k) if a != baseline - 1]
    surrogate = np.empty(len(grid))
    penalized = np.empty(len(grid))
    for j, delta in enumerate(grid):
        if delta.shape != data.y.shape:
            raise ValueError("each policy must be an (n, K) matrix matching the data")
        _check_simplex(delta)
        f = 2.0 * delta[:, others] - 1.0
        surrogate[j] = float(np.mean(0.5 * baseline_gap_loss(zeta, data.y, f, baseline)))
        penalized[j] = penalized_welfare(data, delta, lam, KIND_BASELINE_GAP, baseline)
    return _build_report(surrogate, penalized, slope=-2.0, lam=lam)


# ---------------------------------------------------------------------------
# simplex geometry and population targets


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort and threshold).

    Returns the unique nearest point with nonnegative entries summing to one.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("project_simplex expects a 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("input must be finite")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    j = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / j > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_simplex_rows(v: np.ndarray) -> np.ndarray:
    """Row-wise simplex projection of an (n, K) matrix."""
    v = np.asarray(v, dtype=np.float64)
    return np.apply_along_axis(project_simplex, 1, v)


def population_score_binary(m_over_zeta: float | np.ndarray):
    """Pointwise minimizer of the population binary surrogate: clip to [-1, 1]."""
    return np.clip(m_over_zeta, -1.0, 1.0)


# ---------------------------------------------------------------------------
# shift invariance


@dataclass(frozen=True)
class ShiftInvarianceReport:
    """Effect of an action-common covariate shift on the full-vector objectives."""

    welfare_shift_error: float  # |welfare(shifted) - welfare - mean(c)|, max over policies
    max_pairwise_surrogate_change: float
    ranking_unchanged: bool


def shift_invariance_check(
    data: FullFeedbackDataset, deltas, c: np.ndarray, zeta: float
) -> ShiftInvarianceReport:
    """Verify that adding a per-unit constant across actions is inert.

    Under y_{i,a} -> y_{i,a} + c_i the empirical welfare of every policy moves
    by exactly mean(c), and pairwise differences of the mean full-vector
    surrogate are unchanged, so rankings over the grid are preserved.
    """
    deltas = [np.asarray(p, dtype=np.float64) for p in deltas]
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (data.n,):
        raise ValueError("shift must have one entry per row")
    shifted = FullFeedbackDataset(data.x, data.y + c[:, None])
    mean_c = float(c.mean())

    welfare_err = 0.0
    base = np.empty(len(deltas))
    moved = np.empty(len(deltas))
    for j, delta in enumerate(deltas):
        _check_simplex(delta)
        w0 = empirical_welfare(data, delta)
        w1 = empirical_welfare(shifted, delta)
        welfare_err = max(welfare_err, abs(w1 - w0 - mean_c))
        base[j] = float(np.mean(fullvector_loss(zeta, data.y, delta)))
        moved[j] = float(np.mean(fullvector_loss(zeta, shifted.y, delta)))
    d0 = base[:, None] - base[None, :]
    d1 = moved[:, None] - moved[None, :]
    max_change = float(np.abs(d1 - d0).max()) if deltas else 0.0
    ranking_unchanged = bool(np.array_equal(np.argsort(base, kind="stable"),
                                            np.argsort(moved, kind="stable")))
    return ShiftInvarianceReport(
        welfare_shift_error=welfare_err,
        max_pairwise_surrogate_change=max_change,
        ranking_unchanged=ranking_unchanged,
    )
