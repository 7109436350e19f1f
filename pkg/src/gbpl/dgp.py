"""Seeded synthetic data generators and semi-synthetic CSV construction.

Each family draws from one ``numpy`` generator in a fixed, documented order:
first the covariates, then any direction vectors and intercepts of the mean
functions, then the outcome noise. Because the order is fixed per family,
identical (family, n, d, K, noise_sd, seed) always yields bit-identical data,
no matter what else the caller does.

Binary families store outcomes as columns [Y(1), Y(0)]; K-action families as
columns for actions 1..K in order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gbpl.counterfactual import LoggedDataset, clip_propensities
from gbpl.losses import sigmoid
from gbpl.surrogate import FullFeedbackDataset

BINARY_FAMILIES = ("binary1", "binary2", "binary3")
MULTI_FAMILIES = ("multi1", "multi2", "multi3")
ONEDIM_FAMILY = "onedimviz"
SEMISYNTHETIC_FAMILY = "semisynthetic_csv"

LOGGING_LOGISTIC = "logistic"
LOGGING_SOFTMAX = "softmax"


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of one synthetic draw. Omitted fields take family defaults:
    binary families force K = 2; multi families default to K = 5, d = 10;
    the one-dimensional visualization family forces d = 1, K = 2 and uses
    noise 0.6 by default; all others default to noise 1.0."""

    family: str
    n: int
    d: int | None = None
    k: int | None = None
    noise_sd: float | None = None
    seed: int = 0
    csv_path: str | None = None

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        known = BINARY_FAMILIES + MULTI_FAMILIES + (ONEDIM_FAMILY, SEMISYNTHETIC_FAMILY)
        if fam not in known:
            raise ValueError(f"unknown family {fam!r}; expected one of {known}")
        if self.n < 1:
            raise ValueError("n must be positive")
        min_d = {"binary1": 4, "multi1": 4, "binary2": 3, "multi2": 3,
                 "binary3": 3, "multi3": 3}
        if fam in BINARY_FAMILIES:
            if self.k not in (None, 2):
                raise ValueError("binary families require K = 2")
            object.__setattr__(self, "k", 2)
            object.__setattr__(self, "d", self.d if self.d is not None else 10)
        elif fam in MULTI_FAMILIES:
            object.__setattr__(self, "k", self.k if self.k is not None else 5)
            object.__setattr__(self, "d", self.d if self.d is not None else 10)
            if self.k < 2:
                raise ValueError("multi families need K >= 2")
        if fam in min_d and self.d < min_d[fam]:
            raise ValueError(f"family {fam} uses the first {min_d[fam]} covariates; d >= {min_d[fam]} required")
        elif fam == ONEDIM_FAMILY:
            if self.d not in (None, 1) or self.k not in (None, 2):
                raise ValueError("the 1-D visualization family forces d = 1, K = 2")
            object.__setattr__(self, "d", 1)
            object.__setattr__(self, "k", 2)
        if self.noise_sd is None:
            object.__setattr__(self, "noise_sd", 0.6 if fam == ONEDIM_FAMILY else 1.0)
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be nonnegative")
        if fam == SEMISYNTHETIC_FAMILY and self.csv_path is None:
            raise ValueError("semisynthetic family needs csv_path")


@dataclass(frozen=True)
class DgpTruth:
    """Ground truth attached to a generated dataset for oracle evaluation."""

    gamma: np.ndarray  # (n, K) true conditional means, same column order as y
    oracle_cols: np.ndarray  # (n,) argmax column of gamma


def _unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _binary_means(fam: str, x: np.ndarray, rng: np.random.Generator, d: int):
    """Baseline mean and effect for the binary families; draws any direction
    vector from ``rng`` (binary1 only)."""
    if fam == "binary1":
        base = x[:, 0] + 0.5 * x[:, 1] ** 2 - 0.25 * x[:, 2] * x[:, 3]
        w = _unit_vector(rng, d)
        effect = 2.0 * np.tanh(x @ w / np.sqrt(d))
    elif fam == "binary2":
        base = 0.5 * np.sin(x[:, 0]) + 0.3 * x[:, 1] - 0.2 * x[:, 2] ** 2
        effect = 1.5 * np.sin(x[:, 0] + x[:, 1])
    else:  # binary3
        base = 0.2 * x[:, 0] - 0.1 * x[:, 1] + 0.1 * np.tanh(x[:, 2])
        effect = 2.5 * ((x[:, 0] > 0).astype(np.float64) - 0.5 + 0.2 * x[:, 1])
    return base, effect


def _multi_means(fam: str, x: np.ndarray, rng: np.random.Generator, d: int, k: int):
    if fam == "multi1":
        base = x[:, 0] + 0.5 * x[:, 1] ** 2 - 0.25 * x[:, 2] * x[:, 3]
    elif fam == "multi2":
        base = 0.5 * np.sin(x[:, 0]) + 0.3 * x[:, 1] - 0.2 * x[:, 2] ** 2
    else:  # multi3
        base = 0.2 * x[:, 0] - 0.1 * x[:, 1] + 0.1 * np.tanh(x[:, 2])
    gamma = np.empty((x.shape[0], k))
    for a in range(1, k + 1):
        w_a = _unit_vector(rng, d)
        index = x @ w_a / np.sqrt(d)
        if fam == "multi1":
            gamma[:, a - 1] = base + 1.5 * np.sin(index + 0.3 * a)
        elif fam == "multi2":
            gamma[:, a - 1] = base + 2.0 * np.tanh(index - 0.2 * a)
        else:
            gamma[:, a - 1] = base + 1.0 * (index > 0).astype(np.float64) + 0.1 * a
    return gamma


def generate_full_feedback(spec: DgpSpec) -> tuple[FullFeedbackDataset, DgpTruth]:
    """Draw a full-feedback dataset plus its ground truth.

    Stream order: covariates, then mean-function directions, then one noise
    column per action.
    """
    if spec.family == SEMISYNTHETIC_FAMILY:
        data = semisynthetic_from_csv(spec.csv_path, spec.k or 2, spec.seed)
        gamma = data.y  # the construction is noiseless given the csv
        return data, DgpTruth(gamma=gamma, oracle_cols=gamma.argmax(axis=1))
    rng = np.random.default_rng(spec.seed)
    if spec.family == ONEDIM_FAMILY:
        x = rng.uniform(-2.5, 2.5, size=(spec.n, 1))
        base = 0.2 * x[:, 0] + 0.2 * np.sin(1.5 * x[:, 0])
        effect = 1.2 * np.sin(x[:, 0])
        gamma = np.column_stack([base + effect, base])
    elif spec.family in BINARY_FAMILIES:
        x = rng.standard_normal((spec.n, spec.d))
        base, effect = _binary_means(spec.family, x, rng, spec.d)
        gamma = np.column_stack([base + effect, base])
    else:
        x = rng.standard_normal((spec.n, spec.d))
        gamma = _multi_means(spec.family, x, rng, spec.d, spec.k)
    noise = spec.noise_sd * rng.standard_normal((spec.n, spec.k))
    y = gamma + noise
    return FullFeedbackDataset(x, y), DgpTruth(gamma=gamma, oracle_cols=gamma.argmax(axis=1))


def generate_logged(
    spec: DgpSpec,
    logging: str = LOGGING_LOGISTIC,
    clip: float = 0.05,
    seed: int | None = None,
) -> tuple[LoggedDataset, FullFeedbackDataset]:
    """Convert a full-feedback draw into logged data under a stochastic
    logging policy with a random linear index.

    Propensities are projected onto the clip-floored simplex, so every entry
    lies in [clip, 1 - (K-1) clip] and rows sum to one. Returns the logged dataset (with
    the true propensities attached) together with the hidden full-feedback
    table, which is meant for evaluation only and must not reach learners.

    Logging randomness comes from its own stream keyed by ``seed`` (default:
    the spec seed), kept apart from the data stream.
    """
    if not (0.0 < clip <= 1.0 / (spec.k or 2)):
        raise ValueError("clip must lie in (0, 1/K]")
    full, _ = generate_full_feedback(spec)
    k = full.k
    rng = np.random.default_rng([spec.seed if seed is None else seed, 0x106])
    if logging == LOGGING_LOGISTIC:
        if k != 2:
            raise ValueError("logistic logging is binary only")
        beta = rng.standard_normal(full.d) / np.sqrt(full.d)
        p1 = sigmoid(full.x @ beta)
        e = np.column_stack([p1, 1.0 - p1])
    elif logging == LOGGING_SOFTMAX:
        betas = rng.standard_normal((full.d, k)) / np.sqrt(full.d)
        logits = full.x @ betas
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        e /= e.sum(axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown logging policy {logging!r}")
    e = clip_propensities(e, clip)  # floor clip, ceiling 1 - (K-1) clip, rows sum to 1

    u = rng.random(full.n)
    cum = np.cumsum(e, axis=1)
    cols = (u[:, None] > cum).sum(axis=1)
    y_obs = full.y[np.arange(full.n), cols]
    if k == 2:
        a = np.where(cols == 0, 1, 0)
    else:
        a = cols + 1
    logged = LoggedDataset(x=full.x, a=a, y_obs=y_obs, k=k, true_propensity=e)
    return logged, full


def semisynthetic_from_csv(path: str | Path, k: int, effect_seed: int) -> FullFeedbackDataset:
    """Build K potential outcomes from a real regression table.

    The last column of the CSV is taken as the response; it is standardized to
    zero mean and unit variance, and each action a = 1..K gets the outcome
    standardized response + tanh(x'w_a / sqrt(d) + c_a) with unit-norm
    directions w_a and intercepts c_a drawn from ``effect_seed``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if len(rows) < 2:
        raise ValueError("need at least 2 data rows")
    try:
        table = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise ValueError(f"non-numeric value in {path.name}: {exc}") from exc
    if table.shape[1] < 2:
        raise ValueError("need at least one feature column plus the response")
    x = table[:, :-1]
    resp = table[:, -1]
    sd = resp.std()
    if sd == 0.0:
        raise ValueError(f"response column {header[-1]!r} has zero variance")
    z = (resp - resp.mean()) / sd

    d = x.shape[1]
    rng = np.random.default_rng(effect_seed)
    y = np.empty((x.shape[0], k))
    for a in range(1, k + 1):
        w_a = _unit_vector(rng, d)
        c_a = rng.standard_normal()
        y[:, a - 1] = z + np.tanh(x @ w_a / np.sqrt(d) + c_a)
    return FullFeedbackDataset(x, y)


# ---------------------------------------------------------------------------
# CSV interchange


def _fmt(v) -> str:
    return repr(float(v))


def write_full_feedback_csv(path: str | Path, data: FullFeedbackDataset) -> None:
    """Columns x_1..x_d, y_1..y_K (binary: y_1 = Y(1), y_2 = Y(0))."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"x_{j + 1}" for j in range(data.d)] + [f"y_{a + 1}" for a in range(data.k)]
        )
        for i in range(data.n):
            writer.writerow([_fmt(v) for v in data.x[i]] + [_fmt(v) for v in data.y[i]])


def read_full_feedback_csv(path: str | Path) -> FullFeedbackDataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    d = sum(1 for c in header if c.startswith("x_"))
    k = sum(1 for c in header if c.startswith("y_"))
    table = np.array([[float(v) for v in row] for row in rows])
    return FullFeedbackDataset(table[:, :d], table[:, d : d + k])


def write_logged_csv(path: str | Path, logged: LoggedDataset) -> None:
    """Columns x_1..x_d, action, y_obs, and e_1..e_K when propensities are known."""
    path = Path(path)
    has_e = logged.true_propensity is not None
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x_{j + 1}" for j in range(logged.d)] + ["action", "y_obs"]
        if has_e:
            header += [f"e_{a + 1}" for a in range(logged.k)]
        writer.writerow(header)
        for i in range(logged.n):
            row = [_fmt(v) for v in logged.x[i]] + [str(int(logged.a[i])), _fmt(logged.y_obs[i])]
            if has_e:
                row += [_fmt(v) for v in logged.true_propensity[i]]
            writer.writerow(row)


def read_logged_csv(path: str | Path, k: int | None = None) -> LoggedDataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    d = sum(1 for c in header if c.startswith("x_"))
    n_e = sum(1 for c in header if c.startswith("e_"))
    table = np.array([[float(v) for v in row] for row in rows])
    a = table[:, d].astype(np.intp)
    y_obs = table[:, d + 1]
    e = table[:, d + 2 : d + 2 + n_e] if n_e else None
    if k is None:
        k = n_e if n_e else (2 if np.all(np.isin(a, (0, 1))) else int(a.max()))
    return LoggedDataset(x=table[:, :d], a=a, y_obs=y_obs, k=k, true_propensity=e)
