"""Deterministic benchmark harness.

One experiment = a data generating process, a feedback mode (full outcome
vectors or logged single-outcome data with a pseudo-outcome construction), a
list of methods, and a trial count. Per trial the harness generates data with
seed base_seed + trial, splits it 0.6/0.2/0.2 (train gets the rounding
remainder), fits every method with early stopping on its validation loss,
selects the surrogate scale of CV variants by validation welfare, and scores
test welfare and regret against the realized-outcome oracle.

Seed streams are isolated per (trial, method), keyed by a CRC of the method
name, so adding or removing a method never perturbs the other methods' rows.
Reruns of the same config produce byte-identical CSV files.
"""

from __future__ import annotations

import json
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from gbpl import nnet
from gbpl.baselines import BASELINE_KINDS, fit_baseline
from gbpl.counterfactual import (
    PSEUDO_DR,
    PSEUDO_IPW,
    LoggedDataset,
    NuisanceSet,
    dr_pseudo_outcomes,
    fit_outcome_regression,
    fit_propensity,
    ipw_pseudo_outcomes,
    make_folds,
)
from gbpl.dgp import DgpSpec, generate_full_feedback, generate_logged
from gbpl.evaluation import (
    RULE_DETERMINISTIC,
    RULE_RANDOMIZED,
    TrialResult,
    aggregate,
    oracle_welfare,
    test_welfare,
)
from gbpl.methods import (
    POLICY_TANH_SCORE,
    FittedPolicy,
    fit_policy_fullvector,
    fit_score_binary,
)
from gbpl.posterior import (
    GibbsConfig,
    SgldConfig,
    TrainConfig,
    map_train,
    sgld_sample,
    welfare_credible_interval,
)
from gbpl.losses import BinarySurrogateLoss
from gbpl.surrogate import FullFeedbackDataset

KIND_GBPL = "gbpl"
DEFAULT_ZETA_GRID = (1.0, 0.1, 0.01, 0.001)

_SPLIT_TAG = 0x5917


@dataclass(frozen=True)
class MethodSpec:
    """One method row in the benchmark tables.

    ``kind`` is ``"gbpl"`` or a baseline kind; surrogate methods carry either
    a fixed ``zeta`` or a ``zeta_grid`` selected by validation welfare.
    A surrogate method with neither gets the default grid.
    """

    name: str
    kind: str
    zeta: float | None = None
    zeta_grid: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind == KIND_GBPL:
            if self.zeta is not None and self.zeta_grid is not None:
                raise ValueError(f"method {self.name!r}: give at most one of zeta / zeta_grid")
            if self.zeta is None and self.zeta_grid is None:
                object.__setattr__(self, "zeta_grid", DEFAULT_ZETA_GRID)
        elif self.kind not in BASELINE_KINDS:
            raise ValueError(f"unknown method kind {self.kind!r}")


@dataclass(frozen=True)
class FeedbackSpec:
    mode: str = "full"  # "full" | "logged"
    logging: str = "logistic"
    clip: float = 0.05
    pseudo: str = PSEUDO_DR
    propensity: str = "true"  # "true" | "fitted"
    folds: int = 0  # cross-fitting folds for the outcome regression; 0 disables

    def __post_init__(self):
        if self.mode not in ("full", "logged"):
            raise ValueError("feedback mode must be 'full' or 'logged'")
        if self.pseudo not in (PSEUDO_IPW, PSEUDO_DR):
            raise ValueError("pseudo must be 'ipw' or 'dr'")
        if self.propensity not in ("true", "fitted"):
            raise ValueError("propensity must be 'true' or 'fitted'")
        if self.folds < 0:
            raise ValueError("folds must be nonnegative")


@dataclass(frozen=True)
class ExperimentConfig:
    dgp: DgpSpec
    methods: tuple[MethodSpec, ...]
    output_dir: str
    feedback: FeedbackSpec = FeedbackSpec()
    split: tuple[float, float, float] = (0.6, 0.2, 0.2)
    trials: int = 10
    base_seed: int = 0
    train: TrainConfig = TrainConfig()
    eta: float = 1.0
    tau2: float = 1.0
    hidden: tuple[int, ...] = (128, 128)
    jobs: int = 1

    def __post_init__(self):
        if len(self.methods) < 1:
            raise ValueError("need at least one method")
        if len({m.name for m in self.methods}) != len(self.methods):
            raise ValueError("method names must be unique")
        frac = np.asarray(self.split, dtype=np.float64)
        if frac.shape != (3,) or np.any(frac <= 0) or abs(frac.sum() - 1.0) > 1e-9:
            raise ValueError("split must be three positive fractions summing to 1")
        if self.trials < 1:
            raise ValueError("trials must be positive")


def split_rows(n: int, split, seed_entropy) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Disjoint (train, val, test) index arrays; train takes the remainder."""
    rng = np.random.default_rng(seed_entropy)
    perm = rng.permutation(n)
    n_val = int(np.floor(split[1] * n))
    n_test = int(np.floor(split[2] * n))
    n_train = n - n_val - n_test
    return perm[:n_train], perm[n_train : n_train + n_val], perm[n_train + n_val :]


def method_seed(base_seed: int, trial: int, method_name: str) -> int:
    seq = np.random.SeedSequence([base_seed, trial, zlib.crc32(method_name.encode())])
    return int(seq.generate_state(1, dtype=np.uint64)[0] % (2**63))


def _subset_full(data: FullFeedbackDataset, rows: np.ndarray) -> FullFeedbackDataset:
    return FullFeedbackDataset(data.x[rows], data.y[rows])


def _subset_logged(logged: LoggedDataset, rows: np.ndarray) -> LoggedDataset:
    e = None if logged.true_propensity is None else logged.true_propensity[rows]
    return LoggedDataset(logged.x[rows], logged.a[rows], logged.y_obs[rows], logged.k, e)


@dataclass
class _TrialData:
    """Everything one trial's method fits see: a training table (realized or
    pseudo outcomes) over all rows, plus the realized test set."""

    x: np.ndarray
    table: np.ndarray  # (n, K) outcomes the objectives consume
    train_rows: np.ndarray
    val_rows: np.ndarray
    test: FullFeedbackDataset  # realized outcomes, evaluation only
    k: int


def _prepare_trial(cfg: ExperimentConfig, trial: int) -> _TrialData:
    data_seed = cfg.base_seed + trial
    spec = replace(cfg.dgp, seed=data_seed)
    if cfg.feedback.mode == "full":
        full, _ = generate_full_feedback(spec)
        train_rows, val_rows, test_rows = split_rows(full.n, cfg.split, [data_seed, _SPLIT_TAG])
        return _TrialData(
            x=full.x,
            table=full.y,
            train_rows=train_rows,
            val_rows=val_rows,
            test=_subset_full(full, test_rows),
            k=full.k,
        )

    logged, hidden_full = generate_logged(spec, cfg.feedback.logging, cfg.feedback.clip)
    train_rows, val_rows, test_rows = split_rows(logged.n, cfg.split, [data_seed, _SPLIT_TAG])
    nuisance_seed = method_seed(cfg.base_seed, trial, "__nuisance__")
    nuisance_cfg = replace(cfg.train, seed=nuisance_seed)

    if cfg.feedback.propensity == "true":
        e_hat = logged.true_propensity
    else:
        model = "logistic" if logged.k == 2 else "softmax"
        e_hat = fit_propensity(
            _subset_logged(logged, train_rows), model, cfg.feedback.clip, nuisance_cfg,
            predict_x=logged.x,
        )

    if cfg.feedback.pseudo == PSEUDO_DR:
        train_logged = _subset_logged(logged, train_rows)
        arch = nnet.MlpArchitecture(logged.d, cfg.hidden, logged.k, nnet.HEAD_IDENTITY)
        gamma_hat = np.empty((logged.n, logged.k))
        if cfg.feedback.folds >= 2:
            fold_id = make_folds(train_rows.size, cfg.feedback.folds, nuisance_seed)
            gamma_hat[train_rows] = fit_outcome_regression(
                train_logged, arch, nuisance_cfg, fold_id=fold_id
            )
            rest = np.setdiff1d(np.arange(logged.n), train_rows)
            gamma_hat[rest] = fit_outcome_regression(
                train_logged, arch, nuisance_cfg, predict_x=logged.x[rest]
            )
        else:
            gamma_hat[:] = fit_outcome_regression(
                train_logged, arch, nuisance_cfg, predict_x=logged.x
            )
        # fold ids index the training subset, so they stay out of the row-aligned set
        nuisances = NuisanceSet(e_hat, gamma_hat, epsilon_clip=cfg.feedback.clip)
        table = dr_pseudo_outcomes(logged, nuisances.e_hat, nuisances.gamma_hat)
    else:
        nuisances = NuisanceSet(e_hat, epsilon_clip=cfg.feedback.clip)
        table = ipw_pseudo_outcomes(logged, nuisances.e_hat)

    return _TrialData(
        x=logged.x,
        table=table,
        train_rows=train_rows,
        val_rows=val_rows,
        test=_subset_full(hidden_full, test_rows),
        k=logged.k,
    )


def _fit_gbpl(td: _TrialData, zeta: float, cfg: ExperimentConfig, seed: int):
    gibbs = GibbsConfig(zeta=zeta, eta=cfg.eta, tau2=cfg.tau2,
                        kind="binary" if td.k == 2 else "full_vector")
    train_cfg = replace(cfg.train, seed=seed)
    if td.k == 2:
        u = td.table[:, 0] - td.table[:, 1]
        return fit_score_binary(td.x, u, gibbs, train_cfg, td.train_rows, td.val_rows, cfg.hidden)
    return fit_policy_fullvector(td.x, td.table, gibbs, train_cfg,
                                 td.train_rows, td.val_rows, cfg.hidden)


def _run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialResult]:
    td = _prepare_trial(cfg, trial)
    rule = RULE_DETERMINISTIC if td.k == 2 else RULE_RANDOMIZED
    oracle = oracle_welfare(td.test)
    val_table = FullFeedbackDataset(td.x[td.val_rows], td.table[td.val_rows])

    results = []
    for m in cfg.methods:
        seed = method_seed(cfg.base_seed, trial, m.name)
        selected = None
        if m.kind == KIND_GBPL:
            if m.zeta is not None:
                policy = _fit_gbpl(td, m.zeta, cfg, seed)
                selected = m.zeta
            else:
                fits = [(z, _fit_gbpl(td, z, cfg, seed)) for z in m.zeta_grid]
                welfare_val = [test_welfare(val_table, p, rule) for _, p in fits]
                best = max(welfare_val)
                selected = min(z for (z, _), w in zip(fits, welfare_val) if w >= best - 1e-12)
                policy = dict(fits)[selected]
        else:
            train_cfg = replace(cfg.train, seed=seed)
            fit_data = FullFeedbackDataset(td.x, td.table)
            policy = fit_baseline(m.kind, fit_data, train_cfg,
                                  td.train_rows, td.val_rows, cfg.hidden)
        welfare = test_welfare(td.test, policy, rule)
        results.append(
            TrialResult(
                method_id=m.name,
                welfare=welfare,
                regret=oracle - welfare,
                seed=seed,
                selected_zeta=selected,
            )
        )
    return results


def _run_trial_from_dict(args) -> tuple[int, list[TrialResult]]:
    cfg_dict, trial = args
    return trial, _run_trial(parse_config(cfg_dict), trial)


def _fmt(v: float) -> str:
    return repr(float(v))


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run all trials and write trials.csv, aggregate.csv, welfare_lists.csv,
    and manifest.json into the output directory. Idempotent per config."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = int(os.environ.get("GBPL_JOBS", cfg.jobs))
    if jobs > 1 and cfg.trials > 1:
        cfg_dict = config_to_dict(cfg)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(_run_trial_from_dict,
                                  [(cfg_dict, t) for t in range(cfg.trials)]))
        pairs.sort(key=lambda p: p[0])
        per_trial = [rows for _, rows in pairs]
    else:
        per_trial = [_run_trial(cfg, t) for t in range(cfg.trials)]

    with (out / "trials.csv").open("w", newline="") as fh:
        fh.write("trial,method,welfare,regret,selected_zeta,seed\n")
        for t, rows in enumerate(per_trial):
            for r in rows:
                z = "" if r.selected_zeta is None else _fmt(r.selected_zeta)
                fh.write(f"{t},{r.method_id},{_fmt(r.welfare)},{_fmt(r.regret)},{z},{r.seed}\n")

    with (out / "aggregate.csv").open("w", newline="") as fh:
        fh.write("method,welfare_mean,welfare_var,welfare_se,regret_mean,regret_se,trials\n")
        for m in cfg.methods:
            rows = [r for trial_rows in per_trial for r in trial_rows if r.method_id == m.name]
            if len(rows) >= 2:
                agg = aggregate(rows)
                fh.write(
                    f"{agg.method_id},{_fmt(agg.welfare_mean)},{_fmt(agg.welfare_var)},"
                    f"{_fmt(agg.welfare_se)},{_fmt(agg.regret_mean)},{_fmt(agg.regret_se)},"
                    f"{agg.trials}\n"
                )
            else:
                fh.write(f"{m.name},{_fmt(rows[0].welfare)},,,{_fmt(rows[0].regret)},,1\n")

    with (out / "welfare_lists.csv").open("w", newline="") as fh:
        fh.write("method,trial,welfare\n")
        for m in cfg.methods:
            for t, rows in enumerate(per_trial):
                for r in rows:
                    if r.method_id == m.name:
                        fh.write(f"{m.name},{t},{_fmt(r.welfare)}\n")

    (out / "manifest.json").write_text(
        json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"
    )
    return out


# ---------------------------------------------------------------------------
# posterior visualization run


@dataclass(frozen=True)
class PosteriorVizConfig:
    """One-dimensional bounded-score run with uncertainty bands.

    Mirrors the reference visualization setup: uniform covariates on
    [-2.5, 2.5], scale 1.0, hidden widths (64, 64), minibatch 128, learning
    rate 1e-3, weight decay 1e-4, and the default sampler settings.
    """

    output_dir: str
    n: int = 1500
    zeta: float = 1.0
    eta: float = 1.0
    tau2: float = 1.0
    hidden: tuple[int, ...] = (64, 64)
    split: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0
    train: TrainConfig = TrainConfig(weight_decay=1e-4)
    sgld: SgldConfig = SgldConfig()
    grid_points: int = 200
    eval_points: tuple[float, ...] = (-2.0, -1.0, 0.0, 1.0, 2.0)
    level: float = 0.95


def run_posterior_viz(cfg: PosteriorVizConfig) -> Path:
    """Train the MAP score, sample the generalized posterior, and emit CSVs:
    pointwise score bands on a grid against the population target, welfare
    draws with their credible interval, and raw score draws at fixed points.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    spec = DgpSpec(family="onedimviz", n=cfg.n, seed=cfg.seed)
    full, _ = generate_full_feedback(spec)
    train_rows, val_rows, test_rows = split_rows(full.n, cfg.split, [cfg.seed, _SPLIT_TAG])
    test = _subset_full(full, test_rows)

    gibbs = GibbsConfig(zeta=cfg.zeta, eta=cfg.eta, tau2=cfg.tau2, kind="binary")
    arch = nnet.MlpArchitecture(1, cfg.hidden, 1, nnet.HEAD_TANH)
    loss = BinarySurrogateLoss(nnet.Batch(full.x, full.outcome_diff()), cfg.zeta)
    train_cfg = replace(cfg.train, seed=cfg.seed)
    map_params = map_train(arch, loss, gibbs, train_cfg, train_rows, val_rows)

    sgld_cfg = replace(cfg.sgld, seed=cfg.seed)
    draws = sgld_sample(arch, loss, gibbs, map_params, sgld_cfg, rows=train_rows)

    grid = np.linspace(-2.5, 2.5, cfg.grid_points)
    fs = np.stack(
        [nnet.forward(arch, w, grid[:, None])[:, 0] for w in draws.draws]
    )  # (S, grid)
    alpha = (1.0 - cfg.level) / 2.0
    lo, hi = np.quantile(fs, [alpha, 1.0 - alpha], axis=0)
    target = np.clip(1.2 * np.sin(grid) / cfg.zeta, -1.0, 1.0)
    with (out / "score_grid.csv").open("w", newline="") as fh:
        fh.write("x,f_mean,f_lo,f_hi,target\n")
        for j in range(grid.size):
            fh.write(
                f"{_fmt(grid[j])},{_fmt(fs[:, j].mean())},{_fmt(lo[j])},"
                f"{_fmt(hi[j])},{_fmt(target[j])}\n"
            )

    mean_w, lo_w, hi_w = welfare_credible_interval(draws, test, "deterministic", cfg.level)
    per_draw = [
        test_welfare(test, FittedPolicy(arch, w, POLICY_TANH_SCORE), RULE_DETERMINISTIC)
        for w in draws.draws
    ]
    with (out / "welfare_draws.csv").open("w", newline="") as fh:
        fh.write("draw,welfare\n")
        for s, v in enumerate(per_draw):
            fh.write(f"{s},{_fmt(v)}\n")
    with (out / "welfare_interval.csv").open("w", newline="") as fh:
        fh.write("mean,lo,hi,level\n")
        fh.write(f"{_fmt(mean_w)},{_fmt(lo_w)},{_fmt(hi_w)},{_fmt(cfg.level)}\n")

    pts = np.asarray(cfg.eval_points, dtype=np.float64)
    fpts = np.stack(
        [nnet.forward(arch, w, pts[:, None])[:, 0] for w in draws.draws]
    )  # (S, len(pts))
    with (out / "score_draws_at_points.csv").open("w", newline="") as fh:
        fh.write("x0,draw,f\n")
        for j, x0 in enumerate(pts):
            for s in range(fpts.shape[0]):
                fh.write(f"{_fmt(x0)},{s},{_fmt(fpts[s, j])}\n")

    manifest = viz_config_to_dict(cfg)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


# ---------------------------------------------------------------------------
# config (de)serialization

CONFIG_SCHEMA = {
    "dgp": {
        "family": "binary1|binary2|binary3|multi1|multi2|multi3|onedimviz|semisynthetic_csv",
        "n": "int >= 1",
        "d": "int, optional (family default)",
        "k": "int, optional (family default)",
        "noise_sd": "float >= 0, optional (family default)",
        "csv_path": "string, required for semisynthetic_csv",
    },
    "feedback": {
        "mode": "full|logged (default full)",
        "logging": "logistic|softmax (logged mode)",
        "clip": "float in (0, 1/K], overlap clip (default 0.05)",
        "pseudo": "ipw|dr (logged mode, default dr)",
        "propensity": "true|fitted (default true)",
        "folds": "int >= 0, cross-fitting folds for the outcome regression (default 0)",
    },
    "methods": [
        {
            "name": "unique display name",
            "kind": "gbpl|diff_reg|plugin_reg|plugin_reg_k|weighted_logistic|direct_welfare",
            "zeta": "float > 0 (gbpl, fixed scale)",
            "zeta_grid": "list of floats (gbpl, validation-selected scale)",
        }
    ],
    "split": "three positive fractions summing to 1 (default [0.6, 0.2, 0.2])",
    "trials": "int >= 1",
    "base_seed": "int",
    "train": {
        "learning_rate": "float > 0 (default 1e-3)",
        "batch_size": "int >= 1 (default 128)",
        "max_epochs": "int >= 1 (default 100)",
        "patience": "int >= 1 (default 10)",
        "weight_decay": "float >= 0 (default 0)",
    },
    "eta": "float > 0 (default 1)",
    "tau2": "float > 0 (default 1)",
    "hidden": "list of ints (default [128, 128])",
    "jobs": "int >= 1; env GBPL_JOBS overrides",
    "output_dir": "path",
}


def parse_config(raw: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a plain JSON-style dict."""
    dgp_raw = dict(raw["dgp"])
    dgp = DgpSpec(
        family=dgp_raw["family"],
        n=int(dgp_raw["n"]),
        d=dgp_raw.get("d"),
        k=dgp_raw.get("k"),
        noise_sd=dgp_raw.get("noise_sd"),
        seed=0,
        csv_path=dgp_raw.get("csv_path"),
    )
    methods = tuple(
        MethodSpec(
            name=m["name"],
            kind=m["kind"],
            zeta=m.get("zeta"),
            zeta_grid=tuple(m["zeta_grid"]) if m.get("zeta_grid") else None,
        )
        for m in raw["methods"]
    )
    fb_raw = raw.get("feedback", {})
    feedback = FeedbackSpec(
        mode=fb_raw.get("mode", "full"),
        logging=fb_raw.get("logging", "logistic"),
        clip=float(fb_raw.get("clip", 0.05)),
        pseudo=fb_raw.get("pseudo", PSEUDO_DR),
        propensity=fb_raw.get("propensity", "true"),
        folds=int(fb_raw.get("folds", 0)),
    )
    tr_raw = raw.get("train", {})
    train = TrainConfig(
        learning_rate=float(tr_raw.get("learning_rate", 1e-3)),
        batch_size=int(tr_raw.get("batch_size", 128)),
        max_epochs=int(tr_raw.get("max_epochs", 100)),
        patience=int(tr_raw.get("patience", 10)),
        weight_decay=float(tr_raw.get("weight_decay", 0.0)),
    )
    return ExperimentConfig(
        dgp=dgp,
        methods=methods,
        output_dir=raw["output_dir"],
        feedback=feedback,
        split=tuple(raw.get("split", (0.6, 0.2, 0.2))),
        trials=int(raw.get("trials", 10)),
        base_seed=int(raw.get("base_seed", 0)),
        train=train,
        eta=float(raw.get("eta", 1.0)),
        tau2=float(raw.get("tau2", 1.0)),
        hidden=tuple(raw.get("hidden", (128, 128))),
        jobs=int(raw.get("jobs", 1)),
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "dgp": {
            "family": cfg.dgp.family,
            "n": cfg.dgp.n,
            "d": cfg.dgp.d,
            "k": cfg.dgp.k,
            "noise_sd": cfg.dgp.noise_sd,
            "csv_path": cfg.dgp.csv_path,
        },
        "feedback": {
            "mode": cfg.feedback.mode,
            "logging": cfg.feedback.logging,
            "clip": cfg.feedback.clip,
            "pseudo": cfg.feedback.pseudo,
            "propensity": cfg.feedback.propensity,
            "folds": cfg.feedback.folds,
        },
        "methods": [
            {
                "name": m.name,
                "kind": m.kind,
                "zeta": m.zeta,
                "zeta_grid": list(m.zeta_grid) if m.zeta_grid else None,
            }
            for m in cfg.methods
        ],
        "split": list(cfg.split),
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
        "train": {
            "learning_rate": cfg.train.learning_rate,
            "batch_size": cfg.train.batch_size,
            "max_epochs": cfg.train.max_epochs,
            "patience": cfg.train.patience,
            "weight_decay": cfg.train.weight_decay,
        },
        "eta": cfg.eta,
        "tau2": cfg.tau2,
        "hidden": list(cfg.hidden),
        "jobs": cfg.jobs,
        "output_dir": str(cfg.output_dir),
    }


def viz_config_to_dict(cfg: PosteriorVizConfig) -> dict:
    return {
        "n": cfg.n,
        "zeta": cfg.zeta,
        "eta": cfg.eta,
        "tau2": cfg.tau2,
        "hidden": list(cfg.hidden),
        "split": list(cfg.split),
        "seed": cfg.seed,
        "train": {
            "learning_rate": cfg.train.learning_rate,
            "batch_size": cfg.train.batch_size,
            "max_epochs": cfg.train.max_epochs,
            "patience": cfg.train.patience,
            "weight_decay": cfg.train.weight_decay,
        },
        "sgld": {
            "step_size": cfg.sgld.step_size,
            "burn_in": cfg.sgld.burn_in,
            "n_draws": cfg.sgld.n_draws,
            "thin": cfg.sgld.thin,
            "batch_size": cfg.sgld.batch_size,
            "clip_norm": cfg.sgld.clip_norm,
        },
        "grid_points": cfg.grid_points,
        "eval_points": list(cfg.eval_points),
        "level": cfg.level,
        "output_dir": str(cfg.output_dir),
    }
