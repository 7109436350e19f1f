"""Policy learning with squared-loss welfare surrogates and generalized posteriors.

The package is organized as a small numpy library:

- ``nnet``: fixed-architecture MLP with manual backpropagation.
- ``losses``: per-sample loss adapters fed to the trainers.
- ``surrogate``: welfare, surrogate losses, and their exact equivalences.
- ``posterior``: Gibbs posteriors, MAP training, SGLD, Laplace, credible intervals.
- ``counterfactual``: IPW/DR pseudo-outcomes and nuisance estimation.
- ``dgp``: seeded synthetic and semi-synthetic data generators.
- ``methods`` / ``baselines``: fitted decision rules.
- ``evaluation``: welfare/regret metrics, PAC-Bayes bounds, trial aggregation.
- ``experiment`` / ``cli``: deterministic benchmark harness and its frontend.
"""

from gbpl.nnet import MlpArchitecture, Batch, init_params, forward, backward
from gbpl.surrogate import FullFeedbackDataset, GibbsConfig, project_simplex
from gbpl.posterior import TrainConfig, SgldConfig, PosteriorDraws, map_train, sgld_sample
from gbpl.counterfactual import LoggedDataset, NuisanceSet
from gbpl.dgp import DgpSpec, generate_full_feedback, generate_logged
from gbpl.methods import FittedPolicy
from gbpl.evaluation import PacBayesInputs, TrialResult, AggregateRow

__version__ = "0.1.0"

__all__ = [
    "MlpArchitecture",
    "Batch",
    "init_params",
    "forward",
    "backward",
    "FullFeedbackDataset",
    "GibbsConfig",
    "project_simplex",
    "TrainConfig",
    "SgldConfig",
    "PosteriorDraws",
    "map_train",
    "sgld_sample",
    "LoggedDataset",
    "NuisanceSet",
    "DgpSpec",
    "generate_full_feedback",
    "generate_logged",
    "FittedPolicy",
    "PacBayesInputs",
    "TrialResult",
    "AggregateRow",
    "__version__",
]
