"""Semiparametric location-model (SLM) linear discriminant for mixed data.

Classifies observations with a continuous part z (p-dimensional) and a
binary "location" part u (d-dimensional).  Conditional on u, each class is
Gaussian with a location-dependent mean and a shared location-dependent
covariance.  The classification direction at u is estimated by an
l1-penalized quadratic loss on kernel-smoothed moments; the intercept is a
penalized logistic regression on the binary variables.
"""

from .data import ColumnSchema, MixedDataset, load_dataset, parse_schema
from .kernel import KernelWeights, hamming, normalized_weights
from .moments import LocalMoments, local_class_cov, local_mean, moments_at, pooled_cov
from .solver import QuadProblem, SparseSolution, kkt_residual, solve
from .logistic import LogisticFit, eta_value, fit_logistic, logistic_loss_grad
from .classifier import (
    SlmModel,
    beta_at,
    classify,
    discriminant,
    error_rate,
    load_model,
    save_model,
)
from .tuning import LooScores, TuneGrid, default_grid, fit_slm, loo_r0, tune_beta, tune_eta
from .simlab import (
    SimulationSpec,
    bayes_risk_mc,
    benchmark,
    concentration_probe,
    conditional_bayes_risk,
    illustration_example,
    model_beta,
    model_sigma,
    regret_curve,
    sample_dataset,
    true_eta,
)
from .baselines import LinearBaselineModel, baseline_error_rate, dsda_fit, plg_fit

__version__ = "0.1.0"
