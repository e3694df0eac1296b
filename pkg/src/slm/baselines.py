"""Linear baseline classifiers on the concatenated feature vector [z; u].

DSDA: lasso least-squares discriminant (responses +n/n1 / -n/n2, intercept
unpenalized), solved with the sparse quadratic solver.  PLG: l1-penalized
logistic regression via the penalized-logistic module.  Continuous features
are standardized to unit variance for the fit; the returned coefficients
act on the raw feature scale.  Both are tuned by the same LOO error
criterion and ladder grids as the main classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import MixedDataset
from .logistic import fit_logistic
from .solver import DIAG_FLOOR, _cd_sweeps

VALID_KINDS = ("DSDA", "PLG")


@dataclass(frozen=True)
class LinearBaselineModel:
    kind: str
    intercept: float
    coef: np.ndarray  # acts on raw [z; u], width p+d
    lam: float

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")

    def score(self, z: np.ndarray, u: np.ndarray) -> float:
        return self.intercept + float(self.coef @ np.concatenate([z, u]))


def _features(dataset: MixedDataset):
    """Concatenated [z; u] rows (class 1 first) and the z scales."""
    f = np.hstack([np.vstack([dataset.z1, dataset.z2]),
                   np.vstack([dataset.u1, dataset.u2]).astype(float)])
    scale = np.ones(f.shape[1])
    sd = f[:, :dataset.p].std(axis=0)
    scale[:dataset.p] = np.where(sd > 0, sd, 1.0)
    return f / scale, scale


def _dsda_responses(n1: int, n2: int) -> np.ndarray:
    n = n1 + n2
    return np.concatenate([np.full(n1, n / n1), np.full(n2, -n / n2)])


def _dsda_solve(f: np.ndarray, y: np.ndarray, lam: float,
                warm: np.ndarray | None = None):
    n = f.shape[0]
    fm = f.mean(axis=0)
    ym = y.mean()
    fc = f - fm
    omega = fc.T @ fc / n
    a = fc.T @ (y - ym) / n
    b = np.zeros(f.shape[1]) if warm is None else warm.copy()
    _cd_sweeps(omega, a, lam, b, 1e-9, 20_000, DIAG_FLOOR)
    b0 = ym - fm @ b
    return b0, b


def dsda_fit(train: MixedDataset, lam: float) -> LinearBaselineModel:
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    f, scale = _features(train)
    y = _dsda_responses(train.n1, train.n2)
    b0, b = _dsda_solve(f, y, lam)
    return LinearBaselineModel(kind="DSDA", intercept=float(b0),
                               coef=b / scale, lam=lam)


def plg_fit(train: MixedDataset, lam: float) -> LinearBaselineModel:
    f, scale = _features(train)
    labels = np.concatenate([np.ones(train.n1, dtype=int),
                             np.full(train.n2, 2)])
    fit = fit_logistic(f, labels, lam)
    return LinearBaselineModel(kind="PLG", intercept=fit.a0,
                               coef=fit.a / scale, lam=lam)


def baseline_error_rate(model: LinearBaselineModel, test: MixedDataset) -> float:
    f = np.hstack([np.vstack([test.z1, test.z2]),
                   np.vstack([test.u1, test.u2]).astype(float)])
    scores = model.intercept + f @ model.coef
    labels = np.concatenate([np.ones(test.n1, dtype=int),
                             np.full(test.n2, 2)])
    predicted = np.where(scores > 0, 1, 2)
    return float((predicted != labels).mean())


def _lambda_ladder(lam_max: float, points: int = 10, decades: float = 3.0):
    lam_max = max(lam_max, 1e-12)
    return [lam_max * 10.0 ** (-decades * k / (points - 1))
            for k in range(points)]


def dsda_tuned(train: MixedDataset, lambdas=None,
               kfold: int | None = None) -> tuple[LinearBaselineModel, list]:
    """DSDA with lambda chosen by LOO (or K-fold) misclassification count.

    Leave-one-out second moments are exact rank-one downdates of the full
    Gram matrix; ties break toward larger lambda.
    """
    f, scale = _features(train)
    n, m = f.shape
    y = _dsda_responses(train.n1, train.n2)
    labels = np.concatenate([np.ones(train.n1, dtype=int),
                             np.full(train.n2, 2)])
    if lambdas is None:
        fm = f.mean(axis=0)
        a_full = (f - fm).T @ (y - y.mean()) / n
        lambdas = _lambda_ladder(2.0 * np.abs(a_full).max())

    gram = f.T @ f
    xy = f.T @ y
    fsum = f.sum(axis=0)
    ysum = y.sum()
    folds = np.arange(n) if kfold is None else np.arange(n) % kfold
    counts = []
    warms = {}
    for lam in lambdas:
        count = 0
        for fold in np.unique(folds):
            out = folds == fold
            k = int(out.sum())
            fo = f[out]
            fm = (fsum - fo.sum(axis=0)) / (n - k)
            ym = (ysum - y[out].sum()) / (n - k)
            omega = (gram - fo.T @ fo) / (n - k) - np.outer(fm, fm)
            omega = 0.5 * (omega + omega.T)
            a = (xy - fo.T @ y[out]) / (n - k) - fm * ym
            b = warms.get(fold, np.zeros(m)).copy()
            _cd_sweeps(omega, a, lam, b, 1e-9, 20_000, DIAG_FLOOR)
            warms[fold] = b
            b0 = ym - fm @ b
            scores = b0 + fo @ b
            wrong = np.where(labels[out] == 1, scores <= 0, scores >= 0)
            count += int(wrong.sum())
        counts.append((lam, count))
    best = min(counts, key=lambda row: (row[1], -row[0]))[0]
    return dsda_fit(train, best), counts


def plg_tuned(train: MixedDataset, lambdas=None,
              kfold: int | None = None) -> tuple[LinearBaselineModel, list]:
    """PLG with lambda chosen by LOO (or K-fold) misclassification count."""
    f, scale = _features(train)
    n = f.shape[0]
    labels = np.concatenate([np.ones(train.n1, dtype=int),
                             np.full(train.n2, 2)])
    if lambdas is None:
        y = (labels == 1).astype(float)
        resid = train.n1 / n - y
        lambdas = _lambda_ladder(np.abs(f.T @ resid).max() / n)
    folds = np.arange(n) if kfold is None else np.arange(n) % kfold
    counts = []
    warm_full = None
    for lam in lambdas:
        full = fit_logistic(f, labels, lam, warm=warm_full)
        warm_full = (full.a0, full.a)
        count = 0
        for fold in np.unique(folds):
            out = folds == fold
            fit = fit_logistic(f[~out], labels[~out], lam,
                               tol=1e-5, warm=(full.a0, full.a))
            scores = fit.a0 + f[out] @ fit.a
            wrong = np.where(labels[out] == 1, scores <= 0, scores >= 0)
            count += int(wrong.sum())
        counts.append((lam, count))
    best = min(counts, key=lambda row: (row[1], -row[0]))[0]
    return plg_fit(train, best), counts
