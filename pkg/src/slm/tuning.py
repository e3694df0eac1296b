"""Leave-one-out cross-validation for (theta, lambda_beta) and lambda_eta.

(theta, lambda_beta) are chosen jointly over the product grid by
minimizing the zero-intercept misclassification count R0; lambda_eta is
chosen afterwards by minimizing the full-rule count R, reusing the
leave-one-out scores zeta from the first stage.

A sample's own-class moments always exclude that sample (exact LOO via
weight subtraction); the other-class mean is full-sample, as in the R0
definition.  A K-fold approximation (excluding whole folds instead of
single samples) is available for large n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import SlmModel
from .data import MixedDataset
from .kernel import raw_weights
from .logistic import DEFAULT_MAX_ITER, DEFAULT_TOL, LogisticFit, fit_logistic
from .solver import DIAG_FLOOR, _cd_sweeps

DEFAULT_THETAS = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
LADDER_POINTS = 10
LADDER_DECADES = 3.0


@dataclass(frozen=True)
class TuneGrid:
    thetas: tuple[float, ...]
    lambdas_beta: tuple[float, ...]
    lambdas_eta: tuple[float, ...]

    def __post_init__(self):
        if not (self.thetas and self.lambdas_beta and self.lambdas_eta):
            raise ValueError("grid axes must be nonempty")
        if list(self.thetas) != sorted(self.thetas) or not all(
                0 < t <= 0.5 for t in self.thetas):
            raise ValueError("thetas must be ascending in (0, 0.5]")
        for lams in (self.lambdas_beta, self.lambdas_eta):
            if list(lams) != sorted(lams, reverse=True) or any(l < 0 for l in lams):
                raise ValueError("lambda ladders must be descending and nonnegative")


@dataclass(frozen=True)
class LooScores:
    zeta: np.ndarray  # length n1+n2, class-1 scores first


def _ladder(lam_max: float) -> tuple[float, ...]:
    lam_max = max(lam_max, 1e-12)
    return tuple(lam_max * 10.0 ** (-LADDER_DECADES * k / (LADDER_POINTS - 1))
                 for k in range(LADDER_POINTS))


def default_grid(dataset: MixedDataset) -> TuneGrid:
    """Default grids: lambda ladders start at values where the zero solution
    is optimal (pooled at theta = 0.5) and descend 3 decades."""
    lam_beta_max = 2.0 * np.abs(dataset.z1.mean(axis=0) - dataset.z2.mean(axis=0)).max()
    # logistic gradient at a = 0, a0 at its intercept-only optimum
    n1, n2 = dataset.n1, dataset.n2
    locs = np.vstack([dataset.u1, dataset.u2]).astype(float)
    y = np.concatenate([np.ones(n1), np.zeros(n2)])
    resid = n1 / (n1 + n2) - y
    lam_eta_max = np.abs(locs.T @ resid).max() / (n1 + n2)
    return TuneGrid(thetas=DEFAULT_THETAS,
                    lambdas_beta=_ladder(lam_beta_max),
                    lambdas_eta=_ladder(lam_eta_max))


def _fold_assignment(n: int, kfold: int | None) -> np.ndarray:
    if kfold is None:
        return np.arange(n)  # each sample its own fold = exact LOO
    return np.arange(n) % kfold


def _loo_zeta_grid(dataset: MixedDataset, thetas, lambdas, kfold=None,
                   solver_tol: float = 1e-7, solver_max_iter: int = 10_000):
    """Zeta scores and R0 counts for every (theta, lambda_beta) grid point.

    Returns (zetas, r0) with zetas of shape (T, L, n) and r0 of shape (T, L).
    """
    z1, u1, z2, u2 = dataset.z1, dataset.u1, dataset.z2, dataset.u2
    n1, n2, p = dataset.n1, dataset.n2, dataset.p
    n = n1 + n2
    if min(n1, n2) < 2:
        raise ValueError("LOO tuning needs at least 2 samples per class")
    lambdas = np.asarray(lambdas, dtype=float)
    nt, nl = len(thetas), len(lambdas)
    zetas = np.zeros((nt, nl, n))
    r0 = np.zeros((nt, nl), dtype=int)

    queries = np.vstack([u1, u2])
    d_q1 = (queries[:, None, :] != u1[None, :, :]).sum(axis=2)
    d_q2 = (queries[:, None, :] != u2[None, :, :]).sum(axis=2)
    folds1 = _fold_assignment(n1, kfold)
    folds2 = _fold_assignment(n2, kfold)

    for ti, theta in enumerate(thetas):
        for q in range(n):
            cls = 1 if q < n1 else 2
            i = q if cls == 1 else q - n1
            keep1 = np.ones(n1, dtype=bool)
            keep2 = np.ones(n2, dtype=bool)
            eff1, eff2 = n1, n2
            if cls == 1:
                keep1 = folds1 != folds1[i]
                eff1 = int(keep1.sum())
            else:
                keep2 = folds2 != folds2[i]
                eff2 = int(keep2.sum())

            w1 = np.zeros(n1)
            w1[keep1] = raw_weights(d_q1[q][keep1], theta)
            w1 /= w1.sum()
            w2 = np.zeros(n2)
            w2[keep2] = raw_weights(d_q2[q][keep2], theta)
            w2 /= w2.sum()

            mu1 = w1 @ z1
            mu2 = w2 @ z2
            s1 = (z1 * w1[:, None]).T @ z1 - np.outer(mu1, mu1)
            s2 = (z2 * w2[:, None]).T @ z2 - np.outer(mu2, mu2)
            omega = (eff1 * s1 + eff2 * s2) / (eff1 + eff2)
            omega = 0.5 * (omega + omega.T)
            a = mu1 - mu2
            zq = z1[i] if cls == 1 else z2[i]
            centered = zq - 0.5 * (mu1 + mu2)

            b = np.zeros(p)
            for li, lam in enumerate(lambdas):
                _cd_sweeps(omega, a, lam, b, solver_tol, solver_max_iter,
                           DIAG_FLOOR)
                zeta = b @ centered
                zetas[ti, li, q] = zeta
                wrong = zeta <= 0 if cls == 1 else zeta >= 0
                if wrong:
                    r0[ti, li] += 1
    return zetas, r0


def loo_r0(dataset: MixedDataset, theta: float, lambda_beta: float,
           kfold: int | None = None) -> tuple[LooScores, int]:
    """Zero-intercept LOO scores and misclassification count at one grid point."""
    zetas, r0 = _loo_zeta_grid(dataset, [theta], [lambda_beta], kfold)
    return LooScores(zeta=zetas[0, 0]), int(r0[0, 0])


def tune_beta(dataset: MixedDataset, grid: TuneGrid, kfold: int | None = None):
    """Minimize R0 over the (theta, lambda_beta) grid.

    Ties break toward larger theta then larger lambda_beta.  Returns
    (theta, lambda_beta, table) where table rows are (theta, lambda, r0).
    """
    zetas, r0 = _loo_zeta_grid(dataset, grid.thetas, grid.lambdas_beta, kfold)
    table = [(t, l, int(r0[ti, li]))
             for ti, t in enumerate(grid.thetas)
             for li, l in enumerate(grid.lambdas_beta)]
    best = min(table, key=lambda row: (row[2], -row[0], -row[1]))
    return best[0], best[1], table


def tune_eta(dataset: MixedDataset, zeta: LooScores, grid: TuneGrid,
             kfold: int | None = None):
    """Minimize the full-rule LOO misclassification count over lambda_eta.

    For each candidate lambda and each sample, the intercept model is
    refitted without that sample and its value at the sample's location is
    added to the sample's zeta score.  Ties break toward larger lambda.
    """
    n1, n2 = dataset.n1, dataset.n2
    n = n1 + n2
    if zeta.zeta.shape != (n,):
        raise ValueError("zeta length does not match the dataset")
    locs = np.vstack([dataset.u1, dataset.u2]).astype(float)
    labels = np.concatenate([np.ones(n1, dtype=int), np.full(n2, 2)])
    folds = np.concatenate([_fold_assignment(n1, kfold),
                            _fold_assignment(n2, kfold) + (n1 if kfold is None else 0)])

    table = []
    warm_full = None
    for lam in grid.lambdas_eta:
        full = fit_logistic(locs, labels, lam, warm=warm_full)
        warm_full = (full.a0, full.a)
        count = 0
        fits: dict[int, LogisticFit] = {}
        for k in range(n):
            f = fits.get(folds[k])
            if f is None:
                keep = folds != folds[k]
                # only the sign of the score matters for error counting,
                # so the leave-one-out fits can run at a looser tolerance
                f = fit_logistic(locs[keep], labels[keep], lam,
                                 tol=1e-5, warm=(full.a0, full.a))
                fits[folds[k]] = f
            score = zeta.zeta[k] + f.a0 + f.a @ locs[k]
            wrong = score <= 0 if labels[k] == 1 else score >= 0
            if wrong:
                count += 1
        table.append((lam, count))
    best = min(table, key=lambda row: (row[1], -row[0]))
    return best[0], table


@dataclass
class FitResult:
    model: SlmModel
    theta: float
    lambda_beta: float
    lambda_eta: float
    r0_table: list
    eta_table: list


def fit_slm(dataset: MixedDataset, grid: TuneGrid | None = None,
            kfold: int | None = None) -> FitResult:
    """Full tuning pipeline: tune (theta, lambda_beta), reuse the zeta
    scores to tune lambda_eta, then fit the final intercept model."""
    if grid is None:
        grid = default_grid(dataset)
    zetas, r0 = _loo_zeta_grid(dataset, grid.thetas, grid.lambdas_beta, kfold)
    table = [(t, l, int(r0[ti, li]))
             for ti, t in enumerate(grid.thetas)
             for li, l in enumerate(grid.lambdas_beta)]
    theta, lam_beta, _ = min(
        ((t, l, c) for (t, l, c) in table),
        key=lambda row: (row[2], -row[0], -row[1]))
    ti = grid.thetas.index(theta)
    li = grid.lambdas_beta.index(lam_beta)
    scores = LooScores(zeta=zetas[ti, li])
    lam_eta, eta_table = tune_eta(dataset, scores, grid, kfold)

    locs = np.vstack([dataset.u1, dataset.u2]).astype(float)
    labels = np.concatenate([np.ones(dataset.n1, dtype=int),
                             np.full(dataset.n2, 2)])
    eta_fit = fit_logistic(locs, labels, lam_eta)
    model = SlmModel(train=dataset, theta=theta, lambda_beta=lam_beta,
                     eta_fit=eta_fit)
    return FitResult(model=model, theta=theta, lambda_beta=lam_beta,
                     lambda_eta=lam_eta, r0_table=table, eta_table=eta_table)
