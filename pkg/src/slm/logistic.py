"""l1-penalized logistic regression with an unpenalized intercept.

The loss is the 1/n-averaged logistic negative log-likelihood with class 1
as the success indicator, plus lambda * |a|_1 on the slope coefficients
only.  Fitted by proximal gradient (soft-threshold on the slopes, plain
gradient step on the intercept) with backtracking on the step size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 50_000


@dataclass(frozen=True)
class LogisticFit:
    a0: float
    a: np.ndarray
    lam: float
    converged: bool
    final_gap: float


def _sigmoid(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    es = np.exp(s[~pos])
    out[~pos] = es / (1.0 + es)
    return out


def logistic_loss_grad(a0: float, a: np.ndarray, x: np.ndarray,
                       y: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Averaged logistic loss and its gradient; y is 1 for class 1 else 0.

    Uses log(1+exp(s)) = softplus(s) evaluated stably for large |s|.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[1] != a.shape[0] or x.shape[0] != y.shape[0]:
        raise ValueError("shape mismatch")
    n = x.shape[0]
    s = a0 + x @ a
    loss = float(np.mean(np.logaddexp(0.0, s) - y * s))
    resid = _sigmoid(s) - y
    grad0 = float(resid.mean())
    grad = x.T @ resid / n
    return loss, grad0, grad


def optimality_gap(a0: float, a: np.ndarray, x: np.ndarray, y: np.ndarray,
                   lam: float) -> float:
    """Max violation of the subgradient optimality conditions."""
    _, g0, g = logistic_loss_grad(a0, a, x, y)
    gap = abs(g0)
    active = a != 0
    if active.any():
        gap = max(gap, np.abs(g[active] + lam * np.sign(a[active])).max())
    if (~active).any():
        gap = max(gap, max(0.0, np.abs(g[~active]).max() - lam))
    return float(gap)


def _soft(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def fit_logistic(x: np.ndarray, labels: np.ndarray, lam: float,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 warm: tuple[float, np.ndarray] | None = None) -> LogisticFit:
    """Fit the penalized logistic objective; labels are in {1, 2}."""
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if not np.isfinite(x).all():
        raise ValueError("non-finite features")
    if not np.isin(labels, (1, 2)).all():
        raise ValueError("labels must be 1 or 2")
    y = (labels == 1).astype(float)
    if y.all() or not y.any():
        raise ValueError("both classes must be present")

    n, width = x.shape
    if warm is None:
        a0, a = 0.0, np.zeros(width)
    else:
        a0, a = float(warm[0]), np.array(warm[1], dtype=float)

    # exact Lipschitz bound of the smooth part on the augmented design
    xa = np.column_stack([np.ones(n), x])
    lcap = max(float(np.linalg.eigvalsh(xa.T @ xa)[-1]) / (4.0 * n), 1e-12)

    # FISTA with adaptive restart; the fixed step 1/lcap is guaranteed valid
    w0, w = a0, a.copy()
    momentum = 1.0
    gap = np.inf
    for it in range(max_iter):
        _, g0, g = logistic_loss_grad(w0, w, x, y)
        new_a0 = w0 - g0 / lcap
        new_a = _soft(w - g / lcap, lam / lcap)
        if (w0 - new_a0) * (new_a0 - a0) + (w - new_a) @ (new_a - a) > 0:
            momentum = 1.0  # restart the momentum sequence
        next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
        shift = (momentum - 1.0) / next_momentum
        w0 = new_a0 + shift * (new_a0 - a0)
        w = new_a + shift * (new_a - a)
        a0, a, momentum = new_a0, new_a, next_momentum

        _, g0, g = logistic_loss_grad(a0, a, x, y)
        gap = abs(g0)
        active = a != 0
        if active.any():
            gap = max(gap, np.abs(g[active] + lam * np.sign(a[active])).max())
        if (~active).any():
            gap = max(gap, max(0.0, np.abs(g[~active]).max() - lam))
        if gap <= tol:
            return LogisticFit(a0=a0, a=a, lam=lam, converged=True,
                               final_gap=float(gap))
    return LogisticFit(a0=a0, a=a, lam=lam, converged=False, final_gap=float(gap))


def eta_value(fit: LogisticFit, u: np.ndarray) -> float:
    """Intercept function a0 + a' u at location u."""
    u = np.asarray(u, dtype=float)
    if u.shape != fit.a.shape:
        raise ValueError("width mismatch")
    return float(fit.a0 + fit.a @ u)
