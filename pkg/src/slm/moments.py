"""Kernel-smoothed class means and pooled location-dependent covariance.

All estimators are Nadaraya-Watson weighted moments with weights from
`slm.kernel`.  Covariances are 1/n-normalized weighted second moments (no
degrees-of-freedom correction).  Leave-one-out variants are exact: the
excluded sample's weight is removed and the rest renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import MixedDataset
from .kernel import hamming_to_all, raw_weights


@dataclass(frozen=True)
class LocalMoments:
    mu1: np.ndarray
    mu2: np.ndarray
    sigma: np.ndarray
    u: np.ndarray
    theta: float


def _weights(locations: np.ndarray, u: np.ndarray, theta: float,
             exclude: int | None = None) -> np.ndarray:
    d = hamming_to_all(locations, u)
    if exclude is None:
        w = raw_weights(d, theta)
    else:
        n = d.shape[0]
        if n < 2:
            raise ValueError("leave-one-out needs at least 2 samples")
        keep = np.ones(n, dtype=bool)
        keep[exclude] = False
        w = np.zeros(n)
        w[keep] = raw_weights(d[keep], theta)
    s = w.sum()
    if s <= 0:
        raise ValueError("empty effective sample")
    return w / s


def local_mean(z: np.ndarray, locations: np.ndarray, u: np.ndarray, theta: float,
               exclude: int | None = None) -> np.ndarray:
    """Weighted average of the z rows, with optional exact leave-one-out."""
    w = _weights(locations, u, theta, exclude)
    return w @ z


def local_class_cov(z: np.ndarray, locations: np.ndarray, u: np.ndarray, theta: float,
                    exclude: int | None = None) -> np.ndarray:
    """Weighted covariance sum_i w_i z_i z_i' - mu mu' (PSD by construction)."""
    w = _weights(locations, u, theta, exclude)
    mu = w @ z
    second = (z * w[:, None]).T @ z
    sigma = second - np.outer(mu, mu)
    return 0.5 * (sigma + sigma.T)


def pooled_cov(sigma1: np.ndarray, sigma2: np.ndarray, n1: int, n2: int) -> np.ndarray:
    if sigma1.shape != sigma2.shape:
        raise ValueError("shape mismatch")
    if n1 < 1 or n2 < 1:
        raise ValueError("class sizes must be >= 1")
    n = n1 + n2
    return (n1 / n) * sigma1 + (n2 / n) * sigma2


def moments_at(dataset: MixedDataset, u: np.ndarray, theta: float,
               exclude: tuple[int, int] | None = None) -> LocalMoments:
    """Class means and pooled covariance at u.

    `exclude=(cls, i)` removes sample i of class cls from that class's
    mean and covariance and from the pooling weights.
    """
    u = np.asarray(u)
    ex1 = ex2 = None
    n1, n2 = dataset.n1, dataset.n2
    if exclude is not None:
        cls, idx = exclude
        if cls == 1:
            ex1, n1 = idx, n1 - 1
        elif cls == 2:
            ex2, n2 = idx, n2 - 1
        else:
            raise ValueError(f"class must be 1 or 2, got {cls}")
    mu1 = local_mean(dataset.z1, dataset.u1, u, theta, ex1)
    mu2 = local_mean(dataset.z2, dataset.u2, u, theta, ex2)
    s1 = local_class_cov(dataset.z1, dataset.u1, u, theta, ex1)
    s2 = local_class_cov(dataset.z2, dataset.u2, u, theta, ex2)
    return LocalMoments(mu1=mu1, mu2=mu2, sigma=pooled_cov(s1, s2, n1, n2),
                        u=u, theta=theta)
