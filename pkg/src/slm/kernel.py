"""Hamming distances and normalized exponential kernel weights.

Weights follow the bounded reparameterization theta = exp(-1/(d*h)) /
(1 + exp(-1/(d*h))): the weight of a sample at Hamming distance t is
proportional to (theta/(1-theta))**t.  theta = 0.5 gives uniform weights
(global means); theta = 0 concentrates on the minimum-distance samples
(cell means).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelWeights:
    weights: np.ndarray
    theta: float


def hamming(u1: np.ndarray, u2: np.ndarray) -> int:
    """Number of differing coordinates between two binary vectors."""
    u1 = np.asarray(u1)
    u2 = np.asarray(u2)
    if u1.shape != u2.shape:
        raise ValueError(f"length mismatch: {u1.shape} vs {u2.shape}")
    return int(np.count_nonzero(u1 != u2))


def hamming_to_all(locations: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Hamming distance from each row of `locations` to `u`."""
    locations = np.asarray(locations)
    u = np.asarray(u)
    if locations.shape[1] != u.shape[0]:
        raise ValueError("width mismatch")
    return (locations != u[None, :]).sum(axis=1)


def raw_weights(distances: np.ndarray, theta: float) -> np.ndarray:
    """Unnormalized weights, stabilized by subtracting the minimum distance.

    The result has maximum 1 (attained at the minimum distance), so
    normalizing is always well defined, including at theta = 0.
    """
    distances = np.asarray(distances, dtype=float)
    if distances.size == 0:
        raise ValueError("empty distance vector")
    if (distances < 0).any():
        raise ValueError("distances must be nonnegative")
    if not 0.0 <= theta <= 0.5:
        raise ValueError(f"theta must be in [0, 0.5], got {theta}")
    dmin = distances.min()
    if theta == 0.0:
        return (distances == dmin).astype(float)
    # log(theta/(1-theta)) <= 0, so exponents are <= 0 and never overflow
    log_ratio = np.log(theta) - np.log1p(-theta)
    return np.exp((distances - dmin) * log_ratio)


def normalized_weights(distances: np.ndarray, theta: float) -> KernelWeights:
    """Kernel weights proportional to (theta/(1-theta))**distance, summing to 1."""
    w = raw_weights(distances, theta)
    return KernelWeights(weights=w / w.sum(), theta=theta)
