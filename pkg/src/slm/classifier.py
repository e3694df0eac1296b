"""The fitted semiparametric location-model classifier.

Prediction is memory-based: the model keeps its training data and, for
each queried location u, solves for the local sparse direction on
kernel-smoothed moments.  Directions are cached per exact location; the
cache is semantically transparent.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .data import DataError, MixedDataset
from .logistic import LogisticFit, eta_value
from .moments import moments_at
from .solver import QuadProblem, SparseSolution, solve

FORMAT_VERSION = 1


@dataclass
class SlmModel:
    train: MixedDataset
    theta: float
    lambda_beta: float
    eta_fit: LogisticFit
    cache_enabled: bool = True
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.theta <= 0.5:
            raise ValueError("theta must be in [0, 0.5]")
        if self.lambda_beta < 0:
            raise ValueError("lambda_beta must be nonnegative")


def _local(model: SlmModel, u: np.ndarray) -> tuple[SparseSolution, np.ndarray]:
    u = np.asarray(u, dtype=np.uint8)
    key = u.tobytes()
    if model.cache_enabled:
        with model._lock:
            hit = model._cache.get(key)
        if hit is not None:
            return hit
    mom = moments_at(model.train, u, model.theta)
    sol = solve(QuadProblem(omega=mom.sigma, a=mom.mu1 - mom.mu2,
                            lam=model.lambda_beta))
    mid = 0.5 * (mom.mu1 + mom.mu2)
    if model.cache_enabled:
        with model._lock:
            model._cache[key] = (sol, mid)
    return sol, mid


def beta_at(model: SlmModel, u: np.ndarray) -> SparseSolution:
    """Sparse local direction at u (cached by exact location)."""
    return _local(model, u)[0]


def precompute_ball(model: SlmModel, center: np.ndarray, radius: int) -> int:
    """Eagerly solve all locations within Hamming radius of center."""
    center = np.asarray(center, dtype=np.uint8)
    count = 0
    for r in range(radius + 1):
        for idx in combinations(range(center.shape[0]), r):
            u = center.copy()
            u[list(idx)] ^= 1
            beta_at(model, u)
            count += 1
    return count


def discriminant(model: SlmModel, z: np.ndarray, u: np.ndarray) -> float:
    """beta(u)' [z - (mu1(u)+mu2(u))/2] + eta(u)."""
    z = np.asarray(z, dtype=float)
    sol, mid = _local(model, u)
    return float(sol.b @ (z - mid) + eta_value(model.eta_fit, np.asarray(u, dtype=float)))


def classify(model: SlmModel, z: np.ndarray, u: np.ndarray) -> int:
    """Class 1 iff the discriminant is strictly positive; ties go to class 2."""
    return 1 if discriminant(model, z, u) > 0 else 2


def error_rate(model: SlmModel, test: MixedDataset) -> float:
    if test.p != model.train.p or test.d != model.train.d:
        raise ValueError("test dimensions do not match the model")
    wrong = 0
    for cls in (1, 2):
        z, u = test.class_arrays(cls)
        for i in range(z.shape[0]):
            if classify(model, z[i], u[i]) != cls:
                wrong += 1
    return wrong / (test.n1 + test.n2)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _render(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f"{pad}  {json.dumps(k)}: {_render(v, indent + 1).lstrip()}"
            for k, v in obj.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, list):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            body = ", ".join(_fmt(v) if isinstance(v, float) else str(v) for v in obj)
            return f"{pad}[{body}]"
        items = ",\n".join(_render(v, indent + 1) for v in obj)
        return f"{pad}[\n{items}\n{pad}]"
    if isinstance(obj, float):
        return pad + _fmt(obj)
    return pad + json.dumps(obj)


def save_model(model: SlmModel) -> str:
    """Serialize to versioned JSON text; the direction cache is dropped.

    Floats are written with 17 significant digits so save -> load -> save
    is byte-identical.
    """
    ds = model.train
    doc = {
        "format_version": FORMAT_VERSION,
        "theta": float(model.theta),
        "lambda_beta": float(model.lambda_beta),
        "eta": {
            "a0": float(model.eta_fit.a0),
            "a": [float(v) for v in model.eta_fit.a],
        },
        "train": {
            "p": ds.p,
            "d": ds.d,
            "labels": [ds.labels[0], ds.labels[1]],
            "class1": [{"u": [int(v) for v in ds.u1[i]],
                        "z": [float(v) for v in ds.z1[i]]}
                       for i in range(ds.n1)],
            "class2": [{"u": [int(v) for v in ds.u2[i]],
                        "z": [float(v) for v in ds.z2[i]]}
                       for i in range(ds.n2)],
        },
    }
    return _render(doc) + "\n"


def load_model(text: str) -> SlmModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"model file is not valid: {e}") from e
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise DataError("model file is missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {doc['format_version']}")
    for key in ("theta", "lambda_beta", "eta", "train"):
        if key not in doc:
            raise DataError(f"model file is missing field {key!r}")
    tr = doc["train"]
    p, d = int(tr["p"]), int(tr["d"])
    labels = tuple(tr.get("labels", ["1", "2"]))

    def rows(entries):
        u = np.array([e["u"] for e in entries], dtype=np.uint8).reshape(len(entries), d)
        z = np.array([e["z"] for e in entries], dtype=float).reshape(len(entries), p)
        return z, u

    z1, u1 = rows(tr["class1"])
    z2, u2 = rows(tr["class2"])
    eta = doc["eta"]
    a = np.asarray(eta["a"], dtype=float)
    if a.shape != (d,):
        raise DataError("eta coefficient width does not match d")
    fit = LogisticFit(a0=float(eta["a0"]), a=a, lam=0.0, converged=True, final_gap=0.0)
    return SlmModel(
        train=MixedDataset(z1=z1, u1=u1, z2=z2, u2=u2, labels=labels),
        theta=float(doc["theta"]),
        lambda_beta=float(doc["lambda_beta"]),
        eta_fit=fit,
    )
