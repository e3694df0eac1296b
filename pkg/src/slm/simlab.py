"""Simulation models 1-4: generators, closed-form oracle quantities,
Monte-Carlo Bayes risk, benchmark/regret harnesses, the two-variable
illustration example, and a local-mean concentration probe.

All four models share the structure: class-c locations are product
Bernoulli (0.5 + xi_j for class 1, uniform for class 2), and given u the
continuous vector is N(+-Sigma(u)beta(u)/2, Sigma(u)) with Sigma(u) the
AR(1) Toeplitz matrix rho(ubar)^|i-j|.  Sampling uses the O(p)
autoregressive recursion rather than a dense factorization.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .baselines import baseline_error_rate, dsda_tuned, plg_tuned
from .classifier import error_rate
from .data import MixedDataset
from .moments import local_mean
from .tuning import fit_slm

ETA_SENTINEL = 1e12
TEST_PER_CLASS = 100
VALID_METHODS = ("SLM", "DSDA", "PLG", "BAYES")


def _default_xi(model_id: int, d: int) -> np.ndarray:
    xi = np.zeros(d)
    xi[:5] = 0.25 if model_id == 1 else 0.30
    return xi


@dataclass(frozen=True)
class SimulationSpec:
    model_id: int
    d: int
    p: int
    n1: int
    n2: int
    xi: np.ndarray = None
    seed: int = 0

    def __post_init__(self):
        if self.model_id not in (1, 2, 3, 4):
            raise ValueError(f"unknown model id {self.model_id}")
        if min(self.d, self.p, self.n1, self.n2) < 1:
            raise ValueError("d, p, n1, n2 must be positive")
        xi = (_default_xi(self.model_id, self.d) if self.xi is None
              else np.asarray(self.xi, dtype=float))
        if xi.shape != (self.d,):
            raise ValueError("xi must have length d")
        if np.any(0.5 + xi < 0) or np.any(0.5 + xi > 1):
            raise ValueError("0.5 + xi must lie in [0, 1]")
        object.__setattr__(self, "xi", xi)


def _rho(model_id: int, ubar: float) -> float:
    if model_id == 1:
        return ubar
    if model_id == 2:
        return np.sqrt(ubar)
    if model_id == 3:
        return 3.0 * ubar * (1.0 - ubar)
    if model_id == 4:
        return ubar * np.exp(-ubar)
    raise ValueError(f"unknown model id {model_id}")


def model_sigma(model_id: int, u: np.ndarray, p: int) -> np.ndarray:
    """Toeplitz rho(ubar)^|i-j| with the 0**0 = 1 convention."""
    rho = _rho(model_id, float(np.mean(u)))
    lags = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    with np.errstate(divide="ignore"):
        sigma = np.where(lags == 0, 1.0, float(rho) ** lags)
    return sigma


def _beta_support(model_id: int) -> int:
    return {1: 2, 2: 2, 3: 3, 4: 5}[model_id]


def model_beta(model_id: int, u: np.ndarray, p: int) -> np.ndarray:
    u = np.asarray(u)
    d = u.shape[0]
    t = u.sum() / np.sqrt(d) - np.sqrt(d) / 2.0
    beta = np.zeros(p)
    k = _beta_support(model_id)
    if model_id in (1, 2, 3):
        beta[:k] = 5.0 * t
    else:
        beta[:k] = np.sign(t) * 0.5 * np.exp(abs(2.0 * t))
    return beta


def _oracle_mu1(model_id: int, u: np.ndarray, p: int) -> np.ndarray:
    return model_sigma(model_id, u, p) @ model_beta(model_id, u, p) / 2.0


def true_eta(spec: SimulationSpec, u: np.ndarray) -> float:
    """log(p1(u)/p2(u)) for product-Bernoulli locations (priors cancel)."""
    u = np.asarray(u, dtype=float)
    hi, lo = 0.5 + spec.xi, 0.5 - spec.xi
    with np.errstate(divide="ignore"):
        terms = u * np.log(hi / 0.5) + (1.0 - u) * np.log(lo / 0.5)
    if not np.all(np.isfinite(terms)):
        warnings.warn("degenerate location probability; clipping eta")
        terms = np.clip(terms, -ETA_SENTINEL, ETA_SENTINEL)
    return float(terms.sum())


def _sample_class(rng, spec: SimulationSpec, cls: int, n: int):
    """Locations and AR(1)-correlated Gaussians for one class."""
    prob = 0.5 + spec.xi if cls == 1 else np.full(spec.d, 0.5)
    u = (rng.random((n, spec.d)) < prob).astype(np.int8)
    rho = np.array([_rho(spec.model_id, ub) for ub in u.mean(axis=1)])
    eps = rng.standard_normal((n, spec.p))
    z = np.empty((n, spec.p))
    z[:, 0] = eps[:, 0]
    scale = np.sqrt(1.0 - rho ** 2)
    for k in range(1, spec.p):
        z[:, k] = rho * z[:, k - 1] + scale * eps[:, k]
    # shift by the class mean: mu1 = Sigma beta / 2, nonzero beta only on
    # the leading support so (Sigma beta)_i is a short sum of rho powers
    sup = _beta_support(spec.model_id)
    t = u.sum(axis=1) / np.sqrt(spec.d) - np.sqrt(spec.d) / 2.0
    if spec.model_id in (1, 2, 3):
        bval = np.tile(5.0 * t[:, None], (1, sup))
    else:
        bval = np.tile((np.sign(t) * 0.5 * np.exp(np.abs(2.0 * t)))[:, None],
                       (1, sup))
    mu = np.zeros((n, spec.p))
    idx = np.arange(spec.p)
    with np.errstate(divide="ignore"):
        for j in range(sup):
            lag = np.abs(idx - j)
            pw = np.where(lag == 0, 1.0, rho[:, None] ** lag[None, :])
            mu += bval[:, j:j + 1] * pw
    sign = 1.0 if cls == 1 else -1.0
    return z + sign * mu / 2.0, u


def sample_dataset(spec: SimulationSpec) -> tuple[MixedDataset, MixedDataset]:
    """Training set of (n1, n2) and a 100/100 test set, deterministically."""
    rng = np.random.default_rng(spec.seed)
    z1, u1 = _sample_class(rng, spec, 1, spec.n1)
    z2, u2 = _sample_class(rng, spec, 2, spec.n2)
    train = MixedDataset(z1=z1, u1=u1, z2=z2, u2=u2)
    tz1, tu1 = _sample_class(rng, spec, 1, TEST_PER_CLASS)
    tz2, tu2 = _sample_class(rng, spec, 2, TEST_PER_CLASS)
    return train, MixedDataset(z1=tz1, u1=tu1, z2=tz2, u2=tu2)


def conditional_bayes_risk(spec: SimulationSpec, u: np.ndarray) -> float:
    """Risk of the Bayes rule given the location u."""
    eta = true_eta(spec, u)
    beta = model_beta(spec.model_id, u, spec.p)
    delta = float(beta @ model_sigma(spec.model_id, u, spec.p) @ beta)
    w1 = 1.0 / (1.0 + np.exp(-eta))  # pi1 p1 / (pi1 p1 + pi2 p2)
    if delta <= 0:
        return float(min(w1, 1.0 - w1))
    root = np.sqrt(delta)
    return float(w1 * norm.cdf(-root / 2.0 - eta / root)
                 + (1.0 - w1) * norm.cdf(-root / 2.0 + eta / root))


def _draw_locations(rng, spec: SimulationSpec, n: int):
    cls = rng.integers(1, 3, size=n)
    prob = np.where(cls[:, None] == 1, (0.5 + spec.xi)[None, :], 0.5)
    return cls, (rng.random((n, spec.d)) < prob).astype(np.int8)


def bayes_risk_mc(spec: SimulationSpec, n_draws: int,
                  method: str = "conditional") -> tuple[float, float]:
    """Monte-Carlo Bayes risk over the location mixture.

    "conditional" averages the closed-form risk given u (Rao-Blackwellized);
    "counting" classifies sampled (z, u) pairs with the Bayes rule.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    rng = np.random.default_rng(spec.seed)
    cls, u = _draw_locations(rng, spec, n_draws)
    hi, lo = 0.5 + spec.xi, 0.5 - spec.xi
    with np.errstate(divide="ignore"):
        c1 = np.log(hi / 0.5) - np.log(lo / 0.5)
        c0 = np.log(lo / 0.5).sum()
    eta = np.clip(u @ c1 + c0, -ETA_SENTINEL, ETA_SENTINEL)
    # delta depends on u only through its sum: precompute per sum value
    s = u.sum(axis=1)
    delta_by_s = np.empty(spec.d + 1)
    for sv in range(spec.d + 1):
        uv = np.zeros(spec.d)
        uv[:sv] = 1.0
        b = model_beta(spec.model_id, uv, spec.p)
        delta_by_s[sv] = b @ model_sigma(spec.model_id, uv, spec.p) @ b
    delta = delta_by_s[s]
    w1 = 1.0 / (1.0 + np.exp(-eta))
    if method == "conditional":
        root = np.sqrt(np.maximum(delta, 1e-300))
        risk = np.where(
            delta <= 0,
            np.minimum(w1, 1.0 - w1),
            w1 * norm.cdf(-root / 2.0 - eta / root)
            + (1.0 - w1) * norm.cdf(-root / 2.0 + eta / root))
    elif method == "counting":
        root = np.sqrt(np.maximum(delta, 0.0))
        g = rng.standard_normal(n_draws)
        # score of the Bayes rule at z ~ N(+-Sigma beta/2, Sigma):
        # beta'z + eta ~ N(+-delta/2 + eta, delta)
        sign = np.where(cls == 1, 1.0, -1.0)
        score = sign * delta / 2.0 + eta + root * g
        predicted = np.where(score > 0, 1, 2)
        risk = (predicted != cls).astype(float)
    else:
        raise ValueError(f"unknown method {method!r}")
    est = float(risk.mean())
    se = float(risk.std(ddof=1) / np.sqrt(n_draws))
    return est, se


def _oracle_error(spec: SimulationSpec, test: MixedDataset) -> float:
    """Test error of the true Bayes rule."""
    wrong = 0
    for cls, z, u in [(1, test.z1, test.u1), (2, test.z2, test.u2)]:
        for i in range(z.shape[0]):
            beta = model_beta(spec.model_id, u[i], spec.p)
            score = beta @ z[i] + true_eta(spec, u[i])
            predicted = 1 if score > 0 else 2
            wrong += predicted != cls
    return wrong / (test.n1 + test.n2)


def _replication_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, rep]).generate_state(1)[0])


def _run_method(method: str, spec, train, test, kfold):
    if method == "SLM":
        result = fit_slm(train, kfold=kfold)
        return error_rate(result.model, test)
    if method == "DSDA":
        model, _ = dsda_tuned(train, kfold=kfold)
        return baseline_error_rate(model, test)
    if method == "PLG":
        model, _ = plg_tuned(train, kfold=kfold)
        return baseline_error_rate(model, test)
    if method == "BAYES":
        return _oracle_error(spec, test)
    raise ValueError(f"unknown method {method!r}")


def benchmark(spec: SimulationSpec, methods, replications: int,
              kfold: int | None = None):
    """Mean/sd test error per method over fresh train/test replications.

    Per-replication failures are recorded and skipped.  Returns
    (rows, failures) with rows of (method, mean, sd).
    """
    if replications < 1:
        raise ValueError("replications must be positive")
    methods = [m.upper() for m in methods]
    for m in methods:
        if m not in VALID_METHODS:
            raise ValueError(f"unknown method {m!r}")
    errors = {m: [] for m in methods}
    failures = []
    for rep in range(replications):
        rep_spec = replace(spec, seed=_replication_seed(spec.seed, rep))
        train, test = sample_dataset(rep_spec)
        for m in methods:
            try:
                errors[m].append(_run_method(m, rep_spec, train, test, kfold))
            except Exception as exc:  # noqa: BLE001 - record and continue
                failures.append((rep, m, repr(exc)))
    rows = []
    for m in methods:
        vals = np.array(errors[m])
        if vals.size == 0:
            rows.append((m, float("nan"), float("nan")))
        else:
            sd = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            rows.append((m, float(vals.mean()), sd))
    return rows, failures


def regret_curve(spec: SimulationSpec, n_values, methods, replications: int,
                 bayes_draws: int = 200_000, kfold: int | None = None):
    """Mean test error minus the MC Bayes risk, per (n, method)."""
    for n in n_values:
        if n % 2:
            raise ValueError("n values must be even (n1 = n2)")
    bayes, _ = bayes_risk_mc(spec, bayes_draws)
    rows = []
    for n in n_values:
        sub = replace(spec, n1=n // 2, n2=n // 2)
        table, _ = benchmark(sub, methods, replications, kfold=kfold)
        for method, mean, _sd in table:
            rows.append((n, method, mean - bayes))
    return rows


def illustration_example(n_draws: int, seed: int = 0):
    """Two-variable example: MC risk of the rule X*(2U-1) > 0 versus the
    best X + aU > b rule over a grid a, b in [-6, 6] step 0.05 (plus the
    limiting a = b -> infinity rule)."""
    if n_draws < 10_000:
        raise ValueError("n_draws must be at least 10^4")
    rng = np.random.default_rng(seed)
    cls = rng.integers(1, 3, size=n_draws)
    u = rng.integers(0, 2, size=n_draws)
    mean = np.where(cls == 1, 2.0 * u - 1.0, 1.0 - 2.0 * u)
    x = mean + rng.standard_normal(n_draws)

    score = x * (2.0 * u - 1.0)
    bayes_wrong = np.where(cls == 1, score <= 0, score > 0)
    bayes_mc = float(bayes_wrong.mean())

    grid = np.round(np.arange(-6.0, 6.0 + 1e-9, 0.05), 10)
    a = grid[None, :]
    b = grid[:, None]
    # error counts via sorted per-(class, u) groups; rule: class 1 iff
    # x > b - a*u, ties to class 2
    def below(mask, thresholds):
        xs = np.sort(x[mask])
        return np.searchsorted(xs, thresholds, side="right"), xs.size

    c1u0, n1u0 = below((cls == 1) & (u == 0), b[:, 0])          # (B,)
    c2u0, n2u0 = below((cls == 2) & (u == 0), b[:, 0])
    c1u1, n1u1 = below((cls == 1) & (u == 1), b - a)            # (B, A)
    c2u1, n2u1 = below((cls == 2) & (u == 1), b - a)
    wrong = (c1u0[:, None] + c1u1
             + (n2u0 - c2u0)[:, None] + (n2u1 - c2u1))
    best = wrong.min()
    # limiting a = b -> infinity: class 1 iff u = 1 and x > 0
    c1u1_0, _ = below((cls == 1) & (u == 1), np.array([0.0]))
    c2u1_0, _ = below((cls == 2) & (u == 1), np.array([0.0]))
    limit_wrong = n1u0 + int(c1u1_0[0]) + (n2u1 - int(c2u1_0[0]))
    best = min(best, limit_wrong)
    return bayes_mc, float(best / n_draws)


def _ball(d: int, radius: int):
    """All binary locations within Hamming radius of the origin."""
    out = []
    for r in range(radius + 1):
        for ones in itertools.combinations(range(d), r):
            u = np.zeros(d, dtype=np.int8)
            u[list(ones)] = 1
            out.append(u)
    return out

def concentration_probe(spec: SimulationSpec, n_list, radius: int,
                        probes: int, theta: float = 0.1):
    """Mean (over seeds) of the sup over the ball at the origin of the
    class-1 local-mean error, per training size."""
    if radius > 2:
        raise ValueError("radius must be at most 2")
    if probes < 1:
        raise ValueError("probes must be positive")
    ball = _ball(spec.d, radius)
    targets = [_oracle_mu1(spec.model_id, u, spec.p) for u in ball]
    rows = []
    for n in n_list:
        sup_errors = []
        for probe in range(probes):
            seed = _replication_seed(spec.seed, probe * 1_000_003 + n)
            sub = replace(spec, n1=n // 2, n2=n - n // 2, seed=seed)
            train, _ = sample_dataset(sub)
            sup = 0.0
            for u, target in zip(ball, targets):
                mu_hat = local_mean(train.z1, train.u1, u, theta)
                sup = max(sup, float(np.abs(mu_hat - target).max()))
            sup_errors.append(sup)
        rows.append((n, float(np.mean(sup_errors))))
    return rows
