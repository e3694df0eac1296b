import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slm.solver import QuadProblem, kkt_residual, objective, solve


def _prox_oracle(omega, a, lam, iters=200_000):
    """Independent long-run proximal-gradient minimizer of the same loss."""
    step = 1.0 / (2.0 * np.linalg.eigvalsh(omega)[-1] + 1e-12)
    b = np.zeros_like(a)
    for _ in range(iters):
        g = 2.0 * (omega @ b - a)
        x = b - step * g
        # prox of lam*|.|_1 with step s thresholds at s*lam
        b = np.sign(x) * np.maximum(np.abs(x) - step * lam, 0.0)
    return b


def _random_problem(rng, p):
    m = rng.standard_normal((p + 2, p))
    omega = m.T @ m / (p + 2) + 0.1 * np.eye(p)
    a = rng.standard_normal(p)
    lam = float(rng.uniform(0.0, 1.0))
    return QuadProblem(omega=omega, a=a, lam=lam)


def test_problem_validation():
    with pytest.raises(ValueError):
        QuadProblem(omega=np.array([[1.0, 0.5], [0.0, 1.0]]),
                    a=np.zeros(2), lam=0.1)
    with pytest.raises(ValueError):
        QuadProblem(omega=np.eye(2), a=np.zeros(3), lam=0.1)
    with pytest.raises(ValueError):
        QuadProblem(omega=np.eye(2), a=np.zeros(2), lam=-1.0)


def test_unpenalized_solves_linear_system():
    rng = np.random.default_rng(0)
    prob = _random_problem(rng, 4)
    prob = QuadProblem(omega=prob.omega, a=prob.a, lam=0.0)
    sol = solve(prob, tol=1e-12)
    np.testing.assert_allclose(sol.b, np.linalg.solve(prob.omega, prob.a),
                               atol=1e-8)


def test_large_lambda_gives_zero():
    omega = np.eye(3)
    a = np.array([1.0, -2.0, 0.5])
    lam = 2.0 * np.abs(a).max() + 0.01  # KKT: zero is optimal iff lam >= 2|a|_inf
    sol = solve(QuadProblem(omega=omega, a=a, lam=lam))
    np.testing.assert_array_equal(sol.b, np.zeros(3))
    assert sol.active_set == ()


def test_diagonal_problem_closed_form():
    # omega = I: b_j = S(a_j, lam/2)
    a = np.array([3.0, -0.2, 1.0])
    sol = solve(QuadProblem(omega=np.eye(3), a=a, lam=1.0))
    np.testing.assert_allclose(sol.b, [2.5, 0.0, 0.5], atol=1e-10)


def test_kkt_residual_zero_at_optimum():
    sol = solve(QuadProblem(omega=np.eye(2), a=np.array([1.0, 0.1]), lam=0.5))
    prob = QuadProblem(omega=np.eye(2), a=np.array([1.0, 0.1]), lam=0.5)
    assert kkt_residual(prob, sol.b) <= 1e-10
    # perturbing an active coordinate raises the residual
    bad = sol.b.copy()
    bad[0] += 0.1
    assert kkt_residual(prob, bad) > 0.1


def test_matches_proximal_gradient_oracle():
    rng = np.random.default_rng(42)
    for _ in range(10):
        prob = _random_problem(rng, 3)
        sol = solve(prob, tol=1e-10)
        oracle = _prox_oracle(prob.omega, prob.a, prob.lam, iters=50_000)
        np.testing.assert_allclose(sol.b, oracle, atol=1e-7)


def test_warm_start_agrees_with_cold():
    rng = np.random.default_rng(7)
    prob = _random_problem(rng, 5)
    cold = solve(prob, tol=1e-12)
    warm = solve(prob, tol=1e-12, warm_start=rng.standard_normal(5))
    np.testing.assert_allclose(cold.b, warm.b, atol=1e-8)


def test_diagonal_floor_handles_semidefinite():
    # one zero-variance coordinate; solver must not divide by zero
    omega = np.diag([1.0, 0.0])
    sol = solve(QuadProblem(omega=omega, a=np.array([1.0, 0.0]), lam=0.1))
    assert np.isfinite(sol.b).all()


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=0, max_value=10_000))
def test_objective_no_worse_than_zero_and_kkt_small(seed):
    rng = np.random.default_rng(seed)
    prob = _random_problem(rng, 4)
    sol = solve(prob, tol=1e-9)
    assert objective(prob, sol.b) <= objective(prob, np.zeros(4)) + 1e-12
    assert kkt_residual(prob, sol.b) <= 1e-6
