import numpy as np
import pytest

from cotransport.qp import (
    QpProblem,
    QpStatus,
    brute_force_oracle,
    solve,
    verify_kkt,
)


def random_problem(rng, n_max=6, m_max=8):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    B = rng.normal(size=(n, n))
    H = B @ B.T + np.eye(n) * (0.1 + rng.random())
    f = rng.normal(size=n)
    rows = tuple((rng.normal(size=n), float(rng.normal())) for _ in range(m))
    return QpProblem(H, f, rows)


class TestProblemValidation:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            QpProblem(np.array([[1.0, 0.5], [0.0, 1.0]]), np.zeros(2))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            QpProblem(np.diag([1.0, -1.0]), np.zeros(2))

    def test_rejects_bad_row_length(self):
        with pytest.raises(ValueError):
            QpProblem(np.eye(2), np.zeros(2), ((np.ones(3), 0.0),))


class TestSolve:
    def test_unconstrained_minimum(self):
        # the controller cost form: minimize ||qd - qd_adm||^2 + l ||delta||^2
        q_adm = np.array([0.3, -1.2, 0.7])
        H = 2.0 * np.diag([1.0, 1.0, 1.0, 1e4])
        f = -2.0 * np.concatenate([q_adm, [0.0]])
        sol = solve(QpProblem(H, f))
        assert sol.status is QpStatus.OPTIMAL
        assert np.allclose(sol.z[:3], q_adm, atol=1e-12)
        assert sol.z[3] == pytest.approx(0.0, abs=1e-12)

    def test_single_halfspace_projection(self):
        # minimize ||x - (1, 0)||^2 subject to -x_0 >= -0.5
        problem = QpProblem(2.0 * np.eye(2), np.array([-2.0, 0.0]),
                            ((np.array([-1.0, 0.0]), -0.5),))
        sol = solve(problem)
        assert sol.status is QpStatus.OPTIMAL
        assert np.allclose(sol.z, [0.5, 0.0], atol=1e-10)
        assert sol.kkt_residual < 1e-10

    def test_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(250):
            problem = random_problem(rng)
            got = solve(problem)
            want = brute_force_oracle(problem)
            assert got.status == want.status
            if got.status is QpStatus.OPTIMAL:
                assert np.max(np.abs(got.z - want.z)) < 1e-6
                assert got.kkt_residual <= 1e-8

    def test_infeasible_pair(self):
        # x >= 1 and -x >= 0 cannot both hold
        problem = QpProblem(np.eye(1), np.zeros(1),
                            ((np.array([1.0]), 1.0), (np.array([-1.0]), 0.0)))
        assert solve(problem).status is QpStatus.INFEASIBLE
        assert brute_force_oracle(problem).status is QpStatus.INFEASIBLE

    def test_degenerate_duplicated_rows(self):
        rng = np.random.default_rng(18)
        for _ in range(25):
            n = 3
            B = rng.normal(size=(n, n))
            H = B @ B.T + np.eye(n)
            f = rng.normal(size=n)
            a = rng.normal(size=n)
            b = float(rng.normal())
            plain = solve(QpProblem(H, f, ((a, b),)))
            doubled = solve(QpProblem(H, f, ((a, b), (a.copy(), b))))
            assert doubled.status is QpStatus.OPTIMAL
            assert np.max(np.abs(plain.z - doubled.z)) < 1e-8

    def test_deterministic_bit_identical(self):
        rng = np.random.default_rng(19)
        problem = random_problem(rng, n_max=5, m_max=6)
        a = solve(problem)
        b = solve(problem)
        assert a.z.tobytes() == b.z.tobytes()
        assert a.active_set == b.active_set

    def test_warm_start_same_answer(self):
        rng = np.random.default_rng(20)
        for _ in range(40):
            problem = random_problem(rng)
            cold = solve(problem)
            if cold.status is not QpStatus.OPTIMAL:
                continue
            warm = solve(problem, warm_start=cold.active_set)
            assert np.max(np.abs(warm.z - cold.z)) < 1e-9
            scrambled = solve(problem, warm_start=(0,) if problem.n_rows else None)
            assert np.max(np.abs(scrambled.z - cold.z)) < 1e-8

    def test_scaling_invariance(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            problem = random_problem(rng)
            sol = solve(problem)
            if sol.status is not QpStatus.OPTIMAL:
                continue
            scaled = QpProblem(7.3 * problem.H, 7.3 * problem.f, problem.rows)
            sol_scaled = solve(scaled)
            assert np.max(np.abs(sol.z - sol_scaled.z)) < 1e-9

    def test_objective_never_below_relaxation(self):
        # the dual active-set path tightens a relaxation, so the constrained
        # optimum can never beat the unconstrained one (direction recorded in
        # the decisions ledger)
        rng = np.random.default_rng(22)
        for _ in range(50):
            problem = random_problem(rng)
            sol = solve(problem)
            if sol.status is not QpStatus.OPTIMAL:
                continue
            unconstrained = solve(QpProblem(problem.H, problem.f))
            assert sol.objective >= unconstrained.objective - 1e-9


class TestVerifyKkt:
    def test_exact_solution_tiny_residual(self):
        problem = QpProblem(2.0 * np.eye(2), np.array([-2.0, 0.0]),
                            ((np.array([-1.0, 0.0]), -0.5),))
        sol = solve(problem)
        assert verify_kkt(problem, sol.z, sol.multipliers) < 1e-10

    def test_perturbed_solution_detected(self):
        problem = QpProblem(2.0 * np.eye(2), np.array([-2.0, 0.0]),
                            ((np.array([-1.0, 0.0]), -0.5),))
        sol = solve(problem)
        z = sol.z + np.array([1e-3, 0.0])
        assert verify_kkt(problem, z, sol.multipliers) >= 1e-4

    def test_unconstrained_reduces_to_stationarity(self):
        problem = QpProblem(np.eye(3), np.array([1.0, -2.0, 0.5]))
        z = -problem.f
        assert verify_kkt(problem, z, np.zeros(0)) < 1e-12


class TestOracle:
    def test_row_cap(self):
        H = np.eye(2)
        rows = tuple((np.ones(2), -1.0) for _ in range(13))
        with pytest.raises(ValueError):
            brute_force_oracle(QpProblem(H, np.zeros(2), rows))

    def test_oracle_solution_satisfies_kkt(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            problem = random_problem(rng, n_max=4, m_max=6)
            sol = brute_force_oracle(problem)
            if sol.status is QpStatus.OPTIMAL:
                assert verify_kkt(problem, sol.z, sol.multipliers) < 1e-6
