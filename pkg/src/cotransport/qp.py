"""Dense strictly-convex QP solver for the per-cycle control problem.

minimize  0.5 z^T H z + f^T z   subject to  a_i . z >= b_i

Solved with a dual active-set method: start at the unconstrained minimum and
add violated rows one at a time, dropping blocking rows as their multipliers
hit zero. Multipliers stay nonnegative throughout, every iterate is optimal
for its working set, and infeasibility is detected when a violated row can
neither move the primal point nor trade off against the working set. Problem
sizes here are tiny (tens of variables and rows), so each pivot re-solves a
dense KKT system instead of updating factorizations.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


class QpStatus(enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class QpProblem:
    """Cost matrix H (symmetric positive definite), linear cost f, and
    inequality rows (a, b) each meaning a . z >= b."""

    H: np.ndarray
    f: np.ndarray
    rows: tuple[tuple[np.ndarray, float], ...] = ()

    def __post_init__(self):
        H = np.array(self.H, dtype=float)
        f = np.array(self.f, dtype=float).ravel()
        n = f.size
        if H.shape != (n, n):
            raise ValueError(f"H must be {n}x{n}, got {H.shape}")
        if np.max(np.abs(H - H.T)) > 1e-10:
            raise ValueError("H must be symmetric")
        try:
            np.linalg.cholesky(H)
        except np.linalg.LinAlgError as exc:
            raise ValueError("H must be positive definite") from exc
        rows = []
        for a, b in self.rows:
            a = np.array(a, dtype=float).ravel()
            if a.shape != (n,):
                raise ValueError(f"row coefficient length {a.size} != {n} variables")
            rows.append((a, float(b)))
        H.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "rows", tuple(rows))

    @property
    def n_vars(self) -> int:
        return self.f.size

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def A(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.n_vars))
        return np.vstack([a for a, _ in self.rows])

    @property
    def b(self) -> np.ndarray:
        return np.array([b for _, b in self.rows])

    def objective(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=float)
        return float(0.5 * z @ self.H @ z + self.f @ z)


@dataclass
class QpSolution:
    z: np.ndarray
    status: QpStatus
    active_set: tuple[int, ...]
    multipliers: np.ndarray
    kkt_residual: float
    iterations: int
    objective: float = field(default=np.nan)


def _solve_working_set(problem: QpProblem, working: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Equality-constrained optimum on the working set: returns (z, lambda)
    satisfying H z + f = A_W^T lambda and A_W z = b_W."""
    n = problem.n_vars
    if not working:
        sol = np.linalg.solve(problem.H, -problem.f)
        sol = sol + np.linalg.solve(problem.H, -problem.f - problem.H @ sol)
        return sol, np.zeros(0)
    N = problem.A[working].T
    k = len(working)
    K = np.block([[problem.H, N], [N.T, np.zeros((k, k))]])
    rhs = np.concatenate([-problem.f, problem.b[working]])
    sol = np.linalg.solve(K, rhs)
    sol = sol + np.linalg.solve(K, rhs - K @ sol)  # one refinement pass
    return sol[:n], -sol[n:]


def _directions(problem: QpProblem, working: list[int], normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Primal step z and dual trade-off r for introducing a new normal."""
    n = problem.n_vars
    if not working:
        return np.linalg.solve(problem.H, normal), np.zeros(0)
    N = problem.A[working].T
    k = len(working)
    K = np.block([[problem.H, N], [N.T, np.zeros((k, k))]])
    rhs = np.concatenate([normal, np.zeros(k)])
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]


def _pack_multipliers(n_rows: int, working: list[int], u: list[float]) -> np.ndarray:
    mult = np.zeros(n_rows)
    for row, val in zip(working, u):
        mult[row] = val
    return mult


def solve(problem: QpProblem, max_iter: int = DEFAULT_MAX_ITER,
          warm_start: tuple[int, ...] | None = None) -> QpSolution:
    """Minimize over the inequality rows; deterministic for identical input
    (the lowest-index violated row always enters first)."""
    A, b = problem.A, problem.b
    working: list[int] = []
    u: list[float] = []
    z, _ = _solve_working_set(problem, working)

    if warm_start:
        hinted = sorted({i for i in warm_start if 0 <= i < problem.n_rows})
        try:
            z_h, u_h = _solve_working_set(problem, hinted)
            while hinted and np.min(u_h) < 0.0:
                hinted.pop(int(np.argmin(u_h)))
                z_h, u_h = _solve_working_set(problem, hinted)
            working, u, z = hinted, list(u_h), z_h
        except np.linalg.LinAlgError:
            working, u = [], []
            z, _ = _solve_working_set(problem, working)

    def finish(status: QpStatus, iterations: int) -> QpSolution:
        z_out, u_out = z, u
        if status is QpStatus.OPTIMAL:
            # polish: re-solve the final working set to shed accumulated roundoff
            z_ref, u_ref = _solve_working_set(problem, working)
            if np.all(u_ref >= -FEAS_TOL):
                z_out, u_out = z_ref, list(u_ref)
        mult = _pack_multipliers(problem.n_rows, working, u_out)
        residual = np.inf if status is QpStatus.INFEASIBLE else verify_kkt(problem, z_out, mult)
        return QpSolution(
            z=z_out, status=status, active_set=tuple(sorted(working)),
            multipliers=mult, kkt_residual=residual,
            iterations=iterations, objective=problem.objective(z_out))

    iterations = 0
    while True:
        slacks = A @ z - b if problem.n_rows else np.zeros(0)
        violated = [i for i in range(problem.n_rows)
                    if i not in working and slacks[i] < -FEAS_TOL]
        if not violated:
            return finish(QpStatus.OPTIMAL, iterations)

        p = violated[0]
        normal = A[p]
        u_p = 0.0
        while True:
            iterations += 1
            if iterations > max_iter:
                return finish(QpStatus.MAX_ITER, iterations)

            step, trade = _directions(problem, working, normal)

            t_dual, blocking = np.inf, -1
            for j, (w, uw) in enumerate(zip(working, u)):
                if trade[j] > PIVOT_TOL:
                    cand = uw / trade[j]
                    if cand < t_dual - PIVOT_TOL or (
                            cand < t_dual + PIVOT_TOL and (blocking < 0 or w < working[blocking])):
                        t_dual, blocking = cand, j

            curvature = float(step @ normal)
            if curvature > PIVOT_TOL:
                t_primal = (b[p] - float(normal @ z)) / curvature
            else:
                t_primal = np.inf

            t = min(t_dual, t_primal)
            if not np.isfinite(t):
                return finish(QpStatus.INFEASIBLE, iterations)

            if np.isfinite(t_primal):
                z = z + t * step
            u = [uw - t * trade[j] for j, uw in enumerate(u)]
            u_p += t

            if t_primal <= t_dual:
                working.append(p)
                u.append(u_p)
                break
            working.pop(blocking)
            u.pop(blocking)


def verify_kkt(problem: QpProblem, z: np.ndarray, multipliers: np.ndarray) -> float:
    """Worst violation among stationarity, primal/dual feasibility, and
    complementary slackness for a candidate primal/dual pair."""
    z = np.asarray(z, dtype=float)
    lam = np.asarray(multipliers, dtype=float).ravel()
    A, b = problem.A, problem.b
    stationarity = problem.H @ z + problem.f
    if problem.n_rows:
        stationarity = stationarity - A.T @ lam
        slack = A @ z - b
        primal = float(np.max(np.maximum(-slack, 0.0)))
        dual = float(np.max(np.maximum(-lam, 0.0)))
        comp = float(np.max(np.abs(lam * slack)))
    else:
        primal = dual = comp = 0.0
    return max(float(np.max(np.abs(stationarity))), primal, dual, comp)


BRUTE_FORCE_ROW_CAP = 12


def brute_force_oracle(problem: QpProblem) -> QpSolution:
    """Exhaustive active-subset enumeration; global optimum for problems with
    at most BRUTE_FORCE_ROW_CAP rows. Test oracle, not a production path."""
    m = problem.n_rows
    if m > BRUTE_FORCE_ROW_CAP:
        raise ValueError(f"oracle capped at {BRUTE_FORCE_ROW_CAP} rows, got {m}")
    A, b = problem.A, problem.b
    best: QpSolution | None = None
    tried = 0
    for size in range(0, min(m, problem.n_vars) + 1):
        for subset in itertools.combinations(range(m), size):
            tried += 1
            try:
                z, u = _solve_working_set(problem, list(subset))
            except np.linalg.LinAlgError:
                continue
            if u.size and np.min(u) < -FEAS_TOL:
                continue
            if m and np.min(A @ z - b) < -FEAS_TOL:
                continue
            obj = problem.objective(z)
            if best is None or obj < best.objective - 1e-12:
                mult = _pack_multipliers(m, list(subset), [max(v, 0.0) for v in u])
                best = QpSolution(
                    z=z, status=QpStatus.OPTIMAL, active_set=subset,
                    multipliers=mult, kkt_residual=verify_kkt(problem, z, mult),
                    iterations=tried, objective=obj)
    if best is None:
        return QpSolution(
            z=np.zeros(problem.n_vars), status=QpStatus.INFEASIBLE, active_set=(),
            multipliers=np.zeros(m), kkt_residual=np.inf, iterations=tried)
    return best
