"""Fixed-step integrator for q'' = f(t, q) driven by an RKN tableau.

The implicit stage values are found by fixed-point iteration, which needs no
Jacobians and contracts quickly at the step sizes these methods target.  On
exit the stage values satisfy the stage equations exactly with respect to
the last force evaluations, so each step realizes the tableau's map up to
the iteration tolerance; two extra sweeps after the tolerance is met push
stage consistency to the rounding floor, which keeps quadratic invariants
flat over long runs.  Non-convergence and non-finite force values raise,
never degrade.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .construction import RKNTableau
from .problems import SecondOrderProblem

_POLISH_SWEEPS = 2


class StageConvergenceError(RuntimeError):
    """Fixed-point iteration failed to solve the stage equations."""

    def __init__(self, message: str, *, step_index: int | None = None,
                 time: float | None = None, iterations: int | None = None,
                 last_delta: float | None = None):
        super().__init__(message)
        self.step_index = step_index
        self.time = time
        self.iterations = iterations
        self.last_delta = last_delta


@dataclass(frozen=True)
class SolverConfig:
    """fp_tol is the mixed absolute/relative stage-increment tolerance;
    record_every thins trajectory storage (first and last states always
    kept)."""

    fp_tol: float = 1e-14
    max_iters: int = 50
    record_every: int = 1

    def __post_init__(self):
        if self.fp_tol <= 0:
            raise ValueError("fp_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    qp: np.ndarray
    iterations: np.ndarray
    problem: str = ""


def _solve_stages(tableau: RKNTableau, problem: SecondOrderProblem, t: float,
                  q: np.ndarray, qp: np.ndarray, h: float,
                  config: SolverConfig):
    """Return stage forces and the iteration count for one step."""
    c = tableau.c
    base = q[None, :] + (h * c)[:, None] * qp[None, :]
    stages = base
    t_stage = t + c * h
    scale = config.fp_tol * (1.0 + float(np.max(np.abs(q))))
    h2 = h * h
    delta = None
    polish = 0
    for iteration in range(1, config.max_iters + 1):
        try:
            forces = np.asarray(problem.f(t_stage, stages), dtype=float)
        except (ValueError, ArithmeticError) as err:
            raise StageConvergenceError(
                f"force evaluation failed: {err}",
                time=t, iterations=iteration, last_delta=delta) from err
        if not np.all(np.isfinite(forces)):
            raise StageConvergenceError(
                "force evaluation returned a non-finite value",
                time=t, iterations=iteration, last_delta=delta)
        updated = base + h2 * (tableau.a_bar @ forces)
        delta = float(np.max(np.abs(updated - stages)))
        stages = updated
        if delta < scale:
            if polish >= _POLISH_SWEEPS or delta == 0.0:
                return stages, forces, iteration
            polish += 1
    if polish:
        return stages, forces, config.max_iters
    raise StageConvergenceError(
        f"stage iteration did not reach tolerance within "
        f"{config.max_iters} sweeps (last increment {delta:.3e})",
        time=t, iterations=config.max_iters, last_delta=delta)


def rkn_step(tableau: RKNTableau, problem: SecondOrderProblem, t: float,
             q: np.ndarray, qp: np.ndarray, h: float,
             config: SolverConfig | None = None):
    """Advance (q, q') by one step of size h (negative h is allowed)."""
    if h == 0.0:
        raise ValueError("step size must be nonzero")
    config = config or SolverConfig()
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    _, forces, _ = _solve_stages(tableau, problem, t, q, qp, h, config)
    q1 = q + h * qp + (h * h) * (tableau.b_bar @ forces)
    qp1 = qp + h * (tableau.b_prime @ forces)
    return q1, qp1


def integrate(tableau: RKNTableau, problem: SecondOrderProblem, t0: float,
              q0, qp0, h: float, n_steps: int,
              config: SolverConfig | None = None) -> Trajectory:
    """Repeated steps from (t0, q0, qp0); deterministic for fixed inputs."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if h == 0.0:
        raise ValueError("step size must be nonzero")
    config = config or SolverConfig()
    q = np.array(q0, dtype=float)
    qp = np.array(qp0, dtype=float)
    times = [t0]
    qs = [q.copy()]
    qps = [qp.copy()]
    iterations = np.zeros(n_steps, dtype=int)
    h2 = h * h
    for step in range(n_steps):
        t = t0 + step * h
        try:
            _, forces, iterations[step] = _solve_stages(
                tableau, problem, t, q, qp, h, config)
        except StageConvergenceError as err:
            raise StageConvergenceError(
                f"step {step} (t = {t:g}) failed: {err}",
                step_index=step, time=t, iterations=err.iterations,
                last_delta=err.last_delta) from err
        q = q + h * qp + h2 * (tableau.b_bar @ forces)
        qp = qp + h * (tableau.b_prime @ forces)
        if (step + 1) % config.record_every == 0 or step == n_steps - 1:
            times.append(t0 + (step + 1) * h)
            qs.append(q.copy())
            qps.append(qp.copy())
    return Trajectory(times=np.array(times), q=np.array(qs),
                      qp=np.array(qps), iterations=iterations,
                      problem=problem.name)


def write_trajectory_csv(trajectory: Trajectory,
                         problem: SecondOrderProblem, stream) -> None:
    """CSV export: t, q1..qd, p1..pd, then one drift column per invariant."""
    dim = trajectory.q.shape[1]
    header = ["t"]
    header.extend(f"q{i + 1}" for i in range(dim))
    header.extend(f"p{i + 1}" for i in range(dim))
    columns = [trajectory.times]
    columns.extend(trajectory.q[:, i] for i in range(dim))
    columns.extend(trajectory.qp[:, i] for i in range(dim))
    drifts = {}
    if problem.hamiltonian is not None:
        drifts["H"] = problem.hamiltonian
    drifts.update(problem.invariants)
    for name, func in drifts.items():
        values = [np.atleast_1d(np.asarray(func(q, qp), dtype=float))
                  for q, qp in zip(trajectory.q, trajectory.qp)]
        reference = values[0]
        drift = np.array([float(np.max(np.abs(v - reference)))
                          for v in values])
        header.append(f"{name}_err")
        columns.append(drift)
    stream.write(",".join(header) + "\n")
    for row in zip(*columns):
        stream.write(",".join(f"{value:.17g}" for value in row) + "\n")
