"""Time integration of implicit residual systems.

A problem packages a square-in-rate residual, an optional algebraic channel
constraining states, and named monitor functions.  At each evaluation point
the rates are found by Newton iteration on the residual; rate components
not determined by the structure (listed outside ``free_rate_slots``) are
reconstructed afterwards from the time derivative of the algebraic channel.
After every accepted step the state is re-projected onto the algebraic
channel by Gauss-Newton to prevent constraint drift.
"""

import numpy as np

from . import fd
from .errors import DegenerateDynamicsError, InitializationError, SolverError

NEWTON_TOL = 1e-10
NEWTON_STEP_TOL = 1e-12
NEWTON_MAX_ITER = 50
PROJECTION_TOL = 1e-10
PROJECTION_MAX_ITER = 100
CONDITION_LIMIT = 1e12


class ImplicitProblem:
    """Residual system R(t, state, rate) = 0 with algebraic state constraints.

    ``residual`` returns one row per solved rate slot; with no
    ``free_rate_slots`` every slot is solved and the system is square of
    size ``state_dim``.  ``algebraic`` maps (t, state) to constraint values
    (empty or None for unconstrained problems).  ``monitors`` are named
    scalar functions of (t, state) recorded along trajectories.
    ``velocity_pair`` optionally maps (t, state, rate) to a VelocityPair
    for admissibility reporting.
    """

    def __init__(self, state_dim, residual, algebraic=None, monitors=None,
                 free_rate_slots=None, velocity_pair=None, state_labels=None,
                 rate_labels=None, angle_indices=(), name=""):
        self.state_dim = int(state_dim)
        self.residual = residual
        self.algebraic = algebraic
        self.monitors = dict(monitors or {})
        if free_rate_slots is None:
            self.free_rate_slots = np.arange(self.state_dim)
        else:
            self.free_rate_slots = np.asarray(sorted(free_rate_slots), dtype=int)
        self.fixed_rate_slots = np.setdiff1d(np.arange(self.state_dim),
                                             self.free_rate_slots)
        self.velocity_pair = velocity_pair
        self.state_labels = list(state_labels) if state_labels else [
            f"s{k + 1}" for k in range(self.state_dim)
        ]
        self.rate_labels = list(rate_labels) if rate_labels else [
            lbl + "_dot" for lbl in self.state_labels
        ]
        self.angle_indices = tuple(angle_indices)
        self.name = name

    def algebraic_at(self, t, state):
        if self.algebraic is None:
            return np.zeros(0)
        return np.asarray(self.algebraic(t, np.asarray(state, float)), dtype=float).reshape(-1)


class Trajectory:
    """Time-sampled solution with monitor channels and solver statistics."""

    def __init__(self, times, states, rates, monitors, newton_iterations,
                 residual_norms, problem):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.rates = np.asarray(rates, dtype=float)
        self.monitors = {k: np.asarray(v, dtype=float) for k, v in monitors.items()}
        self.newton_iterations = np.asarray(newton_iterations, dtype=int)
        self.residual_norms = np.asarray(residual_norms, dtype=float)
        self.problem = problem

    def __len__(self):
        return self.times.size

    def monitor_drift(self, name):
        channel = self.monitors[name]
        return float(np.max(np.abs(channel - channel[0]), initial=0.0))


def project_initial(problem, guess, t=0.0, tol=PROJECTION_TOL,
                    max_iter=PROJECTION_MAX_ITER):
    """Gauss-Newton projection of a state guess onto the algebraic channel."""
    state = np.asarray(guess, dtype=float).copy()
    g = problem.algebraic_at(t, state)
    if g.size == 0:
        return state
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol:
            return state
        J = fd.jacobian(lambda s: problem.algebraic_at(t, s), state)
        step, *_ = np.linalg.lstsq(J, -g, rcond=None)
        state = state + step
        g = problem.algebraic_at(t, state)
    raise InitializationError(
        f"projection onto the algebraic channel did not converge "
        f"(residual norm {np.linalg.norm(g):.3e})"
    )


def _reconstruct_fixed_rates(problem, t, state, rate):
    """Fill excluded rate slots from the time derivative of the algebraic channel."""
    fixed = problem.fixed_rate_slots
    if fixed.size == 0:
        return rate
    g0 = problem.algebraic_at(t, state)
    if g0.size == 0:
        return rate
    A = fd.jacobian(lambda s: problem.algebraic_at(t, s), state)
    dgdt = (problem.algebraic_at(t + 1e-6, state) - problem.algebraic_at(t - 1e-6, state)) / 2e-6
    free = problem.free_rate_slots
    rhs = -(dgdt + A[:, free] @ rate[free])
    sol, *_ = np.linalg.lstsq(A[:, fixed], rhs, rcond=None)
    rate = rate.copy()
    rate[fixed] = sol
    return rate


def solve_rate(problem, t, state, rate_guess=None, tol=NEWTON_TOL,
               max_iter=NEWTON_MAX_ITER):
    """Newton-solve the residual for the rates at (t, state).

    Raises DegenerateDynamicsError when the rate Jacobian has condition
    number above 1e12, which is the expected signal for singular
    Lagrangians rather than a crash.
    """
    state = np.asarray(state, dtype=float)
    d = problem.state_dim
    rate = np.zeros(d) if rate_guess is None else np.asarray(rate_guess, float).copy()
    free = problem.free_rate_slots

    def res(r):
        return np.asarray(problem.residual(t, state, r), dtype=float).reshape(-1)

    r = res(rate)
    if r.size != free.size:
        raise SolverError(
            f"residual has {r.size} rows for {free.size} solved rate slots"
        )
    iterations = 0
    for iterations in range(1, max_iter + 1):
        norm = np.linalg.norm(r)
        if norm <= tol:
            break
        J = np.zeros((free.size, free.size))
        h = fd.steps(rate[free])
        for k, slot in enumerate(free):
            e = np.zeros(d)
            e[slot] = h[k]
            J[:, k] = (res(rate + e) - res(rate - e)) / (2.0 * h[k])
        sigma = np.linalg.svd(J, compute_uv=False)
        if sigma[0] <= 0.0 or sigma[0] / max(sigma[-1], 1e-300) > CONDITION_LIMIT:
            raise DegenerateDynamicsError(
                f"degenerate implicit dynamics at (t={t}, state={state}): "
                f"rate Jacobian singular values {sigma}",
                t=t, state=state, singular_values=sigma,
            )
        step = np.linalg.solve(J, -r)
        rate[free] += step
        r = res(rate)
        if np.linalg.norm(step) <= NEWTON_STEP_TOL * (1.0 + np.linalg.norm(rate[free])):
            break
    norm = np.linalg.norm(r)
    if norm > tol:
        raise SolverError(
            f"rate solve did not converge at (t={t}, state={state}): "
            f"residual norm {norm:.3e} after {iterations} iterations"
        )
    rate = _reconstruct_fixed_rates(problem, t, state, rate)
    return rate, iterations, norm


def _project_state(problem, t, state):
    if problem.algebraic is None:
        return state
    return project_initial(problem, state, t=t)


def _rk4_step(problem, t, state, dt, k1):
    k2, i2, _ = solve_rate(problem, t + dt / 2, state + (dt / 2) * k1, rate_guess=k1)
    k3, i3, _ = solve_rate(problem, t + dt / 2, state + (dt / 2) * k2, rate_guess=k2)
    k4, i4, _ = solve_rate(problem, t + dt, state + dt * k3, rate_guess=k3)
    new = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return new, max(i2, i3, i4)


def _implicit_midpoint_step(problem, t, state, dt, k1):
    d = problem.state_dim
    new = state + dt * k1

    def gap(s):
        mid_rate, _, _ = solve_rate(problem, t + dt / 2, 0.5 * (state + s), rate_guess=k1)
        return s - state - dt * mid_rate

    iters = 0
    g = gap(new)
    for iters in range(1, 30):
        if np.linalg.norm(g) <= NEWTON_TOL:
            break
        J = np.zeros((d, d))
        h = fd.steps(new)
        for k in range(d):
            e = np.zeros(d)
            e[k] = h[k]
            J[:, k] = (gap(new + e) - gap(new - e)) / (2.0 * h[k])
        new = new + np.linalg.solve(J, -g)
        g = gap(new)
    if np.linalg.norm(g) > NEWTON_TOL:
        raise SolverError(f"implicit midpoint step did not converge at t={t}")
    return new, iters


def integrate(problem, state0, t0, t1, dt, method="rk4"):
    """Integrate from t0 to t1 with the given nominal step.

    The span is divided into round((t1 - t0) / dt) equal steps.  After each
    step the state is re-projected onto the algebraic channel and monitors
    are recorded.  Raises with the step index attached when the inner rate
    solve degenerates.
    """
    if dt <= 0.0:
        raise SolverError("dt must be positive")
    if method not in ("rk4", "implicit-midpoint"):
        raise SolverError(f"unknown method '{method}'")
    span = float(t1) - float(t0)
    nsteps = max(1, int(round(span / dt)))
    dt_eff = span / nsteps

    state = _project_state(problem, t0, np.asarray(state0, dtype=float).copy())
    times = [float(t0)]
    states = [state.copy()]
    rate, iters, norm = solve_rate(problem, t0, state)
    rates = [rate.copy()]
    newton = [iters]
    norms = [norm]
    monitors = {k: [fn(t0, state)] for k, fn in problem.monitors.items()}

    for step_index in range(nsteps):
        t = t0 + step_index * dt_eff
        try:
            if method == "rk4":
                state, it = _rk4_step(problem, t, state, dt_eff, rate)
            else:
                state, it = _implicit_midpoint_step(problem, t, state, dt_eff, rate)
        except DegenerateDynamicsError as err:
            raise DegenerateDynamicsError(
                f"{err} (while stepping from t={t}, step {step_index})",
                t=err.t, state=err.state, singular_values=err.singular_values,
            ) from err
        t_new = t0 + (step_index + 1) * dt_eff
        state = _project_state(problem, t_new, state)
        rate, iters, norm = solve_rate(problem, t_new, state, rate_guess=rate)
        times.append(t_new)
        states.append(state.copy())
        rates.append(rate.copy())
        newton.append(max(iters, it))
        norms.append(norm)
        for k, fn in problem.monitors.items():
            monitors[k].append(fn(t_new, state))

    return Trajectory(times, states, rates, monitors, newton, norms, problem)


class AdmissibilityReport:
    def __init__(self, norms, times):
        self.norms = np.asarray(norms, dtype=float)
        self.times = np.asarray(times, dtype=float)

    @property
    def max(self):
        return float(np.max(self.norms, initial=0.0))


def admissibility_report(dirac, trajectory, velocity_pair=None):
    """Velocity-bundle membership residuals along a trajectory.

    ``velocity_pair`` maps (t, state, rate) to a VelocityPair; by default
    the problem's own extractor is used.
    """
    extract = velocity_pair or trajectory.problem.velocity_pair
    if extract is None:
        raise SolverError("no velocity-pair extractor available for this problem")
    norms = []
    for t, s, r in zip(trajectory.times, trajectory.states, trajectory.rates):
        pair = extract(t, s, r)
        res = dirac.velocity_residual(pair)
        norms.append(float(np.max(np.abs(res), initial=0.0)))
    return AdmissibilityReport(norms, trajectory.times)


def energy_monitor(lagrangian, state):
    """Fiber Euler derivative minus the value, y . dL/dy - L, at (x, y)."""
    x, y = state
    return lagrangian.energy(np.asarray(x, float), np.asarray(y, float))
