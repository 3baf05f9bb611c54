"""Builders turning a structure plus a Lagrangian/Hamiltonian/control system
into implicit problems for the integrator.

For structures induced by adapted constraints, the Lagrangian problem works
in reduced coordinates (the pinned fiber components are eliminated), while
the Hamiltonian problem keeps the full dual state: the pinned components'
momentum rates are not determined by the structure, so they are excluded
from the Newton solve and reconstructed from the time derivative of the
phase constraints.

All residuals here are affine in the rates.  The builders assemble the
affine parts once per state and cache them, so the many rate evaluations
inside a Newton solve cost one small matrix product each; the assembly is
algebraically identical to the reference generators in ``dynamics`` (a
unit test pins the two against each other).
"""

import numpy as np

from .dirac import InducedDirac, TimeExtendedDirac, VelocityPair
from .errors import SolverError
from .solver import ImplicitProblem


def _dropped_fiber_rows(dirac):
    """Number of pinned-fiber selector rows inside etahat."""
    if isinstance(dirac, InducedDirac):
        return len(dirac.zero_fiber) + (1 if dirac.fixed_fiber is not None else 0)
    if isinstance(dirac, TimeExtendedDirac) and isinstance(dirac.base, InducedDirac):
        raise SolverError(
            "time extension of an induced structure is not supported by the "
            "problem builders; induce on the extended bundle instead"
        )
    return 0


def _fiber_embedding(dirac):
    """(free indices, embed) for adapted induced structures; identity otherwise."""
    m = dirac.chart.fiber_dim
    if isinstance(dirac, InducedDirac):
        free = np.asarray(dirac.free_fiber, dtype=int)
        fixed = dirac.fixed_fiber

        def embed(y_red):
            y = np.zeros(m)
            y[free] = y_red
            if fixed is not None:
                y[fixed] = 1.0
            return y

        return free, embed
    return np.arange(m), lambda y_red: np.asarray(y_red, dtype=float)


class _StateCache:
    """Single-slot memo for the affine residual parts at one (t, state)."""

    __slots__ = ("key", "matrix", "offset")

    def __init__(self):
        self.key = None
        self.matrix = None
        self.offset = None

    def needs_update(self, t, state):
        return (t, state.tobytes()) != self.key

    def store(self, t, state, matrix, offset):
        self.key = (t, state.tobytes())
        self.matrix = matrix
        self.offset = offset


def _structure_blocks(dirac, x, xi):
    """(etahat, eta, zeta, mix, offset, drift_xi): state-dependent matrices.

    ``mix`` is the structure contraction (c . xi) eta acting on (xdot, y).
    """
    lf = dirac.local_form()
    etahat = np.asarray(lf.etahat(x), dtype=float)
    eta = np.asarray(lf.eta(x), dtype=float)
    zeta = np.asarray(lf.zeta(x), dtype=float)
    c = lf.structure_at(x)
    mix = np.einsum("abj,j->ab", c, xi) @ eta if c.size else np.zeros_like(eta)
    off = lf.offset_at(x)
    dr = lf.drift_at(x)
    drift_xi = dr @ xi if dr is not None else 0.0
    return etahat, eta, zeta, mix, off, drift_xi


def lagrangian_problem(dirac, lagrangian, monitor_energy=True, name=""):
    """Implicit Euler-Lagrange problem with state (x, y_free).

    Residual rows are the velocity rows of etahat and the momentum rows;
    pinned fiber components are eliminated from the state, so their
    (identically zero) selector rows are dropped.  The phase equations of
    the Legendre image form the algebraic channel.
    """
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    free, embed = _fiber_embedding(dirac)
    dropped = _dropped_fiber_rows(dirac)
    r = free.size
    state_dim = n + r
    time_dependent = isinstance(dirac, TimeExtendedDirac)
    cache = _StateCache()

    def split(state):
        return state[:n], embed(state[n:])

    def assemble(x, y):
        xi = lagrangian.grad_y(x, y)
        p = -lagrangian.grad_x(x, y)
        hyy = lagrangian.hess_yy(x, y)
        hyx = lagrangian.hess_yx(x, y)
        etahat, eta, zeta, mix, off, drift_xi = _structure_blocks(dirac, x, xi)
        q = etahat.shape[0]
        rows = q - dropped + zeta.shape[0]
        A = np.zeros((rows, state_dim))
        b = np.zeros(rows)
        qv = q - dropped
        A[:qv, :n] = etahat[:qv, :n]
        b[:qv] = etahat[:qv, n:] @ y
        if off is not None:
            b[:qv] -= off[:qv]
        # momentum rows: zeta (p, xidot) + mix (xdot, y) + drift
        zp, zxi = zeta[:, :n], zeta[:, n:]
        A[qv:, :n] = zxi @ hyx + mix[:, :n]
        A[qv:, n:] = zxi @ hyy[:, free]
        b[qv:] = zp @ p + mix[:, n:] @ y + drift_xi
        return A, b

    def residual(t, state, rate):
        state = np.asarray(state, dtype=float)
        if cache.needs_update(t, state):
            x, y = split(state)
            cache.store(t, state, *assemble(x, y))
        return cache.matrix @ np.asarray(rate, dtype=float) + cache.offset

    algebraic = None
    if dirac.phase_residual(np.zeros(n), np.zeros(m)).size:
        def algebraic(t, state):
            x, y = split(np.asarray(state, float))
            return dirac.phase_residual(x, lagrangian.grad_y(x, y))

    monitors = {}
    if monitor_energy and not time_dependent:
        def energy(t, state):
            x, y = split(np.asarray(state, float))
            return lagrangian.energy(x, y)

        monitors["energy"] = energy

    def velocity_pair(t, state, rate):
        x, y = split(np.asarray(state, float))
        return VelocityPair(x, np.asarray(rate, float)[:n], y)

    labels = list(dirac.chart.base_labels) + [dirac.chart.fiber_labels[i] for i in free]
    return ImplicitProblem(
        state_dim, residual, algebraic=algebraic, monitors=monitors,
        velocity_pair=velocity_pair, state_labels=labels,
        name=name or f"euler-lagrange[{lagrangian.name}]",
    )


def hamiltonian_problem(dirac, hamiltonian, name=""):
    """Implicit phase-dynamics problem with state (x, xi).

    The solved rows are the velocity rows and the retained momentum rows;
    for induced structures the pinned fiber components of dH/dxi join the
    phase equations as the algebraic channel, and their momentum rates are
    reconstructed from its time derivative.
    """
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    state_dim = n + m
    dropped = _dropped_fiber_rows(dirac)
    if isinstance(dirac, InducedDirac):
        free = np.asarray(dirac.free_fiber, dtype=int)
    else:
        free = np.arange(m)
    constrained = np.setdiff1d(np.arange(m), free)
    cache = _StateCache()

    def assemble(x, xi):
        y = hamiltonian.grad_xi(x, xi)
        p = hamiltonian.grad_x(x, xi)
        etahat, eta, zeta, mix, off, drift_xi = _structure_blocks(dirac, x, xi)
        q = etahat.shape[0]
        qv = q - dropped
        rows = qv + zeta.shape[0]
        A = np.zeros((rows, state_dim))
        b = np.zeros(rows)
        A[:qv, :n] = etahat[:qv, :n]
        b[:qv] = etahat[:qv, n:] @ y
        if off is not None:
            b[:qv] -= off[:qv]
        A[qv:, :n] = mix[:, :n]
        A[qv:, n:] = zeta[:, n:]
        b[qv:] = zeta[:, :n] @ p + mix[:, n:] @ y + drift_xi
        return A, b

    def residual(t, state, rate):
        state = np.asarray(state, dtype=float)
        if cache.needs_update(t, state):
            cache.store(t, state, *assemble(state[:n], state[n:]))
        return cache.matrix @ np.asarray(rate, dtype=float) + cache.offset

    def algebraic(t, state):
        state = np.asarray(state, dtype=float)
        x, xi = state[:n], state[n:]
        parts = [dirac.phase_residual(x, xi)]
        if constrained.size:
            y = hamiltonian.grad_xi(x, xi)
            fixed = dirac.fixed_fiber if isinstance(dirac, InducedDirac) else None
            target = np.array([1.0 if i == fixed else 0.0 for i in constrained])
            parts.append(y[constrained] - target)
        return np.concatenate(parts)

    has_algebraic = bool(constrained.size) or bool(
        dirac.phase_residual(np.zeros(n), np.zeros(m)).size
    )
    free_rate_slots = np.concatenate([np.arange(n), n + free])

    def monitor(t, state):
        state = np.asarray(state, dtype=float)
        return hamiltonian(state[:n], state[n:])

    def velocity_pair(t, state, rate):
        state = np.asarray(state, dtype=float)
        x, xi = state[:n], state[n:]
        return VelocityPair(x, np.asarray(rate, float)[:n], hamiltonian.grad_xi(x, xi))

    labels = list(dirac.chart.base_labels) + list(dirac.chart.dual_labels)
    return ImplicitProblem(
        state_dim, residual,
        algebraic=algebraic if has_algebraic else None,
        monitors={"hamiltonian": monitor},
        free_rate_slots=free_rate_slots,
        velocity_pair=velocity_pair, state_labels=labels,
        name=name or f"hamilton[{hamiltonian.name}]",
    )


def pmp_problem(system, dirac, name=""):
    """Control-stationarity problem with state (x, u, xi).

    The controls carry no residual rows of their own: the stationarity
    equations form the algebraic channel and the control rates are
    reconstructed from its time derivative (an index-1 formulation when the
    control Hessian of the Hamiltonian is invertible).
    """
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    if _dropped_fiber_rows(dirac):
        raise SolverError("control problems expect an unconstrained structure")
    q = system.control_dim
    state_dim = n + q + m
    cache = _StateCache()

    def unpack(state):
        state = np.asarray(state, dtype=float)
        return state[:n], state[n:n + q], state[n + q:]

    def assemble(x, u, xi):
        y = system.f(x, u)
        p = system.f_x(x, u).T @ xi - system.cost_x(x, u)
        etahat, eta, zeta, mix, off, drift_xi = _structure_blocks(dirac, x, xi)
        qv = etahat.shape[0]
        rows = qv + zeta.shape[0]
        A = np.zeros((rows, state_dim))
        b = np.zeros(rows)
        A[:qv, :n] = etahat[:, :n]
        b[:qv] = etahat[:, n:] @ y
        if off is not None:
            b[:qv] -= off
        A[qv:, :n] = mix[:, :n]
        A[qv:, n + q:] = zeta[:, n:]
        b[qv:] = zeta[:, :n] @ p + mix[:, n:] @ y + drift_xi
        return A, b

    def residual(t, state, rate):
        state = np.asarray(state, dtype=float)
        if cache.needs_update(t, state):
            cache.store(t, state, *assemble(*unpack(state)))
        return cache.matrix @ np.asarray(rate, dtype=float) + cache.offset

    def algebraic(t, state):
        x, u, xi = unpack(state)
        return system.f_u(x, u).T @ xi - system.cost_u(x, u)

    def monitor(t, state):
        x, u, xi = unpack(state)
        return system.hamiltonian(x, u, xi)

    def velocity_pair(t, state, rate):
        x, u, xi = unpack(state)
        return VelocityPair(x, np.asarray(rate, float)[:n], system.f(x, u))

    labels = (
        list(dirac.chart.base_labels)
        + [f"u{k + 1}" for k in range(q)]
        + list(dirac.chart.dual_labels)
    )
    free_rate_slots = np.concatenate([np.arange(n), n + q + np.arange(m)])
    return ImplicitProblem(
        state_dim, residual, algebraic=algebraic,
        monitors={"hamiltonian": monitor},
        free_rate_slots=free_rate_slots,
        velocity_pair=velocity_pair, state_labels=labels,
        name=name or f"pmp[{system.name}]",
    )
