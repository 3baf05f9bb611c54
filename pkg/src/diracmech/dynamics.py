"""Implicit phase dynamics and Euler-Lagrange residuals.

Given a Dirac structure in local form and a Lagrangian L(x, y) or a
Hamiltonian H(x, xi), the generators below evaluate the defining equations
of the induced dynamics as residual vectors:

* Euler-Lagrange: momenta slots are filled with xi = dL/dy,
  p = -dL/dx, and the total derivative of dL/dy expanded by the chain rule
  with the rate unknowns (xdot, ydot);
* Hamilton: fiber slots are filled with y = dH/dxi, p = dH/dx, the rates
  (xdot, xidot) staying free;
* control stationarity: for a parametrized velocity constraint y = f(x, u)
  with running cost L(x, u), the costate slots use p = xi df/dx - dL/dx and
  the controls must satisfy xi df/du = dL/du.

No regularity of the Lagrangian is assumed; degeneracy is the solver's
business.
"""

from typing import NamedTuple

import numpy as np

from . import fd
from .algebroid import _check_finite
from .dirac import TimeExtendedDirac, time_extend  # noqa: F401  (re-export)
from .errors import EvaluationError, HyperregularityError, StructureError

GRADIENT_CHECK_RTOL = 1e-5


def _pair(state):
    a, b = state
    return np.asarray(a, dtype=float).reshape(-1), np.asarray(b, dtype=float).reshape(-1)


class Lagrangian:
    """Scalar field on the velocity bundle with first and second partials.

    Analytic partials are optional; missing ones fall back to central
    finite differences (nested for second derivatives).  When analytic
    partials and probe points are both given, the partials are validated
    against finite differences at registration.
    """

    def __init__(self, fn, grad_x=None, grad_y=None, hess_yy=None, hess_yx=None,
                 name="", probes=None):
        self._fn = fn
        self._grad_x = grad_x
        self._grad_y = grad_y
        self._hess_yy = hess_yy
        self._hess_yx = hess_yx
        self.name = name
        if probes is not None:
            self.validate(probes)

    def __call__(self, x, y):
        return float(self._fn(np.asarray(x, float), np.asarray(y, float)))

    def grad_x(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._grad_x is not None:
            return np.asarray(self._grad_x(x, y), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._fn(z, y), x)

    def grad_y(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._grad_y is not None:
            return np.asarray(self._grad_y(x, y), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._fn(x, z), y)

    def hess_yy(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._hess_yy is not None:
            return np.asarray(self._hess_yy(x, y), dtype=float)
        rel = fd.REL_FIRST if self._grad_y is not None else fd.REL_SECOND
        return fd.jacobian(lambda z: self.grad_y(x, z), y, rel=rel)

    def hess_yx(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._hess_yx is not None:
            return np.asarray(self._hess_yx(x, y), dtype=float)
        if x.size == 0:
            return np.zeros((y.size, 0))
        rel = fd.REL_FIRST if self._grad_y is not None else fd.REL_SECOND
        return fd.jacobian(lambda z: self.grad_y(z, y), x, rel=rel)

    def momentum_rate(self, x, y, xdot, ydot):
        """Total time derivative of dL/dy along the given rates."""
        return self.hess_yx(x, y) @ np.asarray(xdot, float) + self.hess_yy(x, y) @ np.asarray(ydot, float)

    def energy(self, x, y):
        """y . dL/dy - L, the fiber Euler derivative minus the value."""
        y = np.asarray(y, dtype=float)
        return float(y @ self.grad_y(x, y)) - self(x, y)

    def validate(self, probes, rtol=GRADIENT_CHECK_RTOL):
        """Compare supplied analytic partials with central differences."""
        for x, y in probes:
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            checks = []
            if self._grad_x is not None and x.size:
                checks.append(("grad_x", self._grad_x(x, y),
                               fd.gradient(lambda z: self._fn(z, y), x)))
            if self._grad_y is not None:
                checks.append(("grad_y", self._grad_y(x, y),
                               fd.gradient(lambda z: self._fn(x, z), y)))
            if self._hess_yy is not None:
                checks.append(("hess_yy", self._hess_yy(x, y),
                               fd.jacobian(lambda z: self.grad_y(x, z), y)))
            if self._hess_yx is not None and x.size:
                checks.append(("hess_yx", self._hess_yx(x, y),
                               fd.jacobian(lambda z: self.grad_y(z, y), x)))
            for label, analytic, numeric in checks:
                analytic = np.asarray(analytic, dtype=float)
                scale = 1.0 + np.max(np.abs(numeric), initial=0.0)
                if np.max(np.abs(analytic - numeric), initial=0.0) > rtol * scale:
                    raise StructureError(
                        f"analytic {label} of Lagrangian {self.name or '<anonymous>'} "
                        f"deviates from finite differences at (x={x}, y={y})"
                    )


class Hamiltonian:
    """Scalar field on the dual bundle with first partials."""

    def __init__(self, fn, grad_x=None, grad_xi=None, name="", probes=None, meta=None):
        self._fn = fn
        self._grad_x = grad_x
        self._grad_xi = grad_xi
        self.name = name
        self.meta = dict(meta or {})
        if probes is not None:
            self.validate(probes)

    def __call__(self, x, xi):
        return float(self._fn(np.asarray(x, float), np.asarray(xi, float)))

    def grad_x(self, x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if self._grad_x is not None:
            return np.asarray(self._grad_x(x, xi), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._fn(z, xi), x)

    def grad_xi(self, x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if self._grad_xi is not None:
            return np.asarray(self._grad_xi(x, xi), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._fn(x, z), xi)

    def validate(self, probes, rtol=GRADIENT_CHECK_RTOL):
        for x, xi in probes:
            x = np.asarray(x, dtype=float)
            xi = np.asarray(xi, dtype=float)
            checks = []
            if self._grad_x is not None and x.size:
                checks.append(("grad_x", self._grad_x(x, xi),
                               fd.gradient(lambda z: self._fn(z, xi), x)))
            if self._grad_xi is not None:
                checks.append(("grad_xi", self._grad_xi(x, xi),
                               fd.gradient(lambda z: self._fn(x, z), xi)))
            for label, analytic, numeric in checks:
                analytic = np.asarray(analytic, dtype=float)
                scale = 1.0 + np.max(np.abs(numeric), initial=0.0)
                if np.max(np.abs(analytic - numeric), initial=0.0) > rtol * scale:
                    raise StructureError(
                        f"analytic {label} of Hamiltonian {self.name or '<anonymous>'} "
                        f"deviates from finite differences at (x={x}, xi={xi})"
                    )


class ControlSystem:
    """Parametrized velocity constraint y = f(x, u) with running cost L(x, u)."""

    def __init__(self, f, cost, f_x=None, f_u=None, cost_x=None, cost_u=None,
                 control_dim=1, name="", probes=None):
        if control_dim < 1:
            raise EvaluationError("control dimension must be >= 1")
        self._f = f
        self._cost = cost
        self._f_x = f_x
        self._f_u = f_u
        self._cost_x = cost_x
        self._cost_u = cost_u
        self.control_dim = int(control_dim)
        self.name = name
        if probes is not None:
            self.validate(probes)

    def f(self, x, u):
        return _check_finite("control field", self._f(np.asarray(x, float), np.asarray(u, float))).reshape(-1)

    def cost(self, x, u):
        return float(self._cost(np.asarray(x, float), np.asarray(u, float)))

    def f_x(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if self._f_x is not None:
            return np.asarray(self._f_x(x, u), dtype=float)
        return fd.jacobian(lambda z: self._f(z, u), x)

    def f_u(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if self._f_u is not None:
            return np.asarray(self._f_u(x, u), dtype=float)
        return fd.jacobian(lambda z: self._f(x, z), u)

    def cost_x(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if self._cost_x is not None:
            return np.asarray(self._cost_x(x, u), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._cost(z, u), x)

    def cost_u(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if self._cost_u is not None:
            return np.asarray(self._cost_u(x, u), dtype=float).reshape(-1)
        return fd.gradient(lambda z: self._cost(x, z), u)

    def hamiltonian(self, x, u, xi):
        """xi . f(x, u) - L(x, u), the control-parametrized Hamiltonian."""
        return float(np.asarray(xi, float) @ self.f(x, u)) - self.cost(x, u)

    def validate(self, probes, rtol=GRADIENT_CHECK_RTOL):
        for x, u in probes:
            x = np.asarray(x, dtype=float)
            u = np.asarray(u, dtype=float)
            pairs = []
            if self._f_x is not None and x.size:
                pairs.append((self._f_x(x, u), fd.jacobian(lambda z: self._f(z, u), x)))
            if self._f_u is not None:
                pairs.append((self._f_u(x, u), fd.jacobian(lambda z: self._f(x, z), u)))
            if self._cost_x is not None and x.size:
                pairs.append((self._cost_x(x, u), fd.gradient(lambda z: self._cost(z, u), x)))
            if self._cost_u is not None:
                pairs.append((self._cost_u(x, u), fd.gradient(lambda z: self._cost(x, z), u)))
            for analytic, numeric in pairs:
                analytic = np.asarray(analytic, dtype=float)
                scale = 1.0 + np.max(np.abs(numeric), initial=0.0)
                if np.max(np.abs(analytic - numeric), initial=0.0) > rtol * scale:
                    raise StructureError(
                        f"analytic partial of control system {self.name or '<anonymous>'} "
                        "deviates from finite differences"
                    )


class LegendreImage(NamedTuple):
    x: np.ndarray
    xi: np.ndarray
    phase_ok: bool
    phase_residual: np.ndarray


class ELResidual(NamedTuple):
    residual: np.ndarray
    phase: np.ndarray


class HamiltonResidual(NamedTuple):
    residual: np.ndarray
    phase: np.ndarray


class PMPResidual(NamedTuple):
    residual: np.ndarray
    stationarity: np.ndarray


def legendre_map(lagrangian, x, y, dirac=None):
    """Vertical derivative (x, dL/dy(x, y)); optionally report phase membership."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    xi = lagrangian.grad_y(x, y)
    if dirac is None:
        return LegendreImage(x, xi, True, np.zeros(0))
    ok, res = dirac.phase_membership(x, xi)
    return LegendreImage(x, xi, ok, res)


def _momentum_rows(lf, x, xi, eta_value, p, xidot):
    zeta = np.asarray(lf.zeta(x), dtype=float)
    rows = zeta @ np.concatenate([p, xidot])
    c = lf.structure_at(x)
    if c.size:
        rows = rows + np.einsum("abj,b,j->a", c, eta_value, xi)
    dr = lf.drift_at(x)
    if dr is not None:
        rows = rows + dr @ xi
    return rows


def el_residual(dirac, lagrangian, state, rate):
    """Implicit Euler-Lagrange residual at (state, rate).

    state = (x, y), rate = (xdot, ydot).  Returns the n+m membership rows
    (velocity rows first, momentum rows after) together with the phase
    residual of the Legendre image, which constrains states only.
    """
    x, y = _pair(state)
    xdot, ydot = _pair(rate)
    lf = dirac.local_form()
    xi = lagrangian.grad_y(x, y)
    p = -lagrangian.grad_x(x, y)
    xidot = lagrangian.momentum_rate(x, y, xdot, ydot)
    v = np.concatenate([xdot, y])
    etahat = np.asarray(lf.etahat(x), dtype=float)
    vel = etahat @ v
    off = lf.offset_at(x)
    if off is not None:
        vel = vel - off
    eta_value = np.asarray(lf.eta(x), dtype=float) @ v
    mom = _momentum_rows(lf, x, xi, eta_value, p, xidot)
    return ELResidual(np.concatenate([vel, mom]), lf.phase_at(x, xi))


def hamilton_residual(dirac, hamiltonian, state, rate):
    """Implicit phase-dynamics residual at (state, rate).

    state = (x, xi), rate = (xdot, xidot).  The phase residual at (x, xi)
    is reported alongside, not folded into the rows.
    """
    x, xi = _pair(state)
    xdot, xidot = _pair(rate)
    lf = dirac.local_form()
    y = hamiltonian.grad_xi(x, xi)
    p = hamiltonian.grad_x(x, xi)
    v = np.concatenate([xdot, y])
    etahat = np.asarray(lf.etahat(x), dtype=float)
    vel = etahat @ v
    off = lf.offset_at(x)
    if off is not None:
        vel = vel - off
    eta_value = np.asarray(lf.eta(x), dtype=float) @ v
    mom = _momentum_rows(lf, x, xi, eta_value, p, xidot)
    return HamiltonResidual(np.concatenate([vel, mom]), lf.phase_at(x, xi))


def invert_vertical_derivative(lagrangian, x, xi, y0=None, tol=1e-12, max_iter=50,
                               multistart=8, seed=0):
    """Solve dL/dy(x, y) = xi for y by Newton iteration with multistart fallback."""
    x = np.asarray(x, dtype=float).reshape(-1)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.max(np.abs(xi), initial=0.0))
    starts = [np.zeros(xi.size) if y0 is None else np.asarray(y0, float).reshape(-1)]
    starts += [scale * rng.standard_normal(xi.size) for _ in range(multistart)]
    for y in starts:
        y = y.copy()
        for _ in range(max_iter):
            g = lagrangian.grad_y(x, y) - xi
            if np.linalg.norm(g) <= tol * scale:
                return y
            H = lagrangian.hess_yy(x, y)
            try:
                step = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                break
            y = y + step
            if np.linalg.norm(step) <= 1e-14 * (1.0 + np.linalg.norm(y)):
                g = lagrangian.grad_y(x, y) - xi
                if np.linalg.norm(g) <= tol * scale:
                    return y
                break
    raise HyperregularityError(
        f"vertical derivative could not be inverted at x={x}, xi={xi}", x=x, xi=xi
    )


def legendre_transform(lagrangian, probes, tol=1e-12, max_iter=50, multistart=8,
                       seed=0, name=""):
    """Hamiltonian of a hyperregular Lagrangian, H(x, xi) = xi . y* - L(x, y*).

    ``probes`` is a sequence of (x, y) points on which hyperregularity is
    verified at construction (invertible fiber Hessian, round-trip through
    the vertical derivative).  The returned Hamiltonian solves the inverse
    map by Newton iteration on every evaluation; its partials use the
    stationarity of the defining supremum, so dH/dxi is the inverse map
    itself and dH/dx = -dL/dx at the inverse point.
    """
    settings = {"tol": tol, "max_iter": max_iter, "multistart": multistart, "seed": seed}

    def inverse(x, xi):
        return invert_vertical_derivative(lagrangian, x, xi, tol=tol,
                                          max_iter=max_iter, multistart=multistart,
                                          seed=seed)

    for x, y in probes:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        H = lagrangian.hess_yy(x, y)
        if not np.all(np.isfinite(H)) or abs(np.linalg.det(H)) < 1e-12:
            raise HyperregularityError(
                f"fiber Hessian is singular at probe x={x}, y={y}", x=x
            )
        back = inverse(x, lagrangian.grad_y(x, y))
        if np.linalg.norm(back - y) > 1e-8 * (1.0 + np.linalg.norm(y)):
            raise HyperregularityError(
                f"vertical derivative is not invertible near x={x}, y={y}", x=x
            )

    def fn(x, xi):
        y = inverse(x, xi)
        return float(np.asarray(xi, float) @ y) - lagrangian(x, y)

    def grad_xi(x, xi):
        return inverse(x, xi)

    def grad_x(x, xi):
        return -lagrangian.grad_x(x, inverse(x, xi))

    return Hamiltonian(fn, grad_x=grad_x, grad_xi=grad_xi,
                       name=name or f"legendre({lagrangian.name})",
                       meta={"inverse_solver": settings})


def nonholonomic_el_residual(algebroid, constraint, lagrangian, state, rate):
    """Constrained Euler-Lagrange residual evaluated directly in adapted form.

    Row order matches ``el_residual`` on the induced structure: base
    velocity rows, fiber constraint rows (including the unit row in the
    affine case), then the retained momentum rows.  The support equations
    x^A = 0 form the phase channel.
    """
    from .constraints import AffineConstraint, LinearConstraint

    x, y = _pair(state)
    xdot, ydot = _pair(rate)
    n, m = algebroid.chart.base_dim, algebroid.chart.fiber_dim
    if isinstance(constraint, AffineConstraint):
        zero = constraint.fiber
        base = constraint.base
        fixed = constraint.fixed
    elif isinstance(constraint, LinearConstraint):
        if not constraint.is_adapted:
            raise EvaluationError("adapted-coordinate constraint required")
        zero = constraint.fiber
        base = constraint.base
        fixed = None
    else:
        raise EvaluationError("constraint must be linear or affine")
    removed = sorted(set(zero) | ({fixed} if fixed is not None else set()))
    free = [i for i in range(m) if i not in removed]

    rho = algebroid.anchor(x)
    c = algebroid.structure(x)
    grad_y = lagrangian.grad_y(x, y)
    grad_x = lagrangian.grad_x(x, y)
    xidot = lagrangian.momentum_rate(x, y, xdot, ydot)

    vel = xdot - rho[:, free] @ y[free]
    if fixed is not None:
        vel = vel - rho[:, fixed]
    fiber_rows = np.array([y[i] - (1.0 if i == fixed else 0.0) for i in removed])
    mom = np.empty(len(free))
    for k, kappa in enumerate(free):
        coupling = float(y[free] @ (c[free, kappa, :] @ grad_y))
        drift = float(c[fixed, kappa, :] @ grad_y) if fixed is not None else 0.0
        mom[k] = xidot[kappa] - coupling - drift - rho[:, kappa] @ grad_x
    phase = x[list(base)] if base else np.zeros(0)
    return ELResidual(np.concatenate([vel, fiber_rows, mom]), phase)


def pmp_residual(system, dirac, state, rate):
    """Control-parametrized phase-dynamics residual with stationarity channel.

    state = (x, u, xi), rate = (xdot, xidot).  The membership rows use
    y = f(x, u) and p = xi . df/dx - dL/dx; the returned stationarity block
    xi . df/du - dL/du vanishes exactly on critical controls.
    """
    x, u, xi = (np.asarray(v, dtype=float).reshape(-1) for v in state)
    xdot, xidot = _pair(rate)
    lf = dirac.local_form()
    y = system.f(x, u)
    p = system.f_x(x, u).T @ xi - system.cost_x(x, u)
    v = np.concatenate([xdot, y])
    etahat = np.asarray(lf.etahat(x), dtype=float)
    vel = etahat @ v
    off = lf.offset_at(x)
    if off is not None:
        vel = vel - off
    eta_value = np.asarray(lf.eta(x), dtype=float) @ v
    mom = _momentum_rows(lf, x, xi, eta_value, p, xidot)
    stationarity = system.f_u(x, u).T @ xi - system.cost_u(x, u)
    return PMPResidual(np.concatenate([vel, mom]), stationarity)
