"""Built-in example systems for the command line and the demos.

Each system packages a chart, the structure (with its default constraint
applied where one exists), a Lagrangian with analytic partials, and, when
available in closed form, the matching Hamiltonian.
"""

import numpy as np

from .algebroid import Chart, SkewAlgebroid
from .constraints import LinearConstraint, induce
from .dirac import CanonicalDirac, PiGraphDirac, time_extend
from .dynamics import ControlSystem, Hamiltonian, Lagrangian, legendre_transform
from .errors import ScenarioError
from .problems import hamiltonian_problem, lagrangian_problem, pmp_problem


def quadratic_lagrangian(mass_matrix, mass_matrix_diff=None, potential=None,
                         potential_grad=None, name=""):
    """L(x, y) = y . M(x) y / 2 - U(x) with analytic partials.

    ``mass_matrix_diff(x)`` returns the stacked derivatives dM/dx^a with
    shape (n, m, m); omit it for constant mass matrices.
    """

    def fn(x, y):
        u = potential(x) if potential is not None else 0.0
        return 0.5 * float(y @ (mass_matrix(x) @ y)) - u

    def grad_x(x, y):
        n = np.asarray(x).size
        g = np.zeros(n)
        if mass_matrix_diff is not None:
            dM = np.asarray(mass_matrix_diff(x), dtype=float)
            g += 0.5 * np.einsum("aij,i,j->a", dM, y, y)
        if potential_grad is not None:
            g -= np.asarray(potential_grad(x), dtype=float)
        return g

    def grad_y(x, y):
        return mass_matrix(x) @ y

    def hess_yy(x, y):
        return np.asarray(mass_matrix(x), dtype=float)

    def hess_yx(x, y):
        n = np.asarray(x).size
        m = np.asarray(y).size
        if mass_matrix_diff is None:
            return np.zeros((m, n))
        dM = np.asarray(mass_matrix_diff(x), dtype=float)
        return np.einsum("aij,j->ia", dM, y)

    return Lagrangian(fn, grad_x=grad_x, grad_y=grad_y, hess_yy=hess_yy,
                      hess_yx=hess_yx, name=name)


def quadratic_hamiltonian(mass_matrix, mass_matrix_diff=None, potential=None,
                          potential_grad=None, name=""):
    """H(x, xi) = xi . M(x)^-1 xi / 2 + U(x), the closed-form partner."""

    def fn(x, xi):
        u = potential(x) if potential is not None else 0.0
        return 0.5 * float(xi @ np.linalg.solve(mass_matrix(x), xi)) + u

    def grad_xi(x, xi):
        return np.linalg.solve(mass_matrix(x), xi)

    def grad_x(x, xi):
        n = np.asarray(x).size
        g = np.zeros(n)
        if mass_matrix_diff is not None:
            w = np.linalg.solve(mass_matrix(x), xi)
            dM = np.asarray(mass_matrix_diff(x), dtype=float)
            g -= 0.5 * np.einsum("aij,i,j->a", dM, w, w)
        if potential_grad is not None:
            g += np.asarray(potential_grad(x), dtype=float)
        return g

    return Hamiltonian(fn, grad_x=grad_x, grad_xi=grad_xi, name=name)


# -- rolling disc -------------------------------------------------------------

def rolling_disc_algebroid(m=1.0, R=1.0, J1=1.0, J2=1.0):
    """Rank-4 reduction of a vertical disc rolling without slipping.

    Base coordinate: the steering angle phi.  Fiber basis: steering rate,
    rolling rate along the contact direction, and the two translational
    slip generators; the nonzero brackets couple the first two into the
    slips.
    """
    chart = Chart(1, 4, base_labels=("phi",))

    def anchor(x):
        return np.array([[1.0, 0.0, 0.0, 0.0]])

    def structure(x):
        phi = x[0]
        c = np.zeros((4, 4, 4))
        c[0, 1, 3] = R * np.cos(phi)
        c[0, 1, 2] = -R * np.sin(phi)
        c[1, 0, 3] = -R * np.cos(phi)
        c[1, 0, 2] = R * np.sin(phi)
        return c

    return SkewAlgebroid(chart, anchor, structure, name="rolling_disc")


def rolling_disc_mass(m=1.0, R=1.0, J1=1.0, J2=1.0):
    def mass_matrix(x):
        phi = x[0]
        c, s = np.cos(phi), np.sin(phi)
        return np.array([
            [J1, 0.0, 0.0, 0.0],
            [0.0, m * R ** 2 + J2, m * R * c, m * R * s],
            [0.0, m * R * c, m, 0.0],
            [0.0, m * R * s, 0.0, m],
        ])

    def mass_matrix_diff(x):
        phi = x[0]
        c, s = np.cos(phi), np.sin(phi)
        d = np.zeros((1, 4, 4))
        d[0, 1, 2] = -m * R * s
        d[0, 1, 3] = m * R * c
        d[0, 2, 1] = -m * R * s
        d[0, 3, 1] = m * R * c
        return d

    return mass_matrix, mass_matrix_diff


def rolling_disc_lagrangian(m=1.0, R=1.0, J1=1.0, J2=1.0):
    mm, dmm = rolling_disc_mass(m, R, J1, J2)
    return quadratic_lagrangian(mm, dmm, name="rolling_disc")


def rolling_disc_hamiltonian(m=1.0, R=1.0, J1=1.0, J2=1.0):
    mm, dmm = rolling_disc_mass(m, R, J1, J2)
    return quadratic_hamiltonian(mm, dmm, name="rolling_disc")


def so3_algebroid(labels=None):
    """The rotation algebra: point base, cross-product structure constants."""
    chart = Chart(0, 3, fiber_labels=labels)
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0

    return SkewAlgebroid(
        chart,
        anchor=lambda x: np.zeros((0, 3)),
        structure=lambda x: eps,
        name="so3",
    )


class SystemBundle:
    """Everything a scenario needs for one named system."""

    def __init__(self, name, chart, dirac, base_dirac, algebroid=None,
                 lagrangian=None, closed_hamiltonian=None, control=None,
                 constraint=None, angle_bases=(), time_dependent=False):
        self.name = name
        self.chart = chart
        self.dirac = dirac
        self.base_dirac = base_dirac
        self.algebroid = algebroid
        self.lagrangian = lagrangian
        self.closed_hamiltonian = closed_hamiltonian
        self.control = control
        self.constraint = constraint
        self.angle_bases = tuple(angle_bases)
        self.time_dependent = time_dependent

    def hamiltonian(self, source="legendre", seed=0):
        """Hamiltonian for the phase formalism.

        ``source`` is "legendre" (numerical transform of the Lagrangian,
        validated on random probes) or "closed" (the stored closed form).
        """
        if source == "closed":
            if self.closed_hamiltonian is None:
                raise ScenarioError(f"system {self.name} has no closed-form Hamiltonian")
            return self.closed_hamiltonian
        if self.lagrangian is None:
            raise ScenarioError(f"system {self.name} has no Lagrangian")
        rng = np.random.default_rng(seed)
        n, m = self.chart.base_dim, self.chart.fiber_dim
        probes = [(rng.standard_normal(n), rng.standard_normal(m)) for _ in range(5)]
        return legendre_transform(self.lagrangian, probes)


def _resolve_constraint(spec_constraint, override):
    if override is None:
        return spec_constraint
    fiber = tuple(int(i) - 1 for i in override.get("fiber", ()))
    base = tuple(int(a) - 1 for a in override.get("base", ()))
    if any(i < 0 for i in fiber) or any(a < 0 for a in base):
        raise ScenarioError("constraint indices are 1-based and must be positive")
    if not fiber and not base:
        return None
    return LinearConstraint(fiber=fiber, base=base)


def _build_canonical_particle(params, constraint):
    mass = params["mass"]
    base = CanonicalDirac(2)
    lag = quadratic_lagrangian(lambda x: mass * np.eye(2), name="free_particle")
    ham = quadratic_hamiltonian(lambda x: mass * np.eye(2), name="free_particle")
    dirac = induce(base, constraint) if constraint else base
    return SystemBundle("canonical_particle", base.chart, dirac, base,
                        algebroid=base.as_pi_graph().algebroid,
                        lagrangian=lag, closed_hamiltonian=ham,
                        constraint=constraint)


def _build_harmonic_oscillator(params, constraint):
    mass, spring = params["mass"], params["spring"]
    base = CanonicalDirac(1)
    lag = quadratic_lagrangian(
        lambda x: np.array([[mass]]),
        potential=lambda x: 0.5 * spring * float(x[0] ** 2),
        potential_grad=lambda x: np.array([spring * x[0]]),
        name="harmonic_oscillator",
    )
    ham = quadratic_hamiltonian(
        lambda x: np.array([[mass]]),
        potential=lambda x: 0.5 * spring * float(x[0] ** 2),
        potential_grad=lambda x: np.array([spring * x[0]]),
        name="harmonic_oscillator",
    )
    dirac = induce(base, constraint) if constraint else base
    return SystemBundle("harmonic_oscillator", base.chart, dirac, base,
                        algebroid=base.as_pi_graph().algebroid,
                        lagrangian=lag, closed_hamiltonian=ham,
                        constraint=constraint)


def _build_rolling_disc(params, constraint):
    m, R, J1, J2 = params["m"], params["R"], params["J1"], params["J2"]
    algebroid = rolling_disc_algebroid(m, R, J1, J2)
    base = PiGraphDirac(algebroid)
    if constraint is None:
        constraint = LinearConstraint(fiber=(2, 3))
    dirac = induce(base, constraint)
    return SystemBundle("rolling_disc", algebroid.chart, dirac, base,
                        algebroid=algebroid,
                        lagrangian=rolling_disc_lagrangian(m, R, J1, J2),
                        closed_hamiltonian=rolling_disc_hamiltonian(m, R, J1, J2),
                        constraint=constraint, angle_bases=(0,))


def _build_euler_top(params, constraint):
    J = np.array([params["J1"], params["J2"], params["J3"]])
    algebroid = so3_algebroid()
    base = PiGraphDirac(algebroid)
    lag = quadratic_lagrangian(lambda x: np.diag(J), name="euler_top")
    ham = quadratic_hamiltonian(lambda x: np.diag(J), name="euler_top")
    dirac = induce(base, constraint) if constraint else base
    return SystemBundle("euler_top", algebroid.chart, dirac, base,
                        algebroid=algebroid, lagrangian=lag,
                        closed_hamiltonian=ham, constraint=constraint)


def _build_forced_oscillator(params, constraint):
    mass, k0, eps, omega = params["mass"], params["k0"], params["eps"], params["omega"]
    if constraint is not None:
        raise ScenarioError("forced_oscillator_timedep takes no constraint")
    base = CanonicalDirac(1, base_labels=("x",))
    dirac = time_extend(base)

    def stiffness(t):
        return k0 * (1.0 + eps * np.sin(omega * t))

    def stiffness_dot(t):
        return k0 * eps * omega * np.cos(omega * t)

    def fn(x, y):
        t, q = x
        return 0.5 * mass * float(y[0] ** 2) - 0.5 * stiffness(t) * q ** 2

    def grad_x(x, y):
        t, q = x
        return np.array([-0.5 * stiffness_dot(t) * q ** 2, -stiffness(t) * q])

    lag = Lagrangian(
        fn, grad_x=grad_x,
        grad_y=lambda x, y: np.array([mass * y[0]]),
        hess_yy=lambda x, y: np.array([[mass]]),
        hess_yx=lambda x, y: np.zeros((1, 2)),
        name="forced_oscillator",
    )
    return SystemBundle("forced_oscillator_timedep", dirac.chart, dirac, base,
                        lagrangian=lag, time_dependent=True)


def _build_lqr(params, constraint):
    qw, rw = params["q"], params["r"]
    if constraint is not None:
        raise ScenarioError("lqr_pmp takes no constraint")
    base = CanonicalDirac(1, base_labels=("x",))
    control = ControlSystem(
        f=lambda x, u: np.array([u[0]]),
        cost=lambda x, u: 0.5 * (qw * float(x[0] ** 2) + rw * float(u[0] ** 2)),
        f_x=lambda x, u: np.zeros((1, 1)),
        f_u=lambda x, u: np.eye(1),
        cost_x=lambda x, u: np.array([qw * x[0]]),
        cost_u=lambda x, u: np.array([rw * u[0]]),
        control_dim=1,
        name="scalar_lqr",
    )
    return SystemBundle("lqr_pmp", base.chart, base, base, control=control)


class SystemSpec:
    def __init__(self, name, description, params, builder, formalisms,
                 initial_doc):
        self.name = name
        self.description = description
        self.params = dict(params)
        self.builder = builder
        self.formalisms = tuple(formalisms)
        self.initial_doc = dict(initial_doc)


CATALOG = {
    spec.name: spec
    for spec in [
        SystemSpec(
            "canonical_particle",
            "free motion on a flat two-dimensional configuration space",
            {"mass": 1.0},
            _build_canonical_particle,
            ("lagrangian", "hamiltonian"),
            {"lagrangian": "x1, x2, y1, y2", "hamiltonian": "x1, x2, xi1, xi2"},
        ),
        SystemSpec(
            "harmonic_oscillator",
            "one-dimensional linear oscillator",
            {"mass": 1.0, "spring": 1.0},
            _build_harmonic_oscillator,
            ("lagrangian", "hamiltonian"),
            {"lagrangian": "x1, y1", "hamiltonian": "x1, xi1"},
        ),
        SystemSpec(
            "rolling_disc",
            "vertical disc rolling without slipping, reduced over the plane "
            "translations and the rolling angle to a rank-4 bundle over the "
            "steering circle; the no-slip constraint pins the two slip "
            "generators",
            {"m": 1.0, "R": 1.0, "J1": 1.0, "J2": 1.0},
            _build_rolling_disc,
            ("lagrangian", "hamiltonian"),
            {"lagrangian": "phi, y1 (steering rate), y2 (rolling rate)",
             "hamiltonian": "phi, xi1, xi2, xi3, xi4"},
        ),
        SystemSpec(
            "euler_top",
            "free rigid body reduced to the rotation algebra (point base)",
            {"J1": 1.0, "J2": 2.0, "J3": 3.0},
            _build_euler_top,
            ("lagrangian", "hamiltonian"),
            {"lagrangian": "y1, y2, y3 (body angular velocity)",
             "hamiltonian": "xi1, xi2, xi3 (body angular momentum)"},
        ),
        SystemSpec(
            "forced_oscillator_timedep",
            "oscillator with periodically modulated stiffness on the "
            "clock-extended phase space",
            {"mass": 1.0, "k0": 1.0, "eps": 0.3, "omega": 2.0},
            _build_forced_oscillator,
            ("lagrangian",),
            {"lagrangian": "x, y (the clock coordinate is prepended automatically)"},
        ),
        SystemSpec(
            "lqr_pmp",
            "scalar linear-quadratic control problem in stationarity form",
            {"q": 1.0, "r": 1.0},
            _build_lqr,
            ("pmp",),
            {"pmp": "x, u, xi"},
        ),
    ]
}


def build_system(name, params=None, constraint_override=None):
    if name not in CATALOG:
        raise KeyError(f"unknown system '{name}'")
    spec = CATALOG[name]
    merged = dict(spec.params)
    for key, value in (params or {}).items():
        if key not in merged:
            raise ScenarioError(f"unknown parameter '{key}' for system {name}")
        merged[key] = float(value)
    constraint = _resolve_constraint(None, constraint_override)
    return spec.builder(merged, constraint)


def build_problem(bundle, formalism, hamiltonian_source="legendre", seed=0):
    """Implicit problem for the requested formalism."""
    if formalism == "lagrangian":
        if bundle.lagrangian is None:
            raise ScenarioError(f"system {bundle.name} has no Lagrangian formalism")
        return lagrangian_problem(bundle.dirac, bundle.lagrangian)
    if formalism == "hamiltonian":
        return hamiltonian_problem(bundle.dirac, bundle.hamiltonian(hamiltonian_source, seed))
    if formalism == "pmp":
        if bundle.control is None:
            raise ScenarioError(f"system {bundle.name} has no control formalism")
        return pmp_problem(bundle.control, bundle.dirac)
    raise ScenarioError(f"unknown formalism '{formalism}'")
