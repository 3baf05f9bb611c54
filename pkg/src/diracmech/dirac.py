"""Linear (almost) Dirac structures on the dual bundle.

A structure is represented pointwise inside the Pontryagin bundle over the
dual: a point carries coordinates (x, xi, xdot, xidot, p, y) where (x, xi)
is the dual-bundle base point and (xdot, xidot, p, y) the fiber part.  The
fiber part is stacked in the fixed order

    w = (xdot [n], xidot [m], p [n], y [m]),

used by every kernel computation here.

Every representation reduces internally to a local form consisting of

* velocity coordinates ``eta`` (rank r) and complementary equations
  ``etahat`` acting on (xdot, y),
* dual coordinates ``zeta`` / ``zetahat`` acting on (p, xidot),
* structure functions ``structure(x)[a, b, j]`` (antisymmetric in a, b),
* optional affine offsets (``velocity_offset`` rows of etahat, ``drift``
  coefficients on xi) for the affine variants,
* phase equations cutting the supported subset of the dual bundle.

Membership in the structure is the vanishing of

    etahat(x) (xdot, y) - velocity_offset(x),
    zeta(x) (p, xidot) + structure(x)[eta(x)(xdot, y), xi] + drift(x) xi,

together with the phase equations at (x, xi).
"""

import numpy as np

from . import fd, linalg
from .algebroid import Chart, SkewAlgebroid, _as_base_point, _check_finite
from .errors import (
    BasePointMismatchError,
    ConstraintError,
    EvaluationError,
    StructureError,
)

PHASE_TOL = 1e-9
BASE_MATCH_TOL = 1e-12


class PontryaginPoint:
    """Point (x, xi, xdot, xidot, p, y) of the Pontryagin bundle over the dual."""

    __slots__ = ("x", "xi", "xdot", "xidot", "p", "y")

    def __init__(self, x, xi, xdot, xidot, p, y):
        self.x = np.asarray(x, dtype=float).reshape(-1)
        self.xi = np.asarray(xi, dtype=float).reshape(-1)
        self.xdot = np.asarray(xdot, dtype=float).reshape(-1)
        self.xidot = np.asarray(xidot, dtype=float).reshape(-1)
        self.p = np.asarray(p, dtype=float).reshape(-1)
        self.y = np.asarray(y, dtype=float).reshape(-1)
        n, m = self.x.size, self.xi.size
        if self.xdot.size != n or self.p.size != n:
            raise EvaluationError("xdot/p length does not match the base dimension")
        if self.xidot.size != m or self.y.size != m:
            raise EvaluationError("xidot/y length does not match the fiber dimension")
        for name in self.__slots__:
            v = getattr(self, name)
            if not np.all(np.isfinite(v)):
                raise EvaluationError(f"coordinate block '{name}' has non-finite entries")

    def fiber_vector(self):
        """Fiber part stacked in the order (xdot, xidot, p, y)."""
        return np.concatenate([self.xdot, self.xidot, self.p, self.y])

    @staticmethod
    def from_fiber_vector(x, xi, w):
        x = np.asarray(x, dtype=float).reshape(-1)
        xi = np.asarray(xi, dtype=float).reshape(-1)
        n, m = x.size, xi.size
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.size != 2 * (n + m):
            raise EvaluationError("fiber vector length does not match 2(n+m)")
        return PontryaginPoint(
            x, xi, w[:n], w[n:n + m], w[n + m:2 * n + m], w[2 * n + m:]
        )

    def __repr__(self):
        return (
            f"PontryaginPoint(x={self.x}, xi={self.xi}, xdot={self.xdot}, "
            f"xidot={self.xidot}, p={self.p}, y={self.y})"
        )


class VelocityPair:
    """Element (x, xdot, y) of the velocity bundle TM (+) E."""

    __slots__ = ("x", "xdot", "y")

    def __init__(self, x, xdot, y):
        self.x = np.asarray(x, dtype=float).reshape(-1)
        self.xdot = np.asarray(xdot, dtype=float).reshape(-1)
        self.y = np.asarray(y, dtype=float).reshape(-1)
        if self.xdot.size != self.x.size:
            raise EvaluationError("xdot length does not match the base dimension")
        for name in self.__slots__:
            if not np.all(np.isfinite(getattr(self, name))):
                raise EvaluationError(f"coordinate block '{name}' has non-finite entries")


def pairing(p1, p2, tol=BASE_MATCH_TOL):
    """Symmetric pairing of two Pontryagin points over the same base point.

    Returns (p1 . xdot2 + y1 . xidot2 + p2 . xdot1 + y2 . xidot1) / 2; the
    self-pairing is p . xdot + y . xidot.
    """
    if p1.x.size != p2.x.size or p1.xi.size != p2.xi.size:
        raise BasePointMismatchError("points live over charts of different dimensions")
    if np.max(np.abs(p1.x - p2.x), initial=0.0) > tol or np.max(
        np.abs(p1.xi - p2.xi), initial=0.0
    ) > tol:
        raise BasePointMismatchError("pairing requires a common (x, xi) base point")
    return 0.5 * (
        float(p1.p @ p2.xdot) + float(p1.y @ p2.xidot)
        + float(p2.p @ p1.xdot) + float(p2.y @ p1.xidot)
    )


def scale_fiber(point, t):
    """First homothety: scale (xdot, xidot, p, y) by t, keeping (x, xi)."""
    return PontryaginPoint(
        point.x, point.xi, t * point.xdot, t * point.xidot, t * point.p, t * point.y
    )


def scale_dual(point, s):
    """Second homothety: scale (xi, xidot, p) by s, keeping (x, xdot, y)."""
    return PontryaginPoint(
        point.x, s * point.xi, point.xdot, s * point.xidot, s * point.p, point.y
    )


class LocalForm:
    """Pointwise-evaluable local data of a Dirac structure (see module docs)."""

    def __init__(self, chart, eta, etahat, zeta, zetahat=None, structure=None,
                 velocity_offset=None, drift=None, phase=None):
        self.chart = chart
        self.eta = eta
        self.etahat = etahat
        self.zeta = zeta
        self.zetahat = zetahat
        self.structure = structure
        self.velocity_offset = velocity_offset
        self.drift = drift
        self.phase = phase

    def structure_at(self, x):
        if self.structure is None:
            r = self.eta(x).shape[0]
            return np.zeros((r, r, self.chart.fiber_dim))
        return np.asarray(self.structure(x), dtype=float)

    def offset_at(self, x):
        if self.velocity_offset is None:
            return None
        return np.asarray(self.velocity_offset(x), dtype=float).reshape(-1)

    def drift_at(self, x):
        if self.drift is None:
            return None
        return np.asarray(self.drift(x), dtype=float)

    def phase_at(self, x, xi):
        if self.phase is None:
            return np.zeros(0)
        return np.asarray(self.phase(np.asarray(x, float), np.asarray(xi, float)),
                          dtype=float).reshape(-1)


class DiracAlgebroid:
    """Common behavior of all representations, driven by the local form."""

    kind = "abstract"

    def __init__(self, chart):
        self.chart = chart

    # representations fill this in
    def local_form(self):
        raise NotImplementedError

    @property
    def is_affine(self):
        lf = self.local_form()
        return lf.velocity_offset is not None or lf.drift is not None

    # -- membership ----------------------------------------------------------

    def membership_system(self, x, xi):
        """Linear system (J, const): membership residual is J w + const."""
        x = _as_base_point(self.chart, x)
        xi = np.asarray(xi, dtype=float).reshape(-1)
        n, m = self.chart.base_dim, self.chart.fiber_dim
        if xi.size != m:
            raise EvaluationError(f"xi has length {xi.size}, expected {m}")
        lf = self.local_form()
        eta = np.asarray(lf.eta(x), dtype=float)
        etahat = np.asarray(lf.etahat(x), dtype=float)
        zeta = np.asarray(lf.zeta(x), dtype=float)
        c = lf.structure_at(x)
        r = eta.shape[0]
        q = etahat.shape[0]
        if r + q != n + m:
            raise StructureError(
                f"local form has {r} + {q} rows, expected n + m = {n + m}"
            )
        J = np.zeros((n + m, 2 * (n + m)))
        const = np.zeros(n + m)
        # velocity rows act on (xdot, y)
        J[:q, :n] = etahat[:, :n]
        J[:q, 2 * n + m:] = etahat[:, n:]
        off = lf.offset_at(x)
        if off is not None:
            const[:q] = -off
        # momentum rows act on (p, xidot) plus the structure term through eta
        J[q:, n + m:2 * n + m] = zeta[:, :n]
        J[q:, n:n + m] = zeta[:, n:]
        if c.size:
            cxi = np.einsum("abj,j->ab", c, xi)
            mix = cxi @ eta
            J[q:, :n] += mix[:, :n]
            J[q:, 2 * n + m:] += mix[:, n:]
        dr = lf.drift_at(x)
        if dr is not None:
            const[q:] += dr @ xi
        return J, const

    def residual(self, point):
        """Defining-constraint values at a Pontryagin point; zero on members."""
        J, const = self.membership_system(point.x, point.xi)
        return J @ point.fiber_vector() + const

    # -- pointwise subspaces ---------------------------------------------------

    def basis_matrix_at(self, x, xi):
        """Orthonormal kernel basis (columns) of the linearized membership system."""
        ok, res = self.phase_membership(x, xi)
        if not ok:
            raise ConstraintError(
                f"(x, xi) is not in the phase support: residual {res}"
            )
        J, _ = self.membership_system(x, xi)
        basis = linalg.null_space(J)
        expected = self.chart.base_dim + self.chart.fiber_dim
        if basis.shape[1] != expected:
            raise StructureError(
                f"pointwise subspace has dimension {basis.shape[1]}, expected "
                f"{expected} (numeric rank {linalg.numeric_rank(J)})"
            )
        return basis

    def basis_at(self, x, xi):
        """Kernel basis as PontryaginPoint directions at (x, xi)."""
        basis = self.basis_matrix_at(x, xi)
        return [
            PontryaginPoint.from_fiber_vector(x, xi, basis[:, k])
            for k in range(basis.shape[1])
        ]

    def velocity_residual(self, pair):
        """etahat rows at a velocity pair; zero iff the pair is admissible."""
        x = _as_base_point(self.chart, pair.x)
        lf = self.local_form()
        etahat = np.asarray(lf.etahat(x), dtype=float)
        v = np.concatenate([pair.xdot, pair.y])
        out = etahat @ v
        off = lf.offset_at(x)
        if off is not None:
            out = out - off
        return out

    def velocity_space(self, x):
        """Orthonormal columns spanning the (model) velocity fiber at x."""
        x = _as_base_point(self.chart, x)
        lf = self.local_form()
        return linalg.null_space(np.asarray(lf.etahat(x), dtype=float))

    def core_at(self, x):
        """Orthonormal columns (p, xidot) spanning the core fiber at x."""
        x = _as_base_point(self.chart, x)
        lf = self.local_form()
        zeta = np.asarray(lf.zeta(x), dtype=float)
        core = linalg.null_space(zeta)
        n, m = self.chart.base_dim, self.chart.fiber_dim
        r = zeta.shape[0]
        if core.shape[1] != n + m - r:
            raise StructureError(
                f"core has dimension {core.shape[1]}, expected {n + m - r} "
                f"(numeric rank {linalg.numeric_rank(zeta)})"
            )
        return core

    # -- phase support -----------------------------------------------------------

    def phase_residual(self, x, xi):
        x = _as_base_point(self.chart, x)
        xi = np.asarray(xi, dtype=float).reshape(-1)
        return self.local_form().phase_at(x, xi)

    def phase_membership(self, x, xi, tol=PHASE_TOL):
        """(bool, residual): whether (x, xi) satisfies the phase equations."""
        res = self.phase_residual(x, xi)
        return bool(np.max(np.abs(res), initial=0.0) <= tol), res

    def project_support(self, x):
        """Project a base point onto the base support (identity by default)."""
        return np.asarray(x, dtype=float).reshape(-1)

    def phase_point(self, x):
        """Some xi with (x, xi) in the phase support (zero if unconstrained)."""
        x = _as_base_point(self.chart, x)
        m = self.chart.fiber_dim
        xi0 = np.zeros(m)
        res0 = self.phase_residual(x, xi0)
        if res0.size == 0:
            return xi0
        B = fd.jacobian(lambda z: self.phase_residual(x, z), xi0)
        sol, *_ = np.linalg.lstsq(B, -res0, rcond=None)
        xi = xi0 + sol
        ok, res = self.phase_membership(x, xi)
        if not ok:
            raise ConstraintError(
                f"no dual point found on the phase support at x={x}: residual {res}"
            )
        return xi

    def sample_phase_point(self, rng, scale=1.0):
        """Random (x, xi) on the phase support."""
        n, m = self.chart.base_dim, self.chart.fiber_dim
        x = self.project_support(scale * rng.standard_normal(n))
        xi0 = self.phase_point(x)
        res0 = self.phase_residual(x, xi0)
        if res0.size:
            B = fd.jacobian(lambda z: self.phase_residual(x, z), xi0)
            K = linalg.null_space(B)
            xi = xi0 + K @ (scale * rng.standard_normal(K.shape[1]))
        else:
            xi = scale * rng.standard_normal(m)
        return x, xi


def _selector_rows(indices, width):
    rows = np.zeros((len(indices), width))
    for k, i in enumerate(indices):
        rows[k, i] = 1.0
    return rows


class PiGraphDirac(DiracAlgebroid):
    """Graph of the linear bivector of a skew algebroid.

    Membership equations: xdot = rho(x) y and, for each j,
    xidot_j - c^k_{ij}(x) y^i xi_k + rho^a_j(x) p_a = 0.  The phase support
    is the whole dual bundle.
    """

    kind = "pi_graph"

    def __init__(self, algebroid):
        super().__init__(algebroid.chart)
        self.algebroid = algebroid
        n, m = self.chart.base_dim, self.chart.fiber_dim
        eye_m = np.eye(m)
        eye_n = np.eye(n)

        def eta(x):
            return np.hstack([np.zeros((m, n)), eye_m])

        def etahat(x):
            return np.hstack([eye_n, -algebroid.anchor(x)])

        def zeta(x):
            return np.hstack([algebroid.anchor(x).T, eye_m])

        def zetahat(x):
            return np.hstack([eye_n, np.zeros((n, m))])

        self._lf = LocalForm(
            self.chart, eta, etahat, zeta, zetahat,
            structure=algebroid.structure,
        )

    def local_form(self):
        return self._lf


class OmegaGraphDirac(DiracAlgebroid):
    """Graph of a linear 2-form on the dual bundle.

    Fields: ``rho(x)`` of shape (m, n) and a coefficient field ``cform(x)``
    of shape (n, n, m), antisymmetric in its first two indices.  Membership
    equations: y = rho(x) xdot and, for each a,
    p_a - cform[a, b, k] xi_k xdot^b + rho^i_a xidot_i = 0.
    """

    kind = "omega_graph"

    def __init__(self, chart, rho, cform):
        super().__init__(chart)
        n, m = chart.base_dim, chart.fiber_dim
        self._rho = rho
        self._cform = cform
        eye_n = np.eye(n)
        eye_m = np.eye(m)

        def rho_at(x):
            r = _check_finite("rho", rho(np.asarray(x, float)))
            if r.shape != (m, n):
                raise EvaluationError(f"rho has shape {r.shape}, expected ({m}, {n})")
            return r

        def cform_at(x):
            c = _check_finite("cform", cform(np.asarray(x, float)))
            if c.shape != (n, n, m):
                raise EvaluationError(
                    f"cform has shape {c.shape}, expected ({n}, {n}, {m})"
                )
            sym = c + np.swapaxes(c, 0, 1)
            if np.max(np.abs(sym), initial=0.0) > 2e-12:
                raise StructureError("cform is not antisymmetric in its base indices")
            return 0.5 * (c - np.swapaxes(c, 0, 1))

        def eta(x):
            return np.hstack([eye_n, np.zeros((n, m))])

        def etahat(x):
            return np.hstack([-rho_at(x), eye_m])

        def zeta(x):
            return np.hstack([eye_n, rho_at(x).T])

        def zetahat(x):
            return np.hstack([np.zeros((m, n)), eye_m])

        def structure(x):
            return -cform_at(x)

        self._lf = LocalForm(chart, eta, etahat, zeta, zetahat, structure=structure)

    def local_form(self):
        return self._lf


class CanonicalDirac(DiracAlgebroid):
    """Canonical structure on the dual of a tangent bundle (requires n = m).

    Membership equations: xdot = y, xidot = -p.
    """

    kind = "canonical"

    def __init__(self, dim, base_labels=None):
        chart = Chart(dim, dim, base_labels=base_labels)
        super().__init__(chart)
        n = dim
        eye = np.eye(n)

        self._lf = LocalForm(
            chart,
            eta=lambda x: np.hstack([np.zeros((n, n)), eye]),
            etahat=lambda x: np.hstack([eye, -eye]),
            zeta=lambda x: np.hstack([eye, eye]),
            zetahat=lambda x: np.hstack([eye, np.zeros((n, n))]),
        )

    def local_form(self):
        return self._lf

    def as_pi_graph(self):
        """The same structure as the graph of the trivial algebroid bivector."""
        n = self.chart.base_dim
        algebroid = SkewAlgebroid(
            self.chart,
            anchor=lambda x: np.eye(n),
            structure=lambda x: np.zeros((n, n, n)),
            name="canonical",
        )
        return PiGraphDirac(algebroid)


class GeneralLocalDirac(DiracAlgebroid):
    """User-supplied local form (velocity/dual coordinate maps plus structure).

    ``eta``/``etahat`` act on (xdot, y); ``zeta``/``zetahat`` act on
    (p, xidot); ``structure(x)`` has shape (r, r, m), antisymmetric in its
    first two indices; ``phase`` evaluates affine equations a(x) + B(x) xi.
    The rank r is taken from the evaluated matrix shapes and verified
    numerically through the kernel-dimension check of ``basis_at``.
    """

    kind = "general_local"

    def __init__(self, chart, eta, etahat, zeta, zetahat=None, structure=None,
                 phase=None):
        super().__init__(chart)
        m = chart.fiber_dim

        wrapped_structure = None
        if structure is not None:
            def wrapped_structure(x, _raw=structure):
                c = _check_finite("structure", _raw(np.asarray(x, float)))
                if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] != m:
                    raise EvaluationError(
                        f"structure has shape {c.shape}, expected (r, r, {m})"
                    )
                sym = c + np.swapaxes(c, 0, 1)
                if np.max(np.abs(sym), initial=0.0) > 2e-12:
                    raise StructureError(
                        "local-form structure functions are not antisymmetric"
                    )
                return 0.5 * (c - np.swapaxes(c, 0, 1))

        self._lf = LocalForm(chart, eta, etahat, zeta, zetahat,
                             structure=wrapped_structure, phase=phase)

    @classmethod
    def from_velocity_splitting(cls, chart, eta, etahat, structure=None, phase=None):
        """Build the dual maps from the velocity splitting.

        The stacked map T = [eta; etahat] must be invertible; the dual maps
        are the rows of inv(T).T, which makes the pointwise subspaces
        isotropic by construction.
        """
        def dual_rows(x):
            T = np.vstack([np.asarray(eta(x), float), np.asarray(etahat(x), float)])
            return np.linalg.inv(T).T

        def zeta(x):
            r = np.asarray(eta(x), float).shape[0]
            return dual_rows(x)[:r]

        def zetahat(x):
            r = np.asarray(eta(x), float).shape[0]
            return dual_rows(x)[r:]

        return cls(chart, eta, etahat, zeta, zetahat, structure, phase)

    def local_form(self):
        return self._lf

    def validate(self, probe_points, rng=None, tol=1e-10):
        """Check invertibility, isotropy, and kernel dimension at probe points."""
        rng = rng or np.random.default_rng(0)
        for x in probe_points:
            x = np.asarray(x, dtype=float).reshape(-1)
            lf = self._lf
            T = np.vstack([np.asarray(lf.eta(x), float), np.asarray(lf.etahat(x), float)])
            if linalg.numeric_rank(T) != T.shape[0] or T.shape[0] != T.shape[1]:
                raise StructureError("eta/etahat do not form a linear isomorphism")
            rows = [np.asarray(lf.zeta(x), float)]
            if lf.zetahat is not None:
                rows.append(np.asarray(lf.zetahat(x), float))
                S = np.vstack(rows)
                if linalg.numeric_rank(S) != S.shape[0] or S.shape[0] != S.shape[1]:
                    raise StructureError("zeta/zetahat do not form a linear isomorphism")
            xi = self.phase_point(x)
            points = self.basis_at(x, xi)
            for i, pi in enumerate(points):
                for pj in points[i:]:
                    if abs(pairing(pi, pj)) > tol:
                        raise StructureError(
                            f"pointwise subspace at x={x} is not isotropic"
                        )


class InducedDirac(DiracAlgebroid):
    """Structure induced from a bivector graph by adapted constraints.

    Built from a skew algebroid together with index selectors: base indices
    A with x^A = 0 (the support), constrained fiber indices with y = 0, and
    optionally one distinguished fiber index pinned to y = 1 (the affine
    case).  Membership equations in the adapted coordinates:

        x^A = 0 (phase),
        xdot = rho(x)[:, free] y_free (+ rho(x)[:, fixed] in the affine case),
        y_constrained = 0 (and y_fixed = 1),
        for each free kappa:
            xidot_kappa + rho^a_kappa p_a
            - c^j_{iota kappa} y^iota xi_j (- c^j_{fixed kappa} xi_j) = 0,

    while the xidot components of the constrained indices stay free.
    """

    kind = "induced"

    def __init__(self, algebroid, zero_fiber=(), zero_base=(), fixed_fiber=None):
        super().__init__(algebroid.chart)
        n, m = self.chart.base_dim, self.chart.fiber_dim
        zero_fiber = tuple(sorted(set(int(i) for i in zero_fiber)))
        zero_base = tuple(sorted(set(int(a) for a in zero_base)))
        if any(i < 0 or i >= m for i in zero_fiber):
            raise ConstraintError(f"fiber selector out of range for fiber_dim={m}")
        if any(a < 0 or a >= n for a in zero_base):
            raise ConstraintError(f"base selector out of range for base_dim={n}")
        if fixed_fiber is not None:
            fixed_fiber = int(fixed_fiber)
            if fixed_fiber < 0 or fixed_fiber >= m:
                raise ConstraintError("fixed fiber index out of range")
            if fixed_fiber in zero_fiber:
                raise ConstraintError("fixed fiber index also marked zero")
        self.algebroid = algebroid
        self.zero_fiber = zero_fiber
        self.zero_base = zero_base
        self.fixed_fiber = fixed_fiber
        removed = set(zero_fiber) | ({fixed_fiber} if fixed_fiber is not None else set())
        self.free_fiber = tuple(i for i in range(m) if i not in removed)
        free = np.array(self.free_fiber, dtype=int)
        constrained = np.array(
            sorted(removed), dtype=int
        )
        r = free.size
        sel_constrained = _selector_rows(constrained, m)

        def eta(x):
            rows = np.zeros((r, n + m))
            for k, i in enumerate(free):
                rows[k, n + i] = 1.0
            return rows

        def etahat(x):
            rho = algebroid.anchor(x)
            rows = np.zeros((n + constrained.size, n + m))
            rows[:n, :n] = np.eye(n)
            rows[:n, n + free] = -rho[:, free]
            rows[n:, n:] = sel_constrained
            return rows

        def zeta(x):
            rho = algebroid.anchor(x)
            rows = np.zeros((r, n + m))
            rows[:, :n] = rho[:, free].T
            for k, i in enumerate(free):
                rows[k, n + i] = 1.0
            return rows

        def zetahat(x):
            rows = np.zeros((n + constrained.size, n + m))
            rows[:n, :n] = np.eye(n)
            for k, i in enumerate(constrained):
                rows[n + k, n + i] = 1.0
            return rows

        def structure(x):
            c = algebroid.structure(x)
            return c[np.ix_(free, free, np.arange(m))]

        velocity_offset = None
        drift = None
        if fixed_fiber is not None:
            i0 = fixed_fiber

            def velocity_offset(x):
                rho = algebroid.anchor(x)
                off = np.zeros(n + constrained.size)
                off[:n] = rho[:, i0]
                off[n + int(np.searchsorted(constrained, i0))] = 1.0
                return off

            def drift(x):
                c = algebroid.structure(x)
                return c[free, i0, :]

        phase = None
        if zero_base:
            idx = np.array(zero_base, dtype=int)

            def phase(x, xi):
                return np.asarray(x, float)[idx]

        self._lf = LocalForm(self.chart, eta, etahat, zeta, zetahat,
                             structure=structure, velocity_offset=velocity_offset,
                             drift=drift, phase=phase)

    def local_form(self):
        return self._lf

    def project_support(self, x):
        x = np.array(x, dtype=float).reshape(-1)
        for a in self.zero_base:
            x[a] = 0.0
        return x


class TimeExtendedDirac(DiracAlgebroid):
    """Affine extension by a clock coordinate with unit speed.

    The base gains a leading coordinate t with the equation tdot = 1; its
    conjugate momentum slot stays free (a new core direction).  All other
    data of the underlying structure is kept, evaluated at the original
    base coordinates.
    """

    kind = "time_extended"

    def __init__(self, base):
        chart = Chart(
            base.chart.base_dim + 1,
            base.chart.fiber_dim,
            base_labels=("clock",) + base.chart.base_labels,
            fiber_labels=base.chart.fiber_labels,
        )
        super().__init__(chart)
        self.base = base
        nb, m = base.chart.base_dim, base.chart.fiber_dim
        blf = base.local_form()

        def split(x):
            return np.asarray(x, float)[1:]

        def eta(x):
            e = np.asarray(blf.eta(split(x)), float)
            return np.hstack([np.zeros((e.shape[0], 1)), e[:, :nb], e[:, nb:]])

        def etahat(x):
            e = np.asarray(blf.etahat(split(x)), float)
            top = np.zeros((1, 1 + nb + m))
            top[0, 0] = 1.0
            rest = np.hstack([np.zeros((e.shape[0], 1)), e[:, :nb], e[:, nb:]])
            return np.vstack([top, rest])

        def zeta(x):
            z = np.asarray(blf.zeta(split(x)), float)
            return np.hstack([np.zeros((z.shape[0], 1)), z[:, :nb], z[:, nb:]])

        def zetahat(x):
            if blf.zetahat is None:
                return None
            z = np.asarray(blf.zetahat(split(x)), float)
            top = np.zeros((1, 1 + nb + m))
            top[0, 0] = 1.0
            rest = np.hstack([np.zeros((z.shape[0], 1)), z[:, :nb], z[:, nb:]])
            return np.vstack([top, rest])

        def structure(x):
            return blf.structure_at(split(x))

        def velocity_offset(x):
            rows = 1 + np.asarray(blf.etahat(split(x)), float).shape[0]
            off = np.zeros(rows)
            off[0] = 1.0
            base_off = blf.offset_at(split(x))
            if base_off is not None:
                off[1:] = base_off
            return off

        drift = None
        if blf.drift is not None:
            def drift(x):
                return blf.drift_at(split(x))

        phase = None
        if blf.phase is not None:
            def phase(x, xi):
                return blf.phase_at(split(x), xi)

        self._lf = LocalForm(chart, eta, etahat, zeta, zetahat,
                             structure=structure, velocity_offset=velocity_offset,
                             drift=drift, phase=phase)

    def local_form(self):
        return self._lf

    def project_support(self, x):
        x = np.array(x, dtype=float).reshape(-1)
        x[1:] = self.base.project_support(x[1:])
        return x


def time_extend(dirac):
    """Extend a structure by a unit-speed clock coordinate."""
    return TimeExtendedDirac(dirac)
