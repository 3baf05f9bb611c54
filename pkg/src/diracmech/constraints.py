"""Inducing new Dirac structures from velocity constraints.

Adapted-coordinate constraints (index selectors with x^A = 0 on the base
and y^I = 0 on the fiber, plus an optional fiber index pinned to 1 in the
affine case) admit a closed-form induced structure on bivector-graph bases.
A general matrix form W(x), whose kernel on (xdot, y) is the constraint
subspace, is supported through the pointwise assembly only, which doubles
as an independent oracle for the closed form.
"""

import numpy as np

from . import linalg
from .dirac import CanonicalDirac, InducedDirac, PiGraphDirac
from .errors import ConstraintError, StructureError

CONTAINMENT_TOL = 1e-8
CONTAINMENT_PROBES = 20


class LinearConstraint:
    """Linear velocity constraint.

    Adapted form: ``fiber`` lists fiber indices with y = 0 and ``base``
    lists base indices with x = 0 (the support).  General form: ``matrix``
    maps x to a (codim, n+m) array whose kernel on (xdot, y) is the
    constraint subspace, which must lie inside the velocity bundle.
    """

    def __init__(self, fiber=(), base=(), matrix=None):
        self.fiber = tuple(sorted(set(int(i) for i in fiber)))
        self.base = tuple(sorted(set(int(a) for a in base)))
        self.matrix = matrix
        if matrix is not None and (self.fiber or ()):  # mixed forms are ambiguous
            raise ConstraintError("give either index selectors or a matrix, not both")

    @property
    def is_adapted(self):
        return self.matrix is None


class AffineConstraint:
    """Affine velocity constraint in adapted form.

    One distinguished fiber coordinate is pinned to 1 (``fixed``), the
    indices in ``fiber`` are pinned to 0, and ``base`` lists the support
    equations x = 0.  The model vector constraint pins ``fixed`` to 0 as
    well.
    """

    def __init__(self, fixed, fiber=(), base=()):
        self.fixed = int(fixed)
        self.fiber = tuple(sorted(set(int(i) for i in fiber)))
        self.base = tuple(sorted(set(int(a) for a in base)))
        if self.fixed in self.fiber:
            raise ConstraintError("the fixed index cannot also be pinned to zero")

    @property
    def model(self):
        return LinearConstraint(fiber=self.fiber + (self.fixed,), base=self.base)


def _graph_data(dirac):
    """Underlying algebroid and inherited selectors of a bivector-graph base."""
    if isinstance(dirac, PiGraphDirac):
        return dirac.algebroid, (), (), None
    if isinstance(dirac, CanonicalDirac):
        return dirac.as_pi_graph().algebroid, (), (), None
    if isinstance(dirac, InducedDirac):
        return dirac.algebroid, dirac.zero_fiber, dirac.zero_base, dirac.fixed_fiber
    raise ConstraintError(
        "closed-form induction needs a bivector-graph base "
        f"(got representation '{dirac.kind}')"
    )


def _check_containment(dirac, algebroid, fiber_idx, base_idx, rng=None):
    """Verify on support probes that the constrained graph vectors are admissible."""
    rng = rng or np.random.default_rng(7)
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    free = [i for i in range(m) if i not in fiber_idx]
    from .dirac import VelocityPair

    for _ in range(CONTAINMENT_PROBES):
        x = rng.standard_normal(n)
        for a in base_idx:
            x[a] = 0.0
        x = dirac.project_support(x)
        rho = algebroid.anchor(x)
        for i in free:
            y = np.zeros(m)
            y[i] = 1.0
            pair = VelocityPair(x, rho[:, i], y)
            res = dirac.velocity_residual(pair)
            if np.max(np.abs(res), initial=0.0) > CONTAINMENT_TOL:
                raise ConstraintError(
                    f"constraint subspace leaves the velocity bundle at x={x}: "
                    f"residual {res}"
                )


def induce(dirac, constraint):
    """Closed-form induced structure for adapted constraints on graph bases."""
    if not isinstance(constraint, LinearConstraint):
        raise ConstraintError("induce expects a LinearConstraint")
    if not constraint.is_adapted:
        raise ConstraintError(
            "general matrix constraints are only supported pointwise; "
            "use pointwise_induce"
        )
    algebroid, old_fiber, old_base, fixed = _graph_data(dirac)
    fiber_idx = tuple(sorted(set(old_fiber) | set(constraint.fiber)))
    base_idx = tuple(sorted(set(old_base) | set(constraint.base)))
    if fixed is not None and fixed in fiber_idx:
        raise ConstraintError("new constraint pins the affine fiber index to zero")
    _check_containment(dirac, algebroid, fiber_idx, base_idx)
    return InducedDirac(algebroid, zero_fiber=fiber_idx, zero_base=base_idx,
                        fixed_fiber=fixed)


def induce_affine(dirac, constraint):
    """Closed-form affine induced structure (one fiber coordinate pinned to 1)."""
    if not isinstance(constraint, AffineConstraint):
        raise ConstraintError("induce_affine expects an AffineConstraint")
    algebroid, old_fiber, old_base, fixed = _graph_data(dirac)
    if fixed is not None and fixed != constraint.fixed:
        raise ConstraintError("base structure already pins a different fiber index")
    if constraint.fixed in old_fiber:
        raise ConstraintError("affine index is pinned to zero by the base structure")
    fiber_idx = tuple(sorted(set(old_fiber) | set(constraint.fiber)))
    base_idx = tuple(sorted(set(old_base) | set(constraint.base)))
    _check_containment(dirac, algebroid, fiber_idx + (constraint.fixed,), base_idx)
    return InducedDirac(algebroid, zero_fiber=fiber_idx, zero_base=base_idx,
                        fixed_fiber=constraint.fixed)


def _constraint_space_at(dirac, constraint, x):
    """Columns spanning the constrained velocity subspace at x."""
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    if constraint.is_adapted:
        vel = dirac.velocity_space(x)
        if constraint.fiber:
            rows = np.zeros((len(constraint.fiber), n + m))
            for k, i in enumerate(constraint.fiber):
                rows[k, n + i] = 1.0
            return linalg.intersect_span_with_kernel(vel, rows)
        return vel
    W = np.atleast_2d(np.asarray(constraint.matrix(x), dtype=float))
    if W.shape[1] != n + m:
        raise ConstraintError(f"constraint matrix has {W.shape[1]} columns, expected {n + m}")
    V = linalg.null_space(W)
    # the kernel must itself consist of admissible velocity pairs
    from .dirac import VelocityPair

    for k in range(V.shape[1]):
        pair = VelocityPair(x, V[:n, k], V[n:, k])
        res = dirac.velocity_residual(pair)
        if np.max(np.abs(res), initial=0.0) > CONTAINMENT_TOL:
            raise ConstraintError(
                f"kernel of the constraint matrix leaves the velocity bundle at x={x}"
            )
    return V


def pointwise_induce(dirac, constraint, x, xi):
    """Pointwise induced subspace at (x, xi), as fiber-vector columns.

    Intersects the pointwise subspace of the base structure with the
    preimage of the constrained velocity subspace and appends the embedded
    annihilator of the constraint; the assembled span must have dimension
    n + m.  Serves as the independent oracle for ``induce``.
    """
    if not isinstance(constraint, LinearConstraint):
        raise ConstraintError("pointwise_induce expects a LinearConstraint")
    n, m = dirac.chart.base_dim, dirac.chart.fiber_dim
    x = np.asarray(x, dtype=float).reshape(-1)
    if constraint.base:
        if np.max(np.abs(x[list(constraint.base)]), initial=0.0) > 1e-12:
            raise ConstraintError("probe point is off the constraint support")
    B = dirac.basis_matrix_at(x, xi)
    V = _constraint_space_at(dirac, constraint, x)

    # directions of the base structure whose velocity part stays inside V
    vel_rows = np.zeros((n + m, 2 * (n + m)))
    vel_rows[:n, :n] = np.eye(n)
    vel_rows[n:, 2 * n + m:] = np.eye(m)
    complement = linalg.null_space(V.T).T  # rows annihilating V
    tilde = (
        linalg.intersect_span_with_kernel(B, complement @ vel_rows)
        if complement.size
        else B
    )

    # annihilator of V under p . xdot + xidot . y, embedded in the core slots
    ann = linalg.annihilator(np.hstack([V[:n].T, V[n:].T]))  # columns (p, xidot)
    embedded = np.zeros((2 * (n + m), ann.shape[1]))
    embedded[n + m:2 * n + m] = ann[:n]
    embedded[n:n + m] = ann[n:]

    span = linalg.orthonormal_span(np.hstack([tilde, embedded]))
    if span.shape[1] != n + m:
        raise StructureError(
            f"induced pointwise subspace has dimension {span.shape[1]}, expected "
            f"{n + m} (rank bookkeeping failed)"
        )
    return span


class IntegrabilityReport:
    """Verdicts of the two coordinate integrability conditions."""

    def __init__(self, cond1, cond2, anchor_violation, anchor_witness,
                 structure_violation, structure_witness, probes):
        self.cond1 = cond1
        self.cond2 = cond2
        self.anchor_violation = anchor_violation
        self.anchor_witness = anchor_witness
        self.structure_violation = structure_violation
        self.structure_witness = structure_witness
        self.probes = probes

    @property
    def is_dirac_lie(self):
        return self.cond1 and self.cond2

    def as_dict(self):
        return {
            "cond1": self.cond1,
            "cond2": self.cond2,
            "anchor_violation": self.anchor_violation,
            "anchor_witness": self.anchor_witness,
            "structure_violation": self.structure_violation,
            "structure_witness": self.structure_witness,
            "dirac_lie": self.is_dirac_lie,
        }


def check_integrability(induced, probes=20, tol=1e-9, jacobi_tol=1e-6, seed=11):
    """Test whether an induced structure closes under the ambient bracket.

    Condition 1: anchor rows of the support-transverse base directions
    vanish on the constrained fiber indices' complement.  Condition 2: the
    structure functions carry no component along the removed fiber
    directions when both lower indices are free.  Both are evaluated on
    random probe points of the support; the largest violating entry is
    reported.  Requires a linear constraint over a bivector graph whose
    algebroid passes a Jacobi test.
    """
    if not isinstance(induced, InducedDirac):
        raise ConstraintError("integrability checks need an induced structure")
    if induced.fixed_fiber is not None:
        raise ConstraintError("integrability checks cover linear constraints only")
    algebroid = induced.algebroid
    n, m = induced.chart.base_dim, induced.chart.fiber_dim
    free = list(induced.free_fiber)
    removed = list(induced.zero_fiber)
    base_idx = list(induced.zero_base)
    rng = np.random.default_rng(seed)

    from .algebroid import basis_sections

    sections = basis_sections(induced.chart)
    xs = []
    for _ in range(probes):
        x = rng.standard_normal(n)
        for a in base_idx:
            x[a] = 0.0
        xs.append(x)
    if not xs:
        xs = [np.zeros(n)]

    jac_max = 0.0
    for x in xs[: min(len(xs), 5)]:
        for i in range(m):
            for j in range(i + 1, m):
                for k in range(j + 1, m):
                    jac = algebroid.jacobiator(sections[i], sections[j], sections[k], x)
                    jac_max = max(jac_max, float(np.max(np.abs(jac), initial=0.0)))
    if jac_max > jacobi_tol:
        raise StructureError(
            f"base algebroid fails the Jacobi test (violation {jac_max:.3e}); "
            "integrability verdicts are only meaningful over Lie algebroids"
        )

    anchor_violation = 0.0
    anchor_witness = None
    structure_violation = 0.0
    structure_witness = None
    for x in xs:
        rho = algebroid.anchor(x)
        for a in base_idx:
            for i in free:
                v = float(abs(rho[a, i]))
                if v > anchor_violation:
                    anchor_violation = v
                    anchor_witness = {"entry": (int(a), int(i)), "x": x.copy(), "value": float(rho[a, i])}
        c = algebroid.structure(x)
        for i in free:
            for j in free:
                for k in removed:
                    v = float(abs(c[i, j, k]))
                    if v > structure_violation:
                        structure_violation = v
                        structure_witness = {
                            "entry": (int(i), int(j), int(k)),
                            "x": x.copy(),
                            "value": float(c[i, j, k]),
                        }
    return IntegrabilityReport(
        cond1=bool(anchor_violation <= tol),
        cond2=bool(structure_violation <= tol),
        anchor_violation=anchor_violation,
        anchor_witness=anchor_witness,
        structure_violation=structure_violation,
        structure_witness=structure_witness,
        probes=xs,
    )
