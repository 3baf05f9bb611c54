"""Dense subspace helpers: kernels, spans, annihilators, principal angles.

Subspaces are represented by matrices whose *columns* form an orthonormal
basis.  Rank decisions use singular values with the relative threshold
``RANK_RCOND * sigma_max``.
"""

import numpy as np
import scipy.linalg

RANK_RCOND = 1e-9


def null_space(a, rcond=RANK_RCOND, scale=None):
    """Orthonormal basis (columns) of the kernel of ``a``.

    ``scale`` overrides the reference magnitude for the rank decision; by
    default the largest singular value of ``a`` itself is used.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    _, s, vh = np.linalg.svd(a)
    ref = (s[0] if s.size else 0.0) if scale is None else float(scale)
    rank = int(np.sum(s > ref * rcond))
    return vh[rank:].conj().T


def numeric_rank(a, rcond=RANK_RCOND):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > s[0] * rcond)) if s.size else 0


def orthonormal_span(columns, rcond=RANK_RCOND):
    """Orthonormal basis (columns) of the column span of ``columns``."""
    m = np.atleast_2d(np.asarray(columns, dtype=float))
    if m.shape[1] == 0:
        return m.reshape(m.shape[0], 0)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    tol = s[0] * rcond if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > tol))
    return u[:, :rank]


def annihilator(vectors_rows):
    """Kernel of the pairing with the given row vectors."""
    return null_space(np.atleast_2d(np.asarray(vectors_rows, dtype=float)))


def intersect_span_with_kernel(span_cols, constraint_rows, rcond=RANK_RCOND):
    """Columns spanning {v in col-span : constraint_rows @ v = 0}.

    The rank decision for the restricted constraints is taken relative to
    the scale of the constraint matrix itself, so constraints that vanish
    identically on the span (pure roundoff products) cut nothing.
    """
    b = np.asarray(span_cols, dtype=float)
    c = np.atleast_2d(np.asarray(constraint_rows, dtype=float))
    if b.shape[1] == 0 or c.shape[0] == 0:
        return b
    scale = np.linalg.norm(c, 2)
    alpha = null_space(c @ b, rcond, scale=scale if scale > 0 else None)
    return orthonormal_span(b @ alpha, rcond)


def principal_angles(a_cols, b_cols):
    """Principal angles (radians, descending) between two column spans."""
    a = np.atleast_2d(np.asarray(a_cols, dtype=float))
    b = np.atleast_2d(np.asarray(b_cols, dtype=float))
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(a, b)


def max_principal_angle(a_cols, b_cols):
    ang = principal_angles(a_cols, b_cols)
    return float(ang[0]) if ang.size else 0.0


def subspaces_equal(a_cols, b_cols, tol=1e-10):
    a = np.atleast_2d(np.asarray(a_cols, dtype=float))
    b = np.atleast_2d(np.asarray(b_cols, dtype=float))
    if numeric_rank(a) != numeric_rank(b):
        return False
    return max_principal_angle(a, b) <= tol
