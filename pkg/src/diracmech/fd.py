"""Central finite differences with coordinate-scaled steps.

First derivatives use step h_i = REL_FIRST * max(1, |x_i|).  Second
derivatives obtained by differencing a numerical gradient use the coarser
outer step REL_SECOND * max(1, |x_i|) to balance the noise of the inner
difference; differencing an analytic gradient keeps the first-order step.
"""

import numpy as np

REL_FIRST = 1e-6
REL_SECOND = 1e-4


def steps(x, rel=REL_FIRST):
    x = np.asarray(x, dtype=float)
    return rel * np.maximum(1.0, np.abs(x))


def gradient(f, x, rel=REL_FIRST):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    h = steps(x, rel)
    g = np.zeros(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h[i]
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h[i])
    return g


def jacobian(f, x, rel=REL_FIRST):
    """Central-difference Jacobian of a vector function, shape (len(f), len(x))."""
    x = np.asarray(x, dtype=float)
    h = steps(x, rel)
    cols = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h[i]
        fp = np.asarray(f(x + e), dtype=float)
        fm = np.asarray(f(x - e), dtype=float)
        cols.append((fp - fm) / (2.0 * h[i]))
    if not cols:
        probe = np.atleast_1d(np.asarray(f(x), dtype=float))
        return np.zeros((probe.size, 0))
    return np.stack(cols, axis=-1)


def hessian(f, x, grad=None):
    """Second-derivative matrix of a scalar function.

    With an analytic ``grad`` supplied, a single central difference of it is
    taken; otherwise nested central differences are used.
    """
    if grad is not None:
        return jacobian(grad, x, rel=REL_FIRST)
    return jacobian(lambda z: gradient(f, z), x, rel=REL_SECOND)
