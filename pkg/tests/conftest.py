import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240816)


def central_jet(fn, point, h=1e-5):
    """Finite-difference value/gradient/Hessian oracle for scalar fn."""
    point = np.asarray(point, dtype=float)
    n = point.size
    value = fn(point)
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        grad[i] = (fn(point + step) - fn(point - step)) / (2 * h)
        hess[i, i] = (fn(point + step) - 2 * value + fn(point - step)) / h**2
    for i in range(n):
        for j in range(i + 1, n):
            si = np.zeros(n)
            sj = np.zeros(n)
            si[i] = h
            sj[j] = h
            hess[i, j] = hess[j, i] = (
                fn(point + si + sj)
                - fn(point + si - sj)
                - fn(point - si + sj)
                + fn(point - si - sj)
            ) / (4 * h**2)
    return value, grad, hess
