"""
Hot inner loops of the threshold ARCH recursion.

All kernels work in units of omega: with ``u_t = eps_t**2 / omega`` the
recursion reads

    u_t = (1 + alpha * u_{t-1} * 1{u_{t-1} > k * u_{t-2}}) * eta_t**2

because the regime indicator is invariant under a common rescaling of the
state.  Callers multiply by omega on the way out, which keeps the model
exactly scale-equivariant in floating point.

Each kernel exists in two flavours, ``*_py`` (interpreted) and ``*_jit``
(numba, None if unavailable); the unsuffixed name is the one selected by
:mod:`tarch._accel`.
"""

import numpy as np

from tarch._accel import compile_kernel, select


def path_py(eta, alpha, k, u1, u2, cap, h_out, u_out, regime_out):
    """Fill ``h_out`` (sigma2 / omega), ``u_out`` and ``regime_out``.

    Returns the number of completed steps; it is smaller than ``len(eta)``
    when step ``n`` would have produced ``u > cap`` (that step is not written).
    """
    n = eta.shape[0]
    for t in range(n):
        active = u1 > k * u2
        if active:
            h = 1.0 + alpha * u1
        else:
            h = 1.0
        e = eta[t]
        u = h * (e * e)
        if not u <= cap:
            return t
        h_out[t] = h
        u_out[t] = u
        regime_out[t] = active
        u2 = u1
        u1 = u
    return n


def moment_py(eta, alpha, k, u1, u2, cap, burnin, p):
    """Run the recursion without storing it.

    Returns ``(sum of u**p after burnin, regime count after burnin, steps done)``.
    ``steps done < len(eta)`` signals overflow past ``cap``.
    """
    n = eta.shape[0]
    acc = 0.0
    hits = 0
    for t in range(n):
        active = u1 > k * u2
        if active:
            h = 1.0 + alpha * u1
        else:
            h = 1.0
        e = eta[t]
        u = h * (e * e)
        if not u <= cap:
            return acc, hits, t
        if t >= burnin:
            # repeated multiplication: identical under numba and CPython
            up = 1.0
            for _ in range(p):
                up *= u
            acc += up
            if active:
                hits += 1
        u2 = u1
        u1 = u
    return acc, hits, n


path_jit = compile_kernel(path_py)
moment_jit = compile_kernel(moment_py)

path = select(path_py, path_jit)
moment = select(moment_py, moment_jit)


def alloc_path(n):
    return np.empty(n), np.empty(n), np.empty(n, dtype=np.bool_)
