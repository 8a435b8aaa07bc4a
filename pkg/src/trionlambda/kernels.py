"""Inner loops: pivoted elimination and Dormand-Prince stepping.

Each function is written once in numba-compatible numpy. ``_accel.kernel``
compiles it unless ``TRIONLAMBDA_NUMBA=0``, in which case the same body runs
as ordinary numpy code. All array arguments must be contiguous complex128
(except where noted); the public wrappers in ``operators`` and ``lindblad``
take care of that.
"""
import numpy as np

from ._accel import kernel

# Status codes returned by dopri5_linear.
STEP_OK = 0
STEP_UNDERFLOW = 1
STEP_BUDGET = 2


@kernel
def gauss_solve(a, b, pivot_floor):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    Returns ``(x, ok)``; ``ok`` is False as soon as a pivot is not above
    ``pivot_floor`` (the contents of ``x`` are then meaningless).
    """
    n = a.shape[0]
    m = a.copy()
    x = b.copy()
    for k in range(n):
        p = k + np.argmax(np.abs(m[k:, k]))
        if np.abs(m[p, k]) <= pivot_floor:
            return x, False
        if p != k:
            row = m[k].copy()
            m[k] = m[p]
            m[p] = row
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        f = m[k + 1:, k] / m[k, k]
        m[k + 1:, k:] -= np.outer(f, m[k, k:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - np.sum(m[k, k + 1:] * x[k + 1:])) / m[k, k]
    return x, True


@kernel
def gauss_solve_batch(a, b, pivot_floor):
    """Solve a stack of systems ``a[i] x[i] = b[i]``; ``pivot_floor`` per system."""
    nb = a.shape[0]
    out = np.empty_like(b)
    ok = np.empty(nb, dtype=np.bool_)
    for i in range(nb):
        x, good = gauss_solve(a[i], b[i], pivot_floor[i])
        out[i] = x
        ok[i] = good
    return out, ok


@kernel
def dopri5_linear(lmat, y0, t_out, proj, rtol, atol, h0, max_steps):
    """Integrate ``y' = lmat @ y`` from t=0 with the Dormand-Prince 5(4) pair.

    Steps are clipped so that every time in ``t_out`` (ascending, >= 0) is hit
    exactly; at each one ``proj @ y`` is stored. Returns
    ``(out, status, t_reached)`` with status one of STEP_OK, STEP_UNDERFLOW,
    STEP_BUDGET.
    """
    n_out = t_out.shape[0]
    out = np.zeros((n_out, proj.shape[0]), dtype=np.complex128)
    y = y0.copy()
    t = 0.0
    idx = 0
    while idx < n_out and t_out[idx] <= t:
        out[idx] = proj @ y
        idx += 1
    k1 = lmat @ y
    h = h0
    steps = 0
    while idx < n_out:
        gap = t_out[idx] - t
        truncated = h >= gap
        hs = gap if truncated else h

        k2 = lmat @ (y + hs * (k1 / 5.0))
        k3 = lmat @ (y + hs * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2))
        k4 = lmat @ (y + hs * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3))
        k5 = lmat @ (y + hs * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2
                               + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4))
        k6 = lmat @ (y + hs * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2
                               + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
                               - 5103.0 / 18656.0 * k5))
        y5 = y + hs * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4
                       - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6)
        k7 = lmat @ y5
        e = hs * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4
                  - 17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.max(np.abs(e) / scale)

        if err <= 1.0:
            t = t_out[idx] if truncated else t + hs
            y = y5
            k1 = k7
            while idx < n_out and t_out[idx] <= t:
                out[idx] = proj @ y
                idx += 1
        elif hs < 1e-13 * max(1.0, abs(t)):
            return out, STEP_UNDERFLOW, t

        if err == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err ** -0.2))
        if truncated and err <= 1.0:
            h = max(h, hs * factor)
        else:
            h = hs * factor

        steps += 1
        if steps >= max_steps:
            return out, STEP_BUDGET, t
    return out, STEP_OK, t
