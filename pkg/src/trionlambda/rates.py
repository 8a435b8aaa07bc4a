"""Coherence-free population rate model of the same Lambda-system.

Coherences are adiabatically eliminated, leaving Lorentzian stimulated rates
W1 (s<->t) and W2 (p<->t). The resulting fluorescence depends on delta2 only
through delta2**2, so it can never produce an asymmetric dip.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyStateError, SingularMatrixError
from .operators import solve_linear


@dataclass(frozen=True)
class RatePopulations:
    n_s: float
    n_p: float
    n_t: float

    def as_array(self):
        return np.array([self.n_s, self.n_p, self.n_t])


def stimulated_rate(omega_rabi, delta, linewidth):
    """W = (Omega^2/2) (lw/2) / (delta^2 + (lw/2)^2); ``linewidth`` is a FWHM."""
    if not linewidth > 0:
        raise ValueError(f"linewidth must be > 0, got {linewidth}")
    hw = 0.5 * linewidth
    return 0.5 * omega_rabi**2 * hw / (delta**2 + hw**2)


def linewidths(p):
    """FWHM of the s-t and p-t optical coherences."""
    return p.gamma_r, p.gamma_r + p.gamma_p_relax + 2.0 * p.gamma_p_deph


def rate_matrix(p):
    """Generator M with dn/dt = M n for n = (n_s, n_p, n_t)."""
    lw1, lw2 = linewidths(p)
    w1 = stimulated_rate(p.omega1_rabi, p.delta1, lw1)
    w2 = stimulated_rate(p.omega2_rabi, p.delta2, lw2)
    gf = p.gamma_r * (1.0 - p.branching_b)
    ga = p.gamma_r * p.branching_b
    gp = p.gamma_p_relax
    return np.array([
        [-w1, gp, w1 + gf],
        [0.0, -w2 - gp, w2 + ga],
        [w1, w2, -w1 - w2 - p.gamma_r],
    ])


def rate_steady_state(p):
    m = rate_matrix(p)
    a = m.astype(np.complex128)
    a[0, :] = 1.0
    rhs = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    try:
        n = np.real(solve_linear(a, rhs))
    except SingularMatrixError as exc:
        raise DegenerateSteadyStateError("rate equations have no unique steady state") from exc
    return RatePopulations(*(float(x) for x in n))


def rate_fluorescence(p):
    return p.gamma_r * (1.0 - p.branching_b) * rate_steady_state(p).n_t
