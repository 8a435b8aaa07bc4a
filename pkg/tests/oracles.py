"""Independent reference computations used by the tests.

None of these call the resolvent or the constrained steady-state solve that
they are checking.
"""
import numpy as np
import scipy.linalg

from trionlambda.lindblad import evolve, vec


def two_level_excited(omega, delta, gamma):
    """Textbook optical-Bloch steady state rho_ee."""
    return (omega**2 / 4) / (delta**2 + gamma**2 / 4 + omega**2 / 2)


def lindblad_rhs(h, channels, rho):
    """Direct matrix evaluation of -i[H, rho] + sum_k r (L rho L+ - {L+L, rho}/2)."""
    out = -1j * (h @ rho - rho @ h)
    for ch in channels:
        op, r = ch.operator, ch.rate
        ldl = op.conj().T @ op
        out = out + r * (op @ rho @ op.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def slowest_decay(lmat):
    """Smallest non-zero |Re lambda| of the Liouvillian."""
    re = np.sort(np.abs(np.linalg.eigvals(lmat).real))
    return re[1]


def long_time_state(liou, rho0=None, n_decay=40.0, tol=1e-12):
    """Propagate for ``n_decay`` slowest decay times with the RK integrator."""
    d = liou.hilbert_dim
    if rho0 is None:
        rho0 = np.zeros((d, d), complex)
        rho0[0, 0] = 1.0
    t_end = n_decay / slowest_decay(liou.matrix)
    return evolve(liou, rho0, np.array([t_end]), tol)[0]


def expm_state(liou, rho0, t):
    d = liou.hilbert_dim
    return (scipy.linalg.expm(liou.matrix * t) @ vec(rho0)).reshape((d, d), order="F")


def fft_spectrum(liou, rho_ss, sigma, half_width, tol=1e-11, oversample=100.0, n_decay=30.0):
    """Spectrum from the FFT of the propagated incoherent correlation.

    C(tau) = tr[sigma e^{L tau}(rho sigma+)] - |<sigma>|^2 is sampled on a
    uniform grid by the RK integrator, then
    S(w) = Re int_0^T e^{i w tau} C(tau) dtau by the trapezoid rule via FFT.
    Returns the FFT frequencies with |w| <= half_width and S there.
    """
    x = rho_ss @ sigma.conj().T
    mean_sq = np.trace(sigma @ rho_ss) * np.trace(x)
    t_end = n_decay / slowest_decay(liou.matrix)
    h = 2 * np.pi / (oversample * half_width)
    n = int(np.ceil(t_end / h))
    n = 1 << int(np.ceil(np.log2(n)))
    taus = h * np.arange(n)
    c = evolve(liou, x, taus, tol, observables=[sigma])[:, 0] - mean_sq
    total = h * (n * np.fft.ifft(c) - 0.5 * c[0])
    w = 2 * np.pi * np.fft.fftfreq(n, d=h)
    order = np.argsort(w)
    w, s = w[order], total.real[order]
    keep = np.abs(w) <= half_width
    return w[keep], s[keep]
