"""Two-time quantities from the quantum regression theorem.

Spectra are evaluated in the frame of the laser that defines the emitting
transition's reference (laser 1 for the fundamental line, laser 2 for the
Auger line); positive frequency means blue of that laser. Delays are in ns.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSplittingError, UndefinedNormalizationError
from .lindblad import evolve, steady_state, trace_functional, vec
from .operators import dagger, solve_linear_batch
from .trion import P, S, T, liouvillian

CHANNELS = ("fundamental", "auger")


def jump_operator(channel):
    op = np.zeros((3, 3), dtype=np.complex128)
    if channel == "fundamental":
        op[S, T] = 1.0
    elif channel == "auger":
        op[P, T] = 1.0
    else:
        raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
    return op


def channel_rate(p, channel):
    if channel == "fundamental":
        return p.gamma_r * (1.0 - p.branching_b)
    if channel == "auger":
        return p.gamma_r * p.branching_b
    raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    values: np.ndarray
    channel: str
    # weight of the elastic delta peak at zero frequency, |<sigma>|^2
    coherent_weight: float = 0.0
    poles: tuple = field(default=())


@dataclass(frozen=True)
class CorrelationTrace:
    delays: np.ndarray
    values: np.ndarray
    channel_a: str
    channel_b: str

    @property
    def is_auto(self):
        return self.channel_a == self.channel_b


def _incoherent_source(rho_ss, sigma):
    # <sigma+(0) sigma-(tau)> = tr[sigma- e^{L tau}(rho sigma+)]
    x = rho_ss @ dagger(sigma)
    return x - rho_ss * np.trace(x)


def emission_spectrum(p, channel, freq_grid):
    """Incoherent emission spectrum S(w) = Re int_0^inf e^{i w tau} <s+(0) s-(tau)> dtau.

    The steady-state projector is added to the resolvent, which keeps it
    regular at w = 0 while leaving the (traceless) incoherent part unchanged.
    """
    freq = np.asarray(freq_grid, dtype=np.float64)
    if freq.ndim != 1 or np.any(np.diff(freq) <= 0):
        raise ValueError("freq_grid must be a strictly ascending 1-D array")
    sigma = jump_operator(channel)
    liou = liouvillian(p)
    d = liou.hilbert_dim
    rho = steady_state(liou).matrix
    src = vec(_incoherent_source(rho, sigma))
    readout = vec(sigma.T)
    proj = np.outer(vec(rho), trace_functional(d))
    base = proj - liou.matrix
    eye = np.eye(d * d, dtype=np.complex128)

    def solve(w):
        a = base[None, :, :] - 1j * w[:, None, None] * eye
        return solve_linear_batch(a, np.broadcast_to(src, (w.size, d * d)))

    x, ok = solve(freq)
    poles = []
    if not np.all(ok):
        bad = np.flatnonzero(~ok)
        poles = [float(freq[i]) for i in bad]
        x_nudged, ok2 = solve(freq[bad] + 1e-9)
        x[bad] = x_nudged
        if not np.all(ok2):
            x[bad[~ok2]] = np.inf
    values = np.real(x @ readout)
    mean = np.trace(sigma @ rho)
    return Spectrum(freq, values, channel, float(abs(mean) ** 2), tuple(poles))


def _conditional_curve(liou, rho, a_op, b_op, taus, tol):
    cond = a_op @ rho @ dagger(a_op)
    cond = cond / np.trace(cond)
    bb = dagger(b_op) @ b_op
    norm = np.real(np.trace(bb @ rho))
    taus = np.asarray(taus, dtype=np.float64)
    return np.real(evolve(liou, cond, taus, tol, observables=[bb])[:, 0]) / norm


def g2(p, channel_a, channel_b, delays, tol=1e-10):
    """Normalized intensity correlation: a photon on ``channel_a`` at 0, ``channel_b`` at tau.

    Negative delays swap the roles of the two channels.
    """
    delays = np.asarray(delays, dtype=np.float64)
    if delays.ndim != 1 or np.any(np.diff(delays) <= 0):
        raise ValueError("delays must be a strictly ascending 1-D array")
    for ch in (channel_a, channel_b):
        if channel_rate(p, ch) <= 0.0:
            raise UndefinedNormalizationError(f"channel {ch!r} has zero emission rate")
    liou = liouvillian(p)
    rho = steady_state(liou).matrix
    if np.real(rho[T, T]) <= 0.0:
        raise UndefinedNormalizationError("no trion population in the steady state")
    a_op, b_op = jump_operator(channel_a), jump_operator(channel_b)
    values = np.empty_like(delays)
    pos = delays >= 0
    if np.any(pos):
        values[pos] = _conditional_curve(liou, rho, a_op, b_op, delays[pos], tol)
    if np.any(~pos):
        neg_taus = -delays[~pos][::-1]
        values[~pos] = _conditional_curve(liou, rho, b_op, a_op, neg_taus, tol)[::-1]
    return CorrelationTrace(delays, values, channel_a, channel_b)


def convolve_jitter(trace, sigma):
    """Gaussian detector-jitter smoothing (std ``sigma`` ns); for display only."""
    if sigma <= 0:
        return trace
    t = trace.delays
    w = np.gradient(t)
    kern = np.exp(-0.5 * ((t[:, None] - t[None, :]) / sigma) ** 2) * w[None, :]
    smoothed = kern @ trace.values / kern.sum(axis=1)
    return CorrelationTrace(t, smoothed, trace.channel_a, trace.channel_b)


def half_recovery_delay(trace, level=0.5):
    """First delay tau >= 0 at which the trace rises through ``level``."""
    t, v = trace.delays, trace.values
    sel = t >= 0
    t, v = t[sel], v[sel]
    above = np.flatnonzero(v >= level)
    if above.size == 0:
        raise ValueError(f"trace never reaches {level}")
    i = int(above[0])
    if i == 0:
        return float(t[0])
    return float(t[i - 1] + (level - v[i - 1]) * (t[i] - t[i - 1]) / (v[i] - v[i - 1]))


def _refine_peak(x, y, i):
    """Vertex of the parabola through points i-1, i, i+1 (uniform spacing assumed locally)."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(x[i]), float(y1)
    shift = 0.5 * (y0 - y2) / denom
    h = 0.5 * (x[i + 1] - x[i - 1])
    return float(x[i] + shift * h), float(y1 - 0.25 * (y0 - y2) * shift)


def _local_maxima(y):
    return np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1


def oscillation_frequency(trace):
    """Angular frequency (rad/ns) from the mean spacing of the maxima at tau > 0."""
    sel = trace.delays > 0
    t, v = trace.delays[sel], trace.values[sel]
    peaks = [_refine_peak(t, v, i)[0] for i in _local_maxima(v)]
    if len(peaks) < 2:
        raise ValueError("fewer than two maxima; cannot estimate oscillation period")
    period = (peaks[-1] - peaks[0]) / (len(peaks) - 1)
    return 2.0 * np.pi / period


def extract_splitting(spectrum):
    """Separation of the two strongest peaks (sub-grid refined)."""
    w, s = spectrum.frequencies, spectrum.values
    idx = _local_maxima(s)
    idx = idx[s[idx] > 0.05 * np.max(s)]
    if idx.size < 2:
        raise NoSplittingError("fewer than two resolved peaks")
    top = idx[np.argsort(s[idx])[-2:]]
    for i in top:
        half = s[i] / 2
        lo = hi = i
        while lo > 0 and s[lo - 1] >= half:
            lo -= 1
        while hi < s.size - 1 and s[hi + 1] >= half:
            hi += 1
        if hi - lo + 1 < 5:
            warnings.warn("peak spans fewer than 5 grid points; refine the frequency grid", stacklevel=2)
    a, b = (_refine_peak(w, s, int(i))[0] for i in top)
    return abs(a - b)

