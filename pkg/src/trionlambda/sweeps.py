"""Parameter sweeps, dip analysis and Rabi-frequency calibration from power curves."""
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from .errors import FitError
from .lindblad import steady_state_batch
from .rates import rate_fluorescence
from .trion import T, TrionParams, liouvillian

OBSERVABLES = ("fluorescence", "auger", "rate_fluorescence")


@dataclass(frozen=True)
class SweepResult:
    axis1: tuple  # (field name, values)
    axis2: Optional[tuple]
    values: np.ndarray
    observable: str

    @property
    def ndim(self):
        return 1 if self.axis2 is None else 2


@dataclass(frozen=True)
class DipMetrics:
    depth: float
    center: float
    asymmetry: float


@dataclass(frozen=True)
class SaturationFit:
    omega_at_unit_power: float
    residual_norm: float
    fixed_gamma_r: float
    scale: float


def _check_axes(axes):
    axes = [(str(name), np.asarray(vals, dtype=np.float64)) for name, vals in axes]
    if not 1 <= len(axes) <= 2:
        raise ValueError(f"sweep takes 1 or 2 axes, got {len(axes)}")
    known = TrionParams.field_names()
    for name, vals in axes:
        if name not in known:
            raise ValueError(f"unknown field {name!r}; expected one of {known}")
        if vals.ndim != 1 or vals.size == 0 or not np.all(np.isfinite(vals)):
            raise ValueError(f"axis {name!r} needs a non-empty finite 1-D array")
    if len(axes) == 2 and axes[0][0] == axes[1][0]:
        raise ValueError("the two axes must sweep different fields")
    return axes


def _grid_params(p, axes):
    if len(axes) == 1:
        (n1, v1), = axes
        return [p.with_(**{n1: a}) for a in v1]
    (n1, v1), (n2, v2) = axes
    return [p.with_(**{n1: a, n2: b}) for a in v1 for b in v2]


def _chunks(n, parts):
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def evaluate_points(points, observable, threads=1):
    """Observable at each TrionParams in ``points``, in input order."""
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; expected one of {OBSERVABLES}")
    if observable == "rate_fluorescence":
        return np.array([rate_fluorescence(q) for q in points])

    def work(span):
        lo, hi = span
        chunk = points[lo:hi]
        lmats = np.array([liouvillian(q).matrix for q in chunk])
        rho_tt = np.real(steady_state_batch(lmats, 3)[:, T, T])
        if observable == "fluorescence":
            rates = np.array([q.gamma_r * (1.0 - q.branching_b) for q in chunk])
        else:
            rates = np.array([q.gamma_r * q.branching_b for q in chunk])
        return rates * rho_tt

    threads = max(1, int(threads))
    spans = _chunks(len(points), threads)
    if threads == 1 or len(spans) == 1:
        parts = [work(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, spans))
    return np.concatenate(parts)


def sweep(p, axes, observable="fluorescence", threads=1):
    """Evaluate ``observable`` on the grid spanned by ``axes`` = [(field, values), ...]."""
    axes = _check_axes(axes)
    values = evaluate_points(_grid_params(p, axes), observable, threads)
    if len(axes) == 2:
        values = values.reshape(axes[0][1].size, axes[1][1].size)
        return SweepResult(axes[0], axes[1], values, observable)
    return SweepResult(axes[0], None, values, observable)


def _parabola_vertex(x, y, i):
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(x[i]), float(y1)
    shift = 0.5 * (y0 - y2) / denom
    return float(x[i] + shift * 0.5 * (x[i + 1] - x[i - 1])), float(y1 - 0.25 * (y0 - y2) * shift)


def dip_metrics(profile):
    """Depth, center and asymmetry of a fluorescence dip in a 1-D sweep.

    The baseline is the mean of the outer 10% of samples on each edge.
    Asymmetry is int(I(c+d) - I(c-d)) / int|I(c+d) - I(c-d)| over the largest
    window symmetric about the center c; it lies in [-1, 1] and is positive
    when the high-detuning flank is brighter. Flank differences below 1e-10 of
    the profile scale count as an even profile (asymmetry 0).
    """
    if profile.axis2 is not None or np.ndim(profile.values) != 1:
        raise ValueError("dip_metrics needs a 1-D sweep")
    x = np.asarray(profile.axis1[1], dtype=np.float64)
    y = np.asarray(profile.values, dtype=np.float64)
    if x.size < 5:
        raise ValueError("need at least 5 samples")
    n_edge = max(1, int(round(0.1 * x.size)))
    baseline = float(np.mean(np.concatenate([y[:n_edge], y[-n_edge:]])))
    i = int(np.argmin(y))
    if 0 < i < x.size - 1:
        center, y_min = _parabola_vertex(x, y, i)
    else:
        center, y_min = float(x[i]), float(y[i])
    depth = float(np.clip(1.0 - y_min / baseline, 0.0, 1.0)) if baseline > 0 else 0.0

    half_level = 0.5 * (baseline + y_min)
    lo = hi = i
    while lo > 0 and y[lo - 1] <= half_level:
        lo -= 1
    while hi < y.size - 1 and y[hi + 1] <= half_level:
        hi += 1
    hwhm = 0.5 * (x[hi] - x[lo])
    reach = min(center - x[0], x[-1] - center)
    if depth > 0 and reach < 10.0 * hwhm:
        warnings.warn(
            f"sweep window extends {reach:.3g} from the dip center, less than 10 half-widths ({hwhm:.3g})",
            stacklevel=2,
        )

    if reach <= 0:
        return DipMetrics(depth, center, 0.0)
    n_delta = max(2, int(np.sum(np.abs(x - center) <= reach)))
    delta = np.linspace(0.0, reach, n_delta)
    upper = np.interp(center + delta, x, y)
    lower = np.interp(center - delta, x, y)
    diff = upper - lower
    den = trapezoid(np.abs(diff), delta)
    if den <= 1e-10 * np.max(np.abs(y)) * reach:
        return DipMetrics(depth, center, 0.0)
    asym = float(trapezoid(diff, delta) / den)
    return DipMetrics(depth, center, asym)


def two_level_excited_population(omega, delta, gamma):
    """Resonance-fluorescence steady state of a driven two-level emitter."""
    omega = np.asarray(omega, dtype=np.float64)
    return 0.25 * omega**2 / (delta**2 + 0.25 * gamma**2 + 0.5 * omega**2)


def saturation_curve(p, omega1_values, threads=1):
    if p.omega2_rabi != 0.0:
        raise ValueError("saturation_curve needs omega2_rabi == 0")
    return sweep(p, [("omega1_rabi", omega1_values)], "fluorescence", threads)


def fit_rabi_from_power(powers, intensities, gamma_r, delta=0.0, max_iter=500):
    """Fit I = scale * rho_ee(Omega = k sqrt(P)) with gamma_r held fixed.

    The scale is solved in closed form for every k; k is found by a log-grid
    scan followed by bounded Brent refinement in log k.
    """
    powers = np.asarray(powers, dtype=np.float64)
    data = np.asarray(intensities, dtype=np.float64)
    if powers.shape != data.shape or powers.ndim != 1:
        raise ValueError("powers and intensities must be 1-D arrays of equal length")
    if powers.size < 5:
        raise ValueError("need at least 5 data points")
    if np.any(powers <= 0):
        raise ValueError("powers must be > 0")
    if not gamma_r > 0:
        raise ValueError("gamma_r must be > 0")
    if not np.any(data):
        return SaturationFit(0.0, 0.0, float(gamma_r), 0.0)

    def profile(log_k):
        rho = two_level_excited_population(np.exp(log_k) * np.sqrt(powers), delta, gamma_r)
        scale = (rho @ data) / (rho @ rho)
        return float(np.linalg.norm(data - scale * rho)), float(scale)

    # Omega^2 / gamma^2 from 1e-4 at the largest power to 1e4 at the smallest.
    lo = np.log(gamma_r * 1e-2 / np.sqrt(powers.max()))
    hi = np.log(gamma_r * 1e2 / np.sqrt(powers.min()))
    grid = np.linspace(lo, hi, 400)
    costs = np.array([profile(u)[0] for u in grid])
    j = int(np.argmin(costs))
    best = SaturationFit(float(np.exp(grid[j])), float(costs[j]), float(gamma_r), profile(grid[j])[1])
    if j == 0 or j == grid.size - 1:
        raise FitError("power curve does not constrain the Rabi scale (optimum at scan boundary)", best)
    res = minimize_scalar(
        lambda u: profile(u)[0],
        bounds=(grid[j - 1], grid[j + 1]),
        method="bounded",
        options={"xatol": 1e-12, "maxiter": max_iter},
    )
    if not res.success:
        raise FitError(f"refinement did not converge: {res.message}", best)
    cost, scale = profile(res.x)
    return SaturationFit(float(np.exp(res.x)), cost, float(gamma_r), scale)
