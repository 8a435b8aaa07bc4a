"""The three-level trion Lambda-system: |s>, |p> ground manifold, |t> trion.

Basis order is s=0, p=1, t=2. Two lasers in the rotating-wave frame: laser 1
(Rabi ``omega1_rabi``, detuning ``delta1``) on s-t and laser 2 (``omega2_rabi``,
``delta2``) on the radiative Auger transition p-t. Detuning is laser minus
transition frequency, so a red-detuned laser has a negative detuning.
"""
from dataclasses import dataclass, fields, replace

import numpy as np

from .lindblad import DissipationChannel, build_liouvillian, steady_state
from .operators import TRION_SPACE, eig_hermitian, projector

S, P, T = 0, 1, 2
TWO_PI = 2.0 * np.pi

DEFAULT_BRANCHING = 0.01


@dataclass(frozen=True)
class TrionParams:
    """Model rates in rad/ns."""

    omega1_rabi: float = 0.0
    omega2_rabi: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    gamma_r: float = TWO_PI * 0.50
    branching_b: float = DEFAULT_BRANCHING
    gamma_p_relax: float = TWO_PI * 9.3
    gamma_p_deph: float = TWO_PI * 8.8

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v}")
            object.__setattr__(self, f.name, v)
        for name in ("omega1_rabi", "omega2_rabi", "gamma_p_relax", "gamma_p_deph"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.gamma_r <= 0:
            raise ValueError("gamma_r must be > 0")
        if not 0.0 <= self.branching_b < 1.0:
            raise ValueError("branching_b out of range [0, 1)")

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))


def hamiltonian(p):
    h = np.zeros((3, 3), dtype=np.complex128)
    h[T, T] = -p.delta1
    h[P, P] = -(p.delta1 - p.delta2)
    h[T, S] = h[S, T] = p.omega1_rabi / 2
    h[T, P] = h[P, T] = p.omega2_rabi / 2
    return h


def channels(p):
    """Fundamental emission, Auger emission, p->s relaxation, p dephasing."""
    sp = TRION_SPACE
    return [
        DissipationChannel(projector(sp, S, T), p.gamma_r * (1.0 - p.branching_b)),
        DissipationChannel(projector(sp, P, T), p.gamma_r * p.branching_b),
        DissipationChannel(projector(sp, S, P), p.gamma_p_relax),
        # rate 2*gamma so that p-coherences decay at gamma_p_deph
        DissipationChannel(projector(sp, P, P), 2.0 * p.gamma_p_deph),
    ]


def liouvillian(p):
    return build_liouvillian(hamiltonian(p), channels(p))


def steady(p):
    return steady_state(liouvillian(p))


def fluorescence_intensity(p):
    """Steady-state photon rate of the fundamental line, photons/ns."""
    return p.gamma_r * (1.0 - p.branching_b) * steady(p).populations[T]


def auger_intensity(p):
    return p.gamma_r * p.branching_b * steady(p).populations[T]


def dressed_splitting(p):
    """Generalized Rabi splitting of the single-laser dressed s-t doublet."""
    if p.omega2_rabi != 0.0:
        raise ValueError("dressed_splitting needs omega2_rabi == 0")
    return float(np.hypot(p.omega1_rabi, p.delta1))


def dressed_splitting_numeric(p):
    """Same quantity from diagonalizing the (s, t) block of the Hamiltonian."""
    if p.omega2_rabi != 0.0:
        raise ValueError("dressed_splitting needs omega2_rabi == 0")
    h = hamiltonian(p)[np.ix_([S, T], [S, T])]
    w, _ = eig_hermitian(h)
    return float(w[1] - w[0])
