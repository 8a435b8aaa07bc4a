"""Lindblad generators, steady states and time propagation.

Vectorization is column stacking: ``vec(rho) = rho.reshape(-1, order="F")``,
so that ``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)``.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSteadyStateError, IntegrationError, SingularMatrixError
from .operators import as_matrix, dagger, inf_norm, is_hermitian, solve_linear, solve_linear_batch


@dataclass(frozen=True)
class DissipationChannel:
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        op = as_matrix(self.operator)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise ValueError(f"jump operator must be square, got shape {op.shape}")
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"channel rate must be finite and >= 0, got {self.rate}")
        object.__setattr__(self, "operator", op)


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    hilbert_dim: int

    @property
    def dim(self):
        return self.hilbert_dim ** 2

    def apply(self, rho):
        d = self.hilbert_dim
        return unvec(self.matrix @ vec(rho), d)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def populations(self):
        return np.real(np.diag(self.matrix)).copy()

    def violations(self, tol=1e-9):
        """List the broken density-matrix invariants (empty when valid)."""
        m = self.matrix
        problems = []
        if np.max(np.abs(m - dagger(m))) > tol:
            problems.append("not Hermitian")
        if abs(np.trace(m) - 1.0) > tol:
            problems.append(f"trace {np.trace(m).real:.3g} != 1")
        lam = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
        if lam[0] < -tol:
            problems.append(f"negative eigenvalue {lam[0]:.3g}")
        return problems


def vec(rho):
    return np.asarray(rho, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, d):
    return np.asarray(v).reshape((d, d), order="F")


def trace_functional(d):
    """Row vector ``u`` with ``u @ vec(x) == trace(x)``."""
    return vec(np.eye(d))


def build_liouvillian(hamiltonian, channels=()):
    h = as_matrix(hamiltonian)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if not is_hermitian(h, 1e-10):
        raise ValueError("Hamiltonian is not Hermitian")
    d = h.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    lmat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for ch in channels:
        op = ch.operator
        if op.shape != (d, d):
            raise ValueError(f"jump operator shape {op.shape} does not match dim {d}")
        if ch.rate == 0.0:
            continue
        ldl = dagger(op) @ op
        lmat += ch.rate * (np.kron(op.conj(), op) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye))
    return Liouvillian(lmat, d)


def _constrained_system(lmat, d):
    a = np.array(lmat, dtype=np.complex128, copy=True)
    a[..., 0, :] = trace_functional(d)
    return a


def steady_state(liou):
    """Unique steady state via the trace-constrained direct solve."""
    d = liou.hilbert_dim
    a = _constrained_system(liou.matrix, d)
    rhs = np.zeros(d * d, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        x = solve_linear(a, rhs)
    except SingularMatrixError as exc:
        raise DegenerateSteadyStateError("steady state is not unique") from exc
    rho = unvec(x, d)
    return DensityMatrix(0.5 * (rho + dagger(rho)))


def steady_state_batch(lmats, d):
    """Steady-state density matrices for a stack of Liouvillian matrices."""
    lmats = np.asarray(lmats, dtype=np.complex128)
    a = _constrained_system(lmats, d)
    rhs = np.zeros((lmats.shape[0], d * d), dtype=np.complex128)
    rhs[:, 0] = 1.0
    x, ok = solve_linear_batch(a, rhs)
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise DegenerateSteadyStateError(f"steady state is not unique at batch index {bad}")
    rho = x.reshape((-1, d, d)).transpose(0, 2, 1)
    return 0.5 * (rho + np.conj(rho.transpose(0, 2, 1)))


def evolve(liou, x0, t_grid, tol=1e-9, observables=None, max_steps=50_000_000):
    """Propagate an arbitrary operator ``x0`` under ``liou``.

    Returns the stack of operators at ``t_grid`` with shape (n, d, d), or, when
    ``observables`` (sequence of d x d matrices A_k) is given, the array of
    ``trace(A_k x(t))`` with shape (n, k).
    """
    t_grid = np.ascontiguousarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be ascending and start at t >= 0")
    d = liou.hilbert_dim
    if observables is None:
        proj = np.eye(d * d, dtype=np.complex128)
    else:
        # trace(A x) = vec(A.T) . vec(x)
        proj = np.array([vec(as_matrix(a).T) for a in observables], dtype=np.complex128)
    lmat = np.ascontiguousarray(liou.matrix, dtype=np.complex128)
    h0 = 0.1 / max(inf_norm(lmat), 1e-12)
    out, status, t_reached = kernels.dopri5_linear(
        lmat, vec(x0).copy(), t_grid, np.ascontiguousarray(proj), tol, tol, h0, max_steps
    )
    if status == kernels.STEP_UNDERFLOW:
        raise IntegrationError("step size underflow", t_reached)
    if status == kernels.STEP_BUDGET:
        raise IntegrationError(f"step budget of {max_steps} exhausted", t_reached)
    if observables is None:
        return out.reshape((-1, d, d)).transpose(0, 2, 1)
    return out


def propagate(rho0, liou, t_grid, tol=1e-9):
    """Density matrices at each time in ``t_grid`` (starting from t=0)."""
    m = rho0.matrix if isinstance(rho0, DensityMatrix) else as_matrix(rho0)
    return [DensityMatrix(x) for x in evolve(liou, m, t_grid, tol)]


def expectation(rho, a):
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    a = as_matrix(a)
    if a.shape != m.shape:
        raise ValueError(f"operator shape {a.shape} does not match state {m.shape}")
    return complex(np.trace(a @ m))
