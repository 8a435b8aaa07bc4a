"""Dense complex operator algebra and Hilbert-space bookkeeping.

Operators are plain ``numpy`` complex arrays. Rates and angular frequencies
everywhere in the package are in rad/ns; a linear frequency of X GHz is
stored as ``2*pi*X``.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SingularMatrixError


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered basis labels. For the trion model: s=0, p=1, t=2."""

    dim: int = 3
    labels: tuple = ("s", "p", "t")

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if len(labels) != self.dim:
            raise ValueError(f"{len(labels)} labels for dim {self.dim}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"labels not unique: {labels}")

    def index(self, label):
        return self.labels.index(label)


TRION_SPACE = HilbertSpace()


def as_matrix(a):
    return np.asarray(a, dtype=np.complex128)


def dagger(a):
    return np.conj(a).T


def is_hermitian(a, tol=1e-10):
    a = as_matrix(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a)), initial=0.0) <= tol


def projector(space, i, j):
    """|i><j| on ``space``."""
    d = space.dim
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"indices ({i}, {j}) out of range for dim {d}")
    m = np.zeros((d, d), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def inf_norm(a):
    """Max absolute row sum (vector: max absolute entry)."""
    a = np.asarray(a)
    if a.ndim == 1:
        return float(np.max(np.abs(a), initial=0.0))
    return float(np.max(np.sum(np.abs(a), axis=1), initial=0.0))


def solve_linear(a, b):
    """Solve ``a x = b`` with partial pivoting.

    Raises SingularMatrixError when a pivot drops below ``1e-14 * ||a||_inf``.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise ValueError(f"rhs shape {b.shape} does not match {a.shape}")
    floor = 1e-14 * inf_norm(a)
    x, ok = kernels.gauss_solve(a, b, floor)
    if not ok:
        raise SingularMatrixError("matrix is numerically singular")
    return x


def solve_linear_batch(a, b):
    """Stacked version of :func:`solve_linear`; returns ``(x, ok)`` per system."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    floors = 1e-14 * np.max(np.sum(np.abs(a), axis=2), axis=1)
    x, ok = kernels.gauss_solve_batch(a, b, floors)
    return x, ok


def eig_hermitian(a, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (a + dagger(a)))
    return w, v
