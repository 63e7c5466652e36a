"""Small dense complex linear algebra.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``;
matrices are square with dimension at most :data:`MAX_DIM`.
"""
import numpy as np

from . import kernels
from .errors import DimensionError

MAX_DIM = 16


def as_matrix(M):
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[0] > MAX_DIM:
        raise DimensionError(f"matrix dimension {A.shape[0]} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(v):
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] < 1:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def identity(dim):
    return np.eye(dim, dtype=np.complex128)


def zero(dim):
    return np.zeros((dim, dim), dtype=np.complex128)


def basis(dim, k):
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return e


def adjoint(M):
    return as_matrix(M).conj().T.copy()


def inner(u, v):
    """<u|v>, antilinear in ``u``."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def norm_sq(v):
    v = np.asarray(v)
    return float(np.vdot(v, v).real)


def expectation(M, v):
    """<v|M|v> for a normalised ``v``."""
    return complex(np.vdot(v, M @ v))


def max_abs(M):
    return float(np.max(np.abs(M)))


def is_hermitian(M, tol=1e-12):
    M = np.asarray(M)
    return max_abs(M - M.conj().T) <= tol


def outer(u, v):
    """|u><v|."""
    return np.outer(u, np.conj(v))


def mat_exp(H, t):
    """Return exp(-i H t).

    Dimension 2 uses the closed form
    ``e^{-i mu t} [cos(sqrt(nu) t) I - i sin(sqrt(nu) t)/sqrt(nu) (H - mu I)]``
    with ``mu = tr(H)/2`` and ``nu = ((H00 - H11)/2)^2 + H01 H10``, switching to
    the defective limit ``e^{-i mu t} [I - i t (H - mu I)]`` when
    ``|nu| < 1e-12 max(1, |H|_max^2)``.  Larger matrices go through scaling and
    squaring of a 20-term Taylor sum.
    """
    H = as_matrix(H)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    d = H.shape[0]
    if d == 1:
        return np.array([[np.exp(-1j * H[0, 0] * t)]], dtype=np.complex128)
    if d == 2:
        return kernels.expm2(H, t)
    return kernels.expm_series(-1j * t * H)


def mat_exp_series(H, t):
    """exp(-i H t) through the generic series path, for any dimension."""
    H = as_matrix(H)
    return kernels.expm_series(-1j * float(t) * H)
