"""Hot numeric kernels: 2x2 propagators, batched QFI, scaled Taylor exponential.

Every kernel exists twice.  ``_nb_*`` functions are loop-style and compiled
with numba; ``_np_*`` functions are vectorised numpy.  The module-level names
(``expm2``, ``expm2_batch``, ``qfi2_batch``, ``expm_series``) point at one
family, chosen at import time from :data:`nhqfi._jit.USE_NUMBA`.  Both
families are importable as :data:`numba_impl` / :data:`numpy_impl` so the
benchmark and the test-suite can compare them directly.
"""
import cmath
import math
from types import SimpleNamespace

import numpy as np

from ._jit import USE_NUMBA, njit

EP_REL_THRESHOLD = 1e-12
TAYLOR_TERMS = 20


# --------------------------------------------------------------------------
# numba family
# --------------------------------------------------------------------------

@njit
def _nb_prop2(h00, h01, h10, h11, t):
    """exp(-i H t) for a 2x2 H, entries returned row-major."""
    mu = 0.5 * (h00 + h11)
    d = 0.5 * (h00 - h11)
    nu = d * d + h01 * h10
    hmax = max(max(abs(h00), abs(h01)), max(abs(h10), abs(h11)))
    scale = max(1.0, hmax * hmax)
    ph = cmath.exp(-1j * mu * t)
    if abs(nu) < EP_REL_THRESHOLD * scale:
        c = 1.0 + 0.0j
        sc = t + 0.0j
    else:
        rt = cmath.sqrt(nu)
        c = cmath.cos(rt * t)
        sc = cmath.sin(rt * t) / rt
    u00 = ph * (c - 1j * sc * d)
    u01 = ph * (-1j * sc * h01)
    u10 = ph * (-1j * sc * h10)
    u11 = ph * (c + 1j * sc * d)
    return u00, u01, u10, u11


@njit
def _nb_expm2(H, t):
    out = np.empty((2, 2), dtype=np.complex128)
    u00, u01, u10, u11 = _nb_prop2(H[0, 0], H[0, 1], H[1, 0], H[1, 1], t)
    out[0, 0] = u00
    out[0, 1] = u01
    out[1, 0] = u10
    out[1, 1] = u11
    return out


@njit
def _nb_expm2_batch(H, thetas):
    n = thetas.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)
    for k in range(n):
        u00, u01, u10, u11 = _nb_prop2(H[0, 0], H[0, 1], H[1, 0], H[1, 1], thetas[k])
        out[k, 0, 0] = u00
        out[k, 0, 1] = u01
        out[k, 1, 0] = u10
        out[k, 1, 1] = u11
    return out


@njit
def _nb_qfi2_batch(H, psi0s, thetas):
    n = thetas.shape[0]
    qfi = np.empty(n)
    kth = np.empty(n)
    h00 = H[0, 0]
    h01 = H[0, 1]
    h10 = H[1, 0]
    h11 = H[1, 1]
    for k in range(n):
        u00, u01, u10, u11 = _nb_prop2(h00, h01, h10, h11, thetas[k])
        a = psi0s[k, 0]
        b = psi0s[k, 1]
        v0 = u00 * a + u01 * b
        v1 = u10 * a + u11 * b
        K = v0.real * v0.real + v0.imag * v0.imag + v1.real * v1.real + v1.imag * v1.imag
        kth[k] = K
        if K <= 0.0:
            qfi[k] = np.nan
            continue
        inv = 1.0 / math.sqrt(K)
        p0 = v0 * inv
        p1 = v1 * inv
        w0 = h00 * p0 + h01 * p1
        w1 = h10 * p0 + h11 * p1
        hh = w0.real * w0.real + w0.imag * w0.imag + w1.real * w1.real + w1.imag * w1.imag
        eh = p0.conjugate() * w0 + p1.conjugate() * w1
        qfi[k] = 4.0 * (hh - (eh.real * eh.real + eh.imag * eh.imag))
    return qfi, kth


@njit
def _nb_matmul(A, B):
    d = A.shape[0]
    C = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        for k in range(d):
            aik = A[i, k]
            if aik == 0:
                continue
            for j in range(d):
                C[i, j] += aik * B[k, j]
    return C


@njit
def _nb_norm1(A):
    d = A.shape[0]
    best = 0.0
    for j in range(d):
        col = 0.0
        for i in range(d):
            col += abs(A[i, j])
        if col > best:
            best = col
    return best


@njit
def _nb_expm_series(A):
    """exp(A) by scaling, a truncated Taylor sum and repeated squaring."""
    d = A.shape[0]
    nrm = _nb_norm1(A)
    s = 0
    if nrm > 1.0:
        s = int(math.ceil(math.log2(nrm)))
    B = A / (2.0 ** s)
    out = np.zeros((d, d), dtype=np.complex128)
    term = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        out[i, i] = 1.0
        term[i, i] = 1.0
    for k in range(1, TAYLOR_TERMS + 1):
        term = _nb_matmul(term, B) / k
        out += term
    for _ in range(s):
        out = _nb_matmul(out, out)
    return out


# --------------------------------------------------------------------------
# numpy family
# --------------------------------------------------------------------------

def _np_prop2_batch(H, thetas):
    h00, h01, h10, h11 = H[0, 0], H[0, 1], H[1, 0], H[1, 1]
    mu = 0.5 * (h00 + h11)
    d = 0.5 * (h00 - h11)
    nu = d * d + h01 * h10
    hmax = max(abs(h00), abs(h01), abs(h10), abs(h11))
    scale = max(1.0, hmax * hmax)
    t = np.asarray(thetas, dtype=np.float64)
    ph = np.exp(-1j * mu * t)
    if abs(nu) < EP_REL_THRESHOLD * scale:
        c = np.ones_like(t, dtype=np.complex128)
        sc = t.astype(np.complex128)
    else:
        rt = np.sqrt(np.complex128(nu))
        c = np.cos(rt * t)
        sc = np.sin(rt * t) / rt
    return (ph * (c - 1j * sc * d), ph * (-1j * sc * h01),
            ph * (-1j * sc * h10), ph * (c + 1j * sc * d))


def _np_expm2(H, t):
    u = _np_prop2_batch(H, np.array([t], dtype=np.float64))
    return np.array([[u[0][0], u[1][0]], [u[2][0], u[3][0]]], dtype=np.complex128)


def _np_expm2_batch(H, thetas):
    u00, u01, u10, u11 = _np_prop2_batch(H, thetas)
    out = np.empty((len(u00), 2, 2), dtype=np.complex128)
    out[:, 0, 0] = u00
    out[:, 0, 1] = u01
    out[:, 1, 0] = u10
    out[:, 1, 1] = u11
    return out


def _np_qfi2_batch(H, psi0s, thetas):
    U = _np_expm2_batch(H, thetas)
    v = np.einsum("nij,nj->ni", U, psi0s)
    K = np.einsum("ni,ni->n", v.conj(), v).real
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = v / np.sqrt(K)[:, None]
    w = phi @ H.T
    hh = np.einsum("ni,ni->n", w.conj(), w).real
    eh = np.einsum("ni,ni->n", phi.conj(), w)
    qfi = 4.0 * (hh - np.abs(eh) ** 2)
    qfi = np.where(K > 0.0, qfi, np.nan)
    return qfi, K


def _np_expm_series(A):
    d = A.shape[0]
    nrm = np.abs(A).sum(axis=0).max()
    s = int(math.ceil(math.log2(nrm))) if nrm > 1.0 else 0
    B = A / (2.0 ** s)
    out = np.eye(d, dtype=np.complex128)
    term = np.eye(d, dtype=np.complex128)
    for k in range(1, TAYLOR_TERMS + 1):
        term = term @ B / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


numba_impl = SimpleNamespace(
    name="numba",
    expm2=_nb_expm2,
    expm2_batch=_nb_expm2_batch,
    qfi2_batch=_nb_qfi2_batch,
    expm_series=_nb_expm_series,
)
numpy_impl = SimpleNamespace(
    name="numpy",
    expm2=_np_expm2,
    expm2_batch=_np_expm2_batch,
    qfi2_batch=_np_qfi2_batch,
    expm_series=_np_expm_series,
)

_active = numba_impl if USE_NUMBA else numpy_impl
BACKEND = _active.name


def expm2(H, t):
    """exp(-i H t) for a 2x2 complex ``H``; defective-limit branch at the EP."""
    return _active.expm2(np.ascontiguousarray(H, dtype=np.complex128), float(t))


def expm2_batch(H, thetas):
    """Stack of exp(-i H t) for every ``t`` in ``thetas``, shape (n, 2, 2)."""
    return _active.expm2_batch(np.ascontiguousarray(H, dtype=np.complex128),
                               np.ascontiguousarray(thetas, dtype=np.float64))


def qfi2_batch(H, psi0s, thetas):
    """Raw QFI and K for initial states ``psi0s[k]`` evolved to ``thetas[k]``.

    QFI values are returned unclamped; NaN marks a collapsed state (K = 0).
    """
    return _active.qfi2_batch(np.ascontiguousarray(H, dtype=np.complex128),
                              np.ascontiguousarray(psi0s, dtype=np.complex128),
                              np.ascontiguousarray(thetas, dtype=np.float64))


def expm_series(A):
    """exp(A) for any small square ``A``."""
    return _active.expm_series(np.ascontiguousarray(A, dtype=np.complex128))
