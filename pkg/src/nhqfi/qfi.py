"""Quantum Fisher information of non-unitarily evolved pure states.

The production route is the expectation form
``F = 4(<H^dag H> - <H^dag><H>)`` on the normalised final state.  The
finite-difference form and the SLD trace ``Tr[rho L^2]`` are kept as
independent checks.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DimensionError,
    InvalidPovmError,
    KCollapseError,
    NegativeQfiError,
    SingularOutcomeError,
)
from .evolution import FD_STEP, K_FLOOR, check_state, evolve
from .linalg import as_matrix, expectation, max_abs, outer

NEG_CLAMP = 1e-10
P_FLOOR = 1e-12
DP_FLOOR = 1e-9


def clamp_qfi(value):
    """Clamp roundoff-level negatives to zero; anything below -1e-10 is a bug."""
    if value < 0.0:
        if value < -NEG_CLAMP:
            raise NegativeQfiError(f"QFI evaluated to {value!r}")
        return 0.0
    return float(value)


@dataclass(frozen=True)
class QfiResult:
    theta: float
    qfi: float
    i_theta: float
    k_theta: float


def qfi_of_state(H, state):
    """Expectation-form QFI on an already evolved state."""
    phi = state.normalized
    Hphi = H @ phi
    hh = float(np.vdot(Hphi, Hphi).real)
    h = expectation(H, phi)
    hd = expectation(H.conj().T, phi)
    return clamp_qfi(4.0 * (hh - (hd * h).real))


def qfi_expectation(H, psi0, theta):
    H, psi0 = check_state(H, psi0)
    state = evolve(H, psi0, theta)
    f = qfi_of_state(H, state)
    return QfiResult(state.theta, f, state.k_theta * f, state.k_theta)


def qfi_grid(H, psi0, thetas):
    """QFI and K over a theta grid; 2x2 generators use the batched kernel.

    Returns ``(qfi, k)`` arrays.  Collapsed points raise :class:`KCollapseError`.
    """
    H, psi0 = check_state(H, psi0)
    thetas = np.asarray(thetas, dtype=np.float64)
    if H.shape[0] == 2:
        psi0s = np.broadcast_to(psi0, (thetas.size, 2))
        q, k = kernels.qfi2_batch(H, psi0s, thetas)
        bad = ~(k >= K_FLOOR)
        if np.any(bad):
            t = thetas[np.argmax(bad)]
            raise KCollapseError(f"K_theta collapsed at theta = {t!r}")
        return np.array([clamp_qfi(v) for v in q]), k
    out = [qfi_expectation(H, psi0, t) for t in thetas]
    return np.array([r.qfi for r in out]), np.array([r.k_theta for r in out])


def qfi_derivative(H, psi0, theta, h=FD_STEP):
    """4(<d phi|d phi> - |<d phi|phi>|^2) with d phi by central differences."""
    H, psi0 = check_state(H, psi0)
    phi = evolve(H, psi0, theta).normalized
    plus = evolve(H, psi0, theta + h).normalized
    minus = evolve(H, psi0, theta - h).normalized
    dphi = (plus - minus) / (2.0 * h)
    val = np.vdot(dphi, dphi).real - abs(np.vdot(dphi, phi)) ** 2
    return clamp_qfi(4.0 * val)


def _sld_from_state(H, state):
    phi = state.normalized
    dH_phi = H @ phi - expectation(H, phi) * phi
    X = outer(dH_phi, phi)
    return -2j * (X - X.conj().T)


def sld(H, psi0, theta):
    """L = -2i[dH|phi><phi| - |phi><phi|dH^dag] with dH = H - <H>."""
    H, psi0 = check_state(H, psi0)
    return _sld_from_state(H, evolve(H, psi0, theta))


def sld_alternative(H, psi0, theta, M, c):
    """Member of the SLD family L + c dM|phi><phi|dM^dag (c real)."""
    H, psi0 = check_state(H, psi0)
    M = as_matrix(M)
    if M.shape != H.shape:
        raise DimensionError("M must match the generator dimension")
    state = evolve(H, psi0, theta)
    phi = state.normalized
    m = M @ phi - expectation(M, phi) * phi
    return _sld_from_state(H, state) + float(c) * outer(m, m)


def sld_qfi(L, state):
    """Tr[rho L^2] for the normalised pure state."""
    Lphi = L @ state.normalized
    return float(np.vdot(Lphi, Lphi).real)


def sld_residual(L, H, psi0, theta, h=FD_STEP):
    """max-entry residual of (L rho + rho L)/2 - d rho/d theta, d rho by central differences."""
    rho = evolve(H, psi0, theta).rho
    drho = (evolve(H, psi0, theta + h).rho - evolve(H, psi0, theta - h).rho) / (2.0 * h)
    return max_abs(0.5 * (L @ rho + rho @ L) - drho)


class Povm:
    """Positive operator-valued measure, validated once at construction."""

    def __init__(self, elements, tol=1e-10):
        els = tuple(as_matrix(E) for E in elements)
        if not els:
            raise InvalidPovmError("a POVM needs at least one element")
        dim = els[0].shape[0]
        for k, E in enumerate(els):
            if E.shape[0] != dim:
                raise InvalidPovmError("POVM elements have mixed dimensions")
            if max_abs(E - E.conj().T) > 1e-12:
                raise InvalidPovmError(f"element {k} is not Hermitian")
            if np.linalg.eigvalsh(E).min() < -1e-12:
                raise InvalidPovmError(f"element {k} is not positive semidefinite")
        total = sum(els)
        if max_abs(total - np.eye(dim)) > tol:
            raise InvalidPovmError("POVM elements do not sum to the identity")
        self.elements = els
        self.dim = dim

    def __len__(self):
        return len(self.elements)

    @classmethod
    def projective(cls, vectors):
        """Rank-one projectors onto the given orthonormal vectors."""
        return cls([outer(v, v) for v in np.asarray(vectors, dtype=np.complex128)])

    @classmethod
    def eigenbasis(cls, A):
        """Projectors onto the eigenvectors of a Hermitian operator."""
        A = as_matrix(A)
        A = 0.5 * (A + A.conj().T)
        _, vecs = np.linalg.eigh(A)
        return cls.projective(vecs.T)

    def probabilities(self, phi):
        return np.array([expectation(E, phi).real for E in self.elements])


def classical_fisher(H, psi0, theta, povm, h=FD_STEP):
    """Sum over outcomes of (dp/dtheta)^2 / p, derivatives by central differences."""
    H, psi0 = check_state(H, psi0)
    if povm.dim != H.shape[0]:
        raise DimensionError("POVM dimension does not match the generator")
    p = povm.probabilities(evolve(H, psi0, theta).normalized)
    dp = (povm.probabilities(evolve(H, psi0, theta + h).normalized)
          - povm.probabilities(evolve(H, psi0, theta - h).normalized)) / (2.0 * h)
    total = 0.0
    for px, dpx in zip(p, dp):
        if px < P_FLOOR:
            if abs(dpx) < DP_FLOOR:
                continue
            raise SingularOutcomeError(
                f"outcome with p = {px:.3g} has dp/dtheta = {dpx:.3g}")
        total += dpx * dpx / px
    return float(total)

