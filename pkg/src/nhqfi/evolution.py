"""Non-unitary evolution of pure states and the normalisation coefficient K_theta."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, KCollapseError, NonRealError, NotNormalizedError
from .linalg import as_matrix, as_vector, expectation, mat_exp

FD_STEP = 1e-6
K_FLOOR = 1e-300
NORM_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EvolvedState:
    """|psi_theta> = U_theta |psi_0>, its squared norm K_theta and |phi_theta>."""

    theta: float
    raw: np.ndarray
    k_theta: float
    normalized: np.ndarray

    @property
    def rho(self):
        """Normalised density matrix |phi><phi|."""
        return np.outer(self.normalized, self.normalized.conj())


def check_state(H, psi0):
    H = as_matrix(H)
    psi0 = as_vector(psi0)
    if psi0.shape[0] != H.shape[0]:
        raise DimensionError(f"state dimension {psi0.shape[0]} != matrix dimension {H.shape[0]}")
    n2 = float(np.vdot(psi0, psi0).real)
    if abs(n2 - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"initial state has squared norm {n2!r}")
    return H, psi0


def state_from_raw(theta, raw):
    kc = np.vdot(raw, raw)
    k = float(kc.real)
    if abs(kc.imag) > 1e-12 * max(1.0, k):
        raise NonRealError(f"<psi|psi> has imaginary part {kc.imag!r}")
    if not (k >= K_FLOOR):
        raise KCollapseError(f"K_theta = {k!r} at theta = {theta!r}")
    return EvolvedState(float(theta), _frozen(raw), k, _frozen(raw / np.sqrt(k)))


def evolve(H, psi0, theta):
    H, psi0 = check_state(H, psi0)
    raw = mat_exp(H, theta) @ psi0
    return state_from_raw(theta, raw)


def dk_dtheta(H, state):
    """Logarithmic derivative (dK/dtheta)/K = i(<H^dag> - <H>) on the normalised state."""
    H = as_matrix(H)
    phi = state.normalized
    val = 1j * (expectation(H.conj().T, phi) - expectation(H, phi))
    if abs(val.imag) > 1e-8:
        raise NonRealError(f"dK/K has imaginary residue {val.imag!r}")
    return float(val.real)


def effective_k(f_of_theta, H, psi0, theta):
    """Normalisation of the rescaled evolution U' = f(theta) U: |f|^2 K_theta."""
    fv = complex(f_of_theta(theta))
    if not np.isfinite(fv):
        raise ValueError(f"f(theta) is not finite: {fv!r}")
    return abs(fv) ** 2 * evolve(H, psi0, theta).k_theta
