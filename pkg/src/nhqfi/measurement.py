"""Optimal-measurement condition |f> = iC|g> and error-propagation variances."""
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateConditionError,
    DimensionError,
    NonHermitianMeasurementError,
    NonRealError,
    ZeroSignalError,
)
from .evolution import check_state, evolve
from .linalg import as_matrix, as_vector, expectation, is_hermitian
from .qfi import qfi_of_state

DEFAULT_TOL = 1e-8
VEC_EPS = 1e-12
ZERO_SIGNAL = 1e-12


@dataclass(frozen=True)
class ConditionReport:
    f: np.ndarray
    g: np.ndarray
    c_estimate: complex
    residual: float
    satisfied: bool


def _measurement(A, dim):
    A = as_matrix(A)
    if A.shape[0] != dim:
        raise DimensionError("measurement dimension does not match the generator")
    if not is_hermitian(A, 1e-12):
        raise NonHermitianMeasurementError("measurement operator is not Hermitian")
    return A


def deviation(M, phi):
    """(M - <M>)|phi>."""
    return M @ phi - expectation(M, phi) * phi


def deviation_vectors(H, A, psi0, theta):
    """Return (f, g) = ((H - <H>)|phi>, (A - <A>)|phi>) at ``theta``."""
    H, psi0 = check_state(H, psi0)
    A = _measurement(A, H.shape[0])
    phi = evolve(H, psi0, theta).normalized
    return deviation(H, phi), deviation(A, phi)


def check_condition(f, g, tol=DEFAULT_TOL):
    """Least-squares fit of f = iC g.

    ``residual`` is ``|f - iCg| / max(|f|, eps)``; the condition holds when the
    residual is within ``tol`` and ``C`` is real to relative precision ``tol``.
    """
    f = as_vector(f)
    g = as_vector(g)
    if f.shape != g.shape:
        raise DimensionError("f and g differ in dimension")
    if tol <= 0:
        raise ValueError("tol must be positive")
    nf = float(np.linalg.norm(f))
    ng = float(np.linalg.norm(g))
    if nf < VEC_EPS and ng < VEC_EPS:
        raise DegenerateConditionError("both deviation vectors vanish")
    if ng < VEC_EPS:
        return ConditionReport(f, g, complex("nan"), 1.0, False)
    c = complex(np.vdot(g, f) / (1j * ng * ng))
    residual = float(np.linalg.norm(f - 1j * c * g)) / max(nf, VEC_EPS)
    satisfied = residual <= tol and abs(c.imag) <= tol * abs(c)
    return ConditionReport(f, g, c, residual, bool(satisfied))


def signal_slope(H, A, state):
    """d<A>/dtheta = i[(<H^dag A> - <A H>) - (<H^dag> - <H>)<A>]."""
    phi = state.normalized
    Hd = H.conj().T
    a = expectation(A, phi).real
    q = 1j * ((expectation(Hd @ A, phi) - expectation(A @ H, phi))
              - (expectation(Hd, phi) - expectation(H, phi)) * a)
    if abs(q.imag) > 1e-8 * max(1.0, abs(q.real)):
        raise NonRealError(f"d<A>/dtheta has imaginary part {q.imag!r}")
    return float(q.real)


def _variance(A, phi):
    a = expectation(A, phi).real
    return max(expectation(A @ A, phi).real - a * a, 0.0)


def error_propagation(H, A, psi0, theta, n=1):
    """(Delta theta)^2 = Var(A) / (n |d<A>/dtheta|^2)."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    H, psi0 = check_state(H, psi0)
    A = _measurement(A, H.shape[0])
    state = evolve(H, psi0, theta)
    q = signal_slope(H, A, state)
    if abs(q) < ZERO_SIGNAL:
        raise ZeroSignalError(f"|d<A>/dtheta| = {abs(q):.3g} at theta = {theta!r}")
    return _variance(A, state.normalized) / (n * q * q)


def crb_gap(H, A, psi0, theta):
    """(Delta theta)^2 F_theta - 1 for a single shot; 0 means the bound is saturated."""
    H, psi0 = check_state(H, psi0)
    A = _measurement(A, H.shape[0])
    state = evolve(H, psi0, theta)
    q = signal_slope(H, A, state)
    if abs(q) < ZERO_SIGNAL:
        raise ZeroSignalError(f"|d<A>/dtheta| = {abs(q):.3g} at theta = {theta!r}")
    return _variance(A, state.normalized) / (q * q) * qfi_of_state(H, state) - 1.0
