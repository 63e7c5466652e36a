"""Two dissipative coupled bosonic modes in the one-excitation subspace.

Basis ordering is ``(|0,1>, |1,0>)``.  With ``gamma = gamma_a - gamma_b`` and
``gbar = (gamma_a + gamma_b)/2`` the effective generator is::

    [[w - i gbar/2 - i gamma/2,  g                       ],
     [g,                         w - i gbar/2 + i gamma/2]]

whose eigenvalues are ``w - i gbar/2 ± xi`` with ``xi^2 = g^2 - gamma^2/4``
and eigenvectors ``∝ (-i gamma/2 ± xi, g)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import BrokenRegimeError, SpecError, ZeroDenominatorError

DENOM_EPS = 1e-14


@dataclass(frozen=True)
class BosonicParams:
    omega0: float
    g: float
    gamma_a: float
    gamma_b: float

    def __post_init__(self):
        for name in ("omega0", "g", "gamma_a", "gamma_b"):
            if not math.isfinite(getattr(self, name)):
                raise SpecError(f"{name} must be finite")
        if self.gamma_a < 0 or self.gamma_b < 0:
            raise SpecError("dissipation rates must be non-negative")

    @property
    def gamma(self):
        return self.gamma_a - self.gamma_b

    @property
    def gamma_bar(self):
        return 0.5 * (self.gamma_a + self.gamma_b)

    @property
    def xi_sq(self):
        return self.g * self.g - 0.25 * self.gamma * self.gamma

    @property
    def xi(self):
        if self.xi_sq < 0:
            raise BrokenRegimeError(f"xi^2 = {self.xi_sq!r} < 0")
        return math.sqrt(self.xi_sq)


def effective_hamiltonian(params):
    xi_sq = params.xi_sq
    if xi_sq < 0:
        raise BrokenRegimeError(f"xi^2 = g^2 - gamma^2/4 = {xi_sq!r} is negative")
    base = params.omega0 - 0.5j * params.gamma_bar
    half = 0.5j * params.gamma
    return np.array([[base - half, params.g], [params.g, base + half]], dtype=np.complex128)


def eigensystem(params):
    """Eigenvalues (w - i gbar/2 ± xi) and normalised eigenvectors, ordered (+, -)."""
    xi = params.xi
    base = complex(params.omega0, -0.5 * params.gamma_bar)
    vecs = []
    for sign in (1.0, -1.0):
        v = np.array([-0.5j * params.gamma + sign * xi, params.g], dtype=np.complex128)
        n = np.linalg.norm(v)
        if n == 0:
            raise BrokenRegimeError("eigenvector vanishes (g = 0 and gamma = 0 with xi = 0)")
        vecs.append(v / n)
    return (base + xi, base - xi), (vecs[0], vecs[1])


def initial_state():
    """The probe |0,1>, the first basis vector."""
    return np.array([1.0, 0.0], dtype=np.complex128)


def qfi_bosonic_closed(params, theta):
    """64 g^2 xi^4 / [-4 g^2 + gamma^2 cos(2 xi theta) + 2 gamma xi sin(2 xi theta)]^2 for |0,1>."""
    xi = params.xi
    gm = params.gamma
    x = 2 * xi * theta
    bracket = -4 * params.g ** 2 + gm * gm * math.cos(x) + 2 * gm * xi * math.sin(x)
    if abs(bracket) < DENOM_EPS:
        raise ZeroDenominatorError(f"closed-form denominator vanishes at theta = {theta!r}")
    return 64 * params.g ** 2 * xi ** 4 / (bracket * bracket)
