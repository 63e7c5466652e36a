"""Two-level PT-symmetric generator ``[[r e^{iw}, s], [s, r e^{-iw}]]``.

Closed forms for the QFI in the unbroken and broken phases, the channel QFI,
behaviour at the exceptional point (EP), the optimal |0><0| measurement and
the comparison with two Hermitian generators.  Every closed form here has a
numerical counterpart in :mod:`nhqfi.qfi` / :mod:`nhqfi.measurement` that
the tests check it against.

Eigenvector conventions (unbroken, ``sin a = (r/s) sin w``)::

    |l+> = (e^{ia/2}, e^{-ia/2}) / sqrt2
    |l-> = i (e^{-ia/2}, -e^{ia/2}) / sqrt2

and (broken, ``x± = r sin w ± sqrt(nu1)``) ``|e±> ∝ (i x±, s)``.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import EPCoalescenceError, RegimeError, SpecError, ZeroSignalError
from .evolution import check_state, state_from_raw
from .qfi import qfi_of_state

EP_TOL = 1e-10
HALF_PI = 0.5 * math.pi


class Regime(str, Enum):
    UNBROKEN = "unbroken"
    EXCEPTIONAL_POINT = "exceptional-point"
    BROKEN = "broken"


@dataclass(frozen=True)
class PtParams:
    r: float
    s: float
    omega: float

    def __post_init__(self):
        for name in ("r", "s", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise SpecError(f"{name} must be finite")
        if not self.s > 0:
            raise SpecError(f"s must be positive, got {self.s!r}")

    @property
    def gain(self):
        """Signed non-Hermiticity ``r sin w``."""
        return self.r * math.sin(self.omega)

    @property
    def discriminant(self):
        """``s^2 - r^2 sin^2 w``; positive in the unbroken phase."""
        return self.s * self.s - self.gain * self.gain


@dataclass(frozen=True)
class PtRegime:
    tag: Regime
    mu: float
    nu: float

    @property
    def is_ep(self):
        return self.tag is Regime.EXCEPTIONAL_POINT


@dataclass(frozen=True)
class InitialStateSpec:
    """``N(|+> + m e^{i phi} |->)`` over the eigenbasis, or an explicit vector.

    ``basis`` is one of ``"eigen"`` (pick the eigenbasis from the regime),
    ``"eigen-unbroken"``, ``"eigen-broken"`` or ``"explicit"``.  With
    ``"eigen"`` the explicit ``vector``, if given, is used at the EP where the
    eigenbasis is incomplete.
    """

    m: float = 1.0
    phi: float = 0.0
    basis: str = "eigen"
    vector: tuple = None


def build(params):
    r, s, w = params.r, params.s, params.omega
    return np.array([[r * np.exp(1j * w), s], [s, r * np.exp(-1j * w)]], dtype=np.complex128)


def classify(params, ep_tol=EP_TOL):
    if not ep_tol > 0:
        raise ValueError("ep_tol must be positive")
    disc = params.discriminant
    mu = params.r * math.cos(params.omega)
    band = ep_tol * params.s * params.s
    if disc > band:
        return PtRegime(Regime.UNBROKEN, mu, disc)
    if disc < -band:
        return PtRegime(Regime.BROKEN, mu, -disc)
    return PtRegime(Regime.EXCEPTIONAL_POINT, mu, 0.0)


def _require(params, tag, ep_tol=EP_TOL):
    reg = classify(params, ep_tol)
    if reg.tag is not tag:
        raise RegimeError(f"expected {tag.value} regime, parameters are {reg.tag.value}")
    return reg


def _unbroken_vectors(params):
    a = math.asin(params.gain / params.s)
    lp = np.array([np.exp(0.5j * a), np.exp(-0.5j * a)]) / math.sqrt(2.0)
    lm = 1j * np.array([np.exp(-0.5j * a), -np.exp(0.5j * a)]) / math.sqrt(2.0)
    return lp, lm


def _broken_vectors(params, nu1):
    out = []
    for sign in (1.0, -1.0):
        x = params.gain + sign * math.sqrt(nu1)
        v = np.array([1j * x, params.s], dtype=np.complex128)
        out.append(v / math.sqrt(x * x + params.s * params.s))
    return out[0], out[1]


def eigensystem(params, ep_tol=EP_TOL):
    """Eigenvalues and normalised eigenvectors, ordered (+, -).

    Unbroken: ``mu ± sqrt(nu0)`` with <l+|l-> = sin a.  Broken:
    ``mu ± i sqrt(nu1)`` with <e+|e-> = 1/|kappa|.
    """
    reg = classify(params, ep_tol)
    if reg.is_ep:
        raise EPCoalescenceError("eigenvectors coalesce at the exceptional point")
    root = math.sqrt(reg.nu)
    if reg.tag is Regime.UNBROKEN:
        values = (complex(reg.mu + root), complex(reg.mu - root))
        return values, _unbroken_vectors(params)
    values = (complex(reg.mu, root), complex(reg.mu, -root))
    return values, _broken_vectors(params, reg.nu)


def ep_eigenvector(params):
    """The single (coalesced) eigenvector at the EP."""
    v = np.array([params.s, -1j * params.gain], dtype=np.complex128)
    return v / np.linalg.norm(v)


def initial_state(params, spec=InitialStateSpec(), ep_tol=EP_TOL):
    """Normalised initial state; N comes from the full (non-orthogonal) Gram matrix."""
    kind = spec.basis
    if kind == "explicit":
        if spec.vector is None:
            raise SpecError("explicit initial state needs a vector")
        v = np.asarray(spec.vector, dtype=np.complex128)
        return v / np.linalg.norm(v)
    reg = classify(params, ep_tol)
    if kind == "eigen":
        if reg.is_ep:
            if spec.vector is None:
                raise EPCoalescenceError("no eigenbasis at the EP and no fallback vector given")
            v = np.asarray(spec.vector, dtype=np.complex128)
            return v / np.linalg.norm(v)
        kind = "eigen-unbroken" if reg.tag is Regime.UNBROKEN else "eigen-broken"
    if kind == "eigen-unbroken":
        if reg.tag is not Regime.UNBROKEN:
            raise RegimeError("unbroken eigenbasis requested outside the unbroken phase")
        plus, minus = _unbroken_vectors(params)
    elif kind == "eigen-broken":
        if reg.tag is not Regime.BROKEN:
            raise RegimeError("broken eigenbasis requested outside the broken phase")
        plus, minus = _broken_vectors(params, reg.nu)
    else:
        raise SpecError(f"unknown initial-state basis {spec.basis!r}")
    v = plus + spec.m * np.exp(1j * spec.phi) * minus
    return v / np.linalg.norm(v)


# -- closed-form QFI --------------------------------------------------------

def qfi_closed_unbroken(params, m, phi, theta):
    """16 m^2 nu0^2 / [(1+m^2) s + 2 m r sin w cos(2 sqrt(nu0) theta + phi)]^2."""
    reg = _require(params, Regime.UNBROKEN)
    nu0 = reg.nu
    den = (1 + m * m) * params.s + 2 * m * params.gain * math.cos(2 * math.sqrt(nu0) * theta + phi)
    return 16 * m * m * nu0 * nu0 / (den * den)


def qfi_closed_broken(params, m, phi, theta):
    """16 m^2 nu1^2 e^{4x} / [A(e^{4x} + m^2) + 2 m s e^{2x} cos phi]^2, x = sqrt(nu1) theta."""
    reg = _require(params, Regime.BROKEN)
    nu1 = reg.nu
    amp = abs(params.gain)
    # divide through by e^{4x} so large theta does not overflow
    e = math.exp(-2 * math.sqrt(nu1) * theta)
    den = amp * (1 + m * m * e * e) + 2 * m * params.s * e * math.cos(phi)
    if den == 0:
        raise ZeroSignalError(f"closed-form denominator vanishes at theta = {theta!r}")
    return 16 * m * m * nu1 * nu1 * e * e / (den * den)


def broken_peak_theta(params, m):
    """Location of the broken-phase QFI maximum for phi = 0, m < 0.

    Stationarity gives ``e^{2 sqrt(nu1) theta} = |m|``, i.e.
    ``theta* = ln(m^2) / (4 sqrt(nu1))``, which equals ``ln(-m) / (2 sqrt(nu1))``.
    """
    reg = _require(params, Regime.BROKEN)
    if m == 0:
        raise ValueError("m must be non-zero")
    return math.log(m * m) / (4 * math.sqrt(reg.nu))


def qfi_closed(params, m, phi, theta, ep_tol=EP_TOL):
    """Dispatch on the regime; 0 at the EP for eigenbasis states."""
    tag = classify(params, ep_tol).tag
    if tag is Regime.UNBROKEN:
        return qfi_closed_unbroken(params, m, phi, theta)
    if tag is Regime.BROKEN:
        return qfi_closed_broken(params, m, phi, theta)
    return 0.0


def channel_qfi(params, ep_tol=EP_TOL):
    """4 (s + |r sin w|)^2 in both phases; 0 exactly at the EP."""
    if classify(params, ep_tol).is_ep:
        return 0.0
    b = params.s + abs(params.gain)
    return 4 * b * b


def channel_qfi_flagged(params, ep_tol=EP_TOL):
    """(channel QFI, at_ep); the value drops to 0 exactly at the EP."""
    at_ep = classify(params, ep_tol).is_ep
    return channel_qfi(params, ep_tol), at_ep


@dataclass(frozen=True)
class ChannelSearch:
    value: float
    m: float
    phi: float
    theta: float
    grid_value: float


def _eigen_states(params, ms, phis):
    reg = classify(params)
    if reg.tag is Regime.UNBROKEN:
        plus, minus = _unbroken_vectors(params)
    else:
        plus, minus = _broken_vectors(params, reg.nu)
    coef = np.asarray(ms)[:, None] * np.exp(1j * np.asarray(phis))[:, None]
    v = plus[None, :] + coef * minus[None, :]
    return v / np.linalg.norm(v, axis=1)[:, None]


def _golden_max(f, lo, hi, iters=60):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def channel_qfi_numeric(params, grid=64, m_max=3.0, refine=True):
    """Maximise the generic-engine QFI over (m, phi, theta).

    Grid search on ``m in [-m_max, m_max]`` (|m| >= 1e-3),
    ``phi in [0, 2 pi)`` and ``theta in [0, 4 pi / sqrt(nu)]``, then one
    golden-section pass per coordinate inside the neighbouring grid cells.
    """
    reg = classify(params)
    if reg.is_ep:
        raise EPCoalescenceError("channel-QFI search needs an eigenbasis")
    H = build(params)
    ms = np.linspace(-m_max, m_max, grid)
    ms = ms[np.abs(ms) >= 1e-3]
    phis = 2 * math.pi * np.arange(grid) / grid
    thetas = np.linspace(0.0, 4 * math.pi / math.sqrt(reg.nu), grid)

    mm, pp = np.meshgrid(ms, phis, indexing="ij")
    states = _eigen_states(params, mm.ravel(), pp.ravel())
    n_state, n_theta = states.shape[0], thetas.size
    psi0s = np.repeat(states, n_theta, axis=0)
    ths = np.tile(thetas, n_state)
    q, _ = kernels.qfi2_batch(H, psi0s, ths)
    k = int(np.nanargmax(q))
    best = float(q[k])
    i_state, i_theta = divmod(k, n_theta)
    m0 = float(mm.ravel()[i_state])
    p0 = float(pp.ravel()[i_state])
    t0 = float(thetas[i_theta])
    if not refine:
        return ChannelSearch(best, m0, p0, t0, best)

    def value(m, phi, theta):
        psi = _eigen_states(params, [m], [phi])
        out, _ = kernels.qfi2_batch(H, psi, np.array([theta]))
        v = out[0]
        return -math.inf if not np.isfinite(v) else float(v)

    dm = ms[1] - ms[0]
    dp = phis[1] - phis[0]
    dt = thetas[1] - thetas[0]
    val = best
    t0, v = _golden_max(lambda t: value(m0, p0, t), max(0.0, t0 - dt), t0 + dt)
    val = max(val, v)
    p0, v = _golden_max(lambda p: value(m0, p, t0), p0 - dp, p0 + dp)
    val = max(val, v)
    m_lo, m_hi = m0 - dm, m0 + dm
    if m_lo < 0 < m_hi:
        m_lo, m_hi = (1e-3, m_hi) if m0 > 0 else (m_lo, -1e-3)
    m0, v = _golden_max(lambda m: value(m, p0, t0), m_lo, m_hi)
    val = max(val, v)
    return ChannelSearch(val, m0, p0, t0, best)


# -- exceptional point -------------------------------------------------------

def defective_propagator(params, theta):
    """e^{-i mu theta} [I - i theta (H - mu I)], the EP limit of exp(-i H theta)."""
    H = build(params)
    mu = 0.5 * (H[0, 0] + H[1, 1])
    shifted = H - mu * np.eye(2)
    return np.exp(-1j * mu * theta) * (np.eye(2) - 1j * theta * shifted)


def qfi_at_ep(params, psi0, theta, ep_tol=EP_TOL):
    """Expectation-form QFI at the EP, evolved with the defective-limit propagator."""
    _require(params, Regime.EXCEPTIONAL_POINT, ep_tol)
    H, psi0 = check_state(build(params), psi0)
    state = state_from_raw(theta, defective_propagator(params, theta) @ psi0)
    return qfi_of_state(H, state)


# -- optimal measurement |0><0| (w = pi/2) ------------------------------------

def _require_half_pi(params):
    if abs(params.omega - HALF_PI) > 1e-12:
        raise SpecError("this closed form assumes omega = pi/2")


def _phase_angles(params, phi, theta):
    """(gamma0, beta, alpha) for the w = pi/2 closed forms.

    ``gamma0`` carries a constant offset ``(alpha - pi/2)/2`` on top of
    ``sqrt(nu0) theta + phi/2``; that offset aligns the variance and
    optimal-C expressions with the eigenvector phases used in this module.
    """
    reg = _require(params, Regime.UNBROKEN)
    _require_half_pi(params)
    kappa = params.r / params.s
    alpha = math.asin(kappa)
    beta = math.pi - alpha  # sin(beta) = kappa, cos(beta) = -sqrt(1 - kappa^2)
    gamma0 = math.sqrt(reg.nu) * theta + 0.5 * phi + 0.5 * (alpha - HALF_PI)
    return gamma0, beta, alpha, reg.nu, kappa


def variance_pq(params, m, phi, theta):
    """Single-shot (Delta theta)^2 = p/q for the |0><0| measurement."""
    g0, beta, _, nu0, k = _phase_angles(params, phi, theta)
    sb = math.sin(2 * g0 + beta)
    c2 = math.cos(2 * g0)
    mm = 1 + m * m
    p = (mm + 2 * m * k * sb) ** 2 * (mm - 2 * m * c2 + 4 * m * k * sb) * (mm + 2 * m * c2)
    bracket = 2 * m * k + mm * sb
    q = 16 * m * m * nu0 * (1 - k * k) * bracket * bracket
    if m == 0 or abs(bracket) < 1e-12 * mm:
        raise ZeroSignalError(f"q vanishes at theta = {theta!r}")
    return p / q


def optimal_condition_constant(params, phi, theta):
    """C in |f> = iC|g> for m = 1 and A = |0><0|: -nu0 / (s cos g0 sin(g0 + beta))."""
    g0, beta, _, nu0, _ = _phase_angles(params, phi, theta)
    den = params.s * math.cos(g0) * math.sin(g0 + beta)
    if abs(den) < 1e-14:
        raise ZeroSignalError(f"g vanishes at theta = {theta!r}")
    return -nu0 / den


def optimal_deviation_vectors(params, phi, theta):
    """Closed-form (f, g) for m = 1 and A = |0><0|, up to a global phase.

    Both carry the prefactor ``4 e^{i phi/2} N_th sqrt(N_th / 2)`` with
    ``N_th = N^2 / K_theta = 1 / (2 + 2 kappa cos(2 sqrt(nu0) theta + phi))``.
    """
    g0, beta, _, nu0, k = _phase_angles(params, phi, theta)
    n_th = 1.0 / (2 + 2 * k * math.cos(2 * math.sqrt(nu0) * theta + phi))
    pref = 4 * np.exp(0.5j * phi) * n_th * math.sqrt(n_th / 2)
    cg, sgb = math.cos(g0), math.sin(g0 + beta)
    f = pref * nu0 / params.s * np.array([cg, 1j * sgb])
    g = pref * np.array([1j * cg * cg * sgb, -cg * sgb * sgb])
    return f, g


def sensor_expectation(params, theta):
    """<|0><0|> for m = 1, phi = 0:
    [1 - sin(2 theta sqrt(nu0) - a)] / [2 + 2 sin a cos(2 theta sqrt(nu0))]."""
    reg = _require(params, Regime.UNBROKEN)
    sa = params.gain / params.s
    a = math.asin(sa)
    x = 2 * theta * math.sqrt(reg.nu)
    return (1 - math.sin(x - a)) / (2 + 2 * sa * math.cos(x))


# -- Hermitian comparison (w = pi/2) -----------------------------------------

def comparison_hamiltonians(params):
    """H0 = diag(±sqrt(s^2 - r^2)) and H1 = [[s, -ir], [ir, s]]."""
    _require_half_pi(params)
    reg = _require(params, Regime.UNBROKEN)
    e = math.sqrt(reg.nu)
    H0 = np.diag([e, -e]).astype(np.complex128)
    H1 = np.array([[params.s, -1j * params.r], [1j * params.r, params.s]], dtype=np.complex128)
    return H0, H1


def hermitian_ratios(params, m, phi, theta):
    """(S0, S1) = F / (4 nu0), F / (4 r^2): QFI relative to the optimal QFI of H0, H1."""
    _require_half_pi(params)
    reg = _require(params, Regime.UNBROKEN)
    kappa = params.r / params.s
    if not 0 < kappa < 1:
        raise SpecError(f"kappa = r/s must lie in (0, 1), got {kappa!r}")
    f = qfi_closed_unbroken(params, m, phi, theta)
    return f / (4 * reg.nu), f / (4 * params.r * params.r)

