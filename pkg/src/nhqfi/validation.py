"""Cross-oracle validation battery behind ``nhqfi validate``.

Each check compares a production route against an independent one and
reports the worst residual.  Closed forms are looked up on their modules at
call time, so a patched (corrupted) formula is caught.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import bosonic, pt
from . import measurement as meas
from . import qfi as qf
from .evolution import evolve

SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self):
        return bool(self.residual <= self.tol)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<44s} max residual {self.residual:.3e}  (tol {self.tol:.0e})"


@dataclass(frozen=True)
class Report:
    checks: tuple
    golden: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = [c.line() for c in self.checks]
        out.append("golden values:")
        out.extend(f"  {name:<40s} {value:.10g}" for name, value in self.golden)
        out.append("all checks passed" if self.passed else "validation FAILED")
        return out


def _random_h(rng, scale=3.0):
    return rng.uniform(-scale, scale, (2, 2)) + 1j * rng.uniform(-scale, scale, (2, 2))


def _random_state(rng, dim=2):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _route_agreement(rng, n=25):
    d_fd = d_sld = d_res = d_cf = 0.0
    for _ in range(n):
        H = _random_h(rng)
        psi = _random_state(rng)
        th = rng.uniform(0, 3)
        f = qf.qfi_expectation(H, psi, th).qfi
        d_fd = max(d_fd, abs(f - qf.qfi_derivative(H, psi, th)))
        L = qf.sld(H, psi, th)
        d_sld = max(d_sld, abs(f - qf.sld_qfi(L, evolve(H, psi, th))))
        d_res = max(d_res, qf.sld_residual(L, H, psi, th))
        d_cf = max(d_cf, abs(f - qf.classical_fisher(H, psi, th, qf.Povm.eigenbasis(L))))
    return [Check("QFI expectation vs finite difference", d_fd, 1e-5),
            Check("QFI expectation vs Tr[rho L^2]", d_sld, 1e-8),
            Check("SLD defining-equation residual", d_res, 1e-6),
            Check("classical Fisher of SLD eigenbasis", d_cf, 1e-5)]


def _closed_forms(rng, n=10):
    thetas = np.linspace(0, 5, 21)
    d_u = d_b = d_bos = 0.0
    for _ in range(n):
        s = rng.uniform(0.5, 2.0)
        w = rng.uniform(0.2, math.pi - 0.2)
        r = rng.uniform(-0.9, 0.9) * s / abs(math.sin(w))
        P = pt.PtParams(r, s, w)
        m, phi = rng.uniform(-2, 2), rng.uniform(0, 2 * math.pi)
        psi = pt.initial_state(P, pt.InitialStateSpec(m, phi))
        H = pt.build(P)
        for t in thetas:
            d_u = max(d_u, abs(pt.qfi_closed_unbroken(P, m, phi, t) - qf.qfi_expectation(H, psi, t).qfi))

        s = rng.uniform(0.2, 1.0)
        r = rng.choice([-1, 1]) * rng.uniform(1.2, 2.0) * s / abs(math.sin(w))
        P = pt.PtParams(r, s, w)
        psi = pt.initial_state(P, pt.InitialStateSpec(m, phi))
        H = pt.build(P)
        for t in thetas:
            d_b = max(d_b, abs(pt.qfi_closed_broken(P, m, phi, t) - qf.qfi_expectation(H, psi, t).qfi))

        g = rng.uniform(0.5, 2.0)
        ga = rng.uniform(0, 1.5 * g)
        gb = rng.uniform(max(0.0, ga - 1.9 * g), ga)
        B = bosonic.BosonicParams(rng.uniform(-1, 1), g, ga, gb)
        Hb = bosonic.effective_hamiltonian(B)
        for t in np.linspace(0, 3, 21):
            ref = qf.qfi_expectation(Hb, bosonic.initial_state(), t).qfi
            d_bos = max(d_bos, abs(bosonic.qfi_bosonic_closed(B, t) - ref))
    return [Check("unbroken closed form vs engine", d_u, 1e-8),
            Check("broken closed form vs engine", d_b, 1e-8),
            Check("bosonic closed form vs engine", d_bos, 1e-8)]


def _saturation():
    P = pt.PtParams(0.25, 0.5, math.pi / 2)
    H = pt.build(P)
    A = np.diag([1.0, 0.0])
    psi = pt.initial_state(P, pt.InitialStateSpec(1.0, 0.0))
    d_crb = d_pq = d_cond = d_c = 0.0
    for t in np.linspace(0.05, 9.95, 100):
        try:
            v = meas.error_propagation(H, A, psi, t)
        except meas.ZeroSignalError:
            continue
        f = qf.qfi_expectation(H, psi, t).qfi
        d_crb = max(d_crb, abs(v * f - 1))
        d_pq = max(d_pq, abs(pt.variance_pq(P, 1.0, 0.0, t) / v - 1))
        rep = meas.check_condition(*meas.deviation_vectors(H, A, psi, t))
        d_cond = max(d_cond, rep.residual, abs(rep.c_estimate.imag) / abs(rep.c_estimate))
        c = pt.optimal_condition_constant(P, 0.0, t)
        d_c = max(d_c, abs(rep.c_estimate.real - c) / abs(c))
    return [Check("CRB saturation (m = 1, A = |0><0|)", d_crb, 1e-6),
            Check("p/q variance vs error propagation", d_pq, 1e-6),
            Check("optimal-measurement condition residual", d_cond, 1e-8),
            Check("optimal-measurement constant C", d_c, 1e-6)]


def _hermitian(rng, n=20):
    d_k = d_var = 0.0
    for _ in range(n):
        X = _random_h(rng, 2.0)
        H = 0.5 * (X + X.conj().T)
        psi = _random_state(rng)
        var = 4 * (np.vdot(psi, H @ H @ psi).real - np.vdot(psi, H @ psi).real ** 2)
        for t in (0.0, 1.3, 4.0):
            r = qf.qfi_expectation(H, psi, t)
            d_k = max(d_k, abs(r.k_theta - 1))
            d_var = max(d_var, abs(r.qfi - var))
    return [Check("Hermitian: K_theta = 1", d_k, 1e-10),
            Check("Hermitian: QFI = 4 Var(H)", d_var, 1e-8)]


def _golden():
    up = pt.PtParams(0.25, 1.0, math.pi / 2)
    bp = pt.PtParams(1.0, 0.25, math.pi / 2)
    ep = pt.PtParams(2.0, 2.0, math.pi / 2)
    thetas = np.linspace(0, 10, 20001)
    p06 = pt.PtParams(0.6, 1.0, math.pi / 2)
    p02 = pt.PtParams(0.2, 1.0, math.pi / 2)
    s0 = max(pt.hermitian_ratios(p06, 1.0, 0.0, t)[0] for t in thetas)
    s1 = max(pt.hermitian_ratios(p02, 1.0, 0.0, t)[1] for t in thetas)
    B = bosonic.BosonicParams(1.0, 1.0, 0.8, 0.2)
    values = (
        ("channel QFI, unbroken", pt.channel_qfi(up), 6.25, 1e-12),
        ("channel QFI, broken", pt.channel_qfi(bp), 6.25, 1e-12),
        ("QFI at EP, |0>, theta = 0", pt.qfi_at_ep(ep, [1, 0], 0.0), 16.0, 1e-9),
        ("max S0, kappa = 0.6", s0, 4.0, 1e-6),
        ("max S1, kappa = 0.2", s1, 36.0, 1e-4),
        ("bosonic QFI at theta = 0 (4 g^2)", bosonic.qfi_bosonic_closed(B, 0.0), 4.0, 1e-12),
    )
    checks = [Check(f"golden: {n}", abs(v - ref), tol) for n, v, ref, tol in values]
    return checks, tuple((n, v) for n, v, _, _ in values)


def validate_suite(seed=SEED):
    rng = np.random.default_rng(seed)
    checks = []
    checks += _route_agreement(rng)
    checks += _closed_forms(rng)
    checks += _saturation()
    checks += _hermitian(rng)
    golden_checks, golden = _golden()
    checks += golden_checks
    return Report(tuple(checks), golden)
