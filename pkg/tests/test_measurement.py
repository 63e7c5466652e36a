import math

import numpy as np
import pytest

from nhqfi import pt
from nhqfi.errors import (DegenerateConditionError, NonHermitianMeasurementError,
                          ZeroSignalError)
from nhqfi.evolution import evolve
from nhqfi.measurement import (check_condition, crb_gap, deviation_vectors, error_propagation,
                               signal_slope)
from nhqfi.qfi import qfi_expectation, sld

HALF_PI = math.pi / 2
P0 = np.diag([1.0, 0.0])
FIG3 = pt.PtParams(0.25, 0.5, HALF_PI)


def random_case(rng, scale=2.0):
    H = rng.uniform(-scale, scale, (2, 2)) + 1j * rng.uniform(-scale, scale, (2, 2))
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    return H, psi / np.linalg.norm(psi)


def random_hermitian(rng):
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return 0.5 * (X + X.conj().T)


def test_deviation_vectors_trivial():
    rng = np.random.default_rng(20)
    H, psi = random_case(rng)
    _, g = deviation_vectors(H, np.eye(2), psi, 0.6)
    assert np.max(np.abs(g)) <= 1e-15
    Hh = np.diag([1.0, -1.0])
    f, _ = deviation_vectors(Hh, P0, [0.0, 1.0], 1.2)
    assert np.max(np.abs(f)) <= 1e-15


def test_non_hermitian_measurement_rejected():
    with pytest.raises(NonHermitianMeasurementError):
        deviation_vectors(np.eye(2), np.array([[0, 1], [0, 0]]), [1.0, 0.0], 0.1)


def test_deviation_vectors_match_closed_forms():
    rng = np.random.default_rng(21)
    for _ in range(10):
        s = rng.uniform(0.5, 2)
        P = pt.PtParams(rng.uniform(0.05, 0.9) * s, s, HALF_PI)
        phi, t = rng.uniform(0, 2 * math.pi), rng.uniform(0, 5)
        f, g = deviation_vectors(pt.build(P), P0, pt.initial_state(P, pt.InitialStateSpec(1, phi)), t)
        F, G = pt.optimal_deviation_vectors(P, phi, t)
        # same up to one common global phase
        ph = np.vdot(F, f) / abs(np.vdot(F, f))
        assert np.max(np.abs(f - ph * F)) <= 1e-10
        assert np.max(np.abs(g - ph * G)) <= 1e-10


def test_condition_collinear_pair():
    rng = np.random.default_rng(22)
    g = rng.normal(size=3) + 1j * rng.normal(size=3)
    rep = check_condition(1j * 2.5 * g, g)
    assert rep.satisfied
    assert rep.c_estimate == pytest.approx(2.5, abs=1e-12)


def test_condition_degenerate_and_zero_g():
    with pytest.raises(DegenerateConditionError):
        check_condition(np.zeros(2), np.zeros(2))
    rep = check_condition(np.array([1.0, 0.0]), np.zeros(2))
    assert not rep.satisfied and math.isnan(rep.c_estimate.real)
    with pytest.raises(ValueError):
        check_condition(np.ones(2), np.ones(2), tol=0)


def test_condition_optimal_pt_state():
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3)
    for t in (0.3, 1.7, 4.4):
        rep = check_condition(*deviation_vectors(H, P0, psi, t))
        assert rep.satisfied
        assert rep.c_estimate.real == pytest.approx(pt.optimal_condition_constant(FIG3, 0.0, t), rel=1e-8)


def test_condition_fails_for_m_1p2():
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3, pt.InitialStateSpec(1.2, 0.0))
    assert not check_condition(*deviation_vectors(H, P0, psi, 1.1)).satisfied


def test_sld_satisfies_condition_with_half():
    # the SLD deviation vector is -2i f, i.e. f = i (1/2) g
    rng = np.random.default_rng(23)
    for _ in range(20):
        H, psi = random_case(rng)
        t = rng.uniform(0, 2)
        L = sld(H, psi, t)
        rep = check_condition(*deviation_vectors(H, L, psi, t))
        assert rep.satisfied
        assert rep.c_estimate.real == pytest.approx(0.5, abs=1e-10)


def test_signal_slope_matches_finite_difference():
    rng = np.random.default_rng(24)
    h = 1e-6
    for _ in range(30):
        H, psi = random_case(rng)
        A = random_hermitian(rng)
        t = rng.uniform(0, 2)

        def mean(x):
            phi = evolve(H, psi, x).normalized
            return np.vdot(phi, A @ phi).real

        fd = (mean(t + h) - mean(t - h)) / (2 * h)
        assert abs(signal_slope(H, A, evolve(H, psi, t)) - fd) <= 1e-5


def test_error_propagation_saturates_for_m1():
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3)
    for t in np.linspace(0.05, 9.9, 60):
        v = error_propagation(H, P0, psi, t, 1)
        assert v * qfi_expectation(H, psi, t).qfi == pytest.approx(1.0, rel=1e-6)


def test_error_propagation_m_1p1_exceeds_bound():
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3, pt.InitialStateSpec(1.1, 0.0))
    excess = []
    for t in np.linspace(0.05, 9.9, 100):
        try:
            v = error_propagation(H, P0, psi, t)
        except ZeroSignalError:
            continue
        excess.append(v * qfi_expectation(H, psi, t).qfi - 1)
    assert min(excess) >= -1e-9
    assert max(excess) > 1e-3


def test_n_scaling_and_validation():
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3)
    assert error_propagation(H, P0, psi, 0.8, 4) == pytest.approx(error_propagation(H, P0, psi, 0.8) / 4)
    with pytest.raises(ValueError):
        error_propagation(H, P0, psi, 0.8, 0)


def test_identity_measurement_has_zero_signal():
    rng = np.random.default_rng(25)
    H, psi = random_case(rng)
    with pytest.raises(ZeroSignalError) as exc:
        crb_gap(H, np.eye(2), psi, 0.5)
    assert exc.value.code == "ZERO_SIGNAL"


def test_crb_gap_sld_and_optimal():
    rng = np.random.default_rng(26)
    for _ in range(10):
        H, psi = random_case(rng)
        t = rng.uniform(0, 2)
        assert abs(crb_gap(H, sld(H, psi, t), psi, t)) <= 1e-6
    H = pt.build(FIG3)
    psi = pt.initial_state(FIG3)
    assert abs(crb_gap(H, P0, psi, 2.2)) <= 1e-6


def test_crb_inequality_property():
    rng = np.random.default_rng(27)
    n = 0
    while n < 200:
        H, psi = random_case(rng)
        A = random_hermitian(rng)
        t = rng.uniform(0, 3)
        try:
            gap = crb_gap(H, A, psi, t)
        except ZeroSignalError:
            continue
        assert gap >= -1e-6
        rep = check_condition(*deviation_vectors(H, A, psi, t), tol=1e-8)
        if rep.satisfied:
            assert gap <= 1e-5
        n += 1


def test_affine_invariance():
    rng = np.random.default_rng(28)
    for _ in range(20):
        H, psi = random_case(rng)
        A = random_hermitian(rng)
        a, b = rng.uniform(0.5, 3) * rng.choice([-1, 1]), rng.uniform(-2, 2)
        t = rng.uniform(0, 2)
        v1 = error_propagation(H, A, psi, t)
        v2 = error_propagation(H, a * A + b * np.eye(2), psi, t)
        assert v2 == pytest.approx(v1, rel=1e-10)
