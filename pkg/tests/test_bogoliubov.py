import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosegas.bogoliubov import (
    ModeCoefficients, commutator_defect, diagonalize_mode, dispersion, dispersion_table,
    high_k_bounds_check, pair_hamiltonian_matrix, symmetric_spectrum, truncated_ground_energy,
    vacuum_residual)
from bosegas.errors import DomainError
from bosegas.scattering import FourierProfile, RadialPotential, g_hat_profile, solve_scattering


def test_diagonal_case():
    r = diagonalize_mode(ModeCoefficients(1.0, 0.0))
    assert (r.D, r.alpha, r.c0, r.ground_shift) == (1.0, 0.0, 0.0, 0.0)


def test_pairing_example():
    r = diagonalize_mode((5.0, 3.0))
    assert r.excitation_energy == pytest.approx(4.0)
    assert r.D == pytest.approx(4.5)
    assert r.alpha == pytest.approx(1 / 3)
    assert r.ground_shift == pytest.approx(-1.0)


def test_shifted_oscillator_example():
    r = diagonalize_mode(ModeCoefficients(2.0, 0.0, 1.0))
    assert r.D == 2.0
    assert r.c0 == pytest.approx(0.5)
    assert r.ground_shift == pytest.approx(-1.0)
    assert truncated_ground_energy(2.0, 0.0, 30, kappa=1.0) == pytest.approx(-1.0, abs=1e-10)


def test_invalid_coefficients_rejected():
    with pytest.raises(DomainError):
        ModeCoefficients(1.0, 1.0)
    with pytest.raises(DomainError):
        ModeCoefficients(-1.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-0.999, 0.999))
def test_shift_identity(A, ratio):
    B = ratio * A
    r = diagonalize_mode((A, B))
    s = math.sqrt(A * A - B * B)
    assert r.ground_shift == pytest.approx(s - A, rel=1e-10, abs=1e-12 * A)


def test_near_degenerate_root_is_stable():
    A, B = 1.0, 1.0 - 1e-12
    r = diagonalize_mode((A, B))
    assert r.excitation_energy == pytest.approx(math.sqrt(2e-12), rel=1e-4)


def test_truncated_ground_energy_converges():
    for ratio in (0.2, 0.4, 0.6):
        r = diagonalize_mode((1.0, ratio))
        assert abs(truncated_ground_energy(1.0, ratio, 60) - r.ground_shift) < 1e-8


def test_full_and_symmetric_sectors_agree():
    H = pair_hamiltonian_matrix(1.0, 0.3, 12)
    assert np.linalg.eigvalsh(H)[0] == pytest.approx(truncated_ground_energy(1.0, 0.3, 12), abs=1e-12)


def test_symmetric_spectrum_spacing_is_twice_the_quantum():
    A, B = 1.0, 0.5
    r = diagonalize_mode((A, B))
    w = symmetric_spectrum(A, B, 120, count=4)
    np.testing.assert_allclose(np.diff(w), 2 * r.excitation_energy, rtol=1e-8)
    # D = (A + s)/2 is not the spacing unless B = 0
    assert abs(np.diff(w)[0] - 2 * r.D) > 0.1


def test_quasiparticle_commutators_and_vacuum():
    assert commutator_defect(1.0, 0.4, 40, low=10) < 1e-10
    assert vacuum_residual(1.0, 0.4, 30) < 1e-8


def test_free_dispersion():
    p = dispersion(1.7, 0.3, FourierProfile.zero(3))
    assert p.D_k == pytest.approx(1.7 ** 2)
    assert p.alpha_k == 0


def test_dispersion_example():
    p = dispersion(1.0, 1.0, FourierProfile.constant(3, 1.0))
    assert p.D_k == pytest.approx(math.sqrt(3))
    assert p.alpha_k == pytest.approx(2 - math.sqrt(3))
    assert p.pair_shift == pytest.approx(-p.alpha_k * p.B_k)


def test_small_k_limits():
    c = 0.7
    prof = FourierProfile.constant(3, c)
    ks = [1e-2, 1e-3]
    pts = [dispersion(k, 1.0, prof) for k in ks]
    speed = math.sqrt(2 * c)
    errs = [abs(p.D_k / p.k - speed) for p in pts]
    # errors shrink linearly in k
    assert errs[1] < errs[0] / 5
    assert 1 - pts[1].alpha_k < 1 - pts[0].alpha_k < 0.2


def test_dispersion_table_matches_pointwise():
    sol = solve_scattering(RadialPotential.square_barrier(2.0, 1.0, 3))
    gh = g_hat_profile(sol)
    ks = np.linspace(0.1, 10, 25)
    tab = dispersion_table(ks, 1e-2, gh)
    for i, k in enumerate(ks):
        p = dispersion(k, 1e-2, gh)
        assert tab["D_k"][i] == pytest.approx(p.D_k, rel=1e-14)
        assert tab["alpha_k"][i] == pytest.approx(p.alpha_k, rel=1e-14, abs=1e-300)


def test_high_k_bounds():
    sol = solve_scattering(RadialPotential.square_barrier(2.0, 1.0, 3))
    gh = g_hat_profile(sol)
    rho, ell, K_H = 1e-3, 100.0, 500.0
    k = np.linspace(K_H / ell, 4 * K_H / ell, 200)
    rep = high_k_bounds_check(k, rho, rho, gh, K_H, ell)
    assert rep["bounded"]
    assert rep["const_alpha"] <= 1 + 1e-3
    zero = high_k_bounds_check(k, rho, rho, FourierProfile.zero(3), K_H, ell)
    assert zero["const_alpha"] == 0 and zero["const_D"] == 0
    with pytest.raises(DomainError):
        high_k_bounds_check(np.array([0.1]), rho, rho, gh, K_H, ell)
