import math

import numpy as np
import pytest

from bosegas import lhy
from bosegas.errors import DivergenceError, DomainError
from bosegas.scattering import (
    FourierProfile, RadialPotential, g_hat_profile, solve_for_density, solve_scattering)

BARRIER3 = RadialPotential.square_barrier(2.0, 1.0, 3)


@pytest.fixture(scope="module")
def barrier3():
    sol = solve_scattering(BARRIER3)
    return sol, g_hat_profile(sol)


def test_ibog_constants():
    assert abs(lhy.ibog(3).value - 128 / (15 * math.sqrt(math.pi))) < 1e-10
    assert abs(lhy.ibog(2).value - (2 * np.euler_gamma + 0.5 + math.log(math.pi))) < 1e-10
    assert lhy.ibog(3).value == pytest.approx(4.814418, abs=1e-6)


def test_ibog_loose_and_tight_agree():
    assert lhy.ibog(3, tol=1e-6).value == pytest.approx(lhy.ibog(3, tol=1e-13).value, abs=1e-6)


def test_ibog_rejects_bad_dimension():
    with pytest.raises(DomainError):
        lhy.ibog(4)


def test_second_order_zero_cases(barrier3):
    sol, gh = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    assert lhy.second_order_integral(FourierProfile.zero(3), 1e-3, 3, box).value == 0
    assert lhy.second_order_integral(gh, 0.0, 3, box).value == 0


def test_constant_profile_reproduces_lhy_energy_3d(barrier3):
    sol, _ = barrier3
    for rho in (1e-2, 1e-5):
        box = lhy.BoxSpec.from_density(3, rho, 8, sol.g_hat_zero)
        const = FourierProfile.constant(3, sol.g_hat_zero)
        s = lhy.second_order_integral(const, rho, 3, box)
        e = lhy.lhy_energy(rho, box, sol)
        assert s.value == pytest.approx(e.E_LHY, rel=1e-9)


def test_constant_profile_2d_residual_is_scale_mismatch():
    # the counterterm radius 1/ℓ_δ differs from the ibog radius by √(|log x|δ)
    v = RadialPotential.square_barrier(2.0, 1.0, 2)
    rho = 1e-6
    sol = solve_for_density(v, rho)
    box = lhy.BoxSpec.from_density(2, rho, 8, sol.g_hat_zero)
    const = FourierProfile.constant(2, sol.g_hat_zero)
    s = lhy.second_order_integral(const, rho, 2, box, ell_delta=sol.ell_delta)
    e = lhy.lhy_energy(rho, box, sol)
    log_x = abs(math.log(rho * sol.a ** 2))
    predicted = math.log(log_x * sol.delta) / lhy.BOGOLIUBOV_CONSTANTS[2]
    assert s.value / e.E_LHY - 1 == pytest.approx(predicted, rel=1e-6, abs=1e-9)


def test_second_order_approaches_lhy(barrier3):
    sol, gh = barrier3
    errs = []
    for rho in (1e-2, 1e-3, 1e-4, 1e-5):
        box = lhy.BoxSpec.from_density(3, rho, 8, sol.g_hat_zero)
        s = lhy.second_order_integral(gh, rho, 3, box)
        errs.append(abs(s.value / lhy.lhy_energy(rho, box, sol).E_LHY - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    # the relative error shrinks roughly like √ρ
    assert 2 < errs[1] / errs[2] < 4.5


def test_lhy_energy_two_term_forms(barrier3):
    sol, _ = barrier3
    rho = 1e-4
    box = lhy.BoxSpec.from_density(3, rho, 8, sol.g_hat_zero)
    e = lhy.lhy_energy(rho, box, sol)
    a = sol.a
    textbook = 4 * math.pi * rho ** 2 * box.volume * a * (
        1 + 128 / (15 * math.sqrt(math.pi)) * math.sqrt(rho * a ** 3))
    assert e.two_term == pytest.approx(textbook, rel=1e-13)
    assert lhy.lhy_energy(0.0, box, sol).two_term == 0
    v2 = RadialPotential.square_barrier(2.0, 1.0, 2)
    sol2 = solve_for_density(v2, rho)
    box2 = lhy.BoxSpec.from_density(2, rho, 8, sol2.g_hat_zero)
    e2 = lhy.lhy_energy(rho, box2, sol2)
    assert e2.two_term == pytest.approx(e2.textbook, rel=1e-13)


def test_gomega_fourier_vs_real_space(barrier3):
    sol, gh = barrier3
    f = lhy.g_omega_zero(gh, 3).value
    r = lhy.g_omega_real_space(sol).value
    assert f == pytest.approx(r, rel=1e-6)
    v2 = RadialPotential.square_barrier(2.0, 1.0, 2)
    sol2 = solve_for_density(v2, 1e-3)
    f2 = lhy.g_omega_zero(g_hat_profile(sol2), 2, sol2.ell_delta).value
    assert f2 == pytest.approx(lhy.g_omega_real_space(sol2).value, rel=1e-6)


def test_gomega_weak_coupling_born_limit():
    V0 = 1e-3
    v = RadialPotential.square_barrier(V0, 1.0, 3)
    sol = solve_scattering(v)
    v_hat = FourierProfile.from_radial_function(v, 3, v.breakpoints, True, "v")
    exact = lhy.g_omega_zero(g_hat_profile(sol), 3).value
    born = lhy.g_omega_zero(v_hat, 3).value
    # first-order correction is O(V0)
    assert abs(exact / born - 1) < 10 * V0


def test_gomega_zero_and_divergent_profiles():
    assert lhy.g_omega_zero(FourierProfile.zero(3), 3).value == 0
    gauss = FourierProfile(3, lambda k: np.exp(-k * k), 1.0, support_radius=math.inf)
    with pytest.raises(DivergenceError):
        lhy.g_omega_zero(gauss, 3)


def test_tail_sum_decomposition(barrier3):
    sol, gh = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    r = lhy.tail_sum_vs_gomega(gh, 3, box, 16)
    # ĝω(0) = tail integral + low-momentum part
    assert r.gomega0 - r.integral_tail - r.missing_low_k == pytest.approx(0, abs=1e-8)
    assert r.difference == pytest.approx(r.gomega0 - r.lattice_tail_sum, abs=1e-8)
    assert r.bound_holds


def test_tail_sum_dominated_by_low_momentum_part(barrier3):
    # |ĝω(0) - tail sum| grows like ĝ(0)²K_H/(4π²ℓ): the low-momentum piece
    sol, gh = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    Ks = [8, 16, 32, 64]
    rows = [lhy.tail_sum_vs_gomega(gh, 3, box, K) for K in Ks]
    for K, r in zip(Ks, rows):
        lead = sol.g_hat_zero ** 2 * K / (4 * math.pi ** 2 * box.ell)
        assert r.missing_low_k == pytest.approx(lead, rel=0.05)
    slope = np.polyfit(np.log(Ks), np.log([r.abs_difference for r in rows]), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.1)


def test_tail_sum_slope_against_inverse_cutoff(barrier3):
    # regression of |ĝω(0) - tail sum| against 1/K_H has slope near -1
    sol, gh = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    Ks = np.array([8, 16, 32, 64, 128])
    diffs = [lhy.tail_sum_vs_gomega(gh, 3, box, K).abs_difference for K in Ks]
    slope = np.polyfit(np.log(1 / Ks), np.log(diffs), 1)[0]
    assert abs(slope + 1) <= 0.3


def test_tail_sum_zero_profile_and_guards(barrier3):
    sol, gh = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    z = lhy.tail_sum_vs_gomega(FourierProfile.zero(3), 3, box, 8)
    assert z.difference == 0 and z.lattice_tail_sum == 0
    with pytest.raises(DomainError):
        lhy.tail_sum_vs_gomega(gh, 3, box, 0.5)


def test_lattice_sum_against_brute_force():
    sol = solve_scattering(BARRIER3)
    gh = g_hat_profile(sol)
    rho = 0.05
    box = lhy.BoxSpec.from_density(3, rho, 1.5, sol.g_hat_zero)
    r = lhy.lattice_sum_error(box, gh, rho)
    h = box.spacing
    n = np.arange(-70, 71)
    X, Y = np.meshgrid(n, n, indexing="ij")
    total = 0.0
    for z in n:
        k = h * np.sqrt(X ** 2 + Y ** 2 + z * z).ravel()
        k = k[k > 0]
        c = rho * gh(k)
        total += np.sum(0.5 * (np.sqrt(k ** 4 + 2 * k * k * c) - k * k - c))
    # the omitted region |n| > 70 contributes about -(ρĝ)²/(4k²) per point
    assert r.lattice_sum == pytest.approx(total, rel=1e-3)


def test_lattice_sum_relative_difference_decays(barrier3):
    sol, gh = barrier3
    rel = []
    for K in (8, 16, 32):
        box = lhy.BoxSpec.from_density(3, 1e-3, K, sol.g_hat_zero)
        rel.append(abs(lhy.lattice_sum_error(box, gh, 1e-3).relative_difference))
    assert rel[0] > rel[1] > rel[2]


def test_lattice_sum_difference_tends_to_half_mean_field(barrier3):
    # the excluded k = 0 point makes sum - integral → ρĝ(0)/2 for large boxes
    sol, gh = barrier3
    rho = 1e-3
    box = lhy.BoxSpec.from_density(3, rho, 64, sol.g_hat_zero)
    r = lhy.lattice_sum_error(box, gh, rho)
    assert abs(r.difference) == pytest.approx(rho * sol.g_hat_zero / 2, rel=0.1)


def test_lattice_sum_zero_profile(barrier3):
    sol, _ = barrier3
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, sol.g_hat_zero)
    assert lhy.lattice_sum_error(box, FourierProfile.zero(3), 1e-3).difference == 0


def test_box_spec_from_density():
    box = lhy.BoxSpec.from_density(3, 1e-3, 8, 2.0)
    assert box.ell == pytest.approx(8 / math.sqrt(2e-3))
    assert box.N + box.N_residual == pytest.approx(1e-3 * box.ell ** 3, rel=1e-14)
    assert isinstance(box.N, int) and abs(box.N_residual) <= 0.5
    assert box.spacing == pytest.approx(2 * math.pi / box.ell)
