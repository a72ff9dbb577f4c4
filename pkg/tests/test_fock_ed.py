import math

import numpy as np
import pytest
import scipy.sparse as sp

from bosegas.errors import DomainError, SizingError
from bosegas.fock.basis import build_basis
from bosegas.fock.cnumber import (
    coherent_state, cnumber_energy_scan, eps_plus, radial_symbol_diagonal, vacuum_energy)
from bosegas.fock.comparison import bogoliubov_vs_ed, depletion_sweep, perturbative_energy
from bosegas.fock.eigen import ground_state
from bosegas.fock.localization import (
    check_profile, localize_large_matrices, quintic_plateau, trapezoid, window_deltas)
from bosegas.fock.modes import ModeSet
from bosegas.fock.operators import assemble_hamiltonian, number_operator
from bosegas.scattering import FourierProfile, RadialPotential, solve_scattering


def v_hat_for(V0, d=3):
    v = RadialPotential.square_barrier(V0, 1.0, d)
    return FourierProfile.from_radial_function(v, d, v.breakpoints, True, "v")


# --- eigen -----------------------------------------------------------------------------

def test_diagonal_matrix_ground_state():
    gs = ground_state(sp.diags([3.0, -1.0, 2.0]))
    assert gs.energy == -1.0
    assert abs(gs.vector[1]) == pytest.approx(1.0)


def test_lanczos_matches_dense():
    basis = build_basis(ModeSet.shells(3, 4.0, 2), 4, (0, 0, 0))
    H = assemble_hamiltonian(basis, v_hat_for(2.0))
    dense = ground_state(H, method="dense")
    lan = ground_state(H, method="lanczos")
    assert lan.energy == pytest.approx(dense.energy, abs=1e-10)
    assert lan.residual <= 1e-10 * lan.norm_estimate
    assert abs(abs(lan.vector @ dense.vector) - 1) < 1e-8


def test_lanczos_is_deterministic():
    basis = build_basis(ModeSet.shells(3, 4.0, 2), 4, (0, 0, 0))
    H = assemble_hamiltonian(basis, v_hat_for(2.0))
    a = ground_state(H, method="lanczos")
    b = ground_state(H, method="lanczos")
    assert a.energy == b.energy and np.array_equal(a.vector, b.vector)


def test_ground_energy_increases_with_repulsion():
    basis = build_basis(ModeSet.shells(3, 5.0, 1), 4, (0, 0, 0))
    energies = [ground_state(assemble_hamiltonian(basis, v_hat_for(V0))).energy
                for V0 in (0.1, 0.5, 1.0, 2.0)]
    assert all(b >= a for a, b in zip(energies, energies[1:]))


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        ground_state(sp.identity(3000, format="csr"), method="qr")


# --- localization ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def loc_setup():
    modes = ModeSet.shells(3, 6.0, 2)
    basis = build_basis(modes, 5, (0, 0, 0))
    H = assemble_hamiltonian(basis, v_hat_for(2.0))
    gs = ground_state(H)
    n_low = number_operator(basis, modes.low_mask(1.01 * 2 * math.pi * math.sqrt(2)), "n_low")
    return basis, H, gs, n_low


def test_profiles_are_admissible():
    check_profile(trapezoid)
    check_profile(quintic_plateau)
    with pytest.raises(DomainError):
        check_profile(lambda s: np.where(np.abs(s) < 0.2, 1.0, 0.0))
    with pytest.raises(DomainError):
        check_profile(lambda s: np.where(np.abs(s) < 0.3, 1.0, 0.0))


def test_localization_of_eigenvector(loc_setup):
    _, H, gs, n_low = loc_setup
    r = localize_large_matrices(gs.vector, H, n_low, 8)
    assert r.norm_sum == pytest.approx(1.0, abs=1e-12)
    assert abs(r.identity_residual) < 1e-10 * max(1.0, abs(r.energy))
    assert r.lower_bound_holds


def test_localization_of_random_state(loc_setup):
    basis, H, _, n_low = loc_setup
    psi = np.random.default_rng(3).standard_normal(basis.dimension)
    for M in (4, 8, 16):
        r = localize_large_matrices(psi, H, n_low, M, keep_windows=True)
        assert r.norm_sum == pytest.approx(1.0, abs=1e-12)
        assert abs(r.identity_residual) < 1e-10 * max(1.0, H.max_abs())
        total = sum(r.windows.values())
        assert np.linalg.norm(total) > 0


def test_scaled_deltas_settle():
    for k in (1, 2):
        vals = [abs(window_deltas(trapezoid, M)[k]) * M * M for M in (8, 16, 32, 64, 128)]
        assert max(vals[:3]) / min(vals[:3]) < 2
        # successive changes shrink as M²|δ_k| approaches its limit
        steps = np.abs(np.diff(vals))
        assert np.all(steps[1:] < steps[:-1])
    # deltas are non-positive: Σθ(m)θ(m+k) <= Σθ(m)²
    assert all(v <= 1e-15 for v in window_deltas(trapezoid, 12).values())


def test_localization_rejects_non_integer_counts(loc_setup):
    basis, H, gs, _ = loc_setup
    with pytest.raises(DomainError):
        localize_large_matrices(gs.vector, H, np.full(basis.dimension, 0.5), 8)


# --- c-number scan ---------------------------------------------------------------------

def test_coherent_state_is_normalized_eigenvector():
    z = 1.3 - 0.4j
    c = coherent_state(z, 80)
    assert np.vdot(c, c).real == pytest.approx(1.0, abs=1e-13)
    n = np.arange(1, 81)
    lowered = np.sqrt(n) * c[1:]
    np.testing.assert_allclose(lowered[:60], z * c[:60], atol=1e-13)
    assert coherent_state(0, 5)[0] == 1


def test_radial_symbols_reproduce_number_operators():
    n = np.arange(11)
    np.testing.assert_allclose(radial_symbol_diagonal(lambda u: np.ones_like(u), 10), 1, rtol=1e-12)
    # anti-normal symbol of a a† is |z|²
    np.testing.assert_allclose(radial_symbol_diagonal(lambda u: u, 10), n + 1, rtol=1e-12)


def test_vacuum_energy_without_exchange_term():
    rho, vol, g0 = 0.01, 1e4, 3.0
    z = np.sqrt(np.linspace(0, 2 * rho, 2001) * vol)
    scan = cnumber_energy_scan(z, vol, g0, 0.0, rho)
    assert scan.vertex_rho_z == pytest.approx(rho)
    assert scan.argmin_rho_z == pytest.approx(rho, rel=1e-3)
    assert scan.values[0] == pytest.approx(rho ** 2 * vol * g0)
    assert scan.curvature == pytest.approx(vol * g0)


def test_vacuum_energy_vertex_and_curvature():
    rho, vol, g0, gw0 = 0.02, 500.0, 2.0, 0.3
    vertex = rho * g0 / (g0 + gw0)
    h = 1e-4
    f = lambda r: vacuum_energy(r, rho, vol, g0, gw0)  # noqa: E731
    second = (f(vertex + h) - 2 * f(vertex) + f(vertex - h)) / h ** 2
    assert second == pytest.approx(vol * (g0 + gw0), rel=1e-6)
    assert (f(vertex + h) - f(vertex - h)) / (2 * h) == pytest.approx(0, abs=1e-9)


def test_scan_guards_and_band():
    with pytest.raises(DomainError):
        cnumber_energy_scan(np.linspace(1, 2, 5), 10.0, 1.0, 0.0, 0.01)
    z = np.sqrt(np.linspace(0, 0.04, 11) * 100.0)
    scan = cnumber_energy_scan(z, 100.0, 1.0, 0.1, 0.01, K_ell=2.0, K_L=400.0, lambda_lhy=1e-6)
    assert scan.eps_plus == pytest.approx(eps_plus(2.0, 400.0, 1e-6)) == pytest.approx(0.01)
    assert scan.band == pytest.approx((0.0099, 0.0101))
    assert len(scan.rows()) == 11


# --- comparison ------------------------------------------------------------------------

def test_free_gas_comparison():
    modes = ModeSet.shells(3, 5.0, 1)
    rep = bogoliubov_vs_ed(modes, 3, FourierProfile.zero(3))
    assert rep.E0 == pytest.approx(0, abs=1e-14)
    assert rep.E_condensate == 0 and rep.E_bogoliubov == 0
    assert rep.n_plus == pytest.approx(0, abs=1e-14)


def test_perturbative_energy_to_third_order():
    modes = ModeSet.parse("0,0,0;1,0,0;-1,0,0", 3, 4.0)
    errs = []
    for V0 in (1e-2, 2e-2):
        v_hat = v_hat_for(V0)
        basis = build_basis(modes, 2, (0, 0, 0))
        E0 = ground_state(assemble_hamiltonian(basis, v_hat), method="dense").energy
        errs.append(abs(E0 - perturbative_energy(modes, 2, v_hat)[1]))
    assert errs[1] / errs[0] == pytest.approx(8, rel=0.1)


def test_ed_ordering_and_report():
    v = RadialPotential.square_barrier(2.0, 1.0, 3)
    rep = bogoliubov_vs_ed(ModeSet.shells(3, 6.0, 2), 4, v_hat_for(2.0), solve_scattering(v),
                           K_L=2 * math.pi * 1.1)
    assert rep.ordering_holds and rep.E0 <= rep.E_condensate
    assert 0 <= rep.n_plus_high <= rep.n_plus
    assert len(rep.pair_modes) == 9
    assert math.isfinite(rep.E_meanfield_plus_lhy)
    assert set(rep.to_dict()) >= {"E0", "E_bogoliubov", "dimension"}


def test_ed_respects_cap():
    with pytest.raises(SizingError):
        bogoliubov_vs_ed(ModeSet.shells(3, 6.0, 3), 8, v_hat_for(2.0), cap=1000)


def test_depletion_decreases_with_coupling():
    modes = ModeSet.shells(3, 8.0, 1)
    pots = [RadialPotential.square_barrier(V0, 1.0, 3) for V0 in (2.0, 0.5, 0.125)]
    out = depletion_sweep(modes, 4, pots,
                          lambda v: FourierProfile.from_radial_function(v, 3, v.breakpoints, True))
    assert out[0] > out[1] > out[2] > 0
