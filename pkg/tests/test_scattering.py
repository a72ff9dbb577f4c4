import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from bosegas.errors import DomainError
from bosegas.scattering import (
    EULER_GAMMA, FourierProfile, RadialPotential, delta_parameter, exterior_energy,
    g_hat_profile, pair_transforms, potential_from_json, radial_fourier, real_space_integral,
    solve_for_density, solve_scattering, variational_scattering_energy)


def barrier(V0=2.0, R=1.0, d=3):
    return RadialPotential.square_barrier(V0, R, d)


def bessel_length(V0, R):
    kR = math.sqrt(V0 / 2) * R
    return R * math.exp(-special.i0(kR) / (kR * special.i1(kR)))


def test_free_case_has_zero_length_and_flat_solution():
    sol = solve_scattering(RadialPotential.zero(3))
    assert sol.a == 0
    r = np.linspace(0, 3, 7)
    np.testing.assert_allclose(sol.phi(r), 1.0)


def test_3d_barrier_closed_form():
    for V0, R in [(2.0, 1.0), (0.3, 2.0), (50.0, 0.5)]:
        kappa = math.sqrt(V0 / 2)
        exact = R - math.tanh(kappa * R) / kappa
        assert solve_scattering(barrier(V0, R)).a == pytest.approx(exact, rel=1e-10)
    assert solve_scattering(barrier()).a == pytest.approx(0.238405844044235, rel=1e-12)


def test_2d_barrier_matches_bessel_matching():
    for V0, R in [(2.0, 1.0), (0.5, 1.5), (20.0, 1.0)]:
        sol = solve_scattering(barrier(V0, R, 2), R_tilde=10 * R)
        assert sol.a == pytest.approx(bessel_length(V0, R), rel=1e-9)


def test_ode_path_agrees_with_analytic_path():
    for d, kw in ((3, {}), (2, {"R_tilde": 8.0})):
        v = barrier(3.0, 1.0, d)
        a1 = solve_scattering(v, method="analytic", **kw).a
        a2 = solve_scattering(v, method="ode", **kw).a
        assert a2 == pytest.approx(a1, rel=1e-8)


def test_exterior_form_and_omega_range():
    sol = solve_scattering(barrier())
    r = np.linspace(1.0, 5.0, 9)
    np.testing.assert_allclose(sol.phi(r), 1 - sol.a / r, rtol=1e-12)
    rr = np.linspace(0, 10, 201)
    om = sol.omega(rr)
    assert np.all(om >= -1e-15) and np.all(om <= 1 + 1e-15)
    assert np.all(np.diff(om[rr >= 1]) <= 1e-15)
    assert np.all(sol.g(np.array([1.5, 3.0])) == 0)


def test_2d_exterior_form_and_normalization_radius():
    sol = solve_for_density(barrier(2.0, 1.0, 2), 1e-3)
    r = np.array([1.0, 2.0, 5.0, sol.R_tilde])
    np.testing.assert_allclose(sol.phi(r), 2 * sol.delta * np.log(r / sol.a), rtol=1e-10)
    assert sol.R_tilde == pytest.approx(sol.a * math.exp(1 / (2 * sol.delta)), rel=1e-12)
    assert sol.phi(np.array([sol.R_tilde]))[0] == pytest.approx(1.0, rel=1e-12)


def test_length_independent_of_matching_radius_2d():
    v = barrier(2.0, 1.0, 2)
    a = [solve_scattering(v, R_tilde=Rt).a for Rt in (1.5, 4.0, 10.0)]
    assert max(a) / min(a) - 1 < 1e-8


def test_nested_barriers_give_larger_length():
    a = [solve_scattering(barrier(V0)).a for V0 in (0.5, 1.0, 2.0, 4.0)]
    assert all(x < y for x, y in zip(a, a[1:]))


@pytest.mark.parametrize("d", [3, 2])
def test_g_hat_zero_equals_integral_of_g(d):
    v = RadialPotential.steps([0.0, 0.4, 1.0], [5.0, 1.0], d)
    sol = solve_scattering(v) if d == 3 else solve_for_density(v, 1e-4)
    assert real_space_integral(sol.g, d, v.breakpoints) == pytest.approx(sol.g_hat_zero, rel=1e-10)
    gh = g_hat_profile(sol)
    assert float(gh(np.array(0.0))) == pytest.approx(sol.g_hat_zero, rel=1e-10)


def test_ball_indicator_transform():
    val = radial_fourier(lambda r: np.ones_like(r), 3, math.pi, 1.0)
    assert val == pytest.approx(4 / math.pi, rel=1e-10)
    assert radial_fourier(lambda r: np.zeros_like(r), 3, 2.0, 1.0) == 0


def test_analytic_and_quadrature_transforms_agree():
    sol = solve_scattering(barrier())
    k = np.array([0.0, 0.3, 2.0, 7.5, 31.0])
    np.testing.assert_allclose(g_hat_profile(sol)(k), g_hat_profile(sol, analytic=False)(k),
                               rtol=1e-9, atol=1e-12)


def test_nonnegative_g_bounds_its_transform():
    sol = solve_scattering(barrier())
    gh = g_hat_profile(sol)
    k = np.linspace(0, 40, 400)
    assert np.all(np.abs(gh(k)) <= gh.value_at_zero * (1 + 1e-12))


def test_pair_transforms_relation():
    # ĝ = v̂ - v̂ω since g = v(1 - ω)
    tr = pair_transforms(solve_scattering(barrier()))
    for k in (0.0, 1.0, 5.0):
        t = tr.at(k)
        assert t["v"] - t["v_omega"] == pytest.approx(t["g"], rel=1e-9, abs=1e-12)


def test_variational_energy_matches_closed_forms():
    for d in (3, 2):
        v = barrier(2.0, 1.0, d)
        sol = solve_scattering(v) if d == 3 else solve_scattering(v, R_tilde=10.0)
        e = variational_scattering_energy(v, R_tilde=10.0)
        assert e == pytest.approx(exterior_energy(sol.a, d, 10.0), rel=1e-6)
    assert variational_scattering_energy(RadialPotential.zero(3), R_tilde=5.0) == pytest.approx(0, abs=1e-9)


def test_variational_energy_mesh_convergence():
    v = barrier()
    e1 = variational_scattering_energy(v, R_tilde=10.0, mesh=100)
    e2 = variational_scattering_energy(v, R_tilde=10.0, mesh=200)
    assert abs(e2 / e1 - 1) < 1e-6


def test_delta_parameter_examples():
    p = delta_parameter(math.exp(-math.e), 1.0)
    # |log(x/|log x|)| = e + 1 at x = e^{-e}
    assert p.delta == pytest.approx(1 / (math.e + 1), rel=1e-14)
    assert p.ell_delta / p.R_tilde == pytest.approx(math.exp(EULER_GAMMA) / 2, rel=1e-14)
    deltas = [delta_parameter(10.0 ** -j, 1.0).delta for j in range(2, 12)]
    assert all(x > y for x, y in zip(deltas, deltas[1:]))
    with pytest.raises(DomainError):
        delta_parameter(1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 30.0), st.floats(0.2, 3.0))
def test_barrier_length_property(V0, R):
    a = solve_scattering(barrier(V0, R)).a
    assert 0 < a < R
    kappa = math.sqrt(V0 / 2)
    assert a == pytest.approx(R - math.tanh(kappa * R) / kappa, rel=1e-8)


def test_json_round_trip_and_validation():
    v = RadialPotential.steps([0.0, 0.5, 1.0], [3.0, 1.0], 3)
    w = potential_from_json(v.to_json())
    assert solve_scattering(w).a == pytest.approx(solve_scattering(v).a, rel=1e-14)
    with pytest.raises(DomainError):
        potential_from_json({"kind": "square_barrier", "V0": 1.0})
    with pytest.raises(DomainError):
        RadialPotential.square_barrier(-1.0, 1.0, 3)


def test_constant_profile_helpers():
    c = FourierProfile.constant(3, 2.5)
    assert float(c(np.array(7.0))) == 2.5
    assert FourierProfile.zero(2).is_zero
