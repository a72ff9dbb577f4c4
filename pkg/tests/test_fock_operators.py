import math

import numpy as np
import pytest
import scipy.sparse as sp

from bosegas.errors import DomainError
from bosegas.fock.basis import build_basis
from bosegas.fock.modes import ModeSet
from bosegas.fock.operators import (
    OBSERVABLES, TwoBodyTable, assemble_hamiltonian, assemble_observable,
    condensate_exchange_term, kinetic_operator, low_change_operators, low_change_split,
    number_operator, renormalized_terms, splitting_identity_residual, total_momentum_operators)
from bosegas.scattering import FourierProfile, RadialPotential, pair_transforms, solve_scattering


def transforms(V0=2.0, d=3):
    v = RadialPotential.square_barrier(V0, 1.0, d)
    sol = solve_scattering(v) if d == 3 else solve_scattering(v, R_tilde=20.0)
    return pair_transforms(sol)


CONFIGS = [(3, 4.0, 1, 2, None), (3, 5.0, 1, 4, (0, 0, 0)), (3, 5.0, 2, 4, (0, 0, 0)),
           (2, 5.0, 4, 5, (0, 0))]


@pytest.fixture(scope="module", params=CONFIGS, ids=lambda c: f"d{c[0]}-m{c[2]}-N{c[3]}")
def setup(request):
    d, ell, m2, N, sector = request.param
    basis = build_basis(ModeSet.shells(d, ell, m2), N, sector)
    table = TwoBodyTable(basis)
    tr = transforms(d=d)
    return basis, table, tr, renormalized_terms(table, tr)


def test_free_hamiltonian_is_kinetic_diagonal():
    basis = build_basis(ModeSet.shells(3, 5.0, 1), 3)
    H = assemble_hamiltonian(basis, FourierProfile.zero(3))
    diag = basis.states @ basis.modes.kinetic
    assert abs(H.matrix - sp.diags(diag)).max() == 0


def test_single_mode_two_particles():
    v = RadialPotential.square_barrier(2.0, 1.0, 3)
    v_hat = FourierProfile.from_radial_function(v, 3, v.breakpoints, True, "v")
    ell = 4.0
    H = assemble_hamiltonian(build_basis(ModeSet(3, ell, [[0, 0, 0]]), 2), v_hat)
    assert H.toarray()[0, 0] == pytest.approx(float(v_hat(np.array(0.0))) / ell ** 3, rel=1e-15)


def test_hamiltonian_is_hermitian_and_conserves_momentum(setup):
    basis, table, tr, _ = setup
    H = assemble_hamiltonian(basis, tr.v, table)
    assert H.hermiticity_defect() < 1e-14
    for P in total_momentum_operators(basis):
        assert abs(H.matrix @ P.matrix - P.matrix @ H.matrix).max() < 1e-10 * max(1, H.max_abs())


def test_number_completeness(setup):
    basis, *_ = setup
    n0 = assemble_observable("n0", basis).matrix
    npl = assemble_observable("n_plus", basis).matrix
    assert abs(n0 + npl - basis.N * sp.identity(basis.dimension)).max() == 0


def test_condensate_has_no_excitations(setup):
    basis, *_ = setup
    psi = np.zeros(basis.dimension)
    psi[basis.condensate_index()] = 1.0
    assert assemble_observable("n_plus", basis).expect(psi) == 0


def test_splitting_identity(setup):
    _, table, tr, terms = setup
    res = splitting_identity_residual(table, tr, terms)
    assert res["relative"] < 1e-12


def test_splitting_identity_for_zero_potential():
    basis = build_basis(ModeSet.shells(3, 5.0, 1), 3)
    sol = solve_scattering(RadialPotential.zero(3))
    res = splitting_identity_residual(TwoBodyTable(basis), pair_transforms(sol))
    assert res["absolute"] == 0


def test_q1_vanishes_and_q4_is_psd(setup):
    _, _, _, terms = setup
    assert terms[1].matrix.count_nonzero() == 0
    q4 = terms[4].toarray()
    w = np.linalg.eigvalsh(q4)
    assert w[0] >= -1e-10 * max(1.0, np.abs(q4).max())


def test_condensate_exchange_identity(setup):
    basis, table, tr, _ = setup
    ex = condensate_exchange_term(table, tr)
    n0 = basis.states[:, 0].astype(float)
    w0 = float(tr.at(np.array([0.0]))["g_plus_g_omega"][0])
    expected = w0 * n0 * (basis.N - n0)
    expected /= basis.modes.ell ** basis.modes.d
    np.testing.assert_allclose(ex.matrix.diagonal(), expected, rtol=1e-12, atol=1e-15)
    off = ex.matrix - sp.diags(ex.matrix.diagonal())
    assert (abs(off).max() if off.nnz else 0.0) == 0


def test_low_plus_high_dominate_excitations():
    basis = build_basis(ModeSet.shells(3, 6.0, 3), 4, (0, 0, 0))
    for K_L, K_H in [(2 * math.pi * 1.2, 2 * math.pi * 1.5), (2 * math.pi * 0.5, 2 * math.pi * 1.8)]:
        nl = assemble_observable("n_plus_low", basis, K_H=K_H).matrix.diagonal()
        nh = assemble_observable("n_plus_high", basis, K_L=K_L).matrix.diagonal()
        npl = assemble_observable("n_plus", basis).matrix.diagonal()
        assert np.min(nl + nh - npl) >= -1e-12


def test_low_change_parts_recombine(setup):
    basis, table, tr, _ = setup
    K_H = 2 * math.pi * 1.2
    parts = low_change_split(table, tr.v, K_H)
    H = assemble_hamiltonian(basis, tr.v, table)
    total = sum(parts.values(), sp.csr_matrix(H.matrix.shape))
    assert abs(total - H.matrix).max() < 1e-14
    d1, d2 = low_change_operators(table, tr.v, K_H)
    assert abs(d2.matrix - 2 * (parts[2] + parts[-2])).max() == 0
    assert d1.hermiticity_defect() < 1e-14


def test_soft_pairs_operator_is_hermitian_and_momentum_conserving():
    basis = build_basis(ModeSet.shells(3, 6.0, 3), 4, (0, 0, 0))
    tr = transforms()
    op = assemble_observable("soft_pairs", basis, transforms=tr, K_L=2 * math.pi * 1.1,
                             K_H=2 * math.pi * 1.3)
    assert op.hermiticity_defect() < 1e-14
    for P in total_momentum_operators(basis):
        assert abs(op.matrix @ P.matrix - P.matrix @ op.matrix).max() < 1e-12


def test_observable_guards():
    basis = build_basis(ModeSet.shells(3, 5.0, 1), 2)
    with pytest.raises(DomainError):
        assemble_observable("soft_pairs", basis, transforms=transforms(), K_L=5.0, K_H=4.0)
    with pytest.raises(DomainError):
        assemble_observable("n_plus_low", basis)
    with pytest.raises(DomainError):
        assemble_observable("spin", basis)
    assert "hamiltonian" in OBSERVABLES


def test_kinetic_operator_and_number_operator():
    basis = build_basis(ModeSet.shells(2, 3.0, 1), 2)
    T = kinetic_operator(basis).matrix.diagonal()
    np.testing.assert_allclose(T, basis.states @ basis.modes.kinetic)
    n = number_operator(basis, np.ones(basis.modes.size, bool), "n").matrix.diagonal()
    assert np.all(n == 2)


def test_truncation_statistics_reported():
    basis = build_basis(ModeSet.shells(3, 5.0, 1), 4, (0, 0, 0))
    H = assemble_hamiltonian(basis, transforms().v)
    stats = H.meta["truncation"]
    assert stats["kept_processes"] > 0 and stats["dropped_processes"] > 0
