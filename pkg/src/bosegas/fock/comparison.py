"""Exact diagonalization compared with condensate and Bogoliubov energies."""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..bogoliubov import ModeCoefficients, diagonalize_mode, dispersion
from ..errors import DomainError
from .basis import DEFAULT_CAP, build_basis
from .eigen import ground_state
from .operators import TwoBodyTable, assemble_hamiltonian, number_operator


def _pair_representatives(modes):
    """One index per pair {k, -k} of nonzero modes."""
    neg = modes.negation
    return [i for i in range(1, modes.size) if i < neg[i]]


def perturbative_energy(modes, N, v_hat):
    """Condensate energy plus second-order pair excitation, exact to O(v̂³).

    Each pair {k, -k} couples to the condensate with matrix element
    v̂(k)√(N(N-1))/|Λ| at kinetic cost 2k².
    """
    vol = modes.ell ** modes.d
    e_cond = N * (N - 1) * float(v_hat(np.array(0.0))) / (2 * vol)
    ks = modes.norms
    shift = 0.0
    if N >= 2:
        for i in _pair_representatives(modes):
            vk = float(v_hat(np.array(ks[i])))
            shift -= vk * vk * N * (N - 1) / (vol * vol * 2 * ks[i] ** 2)
    return e_cond, e_cond + shift


@dataclass
class EDReport:
    dimension: int
    E0: float
    E_condensate: float
    E_perturbative: float
    E_bogoliubov: float
    E_meanfield: float
    E_meanfield_plus_lhy: float
    n_plus: float
    n_plus_high: float
    pair_modes: list
    ordering_holds: bool
    residual: float
    truncation: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def bogoliubov_vs_ed(modes, N, v_hat, scattering=None, K_L=None, cap=DEFAULT_CAP, tol=1e-10):
    """Ground state of the zero-momentum sector against simple predictions.

    E_bogoliubov adds the pair shifts -α_kB_k of the bare interaction at the
    effective density √(N(N-1))/|Λ| to the condensate energy
    N(N-1)v̂(0)/(2|Λ|).  When a scattering solution is given, the mean-field
    and two-term energies use ĝ(0), with the N(N-1)/N² finite-N factor.
    Only E0 <= E_condensate is asserted.
    """
    if N < 1:
        raise DomainError("need at least one particle")
    vol = modes.ell ** modes.d
    basis = build_basis(modes, N, (0,) * modes.d, cap)
    table = TwoBodyTable(basis)
    H = assemble_hamiltonian(basis, v_hat, table)
    gs = ground_state(H, tol)
    psi = gs.vector
    e_cond, e_pt = perturbative_energy(modes, N, v_hat)
    rho_eff = math.sqrt(N * (N - 1)) / vol
    ks = modes.norms
    pairs, e_bog = [], e_cond
    for i in _pair_representatives(modes):
        vk = float(v_hat(np.array(ks[i])))
        A, B = ks[i] ** 2 + rho_eff * vk, rho_eff * vk
        res = diagonalize_mode(ModeCoefficients(A, B))
        point = dispersion(ks[i], rho_eff, v_hat)
        e_bog += res.ground_shift
        pairs.append({"k": float(ks[i]), "D_k": point.D_k, "alpha_k": res.alpha,
                      "pair_shift": res.ground_shift})
    n_plus = number_operator(basis, np.arange(modes.size) > 0, "n_plus").expect(psi)
    n_high = (number_operator(basis, modes.high_mask(K_L), "n_plus_high").expect(psi)
              if K_L is not None else float("nan"))
    e_mf = e_two = float("nan")
    if scattering is not None:
        from ..lhy import BoxSpec, lhy_energy
        rho = N / vol
        box = BoxSpec.from_length(modes.d, modes.ell, rho)
        pred = lhy_energy(rho, box, scattering)
        factor = (N - 1) / N
        e_mf, e_two = pred.mean_field * factor, pred.two_term * factor
    scale = max(1.0, abs(e_cond))
    return EDReport(basis.dimension, gs.energy, e_cond, e_pt, e_bog, e_mf, e_two, n_plus,
                    n_high, pairs, gs.energy <= e_cond + 1e-12 * scale, gs.residual,
                    H.meta.get("truncation", {}))


def depletion_sweep(modes, N, potentials, v_hat_of):
    """⟨n₊⟩/N in the ground state for each potential of a coupling family."""
    basis = build_basis(modes, N, (0,) * modes.d)
    table = TwoBodyTable(basis)
    nplus = number_operator(basis, np.arange(modes.size) > 0, "n_plus")
    out = []
    for v in potentials:
        gs = ground_state(assemble_hamiltonian(basis, v_hat_of(v), table))
        out.append(nplus.expect(gs.vector) / N)
    return out
