"""Diagonalization of quadratic boson pair Hamiltonians.

A single pair of modes a₊, a₋ with

    H = A(a₊†a₊ + a₋†a₋) + B(a₊†a₋† + a₊a₋) + κ(a₊† + a₋) + κ̄(a₊ + a₋†)

is diagonalized by b± = (a± + α a∓† + const)/√(1 - α²).  With canonical
commutators H = s(b₊†b₊ + b₋†b₋) - αB - 2|κ|²/(A + B), s = √(A² - B²).
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

B_ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True)
class ModeCoefficients:
    A: float
    B: float
    kappa: complex = 0.0

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if not abs(self.B) < self.A:
            raise DomainError(f"need |B| < A for a bounded-below pair Hamiltonian (A={self.A}, B={self.B})")


@dataclass(frozen=True)
class ModeDiagResult:
    """Diagonalization data of one mode pair.

    ``D`` is ½(A + s); ``excitation_energy`` is s = √(A² - B²), the actual
    quantum of b†b, related by s = 2D - A.
    """
    D: float
    alpha: float
    c0: complex
    ground_shift: float
    excitation_energy: float


def _root(A, B):
    # √(A² - B²) without cancellation when |B| is close to A
    return math.sqrt((A - B) * (A + B))


def diagonalize_mode(c):
    """Bogoliubov coefficients of a mode pair (see module docstring)."""
    if not isinstance(c, ModeCoefficients):
        c = ModeCoefficients(*c)
    A, B, kappa = float(c.A), float(c.B), complex(c.kappa)
    s = _root(A, B)
    # α = (A - s)/B = B/(A + s); the second form has no 0/0 at B = 0
    alpha = 0.0 if abs(B) < B_ZERO_THRESHOLD * A else B / (A + s)
    c0 = 2 * kappa.conjugate() / (A + B + s)
    shift = -alpha * B - 2 * abs(kappa) ** 2 / (A + B)
    return ModeDiagResult(0.5 * (A + s), alpha, c0, shift, s)


# --- truncated Fock-space checks --------------------------------------------

def _ladder(n_max):
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


def pair_hamiltonian_matrix(A, B, n_max, kappa=0.0, sector="full"):
    """Matrix of the pair Hamiltonian with occupations 0..n_max per mode.

    ``sector="symmetric"`` (κ = 0 only) keeps the states |n, n⟩, where the
    Hamiltonian is tridiagonal with diagonal 2An and off-diagonal B(n + 1).
    """
    if sector == "symmetric":
        if kappa != 0:
            raise DomainError("the symmetric sector is invariant only for κ = 0")
        n = np.arange(n_max + 1, dtype=float)
        return np.diag(2 * A * n) + np.diag(B * n[1:], 1) + np.diag(B * n[1:], -1)
    if sector != "full":
        raise DomainError(f"unknown sector {sector!r}")
    a = _ladder(n_max)
    eye = np.eye(n_max + 1)
    ap, am = np.kron(a, eye), np.kron(eye, a)
    num = ap.T @ ap + am.T @ am
    pair = ap.T @ am.T
    H = A * num + B * (pair + pair.T)
    if kappa != 0:
        lin = kappa * (ap.T + am)
        H = H + lin + lin.conj().T
    return H


def truncated_ground_energy(A, B, n_max, kappa=0.0):
    """Lowest eigenvalue of the truncated pair Hamiltonian."""
    if kappa == 0:
        H = pair_hamiltonian_matrix(A, B, n_max, sector="symmetric")
    else:
        H = pair_hamiltonian_matrix(A, B, n_max, kappa)
    return float(np.linalg.eigvalsh(H)[0])


def symmetric_spectrum(A, B, n_max, count=4):
    """Lowest ``count`` eigenvalues in the symmetric sector."""
    H = pair_hamiltonian_matrix(A, B, n_max, sector="symmetric")
    return np.linalg.eigvalsh(H)[:count]


def quasiparticle_operators(A, B, n_max, kappa=0.0):
    """Truncated matrices of b₊ and b₋ on the two-mode space."""
    res = diagonalize_mode(ModeCoefficients(A, B, kappa))
    a = _ladder(n_max)
    eye = np.eye(n_max + 1)
    ap, am = np.kron(a, eye), np.kron(eye, a)
    norm = 1 / math.sqrt(1 - res.alpha ** 2)
    ident = np.eye(ap.shape[0])
    bp = norm * (ap + res.alpha * am.T + np.conj(res.c0) * ident)
    bm = norm * (am + res.alpha * ap.T + res.c0 * ident)
    return bp, bm


def commutator_defect(A, B, n_max, low=None):
    """max |[b₊, b₊†] - 1| restricted to states with both occupations <= ``low``."""
    low = n_max // 2 if low is None else low
    bp, _ = quasiparticle_operators(A, B, n_max)
    comm = bp @ bp.conj().T - bp.conj().T @ bp
    occ = np.arange(n_max + 1)
    keep = ((occ[:, None] <= low) & (occ[None, :] <= low)).ravel()
    block = comm[np.ix_(keep, keep)]
    return float(np.max(np.abs(block - np.eye(block.shape[0]))))


def vacuum_residual(A, B, n_max, kappa=0.0):
    """‖b₊Ψ₀‖ for the truncated ground state Ψ₀; tends to 0 with n_max."""
    H = pair_hamiltonian_matrix(A, B, n_max, kappa)
    w, V = np.linalg.eigh(H)
    bp, _ = quasiparticle_operators(A, B, n_max, kappa)
    return float(np.linalg.norm(bp @ V[:, 0]))


# --- dispersion ---------------------------------------------------------------

@dataclass(frozen=True)
class DispersionPoint:
    k: float
    D_k: float
    alpha_k: float
    pair_shift: float
    A_k: float
    B_k: float


def _dispersion_arrays(k, coupling):
    k = np.asarray(k, dtype=float)
    c = np.asarray(coupling, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavenumbers must be non-negative")
    if np.any(2 * c < -k ** 2):
        raise DomainError("ρ_z ĝ(k) < -k²/2: the dispersion is complex, the potential "
                          "regime is invalid")
    A = k ** 2 + c
    Dk = k * np.sqrt(k ** 2 + 2 * c)
    denom = A + Dk
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = np.where(c == 0, 0.0, c / np.where(denom == 0, 1.0, denom))
    shift = -alpha * c
    return A, c, Dk, alpha, shift


def dispersion(k, rho_z, g_hat):
    """Bogoliubov dispersion √(k⁴ + 2k²ρ_zĝ(k)) with its pairing coefficient.

    α_k = (A_k - D_k)/B_k with A_k = k² + ρ_zĝ(k), B_k = ρ_zĝ(k), evaluated
    as B_k/(A_k + D_k); pair_shift = D_k - A_k = -α_k B_k.
    """
    if rho_z < 0:
        raise DomainError("density must be non-negative")
    kk = float(k)
    A, B, Dk, alpha, shift = _dispersion_arrays(kk, rho_z * float(g_hat(np.array(kk))))
    return DispersionPoint(kk, float(Dk), float(alpha), float(shift), float(A), float(B))


def dispersion_table(ks, rho_z, g_hat):
    """Columns k, D_k, alpha_k, pair_shift for an array of wavenumbers."""
    if rho_z < 0:
        raise DomainError("density must be non-negative")
    ks = np.asarray(ks, dtype=float)
    A, B, Dk, alpha, shift = _dispersion_arrays(ks, rho_z * g_hat(ks))
    return {"k": ks, "D_k": Dk, "alpha_k": alpha, "pair_shift": shift}


def high_k_bounds_check(k, rho_z, rho, g_hat, K_H, ell):
    """Measured constants in |α_k| <= C|ρ_zĝ(k)|/k² and |D_k - k²| <= C ℓ²ρĝ(0)k²/K_H².

    ``k`` is an array of sample wavenumbers, all at least K_H/ℓ.  Returns the
    two ratio arrays and their maxima, which must be finite.
    """
    if not abs(rho_z - rho) <= 0.5 * rho:
        raise DomainError("need |ρ_z - ρ| <= ρ/2")
    k = np.asarray(k, dtype=float)
    if np.any(k < K_H / ell * (1 - 1e-12)):
        raise DomainError("sample wavenumbers must satisfy |k| >= K_H/ℓ")
    c = rho_z * g_hat(k)
    A, B, Dk, alpha, _ = _dispersion_arrays(k, c)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio_alpha = np.where(c == 0, 0.0, np.abs(alpha) * k ** 2 / np.abs(np.where(c == 0, 1, c)))
    g0 = g_hat.value_at_zero
    if g0 == 0:
        ratio_D = np.zeros_like(k)
    else:
        ratio_D = np.abs(Dk - k ** 2) * K_H ** 2 / (ell ** 2 * rho * g0 * k ** 2)
    const_alpha, const_D = float(np.max(ratio_alpha)), float(np.max(ratio_D))
    return {"k": k, "ratio_alpha": ratio_alpha, "ratio_D": ratio_D,
            "const_alpha": const_alpha, "const_D": const_D,
            "bounded": bool(np.isfinite(const_alpha) and np.isfinite(const_D))}
