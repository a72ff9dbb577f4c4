"""Coherent states of the condensate mode and the c-number energy scan."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from ..errors import DomainError


def coherent_state(z, n_max):
    """Coefficients e^{-|z|²/2} zⁿ/√(n!) for n = 0..n_max (a₀|z⟩ = z|z⟩)."""
    n = np.arange(n_max + 1)
    r = abs(z)
    if r == 0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    mag = np.exp(-0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(z))


def radial_symbol_diagonal(symbol, n_max, order=200):
    """Diagonal of (1/π)∫ symbol(|z|²)|z⟩⟨z| d²z in the number basis.

    With u = |z|² the entries are ∫_0^∞ symbol(u) e^{-u} uⁿ/n! du, computed
    by generalized Gauss-Laguerre rules.
    """
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        x, w = roots_genlaguerre(order, n)
        out[n] = float(np.dot(w, symbol(x))) / math.factorial(n)
    return out


@dataclass(frozen=True)
class CNumberScan:
    rho_z: np.ndarray
    values: np.ndarray
    argmin_rho_z: float
    vertex_rho_z: float
    minimum: float
    curvature: float
    eps_plus: float
    band: tuple

    def rows(self):
        return [{"rho_z": float(r), "value": float(v)} for r, v in zip(self.rho_z, self.values)]


def vacuum_energy(rho_z, rho, volume, g0, gw0):
    """½ρ_z²|Λ|(ĝ(0) + ĝω(0)) - ρρ_z|Λ|ĝ(0) + ρ²|Λ|ĝ(0)."""
    rho_z = np.asarray(rho_z, dtype=float)
    return 0.5 * rho_z ** 2 * volume * (g0 + gw0) - rho * rho_z * volume * g0 + rho ** 2 * volume * g0


def eps_plus(K_ell, K_L, lambda_lhy):
    """Threshold max{K_ℓ²/K_L, √λ} for |ρ_z - ρ| relative to ρ."""
    return max(K_ell ** 2 / K_L, math.sqrt(lambda_lhy))


def cnumber_energy_scan(z_abs, volume, g0, gw0, rho, K_ell=None, K_L=None, lambda_lhy=None):
    """Excitation-vacuum value of the z-dependent Hamiltonian on a grid of |z|.

    ρ_z = |z|²/|Λ| must cover [0, 2ρ].  The exact minimizer of the quadratic
    is ρĝ(0)/(ĝ(0) + ĝω(0)) with curvature |Λ|(ĝ(0) + ĝω(0)).
    """
    z_abs = np.asarray(z_abs, dtype=float)
    if rho <= 0 or volume <= 0:
        raise DomainError("need ρ > 0 and |Λ| > 0")
    if not g0 + gw0 > 0:
        raise DomainError("need ĝ(0) + ĝω(0) > 0")
    rho_z = z_abs ** 2 / volume
    if rho_z.min() > 0 or rho_z.max() < 2 * rho:
        raise DomainError("the |z| grid must cover ρ_z ∈ [0, 2ρ]")
    values = vacuum_energy(rho_z, rho, volume, g0, gw0)
    i = int(np.argmin(values))
    vertex = rho * g0 / (g0 + gw0)
    eps = band = None
    if K_ell is not None and K_L is not None and lambda_lhy is not None:
        eps = eps_plus(K_ell, K_L, lambda_lhy)
        band = (rho * (1 - eps), rho * (1 + eps))
    return CNumberScan(rho_z, values, float(rho_z[i]), vertex,
                       float(vacuum_energy(vertex, rho, volume, g0, gw0)),
                       volume * (g0 + gw0), eps, band)
