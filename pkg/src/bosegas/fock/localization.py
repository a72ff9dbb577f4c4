"""Localization of a state in the number of low excitations.

With window functions θ_M(s) = c_M θ(s/M), Σ_s θ_M(s)² = 1, a state is split
into pieces Ψ^m = θ_M(n₊^L - m)Ψ.  Writing H = Σ_{|k|<=2} H^(k) with
H^(k) raising n₊^L by k, the localized energies obey

    Σ_m ⟨Ψ^m, HΨ^m⟩ - ⟨Ψ, HΨ⟩ = Σ_k δ_k ⟨H^(k)⟩,
    δ_k = Σ_m (θ_M(m)θ_M(m + k) - θ_M(m)²).
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import DomainError


def trapezoid(s):
    """Lipschitz profile: 1 for |s| <= 1/8, 0 for |s| >= 1/4, linear between.

    Among admissible profiles it keeps M²|δ_k| closest to its large-M limit
    at small M, because the ramp spreads the variation evenly.
    """
    return np.clip((0.25 - np.abs(np.asarray(s, dtype=float))) * 8.0, 0.0, 1.0)


def quintic_plateau(s):
    """C² profile: 1 for |s| <= 1/8, 0 for |s| >= 1/4, quintic smoothstep between."""
    x = np.clip((np.abs(np.asarray(s, dtype=float)) - 0.125) * 8.0, 0.0, 1.0)
    return 1.0 - x ** 3 * (10 - 15 * x + 6 * x * x)


def check_profile(theta, samples=4001):
    """Reject profiles that leave [0, 1], miss the plateau or the support, or jump."""
    s = np.linspace(-0.5, 0.5, samples)
    t = np.asarray(theta(s), dtype=float)
    if np.any(t < -1e-15) or np.any(t > 1 + 1e-15):
        raise DomainError("θ must take values in [0, 1]")
    if np.any(np.abs(t[np.abs(s) < 0.125] - 1) > 1e-15):
        raise DomainError("θ must equal 1 on |s| < 1/8")
    if np.any(np.abs(t[np.abs(s) > 0.25]) > 1e-15):
        raise DomainError("θ must vanish for |s| > 1/4")
    slope = np.max(np.abs(np.diff(t))) / (s[1] - s[0])
    if slope > 0.05 * samples:
        raise DomainError("θ does not look Lipschitz (steep jump detected)")
    return float(slope)


def window_profile(theta, M):
    """Integers s in the support and θ_M(s), normalized so Σθ_M² = 1."""
    if not M > 0:
        raise DomainError("the window scale must be positive")
    half = int(math.ceil(M / 4)) + 1
    s = np.arange(-half, half + 1)
    t = np.asarray(theta(s / M), dtype=float)
    c = 1.0 / math.sqrt(math.fsum((t * t).tolist()))
    return s, c * t


def window_deltas(theta, M, ks=(1, 2)):
    s, t = window_profile(theta, M)
    lookup = dict(zip(s.tolist(), t.tolist()))
    out = {}
    for k in ks:
        out[k] = math.fsum(tm * lookup.get(m + k, 0.0) - tm * tm for m, tm in lookup.items())
    return out


def split_by_change(H, counts):
    """Parts H^(k) of a matrix, where k = counts[row] - counts[col]."""
    A = sp.coo_matrix(H.matrix if hasattr(H, "matrix") else H)
    diff = counts[A.row] - counts[A.col]
    parts = {}
    for k in np.unique(diff).tolist():
        sel = diff == k
        parts[int(k)] = sp.csr_matrix((A.data[sel], (A.row[sel], A.col[sel])), shape=A.shape)
    return parts


@dataclass
class LocalizationResult:
    M: float
    norm_sum: float
    energy: float
    localized_energy: float
    deltas: dict
    scaled_deltas: dict
    change_expectations: dict
    d1: float
    d2: float
    identity_residual: float
    lower_bound_constant: float
    lower_bound_holds: bool
    windows: dict = field(default_factory=dict, repr=False)


def localize_large_matrices(psi, H, n_low, M, theta=trapezoid, keep_windows=False):
    """Split ``psi`` in windows of n₊^L and compare localized and total energies.

    ``n_low`` is the (diagonal) low-excitation number operator or its
    diagonal.  ``d1`` is ⟨H^(1) + H^(-1)⟩; ``d2`` is 2⟨H^(2) + H^(-2)⟩, the
    normalization of the ordered-pair projector form.  The lower bound
    ⟨H⟩ >= Σ_m⟨Ψ^m, HΨ^m⟩ - (C/M²)(|d1| + |d2|) is checked with the
    measured C = M² max|δ_k|.
    """
    check_profile(theta)
    psi = np.asarray(psi, dtype=float)
    psi = psi / np.linalg.norm(psi)
    diag = n_low.matrix.diagonal() if hasattr(n_low, "matrix") else np.asarray(n_low)
    counts = np.rint(diag).astype(np.int64)
    if np.any(np.abs(diag - counts) > 1e-12):
        raise DomainError("the low-excitation number must be integer valued")
    A = H.matrix if hasattr(H, "matrix") else sp.csr_matrix(H)
    parts = split_by_change(A, counts)
    if any(abs(k) > 2 for k in parts):
        raise DomainError("H changes n₊^L by more than 2")
    s, t = window_profile(theta, M)
    ms = range(int(counts.min()) - int(s.max()), int(counts.max()) - int(s.min()) + 1)
    norms, energies, windows = [], [], {}
    for m in ms:
        shift = counts - m - s[0]
        inside = (shift >= 0) & (shift < t.size)
        factor = np.where(inside, t[np.clip(shift, 0, t.size - 1)], 0.0)
        piece = factor * psi
        nrm = float(piece @ piece)
        if nrm == 0:
            continue
        norms.append(nrm)
        energies.append(float(piece @ (A @ piece)))
        if keep_windows:
            windows[m] = piece
    energy = float(psi @ (A @ psi))
    localized = math.fsum(energies)
    deltas = window_deltas(theta, M)
    expect = {k: float(psi @ (P @ psi)) for k, P in parts.items()}
    d1 = expect.get(1, 0.0) + expect.get(-1, 0.0)
    d2_exact = expect.get(2, 0.0) + expect.get(-2, 0.0)
    predicted = deltas[1] * d1 + deltas[2] * d2_exact
    residual = localized - energy - predicted
    C = M * M * max(abs(deltas[1]), abs(deltas[2]))
    d2 = 2 * d2_exact
    bound = localized - C / M ** 2 * (abs(d1) + abs(d2))
    scale = max(1.0, abs(energy))
    return LocalizationResult(
        M=M, norm_sum=math.fsum(norms), energy=energy, localized_energy=localized,
        deltas=deltas, scaled_deltas={k: v * M * M for k, v in deltas.items()},
        change_expectations=expect, d1=d1, d2=d2, identity_residual=residual,
        lower_bound_constant=C, lower_bound_holds=energy >= bound - 1e-12 * scale,
        windows=windows)
