"""Shell counts of the integer lattice and smooth radial cutoffs.

Sums of radial functions over ℤ^d are written as Σ_m r_d(m) F(√m), where
r_d(m) counts lattice points with |n|² = m.  Counting shells on a window
[m_lo, m_hi] costs far less than enumerating the points themselves.
"""
import math

import numpy as np

from .errors import DomainError, SizingError

# work units (array elements touched) allowed per shell count
DEFAULT_BUDGET = 4e8


def _isqrt_ceil(m):
    if m <= 0:
        return 0
    r = math.isqrt(m)
    return r if r * r == m else r + 1


def _r2_window(m_lo, m_hi, chunk=2048):
    """r_2(m) for m_lo <= m <= m_hi from quarter-plane points (x >= 0, y >= 0)."""
    counts = np.zeros(m_hi - m_lo + 1, dtype=np.int64)
    x_max = math.isqrt(m_hi)
    for x0 in range(0, x_max + 1, chunk):
        xs = np.arange(x0, min(x0 + chunk, x_max + 1), dtype=np.int64)
        x2 = xs * xs
        y_lo = np.array([_isqrt_ceil(m_lo - int(v)) for v in x2], dtype=np.int64)
        y_hi = np.array([math.isqrt(m_hi - int(v)) for v in x2], dtype=np.int64)
        n = np.maximum(y_hi - y_lo + 1, 0)
        if n.sum() == 0:
            continue
        xr = np.repeat(xs, n)
        start = np.repeat(y_lo - np.concatenate(([0], np.cumsum(n)[:-1])), n)
        ys = np.arange(n.sum(), dtype=np.int64) + start
        m = xr * xr + ys * ys
        w = np.where(xr > 0, 2, 1) * np.where(ys > 0, 2, 1)
        counts += np.bincount(m - m_lo, weights=w, minlength=counts.size).astype(np.int64)
    return counts


def shell_counts(d, m_hi, m_lo=0, budget=DEFAULT_BUDGET):
    """Array r_d(m) for m = m_lo..m_hi (d = 2 or 3).

    Raises SizingError when the estimated work exceeds ``budget``.
    """
    m_lo, m_hi = int(m_lo), int(m_hi)
    if m_lo < 0 or m_hi < m_lo:
        raise DomainError(f"invalid shell window [{m_lo}, {m_hi}]")
    if d == 2:
        work = (math.pi / 4) * (m_hi - m_lo) + math.isqrt(m_hi)
        if work > budget:
            raise SizingError(f"shell window needs ~{work:.2e} work units", size=work)
        return _r2_window(m_lo, m_hi)
    if d != 3:
        raise DomainError(f"dimension must be 2 or 3, got {d}")
    z_max = math.isqrt(m_hi)
    work = (math.pi / 4) * m_hi + (z_max + 1) * (m_hi - m_lo + 1)
    if work > budget:
        raise SizingError(f"shell window needs ~{work:.2e} work units", size=work)
    r2 = _r2_window(0, m_hi)
    out = np.zeros(m_hi - m_lo + 1, dtype=np.int64)
    for z in range(z_max + 1):
        z2 = z * z
        lo = max(m_lo, z2)
        if lo > m_hi:
            break
        w = 1 if z == 0 else 2
        out[lo - m_lo:] += w * r2[lo - z2:m_hi - z2 + 1]
    return out


def smooth_step(x):
    """C^∞ function equal to 1 for x <= 1 and 0 for x >= 2."""
    x = np.asarray(x, dtype=float)
    u = np.clip(2.0 - x, 0.0, 1.0)
    v = np.clip(x - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        fu = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        fv = np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)
    return fu / (fu + fv)


def radial_lattice_sum(F, d, spacing, m_hi, m_lo=0, budget=DEFAULT_BUDGET):
    """Σ F(spacing·|n|) over n ∈ ℤ^d with m_lo <= |n|² <= m_hi (compensated sum).

    ``F`` is vectorized over wavenumbers and is evaluated once per shell.
    """
    counts = shell_counts(d, m_hi, m_lo, budget)
    m = np.flatnonzero(counts) + m_lo
    if m.size == 0:
        return 0.0, 0
    values = counts[m - m_lo] * F(spacing * np.sqrt(m.astype(float)))
    return math.fsum(values.tolist()), int(counts.sum())
