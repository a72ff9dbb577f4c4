"""Sparse matrices of one- and two-body operators on a Fock basis.

A two-body operator is stored through coefficients on unordered quads
{α, β} ← {γ, δ} of modes with k_α + k_β = k_γ + k_δ:

    O = Σ_{α<=β, γ<=δ} W(α, β, γ, δ) a†_α a†_β a_γ a_δ.

The action of every monomial on the basis is tabulated once per basis
(``TwoBodyTable``); any operator is then a weighted sum of these entries.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import DomainError


@dataclass
class SparseOperator:
    """A CSR matrix with a hermiticity flag and free-form metadata."""
    matrix: sp.csr_matrix
    hermitian: bool = True
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)
        if self.hermitian:
            dev = self.hermiticity_defect()
            scale = max(1.0, self.max_abs())
            if dev > 1e-12 * scale:
                raise DomainError(f"operator {self.name!r} flagged hermitian but deviates by {dev:.2e}")

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def max_abs(self):
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0

    def hermiticity_defect(self):
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def expect(self, psi):
        psi = np.asarray(psi)
        return float(np.real(np.vdot(psi, self.matrix @ psi)))

    def toarray(self):
        return self.matrix.toarray()

    def __add__(self, other):
        return SparseOperator(self.matrix + other.matrix, self.hermitian and other.hermitian,
                              f"{self.name}+{other.name}")


def _pairs(M):
    a, b = np.triu_indices(M)
    return a, b


class TwoBodyTable:
    """Action of a†_α a†_β a_γ a_δ on every basis state for all quads.

    Also counts the two-body processes that leave the mode set, which any
    truncated operator silently omits.
    """

    def __init__(self, basis):
        self.basis = basis
        modes = basis.modes
        M = modes.size
        idx = modes.indices
        pa, pb = _pairs(M)
        totals = idx[pa] + idx[pb]
        _, group = np.unique(totals, axis=0, return_inverse=True)
        group = group.ravel()
        order = np.argsort(group, kind="stable")
        bounds = np.flatnonzero(np.diff(group[order])) + 1
        members = np.split(order, bounds)
        quad_out, quad_in = [], []
        for mem in members:
            quad_out.append(np.repeat(mem, mem.size))
            quad_in.append(np.tile(mem, mem.size))
        quad_out = np.concatenate(quad_out)
        quad_in = np.concatenate(quad_in)
        self.a, self.b = pa[quad_out], pb[quad_out]
        self.c, self.e = pa[quad_in], pb[quad_in]
        self.n_quads = quad_out.size
        self._tabulate(members, pa, pb)
        self.truncation = self._truncation_stats()

    def _tabulate(self, members, pa, pb):
        basis = self.basis
        occ = basis.states.astype(np.int64)
        keys = basis.keys
        w = basis.weights
        # quads are grouped by in-pair inside each momentum group
        quad_id = np.arange(self.n_quads).reshape(-1)
        rows, cols, amps, quads = [], [], [], []
        start = 0
        for mem in members:
            k = mem.size
            block = quad_id[start:start + k * k].reshape(k, k)  # [out, in]
            start += k * k
            for j, pin in enumerate(mem):
                c, e = pa[pin], pb[pin]
                nc, ne = occ[:, c], occ[:, e]
                if c == e:
                    a1 = nc * (nc - 1)
                else:
                    a1 = nc * ne
                src = np.flatnonzero(a1 > 0)
                if src.size == 0:
                    continue
                mid = occ[src].copy()
                mid[:, c] -= 1
                mid[:, e] -= 1
                a1 = a1[src]
                kmid = keys[src] - w[c] - w[e]
                for i, pout in enumerate(mem):
                    a, b = pa[pout], pb[pout]
                    ma, mb = mid[:, a], mid[:, b]
                    a2 = (ma + 1) * (ma + 2) if a == b else (ma + 1) * (mb + 1)
                    tgt = basis.lookup(kmid + w[a] + w[b])
                    if np.any(tgt < 0):
                        raise DomainError("a momentum-conserving move left the basis")
                    rows.append(tgt.astype(np.int32))
                    cols.append(src.astype(np.int32))
                    # product of integers first, one rounding in the square root
                    amps.append(np.sqrt((a1 * a2).astype(np.float64)))
                    quads.append(np.full(src.size, block[i, j], dtype=np.int32))
        if rows:
            self.rows = np.concatenate(rows)
            self.cols = np.concatenate(cols)
            self.amps = np.concatenate(amps)
            self.quads = np.concatenate(quads)
        else:
            self.rows = self.cols = self.quads = np.zeros(0, dtype=np.int32)
            self.amps = np.zeros(0)

    def _truncation_stats(self):
        modes = self.basis.modes
        idx = modes.indices
        M = modes.size
        kept = dropped = 0
        for g in range(M):
            for h in range(M):
                total = idx[g] + idx[h]
                outs = total[None, :] - idx
                present = np.array([modes.index_of(o) >= 0 for o in outs])
                kept += int(present.sum())
                dropped += int((~present).sum())
        return {"kept_processes": kept, "dropped_processes": dropped}

    @property
    def n_entries(self):
        return self.amps.size

    def assemble(self, coeff, name="", hermitian=True):
        """Sparse matrix of Σ W a†a†aa for quad coefficients ``coeff``."""
        coeff = np.asarray(coeff, dtype=float)
        vals = self.amps * coeff[self.quads]
        keep = vals != 0
        D = self.basis.dimension
        mat = sp.coo_matrix((vals[keep], (self.rows[keep], self.cols[keep])), shape=(D, D)).tocsr()
        mat.sum_duplicates()
        return SparseOperator(mat, hermitian, name)

    # --- coefficients --------------------------------------------------------

    def _orderings(self):
        """The ordered assignments (α, β, γ, δ) of each unordered quad with multiplicity."""
        a, b, c, e = self.a, self.b, self.c, self.e
        yield a, b, c, e, np.ones(self.n_quads, bool)
        yield b, a, c, e, a != b
        yield a, b, e, c, c != e
        yield b, a, e, c, (a != b) & (c != e)

    def transfer_norm2(self, alpha, gamma):
        idx = self.basis.modes.indices
        return ((idx[gamma] - idx[alpha]) ** 2).sum(axis=1)

    def projector_term(self, out_i, out_j, fhat, in_i, in_j):
        """Coefficients of Σ_{i≠j} Π_i Π_j f(x_i - x_j) Π_j Π_i.

        Masks select the modes of each projector; ``fhat`` maps integer |n|²
        of the momentum transfer to f̂ at that wavenumber.
        """
        vol = self.basis.modes.ell ** self.basis.modes.d
        W = np.zeros(self.n_quads)
        for al, be, ga, de, use in self._orderings():
            sel = use & out_i[al] & out_j[be] & in_i[ga] & in_j[de]
            if np.any(sel):
                W[sel] += fhat(self.transfer_norm2(al[sel], ga[sel])) / vol
        return W

    def low_count_change(self, low):
        low = low.astype(int)
        return low[self.a] + low[self.b] - low[self.c] - low[self.e]


class TransformSampler:
    """Caches Fourier transforms at the discrete transfer wavenumbers 2π|n|/ℓ."""

    def __init__(self, ell, profiles):
        self.ell = ell
        self.profiles = profiles
        self._cache = {}

    def __call__(self, name):
        profile = self.profiles[name]

        def fhat(m2):
            m2 = np.asarray(m2, dtype=np.int64)
            uniq, inv = np.unique(m2, return_inverse=True)
            todo = [m for m in uniq.tolist() if (name, m) not in self._cache]
            if todo:
                ks = 2 * math.pi / self.ell * np.sqrt(np.array(todo, dtype=float))
                vals = profile(ks)
                for m, val in zip(todo, np.atleast_1d(vals).tolist()):
                    self._cache[(name, m)] = val
            return np.array([self._cache[(name, m)] for m in uniq.tolist()])[inv.ravel()]

        return fhat


def pair_profiles(transforms):
    """Named profiles for v, vω, vω², g and g + gω from shared transforms."""
    from ..scattering import FourierProfile

    def combo(p, q, sign):
        return FourierProfile(p.d, lambda k: p(k) + sign * q(k),
                              p.value_at_zero + sign * q.value_at_zero,
                              p.second_moment + sign * q.second_moment, p.support_radius)

    return {"v": transforms.v, "v_omega": transforms.v_omega, "v_omega2": transforms.v_omega2,
            "g": combo(transforms.v, transforms.v_omega, -1),
            "g_plus_g_omega": combo(transforms.v, transforms.v_omega2, -1)}


# --- projector masks -----------------------------------------------------------------

def _masks(modes):
    P = np.zeros(modes.size, bool)
    P[0] = True
    return {"P": P, "Q": ~P, "ALL": np.ones(modes.size, bool)}


def _hc(op):
    return SparseOperator(op.matrix + op.matrix.T.conj(), True, op.name)


def interaction_coefficients(table, sample, scale=0.5):
    m = _masks(table.basis.modes)
    return scale * table.projector_term(m["ALL"], m["ALL"], sample("v"), m["ALL"], m["ALL"])


def kinetic_operator(basis):
    diag = basis.states.astype(float) @ basis.modes.kinetic
    return SparseOperator(sp.diags(diag, format="csr"), True, "kinetic")


def assemble_hamiltonian(basis, v_hat, table=None):
    """H = Σ k²a†_k a_k + (1/2|Λ|)Σ v̂(k) a†_{p+k}a†_{q-k}a_q a_p on the mode set.

    Two-body processes leaving the mode set are dropped; their count is
    recorded in ``meta["truncation"]``.
    """
    table = TwoBodyTable(basis) if table is None else table
    sample = TransformSampler(basis.modes.ell, {"v": v_hat})
    inter = table.assemble(interaction_coefficients(table, sample), "interaction")
    H = SparseOperator(kinetic_operator(basis).matrix + inter.matrix, True, "hamiltonian",
                       {"truncation": dict(table.truncation)})
    return H


def renormalized_terms(table, transforms):
    """The five renormalized pieces Q_0..Q_4 of the pair interaction.

    Each is a sum of projector terms with P the condensate projector and Q
    its complement; f runs over v, vω, vω², g = v - vω and g + gω = v - vω².
    """
    m = _masks(table.basis.modes)
    P, Q = m["P"], m["Q"]
    sample = TransformSampler(table.basis.modes.ell, pair_profiles(transforms))
    term = table.projector_term
    X = [(P, P), (P, Q), (Q, P)]
    v, vw, vww, g, gg = (sample(n) for n in ("v", "v_omega", "v_omega2", "g", "g_plus_g_omega"))

    W4 = term(Q, Q, v, Q, Q)
    for xi, xj in X:
        W4 = W4 + term(Q, Q, vw, xi, xj) + term(xi, xj, vw, Q, Q)
        for yi, yj in X:
            W4 = W4 + term(xi, xj, vww, yi, yj)
    q4 = table.assemble(0.5 * W4, "renormalized_q4")
    q3 = _hc(table.assemble(term(P, Q, g, Q, Q), "renormalized_q3", hermitian=False))
    q2_pair = table.assemble(0.5 * term(P, P, g, Q, Q), "q2_pair", hermitian=False)
    q2_ex = table.assemble(term(P, Q, gg, Q, P) + term(P, Q, gg, P, Q), "q2_exchange")
    q2 = SparseOperator(q2_ex.matrix + q2_pair.matrix + q2_pair.matrix.T, True, "renormalized_q2")
    q1 = _hc(table.assemble(term(Q, P, gg, P, P), "renormalized_q1", hermitian=False))
    q0 = table.assemble(0.5 * term(P, P, gg, P, P), "renormalized_q0")
    return {0: q0, 1: q1, 2: q2, 3: q3, 4: q4}


def condensate_exchange_term(table, transforms):
    """Σ_{i≠j} P_i Q_j (g + gω) Q_j P_i, equal to (ĝ(0) + ĝω(0))n₀n₊/|Λ|."""
    m = _masks(table.basis.modes)
    sample = TransformSampler(table.basis.modes.ell, pair_profiles(transforms))
    return table.assemble(table.projector_term(m["P"], m["Q"], sample("g_plus_g_omega"),
                                               m["P"], m["Q"]), "condensate_exchange")


def splitting_identity_residual(table, transforms, terms=None):
    """max |½Σ_{i≠j}v - Σ_j Q_j^ren| entrywise, relative to max |½Σv|."""
    sample = TransformSampler(table.basis.modes.ell, {"v": transforms.v})
    inter = table.assemble(interaction_coefficients(table, sample), "interaction")
    terms = renormalized_terms(table, transforms) if terms is None else terms
    total = sum((t.matrix for t in terms.values()), sp.csr_matrix(inter.matrix.shape))
    diff = inter.matrix - total
    absres = float(abs(diff).max()) if diff.nnz else 0.0
    scale = inter.max_abs()
    return {"absolute": absres, "relative": absres / scale if scale else absres,
            "interaction_max": scale}


# --- one-body observables --------------------------------------------------------------

def number_operator(basis, mask, name):
    diag = basis.states[:, mask].sum(axis=1).astype(float)
    return SparseOperator(sp.diags(diag, format="csr"), True, name)


def total_momentum_operators(basis):
    """Diagonal operators Σ k_c a†_k a_k for each component c."""
    P = basis.total_momentum() * (2 * math.pi / basis.modes.ell)
    return [SparseOperator(sp.diags(P[:, c].astype(float), format="csr"), True, f"total_momentum_{c}")
            for c in range(basis.modes.d)]


def soft_pairs_operator(table, g_hat, K_L, K_H):
    """(1/|Λ|)Σ_{k ∈ P_H, p ∈ P_L} ĝ(k)(a†_0 a†_p a_{p-k} a_k + h.c.)."""
    if not K_L < K_H:
        raise DomainError("need K_L < K_H so that low and high momenta are disjoint")
    modes = table.basis.modes
    norms = modes.norms
    low = (norms > 0) & (norms <= K_L / modes.ell)
    high = norms >= K_H / modes.ell
    sample = TransformSampler(modes.ell, {"g": g_hat})("g")
    m2 = (modes.indices ** 2).sum(axis=1)
    gk = sample(m2)
    vol = modes.ell ** modes.d
    a, b, c, e = table.a, table.b, table.c, table.e
    out_ok = (a == 0) & low[b]
    W = np.where(out_ok & high[c], gk[c], 0.0)
    W = W + np.where(out_ok & high[e] & (c != e), gk[e], 0.0)
    op = table.assemble(W / vol, "soft_pairs", hermitian=False)
    return _hc(op)


def low_change_split(table, v_hat, K_H):
    """Interaction parts H^(k) changing the low-excitation number n₊^L by k.

    Low modes are 0 < |k| < K_H/ℓ.  The kinetic energy is added to H^(0).
    """
    modes = table.basis.modes
    low = modes.low_mask(K_H)
    sample = TransformSampler(modes.ell, {"v": v_hat})
    W = interaction_coefficients(table, sample)
    change = table.low_count_change(low)
    parts = {}
    for k in range(-2, 3):
        parts[k] = table.assemble(np.where(change == k, W, 0.0), f"low_change_{k}",
                                  hermitian=(k == 0)).matrix
    parts[0] = parts[0] + kinetic_operator(table.basis).matrix
    return parts


def low_change_operators(table, v_hat, K_H):
    """(d1, d2): interaction terms changing n₊^L by ±1, and twice those changing it by ±2.

    The factor two on d2 follows the double sum over ordered particle pairs
    in its projector form.
    """
    parts = low_change_split(table, v_hat, K_H)
    d1 = SparseOperator(parts[1] + parts[-1], True, "low_change1")
    d2 = SparseOperator(2 * (parts[2] + parts[-2]), True, "low_change2")
    return d1, d2


OBSERVABLES = ("n0", "n_plus", "n_plus_low", "n_plus_high", "total_momentum",
               "renormalized_q0", "renormalized_q1", "renormalized_q2", "renormalized_q3",
               "renormalized_q4", "soft_pairs", "low_change1", "low_change2", "hamiltonian")


def assemble_observable(kind, basis, table=None, transforms=None, g_hat=None, v_hat=None,
                        K_L=None, K_H=None):
    """Matrix of a named observable; returns a list for ``total_momentum``."""
    modes = basis.modes
    if K_L is not None and K_H is not None and not K_L < K_H:
        raise DomainError("need K_L < K_H so that low and high momenta are disjoint")
    if kind == "n0":
        return number_operator(basis, _masks(modes)["P"], "n0")
    if kind == "n_plus":
        return number_operator(basis, _masks(modes)["Q"], "n_plus")
    if kind == "n_plus_low":
        _need(K_H, "K_H")
        return number_operator(basis, modes.low_mask(K_H), "n_plus_low")
    if kind == "n_plus_high":
        _need(K_L, "K_L")
        return number_operator(basis, modes.high_mask(K_L), "n_plus_high")
    if kind == "total_momentum":
        return total_momentum_operators(basis)
    table = TwoBodyTable(basis) if table is None else table
    if kind.startswith("renormalized_q"):
        _need(transforms, "transforms")
        return renormalized_terms(table, transforms)[int(kind[-1])]
    if kind == "soft_pairs":
        _need(K_L, "K_L")
        _need(K_H, "K_H")
        g = g_hat if g_hat is not None else pair_profiles(_need(transforms, "transforms"))["g"]
        return soft_pairs_operator(table, g, K_L, K_H)
    v = v_hat if v_hat is not None else (transforms.v if transforms is not None else None)
    _need(v, "v_hat")
    if kind in ("low_change1", "low_change2"):
        _need(K_H, "K_H")
        d1, d2 = low_change_operators(table, v, K_H)
        return d1 if kind == "low_change1" else d2
    if kind == "hamiltonian":
        return assemble_hamiltonian(basis, v, table)
    raise DomainError(f"unknown observable {kind!r}; choose from {', '.join(OBSERVABLES)}")


def _need(value, name):
    if value is None:
        raise DomainError(f"this observable needs {name}")
    return value
