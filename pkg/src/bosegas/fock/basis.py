"""Occupation-number bases of N bosons in a finite mode set.

States are stored as rows of occupation numbers, ordered reverse
lexicographically in the mode order: the first state has all particles in
mode 0, and among two states the one with more particles in the earliest
differing mode comes first.
"""
import math

import numpy as np

from ..errors import DomainError, SizingError

DEFAULT_CAP = 5_000_000
_KEY_SEED = 20240611


class _SuffixTable:
    """Number of ways the modes j.. hold r particles with total momentum P.

    Keys encode (r, P) as one integer; for unrestricted bases only r matters.
    """

    def __init__(self, modes, N, with_momentum):
        self.N = N
        idx = modes.indices if with_momentum else np.zeros((modes.size, 0), dtype=np.int64)
        span = int(np.abs(idx).max()) if idx.size else 0
        self.offset = N * span
        self.base = 2 * self.offset + 1
        self.d = idx.shape[1]
        self.tables = [None] * (modes.size + 1)
        keys = np.array([self.encode(0, np.zeros(self.d, dtype=np.int64))])
        counts = np.array([1], dtype=np.int64)
        self.tables[modes.size] = (keys, counts)
        for j in range(modes.size - 1, -1, -1):
            r, P = self.decode(keys)
            new_keys, new_counts = [], []
            for n in range(N + 1):
                ok = r + n <= N
                new_keys.append(self.encode(r[ok] + n, P[ok] + n * idx[j]))
                new_counts.append(counts[ok])
            allk = np.concatenate(new_keys)
            uniq, inv = np.unique(allk, return_inverse=True)
            counts = np.bincount(inv, weights=np.concatenate(new_counts).astype(float))
            keys = uniq
            self.tables[j] = (keys, np.rint(counts).astype(np.int64))

    def encode(self, r, P):
        r = np.asarray(r, dtype=np.int64)
        P = np.asarray(P, dtype=np.int64).reshape(r.shape + (self.d,))
        key = r.copy()
        for c in range(self.d):
            key = key * self.base + (P[..., c] + self.offset)
        return key

    def decode(self, keys):
        keys = np.asarray(keys, dtype=np.int64).copy()
        P = np.empty(keys.shape + (self.d,), dtype=np.int64)
        for c in range(self.d - 1, -1, -1):
            P[..., c] = keys % self.base - self.offset
            keys //= self.base
        return keys, P

    def count(self, j, r, P):
        keys, counts = self.tables[j]
        q = self.encode(r, P)
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, len(keys) - 1)
        return np.where(keys[pos] == q, counts[pos], 0)


def sector_dimension(modes, N, momentum_sector=None):
    """Exact number of occupation vectors with Σn = N (and total momentum)."""
    if N < 0:
        raise DomainError("particle number must be non-negative")
    if momentum_sector is None:
        return math.comb(N + modes.size - 1, N)
    table = _SuffixTable(modes, N, True)
    P = np.asarray(momentum_sector, dtype=np.int64)
    if np.any(np.abs(P) > table.offset):
        return 0
    return int(table.count(0, np.array(N), P))


def _key_weights(M, N):
    if (N + 1) ** M < 2 ** 62:
        return np.array([(N + 1) ** (M - 1 - j) for j in range(M)], dtype=np.uint64), True
    rng = np.random.default_rng(_KEY_SEED)
    return rng.integers(1, 2 ** 63, size=M, dtype=np.uint64) | np.uint64(1), False


class FockBasis:
    """All N-boson occupation vectors of a mode set, optionally in a momentum sector."""

    def __init__(self, modes, N, states, momentum_sector=None):
        self.modes = modes
        self.N = N
        self.states = states
        self.momentum_sector = None if momentum_sector is None else tuple(int(x) for x in momentum_sector)
        self.weights, self.exact_keys = _key_weights(modes.size, N)
        self.keys = self.state_keys(states)
        self._order = np.argsort(self.keys, kind="stable")
        self._sorted = self.keys[self._order]
        if np.any(self._sorted[1:] == self._sorted[:-1]):
            raise DomainError("state key collision; occupation vectors are not unique")

    @property
    def dimension(self):
        return self.states.shape[0]

    def __len__(self):
        return self.dimension

    def state_keys(self, occ):
        occ = np.asarray(occ).astype(np.uint64)
        return (occ * self.weights).sum(axis=-1, dtype=np.uint64)

    def lookup(self, keys):
        """Indices of states with the given keys, -1 where absent."""
        keys = np.asarray(keys, dtype=np.uint64)
        pos = np.searchsorted(self._sorted, keys)
        pos = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos] == keys
        return np.where(hit, self._order[pos], -1)

    def index(self, occupations):
        occ = np.asarray(occupations)
        if occ.shape != (self.modes.size,) or occ.sum() != self.N or np.any(occ < 0):
            return -1
        i = int(self.lookup(self.state_keys(occ[None, :]))[0])
        return i if i >= 0 and np.array_equal(self.states[i], occ) else -1

    def condensate_index(self):
        occ = np.zeros(self.modes.size, dtype=int)
        occ[0] = self.N
        return self.index(occ)

    def total_momentum(self):
        return self.states.astype(np.int64) @ self.modes.indices


def build_basis(modes, N, momentum_sector=None, cap=DEFAULT_CAP):
    """Enumerate the sector; raises SizingError before enumeration if it exceeds ``cap``."""
    if N < 0:
        raise DomainError("particle number must be non-negative")
    M = modes.size
    with_p = momentum_sector is not None
    P_target = np.zeros(modes.d if with_p else 0, dtype=np.int64)
    if with_p:
        P_target = np.asarray(momentum_sector, dtype=np.int64).reshape(modes.d)
    table = _SuffixTable(modes, N, with_p)
    if with_p and np.any(np.abs(P_target) > table.offset):
        dim = 0
    else:
        dim = int(table.count(0, np.array(N), P_target))
    if dim > cap:
        raise SizingError(f"sector dimension {dim} exceeds cap {cap}", size=dim)
    dtype = np.int8 if N < 127 else np.int32
    if dim == 0:
        return FockBasis(modes, N, np.zeros((0, M), dtype=dtype), momentum_sector)
    idx = modes.indices if with_p else np.zeros((M, 0), dtype=np.int64)
    occ = np.zeros((1, 0), dtype=dtype)
    left = np.array([N], dtype=np.int64)
    need = P_target[None, :].copy()
    for j in range(M):
        reps = left + 1
        parent = np.repeat(np.arange(len(left)), reps)
        start = np.concatenate(([0], np.cumsum(reps)[:-1]))
        # descending occupation within each parent keeps reverse-lex order
        n = left[parent] - (np.arange(parent.size) - start[parent])
        new_left = left[parent] - n
        new_need = need[parent] - n[:, None] * idx[j]
        ok = table.count(j + 1, new_left, new_need) > 0
        occ = np.concatenate([occ[parent[ok]], n[ok, None].astype(dtype)], axis=1)
        left, need = new_left[ok], new_need[ok]
    return FockBasis(modes, N, occ, momentum_sector)
