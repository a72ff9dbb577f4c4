"""Finite sets of box momenta k ∈ (2π/ℓ)ℤ^d used as single-particle modes."""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


def _canonical_order(idx):
    norms = (idx ** 2).sum(axis=1)
    # np.lexsort treats the last key as primary
    keys = [idx[:, c] for c in range(idx.shape[1] - 1, -1, -1)] + [norms]
    return np.lexsort(keys)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Modes n ∈ ℤ^d (momenta 2πn/ℓ) sorted by |n|² then lexicographically.

    The set contains 0 and is closed under n ↦ -n, so index 0 is always the
    condensate mode.
    """
    d: int
    ell: float
    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.d)
        if self.d not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not self.ell > 0:
            raise DomainError("box side must be positive")
        seen = {tuple(r) for r in idx.tolist()}
        if len(seen) != len(idx):
            raise DomainError("duplicate modes")
        if (0,) * self.d not in seen:
            raise DomainError("the mode set must contain k = 0")
        if any(tuple(-x for x in r) not in seen for r in seen):
            raise DomainError("the mode set must be closed under k ↦ -k")
        idx = idx[_canonical_order(idx)]
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "_lookup", {tuple(r): i for i, r in enumerate(idx.tolist())})

    @classmethod
    def shells(cls, d, ell, max_norm2):
        """All n with |n|² <= ``max_norm2``."""
        r = math.isqrt(int(max_norm2))
        axes = np.arange(-r, r + 1)
        grid = np.stack(np.meshgrid(*([axes] * d), indexing="ij"), -1).reshape(-1, d)
        return cls(d, ell, grid[(grid ** 2).sum(axis=1) <= max_norm2])

    @classmethod
    def parse(cls, spec, d, ell):
        """``"shell:<m>"`` or an explicit list ``"0,0,0;1,0,0;-1,0,0"``."""
        spec = spec.strip()
        if spec.startswith("shell:"):
            return cls.shells(d, ell, int(spec.split(":", 1)[1]))
        rows = [[int(x) for x in part.split(",")] for part in spec.split(";") if part.strip()]
        if any(len(r) != d for r in rows):
            raise DomainError(f"every mode needs {d} integer components")
        return cls(d, ell, np.array(rows))

    @property
    def size(self):
        return len(self.indices)

    def __len__(self):
        return self.size

    @property
    def momenta(self):
        return 2 * math.pi / self.ell * self.indices

    @property
    def kinetic(self):
        """|k|² for every mode."""
        return (2 * math.pi / self.ell) ** 2 * (self.indices ** 2).sum(axis=1)

    @property
    def norms(self):
        return 2 * math.pi / self.ell * np.sqrt((self.indices ** 2).sum(axis=1))

    def index_of(self, n):
        """Position of lattice vector ``n`` or -1 if it is not a mode."""
        return self._lookup.get(tuple(int(x) for x in n), -1)

    @property
    def negation(self):
        return np.array([self.index_of(-r) for r in self.indices])

    def low_mask(self, K_H):
        """Modes with 0 < |k| < K_H/ℓ."""
        n = self.norms
        return (n > 0) & (n < K_H / self.ell)

    def high_mask(self, K_L):
        """Modes with |k| > K_L/ℓ."""
        return self.norms > K_L / self.ell

    def to_json(self):
        return {"d": self.d, "ell": self.ell, "modes": self.indices.tolist()}
