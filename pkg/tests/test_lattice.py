import itertools
import math

import numpy as np
import pytest

from bosegas.errors import SizingError
from bosegas.lattice import radial_lattice_sum, shell_counts, smooth_step


def brute_counts(d, m_hi):
    r = math.isqrt(m_hi)
    rng = range(-r, r + 1)
    out = np.zeros(m_hi + 1, dtype=int)
    for n in itertools.product(rng, repeat=d):
        m = sum(x * x for x in n)
        if m <= m_hi:
            out[m] += 1
    return out


@pytest.mark.parametrize("d,m_hi", [(2, 200), (3, 90)])
def test_shell_counts_match_brute_force(d, m_hi):
    np.testing.assert_array_equal(shell_counts(d, m_hi), brute_counts(d, m_hi))


def test_shell_window():
    full = shell_counts(3, 150)
    np.testing.assert_array_equal(shell_counts(3, 150, m_lo=70), full[70:])


def test_known_representation_numbers():
    c2 = shell_counts(2, 25)
    assert c2[5] == 8 and c2[25] == 12 and c2[3] == 0
    c3 = shell_counts(3, 7)
    assert c3[1] == 6 and c3[2] == 12 and c3[3] == 8 and c3[7] == 0


def test_budget_guard():
    with pytest.raises(SizingError) as exc:
        shell_counts(3, 10 ** 8, budget=1e6)
    assert exc.value.size > 1e6


def test_smooth_step_values():
    x = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    s = smooth_step(x)
    assert s[0] == 1 and s[1] == 1 and s[3] == 0 and s[4] == 0
    assert s[2] == pytest.approx(0.5)
    xs = np.linspace(0, 3, 301)
    assert np.all(np.diff(smooth_step(xs)) <= 0)


def test_radial_sum_against_direct_sum():
    F = lambda k: np.exp(-k * k)  # noqa: E731
    h = 0.7
    total, points = radial_lattice_sum(F, 3, h, 60)
    n = np.arange(-7, 8)
    X, Y, Z = np.meshgrid(n, n, n, indexing="ij")
    m = X ** 2 + Y ** 2 + Z ** 2
    direct = np.exp(-(h * h) * m[m <= 60]).sum()
    assert total == pytest.approx(direct, rel=1e-14)
    assert points == int((m <= 60).sum())
