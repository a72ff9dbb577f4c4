"""Composite Gauss-Legendre rules and semi-infinite panel integration."""
from functools import lru_cache

import numpy as np

from .errors import AccuracyError


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(breaks, max_width, order=16):
    """Nodes and weights of a composite rule on [breaks[0], breaks[-1]].

    Every break is a panel edge and no panel is wider than ``max_width``.
    """
    breaks = np.asarray(breaks, dtype=float)
    pieces = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        m = max(1, int(np.ceil((hi - lo) / max_width)))
        pieces.append(np.linspace(lo, hi, m + 1)[:-1])
    edges = np.concatenate(pieces + [breaks[-1:]])
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def integrate_panels(f, breaks, max_width, order=16):
    """Integrate a vectorized ``f`` on a finite interval with a composite rule.

    Returns (value, error estimate, evaluations); the estimate compares the
    rule against one of half the order.
    """
    nodes, weights = panel_nodes(breaks, max_width, order)
    fx = f(nodes)
    value = float(np.dot(weights, fx))
    lo_nodes, lo_weights = panel_nodes(breaks, max_width, order // 2)
    coarse = float(np.dot(lo_weights, f(lo_nodes)))
    return value, abs(value - coarse), nodes.size + lo_nodes.size


def integrate_to_infinity(f, start, width, tol, decay_power, order=16,
                          block=64, max_panels=200000):
    """Integrate ``f`` on [start, inf) by summing equal-width panels.

    ``f`` may oscillate; ``decay_power`` p is a conservative lower bound on
    the decay |f(k)| <= C k^-p, so the neglected tail is bounded by
    envelope(K)·K/(p-1).  Summation stops once that bound is below ``tol``.
    Returns (value, tail bound, evaluations).
    """
    if decay_power <= 1:
        raise ValueError("decay_power must exceed 1 for a convergent tail")
    x, w = gauss_legendre(order)
    total = 0.0
    lo = float(start)
    n_eval = 0
    n_panels = 0
    while True:
        left = lo + width * np.arange(block)
        mid = left + 0.5 * width
        nodes = (mid[:, None] + 0.5 * width * x).ravel()
        fx = f(nodes).reshape(block, order)
        sums = 0.5 * width * fx @ w
        total += float(np.sum(sums))
        n_eval += nodes.size
        n_panels += block
        lo = left[-1] + width
        envelope = float(np.max(np.abs(fx[-block // 4:])))
        tail = envelope * lo / (decay_power - 1.0)
        if tail < tol:
            return total, tail, n_eval
        if n_panels >= max_panels:
            raise AccuracyError(
                f"tail bound {tail:.3e} above tolerance {tol:.3e} after "
                f"{n_panels} panels", achieved=tail)
