"""Small quadrature helpers shared by the trajectory and WKB modules."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_rule(n):
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def panel_nodes(edges, order):
    """Gauss-Legendre nodes and weights for a batch of panels.

    ``edges`` is an increasing array of panel boundaries (m+1 values);
    returns ``(nodes, weights)`` shaped (m, order), already scaled by the
    panel half-widths, so a panel integral is ``(f(nodes) * weights).sum(1)``.
    """
    x, w = gauss_rule(order)
    lo = edges[:-1][:, None]
    hi = edges[1:][:, None]
    half = 0.5 * (hi - lo)
    return lo + half * (x[None, :] + 1.0), half * w[None, :]


def gauss_integrate(f, a, b, n=64, panels=1):
    """Composite fixed-order Gauss-Legendre integral of a vectorized f."""
    edges = np.linspace(a, b, panels + 1)
    nodes, weights = panel_nodes(edges, n)
    return float(np.sum(f(nodes) * weights))
