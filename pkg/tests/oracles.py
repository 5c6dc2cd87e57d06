"""Independent reference implementations used only by the tests.

These deliberately avoid the package's own algorithms: basis values come
from confluent divided differences of truncated powers, Gauss nodes from
the Jacobi-matrix eigenvalue method, and integrals from heavy per-span
Gauss quadrature of the evaluated functions.
"""

from __future__ import annotations

import math

import numpy as np


def truncated_power_divided_difference(window, degree: int, x: float) -> float:
    """Divided difference over ``window`` of u -> (u - x)_+^degree.

    Repeated knots are handled confluently via derivatives in u.
    """
    window = [float(u) for u in window]

    def deriv(u: float, m: int) -> float:
        # m-th u-derivative of (u - x)_+^degree
        if m > degree or u < x or (u == x and degree - m > 0):
            return 0.0
        coeff = math.factorial(degree) / math.factorial(degree - m)
        return coeff * (u - x) ** (degree - m)

    n = len(window)
    table = [[0.0] * n for _ in range(n)]
    for span in range(n):
        for i in range(n - span):
            j = i + span
            if window[i] == window[j]:
                table[i][j] = deriv(window[i], span) / math.factorial(span)
            else:
                table[i][j] = (table[i + 1][j] - table[i][j - 1]) / (
                    window[j] - window[i]
                )
    return table[0][n - 1]


def bspline_value(expanded_knots, degree: int, i: int, x: float) -> float:
    """Normalized B-spline ``i`` at ``x`` via divided differences."""
    window = expanded_knots[i : i + degree + 2]
    span = window[-1] - window[0]
    return span * truncated_power_divided_difference(window, degree, x)


def golub_welsch(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights from the Jacobi matrix eigenproblem."""
    if q == 1:
        return np.array([0.0]), np.array([2.0])
    k = np.arange(1, q)
    beta = k / np.sqrt(4.0 * k * k - 1.0)
    jac = np.diag(beta, 1) + np.diag(beta, -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = 2.0 * vecs[0, :] ** 2
    return nodes, weights


def heavy_gauss_integral(f, a: float, b: float, spans=None, q: int = 64):
    """Integral of ``f`` on [a, b] by q-point Gauss on each span."""
    nodes, weights = golub_welsch(q)
    if spans is None:
        spans = [(a, b)]
    total = 0.0
    for xl, xr in spans:
        xl, xr = max(xl, a), min(xr, b)
        if xr <= xl:
            continue
        mid, half = 0.5 * (xl + xr), 0.5 * (xr - xl)
        total += half * sum(w * f(mid + half * x) for x, w in zip(nodes, weights))
    return total
