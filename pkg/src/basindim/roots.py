"""Polynomial root finding by Aberth-Ehrlich simultaneous iteration.

All roots are refined at once from a circle of initial guesses, so no
deflation and no companion matrix is needed.  Degrees here are small (the
zeros of the polynomial factor of an integrand), so robustness matters more
than asymptotic speed.
"""

import numpy as np


class RootFindingError(ArithmeticError):
    pass


def _horner(coeffs, x):
    acc = np.zeros_like(x) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def aberth_roots(coeffs, tol=1e-12, max_iter=200):
    """All complex roots of a polynomial given constant term first."""
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    degree = len(cs) - 1
    if degree == 0:
        return []
    if degree == 1:
        return [-cs[0] / cs[1]]

    cs = np.asarray(cs, dtype=complex)
    deriv = cs[1:] * np.arange(1, degree + 1)

    # Cauchy bound gives a circle that encloses every root; offset angles
    # break the symmetry that can otherwise lock the iteration.
    radius = 1.0 + max(abs(c / cs[-1]) for c in cs[:-1])
    angles = 2.0 * np.pi * (np.arange(degree) + 0.25) / degree + 0.4
    x = radius * np.exp(1j * angles)

    for _ in range(max_iter):
        p = _horner(cs, x)
        dp = _horner(deriv, x)
        dp = np.where(dp == 0, 1e-30, dp)
        w = p / dp
        pair = x[:, None] - x[None, :]
        np.fill_diagonal(pair, 1.0)
        s = np.sum(np.where(np.eye(degree, dtype=bool), 0.0, 1.0 / pair), axis=1)
        delta = w / (1.0 - w * s)
        x = x - delta
        if np.max(np.abs(delta)) <= tol * max(1.0, np.max(np.abs(x))):
            return sorted(x.tolist(), key=lambda r: (round(r.real, 9), round(r.imag, 9)))
    raise RootFindingError(f"Aberth iteration did not converge within {max_iter} steps")
