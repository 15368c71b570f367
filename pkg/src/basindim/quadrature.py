"""Adaptive Gauss-Legendre quadrature along straight segments in the complex plane.

The integrands handled here (polynomial times exponential-of-polynomial) are
entire, so integration along the straight segment between the endpoints is
always legitimate and 15-point panels converge extremely fast wherever the
integrand is resolved.  A panel is accepted when splitting it in two changes
the result by less than its share of the tolerance budget; otherwise the two
halves are pushed back on the work stack.  A hard cap on the number of panels
turns silent inaccuracy into an explicit error.
"""

import numpy as np

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


class QuadratureError(ArithmeticError):
    """Raised when the panel subdivision cap is hit before the target is met."""


def _panel(integrand, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.sum(_WEIGHTS * integrand(mid + half * _NODES))


def integrate_segment(integrand, z0, z1, tol_abs=1e-12, tol_rel=1e-13,
                      max_panels=2 ** 14):
    """Integrate a vectorized complex integrand along the segment [z0, z1].

    ``tol_abs`` is distributed over panels proportionally to their length;
    ``tol_rel`` guards the regime where the integral is huge and an absolute
    target below machine granularity would be unreachable.  Non-finite panel
    values (the integrand overflowed) are passed through so callers can treat
    the result as overflow evidence.
    """
    z0 = complex(z0)
    z1 = complex(z1)
    total_len = abs(z1 - z0)
    if total_len == 0.0:
        return 0.0 + 0.0j

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        stack = [(z0, z1, _panel(integrand, z0, z1))]
        acc = 0.0 + 0.0j
        panels = 1
        while stack:
            a, b, coarse = stack.pop()
            mid = 0.5 * (a + b)
            left = _panel(integrand, a, mid)
            right = _panel(integrand, mid, b)
            refined = left + right
            err = abs(refined - coarse)
            share = tol_abs * (abs(b - a) / total_len) + tol_rel * abs(refined)
            if not np.isfinite(err) or err <= share:
                acc += refined
                continue
            panels += 2
            if panels > max_panels:
                raise QuadratureError(
                    f"panel budget {max_panels} exhausted before reaching "
                    f"tolerance {tol_abs:g} on segment of length {total_len:g}")
            stack.append((a, mid, left))
            stack.append((mid, b, right))
    return acc
