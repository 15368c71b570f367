"""The entire-function families under study, with exact derivatives.

Four families are supported:

* ``ExpLambda(lam)``  -- lam * exp(z)
* ``Cosine(a, b)``    -- a * cos(z) + b
* ``ErfScaled(lam)``  -- lam * integral_0^z exp(-t^2) dt, evaluated in closed
  form through the error function
* ``PExpQ(p, q, c)``  -- c + integral_0^z p(t) * exp(q(t)) dt for polynomials
  p and q, evaluated by adaptive quadrature along the straight segment from 0
  (the integrand is entire, so the value is path independent)

Every family knows its exact derivative (no numerical differentiation), its
order of growth, and its singular values: critical values are images of the
zeros of p, finite asymptotic values are the ray limits along the directions
where exp(q) decays.

All evaluators accept scalars or numpy arrays and never raise on overflow;
values beyond ``OVERFLOW_LIMIT`` (or non-finite ones) are reported by
``overflowed`` and treated downstream as escape evidence.
"""

import cmath
import math

import numpy as np
from scipy.special import erf

from .quadrature import integrate_segment
from .roots import aberth_roots

SQRT_PI = math.sqrt(math.pi)
OVERFLOW_LIMIT = 1e150
ZERO_FLOOR = 1e-300

FAMILY_NAMES = ("exp_lambda", "cosine", "erf_scaled", "p_exp_q")


class ConfigError(ValueError):
    """Malformed function configuration text."""


class AsymptoticLimitError(ArithmeticError):
    """Ray integration did not settle to a limit within the requested radius."""


def overflowed(w):
    """True where a value left the trusted range (escape evidence downstream)."""
    w = np.asarray(w)
    bad = ~np.isfinite(w.real) | ~np.isfinite(w.imag)
    with np.errstate(over="ignore", invalid="ignore"):
        bad |= np.abs(w) > OVERFLOW_LIMIT
    if bad.ndim == 0:
        return bool(bad)
    return bad


class Poly:
    """Polynomial with complex coefficients, constant term first (Horner eval)."""

    def __init__(self, coeffs):
        cs = [complex(c) for c in coeffs]
        if not cs:
            cs = [0j]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def __call__(self, z):
        acc = np.zeros_like(np.asarray(z, dtype=complex)) + self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        if acc.ndim == 0:
            return complex(acc)
        return acc

    def deriv(self):
        if self.degree == 0:
            return Poly([0])
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def roots(self, tol=1e-12):
        return aberth_roots(self.coeffs, tol=tol)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"


class SingularSet:
    """Critical and finite asymptotic values of a function in the catalog."""

    def __init__(self, critical_values, asymptotic_values, truncated=False):
        self.critical_values = list(critical_values)
        self.asymptotic_values = list(asymptotic_values)
        self.truncated = truncated

    def all_values(self):
        return self.critical_values + self.asymptotic_values

    def __repr__(self):
        return (f"SingularSet(critical={self.critical_values!r}, "
                f"asymptotic={self.asymptotic_values!r}, truncated={self.truncated})")


class EntireFunction:
    """Base class: callable map with exact derivative and growth metadata."""

    family = "abstract"

    def __call__(self, z):
        raise NotImplementedError

    def derivative(self, z):
        raise NotImplementedError

    def log_derivative(self, z):
        """z * f'(z) / f(z); raises ZeroDivisionError at zeros of f (scalar input)."""
        fz = self(z)
        if np.isscalar(fz) or np.asarray(fz).ndim == 0:
            if abs(fz) < ZERO_FLOOR:
                raise ZeroDivisionError(f"f(z) vanishes at z={z}")
            return complex(z) * self.derivative(z) / fz
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(z, dtype=complex) * self.derivative(z) / fz

    def order(self):
        raise NotImplementedError


class ExpLambda(EntireFunction):
    family = "exp_lambda"

    def __init__(self, lam):
        lam = complex(lam)
        if lam == 0:
            raise ValueError("the multiplier of exp(z) must be nonzero")
        self.lam = lam

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return self.lam * np.exp(np.asarray(z, dtype=complex))

    def derivative(self, z):
        return self(z)

    def order(self):
        return 1.0

    def __repr__(self):
        return f"ExpLambda({self.lam!r})"


class Cosine(EntireFunction):
    family = "cosine"

    def __init__(self, a, b):
        a = complex(a)
        if a == 0:
            raise ValueError("the cosine amplitude must be nonzero")
        self.a = a
        self.b = complex(b)

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return self.a * np.cos(np.asarray(z, dtype=complex)) + self.b

    def derivative(self, z):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return -self.a * np.sin(np.asarray(z, dtype=complex))

    def order(self):
        return 1.0

    def __repr__(self):
        return f"Cosine({self.a!r}, {self.b!r})"


class ErfScaled(EntireFunction):
    """lam * integral_0^z exp(-t^2) dt == lam * (sqrt(pi)/2) * erf(z).

    The closed form through the complex error function is accurate over the
    whole plane, which is what makes grid iteration of this family cheap; the
    equivalent ``PExpQ`` quadrature route exists independently and the two are
    cross-checked in the test suite.
    """

    family = "erf_scaled"

    def __init__(self, lam):
        lam = complex(lam)
        if lam == 0:
            raise ValueError("the scale of the error-function map must be nonzero")
        self.lam = lam
        self._front = lam * SQRT_PI / 2.0

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return self._front * erf(np.asarray(z, dtype=complex))

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return self.lam * np.exp(-z * z)

    def order(self):
        return 2.0

    def as_pexpq(self):
        """The same map expressed through the generic quadrature route."""
        return PExpQ(Poly([self.lam]), Poly([0, 0, -1]), 0.0)

    def __repr__(self):
        return f"ErfScaled({self.lam!r})"


class PExpQ(EntireFunction):
    """c + integral_0^z p(t) exp(q(t)) dt with polynomials p, q (deg q >= 1)."""

    family = "p_exp_q"

    def __init__(self, p, q, c=0.0):
        self.p = p if isinstance(p, Poly) else Poly(p)
        self.q = q if isinstance(q, Poly) else Poly(q)
        self.c = complex(c)
        if self.q.degree < 1:
            raise ValueError("deg q must be at least 1")
        if all(co == 0 for co in self.p.coeffs):
            raise ValueError("p must not vanish identically")
        # Closed form when the integrand is a * exp(s2 * t^2): the primitive is
        # an error function, which keeps grid iteration of such maps fast.
        self._erf_front = None
        if (self.p.degree == 0 and self.q.degree == 2
                and self.q.coeffs[0] == 0 and self.q.coeffs[1] == 0):
            root = cmath.sqrt(-self.q.coeffs[2])
            self._erf_root = root
            self._erf_front = self.p.coeffs[0] * SQRT_PI / (2.0 * root)

    def __call__(self, z):
        if self._erf_front is not None:
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                return self.c + self._erf_front * erf(self._erf_root *
                                                      np.asarray(z, dtype=complex))
        if np.ndim(z) == 0:
            return self._integral(complex(z))
        flat = np.asarray(z, dtype=complex).ravel()
        out = np.array([self._integral(w) for w in flat])
        return out.reshape(np.shape(z))

    def _integral(self, z):
        integrand = lambda t: self.p(t) * np.exp(self.q(t))
        return self.c + integrate_segment(integrand, 0.0, z)

    def integral_along(self, z0, z1):
        """Integral contribution of the segment [z0, z1] alone (no constant)."""
        integrand = lambda t: self.p(t) * np.exp(self.q(t))
        return integrate_segment(integrand, z0, z1)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            out = self.p(z) * np.exp(self.q(z))
        if out.ndim == 0:
            return complex(out)
        return out

    def order(self):
        return float(self.q.degree)

    def __repr__(self):
        return f"PExpQ({self.p!r}, {self.q!r}, {self.c!r})"


def order_of(f):
    """Order of growth of a catalog function (closed form per family)."""
    return f.order()


def asymptotic_directions(f):
    """Ray directions along which exp(q) decays and f has a finite limit.

    For q of degree d with leading coefficient c, the k-th direction is
    ((2k+1)*pi - arg c) / d for k = 1..d, reported in [0, 2*pi).
    """
    if isinstance(f, ErfScaled):
        q = Poly([0, 0, -1])
    elif isinstance(f, PExpQ):
        q = f.q
    else:
        raise TypeError("asymptotic directions exist only for the integral families")
    d = q.degree
    arg = cmath.phase(q.leading)
    out = []
    for k in range(1, d + 1):
        phi = ((2 * k + 1) * math.pi - arg) / d
        out.append(phi % (2.0 * math.pi))
    return out


def _ray_limits(pexpq, directions, radius, settle_tol=1e-8):
    """Asymptotic values by quadrature along each ray, with a two-radius check."""
    values = []
    for phi in directions:
        unit = cmath.exp(1j * phi)
        half = pexpq.c + pexpq.integral_along(0.0, 0.5 * radius * unit)
        full = half + pexpq.integral_along(0.5 * radius * unit, radius * unit)
        if not np.isfinite(full.real) or not np.isfinite(full.imag) \
                or abs(full - half) > settle_tol:
            raise AsymptoticLimitError(
                f"ray limit along direction {phi:.6f} not settled at radius "
                f"{radius:g} (changed by {abs(full - half):.3g})")
        values.append(complex(full))
    return values


def singular_values(f, search_radius=12.0):
    """Critical and finite asymptotic values of a catalog function.

    Critical values come from the zeros of the polynomial factor (all of them
    are found, so ``truncated`` stays False); asymptotic values come from ray
    integration out to ``search_radius`` with a settledness check at half the
    radius.
    """
    if search_radius < 1.0:
        raise ValueError("search_radius must be at least 1")
    if isinstance(f, ExpLambda):
        return SingularSet([], [0j])
    if isinstance(f, Cosine):
        return SingularSet([f.b + f.a, f.b - f.a], [])
    if isinstance(f, ErfScaled):
        pexpq = f.as_pexpq()
        asym = _ray_limits(pexpq, asymptotic_directions(f), search_radius)
        return SingularSet([], asym)
    if isinstance(f, PExpQ):
        crits = [f(r) for r in f.p.roots()]
        asym = _ray_limits(f, asymptotic_directions(f), search_radius)
        return SingularSet(crits, asym)
    raise TypeError(f"not a catalog function: {f!r}")


# ---------------------------------------------------------------------------
# Plain-text configuration grammar
#
#   family=erf_scaled          one of exp_lambda | cosine | erf_scaled | p_exp_q
#   lambda_re=-2.0             complex parameters split into _re / _im keys
#   lambda_im=0.0
#   p_coeffs=-0.14:0           polynomial coefficients as re:im pairs separated
#   q_coeffs=0:0,0:0,-1:0      by commas, constant term first
#
# Unknown keys are rejected.  Blank lines and lines starting with '#' are
# ignored.
# ---------------------------------------------------------------------------

_FAMILY_KEYS = {
    "exp_lambda": {"lambda_re", "lambda_im"},
    "cosine": {"a_re", "a_im", "b_re", "b_im"},
    "erf_scaled": {"lambda_re", "lambda_im"},
    "p_exp_q": {"p_coeffs", "q_coeffs", "c_re", "c_im"},
}


def _parse_coeff_list(text):
    coeffs = []
    for pair in text.split(","):
        pair = pair.strip()
        if not pair:
            continue
        try:
            re_s, im_s = pair.split(":")
            coeffs.append(complex(float(re_s), float(im_s)))
        except ValueError as exc:
            raise ConfigError(f"bad coefficient pair {pair!r}") from exc
    if not coeffs:
        raise ConfigError("empty coefficient list")
    return coeffs


def _format_coeff_list(coeffs):
    return ",".join(f"{c.real!r}:{c.imag!r}" for c in coeffs)


def parse_function_config(text):
    """Build a catalog function from configuration text (strict keys)."""
    entries = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}")
        entries[key] = value.strip()

    family = entries.pop("family", None)
    if family is None:
        raise ConfigError("missing 'family' key")
    if family not in _FAMILY_KEYS:
        raise ConfigError(f"unknown family {family!r}")
    unknown = set(entries) - _FAMILY_KEYS[family]
    if unknown:
        raise ConfigError(f"unknown keys for family {family}: {sorted(unknown)}")

    def _complex_of(stem, default_im=0.0):
        try:
            re = float(entries.get(f"{stem}_re", 0.0))
            im = float(entries.get(f"{stem}_im", default_im))
        except ValueError as exc:
            raise ConfigError(f"bad numeric value for {stem}") from exc
        return complex(re, im)

    if family == "exp_lambda":
        return ExpLambda(_complex_of("lambda"))
    if family == "erf_scaled":
        return ErfScaled(_complex_of("lambda"))
    if family == "cosine":
        return Cosine(_complex_of("a"), _complex_of("b"))
    p = Poly(_parse_coeff_list(entries.get("p_coeffs", "")))
    q = Poly(_parse_coeff_list(entries.get("q_coeffs", "")))
    return PExpQ(p, q, _complex_of("c"))


def format_function_config(f):
    """Canonical configuration text for a catalog function."""
    lines = [f"family={f.family}"]
    if isinstance(f, (ExpLambda, ErfScaled)):
        lines += [f"lambda_re={f.lam.real!r}", f"lambda_im={f.lam.imag!r}"]
    elif isinstance(f, Cosine):
        lines += [f"a_re={f.a.real!r}", f"a_im={f.a.imag!r}",
                  f"b_re={f.b.real!r}", f"b_im={f.b.imag!r}"]
    elif isinstance(f, PExpQ):
        lines += [f"p_coeffs={_format_coeff_list(f.p.coeffs)}",
                  f"q_coeffs={_format_coeff_list(f.q.coeffs)}",
                  f"c_re={f.c.real!r}", f"c_im={f.c.imag!r}"]
    else:
        raise TypeError(f"not a catalog function: {f!r}")
    return "\n".join(lines) + "\n"
