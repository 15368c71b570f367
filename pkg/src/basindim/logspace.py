"""Log-coordinate view of the catalog maps and sampled hypothesis checks.

The log view of f is w -> log f(e^w).  Everything here re-lifts through the
principal branch: each iterate of f is sent back to log coordinates
independently via Log z = log|z| + i Arg z with Arg in (-pi, pi], rather than
by analytic continuation along the orbit.  The real part log|f| is branch
independent, which is what the escape correspondence and both derivative
inequalities actually consume; branch ambiguity only ever shifts imaginary
parts by multiples of 2*pi and is flagged where it could matter.

The two sampled inequalities are

* the Koebe-type bound   |z f'(z)/f(z)| >= (log|f(z)| - s) / (4*pi)
  on samples with |f(z)| > e^s, and
* the growth bound       |z f'(z)/f(z)| >= beta * |Log f(z)|
  on samples with |f(z)| >= e^t.

Verification draws stratified uniform samples from a rectangle with a fixed
seed, so PASS/FAIL verdicts are reproducible.
"""

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .catalog import OVERFLOW_LIMIT, ZERO_FLOOR, singular_values
from .dynamics import EscapeParams, escape_flags

TWO_PI = 2.0 * math.pi
_LOG_OVERFLOW = math.log(OVERFLOW_LIMIT)


class EvalOverflowError(OverflowError):
    """exp(w) or f(exp(w)) left the trusted range."""


class TooFewSamplesError(ValueError):
    """The sample filter retained fewer points than the verification needs."""


@dataclass
class LogPoint:
    w: complex
    z: complex
    fw: complex
    valid: bool


def log_transform(f, w):
    """Log-coordinate image of w: z = exp(w), fw = Log f(z) (principal branch).

    ``valid`` is False when f(z) vanishes (no logarithm exists there).
    """
    w = complex(w)
    if w.real > _LOG_OVERFLOW:
        raise EvalOverflowError(f"exp(w) overflows for Re w = {w.real:g}")
    z = cmath.exp(w)
    fz = complex(f(z))
    if abs(fz) < ZERO_FLOOR:
        return LogPoint(w, z, 0j, False)
    if not np.isfinite(fz.real) or not np.isfinite(fz.imag):
        raise EvalOverflowError(f"f(exp(w)) overflowed at w = {w}")
    return LogPoint(w, z, cmath.log(fz), True)


def log_derivative_identity_check(f, w, step=1e-6):
    """Relative gap between a numerical derivative of the log view and z f'/f.

    Returns None (comparison skipped) when the point sits within 0.1 of the
    principal branch cut, where the finite difference would straddle a jump.
    The imaginary part of the difference is unwrapped to (-pi, pi] before
    dividing, so the comparison itself never crosses a sheet.
    """
    base = log_transform(f, w)
    if not base.valid:
        raise ZeroDivisionError(f"f(e^w) vanishes at w = {w}")
    if abs(base.fw.imag) > math.pi - 0.1:
        return None
    hi = log_transform(f, complex(w) + step)
    lo = log_transform(f, complex(w) - step)
    if not (hi.valid and lo.valid):
        raise ZeroDivisionError("finite-difference stencil hit a zero of f")
    diff = hi.fw - lo.fw
    im = math.remainder(diff.imag, TWO_PI)
    numeric = complex(diff.real, im) / (2.0 * step)
    exact = f.log_derivative(base.z)
    return abs(numeric - exact) / max(abs(exact), 1e-300)


def _safe_abs(z):
    """|z| with component overflow reported as inf instead of raising."""
    try:
        return abs(z)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class ItineraryConfig:
    """Horizontal strips of the log plane: index of w is floor((Im w - offset)/height)."""

    strip_height: float = TWO_PI
    strip_offset: float = 0.0

    def index_of(self, w):
        return int(math.floor((complex(w).imag - self.strip_offset) / self.strip_height))


class OrbitHitsZeroError(ArithmeticError):
    pass


def itinerary(f, w, n, cfg=ItineraryConfig()):
    """Strip indices of the principal-branch log coordinates of the orbit.

    The k-th entry is the strip of Log f^k(e^w), each iterate re-lifted
    independently.  Overflow truncates the list; a zero of f on the orbit is
    an error since no log coordinate exists there.
    """
    if n <= 0:
        return []
    w = complex(w)
    if w.real > _LOG_OVERFLOW:
        raise EvalOverflowError(f"exp(w) overflows for Re w = {w.real:g}")
    z = cmath.exp(w)
    out = []
    for _ in range(n):
        az = _safe_abs(z)
        if az < ZERO_FLOOR:
            raise OrbitHitsZeroError("orbit hit a zero of f; no log coordinate")
        if not np.isfinite(az) or az > OVERFLOW_LIMIT:
            break
        out.append(cfg.index_of(cmath.log(z)))
        z = complex(f(z))
    return out


def log_orbit(f, w, n):
    """Re-lifted log coordinates [Log e^w, Log f(e^w), ...], truncated at overflow."""
    w = complex(w)
    if w.real > _LOG_OVERFLOW:
        raise EvalOverflowError(f"exp(w) overflows for Re w = {w.real:g}")
    z = cmath.exp(w)
    out = []
    for _ in range(n + 1):
        az = _safe_abs(z)
        if az < ZERO_FLOOR or not np.isfinite(az) or az > OVERFLOW_LIMIT:
            break
        out.append(cmath.log(z))
        z = complex(f(z))
    return out


# ---------------------------------------------------------------------------
# Sampled hypothesis verification
# ---------------------------------------------------------------------------

@dataclass
class HypothesisReport:
    """Record of one sampled inequality check."""

    tag: str                    # 'koebe' | 'growth'
    params: dict
    region: tuple               # (re_min, re_max, im_min, im_max)
    seed: int
    samples_requested: int
    samples_tested: int
    violations: int
    worst_ratio: float
    worst_point: complex

    @property
    def passed(self):
        return self.violations == 0

    def to_json(self):
        payload = {
            "tag": self.tag,
            "params": self.params,
            "region": list(self.region),
            "seed": self.seed,
            "samples_requested": self.samples_requested,
            "samples_tested": self.samples_tested,
            "violations": self.violations,
            "worst_ratio": self.worst_ratio,
            "worst_point": {"re": self.worst_point.real, "im": self.worst_point.imag},
            "verdict": "PASS" if self.passed else "FAIL",
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def summary(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{self.tag}: {verdict}  ({self.violations} violations over "
                f"{self.samples_tested} samples, worst ratio {self.worst_ratio:.6g} "
                f"at {self.worst_point:.6g})")


def stratified_samples(region, count, seed):
    """Deterministic stratified-uniform complex samples over a rectangle.

    The rectangle is cut into a near-square grid of strata with one jittered
    point each; any remainder is drawn uniformly.  A fixed seed fixes the
    sample set exactly.
    """
    re0, re1, im0, im1 = region
    if not (re1 > re0 and im1 > im0):
        raise ValueError("degenerate sampling rectangle")
    rng = np.random.default_rng(seed)
    k = int(math.isqrt(count))
    pts = []
    if k >= 1:
        edges_x = np.linspace(re0, re1, k + 1)
        edges_y = np.linspace(im0, im1, k + 1)
        jitter = rng.random((k, k, 2))
        xs = edges_x[:-1][:, None] + jitter[:, :, 0] * (edges_x[1] - edges_x[0])
        ys = edges_y[:-1][None, :] + jitter[:, :, 1] * (edges_y[1] - edges_y[0])
        pts.append((xs + 1j * ys).ravel())
    rest = count - k * k
    if rest > 0:
        u = rng.random((rest, 2))
        pts.append(re0 + u[:, 0] * (re1 - re0) + 1j * (im0 + u[:, 1] * (im1 - im0)))
    return np.concatenate(pts)


def _ratio_report(f, z, keep, rhs, tag, params, region, seed, requested):
    z = z[keep]
    rhs = rhs[keep]
    if z.size < 100:
        raise TooFewSamplesError(
            f"only {z.size} samples survived the filter (need at least 100)")
    with np.errstate(over="ignore", invalid="ignore", under="ignore",
                     divide="ignore"):
        lhs = np.abs(f.log_derivative(z))
        ratio = np.where(rhs > 0, lhs / rhs, np.inf)
    violations = int(np.count_nonzero(lhs < rhs))
    worst = int(np.argmin(ratio))
    return HypothesisReport(
        tag=tag, params=params, region=tuple(region), seed=seed,
        samples_requested=requested, samples_tested=int(z.size),
        violations=violations, worst_ratio=float(ratio[worst]),
        worst_point=complex(z[worst]))


def koebe_offset_floor(f, search_radius=12.0):
    """Smallest offset s for which the Koebe-type bound can hold.

    The bound needs every singular value (and f(0)) inside the disk of
    radius e^s, so the floor is log of the largest of those moduli (at
    least 0).  Checks typically run with s a couple of units above this.
    """
    sv = singular_values(f, search_radius)
    top = max([1.0, abs(complex(f(0.0)))] + [abs(v) for v in sv.all_values()])
    return math.log(top)


def verify_koebe_bound(f, s, region, samples=10000, seed=0):
    """Check |z f'/f| >= (log|f| - s)/(4 pi) on samples with |f| > e^s."""
    z = stratified_samples(region, samples, seed)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        fz = np.asarray(f(z), dtype=complex)
        af = np.abs(fz)
    keep = np.isfinite(af) & (af <= OVERFLOW_LIMIT) & (af > math.exp(s))
    with np.errstate(invalid="ignore", divide="ignore"):
        rhs = (np.log(af) - s) / (4.0 * math.pi)
    return _ratio_report(f, z, keep, rhs, "koebe", {"s": s}, region, seed, samples)


def verify_growth_bound(f, beta, t, region, samples=10000, seed=0):
    """Check |z f'/f| >= beta * |Log f| on samples with |f| >= e^t."""
    z = stratified_samples(region, samples, seed)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        fz = np.asarray(f(z), dtype=complex)
        af = np.abs(fz)
    keep = np.isfinite(af) & (af <= OVERFLOW_LIMIT) & (af >= math.exp(t))
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        rhs = beta * np.abs(np.log(np.where(keep, fz, 1.0)))
    return _ratio_report(f, z, keep, rhs, "growth", {"beta": beta, "t": t},
                         region, seed, samples)


def estimate_beta(f, t, region, samples=10000, seed=0):
    """Empirical lower estimate of an admissible growth-bound constant.

    Minimum of |z f'/f| / |Log f| over samples with |f| >= e^t.  On a fixed
    sample set this is non-decreasing in t, because raising t only shrinks
    the set the minimum runs over.
    """
    z = stratified_samples(region, samples, seed)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        fz = np.asarray(f(z), dtype=complex)
        af = np.abs(fz)
    keep = np.isfinite(af) & (af <= OVERFLOW_LIMIT) & (af >= math.exp(t))
    z, fz = z[keep], fz[keep]
    if z.size < 100:
        raise TooFewSamplesError(
            f"only {z.size} samples survived the filter (need at least 100)")
    with np.errstate(over="ignore", invalid="ignore", under="ignore",
                     divide="ignore"):
        lhs = np.abs(f.log_derivative(z))
        denom = np.abs(np.log(fz))
        ratio = np.where(denom > 0, lhs / denom, np.inf)
    return float(np.min(ratio))


# ---------------------------------------------------------------------------
# Escape correspondence between plane and log coordinates
# ---------------------------------------------------------------------------

@dataclass
class EscapeComparison:
    plane: bool
    log_side: bool
    ambiguous: bool

    @property
    def agree(self):
        return self.plane == self.log_side


def escape_correspondence(f, w, params):
    """Escape verdicts for e^w computed plane-side and in log coordinates.

    The log side re-lifts every iterate via the principal branch and tests
    min Re >= log(modulus_floor) under the same settle/budget/early-stop
    rules.  Samples whose minimum sits within 1e-9 of the threshold on the
    log scale are flagged ambiguous (the two scales can round differently
    there).
    """
    w = complex(w)
    if w.real > _LOG_OVERFLOW:
        raise EvalOverflowError(f"exp(w) overflows for Re w = {w.real:g}")
    z0 = cmath.exp(w)
    esc, _, _, _, _ = escape_flags(f, np.array([z0]), params)
    plane = bool(esc[0])

    log_floor = math.log(params.modulus_floor)
    log_radius = math.log(params.escape_radius)
    z = z0
    min_re = math.inf
    log_side = None
    for n in range(params.n_max + 1):
        if n > 0:
            z = complex(f(z))
        az = _safe_abs(z)
        if az < ZERO_FLOOR:
            min_re = -math.inf
            break
        if not np.isfinite(az) or az > OVERFLOW_LIMIT:
            break
        re = cmath.log(z).real
        if n >= params.n_settle:
            min_re = min(min_re, re)
            if min_re < log_floor:
                break
        if re >= log_radius:
            break
    log_side = min_re >= log_floor
    ambiguous = abs(min_re - log_floor) < 1e-9 if np.isfinite(min_re) else False
    return EscapeComparison(plane=plane, log_side=log_side, ambiguous=ambiguous)
