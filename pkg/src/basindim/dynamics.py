"""Orbits, attracting cycles, basin grids and escape-set membership.

Grid classification is the performance core.  Pixels are processed one grid
row at a time with the active set compacted as pixels resolve, and a worker
pool only ever distributes whole rows.  Because each row's computation never
depends on how rows are assigned to workers, output fields are bit-identical
for any worker count.

A pixel is labelled ``basin(j)`` by landing phase: when its orbit first stays
captured near cycle point ``m`` from step ``n`` on, the label is
``(m - n) mod p``, i.e. the cycle point its subsequence f^{kp} converges to.
Capture is only accepted after a verification lap of ``p`` further iterations
has contracted the distance, which protects against grazing passes near
repelling points.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import OVERFLOW_LIMIT

LABEL_UNDECIDED = -2
LABEL_ESCAPED = -1

_CAPTURE_FLOOR = 1e-9  # within this of a cycle point counts as contracted


class CycleError(ArithmeticError):
    """Newton cycle search failed (no convergence, wrong period, not attracting)."""


class MultiplierMismatchError(ArithmeticError):
    """Chain-rule and finite-difference multipliers disagree."""


@dataclass(frozen=True)
class GridSpec:
    """Rectangular pixel grid over a window of the plane.

    Pixel (i, j) has center
    ``center + ((i+0.5)/nx - 0.5)*2*half_width + 1j*((j+0.5)/ny - 0.5)*2*half_height``,
    so i runs along the real axis and j upward along the imaginary axis.
    """

    center: complex
    half_width: float
    half_height: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2x2 pixels")
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("window half sizes must be positive")

    def x_coords(self):
        i = np.arange(self.nx)
        return self.center.real + ((i + 0.5) / self.nx - 0.5) * 2.0 * self.half_width

    def y_coords(self):
        j = np.arange(self.ny)
        return self.center.imag + ((j + 0.5) / self.ny - 0.5) * 2.0 * self.half_height

    def row(self, j):
        """Complex pixel centers of row j (fixed imaginary part)."""
        y = self.center.imag + ((j + 0.5) / self.ny - 0.5) * 2.0 * self.half_height
        return self.x_coords() + 1j * y

    def pixel_center(self, i, j):
        return complex(self.x_coords()[i], self.y_coords()[j])

    def pixel_of(self, z):
        """(i, j) of the pixel containing z, or None when outside the window."""
        z = complex(z)
        fx = ((z.real - self.center.real) / (2.0 * self.half_width) + 0.5) * self.nx
        fy = ((z.imag - self.center.imag) / (2.0 * self.half_height) + 0.5) * self.ny
        i, j = int(np.floor(fx)), int(np.floor(fy))
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return i, j
        return None


@dataclass(frozen=True)
class AttractingCycle:
    """A verified attracting cycle: points in orbit order, chain-rule multiplier."""

    period: int
    points: tuple
    multiplier: complex
    newton_residual: float

    def validate(self, f):
        p = self.period
        if len(self.points) != p:
            raise CycleError("point count does not match the period")
        for j in range(p):
            nxt = self.points[(j + 1) % p]
            err = abs(f(self.points[j]) - nxt)
            if err > 1e-9 * max(1.0, abs(nxt)):
                raise CycleError(f"cycle does not close at index {j} (err {err:.3g})")
        for i in range(p):
            for j in range(i + 1, p):
                if abs(self.points[i] - self.points[j]) <= 1e-6:
                    raise CycleError("cycle points are not separated: period not minimal")
        if abs(self.multiplier) >= 1.0:
            raise CycleError(f"cycle is not attracting (|multiplier| = {abs(self.multiplier):.6g})")
        return self


@dataclass
class OrbitResult:
    """Outcome of iterating one starting point."""

    points: list
    outcome: str                # 'converged' | 'escaped' | 'undecided'
    basin_index: int | None = None
    escape_step: int | None = None
    steps_used: int = 0


@dataclass
class BasinField:
    """Per-pixel classification of a grid under one attracting cycle.

    ``labels[i, j]`` is a basin index in 0..period-1, ``LABEL_ESCAPED`` or
    ``LABEL_UNDECIDED``; ``iterations[i, j]`` is the step count at which the
    pixel resolved (the capture step for basins), or the budget if undecided.
    """

    grid: GridSpec
    period: int
    labels: np.ndarray
    iterations: np.ndarray

    def fraction(self, label):
        return float(np.count_nonzero(self.labels == label)) / self.labels.size


@dataclass(frozen=True)
class EscapeParams:
    """Finite-budget escape-proxy parameters.

    An orbit is accepted as escaping when the minimum of |f^n(z)| over
    n in [n_settle, n_reached] stays at or above ``modulus_floor``; crossing
    ``escape_radius`` (or overflowing) stops the iteration early as
    affirmative evidence.
    """

    modulus_floor: float
    n_settle: int = 1
    n_max: int = 256
    escape_radius: float = 1e10

    def __post_init__(self):
        if not (self.escape_radius >= self.modulus_floor >= 1.0):
            raise ValueError("need escape_radius >= modulus_floor >= 1")
        if not (0 <= self.n_settle < self.n_max):
            raise ValueError("need 0 <= n_settle < n_max")


@dataclass
class EscapeCertificate:
    escaping: bool
    min_step: int | None
    min_value: float | None
    stopped_step: int
    reason: str                 # 'radius' | 'overflow' | 'floor' | 'budget'


def find_periodic_point(f, period, seed, tol=1e-12, max_iter=200):
    """Attracting cycle of the given period by Newton iteration on f^p(z) - z.

    The derivative of the period map comes from the chain rule over exact
    per-step derivatives.  The result is validated: the cycle must close to
    1e-9, have pairwise-distinct points (minimal period) and multiplier
    modulus below 1.
    """
    if period < 1:
        raise ValueError("period must be at least 1")
    if tol < 1e-12:
        raise ValueError("tolerance below 1e-12 is not resolvable here")
    z = complex(seed)
    residual = np.inf
    for _ in range(max_iter):
        w = z
        dprod = 1.0 + 0.0j
        for _ in range(period):
            dprod = dprod * f.derivative(w)
            w = f(w)
        g = w - z
        residual = abs(g)
        if not np.isfinite(residual):
            raise CycleError(f"Newton iterate overflowed from seed {seed}")
        if residual <= tol:
            break
        gprime = dprod - 1.0
        if gprime == 0:
            raise CycleError("Newton derivative vanished")
        z = z - g / gprime
    else:
        raise CycleError(
            f"no period-{period} point within {max_iter} Newton steps from seed {seed} "
            f"(last residual {residual:.3g})")

    points = [z]
    for _ in range(period - 1):
        points.append(complex(f(points[-1])))
    multiplier = 1.0 + 0.0j
    for pt in points:
        multiplier *= complex(f.derivative(pt))
    cycle = AttractingCycle(period, tuple(points), multiplier, residual)
    return cycle.validate(f)


def multiplier_check(f, cycle, step=1e-6, rtol=1e-4):
    """|(f^p)'(z0)| by central differences; must match the chain rule."""
    z0 = cycle.points[0]

    def period_map(z):
        for _ in range(cycle.period):
            z = f(z)
        return z

    fd = (period_map(z0 + step) - period_map(z0 - step)) / (2.0 * step)
    fd_mod = abs(fd)
    chain_mod = abs(cycle.multiplier)
    if abs(fd_mod - chain_mod) > rtol * max(chain_mod, 1e-30):
        raise MultiplierMismatchError(
            f"finite-difference multiplier {fd_mod:.8g} disagrees with "
            f"chain rule {chain_mod:.8g}")
    return fd_mod


def _nearest_cycle_point(z, cycle_points):
    """(distance, index) arrays of the nearest cycle point for each entry of z."""
    d = np.abs(z - cycle_points[0])
    m = np.zeros(z.shape, dtype=np.int64)
    for j in range(1, len(cycle_points)):
        dj = np.abs(z - cycle_points[j])
        closer = dj < d
        d = np.where(closer, dj, d)
        m[closer] = j
    return d, m


def _iterate_block(f, z0, cycle, budget, capture_radius, escape_radius,
                   collect_points=False):
    """Shared engine: classify a 1-D block of starting points.

    Returns (labels, iterations) plus the orbit point list of entry 0 when
    ``collect_points`` is set (used by the scalar orbit API).
    """
    n_pts = z0.size
    labels = np.full(n_pts, LABEL_UNDECIDED, dtype=np.int16)
    iters = np.full(n_pts, budget, dtype=np.int32)
    points = [complex(z0[0])] if collect_points else None

    period = cycle.period if cycle is not None else 0
    cyc = np.asarray(cycle.points, dtype=complex) if cycle is not None else None

    ids = np.arange(n_pts)
    z = z0.astype(complex, copy=True)
    pend_m = np.full(n_pts, -1, dtype=np.int64)
    pend_n = np.zeros(n_pts, dtype=np.int64)
    pend_d = np.zeros(n_pts, dtype=np.float64)

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        az = np.abs(z)
    dead = ~np.isfinite(az) | (az > escape_radius)
    if dead.any():
        labels[ids[dead]] = LABEL_ESCAPED
        iters[ids[dead]] = 0
        keep = ~dead
        ids, z = ids[keep], z[keep]
        pend_m, pend_n, pend_d = pend_m[keep], pend_n[keep], pend_d[keep]
    if cycle is not None and ids.size:
        d, m = _nearest_cycle_point(z, cyc)
        arm = d < capture_radius
        pend_m[arm] = m[arm]
        pend_n[arm] = 0
        pend_d[arm] = d[arm]

    n = 0
    while ids.size:
        n += 1
        if n > budget:
            # Only verification laps armed within the budget may finish past it.
            keep = (pend_m >= 0) & (pend_n <= budget) & (n <= pend_n + period)
            if not keep.any():
                break
            ids, z = ids[keep], z[keep]
            pend_m, pend_n, pend_d = pend_m[keep], pend_n[keep], pend_d[keep]

        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            z = np.asarray(f(z), dtype=complex)
            az = np.abs(z)
        if collect_points and ids.size and ids[0] == 0 and np.isfinite(az[0]) \
                and az[0] <= OVERFLOW_LIMIT:
            points.append(complex(z[0]))

        dead = ~np.isfinite(az) | (az > escape_radius)
        resolved = dead.copy()
        if dead.any():
            labels[ids[dead]] = LABEL_ESCAPED
            iters[ids[dead]] = n

        if cycle is not None:
            due = (pend_m >= 0) & (n - pend_n == period) & ~dead
            if due.any():
                d_now = np.abs(z[due] - cyc[pend_m[due]])
                ok = (d_now < pend_d[due]) | (d_now <= _CAPTURE_FLOOR)
                due_idx = np.flatnonzero(due)
                good = due_idx[ok]
                labels[ids[good]] = (pend_m[good] - pend_n[good]) % period
                iters[ids[good]] = pend_n[good]
                resolved[good] = True
                failed = due_idx[~ok]
                pend_m[failed] = -1
            alive = ~resolved
            if alive.any():
                d, m = _nearest_cycle_point(z[alive], cyc)
                arm_local = (pend_m[alive] < 0) & (d < capture_radius)
                alive_idx = np.flatnonzero(alive)[arm_local]
                pend_m[alive_idx] = m[arm_local]
                pend_n[alive_idx] = n
                pend_d[alive_idx] = d[arm_local]

        if resolved.any():
            keep = ~resolved
            ids, z = ids[keep], z[keep]
            pend_m, pend_n, pend_d = pend_m[keep], pend_n[keep], pend_d[keep]

    if collect_points:
        return labels, iters, points
    return labels, iters


def iterate_orbit(f, z, cycle=None, budget=1000, capture_radius=1e-4,
                  escape_radius=1e10):
    """Iterate one point; every failure mode is an outcome, never an exception."""
    z0 = np.array([complex(z)])
    labels, iters, points = _iterate_block(
        f, z0, cycle, budget, capture_radius, escape_radius, collect_points=True)
    label, steps = int(labels[0]), int(iters[0])
    if label >= 0:
        return OrbitResult(points, "converged", basin_index=label, steps_used=steps)
    if label == LABEL_ESCAPED:
        return OrbitResult(points, "escaped", escape_step=steps, steps_used=steps)
    return OrbitResult(points, "undecided", steps_used=budget)


def classify_grid(f, cycle, grid, budget=1000, capture_radius=1e-4,
                  escape_radius=1e10, workers=1):
    """Classify every pixel of the grid; deterministic for any worker count."""
    if budget < cycle.period:
        raise ValueError("budget must cover at least one period")
    labels = np.empty((grid.nx, grid.ny), dtype=np.int16)
    iters = np.empty((grid.nx, grid.ny), dtype=np.int32)

    def run_row(j):
        return j, _iterate_block(f, grid.row(j), cycle, budget,
                                 capture_radius, escape_radius)

    if workers <= 1:
        results = [run_row(j) for j in range(grid.ny)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_row, range(grid.ny)))
    for j, (row_labels, row_iters) in results:
        labels[:, j] = row_labels
        iters[:, j] = row_iters
    return BasinField(grid, cycle.period, labels, iters)


def escape_flags(f, starts, params):
    """Vectorized escape-proxy test over a 1-D array of starting points.

    Returns (escaping, min_value, min_step, stop_step, reason_code) arrays;
    reason codes are 0=budget, 1=radius, 2=overflow, 3=floor.  Results for
    each entry depend only on that entry, so any chunking of the input is
    equivalent.
    """
    starts = np.asarray(starts, dtype=complex).ravel()
    n_pts = starts.size
    escaping = np.zeros(n_pts, dtype=bool)
    min_val = np.full(n_pts, np.inf)
    min_step = np.full(n_pts, -1, dtype=np.int64)
    stop_step = np.zeros(n_pts, dtype=np.int64)
    reason = np.zeros(n_pts, dtype=np.int8)

    ids = np.arange(n_pts)
    z = starts.copy()
    for n in range(params.n_max + 1):
        if not ids.size:
            break
        if n > 0:
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                z = np.asarray(f(z), dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            az = np.abs(z)

        blown = ~np.isfinite(az) | (az > OVERFLOW_LIMIT)
        radius_hit = ~blown & (az >= params.escape_radius)
        in_window = n >= params.n_settle
        if in_window:
            better = ~blown & (az < min_val[ids])
            sel = ids[better]
            min_val[sel] = az[better]
            min_step[sel] = n
        floor_hit = in_window & (min_val[ids] < params.modulus_floor) & ~blown \
            & ~radius_hit

        done = blown | radius_hit | floor_hit
        if n == params.n_max:
            done = np.ones_like(done)
        if done.any():
            sel = ids[done]
            stop_step[sel] = n
            reason[sel] = np.where(
                blown[done], 2, np.where(radius_hit[done], 1,
                                         np.where(floor_hit[done], 3, 0)))
            escaping[sel] = min_val[sel] >= params.modulus_floor
            keep = ~done
            ids, z = ids[keep], z[keep]
    return escaping, min_val, min_step, stop_step, reason


_REASONS = {0: "budget", 1: "radius", 2: "overflow", 3: "floor"}


def escape_membership(f, z, params):
    """Finite-budget escape test for one point, with a certificate."""
    esc, mv, ms, ss, rc = escape_flags(f, np.array([complex(z)]), params)
    return EscapeCertificate(
        escaping=bool(esc[0]),
        min_step=int(ms[0]) if ms[0] >= 0 else None,
        min_value=float(mv[0]) if np.isfinite(mv[0]) else None,
        stopped_step=int(ss[0]),
        reason=_REASONS[int(rc[0])],
    )


def scan_seeds(f, period, grid, top_k=5, escape_radius=1e10):
    """Coarse-grid minima of |f^p(z) - z|, usable as Newton seed candidates."""
    best = []
    for j in range(grid.ny):
        z = grid.row(j)
        w = z.copy()
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            for _ in range(period):
                w = np.asarray(f(w), dtype=complex)
            res = np.abs(w - z)
        res = np.where(np.isfinite(res), res, np.inf)
        for i in np.argsort(res)[:top_k]:
            if np.isfinite(res[i]):
                best.append((float(res[i]), complex(z[i])))
    best.sort(key=lambda t: t[0])
    return [z for _, z in best[:top_k]]


def label_mirror_agreement(field, swap, conjugate=False):
    """Fraction of pixels whose label matches the (palette-swapped) mirror pixel.

    With ``conjugate`` False the mirror is z -> -z (pixel (i, j) against
    (nx-1-i, ny-1-j)); with True it is z -> conj(z) (pixel (i, j) against
    (i, ny-1-j)).  ``swap`` maps each basin label to its expected partner;
    escaped and undecided must match themselves.
    """
    labels = field.labels
    mirrored = labels[::1 if conjugate else -1, ::-1]
    expected = mirrored.copy()
    for src, dst in swap.items():
        expected[mirrored == src] = dst
    return float(np.count_nonzero(labels == expected)) / labels.size
