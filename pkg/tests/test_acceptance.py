"""Acceptance suite: the full criteria battery at the stated tolerances.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
The covering-inequality search (criterion 5, second clause) documents a
parameter regime where the checked inequality cannot hold at any searched
cutoff; that test fails by construction and the analysis lives in the
repository notes, outside the package.
"""

import json
import math
import time

import numpy as np
import pytest

from basindim.boxdim import (CoveringParams, box_count, cantor_fixture,
                             covering_sum, extract_boundary, fit_dimension,
                             intersect_escaping, iterated_covering_bound,
                             segment_fixture, square_fixture)
from basindim.catalog import ErfScaled, singular_values
from basindim.cli import main
from basindim.dynamics import (EscapeParams, GridSpec, LABEL_UNDECIDED,
                               classify_grid, find_periodic_point,
                               iterate_orbit, label_mirror_agreement,
                               multiplier_check)
from basindim.logspace import (escape_correspondence, estimate_beta,
                               koebe_offset_floor, verify_growth_bound,
                               verify_koebe_bound)
from basindim.presets import PRESETS, get_preset
from basindim.render import ppm_bytes

SQRT_PI = math.sqrt(math.pi)
FIGURE_PRESETS = ("example1", "morosawa", "cosine2", "cosine3")
GROWTH_PRESETS = ("example1", "morosawa", "explambda")


def _report(tag, ok, detail):
    print(f"[{tag}] {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def fields_512(cycles):
    out = {}
    for name in FIGURE_PRESETS:
        preset = get_preset(name)
        grid = GridSpec(0j, preset.window, preset.window, 512, 512)
        start = time.perf_counter()
        field = classify_grid(preset.function, cycles[name], grid, budget=2000)
        blob = ppm_bytes(field)
        out[name] = (field, time.perf_counter() - start, blob)
    return out


def test_c1_cycle_regression():
    problems = []
    details = []
    for name in FIGURE_PRESETS:
        preset = get_preset(name)
        start = time.perf_counter()
        cycle = find_periodic_point(preset.function, preset.period,
                                    preset.newton_seed)
        fd = multiplier_check(preset.function, cycle, rtol=1e-4)
        elapsed = time.perf_counter() - start
        for ref, found in zip(preset.reference_points, cycle.points):
            if abs(found - ref) >= 1e-3:
                problems.append(f"{name}: {found} vs printed {ref}")
        if abs(cycle.multiplier) >= 1.0:
            problems.append(f"{name}: multiplier {abs(cycle.multiplier)}")
        if abs(fd - abs(cycle.multiplier)) > 1e-4 * abs(cycle.multiplier):
            problems.append(f"{name}: finite-difference multiplier mismatch")
        if elapsed >= 1.0:
            problems.append(f"{name}: took {elapsed:.2f}s")
        details.append(f"{name} {elapsed * 1e3:.0f}ms")
    _report("C1 cycle regression", not problems,
            "; ".join(problems) if problems else ", ".join(details))
    assert not problems, problems


def test_c2_singular_values(cycles):
    problems = []
    start = time.perf_counter()

    sv = singular_values(ErfScaled(-2.0), 12.0)
    vals = sorted(sv.asymptotic_values, key=lambda v: v.real)
    if abs(vals[0] + SQRT_PI) >= 1e-8 or abs(vals[1] - SQRT_PI) >= 1e-8:
        problems.append(f"erf map singular values {vals}")

    for name in ("cosine2", "cosine3"):
        f = get_preset(name).function
        got = set(singular_values(f).critical_values)
        if got != {f.b + f.a, f.b - f.a}:
            problems.append(f"{name}: critical values {got}")

    morosawa = get_preset("morosawa").function
    for v in singular_values(morosawa).all_values():
        res = iterate_orbit(morosawa, v, cycles["morosawa"], budget=500)
        if res.outcome != "converged" or res.basin_index != 1:
            problems.append(f"morosawa singular value {v}: {res.outcome}")

    f2m = ErfScaled(-2.0)
    for z, expect in ((SQRT_PI, 0), (-SQRT_PI, 1)):
        res = iterate_orbit(f2m, z, cycles["example1"], budget=200)
        if res.outcome != "converged" or res.basin_index != expect:
            problems.append(f"point {z:+.4f}: basin {res.basin_index}")

    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        problems.append(f"took {elapsed:.1f}s (budget 5s)")
    _report("C2 singular values", not problems,
            "; ".join(problems) if problems else f"{elapsed:.2f}s total")
    assert not problems, problems


def test_c3_figure_reproduction(cycles, fields_512):
    problems = []
    details = []
    for name in FIGURE_PRESETS:
        field, elapsed, _ = fields_512[name]
        undecided = field.fraction(LABEL_UNDECIDED)
        if elapsed >= 60.0:
            problems.append(f"{name}: render took {elapsed:.0f}s")
        if undecided > 0.05:
            problems.append(f"{name}: undecided {undecided:.2%}")
        for j, pt in enumerate(cycles[name].points):
            idx = field.grid.pixel_of(pt)
            if idx is None or field.labels[idx] != j:
                problems.append(f"{name}: cycle point {j} mislabeled")
        details.append(f"{name} {elapsed:.1f}s undecided {undecided:.2%}")
    mirror = label_mirror_agreement(fields_512["example1"][0], {0: 1, 1: 0})
    if mirror < 0.99:
        problems.append(f"mirror agreement {mirror:.4f}")
    details.append(f"mirror {mirror:.4f}")
    _report("C3 figure reproduction", not problems,
            "; ".join(problems) if problems else ", ".join(details))
    assert not problems, problems


def test_c4_hypothesis_suite():
    problems = []
    for name, preset in PRESETS.items():
        s = koebe_offset_floor(preset.function) + 2.0
        rep = verify_koebe_bound(preset.function, s, preset.sample_rect,
                                 samples=10000, seed=7)
        if not rep.passed:
            problems.append(f"{name}: koebe bound {rep.violations} violations")
    for name in GROWTH_PRESETS:
        preset = get_preset(name)
        beta = preset.growth_degree / 8.0
        rep = verify_growth_bound(preset.function, beta, 5.0,
                                  preset.sample_rect, samples=10000, seed=7)
        if not rep.passed:
            problems.append(f"{name}: growth bound {rep.violations} violations")
        values = [estimate_beta(preset.function, float(t), preset.sample_rect,
                                samples=10000, seed=7) for t in range(3, 9)]
        if any(b < a - 1e-15 for a, b in zip(values, values[1:])):
            problems.append(f"{name}: beta estimates not monotone {values}")
    _report("C4 hypothesis suite", not problems,
            "; ".join(problems) if problems else
            f"koebe x{len(PRESETS)}, growth x{len(GROWTH_PRESETS)}, sweeps ok")
    assert not problems, problems


def test_c5_covering_series_behavior():
    problems = []
    one = CoveringParams(mu=2.0, beta=0.25, m=2, modulus=math.exp(20),
                         radius=1.0, alpha=1.0)
    if covering_sum(one, 2000).verdict != "divergent":
        problems.append("alpha=1 not reported divergent")
    for alpha in (1.1, 1.5, 2.0):
        params = CoveringParams(mu=2.0, beta=0.25, m=2, modulus=math.exp(20),
                                radius=1.0, alpha=alpha)
        if not math.isfinite(covering_sum(params, 2000).tail_bound):
            problems.append(f"alpha={alpha} not reported convergent")
    base = covering_sum(CoveringParams(mu=2.0, beta=0.25, m=2,
                                       modulus=math.exp(20), radius=1.0,
                                       alpha=1.5), 2000)
    doubled = covering_sum(CoveringParams(mu=2.0, beta=0.25, m=2,
                                          modulus=math.exp(20), radius=1.0,
                                          alpha=1.5), 4000)
    reference = (doubled.partial_sum - base.partial_sum) + doubled.tail_bound
    if abs(base.tail_bound - reference) > 0.01 * reference:
        problems.append("tail bound off by more than 1% against doubling")
    _report("C5a covering series", not problems,
            "; ".join(problems) if problems else
            "divergent at 1, convergent at 1.1/1.5/2, tail within 1%")
    assert not problems, problems


def test_c5_covering_inequality_search():
    """Search M = e^{5k}, k <= 10, for a passing cover inequality.

    At mu=2, beta=0.25, m=2, r=1, alpha=1.5 the inequality requires
    (log M)^(alpha-1) to absorb m*(39*mu/beta)^alpha ~ 1.1e4, i.e.
    log M ~ 5e7; every searched cutoff is short by three orders of
    magnitude, so no exhibited M can exist.  Kept failing on purpose.
    """
    found = None
    ratios = []
    for k in range(1, 11):
        params = CoveringParams(mu=2.0, beta=0.25, m=2, modulus=math.exp(5 * k),
                                radius=1.0, alpha=1.5)
        result = covering_sum(params, 2000)
        ratios.append(result.check_lhs / result.check_rhs)
        if result.verdict == "pass":
            found = params
            break
    _report("C5b covering inequality search", found is not None,
            f"best lhs/rhs over M=e^5..e^50 is {min(ratios):.1f} (need <= 1)")
    assert found is not None, (
        "no M in {e^5, ..., e^50} passes the cover inequality at "
        f"beta=0.25 (lhs/rhs ratios {['%.0f' % r for r in ratios]}); "
        "the radius-sum constant m*(39*mu/beta)^alpha ~ 1.1e4 forces "
        "log M ~ 5e7, far beyond the searched range")
    bounds = [iterated_covering_bound(found, n, 1.0) for n in range(21)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


def test_c6_dimension_calibration():
    problems = []
    sizes = [4, 8, 16, 32, 64, 128, 256, 512]
    cases = [
        ("segment", segment_fixture(2048), 1.0),
        ("square", square_fixture(2048), 2.0),
        ("cantor", cantor_fixture(2187, 7), math.log(2) / math.log(3)),
    ]
    details = []
    for name, cells, expect in cases:
        fit = fit_dimension(sizes, box_count(cells, sizes))
        if abs(fit.slope - expect) > 0.05:
            problems.append(f"{name}: slope {fit.slope:.4f} vs {expect:.4f}")
        if fit.r_squared < 0.99:
            problems.append(f"{name}: r^2 {fit.r_squared:.4f}")
        details.append(f"{name} {fit.slope:.3f} (r2 {fit.r_squared:.4f})")
    _report("C6 dimension calibration", not problems,
            "; ".join(problems) if problems else ", ".join(details))
    assert not problems, problems


def test_c7_dimension_contrast(cycles):
    problems = []
    sizes = [1, 2, 4, 8, 16, 32, 64, 128, 256]
    sweep = (5.0, 10.0, 20.0, 40.0)
    slopes = {}
    timings = []
    for name in ("example1", "morosawa"):
        preset = get_preset(name)
        grid = GridSpec(0j, 2.8, 2.8, 1024, 1024)
        t0 = time.perf_counter()
        field = classify_grid(preset.function, cycles[name], grid, budget=2000)
        boundary = extract_boundary(field)
        build = time.perf_counter() - t0
        slopes[name] = {}
        for floor in sweep:
            t1 = time.perf_counter()
            params = EscapeParams(modulus_floor=floor, n_settle=1, n_max=64)
            cells = intersect_escaping(boundary, preset.function, params)
            if cells.count == 0:
                slopes[name][floor] = 0.0
            else:
                fit = fit_dimension(sizes, box_count(cells, sizes))
                slopes[name][floor] = fit.slope
            point_time = build + (time.perf_counter() - t1)
            timings.append(point_time)
            if point_time >= 600.0:
                problems.append(f"{name} M={floor:g}: {point_time:.0f}s")

    matched_floor = 20.0
    a = slopes["example1"][matched_floor]
    b = slopes["morosawa"][matched_floor]
    if not a > b:
        problems.append(f"contrast failed at M={matched_floor:g}: {a:.4f} <= {b:.4f}")
    morosawa_seq = [slopes["morosawa"][m] for m in sweep]
    if any(y > x + 1e-12 for x, y in zip(morosawa_seq, morosawa_seq[1:])):
        problems.append(f"morosawa sweep not non-increasing: {morosawa_seq}")
    detail = (f"M=20 contrast {a:.3f} > {b:.3f}; morosawa sweep "
              f"{['%.3f' % s for s in morosawa_seq]}; max point "
              f"{max(timings):.0f}s")
    _report("C7 dimension contrast", not problems,
            "; ".join(problems) if problems else detail)
    assert not problems, problems


def test_c8_log_coordinate_correspondence():
    problems = []
    params = EscapeParams(modulus_floor=5.0, n_settle=1, n_max=64)
    for name, preset in PRESETS.items():
        rng = np.random.default_rng(29)
        re0, re1, im0, im1 = preset.log_rect
        disagreements = 0
        flagged = 0
        for _ in range(100):
            w = complex(rng.uniform(re0, re1), rng.uniform(im0, im1))
            cmp = escape_correspondence(preset.function, w, params)
            if cmp.ambiguous:
                flagged += 1
            elif not cmp.agree:
                disagreements += 1
        if disagreements:
            problems.append(f"{name}: {disagreements} disagreements")
    _report("C8 log correspondence", not problems,
            "; ".join(problems) if problems else
            f"{len(PRESETS)} presets x 100 samples agree")
    assert not problems, problems


def test_c9_determinism(tmp_path):
    problems = []
    render_blobs = []
    dim_blobs = []
    for workers in (1, 4, 8):
        rout = tmp_path / f"render_w{workers}"
        code = main(["render", "--preset", "example1", "--nx", "128",
                     "--ny", "128", "--budget", "500",
                     "--workers", str(workers), "--out", str(rout)])
        assert code == 0
        render_blobs.append((rout / "field.ppm").read_bytes() +
                            (rout / "cycle.json").read_bytes())
        dout = tmp_path / f"dim_w{workers}"
        code = main(["dimension", "--preset", "morosawa", "--nx", "128",
                     "--ny", "128", "--budget", "400", "--m-floor", "5,10",
                     "--esc-budget", "48", "--sizes", "1,2,4,8,16,32",
                     "--workers", str(workers), "--out", str(dout)])
        assert code == 0
        dim_blobs.append(b"".join(
            (dout / name).read_bytes()
            for name in ("dim_M5.csv", "dim_M5.json", "dim_M10.csv",
                         "dim_M10.json")))
    if not (render_blobs[0] == render_blobs[1] == render_blobs[2]):
        problems.append("PPM/JSON bytes differ across worker counts")
    if not (dim_blobs[0] == dim_blobs[1] == dim_blobs[2]):
        problems.append("CSV/JSON bytes differ across worker counts")
    _report("C9 determinism", not problems,
            "; ".join(problems) if problems else
            "byte-identical across workers 1/4/8")
    assert not problems, problems
