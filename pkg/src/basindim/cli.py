"""Command-line entry point: one subcommand per experiment.

Subcommands
-----------
periodic    find an attracting cycle (Newton, optional coarse seed scan)
render      classify a pixel grid and write a PPM basin picture
verify      sampled checks of the derivative inequalities; beta estimation
dimension   boundary extraction, escape filtering, box-counting fits
covering    shrink factor, radius-power sums and the iterated cover bound

Every run writes a plain-text manifest echoing the fully resolved
configuration, so it can be re-run exactly.  Outputs carry no timestamps;
identical configurations produce byte-identical artifacts for any worker
count.
"""

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from .catalog import (AsymptoticLimitError, Cosine, ErfScaled, ExpLambda,
                      PExpQ, Poly, format_function_config)
from .boxdim import (CoveringParams, CoveringPreconditionError, box_count,
                     cantor_fixture, covering_sum, extract_boundary,
                     fit_dimension, intersect_escaping,
                     iterated_covering_bound, koebe_shrink_factor,
                     segment_fixture, square_fixture)
from .dynamics import (CycleError, EscapeParams, GridSpec, classify_grid,
                       find_periodic_point, multiplier_check, scan_seeds)
from .logspace import (TooFewSamplesError, estimate_beta, koebe_offset_floor,
                       verify_growth_bound, verify_koebe_bound)
from .presets import PRESETS, get_preset
from .render import write_metadata, write_ppm

_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?P<i>i)?$")


def parse_complex(text):
    """Complex literals in the forms '1.5', '-2', '0-0.15i', '1.9i', '-i'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    m = _COMPLEX_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse complex literal {text!r}")
    re_s, im_s, has_i = m.group("re"), m.group("im"), m.group("i")
    if has_i:
        if im_s is not None:
            return complex(float(re_s or 0.0), float(im_s))
        if re_s is None:
            raise ValueError(f"cannot parse complex literal {text!r}")
        return complex(0.0, float(re_s))
    if im_s is not None or re_s is None:
        raise ValueError(f"cannot parse complex literal {text!r}")
    return complex(float(re_s), 0.0)


def _parse_coeffs(text):
    out = []
    for pair in text.split(","):
        pair = pair.strip()
        if not pair:
            continue
        re_s, im_s = pair.split(":")
        out.append(complex(float(re_s), float(im_s)))
    return out


def _complex_arg(text):
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_function_args(sub):
    sub.add_argument("--preset", choices=sorted(PRESETS),
                     help="named function with its study defaults")
    sub.add_argument("--family",
                     choices=["exp_lambda", "cosine", "erf_scaled", "p_exp_q"])
    sub.add_argument("--lambda", dest="lam", type=_complex_arg,
                     help="parameter of exp_lambda / erf_scaled")
    sub.add_argument("--a", type=_complex_arg, help="cosine amplitude")
    sub.add_argument("--b", type=_complex_arg, help="cosine offset")
    sub.add_argument("--c", type=_complex_arg, default=0j,
                     help="additive constant of p_exp_q")
    sub.add_argument("--p-coeffs", help="re:im pairs, constant first")
    sub.add_argument("--q-coeffs", help="re:im pairs, constant first")


def _resolve_function(args, parser):
    if args.preset:
        return get_preset(args.preset)
    if not args.family:
        parser.error("either --preset or --family is required")
    try:
        if args.family == "exp_lambda":
            if args.lam is None:
                parser.error("--lambda is required for exp_lambda")
            return ExpLambda(args.lam)
        if args.family == "erf_scaled":
            if args.lam is None:
                parser.error("--lambda is required for erf_scaled")
            return ErfScaled(args.lam)
        if args.family == "cosine":
            if args.a is None or args.b is None:
                parser.error("--a and --b are required for cosine")
            return Cosine(args.a, args.b)
        if args.p_coeffs is None or args.q_coeffs is None:
            parser.error("--p-coeffs and --q-coeffs are required for p_exp_q")
        return PExpQ(Poly(_parse_coeffs(args.p_coeffs)),
                     Poly(_parse_coeffs(args.q_coeffs)), args.c)
    except ValueError as exc:
        parser.error(str(exc))


def _function_of(obj):
    from .presets import Preset
    return obj.function if isinstance(obj, Preset) else obj


def _write_manifest(out_dir, subcommand, f, settings, outputs):
    lines = [f"tool=basindim {__version__}", f"subcommand={subcommand}"]
    lines += format_function_config(f).strip().splitlines()
    lines += [f"{k}={v}" for k, v in sorted(settings.items())]
    lines += [f"output={name}" for name in outputs]
    (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _cycle_payload(cycle, fd_modulus):
    return {
        "period": cycle.period,
        "points": [{"re": z.real, "im": z.imag} for z in cycle.points],
        "multiplier_modulus": abs(cycle.multiplier),
        "multiplier": {"re": cycle.multiplier.real, "im": cycle.multiplier.imag},
        "finite_difference_modulus": fd_modulus,
        "newton_residual": cycle.newton_residual,
    }


def _find_cycle(args, f, parser):
    seed = args.seed
    if seed is None and getattr(args, "scan", False):
        window = args.window if args.window is not None else 4.0
        grid = GridSpec(args.center, window, window, 128, 128)
        candidates = scan_seeds(f, args.period, grid, top_k=5)
        if not candidates:
            raise CycleError("seed scan found no finite candidates")
        last = None
        for cand in candidates:
            try:
                return find_periodic_point(f, args.period, cand)
            except CycleError as exc:
                last = exc
        raise last
    if seed is None:
        parser.error("--seed is required (or pass --scan)")
    return find_periodic_point(f, args.period, seed)


def cmd_periodic(args, parser):
    spec = _resolve_function(args, parser)
    f = _function_of(spec)
    if args.period is None:
        if args.preset:
            args.period = get_preset(args.preset).period
        else:
            parser.error("--period is required")
    if args.seed is None and not args.scan and args.preset:
        args.seed = get_preset(args.preset).newton_seed
    try:
        cycle = _find_cycle(args, f, parser)
        fd = multiplier_check(f, cycle)
    except CycleError as exc:
        print(f"cycle search failed: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = _cycle_payload(cycle, fd)
    (out_dir / "cycle.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    _write_manifest(out_dir, "periodic", f, {
        "period": args.period, "seed": args.seed, "scan": args.scan,
        "workers": args.workers,
    }, ["cycle.json"])
    print(json.dumps(payload, sort_keys=True))
    return 0


def _grid_of(args, default_window):
    window = args.window if args.window is not None else default_window
    return GridSpec(args.center, window, window, args.nx, args.ny)


def cmd_render(args, parser):
    spec = _resolve_function(args, parser)
    f = _function_of(spec)
    preset = get_preset(args.preset) if args.preset else None
    period = args.period or (preset.period if preset else None)
    if period is None:
        parser.error("--period is required")
    seed = args.seed or (preset.newton_seed if preset else None)
    if seed is None:
        parser.error("--seed is required")
    try:
        cycle = find_periodic_point(f, period, seed)
    except CycleError as exc:
        print(f"cycle search failed: {exc}", file=sys.stderr)
        return 1
    grid = _grid_of(args, preset.window if preset else 2.8)
    field = classify_grid(f, cycle, grid, budget=args.budget,
                          capture_radius=args.capture,
                          escape_radius=args.resc, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_ppm(field, out_dir / "field.ppm")
    write_metadata(field, out_dir / "field.txt", extra={
        "budget": args.budget, "capture_radius": args.capture,
        "escape_radius": args.resc,
    })
    fd = multiplier_check(f, cycle)
    (out_dir / "cycle.json").write_text(
        json.dumps(_cycle_payload(cycle, fd), sort_keys=True, indent=2) + "\n")
    _write_manifest(out_dir, "render", f, {
        "period": period, "seed": seed, "budget": args.budget,
        "capture": args.capture, "resc": args.resc,
        "window": grid.half_width, "center": args.center,
        "nx": args.nx, "ny": args.ny, "workers": args.workers,
    }, ["field.ppm", "field.txt", "cycle.json"])
    print(f"wrote {out_dir / 'field.ppm'} "
          f"(undecided {field.fraction(-2):.3%}, escaped {field.fraction(-1):.3%})")
    return 0


def cmd_verify(args, parser):
    spec = _resolve_function(args, parser)
    f = _function_of(spec)
    preset = get_preset(args.preset) if args.preset else None
    if args.rect:
        rect = tuple(float(v) for v in args.rect.split(","))
        if len(rect) != 4:
            parser.error("--rect needs re0,re1,im0,im1")
    elif preset is not None:
        rect = preset.sample_rect
    else:
        parser.error("--rect is required without a preset")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    failed = False
    outputs = []
    try:
        if args.check in ("koebe", "all"):
            s = args.s
            if s is None:
                s = koebe_offset_floor(f) + 2.0
            rep = verify_koebe_bound(f, s, rect, samples=args.samples,
                                     seed=args.rng_seed)
            reports.append(rep)
        if args.check in ("growth", "all"):
            beta = args.beta
            if beta is None:
                parser.error("--beta is required for the growth check")
            rep = verify_growth_bound(f, beta, args.t, rect,
                                      samples=args.samples, seed=args.rng_seed)
            reports.append(rep)
        if args.sweep_t:
            lo, hi = (int(v) for v in args.sweep_t.split(":"))
            rows = []
            for t in range(lo, hi + 1):
                est = estimate_beta(f, float(t), rect, samples=args.samples,
                                    seed=args.rng_seed)
                rows.append((t, est))
                print(f"t={t:3d}  beta_estimate={est:.6g}")
            sweep_path = out_dir / "beta_sweep.csv"
            sweep_path.write_text(
                "t,beta_estimate\n" +
                "".join(f"{t},{est!r}\n" for t, est in rows))
            outputs.append("beta_sweep.csv")
    except TooFewSamplesError as exc:
        print(f"verification aborted: {exc}", file=sys.stderr)
        return 1

    for k, rep in enumerate(reports):
        name = f"report_{rep.tag}.json"
        (out_dir / name).write_text(rep.to_json() + "\n")
        outputs.append(name)
        print(rep.summary())
        if not rep.passed:
            failed = True
            print(f"worst point: {rep.worst_point}", file=sys.stderr)
    _write_manifest(out_dir, "verify", f, {
        "check": args.check, "rect": ",".join(repr(v) for v in rect),
        "s": args.s, "beta": args.beta, "t": args.t,
        "samples": args.samples, "rng_seed": args.rng_seed,
        "sweep_t": args.sweep_t, "workers": args.workers,
    }, outputs)
    return 1 if failed else 0


_FIXTURES = {"segment": segment_fixture, "square": square_fixture,
             "cantor": cantor_fixture}


def _dyadic_sizes(spec_text, fallback):
    if not spec_text:
        return fallback
    return [int(v) for v in spec_text.split(",")]


def cmd_dimension(args, parser):
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.fixture:
        cells = _FIXTURES[args.fixture]()
        sizes = _dyadic_sizes(args.sizes, [4, 8, 16, 32, 64, 128, 256, 512])
        counts = box_count(cells, sizes)
        fit = fit_dimension(sizes, counts)
        _write_dimension_outputs(out_dir, args.fixture, sizes, counts, fit,
                                 cells.count)
        print(f"{args.fixture}: slope={fit.slope:.4f} r2={fit.r_squared:.5f}")
        settings = {"fixture": args.fixture,
                    "sizes": ",".join(str(s) for s in sizes)}
        lines = [f"tool=basindim {__version__}", "subcommand=dimension"]
        lines += [f"{k}={v}" for k, v in sorted(settings.items())]
        (out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")
        return 0

    spec = _resolve_function(args, parser)
    f = _function_of(spec)
    preset = get_preset(args.preset) if args.preset else None
    period = args.period or (preset.period if preset else None)
    seed = args.seed or (preset.newton_seed if preset else None)
    if period is None or seed is None:
        parser.error("--period and --seed (or --preset) are required")
    try:
        cycle = find_periodic_point(f, period, seed)
    except CycleError as exc:
        print(f"cycle search failed: {exc}", file=sys.stderr)
        return 1
    grid = _grid_of(args, preset.window if preset else 2.8)
    field = classify_grid(f, cycle, grid, budget=args.budget,
                          capture_radius=args.capture,
                          escape_radius=args.resc, workers=args.workers)
    boundary = extract_boundary(field)
    sizes = _dyadic_sizes(args.sizes, [1, 2, 4, 8, 16, 32, 64, 128, 256])
    floors = [float(v) for v in args.m_floor.split(",")]
    outputs = []
    for floor in floors:
        params = EscapeParams(modulus_floor=floor, n_settle=args.n_settle,
                              n_max=args.esc_budget, escape_radius=args.resc)
        cells = intersect_escaping(boundary, f, params, workers=args.workers)
        tag = f"M{floor:g}"
        (out_dir / f"cells_{tag}.txt").write_text(cells.to_text())
        outputs.append(f"cells_{tag}.txt")
        if cells.count == 0:
            summary = {"modulus_floor": floor, "cells": 0, "empty": True}
            (out_dir / f"dim_{tag}.json").write_text(
                json.dumps(summary, sort_keys=True, indent=2) + "\n")
            outputs.append(f"dim_{tag}.json")
            print(f"M={floor:g}: empty intersection")
            continue
        counts = box_count(cells, sizes)
        fit = fit_dimension(sizes, counts)
        _write_dimension_outputs(out_dir, tag, sizes, counts, fit, cells.count,
                                 modulus_floor=floor)
        outputs += [f"dim_{tag}.csv", f"dim_{tag}.json"]
        print(f"M={floor:g}: cells={cells.count} slope={fit.slope:.4f} "
              f"r2={fit.r_squared:.4f}")
    _write_manifest(out_dir, "dimension", f, {
        "period": period, "seed": seed, "budget": args.budget,
        "capture": args.capture, "resc": args.resc,
        "window": grid.half_width, "nx": args.nx, "ny": args.ny,
        "m_floor": args.m_floor, "n_settle": args.n_settle,
        "esc_budget": args.esc_budget,
        "sizes": ",".join(str(s) for s in sizes), "workers": args.workers,
    }, outputs)
    return 0


def _write_dimension_outputs(out_dir, tag, sizes, counts, fit, cell_count,
                             modulus_floor=None):
    csv_lines = ["epsilon,count"] + [f"{e},{n}" for e, n in zip(sizes, counts)]
    (out_dir / f"dim_{tag}.csv").write_text("\n".join(csv_lines) + "\n")
    summary = {
        "cells": cell_count,
        "empty": False,
        "slope": fit.slope,
        "r_squared": fit.r_squared,
        "scales_used": fit.scales,
        "counts_used": fit.counts,
    }
    if modulus_floor is not None:
        summary["modulus_floor"] = modulus_floor
    (out_dir / f"dim_{tag}.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n")


def cmd_covering(args, parser):
    try:
        shrink, fits = koebe_shrink_factor(args.m_floor, args.radius, args.offset)
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    print(f"shrink factor 4*pi/(M-8-R) = {shrink:.8g} "
          f"({'<=' if fits else '>'} 13/M = {13.0 / args.m_floor:.8g})")
    try:
        params = CoveringParams(mu=args.mu, beta=args.beta, m=args.m_tracts,
                                modulus=args.m_floor, radius=args.radius,
                                alpha=args.alpha, offset=args.offset)
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    result = covering_sum(params, args.k_max)
    print(f"radius-power sum over |k|<={args.k_max}: partial={result.partial_sum:.8g} "
          f"tail<={result.tail_bound:.8g}")
    print(f"series verdict: {'divergent' if result.divergent else 'convergent'}")
    if not result.divergent:
        print(f"cover inequality m*sum <= (r/M)^alpha: "
              f"{result.check_lhs:.8g} <= {result.check_rhs:.8g} -> "
              f"{result.verdict.upper()}")
        if result.verdict == "pass":
            bounds = [iterated_covering_bound(params, n, args.initial_sum,
                                              k_max=args.k_max)
                      for n in range(args.n_steps + 1)]
            decreasing = all(a > b for a, b in zip(bounds, bounds[1:]))
            print(f"iterated bound n=0..{args.n_steps}: first={bounds[0]:.6g} "
                  f"last={bounds[-1]:.6g} strictly_decreasing={decreasing}")
    else:
        print("cover inequality not evaluated (divergent series)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="basindim",
        description="attracting basins, escaping sets and box dimension "
                    "for entire-function families")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--rng-seed", type=int, default=7)

    p = subs.add_parser("periodic", parents=[common],
                        help="find an attracting cycle")
    _add_function_args(p)
    p.add_argument("--period", type=int)
    p.add_argument("--seed", type=_complex_arg)
    p.add_argument("--scan", action="store_true",
                   help="scan a coarse grid for seed candidates")
    p.add_argument("--window", type=float)
    p.add_argument("--center", type=_complex_arg, default=0j)
    p.set_defaults(func=cmd_periodic)

    p = subs.add_parser("render", parents=[common],
                        help="render a basin field to PPM")
    _add_function_args(p)
    p.add_argument("--period", type=int)
    p.add_argument("--seed", type=_complex_arg)
    p.add_argument("--window", type=float)
    p.add_argument("--center", type=_complex_arg, default=0j)
    p.add_argument("--nx", type=int, default=512)
    p.add_argument("--ny", type=int, default=512)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--capture", type=float, default=1e-4)
    p.add_argument("--resc", type=float, default=1e10)
    p.set_defaults(func=cmd_render)

    p = subs.add_parser("verify", parents=[common],
                        help="sampled hypothesis checks")
    _add_function_args(p)
    p.add_argument("--check", choices=["koebe", "growth", "all", "none"],
                   default="all")
    p.add_argument("--s", type=float, help="Koebe offset (default: auto)")
    p.add_argument("--beta", type=float)
    p.add_argument("--t", type=float, default=3.0)
    p.add_argument("--rect", help="re0,re1,im0,im1 sampling rectangle")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--sweep-t", help="lo:hi inclusive sweep of beta estimates")
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("dimension", parents=[common],
                        help="box-dimension study of boundary/escape sets")
    _add_function_args(p)
    p.add_argument("--fixture", choices=sorted(_FIXTURES),
                   help="calibration fixture instead of a dynamical field")
    p.add_argument("--period", type=int)
    p.add_argument("--seed", type=_complex_arg)
    p.add_argument("--window", type=float)
    p.add_argument("--center", type=_complex_arg, default=0j)
    p.add_argument("--nx", type=int, default=1024)
    p.add_argument("--ny", type=int, default=1024)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--capture", type=float, default=1e-4)
    p.add_argument("--resc", type=float, default=1e10)
    p.add_argument("--m-floor", default="5,10,20,40",
                   help="comma-separated escape modulus floors")
    p.add_argument("--n-settle", type=int, default=1)
    p.add_argument("--esc-budget", type=int, default=64,
                   help="iteration budget of the escape proxy")
    p.add_argument("--sizes", help="comma-separated dyadic box sizes")
    p.set_defaults(func=cmd_dimension)

    p = subs.add_parser("covering", parents=[common],
                        help="covering-sum checks")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--m-tracts", type=int, default=1)
    p.add_argument("--m-floor", type=float, required=True,
                   help="half-plane cutoff M")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=10000)
    p.add_argument("--n-steps", type=int, default=20)
    p.add_argument("--initial-sum", type=float, default=1.0)
    p.set_defaults(func=cmd_covering)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (CycleError, AsymptoticLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
