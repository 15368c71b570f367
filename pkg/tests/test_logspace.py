"""Log-coordinate transform, hypothesis sampling, itineraries, escape match."""

import cmath
import math

import numpy as np
import pytest

from basindim.catalog import Cosine, ErfScaled, ExpLambda
from basindim.dynamics import EscapeParams
from basindim.logspace import (ItineraryConfig, OrbitHitsZeroError,
                               TooFewSamplesError, escape_correspondence,
                               estimate_beta, itinerary, koebe_offset_floor,
                               log_derivative_identity_check, log_orbit,
                               log_transform, stratified_samples,
                               verify_growth_bound, verify_koebe_bound)

Z0 = 1.7487089650231857


def test_log_transform_exp():
    lp = log_transform(ExpLambda(1.0), 1.0)
    assert lp.valid
    assert lp.fw == pytest.approx(math.e)
    assert lp.fw.imag == 0.0


def test_log_transform_cycle_point_consistency():
    f = ErfScaled(-2.0)
    lp = log_transform(f, cmath.log(Z0))
    assert lp.valid
    assert abs(cmath.exp(lp.fw) - f(Z0)) <= 1e-8 * abs(f(Z0))


def test_log_transform_zero_of_f():
    # cos(2*pi) rounds to exactly 1, so cos(z) - 1 vanishes exactly there
    lp = log_transform(Cosine(1.0, -1.0), math.log(2 * math.pi))
    assert not lp.valid


def test_log_transform_principal_branch():
    rng = np.random.default_rng(4)
    f = Cosine(-0.15j, 4.15j)
    for _ in range(100):
        w = complex(rng.uniform(0.2, 1.1), rng.uniform(0.9, 1.5))
        lp = log_transform(f, w)
        if not lp.valid:
            continue
        assert -math.pi < lp.fw.imag <= math.pi
        assert abs(cmath.exp(lp.fw) - f(lp.z)) <= 1e-8 * abs(f(lp.z))


def test_identity_check_exp_closed_form():
    gap = log_derivative_identity_check(ExpLambda(1.0), 0.5)
    assert gap is not None and gap <= 1e-6


def test_identity_check_cosine():
    gap = log_derivative_identity_check(Cosine(1.0, 3.0), 0.3 + 0.2j)
    assert gap is not None and gap <= 1e-4


def test_identity_check_branch_cut_flag():
    # exp(w) = pi*i gives f = e^{i pi} = -1, squarely on the branch cut
    w = cmath.log(math.pi) + 1j * math.pi / 2
    assert log_derivative_identity_check(ExpLambda(1.0), w) is None


def test_koebe_bound_exp_closed_form_region():
    rep = verify_koebe_bound(ExpLambda(1.0), 1.0, (2.0, 10.0, -10.0, 10.0),
                             samples=10000, seed=1)
    assert rep.passed
    assert rep.worst_ratio >= 1.0


def test_koebe_bound_too_few_samples():
    with pytest.raises(TooFewSamplesError):
        verify_koebe_bound(ExpLambda(1.0), 50.0, (2.0, 10.0, -10.0, 10.0),
                           samples=2000, seed=1)


def test_growth_bound_exp():
    rep = verify_growth_bound(ExpLambda(1.0), 0.125, 3.0,
                              (2.0, 14.0, -10.0, 10.0), samples=10000, seed=1)
    assert rep.passed


def test_growth_bound_erf_family(preset_of):
    preset = preset_of("example1")
    rep = verify_growth_bound(preset.function, 0.25, 3.0, preset.sample_rect,
                              samples=10000, seed=1)
    assert rep.passed


def test_growth_bound_absurd_beta_fails(preset_of):
    preset = preset_of("example1")
    rep = verify_growth_bound(preset.function, 1e6, 3.0, preset.sample_rect,
                              samples=10000, seed=1)
    assert not rep.passed
    assert rep.worst_ratio < 1e-3


def test_growth_bound_monotone_in_beta(preset_of):
    preset = preset_of("morosawa")
    strong = verify_growth_bound(preset.function, 0.5, 4.0, preset.sample_rect,
                                 samples=8100, seed=3)
    weak = verify_growth_bound(preset.function, 0.2, 4.0, preset.sample_rect,
                               samples=8100, seed=3)
    if strong.passed:
        assert weak.passed
    assert weak.worst_ratio >= strong.worst_ratio


def test_estimate_beta_values(preset_of):
    est = estimate_beta(ErfScaled(-2.0), 5.0, preset_of("example1").sample_rect,
                        samples=10000, seed=2)
    assert est >= 0.25
    est_exp = estimate_beta(ExpLambda(1.0), 8.0, (2.0, 20.0, -10.0, 10.0),
                            samples=10000, seed=2)
    assert 0.8 <= est_exp <= 1.5
    est_cos = estimate_beta(Cosine(-0.15j, 4.15j), 4.0,
                            preset_of("cosine2").sample_rect,
                            samples=10000, seed=2)
    assert est_cos > 0.0


def test_estimate_beta_monotone_in_t(preset_of):
    preset = preset_of("example1")
    values = [estimate_beta(preset.function, float(t), preset.sample_rect,
                            samples=10000, seed=2) for t in range(3, 9)]
    for a, b in zip(values, values[1:]):
        assert b >= a - 1e-15


def test_koebe_offset_floor_values():
    assert koebe_offset_floor(ExpLambda(0.2)) == pytest.approx(0.0)
    assert koebe_offset_floor(ErfScaled(-2.0)) == pytest.approx(
        math.log(math.sqrt(math.pi)))


def test_stratified_samples_deterministic():
    a = stratified_samples((0, 1, 0, 1), 500, seed=9)
    b = stratified_samples((0, 1, 0, 1), 500, seed=9)
    assert (a == b).all()
    assert a.size == 500
    assert (a.real >= 0).all() and (a.real <= 1).all()


def test_itinerary_real_orbit_all_zero():
    assert itinerary(ExpLambda(0.2), 0.0, 6) == [0, 0, 0, 0, 0, 0]


def test_itinerary_empty_for_zero_length():
    assert itinerary(ExpLambda(0.2), 0.0, 0) == []


def test_itinerary_of_cycle_is_eventually_periodic(cycles):
    cycle = cycles["example1"]
    w = cmath.log(cycle.points[0])
    cfg = ItineraryConfig(strip_height=1.0)
    seq = itinerary(ErfScaled(-2.0), w, 10, cfg)
    # the period-2 cycle alternates between the two half-axes
    assert seq[0::2] == [seq[0]] * 5
    assert seq[1::2] == [seq[1]] * 5
    assert seq[0] != seq[1]


def test_itinerary_orbit_hits_zero():
    with pytest.raises(OrbitHitsZeroError):
        itinerary(Cosine(1.0, -1.0), math.log(2 * math.pi), 4)


def test_itinerary_overflow_truncates():
    f = ErfScaled(2.0)
    seq = itinerary(f, cmath.log(5j), 10)
    assert 0 < len(seq) < 10


def test_log_orbit_tracks_iterates():
    f = ErfScaled(-2.0)
    w0 = 0.4 + 0.3j
    orbit = log_orbit(f, w0, 5)
    z = cmath.exp(w0)
    for wk in orbit:
        assert abs(cmath.exp(wk) - z) <= 1e-12 * max(1.0, abs(z))
        assert -math.pi < wk.imag <= math.pi
        z = complex(f(z))


@pytest.mark.parametrize("name", ["example1", "morosawa", "cosine2",
                                  "cosine3", "explambda"])
def test_escape_correspondence(name, preset_of):
    preset = preset_of(name)
    rng = np.random.default_rng(13)
    re0, re1, im0, im1 = preset.log_rect
    params = EscapeParams(modulus_floor=5.0, n_settle=1, n_max=64)
    for _ in range(100):
        w = complex(rng.uniform(re0, re1), rng.uniform(im0, im1))
        cmp = escape_correspondence(preset.function, w, params)
        if not cmp.ambiguous:
            assert cmp.agree
