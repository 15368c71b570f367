"""Attracting basins, escaping sets and box-counting dimension for
entire-function families built from exponentials, cosines and integrals of
p * exp(q)."""

__version__ = "0.1.0"

from .catalog import (Cosine, ErfScaled, ExpLambda, PExpQ, Poly, SingularSet,
                      asymptotic_directions, format_function_config, order_of,
                      overflowed, parse_function_config, singular_values)
from .dynamics import (AttractingCycle, BasinField, EscapeParams, GridSpec,
                       LABEL_ESCAPED, LABEL_UNDECIDED, OrbitResult,
                       classify_grid, escape_membership, find_periodic_point,
                       iterate_orbit, multiplier_check, scan_seeds)
from .logspace import (HypothesisReport, ItineraryConfig, LogPoint,
                       escape_correspondence, estimate_beta, itinerary,
                       log_derivative_identity_check, log_orbit, log_transform,
                       verify_growth_bound, verify_koebe_bound)
from .boxdim import (CellSet, CoveringParams, DimensionFit, box_count,
                     cantor_fixture, covering_sum, extract_boundary,
                     fit_dimension, intersect_escaping,
                     iterated_covering_bound, koebe_shrink_factor,
                     segment_fixture, square_fixture)
from .presets import PRESETS, Preset, get_preset
