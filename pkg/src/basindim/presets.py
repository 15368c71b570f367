"""Named presets carrying the study functions and their experiment defaults.

Each preset bundles a catalog function with the Newton seed and period of its
attracting cycle, the square window its basin pictures use, reference cycle
positions for regression, and the sampling rectangles used by the hypothesis
and escape-correspondence checks.  Regression values are quoted to the digits
the sources print; ``cosine2``'s reference point is +0.05463i (its attracting
cycle lies on the positive imaginary axis together with its partner near 4i).
"""

from dataclasses import dataclass, field

from .catalog import Cosine, ErfScaled, ExpLambda, PExpQ, Poly


@dataclass(frozen=True)
class Preset:
    name: str
    function: object
    period: int
    newton_seed: complex
    window: float                       # half width = half height, centered at 0
    reference_points: tuple             # printed cycle digits, phase order
    sample_rect: tuple                  # (re0, re1, im0, im1) for hypothesis sampling
    log_rect: tuple                     # rectangle in log coordinates
    growth_degree: int | None = None    # deg q when the growth bound applies


def _build():
    presets = {}
    presets["example1"] = Preset(
        name="example1",
        function=ErfScaled(-2.0),
        period=2,
        newton_seed=1.7 + 0.0j,
        window=2.8,
        reference_points=(1.7487 + 0.0j, -1.7487 + 0.0j),
        sample_rect=(-3.0, 3.0, 1.5, 9.0),
        log_rect=(0.2, 1.1, 0.9, 1.5),
        growth_degree=2,
    )
    presets["morosawa"] = Preset(
        name="morosawa",
        function=PExpQ(Poly([-0.14]), Poly([0, 0, -1]), 1.9j),
        period=2,
        newton_seed=0.8j,
        window=2.8,
        reference_points=(0.7868j, 1.7621j),
        sample_rect=(-3.0, 3.0, 1.5, 9.0),
        log_rect=(0.2, 1.1, 0.9, 1.5),
        growth_degree=2,
    )
    presets["cosine2"] = Preset(
        name="cosine2",
        function=Cosine(-0.15j, 4.15j),
        period=2,
        newton_seed=0.05j,
        window=8.0,
        reference_points=(0.05463j,),
        sample_rect=(-3.141592653589793, 3.141592653589793, 4.0, 12.0),
        log_rect=(0.2, 1.1, 0.9, 1.5),
    )
    presets["cosine3"] = Preset(
        name="cosine3",
        function=Cosine(-0.1j, 1.3 - 3.7j),
        period=3,
        newton_seed=0.2 - 0.2j,
        window=8.0,
        reference_points=(0.1662 - 0.2292j,),
        sample_rect=(-3.141592653589793, 3.141592653589793, 4.0, 12.0),
        log_rect=(0.2, 1.1, 0.9, 1.5),
    )
    presets["explambda"] = Preset(
        name="explambda",
        function=ExpLambda(0.2),
        period=1,
        newton_seed=0.3 + 0.0j,
        window=4.0,
        reference_points=(),
        sample_rect=(2.0, 12.0, -10.0, 10.0),
        log_rect=(1.5, 2.5, -0.4, 0.4),
        growth_degree=1,
    )
    return presets


PRESETS = _build()


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
