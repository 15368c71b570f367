import pytest

from basindim import find_periodic_point, get_preset, PRESETS


@pytest.fixture(scope="session")
def cycles():
    """Attracting cycles of every preset, found once for the whole session."""
    out = {}
    for name, preset in PRESETS.items():
        out[name] = find_periodic_point(
            preset.function, preset.period, preset.newton_seed)
    return out


@pytest.fixture(scope="session")
def preset_of():
    return get_preset
