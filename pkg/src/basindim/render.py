"""PPM export of basin fields with a fixed palette and plain-text sidecar.

Palette: basin j gets the fully saturated hue j/p, escaped pixels are white,
undecided pixels are black.  Rows are written top-down (largest imaginary
part first), so the image matches the usual orientation of the plane.
"""

import colorsys

import numpy as np

from .dynamics import LABEL_ESCAPED, LABEL_UNDECIDED


def basin_rgb(label, period):
    """Palette color for one label as an (r, g, b) byte triple."""
    if label == LABEL_ESCAPED:
        return (255, 255, 255)
    if label == LABEL_UNDECIDED:
        return (0, 0, 0)
    r, g, b = colorsys.hsv_to_rgb(label / period, 1.0, 1.0)
    return (round(255 * r), round(255 * g), round(255 * b))


def palette_map(period):
    return {**{j: basin_rgb(j, period) for j in range(period)},
            LABEL_ESCAPED: (255, 255, 255), LABEL_UNDECIDED: (0, 0, 0)}


def ppm_bytes(field):
    """Binary P6 image of a basin field (deterministic bytes)."""
    nx, ny = field.grid.nx, field.grid.ny
    lut = np.zeros((field.period + 2, 3), dtype=np.uint8)
    for j in range(field.period):
        lut[j] = basin_rgb(j, field.period)
    lut[field.period] = (255, 255, 255)     # escaped
    lut[field.period + 1] = (0, 0, 0)       # undecided
    idx = field.labels.copy()
    idx[idx == LABEL_ESCAPED] = field.period
    idx[idx == LABEL_UNDECIDED] = field.period + 1
    # labels are indexed [i, j] with j upward; image rows run top-down
    rows = lut[idx.T[::-1, :]]
    header = f"P6\n{nx} {ny}\n255\n".encode("ascii")
    return header + rows.tobytes()


def write_ppm(field, path):
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(field))


def metadata_text(field, extra=None):
    """Plain-text sidecar describing the window, palette and run parameters."""
    g = field.grid
    lines = [
        f"center_re={g.center.real!r}",
        f"center_im={g.center.imag!r}",
        f"half_width={g.half_width!r}",
        f"half_height={g.half_height!r}",
        f"nx={g.nx}",
        f"ny={g.ny}",
        f"period={field.period}",
    ]
    for label, rgb in sorted(palette_map(field.period).items()):
        name = {LABEL_ESCAPED: "escaped", LABEL_UNDECIDED: "undecided"}.get(
            label, f"basin_{label}")
        lines.append(f"palette_{name}={rgb[0]},{rgb[1]},{rgb[2]}")
    if extra:
        lines += [f"{k}={v}" for k, v in sorted(extra.items())]
    return "\n".join(lines) + "\n"


def write_metadata(field, path, extra=None):
    with open(path, "w") as fh:
        fh.write(metadata_text(field, extra))
