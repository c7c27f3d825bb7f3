"""Hand-rolled static SVG panels: line plots and Q-function heat maps.

No plotting dependency; every coordinate is written through fixed
precision formatting so the same report always yields the same bytes.
"""

import math
from pathlib import Path

import numpy as np

from .errors import ConfigError

WIDTH = 640.0
HEIGHT = 420.0
LEFT, RIGHT, TOP, BOTTOM = 72.0, 610.0, 46.0, 370.0

PALETTE = ("#1f4e8c", "#c44f1f", "#2e7d32", "#6a3d9a")

# dark-to-bright sequential stops for the heat maps
HEAT_STOPS = (
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
)


def _f(x):
    return format(float(x), ".2f")


def _label(x):
    return format(float(x), ".6g")


def _nice_step(span, target):
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            return mult * mag
    return 10.0 * mag


def _ticks(lo, hi, target=5):
    if hi <= lo:
        return [lo]
    step = _nice_step(hi - lo, target)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def _text(x, y, s, size=12, anchor="middle", extra=""):
    return (
        f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" '
        f'font-size="{size}" text-anchor="{anchor}"{extra}>{s}</text>'
    )


def _segments(xs, ys):
    """Split a curve at non-finite points."""
    run = []
    for x, y in zip(xs, ys):
        if math.isfinite(x) and math.isfinite(y):
            run.append((x, y))
        elif run:
            yield run
            run = []
    if run:
        yield run


def line_panel(path, x, series, *, title="", xlabel="t (cycles)",
               ylabel="energy", log_y=False):
    """Polyline chart. ``series`` holds (name, values, dashed) triples;
    dashed curves are drawn with a 6,4 dash pattern."""
    x = np.asarray(x, dtype=float)
    prepared = []
    for name, values, dashed in series:
        y = np.asarray(values, dtype=float).copy()
        if log_y:
            y[~(y > 0.0)] = np.nan
            y = np.log10(y)
        if np.any(np.isfinite(y)):
            prepared.append((name, y, dashed))
    if not prepared:
        raise ConfigError("nothing to plot: no finite values in any series")

    ymin = min(np.nanmin(y) for _, y, _ in prepared)
    ymax = max(np.nanmax(y) for _, y, _ in prepared)
    if ymax == ymin:
        ymax += 0.5
        ymin -= 0.5
    pad = 0.05 * (ymax - ymin)
    ymin -= pad
    ymax += pad
    xmin, xmax = float(x.min()), float(x.max())
    if xmax == xmin:
        xmax += 1.0

    def sx(v):
        return LEFT + (v - xmin) / (xmax - xmin) * (RIGHT - LEFT)

    def sy(v):
        return BOTTOM - (v - ymin) / (ymax - ymin) * (BOTTOM - TOP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:g}" '
        f'height="{HEIGHT:g}" viewBox="0 0 {WIDTH:g} {HEIGHT:g}">',
        f'<rect width="{WIDTH:g}" height="{HEIGHT:g}" fill="#ffffff"/>',
        _text((LEFT + RIGHT) / 2, 24, title, size=14),
    ]

    if log_y:
        lo_dec = math.floor(ymin)
        yticks = [v for v in range(int(lo_dec), int(math.ceil(ymax)) + 1)
                  if ymin <= v <= ymax]
        ytick_labels = [_label(10.0 ** v) for v in yticks]
    else:
        yticks = _ticks(ymin, ymax)
        ytick_labels = [_label(v) for v in yticks]
    for v, lab in zip(yticks, ytick_labels):
        yy = sy(v)
        parts.append(
            f'<line x1="{_f(LEFT)}" y1="{_f(yy)}" x2="{_f(RIGHT)}" y2="{_f(yy)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(_text(LEFT - 8, yy + 4, lab, size=11, anchor="end"))
    for v in _ticks(xmin, xmax, target=6):
        xx = sx(v)
        parts.append(
            f'<line x1="{_f(xx)}" y1="{_f(BOTTOM)}" x2="{_f(xx)}" y2="{_f(BOTTOM + 5)}" '
            f'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(_text(xx, BOTTOM + 20, _label(v), size=11))
    parts.append(
        f'<rect x="{_f(LEFT)}" y="{_f(TOP)}" width="{_f(RIGHT - LEFT)}" '
        f'height="{_f(BOTTOM - TOP)}" fill="none" stroke="#444444" stroke-width="1"/>'
    )
    parts.append(_text((LEFT + RIGHT) / 2, HEIGHT - 10, xlabel))
    parts.append(_text(18, (TOP + BOTTOM) / 2,
                       ylabel + (" (log)" if log_y else ""), size=12,
                       extra=f' transform="rotate(-90 18 {_f((TOP + BOTTOM) / 2)})"'))

    for i, (name, y, dashed) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        for seg in _segments(x, y):
            pts = " ".join(f"{_f(sx(px))},{_f(sy(py))}" for px, py in seg)
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"{dash}/>'
            )
        ly = TOP + 16 + 16 * i
        parts.append(
            f'<line x1="{_f(LEFT + 12)}" y1="{_f(ly - 4)}" x2="{_f(LEFT + 40)}" '
            f'y2="{_f(ly - 4)}" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        parts.append(_text(LEFT + 46, ly, name, size=11, anchor="start"))

    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path


def _heat_color(u):
    u = min(max(u, 0.0), 1.0)
    for (u0, c0), (u1, c1) in zip(HEAT_STOPS, HEAT_STOPS[1:]):
        if u <= u1:
            w = (u - u0) / (u1 - u0)
            r, g, b = (round(a + w * (b_ - a)) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


def heat_panel(path, panels, *, title=""):
    """Side-by-side Q-function maps sharing one color scale.

    ``panels`` holds (subtitle, grid, values) triples; values are laid
    out as values[iy, ix] over the grid axis.
    """
    if not panels:
        raise ConfigError("heat panel needs at least one snapshot")
    vmax = max(float(np.max(vals)) for _, _, vals in panels)
    if vmax <= 0:
        vmax = 1.0
    side = 280.0
    gap = 50.0
    left0 = 64.0
    top0 = 64.0
    width = left0 + len(panels) * side + (len(panels) - 1) * gap + 24.0
    height = top0 + side + 56.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect width="{width:g}" height="{height:g}" fill="#ffffff"/>',
        _text(width / 2, 26, title, size=14),
    ]
    for k, (subtitle, grid, vals) in enumerate(panels):
        vals = np.asarray(vals, dtype=float)
        points = grid.points
        cell = side / points
        x0 = left0 + k * (side + gap)
        parts.append(
            f'<rect x="{_f(x0)}" y="{_f(top0)}" width="{_f(side)}" '
            f'height="{_f(side)}" fill="{_heat_color(0.0)}"/>'
        )
        for iy in range(points):
            # grid rows run from -extent upward; SVG y runs downward
            ry = top0 + side - (iy + 1) * cell
            for ix in range(points):
                u = vals[iy, ix] / vmax
                if u < 0.002:
                    continue
                parts.append(
                    f'<rect x="{_f(x0 + ix * cell)}" y="{_f(ry)}" '
                    f'width="{_f(cell + 0.05)}" height="{_f(cell + 0.05)}" '
                    f'fill="{_heat_color(u)}"/>'
                )
        parts.append(
            f'<rect x="{_f(x0)}" y="{_f(top0)}" width="{_f(side)}" '
            f'height="{_f(side)}" fill="none" stroke="#444444" stroke-width="1"/>'
        )
        e = grid.extent
        for frac, v in ((0.0, -e), (0.5, 0.0), (1.0, e)):
            parts.append(_text(x0 + frac * side, top0 + side + 18, _label(v), size=11))
            parts.append(
                _text(x0 - 6, top0 + side - frac * side + 4, _label(v), size=11,
                      anchor="end")
            )
        parts.append(_text(x0 + side / 2, top0 + side + 38, "Re a", size=12))
        parts.append(_text(x0 + side / 2, top0 - 12, subtitle, size=12))
    parts.append(
        _text(16, top0 + side / 2, "Im a", size=12,
              extra=f' transform="rotate(-90 16 {_f(top0 + side / 2)})"')
    )
    parts.append(_text(width / 2, height - 8,
                       f"shared scale, max Q = {_label(vmax)}", size=11))
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
