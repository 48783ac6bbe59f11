"""Deterministic SVG figures of a piecewise objective and its first two derivatives."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import InvalidConfigError
from .hermite import PiecewiseObjective
from .storage import atomic_write_text

PANEL_W, PANEL_H = 320, 220
MARGIN = 44
SAMPLES = 1200
TITLES = ("f", "f'", "f''")


def _num(v: float) -> str:
    return f"{v:.6g}"


def _panel(ox, oy, xs, ys, title, xlim, guides=()):
    lo, hi = float(np.min(ys)), float(np.max(ys))
    for gval in guides:
        lo, hi = min(lo, gval), max(hi, gval)
    if hi - lo < 1e-300:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    w, h = PANEL_W - MARGIN - 10, PANEL_H - 2 * 24
    x0, y0 = ox + MARGIN, oy + 24

    def px(x):
        return x0 + (x - xlim[0]) / (xlim[1] - xlim[0]) * w

    def py(y):
        return y0 + (hi - y) / (hi - lo) * h

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    out = [
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#000" stroke-width="0.8"/>',
        f'<text x="{x0 + w / 2:.2f}" y="{oy + 16}" text-anchor="middle" font-size="12">{title}</text>',
        f'<text x="{x0 - 4}" y="{y0 + 9}" text-anchor="end" font-size="8">{_num(hi)}</text>',
        f'<text x="{x0 - 4}" y="{y0 + h}" text-anchor="end" font-size="8">{_num(lo)}</text>',
        f'<text x="{x0}" y="{y0 + h + 12}" font-size="8">{_num(xlim[0])}</text>',
        f'<text x="{x0 + w}" y="{y0 + h + 12}" text-anchor="end" font-size="8">{_num(xlim[1])}</text>',
    ]
    for gval in guides:
        yy = py(gval)
        out.append(
            f'<line x1="{x0}" y1="{yy:.2f}" x2="{x0 + w}" y2="{yy:.2f}" stroke="#555" stroke-dasharray="2,3" stroke-width="0.8"/>'
        )
    out.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{pts}"/>')
    return out


def infer_eps(obj: PiecewiseObjective) -> float:
    """``|g|`` at the last interior knot, which equals ``eps`` up to the factor ``2 f_K``."""
    return abs(obj.knots[-2].g)


def figure_svg(obj: PiecewiseObjective, eps: Optional[float] = None, xrange: Optional[Sequence[float]] = None,
               zoom_iterations: int = 10) -> str:
    """Six panels in two rows: ``f, f', f''`` over ``xrange`` (default ``[0, x_K]``) and over ``[0, x_zoom]``.

    Dotted horizontal lines at ``+-eps`` are drawn on the top first-derivative
    panel.  For a 2-D objective the ``x`` part is drawn.
    """
    xs = obj.xs
    core = xs[1:-1]  # drop the two prolongation knots
    if xrange is None:
        xrange = (float(core[0]), float(core[-1]))
    a, b = float(xrange[0]), float(xrange[1])
    if not b > a:
        raise InvalidConfigError(f"empty plot range [{a}, {b}]")
    zoom = (float(core[0]), float(core[min(zoom_iterations, len(core) - 1)]))
    eps = infer_eps(obj) if eps is None else float(eps)
    parts = []
    for row, lim in enumerate(((a, b), zoom)):
        grid = np.linspace(lim[0], lim[1], SAMPLES)
        for col in range(3):
            vals = np.atleast_1d(obj.eval1d(grid, col))
            guides = (eps, -eps) if (row == 0 and col == 1) else ()
            title = f"{TITLES[col]} on [{_num(lim[0])}, {_num(lim[1])}]"
            parts += _panel(col * PANEL_W, row * PANEL_H, grid, vals, title, lim, guides)
    W, H = 3 * PANEL_W, 2 * PANEL_H
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{W}" height="{H}" fill="#fff"/>', *parts, "</svg>"]) + "\n"


def write_figure(obj: PiecewiseObjective, path, **kwargs) -> None:
    atomic_write_text(path, figure_svg(obj, **kwargs))
