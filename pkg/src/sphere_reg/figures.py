"""Hand-written SVG strip plot of per-trial relative errors.

One row of hollow circles per method, two-step at the top, presmoothing
with direct inversion in the middle, regularized collocation at the
bottom; the horizontal position is the relative error and the vertical
axis carries no meaning.
"""

from __future__ import annotations

from typing import Sequence

from .experiments import METHODS, TrialResult

_ROW_LABELS = {
    "two_step": "two-step",
    "smoothing_only": "smoothing + inversion",
    "collocation_only": "collocation",
}

_WIDTH = 640
_HEIGHT = 220
_MARGIN_LEFT = 170
_MARGIN_RIGHT = 30
_MARGIN_TOP = 30
_MARGIN_BOTTOM = 40


def strip_plot_svg(title: str, results: Sequence[TrialResult]) -> str:
    """Render the strip plot as an SVG document string."""
    errors = [r.relative_error for r in results]
    if not errors:
        raise ValueError("nothing to plot")
    x_max = max(errors) * 1.05
    if x_max <= 0:
        x_max = 1.0
    span = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT

    def x_pos(err: float) -> float:
        return _MARGIN_LEFT + span * err / x_max

    rows = []
    row_gap = (_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM) / (len(METHODS) - 1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<text x="{_WIDTH / 2:.1f}" y="16" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
    ]
    for i, method in enumerate(METHODS):
        y = _MARGIN_TOP + i * row_gap
        rows.append((method, y))
        out.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_ROW_LABELS[method]}</text>'
        )
        out.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y:.1f}" x2="{_WIDTH - _MARGIN_RIGHT}" '
            f'y2="{y:.1f}" stroke="#cccccc" stroke-width="1"/>'
        )
    axis_y = _HEIGHT - _MARGIN_BOTTOM + 12
    out.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_y}" x2="{_WIDTH - _MARGIN_RIGHT}" '
        f'y2="{axis_y}" stroke="#000000" stroke-width="1"/>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = _MARGIN_LEFT + span * frac
        out.append(
            f'<line x1="{x:.1f}" y1="{axis_y}" x2="{x:.1f}" y2="{axis_y + 4}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{axis_y + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{frac * x_max:.3g}</text>'
        )
    out.append(
        f'<text x="{(_MARGIN_LEFT + _WIDTH - _MARGIN_RIGHT) / 2:.1f}" '
        f'y="{_HEIGHT - 4}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11">relative error</text>'
    )
    row_y = dict(rows)
    for r in results:
        out.append(
            f'<circle cx="{x_pos(r.relative_error):.2f}" cy="{row_y[r.method]:.1f}" '
            f'r="4" fill="none" stroke="#1f4e9c" stroke-width="1.2"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
