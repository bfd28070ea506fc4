"""Self-contained deterministic SVG line plots.

No external plotting process: output bytes depend only on the CSV
content and the style mapping, so re-runs are reproducible in CI.
"""

import math

import numpy as np

from .csvio import read_csv
from .errors import ConfigError

__all__ = ["emit_plot", "render_plot"]

_W, _H = 880, 540
_ML, _MR, _MT, _MB = 80, 24, 36, 56
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#8c564b")
_DASHES = ("", "6,4", "2,3", "8,3,2,3", "4,2", "1,2")


def _nice_ticks(lo, hi, target=6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError("cannot scale axis: non-finite data")
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(v) < 1e-12 * span else v)
        v += step
    return ticks


def _fmt(x):
    return f"{x:.6g}"


def render_plot(header, data, style=None):
    """Render CSV columns as an SVG string.

    style keys (all optional): title, xlabel, ylabel, columns (names to
    plot), normalize (names scaled to the y-range peak, marked in the
    legend).
    """
    style = dict(style or {})
    if data.shape[0] == 0:
        raise ConfigError("no data rows to plot")
    x = data[:, 0]
    names = style.get("columns") or header[1:]
    for name in names:
        if name not in header:
            raise ConfigError(f"no column named '{name}' in CSV", key=name)
    normalize = set(style.get("normalize", ()))
    plain = [n for n in names if n not in normalize]
    cols = {n: data[:, header.index(n)] for n in names}

    ys = np.concatenate([cols[n] for n in plain]) if plain else \
        np.concatenate(list(cols.values()))
    y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    for n in normalize:
        peak = float(np.max(np.abs(cols[n])))
        if peak > 0.0:
            cols[n] = cols[n] * (0.92 * y_hi / peak)
    x_lo, x_hi = float(np.min(x)), float(np.max(x))
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>',
    ]
    for tx in _nice_ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" '
                     f'font-size="12" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _nice_ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-size="12" '
                     f'text-anchor="end">{_fmt(ty)}</text>')

    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        dash = _DASHES[i % len(_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}"
                       for xv, yv in zip(x, cols[name]))
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.6"{dash_attr} points="{pts}"/>')
        ly = _MT + 16 + 16 * i
        lx = _W - _MR - 220
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.6"'
                     f'{dash_attr}/>')
        label = name + (" (scaled)" if name in normalize else "")
        parts.append(f'<text x="{lx + 32}" y="{ly}" font-size="12">'
                     f'{label}</text>')

    if style.get("title"):
        parts.append(f'<text x="{_W / 2}" y="{_MT - 12}" font-size="14" '
                     f'text-anchor="middle">{style["title"]}</text>')
    xlabel = style.get("xlabel", header[0])
    parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 14}" '
                 f'font-size="13" text-anchor="middle">{xlabel}</text>')
    if style.get("ylabel"):
        parts.append(f'<text x="20" y="{(_MT + _H - _MB) / 2}" font-size="13" '
                     f'text-anchor="middle" transform="rotate(-90 20 '
                     f'{(_MT + _H - _MB) / 2})">{style["ylabel"]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(csv_path, svg_path, style=None):
    """Plot a CSV written by this tool into a standalone SVG file.

    The SVG is rendered in memory first: a malformed CSV produces an
    error and no partial output file.
    """
    header, data = read_csv(csv_path)
    svg = render_plot(header, data, style)
    with open(svg_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
    return svg
