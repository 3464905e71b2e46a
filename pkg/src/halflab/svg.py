"""Tiny deterministic SVG backend for the command line reports.

Hand-rolled on purpose: the plots must be byte-reproducible across runs and
machines, so no plotting library, no timestamps, no float repr jitter.  All
coordinates go through one %.6g formatter.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["line_chart", "heatmap"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 16.0, 28.0, 44.0


def _fmt(x: float) -> str:
    if x == 0:
        return "0"
    return format(float(x), ".6g")


def _finite(arr) -> np.ndarray:
    a = np.asarray(arr, dtype=float).ravel()
    return a[np.isfinite(a)]


def _axis_range(lo: float, hi: float, log: bool):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, log: bool):
    if log:
        first, last = math.ceil(lo), math.floor(hi)
        if last >= first:
            return [(t, "1e%d" % t) for t in range(first, last + 1)]
    step = (hi - lo) / 4.0
    return [(lo + i * step, _fmt(lo + i * step)) for i in range(5)]


def _transform(v, lo, hi, out_lo, out_hi, log):
    t = (math.log10(v) if log else v)
    frac = (t - lo) / (hi - lo)
    return out_lo + frac * (out_hi - out_lo)


def line_chart(path, series, *, title="", xlabel="", ylabel="",
               logx=False, logy=False, width=720, height=480):
    """Write a polyline chart; series is a list of (label, xs, ys)."""
    xs_all = _finite(np.concatenate([np.asarray(s[1], dtype=float)
                                     for s in series]))
    ys_all = _finite(np.concatenate([np.asarray(s[2], dtype=float)
                                     for s in series]))
    if logx:
        xs_all = xs_all[xs_all > 0]
    if logy:
        ys_all = ys_all[ys_all > 0]
    if xs_all.size == 0 or ys_all.size == 0:
        raise ValueError("nothing finite to plot")
    x_lo, x_hi = _axis_range(float(xs_all.min()), float(xs_all.max()), logx)
    y_lo, y_hi = _axis_range(float(ys_all.min()), float(ys_all.max()), logy)
    px_lo, px_hi = _MARGIN_L, width - _MARGIN_R
    py_lo, py_hi = height - _MARGIN_B, _MARGIN_T

    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
           'viewBox="0 0 %d %d">' % (width, height, width, height),
           '<rect width="%d" height="%d" fill="white"/>' % (width, height)]
    if title:
        out.append('<text x="%s" y="18" font-family="monospace" '
                   'font-size="13" text-anchor="middle">%s</text>'
                   % (_fmt((px_lo + px_hi) / 2), title))
    out.append('<g stroke="black" stroke-width="1">')
    out.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>'
               % (_fmt(px_lo), _fmt(py_lo), _fmt(px_hi), _fmt(py_lo)))
    out.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>'
               % (_fmt(px_lo), _fmt(py_lo), _fmt(px_lo), _fmt(py_hi)))
    out.append('</g>')
    for tval, tlabel in _ticks(x_lo, x_hi, logx):
        px = px_lo + (tval - x_lo) / (x_hi - x_lo) * (px_hi - px_lo)
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black"/>'
                   % (_fmt(px), _fmt(py_lo), _fmt(px), _fmt(py_lo + 4)))
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="10" text-anchor="middle">%s</text>'
                   % (_fmt(px), _fmt(py_lo + 16), tlabel))
    for tval, tlabel in _ticks(y_lo, y_hi, logy):
        py = py_lo + (tval - y_lo) / (y_hi - y_lo) * (py_hi - py_lo)
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black"/>'
                   % (_fmt(px_lo - 4), _fmt(py), _fmt(px_lo), _fmt(py)))
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="10" text-anchor="end">%s</text>'
                   % (_fmt(px_lo - 7), _fmt(py + 3), tlabel))
    if xlabel:
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="middle">%s</text>'
                   % (_fmt((px_lo + px_hi) / 2), _fmt(height - 8.0), xlabel))
    if ylabel:
        out.append('<text x="14" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="middle" '
                   'transform="rotate(-90 14 %s)">%s</text>'
                   % (_fmt((py_lo + py_hi) / 2), _fmt((py_lo + py_hi) / 2),
                      ylabel))
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = []
        for x, y in zip(np.asarray(xs, dtype=float),
                        np.asarray(ys, dtype=float)):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if (logx and x <= 0) or (logy and y <= 0):
                continue
            px = _transform(x, x_lo, x_hi, px_lo, px_hi, logx)
            py = _transform(y, y_lo, y_hi, py_lo, py_hi, logy)
            pts.append("%s,%s" % (_fmt(px), _fmt(py)))
        if pts:
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1.5"/>' % (" ".join(pts), color))
        if label:
            ly = _MARGIN_T + 14 * i + 4
            out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s" '
                       'stroke-width="1.5"/>'
                       % (_fmt(px_hi - 110), _fmt(ly), _fmt(px_hi - 90),
                          _fmt(ly), color))
            out.append('<text x="%s" y="%s" font-family="monospace" '
                       'font-size="10">%s</text>'
                       % (_fmt(px_hi - 85), _fmt(ly + 3), label))
    out.append('</svg>')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def _heat_color(frac: float) -> str:
    # coarse viridis-like ramp, good enough for orientation plots
    stops = ((0.267, 0.005, 0.329), (0.283, 0.141, 0.458),
             (0.254, 0.265, 0.530), (0.207, 0.372, 0.553),
             (0.164, 0.471, 0.558), (0.128, 0.567, 0.551),
             (0.135, 0.659, 0.518), (0.267, 0.749, 0.441),
             (0.478, 0.821, 0.318), (0.741, 0.873, 0.150),
             (0.993, 0.906, 0.144))
    frac = min(max(frac, 0.0), 1.0)
    pos = frac * (len(stops) - 1)
    i = min(int(pos), len(stops) - 2)
    t = pos - i
    rgb = [stops[i][c] * (1 - t) + stops[i + 1][c] * t for c in range(3)]
    return "#%02x%02x%02x" % tuple(int(round(255 * v)) for v in rgb)


def heatmap(path, x_values, y_values, values, *, title="", xlabel="",
            ylabel="", width=720, height=520):
    """Write a cell heatmap; values has shape (len(y_values), len(x_values))."""
    vals = np.asarray(values, dtype=float)
    xs = np.asarray(x_values, dtype=float)
    ys = np.asarray(y_values, dtype=float)
    if vals.shape != (ys.size, xs.size):
        raise ValueError("value grid does not match the axis sizes")
    finite = vals[np.isfinite(vals)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    if hi <= lo:
        hi = lo + 1.0
    px_lo, px_hi = _MARGIN_L, width - 90.0
    py_lo, py_hi = height - _MARGIN_B, _MARGIN_T
    cell_w = (px_hi - px_lo) / xs.size
    cell_h = (py_lo - py_hi) / ys.size

    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
           'viewBox="0 0 %d %d">' % (width, height, width, height),
           '<rect width="%d" height="%d" fill="white"/>' % (width, height)]
    if title:
        out.append('<text x="%s" y="18" font-family="monospace" '
                   'font-size="13" text-anchor="middle">%s</text>'
                   % (_fmt((px_lo + px_hi) / 2), title))
    for iy in range(ys.size):
        for ix in range(xs.size):
            v = vals[iy, ix]
            color = "#dddddd" if not math.isfinite(v) else \
                _heat_color((v - lo) / (hi - lo))
            out.append('<rect x="%s" y="%s" width="%s" height="%s" '
                       'fill="%s"/>'
                       % (_fmt(px_lo + ix * cell_w),
                          _fmt(py_lo - (iy + 1) * cell_h),
                          _fmt(cell_w + 0.5), _fmt(cell_h + 0.5), color))
    for ix in (0, xs.size - 1):
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="10" text-anchor="middle">%s</text>'
                   % (_fmt(px_lo + (ix + 0.5) * cell_w), _fmt(py_lo + 14),
                      _fmt(xs[ix])))
    for iy in (0, ys.size - 1):
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="10" text-anchor="end">%s</text>'
                   % (_fmt(px_lo - 6), _fmt(py_lo - (iy + 0.5) * cell_h + 3),
                      _fmt(ys[iy])))
    if xlabel:
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="middle">%s</text>'
                   % (_fmt((px_lo + px_hi) / 2), _fmt(height - 8.0), xlabel))
    if ylabel:
        out.append('<text x="14" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="middle" '
                   'transform="rotate(-90 14 %s)">%s</text>'
                   % (_fmt((py_lo + py_hi) / 2), _fmt((py_lo + py_hi) / 2),
                      ylabel))
    bar_x = width - 70.0
    for i in range(64):
        frac = i / 63.0
        by = py_lo - (py_lo - py_hi) * (i + 1) / 64.0
        out.append('<rect x="%s" y="%s" width="14" height="%s" fill="%s"/>'
                   % (_fmt(bar_x), _fmt(by),
                      _fmt((py_lo - py_hi) / 64.0 + 0.5), _heat_color(frac)))
    out.append('<text x="%s" y="%s" font-family="monospace" font-size="10">'
               '%s</text>' % (_fmt(bar_x + 18), _fmt(py_lo), _fmt(lo)))
    out.append('<text x="%s" y="%s" font-family="monospace" font-size="10">'
               '%s</text>' % (_fmt(bar_x + 18), _fmt(py_hi + 8), _fmt(hi)))
    out.append('</svg>')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
