"""Minimal self-contained SVG output: line plots and grayscale heatmaps.

No plotting dependency so output files are byte-identical across platforms;
everything is plain string formatting with fixed float precision.
"""

import math

__all__ = ["line_plot", "heatmap"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 150, 40, 55  # margins: left/right/top/bottom
_DASHES = ["none", "8,4", "2,3", "8,3,2,3", "12,3"]
_GRAYS = ["#000000", "#666666", "#999999", "#333333", "#aaaaaa"]


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * abs(step):
        out.append(0.0 if abs(t) < 1e-12 * abs(step) else t)
        t += step
    return out


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def line_plot(path, curves, xlabel="", ylabel="", title="", ylog=False):
    """Write a line plot; ``curves`` is a list of (label, xs, ys).

    With ylog=True, nonpositive values are clamped to the smallest positive
    value in the data (log axes cannot show zeros).
    """
    xs_all = [x for _, xs, _ in curves for x in xs]
    ys_all = [y for _, _, ys in curves for y in ys]
    if not xs_all:
        raise ValueError("no data to plot")
    if ylog:
        positive = [y for y in ys_all if y > 0]
        floor = min(positive) if positive else 1e-16
        ys_all = [max(y, floor) for y in ys_all]
        ty = [math.log10(y) for y in ys_all]
        y_lo, y_hi = min(ty), max(ty)
        y_lo, y_hi = math.floor(y_lo), math.ceil(max(y_hi, y_lo + 1e-9))
    else:
        y_lo, y_hi = min(ys_all), max(ys_all)
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
    x_lo, x_hi = min(xs_all), max(xs_all)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        if ylog:
            y = math.log10(max(y, 10.0 ** y_lo))
        return _MT + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
             f'fill="none" stroke="black"/>']
    if title:
        parts.append(f'<text x="{_W // 2}" y="24" text-anchor="middle" '
                     f'font-size="15">{_esc(title)}</text>')
    x_ticks = _ticks(x_lo, x_hi)
    y_ticks = range(int(y_lo), int(y_hi) + 1) if ylog else _ticks(y_lo, y_hi)
    for t in x_ticks:
        x = px(t)
        parts.append(f'<line x1="{x:.2f}" y1="{_MT + ph}" x2="{x:.2f}" '
                     f'y2="{_MT + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_MT + ph + 18}" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in y_ticks:
        y = py(10.0 ** t) if ylog else py(t)
        label = f"1e{t:d}" if ylog else f"{t:g}"
        parts.append(f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" '
                     f'y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.2f}" '
                     f'text-anchor="end">{label}</text>')
    if xlabel:
        parts.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 12}" '
                     f'text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
                     f'transform="rotate(-90 18 {_MT + ph / 2:.0f})">'
                     f'{_esc(ylabel)}</text>')
    for k, (label, xs, ys) in enumerate(curves):
        color = _GRAYS[k % len(_GRAYS)]
        dash = _DASHES[k % len(_DASHES)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        dash_attr = "" if dash == "none" else f' stroke-dasharray="{dash}"'
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.6"{dash_attr} points="{pts}"/>')
        ly = _MT + 16 + 18 * k
        lx = _ML + pw + 10
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.6"'
                     f'{dash_attr}/>')
        parts.append(f'<text x="{lx + 32}" y="{ly}">{_esc(label)}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def heatmap(path, values, x_labels, y_labels, xlabel="", ylabel="", title=""):
    """Grayscale heatmap of values in [0, 1]: 0 = black, 1 = white.

    ``values[i][j]`` is drawn at row i (top to bottom follows y_labels order)
    and column j.
    """
    ny = len(values)
    nx = len(values[0]) if ny else 0
    if ny == 0 or nx == 0:
        raise ValueError("empty heatmap")
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    cw, ch = pw / nx, ph / ny
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        parts.append(f'<text x="{_W // 2}" y="24" text-anchor="middle" '
                     f'font-size="15">{_esc(title)}</text>')
    for i in range(ny):
        for j in range(nx):
            v = min(max(float(values[i][j]), 0.0), 1.0)
            level = int(round(255 * v))
            color = f"#{level:02x}{level:02x}{level:02x}"
            parts.append(f'<rect x="{_ML + j * cw:.2f}" y="{_MT + i * ch:.2f}" '
                         f'width="{cw:.2f}" height="{ch:.2f}" fill="{color}" '
                         f'stroke="#444444" stroke-width="0.5"/>')
    for j, lab in enumerate(x_labels):
        parts.append(f'<text x="{_ML + (j + 0.5) * cw:.2f}" y="{_MT + ph + 16}" '
                     f'text-anchor="middle">{_esc(lab)}</text>')
    for i, lab in enumerate(y_labels):
        parts.append(f'<text x="{_ML - 8}" y="{_MT + (i + 0.5) * ch + 4:.2f}" '
                     f'text-anchor="end">{_esc(lab)}</text>')
    if xlabel:
        parts.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 12}" '
                     f'text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
                     f'transform="rotate(-90 18 {_MT + ph / 2:.0f})">'
                     f'{_esc(ylabel)}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="black"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
