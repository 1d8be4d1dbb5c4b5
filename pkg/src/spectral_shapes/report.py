"""Deterministic CSV, Markdown and SVG output."""

import csv
import io
import math

FLOAT_DIGITS = 10


def fmt(value):
    """Stable text for a table cell."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{FLOAT_DIGITS}g}"
    if isinstance(value, complex):
        return f"{fmt(value.real)}{'+' if value.imag >= 0 else '-'}{fmt(abs(value.imag))}i"
    return str(value)


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_markdown(header, rows, title=None):
    out = []
    if title:
        out += [f"## {title}", ""]
    out.append("| " + " | ".join(header) + " |")
    out.append("|" + "---|" * len(header))
    for row in rows:
        out.append("| " + " | ".join(fmt(v) for v in row) + " |")
    return "\n".join(out) + "\n"


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def svg_line_plot(series, title="", xlabel="", ylabel="", hlines=(), width=480, height=320):
    """Minimal standalone SVG line plot.

    ``series`` maps a label to ``(xs, ys)``; ``hlines`` is a sequence of
    ``(y, label)`` reference lines drawn dashed.
    """
    pad_l, pad_r, pad_t, pad_b = 60, 20, 30, 45
    xs = [x for s in series.values() for x in s[0]]
    ys = [y for s in series.values() for y in s[1]] + [y for y, _ in hlines]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    dy = 0.05 * (y1 - y0)
    y0, y1 = y0 - dy, y1 + dy
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b
    X = lambda x: pad_l + (x - x0) / (x1 - x0) * pw
    Y = lambda y: pad_t + (1 - (y - y0) / (y1 - y0)) * ph
    p = lambda v: f"{v:.2f}"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        parts.append(f'<text x="{p(X(xv))}" y="{height - pad_b + 15}" text-anchor="middle">{fmt_tick(xv)}</text>')
        parts.append(f'<text x="{pad_l - 5}" y="{p(Y(yv) + 4)}" text-anchor="end">{fmt_tick(yv)}</text>')
    parts.append(f'<text x="{pad_l + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">{_esc(xlabel)}</text>')
    parts.append(f'<text x="14" y="{pad_t + ph / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 14 {pad_t + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for y, label in hlines:
        parts.append(f'<line x1="{pad_l}" x2="{pad_l + pw}" y1="{p(Y(y))}" y2="{p(Y(y))}" '
                     'stroke="gray" stroke-dasharray="5,4"/>')
        parts.append(f'<text x="{pad_l + pw - 4}" y="{p(Y(y) - 4)}" text-anchor="end" fill="gray">{_esc(label)}</text>')
    for k, (label, (sx, sy)) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{p(X(x))},{p(Y(y))}" for x, y in zip(sx, sy))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in zip(sx, sy):
            parts.append(f'<circle cx="{p(X(x))}" cy="{p(Y(y))}" r="3" fill="{color}"/>')
        parts.append(f'<text x="{pad_l + 8}" y="{pad_t + 14 + 14 * k}" fill="{color}">{_esc(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def fmt_tick(v):
    return f"{v:.4g}"


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
