"""File emission: atomic writes, CSV tables, key-value reports and a small SVG plotter."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["atomic_write_text", "csv_text", "fmt", "report_text", "svg_figure"]


def fmt(x) -> str:
    """17 significant digits, locale independent; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def atomic_write_text(path, text: str):
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def report_text(meta: Sequence[tuple], report) -> str:
    """``key = value`` lines: run metadata, then four lines per check, then the verdict."""
    lines = [f"{k} = {fmt(v)}" for k, v in meta]
    for c in report.checks:
        status = "info" if c.informational else ("pass" if c.passed else "fail")
        lines.append(f"check.{c.name}.status = {status}")
        lines.append(f"check.{c.name}.measured = {fmt(c.measured)}")
        lines.append(f"check.{c.name}.tolerance = {fmt(c.tolerance)}")
        if c.notes:
            lines.append(f"check.{c.name}.notes = {c.notes}")
    lines.append(f"checks.total = {sum(not c.informational for c in report.checks)}")
    lines.append(f"checks.failed = {len(report.failures())}")
    lines.append(f"overall = {'pass' if report.overall else 'fail'}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------------ SVG

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e")
_PANEL_W, _PANEL_H, _MARGIN = 420.0, 300.0, 55.0


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + 0.5 * step, step) if lo - 1e-12 <= t <= hi + 1e-12]


def _panel(x0, title, curves, log):
    """One axes box. ``curves`` is a list of (label, x, y, dashed)."""
    out = []
    xs, ys = [], []
    for _, x, y, _ in curves:
        x, y = np.asarray(x, float), np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        if log:
            keep &= (x > 0) & (y > 0)
        xs.append(x[keep])
        ys.append(y[keep])
    allx = np.concatenate(xs)
    ally = np.concatenate(ys)
    tx = np.log10 if log else (lambda v: v)
    xlo, xhi = float(np.min(tx(allx))), float(np.max(tx(allx)))
    ylo, yhi = float(np.min(tx(ally))), float(np.max(tx(ally)))
    if log:
        xlo, xhi, ylo, yhi = np.floor(xlo), np.ceil(xhi), max(np.floor(ylo), np.ceil(yhi) - 8), np.ceil(yhi)
    else:
        pad = 0.05 * (yhi - ylo or 1.0)
        ylo, yhi = ylo - pad, yhi + pad

    left, top = x0 + _MARGIN, _MARGIN
    w, h = _PANEL_W - 1.5 * _MARGIN, _PANEL_H - 2 * _MARGIN

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * w

    def py(v):
        return top + h - (v - ylo) / (yhi - ylo) * h

    out.append(f'<rect x="{left:.2f}" y="{top:.2f}" width="{w:.2f}" height="{h:.2f}" fill="none" stroke="black"/>')
    out.append(f'<text x="{left + w / 2:.2f}" y="{top - 12:.2f}" text-anchor="middle" font-size="13">{title}</text>')
    for t in _nice_ticks(xlo, xhi):
        label = f"1e{int(t)}" if log else f"{t:g}"
        out.append(f'<line x1="{px(t):.2f}" y1="{top + h:.2f}" x2="{px(t):.2f}" y2="{top + h + 4:.2f}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{top + h + 16:.2f}" text-anchor="middle" font-size="10">{label}</text>')
    for t in _nice_ticks(ylo, yhi):
        label = f"1e{int(t)}" if log else f"{t:g}"
        out.append(f'<line x1="{left - 4:.2f}" y1="{py(t):.2f}" x2="{left:.2f}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6:.2f}" y="{py(t) + 3:.2f}" text-anchor="end" font-size="10">{label}</text>')
    out.append(f'<text x="{left + w / 2:.2f}" y="{top + h + 34:.2f}" text-anchor="middle" font-size="11">r</text>')

    out.append(f'<clipPath id="clip{int(x0)}"><rect x="{left:.2f}" y="{top:.2f}" width="{w:.2f}" height="{h:.2f}"/></clipPath>')
    for i, ((label, _, _, dashed), x, y) in enumerate(zip(curves, xs, ys)):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(tx(x), tx(y)))
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        out.append(f'<polyline clip-path="url(#clip{int(x0)})" fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                   f'points="{pts}"/>')
        ly = top + 14 + 14 * i
        out.append(f'<line x1="{left + w - 70:.2f}" y1="{ly - 4:.2f}" x2="{left + w - 52:.2f}" y2="{ly - 4:.2f}" '
                   f'stroke="{color}"{dash}/>')
        out.append(f'<text x="{left + w - 48:.2f}" y="{ly:.2f}" font-size="10">{label}</text>')
    return out


def svg_figure(panels: Sequence[tuple]) -> str:
    """Side-by-side panels, each ``(title, curves, log)``."""
    width = _PANEL_W * len(panels)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" height="{_PANEL_H:.0f}" '
        f'viewBox="0 0 {width:.0f} {_PANEL_H:.0f}" font-family="sans-serif">',
        f'<rect width="{width:.0f}" height="{_PANEL_H:.0f}" fill="white"/>',
    ]
    for k, (title, curves, log) in enumerate(panels):
        parts.extend(_panel(k * _PANEL_W, title, curves, log))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
