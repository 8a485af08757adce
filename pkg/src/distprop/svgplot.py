"""Small self-contained SVG plotting: axes with linear or log scales, lines, markers, error bars, legends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from html import escape
from pathlib import Path

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}".replace("e-0", "e-").replace("e+0", "e")
    return f"{v:g}"


@dataclass
class Axes:
    """One plotting panel at (x0, y0) with size (width, height) in SVG pixels."""

    x0: float
    y0: float
    width: float
    height: float
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xlog: bool = False
    ylog: bool = False
    _items: list = field(default_factory=list)
    _legend: list = field(default_factory=list)
    _notes: list = field(default_factory=list)

    # data collection ------------------------------------------------------
    def line(self, x, y, color=PALETTE[0], label=None, width=1.5):
        self._items.append(("line", np.asarray(x, float), np.asarray(y, float), color, width))
        if label:
            self._legend.append((label, color))

    def markers(self, x, y, yerr=None, color=PALETTE[0], label=None, connect=True):
        x, y = np.asarray(x, float), np.asarray(y, float)
        yerr = None if yerr is None else np.asarray(yerr, float)
        self._items.append(("markers", x, y, color, (yerr, connect)))
        if label:
            self._legend.append((label, color))

    def note(self, text, color="#333"):
        self._notes.append((text, color))

    # scaling --------------------------------------------------------------
    def _limits(self):
        xs, ys = [], []
        for kind, x, y, _, extra in self._items:
            xs.append(x)
            ys.append(y)
            if kind == "markers" and extra[0] is not None:
                ys.append(y + extra[0])
                lower = y - extra[0]
                ys.append(lower[lower > 0] if self.ylog else lower)
        x = np.concatenate(xs) if xs else np.array([0.0, 1.0])
        y = np.concatenate(ys) if ys else np.array([0.0, 1.0])
        x = x[np.isfinite(x) & ((x > 0) if self.xlog else True)]
        y = y[np.isfinite(y) & ((y > 0) if self.ylog else True)]
        return self._pad(x, self.xlog), self._pad(y, self.ylog)

    @staticmethod
    def _pad(v, log):
        if v.size == 0:
            return (1.0, 10.0) if log else (0.0, 1.0)
        lo, hi = float(v.min()), float(v.max())
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
            if hi - lo < 1e-9:
                lo, hi = lo - 0.5, hi + 0.5
            pad = 0.08 * (hi - lo)
            return 10 ** (lo - pad), 10 ** (hi + pad)
        if hi - lo < 1e-300:
            lo, hi = lo - 0.5 * (abs(lo) or 1.0), hi + 0.5 * (abs(hi) or 1.0)
        pad = 0.05 * (hi - lo)
        return lo - pad, hi + pad

    def _mapper(self, lo, hi, log, a, b):
        if log:
            lo, hi = math.log10(lo), math.log10(hi)

        def f(v):
            v = np.asarray(v, float)
            if log:
                v = np.log10(np.maximum(v, 1e-300))
            return a + (v - lo) / (hi - lo) * (b - a)

        return f

    def _log_ticks(self, lo, hi):
        decades = range(math.floor(math.log10(lo)), math.floor(math.log10(hi)) + 1)
        ticks = [10.0**k for k in decades if lo <= 10.0**k <= hi]
        if len(ticks) < 3:
            # short ranges also get 2x and 5x ticks
            ticks = sorted(m * 10.0**k for k in decades for m in (1, 2, 5) if lo <= m * 10.0**k <= hi)
        return ticks

    # rendering ------------------------------------------------------------
    def render(self, tag: int = 0) -> list[str]:
        (xl, xh), (yl, yh) = self._limits()
        fx = self._mapper(xl, xh, self.xlog, self.x0, self.x0 + self.width)
        fy = self._mapper(yl, yh, self.ylog, self.y0 + self.height, self.y0)
        out = [
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" fill="none" stroke="#000"/>'
        ]
        xt = self._log_ticks(xl, xh) if self.xlog else _nice_ticks(xl, xh)
        yt = self._log_ticks(yl, yh) if self.ylog else _nice_ticks(yl, yh)
        bottom = self.y0 + self.height
        for t in xt:
            px = float(fx(t))
            out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(bottom)}" x2="{_fmt(px)}" y2="{_fmt(bottom + 5)}" stroke="#000"/>')
            out.append(f'<text x="{_fmt(px)}" y="{_fmt(bottom + 18)}" font-size="11" text-anchor="middle">{_tick_label(t)}</text>')
        for t in yt:
            py = float(fy(t))
            out.append(f'<line x1="{_fmt(self.x0 - 5)}" y1="{_fmt(py)}" x2="{_fmt(self.x0)}" y2="{_fmt(py)}" stroke="#000"/>')
            out.append(
                f'<text x="{_fmt(self.x0 - 8)}" y="{_fmt(py + 4)}" font-size="11" text-anchor="end">{_tick_label(t)}</text>'
            )
        if self.title:
            out.append(
                f'<text x="{_fmt(self.x0 + self.width / 2)}" y="{_fmt(self.y0 - 10)}" font-size="14" '
                f'text-anchor="middle">{escape(self.title)}</text>'
            )
        if self.xlabel:
            out.append(
                f'<text x="{_fmt(self.x0 + self.width / 2)}" y="{_fmt(bottom + 38)}" font-size="12" '
                f'text-anchor="middle">{escape(self.xlabel)}</text>'
            )
        if self.ylabel:
            cx, cy = self.x0 - 55, self.y0 + self.height / 2
            out.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="12" text-anchor="middle" '
                f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(self.ylabel)}</text>'
            )

        out.append(f'<g clip-path="url(#clip{tag})">')
        for kind, x, y, color, extra in self._items:
            px, py = fx(x), fy(y)
            if kind == "line":
                ok = np.isfinite(px) & np.isfinite(py)
                pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px[ok], py[ok]))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{extra}"/>')
                continue
            yerr, connect = extra
            if connect and x.size > 1:
                order = np.argsort(x)
                pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px[order], py[order]))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>')
            for i in range(x.size):
                if yerr is not None:
                    hi_ = fy(y[i] + yerr[i])
                    lo_v = y[i] - yerr[i]
                    lo_ = fy(lo_v) if (lo_v > 0 or not self.ylog) else self.y0 + self.height
                    out.append(
                        f'<line class="errorbar" x1="{_fmt(px[i])}" y1="{_fmt(lo_)}" x2="{_fmt(px[i])}" '
                        f'y2="{_fmt(hi_)}" stroke="{color}"/>'
                    )
                    for yy in (lo_, hi_):
                        out.append(
                            f'<line x1="{_fmt(px[i] - 4)}" y1="{_fmt(yy)}" x2="{_fmt(px[i] + 4)}" '
                            f'y2="{_fmt(yy)}" stroke="{color}"/>'
                        )
                out.append(f'<circle class="marker" cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="4" fill="{color}"/>')
        out.append("</g>")

        ly = self.y0 + 14
        for label, color in self._legend:
            lx = self.x0 + self.width - 150
            out.append(f'<rect class="legend-swatch" x="{_fmt(lx)}" y="{_fmt(ly - 9)}" width="12" height="10" fill="{color}"/>')
            out.append(f'<text class="legend" x="{_fmt(lx + 18)}" y="{_fmt(ly)}" font-size="11">{escape(label)}</text>')
            ly += 16
        ny = self.y0 + self.height - 8 - 14 * (len(self._notes) - 1)
        for text, color in self._notes:
            out.append(
                f'<text class="annotation" x="{_fmt(self.x0 + 8)}" y="{_fmt(ny)}" font-size="10" '
                f'fill="{color}">{escape(text)}</text>'
            )
            ny += 14
        clip = (
            f'<clipPath id="clip{tag}"><rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" '
            f'width="{_fmt(self.width)}" height="{_fmt(self.height)}"/></clipPath>'
        )
        return [clip] + out


class Figure:
    def __init__(self, width: int = 720, height: int = 480):
        self.width, self.height = width, height
        self.axes: list[Axes] = []

    def add_axes(self, **kw) -> Axes:
        ax = Axes(**kw)
        self.axes.append(ax)
        return ax

    @classmethod
    def grid(cls, ncols: int, panel_w: int = 300, panel_h: int = 260, **axes_kw) -> tuple["Figure", list[Axes]]:
        left, right, top, bottom = 75, 20, 40, 55
        fig = cls(ncols * (panel_w + left + right), panel_h + top + bottom)
        axes = [fig.add_axes(x0=left + i * (panel_w + left + right), y0=top, width=panel_w, height=panel_h, **axes_kw) for i in range(ncols)]
        return fig, axes

    def to_svg(self) -> str:
        body = []
        for i, ax in enumerate(self.axes):
            body.extend(ax.render(i))
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif">\n'
            f'<rect width="100%" height="100%" fill="#fff"/>\n' + "\n".join(body) + "\n</svg>\n"
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_svg())
        return path
