"""Serialization of sweep results: long-format CSV, JSON summary, static SVG."""

from __future__ import annotations

import dataclasses
import datetime as _dt
import enum
import io
import json
from dataclasses import dataclass, field
from importlib import metadata
from xml.sax.saxutils import escape

import numpy as np

SIG_DIGITS = 12
SVG_WIDTH, SVG_HEIGHT = 900, 700


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def fmt(x) -> str:
    return f"{float(x):.{SIG_DIGITS}g}"


def rounded(x):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(fmt(x)) if np.isfinite(x) else None
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, enum.Enum):
        return x.value
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return rounded({f.name: getattr(x, f.name) for f in dataclasses.fields(x)})
    if isinstance(x, dict):
        return {str(k): rounded(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [rounded(v) for v in x]
    return x


@dataclass
class RunManifest:
    """Everything needed to rerun a command and get the same numbers.

    ``timestamp`` is ``None`` under ``--reproducible``.
    """

    command: str
    spec: dict
    configs: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)
    timestamp: str | None = None
    version: str = field(default_factory=tool_version)

    @classmethod
    def create(cls, command, spec, configs=None, defaults=None, reproducible=False):
        stamp = None if reproducible else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        return cls(command, rounded(spec), rounded(configs or {}), rounded(defaults or {}), stamp)

    def to_dict(self, with_timestamp=True) -> dict:
        d = {
            "command": self.command,
            "version": self.version,
            "spec": self.spec,
            "configs": self.configs,
            "defaults": self.defaults,
        }
        if with_timestamp:
            d["timestamp"] = self.timestamp
        return d


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2, sort_keys=False) + "\n"


# --------------------------------------------------------------------------
# CSV / JSON

def curves_csv(curves) -> str:
    buf = io.StringIO()
    buf.write("v2,branch_label,energy\n")
    for v2, label, e in curves.rows():
        buf.write(f"{fmt(v2)},{label},{fmt(e)}\n")
    return buf.getvalue()


def ep_record(ep) -> dict:
    return {
        "v2c": ep.v2c,
        "e_c": ep.e_c,
        "branches": list(ep.branch_pair),
        "kind": ep.kind,
        "method": ep.method,
        "bracket": list(ep.bracket),
        "ambiguous": ep.ambiguous,
    }


def crossing_record(c) -> dict:
    return {"v2_star": c.v2_star, "e_star": c.e_star, "branches": list(c.branch_pair)}


def sweep_json(eps, crossings, manifest: RunManifest) -> str:
    # the wall-clock stamp lives only in the SVG so that CSV/JSON stay byte-stable
    return dumps({
        "eps": [ep_record(ep) for ep in eps],
        "crossings": [crossing_record(c) for c in crossings],
        "manifest": manifest.to_dict(with_timestamp=False),
    })


# --------------------------------------------------------------------------
# SVG

def _ticks(lo, hi, n=6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + 0.5 * step, step) if lo - 1e-12 <= t <= hi + 1e-12]


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


def curves_svg(curves, eps, manifest: RunManifest, title: str = "") -> str:
    """Energy against v2: one polyline per branch, filled circles at EPs."""
    left, right, top, bottom = 80, 30, 50, 70
    pw, ph = SVG_WIDTH - left - right, SVG_HEIGHT - top - bottom
    rows = curves.rows()
    xs = [r[0] for r in rows] + [ep.v2c for ep in eps]
    ys = [r[2] for r in rows] + [ep.e_c for ep in eps]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(ys), max(ys)) if ys else (-1.0, 0.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f"<metadata>{escape(json.dumps(rounded(manifest.to_dict()), sort_keys=True))}</metadata>",
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 6}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 22}" font-size="13" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 6}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 10}" y="{Y + 4:.2f}" font-size="13" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{SVG_HEIGHT - 20}" font-size="16" text-anchor="middle">V2</text>')
    out.append(f'<text x="22" y="{top + ph / 2}" font-size="16" text-anchor="middle" '
               f'transform="rotate(-90 22 {top + ph / 2})">E</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="30" font-size="16" text-anchor="middle">{escape(title)}</text>')
    for i, label in enumerate(sorted(curves.branches)):
        pts = curves.branches[label]
        colour = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(v):.2f},{sy(e):.2f}" for v, e in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}">'
                   f"<title>branch {label}</title></polyline>")
    for ep in eps:
        out.append(f'<circle cx="{sx(ep.v2c):.2f}" cy="{sy(ep.e_c):.2f}" r="5" fill="black">'
                   f"<title>EP v2c={fmt(ep.v2c)}</title></circle>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
