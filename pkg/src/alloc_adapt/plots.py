"""Hand-emitted SVG line charts (no plotting stack).

Good enough for desk-scale inspection of a run: axes box, ticks, one
polyline per series, legend.  All writers take completed traces, so a failed
run never leaves a partial plot behind.
"""

from __future__ import annotations

import os

import numpy as np

from .scenario import ScenarioTrace

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22",
    "#4059ad", "#b02e0c",
)

_W, _H = 960, 380
_ML, _MR, _MT, _MB = 64, 180, 36, 44


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def line_chart(path, title: str, x: np.ndarray, series: list[tuple[str, np.ndarray, bool]],
               x_label: str = "t [s]", y_label: str = "") -> None:
    """Write one SVG chart; series entries are (label, values, dashed)."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y, _ in series]
    y_all = np.concatenate(ys) if ys else np.zeros(1)
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(y_all.min()), float(y_all.max())
    if x_hi - x_lo <= 0.0:
        x_hi = x_lo + 1.0
    if y_hi - y_lo <= 1e-12:
        pad = max(1e-6, abs(y_hi) or 1.0)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(v: float) -> float:
        return _ML + pw * (v - x_lo) / (x_hi - x_lo)

    def sy(v: float) -> float:
        return _MT + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_ML}" y="{_MT - 14}" font-size="14" font-weight="bold">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for i in range(6):
        xv = x_lo + (x_hi - x_lo) * i / 5
        yv = y_lo + (y_hi - y_lo) * i / 5
        gx, gy = sx(xv), sy(yv)
        out.append(f'<line x1="{gx:.1f}" y1="{_MT}" x2="{gx:.1f}" y2="{_MT + ph}" stroke="#ddd"/>')
        out.append(f'<line x1="{_ML}" y1="{gy:.1f}" x2="{_ML + pw}" y2="{gy:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{gx:.1f}" y="{_MT + ph + 16}" text-anchor="middle">{_fmt(xv)}</text>')
        out.append(f'<text x="{_ML - 6}" y="{gy + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')
    out.append(f'<text x="{_ML + pw / 2:.1f}" y="{_H - 8}" text-anchor="middle">{x_label}</text>')
    if y_label:
        out.append(
            f'<text x="16" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {_MT + ph / 2:.1f})">{y_label}</text>'
        )

    for idx, (label, y, dashed) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x, y))
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.3"{dash}/>')
        ly = _MT + 10 + 16 * idx
        lx = _ML + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{label}</text>')

    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def write_scenario_plots(trace: ScenarioTrace, outdir) -> list[str]:
    """Emit the four standard charts for a run; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    r = trace.v.shape[1]
    m = trace.u.shape[1]
    out_labels = trace.state_labels[-r:] if len(trace.state_labels) >= r else tuple(f"y{i+1}" for i in range(r))

    path = os.path.join(outdir, "states_references.svg")
    series = [(lab, trace.x[:, i], False) for i, lab in enumerate(trace.state_labels)]
    series += [(f"ref {out_labels[i]}", trace.ref[:, i], True) for i in range(r)]
    line_chart(path, "System states and reference tracking", trace.t, series)
    written.append(path)

    path = os.path.join(outdir, "surface_deflections.svg")
    series = [(lab, trace.u[:, j], False) for j, lab in enumerate(trace.input_labels)]
    line_chart(path, "Control surface deflections", trace.t, series)
    written.append(path)

    path = os.path.join(outdir, "allocation_tracking.svg")
    series = []
    for i in range(r):
        series.append((f"v{i + 1}", trace.v[:, i], False))
        series.append((f"achieved {i + 1}", trace.measured[:, i], True))
    line_chart(path, "Commanded vs achieved net moments", trace.t, series)
    written.append(path)

    path = os.path.join(outdir, "adaptive_parameters.svg")
    series = [
        (f"th_{i + 1}_{j + 1}", trace.theta[:, i, j], False)
        for i in range(r) for j in range(m)
    ]
    line_chart(path, "Adaptive parameters", trace.t, series)
    written.append(path)
    return written
