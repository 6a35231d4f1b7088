"""Trace serialization (CSV, JSON metrics) and minimal SVG plotting."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .dynamics import SimulationTrace
from .maneuver import ManeuverTrace

LOG_FLOOR = 1e-17

PALETTE = (
    "#1f6f8b", "#d1495b", "#66a182", "#edae49", "#8d5a97",
    "#00798c", "#c08552", "#5c677d", "#9b2915", "#3d5a80",
    "#7a9e7e", "#b56576",
)


def fmt(x: float) -> str:
    """17-significant-digit decimal, round-trip exact for float64; -0.0 normalized."""
    return f"{float(x) + 0.0:.17g}"


def _coord_names(dim: int) -> tuple[str, ...]:
    return ("x", "y", "z")[:dim]


def trace_header(trace: SimulationTrace) -> list[str]:
    cols = ["t"]
    for i in range(1, trace.n + 1):
        cols.extend(f"p{i}_{c}" for c in _coord_names(trace.dim))
    cols.extend(f"err_{u}_{v}" for (u, v) in trace.edge_index)
    cols.append("potential")
    return cols


def trace_csv_text(trace: SimulationTrace) -> str:
    """Trace as CSV: time, stacked coordinates, per-edge errors, potential."""
    lines = [",".join(trace_header(trace))]
    for k in range(trace.times.size):
        row = [fmt(trace.times[k])]
        row.extend(fmt(x) for x in trace.states[k])
        row.extend(fmt(x) for x in trace.edge_errors[k])
        row.append(fmt(trace.potentials[k]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: SimulationTrace, path: str | Path) -> None:
    Path(path).write_text(trace_csv_text(trace))


def reference_csv_text(trace: ManeuverTrace) -> str:
    """Reference trajectory as CSV: origin, attitude (row-major), scale."""
    d = trace.dim
    names = _coord_names(d)
    cols = ["t"] + [f"r_{c}" for c in names]
    cols += [f"R_{a}{b}" for a in names for b in names]
    cols.append("s")
    lines = [",".join(cols)]
    for k in range(trace.times.size):
        row = [fmt(trace.times[k])]
        row.extend(fmt(x) for x in trace.ref_positions[k])
        row.extend(fmt(x) for x in trace.ref_rotations[k].ravel())
        row.append(fmt(trace.ref_scales[k]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def parse_trace_csv(path: str | Path) -> dict[str, NDArray[np.float64]]:
    """Read back a trace CSV into arrays keyed times/states/edge_errors/potentials."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    if header[0] != "t" or header[-1] != "potential":
        raise ValueError(f"unrecognized trace header in {path}")
    n_err = sum(1 for h in header if h.startswith("err_"))
    n_state = len(header) - 2 - n_err
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    return {
        "times": data[:, 0],
        "states": data[:, 1:1 + n_state],
        "edge_errors": data[:, 1 + n_state:1 + n_state + n_err],
        "potentials": data[:, -1],
        "header": header,
    }


def write_metrics_json(metrics: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- SVG plotting

_W, _H = 720, 520
_ML, _MR, _MT, _MB = 64, 16, 36, 44


def _scale(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-30:
        pad = max(abs(hi), 1.0) * 0.05 + 1e-12
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.07
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / count))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= count:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + step * 1e-9:
        out.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return out


def _frame(title: str, xlabel: str, ylabel: str,
           xlo: float, xhi: float, ylo: float, yhi: float) -> tuple[list[str], callable, callable]:
    def sx(x: float) -> float:
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def sy(y: float) -> float:
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15" fill="#222">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]
    for tx in _ticks(xlo, xhi):
        px = sx(tx)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" y2="{_H - _MB + 5}" stroke="#888"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11" fill="#444">{tx:g}</text>')
    for ty in _ticks(ylo, yhi):
        py = sy(ty)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" y2="{py:.2f}" stroke="#888"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="#444">{ty:g}</text>')
    parts.append(f'<text x="{_W / 2:.1f}" y="{_H - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" fill="#222">{xlabel}</text>')
    parts.append(f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12" fill="#222" transform="rotate(-90 16 {_H / 2:.1f})">{ylabel}</text>')
    return parts, sx, sy


def _polyline(xs, ys, sx, sy, color: str, width: float = 1.5, dash: str | None = None) -> str:
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{extra}/>'


def _project(states: NDArray[np.float64], n: int, dim: int) -> NDArray[np.float64]:
    """Per-agent plane coordinates; 3-D points drop to an oblique projection."""
    pts = states.reshape(states.shape[0], n, dim)
    if dim == 2:
        return pts
    out = np.empty((states.shape[0], n, 2))
    out[..., 0] = pts[..., 0] - 0.38 * pts[..., 2]
    out[..., 1] = pts[..., 1] - 0.22 * pts[..., 2]
    return out


def svg_paths(trace: SimulationTrace, title: str = "agent paths") -> str:
    """Trajectories per agent with start squares and end dots."""
    proj = _project(trace.states, trace.n, trace.dim)
    ref = None
    if isinstance(trace, ManeuverTrace):
        ref3 = trace.ref_positions.reshape(trace.times.size, 1, trace.dim)
        ref = _project(ref3.reshape(trace.times.size, trace.dim * 1), 1, trace.dim)[:, 0, :]
    all_x = proj[..., 0].ravel() if ref is None else np.concatenate([proj[..., 0].ravel(), ref[:, 0]])
    all_y = proj[..., 1].ravel() if ref is None else np.concatenate([proj[..., 1].ravel(), ref[:, 1]])
    xlo, xhi = _scale(float(all_x.min()), float(all_x.max()))
    ylo, yhi = _scale(float(all_y.min()), float(all_y.max()))
    parts, sx, sy = _frame(title, "x", "y", xlo, xhi, ylo, yhi)
    if ref is not None:
        parts.append(_polyline(ref[:, 0], ref[:, 1], sx, sy, "#999999", 1.2, dash="6 4"))
    for i in range(trace.n):
        color = PALETTE[i % len(PALETTE)]
        parts.append(_polyline(proj[:, i, 0], proj[:, i, 1], sx, sy, color))
        x0, y0 = sx(proj[0, i, 0]), sy(proj[0, i, 1])
        x1, y1 = sx(proj[-1, i, 0]), sy(proj[-1, i, 1])
        parts.append(f'<rect x="{x0 - 3:.2f}" y="{y0 - 3:.2f}" width="6" height="6" fill="{color}"/>')
        parts.append(f'<circle cx="{x1:.2f}" cy="{y1:.2f}" r="4" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def svg_errors(trace: SimulationTrace, title: str = "edge errors") -> str:
    """Per-edge constraint violations on a log10 scale."""
    logs = np.log10(np.maximum(trace.edge_errors, LOG_FLOOR))
    xlo, xhi = _scale(float(trace.times[0]), float(trace.times[-1]))
    ylo, yhi = _scale(float(logs.min()), float(logs.max()))
    parts, sx, sy = _frame(title, "t", "log10 edge error", xlo, xhi, ylo, yhi)
    for e in range(trace.edge_errors.shape[1]):
        parts.append(_polyline(trace.times, logs[:, e], sx, sy, PALETTE[e % len(PALETTE)], 1.2))
    parts.append("</svg>")
    return "\n".join(parts)
