"""Dependency-free SVG plots of runs and support fits.

Every figure uses a fixed viewBox so outputs are byte-stable for a given
input.  Plan views draw obstacle hulls as filled paths and periodic snapshots
of the agent and moving obstacles, older snapshots drawn more opaque.
"""
from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .sim import Scenario, TrajectoryLog, goal_distance

WIDTH, HEIGHT = 800, 600
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
OBSTACLE_FILL = "#7f7f7f"


def _f(x: float) -> str:
    return f"{x:.2f}"


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _doc(body: list, title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
            f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">')
    parts = [head, f"<title>{_esc(title)}</title>",
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
             f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{_esc(title)}</text>']
    return "\n".join(parts + body + ["</svg>", ""])


class _Frame:
    """Maps world coordinates into the plot area."""

    def __init__(self, xlim, ylim, equal=False):
        x0, x1 = xlim
        y0, y1 = ylim
        if x1 <= x0:
            x0, x1 = x0 - 1.0, x1 + 1.0
        if y1 <= y0:
            y0, y1 = y0 - 1.0, y1 + 1.0
        w, h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
        sx, sy = w / (x1 - x0), h / (y1 - y0)
        if equal:
            s = min(sx, sy)
            # centre the data in the unused direction
            cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
            x0, x1 = cx - w / (2 * s), cx + w / (2 * s)
            y0, y1 = cy - h / (2 * s), cy + h / (2 * s)
            sx = sy = s
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.sx, self.sy = sx, sy

    def x(self, v):
        return MARGIN + (v - self.x0) * self.sx

    def y(self, v):
        return HEIGHT - MARGIN - (v - self.y0) * self.sy

    def path(self, pts, closed=False) -> str:
        pts = np.asarray(pts, dtype=float)
        segs, pen = [], "M"
        for px, py in pts:
            if not (math.isfinite(px) and math.isfinite(py)):
                pen = "M"
                continue
            segs.append(f"{pen}{_f(self.x(px))},{_f(self.y(py))}")
            pen = "L"
        if closed and segs:
            segs.append("Z")
        return " ".join(segs)

    def axes(self, xlabel: str, ylabel: str, ticks: int = 5) -> list:
        out = [f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
               f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#444"/>']
        for v in np.linspace(self.x0, self.x1, ticks + 1):
            X = self.x(v)
            out.append(f'<line x1="{_f(X)}" y1="{HEIGHT - MARGIN}" x2="{_f(X)}" '
                       f'y2="{HEIGHT - MARGIN + 5}" stroke="#444"/>')
            out.append(f'<text x="{_f(X)}" y="{HEIGHT - MARGIN + 18}" '
                       f'text-anchor="middle">{v:.3g}</text>')
        for v in np.linspace(self.y0, self.y1, ticks + 1):
            Y = self.y(v)
            out.append(f'<line x1="{MARGIN - 5}" y1="{_f(Y)}" x2="{MARGIN}" y2="{_f(Y)}" stroke="#444"/>')
            out.append(f'<text x="{MARGIN - 8}" y="{_f(Y + 4)}" text-anchor="end">{v:.3g}</text>')
        out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">{_esc(xlabel)}</text>')
        out.append(f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {HEIGHT / 2})">{_esc(ylabel)}</text>')
        return out


def _legend(labels: Sequence[str], colors: Sequence[str]) -> list:
    out = []
    for i, (lab, col) in enumerate(zip(labels, colors)):
        y = MARGIN + 16 + 18 * i
        x = WIDTH - MARGIN - 170
        out.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 24}" y2="{y - 4}" stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{x + 30}" y="{y}">{_esc(lab)}</text>')
    return out


def _snapshot_indices(n: int, count: int) -> list:
    if n <= 0:
        return []
    return sorted(set(np.linspace(0, n - 1, max(count, 2)).round().astype(int).tolist()))


def _age_opacity(i: int, last: int) -> float:
    # older snapshots are drawn more opaque
    age = 1.0 - i / last if last > 0 else 0.0
    return 0.15 + 0.6 * age


def plan_view(scenario: Scenario, logs: Mapping[str, TrajectoryLog], snapshots: int = 8) -> str:
    """Top-down view of one or more runs of the same scenario."""
    obstacles = [spec.state for spec in scenario.obstacles]
    n = max((len(log) for log in logs.values()), default=1)
    dt = scenario.dt
    pts = [scenario.agent.p[None, :], scenario.goal[None, :]]
    for log in logs.values():
        pts.append(log.p)
    outlines = []
    for obs in obstacles:
        start = obs.outline()
        end = obs.advanced((n - 1) * dt).outline()
        outlines.append((start, end))
        pts += [start, end]
    allp = np.vstack(pts)
    pad = scenario.agent_radius + 0.5
    frame = _Frame((allp[:, 0].min() - pad, allp[:, 0].max() + pad),
                   (allp[:, 1].min() - pad, allp[:, 1].max() + pad), equal=True)
    body = frame.axes("x [m]", "y [m]")

    idx = _snapshot_indices(n, snapshots)
    for j, obs in enumerate(obstacles):
        moving = bool(np.any(obs.velocity != 0.0))
        if moving:
            for i in idx:
                o = obs.advanced(i * dt)
                body.append(f'<path d="{frame.path(o.outline(), closed=True)}" fill="{OBSTACLE_FILL}" '
                            f'fill-opacity="{_age_opacity(i, idx[-1]):.3f}" stroke="#333" stroke-width="0.5"/>')
        else:
            body.append(f'<path d="{frame.path(outlines[j][0], closed=True)}" fill="{OBSTACLE_FILL}" '
                        f'fill-opacity="0.6" stroke="#333"/>')
        cx, cy = obs.position
        body.append(f'<text x="{_f(frame.x(cx))}" y="{_f(frame.y(cy) + 4)}" text-anchor="middle" '
                    f'fill="white">{j}</text>')

    r_px = scenario.agent_radius * frame.sx
    colors = PALETTE[:len(logs)]
    for (label, log), col in zip(logs.items(), colors):
        body.append(f'<path d="{frame.path(log.p)}" fill="none" stroke="{col}" stroke-width="2"/>')
        for i in _snapshot_indices(len(log), snapshots):
            px, py = log.p[i]
            body.append(f'<circle cx="{_f(frame.x(px))}" cy="{_f(frame.y(py))}" r="{_f(r_px)}" '
                        f'fill="{col}" fill-opacity="{_age_opacity(i, len(log) - 1):.3f}" stroke="{col}"/>')
    gx, gy = scenario.goal
    body.append(f'<path d="M{_f(frame.x(gx) - 6)},{_f(frame.y(gy) - 6)} L{_f(frame.x(gx) + 6)},'
                f'{_f(frame.y(gy) + 6)} M{_f(frame.x(gx) - 6)},{_f(frame.y(gy) + 6)} '
                f'L{_f(frame.x(gx) + 6)},{_f(frame.y(gy) - 6)}" stroke="black" stroke-width="2"/>')
    body += _legend(list(logs), colors)
    return _doc(body, f"{scenario.name}: plan view")


def line_chart(series: Mapping[str, tuple], title: str, xlabel: str, ylabel: str,
               zero_line: bool = False) -> str:
    """Plot named ``(x, y)`` series on shared axes."""
    xs = [np.asarray(x, dtype=float) for x, _ in series.values()]
    ys = [np.asarray(y, dtype=float) for _, y in series.values()]
    finite = [v[np.isfinite(v)] for v in ys]
    yall = np.concatenate(finite + ([np.zeros(1)] if zero_line else [])) if finite else np.zeros(1)
    if yall.size == 0:
        yall = np.zeros(1)
    xall = np.concatenate(xs) if xs else np.zeros(1)
    lo, hi = float(yall.min()), float(yall.max())
    span = hi - lo if hi > lo else 1.0
    frame = _Frame((float(xall.min()), float(xall.max())), (lo - 0.05 * span, hi + 0.05 * span))
    body = frame.axes(xlabel, ylabel)
    if zero_line and frame.y0 <= 0.0 <= frame.y1:
        body.append(f'<line x1="{MARGIN}" y1="{_f(frame.y(0))}" x2="{WIDTH - MARGIN}" '
                    f'y2="{_f(frame.y(0))}" stroke="#999" stroke-dasharray="4 3"/>')
    colors = [PALETTE[i % len(PALETTE)] for i in range(len(series))]
    for x, y, col in zip(xs, ys, colors):
        body.append(f'<path d="{frame.path(np.column_stack([x, y]))}" fill="none" '
                    f'stroke="{col}" stroke-width="1.5"/>')
    body += _legend(list(series), colors)
    return _doc(body, title)


def constraint_chart(logs: Mapping[str, TrajectoryLog]) -> str:
    """Constraint value c_u.u + c_0 per obstacle over time."""
    series = {}
    for label, log in logs.items():
        for k in range(log.n_obstacles):
            name = f"{label} obstacle {k}" if len(logs) > 1 else f"obstacle {k}"
            series[name] = (log.t, log.cons[:, k])
    return line_chart(series, "CBF constraint value", "t [s]", "constraint", zero_line=True)


def intervention_chart(logs: Mapping[str, TrajectoryLog]) -> str:
    series = {label: (log.t, log.intervention) for label, log in logs.items()}
    return line_chart(series, "Filter intervention", "t [s]", "|u - u_des| [m/s^2]")


def goal_distance_chart(logs: Mapping[str, TrajectoryLog], goal) -> str:
    series = {label: (log.t, goal_distance(log, goal)) for label, log in logs.items()}
    return line_chart(series, "Distance to goal", "t [s]", "distance [m]")


def run_figures(scenario: Scenario, logs: Mapping[str, TrajectoryLog]) -> dict:
    """All standard figures for the runs, keyed by file stem."""
    return {
        "plan": plan_view(scenario, logs),
        "constraint": constraint_chart(logs),
        "intervention": intervention_chart(logs),
        "goal_distance": goal_distance_chart(logs, scenario.goal),
    }


def support_polar(model, resolution: int = 720) -> str:
    """Polar plot of the exact support distance against the conservative fit."""
    th = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    exact = np.array([model.shape.support(t) for t in th])
    fit = np.array([model.distance(t) for t in th])
    closed = np.append(th, th[0])
    curves = {"exact support": np.append(exact, exact[0]),
              "fit + margin": np.append(fit, fit[0])}
    rmax = max(float(np.max(np.abs(v))) for v in curves.values()) * 1.1 or 1.0
    frame = _Frame((-rmax, rmax), (-rmax, rmax), equal=True)
    body = []
    for frac in (0.25, 0.5, 0.75, 1.0):
        r = frac * rmax * frame.sx
        body.append(f'<circle cx="{_f(frame.x(0))}" cy="{_f(frame.y(0))}" r="{_f(r)}" '
                    f'fill="none" stroke="#ccc"/>')
        body.append(f'<text x="{_f(frame.x(frac * rmax) + 2)}" y="{_f(frame.y(0) - 2)}" '
                    f'fill="#888">{frac * rmax:.3g}</text>')
    colors = PALETTE[:2]
    for (label, r), col in zip(curves.items(), colors):
        pts = np.column_stack([r * np.cos(closed), r * np.sin(closed)])
        body.append(f'<path d="{frame.path(pts)}" fill="none" stroke="{col}" stroke-width="1.5"/>')
    body += _legend(list(curves), colors)
    return _doc(body, f"Support distance, {model.kind.value} model")


__all__ = [
    "plan_view", "line_chart", "constraint_chart", "intervention_chart",
    "goal_distance_chart", "run_figures", "support_polar",
]
