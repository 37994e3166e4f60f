"""CSV and SVG writers.

Every file starts with the configuration snapshot (``#`` comment lines in
CSV, an XML comment in SVG).  Nothing time-dependent is written, so
identical inputs give byte-identical files.
"""

import csv
import io
import math
from pathlib import Path
from xml.sax.saxutils import escape

AXES = "xyz"


def _num(v):
    return repr(float(v))


def _write(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _csv_text(snapshot, header, rows):
    buf = io.StringIO()
    buf.write(f"# config: {snapshot}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trajectory_rows(traj):
    """Rows ``step, x, y[, z], chosen, value_idle, value_0 .. value_7``."""
    dim = len(traj.config["start"])
    rows = [[0, *map(_num, traj.initial_state.position), ""] + [""] * 9]
    for i, step in enumerate(traj.steps, start=1):
        values = [_num(s.epistemic_value) for s in step.scored]
        rows.append([i, *map(_num, step.next_state.position), step.chosen.label, *values])
    header = ["step", *AXES[:dim], "chosen", "value_idle"] + [f"value_{k}" for k in range(8)]
    return header, rows


def write_trajectory_csv(path, traj, snapshot):
    header, rows = trajectory_rows(traj)
    return _write(path, _csv_text(snapshot, header, rows))


def write_grid_csv(path, result, snapshot):
    """Rows ``obj_x, obj_y, direction_bin, value``; bins are ``idle`` or 0..7."""
    labels = ["idle"] + [str(k) for k in range(8)]
    rows = []
    for pos, values in zip(result.positions, result.values):
        for label, v in zip(labels, values):
            rows.append([_num(pos[0]), _num(pos[1]), label, _num(v)])
    return _write(path, _csv_text(snapshot, ["obj_x", "obj_y", "direction_bin", "value"], rows))


def write_profile_csv(path, results, snapshot):
    rows = []
    for tag, res in results.items():
        for label, angle, mean, se, n in res.profile_rows():
            rows.append([tag, label, _num(angle), _num(mean), _num(se), n])
    header = ["geometry", "direction_bin", "angle", "mean", "std_error", "n"]
    return _write(path, _csv_text(snapshot, header, rows))


def write_report_csv(path, checks, snapshot):
    rows = [[c.name, _num(c.statistic), _num(c.threshold), int(c.passed), c.detail]
            for c in checks]
    return _write(path, _csv_text(snapshot, ["name", "statistic", "threshold", "passed", "detail"],
                                  rows))


# --- SVG --------------------------------------------------------------------

COLORS = {"euclidean": "#1f77b4", "projective": "#d62728"}
W, H, PAD = 480, 360, 50


class _Canvas:
    def __init__(self, xlim, ylim, title, snapshot):
        self.xlim, self.ylim = xlim, ylim
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- config: {escape(snapshot).replace('--', '- -')} -->",
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        ]

    def x(self, v):
        lo, hi = self.xlim
        return PAD + (v - lo) / (hi - lo) * (W - 2 * PAD)

    def y(self, v):
        lo, hi = self.ylim
        return H - PAD - (v - lo) / (hi - lo) * (H - 2 * PAD)

    def axes(self, xlabel, ylabel, xticks, yticks):
        x0, x1 = self.x(self.xlim[0]), self.x(self.xlim[1])
        y0, y1 = self.y(self.ylim[0]), self.y(self.ylim[1])
        self.parts.append(f'<path d="M{x0:.2f},{y1:.2f} L{x0:.2f},{y0:.2f} L{x1:.2f},{y0:.2f}" '
                          'fill="none" stroke="black"/>')
        for t in xticks:
            px = self.x(t)
            self.parts.append(f'<line x1="{px:.2f}" y1="{y0:.2f}" x2="{px:.2f}" y2="{y0 + 4:.2f}" '
                              'stroke="black"/>')
            self.parts.append(f'<text x="{px:.2f}" y="{y0 + 16:.2f}" text-anchor="middle">'
                              f'{_tick(t)}</text>')
        for t in yticks:
            py = self.y(t)
            self.parts.append(f'<line x1="{x0 - 4:.2f}" y1="{py:.2f}" x2="{x0:.2f}" y2="{py:.2f}" '
                              'stroke="black"/>')
            self.parts.append(f'<text x="{x0 - 6:.2f}" y="{py + 4:.2f}" text-anchor="end">'
                              f'{_tick(t)}</text>')
        self.parts.append(f'<text x="{W / 2:.1f}" y="{H - 12}" text-anchor="middle">'
                          f'{escape(xlabel)}</text>')
        self.parts.append(f'<text x="14" y="{H / 2:.1f}" text-anchor="middle" '
                          f'transform="rotate(-90 14 {H / 2:.1f})">{escape(ylabel)}</text>')

    def polyline(self, xs, ys, color):
        pts = " ".join(f"{self.x(a):.2f},{self.y(b):.2f}" for a, b in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                          'stroke-width="1.5"/>')

    def circle(self, x, y, r, color, fill=None):
        self.parts.append(f'<circle cx="{self.x(x):.2f}" cy="{self.y(y):.2f}" r="{r}" '
                          f'stroke="{color}" fill="{fill or color}"/>')

    def errorbar(self, x, y, err, color):
        px = self.x(x)
        lo, hi = self.y(y - err), self.y(y + err)
        self.parts.append(f'<path d="M{px - 3:.2f},{lo:.2f} H{px + 3:.2f} M{px:.2f},{lo:.2f} '
                          f'V{hi:.2f} M{px - 3:.2f},{hi:.2f} H{px + 3:.2f}" stroke="{color}"/>')

    def legend(self, entries):
        for i, (label, color) in enumerate(entries):
            y = PAD + 14 * i
            self.parts.append(f'<rect x="{W - PAD - 90}" y="{y - 8}" width="10" height="10" '
                              f'fill="{color}"/>')
            self.parts.append(f'<text x="{W - PAD - 75}" y="{y + 1}">{escape(label)}</text>')

    def text(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _tick(v):
    return f"{v:.3g}"


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _pad_range(lo, hi, frac=0.1):
    span = hi - lo
    if span <= 0:
        span = max(abs(hi), 1.0)
    return lo - frac * span, hi + frac * span


def write_trajectories_svg(path, trajectories, obj, snapshot):
    """Agent paths in the floor plane with the object marked."""
    xs = [obj[0]] + [p[0] for t in trajectories.values() for p in t.positions]
    ys = [obj[1]] + [p[1] for t in trajectories.values() for p in t.positions]
    lo = min(min(xs), min(ys))
    hi = max(max(xs), max(ys))
    lim = _pad_range(lo, hi)
    canvas = _Canvas(lim, lim, "Agent trajectories", snapshot)
    canvas.axes("x (world)", "y (world)", _ticks(*lim), _ticks(*lim))
    for tag, traj in trajectories.items():
        pos = traj.positions
        color = COLORS.get(tag, "black")
        canvas.polyline(pos[:, 0], pos[:, 1], color)
        canvas.circle(pos[-1, 0], pos[-1, 1], 3, color)
    canvas.circle(obj[0], obj[1], 5, "black", "none")
    canvas.legend([(tag, COLORS.get(tag, "black")) for tag in trajectories] + [("object", "black")])
    return _write(path, canvas.text())


def write_profile_svg(path, results, snapshot):
    """Mean epistemic value by direction (radians from the object direction)."""
    angles = [2 * math.pi * k / 8 for k in range(8)]
    lows, highs = [], []
    for res in results.values():
        lows.append(min(m - s for m, s in zip(res.mean[1:], res.std_error[1:])))
        highs.append(max(m + s for m, s in zip(res.mean[1:], res.std_error[1:])))
    ylim = _pad_range(min(lows), max(highs))
    xlim = (-0.3, 2 * math.pi)
    canvas = _Canvas(xlim, ylim, "Epistemic value by direction", snapshot)
    canvas.axes("direction (rad)", "epistemic value", angles[::2] + [angles[-1]], _ticks(*ylim))
    for tag, res in results.items():
        color = COLORS.get(tag, "black")
        canvas.polyline(angles, res.mean[1:], color)
        for a, m, s in zip(angles, res.mean[1:], res.std_error[1:]):
            canvas.errorbar(a, m, s, color)
            canvas.circle(a, m, 2.5, color)
    canvas.legend([(tag, COLORS.get(tag, "black")) for tag in results])
    return _write(path, canvas.text())
