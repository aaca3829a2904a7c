"""JSON reports and SVG plots.

Reports have the top-level shape ``{meta, model, results, diagnostics,
schema_version}``.  Only ``meta`` carries run-dependent data (timestamp,
versions); everything else is a deterministic function of the config and
seed, serialized with sorted keys.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import platform
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def build_report(command: str, model: dict | None, results: dict, diagnostics: dict) -> dict:
    from . import __version__

    return {
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "command": command,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "package_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "model": _clean(model),
        "results": _clean(results),
        "diagnostics": _clean(diagnostics),
    }


def dumps(report: dict, include_meta: bool = True) -> str:
    body = dict(report)
    if not include_meta:
        body.pop("meta", None)
    return json.dumps(_clean(body), sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report))
    return path


# ---------------------------------------------------------------------------
# SVG


class _Canvas:
    def __init__(self, points: np.ndarray, size: int = 480, pad: int = 24):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        lo, hi = pts.min(0), pts.max(0)
        span = float(max((hi - lo).max(), 1e-9))
        self.lo, self.span, self.size, self.pad = lo, span, size, pad
        self.items: list[str] = []

    def xy(self, p):
        s = (self.size - 2 * self.pad) / self.span
        x = self.pad + (p[0] - self.lo[0]) * s
        y = self.size - self.pad - (p[1] - self.lo[1]) * s
        return x, y

    def polyline(self, pts, color="#333", width=1.2):
        coords = " ".join("%.2f,%.2f" % self.xy(p) for p in pts)
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def dot(self, p, color="#c00", r=4.0):
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>')

    def cross(self, p, color="#06c", r=5.0):
        x, y = self.xy(p)
        self.items.append(
            f'<path d="M{x - r:.2f},{y - r:.2f} L{x + r:.2f},{y + r:.2f} M{x - r:.2f},{y + r:.2f} '
            f'L{x + r:.2f},{y - r:.2f}" stroke="{color}" stroke-width="1.5"/>'
        )

    def triangle(self, p, color="#090", r=5.0):
        x, y = self.xy(p)
        self.items.append(
            f'<path d="M{x:.2f},{y - r:.2f} L{x + r:.2f},{y + r:.2f} L{x - r:.2f},{y + r:.2f} Z" fill="{color}"/>'
        )

    def render(self, title: str) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
            f'viewBox="0 0 {self.size} {self.size}">'
        )
        label = f'<text x="8" y="16" font-family="monospace" font-size="12">{title}</text>'
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', label] + self.items + ["</svg>"]) + "\n"


def curve_svg(model, samples: int = 1024) -> str:
    """The plane curve ``g = (f, height)``: double points filled, folds as crosses."""
    from .curves import find_double_points, fold_points

    th = np.linspace(0.0, 2.0 * np.pi, samples + 1)[:, None]
    P = model.g(th)
    cv = _Canvas(P)
    cv.polyline(P)
    for a, _ in find_double_points(model).pairs:
        cv.dot(model.g(np.array([a])))
    for t in fold_points(model):
        cv.cross(model.g(np.array([t])))
    return cv.render(f"{model.name}: g = (f, height)")


def surface_svg(model) -> str:
    """Fold curves projected by ``f``; cusps marked by triangles."""
    from .surfaces import find_cusps, trace_folds

    loops = trace_folds(model)
    if not loops:
        cv = _Canvas(np.zeros((2, 2)) + [[0, 0], [1, 1]])
        return cv.render(f"{model.name}: no fold curves")
    images = [model.f(lp.points) for lp in loops]
    cv = _Canvas(np.concatenate(images))
    for img in images:
        cv.polyline(img)
    for c in find_cusps(model)[0]:
        cv.triangle(model.f(c.points[0]))
    return cv.render(f"{model.name}: f(fold curves)")


def model_svg(model) -> str:
    return curve_svg(model) if model.domain.dim == 1 else surface_svg(model)
