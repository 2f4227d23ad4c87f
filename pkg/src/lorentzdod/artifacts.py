"""Deterministic CSV / JSON / SVG writers for run outputs.

Floats are printed with ``repr`` (shortest round-trip form) so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .chart import Frame
from .limitset import LimitSample

SCHEMA_VERSION = 1


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(payload: dict) -> str:
    """Canonical JSON; non-finite floats become strings so output stays strict JSON."""
    return json.dumps(_clean(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, payload: dict, schema: str) -> None:
    body = {"schema": f"lorentzdod.{schema}/{SCHEMA_VERSION}", **payload}
    Path(path).write_text(dumps_json(body), encoding="utf-8")


def limit_set_csv(sample: LimitSample) -> str:
    d = sample.reps.shape[1]
    lines = [",".join([f"x{i}" for i in range(d)] + ["word_len"])]
    for rep, wl in zip(sample.reps, sample.word_len):
        lines.append(",".join([repr(float(x)) for x in rep] + [str(int(wl))]))
    return "\n".join(lines) + "\n"


def project_2d(frame: Frame, reps: np.ndarray) -> np.ndarray:
    """Stereographic projection of ``Q_L - {L}`` (n = 3) onto the plane, from L.

    A unit representative ``(a, 0, w)`` with ``w`` future null maps to the
    spatial part of ``w / (1 - a)``; the radius ``w_t / (1 - a)`` sweeps
    ``(0, ∞)``, so the cone minus its apex lands on the punctured plane.
    """
    if frame.n != 3:
        raise ValueError("2D projection is only defined for n = 3")
    c = reps @ frame.basis_inv.T
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    c *= np.where(c[:, -1] < 0, -1.0, 1.0)[:, None]
    return c[:, 2:4] / (1.0 - c[:, [0]])


def limit_set_2d_csv(frame: Frame, sample: LimitSample) -> str:
    xy = project_2d(frame, sample.reps)
    lines = ["u,v,word_len"]
    for (u, v), wl in zip(xy, sample.word_len):
        lines.append(f"{float(u)!r},{float(v)!r},{int(wl)}")
    return "\n".join(lines) + "\n"


def scatter_svg(xy: np.ndarray, size: int = 600, title: str = "") -> str:
    """Minimal SVG scatter plot, scaled to the data's bounding box."""
    pad = 20
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    scale = (size - 2 * pad) / span
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{title}</title>')
    for x, y in xy:
        px = pad + (x - lo[0]) * scale
        py = size - pad - (y - lo[1]) * scale
        out.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="1.2" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
