"""Deterministic ternary-plot SVG for three-type data.

Barycentric projection x = p2 + p3/2, y = (sqrt(3)/2) p3 into a fixed
800 x 693 viewport.  The writer is plain string assembly with fixed float
formatting, so identical inputs give byte-identical files.
"""

import numpy as np

from .errors import WrongDimension

WIDTH = 800
HEIGHT = 693
_SQ3_2 = np.sqrt(3.0) / 2.0


def project(p) -> tuple[float, float]:
    """Pixel coordinates of a barycentric point (SVG y-axis points down)."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise WrongDimension("ternary projection needs exactly 3 components")
    x = p[..., 1] + 0.5 * p[..., 2]
    y = _SQ3_2 * p[..., 2]
    return WIDTH * x, HEIGHT - WIDTH * y


def _pt(x: float, y: float) -> str:
    return f"{x:.3f},{y:.3f}"


def _frame() -> list[str]:
    corners = [project(np.eye(3)[i]) for i in range(3)]
    pts = " ".join(_pt(*c) for c in corners)
    out = [f'<polygon points="{pts}" fill="none" stroke="#333" stroke-width="1.5"/>']
    labels = ["p1", "p2", "p3"]
    anchors = [("end", 14, 16), ("start", -14, 16), ("middle", 0, -8)]
    for (cx, cy), lab, (anc, dx, dy) in zip(corners, labels, anchors):
        out.append(f'<text x="{cx + dx:.3f}" y="{cy + dy:.3f}" '
                   f'text-anchor="{anc}" font-family="sans-serif" '
                   f'font-size="14" fill="#333">{lab}</text>')
    return out


def trajectory_svg(states) -> str:
    """Polyline of a three-type trajectory inside the triangle frame."""
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[1] != 3:
        raise WrongDimension("expected an array of 3-component states")
    xs, ys = project(states)
    pts = " ".join(_pt(x, y) for x, y in zip(xs, ys))
    body = _frame()
    body.append(f'<polyline points="{pts}" fill="none" stroke="#0057b8" '
                'stroke-width="1.0" stroke-linejoin="round"/>')
    body.append(f'<circle cx="{xs[0]:.3f}" cy="{ys[0]:.3f}" r="3" fill="#d62728"/>')
    return _document(body)


def portrait_svg(portrait, max_arrow_px: float = 24.0) -> str:
    """Arrow glyphs for a sampled three-type vector field.

    The projection is linear, so velocities map to pixel segments directly;
    lengths are normalized so the fastest arrow spans ``max_arrow_px``.
    """
    speeds = [float(np.linalg.norm(v)) for _, v in portrait]
    top = max(speeds) if speeds else 0.0
    scale = max_arrow_px / (WIDTH * top) if top > 0 else 0.0
    body = _frame()
    for p, v in portrait:
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if p.shape[-1] != 3 or v.shape[-1] != 3:
            raise WrongDimension("portrait entries need 3 components")
        x0, y0 = project(p)
        if float(np.linalg.norm(v)) == 0.0:
            body.append(f'<circle cx="{x0:.3f}" cy="{y0:.3f}" r="1.5" fill="#555"/>')
            continue
        dx = WIDTH * (v[1] + 0.5 * v[2]) * scale
        dy = -WIDTH * _SQ3_2 * v[2] * scale
        body.append(f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x0 + dx:.3f}" '
                    f'y2="{y0 + dy:.3f}" stroke="#0057b8" stroke-width="1.0"/>')
        body.append(f'<circle cx="{x0 + dx:.3f}" cy="{y0 + dy:.3f}" r="1.2" '
                    'fill="#0057b8"/>')
    return _document(body)


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"
