"""SVG rendering of 2-D Gaussian embeddings as axis-aligned ellipses.

Each item becomes one ``<ellipse>`` centered at its location with
semi-axes ``radius_scale * sqrt(sigma)`` per coordinate (default 2, about
95% of the mass per axis). Covariances are diagonal, so no rotation angle
is rendered. The drawing keeps data units: ellipses live in a viewBox
spanning the data with a y-flip group, which makes the written rx/ry
attributes directly comparable to the embedding values. Output bytes are
deterministic for identical inputs.
"""

import numpy as np

__all__ = ["PALETTE", "render_svg"]

# Fixed 10-color palette (matplotlib "tab10" hex values).
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

_FILL_OPACITY = 0.3


def _fmt(value):
    return f"{value:.6g}"


def render_svg(emb, labels=None, radius_scale=2.0, canvas=600):
    """Render an embedding set to an SVG document string.

    ``labels`` (optional, one int per item) select fill colors from the
    fixed palette; without labels every ellipse uses the first color.
    Only 2-D embeddings can be drawn.
    """
    if emb.dim != 2:
        raise ValueError(
            f"plotting requires 2-D embeddings, got d={emb.dim}; "
            "train with d=2 to visualize"
        )
    if radius_scale <= 0:
        raise ValueError("radius_scale must be positive")
    if canvas < 1:
        raise ValueError("canvas must be >= 1 pixel")
    n = len(emb)
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64).ravel()
        if labels.shape[0] != n:
            raise ValueError(f"expected {n} labels, got {labels.shape[0]}")

    rx = radius_scale * np.sqrt(emb.sigma[:, 0])
    ry = radius_scale * np.sqrt(emb.sigma[:, 1])
    x_min = float(np.min(emb.mu[:, 0] - rx))
    x_max = float(np.max(emb.mu[:, 0] + rx))
    y_min = float(np.min(emb.mu[:, 1] - ry))
    y_max = float(np.max(emb.mu[:, 1] + ry))
    pad = 0.05 * max(x_max - x_min, y_max - y_min, 1e-9)
    x_min, x_max = x_min - pad, x_max + pad
    y_min, y_max = y_min - pad, y_max + pad
    width = x_max - x_min
    height = y_max - y_min
    px_w = canvas
    px_h = max(1, round(canvas * height / width))

    color_ids = np.zeros(n, dtype=np.int64)
    if labels is not None:
        _, color_ids = np.unique(labels, return_inverse=True)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{px_w}" height="{px_h}" '
        f'viewBox="{_fmt(x_min)} {_fmt(y_min)} {_fmt(width)} {_fmt(height)}">',
        # Flip the y axis so data coordinates read the usual way up.
        f'<g transform="translate(0 {_fmt(y_min + y_max)}) scale(1 -1)">',
    ]
    for i in range(n):
        color = PALETTE[int(color_ids[i]) % len(PALETTE)]
        lines.append(
            f'<ellipse cx="{_fmt(emb.mu[i, 0])}" cy="{_fmt(emb.mu[i, 1])}" '
            f'rx="{_fmt(rx[i])}" ry="{_fmt(ry[i])}" '
            f'fill="{color}" fill-opacity="{_FILL_OPACITY}" '
            f'stroke="{color}" stroke-width="{_fmt(0.002 * width)}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
