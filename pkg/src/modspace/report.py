"""Deterministic JSON/CSV/SVG emission without plotting dependencies.

SVG plots are written directly; raster heatmaps ride inside the SVG as a
base64-encoded PNG built with zlib only.  Reports must be byte-identical
across reruns with equal inputs, so nothing here touches clocks or ids.
"""

from __future__ import annotations

import base64
import csv
import json
import struct
import zlib

import numpy as np

__all__ = ["write_json", "write_csv", "svg_line_plot", "svg_heatmap", "png_gray"]


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(c) if isinstance(c, float) else c for c in row])


def png_gray(matrix: np.ndarray) -> bytes:
    """8-bit grayscale PNG of a 2-d array scaled to its own [min, max]."""
    m = np.asarray(matrix, dtype=float)
    lo, hi = float(m.min()), float(m.max())
    span = hi - lo if hi > lo else 1.0
    img = np.clip((m - lo) / span * 255.0, 0, 255).astype(np.uint8)
    height, width = img.shape

    def chunk(tag: bytes, payload: bytes) -> bytes:
        return (
            struct.pack(">I", len(payload))
            + tag
            + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
        )

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 0, 0, 0, 0)
    raw = b"".join(b"\x00" + img[r].tobytes() for r in range(height))
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(raw, 9))
        + chunk(b"IEND", b"")
    )


def svg_heatmap(path, matrix: np.ndarray, title: str = "", xlabel: str = "", ylabel: str = ""):
    """Grayscale heatmap as an SVG-wrapped PNG."""
    png = base64.b64encode(png_gray(matrix)).decode("ascii")
    w, h = 640, 640
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h + 40}">',
        f'<text x="{w // 2}" y="20" text-anchor="middle" font-family="monospace" font-size="14">{title}</text>',
        f'<image x="40" y="30" width="{w - 80}" height="{h - 80}" preserveAspectRatio="none" '
        f'href="data:image/png;base64,{png}"/>',
        f'<text x="{w // 2}" y="{h - 20}" text-anchor="middle" font-family="monospace" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{h // 2}" text-anchor="middle" font-family="monospace" font-size="12" '
        f'transform="rotate(-90 16 {h // 2})">{ylabel}</text>',
        "</svg>",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def svg_line_plot(path, xs, series: dict, title: str = "", xlabel: str = "", logy: bool = False):
    """Minimal multi-series line plot; series maps label -> list of y values."""
    width, height, pad = 640, 420, 50
    xs = [float(x) for x in xs]
    all_y = [float(y) for ys in series.values() for y in ys]
    if logy:
        all_y = [np.log10(max(y, 1e-300)) for y in all_y]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return pad + (x - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def sy(y):
        yy = np.log10(max(y, 1e-300)) if logy else y
        return height - pad - (yy - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-family="monospace" font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" font-family="monospace" font-size="12">{xlabel}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-family="monospace" font-size="10">{x_lo:.3g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="end" font-family="monospace" font-size="10">{x_hi:.3g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-family="monospace" font-size="10">{y_lo:.3g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-family="monospace" font-size="10">{y_hi:.3g}</text>',
    ]
    for i, (label, ys) in enumerate(series.items()):
        color = colors[i % len(colors)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(
            f'<text x="{width - pad}" y="{pad + 14 * (i + 1)}" text-anchor="end" '
            f'font-family="monospace" font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
