"""Deterministic rasterizer: world models to 8-bit RGB bitmaps and PNG files.

No anti-aliasing: a pixel is painted iff its center lies inside the shape, so
every pixel is either the background or an entry of the color table (or its
jittered variant when a jitter stream is supplied).
"""

from __future__ import annotations

import colorsys
import hashlib
import math
from random import Random

import numpy as np
from PIL import Image

from .worldmodel import Color, Entity, Shape, WorldModel, bounding_box

CANVAS_SIZE = 64
BACKGROUND = (0, 0, 0)

COLOR_TABLE: dict[Color, tuple[int, int, int]] = {
    Color.RED: (230, 50, 50),
    Color.GREEN: (60, 200, 70),
    Color.BLUE: (60, 90, 230),
    Color.YELLOW: (235, 220, 60),
    Color.MAGENTA: (225, 60, 225),
    Color.CYAN: (70, 215, 215),
    Color.GRAY: (150, 150, 150),
}

# Bitmap: row-major (H, W, 3) uint8 array
Bitmap = np.ndarray


def color_table_fingerprint() -> str:
    text = ";".join(f"{c.value}={COLOR_TABLE[c]}" for c in Color) + f";bg={BACKGROUND}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _polygon_mask(lx: np.ndarray, ly: np.ndarray, vertices: list[tuple[float, float]]) -> np.ndarray:
    # convex polygon, winding-independent via the signed area
    n = len(vertices)
    area2 = 0.0
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        area2 += x1 * y2 - x2 * y1
    inside = np.ones(lx.shape, dtype=bool)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        edge = (x2 - x1) * (ly - y1) - (y2 - y1) * (lx - x1)
        inside &= edge * area2 >= 0.0
    return inside


def _shape_mask(shape: Shape, lx: np.ndarray, ly: np.ndarray, hw: float, hh: float) -> np.ndarray:
    if shape in (Shape.SQUARE, Shape.RECTANGLE):
        return (np.abs(lx) <= hw) & (np.abs(ly) <= hh)
    if shape in (Shape.CIRCLE, Shape.ELLIPSE):
        return (lx / hw) ** 2 + (ly / hh) ** 2 <= 1.0
    if shape == Shape.SEMICIRCLE:
        # half-disc, flat edge through the center along the local x axis
        return ((lx / hw) ** 2 + (ly / hh) ** 2 <= 1.0) & (ly <= 0.0)
    if shape == Shape.TRIANGLE:
        # y grows downward, so the apex (-hh) points up at rotation 0
        return _polygon_mask(lx, ly, [(0.0, -hh), (-hw, hh), (hw, hh)])
    if shape == Shape.PENTAGON:
        verts = []
        for k in range(5):
            phi = -math.pi / 2.0 + k * math.tau / 5.0
            verts.append((hw * math.cos(phi), hh * math.sin(phi)))
        return _polygon_mask(lx, ly, verts)
    if shape == Shape.CROSS:
        arm_x = (np.abs(lx) <= hw) & (np.abs(ly) <= hh / 3.0)
        arm_y = (np.abs(lx) <= hw / 3.0) & (np.abs(ly) <= hh)
        return arm_x | arm_y
    raise ValueError(f"unhandled shape {shape}")


def _entity_mask(e: Entity, canvas_size: int) -> np.ndarray:
    x0, y0, x1, y1 = bounding_box(e)
    c0 = max(0, int(math.floor(x0 * canvas_size)))
    c1 = min(canvas_size - 1, int(math.ceil(x1 * canvas_size)))
    r0 = max(0, int(math.floor(y0 * canvas_size)))
    r1 = min(canvas_size - 1, int(math.ceil(y1 * canvas_size)))
    mask = np.zeros((canvas_size, canvas_size), dtype=bool)
    if c1 < c0 or r1 < r0:
        return mask

    xs = (np.arange(c0, c1 + 1) + 0.5) / canvas_size
    ys = (np.arange(r0, r1 + 1) + 0.5) / canvas_size
    gx, gy = np.meshgrid(xs, ys)
    dx = gx - e.center[0]
    dy = gy - e.center[1]
    cosr = math.cos(e.rotation)
    sinr = math.sin(e.rotation)
    lx = dx * cosr + dy * sinr
    ly = -dx * sinr + dy * cosr
    mask[r0 : r1 + 1, c0 : c1 + 1] = _shape_mask(e.shape, lx, ly, e.size[0] / 2.0, e.size[1] / 2.0)
    return mask


def _jittered(base: tuple[int, int, int], rng: Random) -> tuple[int, int, int]:
    h, s, v = colorsys.rgb_to_hsv(base[0] / 255.0, base[1] / 255.0, base[2] / 255.0)
    v = min(1.0, max(0.0, v * (1.0 + rng.uniform(-0.1, 0.1))))
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return (int(round(r * 255)), int(round(g * 255)), int(round(b * 255)))


def render(world: WorldModel, canvas_size: int = CANVAS_SIZE, jitter_rng: Random | None = None) -> Bitmap:
    """Rasterize a world to an RGB bitmap; later entities paint over earlier ones."""
    if canvas_size < 32:
        raise ValueError(f"canvas size {canvas_size} below minimum 32")
    img = np.zeros((canvas_size, canvas_size, 3), dtype=np.uint8)
    img[:, :] = BACKGROUND
    for e in world.entities:
        color = COLOR_TABLE[e.color]
        if jitter_rng is not None:
            color = _jittered(color, jitter_rng)
        img[_entity_mask(e, canvas_size)] = color
    return img


def write_png(bitmap: Bitmap, path) -> None:
    Image.fromarray(bitmap, "RGB").save(path, format="PNG")


def read_png(path) -> Bitmap:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))
