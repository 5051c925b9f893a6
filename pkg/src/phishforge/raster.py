"""Raster transforms for logo perturbation: opacity, watermark, rotation,
Gaussian blur, grey mesh, and additive noise.

The transforms themselves are implemented directly on numpy buffers so
their numeric behaviour is exactly as contracted (kernel normalization,
right-angle dimension swaps, clamping). Pillow is used only as PNG codec
and for watermark text glyphs; a small built-in rasterizer covers the
common SVG shapes, since full SVG fidelity is explicitly best-effort.
"""
from __future__ import annotations

import io
import math
import random
import re
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, ImageDraw, ImageFont

MESH_GREY = 128
WATERMARK_COLOUR = (128, 128, 128)

TRANSFORM_KINDS = ("opacity", "watermark", "rotate", "gaussian_blur", "grey_mesh", "noise")
# V5 picks among these when no kind is forced.
LOGO_TRANSFORM_KINDS = ("rotate", "gaussian_blur", "grey_mesh", "noise")


class RasterError(ValueError):
    pass


@dataclass
class RasterImage:
    """8-bit RGBA image, row-major."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise RasterError("image dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 4):
            raise RasterError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x4"
            )
        if self.pixels.dtype != np.uint8:
            raise RasterError("pixel buffer must be uint8")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        return cls(arr.shape[1], arr.shape[0], arr)

    @classmethod
    def from_png(cls, data: bytes) -> "RasterImage":
        try:
            with Image.open(io.BytesIO(data)) as im:
                rgba = im.convert("RGBA")
        except Exception as exc:
            raise RasterError(f"undecodable image bytes: {exc}") from exc
        return cls.from_array(np.asarray(rgba))

    @classmethod
    def filled(cls, width: int, height: int, rgba: tuple[int, int, int, int]) -> "RasterImage":
        arr = np.empty((height, width, 4), dtype=np.uint8)
        arr[:, :] = rgba
        return cls(width, height, arr)

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, "RGBA").save(buf, format="PNG")
        return buf.getvalue()

    def copy(self) -> "RasterImage":
        return RasterImage(self.width, self.height, self.pixels.copy())


@dataclass(frozen=True)
class TransformSpec:
    """Tagged transform description; build via the class constructors so
    parameter ranges are validated up front."""

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def opacity(cls, alpha: float) -> "TransformSpec":
        if not 0.0 <= alpha <= 1.0:
            raise RasterError("opacity alpha must be in [0, 1]")
        return cls("opacity", {"alpha": float(alpha)})

    @classmethod
    def watermark(cls, text: str, placement: str = "bottom_right", mark_alpha: float = 0.4) -> "TransformSpec":
        if placement not in ("bottom_right", "diagonal"):
            raise RasterError("watermark placement must be bottom_right or diagonal")
        if not 0.0 <= mark_alpha <= 1.0:
            raise RasterError("mark_alpha must be in [0, 1]")
        if not text:
            raise RasterError("watermark text must be non-empty")
        return cls("watermark", {"text": text, "placement": placement, "mark_alpha": float(mark_alpha)})

    @classmethod
    def rotate(cls, theta: float, direction: str = "cw") -> "TransformSpec":
        if direction not in ("cw", "ccw"):
            raise RasterError("rotation direction must be cw or ccw")
        return cls("rotate", {"theta": float(theta), "direction": direction})

    @classmethod
    def gaussian_blur(cls, sigma: float, kernel_radius: int | None = None) -> "TransformSpec":
        if sigma <= 0:
            raise RasterError("blur sigma must be > 0")
        min_radius = math.ceil(3 * sigma)
        radius = min_radius if kernel_radius is None else int(kernel_radius)
        if radius < min_radius:
            raise RasterError(f"kernel_radius must be >= ceil(3*sigma) = {min_radius}")
        return cls("gaussian_blur", {"sigma": float(sigma), "kernel_radius": radius})

    @classmethod
    def grey_mesh(cls, spacing_px: int = 8, line_width_px: int = 1, mesh_alpha: float = 0.5) -> "TransformSpec":
        if spacing_px <= 0 or line_width_px <= 0:
            raise RasterError("mesh spacing and line width must be positive")
        if not 0.0 < mesh_alpha <= 1.0:
            raise RasterError("mesh_alpha must be in (0, 1]")
        return cls("grey_mesh", {"spacing_px": int(spacing_px), "line_width_px": int(line_width_px), "mesh_alpha": float(mesh_alpha)})

    @classmethod
    def noise(cls, distribution: str = "gaussian", strength: float = 10.0) -> "TransformSpec":
        if distribution not in ("gaussian", "uniform"):
            raise RasterError("noise distribution must be gaussian or uniform")
        if strength <= 0:
            raise RasterError("noise strength must be > 0")
        return cls("noise", {"distribution": distribution, "strength": float(strength)})


def transform_image(img: RasterImage, spec: TransformSpec, rng: random.Random) -> RasterImage:
    """Apply one transform; pure function, never mutates the input."""
    if spec.kind == "opacity":
        return _apply_opacity(img, spec.params["alpha"])
    if spec.kind == "watermark":
        return _apply_watermark(img, **spec.params)
    if spec.kind == "rotate":
        return _apply_rotate(img, spec.params["theta"], spec.params["direction"])
    if spec.kind == "gaussian_blur":
        return _apply_blur(img, spec.params["sigma"], spec.params["kernel_radius"])
    if spec.kind == "grey_mesh":
        return _apply_mesh(img, spec.params["spacing_px"], spec.params["line_width_px"], spec.params["mesh_alpha"])
    if spec.kind == "noise":
        return _apply_noise(img, spec.params["distribution"], spec.params["strength"], rng)
    raise RasterError(f"unknown transform kind {spec.kind!r}")


def _apply_opacity(img: RasterImage, alpha: float) -> RasterImage:
    out = img.pixels.copy()
    scaled = np.rint(out[:, :, 3].astype(np.float64) * alpha)
    out[:, :, 3] = np.clip(scaled, 0, 255).astype(np.uint8)
    return RasterImage.from_array(out)


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def _convolve_axis(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = (len(kernel) - 1) // 2
    pad = [(0, 0), (0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(arr, pad, mode="edge")
    out = np.zeros_like(arr)
    for i, w in enumerate(kernel):
        if axis == 0:
            out += w * padded[i : i + arr.shape[0], :, :]
        else:
            out += w * padded[:, i : i + arr.shape[1], :]
    return out


def _apply_blur(img: RasterImage, sigma: float, radius: int) -> RasterImage:
    kernel = gaussian_kernel(sigma, radius)
    data = img.pixels.astype(np.float64)
    data = _convolve_axis(data, kernel, axis=1)
    data = _convolve_axis(data, kernel, axis=0)
    return RasterImage.from_array(np.clip(np.rint(data), 0, 255))


def _apply_mesh(img: RasterImage, spacing: int, width_px: int, alpha: float) -> RasterImage:
    h, w = img.height, img.width
    xs = np.arange(w) % spacing < width_px
    ys = np.arange(h) % spacing < width_px
    mask = np.zeros((h, w), dtype=bool)
    mask[:, xs] = True
    mask[ys, :] = True

    data = img.pixels.astype(np.float64)
    rgb = data[:, :, :3]
    a = data[:, :, 3]
    rgb[mask] = (1.0 - alpha) * rgb[mask] + alpha * MESH_GREY
    a[mask] = (1.0 - alpha) * a[mask] + alpha * 255.0
    return RasterImage.from_array(np.clip(np.rint(data), 0, 255))


def _apply_noise(img: RasterImage, distribution: str, strength: float, rng: random.Random) -> RasterImage:
    gen = np.random.default_rng(rng.getrandbits(64))
    shape = (img.height, img.width, 3)
    if distribution == "gaussian":
        delta = gen.normal(0.0, strength, shape)
    else:
        delta = gen.uniform(-strength, strength, shape)
    data = img.pixels.astype(np.float64)
    # colour channels only; noisy alpha would speckle transparency instead
    data[:, :, :3] = np.clip(np.rint(data[:, :, :3] + delta), 0, 255)
    return RasterImage.from_array(data)


def _apply_rotate(img: RasterImage, theta: float, direction: str) -> RasterImage:
    # positive effective angle = clockwise on screen (y grows downward)
    eff = theta if direction == "cw" else -theta
    eff %= 360.0
    if abs(eff - round(eff / 90.0) * 90.0) < 1e-9:
        quarters = int(round(eff / 90.0)) % 4
        return RasterImage.from_array(np.rot90(img.pixels, k=-quarters).copy())

    rad = math.radians(eff)
    cos_t, sin_t = math.cos(rad), math.sin(rad)
    w, h = img.width, img.height
    out_w = int(math.ceil(abs(w * cos_t) + abs(h * sin_t)))
    out_h = int(math.ceil(abs(w * sin_t) + abs(h * cos_t)))

    # inverse map output pixel centres back into the source
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    xs -= (out_w - 1) / 2.0
    ys -= (out_h - 1) / 2.0
    src_x = cos_t * xs + sin_t * ys + (w - 1) / 2.0
    src_y = -sin_t * xs + cos_t * ys + (h - 1) / 2.0

    x0 = np.floor(src_x).astype(np.int64)
    y0 = np.floor(src_y).astype(np.int64)
    fx = src_x - x0
    fy = src_y - y0

    # premultiplied alpha so transparent background doesn't bleed dark halos
    src = img.pixels.astype(np.float64)
    premul = src.copy()
    premul[:, :, :3] *= src[:, :, 3:4] / 255.0

    def sample(yy: np.ndarray, xx: np.ndarray) -> np.ndarray:
        valid = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        yc = np.clip(yy, 0, h - 1)
        xc = np.clip(xx, 0, w - 1)
        vals = premul[yc, xc]
        vals[~valid] = 0.0
        return vals

    w00 = ((1 - fx) * (1 - fy))[:, :, None]
    w10 = (fx * (1 - fy))[:, :, None]
    w01 = ((1 - fx) * fy)[:, :, None]
    w11 = (fx * fy)[:, :, None]
    acc = (
        w00 * sample(y0, x0)
        + w10 * sample(y0, x0 + 1)
        + w01 * sample(y0 + 1, x0)
        + w11 * sample(y0 + 1, x0 + 1)
    )

    alpha = acc[:, :, 3:4]
    rgb = np.divide(acc[:, :, :3] * 255.0, alpha, out=np.zeros_like(acc[:, :, :3]), where=alpha > 0)
    out = np.concatenate([rgb, alpha], axis=2)
    return RasterImage.from_array(np.clip(np.rint(out), 0, 255))


def _apply_watermark(img: RasterImage, text: str, placement: str, mark_alpha: float) -> RasterImage:
    base = Image.fromarray(img.pixels, "RGBA")
    font_size = max(8, round(0.10 * img.height))
    try:
        font = ImageFont.load_default(size=font_size)
    except TypeError:  # older Pillow: fixed-size bitmap font
        font = ImageFont.load_default()
    fill = (*WATERMARK_COLOUR, max(1, round(mark_alpha * 255)))

    probe = ImageDraw.Draw(Image.new("RGBA", (1, 1)))
    bbox = probe.textbbox((0, 0), text, font=font)
    text_w = max(1, bbox[2] - bbox[0])
    text_h = max(1, bbox[3] - bbox[1])

    layer = Image.new("RGBA", (img.width, img.height), (0, 0, 0, 0))
    if placement == "bottom_right":
        margin = max(2, img.width // 50)
        x = max(0, img.width - text_w - margin)
        y = max(0, img.height - text_h - margin)
        ImageDraw.Draw(layer).text((x - bbox[0], y - bbox[1]), text, font=font, fill=fill)
    else:  # diagonal
        strip = Image.new("RGBA", (text_w + 4, text_h + 4), (0, 0, 0, 0))
        ImageDraw.Draw(strip).text((2 - bbox[0], 2 - bbox[1]), text, font=font, fill=fill)
        angle = math.degrees(math.atan2(img.height, img.width))
        rotated = strip.rotate(angle, expand=True, resample=Image.BICUBIC)
        layer.paste(
            rotated,
            ((img.width - rotated.width) // 2, (img.height - rotated.height) // 2),
            rotated,
        )

    out = Image.alpha_composite(base, layer)
    return RasterImage.from_array(np.asarray(out))


# -- minimal SVG support ---------------------------------------------------

_SVG_ROOT = re.compile(r"<svg\b([^>]*)>", re.IGNORECASE | re.DOTALL)
_SVG_SHAPE = re.compile(
    r"<(rect|circle|ellipse|line|polygon|polyline)\b([^>]*?)/?>", re.IGNORECASE | re.DOTALL
)
_ATTR = re.compile(r"([\w:-]+)\s*=\s*(\"[^\"]*\"|'[^']*')")

_NAMED_COLOURS = {
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "red": (255, 0, 0),
    "green": (0, 128, 0),
    "blue": (0, 0, 255),
    "grey": (128, 128, 128),
    "gray": (128, 128, 128),
    "yellow": (255, 255, 0),
    "orange": (255, 165, 0),
}


def _parse_attrs(raw: str) -> dict[str, str]:
    return {m.group(1).lower(): m.group(2)[1:-1] for m in _ATTR.finditer(raw)}


def _parse_length(value: str | None, fallback: float) -> float:
    if not value:
        return fallback
    m = re.match(r"\s*([0-9.+-eE]+)", value)
    return float(m.group(1)) if m else fallback


def _parse_colour(value: str | None) -> tuple[int, int, int] | None:
    if value is None:
        return (0, 0, 0)
    v = value.strip().lower()
    if v in ("none", "transparent"):
        return None
    if v.startswith("#"):
        hexpart = v[1:]
        if len(hexpart) == 3:
            hexpart = "".join(ch * 2 for ch in hexpart)
        if len(hexpart) >= 6:
            try:
                return tuple(int(hexpart[i : i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]
            except ValueError:
                return (0, 0, 0)
    m = re.match(r"rgb\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)", v)
    if m:
        return tuple(min(255, int(g)) for g in m.groups())  # type: ignore[return-value]
    return _NAMED_COLOURS.get(v, (0, 0, 0))


def svg_nominal_size(svg_text: str) -> tuple[float, float]:
    """Width/height from attributes, falling back to the viewBox."""
    root = _SVG_ROOT.search(svg_text)
    attrs = _parse_attrs(root.group(1)) if root else {}
    vb = attrs.get("viewbox")
    vb_dims = None
    if vb:
        parts = re.split(r"[\s,]+", vb.strip())
        if len(parts) == 4:
            vb_dims = (float(parts[2]), float(parts[3]))
    width = _parse_length(attrs.get("width"), 0.0)
    height = _parse_length(attrs.get("height"), 0.0)
    if width <= 0 or height <= 0:
        if vb_dims:
            return vb_dims
        return (100.0, 100.0)
    return (width, height)


def rasterize_svg(svg_text: str, scale: float = 4.0) -> RasterImage:
    """Best-effort rasterization of basic shapes at `scale` x nominal size."""
    nominal_w, nominal_h = svg_nominal_size(svg_text)
    root = _SVG_ROOT.search(svg_text)
    attrs = _parse_attrs(root.group(1)) if root else {}
    min_x = min_y = 0.0
    user_w, user_h = nominal_w, nominal_h
    vb = attrs.get("viewbox")
    if vb:
        parts = re.split(r"[\s,]+", vb.strip())
        if len(parts) == 4:
            min_x, min_y, user_w, user_h = (float(p) for p in parts)

    out_w = max(1, round(nominal_w * scale))
    out_h = max(1, round(nominal_h * scale))
    sx = out_w / user_w if user_w else 1.0
    sy = out_h / user_h if user_h else 1.0

    canvas = Image.new("RGBA", (out_w, out_h), (0, 0, 0, 0))
    draw = ImageDraw.Draw(canvas)

    def tx(x: float) -> float:
        return (x - min_x) * sx

    def ty(y: float) -> float:
        return (y - min_y) * sy

    for match in _SVG_SHAPE.finditer(svg_text):
        tag = match.group(1).lower()
        a = _parse_attrs(match.group(2))
        fill = _parse_colour(a.get("fill"))
        stroke = _parse_colour(a.get("stroke")) if "stroke" in a else None
        stroke_w = max(1, round(_parse_length(a.get("stroke-width"), 1.0) * sx))
        opacity = _parse_length(a.get("opacity"), 1.0) * _parse_length(a.get("fill-opacity"), 1.0)
        alpha = max(0, min(255, round(255 * opacity)))
        fill_rgba = (*fill, alpha) if fill else None
        stroke_rgba = (*stroke, alpha) if stroke else None

        if tag == "rect":
            x = tx(_parse_length(a.get("x"), 0.0))
            y = ty(_parse_length(a.get("y"), 0.0))
            w = _parse_length(a.get("width"), 0.0) * sx
            h = _parse_length(a.get("height"), 0.0) * sy
            if w > 0 and h > 0:
                draw.rectangle([x, y, x + w - 1, y + h - 1], fill=fill_rgba, outline=stroke_rgba)
        elif tag in ("circle", "ellipse"):
            cx = tx(_parse_length(a.get("cx"), 0.0))
            cy = ty(_parse_length(a.get("cy"), 0.0))
            if tag == "circle":
                rx = _parse_length(a.get("r"), 0.0) * sx
                ry = _parse_length(a.get("r"), 0.0) * sy
            else:
                rx = _parse_length(a.get("rx"), 0.0) * sx
                ry = _parse_length(a.get("ry"), 0.0) * sy
            if rx > 0 and ry > 0:
                draw.ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=fill_rgba, outline=stroke_rgba)
        elif tag == "line":
            pts = [
                (tx(_parse_length(a.get("x1"), 0.0)), ty(_parse_length(a.get("y1"), 0.0))),
                (tx(_parse_length(a.get("x2"), 0.0)), ty(_parse_length(a.get("y2"), 0.0))),
            ]
            draw.line(pts, fill=stroke_rgba or (*(fill or (0, 0, 0)), alpha), width=stroke_w)
        elif tag in ("polygon", "polyline"):
            raw_pts = re.split(r"[\s,]+", (a.get("points") or "").strip())
            coords = [float(p) for p in raw_pts if p]
            pts = [(tx(coords[i]), ty(coords[i + 1])) for i in range(0, len(coords) - 1, 2)]
            if len(pts) >= 2:
                if tag == "polygon" and fill_rgba:
                    draw.polygon(pts, fill=fill_rgba, outline=stroke_rgba)
                else:
                    draw.line(pts, fill=stroke_rgba or (*(fill or (0, 0, 0)), alpha), width=stroke_w)

    return RasterImage.from_array(np.asarray(canvas))
