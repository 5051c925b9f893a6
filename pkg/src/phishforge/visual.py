"""Visual transformations V1-V5: page-level CSS changes and raster edits of
the primary logo image.

Logo selection: among img elements whose source resolves to a .png or .svg
asset, candidates inside header/nav come first (document order), then the
rest by decoded pixel area descending. The first candidate is the primary
logo.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Mapping

from . import applicability as app
from . import catalog
from .content import FeatureApplication, FeatureError, NotApplicableError, _inject_style
from .dom import DocumentTree, Element
from .raster import (
    LOGO_TRANSFORM_KINDS,
    RasterImage,
    RasterError,
    TransformSpec,
    rasterize_svg,
    svg_nominal_size,
    transform_image,
)

V3_OPACITY_RANGE = (0.10, 0.35)


@dataclass(frozen=True)
class LogoCandidate:
    node_id: int
    asset_path: str
    extension: str
    area_px: int
    position_rank: int

    def __post_init__(self) -> None:
        if self.extension not in ("png", "svg"):
            raise FeatureError("logo candidates are restricted to png/svg")


def _asset_extension(path: str) -> str:
    return path.rsplit(".", 1)[-1].lower() if "." in path else ""


def locate_logo_candidates(
    tree: DocumentTree, assets: Mapping[str, bytes]
) -> list[LogoCandidate]:
    """All png/svg logo candidates, primary first; empty list permitted."""
    found: list[tuple[bool, LogoCandidate]] = []
    for rank, img in enumerate(tree.elements("img")):
        src = img.get("src")
        if not src or src not in assets:
            continue
        ext = _asset_extension(src)
        if ext not in ("png", "svg"):
            continue
        area = 0
        if ext == "png":
            try:
                decoded = RasterImage.from_png(assets[src])
            except RasterError:
                continue
            area = decoded.width * decoded.height
        in_chrome = any(anc.tag in ("header", "nav") for anc in img.ancestors())
        found.append(
            (in_chrome, LogoCandidate(img.node_id, src, ext, area, rank))
        )
    chrome = sorted((c for f, c in found if f), key=lambda c: c.position_rank)
    rest = sorted(
        (c for f, c in found if not f), key=lambda c: (-c.area_px, c.position_rank)
    )
    return chrome + rest


def _format_number(value: float) -> str:
    return f"{value:g}"


def _new_asset_path(asset_path: str, feature: str, tag: int, ext: str) -> str:
    directory, _, name = asset_path.rpartition("/")
    stem = name.rsplit(".", 1)[0]
    new_name = f"{stem}.{feature.lower()}.{tag:08x}.{ext}"
    return f"{directory}/{new_name}" if directory else new_name


def _primary_logo(tree: DocumentTree, assets: Mapping[str, bytes]) -> LogoCandidate:
    candidates = locate_logo_candidates(tree, assets)
    if not candidates:
        raise NotApplicableError("no png/svg logo candidate on the page")
    return candidates[0]


def _repoint(tree: DocumentTree, candidate: LogoCandidate, new_path: str) -> None:
    node = tree.find_by_id(candidate.node_id)
    if not isinstance(node, Element):
        raise FeatureError("logo img vanished from the tree (stale candidate)")
    node.attrs["src"] = new_path


_SVG_OPEN_TAG = re.compile(r"<svg\b[^>]*>", re.IGNORECASE | re.DOTALL)
_SVG_OPACITY_ATTR = re.compile(r'opacity\s*=\s*"([^"]*)"', re.IGNORECASE)


def _svg_with_opacity(svg_text: str, alpha: float) -> str:
    """Set (or multiply into) the root opacity attribute; non-destructive."""
    m = _SVG_OPEN_TAG.search(svg_text)
    if not m:
        raise FeatureError("asset is not parseable svg")
    tag = m.group(0)
    existing = _SVG_OPACITY_ATTR.search(tag)
    if existing:
        try:
            combined = float(existing.group(1)) * alpha
        except ValueError:
            combined = alpha
        new_tag = (
            tag[: existing.start()]
            + f'opacity="{_format_number(combined)}"'
            + tag[existing.end() :]
        )
    else:
        new_tag = tag[:-1] + f' opacity="{_format_number(alpha)}">'
    return svg_text[: m.start()] + new_tag + svg_text[m.end() :]


def _svg_with_watermark(svg_text: str, text: str, placement: str, mark_alpha: float) -> str:
    width, height = svg_nominal_size(svg_text)
    font_size = max(4.0, 0.10 * height)
    escaped = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    if placement == "bottom_right":
        attrs = (
            f'x="{_format_number(width * 0.98)}" y="{_format_number(height * 0.95)}" '
            'text-anchor="end"'
        )
    else:
        angle = -math.degrees(math.atan2(height, width))
        attrs = (
            f'x="{_format_number(width / 2)}" y="{_format_number(height / 2)}" '
            f'text-anchor="middle" transform="rotate({_format_number(angle)} '
            f'{_format_number(width / 2)} {_format_number(height / 2)})"'
        )
    overlay = (
        f'<text {attrs} fill="#808080" fill-opacity="{_format_number(mark_alpha)}" '
        f'font-size="{_format_number(font_size)}">{escaped}</text>'
    )
    close = svg_text.rfind("</svg>")
    if close < 0:
        raise FeatureError("asset is not parseable svg")
    return svg_text[:close] + overlay + svg_text[close:]


def _build_v5_spec(params: dict, rng: random.Random) -> TransformSpec:
    kind = params.get("kind") or rng.choice(LOGO_TRANSFORM_KINDS)
    if kind == "rotate":
        theta = params.get("theta")
        if theta is None:
            theta = rng.uniform(5.0, 20.0)
        direction = params.get("direction") or rng.choice(("cw", "ccw"))
        return TransformSpec.rotate(float(theta), direction)
    if kind == "gaussian_blur":
        sigma = params.get("sigma")
        if sigma is None:
            sigma = rng.uniform(1.0, 2.5)
        return TransformSpec.gaussian_blur(float(sigma))
    if kind == "grey_mesh":
        return TransformSpec.grey_mesh(
            int(params.get("spacing_px", 8)),
            int(params.get("line_width_px", 1)),
            float(params.get("mesh_alpha", 0.5)),
        )
    if kind == "noise":
        return TransformSpec.noise(
            params.get("distribution", "gaussian"),
            float(params.get("strength", 10.0)),
        )
    raise FeatureError(f"unknown logo transform kind {kind!r}")


def apply_visual_feature(
    tree: DocumentTree,
    assets: Mapping[str, bytes],
    feature: str,
    params: dict | None,
    rng: random.Random,
) -> tuple[DocumentTree, dict[str, bytes], FeatureApplication]:
    """Apply one visual feature; returns the (mutated) tree, an updated
    asset map, and the ledger entry."""
    params = params or {}
    out_assets = dict(assets)

    if feature == "V1":
        lo, hi = params.get("range", catalog.feature("V1").params[0].default)
        if not (0.0 <= lo <= hi <= 1.0):
            raise FeatureError("V1 range must satisfy 0 <= lo <= hi <= 1")
        value = rng.uniform(float(lo), float(hi))
        style = _inject_style(tree, f"body {{ opacity: {_format_number(value)}; }}")
        return tree, out_assets, FeatureApplication(
            "V1", {"opacity": value}, [], [style.node_id]
        )

    if feature == "V2":
        fonts = list(params.get("fonts", catalog.DEFAULT_FONTS))
        if not fonts:
            raise FeatureError("V2 needs a non-empty font list")
        font = rng.choice(fonts)
        css_font = f'"{font}"' if " " in font else font
        style = _inject_style(
            tree, f"body, body * {{ font-family: {css_font} !important; }}"
        )
        return tree, out_assets, FeatureApplication(
            "V2", {"font": font}, [], [style.node_id]
        )

    if feature not in ("V3", "V4", "V5"):
        raise FeatureError(f"unknown visual feature {feature!r}")

    candidate = _primary_logo(tree, assets)
    name_tag = rng.getrandbits(32)
    original = assets[candidate.asset_path]

    if feature == "V3":
        alpha = rng.uniform(*V3_OPACITY_RANGE)
        if candidate.extension == "png":
            img = RasterImage.from_png(original)
            out = transform_image(img, TransformSpec.opacity(alpha), rng)
            new_path = _new_asset_path(candidate.asset_path, "V3", name_tag, "png")
            out_assets[new_path] = out.to_png()
        else:
            svg_text = original.decode("utf-8", errors="replace")
            new_path = _new_asset_path(candidate.asset_path, "V3", name_tag, "svg")
            out_assets[new_path] = _svg_with_opacity(svg_text, alpha).encode("utf-8")
        _repoint(tree, candidate, new_path)
        return tree, out_assets, FeatureApplication(
            "V3",
            {"alpha": alpha, "asset": candidate.asset_path, "new_asset": new_path},
            [candidate.node_id],
            [],
        )

    if feature == "V4":
        text = params.get("text")
        if not text:
            raise FeatureError("V4 requires watermark text (default: the spoofed domain)")
        placement = params.get("placement") or rng.choice(("bottom_right", "diagonal"))
        mark_alpha = float(params.get("mark_alpha", 0.4))
        if candidate.extension == "png":
            img = RasterImage.from_png(original)
            out = transform_image(
                img, TransformSpec.watermark(text, placement, mark_alpha), rng
            )
            new_path = _new_asset_path(candidate.asset_path, "V4", name_tag, "png")
            out_assets[new_path] = out.to_png()
        else:
            svg_text = original.decode("utf-8", errors="replace")
            new_path = _new_asset_path(candidate.asset_path, "V4", name_tag, "svg")
            out_assets[new_path] = _svg_with_watermark(
                svg_text, text, placement, mark_alpha
            ).encode("utf-8")
        _repoint(tree, candidate, new_path)
        return tree, out_assets, FeatureApplication(
            "V4",
            {
                "text": text,
                "placement": placement,
                "mark_alpha": mark_alpha,
                "asset": candidate.asset_path,
                "new_asset": new_path,
            },
            [candidate.node_id],
            [],
        )

    # V5: raster-only transform; svg logos are rasterized first at 4x
    spec = _build_v5_spec(params, rng)
    if candidate.extension == "png":
        img = RasterImage.from_png(original)
    else:
        img = rasterize_svg(original.decode("utf-8", errors="replace"), scale=4.0)
    out = transform_image(img, spec, rng)
    new_path = _new_asset_path(candidate.asset_path, "V5", name_tag, "png")
    out_assets[new_path] = out.to_png()
    _repoint(tree, candidate, new_path)
    return tree, out_assets, FeatureApplication(
        "V5",
        {
            "kind": spec.kind,
            **spec.params,
            "asset": candidate.asset_path,
            "new_asset": new_path,
        },
        [candidate.node_id],
        [],
    )
