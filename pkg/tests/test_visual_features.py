import random

import numpy as np
import pytest

from phishforge.content import NotApplicableError
from phishforge.dom import parse_document
from phishforge.raster import RasterImage
from phishforge.visual import (
    V3_OPACITY_RANGE,
    LogoCandidate,
    apply_visual_feature,
    locate_logo_candidates,
)

from helpers import LOGO_SVG, make_logo_png

RNG = lambda seed=7: random.Random(seed)


def page_with_logo(assets: dict[str, bytes], markup: str | None = None):
    markup = markup or "".join(f'<img src="{path}">' for path in assets)
    return parse_document(f"<html><body>{markup}</body></html>"), assets


# -- candidate location ---------------------------------------------------------


def test_single_header_png_is_primary():
    tree = parse_document('<header><img src="assets/logo.png"></header>')
    assets = {"assets/logo.png": make_logo_png()}
    (candidate,) = locate_logo_candidates(tree, assets)
    assert candidate.asset_path == "assets/logo.png"
    assert candidate.extension == "png"
    assert candidate.area_px == 60 * 30


def test_jpg_only_page_has_no_candidates():
    tree = parse_document('<img src="assets/photo.jpg">')
    assert locate_logo_candidates(tree, {"assets/photo.jpg": b"xx"}) == []


def test_header_image_outranks_larger_footer_image():
    tree = parse_document(
        '<header><img src="assets/small.png"></header>'
        '<footer><img src="assets/big.png"></footer>'
    )
    assets = {
        "assets/small.png": make_logo_png(50, 50),
        "assets/big.png": make_logo_png(200, 200),
    }
    first, second = locate_logo_candidates(tree, assets)
    assert first.asset_path == "assets/small.png"
    assert second.area_px == 200 * 200


def test_without_chrome_larger_area_wins():
    tree = parse_document('<img src="assets/a.png"><img src="assets/b.png">')
    assets = {"assets/a.png": make_logo_png(10, 10), "assets/b.png": make_logo_png(90, 30)}
    first, _ = locate_logo_candidates(tree, assets)
    assert first.asset_path == "assets/b.png"


def test_svg_candidate_has_zero_area():
    tree = parse_document('<img src="assets/logo.svg">')
    (candidate,) = locate_logo_candidates(tree, {"assets/logo.svg": LOGO_SVG.encode()})
    assert candidate.extension == "svg"
    assert candidate.area_px == 0


def test_candidate_extension_restriction_enforced():
    with pytest.raises(Exception):
        LogoCandidate(1, "assets/x.gif", "gif", 0, 0)


def test_unreferenced_assets_ignored():
    tree = parse_document("<p>no images</p>")
    assert locate_logo_candidates(tree, {"assets/logo.png": make_logo_png()}) == []


# -- V1 / V2 -----------------------------------------------------------------


def test_v1_injects_opacity_rule_in_range():
    tree = parse_document("<p>x</p>")
    _, _, application = apply_visual_feature(tree, {}, "V1", {}, RNG())
    value = application.params_used["opacity"]
    assert 0.70 <= value <= 0.95
    style = tree.find_by_id(application.injected_nodes[0])
    assert f"opacity: {value:g}" in style.text()


def test_v1_degenerate_range_is_identity_rule():
    tree = parse_document("<p>x</p>")
    _, _, application = apply_visual_feature(tree, {}, "V1", {"range": [1.0, 1.0]}, RNG())
    style = tree.find_by_id(application.injected_nodes[0])
    assert "opacity: 1;" in style.text()


def test_v2_injects_font_override_from_pool():
    tree = parse_document("<p>x</p>")
    _, _, application = apply_visual_feature(tree, {}, "V2", {"fonts": ["Georgia"]}, RNG())
    style = tree.find_by_id(application.injected_nodes[0])
    assert "font-family: Georgia !important" in style.text()
    assert application.params_used["font"] == "Georgia"


def test_v2_quotes_multiword_fonts():
    tree = parse_document("<p>x</p>")
    _, _, _ = apply_visual_feature(tree, {}, "V2", {"fonts": ["Trebuchet MS"]}, RNG())
    assert '"Trebuchet MS"' in tree.serialize()


# -- V3 -------------------------------------------------------------------------


def test_v3_multiplies_every_pixel_alpha():
    logo = make_logo_png(20, 10, (50, 60, 70, 200))
    tree, assets = page_with_logo({"assets/logo.png": logo})
    _, out_assets, application = apply_visual_feature(tree, assets, "V3", {}, RNG(3))
    alpha = application.params_used["alpha"]
    assert V3_OPACITY_RANGE[0] <= alpha <= V3_OPACITY_RANGE[1]
    new_path = application.params_used["new_asset"]
    transformed = RasterImage.from_png(out_assets[new_path])
    expected = round(200 * alpha)
    assert (transformed.pixels[:, :, 3] == expected).all()
    # original asset retained, img repointed
    assert "assets/logo.png" in out_assets
    assert tree.elements("img")[0].get("src") == new_path


def test_v3_svg_gets_opacity_attribute():
    tree, assets = page_with_logo({"assets/logo.svg": LOGO_SVG.encode()})
    _, out_assets, application = apply_visual_feature(tree, assets, "V3", {}, RNG(4))
    new_svg = out_assets[application.params_used["new_asset"]].decode()
    alpha = application.params_used["alpha"]
    assert f'opacity="{alpha:g}"' in new_svg


def test_v3_requires_logo_candidate():
    tree = parse_document("<p>x</p>")
    with pytest.raises(NotApplicableError):
        apply_visual_feature(tree, {}, "V3", {}, RNG())


# -- V4 -------------------------------------------------------------------------


def test_v4_watermarks_png_logo():
    logo = make_logo_png(120, 60, (255, 255, 255, 255))
    tree, assets = page_with_logo({"assets/logo.png": logo})
    _, out_assets, application = apply_visual_feature(
        tree, assets, "V4", {"text": "spoofed-example.co"}, RNG(5)
    )
    new_path = application.params_used["new_asset"]
    out = RasterImage.from_png(out_assets[new_path])
    original = RasterImage.from_png(logo)
    assert (out.pixels != original.pixels).any()
    assert application.params_used["placement"] in ("bottom_right", "diagonal")


def test_v4_svg_overlay_text():
    tree, assets = page_with_logo({"assets/logo.svg": LOGO_SVG.encode()})
    _, out_assets, application = apply_visual_feature(
        tree, assets, "V4", {"text": "mark.co", "placement": "diagonal"}, RNG(6)
    )
    svg = out_assets[application.params_used["new_asset"]].decode()
    assert "mark.co</text>" in svg
    assert "rotate(" in svg


def test_v4_requires_text():
    tree, assets = page_with_logo({"assets/logo.png": make_logo_png()})
    with pytest.raises(Exception):
        apply_visual_feature(tree, assets, "V4", {}, RNG())


# -- V5 -------------------------------------------------------------------------


def test_v5_rotate_90_swaps_asset_dimensions():
    logo = make_logo_png(100, 40)
    tree, assets = page_with_logo({"assets/logo.png": logo})
    _, out_assets, application = apply_visual_feature(
        tree, assets, "V5", {"kind": "rotate", "theta": 90, "direction": "cw"}, RNG(7)
    )
    out = RasterImage.from_png(out_assets[application.params_used["new_asset"]])
    assert (out.width, out.height) == (40, 100)


def test_v5_random_kind_comes_from_logo_pool():
    logo = make_logo_png()
    for seed in range(12):
        tree, assets = page_with_logo({"assets/logo.png": logo})
        _, _, application = apply_visual_feature(tree, assets, "V5", {}, RNG(seed))
        assert application.params_used["kind"] in (
            "rotate", "gaussian_blur", "grey_mesh", "noise",
        )


def test_v5_svg_is_rasterized_to_png():
    tree, assets = page_with_logo({"assets/logo.svg": LOGO_SVG.encode()})
    _, out_assets, application = apply_visual_feature(
        tree, assets, "V5", {"kind": "gaussian_blur", "sigma": 1.0}, RNG(8)
    )
    new_path = application.params_used["new_asset"]
    assert new_path.endswith(".png")
    out = RasterImage.from_png(out_assets[new_path])
    # 4x nominal 60x24
    assert (out.width, out.height) == (240, 96)


def test_v5_deterministic_under_seed():
    logo = make_logo_png()
    results = []
    for _ in range(2):
        tree, assets = page_with_logo({"assets/logo.png": logo})
        _, out_assets, application = apply_visual_feature(tree, assets, "V5", {}, RNG(42))
        results.append((application.params_used["new_asset"],
                        out_assets[application.params_used["new_asset"]]))
    assert results[0] == results[1]


def test_new_asset_name_carries_feature_and_tag():
    logo = make_logo_png()
    tree, assets = page_with_logo({"assets/logo.png": logo})
    _, _, application = apply_visual_feature(tree, assets, "V3", {}, RNG(9))
    name = application.params_used["new_asset"]
    assert name.startswith("assets/logo.v3.")
    assert name.endswith(".png")
