"""The feature catalog: 12 content transformations (C1-C12) and 5 visual
transformations (V1-V5), with categories, parameter schemas, and the
canonical application order."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

CONTENT = "content"
VISUAL = "visual"

CONTENT_IDS = tuple(f"C{i}" for i in range(1, 13))
VISUAL_IDS = tuple(f"V{i}" for i in range(1, 6))
ALL_IDS = CONTENT_IDS + VISUAL_IDS

# Features are always applied in this order regardless of selection order,
# so bundles are reproducible and late features (C12 dummy anchors) never
# receive earlier anchor rewrites.
CANONICAL_ORDER = ALL_IDS

# Mutually exclusive pairs: C5 makes anchors inert, C10 needs anchor clicks.
CONFLICTS = (frozenset({"C5", "C10"}),)

# Third-party identity-provider names recognized for C8.
DEFAULT_LOGIN_BRANDS = ("google", "github", "linkedin", "facebook", "apple", "twitter")

# Font pool for the V2 text-style override.
DEFAULT_FONTS = (
    "Arial",
    "Verdana",
    "Georgia",
    "Tahoma",
    "Courier New",
    "Trebuchet MS",
)

C1_HREF_CHOICES = ("#", "#content", "#skip", "javascript:void(0)")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str
    default: Any
    description: str


@dataclass(frozen=True)
class FeatureSpec:
    id: str
    category: str
    name: str
    description: str
    params: tuple[ParamSpec, ...] = field(default_factory=tuple)


_CATALOG: tuple[FeatureSpec, ...] = (
    FeatureSpec(
        "C1", CONTENT, "Neutralize hypertext references",
        "Replace every anchor href with an inert fragment target or javascript:void(0).",
    ),
    FeatureSpec(
        "C2", CONTENT, "Disable source-view keys",
        "Inject a script that suppresses the F11 key and the Ctrl+U view-source chord.",
    ),
    FeatureSpec(
        "C3", CONTENT, "Confusable characters in hrefs",
        "Swap alphabetic characters inside href values for visually confusable Unicode lookalikes.",
        (ParamSpec("prob", "float", 0.3, "per-character replacement probability (at least one char always changes)"),),
    ),
    FeatureSpec(
        "C4", CONTENT, "Hide link destinations",
        "Move each real href into a data attribute so hovering shows no destination; a click handler still navigates.",
    ),
    FeatureSpec(
        "C5", CONTENT, "Make anchors inert",
        "Disable anchor navigation entirely via a click-suppressing handler and pointer-events styling.",
    ),
    FeatureSpec(
        "C6", CONTENT, "Replace blank spaces in text",
        "Replace whitespace inside h1/p/span text with a transparent filler character; looks identical, reads differently to machines.",
        (ParamSpec("filler", "str", "·", "filler character rendered with color: transparent"),),
    ),
    FeatureSpec(
        "C7", CONTENT, "Capture login form locally",
        "Point every login form's action at the bundle-local capture sink (POST); submissions never leave the bundle.",
    ),
    FeatureSpec(
        "C8", CONTENT, "Disable third-party login buttons",
        "Disable identity-provider login buttons (Google, GitHub, ...) and capture the remaining visible login form locally.",
        (ParamSpec("brands", "list[str]", list(DEFAULT_LOGIN_BRANDS), "case-insensitive provider names to disable"),),
    ),
    FeatureSpec(
        "C9", CONTENT, "Pop-up login on buttons",
        "Inject a hidden modal login form and open it when login/sign-up buttons are clicked; the modal posts to the capture sink.",
    ),
    FeatureSpec(
        "C10", CONTENT, "Pop-up login on anchors",
        "Inject the same hidden modal login form, opened by anchor clicks instead of buttons.",
    ),
    FeatureSpec(
        "C11", CONTENT, "Inject login iframe",
        "Add an iframe whose source is a bundle-local login page posting to the capture sink.",
    ),
    FeatureSpec(
        "C12", CONTENT, "Inflate DOM with dummy tags",
        "Insert n invisible dummy img/link/script/a/div elements at random body positions.",
        (ParamSpec("n", "int", None, "element count; default sampled in [5, 25]"),),
    ),
    FeatureSpec(
        "V1", VISUAL, "Body opacity",
        "Inject a style rule lowering the whole-page opacity.",
        (ParamSpec("range", "list[float]", [0.70, 0.95], "inclusive sampling range for the opacity value"),),
    ),
    FeatureSpec(
        "V2", VISUAL, "Text styling",
        "Inject a font-family override sampled from a font pool.",
        (ParamSpec("fonts", "list[str]", list(DEFAULT_FONTS), "candidate font families"),),
    ),
    FeatureSpec(
        "V3", VISUAL, "Logo opacity",
        "Make the primary .png/.svg logo translucent with an opacity sampled in [0.10, 0.35].",
    ),
    FeatureSpec(
        "V4", VISUAL, "Logo watermark",
        "Composite a text watermark onto the primary logo, bottom-right or diagonally.",
        (
            ParamSpec("text", "str", None, "watermark text; default is the spoofed domain"),
            ParamSpec("placement", "choice[bottom_right,diagonal]", None, "default sampled"),
            ParamSpec("mark_alpha", "float", 0.4, "watermark opacity in [0, 1]"),
        ),
    ),
    FeatureSpec(
        "V5", VISUAL, "Logo transformation",
        "Apply one of rotation, Gaussian blur, grey mesh, or noise to the primary logo raster.",
        (
            ParamSpec("kind", "choice[rotate,gaussian_blur,grey_mesh,noise]", None, "default sampled"),
            ParamSpec("theta", "float", None, "rotation degrees; default sampled in [5, 20], sign from direction"),
            ParamSpec("direction", "choice[cw,ccw]", None, "rotation direction; default sampled"),
            ParamSpec("sigma", "float", None, "blur sigma; default sampled in [1.0, 2.5]"),
            ParamSpec("spacing_px", "int", 8, "grey-mesh grid spacing"),
            ParamSpec("line_width_px", "int", 1, "grey-mesh line width"),
            ParamSpec("mesh_alpha", "float", 0.5, "grey-mesh opacity in (0, 1]"),
            ParamSpec("distribution", "choice[gaussian,uniform]", "gaussian", "noise distribution"),
            ParamSpec("strength", "float", 10.0, "noise scale"),
        ),
    ),
)

CATALOG: dict[str, FeatureSpec] = {f.id: f for f in _CATALOG}

assert len([f for f in _CATALOG if f.category == CONTENT]) == 12
assert len([f for f in _CATALOG if f.category == VISUAL]) == 5


def feature(feature_id: str) -> FeatureSpec:
    try:
        return CATALOG[feature_id]
    except KeyError:
        raise KeyError(f"unknown feature id: {feature_id!r}") from None


def is_content(feature_id: str) -> bool:
    return feature(feature_id).category == CONTENT


def is_visual(feature_id: str) -> bool:
    return feature(feature_id).category == VISUAL


def canonical_sort(ids: list[str]) -> list[str]:
    order = {fid: i for i, fid in enumerate(CANONICAL_ORDER)}
    return sorted(ids, key=lambda fid: order[fid])


def conflicting_pair(ids: list[str]) -> tuple[str, str] | None:
    present = set(ids)
    for pair in CONFLICTS:
        if pair <= present:
            a, b = sorted(pair)
            return a, b
    return None


def catalog_listing(category: str | None = None) -> list[dict]:
    """JSON-able catalog rows for the CLI `features` command and GET /features."""
    rows = []
    for spec in _CATALOG:
        if category and spec.category != category:
            continue
        rows.append(
            {
                "id": spec.id,
                "category": spec.category,
                "name": spec.name,
                "description": spec.description,
                "params": [
                    {
                        "name": p.name,
                        "type": p.type,
                        "default": p.default,
                        "description": p.description,
                    }
                    for p in spec.params
                ],
            }
        )
    return rows
