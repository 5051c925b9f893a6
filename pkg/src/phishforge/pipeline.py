"""End-to-end generation workflow: analyze the page, select features,
apply them in canonical order, attach a lookalike URL, and emit bundles
and corpora.

Determinism contract: (snapshot bytes, recipe) fully determine bundle
bytes. All randomness derives from the recipe seed through named
substreams; batch inputs get order-independent per-input seeds.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union
from urllib.parse import urlsplit

from . import catalog
from .applicability import ApplicabilityReport, analyze_applicability
from .content import (
    CaptureConfig,
    FeatureApplication,
    NotApplicableError,
    apply_content_feature,
    build_capture_assets,
    needs_capture_assets,
)
from .dom import parse_document
from .fetch import (
    FetchPolicy,
    WebpageSnapshot,
    fetch_page,
    localize_assets,
    snapshot_from_file,
)
from .rng import derive_seed, substream
from .spoof import SpoofRuleSet, spoof_url_detailed
from .visual import apply_visual_feature

SCHEMA_VERSION = "1"

RANDOM_CONTENT_RANGE = (3, 6)
RANDOM_VISUAL_RANGE = (1, 2)


class RecipeError(ValueError):
    pass


class ConflictError(RecipeError):
    pass


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class ExplicitSelection:
    features: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"mode": "explicit", "features": list(self.features)}


@dataclass(frozen=True)
class RandomSelection:
    count_content: int | None = None
    count_visual: int | None = None

    def to_dict(self) -> dict:
        return {
            "mode": "random",
            "count_content": self.count_content,
            "count_visual": self.count_visual,
        }


Selection = Union[ExplicitSelection, RandomSelection]


@dataclass
class GenerationRecipe:
    selection: Selection
    seed: int
    params: dict[str, dict] = field(default_factory=dict)
    capture: CaptureConfig = field(default_factory=CaptureConfig)
    spoof_rules: SpoofRuleSet = field(default_factory=SpoofRuleSet.default)
    spoof_min_edits: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise RecipeError("seed must be a 64-bit unsigned integer")
        if self.spoof_min_edits < 1:
            raise RecipeError("spoof_min_edits must be >= 1")
        if isinstance(self.selection, ExplicitSelection):
            feats = self.selection.features
            unknown = [f for f in feats if f not in catalog.CATALOG]
            if unknown:
                raise RecipeError(f"unknown feature ids: {unknown}")
            if len(set(feats)) != len(feats):
                raise RecipeError("explicit feature list contains duplicates")
            pair = catalog.conflicting_pair(list(feats))
            if pair:
                raise ConflictError(f"conflicting features selected: {pair[0]} and {pair[1]}")
            if not feats:
                raise RecipeError("explicit feature list is empty")
        else:
            cc, cv = self.selection.count_content, self.selection.count_visual
            if cc is not None and not 0 <= cc <= len(catalog.CONTENT_IDS):
                raise RecipeError("count_content must be in [0, 12]")
            if cv is not None and not 0 <= cv <= len(catalog.VISUAL_IDS):
                raise RecipeError("count_visual must be in [0, 5]")
            if cc == 0 and cv == 0:
                raise RecipeError("random selection needs at least one feature")

    def with_seed(self, seed: int) -> "GenerationRecipe":
        return GenerationRecipe(
            self.selection, seed, self.params, self.capture,
            self.spoof_rules, self.spoof_min_edits,
        )

    def to_dict(self) -> dict:
        return {
            "selection": self.selection.to_dict(),
            "seed": self.seed,
            "params": self.params,
            "capture": {
                "mode": self.capture.mode,
                "capture_path": self.capture.capture_path,
                "capture_script_name": self.capture.capture_script_name,
                "login_page_name": self.capture.login_page_name,
            },
            "spoof_rules": {
                "homoglyphs": self.spoof_rules.homoglyphs,
                "prefixes": self.spoof_rules.prefixes,
                "suffixes": self.spoof_rules.suffixes,
                "tld_swaps": self.spoof_rules.tld_swaps,
            },
            "spoof_min_edits": self.spoof_min_edits,
        }


@dataclass
class GeneratedBundle:
    source_url: str
    spoofed_url: str
    document: str
    assets: dict[str, bytes]
    ledger: list[FeatureApplication]
    recipe_echo: dict
    created_at: float

    def ledger_ids(self) -> list[str]:
        return [entry.feature for entry in self.ledger]


@dataclass
class CorpusManifest:
    entries: list[dict]
    totals: dict
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "totals": self.totals,
            "entries": self.entries,
        }


# -- feature selection -------------------------------------------------------


def select_features(
    report: ApplicabilityReport, recipe: GenerationRecipe, rng
) -> tuple[list[str], list[str]]:
    """Resolve the recipe selection against the applicability report.
    Returns (canonically ordered features, ledger notes)."""
    notes: list[str] = []
    if isinstance(recipe.selection, ExplicitSelection):
        chosen = [f for f in recipe.selection.features if report.is_applicable(f)]
        for f in recipe.selection.features:
            if f not in chosen:
                notes.append(f"dropped {f}: not applicable to this page")
        if not chosen:
            raise GenerationError("explicit feature list is entirely inapplicable")
        return catalog.canonical_sort(chosen), notes

    sel = recipe.selection
    cc = sel.count_content if sel.count_content is not None else rng.randint(*RANDOM_CONTENT_RANGE)
    cv = sel.count_visual if sel.count_visual is not None else rng.randint(*RANDOM_VISUAL_RANGE)

    pool_c = [f for f in report.applicable_ids() if catalog.is_content(f)]
    pool_v = [f for f in report.applicable_ids() if catalog.is_visual(f)]
    if cc > len(pool_c):
        notes.append(f"content count {cc} exceeds applicable pool {len(pool_c)}; degraded")
        cc = len(pool_c)
    if cv > len(pool_v):
        notes.append(f"visual count {cv} exceeds applicable pool {len(pool_v)}; degraded")
        cv = len(pool_v)

    chosen: list[str] = []
    for f in rng.sample(pool_c, len(pool_c)):
        if len([x for x in chosen if catalog.is_content(x)]) >= cc:
            break
        if catalog.conflicting_pair(chosen + [f]):
            notes.append(f"skipped {f}: conflicts with an earlier pick")
            continue
        chosen.append(f)
    for f in rng.sample(pool_v, len(pool_v)):
        if len([x for x in chosen if catalog.is_visual(x)]) >= cv:
            break
        chosen.append(f)
    if not chosen:
        raise GenerationError("no applicable features to select")
    return catalog.canonical_sort(chosen), notes


# -- single-page generation ---------------------------------------------------

_SLUG = re.compile(r"[^a-z0-9-]+")


def _spoof_source_url(origin_url: str) -> str:
    """URL whose host the spoofer edits. Local files get a deterministic
    placeholder domain derived from the file stem."""
    parts = urlsplit(origin_url)
    if parts.scheme in ("http", "https") and parts.hostname:
        return origin_url
    stem = Path(parts.path).stem.lower() if parts.path else ""
    slug = _SLUG.sub("-", stem).strip("-") or "example"
    return f"https://{slug}.com/"


def generate(snapshot: WebpageSnapshot, recipe: GenerationRecipe) -> GeneratedBundle:
    """Parse, analyze, select, apply in canonical order, spoof, serialize."""
    tree = parse_document(snapshot.markup)
    report = analyze_applicability(tree)
    features, notes = select_features(report, recipe, substream(recipe.seed, "select"))

    spoofed_url, spoof_result = spoof_url_detailed(
        _spoof_source_url(snapshot.origin_url),
        recipe.spoof_rules,
        substream(recipe.seed, "spoof"),
        recipe.spoof_min_edits,
    )

    assets = snapshot.asset_bytes()
    ledger: list[FeatureApplication] = []
    for fid in features:
        rng = substream(recipe.seed, "feature", fid)
        params = dict(recipe.params.get(fid, {}))
        try:
            if catalog.is_content(fid):
                _, application = apply_content_feature(
                    tree, fid, params, rng, capture=recipe.capture
                )
            else:
                if fid == "V4":
                    params.setdefault("text", spoof_result.spoofed_domain)
                _, assets, application = apply_visual_feature(tree, assets, fid, params, rng)
        except NotApplicableError as exc:
            # stale-report race: the evolving tree no longer satisfies the
            # trigger; record and continue
            notes.append(f"skipped {fid} during application: {exc}")
            continue
        ledger.append(application)

    if not ledger:
        raise GenerationError("no feature could be applied; empty ledger is forbidden")
    if notes:
        ledger[0].notes = "; ".join(filter(None, [ledger[0].notes, *notes]))

    if needs_capture_assets([entry.feature for entry in ledger]):
        for name, data in build_capture_assets(recipe.capture):
            assets[name] = data

    return GeneratedBundle(
        source_url=snapshot.origin_url,
        spoofed_url=spoofed_url,
        document=tree.serialize(),
        assets=assets,
        ledger=ledger,
        recipe_echo=recipe.to_dict(),
        created_at=snapshot.fetched_at,
    )


# -- bundle I/O ----------------------------------------------------------------

_BUNDLE_META_FILES = {"index.html", "ledger.json", "recipe.json", "captures.log"}


def _dump_json(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_bundle(bundle: GeneratedBundle, out_dir: str | Path) -> dict:
    """Write index.html, assets, ledger.json, recipe.json; returns the
    corpus manifest entry for this bundle."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "index.html").write_text(bundle.document, encoding="utf-8")
    for path, data in sorted(bundle.assets.items()):
        target = out / path
        if ".." in Path(path).parts:
            raise GenerationError(f"asset path escapes the bundle: {path}")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
    (out / "ledger.json").write_text(
        _dump_json([entry.to_dict() for entry in bundle.ledger]), encoding="utf-8"
    )
    (out / "recipe.json").write_text(
        _dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "source_url": bundle.source_url,
                "spoofed_url": bundle.spoofed_url,
                "created_at": bundle.created_at,
                "recipe": bundle.recipe_echo,
            }
        ),
        encoding="utf-8",
    )
    return {
        "source_url": bundle.source_url,
        "spoofed_url": bundle.spoofed_url,
        "bundle_path": out.name,
        "seed": bundle.recipe_echo["seed"],
        "features": bundle.ledger_ids(),
        "status": "ok",
    }


def read_bundle(bundle_dir: str | Path) -> GeneratedBundle:
    src = Path(bundle_dir)
    meta = json.loads((src / "recipe.json").read_text(encoding="utf-8"))
    ledger_raw = json.loads((src / "ledger.json").read_text(encoding="utf-8"))
    assets: dict[str, bytes] = {}
    for file in sorted(src.rglob("*")):
        if not file.is_file():
            continue
        rel = file.relative_to(src).as_posix()
        if rel in _BUNDLE_META_FILES:
            continue
        assets[rel] = file.read_bytes()
    return GeneratedBundle(
        source_url=meta["source_url"],
        spoofed_url=meta["spoofed_url"],
        document=(src / "index.html").read_text(encoding="utf-8"),
        assets=assets,
        ledger=[FeatureApplication(**entry) for entry in ledger_raw],
        recipe_echo=meta["recipe"],
        created_at=meta["created_at"],
    )


# -- corpora -------------------------------------------------------------------

InputItem = Union[str, WebpageSnapshot]


def load_input(item: InputItem, policy: FetchPolicy | None = None, localize: bool = True) -> WebpageSnapshot:
    if isinstance(item, WebpageSnapshot):
        return item
    text = str(item)
    if urlsplit(text).scheme in ("http", "https"):
        snapshot = fetch_page(text, policy)
    else:
        snapshot = snapshot_from_file(text)
    return localize_assets(snapshot, policy) if localize else snapshot


def input_identity(item: InputItem) -> str:
    return item.origin_url if isinstance(item, WebpageSnapshot) else str(item)


def per_input_seed(template_seed: int, item: InputItem) -> int:
    return derive_seed(template_seed, input_identity(item))


def batch_generate(
    inputs: Iterable[InputItem],
    recipe_template: GenerationRecipe,
    out_dir: str | Path,
    policy: FetchPolicy | None = None,
    localize: bool = True,
) -> CorpusManifest:
    """One bundle per input (balanced corpus). Failures are recorded in the
    manifest with reasons, never silently dropped. Entries are sorted by
    bundle id so the manifest is independent of input order."""
    items = list(inputs)
    if not items:
        raise GenerationError("batch_generate needs at least one input")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries: list[dict] = []
    ok = 0
    for item in items:
        seed = per_input_seed(recipe_template.seed, item)
        bundle_id = f"{seed:016x}"
        try:
            snapshot = load_input(item, policy, localize)
            bundle = generate(snapshot, recipe_template.with_seed(seed))
            entry = write_bundle(bundle, out / bundle_id)
            ok += 1
        except Exception as exc:
            entry = {
                "source_url": input_identity(item),
                "bundle_path": bundle_id,
                "seed": seed,
                "status": "error",
                "error": f"{type(exc).__name__}: {exc}",
            }
        entries.append(entry)

    entries.sort(key=lambda e: (f"{e['seed']:016x}", e["source_url"]))
    manifest = CorpusManifest(
        entries=entries,
        totals={"inputs": len(items), "ok": ok, "failed": len(items) - ok},
    )
    (out / "manifest.json").write_text(_dump_json(manifest.to_dict()), encoding="utf-8")
    return manifest


_VARIANT_FEATURE = {
    "opacity": ("V3", None),
    "watermark": ("V4", None),
    "rotate": ("V5", "rotate"),
    "gaussian_blur": ("V5", "gaussian_blur"),
    "grey_mesh": ("V5", "grey_mesh"),
    "noise": ("V5", "noise"),
}


def generate_logo_variants(
    snapshot: WebpageSnapshot,
    base_recipe: GenerationRecipe,
    variant_specs: list[str],
) -> list[GeneratedBundle]:
    """One bundle per logo-transform kind; ledgers differ only in the
    visual entry (same seed, same content features)."""
    if not variant_specs:
        return []
    unknown = [k for k in variant_specs if k not in _VARIANT_FEATURE]
    if unknown:
        raise RecipeError(f"unknown logo transform kinds: {unknown}")

    tree = parse_document(snapshot.markup)
    report = analyze_applicability(tree)
    if not report.is_applicable("V3"):
        raise GenerationError("snapshot has no logo candidate for variant generation")

    if isinstance(base_recipe.selection, ExplicitSelection):
        content_part = [f for f in base_recipe.selection.features if catalog.is_content(f)]
    else:
        content_recipe = GenerationRecipe(
            RandomSelection(base_recipe.selection.count_content, 0),
            base_recipe.seed,
            base_recipe.params,
            base_recipe.capture,
            base_recipe.spoof_rules,
            base_recipe.spoof_min_edits,
        )
        content_part, _ = select_features(
            report, content_recipe, substream(base_recipe.seed, "select")
        )

    bundles = []
    for kind in variant_specs:
        feature, forced_kind = _VARIANT_FEATURE[kind]
        params = {fid: dict(p) for fid, p in base_recipe.params.items()}
        if forced_kind:
            params.setdefault("V5", {})["kind"] = forced_kind
        recipe = GenerationRecipe(
            ExplicitSelection(tuple(content_part + [feature])),
            base_recipe.seed,
            params,
            base_recipe.capture,
            base_recipe.spoof_rules,
            base_recipe.spoof_min_edits,
        )
        bundles.append(generate(snapshot, recipe))
    return bundles
