"""Decide which catalog features a given document can host.

Trigger table:
  anchors               -> C1 C3 C4 C5 C10 (C12 is unconditional anyway)
  login form            -> C7 C9 C11
  login form + provider buttons -> C8
  h1/p/span with internal whitespace -> C6
  always                -> C2 C12 V1 V2
  .png/.svg logo image  -> V3 V4 V5
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import catalog
from .dom import DocumentTree, Element, Text

UNCONDITIONAL = ("C2", "C12", "V1", "V2")

_TEXT_CONTAINERS = ("h1", "p", "span")
_INTERNAL_WS = re.compile(r"\S\s+\S")
_LOGO_EXTENSIONS = (".png", ".svg")


@dataclass
class ApplicabilityEntry:
    feature: str
    applicable: bool
    evidence: list[tuple[int, str]] = field(default_factory=list)


@dataclass
class ApplicabilityReport:
    entries: dict[str, ApplicabilityEntry]
    counts: dict[str, int]

    def is_applicable(self, feature_id: str) -> bool:
        return self.entries[feature_id].applicable

    def applicable_ids(self) -> list[str]:
        return [fid for fid in catalog.CANONICAL_ORDER if self.entries[fid].applicable]

    def to_dict(self) -> dict:
        return {
            "features": [
                {
                    "id": fid,
                    "category": catalog.feature(fid).category,
                    "applicable": entry.applicable,
                    "evidence_count": len(entry.evidence),
                    "description": catalog.feature(fid).description,
                }
                for fid, entry in (
                    (fid, self.entries[fid]) for fid in catalog.CANONICAL_ORDER
                )
            ],
            "counts": dict(self.counts),
        }


# -- detectors (shared with the transforms, which re-check triggers) ------


def anchors(tree: DocumentTree) -> list[Element]:
    return tree.elements("a")


def anchors_with_href(tree: DocumentTree) -> list[Element]:
    return [a for a in tree.elements("a") if a.get("href") is not None]


def anchors_with_letter_href(tree: DocumentTree) -> list[Element]:
    """Anchors whose href holds at least one a-z letter (C3 targets; the
    confusable table is keyed on lowercase ASCII)."""
    out = []
    for a in tree.elements("a"):
        href = a.get("href")
        if href and any("a" <= ch <= "z" for ch in href):
            out.append(a)
    return out


def password_inputs(tree: DocumentTree) -> list[Element]:
    return tree.find(
        lambda el: el.tag == "input" and (el.get("type") or "").lower() == "password"
    )


def login_forms(tree: DocumentTree) -> list[Element]:
    """Forms whose descendants include a password-type input."""
    forms = []
    for form in tree.elements("form"):
        for el in form.iter_elements("input"):
            if (el.get("type") or "").lower() == "password":
                forms.append(form)
                break
    return forms


def provider_login_buttons(
    tree: DocumentTree, brands: tuple[str, ...] | list[str] = catalog.DEFAULT_LOGIN_BRANDS
) -> list[Element]:
    """Button-like elements mentioning a third-party identity provider in
    their text or attribute values (case-insensitive)."""
    needles = tuple(b.lower() for b in brands)
    matches = []
    for el in tree.root.iter_elements():
        if el.tag not in ("button", "a", "input"):
            continue
        haystack = el.text().lower() + " " + " ".join(
            v.lower() for v in el.attrs.values() if v
        )
        if any(b in haystack for b in needles):
            matches.append(el)
    return matches


def text_containers_with_space(tree: DocumentTree) -> list[Element]:
    """h1/p/span elements owning a direct text child with internal whitespace."""
    out = []
    for tag in _TEXT_CONTAINERS:
        for el in tree.elements(tag):
            for child in el.children:
                if isinstance(child, Text) and _INTERNAL_WS.search(child.data):
                    out.append(el)
                    break
    return out


def _src_extension(src: str) -> str:
    path = src.split("#", 1)[0].split("?", 1)[0]
    dot = path.rfind(".")
    return path[dot:].lower() if dot >= 0 else ""


def logo_capable_images(tree: DocumentTree) -> list[Element]:
    """img elements whose source ends in .png or .svg (other raster formats
    are out of catalog scope)."""
    out = []
    for img in tree.elements("img"):
        src = img.get("src")
        if src and _src_extension(src) in _LOGO_EXTENSIONS:
            out.append(img)
    return out


def login_opener_candidates(tree: DocumentTree) -> list[Element]:
    """Buttons/anchors/submit inputs that look like login or sign-up
    controls (C9 wiring targets)."""
    words = ("log in", "login", "sign in", "signin", "sign up", "signup", "register")
    out = []
    for el in tree.root.iter_elements():
        if el.tag not in ("button", "a", "input"):
            continue
        haystack = el.text().lower() + " " + " ".join(
            v.lower() for v in el.attrs.values() if v
        )
        if any(w in haystack for w in words):
            out.append(el)
    return out


# -- the report -----------------------------------------------------------


def analyze_applicability(tree: DocumentTree) -> ApplicabilityReport:
    """Pure function of the tree; same tree always yields the same report."""
    entries = {fid: ApplicabilityEntry(fid, False) for fid in catalog.CANONICAL_ORDER}

    def mark(fid: str, nodes: list[Element], reason: str) -> None:
        if nodes:
            entries[fid].applicable = True
            entries[fid].evidence.extend((n.node_id, reason) for n in nodes)

    for fid in UNCONDITIONAL:
        entries[fid].applicable = True

    mark("C1", anchors_with_href(tree), "anchor with href")
    mark("C3", anchors_with_letter_href(tree), "anchor href contains letters")
    mark("C4", anchors_with_href(tree), "anchor with href")
    mark("C5", anchors(tree), "anchor element")
    mark("C10", anchors(tree), "anchor element")

    forms = login_forms(tree)
    mark("C7", forms, "form with password input")
    mark("C9", forms, "form with password input")
    mark("C11", forms, "form with password input")

    buttons = provider_login_buttons(tree)
    if forms and buttons:
        mark("C8", buttons, "third-party login button")
        entries["C8"].evidence.extend(
            (f.node_id, "form with password input") for f in forms
        )

    mark("C6", text_containers_with_space(tree), "text container with internal whitespace")

    logos = logo_capable_images(tree)
    for fid in ("V3", "V4", "V5"):
        mark(fid, logos, "png/svg image")

    counts = {
        "a": len(tree.elements("a")),
        "form": len(tree.elements("form")),
        "input_password": len(password_inputs(tree)),
        "button": len(tree.elements("button")),
        "img": len(tree.elements("img")),
        "h1": len(tree.elements("h1")),
        "p": len(tree.elements("p")),
        "span": len(tree.elements("span")),
        "iframe_capable": len(forms),
    }
    return ApplicabilityReport(entries=entries, counts=counts)
