"""Lookalike domain and URL generation via homoglyph substitutions,
prefixes, suffixes, and TLD swaps.

Every result carries its ordered edit list; replaying the edits over the
original domain must reproduce the spoofed domain exactly (tested for all
generated results). Defaults are ASCII-only; Unicode confusables belong to
the href rewriter, not to domains.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from importlib import resources

EDIT_KINDS = ("homoglyph", "prefix", "suffix", "tld_swap")
_DOMAIN_LABEL = re.compile(r"^[a-z0-9]([a-z0-9-]*[a-z0-9])?$")


class SpoofError(ValueError):
    pass


@dataclass(frozen=True)
class SpoofEdit:
    kind: str
    position: int
    before: str
    after: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "position": self.position,
            "before": self.before,
            "after": self.after,
        }


@dataclass(frozen=True)
class SpoofRuleSet:
    homoglyphs: dict[str, list[str]]
    prefixes: list[str]
    suffixes: list[str]
    tld_swaps: list[str]

    def __post_init__(self) -> None:
        for key, replacements in self.homoglyphs.items():
            for rep in replacements:
                if rep == key:
                    raise SpoofError(f"homoglyph replacement {rep!r} equals its key")
        for p in self.prefixes:
            if not p.endswith("-"):
                raise SpoofError(f"prefix {p!r} must end with '-'")
        for s in self.suffixes:
            if not s.startswith("-"):
                raise SpoofError(f"suffix {s!r} must start with '-'")

    @classmethod
    def from_lines(cls, lines: list[str]) -> "SpoofRuleSet":
        homoglyphs: dict[str, list[str]] = {}
        prefixes: list[str] = []
        suffixes: list[str] = []
        tlds: list[str] = []
        for raw in lines:
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SpoofError(f"bad rule line (need kind<TAB>before<TAB>after): {line!r}")
            kind, before, after = parts
            if kind == "homoglyph":
                homoglyphs.setdefault(before, []).append(after)
            elif kind == "prefix":
                prefixes.append(after)
            elif kind == "suffix":
                suffixes.append(after)
            elif kind == "tld_swap":
                tlds.append(after)
            else:
                raise SpoofError(f"unknown rule kind {kind!r}")
        return cls(homoglyphs, prefixes, suffixes, tlds)

    @classmethod
    def from_file(cls, path: str) -> "SpoofRuleSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh.readlines())

    @classmethod
    def default(cls) -> "SpoofRuleSet":
        data = resources.files("phishforge.data").joinpath("spoof_rules.txt")
        return cls.from_lines(data.read_text(encoding="utf-8").splitlines())


@dataclass
class SpoofResult:
    original_domain: str
    spoofed_domain: str
    edits: list[SpoofEdit] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "original_domain": self.original_domain,
            "spoofed_domain": self.spoofed_domain,
            "edits": [e.to_dict() for e in self.edits],
        }


def split_domain(domain: str) -> tuple[str, str, str]:
    """-> (subdomain prefix incl. trailing dot or '', registrable label, tld)"""
    labels = domain.lower().split(".")
    if len(labels) < 2 or not all(labels):
        raise SpoofError(f"domain needs a registrable label and a TLD: {domain!r}")
    subs = ".".join(labels[:-2])
    return (subs + "." if subs else ""), labels[-2], labels[-1]


def join_domain(subs: str, label: str, tld: str) -> str:
    return f"{subs}{label}.{tld}"


def apply_edits(domain: str, edits: list[SpoofEdit]) -> str:
    """Replay an edit list; positions refer to the registrable label as it
    stands when the edit applies."""
    subs, label, tld = split_domain(domain)
    for e in edits:
        if e.kind == "homoglyph":
            if label[e.position : e.position + len(e.before)] != e.before:
                raise SpoofError(
                    f"edit replay mismatch at {e.position}: expected {e.before!r}"
                )
            label = label[: e.position] + e.after + label[e.position + len(e.before) :]
        elif e.kind == "prefix":
            label = e.after + label
        elif e.kind == "suffix":
            label = label + e.after
        elif e.kind == "tld_swap":
            if tld != e.before:
                raise SpoofError(f"edit replay mismatch: tld {tld!r} != {e.before!r}")
            tld = e.after
        else:
            raise SpoofError(f"unknown edit kind {e.kind!r}")
    return join_domain(subs, label, tld)


def _homoglyph_sites(label: str, rules: SpoofRuleSet) -> list[tuple[int, str]]:
    """(position, key) pairs where a homoglyph rule matches, in label order."""
    sites = []
    for pos in range(len(label)):
        for key in rules.homoglyphs:
            if label.startswith(key, pos):
                sites.append((pos, key))
    sites.sort()
    return sites


def validate_spoofed(domain: str) -> None:
    labels = domain.split(".")
    if len(labels) < 2 or not all(_DOMAIN_LABEL.match(lbl) for lbl in labels):
        raise SpoofError(f"spoofed domain is not syntactically valid: {domain!r}")


def spoof_domain(
    domain: str,
    rules: SpoofRuleSet,
    rng: random.Random,
    min_edits: int = 1,
    max_edits: int | None = None,
) -> SpoofResult:
    """Build a lookalike domain with between min_edits and max_edits edits
    (default max: min_edits + 2). Homoglyph edits stay inside the
    registrable label; at most one prefix, one suffix, and one TLD swap."""
    if min_edits < 1:
        raise SpoofError("min_edits must be >= 1")
    upper = min_edits + 2 if max_edits is None else max_edits
    if upper < min_edits:
        raise SpoofError("max_edits must be >= min_edits")
    subs, label, tld = split_domain(domain)

    candidates: list[tuple[str, object]] = [
        ("homoglyph", site) for site in _homoglyph_sites(label, rules)
    ]
    if rules.prefixes:
        candidates.append(("prefix", None))
    if rules.suffixes:
        candidates.append(("suffix", None))
    if any(t != tld for t in rules.tld_swaps):
        candidates.append(("tld_swap", None))
    if not candidates:
        raise SpoofError(f"no applicable spoof rule for {domain!r}")

    target = rng.randint(min_edits, upper)
    order = list(candidates)
    rng.shuffle(order)

    chosen_homoglyphs: list[tuple[int, str]] = []
    chosen_affixes: set[str] = set()
    picked = 0
    for kind, site in order:
        if picked >= target:
            break
        if kind == "homoglyph":
            pos, key = site  # type: ignore[misc]
            span = range(pos, pos + len(key))
            overlap = any(
                set(span) & set(range(p, p + len(k))) for p, k in chosen_homoglyphs
            )
            if overlap:
                continue
            chosen_homoglyphs.append((pos, key))
        else:
            if kind in chosen_affixes:
                continue
            chosen_affixes.add(kind)
        picked += 1

    if picked < min_edits:
        raise SpoofError(
            f"only {picked} edit(s) possible for {domain!r}, need >= {min_edits}"
        )

    # left-to-right application keeps replay positions well-defined
    edits: list[SpoofEdit] = []
    new_label = label
    offset = 0
    for pos, key in sorted(chosen_homoglyphs):
        replacement = rng.choice(rules.homoglyphs[key])
        adj = pos + offset
        edits.append(SpoofEdit("homoglyph", adj, key, replacement))
        new_label = new_label[:adj] + replacement + new_label[adj + len(key):]
        offset += len(replacement) - len(key)
    if "prefix" in chosen_affixes:
        affix = rng.choice(rules.prefixes)
        edits.append(SpoofEdit("prefix", 0, "", affix))
        new_label = affix + new_label
    if "suffix" in chosen_affixes:
        affix = rng.choice(rules.suffixes)
        edits.append(SpoofEdit("suffix", len(new_label), "", affix))
        new_label = new_label + affix
    new_tld = tld
    if "tld_swap" in chosen_affixes:
        new_tld = rng.choice([t for t in rules.tld_swaps if t != tld])
        edits.append(SpoofEdit("tld_swap", 0, tld, new_tld))

    spoofed = join_domain(subs, new_label, new_tld)
    validate_spoofed(spoofed)
    result = SpoofResult(domain.lower(), spoofed, edits)
    if apply_edits(result.original_domain, result.edits) != spoofed:
        raise SpoofError("internal replay check failed")
    if spoofed == result.original_domain:
        raise SpoofError("spoofed domain equals the original")
    return result


def spoof_url(
    url: str,
    rules: SpoofRuleSet,
    rng: random.Random,
    min_edits: int = 1,
    max_edits: int | None = None,
) -> str:
    """Replace the URL host with a spoofed domain; scheme, port, path,
    query, and fragment are preserved verbatim."""
    return spoof_url_detailed(url, rules, rng, min_edits, max_edits)[0]


def spoof_url_detailed(
    url: str,
    rules: SpoofRuleSet,
    rng: random.Random,
    min_edits: int = 1,
    max_edits: int | None = None,
) -> tuple[str, SpoofResult]:
    from urllib.parse import urlsplit, urlunsplit

    parts = urlsplit(url)
    if not parts.scheme or not parts.hostname:
        raise SpoofError(f"not an absolute URL with a host: {url!r}")
    result = spoof_domain(parts.hostname, rules, rng, min_edits, max_edits)
    netloc = result.spoofed_domain
    if parts.port is not None:
        netloc = f"{netloc}:{parts.port}"
    return (
        urlunsplit((parts.scheme, netloc, parts.path, parts.query, parts.fragment)),
        result,
    )
