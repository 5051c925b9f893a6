"""Fetch a legitimate landing page and localize its external resources so
generated bundles are fully self-contained.

Localization depth is one level from the page, plus url(...) references
inside directly linked stylesheets. Asset filenames are pure functions of
(original URL, content), so repeated runs are byte-identical. CSP/SRI
attributes, <base> tags, and srcset attributes are stripped so transformed
bundles render offline with their rewritten local references.
"""
from __future__ import annotations

import hashlib
import mimetypes
import re
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from urllib.parse import urljoin, urlsplit, unquote

import requests

from .dom import DocumentTree, parse_document

ASSET_DIR = "assets"

_KIND_BY_CONTENT_TYPE = {
    "text/css": ("stylesheet", "css"),
    "application/javascript": ("script", "js"),
    "text/javascript": ("script", "js"),
    "image/png": ("image", "png"),
    "image/svg+xml": ("image", "svg"),
    "image/jpeg": ("image", "jpg"),
    "image/gif": ("image", "gif"),
    "image/webp": ("image", "webp"),
    "image/x-icon": ("image", "ico"),
    "font/woff2": ("font", "woff2"),
    "font/woff": ("font", "woff"),
}

_META_CHARSET = re.compile(rb"""<meta[^>]+charset\s*=\s*["']?([a-zA-Z0-9_\-]+)""", re.I)
_CSS_URL = re.compile(r"""url\(\s*(['"]?)([^'")]+)\1\s*\)""")
_CSS_IMPORT = re.compile(r"""@import\s+(['"])([^'"]+)\1""")

_SKIP_PREFIXES = ("data:", "javascript:", "mailto:", "about:", "#", "blob:")


class FetchError(Exception):
    pass


class InvalidUrlError(FetchError):
    pass


class UnreachableError(FetchError):
    pass


class FetchTimeoutError(UnreachableError):
    pass


class HttpStatusError(FetchError):
    def __init__(self, status: int, url: str) -> None:
        super().__init__(f"HTTP {status} for {url}")
        self.status = status


class NotHtmlError(FetchError):
    pass


@dataclass(frozen=True)
class FetchPolicy:
    timeout_s: float = 10.0
    max_asset_bytes: int = 5_000_000
    max_assets: int = 100
    user_agent: str = "Mozilla/5.0 (compatible; phishforge-research/0.1)"
    follow_redirects: bool = True

    def __post_init__(self) -> None:
        if self.timeout_s <= 0 or self.max_asset_bytes <= 0 or self.max_assets <= 0:
            raise ValueError("fetch policy numeric fields must be positive")


@dataclass(frozen=True)
class AssetRecord:
    original_url: str
    kind: str
    content: bytes
    content_type: str

    @property
    def failed(self) -> bool:
        return not self.content


@dataclass(frozen=True)
class WebpageSnapshot:
    origin_url: str
    markup: str
    assets: dict[str, AssetRecord] = field(default_factory=dict)
    fetched_at: float = 0.0
    fetch_status: str = "complete"

    def asset_bytes(self) -> dict[str, bytes]:
        return {path: rec.content for path, rec in self.assets.items() if rec.content}


def resolve_reference(base: str, raw: str) -> str:
    """Standard relative-reference resolution (scheme-relative,
    path-relative, and fragment-only references all handled)."""
    if not base:
        raise InvalidUrlError("empty base URL")
    candidate = raw.strip()
    if any(ch in candidate for ch in ("\n", "\r", "\t")):
        candidate = re.sub(r"[\n\r\t]", "", candidate)
    resolved = urljoin(base, candidate)
    if not urlsplit(resolved).scheme:
        raise InvalidUrlError(f"cannot resolve reference {raw!r} against {base!r}")
    return resolved


def _decode_html(body: bytes, content_type: str) -> str:
    m = _META_CHARSET.search(body[:4096])
    encodings = []
    if m:
        encodings.append(m.group(1).decode("ascii", "ignore"))
    header = re.search(r"charset=([A-Za-z0-9_\-]+)", content_type or "")
    if header:
        encodings.append(header.group(1))
    encodings.append("utf-8")
    for enc in encodings:
        try:
            return body.decode(enc, errors="replace")
        except LookupError:
            continue
    return body.decode("utf-8", errors="replace")


def _looks_like_html(body: bytes, content_type: str) -> bool:
    ct = (content_type or "").lower()
    if "html" in ct:
        return True
    if ct and not ct.startswith(("text/", "application/octet-stream")):
        return False
    head = body[:1024]
    if b"\x00" in head:
        return False
    return b"<" in head


def fetch_page(url: str, policy: FetchPolicy | None = None) -> WebpageSnapshot:
    """Fetch the landing page markup. Assets stay empty; localization is a
    separate step."""
    policy = policy or FetchPolicy()
    scheme = urlsplit(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise InvalidUrlError(f"fetch_page needs an http(s) URL, got {url!r}")
    try:
        resp = requests.get(
            url,
            headers={"User-Agent": policy.user_agent},
            timeout=policy.timeout_s,
            allow_redirects=policy.follow_redirects,
        )
    except requests.Timeout as exc:
        raise FetchTimeoutError(f"timed out fetching {url}") from exc
    except requests.RequestException as exc:
        raise UnreachableError(f"cannot reach {url}: {exc}") from exc
    if resp.status_code >= 400:
        raise HttpStatusError(resp.status_code, url)
    content_type = resp.headers.get("Content-Type", "")
    if not _looks_like_html(resp.content, content_type):
        raise NotHtmlError(f"response from {url} is not HTML ({content_type or 'unknown type'})")
    markup = _decode_html(resp.content, content_type)
    if not markup.strip():
        raise NotHtmlError(f"response from {url} is empty")
    return WebpageSnapshot(
        origin_url=resp.url or url,
        markup=markup,
        assets={},
        fetched_at=time.time(),
        fetch_status="complete",
    )


def snapshot_from_file(path: str | Path) -> WebpageSnapshot:
    """Local-file input, accepted everywhere a URL is. fetched_at is pinned
    to 0 so file-based generation is byte-reproducible."""
    p = Path(path).resolve()
    body = p.read_bytes()
    markup = _decode_html(body, "")
    return WebpageSnapshot(
        origin_url=p.as_uri(),
        markup=markup,
        assets={},
        fetched_at=0.0,
        fetch_status="complete",
    )


def _fetch_asset(url: str, policy: FetchPolicy) -> tuple[bytes, str]:
    scheme = urlsplit(url).scheme.lower()
    if scheme == "file":
        file_path = Path(unquote(urlsplit(url).path))
        data = file_path.read_bytes()
        if len(data) > policy.max_asset_bytes:
            raise FetchError(f"asset over size limit: {url}")
        return data, mimetypes.guess_type(str(file_path))[0] or ""
    if scheme not in ("http", "https"):
        raise FetchError(f"unsupported asset scheme: {url}")
    resp = requests.get(
        url,
        headers={"User-Agent": policy.user_agent},
        timeout=policy.timeout_s,
        allow_redirects=policy.follow_redirects,
    )
    if resp.status_code >= 400:
        raise HttpStatusError(resp.status_code, url)
    if len(resp.content) > policy.max_asset_bytes:
        raise FetchError(f"asset over size limit: {url}")
    return resp.content, resp.headers.get("Content-Type", "")


def _extension_for(url: str, content_type: str, default_kind: str) -> tuple[str, str]:
    """-> (kind, extension), preferring the URL path suffix."""
    path = urlsplit(url).path
    suffix = Path(path).suffix.lower().lstrip(".")
    ct = (content_type or "").split(";")[0].strip().lower()
    kind, ext = _KIND_BY_CONTENT_TYPE.get(ct, (default_kind, ""))
    if default_kind != "other":
        kind = default_kind
    if re.fullmatch(r"[a-z0-9]{1,8}", suffix or ""):
        ext = suffix
    return kind, ext or "bin"


def _asset_name(url: str, content: bytes, ext: str) -> str:
    digest = hashlib.sha256(url.encode("utf-8") + b"\0" + content).hexdigest()[:16]
    return f"{ASSET_DIR}/{digest}.{ext}"


def _should_skip(raw: str, assets: dict[str, AssetRecord]) -> bool:
    ref = raw.strip()
    if not ref or ref.lower().startswith(_SKIP_PREFIXES):
        return True
    return ref in assets  # already localized


def _strip_security_attrs(tree: DocumentTree) -> None:
    for el in tree.elements("link") + tree.elements("script") + tree.elements("img") + tree.elements("source"):
        el.attrs.pop("integrity", None)
        el.attrs.pop("crossorigin", None)
        el.attrs.pop("srcset", None)
        el.attrs.pop("imagesrcset", None)
    for meta in list(tree.elements("meta")):
        if (meta.get("http-equiv") or "").lower() == "content-security-policy":
            meta.parent.remove(meta)


def _collect_references(tree: DocumentTree) -> list[tuple[object, str, str]]:
    refs: list[tuple[object, str, str]] = []
    for link in tree.elements("link"):
        rel = (link.get("rel") or "").lower()
        if not link.get("href"):
            continue
        if "stylesheet" in rel:
            refs.append((link, "href", "stylesheet"))
        elif "icon" in rel:
            refs.append((link, "href", "image"))
    for script in tree.elements("script"):
        if script.get("src"):
            refs.append((script, "src", "script"))
    for img in tree.elements("img"):
        if img.get("src"):
            refs.append((img, "src", "image"))
    return refs


def _localize_css(
    css_bytes: bytes,
    css_url: str,
    policy: FetchPolicy,
    assets: dict[str, AssetRecord],
) -> tuple[bytes, bool]:
    """Rewrite url(...) and @import targets inside a stylesheet to sibling
    local files; returns (rewritten bytes, any_failure)."""
    text = css_bytes.decode("utf-8", errors="replace")
    failed = False

    def localize(target: str) -> str | None:
        nonlocal failed
        ref = target.strip()
        if not ref or ref.lower().startswith(_SKIP_PREFIXES):
            return None
        try:
            url = resolve_reference(css_url, ref)
            content, ctype = _fetch_asset(url, policy)
        except Exception:
            failed = True
            return None
        kind, ext = _extension_for(url, ctype, "other")
        path = _asset_name(url, content, ext)
        assets.setdefault(path, AssetRecord(url, kind, content, ctype))
        return path.rsplit("/", 1)[-1]  # sibling reference within assets/

    def sub_url(m: re.Match) -> str:
        local = localize(m.group(2))
        return f"url({m.group(1)}{local}{m.group(1)})" if local else m.group(0)

    def sub_import(m: re.Match) -> str:
        local = localize(m.group(2))
        return f"@import {m.group(1)}{local}{m.group(1)}" if local else m.group(0)

    text = _CSS_URL.sub(sub_url, text)
    text = _CSS_IMPORT.sub(sub_import, text)
    return text.encode("utf-8"), failed


def localize_assets(snapshot: WebpageSnapshot, policy: FetchPolicy | None = None) -> WebpageSnapshot:
    """Download external stylesheet/script/image references, store them under
    deterministic content-hash names, and rewrite the markup to those local
    paths. Failures degrade the snapshot to fetch_status=partial and leave
    the original reference intact. Idempotent."""
    policy = policy or FetchPolicy()
    tree = parse_document(snapshot.markup)
    assets = dict(snapshot.assets)
    partial = snapshot.fetch_status == "partial"

    base_url = snapshot.origin_url
    for base_el in list(tree.elements("base")):
        href = base_el.get("href")
        if href and base_url == snapshot.origin_url:
            try:
                base_url = resolve_reference(snapshot.origin_url, href)
            except InvalidUrlError:
                pass
        base_el.parent.remove(base_el)

    _strip_security_attrs(tree)

    for el, attr, kind in _collect_references(tree):
        raw = el.attrs.get(attr) or ""
        if _should_skip(raw, assets):
            continue
        live = sum(1 for rec in assets.values() if not rec.failed)
        if live >= policy.max_assets:
            partial = True
            break
        try:
            url = resolve_reference(base_url, raw)
            content, ctype = _fetch_asset(url, policy)
        except Exception:
            partial = True
            try:
                failed_url = resolve_reference(base_url, raw)
            except InvalidUrlError:
                failed_url = raw
            _, ext = _extension_for(failed_url, "", kind)
            assets.setdefault(
                _asset_name(failed_url, b"", ext), AssetRecord(failed_url, kind, b"", "")
            )
            continue
        if kind == "stylesheet":
            content, css_failed = _localize_css(content, url, policy, assets)
            partial = partial or css_failed
        _, ext = _extension_for(url, ctype, kind)
        path = _asset_name(url, content, ext)
        assets.setdefault(path, AssetRecord(url, kind, content, ctype))
        el.attrs[attr] = path

    return replace(
        snapshot,
        markup=tree.serialize(),
        assets=assets,
        fetch_status="partial" if partial else "complete",
    )


# -- snapshot directory layout ------------------------------------------------


def save_snapshot(snapshot: WebpageSnapshot, out_dir: str | Path) -> Path:
    import json

    out = Path(out_dir)
    (out / ASSET_DIR).mkdir(parents=True, exist_ok=True)
    (out / "page.html").write_text(snapshot.markup, encoding="utf-8")
    table = {}
    for path, rec in sorted(snapshot.assets.items()):
        (out / path).parent.mkdir(parents=True, exist_ok=True)
        (out / path).write_bytes(rec.content)
        table[path] = {
            "original_url": rec.original_url,
            "kind": rec.kind,
            "content_type": rec.content_type,
        }
    meta = {
        "origin_url": snapshot.origin_url,
        "fetched_at": snapshot.fetched_at,
        "fetch_status": snapshot.fetch_status,
        "assets": table,
    }
    (out / "snapshot.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return out


def load_snapshot(snapshot_dir: str | Path) -> WebpageSnapshot:
    import json

    src = Path(snapshot_dir)
    meta = json.loads((src / "snapshot.json").read_text(encoding="utf-8"))
    assets = {}
    for path, info in meta["assets"].items():
        file_path = src / path
        content = file_path.read_bytes() if file_path.exists() else b""
        assets[path] = AssetRecord(
            info["original_url"], info["kind"], content, info["content_type"]
        )
    return WebpageSnapshot(
        origin_url=meta["origin_url"],
        markup=(src / "page.html").read_text(encoding="utf-8"),
        assets=assets,
        fetched_at=meta["fetched_at"],
        fetch_status=meta["fetch_status"],
    )
