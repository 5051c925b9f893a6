"""Shared fixture builders for the test suite."""
from __future__ import annotations

from pathlib import Path

from phishforge.fetch import AssetRecord, WebpageSnapshot
from phishforge.raster import RasterImage

EMPTY_PAGE = "<html></html>"

ANCHOR_PAGE = """<html><body>
<a href="https://example.com/a">one</a>
<a href="/b">two</a>
<a href="c.html">three</a>
</body></html>"""

LOGIN_PAGE = """<html><head><title>Sign in</title></head><body>
<header><img src="assets/logo.png" alt="brand"></header>
<h1>Member portal</h1>
<p>Use your account below</p>
<a href="https://example.com/help">Help</a>
<form action="/session" method="post" id="login">
  <input type="text" name="user">
  <input type="password" name="pass">
  <button type="submit">Log in</button>
</form>
<button class="alt">Sign in with Google</button>
<span>footer note</span>
</body></html>"""

LOGO_SVG = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="60" height="24" '
    'viewBox="0 0 60 24"><rect x="2" y="2" width="56" height="20" '
    'fill="#2266aa"/><circle cx="12" cy="12" r="8" fill="#ffffff"/></svg>'
)


def make_logo_png(width: int = 60, height: int = 30, rgba=(10, 90, 200, 255)) -> bytes:
    return RasterImage.filled(width, height, rgba).to_png()


def snapshot_with_assets(
    markup: str,
    assets: dict[str, bytes] | None = None,
    origin: str = "https://example.com/",
) -> WebpageSnapshot:
    records = {
        path: AssetRecord(f"{origin}{Path(path).name}", "image", data, "")
        for path, data in (assets or {}).items()
    }
    return WebpageSnapshot(
        origin_url=origin,
        markup=markup,
        assets=records,
        fetched_at=0.0,
        fetch_status="complete",
    )


def login_snapshot(logo: bytes | None = None) -> WebpageSnapshot:
    return snapshot_with_assets(
        LOGIN_PAGE, {"assets/logo.png": logo or make_logo_png()}
    )


def write_page(directory: Path, name: str, markup: str) -> Path:
    path = directory / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(markup, encoding="utf-8")
    return path
