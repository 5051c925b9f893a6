"""HTTP API behind the interactive UI: URL submission, feature selection,
bundle generation, sandboxed preview, and local credential capture.

Safety posture: binds to loopback unless explicitly overridden, captured
form fields are appended to a file inside the bundle sandbox and never
forwarded anywhere, and previewed pages carry a research banner by default.
"""
from __future__ import annotations

import logging
import mimetypes
import random
import re
import tempfile
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlsplit

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import catalog
from .applicability import ApplicabilityReport, analyze_applicability
from .dom import parse_document
from .fetch import (
    FetchError,
    FetchPolicy,
    InvalidUrlError,
    NotHtmlError,
    WebpageSnapshot,
    fetch_page,
    localize_assets,
    snapshot_from_file,
)
from .pipeline import (
    ConflictError,
    ExplicitSelection,
    GeneratedBundle,
    GenerationError,
    GenerationRecipe,
    RandomSelection,
    RecipeError,
    generate,
    write_bundle,
)

log = logging.getLogger("phishforge.service")

SCHEMA_VERSION = "1"
BANNER_HTML = (
    '<div style="position:fixed;top:0;left:0;right:0;z-index:2147483647;'
    "background:#b91c1c;color:#fff;font:13px sans-serif;padding:4px 10px;"
    'text-align:center;">RESEARCH ARTIFACT - generated page for detector evaluation</div>'
)
_BODY_OPEN = re.compile(r"<body\b[^>]*>", re.IGNORECASE)


@dataclass
class ServiceConfig:
    work_dir: Path | None = None
    ttl_s: int = 3600
    policy: FetchPolicy = field(default_factory=FetchPolicy)
    banner: bool = True
    max_capture_bytes: int = 65536
    dev_cors: bool = False
    ui_dir: Path | None = None
    allow_file_urls: bool = False

    def resolved_work_dir(self) -> Path:
        if self.work_dir is None:
            self.work_dir = Path(tempfile.mkdtemp(prefix="phishforge-service-"))
        self.work_dir.mkdir(parents=True, exist_ok=True)
        return self.work_dir


@dataclass
class SessionRecord:
    session_id: str
    snapshot: WebpageSnapshot
    report: ApplicabilityReport
    bundles: dict[str, GeneratedBundle] = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)
    ttl_s: int = 3600
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def expired(self, now: float | None = None) -> bool:
        return (now or time.time()) > self.created_at + self.ttl_s


class SessionStore:
    def __init__(self, ttl_s: int) -> None:
        self._ttl = ttl_s
        self._sessions: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()

    def create(self, snapshot: WebpageSnapshot, report: ApplicabilityReport) -> SessionRecord:
        record = SessionRecord(
            session_id=uuid.uuid4().hex, snapshot=snapshot, report=report, ttl_s=self._ttl
        )
        with self._lock:
            self._sessions[record.session_id] = record
        return record

    def get(self, session_id: str) -> SessionRecord | None:
        with self._lock:
            record = self._sessions.get(session_id)
            if record and record.expired():
                del self._sessions[session_id]
                return None
            return record


class AnalyzeRequest(BaseModel):
    url: str


class RandomSpec(BaseModel):
    count_content: int | None = None
    count_visual: int | None = None


class GenerateRequest(BaseModel):
    session_id: str
    features: list[str] | None = None
    random: RandomSpec | None = None
    seed: int | None = None
    params: dict[str, dict] | None = None


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    work_dir = config.resolved_work_dir()
    store = SessionStore(config.ttl_s)
    app = FastAPI(title="phishforge service", version=SCHEMA_VERSION)

    if config.dev_cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.get("/features")
    def features(category: str | None = None):
        if category not in (None, "content", "visual"):
            return _error(400, "category must be 'content' or 'visual'")
        return {
            "schema_version": SCHEMA_VERSION,
            "features": catalog.catalog_listing(category),
        }

    @app.post("/analyze")
    def analyze(payload: AnalyzeRequest):
        url = payload.url.strip()
        parts = urlsplit(url)
        file_ok = config.allow_file_urls and parts.scheme == "file"
        if not file_ok and (parts.scheme not in ("http", "https") or not parts.hostname):
            return _error(400, f"invalid url: {url!r}")
        try:
            if file_ok:
                snapshot = snapshot_from_file(parts.path)
            else:
                snapshot = fetch_page(url, config.policy)
            snapshot = localize_assets(snapshot, config.policy)
        except InvalidUrlError as exc:
            return _error(400, str(exc))
        except NotHtmlError as exc:
            return _error(422, str(exc))
        except FetchError as exc:
            return _error(502, str(exc))
        report = analyze_applicability(parse_document(snapshot.markup))
        record = store.create(snapshot, report)
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": record.session_id,
            "report": report.to_dict(),
        }

    @app.post("/generate")
    def generate_bundle(payload: GenerateRequest):
        record = store.get(payload.session_id)
        if record is None:
            return _error(404, "unknown or expired session")
        if payload.features:
            selection: object = ExplicitSelection(
                tuple(f.strip().upper() for f in payload.features)
            )
        elif payload.random:
            selection = RandomSelection(
                payload.random.count_content, payload.random.count_visual
            )
        else:
            selection = RandomSelection()
        seed = payload.seed if payload.seed is not None else random.SystemRandom().getrandbits(64)
        try:
            recipe = GenerationRecipe(
                selection=selection, seed=seed, params=payload.params or {}
            )
        except ConflictError as exc:
            return _error(409, str(exc))
        except RecipeError as exc:
            return _error(422, str(exc))

        with record.lock:
            try:
                bundle = generate(record.snapshot, recipe)
            except GenerationError as exc:
                return _error(422, str(exc))
            bundle_id = f"{seed:016x}"
            n = 1
            while bundle_id in record.bundles:
                n += 1
                bundle_id = f"{seed:016x}-{n}"
            bundle_dir = work_dir / "sessions" / record.session_id / bundle_id
            write_bundle(bundle, bundle_dir)
            record.bundles[bundle_id] = bundle

        return {
            "schema_version": SCHEMA_VERSION,
            "bundle_id": bundle_id,
            "seed": seed,
            "spoofed_url": bundle.spoofed_url,
            "ledger": [entry.to_dict() for entry in bundle.ledger],
            "preview_url": f"/bundles/{record.session_id}/{bundle_id}/index.html",
        }

    def _bundle_dir(session_id: str, bundle_id: str) -> Path | None:
        record = store.get(session_id)
        if record is None or bundle_id not in record.bundles:
            return None
        return work_dir / "sessions" / session_id / bundle_id

    @app.get("/bundles/{session_id}/{bundle_id}/{path:path}")
    def serve_bundle(session_id: str, bundle_id: str, path: str):
        bundle_dir = _bundle_dir(session_id, bundle_id)
        if bundle_dir is None:
            return _error(404, "unknown bundle")
        target = (bundle_dir / (path or "index.html")).resolve()
        if not target.is_relative_to(bundle_dir.resolve()) or not target.is_file():
            return _error(404, "no such file")
        if target.name == "captures.log":
            return _error(404, "no such file")
        content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        data = target.read_bytes()
        if config.banner and content_type == "text/html":
            text = data.decode("utf-8", errors="replace")
            m = _BODY_OPEN.search(text)
            if m:
                text = text[: m.end()] + BANNER_HTML + text[m.end() :]
                data = text.encode("utf-8")
        return Response(content=data, media_type=content_type)

    @app.post("/bundles/{session_id}/{bundle_id}/capture")
    async def capture(session_id: str, bundle_id: str, request: Request):
        bundle_dir = _bundle_dir(session_id, bundle_id)
        if bundle_dir is None:
            return _error(404, "unknown bundle")
        body = await request.body()
        if len(body) > config.max_capture_bytes:
            return _error(413, "capture body too large")
        line = f"{int(time.time())}\t{body.decode('utf-8', errors='replace')}\n"
        with open(bundle_dir / "captures.log", "a", encoding="utf-8") as fh:
            fh.write(line)
        return Response(status_code=204)

    if config.ui_dir and config.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app


def run_service(
    host: str, port: int, config: ServiceConfig | None = None, allow_nonlocal: bool = False
) -> None:
    import ipaddress

    import uvicorn

    loopback = False
    try:
        loopback = ipaddress.ip_address(host).is_loopback
    except ValueError:
        loopback = host in ("localhost",)
    if not loopback:
        if not allow_nonlocal:
            raise SystemExit(
                "refusing to bind beyond loopback without --allow-nonlocal "
                "(this serves generated phishing pages; keep it local)"
            )
        log.warning("binding to %s: generated pages will be reachable beyond this host", host)
    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
