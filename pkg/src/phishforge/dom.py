"""Mutable HTML document tree: error-tolerant parsing, deterministic
serialization, stable node identifiers.

Built on html.parser rather than a third-party parser so node ids,
attribute order, and byte-level serialization are fully under our control.
Error tolerance covers the common real-world soup (unclosed tags, implied
end tags for p/li/table cells, stray end tags); exotic quirks-mode
behaviour is out of scope.
"""
from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Callable, Iterator

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
RAW_TEXT_ELEMENTS = frozenset({"script", "style"})

# Opening one of these implicitly closes matching open elements.
_CLOSE_BEFORE = {
    "p": {"p"},
    "li": {"li"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "option": {"option"},
    "optgroup": {"option", "optgroup"},
    "tbody": {"tr", "td", "th", "thead"},
    "tfoot": {"tr", "td", "th", "tbody"},
}
_BLOCK_TAGS = frozenset(
    "address article aside blockquote div dl fieldset figure footer form "
    "h1 h2 h3 h4 h5 h6 header hr main nav ol pre section table ul".split()
)


class ParseError(ValueError):
    pass


@dataclass(eq=False)
class Node:
    node_id: int
    parent: "Element | None" = field(default=None, repr=False)


@dataclass(eq=False)
class Text(Node):
    data: str = ""


@dataclass(eq=False)
class Comment(Node):
    data: str = ""


@dataclass(eq=False)
class Element(Node):
    tag: str = ""
    attrs: dict[str, str | None] = field(default_factory=dict)
    children: list[Node] = field(default_factory=list)

    def append(self, node: Node) -> None:
        node.parent = self
        self.children.append(node)

    def insert(self, index: int, node: Node) -> None:
        node.parent = self
        self.children.insert(index, node)

    def remove(self, node: Node) -> None:
        self.children.remove(node)
        node.parent = None

    def replace_with_nodes(self, old: Node, new_nodes: list[Node]) -> None:
        idx = self.children.index(old)
        old.parent = None
        for n in new_nodes:
            n.parent = self
        self.children[idx : idx + 1] = new_nodes

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    def text(self) -> str:
        """Concatenated descendant text."""
        parts: list[str] = []
        for node in _walk(self):
            if isinstance(node, Text):
                parts.append(node.data)
        return "".join(parts)

    def ancestors(self) -> Iterator["Element"]:
        cur = self.parent
        while cur is not None:
            yield cur
            cur = cur.parent

    def iter_elements(self, tag: str | None = None) -> Iterator["Element"]:
        for node in _walk(self):
            if isinstance(node, Element) and (tag is None or node.tag == tag):
                yield node


def _walk(root: Node) -> Iterator[Node]:
    yield root
    if isinstance(root, Element):
        for child in list(root.children):
            yield from _walk(child)


class DocumentTree:
    """Parsed document with an html > head + body skeleton and monotonically
    assigned node ids (document order at parse time)."""

    def __init__(self) -> None:
        self._next_id = 0
        self.doctype: str | None = None
        self.root: Element = self.new_element("html")

    # node factories ----------------------------------------------------

    def _take_id(self) -> int:
        nid = self._next_id
        self._next_id += 1
        return nid

    def new_element(self, tag: str, attrs: dict[str, str | None] | None = None) -> Element:
        return Element(self._take_id(), tag=tag, attrs=dict(attrs or {}))

    def new_text(self, data: str) -> Text:
        return Text(self._take_id(), data=data)

    def new_comment(self, data: str) -> Comment:
        return Comment(self._take_id(), data=data)

    # queries ------------------------------------------------------------

    def iter_nodes(self) -> Iterator[Node]:
        return _walk(self.root)

    def elements(self, tag: str | None = None) -> list[Element]:
        return list(self.root.iter_elements(tag))

    def find(self, predicate: Callable[[Element], bool]) -> list[Element]:
        return [el for el in self.root.iter_elements() if predicate(el)]

    def find_by_id(self, node_id: int) -> Node | None:
        for node in self.iter_nodes():
            if node.node_id == node_id:
                return node
        return None

    def contains_id(self, node_id: int) -> bool:
        return self.find_by_id(node_id) is not None

    @property
    def head(self) -> Element:
        for child in self.root.children:
            if isinstance(child, Element) and child.tag == "head":
                return child
        raise AssertionError("normalized tree lacks head")

    @property
    def body(self) -> Element:
        for child in self.root.children:
            if isinstance(child, Element) and child.tag == "body":
                return child
        raise AssertionError("normalized tree lacks body")

    def element_count(self) -> int:
        return sum(1 for n in self.iter_nodes() if isinstance(n, Element))

    # serialization --------------------------------------------------------

    def serialize(self) -> str:
        out: list[str] = []
        if self.doctype:
            out.append(f"<!{self.doctype}>")
        _serialize_node(self.root, out)
        return "".join(out)


def _serialize_node(node: Node, out: list[str]) -> None:
    if isinstance(node, Text):
        out.append(html_escape.escape(node.data, quote=False))
    elif isinstance(node, Comment):
        out.append(f"<!--{node.data}-->")
    elif isinstance(node, Element):
        out.append(f"<{node.tag}")
        for name, value in node.attrs.items():
            if value is None:
                out.append(f" {name}")
            else:
                out.append(f' {name}="{html_escape.escape(value, quote=True)}"')
        out.append(">")
        if node.tag in VOID_ELEMENTS:
            return
        if node.tag in RAW_TEXT_ELEMENTS:
            for child in node.children:
                if isinstance(child, Text):
                    out.append(child.data)
        else:
            for child in node.children:
                _serialize_node(child, out)
        out.append(f"</{node.tag}>")


class _TreeBuilder(HTMLParser):
    def __init__(self, tree: DocumentTree) -> None:
        super().__init__(convert_charrefs=True)
        self.tree = tree
        self.top_nodes: list[Node] = []
        self.stack: list[Element] = []

    # attachment helpers

    def _attach(self, node: Node) -> None:
        if self.stack:
            self.stack[-1].append(node)
        else:
            self.top_nodes.append(node)

    def _pop_implied(self, tag: str) -> None:
        closes = _CLOSE_BEFORE.get(tag)
        if closes:
            while self.stack and self.stack[-1].tag in closes:
                self.stack.pop()
        if tag in _BLOCK_TAGS:
            while self.stack and self.stack[-1].tag == "p":
                self.stack.pop()

    # parser callbacks

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._pop_implied(tag)
        el = self.tree.new_element(tag)
        for name, value in attrs:
            el.attrs.setdefault(name, value)
        self._attach(el)
        if tag not in VOID_ELEMENTS:
            self.stack.append(el)

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._pop_implied(tag)
        el = self.tree.new_element(tag)
        for name, value in attrs:
            el.attrs.setdefault(name, value)
        self._attach(el)

    def handle_endtag(self, tag: str) -> None:
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray end tag: ignored

    def handle_data(self, data: str) -> None:
        if not data:
            return
        parent_children = self.stack[-1].children if self.stack else self.top_nodes
        if parent_children and isinstance(parent_children[-1], Text):
            parent_children[-1].data += data
        else:
            self._attach(self.tree.new_text(data))

    def handle_comment(self, data: str) -> None:
        self._attach(self.tree.new_comment(data))

    def handle_decl(self, decl: str) -> None:
        if self.tree.doctype is None:
            self.tree.doctype = decl


def parse_document(markup: str) -> DocumentTree:
    """Parse markup into a normalized tree (html > head + body always
    present). Tolerates the malformed HTML real pages ship."""
    if not isinstance(markup, str):
        raise ParseError("markup must be text, not binary payload")
    if "\x00" in markup:
        raise ParseError("markup contains NUL bytes; looks like a binary payload")
    if not markup.strip():
        raise ParseError("markup is empty")

    tree = DocumentTree()
    builder = _TreeBuilder(tree)
    builder.feed(markup)
    builder.close()
    _normalize(tree, builder.top_nodes)
    return tree


def serialize_document(tree: DocumentTree) -> str:
    return tree.serialize()


def _normalize(tree: DocumentTree, top_nodes: list[Node]) -> None:
    html_el = next(
        (n for n in top_nodes if isinstance(n, Element) and n.tag == "html"), None
    )
    pre: list[Node] = []
    post: list[Node] = []
    if html_el is None:
        html_el = tree.new_element("html")
        for n in top_nodes:
            html_el.append(n)
    else:
        seen_html = False
        for n in top_nodes:
            if n is html_el:
                seen_html = True
            elif not seen_html:
                pre.append(n)
            else:
                post.append(n)

    head = next(
        (c for c in html_el.children if isinstance(c, Element) and c.tag == "head"),
        None,
    )
    body = next(
        (c for c in html_el.children if isinstance(c, Element) and c.tag == "body"),
        None,
    )
    if head is None:
        head = tree.new_element("head")
    if body is None:
        body = tree.new_element("body")

    before_body: list[Node] = []
    after_body: list[Node] = []
    past_body = False
    for child in list(html_el.children):
        if child is head:
            continue
        if child is body:
            past_body = True
            continue
        (after_body if past_body else before_body).append(child)

    for n in pre + before_body:
        n.parent = body
    for n in after_body + post:
        n.parent = body
    body.children = (
        [*(pre + before_body), *body.children, *(after_body + post)]
    )
    for n in body.children:
        n.parent = body

    head.parent = html_el
    body.parent = html_el
    html_el.children = [head, body]
    html_el.parent = None
    tree.root = html_el


# test support: structural equality -------------------------------------


def tree_signature(node: Node) -> object:
    """Normalized structural signature (merges adjacent text) used to compare
    trees for tag/attribute/text equality."""
    if isinstance(node, Text):
        return ("text", node.data)
    if isinstance(node, Comment):
        return ("comment", node.data)
    assert isinstance(node, Element)
    merged: list[Node] = []
    for child in node.children:
        if (
            isinstance(child, Text)
            and merged
            and isinstance(merged[-1], Text)
        ):
            merged[-1] = Text(-1, data=merged[-1].data + child.data)
        else:
            merged.append(child)
    return (
        "el",
        node.tag,
        tuple(sorted((k, v) for k, v in node.attrs.items())),
        tuple(tree_signature(c) for c in merged),
    )


def trees_equal(a: DocumentTree, b: DocumentTree) -> bool:
    return tree_signature(a.root) == tree_signature(b.root)
