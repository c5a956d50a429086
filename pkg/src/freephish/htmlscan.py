"""Lenient HTML scanning built on html.parser.

Real-world phishing pages are frequently malformed (unclosed tags, inputs
outside forms, commented-out markup), so everything here is tolerant: no
exception escapes for bad markup, unparseable fragments are simply skipped.
One pass produces a PageScan that the feature extractor, snapshot ingester
and similarity module all work from.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

_URL_IN_JS = re.compile(r"""https?://[^'"\s)>]+""", re.IGNORECASE)


@dataclass
class InputField:
    attrs: dict[str, str]
    in_form: bool
    label_text: str = ""


@dataclass
class Anchor:
    href: str | None
    wraps_button: bool = False


@dataclass
class PageScan:
    """Everything one lenient pass collects from an HTML body."""

    tags: list[tuple[str, list[tuple[str, str | None]]]] = field(default_factory=list)
    inputs: list[InputField] = field(default_factory=list)
    form_with_input: bool = False
    anchors: list[Anchor] = field(default_factory=list)
    iframe_srcs: list[str] = field(default_factory=list)
    button_onclick_urls: list[str] = field(default_factory=list)
    metas: list[dict[str, str]] = field(default_factory=list)
    style_text: str = ""
    comments: list[str] = field(default_factory=list)
    noindex_tag: bool = False


class _Scanner(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.scan = PageScan()
        self._form_depth = 0
        # stack of (for_id, text buffer) for open <label> elements
        self._label_stack: list[tuple[str | None, list[str]]] = []
        self._open_anchor: Anchor | None = None
        self._in_style = False
        self._style_parts: list[str] = []
        self._for_texts: dict[str, list[str]] = {}
        self._inputs_by_id: dict[str, int] = {}

    @staticmethod
    def _attr_dict(attrs) -> dict[str, str]:
        out: dict[str, str] = {}
        for k, v in attrs:
            k = k.lower()
            if k not in out:
                out[k] = v if v is not None else ""
        return out

    def handle_starttag(self, tag, attrs):
        tag = tag.lower()
        scan = self.scan
        scan.tags.append((tag, [(k.lower(), v) for k, v in attrs]))
        ad = self._attr_dict(attrs)

        if tag == "form":
            self._form_depth += 1
        elif tag == "input":
            in_form = self._form_depth > 0
            if in_form:
                scan.form_with_input = True
            fld = InputField(attrs=ad, in_form=in_form)
            scan.inputs.append(fld)
            if self._label_stack:
                # text collected when the enclosing label closes
                fld.label_text = "\x00PENDING"
            if ad.get("id"):
                self._inputs_by_id[ad["id"]] = len(scan.inputs) - 1
        elif tag == "label":
            self._label_stack.append((ad.get("for") or None, []))
        elif tag == "a":
            self._open_anchor = Anchor(href=ad.get("href"))
            cls = (ad.get("class") or "").lower()
            if ad.get("role", "").lower() == "button" or "button" in cls:
                self._open_anchor.wraps_button = True
            scan.anchors.append(self._open_anchor)
        elif tag == "button":
            if self._open_anchor is not None:
                self._open_anchor.wraps_button = True
            onclick = ad.get("onclick") or ""
            m = _URL_IN_JS.search(onclick)
            if m:
                scan.button_onclick_urls.append(m.group(0))
        elif tag == "iframe":
            if ad.get("src"):
                scan.iframe_srcs.append(ad["src"])
        elif tag == "meta":
            scan.metas.append(ad)
        elif tag == "style":
            self._in_style = True
        elif tag == "noindex":
            scan.noindex_tag = True

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        tag = tag.lower()
        if tag == "form" and self._form_depth > 0:
            self._form_depth -= 1
        elif tag == "label" and self._label_stack:
            for_id, buf = self._label_stack.pop()
            text = " ".join(buf).strip()
            for fld in self.scan.inputs:
                if fld.label_text == "\x00PENDING":
                    fld.label_text = text
            if for_id:
                self._for_texts.setdefault(for_id, []).append(text)
        elif tag == "a":
            self._open_anchor = None
        elif tag == "style":
            self._in_style = False

    def handle_data(self, data):
        if self._in_style:
            self._style_parts.append(data)
        for _, buf in self._label_stack:
            buf.append(data)

    def handle_comment(self, data):
        self.scan.comments.append(data)

    def finish(self) -> PageScan:
        scan = self.scan
        scan.style_text = "\n".join(self._style_parts)
        # attach <label for=...> text to the matching inputs
        for fid, texts in self._for_texts.items():
            idx = self._inputs_by_id.get(fid)
            if idx is not None and texts:
                fld = scan.inputs[idx]
                extra = " ".join(t for t in texts if t)
                fld.label_text = (fld.label_text + " " + extra).strip()
        for fld in scan.inputs:
            if fld.label_text == "\x00PENDING":
                fld.label_text = ""
        return scan


def scan_page(body: str) -> PageScan:
    """Scan an HTML body, tolerating malformed markup."""
    scanner = _Scanner()
    try:
        scanner.feed(body)
        scanner.close()
    except Exception:
        # html.parser is already lenient; anything beyond that we abandon
        # mid-document and keep whatever was collected.
        pass
    return scanner.finish()


def normalize_start_tag(name: str, attrs: list[tuple[str, str | None]]) -> str:
    """Rebuild a start tag as a lowercased, whitespace-collapsed string."""
    parts = [name.lower()]
    for k, v in attrs:
        if v is None:
            parts.append(k.lower())
        else:
            v = re.sub(r"\s+", " ", v.strip().lower())
            parts.append(f'{k.lower()}="{v}"')
    return "<" + " ".join(parts) + ">"
