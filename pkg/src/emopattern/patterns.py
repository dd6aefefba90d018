"""Template-based pattern extraction and window matching."""

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .categorize import CW, SW

WILDCARD = "<*>"
BASIC = "basic"
ENRICHED = "enriched"

# union of the rule-list templates and the forms seen in extracted examples
DEFAULT_TEMPLATES = (
    ("sw", "sw", "cw"),
    ("sw", "cw", "sw"),
    ("cw", "sw", "sw"),
    ("cw", "cw", "sw"),
    ("cw", "sw"),
    ("sw", "cw"),
    ("sw", "cw", "cw"),
)

_KIND = {CW: "cw", SW: "sw"}


def parse_template(text):
    slots = tuple(s.strip().lower() for s in text.strip().strip("<>").split(","))
    if len(slots) not in (2, 3) or any(s not in ("cw", "sw") for s in slots):
        raise ValueError(f"bad template {text!r}: need 2 or 3 of cw/sw")
    return slots


def format_template(template):
    return ",".join(template)


def parse_templates(text):
    if text in (None, "", "default"):
        return DEFAULT_TEMPLATES
    return tuple(parse_template(t) for t in text.split(";") if t.strip())


@dataclass(frozen=True)
class Pattern:
    elements: tuple
    kind: str = BASIC
    template: Optional[tuple] = None
    freq: int = 0

    @property
    def surface(self):
        return " ".join(self.elements)

    def __len__(self):
        return len(self.elements)

    def subject_positions(self):
        if self.template is None:
            return tuple(i for i, e in enumerate(self.elements) if e == WILDCARD)
        return tuple(i for i, s in enumerate(self.template) if s == "sw")

    @classmethod
    def from_surface(cls, surface, freq=0):
        elements = tuple(surface.split(" "))
        if WILDCARD in elements:
            template = tuple("sw" if e == WILDCARD else "cw" for e in elements)
            return cls(elements, BASIC, template, freq)
        return cls(elements, ENRICHED, None, freq)


def scan(tokens, sets, templates=DEFAULT_TEMPLATES):
    """Candidate ``(template, window)`` pairs over every contiguous window.

    A token outside CW and SW breaks every window that contains it.
    """
    tokens = getattr(tokens, "tokens", tokens)
    kinds = [_KIND.get(sets.kind(t)) for t in tokens]
    wanted = set(templates)
    out = []
    for length in sorted({len(t) for t in wanted}):
        for s in range(len(tokens) - length + 1):
            slot = tuple(kinds[s:s + length])
            if None not in slot and slot in wanted:
                out.append((slot, tuple(tokens[s:s + length])))
    return out


def _extract(docs, sets, templates, make):
    counts = Counter()
    for doc in docs:
        for template, window in scan(doc, sets, templates):
            key = make(template, window)
            if key is not None:
                counts[key] += 1
    return counts


def extract_basic(docs, sets, templates=DEFAULT_TEMPLATES, min_freq=10):
    """Wildcard subject slots and keep surfaces seen at least ``min_freq`` times."""
    def make(template, window):
        return template, tuple(WILDCARD if k == "sw" else t for k, t in zip(template, window))

    counts = _extract(docs, sets, templates, make)
    return sorted(
        (Pattern(el, BASIC, tpl, f) for (tpl, el), f in counts.items() if f >= min_freq),
        key=lambda p: p.surface,
    )


def extract_enriched(docs, sets, clusters, templates=DEFAULT_TEMPLATES, min_freq=10):
    """Keep subject words verbatim; each must belong to some word cluster."""
    def make(template, window):
        if all(t in clusters for k, t in zip(template, window) if k == "sw"):
            return template, window
        return None

    counts = _extract(docs, sets, templates, make)
    return sorted(
        (Pattern(el, ENRICHED, tpl, f) for (tpl, el), f in counts.items() if f >= min_freq),
        key=lambda p: p.surface,
    )


def _element_matches(p, i, token, clusters, generalize):
    el = p.elements[i]
    if el == WILDCARD:
        return True
    if generalize and p.kind == ENRICHED and i in p.subject_positions():
        cid = clusters.get(el)
        return cid is not None and clusters.get(token) == cid
    return el == token


def match(p, doc, clusters=None, generalize=False):
    """Number of contiguous windows of ``doc`` matching ``p``.

    ``generalize`` lets an enriched subject literal match any word from the
    same cluster; off by default.
    """
    tokens = getattr(doc, "tokens", doc)
    clusters = clusters or {}
    n = len(p)
    return sum(
        all(_element_matches(p, i, tokens[s + i], clusters, generalize) for i in range(n))
        for s in range(len(tokens) - n + 1)
    )


class PatternMatcher:
    """Batch matcher: one hash lookup per (window, slot layout) instead of per pattern."""

    def __init__(self, patterns, clusters=None, generalize=False):
        self.patterns = list(patterns)
        self.clusters = clusters or {}
        self._tables = defaultdict(lambda: defaultdict(list))
        for idx, p in enumerate(self.patterns):
            sub = set(p.subject_positions()) if generalize and p.kind == ENRICHED else set()
            layout, key = [], []
            for i, el in enumerate(p.elements):
                if el == WILDCARD:
                    layout.append("any")
                elif i in sub:
                    layout.append("cl")
                    key.append(self.clusters.get(el))
                else:
                    layout.append("lit")
                    key.append(el)
            if None in key:
                continue
            self._tables[tuple(layout)][tuple(key)].append(idx)

    def __len__(self):
        return len(self.patterns)

    def counts(self, doc):
        tokens = getattr(doc, "tokens", doc)
        out = np.zeros(len(self.patterns), dtype=np.int64)
        for layout, table in self._tables.items():
            n = len(layout)
            for s in range(len(tokens) - n + 1):
                key = []
                for i, kind in enumerate(layout):
                    if kind == "lit":
                        key.append(tokens[s + i])
                    elif kind == "cl":
                        key.append(self.clusters.get(tokens[s + i]))
                hits = table.get(tuple(key))
                if hits:
                    for idx in hits:
                        out[idx] += 1
        return out

    def matrix(self, docs):
        docs = list(docs)
        out = np.zeros((len(docs), len(self.patterns)), dtype=np.int64)
        for r, doc in enumerate(docs):
            out[r] = self.counts(doc)
        return out


def save_lexicon(patterns, path):
    """``kind<TAB>template<TAB>surface<TAB>freq``, basic before enriched, by surface."""
    order = sorted(patterns, key=lambda p: (p.kind != BASIC, p.surface))
    with open(path, "w", encoding="utf-8") as fh:
        for p in order:
            tpl = format_template(p.template) if p.template else ""
            fh.write(f"{p.kind}\t{tpl}\t{p.surface}\t{p.freq}\n")


def load_lexicon(path, kinds=None):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4 or parts[0] not in (BASIC, ENRICHED):
                raise ValueError(f"{path}:{lineno}: expected 'kind<TAB>template<TAB>surface<TAB>freq'")
            kind, tpl, surface, freq = parts
            if kinds is not None and kind not in kinds:
                continue
            out.append(Pattern(tuple(surface.split(" ")), kind,
                               parse_template(tpl) if tpl else None, int(freq)))
    return out
