"""Directed word co-occurrence graphs and subjective/objective aggregation."""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional


class GraphError(ValueError):
    pass


@dataclass
class TokenGraph:
    """Directed co-occurrence graph keyed by ordered ``(src, dst)`` token pairs.

    ``nodes`` is kept sorted, so a token's node id is its position.  The same
    class doubles as the emotion graph, whose weights may be negative.
    """

    nodes: list = field(default_factory=list)
    freq: dict = field(default_factory=dict)
    weight: Optional[dict] = None

    @property
    def node_id(self):
        return {tok: i for i, tok in enumerate(self.nodes)}

    @property
    def arcs(self):
        return sorted(self.freq)

    def __len__(self):
        return len(self.freq)


EmotionGraph = TokenGraph


def count_arcs(tokens, window=2):
    """Arc counts for one document: token i -> each of the next window-1 tokens."""
    counts = Counter()
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, min(i + window, n)):
            counts[(tokens[i], tokens[j])] += 1
    return counts


def build_graph(docs, window=2):
    """Co-occurrence graph over normalized documents.

    Per-document counts are merged by addition, so any partition of the
    documents gives the same graph.
    """
    if window < 2:
        raise GraphError("window must be >= 2")
    freq = Counter()
    nodes = set()
    for doc in docs:
        tokens = getattr(doc, "tokens", doc)
        nodes.update(tokens)
        freq.update(count_arcs(tokens, window))
    return TokenGraph(nodes=sorted(nodes), freq=dict(sorted(freq.items())))


def normalize_weights(g):
    """w(a) = freq(a) / max freq."""
    if not g.freq:
        raise GraphError("cannot normalize an arc-free graph")
    top = max(g.freq.values())
    weight = {a: f / top for a, f in g.freq.items()}
    return TokenGraph(nodes=list(g.nodes), freq=dict(g.freq), weight=weight)


def aggregate(subjective, objective):
    """Weaken subjective arcs by their objective weight.

    Shared arcs get ``w_s - w_o``; arcs only in the subjective graph keep
    their weight untouched; objective-only arcs are dropped.
    """
    if subjective.weight is None or objective.weight is None:
        raise GraphError("aggregate needs weight-normalized graphs")
    weight = {}
    for arc, w in subjective.weight.items():
        wo = objective.weight.get(arc)
        weight[arc] = w if wo is None else w - wo
    return TokenGraph(nodes=list(subjective.nodes), freq=dict(subjective.freq), weight=weight)


def prune(g, phi_w=0.0):
    """Keep arcs with weight strictly above ``phi_w``; drop orphaned nodes."""
    if g.weight is None:
        raise GraphError("prune needs a weighted graph")
    keep = [a for a in g.arcs if g.weight[a] > phi_w]
    nodes = sorted({t for a in keep for t in a})
    return TokenGraph(
        nodes=nodes,
        freq={a: g.freq[a] for a in keep},
        weight={a: g.weight[a] for a in keep},
    )


def save_graph(g, path):
    """Edge list ``src<TAB>dst<TAB>freq<TAB>weight``; weight left blank when unset."""
    with open(path, "w", encoding="utf-8") as fh:
        for src, dst in g.arcs:
            w = "" if g.weight is None else repr(float(g.weight[(src, dst)]))
            fh.write(f"{src}\t{dst}\t{g.freq[(src, dst)]}\t{w}\n")


def load_graph(path):
    freq, weight = {}, {}
    has_weight = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise GraphError(f"{path}:{lineno}: expected 4 tab-separated fields")
            src, dst, f, w = parts
            arc = (src, dst)
            try:
                freq[arc] = int(f)
                if w:
                    weight[arc] = float(w)
            except ValueError:
                raise GraphError(f"{path}:{lineno}: bad number") from None
            if has_weight is None:
                has_weight = bool(w)
            elif has_weight != bool(w):
                raise GraphError(f"{path}:{lineno}: weights must be all present or all absent")
            if not math.isfinite(weight.get(arc, 0.0)):
                raise GraphError(f"{path}:{lineno}: non-finite weight")
    nodes = sorted({t for a in freq for t in a})
    return TokenGraph(nodes=nodes, freq=dict(sorted(freq.items())), weight=weight if has_weight else None)
