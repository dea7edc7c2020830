"""Per-article multi-layer network construction.

Four directed layers, one per interaction kind:

* ``RT`` retweet: a retweets b  ->  edge b -> a
* ``R``  reply:   a replies to b ->  edge a -> b
* ``Q``  quote:   a quotes b    ->  edge b -> a
* ``M``  mention: a mentions b  ->  edge a -> b

Repeated interactions between the same ordered pair increment the edge
weight. Self-interactions are dropped. Tweets with no interaction targets
at all are "pure": the network stores their count T and the number U of
distinct authors behind them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graphops import DirectedGraph
from .ingest import ArticleCascade

LAYER_KINDS = ("Q", "RT", "M", "R")


@dataclass
class LayerGraph:
    """Weighted directed layer; nodes exist only as edge endpoints."""

    layer_kind: str
    edges: dict[tuple[str, str], int] = field(default_factory=dict)

    def add_interaction(self, src: str, dst: str) -> None:
        if src == dst:
            return
        self.edges[(src, dst)] = self.edges.get((src, dst), 0) + 1

    def nodes(self) -> set[str]:
        out = set()
        for src, dst in self.edges:
            out.add(src)
            out.add(dst)
        return out

    def node_count(self) -> int:
        return len(self.nodes())

    def edge_count(self) -> int:
        return len(self.edges)

    def total_weight(self) -> int:
        return sum(self.edges.values())

    def is_empty(self) -> bool:
        return not self.edges

    def to_directed_graph(self) -> DirectedGraph:
        return DirectedGraph(self.edges.keys())


@dataclass
class MultiLayerNetwork:
    article_id: str
    layers: dict[str, LayerGraph]
    pure_tweet_count: int
    pure_tweet_users: int
    # authors behind the pure tweets; None after deserialization, where the
    # trailer carries only the counts
    pure_authors: Optional[frozenset[str]] = None

    def layer(self, kind: str) -> LayerGraph:
        return self.layers[kind]


def build_network(cascade: ArticleCascade) -> MultiLayerNetwork:
    """Construct the four layers plus pure-tweet counters for one article.

    Output depends only on the tweet multiset, not on input order.
    """
    if not cascade.tweets:
        raise ValueError(f"cascade {cascade.article_id!r} has no tweets")
    layers = {kind: LayerGraph(kind) for kind in LAYER_KINDS}
    pure_authors: set[str] = set()
    pure_count = 0
    for t in cascade.tweets:
        a = t.author_id
        if t.interaction_free():
            pure_count += 1
            pure_authors.add(a)
            continue
        if t.retweet_of is not None:
            layers["RT"].add_interaction(t.retweet_of, a)
        if t.quote_of is not None:
            layers["Q"].add_interaction(t.quote_of, a)
        if t.reply_to is not None:
            layers["R"].add_interaction(a, t.reply_to)
        for m in t.mentions:
            layers["M"].add_interaction(a, m)
    return MultiLayerNetwork(
        article_id=cascade.article_id,
        layers=layers,
        pure_tweet_count=pure_count,
        pure_tweet_users=len(pure_authors),
        pure_authors=frozenset(pure_authors),
    )


def aggregate_user_count(net: MultiLayerNetwork) -> int:
    """Unique users across all layers and pure tweets."""
    users: set[str] = set()
    for layer in net.layers.values():
        users |= layer.nodes()
    if net.pure_authors is None:
        if net.pure_tweet_users > 0:
            raise ValueError(
                "pure-tweet authors unknown; network was deserialized from "
                "a count-only trailer"
            )
    else:
        users |= net.pure_authors
    return len(users)


def aggregate_layer(net: MultiLayerNetwork) -> LayerGraph:
    """Union of all layer edges as a single directed graph (weights summed)."""
    merged = LayerGraph("ALL")
    for kind in LAYER_KINDS:
        for (src, dst), weight in net.layers[kind].edges.items():
            merged.edges[(src, dst)] = merged.edges.get((src, dst), 0) + weight
    return merged


def truncate_by_lifetime(cascade: ArticleCascade, lifetime: int) -> ArticleCascade:
    """Keep tweets within ``lifetime`` seconds of the article's earliest tweet."""
    if lifetime <= 0:
        raise ValueError("lifetime must be positive")
    if not cascade.tweets:
        raise ValueError(f"cascade {cascade.article_id!r} has no tweets")
    cutoff = cascade.tweets[0].timestamp + lifetime
    kept = tuple(t for t in cascade.tweets if t.timestamp <= cutoff)
    return ArticleCascade(cascade.article_id, kept, cascade.label)


def network_to_lines(net: MultiLayerNetwork) -> list[str]:
    """Serialize one network: `layer src dst weight` lines, layers in
    Q/RT/M/R order with edges sorted, then a `T=<n> U=<n>` trailer.
    """
    lines = []
    for kind in LAYER_KINDS:
        for (src, dst) in sorted(net.layers[kind].edges):
            lines.append(f"{kind} {src} {dst} {net.layers[kind].edges[(src, dst)]}")
    lines.append(f"T={net.pure_tweet_count} U={net.pure_tweet_users}")
    return lines


def network_from_lines(article_id: str, lines: Iterable[str]) -> MultiLayerNetwork:
    layers = {kind: LayerGraph(kind) for kind in LAYER_KINDS}
    pure_count = pure_users = None
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if pure_count is not None:
            raise ValueError("content after trailer")
        if line.startswith("T="):
            try:
                t_part, u_part = line.split()
                pure_count = int(t_part[2:])
                pure_users = int(u_part[2:])
            except ValueError:
                raise ValueError(f"bad trailer: {line!r}") from None
            if (
                not u_part.startswith("U=")
                or pure_users < 0
                or pure_users > pure_count
            ):
                raise ValueError(f"bad trailer: {line!r}")
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"bad edge line: {line!r}")
        kind, src, dst, weight_s = parts
        if kind not in layers:
            raise ValueError(f"unknown layer {kind!r}")
        weight = int(weight_s)
        if weight < 1 or src == dst:
            raise ValueError(f"bad edge line: {line!r}")
        if (src, dst) in layers[kind].edges:
            raise ValueError(f"duplicate edge: {line!r}")
        layers[kind].edges[(src, dst)] = weight
    if pure_count is None:
        raise ValueError("missing trailer")
    return MultiLayerNetwork(
        article_id=article_id,
        layers=layers,
        pure_tweet_count=pure_count,
        pure_tweet_users=pure_users,
        pure_authors=None,
    )
