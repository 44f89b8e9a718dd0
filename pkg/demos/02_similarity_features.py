"""The nine user-user similarity features on a small worked example.

Three content features compare entity sets; six network features read the
interaction graph structure. Every feature can drive k-nearest-neighbour
selection through a SimilarityContext.
"""

from marketrec import (
    SimilarityContext,
    adamic_adar,
    common_entities,
    common_neighbors,
    jaccard_entities,
    jaccard_neighbors,
    neighborhood_overlap,
    preferential_attachment,
    total_entities,
)
from marketrec.corpus import Corpus, Product, Purchase, SocialInteraction
from marketrec.graphs import build_social_graph

# content features work on plain sets
mine, theirs = {"a", "b", "c"}, {"b", "c", "d"}
print("content features on {a,b,c} vs {b,c,d}:")
print(f"  common  = {common_entities(mine, theirs)}")
print(f"  total   = {total_entities(mine, theirs)}")
print(f"  jaccard = {jaccard_entities(mine, theirs):.3f}")

# a tiny corpus: u1 and u2 share purchases, u1..u3 interact socially
products = {p: Product(p, "s1", ("cat",)) for p in ("p1", "p2", "p3")}
corpus = Corpus(
    products=products,
    purchases=(
        Purchase("u1", "p1"), Purchase("u1", "p2"),
        Purchase("u2", "p1"), Purchase("u2", "p2"), Purchase("u2", "p3"),
        Purchase("u3", "p3"),
    ),
    social=(
        SocialInteraction("u1", "u2", "love"),
        SocialInteraction("u2", "u1", "comment"),
        SocialInteraction("u2", "u3", "wallpost"),
        SocialInteraction("u3", "u1", "love"),
    ),
    memberships=(), interests=(), locations=(),
    users=frozenset({"u1", "u2", "u3"}),
)

graph = build_social_graph(corpus)
print("\nnetwork features on the u1/u2 pair:")
print(f"  common neighbours      = {common_neighbors(graph, 'u1', 'u2')}")
print(f"  neighbour jaccard      = {jaccard_neighbors(graph, 'u1', 'u2'):.3f}")
print(f"  adamic/adar            = {adamic_adar(graph, 'u1', 'u2'):.3f}")
print(f"  neighbourhood overlap  = {neighborhood_overlap(graph, 'u1', 'u2'):.3f}")
print(f"  pref. attachment       = {preferential_attachment(graph, 'u1', 'u2')}")

# every feature is addressable by a dotted id for neighbourhood construction
context = SimilarityContext(corpus)
for feature_id in ("mp.purchases.jaccard", "sn.graph.cn", "sn.graph.directed"):
    slice_ = context.k_nearest(feature_id, "u1", k=5)
    pretty = ", ".join(f"{u}={s:.3f}" for u, s in slice_.scored)
    print(f"\nk-nearest for u1 under {feature_id}: {pretty}")
