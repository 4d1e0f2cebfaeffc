"""Labelled simple graphs: connectivity, decompositions, embedding oracles.

The genus oracle searches rotation systems with branch-and-bound on a
partial face count; it is exact at desk scale and raises a budget error
carrying a certified interval when the search is cut short.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import networkx as nx

from . import maps as mp

__all__ = [
    "LabelledGraph",
    "BlockTree",
    "TriComponent",
    "GraphError",
    "BudgetExceededError",
    "components",
    "is_connected",
    "is_k_connected",
    "block_decomposition",
    "three_connected_components",
    "recompose",
    "genus",
    "genus_whole",
    "euler_genus_graph",
    "nonorientable_genus",
    "embeddings",
    "face_width_graph",
    "chromatic_number",
    "is_planar_independent",
    "to_graph6",
    "from_graph6",
    "canonical_key",
    "automorphism_count",
]


class GraphError(ValueError):
    pass


class BudgetExceededError(GraphError):
    """Search budget exhausted; carries a certified (lo, hi) interval."""

    def __init__(self, message: str, lo: int, hi: int | None):
        super().__init__(f"{message} (certified interval [{lo}, {hi}])")
        self.interval = (lo, hi)


@dataclass(frozen=True)
class LabelledGraph:
    """Simple graph on vertices {1..n}."""

    n: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "LabelledGraph":
        norm = set()
        for a, b in edges:
            if a == b:
                raise GraphError("loops are not allowed")
            if not (1 <= a <= n and 1 <= b <= n):
                raise GraphError(f"edge ({a},{b}) out of range")
            norm.add((min(a, b), max(a, b)))
        return cls(n, frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "LabelledGraph":
        return cls.from_edges(n, itertools.combinations(range(1, n + 1), 2))

    @classmethod
    def cycle(cls, n: int) -> "LabelledGraph":
        return cls.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "LabelledGraph":
        return cls.from_edges(
            a + b, [(i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)]
        )

    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def degree(self, v: int) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    def subgraph(self, vertices: Iterable[int]) -> "LabelledGraph":
        """Induced subgraph, relabelled to {1..k} in sorted vertex order."""
        vs = sorted(set(vertices))
        index = {v: i + 1 for i, v in enumerate(vs)}
        edges = [
            (index[a], index[b]) for a, b in self.edges if a in index and b in index
        ]
        return LabelledGraph.from_edges(len(vs), edges)

    def to_networkx(self) -> "nx.Graph":
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n + 1))
        g.add_edges_from(self.edges)
        return g


# ----------------------------------------------------------------------
# connectivity


def components(g: LabelledGraph) -> list[frozenset[int]]:
    adj = {v: g.neighbors(v) for v in range(1, g.n + 1)}
    seen: set[int] = set()
    out = []
    for start in range(1, g.n + 1):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(g: LabelledGraph) -> bool:
    return len(components(g)) <= 1


def is_k_connected(g: LabelledGraph, k: int) -> bool:
    """At least k vertices must be deleted to disconnect; needs >= k+1
    vertices."""
    if k > 3:
        raise GraphError("only k <= 3 is supported")
    if g.n < k + 1 or not is_connected(g):
        return False
    for size in range(1, k):
        for cut in itertools.combinations(range(1, g.n + 1), size):
            rest = [v for v in range(1, g.n + 1) if v not in cut]
            if len(rest) > 1 and not is_connected(g.subgraph(rest)):
                return False
    return True


@dataclass(frozen=True)
class BlockTree:
    """Blocks (2-connected components, bridges, isolated vertices) and the
    block-cut incidence tree."""

    blocks: tuple[tuple[frozenset[int], frozenset[tuple[int, int]]], ...]
    cut_vertices: frozenset[int]
    incidence: tuple[tuple[int, int], ...]  # (block index, cut vertex)


def block_decomposition(g: LabelledGraph) -> BlockTree:
    """Blocks via DFS lowpoints; disconnected input gives per-component
    blocks.  Edge sets of the blocks partition the edge set."""
    adj = {v: g.neighbors(v) for v in range(1, g.n + 1)}
    num: dict[int, int] = {}
    low: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    cut: set[int] = set()
    estack: list[tuple[int, int]] = []
    blocks: list[frozenset[tuple[int, int]]] = []
    clock = itertools.count(1)

    for root in range(1, g.n + 1):
        if root in num:
            continue
        parent[root] = None
        num[root] = low[root] = next(clock)
        root_children = 0
        todo: list[tuple[int, Iterator[int]]] = [(root, iter(adj[root]))]
        while todo:
            v, it = todo[-1]
            progressed = False
            for w in it:
                if w not in num:
                    estack.append((min(v, w), max(v, w)))
                    parent[w] = v
                    num[w] = low[w] = next(clock)
                    if v == root:
                        root_children += 1
                    todo.append((w, iter(adj[w])))
                    progressed = True
                    break
                if w != parent[v] and num[w] < num[v]:
                    estack.append((min(v, w), max(v, w)))
                    low[v] = min(low[v], num[w])
            if progressed:
                continue
            todo.pop()
            if not todo:
                continue
            u = todo[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= num[u]:
                blk = set()
                target = (min(u, v), max(u, v))
                while estack:
                    e = estack.pop()
                    blk.add(e)
                    if e == target:
                        break
                if blk:
                    blocks.append(frozenset(blk))
                if u != root:
                    cut.add(u)
        if root_children > 1:
            cut.add(root)

    block_data = [
        (frozenset(v for e in blk for v in e), blk) for blk in blocks
    ]
    covered = {v for vs, _ in block_data for v in vs}
    for v in range(1, g.n + 1):
        if v not in covered:
            block_data.append((frozenset([v]), frozenset()))
    incidence = tuple(
        (i, v) for i, (vs, _) in enumerate(block_data) for v in sorted(vs & cut)
    )
    return BlockTree(tuple(block_data), frozenset(cut), incidence)


# ----------------------------------------------------------------------
# Tutte decomposition of 2-connected graphs


@dataclass(frozen=True)
class TriComponent:
    kind: str  # "3-connected" | "polygon" | "bond"
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int | None], ...]  # (u, v, virtual id/None)


def _classify(vertices: Sequence[int], edges: Sequence[tuple[int, int, int | None]]) -> str:
    if len(vertices) == 2:
        return "bond"
    degrees = {v: 0 for v in vertices}
    pairs: set[frozenset[int]] = set()
    simple = True
    for u, v, _ in edges:
        degrees[u] += 1
        degrees[v] += 1
        if frozenset((u, v)) in pairs:
            simple = False
        pairs.add(frozenset((u, v)))
    if simple and all(d == 2 for d in degrees.values()):
        return "polygon"
    return "3-connected"


def _separation_classes(
    vertices: set[int], edges: list[tuple[int, int, int | None]]
) -> tuple[int, int, list[list[tuple[int, int, int | None]]]] | None:
    """A separation pair {a,b} with its edge classes, or None.

    Classes: the edges of each component of G-{a,b} (with attachments) plus
    each direct a-b edge on its own.  {a,b} separates when there are >= 3
    classes, or exactly two classes each holding >= 2 edges.
    """
    if len(vertices) <= 2:
        return None
    for a, b in itertools.combinations(sorted(vertices), 2):
        direct = [e for e in edges if {e[0], e[1]} == {a, b}]
        rest_edges = [e for e in edges if not ({e[0], e[1]} <= {a, b})]
        rest_vertices = vertices - {a, b}
        adj: dict[int, set[int]] = {v: set() for v in rest_vertices}
        for u, v, _ in rest_edges:
            if u in adj and v in adj:
                adj[u].add(v)
                adj[v].add(u)
        comp: dict[int, int] = {}
        cid = 0
        for s in sorted(rest_vertices):
            if s in comp:
                continue
            comp[s] = cid
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp[y] = cid
                        stack.append(y)
            cid += 1
        classes: list[list[tuple[int, int, int | None]]] = [[] for _ in range(cid)]
        for e in rest_edges:
            c = comp.get(e[0], comp.get(e[1]))
            classes[c].append(e)
        classes.extend([e] for e in direct)
        if len(classes) >= 3 or (
            len(classes) == 2 and all(len(c) >= 2 for c in classes)
        ):
            return a, b, classes
    return None


def three_connected_components(g: LabelledGraph) -> list[TriComponent]:
    """Tutte decomposition of a 2-connected graph into 3-connected
    components, polygons and bonds, glued along virtual edges.

    Splits recursively at separation pairs (a k-way split adds a hub bond of
    k virtual edges), then merges adjacent pieces of equal kind so the
    decomposition is canonical.  ``recompose`` is its inverse.
    """
    if g.n == 2 and g.m() == 1:
        return [TriComponent("bond", (1, 2), ((1, 2, None),))]
    if not is_k_connected(g, 2):
        raise GraphError("three_connected_components needs a 2-connected graph")
    next_vid = [1]
    work: list[list[tuple[int, int, int | None]]] = [
        [(a, b, None) for a, b in sorted(g.edges)]
    ]
    leaves: list[list[tuple[int, int, int | None]]] = []
    while work:
        edges = work.pop()
        vertices = {v for e in edges for v in e[:2]}
        found = _separation_classes(vertices, edges)
        if found is None:
            leaves.append(edges)
            continue
        a, b, classes = found
        if len(classes) == 2:
            vid = next_vid[0]
            next_vid[0] += 1
            for cls in classes:
                work.append(cls + [(a, b, vid)])
        else:
            hub: list[tuple[int, int, int | None]] = []
            for cls in classes:
                vid = next_vid[0]
                next_vid[0] += 1
                work.append(cls + [(a, b, vid)])
                hub.append((a, b, vid))
            leaves.append(hub)  # 2-vertex bond: never split further
    comps = []
    for es in leaves:
        vs = tuple(sorted({v for e in es for v in e[:2]}))
        comps.append(
            TriComponent(
                _classify(vs, es),
                vs,
                tuple(sorted(es, key=lambda e: (e[0], e[1], e[2] is not None, e[2] or 0))),
            )
        )
    comps = _merge_same_kind(comps)
    return sorted(comps, key=lambda c: (c.kind, c.vertices, c.edges))


def _merge_same_kind(comps: list[TriComponent]) -> list[TriComponent]:
    changed = True
    while changed:
        changed = False
        by_vid: dict[int, list[int]] = {}
        for i, c in enumerate(comps):
            for _, _, vid in c.edges:
                if vid is not None:
                    by_vid.setdefault(vid, []).append(i)
        for vid, holders in sorted(by_vid.items()):
            if len(holders) != 2 or holders[0] == holders[1]:
                continue
            i, j = holders
            a, b = comps[i], comps[j]
            if a.kind != b.kind or a.kind == "3-connected":
                continue
            merged = [e for e in a.edges if e[2] != vid] + [
                e for e in b.edges if e[2] != vid
            ]
            vs = tuple(sorted({v for e in merged for v in e[:2]}))
            kind = _classify(vs, merged)
            if kind != a.kind:
                continue
            new = TriComponent(
                kind,
                vs,
                tuple(sorted(merged, key=lambda e: (e[0], e[1], e[2] is not None, e[2] or 0))),
            )
            comps = [c for k, c in enumerate(comps) if k not in (i, j)] + [new]
            changed = True
            break
    return comps


def recompose(comps: Sequence[TriComponent]) -> LabelledGraph:
    """Union of the real edges of all components (virtual edges cancel)."""
    real: set[tuple[int, int]] = set()
    vs: set[int] = set()
    for c in comps:
        vs.update(c.vertices)
        for u, v, vid in c.edges:
            if vid is None:
                real.add((min(u, v), max(u, v)))
    return LabelledGraph.from_edges(max(vs), real)


# ----------------------------------------------------------------------
# genus oracle: rotation-system branch and bound


def _has_triangle(g: LabelledGraph) -> bool:
    adj = {v: set(g.neighbors(v)) for v in range(1, g.n + 1)}
    return any(adj[a] & adj[b] for a, b in g.edges)


def _euler_lower_bound_kappa(g: LabelledGraph) -> int:
    """Lower bound on the Euler genus of a connected simple graph.

    Faces have degree >= 3 (>= 4 for triangle-free graphs), so
    kappa >= 2 - V + E - 2E/3 (resp. E/2)."""
    v, e = g.n, g.m()
    if e < 3:
        return 0
    max_faces = (2 * e) // 3 if _has_triangle(g) else e // 2
    return max(0, 2 - v + e - max_faces)


class _PartialFaces:
    """Incrementally maintained partial face permutation with undo.

    Chains of phi-links are tracked by their endpoints; the final face count
    is bounded above by closed cycles + open chains.
    """

    __slots__ = ("nxt", "prv", "chain_head", "chain_tail", "closed", "paths")

    def __init__(self, n_darts: int):
        self.nxt = [0] * (n_darts + 1)
        self.prv = [0] * (n_darts + 1)
        self.chain_head = list(range(n_darts + 1))  # indexed by chain tail
        self.chain_tail = list(range(n_darts + 1))  # indexed by chain head
        self.closed = 0
        self.paths = n_darts

    def link(self, d: int, e: int) -> tuple:
        head_a = self.chain_head[d]
        tail_b = self.chain_tail[e]
        self.nxt[d] = e
        self.prv[e] = d
        if head_a == e:
            self.closed += 1
            self.paths -= 1
            return (d, e, True, 0, 0)
        self.paths -= 1
        self.chain_head[tail_b] = head_a
        self.chain_tail[head_a] = tail_b
        return (d, e, False, head_a, tail_b)

    def unlink(self, entry: tuple) -> None:
        d, e, was_cycle, head_a, tail_b = entry
        self.nxt[d] = 0
        self.prv[e] = 0
        if was_cycle:
            self.closed -= 1
            self.paths += 1
        else:
            self.paths += 1
            self.chain_head[tail_b] = e
            self.chain_tail[head_a] = d

    def bound(self) -> int:
        return self.closed + self.paths


class _Darts:
    """Dart infrastructure of a simple graph: edge i has darts 2i+1 and
    2i+2 at its two endpoints."""

    def __init__(self, g: LabelledGraph):
        self.g = g
        self.edge_list = sorted(g.edges)
        self.n_darts = 2 * len(self.edge_list)
        self.alpha = [0] * (self.n_darts + 1)
        self.darts_at: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
        for i, (u, v) in enumerate(self.edge_list):
            d1, d2 = 2 * i + 1, 2 * i + 2
            self.alpha[d1] = d2
            self.alpha[d2] = d1
            self.darts_at[u].append(d1)
            self.darts_at[v].append(d2)


def _min_genus_connected(g: LabelledGraph, budget: int | None) -> int:
    """Branch-and-bound minimum genus of a connected simple graph."""
    v, e = g.n, g.m()
    if e <= 8:
        return 0  # simple non-planar graphs need at least 9 edges
    darts = _Darts(g)
    alpha = darts.alpha
    order = sorted(range(1, v + 1), key=lambda x: -len(darts.darts_at[x]))
    lb_kappa = _euler_lower_bound_kappa(g)
    lb = (lb_kappa + 1) // 2
    faces = _PartialFaces(darts.n_darts)
    best = [e]  # any genus is < E
    steps = [0]

    def assign(idx: int) -> None:
        if best[0] <= lb:
            return
        if idx == len(order):
            f = faces.closed
            kappa = 2 - v + e - f
            if kappa % 2:
                raise GraphError("internal error: odd kappa from rotations")
            best[0] = min(best[0], kappa // 2)
            return
        vv = order[idx]
        dv = darts.darts_at[vv]
        if len(dv) == 1:
            entry = faces.link(alpha[dv[0]], dv[0])
            assign(idx + 1)
            faces.unlink(entry)
            return
        first = dv[0]
        for perm in itertools.permutations(dv[1:]):
            steps[0] += 1
            if budget is not None and steps[0] > budget:
                hi = best[0] if best[0] < e else None
                raise BudgetExceededError("genus search budget exceeded", lb, hi)
            cyc = (first,) + perm
            trail = []
            for i, d in enumerate(cyc):
                trail.append(faces.link(alpha[d], cyc[(i + 1) % len(cyc)]))
            kappa_min = 2 - v + e - faces.bound()
            if (kappa_min + 1) // 2 < best[0]:
                assign(idx + 1)
            for entry in reversed(trail):
                faces.unlink(entry)
            if best[0] <= lb:
                return

    assign(0)
    return best[0]


def genus_whole(g: LabelledGraph, budget: int | None = 10_000_000) -> int:
    """Minimum genus by direct rotation search (no block split); reference
    implementation for the additivity check."""
    comps = components(g)
    return sum(_min_genus_connected(g.subgraph(c), budget) for c in comps)


def genus(g: LabelledGraph, budget: int | None = 10_000_000) -> int:
    """Minimum orientable genus: the sum of the genera of the blocks."""
    total = 0
    tree = block_decomposition(g)
    for vs, es in tree.blocks:
        if len(es) <= 8:
            continue  # small simple blocks are planar
        block = LabelledGraph.from_edges(len(vs), _relabel_edges(vs, es))
        total += _min_genus_connected(block, budget)
    return total


def _relabel_edges(vs: frozenset[int], es: frozenset[tuple[int, int]]):
    index = {v: i + 1 for i, v in enumerate(sorted(vs))}
    return [(index[a], index[b]) for a, b in es]


def embeddings(g: LabelledGraph, budget: int | None = None) -> Iterator[mp.CombMap]:
    """All rotation systems of a connected graph as combinatorial maps."""
    if not is_connected(g):
        raise GraphError("embeddings need a connected graph")
    if g.m() == 0:
        yield mp.vertex_map()
        return
    darts = _Darts(g)
    order = sorted(range(1, g.n + 1), key=lambda x: -len(darts.darts_at[x]))
    sigma = [0] * (darts.n_darts + 1)
    steps = [0]

    def assign(idx: int) -> Iterator[mp.CombMap]:
        if idx == len(order):
            yield mp.CombMap(sigma[1:], darts.alpha[1:])
            return
        dv = darts.darts_at[order[idx]]
        if len(dv) == 1:
            sigma[dv[0]] = dv[0]
            yield from assign(idx + 1)
            return
        first = dv[0]
        for perm in itertools.permutations(dv[1:]):
            steps[0] += 1
            if budget is not None and steps[0] > budget:
                raise BudgetExceededError("embedding budget exceeded", 0, None)
            cyc = (first,) + perm
            for i, d in enumerate(cyc):
                sigma[d] = cyc[(i + 1) % len(cyc)]
            yield from assign(idx + 1)

    yield from assign(0)


def _signed_schemes(
    g: LabelledGraph, budget: int | None, nonorientable_only: bool
) -> Iterator[mp.CombMap]:
    """Rotation systems with tree-normalized edge signs (tree edges +1)."""
    if not is_connected(g):
        raise GraphError("scheme search needs a connected graph")
    darts = _Darts(g)
    # BFS spanning tree
    tree: set[int] = set()
    seen = {1}
    queue = [1]
    while queue:
        v = queue.pop(0)
        for i, (a, b) in enumerate(darts.edge_list):
            if v in (a, b):
                w = b if a == v else a
                if w not in seen:
                    seen.add(w)
                    tree.add(i)
                    queue.append(w)
    cotree = [i for i in range(len(darts.edge_list)) if i not in tree]
    count = [0]
    for emb in embeddings(g, budget=None):
        for mask in range(1, 1 << len(cotree)) if nonorientable_only else range(
            1 << len(cotree)
        ):
            count[0] += 1
            if budget is not None and count[0] > budget:
                raise BudgetExceededError("scheme budget exceeded", 0, None)
            signs = {}
            for i in range(len(darts.edge_list)):
                signs[2 * i + 1] = 1
            for j, i in enumerate(cotree):
                if mask >> j & 1:
                    signs[2 * i + 1] = -1
            yield mp.CombMap(emb.sigma[1:], emb.alpha[1:], signs)


def nonorientable_genus(g: LabelledGraph, budget: int | None = 2_000_000) -> int:
    """Smallest h such that g embeds in the non-orientable surface N_h.

    Cellular non-orientable embeddings are searched directly (signed
    schemes); a minimal embedding can also be non-cellular, in which case it
    comes from adding a crosscap to a minimal orientable embedding, giving
    the competing value 2*genus + 1."""
    comps = components(g)
    if len(comps) > 1:
        raise GraphError("nonorientable genus implemented for connected graphs")
    upper = 2 * genus(g, budget) + 1
    lb = max(1, _euler_lower_bound_kappa(g))
    if lb >= upper:
        return upper
    best = upper
    examined = 0
    for scheme in _signed_schemes(g, None, nonorientable_only=True):
        examined += 1
        if budget is not None and examined > budget:
            raise BudgetExceededError("nonorientable search budget", lb, best)
        kappa = mp.euler_genus(scheme)
        best = min(best, kappa)
        if best == lb:
            return best
    return best


def euler_genus_graph(g: LabelledGraph, budget: int | None = 2_000_000) -> int:
    """Minimum Euler genus over all surfaces: min(2*genus, nonorientable)."""
    comps = components(g)
    if len(comps) > 1:
        return sum(euler_genus_graph(g.subgraph(c), budget) for c in comps)
    two_g = 2 * genus(g, budget)
    if two_g == 0:
        return 0
    return min(two_g, nonorientable_genus(g, budget))


def face_width_graph(
    g: LabelledGraph, at_genus: int | None = None, budget: int | None = 200_000
) -> float | int:
    """Maximum face-width over minimum-genus embeddings; +inf for planar."""
    comps = components(g)
    if len(comps) > 1:
        vals = [face_width_graph(g.subgraph(c), None, budget) for c in comps]
        return min(vals)  # convention: disconnected = min over components
    gmin = genus(g, budget=budget) if at_genus is None else at_genus
    if gmin == 0:
        return mp.INFINITY
    best = 0
    examined = 0
    for emb in embeddings(g):
        examined += 1
        if budget is not None and examined > budget:
            raise BudgetExceededError("face-width budget exceeded", best, None)
        if mp.euler_genus(emb) != 2 * gmin:
            continue
        fw = mp.face_width(emb)
        if fw is mp.INFINITY:
            continue
        best = max(best, fw)
    if best == 0:
        raise GraphError("no embedding at the requested genus")
    return best


# ----------------------------------------------------------------------
# chromatic number


def chromatic_number(g: LabelledGraph) -> int:
    """Exact chromatic number by branch and bound (intended for n <= 12)."""
    if g.n > 12:
        raise GraphError("chromatic_number supports n <= 12")
    if g.n == 0:
        return 0
    if not g.edges:
        return 1
    order = sorted(range(1, g.n + 1), key=lambda v: -g.degree(v))
    adj = {v: set(g.neighbors(v)) for v in range(1, g.n + 1)}
    # greedy upper bound
    color: dict[int, int] = {}
    for v in order:
        used = {color[w] for w in adj[v] if w in color}
        c = 1
        while c in used:
            c += 1
        color[v] = c
    ub = max(color.values())
    lb = 2 if g.edges else 1

    def feasible(k: int) -> bool:
        assignment: dict[int, int] = {}

        def bt(i: int) -> bool:
            if i == len(order):
                return True
            v = order[i]
            used = {assignment[w] for w in adj[v] if w in assignment}
            tried = 0
            for c in range(1, k + 1):
                if c in used:
                    continue
                tried += 1
                assignment[v] = c
                if bt(i + 1):
                    return True
                del assignment[v]
                if c > max(assignment.values(), default=0):
                    break  # first use of a fresh color: symmetry cut
            return False

        return bt(0)

    k = ub
    while k > lb and feasible(k - 1):
        k -= 1
    if k == lb and lb < ub and not feasible(lb):
        k = lb + 1
    return k


# ----------------------------------------------------------------------
# independent planarity + encodings


def is_planar_independent(g: LabelledGraph) -> bool:
    """Planarity via networkx (left-right algorithm); the cross-check
    oracle against the rotation-system route."""
    ok, _ = nx.check_planarity(g.to_networkx())
    return ok


def to_graph6(g: LabelledGraph) -> str:
    """Standard 6-bit ASCII encoding of small simple graphs."""
    if g.n > 62:
        raise GraphError("graph6 support limited to n <= 62")
    bits = []
    for j in range(2, g.n + 1):
        for i in range(1, j):
            bits.append(1 if (i, j) in g.edges else 0)
    while len(bits) % 6:
        bits.append(0)
    chars = [chr(g.n + 63)]
    for i in range(0, len(bits), 6):
        val = 0
        for b in bits[i : i + 6]:
            val = val << 1 | b
        chars.append(chr(val + 63))
    return "".join(chars)


def from_graph6(text: str) -> LabelledGraph:
    text = text.strip()
    n = ord(text[0]) - 63
    bits = []
    for ch in text[1:]:
        val = ord(ch) - 63
        bits.extend((val >> (5 - i)) & 1 for i in range(6))
    edges = []
    k = 0
    for j in range(2, n + 1):
        for i in range(1, j):
            if k < len(bits) and bits[k]:
                edges.append((i, j))
            k += 1
    return LabelledGraph.from_edges(n, edges)


# ----------------------------------------------------------------------
# canonical labelling (for isomorphism-class caching)


def _refinement_classes(g: LabelledGraph) -> list[list[int]]:
    """Vertex classes by iterated degree signatures, ordered canonically."""
    sig = {v: (g.degree(v),) for v in range(1, g.n + 1)}
    for _ in range(3):
        new_sig = {
            v: sig[v] + (tuple(sorted(sig[w] for w in g.neighbors(v))),)
            for v in range(1, g.n + 1)
        }
        if len(set(new_sig.values())) == len(set(sig.values())):
            sig = new_sig
            break
        sig = new_sig
    classes: dict[tuple, list[int]] = {}
    for v in range(1, g.n + 1):
        classes.setdefault(sig[v], []).append(v)
    return [classes[k] for k in sorted(classes)]


def _class_respecting_perms(classes: list[list[int]]) -> Iterator[dict[int, int]]:
    slots = []
    pos = 1
    for cls in classes:
        slots.append((cls, list(range(pos, pos + len(cls)))))
        pos += len(cls)
    for combo in itertools.product(
        *(itertools.permutations(cls) for cls, _ in slots)
    ):
        perm = {}
        for (cls, targets), arrangement in zip(slots, combo):
            for v, t in zip(arrangement, targets):
                perm[v] = t
        yield perm


def _edge_mask(n: int, edges: Iterable[tuple[int, int]]) -> int:
    mask = 0
    k = 0
    lookup = {}
    for j in range(2, n + 1):
        for i in range(1, j):
            lookup[(i, j)] = k
            k += 1
    for a, b in edges:
        mask |= 1 << lookup[(min(a, b), max(a, b))]
    return mask


def canonical_key(g: LabelledGraph) -> tuple[int, int]:
    """Isomorphism-invariant key: (n, minimal relabelled edge bitmask)."""
    best = None
    for perm in _class_respecting_perms(_refinement_classes(g)):
        mask = _edge_mask(g.n, ((perm[a], perm[b]) for a, b in g.edges))
        if best is None or mask < best:
            best = mask
    return (g.n, best if best is not None else 0)


def automorphism_count(g: LabelledGraph) -> int:
    """|Aut(g)|: permutations fixing each refinement class setwise and
    preserving the edge set."""
    base = _edge_mask(g.n, g.edges)
    count = 0
    classes = _refinement_classes(g)
    for combo in itertools.product(
        *(itertools.permutations(cls) for cls in classes)
    ):
        perm = {}
        for cls, arrangement in zip(classes, combo):
            for v, t in zip(cls, arrangement):
                perm[v] = t
        if _edge_mask(g.n, ((perm[a], perm[b]) for a, b in g.edges)) == base:
            count += 1
    return count
