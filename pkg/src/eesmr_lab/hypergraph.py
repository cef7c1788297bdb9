"""Directed hypergraph (k-cast) topologies and fault-tolerance certification.

A hyperedge (s, R) means one radio transmission by s is heard by every node
in R. Fault tolerance hinges on two things: hyperedge redundancy (a node must
not pay for edges whose receiver unions coincide) and connectivity of the
correct-node subgraph after any f removals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations


def _mask_to_set(mask: int) -> frozenset[int]:
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


class Hypergraph:
    def __init__(self, n: int, edges: list[tuple[int, frozenset[int] | set[int]]]):
        if n < 1 or n > 64:
            raise ValueError("node count must be in 1..64")
        self.n = n
        self.edges: list[tuple[int, frozenset[int]]] = []
        self._edge_masks: list[tuple[int, int]] = []
        self.out_edges: list[list[int]] = [[] for _ in range(n)]
        for idx, (sender, receivers) in enumerate(edges):
            rset = frozenset(receivers)
            if not 0 <= sender < n:
                raise ValueError(f"edge {idx}: sender {sender} out of range")
            if sender in rset:
                raise ValueError(f"edge {idx}: self-loop at node {sender}")
            if not rset:
                raise ValueError(f"edge {idx}: empty receiver set")
            if any(not 0 <= r < n for r in rset):
                raise ValueError(f"edge {idx}: receiver out of range")
            mask = 0
            for r in rset:
                mask |= 1 << r
            self.edges.append((sender, rset))
            self._edge_masks.append((sender, mask))
            self.out_edges[sender].append(idx)
        self._reach_cache: dict[frozenset[int], list[tuple[tuple[int, ...], frozenset[int], tuple[int, ...]]]] = {}

    # ---------------------------------------------------------------- degrees

    def out_neighbors(self, node: int) -> frozenset[int]:
        acc = 0
        for e in self.out_edges[node]:
            acc |= self._edge_masks[e][1]
        return _mask_to_set(acc)

    def in_neighbors(self, node: int) -> frozenset[int]:
        bit = 1 << node
        return frozenset(s for s, mask in self._edge_masks if mask & bit)

    def in_edge_count(self, node: int) -> int:
        bit = 1 << node
        return sum(1 for _, mask in self._edge_masks if mask & bit)

    def max_kcast_width(self) -> int:
        return max((len(r) for _, r in self.edges), default=0)

    # ---------------------------------------------------------------- physics

    def covers_all(self, node: int) -> bool:
        """True when one batch from `node` already reaches every other node."""
        return len(self.out_neighbors(node)) == self.n - 1

    def flood_profile(self, origin: int, corrupt: frozenset[int]):
        """Who transmits, who is reached, and per-node reception counts for one
        flood started by `origin` when only correct nodes relay.

        Returns (transmitters, reached, rx_counts). The origin always
        transmits (it is the sender); corrupt nodes never forward. When the
        origin's own batch covers every node, no relays are scheduled at the
        network layer (direct-send mode).
        """
        cached = self._reach_cache.get(corrupt)
        if cached is not None and cached[origin] is not None:
            return cached[origin]
        if cached is None:
            cached = [None] * self.n  # type: ignore[list-item]
            self._reach_cache[corrupt] = cached  # type: ignore[assignment]

        transmitters = [origin]
        reached_mask = 0
        if self.covers_all(origin):
            for _, mask in (self._edge_masks[e] for e in self.out_edges[origin]):
                reached_mask |= mask
        else:
            seen = 1 << origin
            frontier = [origin]
            while frontier:
                nxt = []
                for x in frontier:
                    for e in self.out_edges[x]:
                        mask = self._edge_masks[e][1]
                        reached_mask |= mask
                        new = mask & ~seen
                        seen |= mask
                        while new:
                            low = new & -new
                            r = low.bit_length() - 1
                            new ^= low
                            if r not in corrupt:
                                nxt.append(r)
                                transmitters.append(r)
                frontier = nxt
        rx = [0] * self.n
        for x in transmitters:
            for e in self.out_edges[x]:
                mask = self._edge_masks[e][1]
                while mask:
                    low = mask & -mask
                    rx[low.bit_length() - 1] += 1
                    mask ^= low
        result = (tuple(transmitters), _mask_to_set(reached_mask), tuple(rx))
        cached[origin] = result  # type: ignore[index]
        return result


@dataclass
class DegreeProfile:
    dout: int  # min distinct out-neighbors over nodes
    din: int   # min distinct in-neighbors over nodes
    Dout: int  # min out-edge count over nodes
    Din: int   # min in-edge count over nodes


def degree_profile(graph: Hypergraph) -> DegreeProfile:
    douts = [len(graph.out_neighbors(i)) for i in range(graph.n)]
    dins = [len(graph.in_neighbors(i)) for i in range(graph.n)]
    Douts = [len(graph.out_edges[i]) for i in range(graph.n)]
    Dins = [graph.in_edge_count(i) for i in range(graph.n)]
    return DegreeProfile(min(douts), min(dins), min(Douts), min(Dins))


def validate_independence(graph: Hypergraph, max_edges_per_node: int = 16):
    """Find a node whose out-edges are redundant.

    Two distinct sub-collections of one node's out-edges with the same
    receiver union mean the node could drop an edge without losing coverage;
    such a topology wastes transmissions and breaks the degree-count bounds.
    Returns (True, None) or (False, (node, subset_a, subset_b)) with subsets
    given as edge-index tuples.
    """
    for node in range(graph.n):
        eidx = graph.out_edges[node]
        if len(eidx) > max_edges_per_node:
            raise ValueError(f"node {node} has {len(eidx)} out-edges; exhaustive check capped at {max_edges_per_node}")
        seen: dict[int, int] = {}
        for subset in range(1, 1 << len(eidx)):
            union = 0
            s = subset
            while s:
                low = s & -s
                union |= graph._edge_masks[eidx[low.bit_length() - 1]][1]
                s ^= low
            if union in seen:
                a = tuple(eidx[i] for i in range(len(eidx)) if seen[union] >> i & 1)
                b = tuple(eidx[i] for i in range(len(eidx)) if subset >> i & 1)
                return False, (node, a, b)
            seen[union] = subset
    return True, None


def necessary_condition(graph: Hypergraph) -> dict:
    """Upper bounds on tolerable f implied by degree counting.

    The tight bound uses distinct-neighbor degrees (a node with d out-neighbors
    can be silenced toward the rest by corrupting them all, so f <= d-1); the
    coarser bound converts edge counts through the k-cast width.
    """
    prof = degree_profile(graph)
    k = graph.max_kcast_width()
    return {
        "f_nec": min(prof.dout, prof.din) - 1,
        "f_nec_edge_bound": k * min(prof.Dout, prof.Din) - 1,
        "profile": prof,
    }


def _strongly_connected(n: int, alive: list[int], adj: dict[int, list[int]]) -> bool:
    if len(alive) <= 1:
        return True
    start = alive[0]
    alive_set = set(alive)

    def bfs(adjacency):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adjacency.get(x, ()):
                if y in alive_set and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    radj: dict[int, list[int]] = {}
    for x, ys in adj.items():
        for y in ys:
            radj.setdefault(y, []).append(x)
    return alive_set <= bfs(adj) and alive_set <= bfs(radj)


def certify_f_connectivity(graph: Hypergraph, f: int):
    """Exhaustively verify that removing any f nodes leaves the survivors
    strongly connected (deleted senders lose their edges; receiver sets are
    intersected with survivors; emptied edges vanish).

    Returns (True, None) or (False, witness_cut). Exhaustive up to n = 15.
    """
    if graph.n > 15:
        raise ValueError("exhaustive certification is limited to n <= 15")
    if f < 0 or f >= graph.n:
        raise ValueError("f must be in 0..n-1")
    nodes = range(graph.n)
    for cut in combinations(nodes, f):
        removed = set(cut)
        alive = [x for x in nodes if x not in removed]
        adj: dict[int, list[int]] = {}
        for sender, receivers in graph.edges:
            if sender in removed:
                continue
            kept = receivers - removed
            if kept:
                adj.setdefault(sender, []).extend(kept)
        if not _strongly_connected(graph.n, alive, adj):
            return False, tuple(cut)
    return True, None


def generate_topology(kind: str, n: int, k: int | None = None, seed: int = 0,
                      edges: list | None = None) -> Hypergraph:
    """Build one of the stock topologies.

    ring: node i k-casts to the next k nodes (one out-edge per node).
    complete: unicast edges to every other node (direct-send mode).
    random: seeded arbitrary hypergraph, mainly for oracle cross-checks.
    explicit: edges supplied by the caller.
    """
    if kind == "ring":
        if not k or k < 1 or k >= n:
            raise ValueError("ring needs 1 <= k < n")
        return Hypergraph(n, [(i, frozenset((i + j) % n for j in range(1, k + 1))) for i in range(n)])
    if kind == "complete":
        out = []
        for i in range(n):
            out.extend((i, frozenset({j})) for j in range(n) if j != i)
        return Hypergraph(n, out)
    if kind == "random":
        rng = random.Random(seed)
        width = k or max(1, n // 2)
        built: list[tuple[int, frozenset[int]]] = []
        for i in range(n):
            others = [j for j in range(n) if j != i]
            for _ in range(rng.randint(1, 2)):
                size = rng.randint(1, min(width, len(others)))
                built.append((i, frozenset(rng.sample(others, size))))
        return Hypergraph(n, built)
    if kind == "explicit":
        if edges is None:
            raise ValueError("explicit topology needs edges")
        return Hypergraph(n, [(s, frozenset(r)) for s, r in edges])
    raise ValueError(f"unknown topology kind: {kind}")
