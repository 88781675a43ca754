"""Single-edge bottlenecks, their meeting points, and small min-cuts.

A bottleneck between edges e and e' is an edge whose removal disconnects
every directed path from e to e' (e and e' themselves always qualify when a
path exists).  The set of bottlenecks is computed with one frontier sweep in
topological order over the edges that lie on some e-to-e' path: the frontier
is a running edge cut, and whenever it narrows to a single edge that edge is
a bottleneck.  With h the maximum in-degree this is O(h |E|) per query.

Two derived edges drive the coupling checks for sessions (i, j, k):

* alpha(i, j, k): the topologically last bottleneck shared by the paths
  from sender edge sigma_i to both receiver edges tau_j and tau_k.
* beta(i, j, k): the topologically first bottleneck shared by sigma_j-to-
  tau_k paths and alpha-to-tau_k paths.

`min_cut` answers the two-sender/two-receiver cut queries by maximum flow
with every edge given unit capacity (edges are split into an entry and exit
vertex joined by a unit arc); augmenting paths are found with breadth-first
search, and the answer is at most the number of sources, so the search
terminates after a handful of passes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .dag import Scenario


class DisconnectedError(ValueError):
    """A coupling query needs a sender-to-receiver path that does not exist."""


@dataclass
class BottleneckSet:
    src: int
    dst: int
    members: List[int]  # in topological order; empty when no path exists

    def __contains__(self, eid: int) -> bool:
        return eid in self.members


@dataclass
class AlphaBeta:
    i: int
    j: int
    k: int
    alpha: int
    beta: int


def bottleneck_set(sc: Scenario, src: int, dst: int,
                   cache: dict | None = None) -> BottleneckSet:
    """All single-edge bottlenecks between src and dst, topologically sorted."""
    if cache is not None:
        hit = cache.get((src, dst))
        if hit is not None:
            return hit
        result = bottleneck_set(sc, src, dst)
        cache[(src, dst)] = result
        return result
    if src == dst:
        return BottleneckSet(src, dst, [src])
    forward = sc.reachable_edges(src, forward=True)
    if dst not in forward:
        return BottleneckSet(src, dst, [])
    useful = forward & sc.reachable_edges(dst, forward=False)
    members = [src]
    frontier = {src}
    pos = sc.topo_pos
    for eid in sorted(useful, key=pos.__getitem__):
        frontier.discard(eid)
        for nxt in sc.next_edges(eid):
            if nxt in useful:
                frontier.add(nxt)
        if len(frontier) == 1:
            members.extend(frontier)
    return BottleneckSet(src, dst, members)


def _require_path(sc: Scenario, src: int, dst: int) -> None:
    if not sc.connects(src, dst):
        raise DisconnectedError(f"no path from edge {src} to edge {dst}")


def alpha_beta(sc: Scenario, i: int, j: int, k: int,
               cache: dict | None = None) -> AlphaBeta:
    """The shared-bottleneck meeting edges for the session triple (i, j, k)."""
    pos = sc.topo_pos
    alpha = alpha_edge(sc, i, j, k, cache)
    _require_path(sc, sc.sigma(j), sc.tau(k))
    c_jk = bottleneck_set(sc, sc.sigma(j), sc.tau(k), cache)
    c_ak = bottleneck_set(sc, alpha, sc.tau(k), cache)
    meet = set(c_jk.members) & set(c_ak.members)
    if not meet:
        raise DisconnectedError(
            f"no common bottleneck toward receiver {k} for sessions ({i},{j},{k})")
    beta = min(meet, key=pos.__getitem__)
    return AlphaBeta(i, j, k, alpha, beta)


def alpha_edge(sc: Scenario, i: int, j: int, k: int,
               cache: dict | None = None) -> int:
    """Topologically last common bottleneck from sigma_i to tau_j and tau_k."""
    _require_path(sc, sc.sigma(i), sc.tau(j))
    _require_path(sc, sc.sigma(i), sc.tau(k))
    c_ij = bottleneck_set(sc, sc.sigma(i), sc.tau(j), cache)
    c_ik = bottleneck_set(sc, sc.sigma(i), sc.tau(k), cache)
    common = set(c_ij.members) & set(c_ik.members)
    # sigma_i belongs to both sets, so the intersection cannot be empty.
    return max(common, key=sc.topo_pos.__getitem__)


def parallel(sc: Scenario, e1: int, e2: int) -> bool:
    """True when neither edge can reach the other."""
    if e1 == e2:
        raise ValueError("parallelism is defined for distinct edges")
    return not sc.connects(e1, e2) and not sc.connects(e2, e1)


_INF = 1 << 30


def min_cut(sc: Scenario, sources: Iterable[int], sinks: Iterable[int]) -> int:
    """Minimum number of edges whose removal separates sources from sinks.

    Computed as max flow with unit edge capacities: each edge becomes an
    entry vertex wired to an exit vertex by a unit arc, adjacency arcs are
    uncapacitated, and a super source/sink feed the given edges.
    """
    sources = list(sources)
    sinks = list(sinks)
    cap: Dict[object, Dict[object, int]] = {}

    def arc(u, v, c):
        cap.setdefault(u, {})[v] = cap.setdefault(u, {}).get(v, 0) + c
        cap.setdefault(v, {}).setdefault(u, 0)

    for e in sc.edges:
        arc(("i", e.id), ("o", e.id), 1)
        for nxt in sc.next_edges(e.id):
            arc(("o", e.id), ("i", nxt), _INF)
    for s in sources:
        arc("S", ("i", s), 1)
    for t in sinks:
        arc(("o", t), "T", 1)
    if "S" not in cap or "T" not in cap:
        return 0

    flow = 0
    while True:
        parent: Dict[object, object] = {"S": "S"}
        queue = deque(["S"])
        while queue and "T" not in parent:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if "T" not in parent:
            return flow
        bottleneck = _INF
        v = "T"
        while v != "S":
            u = parent[v]
            bottleneck = min(bottleneck, cap[u][v])
            v = u
        v = "T"
        while v != "S":
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
            v = u
        flow += bottleneck


def cut_by_pair(sc: Scenario, sessions_src: Tuple[int, int],
                sessions_dst: Tuple[int, int]) -> int:
    """min_cut between two sessions' sender edges and two receiver edges."""
    a, b = sessions_src
    c, d = sessions_dst
    return min_cut(sc, (sc.sigma(a), sc.sigma(b)), (sc.tau(c), sc.tau(d)))
