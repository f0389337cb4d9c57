"""Time-indexed single-item shortest path under vertex and edge constraints.

This is the CBS low level: A* over (vertex, time) states with heuristic
dist(v, goal). An item finishes by settling at its goal, i.e. resting there
through the horizon without violating any later constraint on the goal
vertex. Trailing goal-waits are free, so the path cost equals the settle
time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .graphs import INF

VERTEX = "vertex"
EDGE = "edge"


@dataclass(frozen=True)
class Constraint:
    """Prohibition for one item: a vertex at a time, or a directed edge
    (u, v) departed at time t. Wait actions are edge constraints with u == v."""

    item: int
    kind: str
    t: int
    v: int
    u: int | None = None

    def __post_init__(self):
        if self.kind not in (VERTEX, EDGE):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if (self.kind == EDGE) != (self.u is not None):
            raise ValueError("edge constraints need u, vertex constraints must not set it")
        if self.t < 0:
            raise ValueError("constraint time must be non-negative")


class ConstraintSet:
    """Immutable indexed collection of constraints; duplicates collapse."""

    def __init__(self, constraints=()):
        self._all = frozenset(constraints)
        self._vertex: set[tuple[int, int, int]] = set()
        self._edge: set[tuple[int, int, int, int]] = set()
        for c in self._all:
            if c.kind == VERTEX:
                self._vertex.add((c.item, c.v, c.t))
            else:
                self._edge.add((c.item, c.u, c.v, c.t))

    def __len__(self):
        return len(self._all)

    def __contains__(self, c: Constraint) -> bool:
        return c in self._all

    def __iter__(self):
        return iter(self._all)

    def with_constraint(self, c: Constraint) -> "ConstraintSet":
        return ConstraintSet(self._all | {c})

    def forbids_vertex(self, item: int, v: int, t: int) -> bool:
        return (item, v, t) in self._vertex

    def forbids_edge(self, item: int, u: int, v: int, t: int) -> bool:
        return (item, u, v, t) in self._edge

    def settle_barrier(self, item: int, goal: int) -> int:
        """Earliest time from which the item may rest at its goal forever."""
        barrier = 0
        for i, v, t in self._vertex:
            if i == item and v == goal:
                barrier = max(barrier, t + 1)
        for i, u, v, t in self._edge:
            if i == item and u == goal and v == goal:
                barrier = max(barrier, t + 1)
        return barrier


def constrained_shortest_path(adj, dist, item: int, start: int, goal: int,
                              cs: ConstraintSet, horizon: int):
    """Minimum-settle-time path for one item, or None when no path fits.

    adj: per-vertex neighbor lists (already restricted for token variants).
    dist: DistTable over the same adjacency, used as the A* heuristic.
    Ties break on (smaller time, smaller vertex id) so runs are reproducible.
    """
    h0 = dist(start, goal)
    if h0 >= INF:
        return None
    barrier = cs.settle_barrier(item, goal)
    if cs.forbids_vertex(item, start, 0):
        return None

    open_heap = [(h0, 0, start)]
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    closed: set[tuple[int, int]] = set()
    while open_heap:
        f, t, v = heapq.heappop(open_heap)
        if (v, t) in closed:
            continue
        closed.add((v, t))
        if v == goal and t >= barrier and t <= horizon:
            path = [v]
            node = (v, t)
            while node in parent:
                node = parent[node]
                path.append(node[0])
            path.reverse()
            return path
        if t + 1 > horizon:
            continue
        for w in (v,) + tuple(adj[v]):
            hw = dist(w, goal)
            if hw >= INF or t + 1 + hw > horizon:
                continue
            if (w, t + 1) in closed:
                continue
            if cs.forbids_vertex(item, w, t + 1):
                continue
            if cs.forbids_edge(item, v, w, t):
                continue
            if (w, t + 1) not in parent:
                parent[(w, t + 1)] = (v, t)
                heapq.heappush(open_heap, (t + 1 + hw, t + 1, w))
    return None
