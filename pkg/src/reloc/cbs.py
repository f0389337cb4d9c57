"""Conflict-based search for optimal sum-of-costs relocation.

Two-level search: the low level plans each item independently under a set of
vertex/edge prohibitions; the high level best-first searches over constraint
sets, splitting on the first collision of the joint plan. Branching keeps
optimality because every solution violates at least one child constraint of
the chosen collision:

  shared vertex        -> forbid the vertex at that time for either item
  MAPF occupied target -> forbid the mover's arrival or the occupant's stay
  TROT head-on swap    -> forbid either traversal of the edge
  TSWAP unreciprocated  -> forbid the traversal, or forbid the would-be
  traversal               partner's actual action at that time (any solution
                          containing the traversal swaps the partner back,
                          which differs from the partner's current action)

Token moves into unoccupied vertices never need a branch: items of a token
variant are confined to the support, and if some support vertex is empty at
time t then two items share another vertex at t, so a shared-vertex
collision at the same time always exists and is split instead.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

from .encoder import lower_bound
from .graphs import INF
from .pathfinder import (
    EDGE,
    VERTEX,
    Constraint,
    ConstraintSet,
    constrained_shortest_path,
)
from .relocation import (
    Collision,
    Instance,
    KIND_EDGE,
    KIND_OCCUPANCY,
    KIND_VERTEX,
    Plan,
    TOKEN_VARIANTS,
    Variant,
    effective_adjacency,
    effective_distances,
    make_plan,
    step_collisions,
)
from . import oracle

STATUS_SOLVED = "solved"
STATUS_UNSOLVABLE = "unsolvable"
STATUS_TIMEOUT = "timeout"
STATUS_LIMIT = "limit"


@dataclass
class SolveStats:
    """Run metrics shared by all drivers; SAT fields stay zero for CBS and
    ct_nodes stays zero for the SAT drivers."""

    algorithm: str = ""
    xi: int | None = None
    mu: int | None = None
    runtime: float = 0.0
    sat_time: float = 0.0
    sat_calls: int = 0
    clauses: int = 0
    variables: int = 0
    refinements: int = 0
    conflicts_stored: int = 0
    ct_nodes: int = 0


@dataclass
class SolveResult:
    status: str
    xi: int | None = None
    plan: Plan | None = None
    stats: SolveStats = field(default_factory=SolveStats)


def cost_cutoff(inst: Instance) -> int:
    """Cost bound past which the search gives up on proving solvability."""
    return lower_bound(inst) + 4 * inst.graph.n * inst.graph.n


def solvability_precheck(inst: Instance) -> bool | None:
    """True/False when solvability is decidable cheaply, else None.

    Infinite effective distance is always decisive. For TSWAP/TPERM finite
    distances are also sufficient: the support stays fully occupied, and
    swaps along the edges of a connected occupied subgraph realize every
    permutation of the items on it. MAPF and TROT fall back to exhaustive
    reachability when the instance is small enough.
    """
    if lower_bound(inst) >= INF:
        return False
    if inst.variant in (Variant.TSWAP, Variant.TPERM):
        return True
    if inst.graph.n <= oracle.DEFAULT_VERTEX_CAP and inst.k <= oracle.DEFAULT_ITEM_CAP:
        return oracle.is_solvable(inst)
    return None


def padded_configs(paths):
    """Common-horizon view of per-item paths, extended by goal waits."""
    horizon = max(len(p) for p in paths) - 1
    padded = [tuple(p) + (p[-1],) * (horizon + 1 - len(p)) for p in paths]
    return padded, horizon


def joint_collisions(inst: Instance, paths) -> list[Collision]:
    padded, horizon = padded_configs(paths)
    out: list[Collision] = []
    for t in range(horizon):
        cur = tuple(p[t] for p in padded)
        nxt = tuple(p[t + 1] for p in padded)
        out.extend(step_collisions(inst, cur, nxt, t))
    out.sort(key=Collision.sort_key)
    return out


def _branch_constraints(inst: Instance, col: Collision, padded) -> list[Constraint]:
    """The child constraints for one non-degenerate collision."""
    i, j = col.items
    if col.kind == KIND_VERTEX:
        v = col.where
        return [
            Constraint(i, VERTEX, col.t, v),
            Constraint(j, VERTEX, col.t, v),
        ]
    if col.kind == KIND_OCCUPANCY:
        v = col.where
        return [
            Constraint(i, VERTEX, col.t + 1, v),
            Constraint(j, VERTEX, col.t, v),
        ]
    u, v = col.where
    if inst.variant == Variant.TROT:
        return [
            Constraint(i, EDGE, col.t, v, u=u),
            Constraint(j, EDGE, col.t, u, u=v),
        ]
    # TSWAP: partner j sits at v and currently does w = padded[j][t+1];
    # any solution keeping i's traversal needs j to do v->u instead.
    w = padded[j][col.t + 1]
    return [
        Constraint(i, EDGE, col.t, v, u=u),
        Constraint(j, EDGE, col.t, w, u=v),
    ]


@dataclass
class CTNode:
    constraints: dict[int, ConstraintSet]
    paths: tuple[tuple[int, ...], ...]
    cost: int


def _replan(inst, adj, dist, item, cs: ConstraintSet, horizon_pad):
    maxt = max((c.t for c in cs), default=-1)
    horizon = max(maxt + 1 + inst.graph.n, dist(inst.starts[item], inst.goals[item]))
    horizon += horizon_pad
    return constrained_shortest_path(
        adj, dist, item, inst.starts[item], inst.goals[item], cs, horizon
    )


def cbs_solve(inst: Instance, timeout: float | None = None,
              xi_cap: int | None = None) -> SolveResult:
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout
    stats = SolveStats(algorithm="cbs")

    solvable = solvability_precheck(inst)
    if solvable is False:
        stats.runtime = time.monotonic() - t0
        return SolveResult(STATUS_UNSOLVABLE, stats=stats)
    if xi_cap is None:
        # a certified-solvable instance is searched without a cost cap
        xi_cap = INF if solvable else cost_cutoff(inst)

    adj = effective_adjacency(inst)
    dist = effective_distances(inst)
    empty = ConstraintSet()
    root_paths = []
    for i in range(inst.k):
        p = _replan(inst, adj, dist, i, empty, 0)
        assert p is not None  # lower_bound is finite
        root_paths.append(tuple(p))
    root = CTNode({i: empty for i in range(inst.k)}, tuple(root_paths),
                 sum(len(p) - 1 for p in root_paths))

    counter = 0
    capped = False
    open_heap = [(root.cost, 0, root)]
    while open_heap:
        if deadline is not None and time.monotonic() > deadline:
            stats.runtime = time.monotonic() - t0
            return SolveResult(STATUS_TIMEOUT, stats=stats)
        cost, _, node = heapq.heappop(open_heap)
        if cost > xi_cap:
            capped = True
            break
        stats.ct_nodes += 1
        collisions = joint_collisions(inst, node.paths)
        pick = next((c for c in collisions if not c.degenerate), None)
        if pick is None:
            if collisions:
                # unreachable by the pigeonhole argument above
                raise RuntimeError("only degenerate collisions in joint plan")
            stats.runtime = time.monotonic() - t0
            padded, _ = padded_configs(node.paths)
            plan = make_plan(padded)
            stats.xi = plan.cost
            stats.mu = plan.makespan
            return SolveResult(STATUS_SOLVED, cost, plan, stats)
        padded, _ = padded_configs(node.paths)
        for c in _branch_constraints(inst, pick, padded):
            item = c.item
            cs = node.constraints[item].with_constraint(c)
            p = _replan(inst, adj, dist, item, cs, 0)
            if p is None:
                continue
            child_constraints = dict(node.constraints)
            child_constraints[item] = cs
            child_paths = node.paths[:item] + (tuple(p),) + node.paths[item + 1:]
            child_cost = node.cost - (len(node.paths[item]) - 1) + (len(p) - 1)
            if child_cost > xi_cap:
                capped = True
                continue
            counter += 1
            heapq.heappush(
                open_heap,
                (child_cost, counter, CTNode(child_constraints, child_paths, child_cost)),
            )
    stats.runtime = time.monotonic() - t0
    # an empty open list certifies unsolvability; hitting the cap does not
    return SolveResult(STATUS_LIMIT if capped else STATUS_UNSOLVABLE, stats=stats)
