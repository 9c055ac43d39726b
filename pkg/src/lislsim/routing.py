"""Routing algorithms over snapshot series.

Four schedule producers with different latency/setup-penalty trade-offs:

* ``ilsr``  -- shortest route recomputed independently at every slot.
* ``ilpr``  -- keep the current route while all of its edges survive.
* ``alpr``  -- pick the edge-disjoint route with the least lifetime-averaged
  latency (setup penalty included) and hold it until it expires.
* ``isasr`` -- per-slot shortest route on costs inflated by edge stability
  and activeness terms, with unstable satellite edges pruned.

All of them share one deterministic Dijkstra core; ties always resolve to
the lexicographically smallest vertex sequence, which makes schedules
reproducible and lets the reduction ``isasr(gamma=0, cost_thrsh=inf) == ilsr``
hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import kernels
from .topology import ContiguousRun, LinkDetails, Snapshot, SnapshotSeries, build_link_details


@dataclass(frozen=True)
class Route:
    """Simple path from a source to a destination, as a vertex sequence."""

    nodes: tuple[int, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("a route needs at least two nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("routes must be simple paths (no repeated vertex)")

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def canonical_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((min(a, b), max(a, b)) for a, b in self.edges)

    def __str__(self):
        return "-".join(str(n) for n in self.nodes)


@dataclass
class RoutingSchedule:
    """Active route per slot (None marks an unreachable slot)."""

    algorithm: str
    source: int
    destination: int
    routes: list[Route | None]
    eta_s_ms: float | None = None

    @property
    def num_slots(self) -> int:
        return len(self.routes)

    def switch_flags(self) -> np.ndarray:
        """Per boundary (i, i+1): True iff both slots have routes that differ.

        Boundaries adjacent to unreachable slots never count as switches;
        the reachability gap is reported separately via unreachable_slots().
        """
        flags = np.zeros(max(self.num_slots - 1, 0), dtype=bool)
        for i in range(self.num_slots - 1):
            a, b = self.routes[i], self.routes[i + 1]
            flags[i] = a is not None and b is not None and a.nodes != b.nodes
        return flags

    def switch_count(self) -> int:
        return int(self.switch_flags().sum())

    def coverage(self) -> int:
        return sum(1 for r in self.routes if r is not None)

    def unreachable_slots(self) -> list[int]:
        return [i + 1 for i, r in enumerate(self.routes) if r is None]


def _edge_costs(snapshot: Snapshot, cost_override) -> np.ndarray:
    """Resolve the per-edge cost array, validating positivity."""
    if cost_override is None:
        return snapshot.delay_ms
    if isinstance(cost_override, Mapping):
        costs = snapshot.delay_ms.copy()
        for pair, value in cost_override.items():
            pos = int(snapshot.edge_positions([pair])[0])
            if pos < 0:
                raise KeyError(f"cost override for absent edge {pair}")
            costs[pos] = value
    else:
        costs = np.asarray(cost_override, dtype=np.float64)
        if costs.shape != snapshot.delay_ms.shape:
            raise ValueError("cost override array must align with snapshot edges")
    if np.any(np.isnan(costs)) or np.any(costs <= 0):
        raise ValueError("edge costs must be positive (use +inf to disable an edge)")
    return costs


def _foreign_ground_mask(snapshot: Snapshot, src: int, dst: int) -> np.ndarray | None:
    """Edges touching a ground station other than src/dst (relay forbidden)."""
    first_gs = snapshot.num_satellites
    if first_gs >= snapshot.num_nodes:
        return None
    u, v = snapshot.u, snapshot.v
    foreign_u = (u >= first_gs) & (u != src) & (u != dst)
    foreign_v = (v >= first_gs) & (v != src) & (v != dst)
    mask = foreign_u | foreign_v
    return mask if mask.any() else None


def dijkstra(snapshot: Snapshot, src: int, dst: int, cost_override=None) -> Route | None:
    """Minimum-cost route in one snapshot, or None when unreachable.

    ``cost_override`` may be a per-edge mapping (canonical pair -> cost) or
    an array aligned with the snapshot's edge order; +inf disables an edge.
    Among equal-cost routes the lexicographically smallest vertex sequence
    (by node id) wins. Ground stations other than src/dst never relay.
    """
    if src == dst:
        raise ValueError("source and destination must differ")
    for node in (src, dst):
        if not 0 <= node < snapshot.num_nodes:
            raise ValueError(f"node {node} outside the id range")
    costs = _edge_costs(snapshot, cost_override)
    mask = _foreign_ground_mask(snapshot, src, dst)
    if mask is not None:
        costs = costs.copy()
        costs[mask] = np.inf
    indptr, nbr, arc_eid = snapshot.csr()
    path = kernels.shortest_route(indptr, nbr, costs[arc_eid], src, dst)
    if path.size == 0:
        return None
    return Route(nodes=tuple(int(n) for n in path))


def route_cost(snapshot: Snapshot, route: Route, cost_override=None) -> float:
    """Total cost of a route under the snapshot's (possibly overridden) costs."""
    costs = _edge_costs(snapshot, cost_override)
    pos = snapshot.edge_positions(route.canonical_edges)
    if np.any(pos < 0):
        raise KeyError("route uses an edge absent from this snapshot")
    total = 0.0
    for p in pos:
        total += float(costs[p])
    return total


def ilsr(series: SnapshotSeries, src: int, dst: int) -> RoutingSchedule:
    """Benchmark: per-slot shortest route on instantaneous delays."""
    routes = [dijkstra(snap, src, dst) for snap in series.snapshots]
    return RoutingSchedule("ilsr", src, dst, routes)


def ilpr(series: SnapshotSeries, src: int, dst: int) -> RoutingSchedule:
    """Keep the active route until one of its edges disappears."""
    routes: list[Route | None] = []
    current: Route | None = None
    for snap in series.snapshots:
        if current is not None and snap.contains_route(current):
            routes.append(current)
            continue
        current = dijkstra(snap, src, dst)
        routes.append(current)
    return RoutingSchedule("ilpr", src, dst, routes)


def disjoint_routes(snapshot: Snapshot, src: int, dst: int) -> list[Route]:
    """Edge-disjoint routes by successive shortest-path extraction.

    Runs Dijkstra, removes the found route's edges, and repeats up to
    min(deg(src), deg(dst)) times or until the pair disconnects.
    """
    indptr, _, _ = snapshot.csr()
    deg = np.diff(indptr)
    bound = int(min(deg[src], deg[dst]))
    found: list[Route] = []
    costs = snapshot.delay_ms.copy()
    for _ in range(bound):
        route = dijkstra(snapshot, src, dst, cost_override=costs)
        if route is None:
            break
        found.append(route)
        pos = snapshot.edge_positions(route.canonical_edges)
        costs[pos] = np.inf
    return found


def route_lifetime(route: Route, details: LinkDetails, slot: int) -> int:
    """Last slot the route survives: min over edges of the containing run end."""
    last = details.num_slots
    for edge in route.canonical_edges:
        run = details.contiguous_run(edge, slot)
        if run is None or not run.first <= slot <= run.last:
            raise ValueError(f"edge {edge} does not exist at slot {slot}")
        last = min(last, run.last)
    return last


def alpr_average_latency(
    route: Route,
    details: LinkDetails,
    series: SnapshotSeries,
    slot: int,
    eta_s_ms: float,
) -> float:
    """Lifetime-averaged end-to-end latency including one setup penalty.

    (eta_s + sum of the route's per-slot delays from `slot` through its
    expiry) divided by the number of slots it survives.
    """
    last = route_lifetime(route, details, slot)
    total = eta_s_ms
    for k in range(slot, last + 1):
        delay = series.snapshot(k).route_delay(route)
        if delay is None:  # cannot happen: lifetime is the min over edge runs
            raise AssertionError("route vanished inside its lifetime")
        total += delay
    return total / (last - slot + 1)


def alpr(
    series: SnapshotSeries,
    src: int,
    dst: int,
    eta_s_ms: float,
    details: LinkDetails | None = None,
) -> RoutingSchedule:
    """Hold the disjoint route with the least lifetime-averaged latency.

    At each decision slot the candidate set is the edge-disjoint routes of
    that snapshot; the winner stays active until it expires, then a new
    decision is made. Score ties prefer fewer hops, then the smaller vertex
    sequence.
    """
    if details is None:
        details = build_link_details(series)
    elif details.num_slots != series.num_slots:
        raise ValueError("link details were built from a different series")
    routes: list[Route | None] = [None] * series.num_slots
    slot = 1
    while slot <= series.num_slots:
        candidates = disjoint_routes(series.snapshot(slot), src, dst)
        if not candidates:
            slot += 1
            continue
        best = min(
            candidates,
            key=lambda r: (alpr_average_latency(r, details, series, slot, eta_s_ms), r.hops, r.nodes),
        )
        last = route_lifetime(best, details, slot)
        for k in range(slot, last + 1):
            routes[k - 1] = best
        slot = last + 1
    return RoutingSchedule("alpr", src, dst, routes, eta_s_ms=eta_s_ms)


def isasr_stability_cost(
    run: ContiguousRun | None, slot: int, num_slots: int, eta_s_ms: float
) -> float:
    """Stability cost of an edge whose current/next existence run is `run`.

    0 when the run reaches the horizon; eta_s spread over the run length
    before it starts; eta_s spread over the remaining slots while it lasts;
    +inf when the edge never exists again.
    """
    if not 1 <= slot <= num_slots:
        raise ValueError(f"slot {slot} outside 1..{num_slots}")
    if run is None or run.last < slot:
        return math.inf
    if run.last == num_slots:
        return 0.0
    if slot < run.first:
        return eta_s_ms / (run.last - run.first + 1)
    return eta_s_ms / (run.last - slot + 1)


def isasr(
    series: SnapshotSeries,
    details: LinkDetails,
    src: int,
    dst: int,
    eta_s_ms: float,
    gamma: float,
    cost_thrsh_ms: float,
    reset_dropped_edges: bool = False,
    global_lifetimes: bool = False,
) -> RoutingSchedule:
    """Per-slot shortest route on stability/activeness-modified costs.

    Each slot: satellite-satellite edges whose stability cost reaches
    ``cost_thrsh_ms`` are dropped (ground links always stay); remaining edge
    costs become ``delay + gamma * (cost_st + cost_act)``; Dijkstra picks the
    route; edges of the active route get ``cost_act = 0`` until the slot the
    route breaks, when they revert to ``eta_s``. Reported per-slot delays
    always use the original snapshot delays, never the modified costs.

    ``global_lifetimes`` switches the stability term from per-run expiry to
    the edge's last appearance anywhere in the series.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if cost_thrsh_ms <= 0:
        raise ValueError("cost threshold must be positive")
    if details.num_slots != series.num_slots or len(details.edge_uids_by_slot) != len(
        series.snapshots
    ):
        raise ValueError("link details were built from a different series")
    n = series.num_slots
    cost_act = np.full(details.num_edges, eta_s_ms, dtype=np.float64)
    routes: list[Route | None] = []
    previous: Route | None = None
    for slot in range(1, n + 1):
        snap = series.snapshot(slot)
        uids = details.edge_uids_by_slot[slot - 1]
        if global_lifetimes:
            last = details.global_last[uids].astype(np.float64)
        else:
            last = details.run_last_by_slot[slot - 1].astype(np.float64)
        cost_st = np.where(last == n, 0.0, eta_s_ms / (last - slot + 1.0))
        costs = snap.delay_ms + gamma * (cost_st + cost_act[uids])
        sat_sat = (snap.u < snap.num_satellites) & (snap.v < snap.num_satellites)
        costs[sat_sat & (cost_st >= cost_thrsh_ms)] = np.inf
        route = dijkstra(snap, src, dst, cost_override=costs)
        routes.append(route)
        if route is not None:
            pos = snap.edge_positions(route.canonical_edges)
            break_point = int(details.run_last_by_slot[slot - 1][pos].min())
            route_uids = uids[pos]
            cost_act[route_uids] = 0.0 if slot != break_point else eta_s_ms
            if reset_dropped_edges and previous is not None:
                dropped = set(previous.canonical_edges) - set(route.canonical_edges)
                for edge in dropped:
                    uid = details.uid_of(edge)
                    if uid is not None:
                        cost_act[uid] = eta_s_ms
        previous = route
    return RoutingSchedule("isasr", src, dst, routes, eta_s_ms=eta_s_ms)


ALGORITHMS = ("ilsr", "ilpr", "alpr", "isasr")


def run_algorithm(
    name: str,
    series: SnapshotSeries,
    src: int,
    dst: int,
    eta_s_ms: float,
    gamma: float | None = None,
    cost_thrsh_ms: float = math.inf,
    details: LinkDetails | None = None,
    reset_dropped_edges: bool = False,
    global_lifetimes: bool = False,
) -> RoutingSchedule:
    """Dispatch one algorithm by name (gamma=None means gamma = eta_s)."""
    if name == "ilsr":
        return ilsr(series, src, dst)
    if name == "ilpr":
        return ilpr(series, src, dst)
    if name == "alpr":
        return alpr(series, src, dst, eta_s_ms, details=details)
    if name == "isasr":
        if details is None:
            details = build_link_details(series)
        return isasr(
            series, details, src, dst, eta_s_ms,
            eta_s_ms if gamma is None else gamma,
            cost_thrsh_ms,
            reset_dropped_edges=reset_dropped_edges,
            global_lifetimes=global_lifetimes,
        )
    raise ValueError(f"unknown algorithm {name!r} (expected one of {ALGORITHMS})")
