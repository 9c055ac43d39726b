"""Routing algorithms: Dijkstra core and the four schedule producers."""

import math

import numpy as np
import pytest

from lislsim.routing import (
    Route,
    alpr,
    alpr_average_latency,
    dijkstra,
    disjoint_routes,
    ilpr,
    ilsr,
    isasr,
    isasr_stability_cost,
    route_cost,
    route_lifetime,
    run_algorithm,
)
from lislsim.topology import ContiguousRun, Snapshot, build_link_details
from lislsim.toyseries import series_from_edges

from conftest import WORKED_EXAMPLE_DELAYS, random_series, square_edges


def exhaustive_best_path(edges: dict, src: int, dst: int):
    """Independent oracle: min-cost simple path by full enumeration.

    Returns (cost, lexicographically smallest vertex tuple among minima),
    or None when the pair is disconnected. Intended for lattice-valued
    weights where float sums are exact in any order.
    """
    adj: dict[int, list[int]] = {}
    for (a, b) in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    best: tuple[float, tuple[int, ...]] | None = None

    def walk(path, seen, cost):
        nonlocal best
        here = path[-1]
        if here == dst:
            key = (cost, tuple(path))
            if best is None or key < best:
                best = key
            return
        for nxt in sorted(adj.get(here, ())):
            if nxt in seen:
                continue
            edge = (min(here, nxt), max(here, nxt))
            w = edges.get(edge)
            if w is None or math.isinf(w):
                continue
            path.append(nxt)
            seen.add(nxt)
            walk(path, seen, cost + w)
            path.pop()
            seen.remove(nxt)

    walk([src], {src}, 0.0)
    return best


class TestRoute:
    def test_validation(self):
        with pytest.raises(ValueError):
            Route((1,))
        with pytest.raises(ValueError):
            Route((1, 2, 1))

    def test_edges(self):
        r = Route((4, 0, 5))
        assert r.hops == 2
        assert r.edges == ((4, 0), (0, 5))
        assert r.canonical_edges == ((0, 4), (0, 5))


class TestDijkstra:
    def test_strictly_cheaper_branch_wins(self, square_snapshot):
        route = dijkstra(square_snapshot, 0, 3)
        assert route.nodes == (0, 2, 3)
        assert route_cost(square_snapshot, route) == 8.0

    def test_tie_prefers_smaller_node_ids(self, tie_snapshot):
        assert dijkstra(tie_snapshot, 0, 3).nodes == (0, 1, 3)

    def test_isolated_source_unreachable(self):
        snap = Snapshot.from_edges(1, {(1, 2): 1.0}, num_nodes=4)
        assert dijkstra(snap, 0, 2) is None
        assert dijkstra(snap, 3, 1) is None

    def test_same_endpoints_rejected(self, square_snapshot):
        with pytest.raises(ValueError):
            dijkstra(square_snapshot, 2, 2)

    def test_cost_override_mapping(self, square_snapshot):
        route = dijkstra(square_snapshot, 0, 3, cost_override={(0, 2): 100.0})
        assert route.nodes == (0, 1, 3)

    def test_cost_override_array_disables_edges(self, square_snapshot):
        costs = square_snapshot.delay_ms.copy()
        pos = square_snapshot.edge_positions([(0, 2)])[0]
        costs[pos] = np.inf
        assert dijkstra(square_snapshot, 0, 3, cost_override=costs).nodes == (0, 1, 3)

    def test_rejects_non_positive_costs(self, square_snapshot):
        with pytest.raises(ValueError):
            dijkstra(square_snapshot, 0, 3, cost_override={(0, 2): 0.0})

    def test_foreign_ground_station_never_relays(self):
        # 0,1 satellites; 2,3,4 ground. Path 2-0-3 exists; the shortcut
        # through ground station 4 must be ignored even though it is cheap.
        edges = {(0, 2): 1.0, (0, 3): 1.0, (0, 4): 0.25, (1, 4): 0.25, (1, 3): 0.25}
        snap = Snapshot.from_edges(1, edges, num_nodes=5, num_satellites=2)
        route = dijkstra(snap, 2, 3)
        assert route.nodes == (2, 0, 3)

    def test_matches_exhaustive_enumeration_on_random_graphs(self):
        rng = np.random.default_rng(123)
        checked = 0
        for _ in range(200):
            n = int(rng.integers(2, 9))
            edges = {}
            for a in range(n):
                for b in range(a + 1, n):
                    if rng.random() < 0.5:
                        edges[(a, b)] = 0.25 + float(rng.integers(0, 256)) / 64.0
            if not edges:
                continue
            snap = Snapshot.from_edges(1, edges, num_nodes=n)
            expected = exhaustive_best_path(edges, 0, n - 1)
            got = dijkstra(snap, 0, n - 1)
            if expected is None:
                assert got is None
            else:
                assert route_cost(snap, got) == expected[0]
                assert got.nodes == expected[1]
                checked += 1
        assert checked > 100


class TestIlsr:
    def test_per_slot_argmin_switches(self):
        series = series_from_edges(
            [
                {(0, 1): 10.0, (1, 3): 10.0, (0, 2): 11.0, (2, 3): 11.0},
                {(0, 1): 12.0, (1, 3): 12.0, (0, 2): 11.0, (2, 3): 11.0},
            ],
            num_satellites=4,
        )
        schedule = ilsr(series, 0, 3)
        assert schedule.routes[0].nodes == (0, 1, 3)
        assert schedule.routes[1].nodes == (0, 2, 3)
        assert schedule.switch_count() == 1

    def test_static_topology_never_switches(self):
        series = series_from_edges([square_edges()] * 5, num_satellites=4)
        schedule = ilsr(series, 0, 3)
        assert all(r.nodes == (0, 2, 3) for r in schedule.routes)
        assert schedule.switch_count() == 0

    def test_two_slot_trace(self):
        # via-A 10 then 14; via-B 12 both slots: pick A then B
        series = series_from_edges(
            [
                {(0, 1): 5.0, (1, 3): 5.0, (0, 2): 6.0, (2, 3): 6.0},
                {(0, 1): 7.0, (1, 3): 7.0, (0, 2): 6.0, (2, 3): 6.0},
            ],
            num_satellites=4,
        )
        schedule = ilsr(series, 0, 3)
        assert [r.nodes for r in schedule.routes] == [(0, 1, 3), (0, 2, 3)]


class TestIlpr:
    def test_persists_while_route_exists(self):
        # same data as the ILSR trace: ILPR stays on the slot-1 choice
        series = series_from_edges(
            [
                {(0, 1): 5.0, (1, 3): 5.0, (0, 2): 6.0, (2, 3): 6.0},
                {(0, 1): 7.0, (1, 3): 7.0, (0, 2): 6.0, (2, 3): 6.0},
            ],
            num_satellites=4,
        )
        schedule = ilpr(series, 0, 3)
        assert [r.nodes for r in schedule.routes] == [(0, 1, 3), (0, 1, 3)]
        assert schedule.switch_count() == 0
        delays = [series.snapshot(i + 1).route_delay(r) for i, r in enumerate(schedule.routes)]
        assert sum(delays) == 24.0

    def test_recomputes_when_edge_disappears(self):
        series = series_from_edges(
            [
                {(0, 1): 5.0, (1, 3): 5.0, (0, 2): 6.0, (2, 3): 6.0},
                {(0, 2): 6.0, (2, 3): 6.0},
            ],
            num_satellites=4,
        )
        schedule = ilpr(series, 0, 3)
        assert [r.nodes for r in schedule.routes] == [(0, 1, 3), (0, 2, 3)]
        assert schedule.switch_count() == 1

    def test_static_topology_zero_switches(self):
        series = series_from_edges([square_edges()] * 6, num_satellites=4)
        assert ilpr(series, 0, 3).switch_count() == 0

    def test_switch_implies_break_or_gap(self):
        rng = np.random.default_rng(5)
        for trial in range(20):
            series = random_series(rng)
            schedule = ilpr(series, 0, series.roster.num_nodes - 1)
            flags = schedule.switch_flags()
            for i, flag in enumerate(flags):
                if flag:
                    prev = schedule.routes[i]
                    assert not series.snapshot(i + 2).contains_route(prev)


class TestDisjointRoutes:
    def test_square_graph_order(self, square_snapshot):
        routes = disjoint_routes(square_snapshot, 0, 3)
        assert [r.nodes for r in routes] == [(0, 2, 3), (0, 1, 3)]
        assert route_cost(square_snapshot, routes[0]) == 8.0
        assert route_cost(square_snapshot, routes[1]) == 10.0

    def test_degree_one_bound(self):
        edges = {(0, 1): 1.0, (1, 2): 1.0, (1, 3): 1.0, (2, 4): 1.0, (3, 4): 1.0}
        snap = Snapshot.from_edges(1, edges, num_nodes=5)
        routes = disjoint_routes(snap, 0, 4)
        assert len(routes) == 1  # deg(0) == 1 caps the count

    def test_early_stop_when_graph_disconnects(self):
        # two disjoint routes share the bottleneck 0-1, so only one exists
        edges = {(0, 1): 1.0, (1, 2): 1.0, (2, 4): 1.0, (1, 3): 1.0, (3, 4): 1.0}
        snap = Snapshot.from_edges(1, edges, num_nodes=5)
        routes = disjoint_routes(snap, 0, 4)
        assert len(routes) == 1

    def test_pairwise_edge_disjoint(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            series = random_series(rng, num_nodes=9, num_slots=1, edge_prob=0.6)
            snap = series.snapshot(1)
            routes = disjoint_routes(snap, 0, 8)
            seen = set()
            for r in routes:
                for e in r.canonical_edges:
                    assert e not in seen
                    seen.add(e)


class TestRouteLifetime:
    def test_min_over_edge_run_ends(self):
        ends = [105, 117, 93, 155, 148]
        slot_lists = {
            (i, i + 1): list(range(80, e + 1)) for i, e in enumerate(ends)
        }
        per_slot = [dict() for _ in range(160)]
        for edge, slots in slot_lists.items():
            for s in slots:
                per_slot[s - 1][edge] = 1.0
        series = series_from_edges(per_slot, num_satellites=6)
        details = build_link_details(series)
        route = Route((0, 1, 2, 3, 4, 5))
        assert route_lifetime(route, details, 85) == 93

    def test_permanent_route_expires_at_horizon(self):
        series = series_from_edges([{(0, 1): 1.0, (1, 2): 1.0}] * 7, num_satellites=3)
        details = build_link_details(series)
        assert route_lifetime(Route((0, 1, 2)), details, 3) == 7

    def test_single_slot_run(self):
        per_slot = [{(0, 1): 1.0}, {(2, 3): 1.0}, {(0, 1): 1.0}]
        series = series_from_edges(per_slot, num_satellites=4)
        details = build_link_details(series)
        assert route_lifetime(Route((0, 1)), details, 1) == 1
        with pytest.raises(ValueError):
            route_lifetime(Route((0, 1)), details, 2)


class TestAlprAverageLatency:
    @pytest.mark.parametrize(
        "rid,eta_s,expected",
        [
            (1, 1.0, 26.98), (2, 1.0, 28.02), (3, 1.0, 27.76), (4, 1.0, 28.10),
            (1, 1000.0, 193.48), (2, 1000.0, 118.84), (3, 1000.0, 170.47),
        ],
    )
    def test_worked_example_values(self, table_series, rid, eta_s, expected):
        details = build_link_details(table_series)
        route = Route((4, rid - 1, 5))
        avg = alpr_average_latency(route, details, table_series, 1, eta_s)
        assert round(avg, 2) == pytest.approx(expected, abs=0.01)

    def test_worked_example_route4_truncation(self, table_series):
        details = build_link_details(table_series)
        avg = alpr_average_latency(Route((4, 3, 5)), details, table_series, 1, 1000.0)
        assert avg == pytest.approx(152.975, abs=1e-9)

    def test_matches_direct_formula(self, table_series):
        details = build_link_details(table_series)
        delays = WORKED_EXAMPLE_DELAYS[2]
        avg = alpr_average_latency(Route((4, 1, 5)), details, table_series, 3, 7.0)
        expected = (7.0 + sum(delays[2:])) / (len(delays) - 2)
        assert avg == pytest.approx(expected, abs=1e-12)


class TestAlpr:
    def test_low_penalty_selects_fastest_route(self, table_series):
        schedule = alpr(table_series, 4, 5, 1.0)
        assert schedule.routes[0].nodes == (4, 0, 5)

    def test_high_penalty_selects_longest_lived_route(self, table_series):
        schedule = alpr(table_series, 4, 5, 1000.0)
        assert schedule.routes[0].nodes == (4, 1, 5)
        # that route survives the whole horizon: no switches at all
        assert schedule.switch_count() == 0
        assert all(r.nodes == (4, 1, 5) for r in schedule.routes)

    def test_single_candidate_selected_regardless_of_penalty(self):
        series = series_from_edges([{(0, 1): 3.0, (1, 2): 3.0}] * 4, num_satellites=3)
        for eta_s in (1.0, 1000.0):
            schedule = alpr(series, 0, 2, eta_s)
            assert all(r.nodes == (0, 1, 2) for r in schedule.routes)

    def test_block_structure(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            series = random_series(rng, num_nodes=7, num_slots=12)
            details = build_link_details(series)
            schedule = alpr(series, 0, 6, 50.0, details=details)
            i = 1
            while i <= series.num_slots:
                route = schedule.routes[i - 1]
                assert route is not None
                last = route_lifetime(route, details, i)
                # the active block extends exactly to the route's expiry
                for k in range(i, last + 1):
                    assert schedule.routes[k - 1] is route
                i = last + 1

    def test_single_slot_lifetime_triggers_immediate_redecision(self):
        per_slot = [
            {(0, 1): 1.0, (1, 2): 1.0, (0, 3): 5.0, (3, 2): 5.0},
            {(0, 3): 5.0, (3, 2): 5.0},
            {(0, 3): 5.0, (3, 2): 5.0},
        ]
        series = series_from_edges(per_slot, num_satellites=4)
        schedule = alpr(series, 0, 2, 1.0)
        assert schedule.routes[0].nodes == (0, 1, 2)
        assert schedule.routes[1].nodes == (0, 3, 2)
        assert schedule.routes[2].nodes == (0, 3, 2)

    def test_unreachable_decision_slot_advances_one(self):
        per_slot = [{(0, 1): 1.0}, {(0, 1): 1.0, (1, 2): 1.0}, {(0, 1): 1.0, (1, 2): 1.0}]
        series = series_from_edges(per_slot, num_satellites=3)
        schedule = alpr(series, 0, 2, 10.0)
        assert schedule.routes[0] is None
        assert schedule.routes[1].nodes == (0, 1, 2)
        assert schedule.unreachable_slots() == [1]


class TestIsasrStabilityCost:
    def test_horizon_run_costs_nothing(self):
        assert isasr_stability_cost(ContiguousRun(10, 20), 5, 20, 1000.0) == 0.0

    def test_future_run_spreads_over_length(self):
        assert isasr_stability_cost(ContiguousRun(10, 19), 5, 30, 1000.0) == 100.0

    def test_live_run_spreads_over_remainder(self):
        assert isasr_stability_cost(ContiguousRun(10, 19), 15, 30, 1000.0) == 200.0

    def test_expired_run_is_infinite(self):
        assert isasr_stability_cost(None, 5, 30, 1000.0) == math.inf
        assert isasr_stability_cost(ContiguousRun(1, 3), 5, 30, 1000.0) == math.inf

    def test_slot_bounds(self):
        with pytest.raises(ValueError):
            isasr_stability_cost(None, 0, 30, 1.0)


class TestIsasr:
    def test_reduces_to_ilsr_with_zero_gamma(self):
        rng = np.random.default_rng(31)
        for trial in range(8):
            series = random_series(rng, num_nodes=8, num_slots=10)
            details = build_link_details(series)
            a = isasr(series, details, 0, 7, 1000.0, 0.0, math.inf)
            b = ilsr(series, 0, 7)
            for ra, rb in zip(a.routes, b.routes):
                assert (ra is None) == (rb is None)
                if ra is not None:
                    assert ra.nodes == rb.nodes

    def test_static_topology_sticks_to_first_route(self):
        series = series_from_edges([square_edges()] * 6, num_satellites=4)
        details = build_link_details(series)
        schedule = isasr(series, details, 0, 3, 100.0, 100.0, math.inf)
        assert schedule.switch_count() == 0
        assert all(r.nodes == schedule.routes[0].nodes for r in schedule.routes)

    def test_threshold_prunes_short_lived_satellite_edges(self):
        # (1,2) is short-lived and would carry the cheapest route at slot 1;
        # pruning by threshold pushes the route onto the stable pair.
        per_slot = [
            {(0, 1): 1.0, (1, 2): 0.5, (2, 3): 1.0, (0, 4): 2.0, (4, 3): 2.0},
            {(0, 1): 1.0, (2, 3): 1.0, (0, 4): 2.0, (4, 3): 2.0},
            {(0, 1): 1.0, (2, 3): 1.0, (0, 4): 2.0, (4, 3): 2.0},
        ]
        series = series_from_edges(per_slot, num_satellites=5)
        details = build_link_details(series)
        eta_s = 100.0
        # cost_st of (1,2) at slot 1 is eta_s/1 = 100 >= threshold
        schedule = isasr(series, details, 0, 3, eta_s, 1.0, cost_thrsh_ms=100.0)
        assert schedule.routes[0].nodes == (0, 4, 3)
        # with a huge threshold the short-lived edge is allowed again
        loose = isasr(series, details, 0, 3, eta_s, 0.0, cost_thrsh_ms=math.inf)
        assert loose.routes[0].nodes == (0, 1, 2, 3)

    def test_ground_edges_survive_pruning(self):
        from lislsim.constellation import GroundStation

        stations = (
            GroundStation(id=2, name="src", latitude_deg=0.0, longitude_deg=0.0),
            GroundStation(id=3, name="dst", latitude_deg=0.0, longitude_deg=1.0),
        )
        # the uplink (0,2) exists at slot 1 only, so its stability cost (100)
        # reaches the threshold; being a ground link it must be kept anyway
        per_slot = [
            {(0, 2): 1.0, (0, 1): 1.0, (1, 3): 1.0},
            {(0, 1): 1.0, (1, 3): 1.0},
            {(0, 1): 1.0, (1, 3): 1.0},
        ]
        series = series_from_edges(per_slot, num_satellites=2, ground_stations=stations)
        details = build_link_details(series)
        schedule = isasr(series, details, 2, 3, 100.0, 1.0, cost_thrsh_ms=50.0)
        assert schedule.routes[0].nodes == (2, 0, 1, 3)
        assert schedule.unreachable_slots() == [2, 3]

    def test_reported_delays_use_original_costs(self, toy_series):
        details = build_link_details(toy_series)
        schedule = isasr(toy_series, details, 6, 7, 100.0, 100.0, math.inf)
        for i, route in enumerate(schedule.routes, start=1):
            snap = toy_series.snapshot(i)
            assert snap.route_delay(route) == sum(
                snap.delay_of(*e) for e in route.canonical_edges
            )

    def test_gamma_must_be_non_negative(self, toy_series):
        details = build_link_details(toy_series)
        with pytest.raises(ValueError):
            isasr(toy_series, details, 6, 7, 1.0, -1.0, 1.0)


class TestScheduleFeasibility:
    @pytest.mark.parametrize("name", ["ilsr", "ilpr", "alpr", "isasr"])
    def test_active_routes_exist_in_their_slots(self, name):
        rng = np.random.default_rng(77)
        for _ in range(6):
            series = random_series(rng, num_nodes=8, num_slots=9)
            schedule = run_algorithm(name, series, 0, 7, 25.0)
            for i, route in enumerate(schedule.routes, start=1):
                if route is not None:
                    assert series.snapshot(i).contains_route(route)
                    assert route.nodes[0] == 0 and route.nodes[-1] == 7

    def test_unknown_algorithm_rejected(self, toy_series):
        with pytest.raises(ValueError):
            run_algorithm("ospf", toy_series, 6, 7, 1.0)


class TestCallCounts:
    def test_ilpr_static_topology_runs_dijkstra_once(self, monkeypatch):
        import lislsim.routing as routing_mod

        series = series_from_edges([square_edges()] * 8, num_satellites=4)
        calls = {"n": 0}
        real = routing_mod.dijkstra

        def counting(*args, **kwargs):
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(routing_mod, "dijkstra", counting)
        schedule = routing_mod.ilpr(series, 0, 3)
        assert calls["n"] == 1
        assert schedule.switch_count() == 0

    def test_ilsr_runs_dijkstra_every_slot(self, monkeypatch):
        import lislsim.routing as routing_mod

        series = series_from_edges([square_edges()] * 8, num_satellites=4)
        calls = {"n": 0}
        real = routing_mod.dijkstra

        def counting(*args, **kwargs):
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(routing_mod, "dijkstra", counting)
        routing_mod.ilsr(series, 0, 3)
        assert calls["n"] == 8


class TestPermanentEdgeCosts:
    def test_stability_cost_vanishes_for_permanent_edges(self):
        from lislsim.routing import isasr_stability_cost

        series = series_from_edges([square_edges()] * 6, num_satellites=4)
        details = build_link_details(series)
        for edge in details.edges():
            for slot in (1, 3, 6):
                run = details.contiguous_run(edge, slot)
                assert isasr_stability_cost(run, slot, 6, 1000.0) == 0.0


class TestDetailsGuards:
    def test_alpr_rejects_mismatched_details(self, toy_series):
        other = series_from_edges([{(0, 1): 1.0}] * 2, num_satellites=2)
        details = build_link_details(other)
        with pytest.raises(ValueError, match="different series"):
            alpr(toy_series, 6, 7, 1.0, details=details)

    def test_isasr_rejects_mismatched_details(self, toy_series):
        other = series_from_edges([{(0, 1): 1.0}] * 2, num_satellites=2)
        details = build_link_details(other)
        with pytest.raises(ValueError, match="different series"):
            isasr(toy_series, details, 6, 7, 1.0, 1.0, 1.0)


class TestBackendEquivalence:
    def test_schedules_identical_across_backends(self):
        from lislsim import kernels

        if not kernels.HAVE_NUMBA:
            pytest.skip("numba unavailable")
        rng = np.random.default_rng(55)
        series = random_series(rng, num_nodes=9, num_slots=8)
        original = kernels.active_backend()
        results = {}
        try:
            for backend in ("numba", "numpy"):
                kernels.set_backend(backend)
                results[backend] = {
                    name: [
                        r.nodes if r else None
                        for r in run_algorithm(name, series, 0, 8, 100.0).routes
                    ]
                    for name in ("ilsr", "ilpr", "alpr", "isasr")
                }
        finally:
            kernels.set_backend(original)
        assert results["numba"] == results["numpy"]


class TestIsasrConfigSwitches:
    def test_reset_dropped_edges_changes_reselection(self):
        # path A = 0-1-3, path B = 0-2-3; A is abandoned at slot 3 while it
        # still exists. By default its edges keep their zero activeness cost
        # and win back the route at slot 4; with the reset switch their
        # activeness cost reverts and the route stays on B.
        def edges(a_delay):
            return {
                (0, 1): a_delay, (1, 3): a_delay,
                (0, 2): 5.0, (2, 3): 5.0,
            }

        per_slot = [edges(1.0), edges(1.0), edges(50.0), edges(1.0)]
        series = series_from_edges(per_slot, num_satellites=4)
        details = build_link_details(series)
        sticky = isasr(series, details, 0, 3, eta_s_ms=10.0, gamma=1.0,
                       cost_thrsh_ms=math.inf)
        assert [r.nodes for r in sticky.routes] == [
            (0, 1, 3), (0, 1, 3), (0, 2, 3), (0, 1, 3)
        ]
        resetting = isasr(series, details, 0, 3, eta_s_ms=10.0, gamma=1.0,
                          cost_thrsh_ms=math.inf, reset_dropped_edges=True)
        assert [r.nodes for r in resetting.routes] == [
            (0, 1, 3), (0, 1, 3), (0, 2, 3), (0, 2, 3)
        ]

    def test_global_lifetimes_ignore_mid_series_gaps(self):
        # edge (1,3) exists in two runs [1,2] and [4,6]: per-run stability
        # charges it at slot 1 (run ends early), globally it looks permanent
        gappy = {(0, 1): 1.0, (1, 3): 1.0, (0, 2): 2.0, (2, 3): 2.0}
        stable_only = {(0, 1): 1.0, (0, 2): 2.0, (2, 3): 2.0}
        per_slot = [gappy, gappy, stable_only, gappy, gappy, gappy]
        series = series_from_edges(per_slot, num_satellites=4)
        details = build_link_details(series)
        per_run = isasr(series, details, 0, 3, eta_s_ms=100.0, gamma=1.0,
                        cost_thrsh_ms=math.inf)
        assert per_run.routes[0].nodes == (0, 2, 3)
        global_l = isasr(series, details, 0, 3, eta_s_ms=100.0, gamma=1.0,
                         cost_thrsh_ms=math.inf, global_lifetimes=True)
        assert global_l.routes[0].nodes == (0, 1, 3)
