#!/usr/bin/env python3
"""Benchmark the numba kernels against their numpy/heapq fallbacks.

Times the two hot paths on a realistic constellation slot:

* pair extraction: all satellite pairs within laser range
* shortest route: ground station to ground station on the slot's graph

Usage: python benchmarks/bench_kernels.py [--planes 24] [--sats 66]
       [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

from lislsim import kernels
from lislsim.config import default_config
from lislsim.constellation import (
    build_snapshot,
    ground_station_state,
    propagate,
    satellite_positions,
)


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--planes", type=int, default=24)
    parser.add_argument("--sats", type=int, default=66)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return 1

    cfg = default_config()
    shell = type(cfg.constellation)(
        num_planes=args.planes,
        sats_per_plane=args.sats,
        inclination_deg=cfg.constellation.inclination_deg,
        altitude_km=cfg.constellation.altitude_km,
    )
    pos = satellite_positions(shell, 1, 1.0)
    lisl_range = cfg.scenario.lisl_range_km
    print(f"{pos.shape[0]} satellites, laser range {lisl_range:g} km")

    results = {}
    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        kernels.pair_edges(pos, lisl_range)  # warm-up (JIT compile / cache)
        results[backend] = timeit(lambda: kernels.pair_edges(pos, lisl_range), args.repeats)
    print(
        f"pair_edges      numba {results['numba'] * 1e3:8.2f} ms   "
        f"numpy {results['numpy'] * 1e3:8.2f} ms   "
        f"speedup x{results['numpy'] / results['numba']:.1f}"
    )

    stations = list(cfg.ground_stations)
    states = propagate(shell, 1, 1.0)
    if args.planes * args.sats == 1584:
        states += [ground_station_state(gs, 1, 1.0) for gs in stations]
    kernels.set_backend("numba")
    snap = build_snapshot(states, cfg.scenario)
    indptr, nbr, arc_eid = snap.csr()
    wgt = snap.delay_ms[arc_eid]
    src = 0
    dst = snap.num_nodes - 1
    print(f"slot graph: {snap.edge_count} edges, {snap.num_nodes} nodes")

    for backend in ("numba", "numpy"):
        kernels.set_backend(backend)
        kernels.shortest_route(indptr, nbr, wgt, src, dst)  # warm-up
        results[backend] = timeit(
            lambda: kernels.shortest_route(indptr, nbr, wgt, src, dst), args.repeats
        )
    print(
        f"shortest_route  numba {results['numba'] * 1e3:8.2f} ms   "
        f"heapq {results['numpy'] * 1e3:8.2f} ms   "
        f"speedup x{results['numpy'] / results['numba']:.1f}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
