"""Time-sliced network topology: snapshots, edge lifetimes, and file I/O.

A :class:`SnapshotSeries` is the simulator's central dataset: one immutable
:class:`Snapshot` per slot plus the node roster. :class:`LinkDetails` is the
inverse index (edge -> sorted slot list) that the lifetime-aware routing
algorithms consume. ``export_series``/``import_series`` define the
line-oriented interchange format for externally generated topologies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .constellation import GroundStation, ScenarioParams


class SeriesFormatError(ValueError):
    """Raised when a snapshot-series file fails validation."""


def _pack_keys(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (u.astype(np.int64) << 32) | v.astype(np.int64)


class Snapshot:
    """All feasible edges at one slot, keyed by canonical (min, max) pair.

    Edge arrays are sorted by (u, v) and immutable; delays are in ms,
    strictly positive, and quantized to 9 fractional digits. ``num_satellites``
    splits the id space: ids below it are satellites, the rest are ground
    stations (which may only appear as route endpoints).
    """

    __slots__ = ("slot", "u", "v", "delay_ms", "num_nodes", "num_satellites", "_keys", "_csr")

    def __init__(self, slot, u, v, delay_ms, num_nodes, num_satellites=None):
        if slot < 1:
            raise ValueError("slots are 1-based")
        u = np.asarray(u, dtype=np.int32)
        v = np.asarray(v, dtype=np.int32)
        delay_ms = np.round(np.asarray(delay_ms, dtype=np.float64), 9)
        if not (u.shape == v.shape == delay_ms.shape):
            raise ValueError("edge arrays must have equal length")
        if u.size:
            if u.min(initial=0) < 0 or max(u.max(initial=0), v.max(initial=0)) >= num_nodes:
                raise ValueError("edge endpoint outside the node id range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            order = np.lexsort((hi, lo))
            u, v, delay_ms = lo[order], hi[order], delay_ms[order]
            keys = _pack_keys(u, v)
            if np.any(np.diff(keys) == 0):
                raise ValueError("duplicate edge within a slot")
            if not np.all(np.isfinite(delay_ms)) or np.any(delay_ms <= 0):
                raise ValueError("non-positive delay")
        else:
            keys = np.empty(0, np.int64)
        self.slot = int(slot)
        self.u = u
        self.v = v
        self.delay_ms = delay_ms
        self.num_nodes = int(num_nodes)
        self.num_satellites = int(num_nodes if num_satellites is None else num_satellites)
        self._keys = keys
        self._csr = None
        for arr in (self.u, self.v, self.delay_ms, self._keys):
            arr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        slot: int,
        edges: Mapping[tuple[int, int], float],
        num_nodes: int,
        num_satellites: int | None = None,
    ) -> "Snapshot":
        items = list(edges.items())
        u = np.array([min(a, b) for (a, b), _ in items], dtype=np.int32)
        v = np.array([max(a, b) for (a, b), _ in items], dtype=np.int32)
        d = np.array([w for _, w in items], dtype=np.float64)
        return cls(slot, u, v, d, num_nodes, num_satellites)

    @property
    def edge_count(self) -> int:
        return self.u.size

    def edge_positions(self, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
        """Indices of canonical pairs in the edge arrays, -1 when absent."""
        pairs = list(pairs)
        if not pairs:
            return np.empty(0, np.int64)
        if self._keys.size == 0:
            return np.full(len(pairs), -1, np.int64)
        a = np.array([min(p) for p in pairs], np.int64)
        b = np.array([max(p) for p in pairs], np.int64)
        want = (a << 32) | b
        pos = np.searchsorted(self._keys, want)
        pos[pos >= self._keys.size] = -1
        hit = (pos >= 0) & (self._keys[pos] == want)
        return np.where(hit, pos, -1)

    def has_edge(self, a: int, b: int) -> bool:
        return int(self.edge_positions([(a, b)])[0]) >= 0

    def delay_of(self, a: int, b: int) -> float:
        pos = int(self.edge_positions([(a, b)])[0])
        if pos < 0:
            raise KeyError(f"edge ({a}, {b}) absent from slot {self.slot}")
        return float(self.delay_ms[pos])

    def contains_route(self, route) -> bool:
        return bool(np.all(self.edge_positions(route.canonical_edges) >= 0))

    def route_delay(self, route) -> float | None:
        """Sum of this slot's original delays along the route, None if broken."""
        pos = self.edge_positions(route.canonical_edges)
        if np.any(pos < 0):
            return None
        return float(np.sum(self.delay_ms[pos]))

    def edges_dict(self) -> dict[tuple[int, int], float]:
        return {
            (int(a), int(b)): float(d)
            for a, b, d in zip(self.u, self.v, self.delay_ms)
        }

    def csr(self):
        """Cached symmetric CSR adjacency: (indptr, neighbours, arc_edge_index).

        Neighbours of each node are in ascending id order; ``arc_edge_index``
        maps each arc back to its canonical edge for cost lookups.
        """
        if self._csr is None:
            e = self.edge_count
            src = np.concatenate([self.u, self.v]).astype(np.int64)
            dst = np.concatenate([self.v, self.u]).astype(np.int64)
            eid = np.concatenate([np.arange(e), np.arange(e)])
            order = np.lexsort((dst, src))
            nbr = dst[order].astype(np.int32)
            arc_eid = eid[order]
            counts = np.bincount(src, minlength=self.num_nodes)
            indptr = np.zeros(self.num_nodes + 1, np.int64)
            np.cumsum(counts, out=indptr[1:])
            self._csr = (indptr, nbr, arc_eid)
        return self._csr

    def __eq__(self, other):
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (
            self.slot == other.slot
            and self.num_nodes == other.num_nodes
            and self.num_satellites == other.num_satellites
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.delay_ms, other.delay_ms)
        )

    def __repr__(self):
        return f"Snapshot(slot={self.slot}, edges={self.edge_count})"


@dataclass(frozen=True)
class NodeRoster:
    """Node id space: satellites occupy 0..num_satellites-1, then stations."""

    num_satellites: int
    ground_stations: tuple[GroundStation, ...] = ()

    def __post_init__(self):
        ids = [gs.id for gs in self.ground_stations]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate ground station ids")
        names = [gs.name for gs in self.ground_stations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate ground station names")
        if any(i < self.num_satellites for i in ids):
            raise ValueError("ground station ids must come after all satellite ids")

    @property
    def num_nodes(self) -> int:
        top = max((gs.id for gs in self.ground_stations), default=self.num_satellites - 1)
        return max(top + 1, self.num_satellites)

    def is_satellite(self, node_id: int) -> bool:
        return 0 <= node_id < self.num_satellites

    def ground_ids(self) -> frozenset[int]:
        return frozenset(gs.id for gs in self.ground_stations)

    def station(self, name: str) -> GroundStation:
        for gs in self.ground_stations:
            if gs.name == name:
                return gs
        raise KeyError(f"no ground station named {name!r}")


class SnapshotSeries:
    """Scenario parameters, node roster, and one snapshot per slot 1..N."""

    __slots__ = ("scenario", "roster", "snapshots")

    def __init__(self, scenario: ScenarioParams, roster: NodeRoster, snapshots: list[Snapshot]):
        if len(snapshots) != scenario.num_slots:
            raise ValueError(
                f"expected {scenario.num_slots} snapshots, got {len(snapshots)}"
            )
        gs_ids = roster.ground_ids()
        for i, snap in enumerate(snapshots, start=1):
            if snap.slot != i:
                raise SeriesFormatError("non-consecutive slots")
            if snap.num_nodes > roster.num_nodes:
                raise ValueError("snapshot references nodes outside the roster")
            if snap.edge_count:
                u_gs = np.isin(snap.u, list(gs_ids))
                v_gs = np.isin(snap.v, list(gs_ids))
                if np.any(u_gs & v_gs):
                    raise ValueError("ground-to-ground edges are not allowed")
                sat_mask = ~(u_gs | v_gs)
                bad = sat_mask & (
                    (snap.u >= roster.num_satellites) | (snap.v >= roster.num_satellites)
                )
                if np.any(bad):
                    raise ValueError("edge endpoint is neither satellite nor ground station")
        self.scenario = scenario
        self.roster = roster
        self.snapshots = list(snapshots)

    @property
    def num_slots(self) -> int:
        return self.scenario.num_slots

    def snapshot(self, slot: int) -> Snapshot:
        if not 1 <= slot <= self.num_slots:
            raise IndexError(f"slot {slot} outside 1..{self.num_slots}")
        return self.snapshots[slot - 1]

    def __eq__(self, other):
        if not isinstance(other, SnapshotSeries):
            return NotImplemented
        return (
            self.scenario == other.scenario
            and self.roster == other.roster
            and self.snapshots == other.snapshots
        )

    def __repr__(self):
        return (
            f"SnapshotSeries(slots={self.num_slots}, sats={self.roster.num_satellites}, "
            f"gs={len(self.roster.ground_stations)})"
        )


@dataclass(frozen=True)
class ContiguousRun:
    """A maximal run of consecutive slots during which an edge exists."""

    first: int
    last: int

    def __post_init__(self):
        if self.first > self.last:
            raise ValueError("run must satisfy first <= last")

    @property
    def length(self) -> int:
        return self.last - self.first + 1


class LinkDetails:
    """Per-edge sorted slot lists with precomputed contiguous-run bounds.

    Built by :func:`build_link_details`; also carries per-slot arrays
    (edge uid and containing-run end per edge, aligned with the snapshot's
    edge order) that the slotted algorithms consume wholesale.
    """

    __slots__ = (
        "num_slots",
        "_uid",
        "_edge_u",
        "_edge_v",
        "_offsets",
        "_slots",
        "_run_first",
        "_run_last",
        "global_last",
        "global_first",
        "edge_uids_by_slot",
        "run_last_by_slot",
    )

    def __init__(self, num_slots, uid, edge_u, edge_v, offsets, slots, run_first, run_last,
                 edge_uids_by_slot, run_last_by_slot):
        self.num_slots = num_slots
        self._uid = uid
        self._edge_u = edge_u
        self._edge_v = edge_v
        self._offsets = offsets
        self._slots = slots
        self._run_first = run_first
        self._run_last = run_last
        self.global_first = slots[offsets[:-1]] if len(offsets) > 1 else np.empty(0, np.int32)
        self.global_last = slots[offsets[1:] - 1] if len(offsets) > 1 else np.empty(0, np.int32)
        self.edge_uids_by_slot = edge_uids_by_slot
        self.run_last_by_slot = run_last_by_slot

    @property
    def num_edges(self) -> int:
        return len(self._uid)

    def edges(self):
        return ((int(a), int(b)) for a, b in zip(self._edge_u, self._edge_v))

    def uid_of(self, edge: tuple[int, int]) -> int | None:
        key = (min(edge), max(edge))
        return self._uid.get(key)

    def slots_of(self, edge: tuple[int, int]) -> np.ndarray:
        """Sorted slot indices in which the edge exists (empty if never)."""
        uid = self.uid_of(edge)
        if uid is None:
            return np.empty(0, np.int32)
        return self._slots[self._offsets[uid]: self._offsets[uid + 1]].copy()

    def contiguous_run(self, edge: tuple[int, int], slot: int) -> ContiguousRun | None:
        """Maximal consecutive run containing `slot`, else the next one after.

        None means the edge never exists at or after `slot`.
        """
        if not 1 <= slot <= self.num_slots:
            raise ValueError(f"slot {slot} outside 1..{self.num_slots}")
        uid = self.uid_of(edge)
        if uid is None:
            return None
        lo, hi = self._offsets[uid], self._offsets[uid + 1]
        seg = self._slots[lo:hi]
        idx = int(np.searchsorted(seg, slot))
        if idx == seg.size:
            return None
        return ContiguousRun(int(self._run_first[lo + idx]), int(self._run_last[lo + idx]))


def build_link_details(series: SnapshotSeries) -> LinkDetails:
    """Invert a series into the exact edge -> slot-list index (lossless)."""
    per_slot_counts = [snap.edge_count for snap in series.snapshots]
    total = int(np.sum(per_slot_counts))
    if total == 0:
        empty_by_slot = [np.empty(0, np.int64) for _ in series.snapshots]
        empty32_by_slot = [np.empty(0, np.int32) for _ in series.snapshots]
        return LinkDetails(
            series.num_slots, {}, np.empty(0, np.int32), np.empty(0, np.int32),
            np.zeros(1, np.int64), np.empty(0, np.int32), np.empty(0, np.int32),
            np.empty(0, np.int32), empty_by_slot, empty32_by_slot,
        )

    all_u = np.concatenate([snap.u for snap in series.snapshots])
    all_v = np.concatenate([snap.v for snap in series.snapshots])
    all_slot = np.concatenate(
        [np.full(c, snap.slot, np.int32) for c, snap in zip(per_slot_counts, series.snapshots)]
    )
    key = _pack_keys(all_u, all_v)
    order = np.argsort(key, kind="stable")  # stable keeps slots ascending per edge
    skey = key[order]
    sslot = all_slot[order]

    new_edge = np.empty(total, bool)
    new_edge[0] = True
    new_edge[1:] = skey[1:] != skey[:-1]
    uid_sorted = np.cumsum(new_edge) - 1
    edge_starts = np.nonzero(new_edge)[0]
    offsets = np.append(edge_starts, total).astype(np.int64)
    edge_u = all_u[order][edge_starts].astype(np.int32)
    edge_v = all_v[order][edge_starts].astype(np.int32)
    uid_map = {
        (int(a), int(b)): i for i, (a, b) in enumerate(zip(edge_u, edge_v))
    }

    new_run = np.empty(total, bool)
    new_run[0] = True
    new_run[1:] = new_edge[1:] | (sslot[1:] != sslot[:-1] + 1)
    run_starts = np.nonzero(new_run)[0]
    run_bounds = np.append(run_starts, total)
    run_lengths = np.diff(run_bounds)
    run_first = np.repeat(sslot[run_starts], run_lengths)
    run_last = np.repeat(sslot[run_bounds[1:] - 1], run_lengths)

    # scatter uid and containing-run end back to original snapshot edge order
    uid_orig = np.empty(total, np.int64)
    uid_orig[order] = uid_sorted
    run_last_orig = np.empty(total, np.int32)
    run_last_orig[order] = run_last
    splits = np.cumsum(per_slot_counts)[:-1]
    edge_uids_by_slot = np.split(uid_orig, splits)
    run_last_by_slot = np.split(run_last_orig, splits)

    return LinkDetails(
        series.num_slots, uid_map, edge_u, edge_v, offsets,
        sslot.astype(np.int32), run_first.astype(np.int32), run_last.astype(np.int32),
        edge_uids_by_slot, run_last_by_slot,
    )


def contiguous_run(details: LinkDetails, edge: tuple[int, int], slot: int) -> ContiguousRun | None:
    """Module-level alias for :meth:`LinkDetails.contiguous_run`."""
    return details.contiguous_run(edge, slot)


# ---------------------------------------------------------------------------
# On-disk snapshot series format
# ---------------------------------------------------------------------------
#
# UTF-8 text, line oriented:
#   lislsim-series v1
#   scenario lisl_range_km=... gs_range_km=... node_delay_ms=... \
#            slot_duration_s=... num_slots=...
#   satellites <count>
#   gs <id> <name> <latitude> <longitude>          (one line per station)
#   <slot> <u> <v> <delay_ms>                      (edge records, canonical order)
# A slot with no edges is represented by the single record "<slot> - - -".

_MAGIC = "lislsim-series v1"


def export_series(series: SnapshotSeries, path) -> None:
    """Write a series to its line-oriented text format (lossless)."""
    sc = series.scenario
    lines = [_MAGIC]
    lines.append(
        "scenario "
        f"lisl_range_km={sc.lisl_range_km!r} gs_range_km={sc.gs_range_km!r} "
        f"node_delay_ms={sc.node_delay_ms!r} slot_duration_s={sc.slot_duration_s!r} "
        f"num_slots={sc.num_slots}"
    )
    lines.append(f"satellites {series.roster.num_satellites}")
    for gs in series.roster.ground_stations:
        lines.append(f"gs {gs.id} {gs.name} {gs.latitude_deg!r} {gs.longitude_deg!r}")
    out = ["\n".join(lines), "\n"]
    for snap in series.snapshots:
        if snap.edge_count == 0:
            out.append(f"{snap.slot} - - -\n")
            continue
        slot = snap.slot
        rows = "\n".join(
            f"{slot} {a} {b} {d:.9f}" for a, b, d in zip(snap.u, snap.v, snap.delay_ms)
        )
        out.append(rows)
        out.append("\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("".join(out))


def _parse_scenario_line(line: str) -> ScenarioParams:
    fields = {}
    for token in line.split()[1:]:
        if "=" not in token:
            raise SeriesFormatError(f"malformed scenario field {token!r}")
        k, val = token.split("=", 1)
        fields[k] = val
    try:
        return ScenarioParams(
            lisl_range_km=float(fields["lisl_range_km"]),
            gs_range_km=float(fields["gs_range_km"]),
            node_delay_ms=float(fields["node_delay_ms"]),
            slot_duration_s=float(fields["slot_duration_s"]),
            num_slots=int(fields["num_slots"]),
        )
    except (KeyError, ValueError) as exc:
        raise SeriesFormatError(f"bad scenario header: {exc}") from exc


def import_series(path) -> SnapshotSeries:
    """Parse and fully validate a series file; raises SeriesFormatError."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != _MAGIC:
        raise SeriesFormatError("not a lislsim series file (bad magic line)")
    if len(lines) < 3 or not lines[1].startswith("scenario "):
        raise SeriesFormatError("missing scenario header")
    scenario = _parse_scenario_line(lines[1])
    if not lines[2].startswith("satellites "):
        raise SeriesFormatError("missing satellites header")
    try:
        num_sats = int(lines[2].split()[1])
    except (IndexError, ValueError) as exc:
        raise SeriesFormatError("bad satellites header") from exc

    stations = []
    row = 3
    while row < len(lines) and lines[row].startswith("gs "):
        parts = lines[row].split()
        if len(parts) != 5:
            raise SeriesFormatError(f"bad ground station line: {lines[row]!r}")
        try:
            stations.append(
                GroundStation(
                    id=int(parts[1]), name=parts[2],
                    latitude_deg=float(parts[3]), longitude_deg=float(parts[4]),
                )
            )
        except ValueError as exc:
            raise SeriesFormatError(f"bad ground station line: {exc}") from exc
        row += 1
    roster = NodeRoster(num_satellites=num_sats, ground_stations=tuple(stations))
    known = set(range(num_sats)) | roster.ground_ids()

    by_slot_u: dict[int, list[int]] = {}
    by_slot_v: dict[int, list[int]] = {}
    by_slot_d: dict[int, list[float]] = {}
    empty_slots: set[int] = set()
    last_slot = 0
    for ln in lines[row:]:
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 4:
            raise SeriesFormatError(f"malformed edge record: {ln!r}")
        try:
            slot = int(parts[0])
        except ValueError as exc:
            raise SeriesFormatError(f"bad slot index in {ln!r}") from exc
        if slot < last_slot:
            raise SeriesFormatError("slots out of order")
        if slot > last_slot + 1:
            raise SeriesFormatError("non-consecutive slots")
        last_slot = slot
        if parts[1] == "-":
            if parts[2] != "-" or parts[3] != "-":
                raise SeriesFormatError(f"malformed empty-slot record: {ln!r}")
            if slot in by_slot_u or slot in empty_slots:
                raise SeriesFormatError(f"empty-slot marker for non-empty slot {slot}")
            empty_slots.add(slot)
            continue
        if slot in empty_slots:
            raise SeriesFormatError(f"edge record after empty-slot marker for slot {slot}")
        try:
            a, b = int(parts[1]), int(parts[2])
            d = float(parts[3])
        except ValueError as exc:
            raise SeriesFormatError(f"bad edge record {ln!r}") from exc
        if a not in known or b not in known:
            raise SeriesFormatError(f"unknown node id in {ln!r}")
        if d <= 0:
            raise SeriesFormatError("non-positive delay")
        by_slot_u.setdefault(slot, []).append(a)
        by_slot_v.setdefault(slot, []).append(b)
        by_slot_d.setdefault(slot, []).append(d)

    if last_slot != scenario.num_slots:
        raise SeriesFormatError(
            f"file covers slots 1..{last_slot} but header says {scenario.num_slots}"
        )
    snapshots = []
    for slot in range(1, scenario.num_slots + 1):
        try:
            snapshots.append(
                Snapshot(
                    slot,
                    np.array(by_slot_u.get(slot, []), np.int32),
                    np.array(by_slot_v.get(slot, []), np.int32),
                    np.array(by_slot_d.get(slot, []), np.float64),
                    num_nodes=roster.num_nodes,
                    num_satellites=num_sats,
                )
            )
        except ValueError as exc:
            raise SeriesFormatError(f"slot {slot}: {exc}") from exc
    try:
        return SnapshotSeries(scenario=scenario, roster=roster, snapshots=snapshots)
    except ValueError as exc:
        raise SeriesFormatError(str(exc)) from exc
