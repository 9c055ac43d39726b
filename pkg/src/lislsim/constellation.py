"""Walker-Delta constellation geometry and per-slot topology snapshots.

Satellites move on circular Keplerian orbits around a spherical Earth;
ground stations ride the Earth's sidereal rotation. A snapshot of the
network at a slot contains every feasible laser inter-satellite link and
ground-satellite link, each carrying a propagation-plus-node delay in ms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

MU_EARTH_KM3_S2 = 398600.4418
EARTH_RADIUS_KM = 6371.0
SIDEREAL_DAY_S = 86164.0
SPEED_OF_LIGHT_KM_S = 299792.458


@dataclass(frozen=True)
class ConstellationParams:
    """Walker-Delta shell definition."""

    num_planes: int
    sats_per_plane: int
    inclination_deg: float
    altitude_km: float
    phasing_factor: int = 0
    epoch_raan_offset_deg: float = 0.0

    def __post_init__(self):
        if self.num_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("num_planes and sats_per_plane must be >= 1")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError("inclination must lie in [0, 180] degrees")
        if self.altitude_km <= 0:
            raise ValueError("altitude must be positive")

    @property
    def num_satellites(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def orbit_radius_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def mean_motion_rad_s(self) -> float:
        r = self.orbit_radius_km
        return float(np.sqrt(MU_EARTH_KM3_S2 / (r * r * r)))

    @property
    def period_s(self) -> float:
        return 2.0 * np.pi / self.mean_motion_rad_s

    @property
    def orbital_speed_km_s(self) -> float:
        return float(np.sqrt(MU_EARTH_KM3_S2 / self.orbit_radius_km))


@dataclass(frozen=True)
class GroundStation:
    """A fixed Earth terminal identified by an integer node id."""

    id: int
    name: str
    latitude_deg: float
    longitude_deg: float

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude_deg}")
        if not -180.0 < self.longitude_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude_deg}")
        if " " in self.name or not self.name:
            raise ValueError("ground station names must be non-empty and space-free")


@dataclass(frozen=True)
class ScenarioParams:
    """Link ranges, fixed per-edge node delay, and the slot grid."""

    lisl_range_km: float
    gs_range_km: float
    node_delay_ms: float
    slot_duration_s: float
    num_slots: int

    def __post_init__(self):
        if self.lisl_range_km <= 0 or self.gs_range_km <= 0:
            raise ValueError("link ranges must be positive")
        if self.node_delay_ms < 0:
            raise ValueError("node delay cannot be negative")
        if self.slot_duration_s <= 0:
            raise ValueError("slot duration must be positive")
        if self.num_slots < 1:
            raise ValueError("need at least one time slot")


@dataclass(frozen=True)
class BodyState:
    """Position of one node (satellite or ground station) at one slot."""

    node_id: int
    position_km: tuple[float, float, float]
    slot: int
    is_ground: bool = False


def _slot_time_s(slot: int, slot_duration_s: float) -> float:
    if slot < 1:
        raise ValueError("slots are 1-based")
    return (slot - 1) * slot_duration_s


def satellite_positions(params: ConstellationParams, slot: int, slot_duration_s: float) -> np.ndarray:
    """(num_satellites, 3) ECI positions in km, plane-major node order."""
    t = _slot_time_s(slot, slot_duration_s)
    p = np.arange(params.num_planes, dtype=np.float64)
    s = np.arange(params.sats_per_plane, dtype=np.float64)
    raan = np.deg2rad(params.epoch_raan_offset_deg + p * 360.0 / params.num_planes)
    phase0 = np.deg2rad(
        s[None, :] * 360.0 / params.sats_per_plane
        + p[:, None] * params.phasing_factor * 360.0 / (params.num_planes * params.sats_per_plane)
    )
    u = phase0 + params.mean_motion_rad_s * t
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan)[:, None], np.sin(raan)[:, None]
    inc = np.deg2rad(params.inclination_deg)
    cos_i, sin_i = np.cos(inc), np.sin(inc)
    r = params.orbit_radius_km
    x = r * (cos_o * cos_u - sin_o * sin_u * cos_i)
    y = r * (sin_o * cos_u + cos_o * sin_u * cos_i)
    z = r * (sin_u * sin_i)
    return np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)


def propagate(params: ConstellationParams, slot: int, slot_duration_s: float) -> list[BodyState]:
    """States of all satellites at a slot; node ids are plane-major 0..S-1."""
    pos = satellite_positions(params, slot, slot_duration_s)
    return [
        BodyState(node_id=i, position_km=(pos[i, 0], pos[i, 1], pos[i, 2]), slot=slot)
        for i in range(pos.shape[0])
    ]


def ground_station_position(gs: GroundStation, slot: int, slot_duration_s: float) -> np.ndarray:
    t = _slot_time_s(slot, slot_duration_s)
    lon = np.deg2rad(gs.longitude_deg + 360.0 / SIDEREAL_DAY_S * t)
    lat = np.deg2rad(gs.latitude_deg)
    return np.array(
        [
            EARTH_RADIUS_KM * np.cos(lat) * np.cos(lon),
            EARTH_RADIUS_KM * np.cos(lat) * np.sin(lon),
            EARTH_RADIUS_KM * np.sin(lat),
        ]
    )


def ground_station_state(gs: GroundStation, slot: int, slot_duration_s: float) -> BodyState:
    """State of a ground station on the rotating spherical Earth."""
    pos = ground_station_position(gs, slot, slot_duration_s)
    return BodyState(
        node_id=gs.id, position_km=(pos[0], pos[1], pos[2]), slot=slot, is_ground=True
    )


def delay_ms(distance_km: np.ndarray, node_delay_ms: float) -> np.ndarray:
    """Edge cost: light travel time plus the fixed node delay, in ms.

    Quantized to 9 fractional digits so that the on-disk snapshot format
    round-trips bit-exactly.
    """
    return np.round(distance_km / SPEED_OF_LIGHT_KM_S * 1000.0 + node_delay_ms, 9)


def build_snapshot(states: list[BodyState], scenario: ScenarioParams):
    """Snapshot of all feasible edges among the given bodies at one slot.

    Satellite pairs connect when their distance is <= the LISL range,
    ground-satellite pairs when <= the GS range (both inclusive); ground
    stations never connect to each other. Edges are stored canonically as
    (min id, max id) sorted pairs.
    """
    from .topology import Snapshot

    if not states:
        raise ValueError("no body states supplied")
    slots = {st.slot for st in states}
    if len(slots) != 1:
        raise ValueError("states must all belong to one slot")
    slot = slots.pop()

    sats = sorted((st for st in states if not st.is_ground), key=lambda st: st.node_id)
    grounds = sorted((st for st in states if st.is_ground), key=lambda st: st.node_id)
    sat_ids = np.array([st.node_id for st in sats], dtype=np.int64)
    gs_ids = np.array([st.node_id for st in grounds], dtype=np.int64)
    sat_pos = np.array([st.position_km for st in sats], dtype=np.float64).reshape(-1, 3)
    gs_pos = np.array([st.position_km for st in grounds], dtype=np.float64).reshape(-1, 3)

    si, sj, sat_d2 = kernels.pair_edges(sat_pos, scenario.lisl_range_km)
    gi, gj, gs_d2 = kernels.cross_edges(gs_pos, sat_pos, scenario.gs_range_km)

    u_sat = sat_ids[si]
    v_sat = sat_ids[sj]
    a = gs_ids[gi]
    b = sat_ids[gj]
    u_gs = np.minimum(a, b)
    v_gs = np.maximum(a, b)

    u = np.concatenate([u_sat, u_gs])
    v = np.concatenate([v_sat, v_gs])
    dist = np.sqrt(np.concatenate([sat_d2, gs_d2]))
    delays = delay_ms(dist, scenario.node_delay_ms)

    num_nodes = int(max(sat_ids.max(initial=-1), gs_ids.max(initial=-1))) + 1
    if len(grounds):
        if len(sats) and gs_ids.min() <= sat_ids.max():
            raise ValueError("ground station ids must come after all satellite ids")
        num_satellites = int(sat_ids.max()) + 1 if len(sats) else 0
    else:
        num_satellites = num_nodes
    return Snapshot(slot, u, v, delays, num_nodes=num_nodes, num_satellites=num_satellites)


def generate_series(
    params: ConstellationParams,
    ground_stations: list[GroundStation],
    scenario: ScenarioParams,
):
    """Propagate the constellation over all slots and snapshot each one."""
    from .topology import NodeRoster, SnapshotSeries

    roster = NodeRoster(
        num_satellites=params.num_satellites, ground_stations=tuple(ground_stations)
    )
    snapshots = []
    for slot in range(1, scenario.num_slots + 1):
        states = propagate(params, slot, scenario.slot_duration_s)
        states.extend(
            ground_station_state(gs, slot, scenario.slot_duration_s) for gs in ground_stations
        )
        snapshots.append(build_snapshot(states, scenario))
    return SnapshotSeries(scenario=scenario, roster=roster, snapshots=snapshots)
