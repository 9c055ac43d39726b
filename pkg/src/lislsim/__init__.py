"""lislsim: routing over time-sliced LEO constellations with dynamic laser links."""

__version__ = "0.1.0"

from .constellation import (
    BodyState,
    ConstellationParams,
    GroundStation,
    ScenarioParams,
    build_snapshot,
    generate_series,
    ground_station_state,
    propagate,
)
from .topology import (
    ContiguousRun,
    LinkDetails,
    NodeRoster,
    SeriesFormatError,
    Snapshot,
    SnapshotSeries,
    build_link_details,
    contiguous_run,
    export_series,
    import_series,
)
from .routing import (
    Route,
    RoutingSchedule,
    alpr,
    alpr_average_latency,
    dijkstra,
    disjoint_routes,
    ilpr,
    ilsr,
    isasr,
    isasr_stability_cost,
    route_lifetime,
    run_algorithm,
)
from .oracle import (
    brute_force_optimal,
    dp_optimal,
    enumerate_routes,
    load_delay_matrix,
    save_delay_matrix,
)
from .metrics import (
    MetricsReport,
    average_jitter,
    eta_delay,
    eta_le,
    eta_penalty,
    evaluate,
    histogram,
    instantaneous_latency_series,
    outage_probability,
    route_change_rate,
)
from .config import ExperimentConfig, OracleConfig, default_config, load_config
