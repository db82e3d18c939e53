//! Deterministic discrete-time MANET simulator.
//!
//! Each step publishes whatever the scenario schedules, moves the stations,
//! and runs one synchronous round: every station beacons from its
//! pre-round state, offers are computed against each neighbour's beacon,
//! and all deliveries land at once. A publication therefore travels at most
//! one hop per step.

mod metrics;
mod scenario;
mod world;

pub use metrics::{run, simulate, MetricsReport, PublicationMetrics, Totals};
pub use scenario::{
    load_scenario, Area, ConfigError, LoadError, MobilitySpec, NodeConfig, Point, ScenarioConfig,
    ScheduledPublication,
};
pub use world::{Counters, Mobility, PlannedPublication, Receipt, SimNode, Trace, Transfer, UnknownNode, World};
