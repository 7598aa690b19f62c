//! Batch simulator of a storage cluster running an FR code under an MDS
//! outer code: failures, exact uncoded repair, collector reads.

mod cluster;
mod scenario;

pub use cluster::{events_jsonl, ClusterState, Event, NodeStatus, RepairLog, RepairMode, RepairPolicy};
pub use scenario::{
    run_scenario, CodeSource, CollectorQueries, FailureSchedule, FileSource, RepairFailure, ScenarioConfig,
    ScenarioReport,
};
