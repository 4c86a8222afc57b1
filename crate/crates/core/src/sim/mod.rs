//! End-to-end experiment runs.
//!
//! Two engines share the same pre-generated workload: `analytic` evaluates
//! the closed-form delays with a static equal split of the uplink, `event`
//! plays the tasks through a discrete-event model with queued resources.

mod analytic;
mod event;
mod experiment;
mod metrics;
mod workload;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use analytic::run_analytic;
pub use event::{run_event, run_event_detailed, PhaseBreakdown};
pub use experiment::{experiment_fig3, experiment_fig4, SweepRow, FIG3_WIDTHS_PX, FIG4_USERS};
pub use metrics::{CacheTraceRow, MetricsRecord, TaskRecord};
pub use workload::{generate_tasks, make_task, WorkloadKind, WorkloadSpec, WorkloadState};

use crate::cache::SimilarityMetric;
use crate::channel::ChannelParams;
use crate::error::{require_non_negative, require_positive, ModelError, Result};
use crate::offload::NodeProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Cache lookup plus min-delay choice between edge and cloud.
    #[default]
    Cocaco,
    /// Every task goes to the cloud.
    Traditional,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Cocaco => f.write_str("cocaco"),
            Mode::Traditional => f.write_str("traditional"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Event,
}

/// Fixed-rate part of the link: downlink and edge-to-cloud transport.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedLink {
    pub downlink_rate_bps: f64,
    pub backhaul_latency_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub mode: Mode,
    pub engine: Engine,
    pub n_users: usize,
    pub tasks_per_user: usize,
    pub channel: ChannelParams,
    pub link: FixedLink,
    pub edge: NodeProfile,
    pub cloud: NodeProfile,
    pub cache_capacity: usize,
    pub metric: SimilarityMetric,
    pub workload: WorkloadSpec,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(ModelError::domain("n_users", "must be >= 1"));
        }
        if self.tasks_per_user == 0 {
            return Err(ModelError::domain("tasks_per_user", "must be >= 1"));
        }
        if self.cache_capacity == 0 {
            return Err(ModelError::domain("cache_capacity", "must be >= 1"));
        }
        self.channel.validate()?;
        require_positive("downlink_rate_bps", self.link.downlink_rate_bps)?;
        require_non_negative("backhaul_latency_s", self.link.backhaul_latency_s)?;
        self.edge.validate()?;
        self.cloud.validate()?;
        self.workload.validate()
    }

    /// Runs the scenario with whichever engine it selects.
    pub fn run(&self) -> Result<MetricsRecord> {
        match self.engine {
            Engine::Analytic => run_analytic(self),
            Engine::Event => run_event(self),
        }
    }
}
