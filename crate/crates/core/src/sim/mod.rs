//! Deterministic transaction-level surrogate of a DRAM memory controller.
//!
//! [`simulate`] maps a (trace, controller config, device profile) triple to
//! `<latency, power, energy>` metrics. The model is a pure function of its
//! arguments: identical inputs always produce bit-identical outputs.

mod config;
mod engine;
mod metrics;
mod profile;

pub use config::{
    design_space_size, validate_config, Arbiter, ConfigViolation, McConfig, PagePolicy, Param,
    RefreshPolicy, RespQueue, Scheduler, SchedulerBuffer, PARAMS,
};
pub use metrics::{CommandCounts, SimMetrics, SimReport};
pub use profile::DramProfile;

use crate::trace::MemoryTrace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid controller config: {0}")]
    InvalidConfig(String),
    #[error("invalid DRAM profile: {0}")]
    InvalidProfile(String),
    #[error("trace is empty")]
    EmptyTrace,
}

/// Runs the full simulation and returns headline metrics only.
pub fn simulate(
    trace: &MemoryTrace,
    cfg: &McConfig,
    profile: &DramProfile,
) -> Result<SimMetrics, SimError> {
    simulate_detailed(trace, cfg, profile).map(|r| r.metrics)
}

/// Runs the full simulation and returns metrics plus the command ledger and
/// per-request delivery cycles.
pub fn simulate_detailed(
    trace: &MemoryTrace,
    cfg: &McConfig,
    profile: &DramProfile,
) -> Result<SimReport, SimError> {
    if trace.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let violations = validate_config(cfg);
    if !violations.is_empty() {
        let joined = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(SimError::InvalidConfig(joined));
    }
    profile.validate()?;
    Ok(engine::Engine::new(trace, cfg, profile).run())
}
