//! Simulation outcome types.

/// The `<latency, power, energy>` outcome of simulating one trace under one
/// controller configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimMetrics {
    /// Mean per-request latency from trace issue cycle to response
    /// delivery, in nanoseconds.
    pub latency_ns: f64,
    /// Total energy divided by total simulated wall time.
    pub power_mw: f64,
    /// Total energy over the trace, in picojoules.
    pub energy_pj: f64,
    /// Simulated duration in controller cycles (cycle 0 through the last
    /// response delivery, inclusive).
    pub total_cycles: u64,
}

/// Per-command-kind issue counts, kept alongside the running energy sum so
/// the two can be cross-checked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommandCounts {
    pub activates: u64,
    pub reads: u64,
    pub writes: u64,
    pub refreshes: u64,
}

/// Full simulation report: headline metrics plus the command ledger and
/// per-request delivery cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub metrics: SimMetrics,
    pub counts: CommandCounts,
    /// Delivery cycle of each trace request, in trace order.
    pub deliver_cycle: Vec<u64>,
}
