//! Memory-controller configuration: the ten tunable parameters and their
//! admissible value grids.

use std::fmt;

/// Row-buffer management policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PagePolicy {
    /// Keep a row open until a conflicting request forces a precharge.
    Open,
    /// Keep the row open unless a request for a different row in the same
    /// bank is already waiting when the access completes.
    OpenAdaptive,
    /// Auto-precharge after every column access.
    Closed,
    /// Precharge after an access unless a request for the same row is
    /// already waiting.
    ClosedAdaptive,
}

/// Request scheduling policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheduler {
    /// Strictly service requests in arrival order.
    Fifo,
    /// FR-FCFS, additionally grouping same-kind (read/write) bursts before
    /// switching transfer direction.
    FrFcfsGrp,
    /// First-ready FCFS: row-buffer hits are serviced before older misses.
    FrFcfs,
}

/// Scheduler queue topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerBuffer {
    /// One queue per bank.
    Bankwise,
    /// One read queue plus one write queue.
    ReadWrite,
    /// A single queue for everything.
    Shared,
}

/// Front-end admission policy from the trace port into the scheduler queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arbiter {
    /// Admit one request per cycle in trace order.
    Simple,
    /// Like `Simple` but through a one-cycle staging register.
    Fifo,
    /// Admit up to two requests per cycle, preferring row-buffer hits.
    Reorder,
}

/// Response delivery ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RespQueue {
    /// Deliver in admission order; a completed younger request waits.
    Fifo,
    /// Deliver in completion order.
    Reorder,
}

/// Refresh management.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefreshPolicy {
    /// Never refresh. The refresh postpone/pull-in limits become inert.
    NoRefresh,
    /// All-bank refresh every `t_refi` cycles with bounded postpone/pull-in.
    AllBank,
}

/// A complete assignment of the ten controller parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct McConfig {
    /// How many due refreshes may be deferred, in `[1, 8]`.
    pub refresh_max_postponed: u32,
    /// How many refreshes may be issued early, in `[1, 8]`.
    pub refresh_max_pulledin: u32,
    /// Capacity of each scheduler queue, in `[1, 8]`.
    pub request_buffer_size: u32,
    /// Cap on transactions in flight between admission and response
    /// delivery; a power of two in `[1, 128]`.
    pub max_active_transactions: u32,
    pub page_policy: PagePolicy,
    pub scheduler: Scheduler,
    pub scheduler_buffer: SchedulerBuffer,
    pub arbiter: Arbiter,
    pub resp_queue: RespQueue,
    pub refresh_policy: RefreshPolicy,
}

impl Default for McConfig {
    /// A mid-range controller used as the reference point for environment
    /// observations and default objective targets.
    fn default() -> Self {
        Self {
            refresh_max_postponed: 4,
            refresh_max_pulledin: 4,
            request_buffer_size: 4,
            max_active_transactions: 16,
            page_policy: PagePolicy::Open,
            scheduler: Scheduler::FrFcfs,
            scheduler_buffer: SchedulerBuffer::Shared,
            arbiter: Arbiter::Simple,
            resp_queue: RespQueue::Fifo,
            refresh_policy: RefreshPolicy::AllBank,
        }
    }
}

/// One violated range/grid constraint, as returned by [`validate_config`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks every numeric field against its admissible grid. Returns an empty
/// list iff the configuration is valid; violations are reported, not thrown.
pub fn validate_config(cfg: &McConfig) -> Vec<ConfigViolation> {
    let mut out = Vec::new();
    let mut range = |field: &'static str, v: u32, lo: u32, hi: u32| {
        if v < lo || v > hi {
            out.push(ConfigViolation {
                field,
                message: format!("{v} out of range [{lo},{hi}]"),
            });
        }
    };
    range("refresh_max_postponed", cfg.refresh_max_postponed, 1, 8);
    range("refresh_max_pulledin", cfg.refresh_max_pulledin, 1, 8);
    range("request_buffer_size", cfg.request_buffer_size, 1, 8);
    range(
        "max_active_transactions",
        cfg.max_active_transactions,
        1,
        128,
    );
    if !cfg.max_active_transactions.is_power_of_two() {
        out.push(ConfigViolation {
            field: "max_active_transactions",
            message: format!("{} is not a power of two", cfg.max_active_transactions),
        });
    }
    out
}

/// Identifies one of the ten tunable parameters, in the canonical order
/// used everywhere (action factors, CSV columns, checkpoint layout).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    RefreshMaxPostponed,
    RefreshMaxPulledin,
    RequestBufferSize,
    MaxActiveTransactions,
    PagePolicy,
    Scheduler,
    SchedulerBuffer,
    Arbiter,
    RespQueue,
    RefreshPolicy,
}

/// All parameters in canonical order.
pub const PARAMS: [Param; 10] = [
    Param::RefreshMaxPostponed,
    Param::RefreshMaxPulledin,
    Param::RequestBufferSize,
    Param::MaxActiveTransactions,
    Param::PagePolicy,
    Param::Scheduler,
    Param::SchedulerBuffer,
    Param::Arbiter,
    Param::RespQueue,
    Param::RefreshPolicy,
];

impl Param {
    /// Number of admissible values on this parameter's grid.
    pub fn cardinality(self) -> usize {
        match self {
            Param::RefreshMaxPostponed
            | Param::RefreshMaxPulledin
            | Param::RequestBufferSize
            | Param::MaxActiveTransactions => 8,
            Param::PagePolicy => 4,
            Param::Scheduler | Param::SchedulerBuffer | Param::Arbiter => 3,
            Param::RespQueue | Param::RefreshPolicy => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::RefreshMaxPostponed => "refresh_max_postponed",
            Param::RefreshMaxPulledin => "refresh_max_pulledin",
            Param::RequestBufferSize => "request_buffer_size",
            Param::MaxActiveTransactions => "max_active_transactions",
            Param::PagePolicy => "page_policy",
            Param::Scheduler => "scheduler",
            Param::SchedulerBuffer => "scheduler_buffer",
            Param::Arbiter => "arbiter",
            Param::RespQueue => "resp_queue",
            Param::RefreshPolicy => "refresh_policy",
        }
    }

    /// Whether the parameter is a numeric grid (as opposed to categorical).
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            Param::RefreshMaxPostponed
                | Param::RefreshMaxPulledin
                | Param::RequestBufferSize
                | Param::MaxActiveTransactions
        )
    }

    /// Writes grid position `idx` of this parameter into `cfg`.
    /// Panics if `idx` is out of range; callers validate first.
    pub fn apply(self, cfg: &mut McConfig, idx: usize) {
        assert!(idx < self.cardinality(), "{}: grid index {idx}", self.name());
        match self {
            Param::RefreshMaxPostponed => cfg.refresh_max_postponed = idx as u32 + 1,
            Param::RefreshMaxPulledin => cfg.refresh_max_pulledin = idx as u32 + 1,
            Param::RequestBufferSize => cfg.request_buffer_size = idx as u32 + 1,
            Param::MaxActiveTransactions => cfg.max_active_transactions = 1 << idx,
            Param::PagePolicy => {
                cfg.page_policy = [
                    PagePolicy::Open,
                    PagePolicy::OpenAdaptive,
                    PagePolicy::Closed,
                    PagePolicy::ClosedAdaptive,
                ][idx]
            }
            Param::Scheduler => {
                cfg.scheduler = [Scheduler::Fifo, Scheduler::FrFcfsGrp, Scheduler::FrFcfs][idx]
            }
            Param::SchedulerBuffer => {
                cfg.scheduler_buffer = [
                    SchedulerBuffer::Bankwise,
                    SchedulerBuffer::ReadWrite,
                    SchedulerBuffer::Shared,
                ][idx]
            }
            Param::Arbiter => {
                cfg.arbiter = [Arbiter::Simple, Arbiter::Fifo, Arbiter::Reorder][idx]
            }
            Param::RespQueue => cfg.resp_queue = [RespQueue::Fifo, RespQueue::Reorder][idx],
            Param::RefreshPolicy => {
                cfg.refresh_policy = [RefreshPolicy::NoRefresh, RefreshPolicy::AllBank][idx]
            }
        }
    }

    /// Grid position of this parameter's value in `cfg`, or `None` if the
    /// value is off-grid (e.g. `max_active_transactions = 3`).
    pub fn extract(self, cfg: &McConfig) -> Option<usize> {
        let idx = match self {
            Param::RefreshMaxPostponed => cfg.refresh_max_postponed.checked_sub(1)? as usize,
            Param::RefreshMaxPulledin => cfg.refresh_max_pulledin.checked_sub(1)? as usize,
            Param::RequestBufferSize => cfg.request_buffer_size.checked_sub(1)? as usize,
            Param::MaxActiveTransactions => {
                if !cfg.max_active_transactions.is_power_of_two() {
                    return None;
                }
                cfg.max_active_transactions.trailing_zeros() as usize
            }
            Param::PagePolicy => cfg.page_policy as usize,
            Param::Scheduler => cfg.scheduler as usize,
            Param::SchedulerBuffer => cfg.scheduler_buffer as usize,
            Param::Arbiter => cfg.arbiter as usize,
            Param::RespQueue => cfg.resp_queue as usize,
            Param::RefreshPolicy => cfg.refresh_policy as usize,
        };
        (idx < self.cardinality()).then_some(idx)
    }

    /// Human-readable label of grid position `idx` (used in CSV output).
    pub fn value_label(self, idx: usize) -> String {
        let mut cfg = McConfig::default();
        self.apply(&mut cfg, idx);
        match self {
            Param::RefreshMaxPostponed => cfg.refresh_max_postponed.to_string(),
            Param::RefreshMaxPulledin => cfg.refresh_max_pulledin.to_string(),
            Param::RequestBufferSize => cfg.request_buffer_size.to_string(),
            Param::MaxActiveTransactions => cfg.max_active_transactions.to_string(),
            Param::PagePolicy => format!("{:?}", cfg.page_policy),
            Param::Scheduler => format!("{:?}", cfg.scheduler),
            Param::SchedulerBuffer => format!("{:?}", cfg.scheduler_buffer),
            Param::Arbiter => format!("{:?}", cfg.arbiter),
            Param::RespQueue => format!("{:?}", cfg.resp_queue),
            Param::RefreshPolicy => format!("{:?}", cfg.refresh_policy),
        }
    }
}

/// Total number of distinct configurations on the full grid.
pub fn design_space_size() -> u64 {
    PARAMS.iter().map(|p| p.cardinality() as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_space_cardinality() {
        // 8 * 8 * 8 * 8 * 4 * 3 * 3 * 3 * 2 * 2
        assert_eq!(design_space_size(), 1_769_472);
    }

    #[test]
    fn minima_are_valid() {
        let mut cfg = McConfig::default();
        for p in PARAMS {
            p.apply(&mut cfg, 0);
        }
        assert!(validate_config(&cfg).is_empty());
        assert_eq!(cfg.refresh_max_postponed, 1);
        assert_eq!(cfg.max_active_transactions, 1);
        assert_eq!(cfg.page_policy, PagePolicy::Open);
        assert_eq!(cfg.refresh_policy, RefreshPolicy::NoRefresh);
    }

    #[test]
    fn non_power_of_two_transactions_rejected() {
        let cfg = McConfig {
            max_active_transactions: 3,
            ..McConfig::default()
        };
        let violations = validate_config(&cfg);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "max_active_transactions");
        assert!(violations[0].message.contains("not a power of two"));
    }

    #[test]
    fn buffer_size_out_of_range() {
        let cfg = McConfig {
            request_buffer_size: 9,
            ..McConfig::default()
        };
        let violations = validate_config(&cfg);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("out of range [1,8]"));
    }

    #[test]
    fn apply_extract_round_trip() {
        let mut cfg = McConfig::default();
        for p in PARAMS {
            for idx in 0..p.cardinality() {
                p.apply(&mut cfg, idx);
                assert_eq!(p.extract(&cfg), Some(idx));
            }
        }
    }

    #[test]
    fn grid_landmarks() {
        let mut cfg = McConfig::default();
        Param::MaxActiveTransactions.apply(&mut cfg, 5);
        assert_eq!(cfg.max_active_transactions, 32);
        Param::PagePolicy.apply(&mut cfg, 1);
        assert_eq!(cfg.page_policy, PagePolicy::OpenAdaptive);
    }
}
