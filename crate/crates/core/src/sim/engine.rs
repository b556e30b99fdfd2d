//! The transaction-level controller/DRAM engine.
//!
//! A single-rank, single-channel model stepped in controller cycles. Within
//! one cycle, events are handled in a fixed order:
//!
//!   1. move arrived trace requests into the injection backlog
//!   2. refresh deadline bookkeeping
//!   3. column-command completions (and page close decisions)
//!   4. response delivery (at most one per cycle)
//!   5. request admission through the arbiter
//!   6. one DRAM command (refresh has priority over the scheduler)
//!   7. idle-streak accounting
//!
//! All ties are broken by trace arrival index, so the whole model is a pure
//! function of its inputs. Cycles where provably nothing can happen are
//! skipped by jumping to the next pending timer/arrival/deadline.
//!
//! Timing model per request: an activate makes the row usable after
//! `t_rcd`; a read returns data `t_cl + t_burst` cycles after its column
//! command, a write is acknowledged after `t_burst`; column commands are
//! globally spaced by `t_burst` (single data bus); a precharge may start
//! `max(t_ras after activate, last column completion)` and takes `t_rp`.
//! An all-bank refresh occupies every bank for `t_rfc` and leaves them
//! precharged.

use super::config::{
    Arbiter, McConfig, PagePolicy, RefreshPolicy, RespQueue, Scheduler, SchedulerBuffer,
};
use super::metrics::{CommandCounts, SimMetrics, SimReport};
use super::profile::DramProfile;
use crate::trace::{AccessKind, MemoryTrace};
use std::collections::VecDeque;

/// How many backlog entries the reorder arbiter examines per cycle.
const REORDER_ADMIT_WINDOW: usize = 8;

const NOT_YET: u64 = u64::MAX;

struct Req {
    issue: u64,
    kind: AccessKind,
    row: u32,
    bank: usize,
}

#[derive(Clone, Copy)]
struct Bank {
    open_row: Option<u32>,
    /// With a closed row: earliest activate cycle (covers precharge and
    /// refresh). With an open row: earliest column-command cycle.
    ready_at: u64,
    act_cycle: u64,
    /// Completion cycle of the latest column op issued to this bank.
    col_done_max: u64,
    /// Column ops in flight on this bank.
    outstanding: u32,
    /// Close the row once `outstanding` drains to zero.
    pending_close: bool,
}

impl Bank {
    fn new() -> Self {
        Bank {
            open_row: None,
            ready_at: 0,
            act_cycle: 0,
            col_done_max: 0,
            outstanding: 0,
            pending_close: false,
        }
    }

    /// Earliest cycle an open row may start precharging.
    fn pre_ok(&self, t_ras: u64) -> u64 {
        self.act_cycle.saturating_add(t_ras).max(self.col_done_max)
    }
}

#[derive(Clone, Copy)]
struct InFlight {
    done: u64,
    req: u32,
}

enum Cmd {
    Activate { req: u32 },
    Precharge { bank: usize },
    Column { req: u32 },
}

pub(super) struct Engine<'a> {
    cfg: &'a McConfig,
    profile: &'a DramProfile,
    reqs: Vec<Req>,

    cycle: u64,
    next_arrival: usize,
    backlog: VecDeque<u32>,
    staging: Option<u32>,

    queue_occupancy: Vec<u32>,
    /// Queued request indices, kept sorted by arrival index.
    queued: Vec<u32>,
    active: u32,

    banks: Vec<Bank>,
    inflight: Vec<InFlight>,
    next_col_ok: u64,
    group_kind: AccessKind,

    /// Per-bank scratch: does any queued request hit the bank's open row?
    hit_wait: Vec<bool>,

    admit_pos: Vec<u32>,
    admit_seq: Vec<u32>,
    complete_cycle: Vec<u64>,
    deliver_ptr: usize,
    ready_resp: Vec<u32>,
    deliver_cycle: Vec<u64>,
    delivered: usize,

    refresh_on: bool,
    next_deadline: u64,
    refs_owed: u32,
    refs_credit: u32,
    idle_streak: u64,

    energy_pj: f64,
    counts: CommandCounts,
}

impl<'a> Engine<'a> {
    pub(super) fn new(trace: &MemoryTrace, cfg: &'a McConfig, profile: &'a DramProfile) -> Self {
        let reqs: Vec<Req> = trace
            .requests()
            .iter()
            .map(|r| {
                let (row, bank, _col) = profile.decode_addr(r.addr);
                Req {
                    issue: r.issue_cycle,
                    kind: r.kind,
                    row,
                    bank: bank as usize,
                }
            })
            .collect();
        let n_queues = match cfg.scheduler_buffer {
            SchedulerBuffer::Shared => 1,
            SchedulerBuffer::ReadWrite => 2,
            SchedulerBuffer::Bankwise => profile.num_banks as usize,
        };
        let n = reqs.len();
        Engine {
            cfg,
            profile,
            reqs,
            cycle: 0,
            next_arrival: 0,
            backlog: VecDeque::new(),
            staging: None,
            queue_occupancy: vec![0; n_queues],
            queued: Vec::new(),
            active: 0,
            banks: vec![Bank::new(); profile.num_banks as usize],
            inflight: Vec::new(),
            next_col_ok: 0,
            group_kind: AccessKind::Read,
            hit_wait: vec![false; profile.num_banks as usize],
            admit_pos: vec![0; n],
            admit_seq: Vec::new(),
            complete_cycle: vec![NOT_YET; n],
            deliver_ptr: 0,
            ready_resp: Vec::new(),
            deliver_cycle: vec![NOT_YET; n],
            delivered: 0,
            refresh_on: cfg.refresh_policy == RefreshPolicy::AllBank,
            next_deadline: profile.t_refi,
            refs_owed: 0,
            refs_credit: 0,
            idle_streak: 0,
            energy_pj: 0.0,
            counts: CommandCounts::default(),
        }
    }

    fn queue_of(&self, req: u32) -> usize {
        let r = &self.reqs[req as usize];
        match self.cfg.scheduler_buffer {
            SchedulerBuffer::Shared => 0,
            SchedulerBuffer::ReadWrite => match r.kind {
                AccessKind::Read => 0,
                AccessKind::Write => 1,
            },
            SchedulerBuffer::Bankwise => r.bank,
        }
    }

    fn admissible(&self, req: u32) -> bool {
        self.queue_occupancy[self.queue_of(req)] < self.cfg.request_buffer_size
            && self.active < self.cfg.max_active_transactions
    }

    fn admit(&mut self, req: u32) {
        let q = self.queue_of(req);
        self.queue_occupancy[q] += 1;
        self.active += 1;
        self.admit_pos[req as usize] = self.admit_seq.len() as u32;
        self.admit_seq.push(req);
        let at = self.queued.partition_point(|&q| q < req);
        self.queued.insert(at, req);
    }

    /// True when the request would be a row-buffer hit against the current
    /// bank state.
    fn is_row_hit(&self, req: u32) -> bool {
        let r = &self.reqs[req as usize];
        self.banks[r.bank].open_row == Some(r.row)
    }

    fn arrivals(&mut self) -> bool {
        let mut moved = false;
        while self.next_arrival < self.reqs.len()
            && self.reqs[self.next_arrival].issue <= self.cycle
        {
            self.backlog.push_back(self.next_arrival as u32);
            self.next_arrival += 1;
            moved = true;
        }
        moved
    }

    fn refresh_bookkeeping(&mut self) -> bool {
        if !self.refresh_on {
            return false;
        }
        let mut crossed = false;
        while self.cycle >= self.next_deadline {
            if self.refs_credit > 0 {
                self.refs_credit -= 1;
            } else {
                self.refs_owed += 1;
            }
            self.next_deadline += self.profile.t_refi;
            crossed = true;
        }
        crossed
    }

    fn completions(&mut self) -> bool {
        let mut any = false;
        let mut i = 0;
        // inflight is small; scan for ops finishing this cycle, oldest first
        while i < self.inflight.len() {
            if self.inflight[i].done == self.cycle {
                let fl = self.inflight.remove(i);
                self.complete_one(fl.req);
                any = true;
            } else {
                i += 1;
            }
        }
        any
    }

    fn complete_one(&mut self, req: u32) {
        self.complete_cycle[req as usize] = self.cycle;
        if self.cfg.resp_queue == RespQueue::Reorder {
            self.ready_resp.push(req);
        }
        let bank_id = self.reqs[req as usize].bank;
        let t_ras = self.profile.t_ras;
        let t_rp = self.profile.t_rp;

        let close = {
            let bank = &mut self.banks[bank_id];
            bank.outstanding -= 1;
            if bank.outstanding > 0 {
                false
            } else {
                match self.cfg.page_policy {
                    PagePolicy::Open => false,
                    PagePolicy::Closed => bank.pending_close,
                    PagePolicy::OpenAdaptive | PagePolicy::ClosedAdaptive => {
                        let open_row = bank.open_row;
                        let mut same_row = false;
                        let mut same_bank = false;
                        for &q in &self.queued {
                            let r = &self.reqs[q as usize];
                            if r.bank == bank_id {
                                same_bank = true;
                                if Some(r.row) == open_row {
                                    same_row = true;
                                    break;
                                }
                            }
                        }
                        match self.cfg.page_policy {
                            PagePolicy::OpenAdaptive => same_bank && !same_row,
                            _ => !same_row,
                        }
                    }
                }
            }
        };
        if close {
            let bank = &mut self.banks[bank_id];
            let start = bank.pre_ok(t_ras).max(self.cycle);
            bank.open_row = None;
            bank.ready_at = start + t_rp;
            bank.pending_close = false;
        }
    }

    fn deliver(&mut self) -> bool {
        match self.cfg.resp_queue {
            RespQueue::Fifo => {
                if self.deliver_ptr < self.admit_seq.len() {
                    let req = self.admit_seq[self.deliver_ptr];
                    if self.complete_cycle[req as usize] != NOT_YET {
                        self.deliver_ptr += 1;
                        self.deliver_one(req);
                        return true;
                    }
                }
                false
            }
            RespQueue::Reorder => {
                // earliest completion first, then admission order
                let best = self
                    .ready_resp
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &req)| {
                        (
                            self.complete_cycle[req as usize],
                            self.admit_pos[req as usize],
                        )
                    })
                    .map(|(i, _)| i);
                if let Some(i) = best {
                    let req = self.ready_resp.swap_remove(i);
                    self.deliver_one(req);
                    true
                } else {
                    false
                }
            }
        }
    }

    fn deliver_one(&mut self, req: u32) {
        self.deliver_cycle[req as usize] = self.cycle;
        self.delivered += 1;
        self.active -= 1;
    }

    fn admissions(&mut self) -> bool {
        match self.cfg.arbiter {
            Arbiter::Simple => {
                if let Some(&head) = self.backlog.front() {
                    if self.admissible(head) {
                        self.backlog.pop_front();
                        self.admit(head);
                        return true;
                    }
                }
                false
            }
            Arbiter::Fifo => {
                let mut any = false;
                if let Some(r) = self.staging {
                    if self.admissible(r) {
                        self.staging = None;
                        self.admit(r);
                        any = true;
                    }
                }
                if self.staging.is_none() {
                    if let Some(head) = self.backlog.pop_front() {
                        // admitted next cycle at the earliest
                        self.staging = Some(head);
                        any = true;
                    }
                }
                any
            }
            Arbiter::Reorder => {
                let mut any = false;
                for _ in 0..2 {
                    let window = REORDER_ADMIT_WINDOW.min(self.backlog.len());
                    let mut pick: Option<(bool, usize)> = None;
                    for i in 0..window {
                        let req = self.backlog[i];
                        if !self.admissible(req) {
                            continue;
                        }
                        let hit = self.is_row_hit(req);
                        match pick {
                            Some((best_hit, _)) if best_hit || !hit => {}
                            _ => pick = Some((hit, i)),
                        }
                        if hit {
                            break; // oldest hit wins; nothing can beat it
                        }
                    }
                    match pick {
                        Some((_, i)) => {
                            let req = self.backlog.remove(i).unwrap();
                            self.admit(req);
                            any = true;
                        }
                        None => break,
                    }
                }
                any
            }
        }
    }

    fn total_outstanding(&self) -> u32 {
        self.banks.iter().map(|b| b.outstanding).sum()
    }

    /// No bank is mid-operation: nothing in flight, every timer expired,
    /// every open row past its precharge gate.
    fn banks_quiet(&self) -> bool {
        self.banks.iter().all(|b| {
            b.outstanding == 0
                && b.ready_at <= self.cycle
                && (b.open_row.is_none() || b.pre_ok(self.profile.t_ras) <= self.cycle)
        })
    }

    fn demand_pending(&self) -> bool {
        !self.queued.is_empty() || self.staging.is_some() || !self.backlog.is_empty()
    }

    fn issue_refresh(&mut self) {
        for bank in &mut self.banks {
            bank.open_row = None;
            bank.ready_at = self.cycle + self.profile.t_rfc;
            bank.pending_close = false;
        }
        self.counts.refreshes += 1;
        self.energy_pj += self.profile.e_ref_nj * 1000.0;
    }

    /// Tries to issue a refresh this cycle. Returns true if the command bus
    /// was used.
    fn refresh_command(&mut self) -> bool {
        if !self.refresh_on {
            return false;
        }
        if self.refs_owed > 0 {
            let forced = self.refs_owed >= self.cfg.refresh_max_postponed;
            if self.banks_quiet() && (forced || !self.demand_pending()) {
                self.issue_refresh();
                self.refs_owed -= 1;
                return true;
            }
        } else if self.refs_credit < self.cfg.refresh_max_pulledin
            && self.idle_streak >= self.profile.t_rfc
            && self.banks_quiet()
            && !self.demand_pending()
        {
            self.issue_refresh();
            self.refs_credit += 1;
            return true;
        }
        false
    }

    /// Refreshes the per-bank "a queued request hits the open row" scratch.
    fn refresh_hit_wait(&mut self) {
        self.hit_wait.iter_mut().for_each(|f| *f = false);
        for &q in &self.queued {
            let r = &self.reqs[q as usize];
            if self.banks[r.bank].open_row == Some(r.row) {
                self.hit_wait[r.bank] = true;
            }
        }
    }

    /// Next command for a queued request given current bank state, if it
    /// can issue this cycle. `hit_wait` must be current.
    fn issuable_cmd(&self, req: u32) -> Option<Cmd> {
        let r = &self.reqs[req as usize];
        let bank = &self.banks[r.bank];
        match bank.open_row {
            Some(row) if row == r.row => {
                if !bank.pending_close
                    && self.cycle >= bank.ready_at
                    && self.cycle >= self.next_col_ok
                {
                    Some(Cmd::Column { req })
                } else {
                    None
                }
            }
            Some(_) => {
                // conflict: precharge, but never under a row that still has
                // queued hits
                if !self.hit_wait[r.bank]
                    && bank.outstanding == 0
                    && !bank.pending_close
                    && self.cycle >= bank.pre_ok(self.profile.t_ras)
                {
                    Some(Cmd::Precharge { bank: r.bank })
                } else {
                    None
                }
            }
            None => {
                if self.cycle >= bank.ready_at {
                    Some(Cmd::Activate { req })
                } else {
                    None
                }
            }
        }
    }

    fn pick_command(&mut self) -> Option<Cmd> {
        if self.queued.is_empty() {
            return None;
        }
        self.refresh_hit_wait();
        match self.cfg.scheduler {
            // Strict arrival order: only the oldest queued request makes
            // progress.
            Scheduler::Fifo => self.issuable_cmd(self.queued[0]),
            Scheduler::FrFcfs => self.pick_fr_fcfs(None),
            Scheduler::FrFcfsGrp => {
                let kind = self.group_kind;
                let have_current = self
                    .queued
                    .iter()
                    .any(|&q| self.reqs[q as usize].kind == kind);
                if !have_current {
                    self.group_kind = match kind {
                        AccessKind::Read => AccessKind::Write,
                        AccessKind::Write => AccessKind::Read,
                    };
                }
                let kind = self.group_kind;
                self.pick_fr_fcfs(Some(kind))
            }
        }
    }

    /// Oldest issuable row hit, else oldest issuable miss command.
    fn pick_fr_fcfs(&self, kind_filter: Option<AccessKind>) -> Option<Cmd> {
        let mut miss: Option<Cmd> = None;
        for &q in &self.queued {
            if let Some(k) = kind_filter {
                if self.reqs[q as usize].kind != k {
                    continue;
                }
            }
            match self.issuable_cmd(q) {
                Some(cmd @ Cmd::Column { .. }) => return Some(cmd),
                Some(cmd) if miss.is_none() => miss = Some(cmd),
                _ => {}
            }
        }
        miss
    }

    fn issue(&mut self, cmd: Cmd) {
        match cmd {
            Cmd::Activate { req } => {
                let r = &self.reqs[req as usize];
                let bank = &mut self.banks[r.bank];
                bank.open_row = Some(r.row);
                bank.act_cycle = self.cycle;
                bank.ready_at = self.cycle + self.profile.t_rcd;
                self.counts.activates += 1;
                self.energy_pj += self.profile.e_act_pre_nj * 1000.0;
            }
            Cmd::Precharge { bank } => {
                let b = &mut self.banks[bank];
                b.open_row = None;
                b.ready_at = self.cycle + self.profile.t_rp;
            }
            Cmd::Column { req } => {
                let r = &self.reqs[req as usize];
                let done = match r.kind {
                    AccessKind::Read => self.cycle + self.profile.t_cl + self.profile.t_burst,
                    AccessKind::Write => self.cycle + self.profile.t_burst,
                };
                let bank_id = r.bank;
                match r.kind {
                    AccessKind::Read => {
                        self.counts.reads += 1;
                        self.energy_pj += self.profile.e_rd_nj * 1000.0;
                    }
                    AccessKind::Write => {
                        self.counts.writes += 1;
                        self.energy_pj += self.profile.e_wr_nj * 1000.0;
                    }
                }
                let bank = &mut self.banks[bank_id];
                bank.outstanding += 1;
                bank.col_done_max = bank.col_done_max.max(done);
                if self.cfg.page_policy == PagePolicy::Closed {
                    bank.pending_close = true;
                }
                self.next_col_ok = self.cycle + self.profile.t_burst;
                self.inflight.push(InFlight { done, req });
                let pos = self.queued.iter().position(|&q| q == req).unwrap();
                self.queued.remove(pos);
                let queue = self.queue_of(req);
                self.queue_occupancy[queue] -= 1;
            }
        }
    }

    fn fully_idle(&self) -> bool {
        !self.demand_pending()
            && self.active == 0
            && self.inflight.is_empty()
            && self.banks.iter().all(|b| b.ready_at <= self.cycle)
    }

    /// Earliest future cycle at which anything can change, given that
    /// nothing happened this cycle.
    fn next_event_cycle(&self) -> u64 {
        let mut next = NOT_YET;
        let mut consider = |c: u64| {
            if c > self.cycle && c < next {
                next = c;
            }
        };
        if self.next_arrival < self.reqs.len() {
            consider(self.reqs[self.next_arrival].issue);
        }
        for fl in &self.inflight {
            consider(fl.done);
        }
        for b in &self.banks {
            consider(b.ready_at);
            if b.open_row.is_some() {
                consider(b.pre_ok(self.profile.t_ras));
            }
        }
        consider(self.next_col_ok);
        if self.refresh_on {
            consider(self.next_deadline);
            if self.refs_owed == 0
                && self.refs_credit < self.cfg.refresh_max_pulledin
                && self.fully_idle()
            {
                consider(self.cycle + (self.profile.t_rfc.saturating_sub(self.idle_streak)).max(1));
            }
        }
        next
    }

    pub(super) fn run(mut self) -> SimReport {
        let n = self.reqs.len();
        let last_issue = self.reqs.last().map(|r| r.issue).unwrap_or(0);
        // generous bound; only reachable through an engine bug
        let cycle_limit = last_issue
            + 10_000_000
            + (n as u64) * (self.profile.t_rfc + 4 * self.profile.t_refi.max(1024));
        while self.delivered < n {
            let mut activity = false;
            activity |= self.arrivals();
            activity |= self.refresh_bookkeeping();
            activity |= self.completions();
            activity |= self.deliver();
            activity |= self.admissions();
            if self.refresh_command() {
                activity = true;
            } else {
                let blocked =
                    self.refresh_on && self.refs_owed >= self.cfg.refresh_max_postponed;
                if !blocked {
                    if let Some(cmd) = self.pick_command() {
                        self.issue(cmd);
                        activity = true;
                    }
                }
            }
            if self.fully_idle() {
                self.idle_streak += 1;
            } else {
                self.idle_streak = 0;
            }
            if self.delivered == n {
                break;
            }
            if activity {
                self.cycle += 1;
            } else {
                let next = self.next_event_cycle();
                assert!(
                    next != NOT_YET,
                    "engine stalled at cycle {} with {} undelivered",
                    self.cycle,
                    n - self.delivered
                );
                if self.fully_idle() {
                    // the skipped cycles are idle too
                    self.idle_streak += next - self.cycle - 1;
                }
                self.cycle = next;
            }
            assert!(self.cycle < cycle_limit, "simulation did not converge");
        }

        let total_cycles = self.cycle + 1;
        let total_time_ns = total_cycles as f64 * self.profile.clock_period_ns;
        // mW * ns = pJ
        let energy_pj = self.energy_pj + self.profile.p_background_mw * total_time_ns;
        let latency_sum: f64 = self
            .deliver_cycle
            .iter()
            .zip(&self.reqs)
            .map(|(&d, r)| (d - r.issue) as f64)
            .sum();
        let metrics = SimMetrics {
            latency_ns: latency_sum / n as f64 * self.profile.clock_period_ns,
            power_mw: energy_pj / total_time_ns,
            energy_pj,
            total_cycles,
        };
        SimReport {
            metrics,
            counts: self.counts,
            deliver_cycle: self.deliver_cycle,
        }
    }
}
