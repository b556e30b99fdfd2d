//! Memory access traces: generation, parsing, serialization.
//!
//! A trace is a time-ordered list of read/write requests. The on-disk
//! format is one request per line,
//!
//! ```text
//! <issue-cycle>: <read|write> 0x<16-digit-hex-address>
//! ```
//!
//! e.g. `100: read 0x0000000000400140`. Lines starting with `#` and blank
//! lines are ignored when parsing. Generators draw request kinds and
//! addresses from [`crate::rng::SplitMix64`], so a (parameters, seed) pair
//! produces the identical trace on any platform.

use crate::rng::SplitMix64;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Read,
    Write,
}

impl fmt::Display for AccessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessKind::Read => f.write_str("read"),
            AccessKind::Write => f.write_str("write"),
        }
    }
}

/// One memory request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRequest {
    pub issue_cycle: u64,
    pub kind: AccessKind,
    pub addr: u64,
}

/// A time-ordered request sequence. Construction enforces non-decreasing
/// issue cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryTrace {
    requests: Vec<TraceRequest>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("issue cycles decrease at request {index}")]
    NonMonotonic { index: usize },
    #[error("address 0x{addr:x} exceeds the {addr_bits}-bit decodable range")]
    AddressOverflow { addr: u64, addr_bits: u32 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl MemoryTrace {
    pub fn new(requests: Vec<TraceRequest>) -> Result<Self, TraceError> {
        if requests.is_empty() {
            return Err(TraceError::Empty);
        }
        for i in 1..requests.len() {
            if requests[i].issue_cycle < requests[i - 1].issue_cycle {
                return Err(TraceError::NonMonotonic { index: i });
            }
        }
        Ok(Self { requests })
    }

    pub fn requests(&self) -> &[TraceRequest] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

fn draw_kind(rng: &mut SplitMix64, read_fraction: f64) -> AccessKind {
    if rng.next_f64() < read_fraction {
        AccessKind::Read
    } else {
        AccessKind::Write
    }
}

/// Generates a fixed-stride streaming trace: `addr_i = start_addr + i*stride`,
/// `issue_i = i*interarrival`. Request kinds are drawn per request with
/// probability `read_fraction` of being a read.
pub fn gen_streaming(
    n: usize,
    start_addr: u64,
    stride: u64,
    interarrival: u64,
    read_fraction: f64,
    seed: u64,
    addr_bits: u32,
) -> Result<MemoryTrace, TraceError> {
    assert!(n >= 1, "n must be >= 1");
    assert!(stride >= 1, "stride must be >= 1");
    assert!((0.0..=1.0).contains(&read_fraction));
    let last = start_addr + (n as u64 - 1) * stride;
    if addr_bits < 64 && last >> addr_bits != 0 {
        return Err(TraceError::AddressOverflow {
            addr: last,
            addr_bits,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let requests = (0..n as u64)
        .map(|i| TraceRequest {
            issue_cycle: i * interarrival,
            kind: draw_kind(&mut rng, read_fraction),
            addr: start_addr + i * stride,
        })
        .collect();
    MemoryTrace::new(requests)
}

/// Generates a uniform random trace: addresses are drawn uniformly from the
/// masked range, issue cycles advance by a fixed interarrival.
pub fn gen_random(
    n: usize,
    addr_mask: u64,
    interarrival: u64,
    read_fraction: f64,
    seed: u64,
) -> Result<MemoryTrace, TraceError> {
    assert!(n >= 1, "n must be >= 1");
    assert!((0.0..=1.0).contains(&read_fraction));
    let mut rng = SplitMix64::new(seed);
    let requests = (0..n as u64)
        .map(|i| {
            let addr = rng.next_u64() & addr_mask;
            TraceRequest {
                issue_cycle: i * interarrival,
                kind: draw_kind(&mut rng, read_fraction),
                addr,
            }
        })
        .collect();
    MemoryTrace::new(requests)
}

/// Serializes a trace to the canonical text format.
pub fn serialize_trace(trace: &MemoryTrace) -> String {
    let mut out = String::with_capacity(trace.len() * 32);
    for r in trace.requests() {
        out.push_str(&format!("{}: {} 0x{:016x}\n", r.issue_cycle, r.kind, r.addr));
    }
    out
}

/// Parses the text trace format. Errors carry the 1-based line number.
pub fn parse_trace(text: &str) -> Result<MemoryTrace, TraceError> {
    let mut requests = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| TraceError::Parse {
            line: i + 1,
            reason: reason.to_string(),
        };
        let (cycle_str, rest) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
        let issue_cycle = cycle_str
            .trim()
            .parse::<u64>()
            .map_err(|_| err("bad issue cycle"))?;
        let mut fields = rest.split_whitespace();
        let kind = match fields.next() {
            Some("read") => AccessKind::Read,
            Some("write") => AccessKind::Write,
            Some(other) => return Err(err(&format!("unknown kind {other:?}"))),
            None => return Err(err("missing kind")),
        };
        let addr_str = fields.next().ok_or_else(|| err("missing address"))?;
        let hex = addr_str
            .strip_prefix("0x")
            .ok_or_else(|| err("address must start with 0x"))?;
        let addr = u64::from_str_radix(hex, 16).map_err(|_| err("bad hex address"))?;
        if fields.next().is_some() {
            return Err(err("trailing fields"));
        }
        requests.push(TraceRequest {
            issue_cycle,
            kind,
            addr,
        });
    }
    if requests.is_empty() {
        return Err(TraceError::Empty);
    }
    for i in 1..requests.len() {
        if requests[i].issue_cycle < requests[i - 1].issue_cycle {
            return Err(TraceError::NonMonotonic { index: i });
        }
    }
    MemoryTrace::new(requests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_progression() {
        let t = gen_streaming(4, 0, 64, 4, 1.0, 1, 29).unwrap();
        let addrs: Vec<u64> = t.requests().iter().map(|r| r.addr).collect();
        let cycles: Vec<u64> = t.requests().iter().map(|r| r.issue_cycle).collect();
        assert_eq!(addrs, vec![0, 64, 128, 192]);
        assert_eq!(cycles, vec![0, 4, 8, 12]);
    }

    #[test]
    fn streaming_single_request() {
        let t = gen_streaming(1, 4096, 64, 7, 0.5, 3, 29).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.requests()[0].addr, 4096);
        assert_eq!(t.requests()[0].issue_cycle, 0);
    }

    #[test]
    fn streaming_overflow() {
        let err = gen_streaming(3, 0, 1 << 28, 1, 1.0, 0, 29).unwrap_err();
        assert!(matches!(err, TraceError::AddressOverflow { .. }));
    }

    #[test]
    fn generators_deterministic() {
        let a = gen_random(500, (1 << 29) - 1, 4, 0.7, 99).unwrap();
        let b = gen_random(500, (1 << 29) - 1, 4, 0.7, 99).unwrap();
        assert_eq!(a, b);
        let c = gen_streaming(500, 0, 64, 4, 0.7, 99, 29).unwrap();
        let d = gen_streaming(500, 0, 64, 4, 0.7, 99, 29).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn read_fraction_boundaries() {
        let t = gen_random(200, 0xffff, 1, 1.0, 5).unwrap();
        assert!(t.requests().iter().all(|r| r.kind == AccessKind::Read));
        let t = gen_random(200, 0xffff, 1, 0.0, 5).unwrap();
        assert!(t.requests().iter().all(|r| r.kind == AccessKind::Write));
    }

    #[test]
    fn random_bank_spread_uniform() {
        // Chi-square goodness of fit of the bank histogram against uniform,
        // 8 banks (df = 7). 24.322 is the 0.999 quantile of chi2(7).
        let profile = crate::sim::DramProfile::default();
        let t = gen_random(10_000, (1 << profile.addr_bits()) - 1, 1, 0.7, 11).unwrap();
        let mut counts = [0u64; 8];
        for r in t.requests() {
            let (_, bank, _) = profile.decode_addr(r.addr);
            counts[bank as usize] += 1;
        }
        let expected = 10_000.0 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 24.322, "chi2 = {chi2}, counts = {counts:?}");
        for &c in &counts {
            let frac = c as f64 / 10_000.0;
            assert!((0.05..=0.20).contains(&frac), "bank fraction {frac}");
        }
    }

    #[test]
    fn parse_example_line() {
        let t = parse_trace("100: read 0x0000000000400140\n").unwrap();
        assert_eq!(
            t.requests()[0],
            TraceRequest {
                issue_cycle: 100,
                kind: AccessKind::Read,
                addr: 0x400140
            }
        );
    }

    #[test]
    fn parse_unknown_kind() {
        let err = parse_trace("100: fetch 0x0\n").unwrap_err();
        match err {
            TraceError::Parse { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("unknown kind"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn round_trip_generated() {
        let t = gen_random(300, (1 << 29) - 1, 3, 0.4, 17).unwrap();
        assert_eq!(parse_trace(&serialize_trace(&t)).unwrap(), t);
    }

    #[test]
    fn canonical_text_round_trip() {
        let text = "0: write 0x0000000000000040\n9: read 0x00000000000fff00\n";
        assert_eq!(serialize_trace(&parse_trace(text).unwrap()), text);
    }

    #[test]
    fn non_monotonic_rejected() {
        assert_eq!(
            parse_trace("5: read 0x0\n4: read 0x0\n").unwrap_err(),
            TraceError::NonMonotonic { index: 1 }
        );
    }
}
