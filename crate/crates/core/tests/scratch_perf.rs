// temporary dev scratch - will be removed
use dram_dse_core::rng::SplitMix64;
use dram_dse_core::sim::*;
use dram_dse_core::trace::*;
use std::time::Instant;

fn random_cfg(rng: &mut SplitMix64) -> McConfig {
    let mut cfg = McConfig::default();
    for p in PARAMS {
        p.apply(&mut cfg, rng.next_below(p.cardinality() as u64) as usize);
    }
    cfg
}

#[test]
fn perf_probe() {
    let profile = DramProfile::default();
    let trace = gen_random(1000, (1 << profile.addr_bits()) - 1, 4, 0.7, 7).unwrap();
    let stream = gen_streaming(1000, 0, 64, 4, 1.0, 7, profile.addr_bits()).unwrap();
    let mut rng = SplitMix64::new(1);
    // warm
    let _ = simulate(&trace, &McConfig::default(), &profile).unwrap();
    let t0 = Instant::now();
    let n = 300;
    let mut acc = 0.0;
    for _ in 0..n {
        let cfg = random_cfg(&mut rng);
        acc += simulate(&trace, &cfg, &profile).unwrap().latency_ns;
        acc += simulate(&stream, &cfg, &profile).unwrap().latency_ns;
    }
    let el = t0.elapsed();
    eprintln!(
        "2x{} sims in {:?} -> {:.1} us/sim (acc {acc:.1})",
        n,
        el,
        el.as_secs_f64() * 1e6 / (2.0 * n as f64)
    );
}

#[test]
fn backpressure_probe() {
    // hunt for violations of: larger request_buffer_size never increases
    // mean latency under Fifo scheduling
    let profile = DramProfile::default();
    let mut rng = SplitMix64::new(99);
    let mut violations_norefresh = 0;
    let mut violations_refresh = 0;
    let mut checked = 0;
    for trial in 0..3000 {
        let n = 40 + rng.next_below(160) as usize;
        let inter = rng.next_below(24);
        let trace = if rng.next_below(2) == 0 {
            gen_random(n, (1 << profile.addr_bits()) - 1, inter, 0.5, trial).unwrap()
        } else {
            gen_streaming(n, 0, 64, inter, 0.8, trial, profile.addr_bits()).unwrap()
        };
        let mut cfg = random_cfg(&mut rng);
        cfg.scheduler = Scheduler::Fifo;
        if cfg.arbiter == Arbiter::Reorder {
            cfg.arbiter = if rng.next_below(2) == 0 {
                Arbiter::Simple
            } else {
                Arbiter::Fifo
            };
        }
        let small = rng.next_below(7) as u32 + 1;
        let mut lo = cfg;
        lo.request_buffer_size = small;
        let mut hi = cfg;
        hi.request_buffer_size = small + 1;
        let m_lo = simulate(&trace, &lo, &profile).unwrap();
        let m_hi = simulate(&trace, &hi, &profile).unwrap();
        checked += 1;
        if m_hi.latency_ns > m_lo.latency_ns + 1e-9 {
            if cfg.refresh_policy == RefreshPolicy::AllBank {
                violations_refresh += 1;
            } else {
                violations_norefresh += 1;
            }
            if violations_refresh + violations_norefresh < 5 {
                eprintln!(
                    "violation trial {trial}: cfg {:?} small {small} lo {} hi {}",
                    cfg, m_lo.latency_ns, m_hi.latency_ns
                );
            }
        }
    }
    eprintln!(
        "checked {checked}: violations norefresh={violations_norefresh} refresh={violations_refresh}"
    );
}

#[test]
fn rowhit_probe() {
    // Open <= Closed mean latency on same-row streaming traces
    let profile = DramProfile::default();
    let mut rng = SplitMix64::new(123);
    let mut bad = 0;
    for trial in 0..300 {
        let n = 20 + rng.next_below(200) as usize;
        let inter = rng.next_below(16);
        let trace = gen_streaming(n.min(1000), 0, 1, inter, 0.8, trial, profile.addr_bits()).unwrap();
        let mut cfg = random_cfg(&mut rng);
        let mut open = cfg;
        open.page_policy = PagePolicy::Open;
        cfg.page_policy = PagePolicy::Closed;
        let m_open = simulate(&trace, &open, &profile).unwrap();
        let m_closed = simulate(&trace, &cfg, &profile).unwrap();
        if m_open.latency_ns > m_closed.latency_ns + 1e-9 {
            bad += 1;
            if bad < 5 {
                eprintln!("rowhit violation {trial}: {:?} open {} closed {}", cfg, m_open.latency_ns, m_closed.latency_ns);
            }
        }
    }
    eprintln!("rowhit violations: {bad}");
}

#[test]
fn refresh_energy_probe() {
    // NoRefresh energy <= AllBank energy, all else equal
    let profile = DramProfile::default();
    let mut rng = SplitMix64::new(7);
    let mut bad = 0;
    for trial in 0..300 {
        let n = 30 + rng.next_below(150) as usize;
        let inter = rng.next_below(200);
        let trace = if rng.next_below(2) == 0 {
            gen_random(n, (1 << profile.addr_bits()) - 1, inter, 0.5, trial).unwrap()
        } else {
            gen_streaming(n, 0, 64, inter, 0.8, trial, profile.addr_bits()).unwrap()
        };
        let mut no = random_cfg(&mut rng);
        no.refresh_policy = RefreshPolicy::NoRefresh;
        let mut all = no;
        all.refresh_policy = RefreshPolicy::AllBank;
        let m_no = simulate(&trace, &no, &profile).unwrap();
        let m_all = simulate(&trace, &all, &profile).unwrap();
        if m_no.energy_pj > m_all.energy_pj + 1e-6 {
            bad += 1;
            if bad < 5 {
                eprintln!("refresh violation {trial}: {:?} no {} all {}", no, m_no.energy_pj, m_all.energy_pj);
            }
        }
    }
    eprintln!("refresh energy violations: {bad}");
}
