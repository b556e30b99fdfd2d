//! DRAM device timing/energy profile.
//!
//! The defaults approximate a single-rank DDR3-1600 device. All timings are
//! in controller cycles, energies in nanojoules per command, standing power
//! in milliwatts. Profiles can be overridden from a plain `key = value`
//! file (one pair per line, `#` starts a comment), keyed exactly by the
//! field names below.

use super::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct DramProfile {
    /// Duration of one controller cycle in nanoseconds.
    pub clock_period_ns: f64,
    /// Number of banks; must equal `1 << bank_bits`.
    pub num_banks: u32,
    /// Address-field widths. Addresses decode low-to-high as
    /// column, bank, row.
    pub row_bits: u32,
    pub bank_bits: u32,
    pub col_bits: u32,
    /// Activate-to-column delay.
    pub t_rcd: u64,
    /// Precharge duration.
    pub t_rp: u64,
    /// Column-command-to-data (CAS) latency.
    pub t_cl: u64,
    /// Minimum activate-to-precharge interval.
    pub t_ras: u64,
    /// All-bank refresh duration.
    pub t_rfc: u64,
    /// Refresh interval.
    pub t_refi: u64,
    /// Data burst duration; also the minimum spacing of column commands.
    pub t_burst: u64,
    /// Energy of one activate/precharge pair.
    pub e_act_pre_nj: f64,
    /// Energy of one read burst.
    pub e_rd_nj: f64,
    /// Energy of one write burst.
    pub e_wr_nj: f64,
    /// Energy of one all-bank refresh.
    pub e_ref_nj: f64,
    /// Standing power drawn for the whole simulated duration.
    pub p_background_mw: f64,
}

impl Default for DramProfile {
    fn default() -> Self {
        Self {
            clock_period_ns: 1.25,
            num_banks: 8,
            row_bits: 16,
            bank_bits: 3,
            col_bits: 10,
            t_rcd: 11,
            t_rp: 11,
            t_cl: 11,
            t_ras: 28,
            t_rfc: 208,
            t_refi: 6240,
            t_burst: 4,
            e_act_pre_nj: 3.0,
            e_rd_nj: 2.5,
            e_wr_nj: 2.5,
            e_ref_nj: 80.0,
            p_background_mw: 120.0,
        }
    }
}

impl DramProfile {
    /// Total decodable address width in bits.
    pub fn addr_bits(&self) -> u32 {
        self.row_bits + self.bank_bits + self.col_bits
    }

    /// Splits a byte address into (row, bank, column). High bits map to the
    /// row, middle bits to the bank, low bits to the column; bits above the
    /// decodable range are ignored.
    pub fn decode_addr(&self, addr: u64) -> (u32, u32, u32) {
        let col = (addr & ((1 << self.col_bits) - 1)) as u32;
        let bank = ((addr >> self.col_bits) & ((1 << self.bank_bits) - 1)) as u32;
        let row = ((addr >> (self.col_bits + self.bank_bits)) & ((1 << self.row_bits) - 1)) as u32;
        (row, bank, col)
    }

    /// Checks the structural invariants every profile must satisfy.
    pub fn validate(&self) -> Result<(), SimError> {
        let mut problems = Vec::new();
        if self.clock_period_ns <= 0.0 || !self.clock_period_ns.is_finite() {
            problems.push("clock_period_ns must be positive".to_string());
        }
        if self.num_banks != 1 << self.bank_bits {
            problems.push(format!(
                "num_banks {} != 2^bank_bits {}",
                self.num_banks,
                1u32 << self.bank_bits
            ));
        }
        if self.addr_bits() > 62 {
            problems.push("address width exceeds 62 bits".to_string());
        }
        for (name, v) in [
            ("t_rcd", self.t_rcd),
            ("t_rp", self.t_rp),
            ("t_cl", self.t_cl),
            ("t_ras", self.t_ras),
            ("t_rfc", self.t_rfc),
            ("t_refi", self.t_refi),
            ("t_burst", self.t_burst),
        ] {
            if v < 1 {
                problems.push(format!("{name} must be >= 1 cycle"));
            }
        }
        if self.t_ras < self.t_rcd {
            problems.push("t_ras must be >= t_rcd".to_string());
        }
        if self.t_refi <= self.t_rfc {
            problems.push("t_refi must be > t_rfc".to_string());
        }
        for (name, v) in [
            ("e_act_pre_nj", self.e_act_pre_nj),
            ("e_rd_nj", self.e_rd_nj),
            ("e_wr_nj", self.e_wr_nj),
            ("e_ref_nj", self.e_ref_nj),
            ("p_background_mw", self.p_background_mw),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                problems.push(format!("{name} must be > 0"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidProfile(problems.join("; ")))
        }
    }

    /// Parses a profile from `key = value` text, starting from the default
    /// profile so partial files are accepted.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut profile = DramProfile::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| SimError::InvalidProfile(format!(
                "line {}: {reason}: {raw:?}",
                line_no + 1
            ));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            let as_u64 = || value.parse::<u64>().map_err(|_| bad("expected an integer"));
            let as_u32 = || value.parse::<u32>().map_err(|_| bad("expected an integer"));
            let as_f64 = || value.parse::<f64>().map_err(|_| bad("expected a number"));
            match key {
                "clock_period_ns" => profile.clock_period_ns = as_f64()?,
                "num_banks" => profile.num_banks = as_u32()?,
                "row_bits" => profile.row_bits = as_u32()?,
                "bank_bits" => profile.bank_bits = as_u32()?,
                "col_bits" => profile.col_bits = as_u32()?,
                "t_rcd" => profile.t_rcd = as_u64()?,
                "t_rp" => profile.t_rp = as_u64()?,
                "t_cl" => profile.t_cl = as_u64()?,
                "t_ras" => profile.t_ras = as_u64()?,
                "t_rfc" => profile.t_rfc = as_u64()?,
                "t_refi" => profile.t_refi = as_u64()?,
                "t_burst" => profile.t_burst = as_u64()?,
                "e_act_pre_nj" => profile.e_act_pre_nj = as_f64()?,
                "e_rd_nj" => profile.e_rd_nj = as_f64()?,
                "e_wr_nj" => profile.e_wr_nj = as_f64()?,
                "e_ref_nj" => profile.e_ref_nj = as_f64()?,
                "p_background_mw" => profile.p_background_mw = as_f64()?,
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidProfile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_valid() {
        DramProfile::default().validate().unwrap();
    }

    #[test]
    fn addr_decode_fields() {
        let p = DramProfile::default();
        // col 0x140, bank 0b101, row 0x2a
        let addr = (0x2a_u64 << 13) | (0b101 << 10) | 0x140;
        assert_eq!(p.decode_addr(addr), (0x2a, 0b101, 0x140));
        // bits above the decodable range are masked off
        assert_eq!(p.decode_addr(addr | (1 << 60)), (0x2a, 0b101, 0x140));
    }

    #[test]
    fn parse_overrides_and_comments() {
        let p = DramProfile::parse("# device\nt_rcd = 9\n e_ref_nj = 33.5 # per refresh\n").unwrap();
        assert_eq!(p.t_rcd, 9);
        assert_eq!(p.e_ref_nj, 33.5);
        assert_eq!(p.t_cl, DramProfile::default().t_cl);
    }

    #[test]
    fn parse_rejects_unknown_key_and_bad_invariants() {
        assert!(DramProfile::parse("t_typo = 4").is_err());
        assert!(DramProfile::parse("t_refi = 10\nt_rfc = 100").is_err());
        assert!(DramProfile::parse("t_ras = 1").is_err());
    }
}
