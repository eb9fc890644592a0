//! Spatial-architecture configuration: PE array, storage capacities and the
//! per-level access-energy table.
//!
//! Energies are normalized to one register-file word access. Absolute values
//! are technology-specific, so everything here is configuration.

use serde::{Deserialize, Serialize};

use crate::dataflow::DataflowKind;
use crate::error::{Error, Result};

/// Per-word access cost at each storage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyTable {
    pub rf: f64,
    pub noc: f64,
    pub buf: f64,
    pub dram: f64,
}

impl Default for EnergyTable {
    fn default() -> Self {
        Self {
            rf: 1.0,
            noc: 2.0,
            buf: 6.0,
            dram: 200.0,
        }
    }
}

impl EnergyTable {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rf, self.noc, self.buf, self.dram]
    }

    pub fn validate(&self) -> Result<()> {
        let costs = self.as_array();
        if costs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidArch(format!(
                "access energies must be finite and positive, got {costs:?}"
            )));
        }
        if costs.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArch(format!(
                "access energies must be ordered rf <= noc <= buf <= dram, got {costs:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchConfig {
    pub pe_count: u64,
    pub rf_bytes: u64,
    pub buffer_bytes: u64,
    pub word_bits: u32,
    pub energy: EnergyTable,
    /// Energy of one word_bits x word_bits MAC.
    pub mac_energy: f64,
    /// Channels folded into each PE under row-stationary.
    pub rs_channels_per_pe: u64,
    /// Broadcast / adder-tree width assumed by no-local-reuse.
    pub nlr_lane_width: u64,
}

impl Default for ArchConfig {
    fn default() -> Self {
        Self {
            pe_count: 256,
            rf_bytes: 512,
            buffer_bytes: 131_072,
            word_bits: 16,
            energy: EnergyTable::default(),
            mac_energy: 1.0,
            rs_channels_per_pe: 4,
            nlr_lane_width: 16,
        }
    }
}

pub fn default_arch() -> ArchConfig {
    ArchConfig::default()
}

/// Parses an arch document; missing keys take their defaults.
pub fn parse_arch(text: &str) -> Result<ArchConfig> {
    let text = if text.trim().is_empty() { "{}" } else { text };
    let arch: ArchConfig = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    arch.validate()?;
    Ok(arch)
}

impl ArchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pe_count", self.pe_count),
            ("rs_channels_per_pe", self.rs_channels_per_pe),
            ("nlr_lane_width", self.nlr_lane_width),
        ];
        if let Some((field, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArch(format!("{field} must be >= 1")));
        }
        if !(1..=64).contains(&self.word_bits) {
            return Err(Error::InvalidArch(format!(
                "word_bits must be in [1, 64], got {}",
                self.word_bits
            )));
        }
        if !(self.mac_energy.is_finite() && self.mac_energy > 0.0) {
            return Err(Error::InvalidArch(format!(
                "mac_energy must be finite and positive, got {}",
                self.mac_energy
            )));
        }
        self.energy.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("arch serializes")
    }

    /// Global buffer capacity available to a dataflow. No-local-reuse gives
    /// the register-file area to the buffer.
    pub fn effective_buffer_bytes(&self, kind: DataflowKind) -> u64 {
        match kind {
            DataflowKind::Nlr => self.buffer_bytes + self.pe_count * self.rf_bytes,
            _ => self.buffer_bytes,
        }
    }

    /// Effective per-PE register-file capacity in bytes.
    pub fn effective_rf_bytes(&self, kind: DataflowKind) -> u64 {
        match kind {
            DataflowKind::Nlr => 0,
            _ => self.rf_bytes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let a = default_arch();
        assert_eq!(a.pe_count, 256);
        assert_eq!(a.word_bits, 16);
        assert_eq!(a.energy.as_array(), [1.0, 2.0, 6.0, 200.0]);
        assert_eq!((a.rf_bytes, a.buffer_bytes, a.rs_channels_per_pe), (512, 131_072, 4));
        a.validate().unwrap();
    }

    #[test]
    fn empty_document_is_default() {
        assert_eq!(parse_arch("").unwrap(), default_arch());
        assert_eq!(parse_arch("{}").unwrap(), default_arch());
    }

    #[test]
    fn partial_override() {
        let a = parse_arch(r#"{"energy": {"dram": 100}}"#).unwrap();
        assert_eq!(a.energy.as_array(), [1.0, 2.0, 6.0, 100.0]);
        assert_eq!(a.pe_count, 256);
    }

    #[test]
    fn ordering_violation() {
        let err = parse_arch(r#"{"energy": {"dram": 0.5}}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidArch(m) if m.contains("ordered")));
    }

    #[test]
    fn bad_documents() {
        assert!(matches!(parse_arch("{"), Err(Error::Syntax(_))));
        assert!(matches!(parse_arch(r#"{"pes": 3}"#), Err(Error::Syntax(_))));
        assert!(parse_arch(r#"{"word_bits": 0}"#).is_err());
        assert!(parse_arch(r#"{"pe_count": 0}"#).is_err());
        assert!(parse_arch(r#"{"energy": {"rf": -1}}"#).is_err());
        assert!(parse_arch(r#"{"mac_energy": 0}"#).is_err());
    }

    #[test]
    fn nlr_gets_rf_area() {
        let a = default_arch();
        assert_eq!(a.effective_buffer_bytes(DataflowKind::Nlr), 131_072 + 256 * 512);
        assert_eq!(a.effective_buffer_bytes(DataflowKind::Rs), 131_072);
        assert_eq!(a.effective_rf_bytes(DataflowKind::Nlr), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn serialize_parse_identity(
                pe in 1u64..4096, rf in 0u64..4096, buf in 0u64..1 << 24, bits in 1u32..=64,
                c in proptest::array::uniform4(0.01f64..100.0), mac in 0.01f64..10.0, g in 1u64..16,
            ) {
                let mut costs = c;
                costs.sort_by(f64::total_cmp);
                let arch = ArchConfig {
                    pe_count: pe, rf_bytes: rf, buffer_bytes: buf, word_bits: bits,
                    energy: EnergyTable { rf: costs[0], noc: costs[1], buf: costs[2], dram: costs[3] },
                    mac_energy: mac, rs_channels_per_pe: g, nlr_lane_width: 16,
                };
                prop_assert_eq!(parse_arch(&arch.to_json()).unwrap(), arch);
            }
        }
    }
}
