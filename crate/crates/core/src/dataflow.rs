//! Dataflow taxonomy and per-level access counting.
//!
//! Each dataflow is reduced to a table of reuse factors per data type: whether
//! the type lives in the PE register file, how many MACs one RF fill serves,
//! how many PEs one buffer read feeds over the NoC, and (for partial sums) how
//! many partial sums are merged on the array before a buffer update. A single
//! counting engine turns any such table into word accesses at RF, NoC, global
//! buffer and DRAM.
//!
//! DRAM traffic is ideal: every unique input and weight is fetched once and
//! every output written once, whatever the dataflow.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::archmodel::ArchConfig;
use crate::error::{Error, Result};
use crate::netmodel::ResolvedLayer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataflowKind {
    /// Weight stationary.
    Ws,
    /// Output stationary.
    Os,
    /// No local reuse.
    Nlr,
    /// Row stationary.
    Rs,
}

impl DataflowKind {
    pub const ALL: [DataflowKind; 4] = [DataflowKind::Ws, DataflowKind::Os, DataflowKind::Nlr, DataflowKind::Rs];

    pub fn as_str(self) -> &'static str {
        match self {
            DataflowKind::Ws => "ws",
            DataflowKind::Os => "os",
            DataflowKind::Nlr => "nlr",
            DataflowKind::Rs => "rs",
        }
    }
}

impl fmt::Display for DataflowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataflowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ws" => Ok(DataflowKind::Ws),
            "os" => Ok(DataflowKind::Os),
            "nlr" => Ok(DataflowKind::Nlr),
            "rs" => Ok(DataflowKind::Rs),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataflow '{other}' (expected ws, os, nlr or rs)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Input,
    Weight,
    Psum,
}

impl DataType {
    pub const ALL: [DataType; 3] = [DataType::Input, DataType::Weight, DataType::Psum];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Input => "input",
            DataType::Weight => "weight",
            DataType::Psum => "psum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Rf,
    Noc,
    Buffer,
    Dram,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Rf, Level::Noc, Level::Buffer, Level::Dram];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Rf => "rf",
            Level::Noc => "noc",
            Level::Buffer => "buffer",
            Level::Dram => "dram",
        }
    }
}

/// Reuse factors of one data type. Every factor is at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TypeReuse {
    pub rf_resident: bool,
    /// MACs served per RF fill (1 when not resident).
    pub rf_reuse: u64,
    /// PEs served per buffer read.
    pub noc_multicast: u64,
    /// Partial sums merged on the array per buffer update (psum only).
    pub spatial_accum: u64,
}

impl TypeReuse {
    fn resident(rf_reuse: u64, noc_multicast: u64) -> Self {
        Self {
            rf_resident: true,
            rf_reuse: rf_reuse.max(1),
            noc_multicast: noc_multicast.max(1),
            spatial_accum: 1,
        }
    }

    fn streamed(noc_multicast: u64) -> Self {
        Self {
            rf_resident: false,
            rf_reuse: 1,
            noc_multicast: noc_multicast.max(1),
            spatial_accum: 1,
        }
    }

    fn accumulating(mut self, spatial_accum: u64) -> Self {
        self.spatial_accum = spatial_accum.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReuseFactors {
    pub kind: DataflowKind,
    pub input: TypeReuse,
    pub weight: TypeReuse,
    pub psum: TypeReuse,
}

impl ReuseFactors {
    pub fn get(&self, d: DataType) -> &TypeReuse {
        match d {
            DataType::Input => &self.input,
            DataType::Weight => &self.weight,
            DataType::Psum => &self.psum,
        }
    }
}

/// Reuse-factor table of a dataflow for one layer on one architecture.
pub fn reuse_factors(kind: DataflowKind, layer: &ResolvedLayer, arch: &ArchConfig, batch: u64) -> ReuseFactors {
    let pes = arch.pe_count;
    let (r, s) = (layer.kernel_h, layer.kernel_w);
    let (e, f) = (layer.out_h, layer.out_w);
    let m = layer.out_channels;
    let cg = layer.channels_per_group();
    // Filters mapped side by side, and outputs mapped side by side.
    let filters_mapped = (pes / (r * s)).clamp(1, m.max(1));
    let outputs_mapped = pes.min(e * f);
    let folded_channels = arch.rs_channels_per_pe.min(cg);
    let lanes = arch.nlr_lane_width;

    let (input, weight, psum) = match kind {
        DataflowKind::Ws => (
            TypeReuse::streamed(filters_mapped),
            TypeReuse::resident(batch * e * f, 1),
            TypeReuse::streamed(1).accumulating(r * s),
        ),
        DataflowKind::Os => (
            TypeReuse::streamed((r * s).min(outputs_mapped)),
            TypeReuse::streamed(outputs_mapped),
            TypeReuse::resident(cg * r * s, 1),
        ),
        DataflowKind::Nlr => (
            TypeReuse::streamed(m.min(lanes)),
            TypeReuse::streamed(1),
            TypeReuse::streamed(1).accumulating((cg * r * s).min(lanes)),
        ),
        DataflowKind::Rs => (
            TypeReuse::resident(s, r.min(pes)),
            TypeReuse::resident(f, e.min(pes)),
            TypeReuse::resident(s * folded_channels, 1).accumulating(r),
        ),
    };
    ReuseFactors {
        kind,
        input,
        weight,
        psum,
    }
}

/// Word accesses per data type and storage level for one layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccessCounts {
    pub layer: String,
    pub kind: DataflowKind,
    /// `counts[type][level]`, indexed by [`DataType::index`] and [`Level::index`].
    pub counts: [[u64; 4]; 3],
    pub total_macs: u64,
    pub input_volume: u64,
    pub weight_volume: u64,
    pub output_volume: u64,
}

impl AccessCounts {
    pub fn get(&self, d: DataType, l: Level) -> u64 {
        self.counts[d.index()][l.index()]
    }

    pub fn unique(&self, d: DataType) -> u64 {
        match d {
            DataType::Input => self.input_volume,
            DataType::Weight => self.weight_volume,
            DataType::Psum => self.output_volume,
        }
    }
}

const BUDGET: u128 = i64::MAX as u128;

fn div_ceil(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Runs the counting engine for `factors` over `layer` at batch size `batch`.
pub fn access_counts(factors: &ReuseFactors, layer: &ResolvedLayer, batch: u64) -> Result<AccessCounts> {
    let overflow = |what| Error::Overflow {
        layer: layer.name.clone(),
        what,
    };
    let product = |xs: &[u64], what| -> Result<u128> {
        xs.iter()
            .try_fold(1u128, |acc, &x| acc.checked_mul(x as u128).filter(|v| *v <= BUDGET))
            .ok_or_else(|| overflow(what))
    };
    let cg = layer.channels_per_group();
    let macs = product(
        &[
            batch,
            layer.out_channels,
            cg,
            layer.out_h,
            layer.out_w,
            layer.kernel_h,
            layer.kernel_w,
        ],
        "total MACs",
    )?;
    let unique = [
        product(&[batch, layer.in_channels, layer.in_h, layer.in_w], "input volume")?,
        product(
            &[layer.out_channels, cg, layer.kernel_h, layer.kernel_w],
            "weight volume",
        )?,
        product(&[batch, layer.out_channels, layer.out_h, layer.out_w], "output volume")?,
    ];
    if 2 * macs > BUDGET {
        return Err(overflow("psum RF accesses"));
    }

    let mut counts = [[0u64; 4]; 3];
    for d in [DataType::Input, DataType::Weight] {
        let reuse = factors.get(d);
        let rf_reuse = reuse.rf_reuse as u128;
        let uniq = unique[d.index()];
        let rf = if reuse.rf_resident { macs } else { 0 };
        // Strided layers can skip inputs entirely; deliveries are floored at
        // the unique volume so DRAM <= buffer <= NoC always holds.
        let noc = div_ceil(macs, rf_reuse).max(uniq);
        let buffer = div_ceil(noc, reuse.noc_multicast as u128).clamp(uniq, noc);
        counts[d.index()] = [rf as u64, noc as u64, buffer as u64, uniq as u64];
    }

    let psum = &factors.psum;
    let out = unique[DataType::Psum.index()];
    let rf = if psum.rf_resident { 2 * macs } else { 0 };
    let noc = div_ceil(macs, psum.rf_reuse as u128);
    let buffer = (2 * div_ceil(macs, psum.rf_reuse as u128 * psum.spatial_accum as u128)).clamp(out, 2 * macs);
    counts[DataType::Psum.index()] = [rf as u64, noc as u64, buffer as u64, out as u64];

    Ok(AccessCounts {
        layer: layer.name.clone(),
        kind: factors.kind,
        counts,
        total_macs: macs as u64,
        input_volume: unique[0] as u64,
        weight_volume: unique[1] as u64,
        output_volume: unique[2] as u64,
    })
}

/// Convenience: factors and counts in one call.
pub fn layer_access_counts(
    kind: DataflowKind,
    layer: &ResolvedLayer,
    arch: &ArchConfig,
    batch: u64,
) -> Result<AccessCounts> {
    access_counts(&reuse_factors(kind, layer, arch, batch), layer, batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archmodel::default_arch;
    use crate::netmodel::builtin;

    fn tiny() -> ResolvedLayer {
        ResolvedLayer::conv("tiny", 1, 3, 3, 1, (2, 2), 1, 0, 1).unwrap()
    }

    fn counts(kind: DataflowKind, layer: &ResolvedLayer) -> AccessCounts {
        layer_access_counts(kind, layer, &default_arch(), 1).unwrap()
    }

    #[test]
    fn parse_kind() {
        assert_eq!("RS".parse::<DataflowKind>().unwrap(), DataflowKind::Rs);
        assert!("xyz".parse::<DataflowKind>().is_err());
    }

    #[test]
    fn nlr_keeps_nothing_local() {
        let layer = builtin("alexnet").unwrap().resolve(1).unwrap().layers[0].clone();
        let f = reuse_factors(DataflowKind::Nlr, &layer, &default_arch(), 1);
        assert!(DataType::ALL.iter().all(|d| !f.get(*d).rf_resident));
        let c = counts(DataflowKind::Nlr, &tiny());
        assert!(DataType::ALL.iter().all(|d| c.get(*d, Level::Rf) == 0));
    }

    #[test]
    fn ws_alexnet_conv1_weight_reuse() {
        let layer = builtin("alexnet").unwrap().resolve(1).unwrap().layers[0].clone();
        let f = reuse_factors(DataflowKind::Ws, &layer, &default_arch(), 1);
        assert!(f.weight.rf_resident);
        assert_eq!(f.weight.rf_reuse, 3025);
        assert_eq!(f.input.noc_multicast, 2);
        assert_eq!(f.psum.spatial_accum, 121);
    }

    #[test]
    fn rs_one_by_one_clamps() {
        let layer = ResolvedLayer::conv("pw", 8, 4, 4, 8, (1, 1), 1, 0, 1).unwrap();
        let f = reuse_factors(DataflowKind::Rs, &layer, &default_arch(), 1);
        assert_eq!(f.input.rf_reuse, 1);
        assert_eq!(f.psum.spatial_accum, 1);
    }

    #[test]
    fn tiny_layer_volumes() {
        let c = counts(DataflowKind::Ws, &tiny());
        assert_eq!(
            (c.total_macs, c.input_volume, c.weight_volume, c.output_volume),
            (16, 9, 4, 4)
        );
    }

    #[test]
    fn tiny_os_psum_rf() {
        assert_eq!(counts(DataflowKind::Os, &tiny()).get(DataType::Psum, Level::Rf), 32);
    }

    #[test]
    fn tiny_ws_weights() {
        let c = counts(DataflowKind::Ws, &tiny());
        assert_eq!(c.counts[DataType::Weight.index()], [16, 4, 4, 4]);
    }

    #[test]
    fn stationarity() {
        let layer = builtin("alexnet").unwrap().resolve(1).unwrap().layers[2].clone();
        let arch = default_arch();
        let resident = |k| {
            let f = reuse_factors(k, &layer, &arch, 1);
            (f.input.rf_resident, f.weight.rf_resident, f.psum.rf_resident)
        };
        assert_eq!(resident(DataflowKind::Ws), (false, true, false));
        assert_eq!(resident(DataflowKind::Os), (false, false, true));
        assert_eq!(resident(DataflowKind::Nlr), (false, false, false));
        assert_eq!(resident(DataflowKind::Rs), (true, true, true));
    }

    #[test]
    fn strided_pointwise_stays_monotone() {
        // 1x1 stride-2 conv touches a quarter of its input.
        let layer = ResolvedLayer::conv("s2", 4, 8, 8, 1, (1, 1), 2, 0, 1).unwrap();
        for kind in DataflowKind::ALL {
            let c = counts(kind, &layer);
            let row = c.counts[DataType::Input.index()];
            assert_eq!(row[3], 256);
            assert!(row[3] <= row[2] && row[2] <= row[1], "{kind}: {row:?}");
        }
    }

    #[test]
    fn overflow_guard() {
        let mut layer = ResolvedLayer::conv("huge", 1, 1, 1, 1, (1, 1), 1, 0, 1).unwrap();
        layer.out_channels = 1 << 40;
        layer.in_channels = 1 << 30;
        let err = layer_access_counts(DataflowKind::Ws, &layer, &default_arch(), 1).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn layer() -> impl Strategy<Value = (ResolvedLayer, u64)> {
            (
                1u64..=8,
                1u64..=8,
                1u64..=12,
                1u64..=12,
                1u64..=5,
                1u64..=5,
                1u64..=3,
                0u64..=2,
                1u64..=2,
                1u64..=3,
            )
                .prop_filter_map("valid", |(c, m, h, w, r, s, u, pad, g, n)| {
                    ResolvedLayer::conv("p", c * g, h, w, m * g, (r, s), u, pad, g)
                        .ok()
                        .map(|l| (l, n))
                })
        }

        proptest! {
            #[test]
            fn hierarchy_and_conservation((layer, n) in layer()) {
                let arch = default_arch();
                for kind in DataflowKind::ALL {
                    let c = layer_access_counts(kind, &layer, &arch, n).unwrap();
                    let t = c.total_macs;
                    for d in DataType::ALL {
                        let row = c.counts[d.index()];
                        prop_assert!(row[1] <= t.max(c.unique(d)));
                        prop_assert_eq!(row[3], c.unique(d));
                        if d != DataType::Psum {
                            prop_assert!(c.unique(d) <= row[2] && row[2] <= row[1]);
                        } else {
                            prop_assert!(c.unique(d) <= row[2] && row[2] <= 2 * t);
                        }
                    }
                }
            }

            #[test]
            fn batch_doubling((layer, n) in layer()) {
                let arch = default_arch();
                for kind in DataflowKind::ALL {
                    let one = layer_access_counts(kind, &layer, &arch, n).unwrap();
                    let two = layer_access_counts(kind, &layer, &arch, 2 * n).unwrap();
                    prop_assert_eq!(two.total_macs, 2 * one.total_macs);
                    for d in DataType::ALL {
                        prop_assert_eq!(two.get(d, Level::Rf), 2 * one.get(d, Level::Rf));
                        // Weights are shared by the whole batch.
                        let scale = if d == DataType::Weight { 1 } else { 2 };
                        prop_assert_eq!(two.get(d, Level::Dram), scale * one.get(d, Level::Dram));
                    }
                }
            }
        }
    }
}
