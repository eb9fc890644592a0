//! Access counts to energy, with breakdowns across data types and storage
//! levels, and the cross-dataflow comparison.
//!
//! Energy is unitless, normalized to one register-file word access. Reports
//! carry a `scale` field (pJ per unit, 1.0 by default) for users with
//! calibrated numbers.
//!
//! Movement energy of a data type scales linearly with its bitwidth relative
//! to the architecture word; compute energy scales with the product of input
//! and weight bitwidths and with both densities (zero-skipping MACs).
//! Sparsity does not reduce movement here; see [`crate::optkit::rle`] for the
//! bandwidth side.

use serde::Serialize;

use crate::archmodel::ArchConfig;
use crate::dataflow::{access_counts, reuse_factors, AccessCounts, DataType, DataflowKind, Level};
use crate::error::{Error, Result};
use crate::netmodel::{LayerKind, ResolvedNetwork};

/// Precision and sparsity knobs. `None` bitwidths mean "architecture word".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Modifiers {
    pub density_in: f64,
    pub density_w: f64,
    pub bits_in: Option<u32>,
    pub bits_w: Option<u32>,
}

impl Default for Modifiers {
    fn default() -> Self {
        Self {
            density_in: 1.0,
            density_w: 1.0,
            bits_in: None,
            bits_w: None,
        }
    }
}

impl Modifiers {
    pub fn with_bits(bits: u32) -> Self {
        Self {
            bits_in: Some(bits),
            bits_w: Some(bits),
            ..Self::default()
        }
    }

    pub fn validate(&self, arch: &ArchConfig) -> Result<()> {
        for (name, d) in [("input density", self.density_in), ("weight density", self.density_w)] {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidModifiers(format!("{name} must be in (0, 1], got {d}")));
            }
        }
        for (name, b) in [("input bits", self.bits_in), ("weight bits", self.bits_w)] {
            if let Some(b) = b {
                if b == 0 || b > arch.word_bits {
                    return Err(Error::InvalidModifiers(format!(
                        "{name} must be in [1, {}], got {b}",
                        arch.word_bits
                    )));
                }
            }
        }
        Ok(())
    }

    fn bits(&self, d: DataType, word_bits: u32) -> u32 {
        match d {
            DataType::Input => self.bits_in.unwrap_or(word_bits),
            DataType::Weight => self.bits_w.unwrap_or(word_bits),
            DataType::Psum => word_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub layer: String,
    pub dataflow: DataflowKind,
    /// `energy[type][level]`, same indexing as [`AccessCounts::counts`].
    pub energy: [[f64; 4]; 3],
    pub compute: f64,
    pub per_type: [f64; 3],
    pub per_level: [f64; 4],
    /// Sum of every movement term.
    pub movement: f64,
    pub total: f64,
    pub total_macs: u64,
    /// pJ per normalized unit.
    pub scale: f64,
}

impl EnergyReport {
    fn from_matrix(
        layer: String,
        dataflow: DataflowKind,
        energy: [[f64; 4]; 3],
        compute: f64,
        total_macs: u64,
    ) -> Self {
        let per_type = energy.map(|row| row.iter().sum::<f64>());
        let mut per_level = [0.0; 4];
        for row in &energy {
            for (acc, e) in per_level.iter_mut().zip(row) {
                *acc += e;
            }
        }
        let movement: f64 = per_type.iter().sum();
        Self {
            layer,
            dataflow,
            energy,
            compute,
            per_type,
            per_level,
            movement,
            total: compute + movement,
            total_macs,
            scale: 1.0,
        }
    }

    pub fn get(&self, d: DataType, l: Level) -> f64 {
        self.energy[d.index()][l.index()]
    }

    pub fn type_total(&self, d: DataType) -> f64 {
        self.per_type[d.index()]
    }

    pub fn level_total(&self, l: Level) -> f64 {
        self.per_level[l.index()]
    }

    pub fn with_scale(mut self, pj_per_unit: f64) -> Self {
        self.scale = pj_per_unit;
        self
    }

    pub fn scaled_total(&self) -> f64 {
        self.total * self.scale
    }

    /// Element-wise sum of several reports, relabelled as `name`.
    pub fn sum<'a>(name: &str, dataflow: DataflowKind, reports: impl IntoIterator<Item = &'a EnergyReport>) -> Self {
        let mut energy = [[0.0; 4]; 3];
        let mut compute = 0.0;
        let mut macs = 0;
        for r in reports {
            for (dst, src) in energy.iter_mut().flatten().zip(r.energy.iter().flatten()) {
                *dst += src;
            }
            compute += r.compute;
            macs += r.total_macs;
        }
        Self::from_matrix(name.to_string(), dataflow, energy, compute, macs)
    }
}

/// Energy of one layer's access counts.
pub fn layer_energy(counts: &AccessCounts, arch: &ArchConfig, mods: &Modifiers) -> EnergyReport {
    let word = arch.word_bits as f64;
    let costs = arch.energy.as_array();
    let mut energy = [[0.0; 4]; 3];
    for d in DataType::ALL {
        let width = mods.bits(d, arch.word_bits) as f64 / word;
        for l in Level::ALL {
            energy[d.index()][l.index()] = counts.get(d, l) as f64 * costs[l.index()] * width;
        }
    }
    let precision = (mods.bits(DataType::Input, arch.word_bits) as f64
        * mods.bits(DataType::Weight, arch.word_bits) as f64)
        / (word * word);
    let compute = counts.total_macs as f64 * arch.mac_energy * precision * (mods.density_in * mods.density_w);
    EnergyReport::from_matrix(counts.layer.clone(), counts.kind, energy, compute, counts.total_macs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkEnergy {
    pub network: String,
    pub dataflow: DataflowKind,
    /// One report per conv/fc layer, in network order.
    pub layers: Vec<EnergyReport>,
    /// Conv layers only.
    pub conv_aggregate: EnergyReport,
    pub aggregate: EnergyReport,
}

pub fn network_energy(
    net: &ResolvedNetwork,
    kind: DataflowKind,
    arch: &ArchConfig,
    mods: &Modifiers,
) -> Result<NetworkEnergy> {
    arch.validate()?;
    mods.validate(arch)?;
    let mut layers = Vec::new();
    let mut is_conv = Vec::new();
    for layer in net.weighted_layers() {
        let counts = access_counts(&reuse_factors(kind, layer, arch, net.batch), layer, net.batch)?;
        layers.push(layer_energy(&counts, arch, mods));
        is_conv.push(layer.kind == LayerKind::Conv);
    }
    let conv_aggregate = EnergyReport::sum(
        "conv",
        kind,
        layers.iter().zip(&is_conv).filter(|(_, c)| **c).map(|(r, _)| r),
    );
    let aggregate = EnergyReport::sum("total", kind, &layers);
    Ok(NetworkEnergy {
        network: net.name.clone(),
        dataflow: kind,
        layers,
        conv_aggregate,
        aggregate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub dataflow: DataflowKind,
    pub total: f64,
    /// `total` divided by the smallest total across dataflows.
    pub normalized: f64,
    pub conv_total: f64,
    pub conv_normalized: f64,
    pub compute: f64,
    pub per_type: [f64; 3],
    pub per_level: [f64; 4],
    pub conv_per_type: [f64; 3],
    pub conv_per_level: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerComparison {
    pub layer: String,
    pub kind: LayerKind,
    /// Total energy per dataflow, in [`DataflowKind::ALL`] order.
    pub totals: [f64; 4],
    pub winner: DataflowKind,
}

/// Energy of every other dataflow divided by row-stationary energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvantageRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub network: String,
    pub entries: Vec<ComparisonEntry>,
    pub winner: DataflowKind,
    pub conv_winner: DataflowKind,
    pub layers: Vec<LayerComparison>,
    /// RS advantage over the conv-layer aggregate; `None` without conv layers.
    pub rs_advantage_conv: Option<AdvantageRange>,
}

impl ComparisonReport {
    pub fn entry(&self, kind: DataflowKind) -> &ComparisonEntry {
        self.entries
            .iter()
            .find(|e| e.dataflow == kind)
            .expect("all dataflows present")
    }
}

fn argmin(values: impl IntoIterator<Item = (DataflowKind, f64)>) -> (DataflowKind, f64) {
    values
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

pub fn compare_dataflows(net: &ResolvedNetwork, arch: &ArchConfig, mods: &Modifiers) -> Result<ComparisonReport> {
    let runs = DataflowKind::ALL
        .iter()
        .map(|&k| network_energy(net, k, arch, mods))
        .collect::<Result<Vec<_>>>()?;

    let (winner, best) = argmin(runs.iter().map(|r| (r.dataflow, r.aggregate.total)));
    let (conv_winner, conv_best) = argmin(runs.iter().map(|r| (r.dataflow, r.conv_aggregate.total)));
    let has_conv = runs[0].conv_aggregate.total_macs > 0;
    let ratio = |x: f64, min: f64| if min > 0.0 { x / min } else { 1.0 };

    let entries = runs
        .iter()
        .map(|r| ComparisonEntry {
            dataflow: r.dataflow,
            total: r.aggregate.total,
            normalized: ratio(r.aggregate.total, best),
            conv_total: r.conv_aggregate.total,
            conv_normalized: ratio(r.conv_aggregate.total, conv_best),
            compute: r.aggregate.compute,
            per_type: r.aggregate.per_type,
            per_level: r.aggregate.per_level,
            conv_per_type: r.conv_aggregate.per_type,
            conv_per_level: r.conv_aggregate.per_level,
        })
        .collect::<Vec<_>>();

    let layers = net
        .weighted_layers()
        .enumerate()
        .map(|(i, layer)| {
            let totals: [f64; 4] = std::array::from_fn(|k| runs[k].layers[i].total);
            let (winner, _) = argmin(DataflowKind::ALL.iter().copied().zip(totals));
            LayerComparison {
                layer: layer.name.clone(),
                kind: layer.kind,
                totals,
                winner,
            }
        })
        .collect();

    let rs_advantage_conv = has_conv.then(|| {
        let rs = runs
            .iter()
            .find(|r| r.dataflow == DataflowKind::Rs)
            .unwrap()
            .conv_aggregate
            .total;
        let ratios: Vec<f64> = runs
            .iter()
            .filter(|r| r.dataflow != DataflowKind::Rs)
            .map(|r| r.conv_aggregate.total / rs)
            .collect();
        AdvantageRange {
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    });

    Ok(ComparisonReport {
        network: net.name.clone(),
        entries,
        winner,
        conv_winner,
        layers,
        rs_advantage_conv,
    })
}
