use std::cmp::Ordering;

use serde::Serialize;

use crate::archmodel::ArchConfig;
use crate::dataflow::DataflowKind;
use crate::energy::{network_energy, Modifiers};
use crate::error::{Error, Result};
use crate::netmodel::ResolvedNetwork;
use crate::stats::layer_stats;
use crate::tensor::DenseTensor;

/// `floor(fraction * n)`, forgiving products like `0.29 * 100` that land a
/// hair under an integer.
fn prune_count(fraction: f64, n: usize) -> usize {
    let exact = fraction * n as f64;
    let mut k = exact.floor();
    if exact - k > 1.0 - 1e-9 {
        k += 1.0;
    }
    (k as usize).min(n)
}

/// Zeroes the `floor(fraction * n)` smallest-magnitude entries, lower flat
/// index first on ties. Returns the pruned tensor and the survivor mask.
pub fn prune_magnitude(weights: &DenseTensor, fraction: f64) -> Result<(DenseTensor, Vec<bool>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "prune fraction must be in [0, 1], got {fraction}"
        )));
    }
    let data = weights.data();
    let k = prune_count(fraction, data.len());
    let mut mask = vec![true; data.len()];
    if k > 0 {
        let by_magnitude =
            |a: &usize, b: &usize| -> Ordering { data[*a].abs().total_cmp(&data[*b].abs()).then(a.cmp(b)) };
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.select_nth_unstable_by(k - 1, by_magnitude);
        for &i in &order[..k] {
            mask[i] = false;
        }
    }
    let mut pruned = weights.clone();
    for (v, keep) in pruned.data_mut().iter_mut().zip(&mask) {
        if !keep {
            *v = 0.0;
        }
    }
    Ok((pruned, mask))
}

/// Energy attributed to each weight of a layer, the ordering key for
/// energy-aware pruning: layers where a weight costs more are pruned first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerPruneKey {
    pub layer: String,
    pub weights: u64,
    pub energy: f64,
    pub energy_per_weight: f64,
}

/// Conv/fc layers sorted by descending energy per weight under `kind`.
pub fn energy_prune_order(
    net: &ResolvedNetwork,
    kind: DataflowKind,
    arch: &ArchConfig,
    mods: &Modifiers,
) -> Result<Vec<LayerPruneKey>> {
    let report = network_energy(net, kind, arch, mods)?;
    let mut keys: Vec<LayerPruneKey> = net
        .weighted_layers()
        .zip(&report.layers)
        .map(|(layer, e)| {
            let weights = layer_stats(layer, net.batch).weights;
            LayerPruneKey {
                layer: layer.name.clone(),
                weights,
                energy: e.total,
                energy_per_weight: e.total / weights.max(1) as f64,
            }
        })
        .collect();
    keys.sort_by(|a, b| b.energy_per_weight.total_cmp(&a.energy_per_weight));
    Ok(keys)
}
