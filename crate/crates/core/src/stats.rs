//! Weight and MAC statistics.
//!
//! One MAC is one multiply plus one accumulate. Bias terms count as weights
//! but never as MACs.

use serde::Serialize;

use crate::netmodel::{LayerKind, ResolvedLayer, ResolvedNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerStats {
    pub name: String,
    pub kind: LayerKind,
    pub weights: u64,
    pub macs: u64,
    /// N·C·H·W words.
    pub input_volume: u64,
    /// Filter words, bias excluded.
    pub weight_volume: u64,
    /// N·M·E·F words.
    pub output_volume: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Subtotal {
    pub weights: u64,
    pub macs: u64,
}

impl Subtotal {
    fn add(&mut self, s: &LayerStats) {
        self.weights += s.weights;
        self.macs += s.macs;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkStats {
    pub name: String,
    pub batch: u64,
    /// Conv and fc layers only; pseudo-layers contribute nothing.
    pub layers: Vec<LayerStats>,
    pub conv: Subtotal,
    pub fc: Subtotal,
    pub total: Subtotal,
}

pub fn layer_stats(layer: &ResolvedLayer, batch: u64) -> LayerStats {
    let input_volume = batch * layer.in_channels * layer.in_h * layer.in_w;
    let output_volume = batch * layer.out_channels * layer.out_h * layer.out_w;
    let (weights, macs, weight_volume) = if layer.kind.is_weighted() {
        let filter = layer.out_channels * layer.channels_per_group() * layer.kernel_h * layer.kernel_w;
        let bias = if layer.bias { layer.out_channels } else { 0 };
        let per_output = layer.channels_per_group() * layer.kernel_h * layer.kernel_w;
        (filter + bias, output_volume * per_output, filter)
    } else {
        (0, 0, 0)
    };
    LayerStats {
        name: layer.name.clone(),
        kind: layer.kind,
        weights,
        macs,
        input_volume,
        weight_volume,
        output_volume,
    }
}

pub fn network_stats(net: &ResolvedNetwork) -> NetworkStats {
    let layers: Vec<LayerStats> = net.weighted_layers().map(|l| layer_stats(l, net.batch)).collect();
    let mut conv = Subtotal::default();
    let mut fc = Subtotal::default();
    let mut total = Subtotal::default();
    for s in &layers {
        match s.kind {
            LayerKind::Conv => conv.add(s),
            _ => fc.add(s),
        }
        total.add(s);
    }
    NetworkStats {
        name: net.name.clone(),
        batch: net.batch,
        layers,
        conv,
        fc,
        total,
    }
}
