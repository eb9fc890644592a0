use anyhow::{bail, Result};
use dnncost::optkit::{energy_prune_order, prune_magnitude};
use dnncost::{DataflowKind, DenseTensor, Modifiers};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{load_arch, load_network, Ctx};
use crate::args::{Format, PruneArgs, PruneOrder};
use crate::output::{to_json, Table};

#[derive(Serialize)]
struct LayerPrune {
    layer: String,
    weights: usize,
    pruned: usize,
    density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_per_weight: Option<f64>,
}

#[derive(Serialize)]
struct PruneReport {
    network: String,
    fraction: f64,
    order: &'static str,
    seed: u64,
    layers: Vec<LayerPrune>,
    weights: usize,
    pruned: usize,
    density: f64,
}

pub fn run(ctx: &Ctx, args: &PruneArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.fraction) {
        bail!("--fraction must be in [0, 1], got {}", args.fraction);
    }
    let net = load_network(&args.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut layers = Vec::new();
    for l in net.weighted_layers() {
        let shape = [l.out_channels, l.channels_per_group(), l.kernel_h, l.kernel_w].map(|v| v as usize);
        let weights = DenseTensor::random(&shape, &mut rng);
        let (_, mask) = prune_magnitude(&weights, args.fraction)?;
        let kept = mask.iter().filter(|m| **m).count();
        layers.push(LayerPrune {
            layer: l.name.clone(),
            weights: mask.len(),
            pruned: mask.len() - kept,
            density: kept as f64 / mask.len() as f64,
            energy_per_weight: None,
        });
    }
    let order = match args.order {
        PruneOrder::Magnitude => "magnitude",
        PruneOrder::Energy => {
            let kind = args.model.dataflow.map_or(DataflowKind::Rs, DataflowKind::from);
            let keys = energy_prune_order(&net, kind, &load_arch(&args.model)?, &Modifiers::default())?;
            let mut ordered = Vec::with_capacity(layers.len());
            for key in keys {
                let i = layers.iter().position(|l| l.layer == key.layer).expect("same layers");
                let mut l = layers.swap_remove(i);
                l.energy_per_weight = Some(key.energy_per_weight);
                ordered.push(l);
            }
            layers = ordered;
            "energy"
        }
    };
    let weights: usize = layers.iter().map(|l| l.weights).sum();
    let pruned: usize = layers.iter().map(|l| l.pruned).sum();
    let report = PruneReport {
        network: net.name.clone(),
        fraction: args.fraction,
        order,
        seed: ctx.seed,
        density: if weights == 0 {
            0.0
        } else {
            1.0 - pruned as f64 / weights as f64
        },
        layers,
        weights,
        pruned,
    };

    let text = match ctx.format {
        Format::Json => to_json(&report)?,
        _ => {
            let csv = ctx.format == Format::Csv;
            let num = |v: f64| if csv { v.to_string() } else { format!("{v:.4}") };
            let mut table = Table::new(&["layer", "weights", "pruned", "density", "energy_per_weight"]);
            for l in &report.layers {
                table.row(vec![
                    l.layer.clone(),
                    l.weights.to_string(),
                    l.pruned.to_string(),
                    num(l.density),
                    l.energy_per_weight.map(num).unwrap_or_default(),
                ]);
            }
            table.row(vec![
                "total".into(),
                report.weights.to_string(),
                report.pruned.to_string(),
                num(report.density),
                String::new(),
            ]);
            if csv {
                table.to_csv()?
            } else {
                format!(
                    "{}: fraction {}, {} order, seed {}\n{}",
                    report.network,
                    report.fraction,
                    report.order,
                    report.seed,
                    table.render()
                )
            }
        }
    };
    ctx.emit(&text)
}
