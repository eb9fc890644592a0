use anyhow::{bail, Result};
use dnncost::kernels::{conv_direct, conv_fft, conv_im2col, conv_winograd_f22_33, mult_count, TransformMethod};
use dnncost::DenseTensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Ctx;
use crate::args::Format;
use crate::output::{to_json, Table};

#[derive(Serialize)]
struct Deviation {
    pair: String,
    max_rel_dev: f64,
    tolerance: f64,
    ok: bool,
}

pub fn verify(ctx: &Ctx, size: usize, channels: usize, filters: usize, instances: u64) -> Result<()> {
    const METHODS: [&str; 4] = ["direct", "im2col", "winograd", "fft"];
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst = [[0.0f64; 4]; 4];
    for _ in 0..instances {
        let input = DenseTensor::random(&[channels, size, size], &mut rng);
        let weights = DenseTensor::random(&[filters, channels, 3, 3], &mut rng);
        let outs = [
            conv_direct(&input, &weights, 1, 0)?,
            conv_im2col(&input, &weights, 1, 0)?,
            conv_winograd_f22_33(&input, &weights)?,
            conv_fft(&input, &weights)?,
        ];
        for i in 0..4 {
            for j in i + 1..4 {
                worst[i][j] = worst[i][j].max(outs[j].max_rel_diff(&outs[i])?);
            }
        }
    }
    let mut rows = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let tolerance = if (i, j) == (0, 1) { 1e-9 } else { 1e-6 };
            rows.push(Deviation {
                pair: format!("{}-{}", METHODS[i], METHODS[j]),
                max_rel_dev: worst[i][j],
                tolerance,
                ok: worst[i][j] <= tolerance,
            });
        }
    }
    let text = match ctx.format {
        Format::Json => to_json(&rows)?,
        _ => {
            let mut table = Table::new(&["pair", "max_rel_dev", "tolerance", "ok"]);
            for r in &rows {
                let dev = if ctx.format == Format::Csv {
                    r.max_rel_dev.to_string()
                } else {
                    format!("{:.3e}", r.max_rel_dev)
                };
                table.row(vec![
                    r.pair.clone(),
                    dev,
                    format!("{:e}", r.tolerance),
                    r.ok.to_string(),
                ]);
            }
            if ctx.format == Format::Csv {
                table.to_csv()?
            } else {
                format!(
                    "{instances} instance(s), {channels}x{size}x{size} input, {filters} 3x3 filter(s), seed {}\n{}",
                    ctx.seed,
                    table.render()
                )
            }
        }
    };
    ctx.emit(&text)?;
    if let Some(bad) = rows.iter().find(|r| !r.ok) {
        bail!(
            "{} deviation {:e} exceeds {:e}",
            bad.pair,
            bad.max_rel_dev,
            bad.tolerance
        );
    }
    Ok(())
}

pub fn count(ctx: &Ctx, output_size: u64, filter_size: u64, matrix_size: u64) -> Result<()> {
    let mut counts = Vec::new();
    for method in TransformMethod::ALL {
        match mult_count(method, output_size, filter_size, matrix_size) {
            Ok(c) => counts.push(c),
            Err(e) => eprintln!("skipping {method}: {e}"),
        }
    }
    if counts.is_empty() {
        bail!("no method supports these sizes");
    }
    let text = match ctx.format {
        Format::Json => to_json(&counts)?,
        _ => {
            let mut table = Table::new(&["method", "count", "baseline", "reduction"]);
            for c in &counts {
                table.row(vec![
                    c.method.to_string(),
                    c.count.to_string(),
                    c.baseline.to_string(),
                    format!("{:.4}", c.reduction()),
                ]);
            }
            if ctx.format == Format::Csv {
                table.to_csv()?
            } else {
                format!("No={output_size} Nf={filter_size} N={matrix_size}\n{}", table.render())
            }
        }
    };
    ctx.emit(&text)
}
