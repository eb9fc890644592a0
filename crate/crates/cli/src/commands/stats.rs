use anyhow::Result;
use dnncost::network_stats;

use super::{load_network, Ctx};
use crate::args::{Format, ModelArgs};
use crate::output::{to_json, Table};

pub fn run(ctx: &Ctx, model: &ModelArgs) -> Result<()> {
    let stats = network_stats(&load_network(model)?);
    let mut table = Table::new(&["layer", "kind", "weights", "macs", "di", "dw", "do"]);
    let (mut di, mut dw, mut dout) = (0, 0, 0);
    for l in &stats.layers {
        di += l.input_volume;
        dw += l.weight_volume;
        dout += l.output_volume;
        table.row(vec![
            l.name.clone(),
            l.kind.to_string(),
            l.weights.to_string(),
            l.macs.to_string(),
            l.input_volume.to_string(),
            l.weight_volume.to_string(),
            l.output_volume.to_string(),
        ]);
    }
    let totals = |name: &str, kind: &str, w: u64, m: u64, vols: [String; 3]| {
        let [a, b, c] = vols;
        vec![name.into(), kind.into(), w.to_string(), m.to_string(), a, b, c]
    };
    let text = match ctx.format {
        Format::Json => to_json(&stats)?,
        Format::Csv => {
            table.row(totals(
                "total",
                "",
                stats.total.weights,
                stats.total.macs,
                [di, dw, dout].map(|v| v.to_string()),
            ));
            table.to_csv()?
        }
        Format::Table => {
            let blank = || [String::new(), String::new(), String::new()];
            table.row(totals("conv", "", stats.conv.weights, stats.conv.macs, blank()));
            table.row(totals("fc", "", stats.fc.weights, stats.fc.macs, blank()));
            table.row(totals(
                "total",
                "",
                stats.total.weights,
                stats.total.macs,
                [di, dw, dout].map(|v| v.to_string()),
            ));
            format!("{} (batch {})\n{}", stats.name, stats.batch, table.render())
        }
    };
    ctx.emit(&text)
}
