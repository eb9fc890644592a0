use anyhow::Result;
use dnncost::{compare_dataflows, network_energy, DataType, DataflowKind, EnergyReport, Level};

use super::{load_arch, load_network, modifiers, usage_error, Ctx};
use crate::args::{Format, ModArgs, ModelArgs};
use crate::output::{energy, ratio, to_json, Table};

const BREAKDOWN: [&str; 7] = ["input", "weight", "psum", "rf", "noc", "buffer", "dram"];

fn breakdown(per_type: &[f64; 3], per_level: &[f64; 4]) -> Vec<String> {
    per_type.iter().chain(per_level).map(|e| energy(*e)).collect()
}

fn report_row(r: &EnergyReport) -> Vec<String> {
    let mut row = vec![r.layer.clone()];
    row.extend(breakdown(&r.per_type, &r.per_level));
    row.push(energy(r.compute));
    row.push(energy(r.total));
    row
}

fn long_rows(table: &mut Table, r: &EnergyReport) {
    for d in DataType::ALL {
        for l in Level::ALL {
            table.row(vec![
                r.layer.clone(),
                r.dataflow.to_string(),
                d.as_str().into(),
                l.as_str().into(),
                r.get(d, l).to_string(),
            ]);
        }
    }
    table.row(vec![
        r.layer.clone(),
        r.dataflow.to_string(),
        "compute".into(),
        "alu".into(),
        r.compute.to_string(),
    ]);
}

pub fn analyze(ctx: &Ctx, model: &ModelArgs, mods: &ModArgs) -> Result<()> {
    let Some(dataflow) = model.dataflow else {
        usage_error("analyze requires --dataflow <ws|os|nlr|rs>");
    };
    let net = load_network(model)?;
    let report = network_energy(&net, DataflowKind::from(dataflow), &load_arch(model)?, &modifiers(mods))?;
    let text = match ctx.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut table = Table::new(&["layer", "dataflow", "type", "level", "energy"]);
            for r in report.layers.iter().chain([&report.aggregate]) {
                long_rows(&mut table, r);
            }
            table.to_csv()?
        }
        Format::Table => {
            let mut header = vec!["layer"];
            header.extend(BREAKDOWN);
            header.extend(["compute", "total"]);
            let mut table = Table::new(&header);
            for r in report.layers.iter().chain([&report.conv_aggregate, &report.aggregate]) {
                table.row(report_row(r));
            }
            format!(
                "{} (batch {}), dataflow {}\n{}",
                report.network,
                net.batch,
                report.dataflow,
                table.render()
            )
        }
    };
    ctx.emit(&text)
}

pub fn compare(ctx: &Ctx, model: &ModelArgs, mods: &ModArgs) -> Result<()> {
    let net = load_network(model)?;
    let report = compare_dataflows(&net, &load_arch(model)?, &modifiers(mods))?;
    let mut header = vec!["dataflow", "total", "normalized", "conv_total", "conv_normalized"];
    header.extend(BREAKDOWN);
    header.push("compute");
    let mut table = Table::new(&header);
    let csv = ctx.format == Format::Csv;
    for e in &report.entries {
        let mut row = vec![e.dataflow.to_string()];
        if csv {
            row.extend([e.total, e.normalized, e.conv_total, e.conv_normalized].map(|v| v.to_string()));
            row.extend(
                e.per_type
                    .iter()
                    .chain(&e.per_level)
                    .chain([&e.compute])
                    .map(|v| v.to_string()),
            );
        } else {
            row.extend([
                energy(e.total),
                ratio(e.normalized),
                energy(e.conv_total),
                ratio(e.conv_normalized),
            ]);
            row.extend(breakdown(&e.per_type, &e.per_level));
            row.push(energy(e.compute));
        }
        table.row(row);
    }
    let text = match ctx.format {
        Format::Json => to_json(&report)?,
        Format::Csv => table.to_csv()?,
        Format::Table => {
            let mut text = format!("{} (batch {})\n{}", report.network, net.batch, table.render());
            text.push_str(&format!(
                "winner: {} (conv layers: {})\n",
                report.winner, report.conv_winner
            ));
            if let Some(adv) = report.rs_advantage_conv {
                text.push_str(&format!(
                    "rs advantage on conv layers: {}x to {}x\n",
                    ratio(adv.min),
                    ratio(adv.max)
                ));
            }
            let mut layers = Table::new(&["layer", "ws", "os", "nlr", "rs", "winner"]);
            for l in &report.layers {
                let mut row = vec![l.layer.clone()];
                row.extend(l.totals.iter().map(|e| energy(*e)));
                row.push(l.winner.to_string());
                layers.row(row);
            }
            text.push('\n');
            text.push_str(&layers.render());
            text
        }
    };
    ctx.emit(&text)
}
