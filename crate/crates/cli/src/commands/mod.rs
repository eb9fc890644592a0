mod compress;
mod energy;
mod kernels;
mod prune;
mod stats;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::CommandFactory;
use dnncost::{builtin, default_arch, parse_arch, parse_network, ArchConfig, Modifiers, ResolvedNetwork};

use crate::args::{Cli, Command, Format, KernelsCommand, ModArgs, ModelArgs};
use crate::output::emit;

pub fn run(cli: &Cli) -> Result<()> {
    let ctx = Ctx {
        format: cli.format,
        out: cli.out.as_deref(),
        seed: cli.seed,
    };
    match &cli.command {
        Command::Stats(model) => stats::run(&ctx, model),
        Command::Analyze { model, mods } => energy::analyze(&ctx, model, mods),
        Command::Compare { model, mods } => energy::compare(&ctx, model, mods),
        Command::Kernels { action } => match action {
            KernelsCommand::Verify {
                size,
                channels,
                filters,
                instances,
            } => kernels::verify(&ctx, *size as usize, *channels as usize, *filters as usize, *instances),
            KernelsCommand::Count {
                output_size,
                filter_size,
                matrix_size,
            } => kernels::count(&ctx, *output_size, *filter_size, *matrix_size),
        },
        Command::Compress(args) => compress::run(&ctx, args),
        Command::Prune(args) => prune::run(&ctx, args),
    }
}

pub struct Ctx<'a> {
    pub format: Format,
    pub out: Option<&'a Path>,
    pub seed: u64,
}

impl Ctx<'_> {
    pub fn emit(&self, text: &str) -> Result<()> {
        emit(self.out, text)
    }
}

/// Reports a usage problem clap cannot express and exits with status 2.
pub fn usage_error(msg: &str) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg).exit()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read '{}'", path.display()))
}

pub fn load_network(model: &ModelArgs) -> Result<ResolvedNetwork> {
    let spec = match (&model.source.builtin, &model.source.net) {
        (Some(name), _) => builtin(name)?,
        (None, Some(path)) => parse_network(&read_text(path)?).with_context(|| format!("in '{}'", path.display()))?,
        (None, None) => unreachable!("clap requires a network source"),
    };
    Ok(spec.resolve(model.batch)?)
}

pub fn load_arch(model: &ModelArgs) -> Result<ArchConfig> {
    match &model.arch {
        Some(path) => Ok(parse_arch(&read_text(path)?).with_context(|| format!("in '{}'", path.display()))?),
        None => Ok(default_arch()),
    }
}

pub fn modifiers(m: &ModArgs) -> Modifiers {
    Modifiers {
        density_in: m.density_in,
        density_w: m.density_w,
        bits_in: m.bits,
        bits_w: m.bits,
    }
}
