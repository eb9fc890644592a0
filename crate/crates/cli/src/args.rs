use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dnncost::DataflowKind;

#[derive(Debug, Parser)]
#[command(
    name = "dnncost",
    version,
    about = "Storage, compute and data-movement energy models for DNN accelerators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for every random generator
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-layer and total weights and MACs
    Stats(ModelArgs),
    /// Energy breakdown of one dataflow
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        mods: ModArgs,
    },
    /// Energy of all four dataflows, normalized to the cheapest
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        mods: ModArgs,
    },
    /// Reference convolution kernels
    Kernels {
        #[command(subcommand)]
        action: KernelsCommand,
    },
    /// Run-length codec for 16-bit activation streams
    Compress(CompressArgs),
    /// Magnitude pruning of seeded random weights
    Prune(PruneArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct NetSource {
    /// Built-in network: lenet5, alexnet, vgg16, googlenet, resnet50
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,

    /// Network description file (JSON)
    #[arg(long, value_name = "PATH")]
    pub net: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub source: NetSource,

    /// Architecture file (JSON); defaults apply to missing keys
    #[arg(long, value_name = "PATH")]
    pub arch: Option<PathBuf>,

    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch: u64,

    #[arg(long, value_enum)]
    pub dataflow: Option<DataflowArg>,
}

#[derive(Debug, Args)]
pub struct ModArgs {
    /// Input and weight bitwidth
    #[arg(long)]
    pub bits: Option<u32>,

    #[arg(long, default_value_t = 1.0)]
    pub density_in: f64,

    #[arg(long, default_value_t = 1.0)]
    pub density_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataflowArg {
    Ws,
    Os,
    Nlr,
    Rs,
}

impl From<DataflowArg> for DataflowKind {
    fn from(d: DataflowArg) -> Self {
        match d {
            DataflowArg::Ws => DataflowKind::Ws,
            DataflowArg::Os => DataflowKind::Os,
            DataflowArg::Nlr => DataflowKind::Nlr,
            DataflowArg::Rs => DataflowKind::Rs,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum KernelsCommand {
    /// Compare direct, im2col, Winograd and FFT convolution on random data
    Verify {
        /// Input height and width
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(3..=256))]
        size: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=64))]
        channels: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=64))]
        filters: u64,
        /// Random instances to try
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        instances: u64,
    },
    /// Multiplication counts of each method
    Count {
        /// Output width No
        #[arg(long, default_value_t = 32)]
        output_size: u64,
        /// Filter width Nf
        #[arg(long, default_value_t = 3)]
        filter_size: u64,
        /// Matrix size N for Strassen
        #[arg(long, default_value_t = 64)]
        matrix_size: u64,
    },
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// Encode raw big-endian 16-bit words into a bitstream
    #[arg(long, conflicts_with = "decode")]
    pub encode: bool,

    /// Decode a bitstream into raw big-endian 16-bit words
    #[arg(long)]
    pub decode: bool,

    /// File to encode or decode; synthetic data is used when absent
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Zero fraction of the synthetic stream
    #[arg(long, default_value_t = 0.7, conflicts_with = "relu")]
    pub sparsity: f64,

    /// Use a ReLU-like synthetic stream instead of i.i.d. zeros
    #[arg(long)]
    pub relu: bool,

    /// Synthetic stream length
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PruneOrder {
    /// Network order
    Magnitude,
    /// Descending energy per weight
    Energy,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Fraction of each layer's weights to zero
    #[arg(long)]
    pub fraction: f64,

    #[arg(long, value_enum, default_value_t = PruneOrder::Magnitude)]
    pub order: PruneOrder,
}
