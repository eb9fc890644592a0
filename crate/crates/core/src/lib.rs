//! Analytical cost models for DNN inference accelerators.
//!
//! The crate covers network ingestion and shape resolution ([`netmodel`]),
//! weight/MAC statistics ([`stats`]), the spatial-architecture description
//! ([`archmodel`]), per-dataflow access counting ([`dataflow`]) and its energy
//! conversion ([`energy`]), reference convolution kernels ([`kernels`]), and
//! pruning/quantization/run-length tools ([`optkit`]).

pub mod archmodel;
pub mod dataflow;
pub mod energy;
pub mod error;
pub mod kernels;
pub mod netmodel;
pub mod optkit;
pub mod stats;
pub mod tensor;

pub use archmodel::{default_arch, parse_arch, ArchConfig, EnergyTable};
pub use dataflow::{access_counts, reuse_factors, AccessCounts, DataType, DataflowKind, Level, ReuseFactors};
pub use energy::{
    compare_dataflows, layer_energy, network_energy, ComparisonReport, EnergyReport, Modifiers, NetworkEnergy,
};
pub use error::{Error, Result};
pub use netmodel::{builtin, parse_network, resolve_shapes, LayerKind, NetworkSpec, ResolvedLayer, ResolvedNetwork};
pub use stats::{layer_stats, network_stats, LayerStats, NetworkStats};
pub use tensor::DenseTensor;
