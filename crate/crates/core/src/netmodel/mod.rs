//! Network descriptions: ingestion, validation and shape resolution.
//!
//! A network is a flat, ordered list of layers. Each layer reads the output of
//! the layer before it unless it names its sources explicitly with `from`,
//! which is how inception branches and residual shortcuts are expressed.
//! `concat` merges channel counts and `add` merges identical shapes; neither
//! carries weights or MACs.

mod builtin;
mod json;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{builtin, builtin_document, BUILTIN_NAMES};
pub use json::parse_network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Conv,
    Fc,
    Pool,
    #[serde(rename = "act")]
    Activation,
    Concat,
    Add,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Conv => "conv",
            LayerKind::Fc => "fc",
            LayerKind::Pool => "pool",
            LayerKind::Activation => "act",
            LayerKind::Concat => "concat",
            LayerKind::Add => "add",
        }
    }

    /// Conv and fc layers own weights and perform MACs; everything else only
    /// reshapes or merges data.
    pub fn is_weighted(self) -> bool {
        matches!(self, LayerKind::Conv | LayerKind::Fc)
    }

    fn is_merge(self) -> bool {
        matches!(self, LayerKind::Concat | LayerKind::Add)
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "conv" => LayerKind::Conv,
            "fc" => LayerKind::Fc,
            "pool" => LayerKind::Pool,
            "act" => LayerKind::Activation,
            "concat" => LayerKind::Concat,
            "add" => LayerKind::Add,
            other => return Err(format!("unknown layer kind '{other}'")),
        })
    }
}

/// Sliding-window geometry shared by conv and pool layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub kernel_h: u64,
    pub kernel_w: u64,
    pub stride: u64,
    pub pad: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvParams {
    pub out_channels: u64,
    pub window: Window,
    pub groups: u64,
    pub bias: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerOp {
    Conv(ConvParams),
    Fc { out_channels: u64, bias: bool },
    Pool(Window),
    Activation,
    Concat,
    Add,
}

impl LayerOp {
    pub fn kind(&self) -> LayerKind {
        match self {
            LayerOp::Conv(_) => LayerKind::Conv,
            LayerOp::Fc { .. } => LayerKind::Fc,
            LayerOp::Pool(_) => LayerKind::Pool,
            LayerOp::Activation => LayerKind::Activation,
            LayerOp::Concat => LayerKind::Concat,
            LayerOp::Add => LayerKind::Add,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    /// Explicit source layers. Empty means "the previous layer" (or the
    /// network input for the first layer).
    pub from: Vec<String>,
    pub op: LayerOp,
}

impl LayerSpec {
    pub fn kind(&self) -> LayerKind {
        self.op.kind()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputShape {
    pub channels: u64,
    pub height: u64,
    pub width: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub name: String,
    pub input: InputShape,
    pub layers: Vec<LayerSpec>,
}

/// Number of conv and fc layers along the deepest path through the network.
/// Parallel branches count once, so this is the "layer count" users quote
/// for inception and residual networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct WeightedDepth {
    pub conv: usize,
    pub fc: usize,
}

impl NetworkSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_network(text)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }

    pub fn resolve(&self, batch: u64) -> Result<ResolvedNetwork> {
        resolve_shapes(self, batch)
    }

    pub fn weighted_depth(&self) -> WeightedDepth {
        let mut seen: HashMap<&str, WeightedDepth> = HashMap::new();
        let mut prev = WeightedDepth::default();
        for layer in &self.layers {
            let mut depth = if layer.from.is_empty() {
                prev
            } else {
                layer
                    .from
                    .iter()
                    .filter_map(|src| seen.get(src.as_str()).copied())
                    .max_by_key(|d| (d.conv + d.fc, d.conv))
                    .unwrap_or_default()
            };
            match layer.kind() {
                LayerKind::Conv => depth.conv += 1,
                LayerKind::Fc => depth.fc += 1,
                _ => {}
            }
            seen.insert(layer.name.as_str(), depth);
            prev = depth;
        }
        prev
    }

    /// Count of conv/fc entries in the flat list (every branch counted).
    pub fn weighted_layer_count(&self) -> usize {
        self.layers.iter().filter(|l| l.kind().is_weighted()).count()
    }
}

/// A layer with every dimension made concrete.
///
/// For fc layers the kernel spans the whole input (`kernel_h == in_h`,
/// `kernel_w == in_w`) and the output is 1x1, so the conv formulas apply
/// unchanged. Merge and activation layers carry a 1x1 kernel and preserve
/// their input extent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedLayer {
    pub name: String,
    pub kind: LayerKind,
    pub from: Vec<String>,
    pub in_channels: u64,
    pub in_h: u64,
    pub in_w: u64,
    pub out_channels: u64,
    pub kernel_h: u64,
    pub kernel_w: u64,
    pub stride: u64,
    pub pad: u64,
    pub groups: u64,
    pub out_h: u64,
    pub out_w: u64,
    pub bias: bool,
}

impl ResolvedLayer {
    /// Input channels seen by each filter.
    pub fn channels_per_group(&self) -> u64 {
        self.in_channels / self.groups
    }

    /// Builds a standalone conv layer; used by tests and by callers that
    /// want to analyze a single shape without a network document.
    #[allow(clippy::too_many_arguments)]
    pub fn conv(
        name: &str,
        in_channels: u64,
        in_h: u64,
        in_w: u64,
        out_channels: u64,
        kernel: (u64, u64),
        stride: u64,
        pad: u64,
        groups: u64,
    ) -> Result<Self> {
        let dims = [
            in_channels,
            in_h,
            in_w,
            out_channels,
            kernel.0,
            kernel.1,
            stride,
            groups,
        ];
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "layer '{name}': channels, extents, kernel, stride and groups must be >= 1"
            )));
        }
        let net = NetworkSpec {
            name: name.to_string(),
            input: InputShape {
                channels: in_channels,
                height: in_h,
                width: in_w,
            },
            layers: vec![LayerSpec {
                name: name.to_string(),
                from: Vec::new(),
                op: LayerOp::Conv(ConvParams {
                    out_channels,
                    window: Window {
                        kernel_h: kernel.0,
                        kernel_w: kernel.1,
                        stride,
                        pad,
                    },
                    groups,
                    bias: false,
                }),
            }],
        };
        json::validate(&net)?;
        Ok(resolve_shapes(&net, 1)?.layers.remove(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedNetwork {
    pub name: String,
    pub batch: u64,
    pub layers: Vec<ResolvedLayer>,
}

impl ResolvedNetwork {
    pub fn weighted_layers(&self) -> impl Iterator<Item = &ResolvedLayer> {
        self.layers.iter().filter(|l| l.kind.is_weighted())
    }

    pub fn conv_layers(&self) -> impl Iterator<Item = &ResolvedLayer> {
        self.layers.iter().filter(|l| l.kind == LayerKind::Conv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    channels: u64,
    height: u64,
    width: u64,
}

fn window_extent(layer: &str, axis: &'static str, input: u64, kernel: u64, stride: u64, pad: u64) -> Result<u64> {
    let padded = input + 2 * pad;
    if padded < kernel {
        return Err(Error::ShapeUnderflow {
            layer: layer.to_string(),
            axis,
            size: (padded as i64 - kernel as i64) / stride as i64 + 1,
            kernel,
            padded,
        });
    }
    Ok((padded - kernel) / stride + 1)
}

/// Propagates concrete shapes through the layer list.
pub fn resolve_shapes(net: &NetworkSpec, batch: u64) -> Result<ResolvedNetwork> {
    if batch == 0 {
        return Err(Error::InvalidArgument("batch must be at least 1".into()));
    }
    let mut outputs: HashMap<&str, Shape> = HashMap::new();
    let mut prev = Shape {
        channels: net.input.channels,
        height: net.input.height,
        width: net.input.width,
    };
    let mut layers = Vec::with_capacity(net.layers.len());

    for spec in &net.layers {
        let sources: Vec<Shape> = if spec.from.is_empty() {
            vec![prev]
        } else {
            spec.from
                .iter()
                .map(|src| {
                    outputs
                        .get(src.as_str())
                        .copied()
                        .ok_or_else(|| Error::IncompatibleInputs {
                            layer: spec.name.clone(),
                            message: format!("unknown source layer '{src}'"),
                        })
                })
                .collect::<Result<_>>()?
        };
        let input = merge_sources(spec, &sources)?;
        let layer = resolve_layer(spec, input)?;
        let out = Shape {
            channels: layer.out_channels,
            height: layer.out_h,
            width: layer.out_w,
        };
        outputs.insert(spec.name.as_str(), out);
        prev = out;
        layers.push(layer);
    }

    Ok(ResolvedNetwork {
        name: net.name.clone(),
        batch,
        layers,
    })
}

fn merge_sources(spec: &LayerSpec, sources: &[Shape]) -> Result<Shape> {
    let first = sources[0];
    match spec.kind() {
        LayerKind::Concat => {
            if let Some(bad) = sources
                .iter()
                .find(|s| (s.height, s.width) != (first.height, first.width))
            {
                return Err(Error::IncompatibleInputs {
                    layer: spec.name.clone(),
                    message: format!(
                        "concat inputs differ in extent ({}x{} vs {}x{})",
                        first.height, first.width, bad.height, bad.width
                    ),
                });
            }
            Ok(Shape {
                channels: sources.iter().map(|s| s.channels).sum(),
                ..first
            })
        }
        LayerKind::Add => {
            if let Some(bad) = sources.iter().find(|s| **s != first) {
                return Err(Error::IncompatibleInputs {
                    layer: spec.name.clone(),
                    message: format!(
                        "add inputs differ ({}x{}x{} vs {}x{}x{})",
                        first.channels, first.height, first.width, bad.channels, bad.height, bad.width
                    ),
                });
            }
            Ok(first)
        }
        _ => Ok(first),
    }
}

fn resolve_layer(spec: &LayerSpec, input: Shape) -> Result<ResolvedLayer> {
    let mut layer = ResolvedLayer {
        name: spec.name.clone(),
        kind: spec.kind(),
        from: spec.from.clone(),
        in_channels: input.channels,
        in_h: input.height,
        in_w: input.width,
        out_channels: input.channels,
        kernel_h: 1,
        kernel_w: 1,
        stride: 1,
        pad: 0,
        groups: 1,
        out_h: input.height,
        out_w: input.width,
        bias: false,
    };
    match spec.op {
        LayerOp::Conv(conv) => {
            for (what, value) in [("in_channels", input.channels), ("out_channels", conv.out_channels)] {
                if value % conv.groups != 0 {
                    return Err(Error::GroupDivisibility {
                        layer: spec.name.clone(),
                        what,
                        value,
                        groups: conv.groups,
                    });
                }
            }
            apply_window(&mut layer, conv.window)?;
            layer.out_channels = conv.out_channels;
            layer.groups = conv.groups;
            layer.bias = conv.bias;
        }
        LayerOp::Fc { out_channels, bias } => {
            layer.kernel_h = input.height;
            layer.kernel_w = input.width;
            layer.out_h = 1;
            layer.out_w = 1;
            layer.out_channels = out_channels;
            layer.bias = bias;
        }
        LayerOp::Pool(window) => apply_window(&mut layer, window)?,
        LayerOp::Activation | LayerOp::Concat | LayerOp::Add => {}
    }
    Ok(layer)
}

fn apply_window(layer: &mut ResolvedLayer, window: Window) -> Result<()> {
    layer.kernel_h = window.kernel_h;
    layer.kernel_w = window.kernel_w;
    layer.stride = window.stride;
    layer.pad = window.pad;
    layer.out_h = window_extent(
        &layer.name,
        "height",
        layer.in_h,
        window.kernel_h,
        window.stride,
        window.pad,
    )?;
    layer.out_w = window_extent(
        &layer.name,
        "width",
        layer.in_w,
        window.kernel_w,
        window.stride,
        window.pad,
    )?;
    Ok(())
}
