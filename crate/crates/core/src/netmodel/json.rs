use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ConvParams, InputShape, LayerKind, LayerOp, LayerSpec, NetworkSpec, Window};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    name: String,
    input: RawInput,
    layers: Vec<RawLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    channels: i64,
    height: i64,
    width: i64,
}

// Numeric fields are signed so that negative values surface as semantic
// errors naming the layer instead of opaque deserialization failures.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_channels: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stride: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pad: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<Vec<String>>,
}

struct LayerCtx<'a> {
    index: usize,
    name: &'a str,
}

impl LayerCtx<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Semantic {
            index: self.index,
            layer: self.name.to_string(),
            message: message.into(),
        }
    }

    fn required(&self, field: &str, value: Option<i64>) -> Result<i64> {
        value.ok_or_else(|| self.err(format!("missing required field '{field}'")))
    }

    fn at_least(&self, field: &str, value: i64, min: i64) -> Result<u64> {
        if value < min {
            return Err(self.err(format!("{field} must be >= {min}, got {value}")));
        }
        Ok(value as u64)
    }

    fn window(&self, raw: &RawLayer) -> Result<Window> {
        let [kh, kw] = raw.kernel.ok_or_else(|| self.err("missing required field 'kernel'"))?;
        Ok(Window {
            kernel_h: self.at_least("kernel height", kh, 1)?,
            kernel_w: self.at_least("kernel width", kw, 1)?,
            stride: self.at_least("stride", raw.stride.unwrap_or(1), 1)?,
            pad: self.at_least("pad", raw.pad.unwrap_or(0), 0)?,
        })
    }
}

/// Parses and validates a network-description document.
pub fn parse_network(text: &str) -> Result<NetworkSpec> {
    let raw: RawNetwork = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;

    let dims = [
        ("channels", raw.input.channels),
        ("height", raw.input.height),
        ("width", raw.input.width),
    ];
    if let Some((field, v)) = dims.iter().find(|(_, v)| *v < 1) {
        return Err(Error::InvalidInput(format!("{field} must be >= 1, got {v}")));
    }

    let layers = raw
        .layers
        .iter()
        .enumerate()
        .map(|(index, l)| convert_layer(index, l))
        .collect::<Result<Vec<_>>>()?;

    let net = NetworkSpec {
        name: raw.name,
        input: InputShape {
            channels: raw.input.channels as u64,
            height: raw.input.height as u64,
            width: raw.input.width as u64,
        },
        layers,
    };
    validate(&net)?;
    Ok(net)
}

fn convert_layer(index: usize, raw: &RawLayer) -> Result<LayerSpec> {
    let name = raw.name.as_deref().unwrap_or("<unnamed>");
    let ctx = LayerCtx { index, name };
    if raw.name.as_deref().is_none_or(str::is_empty) {
        return Err(ctx.err("missing required field 'name'"));
    }
    let kind: LayerKind = raw.kind.parse().map_err(|m: String| ctx.err(m))?;

    let op = match kind {
        LayerKind::Conv => {
            let out_channels = ctx.at_least("out_channels", ctx.required("out_channels", raw.out_channels)?, 1)?;
            LayerOp::Conv(ConvParams {
                out_channels,
                window: ctx.window(raw)?,
                groups: ctx.at_least("groups", raw.groups.unwrap_or(1), 1)?,
                bias: raw.bias.unwrap_or(true),
            })
        }
        LayerKind::Fc => LayerOp::Fc {
            out_channels: ctx.at_least("out_channels", ctx.required("out_channels", raw.out_channels)?, 1)?,
            bias: raw.bias.unwrap_or(true),
        },
        LayerKind::Pool => LayerOp::Pool(ctx.window(raw)?),
        LayerKind::Activation => LayerOp::Activation,
        LayerKind::Concat => LayerOp::Concat,
        LayerKind::Add => LayerOp::Add,
    };

    Ok(LayerSpec {
        name: name.to_string(),
        from: raw.from.clone().unwrap_or_default(),
        op,
    })
}

/// Structural checks that need the whole layer list: a non-empty network,
/// unique names, and `from` references that point backwards.
pub(super) fn validate(net: &NetworkSpec) -> Result<()> {
    if net.layers.is_empty() {
        return Err(Error::Semantic {
            index: 0,
            layer: net.name.clone(),
            message: "network has no layers".into(),
        });
    }
    let mut seen = HashSet::new();
    for (index, layer) in net.layers.iter().enumerate() {
        let ctx = LayerCtx {
            index,
            name: &layer.name,
        };
        if let Some(src) = layer.from.iter().find(|s| !seen.contains(s.as_str())) {
            return Err(ctx.err(format!("'from' references unknown or later layer '{src}'")));
        }
        let merge = layer.kind().is_merge();
        if merge && layer.from.len() < 2 {
            return Err(ctx.err(format!("{} needs at least two 'from' sources", layer.kind())));
        }
        if !merge && layer.from.len() > 1 {
            return Err(ctx.err(format!("{} takes a single source", layer.kind())));
        }
        if !seen.insert(layer.name.as_str()) {
            return Err(ctx.err("duplicate layer name"));
        }
    }
    Ok(())
}

pub(super) fn to_json(net: &NetworkSpec) -> String {
    let layers = net
        .layers
        .iter()
        .map(|l| {
            let mut raw = RawLayer {
                kind: l.kind().as_str().to_string(),
                name: Some(l.name.clone()),
                from: (!l.from.is_empty()).then(|| l.from.clone()),
                ..Default::default()
            };
            let set_window = |raw: &mut RawLayer, w: &Window| {
                raw.kernel = Some([w.kernel_h as i64, w.kernel_w as i64]);
                raw.stride = Some(w.stride as i64);
                raw.pad = Some(w.pad as i64);
            };
            match &l.op {
                LayerOp::Conv(c) => {
                    raw.out_channels = Some(c.out_channels as i64);
                    set_window(&mut raw, &c.window);
                    raw.groups = Some(c.groups as i64);
                    raw.bias = Some(c.bias);
                }
                LayerOp::Fc { out_channels, bias } => {
                    raw.out_channels = Some(*out_channels as i64);
                    raw.bias = Some(*bias);
                }
                LayerOp::Pool(w) => set_window(&mut raw, w),
                LayerOp::Activation | LayerOp::Concat | LayerOp::Add => {}
            }
            raw
        })
        .collect();
    let raw = RawNetwork {
        name: net.name.clone(),
        input: RawInput {
            channels: net.input.channels as i64,
            height: net.input.height as i64,
            width: net.input.width as i64,
        },
        layers,
    };
    serde_json::to_string_pretty(&raw).expect("network serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"name":"one","input":{"channels":1,"height":1,"width":1},
        "layers":[{"type":"conv","name":"c","out_channels":1,"kernel":[1,1]}]}"#;

    #[test]
    fn minimal_document() {
        let net = parse_network(MINIMAL).unwrap();
        assert_eq!(net.layers.len(), 1);
        match net.layers[0].op {
            LayerOp::Conv(c) => {
                assert_eq!(c.out_channels, 1);
                assert_eq!((c.window.stride, c.window.pad, c.groups, c.bias), (1, 0, 1, true));
            }
            ref other => panic!("unexpected op {other:?}"),
        }
    }

    #[test]
    fn stride_zero_names_layer() {
        let text = r#"{"name":"n","input":{"channels":1,"height":8,"width":8},"layers":[
            {"type":"conv","name":"ok","out_channels":1,"kernel":[1,1]},
            {"type":"conv","name":"bad","out_channels":1,"kernel":[3,3],"stride":0}]}"#;
        match parse_network(text).unwrap_err() {
            Error::Semantic { index, layer, message } => {
                assert_eq!((index, layer.as_str()), (1, "bad"));
                assert!(message.contains("stride"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_and_schema_errors() {
        assert!(matches!(parse_network("{not json"), Err(Error::Syntax(_))));
        let unknown_key = MINIMAL.replace("\"kernel\"", "\"dilation\":2,\"kernel\"");
        assert!(matches!(parse_network(&unknown_key), Err(Error::Syntax(_))));
    }

    #[test]
    fn semantic_errors() {
        let cases = [
            (
                r#"{"type":"deconv","name":"x","out_channels":1,"kernel":[1,1]}"#,
                "unknown layer kind",
            ),
            (r#"{"type":"conv","name":"x","kernel":[1,1]}"#, "out_channels"),
            (
                r#"{"type":"conv","name":"x","out_channels":-4,"kernel":[1,1]}"#,
                "out_channels",
            ),
            (r#"{"type":"conv","name":"x","out_channels":4}"#, "kernel"),
            (r#"{"type":"pool","name":"x","kernel":[2,2],"pad":-1}"#, "pad"),
            (r#"{"type":"conv","out_channels":4,"kernel":[1,1]}"#, "name"),
            (r#"{"type":"concat","name":"x","from":["nope","nada"]}"#, "nope"),
        ];
        for (layer, needle) in cases {
            let text = format!(r#"{{"name":"n","input":{{"channels":1,"height":4,"width":4}},"layers":[{layer}]}}"#);
            match parse_network(&text) {
                Err(Error::Semantic { message, .. }) => {
                    assert!(message.contains(needle), "{message} lacks {needle}")
                }
                other => panic!("{layer}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn empty_and_duplicate_layers_rejected() {
        let empty = r#"{"name":"n","input":{"channels":1,"height":4,"width":4},"layers":[]}"#;
        assert!(parse_network(empty).is_err());
        let dup = r#"{"name":"n","input":{"channels":1,"height":4,"width":4},"layers":[
            {"type":"act","name":"a"},{"type":"act","name":"a"}]}"#;
        assert!(matches!(parse_network(dup), Err(Error::Semantic { index: 1, .. })));
    }

    #[test]
    fn negative_input_dimension() {
        let text = MINIMAL.replace("\"height\":1", "\"height\":-1");
        assert!(matches!(parse_network(&text), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn serialize_round_trip() {
        let net = parse_network(MINIMAL).unwrap();
        assert_eq!(parse_network(&net.to_json()).unwrap(), net);
    }
}
