use super::{parse_network, NetworkSpec};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 5] = ["lenet5", "alexnet", "vgg16", "googlenet", "resnet50"];

const LENET5: &str = include_str!("builtin/lenet5.json");
const ALEXNET: &str = include_str!("builtin/alexnet.json");
const VGG16: &str = include_str!("builtin/vgg16.json");
const GOOGLENET: &str = include_str!("builtin/googlenet.json");
const RESNET50: &str = include_str!("builtin/resnet50.json");

/// Returns the embedded description document for a built-in network.
pub fn builtin_document(name: &str) -> Result<&'static str> {
    Ok(match name {
        "lenet5" => LENET5,
        "alexnet" => ALEXNET,
        "vgg16" => VGG16,
        "googlenet" => GOOGLENET,
        "resnet50" => RESNET50,
        other => return Err(Error::UnknownNetwork(other.to_string())),
    })
}

/// Built-in networks.
///
/// - `lenet5`: the C3 connection table (60 of 96 channel pairs) is expressed
///   as two branches, 4 maps over all six channels and 12 maps over three
///   channels each (groups=2), merged by a concat. C5 and F6 are the fc
///   layers; the RBF output stage is not modeled.
/// - `alexnet`: the original two-tower layout, groups=2 on conv2/4/5.
/// - `googlenet`: inception v1 without auxiliary classifiers.
/// - `resnet50`: stride on the first 1x1 of each down-sampling block,
///   projection shortcuts as explicit convs, no biases.
pub fn builtin(name: &str) -> Result<NetworkSpec> {
    parse_network(builtin_document(name)?)
}
