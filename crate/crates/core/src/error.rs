use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed JSON or a document that does not match the schema.
    #[error("syntax error: {0}")]
    Syntax(String),

    /// Well-formed document with an out-of-range or missing value.
    #[error("layer {index} ({layer}): {message}")]
    Semantic {
        index: usize,
        layer: String,
        message: String,
    },

    #[error("network input: {0}")]
    InvalidInput(String),

    #[error("layer {layer}: output {axis} would be {size} (kernel {kernel} exceeds padded input {padded})")]
    ShapeUnderflow {
        layer: String,
        axis: &'static str,
        size: i64,
        kernel: u64,
        padded: u64,
    },

    #[error("layer {layer}: {what} {value} not divisible by groups {groups}")]
    GroupDivisibility {
        layer: String,
        what: &'static str,
        value: u64,
        groups: u64,
    },

    #[error("layer {layer}: {message}")]
    IncompatibleInputs { layer: String, message: String },

    #[error("unknown network '{0}' (expected one of lenet5, alexnet, vgg16, googlenet, resnet50)")]
    UnknownNetwork(String),

    #[error("invalid architecture: {0}")]
    InvalidArch(String),

    #[error("invalid modifiers: {0}")]
    InvalidModifiers(String),

    #[error("access count overflow in layer {layer} ({what})")]
    Overflow { layer: String, what: &'static str },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncated run-length stream: {dangling} dangling bits after {pairs} pairs")]
    TruncatedStream { pairs: usize, dangling: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
