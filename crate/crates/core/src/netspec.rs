//! Analytical calculator for layer output shapes and parameter counts of
//! dense-block encoder/decoder networks, driven by a declarative spec file.
//! No tensors are ever allocated; everything is closed-form arithmetic.
//!
//! Spec grammar: one layer per line, `<name> <kind> [attr ...]`, where kind
//! is `conv`, `dense_block`, `max_pool` or `up_conv`. Attributes:
//! `out=N` (conv/up_conv output channels), `kernel=KxK`, `reps=N` and
//! `growth=N` (dense blocks), `skip=NAME` (concatenate a previous layer's
//! output into this layer's input), and the flags `separable` and
//! `new_only` (a dense block emits only its newly grown feature maps).
//! `#` starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetspecError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("spec file declares no layers")]
    EmptySpec,
    #[error("line {line}: duplicate layer name {name:?}")]
    DuplicateLayer { line: usize, name: String },
    #[error("layer {layer:?} takes skip input from unknown or later layer {skip:?}")]
    UnknownSkipSource { layer: String, skip: String },
    #[error(
        "concatenation shape mismatch: layer {layer:?} is {layer_h}x{layer_w}, \
         skip source {skip:?} is {skip_h}x{skip_w}"
    )]
    ConcatMismatch {
        layer: String,
        skip: String,
        layer_h: usize,
        layer_w: usize,
        skip_h: usize,
        skip_w: usize,
    },
    #[error("layer {name:?} pools a {h}x{w} map down to nothing")]
    CollapsedDimension { name: String, h: usize, w: usize },
    #[error("bad input dimensions {input:?}, expected HxWxC")]
    BadInput { input: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv,
    DenseBlock,
    MaxPool,
    UpConv,
}

impl LayerKind {
    fn as_str(&self) -> &'static str {
        match self {
            LayerKind::Conv => "conv",
            LayerKind::DenseBlock => "dense_block",
            LayerKind::MaxPool => "max_pool",
            LayerKind::UpConv => "up_conv",
        }
    }
}

/// One declarative layer. Kernels default to 3×3 (2×2 for pools);
/// up-convolutions are transposed convs with stride 2.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub kernel: (usize, usize),
    pub out_channels: usize,
    pub repetitions: usize,
    pub growth_rate: usize,
    pub depth_separable: bool,
    pub emit_new_only: bool,
    pub skip_from: Option<String>,
}

/// Derived facts about one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerShape {
    pub name: String,
    pub kind: LayerKind,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub input_channels: usize,
    /// Weights with the layer's own separability flag applied.
    pub weights: u64,
    pub weights_standard: u64,
    pub weights_separable: u64,
    pub biases: u64,
    pub batchnorm: u64,
}

/// Full analysis: per-layer shapes and weight counts plus totals.
/// The headline totals are weights only; biases and normalization
/// parameters are itemized separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub input: (usize, usize, usize),
    pub layers: Vec<LayerShape>,
    pub total_weights: u64,
    pub total_weights_standard: u64,
    pub total_biases: u64,
    pub total_batchnorm: u64,
    /// Non-fatal findings, e.g. an up-convolution that cannot exactly
    /// invert the matching pooling stage after odd-sized floors.
    pub warnings: Vec<String>,
}

impl ShapeReport {
    pub fn layer(&self, name: &str) -> Option<&LayerShape> {
        self.layers.iter().find(|l| l.name == name)
    }
}

/// Parse `HxWxC`, e.g. `64x512x5`.
pub fn parse_input_dims(input: &str) -> Result<(usize, usize, usize), NetspecError> {
    let bad = || NetspecError::BadInput {
        input: input.to_string(),
    };
    let parts: Vec<&str> = input.split('x').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut dims = [0usize; 3];
    for (slot, part) in dims.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| bad())?;
        if *slot == 0 {
            return Err(bad());
        }
    }
    Ok((dims[0], dims[1], dims[2]))
}

pub fn load_spec_file(path: &Path) -> Result<Vec<LayerSpec>, NetspecError> {
    let text = std::fs::read_to_string(path).map_err(|e| NetspecError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<Vec<LayerSpec>, NetspecError> {
    let mut layers: Vec<LayerSpec> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let name = tokens.next().expect("non-empty line").to_string();
        let kind_token = tokens.next().ok_or_else(|| NetspecError::Parse {
            line,
            reason: format!("layer {name:?} is missing a kind"),
        })?;
        let kind = match kind_token {
            "conv" => LayerKind::Conv,
            "dense_block" => LayerKind::DenseBlock,
            "max_pool" => LayerKind::MaxPool,
            "up_conv" => LayerKind::UpConv,
            other => {
                return Err(NetspecError::Parse {
                    line,
                    reason: format!("unknown layer kind {other:?}"),
                })
            }
        };
        if seen.insert(name.clone(), line).is_some() {
            return Err(NetspecError::DuplicateLayer { line, name });
        }

        let default_kernel = match kind {
            LayerKind::MaxPool => (2, 2),
            _ => (3, 3),
        };
        let mut layer = LayerSpec {
            name,
            kind,
            kernel: default_kernel,
            out_channels: 0,
            repetitions: 0,
            growth_rate: 0,
            depth_separable: false,
            emit_new_only: false,
            skip_from: None,
        };

        for token in tokens {
            let parse_err = |reason: String| NetspecError::Parse { line, reason };
            match token.split_once('=') {
                Some(("out", v)) => {
                    layer.out_channels = parse_count(v, "out", line)?;
                }
                Some(("reps", v)) => {
                    layer.repetitions = parse_count(v, "reps", line)?;
                }
                Some(("growth", v)) => {
                    layer.growth_rate = parse_count(v, "growth", line)?;
                }
                Some(("kernel", v)) => {
                    let (kh, kw) = v
                        .split_once('x')
                        .ok_or_else(|| parse_err(format!("kernel {v:?} is not KxK")))?;
                    layer.kernel = (
                        parse_count(kh, "kernel", line)?,
                        parse_count(kw, "kernel", line)?,
                    );
                }
                Some(("skip", v)) => {
                    layer.skip_from = Some(v.to_string());
                }
                None if token == "separable" => layer.depth_separable = true,
                None if token == "new_only" => layer.emit_new_only = true,
                _ => {
                    return Err(parse_err(format!("unknown attribute {token:?}")));
                }
            }
        }

        match kind {
            LayerKind::Conv | LayerKind::UpConv if layer.out_channels == 0 => {
                return Err(NetspecError::Parse {
                    line,
                    reason: format!("{} layer {:?} needs out=N", kind.as_str(), layer.name),
                });
            }
            LayerKind::DenseBlock if layer.repetitions == 0 || layer.growth_rate == 0 => {
                return Err(NetspecError::Parse {
                    line,
                    reason: format!("dense_block {:?} needs reps=N and growth=N", layer.name),
                });
            }
            _ => {}
        }
        layers.push(layer);
    }
    if layers.is_empty() {
        return Err(NetspecError::EmptySpec);
    }
    Ok(layers)
}

fn parse_count(v: &str, attr: &str, line: usize) -> Result<usize, NetspecError> {
    let value: usize = v.parse().map_err(|_| NetspecError::Parse {
        line,
        reason: format!("attribute {attr}={v:?} is not a positive integer"),
    })?;
    if value == 0 {
        return Err(NetspecError::Parse {
            line,
            reason: format!("attribute {attr} must be positive"),
        });
    }
    Ok(value)
}

/// Standard 2D convolution weight count.
fn conv_weights(kernel: (usize, usize), cin: usize, cout: usize) -> u64 {
    (kernel.0 * kernel.1 * cin * cout) as u64
}

/// Depth-separable factorization: per-channel spatial filter plus 1×1 mix.
fn separable_weights(kernel: (usize, usize), cin: usize, cout: usize) -> u64 {
    (kernel.0 * kernel.1 * cin + cin * cout) as u64
}

/// Walk the spec, deriving every output shape and parameter count.
///
/// Spatial rules: convs and dense blocks preserve H×W (same padding),
/// max-pools floor-divide by the kernel, up-convs double. A dense block
/// grows `reps * growth` channels over its concatenated input and emits
/// either everything or, with `new_only`, just the grown maps.
pub fn derive_shapes(
    specs: &[LayerSpec],
    input: (usize, usize, usize),
) -> Result<ShapeReport, NetspecError> {
    if specs.is_empty() {
        return Err(NetspecError::EmptySpec);
    }
    let (mut h, mut w, mut c) = input;
    let mut outputs: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    let mut pool_stack: Vec<(usize, usize, String)> = Vec::new();
    let mut warnings = Vec::new();
    let mut layers = Vec::with_capacity(specs.len());

    for spec in specs {
        // Skip concatenation joins the named layer's output to this input.
        let mut cin = c;
        if let Some(source) = &spec.skip_from {
            let (sh, sw, sc) =
                *outputs
                    .get(source.as_str())
                    .ok_or_else(|| NetspecError::UnknownSkipSource {
                        layer: spec.name.clone(),
                        skip: source.clone(),
                    })?;
            if (sh, sw) != (h, w) {
                return Err(NetspecError::ConcatMismatch {
                    layer: spec.name.clone(),
                    skip: source.clone(),
                    layer_h: h,
                    layer_w: w,
                    skip_h: sh,
                    skip_w: sw,
                });
            }
            cin += sc;
        }

        let (weights_standard, weights_separable, biases, batchnorm);
        match spec.kind {
            LayerKind::Conv => {
                c = spec.out_channels;
                weights_standard = conv_weights(spec.kernel, cin, c);
                weights_separable = separable_weights(spec.kernel, cin, c);
                biases = if spec.depth_separable { cin + c } else { c } as u64;
                batchnorm = 2 * c as u64;
            }
            LayerKind::UpConv => {
                h *= 2;
                w *= 2;
                c = spec.out_channels;
                weights_standard = conv_weights(spec.kernel, cin, c);
                weights_separable = separable_weights(spec.kernel, cin, c);
                biases = if spec.depth_separable { cin + c } else { c } as u64;
                batchnorm = 2 * c as u64;
                if let Some((ph, pw, pool_name)) = pool_stack.pop() {
                    if (ph, pw) != (h, w) {
                        warnings.push(format!(
                            "{} produces {h}x{w}, which does not invert {pool_name} \
                             (pooled from {ph}x{pw})",
                            spec.name
                        ));
                    }
                }
            }
            LayerKind::MaxPool => {
                pool_stack.push((h, w, spec.name.clone()));
                h /= spec.kernel.0.max(1);
                w /= spec.kernel.1.max(1);
                if h == 0 || w == 0 {
                    return Err(NetspecError::CollapsedDimension {
                        name: spec.name.clone(),
                        h,
                        w,
                    });
                }
                weights_standard = 0;
                weights_separable = 0;
                biases = 0;
                batchnorm = 0;
            }
            LayerKind::DenseBlock => {
                let grown = spec.repetitions * spec.growth_rate;
                c = if spec.emit_new_only {
                    grown
                } else {
                    cin + grown
                };
                let mut std_total = 0u64;
                let mut sep_total = 0u64;
                let mut bias_total = 0u64;
                let mut bn_total = 0u64;
                for i in 0..spec.repetitions {
                    let layer_in = cin + i * spec.growth_rate;
                    std_total += conv_weights(spec.kernel, layer_in, spec.growth_rate);
                    sep_total += separable_weights(spec.kernel, layer_in, spec.growth_rate);
                    bias_total += if spec.depth_separable {
                        (layer_in + spec.growth_rate) as u64
                    } else {
                        spec.growth_rate as u64
                    };
                    // Pre-activation normalization on each internal input.
                    bn_total += 2 * layer_in as u64;
                }
                weights_standard = std_total;
                weights_separable = sep_total;
                biases = bias_total;
                batchnorm = bn_total;
            }
        }

        let weights = if spec.depth_separable {
            weights_separable
        } else {
            weights_standard
        };
        outputs.insert(spec.name.as_str(), (h, w, c));
        layers.push(LayerShape {
            name: spec.name.clone(),
            kind: spec.kind,
            height: h,
            width: w,
            channels: c,
            input_channels: cin,
            weights,
            weights_standard,
            weights_separable,
            biases,
            batchnorm,
        });
    }

    Ok(ShapeReport {
        input,
        total_weights: layers.iter().map(|l| l.weights).sum(),
        total_weights_standard: layers.iter().map(|l| l.weights_standard).sum(),
        total_biases: layers.iter().map(|l| l.biases).sum(),
        total_batchnorm: layers.iter().map(|l| l.batchnorm).sum(),
        layers,
        warnings,
    })
}

/// Shapes plus parameter counts; same analysis as [`derive_shapes`],
/// named for the call sites that only care about the counts.
pub fn count_params(
    specs: &[LayerSpec],
    input: (usize, usize, usize),
) -> Result<ShapeReport, NetspecError> {
    derive_shapes(specs, input)
}

pub fn millions(count: u64) -> f64 {
    count as f64 / 1e6
}

impl fmt::Display for ShapeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:<12} {:>14} {:>12} {:>12}",
            "layer", "kind", "output", "weights", "weights_std"
        )?;
        let (h, w, c) = self.input;
        writeln!(
            f,
            "{:<12} {:<12} {:>14} {:>12} {:>12}",
            "(input)",
            "-",
            format!("{h}x{w}x{c}"),
            "-",
            "-"
        )?;
        for l in &self.layers {
            writeln!(
                f,
                "{:<12} {:<12} {:>14} {:>12} {:>12}",
                l.name,
                l.kind.as_str(),
                format!("{}x{}x{}", l.height, l.width, l.channels),
                l.weights,
                l.weights_standard
            )?;
        }
        writeln!(
            f,
            "total weights (as configured): {} ({:.2} M)",
            self.total_weights,
            millions(self.total_weights)
        )?;
        writeln!(
            f,
            "total weights (all standard):  {} ({:.2} M)",
            self.total_weights_standard,
            millions(self.total_weights_standard)
        )?;
        write!(
            f,
            "itemized extras: {} biases, {} batchnorm params",
            self.total_biases, self.total_batchnorm
        )
    }
}
