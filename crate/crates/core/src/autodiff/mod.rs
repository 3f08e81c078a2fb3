//! Minimal reverse-mode differentiation for the MaNet network: valid 3×3
//! convolutions, flatten and a dense layer, all with identity activation.

mod adam;
mod io;

pub use adam::{AdamConfig, AdamState};
pub use io::{load_model, save_model};

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Filters per convolution layer.
pub const FILTERS: usize = 6;
/// Spatial kernel size.
pub const KERNEL: usize = 3;
/// Side length of one genotype sample.
pub const INPUT_SIDE: usize = 8;
/// Flattened width after three valid convolutions on an 8×8 input.
pub const FLAT_FEATURES: usize = (INPUT_SIDE - 3 * (KERNEL - 1)) * (INPUT_SIDE - 3 * (KERNEL - 1)) * FILTERS;

/// Dense row-major buffer with an explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Array {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.iter().any(|&s| s == 0) || shape.iter().product::<usize>() != data.len() {
            return Err(Error::Shape(format!(
                "shape {:?} does not hold {} values",
                shape,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// `(height, width, channels)` of a rank-3 array.
    fn hwc(&self) -> Result<(usize, usize, usize)> {
        match self.shape.as_slice() {
            &[h, w, c] => Ok((h, w, c)),
            other => Err(Error::Shape(format!("expected H×W×C, got {other:?}"))),
        }
    }
}

/// Six 3×3 filters over `in_channels` input channels.
///
/// Weights are laid out `[filter][ky][kx][channel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    in_channels: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ConvLayer {
    pub fn zeros(in_channels: usize) -> Self {
        Self {
            in_channels,
            weights: vec![0.0; FILTERS * KERNEL * KERNEL * in_channels],
            bias: vec![0.0; FILTERS],
        }
    }

    pub fn from_parts(in_channels: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != FILTERS * KERNEL * KERNEL * in_channels || bias.len() != FILTERS {
            return Err(Error::Shape(format!(
                "conv layer needs {} weights and {} biases",
                FILTERS * KERNEL * KERNEL * in_channels,
                FILTERS
            )));
        }
        Ok(Self {
            in_channels,
            weights,
            bias,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    #[inline]
    fn widx(&self, f: usize, ky: usize, kx: usize, c: usize) -> usize {
        ((f * KERNEL + ky) * KERNEL + kx) * self.in_channels + c
    }

    fn fan_in(&self) -> usize {
        KERNEL * KERNEL * self.in_channels
    }

    fn fan_out(&self) -> usize {
        KERNEL * KERNEL * FILTERS
    }
}

/// Valid (unpadded, stride 1) cross-correlation plus per-filter bias.
pub fn conv2d_valid(input: &Array, layer: &ConvLayer) -> Result<Array> {
    let (h, w, c) = input.hwc()?;
    if h < KERNEL || w < KERNEL {
        return Err(Error::Shape(format!(
            "convolution needs at least {KERNEL}×{KERNEL} input, got {h}×{w}"
        )));
    }
    if c != layer.in_channels {
        return Err(Error::Shape(format!(
            "layer expects {} channels, input has {c}",
            layer.in_channels
        )));
    }
    let (ho, wo) = (h - KERNEL + 1, w - KERNEL + 1);
    let mut out = Array::zeros(vec![ho, wo, FILTERS]);
    let x = input.data();
    for oy in 0..ho {
        for ox in 0..wo {
            let base = (oy * wo + ox) * FILTERS;
            for f in 0..FILTERS {
                let mut acc = layer.bias[f];
                for ky in 0..KERNEL {
                    let row = ((oy + ky) * w + ox) * c;
                    let wrow = layer.widx(f, ky, 0, 0);
                    let span = KERNEL * c;
                    acc += x[row..row + span]
                        .iter()
                        .zip(&layer.weights[wrow..wrow + span])
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                }
                out.data[base + f] = acc;
            }
        }
    }
    Ok(out)
}

/// Reverse pass of [`conv2d_valid`]. Accumulates parameter gradients into
/// `grad` and, when `input_grad` is set, returns the gradient with respect
/// to `input`.
fn conv2d_valid_backward(
    input: &Array,
    layer: &ConvLayer,
    upstream: &Array,
    grad: &mut ConvLayer,
    input_grad: bool,
) -> Option<Array> {
    let (_, w, c) = input.hwc().expect("recorded input is rank 3");
    let (ho, wo, _) = upstream.hwc().expect("recorded output is rank 3");
    let x = input.data();
    let mut d_in = Array::zeros(if input_grad { input.shape.clone() } else { vec![1] });
    for oy in 0..ho {
        for ox in 0..wo {
            let base = (oy * wo + ox) * FILTERS;
            for f in 0..FILTERS {
                let up = upstream.data[base + f];
                if up == 0.0 {
                    continue;
                }
                grad.bias[f] += up;
                for ky in 0..KERNEL {
                    let row = ((oy + ky) * w + ox) * c;
                    let wrow = layer.widx(f, ky, 0, 0);
                    for k in 0..KERNEL * c {
                        grad.weights[wrow + k] += up * x[row + k];
                    }
                    if input_grad {
                        for k in 0..KERNEL * c {
                            d_in.data[row + k] += up * layer.weights[wrow + k];
                        }
                    }
                }
            }
        }
    }
    input_grad.then_some(d_in)
}

/// Fully connected layer with linear activation. Weights are `inputs × outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn from_parts(inputs: usize, outputs: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != inputs * outputs || bias.len() != outputs {
            return Err(Error::Shape(format!(
                "dense layer {inputs}×{outputs} needs {} weights and {outputs} biases",
                inputs * outputs
            )));
        }
        Ok(Self {
            inputs,
            outputs,
            weights,
            bias,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.inputs {
            return Err(Error::Shape(format!(
                "dense layer expects {} inputs, got {}",
                self.inputs,
                input.len()
            )));
        }
        let mut out = self.bias.clone();
        for (xi, row) in input.iter().zip(self.weights.chunks_exact(self.outputs)) {
            for (o, wij) in out.iter_mut().zip(row) {
                *o += xi * wij;
            }
        }
        Ok(out)
    }

    fn backward(&self, input: &[f64], upstream: &[f64], grad: &mut DenseLayer) -> Vec<f64> {
        for (b, u) in grad.bias.iter_mut().zip(upstream) {
            *b += u;
        }
        let mut d_in = vec![0.0; self.inputs];
        for (i, xi) in input.iter().enumerate() {
            let row = i * self.outputs..(i + 1) * self.outputs;
            let mut acc = 0.0;
            for ((g, wij), u) in grad.weights[row.clone()]
                .iter_mut()
                .zip(&self.weights[row])
                .zip(upstream)
            {
                *g += xi * u;
                acc += wij * u;
            }
            d_in[i] = acc;
        }
        d_in
    }
}

/// Three convolution layers followed by a dense decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub conv1: ConvLayer,
    pub conv2: ConvLayer,
    pub conv3: ConvLayer,
    pub dense: DenseLayer,
}

impl Model {
    /// All-zero model producing vectors of length `dimension`.
    pub fn zeros(dimension: usize) -> Self {
        Self {
            conv1: ConvLayer::zeros(1),
            conv2: ConvLayer::zeros(FILTERS),
            conv3: ConvLayer::zeros(FILTERS),
            dense: DenseLayer::zeros(FLAT_FEATURES, dimension),
        }
    }

    pub fn output_dim(&self) -> usize {
        self.dense.outputs
    }

    /// Parameter tensors in a fixed order.
    pub fn tensors(&self) -> [&[f64]; 8] {
        [
            &self.conv1.weights,
            &self.conv1.bias,
            &self.conv2.weights,
            &self.conv2.bias,
            &self.conv3.weights,
            &self.conv3.bias,
            &self.dense.weights,
            &self.dense.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 8] {
        [
            &mut self.conv1.weights,
            &mut self.conv1.bias,
            &mut self.conv2.weights,
            &mut self.conv2.bias,
            &mut self.conv3.weights,
            &mut self.conv3.bias,
            &mut self.dense.weights,
            &mut self.dense.bias,
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn same_shape(&self, other: &Model) -> bool {
        self.tensors()
            .iter()
            .zip(other.tensors().iter())
            .all(|(a, b)| a.len() == b.len())
    }

    /// Model of the same shape with all parameters zero.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.output_dim())
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, other: &Model, factor: f64) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += factor * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// `dense(flatten(conv3(conv2(conv1(sample)))))`, recording intermediate
    /// values on `tape`.
    pub fn forward(&self, sample: &Array, tape: &mut Tape) -> Result<Vec<f64>> {
        tape.clear();
        let (h, w, c) = sample.hwc()?;
        if c != self.conv1.in_channels {
            return Err(Error::Shape(format!(
                "model expects {} input channels, got {c}",
                self.conv1.in_channels
            )));
        }
        let mut ho = h;
        let mut wo = w;
        for _ in 0..3 {
            ho = ho.checked_sub(KERNEL - 1).filter(|v| *v > 0).ok_or_else(|| {
                Error::Shape(format!("input {h}×{w} too small for three 3×3 layers"))
            })?;
            wo = wo.checked_sub(KERNEL - 1).filter(|v| *v > 0).ok_or_else(|| {
                Error::Shape(format!("input {h}×{w} too small for three 3×3 layers"))
            })?;
        }
        if ho * wo * FILTERS != self.dense.inputs {
            return Err(Error::Shape(format!(
                "dense layer expects {} features, convolution stack yields {}",
                self.dense.inputs,
                ho * wo * FILTERS
            )));
        }
        let input = tape.push(Op::Input, None, sample.clone());
        let a1 = conv2d_valid(tape.value(input), &self.conv1)?;
        let n1 = tape.push(Op::Conv(0), Some(input), a1);
        let a2 = conv2d_valid(tape.value(n1), &self.conv2)?;
        let n2 = tape.push(Op::Conv(1), Some(n1), a2);
        let a3 = conv2d_valid(tape.value(n2), &self.conv3)?;
        let n3 = tape.push(Op::Conv(2), Some(n2), a3);
        let flat = tape.value(n3).data.clone();
        let len = flat.len();
        let nf = tape.push(Op::Flatten, Some(n3), Array::new(vec![len], flat)?);
        let out = self.dense.forward(tape.value(nf).data())?;
        tape.push(Op::Dense, Some(nf), Array::new(vec![out.len()], out.clone())?);
        Ok(out)
    }

    /// Output without recording a tape.
    pub fn predict(&self, sample: &Array) -> Result<Vec<f64>> {
        let mut tape = Tape::default();
        self.forward(sample, &mut tape)
    }

    fn conv(&self, idx: usize) -> &ConvLayer {
        match idx {
            0 => &self.conv1,
            1 => &self.conv2,
            _ => &self.conv3,
        }
    }
}

impl Model {
    fn conv_mut(&mut self, idx: usize) -> &mut ConvLayer {
        match idx {
            0 => &mut self.conv1,
            1 => &mut self.conv2,
            _ => &mut self.conv3,
        }
    }
}

/// Glorot-uniform weights, zero biases. Deterministic per seed.
pub fn init_model(dimension: usize, seed: u64) -> Model {
    assert!(dimension >= 1, "model output dimension must be positive");
    let mut rng = seed::rng(seed::derive(seed, seed::stream::MODEL));
    let mut model = Model::zeros(dimension);
    for idx in 0..3 {
        let layer = model.conv_mut(idx);
        let bound = glorot_bound(layer.fan_in(), layer.fan_out());
        layer
            .weights
            .iter_mut()
            .for_each(|w| *w = rng.random_range(-bound..=bound));
    }
    let bound = glorot_bound(model.dense.inputs, model.dense.outputs);
    model
        .dense
        .weights
        .iter_mut()
        .for_each(|w| *w = rng.random_range(-bound..=bound));
    model
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Input,
    Conv(usize),
    Flatten,
    Dense,
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    parent: Option<usize>,
    value: Array,
}

/// Operation record of one forward pass.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, op: Op, parent: Option<usize>, value: Array) -> usize {
        self.nodes.push(Node { op, parent, value });
        self.nodes.len() - 1
    }

    fn value(&self, idx: usize) -> &Array {
        &self.nodes[idx].value
    }

    /// Gradients of `upstream · output` with respect to every parameter.
    pub fn backward(&self, model: &Model, upstream: &[f64]) -> Result<Model> {
        let mut grads = model.zeros_like();
        self.backward_into(model, upstream, &mut grads)?;
        Ok(grads)
    }

    /// Like [`Tape::backward`] but accumulates into `grads`.
    pub fn backward_into(&self, model: &Model, upstream: &[f64], grads: &mut Model) -> Result<()> {
        let Some(last) = self.nodes.last() else {
            return Err(Error::EmptyTape);
        };
        if upstream.len() != last.value.data.len() {
            return Err(Error::Shape(format!(
                "upstream has {} entries, output has {}",
                upstream.len(),
                last.value.data.len()
            )));
        }
        if !model.same_shape(grads) {
            return Err(Error::Shape("gradient buffer does not match model".into()));
        }
        let mut adjoint: Vec<Option<Array>> = vec![None; self.nodes.len()];
        adjoint[self.nodes.len() - 1] = Some(Array {
            shape: last.value.shape.clone(),
            data: upstream.to_vec(),
        });
        for idx in (0..self.nodes.len()).rev() {
            let Some(adj) = adjoint[idx].take() else {
                continue;
            };
            let node = &self.nodes[idx];
            let Some(parent) = node.parent else {
                continue;
            };
            let parent_value = &self.nodes[parent].value;
            let d_parent = match node.op {
                Op::Dense => {
                    let d = model.dense.backward(&parent_value.data, &adj.data, &mut grads.dense);
                    Array {
                        shape: parent_value.shape.clone(),
                        data: d,
                    }
                }
                Op::Flatten => Array {
                    shape: parent_value.shape.clone(),
                    data: adj.data,
                },
                Op::Conv(layer) => {
                    // the network input needs no adjoint
                    let wants_input = self.nodes[parent].op != Op::Input;
                    match conv2d_valid_backward(
                        parent_value,
                        model.conv(layer),
                        &adj,
                        grads.conv_mut(layer),
                        wants_input,
                    ) {
                        Some(d) => d,
                        None => continue,
                    }
                }
                Op::Input => continue,
            };
            adjoint[parent] = Some(d_parent);
        }
        Ok(())
    }
}
