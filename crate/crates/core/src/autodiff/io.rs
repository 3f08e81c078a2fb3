//! Plain-text parameter blobs.
//!
//! ```text
//! manet-model 1
//! conv1.weight 6 3 3 1
//! <54 values, one per line>
//! conv1.bias 6
//! ...
//! ```
//! Values are written in shortest round-trip form, so a save/load cycle is
//! bit-exact.

use std::fmt::Write as _;

use super::{ConvLayer, DenseLayer, Model, FILTERS, KERNEL};
use crate::error::{Error, Result};

const MAGIC: &str = "manet-model 1";

fn shapes(model: &Model) -> [(&'static str, Vec<usize>); 8] {
    let d = model.dense.outputs();
    let f = model.dense.inputs();
    [
        ("conv1.weight", vec![FILTERS, KERNEL, KERNEL, model.conv1.in_channels()]),
        ("conv1.bias", vec![FILTERS]),
        ("conv2.weight", vec![FILTERS, KERNEL, KERNEL, model.conv2.in_channels()]),
        ("conv2.bias", vec![FILTERS]),
        ("conv3.weight", vec![FILTERS, KERNEL, KERNEL, model.conv3.in_channels()]),
        ("conv3.bias", vec![FILTERS]),
        ("dense.weight", vec![f, d]),
        ("dense.bias", vec![d]),
    ]
}

pub fn save_model(model: &Model) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for ((name, shape), values) in shapes(model).iter().zip(model.tensors()) {
        let dims: Vec<String> = shape.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{name} {}", dims.join(" "));
        for v in values {
            let _ = writeln!(out, "{v:e}");
        }
    }
    out
}

pub fn load_model(text: &str) -> Result<Model> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(MAGIC) {
        return Err(Error::Parse("missing model header".into()));
    }
    let mut tensors: Vec<(String, Vec<usize>, Vec<f64>)> = Vec::with_capacity(8);
    while let Some(header) = lines.next() {
        let mut parts = header.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| Error::Parse("empty tensor header".into()))?
            .to_string();
        let shape = parts
            .map(|p| p.parse::<usize>().map_err(|e| Error::Parse(format!("{name}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let count: usize = shape.iter().product();
        let values = (0..count)
            .map(|_| {
                lines
                    .next()
                    .ok_or_else(|| Error::Parse(format!("{name}: truncated values")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{name}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        tensors.push((name, shape, values));
    }
    let expected = [
        "conv1.weight",
        "conv1.bias",
        "conv2.weight",
        "conv2.bias",
        "conv3.weight",
        "conv3.bias",
        "dense.weight",
        "dense.bias",
    ];
    if tensors.len() != expected.len()
        || tensors.iter().zip(expected).any(|((n, _, _), e)| n != e)
    {
        return Err(Error::Parse(format!("expected tensors {expected:?}")));
    }
    let mut it = tensors.into_iter();
    let mut conv = |_: usize| -> Result<ConvLayer> {
        let (_, shape, w) = it.next().expect("checked length");
        let (_, _, b) = it.next().expect("checked length");
        let channels = *shape.last().ok_or_else(|| Error::Parse("bad conv shape".into()))?;
        ConvLayer::from_parts(channels, w, b)
    };
    let conv1 = conv(1)?;
    let conv2 = conv(2)?;
    let conv3 = conv(3)?;
    let (_, dshape, dw) = it.next().expect("checked length");
    let (_, _, db) = it.next().expect("checked length");
    let [inputs, outputs] = dshape[..] else {
        return Err(Error::Parse("dense.weight must be rank 2".into()));
    };
    let dense = DenseLayer::from_parts(inputs, outputs, dw, db)?;
    Ok(Model {
        conv1,
        conv2,
        conv3,
        dense,
    })
}
