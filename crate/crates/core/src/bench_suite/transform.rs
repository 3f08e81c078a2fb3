use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::seed;

/// Largest magnitude of a generated shift component.
pub const SHIFT_BOUND: f64 = 80.0;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    data: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    /// Builds a rotation from row-major data. Orthogonality is not checked.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    /// `out = M v`
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = Mᵀ v`
    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (row, &vi) in self.data.chunks_exact(self.dim).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * vi;
            }
        }
    }

    /// `max |MᵀM − I|` entrywise.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Orthogonal matrix from the QR factorisation of a seeded Gaussian matrix.
///
/// Columns of `Q` are flipped wherever `R` has a negative diagonal entry so
/// the factorisation, and therefore the output, is unique for a given seed.
/// If the result is a reflection, its first column is negated so that every
/// output is a proper rotation (`det = +1`).
pub fn random_orthogonal(dim: usize, seed: u64) -> Rotation {
    assert!(dim >= 1, "rotation dimension must be positive");
    let mut rng = seed::rng(seed);
    let gaussian = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            data.push(q[(i, j)]);
        }
    }
    Rotation { dim, data }
}

/// Shift vector with components uniform in `[-80, 80]`.
pub fn random_shift(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..dim)
        .map(|_| rng.random_range(-SHIFT_BOUND..=SHIFT_BOUND))
        .collect()
}

/// Shift and rotation attached to one objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformData {
    pub shift: Vec<f64>,
    pub rotation: Rotation,
    /// Seed the data was derived from; `None` for hand-built transforms.
    pub seed: Option<u64>,
}

impl TransformData {
    pub fn generate(dim: usize, seed: u64) -> Self {
        Self {
            shift: random_shift(dim, seed::derive(seed, seed::stream::SHIFT)),
            rotation: random_orthogonal(dim, seed::derive(seed, seed::stream::ROTATION)),
            seed: Some(seed),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            shift: vec![0.0; dim],
            rotation: Rotation::identity(dim),
            seed: None,
        }
    }
}
