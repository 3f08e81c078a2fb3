//! Differentiable shifted/rotated benchmark objectives (ids 1 and 3..=10 of
//! the CEC2017 single-objective suite) with evaluation-budget accounting.
//!
//! Every objective follows the pipeline `z = M · (scale · (x − o)) + c`
//! where `o` is the shift, `M` the rotation, `scale` a per-function input
//! scaling and `c` an inner offset (Rosenbrock `+1`, Schwefel `+420.97`).
//! Lunacek bi-Rastrigin keeps its own construction: the quadratic funnels act
//! on the sign-adjusted unrotated point and only the cosine term is rotated.
//! All objectives attain 0 at `x = o`.

mod budget;
pub mod functions;
mod transform;

use std::fmt;

pub use budget::EvalBudget;
pub use transform::{random_orthogonal, random_shift, Rotation, TransformData, SHIFT_BOUND};

use crate::error::{Error, Result};
use crate::seed;

pub const LOWER_BOUND: f64 = -100.0;
pub const UPPER_BOUND: f64 = 100.0;

/// Box-constrained search domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpace {
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
}

impl SearchSpace {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        Ok(Self {
            dimension,
            lower: LOWER_BOUND,
            upper: UPPER_BOUND,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && x.iter().all(|v| (self.lower..=self.upper).contains(v))
    }
}

/// The nine base functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Function {
    BentCigar,
    Zakharov,
    Rosenbrock,
    Rastrigin,
    SchafferF7,
    LunacekBiRastrigin,
    NonContinuousRastrigin,
    Levy,
    Schwefel,
}

impl Function {
    pub const ALL: [Function; 9] = [
        Function::BentCigar,
        Function::Zakharov,
        Function::Rosenbrock,
        Function::Rastrigin,
        Function::SchafferF7,
        Function::LunacekBiRastrigin,
        Function::NonContinuousRastrigin,
        Function::Levy,
        Function::Schwefel,
    ];

    pub fn from_id(id: usize) -> Result<Self> {
        Ok(match id {
            1 => Function::BentCigar,
            3 => Function::Zakharov,
            4 => Function::Rosenbrock,
            5 => Function::Rastrigin,
            6 => Function::SchafferF7,
            7 => Function::LunacekBiRastrigin,
            8 => Function::NonContinuousRastrigin,
            9 => Function::Levy,
            10 => Function::Schwefel,
            other => return Err(Error::UnknownFunction(other)),
        })
    }

    pub fn id(self) -> usize {
        match self {
            Function::BentCigar => 1,
            Function::Zakharov => 3,
            Function::Rosenbrock => 4,
            Function::Rastrigin => 5,
            Function::SchafferF7 => 6,
            Function::LunacekBiRastrigin => 7,
            Function::NonContinuousRastrigin => 8,
            Function::Levy => 9,
            Function::Schwefel => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::BentCigar => "bent_cigar",
            Function::Zakharov => "zakharov",
            Function::Rosenbrock => "rosenbrock",
            Function::Rastrigin => "rastrigin",
            Function::SchafferF7 => "schaffer_f7",
            Function::LunacekBiRastrigin => "lunacek_bi_rastrigin",
            Function::NonContinuousRastrigin => "noncontinuous_rastrigin",
            Function::Levy => "levy",
            Function::Schwefel => "schwefel",
        }
    }

    /// Input scaling applied to `x − o` before rotation.
    pub fn scale(self) -> f64 {
        match self {
            Function::BentCigar | Function::Zakharov => 1.0,
            Function::Rosenbrock => 2.048 / 100.0,
            Function::Rastrigin | Function::NonContinuousRastrigin | Function::Levy => 5.12 / 100.0,
            Function::SchafferF7 => 0.5 / 100.0,
            Function::LunacekBiRastrigin => 10.0 / 100.0,
            Function::Schwefel => 1000.0 / 100.0,
        }
    }

    /// Constant added to every rotated coordinate.
    pub fn inner_offset(self) -> f64 {
        match self {
            Function::Rosenbrock => 1.0,
            Function::Schwefel => functions::SCHWEFEL_OFFSET,
            _ => 0.0,
        }
    }

    /// Whether the function is continuously differentiable everywhere.
    pub fn is_smooth(self) -> bool {
        matches!(
            self,
            Function::BentCigar
                | Function::Zakharov
                | Function::Rosenbrock
                | Function::Rastrigin
                | Function::Levy
        )
    }

    pub fn is_unimodal(self) -> bool {
        matches!(self, Function::BentCigar | Function::Zakharov)
    }

    fn base(self, z: &[f64], grad: Option<&mut [f64]>) -> f64 {
        match self {
            Function::BentCigar => functions::bent_cigar(z, grad),
            Function::Zakharov => functions::zakharov(z, grad),
            Function::Rosenbrock => functions::rosenbrock(z, grad),
            Function::Rastrigin => functions::rastrigin(z, grad),
            Function::SchafferF7 => functions::schaffer_f7(z, grad),
            Function::NonContinuousRastrigin => functions::noncontinuous_rastrigin(z, grad),
            Function::Levy => functions::levy(z, grad),
            Function::Schwefel => functions::schwefel(z, grad),
            Function::LunacekBiRastrigin => unreachable!("lunacek has its own pipeline"),
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.id())
    }
}

/// Charged black-box access to a cost function, as seen by derivative-free
/// optimizers.
pub trait Problem {
    fn dimension(&self) -> usize;
    fn evaluate(&self, x: &[f64], budget: &mut EvalBudget) -> Result<f64>;
}

impl Problem for Objective {
    fn dimension(&self) -> usize {
        Objective::dimension(self)
    }

    fn evaluate(&self, x: &[f64], budget: &mut EvalBudget) -> Result<f64> {
        Objective::evaluate(self, x, budget)
    }
}

/// A shifted and rotated benchmark objective.
///
/// Immutable once built; share freely across threads. Each trial owns its
/// own [`EvalBudget`].
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    function: Function,
    space: SearchSpace,
    transform: TransformData,
}

impl Objective {
    /// Objective whose transform is derived from `(seed, id)`.
    pub fn new(function: Function, dimension: usize, seed: u64) -> Result<Self> {
        let space = SearchSpace::new(dimension)?;
        let transform = TransformData::generate(dimension, seed::derive(seed, function.id() as u64));
        Ok(Self {
            function,
            space,
            transform,
        })
    }

    /// Objective with an explicit transform.
    pub fn with_transform(function: Function, transform: TransformData) -> Result<Self> {
        let dimension = transform.shift.len();
        let space = SearchSpace::new(dimension)?;
        if transform.rotation.dim() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: transform.rotation.dim(),
            });
        }
        Ok(Self {
            function,
            space,
            transform,
        })
    }

    pub fn function(&self) -> Function {
        self.function
    }

    pub fn id(&self) -> usize {
        self.function.id()
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn shift(&self) -> &[f64] {
        &self.transform.shift
    }

    pub fn transform(&self) -> &TransformData {
        &self.transform
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.space.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.space.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Budget-exempt evaluation, for verification and reporting.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.compute(x, None))
    }

    /// Evaluates `x`, consuming one unit of `budget`.
    pub fn evaluate(&self, x: &[f64], budget: &mut EvalBudget) -> Result<f64> {
        self.check_len(x)?;
        budget.charge()?;
        Ok(self.compute(x, None))
    }

    /// Gradient with respect to `x`. Free of budget charges.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut g = vec![0.0; x.len()];
        self.compute(x, Some(&mut g));
        Ok(g)
    }

    /// One charged evaluation that also returns the gradient at `x`.
    pub fn evaluate_with_gradient(
        &self,
        x: &[f64],
        budget: &mut EvalBudget,
    ) -> Result<(f64, Vec<f64>)> {
        self.check_len(x)?;
        budget.charge()?;
        let mut g = vec![0.0; x.len()];
        let f = self.compute(x, Some(&mut g));
        Ok((f, g))
    }

    /// The rotated, scaled coordinates `z` fed to the base function (before
    /// any inner offset). For Lunacek this is the rotated cosine argument.
    pub fn inner_point(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let scale = self.function.scale();
        let mut y: Vec<f64> = x
            .iter()
            .zip(&self.transform.shift)
            .map(|(xi, oi)| scale * (xi - oi))
            .collect();
        if self.function == Function::LunacekBiRastrigin {
            self.lunacek_signs(&mut y);
        }
        let mut z = vec![0.0; d];
        self.transform.rotation.apply(&y, &mut z);
        z
    }

    fn lunacek_signs(&self, y: &mut [f64]) {
        for (yi, oi) in y.iter_mut().zip(&self.transform.shift) {
            *yi *= if *oi < 0.0 { -2.0 } else { 2.0 };
        }
    }

    fn compute(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        if self.function == Function::LunacekBiRastrigin {
            return self.compute_lunacek(x, grad);
        }
        let d = x.len();
        let scale = self.function.scale();
        let offset = self.function.inner_offset();
        let y: Vec<f64> = x
            .iter()
            .zip(&self.transform.shift)
            .map(|(xi, oi)| scale * (xi - oi))
            .collect();
        let mut z = vec![0.0; d];
        self.transform.rotation.apply(&y, &mut z);
        if offset != 0.0 {
            z.iter_mut().for_each(|v| *v += offset);
        }
        match grad {
            None => self.function.base(&z, None),
            Some(g) => {
                let mut gz = vec![0.0; d];
                let f = self.function.base(&z, Some(&mut gz));
                self.transform.rotation.apply_transpose(&gz, g);
                g.iter_mut().for_each(|v| *v *= scale);
                f
            }
        }
    }

    fn compute_lunacek(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let d = x.len();
        let scale = self.function.scale();
        let mut t: Vec<f64> = x
            .iter()
            .zip(&self.transform.shift)
            .map(|(xi, oi)| scale * (xi - oi))
            .collect();
        self.lunacek_signs(&mut t);
        let mut rt = vec![0.0; d];
        self.transform.rotation.apply(&t, &mut rt);
        match grad {
            None => functions::lunacek(&t, &rt, None),
            Some(g) => {
                let mut gt = vec![0.0; d];
                let mut grt = vec![0.0; d];
                let f = functions::lunacek(&t, &rt, Some((&mut gt, &mut grt)));
                self.transform.rotation.apply_transpose(&grt, g);
                for ((gi, extra), oi) in g.iter_mut().zip(&gt).zip(&self.transform.shift) {
                    let sign = if *oi < 0.0 { -2.0 } else { 2.0 };
                    *gi = (*gi + extra) * sign * scale;
                }
                f
            }
        }
    }

    /// Plain-text self-description for reproducibility records.
    pub fn describe(&self) -> String {
        let shift = self
            .transform
            .shift
            .iter()
            .map(|v| format!("{v:e}"))
            .collect::<Vec<_>>()
            .join(" ");
        let seed = self
            .transform
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "id: {}\nname: {}\ndimension: {}\nscale: {:e}\nrotation_seed: {}\nshift: {}\n",
            self.id(),
            self.function.name(),
            self.dimension(),
            self.function.scale(),
            seed,
            shift
        )
    }
}

/// The nine objectives for `dimension`, in ascending id order.
pub fn make_suite(dimension: usize, seed: u64) -> Result<Vec<Objective>> {
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    Function::ALL
        .iter()
        .map(|&f| Objective::new(f, dimension, seed))
        .collect()
}
