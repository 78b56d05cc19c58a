//! Shifted benchmark functions with an evaluation budget.
//!
//! Each function is evaluated at `z = scale * (x - shift) + offset`, using the
//! input scaling of the CEC 2014 definitions where one exists, and is written
//! so that its value at the optimum is exactly `0.0`. Rotations are not
//! applied.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionId {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel,
    Happycat,
    ExpandedSchafferF6,
}

impl FunctionId {
    pub const ALL: [FunctionId; 8] = [
        FunctionId::Sphere,
        FunctionId::Rosenbrock,
        FunctionId::Rastrigin,
        FunctionId::Ackley,
        FunctionId::Griewank,
        FunctionId::Schwefel,
        FunctionId::Happycat,
        FunctionId::ExpandedSchafferF6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Ackley => "ackley",
            FunctionId::Griewank => "griewank",
            FunctionId::Schwefel => "schwefel",
            FunctionId::Happycat => "happycat",
            FunctionId::ExpandedSchafferF6 => "expanded_schaffer_f6",
        }
    }

    /// Stable numeric id used in seed derivation.
    pub fn code(self) -> u64 {
        FunctionId::ALL.iter().position(|&f| f == self).unwrap() as u64
    }

    /// `(scale, offset)` of the input transform `z = scale * (x - shift) + offset`.
    fn transform(self) -> (f64, f64) {
        match self {
            FunctionId::Rastrigin => (5.12 / 100.0, 0.0),
            FunctionId::Griewank => (600.0 / 100.0, 0.0),
            FunctionId::Schwefel => (1000.0 / 100.0, SCHWEFEL_PEAK),
            FunctionId::Happycat => (5.0 / 100.0, -1.0),
            _ => (1.0, 0.0),
        }
    }

    /// Displacement of the optimum from the shift vector, per coordinate.
    pub fn optimum_offset(self) -> f64 {
        match self {
            FunctionId::Rosenbrock => 1.0,
            _ => 0.0,
        }
    }

    /// Base function value at the transformed point `z`.
    pub fn value(self, z: &[f64]) -> f64 {
        match self {
            FunctionId::Sphere => z.iter().map(|v| v * v).sum(),
            FunctionId::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    let a = w[0] * w[0] - w[1];
                    let b = w[0] - 1.0;
                    100.0 * a * a + b * b
                })
                .sum(),
            FunctionId::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            FunctionId::Ackley => {
                let d = z.len() as f64;
                let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                // grouped so that both brackets cancel exactly at the optimum
                20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (1.0f64.exp() - cs.exp())
            }
            FunctionId::Griewank => {
                let s = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                s + (1.0 - p)
            }
            FunctionId::Schwefel => {
                let d = z.len();
                let peak = schwefel_term(SCHWEFEL_PEAK, d);
                z.iter().map(|&v| peak - schwefel_term(v, d)).sum()
            }
            FunctionId::Happycat => {
                let d = z.len() as f64;
                let r2: f64 = z.iter().map(|v| v * v).sum();
                let s: f64 = z.iter().sum();
                (r2 - d).abs().powf(0.25) + (0.5 * r2 + s) / d + 0.5
            }
            FunctionId::ExpandedSchafferF6 => {
                let d = z.len();
                (0..d)
                    .map(|i| {
                        let (a, b) = (z[i], z[(i + 1) % d]);
                        let r2 = a * a + b * b;
                        let den = 1.0 + 0.001 * r2;
                        0.5 + (r2.sqrt().sin().powi(2) - 0.5) / (den * den)
                    })
                    .sum()
            }
        }
    }
}

const SCHWEFEL_PEAK: f64 = 4.209687462275036e2;

fn schwefel_term(z: f64, d: usize) -> f64 {
    let d = d as f64;
    if z > 500.0 {
        let m = 500.0 - z % 500.0;
        m * m.sqrt().sin() - (z - 500.0).powi(2) / (10_000.0 * d)
    } else if z < -500.0 {
        let m = z.abs() % 500.0;
        (m - 500.0) * (500.0 - m).sqrt().sin() - (z + 500.0).powi(2) / (10_000.0 * d)
    } else {
        z * z.abs().sqrt().sin()
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown objective function `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub function: FunctionId,
    pub dimension: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub shift: Vec<f64>,
    pub budget: u64,
}

impl ObjectiveSpec {
    /// Unshifted instance on `[lower, upper]^dimension`.
    pub fn new(function: FunctionId, dimension: usize, lower: f64, upper: f64, budget: u64) -> Result<Self> {
        let spec = Self {
            function,
            dimension,
            lower: vec![lower; dimension],
            upper: vec![upper; dimension],
            shift: vec![0.0; dimension],
            budget,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Instance whose shift is drawn uniformly from `[0.8 lower, 0.8 upper]`.
    pub fn with_random_shift(
        function: FunctionId,
        dimension: usize,
        lower: f64,
        upper: f64,
        budget: u64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let mut spec = Self::new(function, dimension, lower, upper, budget)?;
        for j in 0..dimension {
            let (lo, hi) = (0.8 * spec.lower[j], 0.8 * spec.upper[j]);
            spec.shift[j] = lo + rng.uniform() * (hi - lo);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<Self> {
        self.shift = shift;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d < 2 {
            return Err(Error::Config(format!("dimension must be at least 2, got {d}")));
        }
        if self.lower.len() != d || self.upper.len() != d || self.shift.len() != d {
            return Err(Error::Config("bounds and shift must have length D".into()));
        }
        for j in 0..d {
            if self.lower[j].partial_cmp(&self.upper[j]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Config(format!("empty interval in dimension {j}")));
            }
            if !(self.lower[j] < self.shift[j] && self.shift[j] < self.upper[j]) {
                return Err(Error::Config(format!("shift outside bounds in dimension {j}")));
            }
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        Ok(())
    }

    /// Location of the global optimum.
    pub fn optimum(&self) -> Vec<f64> {
        let off = self.function.optimum_offset();
        self.shift.iter().map(|s| s + off).collect()
    }

    /// Function value without touching any budget.
    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension, "genome length differs from problem dimension");
        let (scale, offset) = self.function.transform();
        let z: Vec<f64> = x
            .iter()
            .zip(&self.shift)
            .map(|(xi, si)| scale * (xi - si) + offset)
            .collect();
        self.function.value(&z)
    }

    pub fn in_bounds(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(j, &v)| self.lower[j] <= v && v <= self.upper[j])
    }

    pub fn label(&self) -> String {
        format!("{}_d{}", self.function, self.dimension)
    }
}

/// User-supplied fitness function.
pub type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An objective instance owned by one trial, counting its evaluations.
#[derive(Clone)]
pub struct Objective {
    spec: ObjectiveSpec,
    evaluations: u64,
    custom: Option<CustomFn>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("spec", &self.spec)
            .field("evaluations", &self.evaluations)
            .field("custom", &self.custom.is_some())
            .finish()
    }
}

impl Objective {
    pub fn new(spec: ObjectiveSpec) -> Self {
        Self { spec, evaluations: 0, custom: None }
    }

    /// Replaces the benchmark function by `f`; `spec` still supplies the
    /// dimension, bounds and budget.
    pub fn custom(spec: ObjectiveSpec, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { spec, evaluations: 0, custom: Some(Arc::new(f)) }
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn budget(&self) -> u64 {
        self.spec.budget
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn remaining(&self) -> u64 {
        self.spec.budget - self.evaluations
    }

    /// Evaluates `x` and charges one unit of budget.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if self.evaluations >= self.spec.budget {
            return Err(Error::BudgetExhausted { budget: self.spec.budget });
        }
        let f = match &self.custom {
            Some(custom) => {
                assert_eq!(x.len(), self.spec.dimension, "genome length mismatch");
                custom(x)
            }
            None => self.spec.value(x),
        };
        self.evaluations += 1;
        if !f.is_finite() {
            return Err(Error::InvalidInput(format!("objective returned {f}")));
        }
        Ok(f)
    }
}

/// `n` genomes drawn uniformly inside the bounds of `spec`.
pub fn clamp_population_init(spec: &ObjectiveSpec, rng: &mut RngStream, n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 4, "population must hold at least 4 individuals");
    (0..n)
        .map(|_| {
            (0..spec.dimension)
                .map(|j| spec.lower[j] + rng.uniform() * (spec.upper[j] - spec.lower[j]))
                .collect()
        })
        .collect()
}
