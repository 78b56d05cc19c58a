use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engines::{EngineConfig, EngineKind};
use crate::error::{Error, Result};
use crate::objectives::{FunctionId, ObjectiveSpec};
use crate::rng::{mix_seed, RngStream, RNG_NAME};

/// Bumped whenever a change alters the numbers produced for a given plan.
pub const RESULT_FORMAT: u32 = 1;

const DEFAULT_TRIALS: usize = 51;
const DEFAULT_BUDGET_PER_DIMENSION: u64 = 10_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: ExperimentSection,
    objective: ObjectiveSection,
    #[serde(default)]
    algorithm: Vec<AlgorithmEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    name: String,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_rng")]
    rng: String,
    stride: Option<u64>,
    #[serde(default)]
    record_t_trace: bool,
    out: Option<PathBuf>,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_rng() -> String {
    RNG_NAME.to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveSection {
    functions: Vec<FunctionId>,
    dimensions: Vec<usize>,
    budget: Option<u64>,
    budget_per_dimension: Option<u64>,
    #[serde(default = "default_lower")]
    lower: f64,
    #[serde(default = "default_upper")]
    upper: f64,
    #[serde(default)]
    shift_seed: u64,
}

fn default_lower() -> f64 {
    -100.0
}

fn default_upper() -> f64 {
    100.0
}

#[derive(Debug, Deserialize)]
struct AlgorithmEntry {
    label: Option<String>,
    #[serde(flatten)]
    config: EngineConfig,
}

/// A labelled engine configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algorithm {
    pub label: String,
    pub config: EngineConfig,
}

impl Algorithm {
    pub fn new(label: impl Into<String>, config: EngineConfig) -> Self {
        Self { label: label.into(), config }
    }

    pub fn slug(&self) -> String {
        slug(&self.label)
    }
}

/// A benchmark function at one dimension and budget. The shift vector is
/// drawn per trial, identically for every algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub function: FunctionId,
    pub dimension: usize,
    pub budget: u64,
    pub lower: f64,
    pub upper: f64,
}

impl Problem {
    pub fn new(function: FunctionId, dimension: usize, budget: u64) -> Self {
        Self { function, dimension, budget, lower: -100.0, upper: 100.0 }
    }

    pub fn label(&self) -> String {
        format!("{}_d{}", self.function, self.dimension)
    }

    /// The shifted instance used by trial `trial` of every algorithm.
    pub fn instance(&self, shift_seed: u64, trial: usize) -> Result<ObjectiveSpec> {
        let seed = mix_seed(shift_seed, &[stable_hash(&self.label()), trial as u64]);
        let mut rng = RngStream::new(seed);
        ObjectiveSpec::with_random_shift(self.function, self.dimension, self.lower, self.upper, self.budget, &mut rng)
    }
}

/// One (algorithm, problem, trial) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub algorithm: usize,
    pub problem: usize,
    pub trial: usize,
}

/// Algorithms x problems x trials, plus seeds and output location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub name: String,
    pub algorithms: Vec<Algorithm>,
    pub problems: Vec<Problem>,
    pub trials: usize,
    pub base_seed: u64,
    pub shift_seed: u64,
    /// Trajectory checkpoint stride; `None` means `budget / 200`.
    pub stride: Option<u64>,
    pub record_t_trace: bool,
    pub out: PathBuf,
}

/// Command line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub engine: Option<EngineKind>,
    pub budget: Option<u64>,
}

#[derive(Serialize)]
struct HashView<'a> {
    format: u32,
    rng: &'a str,
    name: &'a str,
    algorithms: &'a [Algorithm],
    problems: &'a [Problem],
    trials: usize,
    base_seed: u64,
    shift_seed: u64,
    stride: Option<u64>,
    record_t_trace: bool,
}

impl ExperimentPlan {
    pub fn new(name: impl Into<String>, algorithms: Vec<Algorithm>, problems: Vec<Problem>, trials: usize) -> Self {
        let name = name.into();
        Self {
            out: PathBuf::from("results").join(slug(&name)),
            name,
            algorithms,
            problems,
            trials,
            base_seed: 0,
            shift_seed: 0,
            stride: None,
            record_t_trace: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text)?;
        let e = file.experiment;
        if e.rng != RNG_NAME {
            return Err(Error::Config(format!("unsupported rng `{}`; only `{RNG_NAME}` is available", e.rng)));
        }
        let o = file.objective;
        if o.budget.is_some() && o.budget_per_dimension.is_some() {
            return Err(Error::Config("set either budget or budget_per_dimension, not both".into()));
        }
        let mut problems = Vec::new();
        for &function in &o.functions {
            for &dimension in &o.dimensions {
                let budget = o
                    .budget
                    .unwrap_or(o.budget_per_dimension.unwrap_or(DEFAULT_BUDGET_PER_DIMENSION) * dimension as u64);
                problems.push(Problem { function, dimension, budget, lower: o.lower, upper: o.upper });
            }
        }
        let algorithms = file
            .algorithm
            .into_iter()
            .map(|a| Algorithm {
                label: a.label.unwrap_or_else(|| a.config.kind().name().to_string()),
                config: a.config,
            })
            .collect();
        let plan = Self {
            out: e.out.unwrap_or_else(|| PathBuf::from("results").join(slug(&e.name))),
            name: e.name,
            algorithms,
            problems,
            trials: e.trials,
            base_seed: e.base_seed,
            shift_seed: o.shift_seed,
            stride: e.stride,
            record_t_trace: e.record_t_trace,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(t) = o.trials {
            self.trials = t;
        }
        if let Some(s) = o.seed {
            self.base_seed = s;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(kind) = o.engine {
            self.algorithms = vec![Algorithm::new(kind.name(), kind.default_config())];
        }
        if let Some(b) = o.budget {
            self.problems.iter_mut().for_each(|p| p.budget = b);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return fail("trials must be positive".into());
        }
        if self.algorithms.is_empty() || self.problems.is_empty() {
            return fail("a plan needs at least one algorithm and one problem".into());
        }
        let mut slugs = BTreeSet::new();
        for a in &self.algorithms {
            if !slugs.insert(a.slug()) {
                return fail(format!("algorithm label `{}` is not unique", a.label));
            }
        }
        let mut labels = BTreeSet::new();
        for p in &self.problems {
            if !labels.insert(p.label()) {
                return fail(format!("problem `{}` listed twice", p.label()));
            }
            ObjectiveSpec::new(p.function, p.dimension, p.lower, p.upper, p.budget)?;
            for a in &self.algorithms {
                a.config
                    .validate(p.dimension, p.budget)
                    .map_err(|e| Error::Config(format!("{} on {}: {e}", a.label, p.label())))?;
            }
        }
        if self.stride == Some(0) {
            return fail("stride must be positive".into());
        }
        Ok(())
    }

    /// SHA-256 over everything that influences results; the output
    /// directory is excluded.
    pub fn hash(&self) -> String {
        let view = HashView {
            format: RESULT_FORMAT,
            rng: RNG_NAME,
            name: &self.name,
            algorithms: &self.algorithms,
            problems: &self.problems,
            trials: self.trials,
            base_seed: self.base_seed,
            shift_seed: self.shift_seed,
            stride: self.stride,
            record_t_trace: self.record_t_trace,
        };
        let bytes = serde_json::to_vec(&view).expect("plan serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Seed of one trial; depends on labels rather than list positions.
    pub fn trial_seed(&self, cell: Cell) -> u64 {
        let a = stable_hash(&self.algorithms[cell.algorithm].label);
        let p = stable_hash(&self.problems[cell.problem].label());
        mix_seed(self.base_seed, &[a, p, cell.trial as u64])
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.algorithms.len() * self.problems.len() * self.trials);
        for algorithm in 0..self.algorithms.len() {
            for problem in 0..self.problems.len() {
                for trial in 0..self.trials {
                    out.push(Cell { algorithm, problem, trial });
                }
            }
        }
        out
    }

    /// File stem `<algorithm>__<problem>__<trial>` of a cell's outputs.
    pub fn cell_stem(&self, cell: Cell) -> String {
        format!(
            "{}__{}__{:03}",
            self.algorithms[cell.algorithm].slug(),
            self.problems[cell.problem].label(),
            cell.trial
        )
    }

    pub fn algorithm_index(&self, label: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a.label == label)
    }
}

/// Lowercase alphanumerics with single underscores.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// First eight bytes of the SHA-256 of `s`.
pub fn stable_hash(s: &str) -> u64 {
    let d = Sha256::digest(s.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}
