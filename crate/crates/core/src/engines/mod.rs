//! Optimisation engines.
//!
//! The classical family (DE, SHADE, LSHADE) keeps a fixed number of slots
//! and replaces a parent only when its trial vector is at least as good. The
//! unbounded family (UDE, USHADE, USHADE/DF) never discards anything: every
//! generation appends its offspring to an ever-growing population and relies
//! on tournament selection to keep the search focused.
//!
//! All engines are deterministic given `(config, objective, seed)` and stop
//! exactly when the evaluation budget is spent.

mod classical;
mod config;
mod unbounded;

pub use classical::lpsr_next_size;
pub use config::{
    default_initial_size, DeConfig, EngineConfig, EngineKind, LshadeConfig, SelectionConfig, ShadeConfig, TRule,
    UdeConfig, UshadeConfig,
};

use crate::adaptation::SuccessHistory;
use crate::error::{Error, Result};
use crate::objectives::{clamp_population_init, Objective, ObjectiveSpec};
use crate::population::{Archive, PopulationStore};
use crate::record::RunRecord;
use crate::rng::RngStream;

/// Tag of the derived stream that feeds F, C and T draws.
pub(crate) const PARAM_STREAM: u64 = 0x7061_7261_6d73;

/// Recording options that do not change the search itself.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Checkpoint stride of the trajectory; `None` means `budget / 200`.
    pub stride: Option<u64>,
    /// Record the sampled T of every offspring (adaptive-T engines only).
    pub record_t_trace: bool,
    /// Start from these genomes instead of a uniform sample. Must hold
    /// exactly `|P^1|` in-bounds genomes.
    pub initial_population: Option<Vec<Vec<f64>>>,
}

impl RunOptions {
    pub fn stride_for(&self, budget: u64) -> u64 {
        self.stride.unwrap_or(budget / 200).max(1)
    }

    pub(crate) fn initial_genomes(&self, spec: &ObjectiveSpec, rng: &mut RngStream, n: usize) -> Result<Vec<Vec<f64>>> {
        match &self.initial_population {
            None => Ok(clamp_population_init(spec, rng, n)),
            Some(given) => {
                if given.len() != n {
                    return Err(Error::Config(format!("initial population has {} genomes, expected {n}", given.len())));
                }
                if !given.iter().all(|g| g.len() == spec.dimension && spec.in_bounds(g)) {
                    return Err(Error::Config("initial genomes must match the dimension and bounds".into()));
                }
                Ok(given.clone())
            }
        }
    }
}

/// End-of-generation snapshot.
#[derive(Debug)]
pub struct GenerationStats<'a> {
    pub generation: u64,
    pub evaluations: u64,
    pub population_size: usize,
    pub offspring: usize,
    pub successes: usize,
    pub archive: Option<&'a Archive>,
    pub history: Option<&'a SuccessHistory>,
}

/// Everything drawn for one offspring. Members are named by insertion index.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringEvent {
    pub generation: u64,
    /// 1-based slot within the generation.
    pub slot: usize,
    pub parent: u64,
    pub pbest: u64,
    pub r1: u64,
    pub r2: u64,
    /// DPT subset indices of parent, r1 and r2.
    pub subsets: Option<[usize; 3]>,
    pub f: f64,
    pub c: f64,
    pub t: Option<f64>,
}

/// Hooks for inspecting a run. Every method defaults to a no-op.
pub trait Observer {
    fn offspring(&mut self, _event: &OffspringEvent) {}
    fn generation(&mut self, _stats: &GenerationStats<'_>) {}
    fn finished(&mut self, _population: &PopulationStore) {}
}

/// Observer that ignores everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl Observer for Silent {}

/// Runs `config` on `objective` until its budget is spent.
pub fn run(config: &EngineConfig, objective: &mut Objective, seed: u64) -> Result<RunRecord> {
    run_with(config, objective, seed, &RunOptions::default(), &mut Silent)
}

pub fn run_with(
    config: &EngineConfig,
    objective: &mut Objective,
    seed: u64,
    options: &RunOptions,
    observer: &mut dyn Observer,
) -> Result<RunRecord> {
    config.validate(objective.dimension(), objective.budget())?;
    let dim = objective.dimension();
    match config {
        EngineConfig::De(c) => classical::run(classical::Setup::de(c), objective, seed, options, observer),
        EngineConfig::Shade(c) => classical::run(classical::Setup::shade(c, dim), objective, seed, options, observer),
        EngineConfig::Lshade(c) => {
            let budget = objective.budget();
            classical::run(classical::Setup::lshade(c, dim, budget), objective, seed, options, observer)
        }
        EngineConfig::Ude(c) => unbounded::run(unbounded::Setup::ude(c, dim), objective, seed, options, observer),
        EngineConfig::Ushade(c) => {
            unbounded::run(unbounded::Setup::ushade(c, dim, false), objective, seed, options, observer)
        }
        EngineConfig::UshadeDf(c) => {
            unbounded::run(unbounded::Setup::ushade(c, dim, true), objective, seed, options, observer)
        }
    }
}

/// Evaluates genomes and keeps the run record in step.
pub(crate) struct Tracker<'a> {
    objective: &'a mut Objective,
    record: RunRecord,
}

impl<'a> Tracker<'a> {
    pub(crate) fn new(objective: &'a mut Objective, options: &RunOptions) -> Self {
        let stride = options.stride_for(objective.budget());
        Self { objective, record: RunRecord::new(stride) }
    }

    /// `parent_successful` is `None` for initial individuals.
    pub(crate) fn evaluate(&mut self, genome: &[f64], parent_successful: Option<bool>) -> Result<f64> {
        let f = self.objective.evaluate(genome)?;
        let e = self.objective.evaluations();
        if self.record.trajectory.is_empty() || f < self.record.final_best {
            self.record.record_improvement(e, f, parent_successful);
        }
        self.record.record_evaluation(e);
        Ok(f)
    }

    pub(crate) fn remaining(&self) -> u64 {
        self.objective.remaining()
    }

    pub(crate) fn evaluations(&self) -> u64 {
        self.objective.evaluations()
    }

    pub(crate) fn record_mut(&mut self) -> &mut RunRecord {
        &mut self.record
    }

    pub(crate) fn finish(mut self) -> RunRecord {
        self.record.finish();
        self.record
    }
}
