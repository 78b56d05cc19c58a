//! UDE, USHADE and USHADE/DF: append-only population, tournament selection.

use super::config::{TRule, UdeConfig, UshadeConfig};
use super::{GenerationStats, Observer, OffspringEvent, RunOptions, Tracker, PARAM_STREAM};
use crate::adaptation::{SuccessHistory, SuccessSets};
use crate::error::Result;
use crate::objectives::Objective;
use crate::population::{Individual, PopulationStore, StoreMode};
use crate::record::RunRecord;
use crate::rng::RngStream;
use crate::selection::{select_dpt, select_pbest, select_t, select_uniform, DptRole, SelectionPolicy};
use crate::variation::{binomial_crossover, current_to_pbest, repair_bounds};

const USHADE_HISTORY: usize = 6;

enum Params {
    Fixed { f: f64, c: f64, t_rule: TRule },
    History(SuccessHistory),
}

pub(crate) struct Setup {
    initial_size: usize,
    gensize: usize,
    pbest_rate: f64,
    policy: SelectionPolicy,
    params: Params,
    discard_failed: bool,
}

impl Setup {
    pub(crate) fn ude(c: &UdeConfig, dimension: usize) -> Self {
        Self {
            initial_size: c.initial_size.unwrap_or(super::default_initial_size(dimension)),
            gensize: c.gensize,
            pbest_rate: c.pbest_rate,
            policy: c.selection.policy,
            params: Params::Fixed { f: c.f, c: c.c, t_rule: c.selection.t_rule },
            discard_failed: c.discard_failed,
        }
    }

    pub(crate) fn ushade(c: &UshadeConfig, dimension: usize, discard_failed: bool) -> Self {
        let initial_size = c.initial_size.unwrap_or(super::default_initial_size(dimension));
        let h = c.adaptation.history.unwrap_or(USHADE_HISTORY);
        Self {
            initial_size,
            gensize: c.gensize,
            pbest_rate: c.pbest_rate,
            policy: c.selection.policy,
            params: Params::History(SuccessHistory::new(h, Some(initial_size as f64), c.adaptation)),
            discard_failed,
        }
    }

    fn fixed_t(&self, rule: TRule, size: usize) -> f64 {
        match rule {
            TRule::FixedInitial => self.initial_size as f64,
            TRule::GrowthRatio => (size as f64 / self.initial_size as f64).round().max(1.0),
        }
    }
}

struct Trial {
    genome: Vec<f64>,
    parent: usize,
    f: f64,
    c: f64,
    t: f64,
}

/// Picks `(parent, r1, r2)` positions and, for DPT, their subset indices.
fn pick_triple(
    store: &PopulationStore,
    policy: SelectionPolicy,
    gensize: usize,
    slot: usize,
    t: f64,
    rng: &mut RngStream,
) -> Result<([usize; 3], Option<[usize; 3]>)> {
    Ok(match policy {
        SelectionPolicy::Uniform => {
            let p = select_uniform(store, rng, &[])?;
            let r1 = select_uniform(store, rng, &[p])?;
            let r2 = select_uniform(store, rng, &[p, r1])?;
            ([p, r1, r2], None)
        }
        SelectionPolicy::T => {
            let p = select_t(store, t, rng, &[])?;
            let r1 = select_t(store, t, rng, &[p])?;
            let r2 = select_t(store, t, rng, &[p, r1])?;
            ([p, r1, r2], None)
        }
        SelectionPolicy::Dpt => {
            let (p, jp) = select_dpt(store, gensize, slot, DptRole::Parent, t, rng, &[])?;
            let (r1, j1) = select_dpt(store, gensize, slot, DptRole::R1, t, rng, &[jp])?;
            let (r2, j2) = select_dpt(store, gensize, slot, DptRole::R2, t, rng, &[jp, j1])?;
            ([p, r1, r2], Some([jp, j1, j2]))
        }
    })
}

pub(crate) fn run(
    mut setup: Setup,
    objective: &mut Objective,
    seed: u64,
    options: &RunOptions,
    observer: &mut dyn Observer,
) -> Result<RunRecord> {
    let mut rng = RngStream::new(seed);
    let mut param_rng = rng.derive(PARAM_STREAM);
    let spec = objective.spec().clone();
    let mut tracker = Tracker::new(objective, options);
    let adaptive_t = matches!(setup.params, Params::History(_));
    if options.record_t_trace && adaptive_t {
        tracker.record_mut().t_trace = Some(Vec::new());
    }

    let mut store = PopulationStore::new(StoreMode::Append);
    if setup.policy == SelectionPolicy::Dpt {
        store.enable_residue_classes(setup.gensize);
    }
    let mut next_id = 0u64;
    for genome in options.initial_genomes(&spec, &mut rng, setup.initial_size)? {
        let f = tracker.evaluate(&genome, None)?;
        store.push(Individual::initial(genome, f, next_id));
        next_id += 1;
    }
    let mut sets = SuccessSets::default();
    let mut generation = 0u64;

    while tracker.remaining() > 0 {
        generation += 1;
        let count = (setup.gensize as u64).min(tracker.remaining()) as usize;
        let mut trials = Vec::with_capacity(count);
        for slot in 1..=count {
            let (f, c, t) = match &setup.params {
                Params::Fixed { f, c, t_rule } => (*f, *c, setup.fixed_t(*t_rule, store.len())),
                Params::History(h) => {
                    let r = h.pick_slot(&mut param_rng);
                    let f = h.sample_f_at(r, &mut param_rng);
                    let c = h.sample_c_at(r, &mut param_rng);
                    (f, c, h.sample_t_at(r, &mut param_rng))
                }
            };
            let pbest = select_pbest(&store, setup.pbest_rate, &mut rng);
            let ([p, r1, r2], subsets) = pick_triple(&store, setup.policy, setup.gensize, slot, t, &mut rng)?;
            let m = store.members();
            let v = current_to_pbest(&m[p].genome, &m[pbest].genome, &m[r1].genome, &m[r2].genome, f);
            let mut u = binomial_crossover(&m[p].genome, &v, c, &mut rng);
            repair_bounds(&mut u, &m[p].genome, &spec);
            observer.offspring(&OffspringEvent {
                generation,
                slot,
                parent: m[p].insertion_index,
                pbest: m[pbest].insertion_index,
                r1: m[r1].insertion_index,
                r2: m[r2].insertion_index,
                subsets,
                f,
                c,
                t: Some(t),
            });
            trials.push(Trial { genome: u, parent: p, f, c, t });
        }

        sets.clear();
        let mut successes = 0;
        for trial in trials {
            let parent = &store.members()[trial.parent];
            let (parent_fit, parent_id, parent_ok) = (parent.fitness, parent.insertion_index, parent.successful);
            let fit = tracker.evaluate(&trial.genome, Some(parent_ok))?;
            let evals = tracker.evaluations();
            if let Some(trace) = tracker.record_mut().t_trace.as_mut() {
                trace.push((evals, trial.t));
            }
            let ok = fit <= parent_fit;
            if ok {
                successes += 1;
                sets.push(trial.f, trial.c, Some(trial.t), parent_fit - fit);
            }
            let id = next_id;
            next_id += 1;
            if ok || !setup.discard_failed {
                store.push(Individual {
                    genome: trial.genome,
                    fitness: fit,
                    insertion_index: id,
                    parent_index: Some(parent_id),
                    successful: ok,
                });
            }
        }
        if let Params::History(h) = &mut setup.params {
            h.update(&sets);
        }

        observer.generation(&GenerationStats {
            generation,
            evaluations: tracker.evaluations(),
            population_size: store.len(),
            offspring: count,
            successes,
            archive: None,
            history: match &setup.params {
                Params::History(h) => Some(h),
                Params::Fixed { .. } => None,
            },
        });
    }

    observer.finished(&store);
    Ok(tracker.finish())
}
