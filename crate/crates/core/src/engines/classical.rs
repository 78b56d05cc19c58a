//! DE, SHADE and LSHADE: fixed slots, greedy replacement.

use super::config::{DeConfig, LshadeConfig, ShadeConfig};
use super::{GenerationStats, Observer, OffspringEvent, RunOptions, Tracker, PARAM_STREAM};
use crate::adaptation::{SuccessHistory, SuccessSets};
use crate::error::Result;
use crate::objectives::Objective;
use crate::population::{Archive, Individual, PopulationStore, StoreMode};
use crate::record::RunRecord;
use crate::rng::RngStream;
use crate::selection::{select_pbest, select_uniform};
use crate::variation::{binomial_crossover, current_to_pbest, repair_bounds};

const MIN_POPULATION: usize = 4;
const LSHADE_HISTORY: usize = 6;

/// Linear population size reduction:
/// `round((P1 - 4) * (1 - consumed / target)) + 4`, with `consumed` clamped
/// to `target` and halves rounded up. Computed in integers.
pub fn lpsr_next_size(p1: usize, consumed: u64, target: u64) -> usize {
    assert!(p1 >= MIN_POPULATION && target > 0);
    let span = (p1 - MIN_POPULATION) as u128;
    let t = target as u128;
    let left = t - consumed.min(target) as u128;
    ((2 * span * left + t) / (2 * t)) as usize + MIN_POPULATION
}

enum Params {
    Fixed { f: f64, c: f64 },
    History(SuccessHistory),
}

pub(crate) struct Setup {
    initial_size: usize,
    pbest_rate: f64,
    params: Params,
    archive_rate: Option<f64>,
    lpsr_target: Option<u64>,
}

impl Setup {
    pub(crate) fn de(c: &DeConfig) -> Self {
        Self {
            initial_size: c.population_size,
            pbest_rate: c.pbest_rate,
            params: Params::Fixed { f: c.f, c: c.c },
            archive_rate: None,
            lpsr_target: None,
        }
    }

    pub(crate) fn shade(c: &ShadeConfig, dimension: usize) -> Self {
        let h = c.adaptation.history.unwrap_or(dimension);
        Self {
            initial_size: c.population_size,
            pbest_rate: c.pbest_rate,
            params: Params::History(SuccessHistory::new(h, None, c.adaptation)),
            archive_rate: Some(c.archive_rate),
            lpsr_target: None,
        }
    }

    pub(crate) fn lshade(c: &LshadeConfig, dimension: usize, budget: u64) -> Self {
        let h = c.adaptation.history.unwrap_or(LSHADE_HISTORY);
        Self {
            initial_size: c.initial_size.unwrap_or(super::default_initial_size(dimension)),
            pbest_rate: c.pbest_rate,
            params: Params::History(SuccessHistory::new(h, None, c.adaptation)),
            archive_rate: Some(c.archive_rate),
            lpsr_target: Some(c.target_for(budget)),
        }
    }
}

fn archive_capacity(rate: f64, size: usize) -> usize {
    (rate * size as f64).round() as usize
}

struct Trial {
    genome: Vec<f64>,
    f: f64,
    c: f64,
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

    let mut store = PopulationStore::new(StoreMode::Slot);
    let mut next_id = 0u64;
    for genome in options.initial_genomes(&spec, &mut rng, setup.initial_size)? {
        let f = tracker.evaluate(&genome, None)?;
        store.push(Individual::initial(genome, f, next_id));
        next_id += 1;
    }
    let mut archive = setup
        .archive_rate
        .map(|r| Archive::new(archive_capacity(r, setup.initial_size)));
    let mut sets = SuccessSets::default();
    let mut generation = 0u64;

    while tracker.remaining() > 0 {
        generation += 1;
        let count = (store.len() as u64).min(tracker.remaining()) as usize;
        let mut trials = Vec::with_capacity(count);
        for i in 0..count {
            let (f, c) = match &setup.params {
                Params::Fixed { f, c } => (*f, *c),
                Params::History(h) => {
                    let r = h.pick_slot(&mut param_rng);
                    (h.sample_f_at(r, &mut param_rng), h.sample_c_at(r, &mut param_rng))
                }
            };
            let pbest = select_pbest(&store, setup.pbest_rate, &mut rng);
            let r1 = select_uniform(&store, &mut rng, &[i])?;
            let members = store.members();
            // x_r2 from P ∪ A, distinct from x_i and x_r1
            let pool = members.len() + archive.as_ref().map_or(0, Archive::len);
            let r2 = loop {
                let k = rng.below(pool);
                if k != i && k != r1 {
                    break k;
                }
            };
            let x_r2 = match r2.checked_sub(members.len()) {
                None => &members[r2],
                Some(a) => &archive.as_ref().expect("pool includes archive")
                    .members()[a],
            };
            let x = &members[i];
            let v = current_to_pbest(&x.genome, &members[pbest].genome, &members[r1].genome, &x_r2.genome, f);
            let mut u = binomial_crossover(&x.genome, &v, c, &mut rng);
            repair_bounds(&mut u, &x.genome, &spec);
            observer.offspring(&OffspringEvent {
                generation,
                slot: i + 1,
                parent: x.insertion_index,
                pbest: members[pbest].insertion_index,
                r1: members[r1].insertion_index,
                r2: x_r2.insertion_index,
                subsets: None,
                f,
                c,
                t: None,
            });
            trials.push(Trial { genome: u, f, c });
        }

        sets.clear();
        let mut successes = 0;
        for (i, trial) in trials.into_iter().enumerate() {
            let parent = &store.members()[i];
            let (parent_fit, parent_id, parent_ok) = (parent.fitness, parent.insertion_index, parent.successful);
            let fit = tracker.evaluate(&trial.genome, Some(parent_ok))?;
            let id = next_id;
            next_id += 1;
            if fit <= parent_fit {
                successes += 1;
                sets.push(trial.f, trial.c, None, parent_fit - fit);
                let child = Individual {
                    genome: trial.genome,
                    fitness: fit,
                    insertion_index: id,
                    parent_index: Some(parent_id),
                    successful: true,
                };
                let old = store.replace(i, child)?;
                if let Some(a) = archive.as_mut() {
                    a.insert(old, &mut rng);
                }
            }
        }
        if let Params::History(h) = &mut setup.params {
            h.update(&sets);
        }

        if let Some(target) = setup.lpsr_target {
            let next = lpsr_next_size(setup.initial_size, tracker.evaluations(), target).min(store.len());
            store.truncate_worst(next);
            if let (Some(a), Some(rate)) = (archive.as_mut(), setup.archive_rate) {
                a.set_capacity(archive_capacity(rate, next), &mut rng);
            }
        }

        observer.generation(&GenerationStats {
            generation,
            evaluations: tracker.evaluations(),
            population_size: store.len(),
            offspring: count,
            successes,
            archive: archive.as_ref(),
            history: match &setup.params {
                Params::History(h) => Some(h),
                Params::Fixed { .. } => None,
            },
        });
    }

    observer.finished(&store);
    Ok(tracker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lpsr_examples() {
        assert_eq!(lpsr_next_size(180, 0, 200_000), 180);
        assert_eq!(lpsr_next_size(180, 100_000, 200_000), 92);
        assert_eq!(lpsr_next_size(180, 200_000, 200_000), 4);
        assert_eq!(lpsr_next_size(180, 300_000, 200_000), 4);
    }

    #[test]
    fn lpsr_is_monotone() {
        let sizes: Vec<usize> = (0..=1000).map(|c| lpsr_next_size(57, c * 10, 10_000)).collect();
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
    }
}
