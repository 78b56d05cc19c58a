//! Plugging in an objective of your own and watching a run through an
//! observer.

use unbounded_de::engines::{self, GenerationStats, Observer, RunOptions};
use unbounded_de::{EngineKind, FunctionId, Objective, ObjectiveSpec};

/// Prints a line every `every` generations.
struct Progress {
    every: u64,
}

impl Observer for Progress {
    fn generation(&mut self, s: &GenerationStats<'_>) {
        if s.generation.is_multiple_of(self.every) {
            let m_f = s.history.map_or(f64::NAN, |h| h.m_f().iter().sum::<f64>() / h.len() as f64);
            println!(
                "gen {:>4}  evals {:>6}  |P| {:>6}  successes {:>3}/{:<3}  mean M_F {m_f:.3}",
                s.generation, s.evaluations, s.population_size, s.successes, s.offspring
            );
        }
    }
}

fn main() -> unbounded_de::Result<()> {
    // Styblinski-Tang, minimum about -39.166 * D at x_i = -2.9035
    let dimension = 8;
    // with a custom function the id only labels the problem
    let spec = ObjectiveSpec::new(FunctionId::Sphere, dimension, -5.0, 5.0, 40_000)?;
    let mut objective = Objective::custom(spec, |x| x.iter().map(|v| 0.5 * (v.powi(4) - 16.0 * v * v + 5.0 * v)).sum());

    let record = engines::run_with(
        &EngineKind::Ushade.default_config(),
        &mut objective,
        5,
        &RunOptions::default(),
        &mut Progress { every: 50 },
    )?;
    println!("final {:.6} (optimum {:.6})", record.final_best, -39.16599 * dimension as f64);
    Ok(())
}
