//! One optimiser on one shifted benchmark function.
//!
//! ```bash
//! cargo run --release --example run_single -- ushade rastrigin 10 100000 7
//! ```
//! Arguments (all optional): engine, function, dimension, budget, seed.

use std::time::Instant;

use unbounded_de::rng::RngStream;
use unbounded_de::{engines, EngineKind, FunctionId, Objective, ObjectiveSpec};

fn main() -> unbounded_de::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());

    let kind = EngineKind::parse(&arg(0, "ushade"))?;
    let function: FunctionId = arg(1, "rastrigin").parse()?;
    let dimension: usize = arg(2, "10").parse().expect("dimension");
    let budget: u64 = arg(3, "100000").parse().expect("budget");
    let seed: u64 = arg(4, "7").parse().expect("seed");

    let mut shift_rng = RngStream::new(seed ^ 0x5eed);
    let spec = ObjectiveSpec::with_random_shift(function, dimension, -100.0, 100.0, budget, &mut shift_rng)?;
    let label = spec.label();
    let mut objective = Objective::new(spec);

    let started = Instant::now();
    let record = engines::run(&kind.default_config(), &mut objective, seed)?;
    let elapsed = started.elapsed();

    println!("{} on {label}, seed {seed}", kind.name());
    for point in record.trajectory.iter().step_by((record.trajectory.len() / 10).max(1)) {
        println!("  {:>9} evals  best {:.6e}", point.evals, point.best);
    }
    println!("final best {:.6e} after {} evaluations ({elapsed:.2?})", record.final_best, record.evaluations);
    if let Some(frac) = record.failed_parent_fraction() {
        println!("best-so-far updates from failed parents: {:.1}%", 100.0 * frac);
    }
    Ok(())
}
