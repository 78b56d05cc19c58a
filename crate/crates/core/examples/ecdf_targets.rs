//! Targets from pooled final errors and the attainment curves they induce.
//!
//! ```bash
//! cargo run --release --example ecdf_targets
//! ```

use unbounded_de::analysis::{ecdf_curve, eval_grid};
use unbounded_de::harness::{run_in_memory, Algorithm, ExperimentPlan, Problem, ResultTable};
use unbounded_de::{EngineKind, FunctionId};

fn main() -> unbounded_de::Result<()> {
    let kinds = [EngineKind::De, EngineKind::Lshade, EngineKind::Ude, EngineKind::Ushade];
    let algorithms = kinds.iter().map(|k| Algorithm::new(k.name(), k.default_config())).collect();
    let plan = ExperimentPlan::new("ecdf", algorithms, vec![Problem::new(FunctionId::Ackley, 10, 40_000)], 9);
    let table = ResultTable::from_outcomes(&plan, run_in_memory(&plan, None)?);

    let targets = table.targets(0)?;
    println!("targets (q1, median, q3 of all finals): {:.3e} {:.3e} {:.3e}", targets.q1, targets.median, targets.q3);
    let grid = eval_grid(40_000, 8);
    print!("{:<8}", "evals");
    for e in &grid {
        print!("{e:>7}");
    }
    println!();
    for (a, alg) in plan.algorithms.iter().enumerate() {
        print!("{:<8}", alg.label);
        for v in ecdf_curve(table.records(a, 0), &targets, &grid) {
            print!("{v:>7.3}");
        }
        println!();
    }
    Ok(())
}
