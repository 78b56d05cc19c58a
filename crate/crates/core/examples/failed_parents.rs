//! How often a new best-so-far descends from an offspring that was worse
//! than its own parent, and what discarding such offspring costs.

use unbounded_de::analysis::median;
use unbounded_de::harness::{run_in_memory, Algorithm, ExperimentPlan, Problem, ResultTable};
use unbounded_de::{EngineKind, FunctionId};

fn main() -> unbounded_de::Result<()> {
    let algorithms = vec![
        Algorithm::new("USHADE(DPT)", EngineKind::Ushade.default_config()),
        Algorithm::new("USHADE/DF", EngineKind::UshadeDf.default_config()),
    ];
    let functions = [FunctionId::Rastrigin, FunctionId::Ackley, FunctionId::Schwefel];
    let problems = functions.iter().map(|&f| Problem::new(f, 10, 50_000)).collect();
    let plan = ExperimentPlan::new("lineage", algorithms, problems, 7);
    let table = ResultTable::from_outcomes(&plan, run_in_memory(&plan, None)?);

    for (a, alg) in plan.algorithms.iter().enumerate() {
        for (p, problem) in plan.problems.iter().enumerate() {
            let fractions: Vec<f64> = table.records(a, p).iter().filter_map(|r| r.failed_parent_fraction()).collect();
            println!(
                "{:<12} {:<15} failed-parent share of improvements: median {:.3} over {} trials",
                alg.label,
                problem.label(),
                median(&fractions),
                fractions.len()
            );
        }
    }
    for (p, problem) in plan.problems.iter().enumerate() {
        println!(
            "{:<15} median final: with failed {:.3e}, without {:.3e}",
            problem.label(),
            median(&table.finals(0, p)),
            median(&table.finals(1, p))
        );
    }
    Ok(())
}
