//! All six engines on a few functions, ranked by median final error, with a
//! rank-sum test of each engine against USHADE(DPT).
//!
//! ```bash
//! cargo run --release --example compare_engines -- 10 50000 11
//! ```
//! Arguments: dimension, budget, trials.

use unbounded_de::analysis::{median, wilcoxon_rank_sum};
use unbounded_de::harness::{run_in_memory, Algorithm, ExperimentPlan, Problem, ResultTable, ALPHA};
use unbounded_de::{EngineKind, FunctionId};

fn main() -> unbounded_de::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let dimension = args.first().copied().unwrap_or(10);
    let budget = args.get(1).copied().unwrap_or(50_000) as u64;
    let trials = args.get(2).copied().unwrap_or(11);

    let algorithms = EngineKind::ALL.iter().map(|k| Algorithm::new(k.name(), k.default_config())).collect();
    let functions = [FunctionId::Sphere, FunctionId::Rosenbrock, FunctionId::Rastrigin, FunctionId::Ackley];
    let problems = functions.iter().map(|&f| Problem::new(f, dimension, budget)).collect();
    let plan = ExperimentPlan::new("compare", algorithms, problems, trials);
    let table = ResultTable::from_outcomes(&plan, run_in_memory(&plan, None)?);
    let reference = plan.algorithm_index(EngineKind::Ushade.name()).expect("USHADE in plan");

    for (p, problem) in plan.problems.iter().enumerate() {
        println!("\n{} (budget {budget}, {trials} trials)", problem.label());
        let mut rows: Vec<(usize, f64)> = (0..plan.algorithms.len()).map(|a| (a, median(&table.finals(a, p)))).collect();
        rows.sort_by(|x, y| x.1.total_cmp(&y.1));
        for (a, m) in rows {
            let vs = if a == reference {
                "reference".to_string()
            } else {
                let w = wilcoxon_rank_sum(&table.finals(a, p), &table.finals(reference, p), ALPHA);
                format!("p={:.3} {}", w.p_value, w.verdict)
            };
            println!("  {:<10} median {:>11.4e}   {vs}", plan.algorithms[a].label, m);
        }
    }
    Ok(())
}
