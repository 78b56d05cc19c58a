//! LSHADE tuned for half, the full and double the budget against USHADE,
//! which has no schedule to tune.
//!
//! ```bash
//! cargo run --release --example budget_robustness -- 60000 7
//! ```

use unbounded_de::engines::{EngineConfig, LshadeConfig};
use unbounded_de::harness::{robustness_table, run_in_memory, Algorithm, ExperimentPlan, Problem, ResultTable};
use unbounded_de::{EngineKind, FunctionId};

fn lshade(factor: f64) -> EngineConfig {
    EngineConfig::Lshade(LshadeConfig { schedule_factor: factor, ..Default::default() })
}

fn main() -> unbounded_de::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let budget = args.first().copied().unwrap_or(60_000);
    let trials = args.get(1).copied().unwrap_or(7) as usize;

    let algorithms = vec![
        Algorithm::new("LSHADE(half)", lshade(0.5)),
        Algorithm::new("LSHADE", lshade(1.0)),
        Algorithm::new("LSHADE(double)", lshade(2.0)),
        Algorithm::new("USHADE(DPT)", EngineKind::Ushade.default_config()),
    ];
    let problems = vec![Problem::new(FunctionId::Rastrigin, 10, budget), Problem::new(FunctionId::Ackley, 10, budget)];
    let plan = ExperimentPlan::new("robustness", algorithms, problems, trials);
    let rows = robustness_table(&ResultTable::from_outcomes(&plan, run_in_memory(&plan, None)?))?;

    println!("{:<15} {:<14} {:>10} {:>10} {:>7} {:>11} {:>9}", "algorithm", "problem", "pre", "post", "ratio", "final", "p(half)");
    for r in rows {
        println!(
            "{:<15} {:<14} {:>10.3e} {:>10.3e} {:>7} {:>11.3e} {:>9}",
            r.algorithm,
            r.problem,
            r.pre_rate,
            r.post_rate,
            r.ratio.map_or("-".into(), |x| format!("{x:.3}")),
            r.median_final,
            r.p_vs_half.map_or("-".into(), |p| format!("{p:.3}")),
        );
    }
    Ok(())
}
