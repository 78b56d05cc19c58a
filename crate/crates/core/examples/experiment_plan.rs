//! A plan written as TOML, executed to disk, resumed and analysed.
//!
//! ```bash
//! cargo run --release --example experiment_plan -- /tmp/ude-demo
//! ```

use std::path::PathBuf;

use unbounded_de::harness::{load_results, run_experiment, ExperimentPlan, ResultTable};

const PLAN: &str = r#"
[experiment]
name = "demo"
trials = 4
base_seed = 2024

[objective]
functions = ["sphere", "griewank"]
dimensions = [10]
budget_per_dimension = 1000

[[algorithm]]
label = "SHADE"
engine = "shade"

[[algorithm]]
label = "UDE(T)"
engine = "ude"
selection.policy = "T"

[[algorithm]]
label = "UDE(DPT)"
engine = "ude"
"#;

fn main() -> unbounded_de::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("ude-demo"));
    let mut plan = ExperimentPlan::from_toml_str(PLAN)?;
    plan.out = out.clone();
    println!("plan {} hash {}", plan.name, plan.hash());

    let first = run_experiment(&plan, None)?;
    let second = run_experiment(&plan, None)?;
    println!("first pass computed {}, second pass skipped {}", first.computed, second.skipped);

    let (plan, trials) = load_results(&out)?;
    let table = ResultTable::from_stored(&plan, &trials);
    table.write_reports(&out)?;
    for row in table.wilcoxon_rows() {
        println!("{:<12} {:>9} vs {:<9} p={:.4} {}", row.problem, row.alg_a, row.alg_b, row.p, row.verdict);
    }
    println!("tables in {}", out.display());
    Ok(())
}
