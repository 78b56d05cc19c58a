//! The adaptive tournament divisor T over a USHADE run: sampled values are
//! recorded per offspring and summarised per tenth of the budget.

use unbounded_de::engines::{self, RunOptions, Silent};
use unbounded_de::rng::RngStream;
use unbounded_de::{EngineKind, FunctionId, Objective, ObjectiveSpec};

fn main() -> unbounded_de::Result<()> {
    let budget = 100_000;
    for function in [FunctionId::Sphere, FunctionId::Rastrigin] {
        let spec = ObjectiveSpec::with_random_shift(function, 10, -100.0, 100.0, budget, &mut RngStream::new(8))?;
        let options = RunOptions { record_t_trace: true, ..Default::default() };
        let record =
            engines::run_with(&EngineKind::Ushade.default_config(), &mut Objective::new(spec), 8, &options, &mut Silent)?;
        let trace = record.t_trace.expect("trace requested");
        println!("{} (final {:.3e})", function.name(), record.final_best);
        for chunk in trace.chunks(trace.len().div_ceil(10)) {
            let mean = chunk.iter().map(|&(_, t)| t).sum::<f64>() / chunk.len() as f64;
            let max = chunk.iter().map(|&(_, t)| t).fold(f64::MIN, f64::max);
            println!("  up to {:>6} evals  mean T {mean:>8.1}  max T {max:>8.1}", chunk.last().unwrap().0);
        }
    }
    Ok(())
}
