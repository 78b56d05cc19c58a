use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use unbounded_de::engines::EngineKind;
use unbounded_de::harness::{
    load_results, robustness_table, run_experiment, write_robustness, ExperimentPlan, Overrides, ResultTable,
};
use unbounded_de::{Error, Result};

#[derive(Parser)]
#[command(name = "ude", version, about = "Run and analyse differential evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every trial of a plan, skipping trials already on disk.
    Run(PlanArgs),
    /// Write ECDF, Wilcoxon and lineage tables for finished results.
    Analyze(ResultArgs),
    /// Run a plan and tabulate improvement rates around the half schedule.
    Robustness(PlanArgs),
    /// Print the ECDF targets of finished results.
    Targets(ResultArgs),
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the plan's algorithms by this engine with default settings.
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ResultArgs {
    /// Results directory; taken from the config when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

impl PlanArgs {
    fn plan(&self) -> Result<ExperimentPlan> {
        let engine = self.engine.as_deref().map(EngineKind::parse).transpose()?;
        let overrides = Overrides {
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            engine,
            budget: self.budget,
        };
        ExperimentPlan::from_file(&self.config)?.apply(&overrides)
    }
}

impl ResultArgs {
    fn table(&self) -> Result<(PathBuf, ResultTable)> {
        let out = match (&self.out, &self.config) {
            (Some(out), _) => out.clone(),
            (None, Some(config)) => ExperimentPlan::from_file(config)?.out,
            (None, None) => return Err(Error::Config("pass --out or --config".into())),
        };
        let (plan, trials) = load_results(&out)?;
        Ok((out, ResultTable::from_stored(&plan, &trials)))
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let plan = args.plan()?;
            let summary = run_experiment(&plan, args.workers)?;
            println!(
                "{}: {} trials computed, {} already present, results in {}",
                plan.name,
                summary.computed,
                summary.skipped,
                plan.out.display()
            );
        }
        Command::Analyze(args) => {
            let (out, table) = args.table()?;
            table.write_reports(&out)?;
            for row in table.wilcoxon_rows() {
                println!("{:<16} {:>14} vs {:<14} p={:.4} {}", row.problem, row.alg_a, row.alg_b, row.p, row.verdict);
            }
            println!("tables written to {}", out.display());
        }
        Command::Robustness(args) => {
            let plan = args.plan()?;
            unbounded_de::harness::robustness_roles(&plan)?;
            run_experiment(&plan, args.workers)?;
            let (plan, trials) = load_results(&plan.out)?;
            let rows = robustness_table(&ResultTable::from_stored(&plan, &trials))?;
            write_robustness(&rows, &plan.out)?;
            println!("{:<20} {:<14} {:>12} {:>12} {:>8} {:>12}", "algorithm", "problem", "pre_rate", "post_rate", "ratio", "median_final");
            for r in rows {
                let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
                println!(
                    "{:<20} {:<14} {:>12.4e} {:>12.4e} {:>8} {:>12.4e}",
                    r.algorithm, r.problem, r.pre_rate, r.post_rate, ratio, r.median_final
                );
            }
        }
        Command::Targets(args) => {
            let (_, table) = args.table()?;
            println!("problem,q1,median,q3");
            for t in table.target_rows()? {
                println!("{},{},{},{}", t.problem, t.q1, t.median, t.q3);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
