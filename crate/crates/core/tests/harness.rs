use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use unbounded_de::harness::{
    load_results, run_experiment, Algorithm, ExperimentPlan, Manifest, Problem, ResultTable, RECORDS_DIR,
};
use unbounded_de::{EngineKind, Error, FunctionId};

fn small_plan(out: &Path) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(
        "small",
        vec![
            Algorithm::new("DE", EngineKind::De.default_config()),
            Algorithm::new("USHADE(DPT)", EngineKind::Ushade.default_config()),
        ],
        vec![Problem::new(FunctionId::Sphere, 6, 3_000), Problem::new(FunctionId::Rastrigin, 6, 3_000)],
        3,
    );
    plan.base_seed = 11;
    plan.out = out.to_path_buf();
    plan
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn count_with_ext(dir: &Path, ext: &str) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext))
        .count()
}

#[test]
fn full_grid_is_written_once() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = small_plan(tmp.path());
    let summary = run_experiment(&plan, Some(1)).unwrap();
    assert_eq!((summary.computed, summary.skipped), (12, 0));
    let records = tmp.path().join(RECORDS_DIR);
    assert_eq!(count_with_ext(&records, "csv"), 12);
    assert_eq!(count_with_ext(&records, "json"), 12);
    let manifest = Manifest::read(tmp.path()).unwrap();
    assert_eq!(manifest.cells.len(), 12);
    assert_eq!(manifest.plan_hash, plan.hash());

    let again = run_experiment(&plan, Some(1)).unwrap();
    assert_eq!((again.computed, again.skipped), (0, 12));
}

#[test]
fn missing_trial_is_recomputed_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = small_plan(tmp.path());
    run_experiment(&plan, Some(1)).unwrap();
    let before = snapshot(tmp.path());
    let stem = plan.cell_stem(plan.cells()[4]);
    let records = tmp.path().join(RECORDS_DIR);
    fs::remove_file(records.join(format!("{stem}.json"))).unwrap();
    fs::remove_file(records.join(format!("{stem}.csv"))).unwrap();

    let summary = run_experiment(&plan, Some(1)).unwrap();
    assert_eq!((summary.computed, summary.skipped), (1, 11));
    assert_eq!(snapshot(tmp.path()), before);
}

#[test]
fn results_of_another_plan_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = small_plan(tmp.path());
    run_experiment(&plan, Some(1)).unwrap();
    let mut other = plan.clone();
    other.base_seed = 12;
    let err = run_experiment(&other, Some(1)).unwrap_err();
    assert!(matches!(err, Error::ResultMismatch(_)));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn worker_count_does_not_change_output() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    run_experiment(&small_plan(one.path()), Some(1)).unwrap();
    run_experiment(&small_plan(two.path()), Some(2)).unwrap();
    let (a, b) = (snapshot(one.path()), snapshot(two.path()));
    let strip = |m: BTreeMap<PathBuf, Vec<u8>>| {
        m.into_iter().filter(|(p, _)| p != Path::new("manifest.json")).collect::<BTreeMap<_, _>>()
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn stored_results_match_memory() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = small_plan(tmp.path());
    run_experiment(&plan, None).unwrap();
    let (loaded, trials) = load_results(tmp.path()).unwrap();
    assert_eq!(loaded.hash(), plan.hash());
    let stored = ResultTable::from_stored(&loaded, &trials);
    let memory = ResultTable::from_outcomes(&plan, unbounded_de::harness::run_in_memory(&plan, Some(1)).unwrap());
    for a in 0..2 {
        for p in 0..2 {
            assert_eq!(stored.finals(a, p), memory.finals(a, p));
            let (s, m) = (stored.records(a, p), memory.records(a, p));
            assert!(s.iter().zip(m).all(|(x, y)| x.trajectory == y.trajectory));
        }
    }
    stored.write_reports(tmp.path()).unwrap();
    for name in ["targets.csv", "ecdf.csv", "wilcoxon.csv", "lineage.csv", "analysis.json"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
}

// ---------------------------------------------------------------- CLI

fn ude(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ude")).args(args).output().unwrap()
}

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn cli_run_analyze_targets() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let smoke = config_path("smoke.toml");
    let run = ude(&["run", "--config", &smoke, "--out", out, "--trials", "2", "--budget", "3000", "--workers", "1"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("8 trials computed"));

    let analyze = ude(&["analyze", "--out", out]);
    assert!(analyze.status.success(), "{}", String::from_utf8_lossy(&analyze.stderr));
    assert!(tmp.path().join("ecdf.csv").exists());

    let targets = ude(&["targets", "--out", out]);
    let text = String::from_utf8_lossy(&targets.stdout);
    assert!(targets.status.success());
    assert_eq!(text.lines().next(), Some("problem,q1,median,q3"));
    assert_eq!(text.lines().count(), 3);

    // same directory, different seed
    let clash = ude(&["run", "--config", &smoke, "--out", out, "--trials", "2", "--budget", "3000", "--seed", "99"]);
    assert_eq!(clash.status.code(), Some(3));
}

#[test]
fn cli_rejects_bad_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[experiment]\nname = \"x\"\nbogus = 1\n").unwrap();
    let r = ude(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    let out = tmp.path().join("res");
    let r = ude(&["robustness", "--config", &config_path("smoke.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());

    let r = ude(&["analyze", "--out", tmp.path().join("nothing").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn cli_robustness_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let r = ude(&["robustness", "--config", &config_path("robustness.toml"), "--out", out, "--trials", "2", "--budget", "8000"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let table = fs::read_to_string(tmp.path().join("robustness.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.lines().next().unwrap().starts_with("algorithm,problem,pre_rate,post_rate,ratio"));
}
