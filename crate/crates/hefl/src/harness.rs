//! Comparison runs, sensitivity sweeps, and report emission. Every file this
//! module writes is a pure function of the scenario config bytes: map keys
//! are sorted, floats use their shortest round-trip form, and nothing
//! records a timestamp.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::scenario::{Scenario, Strategy, TieringMethod};
use crate::sim::{run_experiment, Engine, ExperimentResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("{0}")]
    Config(String),
}

/// One strategy × seed cell of a comparison, kept even when it failed so the
/// other cells' results still land on disk.
#[derive(Debug)]
pub struct CellOutcome {
    pub strategy: Strategy,
    pub seed: u64,
    pub outcome: Result<ExperimentResult, String>,
}

/// Median-over-seeds digest of one strategy's cells.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs_ok: usize,
    pub runs_failed: usize,
    pub final_accuracy_median: Option<f64>,
    pub convergence_time_s_median: Option<f64>,
    pub total_security_loss_median: Option<f64>,
}

/// Everything one comparison produced, with the directory it was written to.
#[derive(Debug)]
pub struct ComparisonReport {
    pub scenario: String,
    pub dir: PathBuf,
    pub cells: Vec<CellOutcome>,
    pub summaries: Vec<StrategySummary>,
}

impl ComparisonReport {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }

    pub fn result(&self, strategy: Strategy, seed: u64) -> Option<&ExperimentResult> {
        self.cells
            .iter()
            .find(|c| c.strategy == strategy && c.seed == seed)
            .and_then(|c| c.outcome.as_ref().ok())
    }

    pub fn summary(&self, strategy: Strategy) -> Option<&StrategySummary> {
        self.summaries.iter().find(|s| s.strategy == strategy)
    }
}

/// The sensitivity axes the sweep verb accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    K,
    Alpha,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::K => "k",
            SweepAxis::Alpha => "alpha",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(SweepAxis::K),
            "alpha" => Ok(SweepAxis::Alpha),
            other => Err(format!(
                "unknown sweep axis `{other}` (expected K or alpha)"
            )),
        }
    }
}

/// One (axis value, strategy, seed) line of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub strategy: Strategy,
    pub seed: u64,
    /// `None` when the cell failed.
    pub final_accuracy: Option<f64>,
    pub convergence_time_s: Option<f64>,
    pub total_security_loss: Option<u64>,
    /// Security losses summed over the last (up to) 100 rounds.
    pub security_loss_last100: Option<u64>,
    /// Participant-rounds over the same window, the loss rate's denominator.
    pub participant_rounds_last100: Option<u64>,
}

/// A finished sweep: per-value comparisons plus the flat row table.
#[derive(Debug)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub dir: PathBuf,
    pub rows: Vec<SweepRow>,
    pub comparisons: Vec<(f64, ComparisonReport)>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.comparisons.iter().map(|(_, c)| c.failures()).sum()
    }
}

/// Shortest round-trip decimal form; the one float format every file uses.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| HarnessError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Median of an unsorted sample; even lengths average the middle pair.
fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

/// The per-run CSV: one row per round, global columns then four per tier.
/// Tiers without participants leave their observation cells empty.
fn run_csv(result: &ExperimentResult, k: usize) -> String {
    let mut s = String::from("round,sim_time_s,global_acc");
    for t in 0..k {
        s.push_str(&format!(
            ",tier{t}_plan,tier{t}_round_time_s,tier{t}_security_loss,tier{t}_reward"
        ));
    }
    s.push('\n');
    for rep in &result.reports {
        s.push_str(&format!(
            "{},{},{}",
            rep.round,
            fmt_f64(rep.sim_time_s),
            fmt_f64(rep.global_accuracy)
        ));
        for t in &rep.tiers {
            let plan = t.plan.map(|p| p.token()).unwrap_or_default();
            let loss = if t.round_time_s.is_some() {
                t.security_loss.to_string()
            } else {
                String::new()
            };
            s.push_str(&format!(
                ",{plan},{},{loss},{}",
                fmt_opt(t.round_time_s),
                fmt_opt(t.reward)
            ));
        }
        s.push('\n');
    }
    s
}

/// The plot-data CSV for one strategy: every seed's accuracy trajectory.
fn accuracy_csv(cells: &[CellOutcome], strategy: Strategy) -> String {
    let mut s = String::from("seed,round,sim_time_s,accuracy\n");
    for cell in cells.iter().filter(|c| c.strategy == strategy) {
        if let Ok(result) = &cell.outcome {
            for rep in &result.reports {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    cell.seed,
                    rep.round,
                    fmt_f64(rep.sim_time_s),
                    fmt_f64(rep.global_accuracy)
                ));
            }
        }
    }
    s
}

fn summarize(cells: &[CellOutcome], strategies: &[Strategy]) -> Vec<StrategySummary> {
    strategies
        .iter()
        .map(|&strategy| {
            let ok: Vec<&ExperimentResult> = cells
                .iter()
                .filter(|c| c.strategy == strategy)
                .filter_map(|c| c.outcome.as_ref().ok())
                .collect();
            let failed = cells
                .iter()
                .filter(|c| c.strategy == strategy && c.outcome.is_err())
                .count();
            StrategySummary {
                strategy,
                runs_ok: ok.len(),
                runs_failed: failed,
                final_accuracy_median: median(ok.iter().map(|r| r.final_accuracy).collect()),
                convergence_time_s_median: median(
                    ok.iter().filter_map(|r| r.convergence_time_s).collect(),
                ),
                total_security_loss_median: median(
                    ok.iter().map(|r| r.total_security_loss as f64).collect(),
                ),
            }
        })
        .collect()
}

fn summary_csv(summaries: &[StrategySummary]) -> String {
    let mut s = String::from(
        "strategy,runs_ok,runs_failed,final_accuracy_median,convergence_time_s_median,total_security_loss_median\n",
    );
    for row in summaries {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.strategy,
            row.runs_ok,
            row.runs_failed,
            fmt_opt(row.final_accuracy_median),
            fmt_opt(row.convergence_time_s_median),
            fmt_opt(row.total_security_loss_median)
        ));
    }
    s
}

fn summary_json(scenario: &str, summaries: &[StrategySummary]) -> String {
    let mut strategies = serde_json::Map::new();
    for row in summaries {
        strategies.insert(
            row.strategy.to_string(),
            serde_json::json!({
                "runs_ok": row.runs_ok,
                "runs_failed": row.runs_failed,
                "final_accuracy_median": row.final_accuracy_median,
                "convergence_time_s_median": row.convergence_time_s_median,
                "total_security_loss_median": row.total_security_loss_median,
            }),
        );
    }
    let doc = serde_json::json!({
        "scenario": scenario,
        "strategies": strategies,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("static structure serializes");
    text.push('\n');
    text
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Strategies in configured order with duplicates dropped.
fn unique_strategies(sc: &Scenario) -> Vec<Strategy> {
    let mut out = Vec::new();
    for &s in &sc.run.strategies {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Runs every strategy × seed cell of `sc` (bounded by `run.parallelism`)
/// and writes the comparison's files into `dir`: per-run CSVs and Q-tables
/// under `runs/`, accuracy trajectories under `plots/`, the population and
/// tiering per seed, and the summary pair. A failing cell is reported in its
/// place; the others proceed.
pub fn run_comparison(sc: &Scenario, dir: &Path) -> Result<ComparisonReport, HarnessError> {
    let strategies = unique_strategies(sc);
    let pairs: Vec<(Strategy, u64)> = strategies
        .iter()
        .flat_map(|&s| sc.run.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sc.run.parallelism.max(1))
        .build()?;
    let cells: Vec<CellOutcome> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(strategy, seed)| CellOutcome {
                strategy,
                seed,
                outcome: run_experiment(sc, strategy, seed).map_err(|e| e.to_string()),
            })
            .collect()
    });

    for cell in &cells {
        if let Ok(result) = &cell.outcome {
            let name = format!("{}_seed{}.csv", cell.strategy, cell.seed);
            write_file(&dir.join("runs").join(name), &run_csv(result, sc.tiering.k))?;
            if let Some(q) = &result.qtable {
                let name = format!("{}_seed{}_qtable.json", cell.strategy, cell.seed);
                write_file(&dir.join("runs").join(name), &to_pretty_json(&q.to_json()))?;
            }
        }
    }
    for &strategy in &strategies {
        write_file(
            &dir.join("plots").join(format!("accuracy_{strategy}.csv")),
            &accuracy_csv(&cells, strategy),
        )?;
    }
    // The population and its tiering depend on the seed alone, so one probe
    // engine per seed records them for every strategy at once.
    for &seed in &sc.run.seeds {
        if let Ok(engine) = Engine::new(sc, strategies[0], seed) {
            write_file(
                &dir.join(format!("population_seed{seed}.json")),
                &to_pretty_json(engine.population()),
            )?;
            write_file(
                &dir.join(format!("tiering_seed{seed}.json")),
                &to_pretty_json(engine.tiering()),
            )?;
        }
    }

    let summaries = summarize(&cells, &strategies);
    write_file(&dir.join("summary.csv"), &summary_csv(&summaries))?;
    write_file(
        &dir.join("summary.json"),
        &summary_json(&sc.name, &summaries),
    )?;
    Ok(ComparisonReport {
        scenario: sc.name.clone(),
        dir: dir.to_path_buf(),
        cells,
        summaries,
    })
}

/// Security losses and participant-rounds over the last (up to) 100 rounds.
fn last_100(result: &ExperimentResult) -> (u64, u64) {
    let mut loss = 0u64;
    let mut participants = 0u64;
    for rep in result.reports.iter().rev().take(100) {
        for t in &rep.tiers {
            loss += t.security_loss as u64;
            participants += t.participants as u64;
        }
    }
    (loss, participants)
}

/// Rewrites `sc` for one sweep point, enforcing the tiering shape rules the
/// config parser would have.
fn apply_axis(sc: &mut Scenario, axis: SweepAxis, value: f64) -> Result<(), HarnessError> {
    match axis {
        SweepAxis::Alpha => {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(HarnessError::Config(format!(
                    "alpha sweep value {value} must be finite and >= 0"
                )));
            }
            sc.rl.alpha = value;
        }
        SweepAxis::K => {
            if value.fract() != 0.0 || !(value >= 1.0) {
                return Err(HarnessError::Config(format!(
                    "K sweep value {value} must be a positive integer"
                )));
            }
            let k = value as usize;
            match sc.tiering.method {
                TieringMethod::Hierarchical => {
                    let beta = sc.tiering.criteria.len();
                    if k > 1 && crate::tiering::exact_root(k, beta).is_none() {
                        return Err(HarnessError::Config(format!(
                            "K sweep value {k} is not m^{beta} for an integer m >= 2"
                        )));
                    }
                }
                TieringMethod::Random if k > sc.population.n_clients => {
                    return Err(HarnessError::Config(format!(
                        "K sweep value {k} exceeds the population of {}",
                        sc.population.n_clients
                    )));
                }
                _ => {}
            }
            sc.tiering.k = k;
        }
    }
    Ok(())
}

fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut s = String::from(
        "axis,value,strategy,seed,final_accuracy,convergence_time_s,total_security_loss,security_loss_last100,participant_rounds_last100\n",
    );
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            axis.name(),
            fmt_f64(row.value),
            row.strategy,
            row.seed,
            fmt_opt(row.final_accuracy),
            fmt_opt(row.convergence_time_s),
            row.total_security_loss
                .map(|v| v.to_string())
                .unwrap_or_default(),
            row.security_loss_last100
                .map(|v| v.to_string())
                .unwrap_or_default(),
            row.participant_rounds_last100
                .map(|v| v.to_string())
                .unwrap_or_default()
        ));
    }
    s
}

/// Runs one full comparison per axis value (into `k_4/`, `alpha_5/`, …
/// under `dir`) and writes the flat `sweep.csv` across all of them. `values`
/// falls back to the scenario's `[sweep]` table.
pub fn run_sweep(
    sc: &Scenario,
    axis: SweepAxis,
    values: Option<&[f64]>,
    dir: &Path,
) -> Result<SweepReport, HarnessError> {
    let values: Vec<f64> = match values {
        Some(v) => v.to_vec(),
        None => match axis {
            SweepAxis::Alpha => sc.sweep.alpha.clone(),
            SweepAxis::K => sc.sweep.k.iter().map(|&k| k as f64).collect(),
        },
    };
    if values.is_empty() {
        return Err(HarnessError::Config(
            "sweep needs at least one axis value".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut comparisons = Vec::new();
    for &value in &values {
        let mut point = sc.clone();
        apply_axis(&mut point, axis, value)?;
        let label = format!("{}_{}", axis.name(), fmt_f64(value));
        let report = run_comparison(&point, &dir.join(label))?;
        for cell in &report.cells {
            let (final_accuracy, convergence, total, last, window) = match &cell.outcome {
                Ok(result) => {
                    let (loss, participants) = last_100(result);
                    (
                        Some(result.final_accuracy),
                        result.convergence_time_s,
                        Some(result.total_security_loss),
                        Some(loss),
                        Some(participants),
                    )
                }
                Err(_) => (None, None, None, None, None),
            };
            rows.push(SweepRow {
                value,
                strategy: cell.strategy,
                seed: cell.seed,
                final_accuracy,
                convergence_time_s: convergence,
                total_security_loss: total,
                security_loss_last100: last,
                participant_rounds_last100: window,
            });
        }
        comparisons.push((value, report));
    }
    write_file(&dir.join("sweep.csv"), &sweep_csv(axis, &rows))?;
    Ok(SweepReport {
        axis,
        dir: dir.to_path_buf(),
        rows,
        comparisons,
    })
}

/// Reads back every Q-table a comparison left under `run_dir/runs`, sorted
/// by file name.
pub fn collect_qtables(run_dir: &Path) -> Result<Vec<(String, String)>, HarnessError> {
    let runs = run_dir.join("runs");
    let entries = std::fs::read_dir(&runs).map_err(|source| HarnessError::Io {
        path: runs.display().to_string(),
        source,
    })?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with("_qtable.json"))
        .collect();
    names.sort();
    let mut out = Vec::new();
    for name in names {
        let path = runs.join(&name);
        let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        out.push((name, text));
    }
    Ok(out)
}

/// Sorted (relative path, bytes) of every file under `dir`; the byte-level
/// fingerprint the determinism checks compare.
pub fn dir_fingerprint(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, HarnessError> {
    fn walk(
        root: &Path,
        dir: &Path,
        out: &mut BTreeMap<String, Vec<u8>>,
    ) -> Result<(), HarnessError> {
        let entries = std::fs::read_dir(dir).map_err(|source| HarnessError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for entry in entries.filter_map(|e| e.ok()) {
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path
                    .strip_prefix(root)
                    .expect("walk stays under root")
                    .to_string_lossy()
                    .replace('\\', "/");
                let bytes = std::fs::read(&path).map_err(|source| HarnessError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                out.insert(rel, bytes);
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::TRACE_HEADER;
    use crate::scenario::parse_config_str;

    fn small_scenario(dir: &Path, extra: &str) -> Scenario {
        let mut trace = String::from(TRACE_HEADER);
        for speed in [1.0, 1.0, 0.5, 0.5] {
            trace.push_str(&format!("\n{speed},1e7,10.0"));
        }
        std::fs::write(dir.join("trace.csv"), trace).unwrap();
        let text = format!(
            r#"
[population]
trace = "trace.csv"
n_clients = 4

[tiering]
method = "hierarchical"
criteria = ["latency"]
k = 2

[run]
rounds = 3
participation = 1.0
seeds = [1, 2]
strategies = ["baseline", "rl"]
model_params = 100000
{extra}
"#
        );
        parse_config_str(&text, dir, "small").unwrap()
    }

    #[test]
    fn comparison_writes_the_full_layout() {
        let tmp = tempfile::tempdir().unwrap();
        let sc = small_scenario(tmp.path(), "");
        let out = tmp.path().join("out");
        let report = run_comparison(&sc, &out).unwrap();
        assert_eq!(report.cells.len(), 4);
        assert_eq!(report.failures(), 0);
        for name in [
            "runs/baseline_seed1.csv",
            "runs/baseline_seed2.csv",
            "runs/rl_seed1.csv",
            "runs/rl_seed1_qtable.json",
            "plots/accuracy_baseline.csv",
            "plots/accuracy_rl.csv",
            "summary.csv",
            "summary.json",
            "population_seed1.json",
            "tiering_seed2.json",
        ] {
            assert!(out.join(name).exists(), "missing {name}");
        }
        let csv = std::fs::read_to_string(out.join("runs/baseline_seed1.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3, "header plus one row per round");
        assert!(csv.lines().next().unwrap().contains("tier1_reward"));
        let summary = report.summary(Strategy::Baseline).unwrap();
        assert_eq!(summary.runs_ok, 2);
        assert!(summary.final_accuracy_median.is_some());
    }

    #[test]
    fn rerunning_reproduces_every_byte() {
        let tmp = tempfile::tempdir().unwrap();
        let sc = small_scenario(
            tmp.path(),
            "[trainer]\nnoise_sd = 0.01\nheterogeneity_sd = 0.02\n",
        );
        let once = tmp.path().join("a");
        let twice = tmp.path().join("b");
        run_comparison(&sc, &once).unwrap();
        run_comparison(&sc, &twice).unwrap();
        let a = dir_fingerprint(&once).unwrap();
        let b = dir_fingerprint(&twice).unwrap();
        assert_eq!(
            a.keys().collect::<Vec<_>>(),
            b.keys().collect::<Vec<_>>(),
            "same file set"
        );
        for (name, bytes) in &a {
            assert_eq!(Some(bytes), b.get(name), "{name} differs");
        }
    }

    #[test]
    fn failed_cells_are_reported_not_fatal() {
        let tmp = tempfile::tempdir().unwrap();
        let mut sc = small_scenario(tmp.path(), "");
        sc.population.trace = tmp.path().join("missing.csv");
        let out = tmp.path().join("out");
        let report = run_comparison(&sc, &out).unwrap();
        assert_eq!(report.failures(), 4);
        assert!(out.join("summary.csv").exists());
        let summary = report.summary(Strategy::Rl).unwrap();
        assert_eq!(summary.runs_failed, 2);
        assert_eq!(summary.final_accuracy_median, None);
    }

    #[test]
    fn sweep_runs_one_comparison_per_value() {
        let tmp = tempfile::tempdir().unwrap();
        let sc = small_scenario(tmp.path(), "");
        let out = tmp.path().join("sweep");
        let report = run_sweep(&sc, SweepAxis::Alpha, Some(&[1.0, 5.0]), &out).unwrap();
        assert_eq!(report.comparisons.len(), 2);
        assert!(out.join("alpha_1/summary.csv").exists());
        assert!(out.join("alpha_5/summary.csv").exists());
        let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
        // Header plus 4 cells per value.
        assert_eq!(csv.lines().count(), 1 + 8);
        assert!(csv.lines().nth(1).unwrap().starts_with("alpha,1,"));
    }

    #[test]
    fn sweep_rejects_bad_values() {
        let tmp = tempfile::tempdir().unwrap();
        let sc = small_scenario(tmp.path(), "");
        let out = tmp.path().join("sweep");
        assert!(matches!(
            run_sweep(&sc, SweepAxis::Alpha, Some(&[]), &out),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(
            run_sweep(&sc, SweepAxis::K, Some(&[2.5]), &out),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn k_sweep_respects_the_tiering_shape() {
        let tmp = tempfile::tempdir().unwrap();
        // β=2 scenario: only squares are admissible K values.
        let sc_text = r#"
[population]
trace = "trace.csv"
n_clients = 4

[tiering]
method = "hierarchical"
criteria = ["security", "latency"]
k = 4

[run]
rounds = 1
participation = 1.0
seeds = [1]
strategies = ["baseline"]
model_params = 100000
"#
        .to_string();
        let mut trace = String::from(TRACE_HEADER);
        for speed in [1.0, 1.0, 0.5, 0.5] {
            trace.push_str(&format!("\n{speed},1e7,10.0"));
        }
        std::fs::write(tmp.path().join("trace.csv"), trace).unwrap();
        let sc = parse_config_str(&sc_text, tmp.path(), "beta2").unwrap();
        let out = tmp.path().join("sweep");
        assert!(matches!(
            run_sweep(&sc, SweepAxis::K, Some(&[6.0]), &out),
            Err(HarnessError::Config(_))
        ));
        assert!(run_sweep(&sc, SweepAxis::K, Some(&[4.0]), &out).is_ok());
    }

    #[test]
    fn medians_average_even_samples() {
        assert_eq!(median(vec![]), None);
        assert_eq!(median(vec![3.0]), Some(3.0));
        assert_eq!(median(vec![4.0, 1.0, 3.0]), Some(3.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn qtables_collect_sorted() {
        let tmp = tempfile::tempdir().unwrap();
        let sc = small_scenario(tmp.path(), "");
        let out = tmp.path().join("out");
        run_comparison(&sc, &out).unwrap();
        let tables = collect_qtables(&out).unwrap();
        let names: Vec<&str> = tables.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["rl_seed1_qtable.json", "rl_seed2_qtable.json"]);
        assert!(tables[0].1.contains("\"gamma\""));
    }
}
