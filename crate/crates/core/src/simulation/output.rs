//! CSV emission. Arm numbers in the files are 1-based.

use std::io::Write;
use std::path::Path;

use super::ExperimentResult;
use crate::{Error, Result};

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PULLS_FILE: &str = "pulls.csv";

pub fn write_trace<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "scenario_id".to_string(),
        "algorithm".into(),
        "run".into(),
        "t".into(),
        "cum_regret".into(),
    ];
    header.extend((1..=result.num_arms).map(|k| format!("pulls_{k}")));
    w.write_record(&header)?;
    for tr in &result.traces {
        let alg = tr.algorithm.to_string();
        let run = tr.run.to_string();
        for c in &tr.checkpoints {
            let mut row = vec![
                result.scenario_id.clone(),
                alg.clone(),
                run.clone(),
                c.t.to_string(),
                c.cum_regret.to_string(),
            ];
            row.extend(c.pulls.iter().map(u64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io("trace.csv", e))
}

pub fn write_summary<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario_id", "algorithm", "t", "mean_regret", "std_regret", "n_runs"])?;
    for r in &result.summary {
        w.write_record([
            result.scenario_id.clone(),
            r.algorithm.to_string(),
            r.t.to_string(),
            r.mean_regret.to_string(),
            r.std_regret.to_string(),
            r.n_runs.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("summary.csv", e))
}

pub fn write_pulls<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario_id", "algorithm", "arm", "mean_pulls_at_T"])?;
    for r in &result.pulls {
        w.write_record([
            result.scenario_id.clone(),
            r.algorithm.to_string(),
            (r.arm + 1).to_string(),
            r.mean_pulls_at_t.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("pulls.csv", e))
}

/// Write the three CSV files into `dir`, creating it if needed.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let open = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::io(path, e))
    };
    write_trace(result, open(TRACE_FILE)?)?;
    write_summary(result, open(SUMMARY_FILE)?)?;
    write_pulls(result, open(PULLS_FILE)?)
}
