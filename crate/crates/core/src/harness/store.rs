use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentResult, RegretTrace, ReplicateInfo};
use crate::error::{Error, Result};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CERTIFICATE_DIR: &str = "certificates";
pub const OBJECTIVE_DIR: &str = "objectives";

pub const CSV_HEADER: &str =
    "policy,seed,t,chosen_index,f_value,inst_regret,cum_regret,simple_regret";

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: String,
    pub seed: u64,
    pub t: usize,
    pub chosen_index: usize,
    pub f_value: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub simple_regret: f64,
}

/// Run manifest: the full config echo plus per-seed provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub grid_points: usize,
    pub results: String,
    pub summary: String,
    pub replicates: Vec<ReplicateInfo>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

pub fn write_results(path: &Path, traces: &[RegretTrace]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for tr in traces {
        for s in &tr.steps {
            w.serialize(ResultRow {
                policy: tr.policy.name().to_string(),
                seed: tr.seed,
                t: s.t,
                chosen_index: s.chosen_index,
                f_value: s.f_value,
                inst_regret: s.inst_regret,
                cum_regret: s.cum_regret,
                simple_regret: s.simple_regret,
            })
            .map_err(|e| Error::csv(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?;
    let joined = header.iter().collect::<Vec<_>>().join(",");
    if joined != CSV_HEADER {
        return Err(Error::MalformedResults {
            path: path.to_path_buf(),
            reason: format!("expected header `{CSV_HEADER}`, found `{joined}`"),
        });
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| Error::csv(path, e))
}

/// A trace rebuilt from `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredTrace {
    pub policy: String,
    pub seed: u64,
    pub rows: Vec<ResultRow>,
}

impl StoredTrace {
    pub fn chosen_indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.chosen_index).collect()
    }
}

/// Reads the manifest and regroups the result rows into traces, in file order.
pub fn load_traces(dir: &Path) -> Result<(Manifest, Vec<StoredTrace>)> {
    let manifest = Manifest::read(&dir.join(MANIFEST_FILE))?;
    let path = dir.join(&manifest.results);
    let malformed = |reason: String| Error::MalformedResults {
        path: path.clone(),
        reason,
    };
    let mut traces: Vec<StoredTrace> = Vec::new();
    for row in read_results(&path)? {
        if row.chosen_index >= manifest.grid_points {
            return Err(malformed(format!(
                "chosen index {} outside a grid of {} points",
                row.chosen_index, manifest.grid_points
            )));
        }
        match traces.last_mut() {
            Some(tr) if tr.policy == row.policy && tr.seed == row.seed => {
                if row.t != tr.rows.len() + 1 {
                    return Err(malformed(format!(
                        "{} seed {}: step {} follows step {}",
                        row.policy,
                        row.seed,
                        row.t,
                        tr.rows.len()
                    )));
                }
                tr.rows.push(row);
            }
            _ => {
                if row.t != 1 {
                    return Err(malformed(format!(
                        "{} seed {} starts at step {}",
                        row.policy, row.seed, row.t
                    )));
                }
                if traces
                    .iter()
                    .any(|t| t.policy == row.policy && t.seed == row.seed)
                {
                    return Err(malformed(format!(
                        "{} seed {} appears in two blocks",
                        row.policy, row.seed
                    )));
                }
                traces.push(StoredTrace {
                    policy: row.policy.clone(),
                    seed: row.seed,
                    rows: vec![row],
                });
            }
        }
    }
    Ok((manifest, traces))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub(super) fn write_experiment(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_results(&dir.join(RESULTS_FILE), &result.traces)?;

    let summary = dir.join(SUMMARY_FILE);
    let mut w = csv::Writer::from_path(&summary).map_err(|e| Error::csv(&summary, e))?;
    for row in &result.aggregates {
        w.serialize(row).map_err(|e| Error::csv(&summary, e))?;
    }
    w.flush().map_err(|e| Error::io(&summary, e))?;

    if result.config.save_objectives {
        let obj_dir: PathBuf = dir.join(OBJECTIVE_DIR);
        fs::create_dir_all(&obj_dir).map_err(|e| Error::io(&obj_dir, e))?;
        for f in &result.objectives {
            let seed = f.seed().unwrap_or_default();
            f.write_json(&obj_dir.join(format!("seed_{seed}.json")))?;
        }
    }

    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config: result.config.clone(),
        grid_points: result.config.num_candidates(),
        results: RESULTS_FILE.to_string(),
        summary: SUMMARY_FILE.to_string(),
        replicates: result.replicates.clone(),
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)
}
