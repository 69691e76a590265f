//! Output directory handling and the JSON audit trail.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use descriptor::io::save_json;
use descriptor::linalg::{TAU_PENCIL, TAU_PINV, TAU_RANK, TAU_REDUCE};
use descriptor::operator::TAU_BC;
use descriptor::solver::range::{M_CAP, TAU_FLAT};
use descriptor::solver::regularized::NODES_PER_EPS;
use descriptor::solver::{ProbeSchedule, TAU_SOLVE};
use descriptor::{Error, Result};

use crate::Opts;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::Inconclusive => 4,
        }
    }
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::SolveFailure { .. } | Error::Overflow(_) => 3,
        _ => 2,
    }
}

#[derive(Serialize)]
struct Tolerances {
    tau_rank: f64,
    tau_pinv: f64,
    tau_reduce: f64,
    tau_pencil: f64,
    tau_bc: f64,
    tau_solve: f64,
    tau_flat: f64,
    m_cap: f64,
    nodes_per_eps: f64,
    delta_rel: f64,
    gamma: f64,
}

impl Tolerances {
    fn current() -> Self {
        let s = ProbeSchedule::default();
        Tolerances {
            tau_rank: TAU_RANK,
            tau_pinv: TAU_PINV,
            tau_reduce: TAU_REDUCE,
            tau_pencil: TAU_PENCIL,
            tau_bc: TAU_BC,
            tau_solve: TAU_SOLVE,
            tau_flat: TAU_FLAT,
            m_cap: M_CAP,
            nodes_per_eps: NODES_PER_EPS,
            delta_rel: s.delta_rel,
            gamma: s.gamma,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    status: &'a str,
    config: &'a Opts,
    tolerances: Tolerances,
    result: &'a Value,
}

/// One invocation: its output directory and the result collected so far.
pub struct Run {
    command: String,
    config: Opts,
    result: Value,
}

impl Run {
    pub fn start(command: &str, config: &Opts) -> Result<Self> {
        fs::create_dir_all(&config.out)?;
        Ok(Run {
            command: command.to_string(),
            config: config.clone(),
            result: Value::Null,
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.config.out.join(file)
    }

    pub fn result<T: Serialize>(&mut self, value: &T) -> Result<()> {
        self.result = serde_json::to_value(value)?;
        Ok(())
    }

    pub fn finish(self, outcome: Outcome) -> Result<()> {
        let summary = Summary {
            command: &self.command,
            status: match outcome {
                Outcome::Done => "ok",
                Outcome::Inconclusive => "inconclusive",
            },
            config: &self.config,
            tolerances: Tolerances::current(),
            result: &self.result,
        };
        let path = self.path("summary.json");
        save_json(&summary, &path)?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

/// CSV with a header row; numbers in shortest round-trip form.
pub fn write_rows(path: impl AsRef<Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
