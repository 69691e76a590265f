//! JSON descriptions of systems and right-hand sides, plus CSV/JSON writers
//! for solver results.
//!
//! A system file looks like
//!
//! ```json
//! { "F": [[1, 0], [0, 0]],
//!   "C": { "kind": "constant", "value": [[1, -1], [1, 0]] },
//!   "interval": [0, 1] }
//! ```
//!
//! `C` may also be `{"kind": "poly", "coeffs": [M0, M1, ...]}` for
//! `C(t) = Σ M_k t^k`, or `{"kind": "samples", "values": [...]}` with one
//! matrix per node of a uniform grid over the interval.
//!
//! A right-hand side file is `{"f": {...}, "f0": [...]}` where `f` is one of
//! `{"kind": "zero"}`, `{"kind": "poly", "coeffs": [v0, v1, ...]}`,
//! `{"kind": "exp_poly", "rate": r, "coeffs": [...]}` (the polynomial times
//! `e^{r t}`) or `{"kind": "samples", "values": [[...], ...]}`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{l2_norm, Grid, GridFn};
use crate::linalg::Mat;
use crate::operator::{CoefSource, DescriptorSystem, RhsPair};
use crate::solver::{ProbeReport, ProbeSchedule, ProbeStep, RegSolution, RhsSource, Verdict};

type Rows = Vec<Vec<f64>>;

fn mat(rows: &Rows, what: &str) -> Result<Mat> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{what} has no rows")));
    }
    Mat::from_rows(rows).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefSpec {
    Constant { value: Rows },
    Poly { coeffs: Vec<Rows> },
    Samples { values: Vec<Rows> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "F")]
    pub f: Rows,
    #[serde(rename = "C")]
    pub c: CoefSpec,
    pub interval: [f64; 2],
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new(self.interval[0], self.interval[1], n)
    }

    /// Builds the system on a uniform grid with `n` nodes.
    pub fn build(&self, n: usize) -> Result<DescriptorSystem> {
        let grid = self.grid(n)?;
        let f = mat(&self.f, "F")?;
        let c = match &self.c {
            CoefSpec::Constant { value } => CoefSource::Constant(mat(value, "C")?),
            CoefSpec::Poly { coeffs } => CoefSource::Poly(
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, m)| mat(m, &format!("C coefficient {k}")))
                    .collect::<Result<_>>()?,
            ),
            CoefSpec::Samples { values } => CoefSource::Samples {
                grid: self.grid(values.len())?,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(k, m)| mat(m, &format!("C sample {k}")))
                    .collect::<Result<_>>()?,
            },
        };
        DescriptorSystem::new(f, c, grid)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    Zero,
    /// `Σ_k coeffs[k] t^k`.
    Poly {
        coeffs: Rows,
    },
    /// `e^{rate t} Σ_k coeffs[k] t^k`.
    ExpPoly {
        rate: f64,
        coeffs: Rows,
    },
    /// One vector per node of a uniform grid over the interval.
    Samples {
        values: Rows,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RhsSpec {
    pub f: ForcingSpec,
    pub f0: Vec<f64>,
}

fn poly_value(coeffs: &Rows, t: f64, out: &mut [f64]) {
    out.fill(0.0);
    for c in coeffs.iter().rev() {
        for (o, v) in out.iter_mut().zip(c) {
            *o = *o * t + v;
        }
    }
}

impl RhsSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Right-hand side for `sys`, evaluated afresh on any grid.
    pub fn source(&self, sys: &DescriptorSystem) -> Result<RhsSource> {
        let m = sys.m();
        if self.f0.len() != m || self.f0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("f0 must hold {m} finite values")));
        }
        let check = |rows: &Rows, what: &str| -> Result<()> {
            if rows.iter().any(|r| r.len() != m || r.iter().any(|v| !v.is_finite())) {
                return Err(Error::InvalidInput(format!(
                    "{what} entries must be finite {m}-vectors"
                )));
            }
            Ok(())
        };
        let f0 = self.f0.clone();
        Ok(match &self.f {
            ForcingSpec::Zero => RhsSource::function(|_, o| o.fill(0.0), f0),
            ForcingSpec::Poly { coeffs } => {
                check(coeffs, "f coefficients")?;
                let coeffs = coeffs.clone();
                RhsSource::function(move |t, o| poly_value(&coeffs, t, o), f0)
            }
            ForcingSpec::ExpPoly { rate, coeffs } => {
                check(coeffs, "f coefficients")?;
                if !rate.is_finite() {
                    return Err(Error::InvalidInput("f rate must be finite".into()));
                }
                let (rate, coeffs) = (*rate, coeffs.clone());
                RhsSource::function(
                    move |t, o| {
                        poly_value(&coeffs, t, o);
                        let e = (rate * t).exp();
                        o.iter_mut().for_each(|v| *v *= e);
                    },
                    f0,
                )
            }
            ForcingSpec::Samples { values } => {
                check(values, "f samples")?;
                let g = Grid::new(sys.grid().start(), sys.grid().end(), values.len())?;
                let f = GridFn::from_values(g, m, values.concat())?;
                RhsSource::Sampled(RhsPair::new(f, f0)?)
            }
        })
    }
}

/// Writes `t, x1..xn, z1..zm` per node.
pub fn write_solution_csv<W: Write>(sol: &RegSolution, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let n = sol.x.dim();
    let m = sol.z.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|k| format!("x{k}")));
    header.extend((1..=m).map(|k| format!("z{k}")));
    out.write_record(&header)?;
    for (i, t) in sol.x.grid().nodes().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(sol.x.at(i).iter().chain(sol.z.at(i)).map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_solution_csv(sol: &RegSolution, path: impl AsRef<Path>) -> Result<()> {
    write_solution_csv(sol, BufWriter::new(File::create(path)?))
}

/// Writes one row per probe step.
pub fn write_probe_csv<W: Write>(report: &ProbeReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["eps", "grid_n", "cap_hit", "norm", "residual", "condition"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in &report.steps {
        out.write_record([
            s.eps.to_string(),
            s.grid_n.to_string(),
            s.cap_hit.to_string(),
            opt(s.norm),
            opt(s.residual),
            opt(s.condition),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_probe_csv(report: &ProbeReport, path: impl AsRef<Path>) -> Result<()> {
    write_probe_csv(report, BufWriter::new(File::create(path)?))
}

/// JSON view of a [`RegSolution`] without the node values.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummary {
    pub eps: f64,
    pub grid_n: usize,
    pub x_l2: f64,
    pub z_l2: f64,
    pub d: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
}

impl From<&RegSolution> for SolutionSummary {
    fn from(s: &RegSolution) -> Self {
        SolutionSummary {
            eps: s.eps,
            grid_n: s.x.grid().len(),
            x_l2: l2_norm(&s.x),
            z_l2: l2_norm(&s.z),
            d: s.d.clone(),
            residual: s.residual,
            condition: s.condition,
        }
    }
}

/// JSON view of a [`ProbeReport`].
#[derive(Clone, Debug, Serialize)]
pub struct ProbeSummary {
    pub schedule: ProbeSchedule,
    pub verdict: Verdict,
    pub eps_schedule: Vec<f64>,
    pub norms: Vec<f64>,
    pub cap_hit: bool,
    pub steps: Vec<ProbeStep>,
    pub estimate_l2: Option<f64>,
}

impl ProbeSummary {
    pub fn new(report: &ProbeReport, schedule: &ProbeSchedule) -> Self {
        ProbeSummary {
            schedule: *schedule,
            verdict: report.verdict,
            eps_schedule: report.eps_schedule(),
            norms: report.norms(),
            cap_hit: report.cap_hit(),
            steps: report.steps.clone(),
            estimate_l2: report.estimate.as_ref().map(l2_norm),
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn save_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
