//! Existence probe for pseudosolutions: solve the regularized problem along a
//! decreasing `eps` schedule and watch whether `‖x(·, eps)‖₂` settles.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_space::{l2_norm, Grid, GridFn};
use crate::operator::{DescriptorSystem, RhsPair};

use super::regularized::{coupled_grid_len, solve_regularized, RegSolution, N_MAX};

type RhsGenerator = Arc<dyn Fn(&Grid) -> Result<RhsPair> + Send + Sync>;

/// A right-hand side that can be sampled on refined grids.
#[derive(Clone)]
pub enum RhsSource {
    /// Fixed samples; other grids get piecewise-linear resampling.
    Sampled(RhsPair),
    /// `f(t)` written into the output slice, plus `f0`.
    Function {
        f: Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>,
        f0: Vec<f64>,
    },
    /// Builds the pair for each grid, e.g. `apply_d` of a manufactured state.
    Generator(RhsGenerator),
}

impl RhsSource {
    pub fn function(f: impl Fn(f64, &mut [f64]) + Send + Sync + 'static, f0: Vec<f64>) -> Self {
        RhsSource::Function { f: Arc::new(f), f0 }
    }

    pub fn generator(g: impl Fn(&Grid) -> Result<RhsPair> + Send + Sync + 'static) -> Self {
        RhsSource::Generator(Arc::new(g))
    }

    pub fn on_grid(&self, grid: &Grid) -> Result<RhsPair> {
        match self {
            RhsSource::Sampled(p) => RhsPair::new(p.f.resample(grid)?, p.f0.clone()),
            RhsSource::Function { f, f0 } => RhsPair::new(GridFn::from_fn(*grid, f0.len(), |t, o| f(t, o)), f0.clone()),
            RhsSource::Generator(g) => g(grid),
        }
    }
}

impl fmt::Debug for RhsSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsSource::Sampled(p) => f.debug_tuple("Sampled").field(&p.f0).finish(),
            RhsSource::Function { f0, .. } => f.debug_struct("Function").field("f0", f0).finish(),
            RhsSource::Generator(_) => f.write_str("Generator"),
        }
    }
}

/// `eps_k = eps0 * ratio^k`, `k < steps`, with grids coupled to `eps_k`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbeSchedule {
    pub eps0: f64,
    pub ratio: f64,
    pub steps: usize,
    /// Smallest grid size used at any step.
    pub grid_n: usize,
    pub n_max: usize,
    /// Relative change between consecutive norms still counted as settled.
    pub delta_rel: f64,
    /// Growth factor between consecutive norms counted as divergence.
    pub gamma: f64,
}

impl Default for ProbeSchedule {
    fn default() -> Self {
        ProbeSchedule {
            eps0: 0.5,
            ratio: 0.5,
            steps: 8,
            grid_n: 201,
            n_max: N_MAX,
            delta_rel: 0.05,
            gamma: 1.5,
        }
    }
}

impl ProbeSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::InvalidInput(format!("eps0 must be positive, got {}", self.eps0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidInput(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.steps < 3 {
            return Err(Error::InvalidInput(format!(
                "need at least 3 steps, got {}",
                self.steps
            )));
        }
        if self.grid_n < 3 || self.n_max < self.grid_n {
            return Err(Error::InvalidInput(
                "grid sizes must satisfy 3 <= grid_n <= n_max".into(),
            ));
        }
        Ok(())
    }

    pub fn eps_values(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.eps0 * self.ratio.powi(k as i32)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One step of the schedule.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeStep {
    pub eps: f64,
    pub grid_n: usize,
    pub cap_hit: bool,
    /// `‖x(·, eps)‖₂`, absent when the solve failed.
    pub norm: Option<f64>,
    pub residual: Option<f64>,
    pub condition: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub steps: Vec<ProbeStep>,
    pub verdict: Verdict,
    /// Last `x(·, eps)` when the verdict is bounded.
    pub estimate: Option<GridFn>,
    /// Last successful regularized solution.
    pub last_solution: Option<RegSolution>,
}

impl ProbeReport {
    pub fn eps_schedule(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.eps).collect()
    }

    /// Norms of the successful steps in schedule order.
    pub fn norms(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.norm).collect()
    }

    pub fn cap_hit(&self) -> bool {
        self.steps.iter().any(|s| s.cap_hit)
    }
}

/// Classifies the last three norms.
pub fn classify(norms: &[f64], delta_rel: f64, gamma: f64) -> Verdict {
    if norms.len() < 3 {
        return Verdict::Inconclusive;
    }
    let t = &norms[norms.len() - 3..];
    if t.windows(2).all(|w| (w[1] - w[0]).abs() <= delta_rel * w[0]) {
        Verdict::Bounded
    } else if t.windows(2).all(|w| w[1] >= gamma * w[0] && w[1] > 0.0) {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    }
}

/// Runs [`solve_regularized`] along the schedule; steps execute in parallel.
///
/// A binding grid cap makes the verdict inconclusive, as does having fewer
/// than three successful steps.
pub fn pseudosolution_probe(sys: &DescriptorSystem, rhs: &RhsSource, schedule: &ProbeSchedule) -> Result<ProbeReport> {
    schedule.validate()?;
    let interval = sys.grid().end() - sys.grid().start();
    let runs: Vec<(ProbeStep, Option<RegSolution>)> = schedule
        .eps_values()
        .into_par_iter()
        .map(|eps| {
            let (n, cap_hit) = coupled_grid_len(interval, eps, schedule.grid_n, schedule.n_max);
            let attempt = sys
                .regrid(n)
                .and_then(|s| rhs.on_grid(s.grid()).and_then(|p| solve_regularized(&s, &p, eps)));
            match attempt {
                Ok(sol) => (
                    ProbeStep {
                        eps,
                        grid_n: n,
                        cap_hit,
                        norm: Some(l2_norm(&sol.x)),
                        residual: Some(sol.residual),
                        condition: Some(sol.condition),
                        error: None,
                    },
                    Some(sol),
                ),
                Err(e) => (
                    ProbeStep {
                        eps,
                        grid_n: n,
                        cap_hit,
                        norm: None,
                        residual: None,
                        condition: None,
                        error: Some(e.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();

    let mut steps = Vec::with_capacity(runs.len());
    let mut last_solution = None;
    for (step, sol) in runs {
        if sol.is_some() {
            last_solution = sol;
        }
        steps.push(step);
    }
    let norms: Vec<f64> = steps.iter().filter_map(|s| s.norm).collect();
    let verdict = if steps.iter().any(|s| s.cap_hit) {
        Verdict::Inconclusive
    } else {
        classify(&norms, schedule.delta_rel, schedule.gamma)
    };
    let estimate = match verdict {
        Verdict::Bounded => last_solution.as_ref().map(|s| s.x.clone()),
        _ => None,
    };
    Ok(ProbeReport {
        steps,
        verdict,
        estimate,
        last_solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&[1.0, 1.0], 0.05, 1.5), Verdict::Inconclusive);
        assert_eq!(classify(&[5.0, 1.0, 1.01, 1.02], 0.05, 1.5), Verdict::Bounded);
        assert_eq!(classify(&[0.0, 0.0, 0.0], 0.05, 1.5), Verdict::Bounded);
        assert_eq!(classify(&[1.0, 2.0, 4.0], 0.05, 1.5), Verdict::Diverging);
        assert_eq!(classify(&[1.0, 1.2, 1.4], 0.05, 1.5), Verdict::Inconclusive);
    }

    #[test]
    fn schedule_validation() {
        let ok = ProbeSchedule::default();
        assert!(ok.validate().is_ok());
        assert_eq!(ok.eps_values().len(), 8);
        assert!(ProbeSchedule { ratio: 1.0, ..ok }.validate().is_err());
        assert!(ProbeSchedule { steps: 2, ..ok }.validate().is_err());
        assert!(ProbeSchedule { eps0: -1.0, ..ok }.validate().is_err());
    }

    #[test]
    fn zero_rhs_is_bounded_with_zero_estimate() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let f = Mat::diag(&[1.0, 0.0]);
        let c = Mat::from_rows(&[[1.0, -1.0], [1.0, 0.0]]).unwrap();
        let sys = DescriptorSystem::constant(f, c, g).unwrap();
        let rhs = RhsSource::Sampled(RhsPair::zero(g, 2));
        let schedule = ProbeSchedule {
            steps: 4,
            ..Default::default()
        };
        let report = pseudosolution_probe(&sys, &rhs, &schedule).unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        assert_eq!(report.norms(), vec![0.0; 4]);
        assert_eq!(report.estimate.unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn binding_cap_is_inconclusive() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let sys = DescriptorSystem::constant(Mat::identity(1), Mat::zeros(1, 1), g).unwrap();
        let rhs = RhsSource::function(|_, o| o[0] = 1.0, vec![0.0]);
        let schedule = ProbeSchedule {
            grid_n: 11,
            n_max: 50,
            ..Default::default()
        };
        let report = pseudosolution_probe(&sys, &rhs, &schedule).unwrap();
        assert!(report.cap_hit());
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.estimate.is_none());
    }
}
