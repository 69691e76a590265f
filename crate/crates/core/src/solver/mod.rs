//! Regularized boundary value problem, pseudosolution probe, Riccati
//! decoupling and the closed-range criterion.

mod banded;
pub mod probe;
pub mod range;
pub mod regularized;
pub mod riccati;

pub use probe::{classify, pseudosolution_probe, ProbeReport, ProbeSchedule, ProbeStep, RhsSource, Verdict};
pub use range::{
    closed_range_criterion, closed_range_for_system, default_eps_grid, q_times_c2t, CBlocks, RangeVerdict,
};
pub use regularized::{coupled_grid_len, solve_regularized, trapezoid_residuals, RegSolution, TAU_SOLVE};
pub use riccati::{
    example1_closed_form, log_l2_norm_q, riccati_bounds, riccati_rhs, riccati_sweep, riccati_sweep_from,
    Example1ClosedForm, QClosedForm, EPS0,
};
