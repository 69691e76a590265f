//! Closed-range test for `F = diag(E_r, 0)` and constant `C = [[C1, C2], [C3, C4]]`:
//! the range of `D` is closed when `ε ↦ ‖Q(ε) C2'‖_mod` stays bounded,
//! `Q(ε) = (ε² E + C4'C4)^{-1}`.
//!
//! Two independent branches are reported. The numeric branch samples the
//! mod-norm on a decreasing `ε` grid. The algebraic branch uses that, for the
//! positive semidefinite `C4'C4`, `Q(ε) C2'` stays bounded exactly when
//! `range(C2') ⊆ range(C4'C4)`.

use faer::Side;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::linalg::{canonical_reduction, mod_norm, range_inclusion, Mat, Reduction, TAU_REDUCE};
use crate::operator::DescriptorSystem;

/// Samples above this count as unbounded.
pub const M_CAP: f64 = 1e6;
/// Relative growth per sample still treated as flat.
pub const TAU_FLAT: f64 = 0.1;
/// Samples inspected by the numeric branch.
const TAIL: usize = 4;

/// Blocks of `C` relative to `F = diag(E_r, 0)`.
#[derive(Clone, Debug)]
pub struct CBlocks {
    pub c1: Mat,
    pub c2: Mat,
    pub c3: Mat,
    pub c4: Mat,
}

impl CBlocks {
    pub fn new(c1: Mat, c2: Mat, c3: Mat, c4: Mat) -> Result<Self> {
        let r = c1.rows();
        if !c1.is_square() || c2.rows() != r || c3.cols() != r || c4.rows() != c3.rows() || c4.cols() != c2.cols() {
            return dim_err(format!(
                "inconsistent blocks: C1 {:?}, C2 {:?}, C3 {:?}, C4 {:?}",
                c1.shape(),
                c2.shape(),
                c3.shape(),
                c4.shape()
            ));
        }
        Ok(CBlocks { c1, c2, c3, c4 })
    }

    /// Splits an `m x n` matrix after row and column `r`.
    pub fn partition(c: &Mat, r: usize) -> Result<Self> {
        let (m, n) = c.shape();
        if r > m || r > n {
            return dim_err(format!("rank {r} exceeds the {m}x{n} coefficient"));
        }
        CBlocks::new(
            c.block(0, 0, r, r),
            c.block(0, r, r, n - r),
            c.block(r, 0, m - r, r),
            c.block(r, r, m - r, n - r),
        )
    }

    pub fn rank(&self) -> usize {
        self.c1.rows()
    }
}

/// `ε_j = 10^{-j/2}`, `j = 0..=12`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=12).map(|j| 10f64.powf(-(j as f64) / 2.0)).collect()
}

/// `Q(ε) C2'` through the eigendecomposition of `C4'C4`.
pub fn q_times_c2t(blocks: &CBlocks, eps: f64) -> Mat {
    let c2t = blocks.c2.transpose();
    let k = c2t.rows();
    if k == 0 || c2t.cols() == 0 {
        return Mat::zeros(k, c2t.cols());
    }
    let gram = &blocks.c4.transpose() * &blocks.c4;
    let eig = gram
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigensolver did not converge");
    let v = Mat::from_faer(eig.U());
    let lams = eig.S().column_vector();
    let proj = &v.transpose() * &c2t;
    let mut scaled = proj.clone();
    for i in 0..k {
        let lam = lams[i].max(0.0);
        for j in 0..scaled.cols() {
            scaled[(i, j)] = proj[(i, j)] / (eps * eps + lam);
        }
    }
    &v * &scaled
}

/// Outcome of the closed-range test.
#[derive(Clone, Debug, Serialize)]
pub struct RangeVerdict {
    pub r: usize,
    /// Largest sampled mod-norm; `None` when the numeric branch finds the
    /// supremum infinite.
    pub sup_estimate: Option<f64>,
    /// Numeric branch.
    pub bounded: bool,
    /// Algebraic branch, `range(C2') ⊆ range(C4'C4)`.
    pub algebraic_bounded: bool,
    /// Least-squares slope of `ln ‖Q(ε)C2'‖_mod` against `-ln ε` over the
    /// last samples; 2 for the generic unbounded case.
    pub growth_exponent: f64,
    /// `(ε, ‖Q(ε) C2'‖_mod)`.
    pub eps_samples: Vec<(f64, f64)>,
}

impl RangeVerdict {
    /// Both branches agree that the range is closed.
    pub fn range_closed(&self) -> bool {
        self.bounded && self.algebraic_bounded
    }
}

/// Evaluates both branches on a strictly decreasing `eps_grid` of at least
/// four positive values.
pub fn closed_range_criterion(blocks: &CBlocks, eps_grid: &[f64]) -> Result<RangeVerdict> {
    if eps_grid.len() < TAIL {
        return Err(Error::InvalidInput(format!("eps grid needs at least {TAIL} samples")));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "eps grid must be positive and strictly decreasing".into(),
        ));
    }
    let samples: Vec<(f64, f64)> = eps_grid
        .iter()
        .map(|&e| (e, mod_norm(&q_times_c2t(blocks, e))))
        .collect();
    let tail = &samples[samples.len() - TAIL..];
    let flat = tail.windows(2).all(|w| w[1].1 <= (1.0 + TAU_FLAT) * w[0].1);
    let bounded = flat && tail[TAIL - 1].1 < M_CAP;

    let growth_exponent = if tail.iter().all(|(_, s)| *s > 0.0) {
        let pts: Vec<(f64, f64)> = tail.iter().map(|(e, s)| (-e.ln(), s.ln())).collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / TAIL as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / TAIL as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };

    let gram = &blocks.c4.transpose() * &blocks.c4;
    let algebraic_bounded = range_inclusion(&blocks.c2.transpose(), &gram)?;
    let sup = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(RangeVerdict {
        r: blocks.rank(),
        sup_estimate: bounded.then_some(sup),
        bounded,
        algebraic_bounded,
        growth_exponent,
        eps_samples: samples,
    })
}

/// Reduces a constant-coefficient system to `F = diag(E_r, 0)` with
/// `y = R^{-1} x` and rows premultiplied by `L`, then applies
/// [`closed_range_criterion`] to the blocks of `L C R`. Entries of `L C R`
/// below `TAU_REDUCE ‖L‖ ‖C‖ ‖R‖` (mod-norms) are rounding noise and are
/// set to zero.
pub fn closed_range_for_system(sys: &DescriptorSystem, eps_grid: &[f64]) -> Result<(Reduction, CBlocks, RangeVerdict)> {
    if !sys.coef().is_constant() {
        return Err(Error::InvalidInput(
            "the closed-range criterion applies to constant C only".into(),
        ));
    }
    let red = canonical_reduction(sys.f());
    let c = sys.c_at(0);
    let mut reduced = &(&red.left * c) * &red.right;
    let noise = TAU_REDUCE * mod_norm(&red.left) * mod_norm(c) * mod_norm(&red.right);
    for i in 0..reduced.rows() {
        for j in 0..reduced.cols() {
            if reduced[(i, j)].abs() <= noise {
                reduced[(i, j)] = 0.0;
            }
        }
    }
    let blocks = CBlocks::partition(&reduced, red.rank)?;
    let verdict = closed_range_criterion(&blocks, eps_grid)?;
    Ok((red, blocks, verdict))
}
