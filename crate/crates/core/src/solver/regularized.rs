//! The `eps`-regularized boundary value problem
//!
//! ```text
//!     d/dt F x  =  C x + z + f
//!     d/dt F'z  = -C'z + eps^2 x,          F'z(c) = 0
//!     F x(a) - F'^+ F' z(a) + d = f0,      F'd = 0
//! ```
//!
//! whose solution `x(·, eps)` stays bounded as `eps → 0` exactly when the
//! pseudosolution of `D x = (f, f0)` exists.
//!
//! Discretization: both relations are premultiplied by invertible matrices
//! that split them into `r = rank F` differential rows and purely algebraic
//! rows (`L F R = diag(E_r, 0)`; `L` for the `x`-relation, `R'` for the
//! `z`-relation). Differential rows use the trapezoidal one-step scheme on each
//! interval; algebraic rows are collocated at every node. Averaging an
//! algebraic row over an interval would leave the alternating mode
//! `(-1)^i` undetermined. All unknowns `(d, x_0, z_0, ..., x_{N-1}, z_{N-1})`
//! enter one banded linear system solved by Givens QR.

use crate::error::{dim_err, Error, Result};
use crate::function_space::GridFn;
use crate::linalg::{canonical_reduction, Mat};
use crate::operator::{DescriptorSystem, RhsPair};

use super::banded::BandedLsq;

/// Largest accepted relative residual of the discrete system.
pub const TAU_SOLVE: f64 = 1e-8;
/// Nodes per unit of `(c - a) / eps` when the grid is coupled to `eps`.
pub const NODES_PER_EPS: f64 = 20.0;
/// Upper limit on coupled grid sizes.
pub const N_MAX: usize = 200_000;
/// Condition estimates beyond this are treated as numerically singular.
const COND_LIMIT: f64 = 1e15;

/// One solution `(x(·,eps), z(·,eps), d(eps))` of the regularized problem.
#[derive(Clone, Debug)]
pub struct RegSolution {
    pub eps: f64,
    pub x: GridFn,
    pub z: GridFn,
    pub d: Vec<f64>,
    /// Relative residual of the discrete linear system.
    pub residual: f64,
    /// Lower estimate of the discrete system's condition number.
    pub condition: f64,
}

/// Grid size for a given `eps`: `max(n_user, ceil(NODES_PER_EPS (c-a)/eps))`,
/// capped at `n_max`. The flag reports whether the cap was binding.
pub fn coupled_grid_len(interval: f64, eps: f64, n_user: usize, n_max: usize) -> (usize, bool) {
    let want = (NODES_PER_EPS * interval / eps).ceil();
    let want = if want.is_finite() { want as usize } else { usize::MAX };
    let n = n_user.max(want).max(3);
    if n > n_max {
        (n_max, true)
    } else {
        (n, false)
    }
}

/// Row operators shared by assembly and the discrete adjoint checks.
struct Splitting {
    rank: usize,
    /// `L`, premultiplies the `x`-relation.
    lx: Mat,
    /// `L F` with algebraic rows set to exact zeros.
    lxf: Mat,
    /// `R'`, premultiplies the `z`-relation.
    lz: Mat,
    /// `R' F'` with algebraic rows set to exact zeros.
    lzf: Mat,
}

impl Splitting {
    fn new(f: &Mat) -> Self {
        let red = canonical_reduction(f);
        let lx = red.left;
        let lz = red.right.transpose();
        let mut lxf = &lx * f;
        let mut lzf = &lz * &f.transpose();
        for i in red.rank..lxf.rows() {
            for j in 0..lxf.cols() {
                lxf[(i, j)] = 0.0;
            }
        }
        for i in red.rank..lzf.rows() {
            for j in 0..lzf.cols() {
                lzf[(i, j)] = 0.0;
            }
        }
        Splitting {
            rank: red.rank,
            lx,
            lxf,
            lz,
            lzf,
        }
    }
}

/// Solves the regularized problem on the system's grid.
pub fn solve_regularized(sys: &DescriptorSystem, rhs: &RhsPair, eps: f64) -> Result<RegSolution> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let (m, n) = (sys.m(), sys.n());
    if rhs.f.grid() != sys.grid() || rhs.f.dim() != m || rhs.f0.len() != m {
        return dim_err("right-hand side does not match the system's grid or row count");
    }
    let grid = *sys.grid();
    let nn = grid.len();
    let h = grid.step();
    let e2 = eps * eps;
    let sp = Splitting::new(sys.f());
    let r = sp.rank;
    let s = n + m;
    let ncols = m + nn * s;
    let xcol = |i: usize| m + i * s;
    let zcol = |i: usize| m + i * s + n;

    let mut lsq = BandedLsq::new(ncols, 2 * s);

    let lc: Vec<Mat> = sys.c_nodes().iter().map(|c| &sp.lx * c).collect();
    let lct: Vec<Mat> = sys.c_nodes().iter().map(|c| &sp.lz * &c.transpose()).collect();
    let lf: Vec<Vec<f64>> = (0..nn).map(|i| sp.lx.mul_vec(rhs.f.at(i))).collect();

    // x-relation, differential rows (scaled by h):
    // LF(x_{i+1} - x_i) - h/2 [LC x + L z + L f]_{i,i+1} = 0
    for i in 0..nn - 1 {
        for k in 0..r {
            let mut row = vec![0.0; 2 * s];
            for j in 0..n {
                row[j] = -sp.lxf[(k, j)] - 0.5 * h * lc[i][(k, j)];
                row[s + j] = sp.lxf[(k, j)] - 0.5 * h * lc[i + 1][(k, j)];
            }
            for j in 0..m {
                row[n + j] = -0.5 * h * sp.lx[(k, j)];
                row[s + n + j] = -0.5 * h * sp.lx[(k, j)];
            }
            lsq.push(xcol(i), row, 0.5 * h * (lf[i][k] + lf[i + 1][k]));
        }
    }
    // x-relation, algebraic rows at every node: -(LC x + L z) = L f
    for i in 0..nn {
        for k in r..m {
            let mut row = vec![0.0; s];
            for j in 0..n {
                row[j] = -lc[i][(k, j)];
            }
            for j in 0..m {
                row[n + j] = -sp.lx[(k, j)];
            }
            lsq.push(xcol(i), row, lf[i][k]);
        }
    }
    // z-relation, differential rows:
    // R'F'(z_{i+1} - z_i) + h/2 [R'C'z - eps^2 R'x]_{i,i+1} = 0
    for i in 0..nn - 1 {
        for k in 0..r {
            let mut row = vec![0.0; 2 * s];
            for j in 0..n {
                row[j] = -0.5 * h * e2 * sp.lz[(k, j)];
                row[s + j] = -0.5 * h * e2 * sp.lz[(k, j)];
            }
            for j in 0..m {
                row[n + j] = -sp.lzf[(k, j)] + 0.5 * h * lct[i][(k, j)];
                row[s + n + j] = sp.lzf[(k, j)] + 0.5 * h * lct[i + 1][(k, j)];
            }
            lsq.push(xcol(i), row, 0.0);
        }
    }
    // z-relation, algebraic rows at every node: R'C'z - eps^2 R'x = 0
    for i in 0..nn {
        for k in r..n {
            let mut row = vec![0.0; s];
            for j in 0..n {
                row[j] = -e2 * sp.lz[(k, j)];
            }
            for j in 0..m {
                row[n + j] = lct[i][(k, j)];
            }
            lsq.push(xcol(i), row, 0.0);
        }
    }
    // terminal condition F'z(c) = 0
    for k in 0..r {
        lsq.push(zcol(nn - 1), sp.lzf.row(k).to_vec(), 0.0);
    }
    // F x(a) - P z(a) + d = f0
    let p = sys.projector();
    for k in 0..m {
        let mut row = vec![0.0; m + s];
        row[k] = 1.0;
        for j in 0..n {
            row[m + j] = sys.f()[(k, j)];
        }
        for j in 0..m {
            row[m + n + j] = -p[(k, j)];
        }
        lsq.push(0, row, rhs.f0[k]);
    }
    // F'd = 0
    for k in 0..r {
        lsq.push(0, sp.lzf.row(k).to_vec(), 0.0);
    }
    debug_assert_eq!(lsq.nrows(), ncols);

    let sol = lsq.solve()?;
    if !(sol.relative_residual <= TAU_SOLVE) || !(sol.condition <= COND_LIMIT) {
        return Err(Error::SolveFailure {
            message: format!("regularized system with eps={eps} on {nn} nodes is too ill-conditioned; refine the grid"),
            residual: sol.relative_residual,
            condition: sol.condition,
        });
    }
    let u = &sol.x;
    let d = u[..m].to_vec();
    let x = GridFn::from_values(
        grid,
        n,
        (0..nn).flat_map(|i| u[xcol(i)..xcol(i) + n].to_vec()).collect(),
    )?;
    let z = GridFn::from_values(
        grid,
        m,
        (0..nn).flat_map(|i| u[zcol(i)..zcol(i) + m].to_vec()).collect(),
    )?;
    Ok(RegSolution {
        eps,
        x,
        z,
        d,
        residual: sol.relative_residual,
        condition: sol.condition,
    })
}

/// Per-interval residuals of the unsplit trapezoidal scheme,
/// `F (x_{i+1} - x_i)/h - avg(C x)` and `F'(z_{i+1} - z_i)/h + avg(C'z)`.
///
/// Summation by parts gives
/// `h Σ (rx_i, z̄_i) + h Σ (x̄_i, rz_i) = (F x_N, z_N) - (F x_0, z_0) + O(h^2)`,
/// with `x̄, z̄` interval averages: the scheme is its own discrete adjoint up to
/// the coefficient terms.
pub fn trapezoid_residuals(sys: &DescriptorSystem, x: &GridFn, z: &GridFn) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if x.grid() != sys.grid() || z.grid() != sys.grid() || x.dim() != sys.n() || z.dim() != sys.m() {
        return dim_err("trapezoid_residuals: arguments do not match the system");
    }
    let h = sys.grid().step();
    let f = sys.f();
    let ft = sys.f_transpose();
    let nn = sys.grid().len();
    let mut rx = Vec::with_capacity(nn - 1);
    let mut rz = Vec::with_capacity(nn - 1);
    for i in 0..nn - 1 {
        let dx: Vec<f64> = x.at(i + 1).iter().zip(x.at(i)).map(|(a, b)| (a - b) / h).collect();
        let dz: Vec<f64> = z.at(i + 1).iter().zip(z.at(i)).map(|(a, b)| (a - b) / h).collect();
        let c0 = sys.c_at(i).mul_vec(x.at(i));
        let c1 = sys.c_at(i + 1).mul_vec(x.at(i + 1));
        let ct0 = sys.c_at(i).tr_mul_vec(z.at(i));
        let ct1 = sys.c_at(i + 1).tr_mul_vec(z.at(i + 1));
        rx.push(
            f.mul_vec(&dx)
                .iter()
                .enumerate()
                .map(|(k, v)| v - 0.5 * (c0[k] + c1[k]))
                .collect(),
        );
        rz.push(
            ft.mul_vec(&dz)
                .iter()
                .enumerate()
                .map(|(k, v)| v + 0.5 * (ct0[k] + ct1[k]))
                .collect(),
        );
    }
    Ok((rx, rz))
}
