//! The induced mapping `D x = (d/dt F x - C x, F x(a))`, its adjoint
//! `D'(z, z0) = -d/dt F'z - C'z`, grid surrogates for their domains, and the
//! integration-by-parts identities that tie them together.
//!
//! Membership in `W2^F` (absolute continuity of `F x` with a square-integrable
//! derivative) cannot be decided from samples. [`membership_w2f`] is a screen
//! only: it rejects functions whose discrete derivative is unbounded or whose
//! derivative norm keeps growing as the grid is refined.

use crate::error::{dim_err, Error, Result};
use crate::function_space::{diff, l2_inner, l2_norm, Grid, GridFn};
use crate::linalg::{mod_norm, orth_projector, Mat};

/// Tolerance for terminal and kernel conditions on adjoint elements.
pub const TAU_BC: f64 = 1e-8;

/// Time-dependent coefficient `C(t)`.
#[derive(Clone, Debug)]
pub enum CoefSource {
    Constant(Mat),
    /// `C(t) = Σ_k M_k t^k`.
    Poly(Vec<Mat>),
    /// Values at the nodes of `grid`; other times use linear interpolation.
    Samples {
        grid: Grid,
        values: Vec<Mat>,
    },
}

impl CoefSource {
    pub fn shape(&self) -> Option<(usize, usize)> {
        match self {
            CoefSource::Constant(m) => Some(m.shape()),
            CoefSource::Poly(ms) | CoefSource::Samples { values: ms, .. } => ms.first().map(Mat::shape),
        }
    }

    fn validate(&self) -> Result<(usize, usize)> {
        let shape = self
            .shape()
            .ok_or_else(|| Error::InvalidInput("C(t) has no coefficients".into()))?;
        let all = match self {
            CoefSource::Constant(m) => std::slice::from_ref(m),
            CoefSource::Poly(ms) => ms.as_slice(),
            CoefSource::Samples { grid, values } => {
                if values.len() != grid.len() {
                    return dim_err(format!(
                        "{} samples of C for a grid of {} nodes",
                        values.len(),
                        grid.len()
                    ));
                }
                values.as_slice()
            }
        };
        if all.iter().any(|m| m.shape() != shape) {
            return dim_err("C(t) coefficients have inconsistent shapes");
        }
        Ok(shape)
    }

    /// `C(t)`; polynomial sources use nested multiplication.
    pub fn eval(&self, t: f64) -> Mat {
        match self {
            CoefSource::Constant(m) => m.clone(),
            CoefSource::Poly(ms) => {
                let mut acc = ms.last().expect("validated").clone();
                for m in ms.iter().rev().skip(1) {
                    acc = &acc.scale(t) + m;
                }
                acc
            }
            CoefSource::Samples { grid, values } => {
                let h = grid.step();
                let last = grid.len() - 1;
                let s = ((t - grid.start()) / h).clamp(0.0, last as f64);
                let i = (s.round() as usize).min(last);
                if (s - i as f64).abs() < 1e-9 {
                    return values[i].clone();
                }
                let i = (s.floor() as usize).min(last - 1);
                let w = s - i as f64;
                &values[i].scale(1.0 - w) + &values[i + 1].scale(w)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            CoefSource::Constant(_) => true,
            CoefSource::Poly(ms) => ms.iter().skip(1).all(|m| m.max_abs() == 0.0),
            CoefSource::Samples { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

/// `(F, C(·), [a, c])` together with the grid used to discretize it.
#[derive(Clone, Debug)]
pub struct DescriptorSystem {
    f: Mat,
    f_t: Mat,
    proj: Mat,
    c: CoefSource,
    grid: Grid,
    c_nodes: Vec<Mat>,
}

impl DescriptorSystem {
    pub fn new(f: Mat, c: CoefSource, grid: Grid) -> Result<Self> {
        let shape = c.validate()?;
        if shape != f.shape() {
            return dim_err(format!("F is {:?} but C(t) is {:?}", f.shape(), shape));
        }
        if f.rows() == 0 || f.cols() == 0 {
            return Err(Error::InvalidInput("F must have positive dimensions".into()));
        }
        let c_nodes: Vec<Mat> = grid.nodes().map(|t| c.eval(t)).collect();
        if c_nodes.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidInput("C(t) is not finite on the grid".into()));
        }
        let f_t = f.transpose();
        let proj = orth_projector(&f_t);
        Ok(DescriptorSystem {
            f,
            f_t,
            proj,
            c,
            grid,
            c_nodes,
        })
    }

    pub fn constant(f: Mat, c: Mat, grid: Grid) -> Result<Self> {
        DescriptorSystem::new(f, CoefSource::Constant(c), grid)
    }

    /// Same system on a grid with `n` nodes.
    pub fn regrid(&self, n: usize) -> Result<Self> {
        if n == self.grid.len() {
            return Ok(self.clone());
        }
        DescriptorSystem::new(self.f.clone(), self.c.clone(), self.grid.with_len(n)?)
    }

    /// Row count of `F` (equations).
    pub fn m(&self) -> usize {
        self.f.rows()
    }

    /// Column count of `F` (unknowns).
    pub fn n(&self) -> usize {
        self.f.cols()
    }

    pub fn f(&self) -> &Mat {
        &self.f
    }

    pub fn f_transpose(&self) -> &Mat {
        &self.f_t
    }

    /// `F'^+ F'`, the orthogonal projector onto `range(F)`.
    pub fn projector(&self) -> &Mat {
        &self.proj
    }

    pub fn coef(&self) -> &CoefSource {
        &self.c
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `C(t_i)`.
    pub fn c_at(&self, i: usize) -> &Mat {
        &self.c_nodes[i]
    }

    pub fn c_nodes(&self) -> &[Mat] {
        &self.c_nodes
    }

    fn check_state(&self, x: &GridFn) -> Result<()> {
        if *x.grid() != self.grid {
            return dim_err("state lives on a different grid than the system");
        }
        if x.dim() != self.n() {
            return dim_err(format!("state has dim {}, system expects {}", x.dim(), self.n()));
        }
        Ok(())
    }

    fn check_dual(&self, z: &GridFn) -> Result<()> {
        if *z.grid() != self.grid {
            return dim_err("adjoint variable lives on a different grid than the system");
        }
        if z.dim() != self.m() {
            return dim_err(format!(
                "adjoint variable has dim {}, system expects {}",
                z.dim(),
                self.m()
            ));
        }
        Ok(())
    }
}

/// Right-hand side `(f, f0)` of `D x = (f, f0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsPair {
    pub f: GridFn,
    pub f0: Vec<f64>,
}

impl RhsPair {
    pub fn new(f: GridFn, f0: Vec<f64>) -> Result<Self> {
        if f.dim() != f0.len() {
            return dim_err(format!("f has dim {} but f0 has length {}", f.dim(), f0.len()));
        }
        if !f.is_finite() || f0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("right-hand side must be finite".into()));
        }
        Ok(RhsPair { f, f0 })
    }

    pub fn zero(grid: Grid, m: usize) -> Self {
        RhsPair {
            f: GridFn::zeros(grid, m),
            f0: vec![0.0; m],
        }
    }

    fn check(&self, sys: &DescriptorSystem) -> Result<()> {
        sys.check_dual(&self.f)?;
        if self.f0.len() != sys.m() {
            return dim_err("f0 length differs from the row count of F");
        }
        Ok(())
    }
}

/// Element `(z, z0)` of the adjoint's domain.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointElement {
    pub z: GridFn,
    pub z0: Vec<f64>,
}

impl AdjointElement {
    pub fn new(z: GridFn, z0: Vec<f64>) -> Result<Self> {
        if z.dim() != z0.len() {
            return dim_err(format!("z has dim {} but z0 has length {}", z.dim(), z0.len()));
        }
        if !z.is_finite() || z0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("adjoint element must be finite".into()));
        }
        Ok(AdjointElement { z, z0 })
    }

    /// `(z, P z(a) + d)` for a kernel vector `d` of `F'`.
    pub fn with_kernel_part(sys: &DescriptorSystem, z: GridFn, d: &[f64]) -> Result<Self> {
        sys.check_dual(&z)?;
        let pz = sys.projector().mul_vec(z.first());
        let z0 = pz.iter().zip(d).map(|(a, b)| a + b).collect();
        AdjointElement::new(z, z0)
    }
}

/// Thresholds of the `W2^F` screen.
#[derive(Clone, Copy, Debug)]
pub struct MembershipConfig {
    /// Upper bound on `‖d/dt F x‖₂` per component.
    pub derivative_bound: f64,
    /// Largest tolerated ratio of derivative norms between the grid and its
    /// 2x coarsening; a jump produces about `√2`.
    pub growth_limit: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        MembershipConfig {
            derivative_bound: 1e6,
            growth_limit: 1.25,
        }
    }
}

/// Outcome of the `W2^F` screen with per-component diagnostics.
#[derive(Clone, Debug)]
pub struct Membership {
    pub member: bool,
    pub derivative_norms: Vec<f64>,
    pub total_variation: Vec<f64>,
    /// `‖·‖` on the grid over `‖·‖` on the coarsened grid; 1 when not measurable.
    pub refinement_growth: Vec<f64>,
}

pub fn membership_w2f(f: &Mat, x: &GridFn) -> Membership {
    membership_w2f_with(f, x, &MembershipConfig::default())
}

pub fn membership_w2f_with(f: &Mat, x: &GridFn, cfg: &MembershipConfig) -> Membership {
    let reject = |k: usize| Membership {
        member: false,
        derivative_norms: vec![f64::INFINITY; k],
        total_variation: vec![f64::INFINITY; k],
        refinement_growth: vec![f64::INFINITY; k],
    };
    let Ok(fx) = x.apply(f) else {
        return reject(f.rows());
    };
    if !fx.is_finite() {
        return reject(f.rows());
    }
    let g = diff(&fx);
    let m = f.rows();
    let coarse = if x.grid().len() >= 7 {
        fx.coarsen().ok().map(|c| diff(&c))
    } else {
        None
    };
    let scale = 1.0 + fx.sup_norm();
    let mut out = Membership {
        member: true,
        derivative_norms: Vec::with_capacity(m),
        total_variation: Vec::with_capacity(m),
        refinement_growth: Vec::with_capacity(m),
    };
    for k in 0..m {
        let gk = g.component(k);
        let norm = l2_norm(&gk);
        let tv: f64 = gk.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        let growth = match &coarse {
            Some(c) => {
                let cn = l2_norm(&c.component(k));
                if cn > 1e-10 * scale {
                    norm / cn
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        if !norm.is_finite() || !tv.is_finite() || norm > cfg.derivative_bound || growth > cfg.growth_limit {
            out.member = false;
        }
        out.derivative_norms.push(norm);
        out.total_variation.push(tv);
        out.refinement_growth.push(growth);
    }
    out
}

/// Outcome of the adjoint-domain check.
#[derive(Clone, Debug)]
pub struct AdjointMembership {
    pub member: bool,
    pub w2f: Membership,
    /// `‖F' z(c)‖_∞`.
    pub terminal_defect: f64,
    /// `‖F' d‖_∞` with `d = z0 - P z(a)`.
    pub kernel_defect: f64,
    pub d: Vec<f64>,
}

/// Checks `z ∈ W2^{F'}`, `F' z(c) = 0` and `F' d = 0` for `d = z0 - P z(a)`.
pub fn membership_adjoint(sys: &DescriptorSystem, el: &AdjointElement) -> Result<AdjointMembership> {
    sys.check_dual(&el.z)?;
    if el.z0.len() != sys.m() {
        return dim_err("z0 length differs from the row count of F");
    }
    let ft = sys.f_transpose();
    let w2f = membership_w2f(ft, &el.z);
    let terminal_defect = ft.mul_vec(el.z.last()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pz = sys.projector().mul_vec(el.z.first());
    let d: Vec<f64> = el.z0.iter().zip(&pz).map(|(a, b)| a - b).collect();
    let kernel_defect = ft.mul_vec(&d).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zscale = el.z.sup_norm().max(el.z0.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let tol = TAU_BC * (1.0 + mod_norm(sys.f()) * zscale);
    Ok(AdjointMembership {
        member: w2f.member && terminal_defect <= tol && kernel_defect <= tol,
        w2f,
        terminal_defect,
        kernel_defect,
        d,
    })
}

/// `D x = (d/dt F x - C x, F x(a))`.
///
/// The `W2^F` screen is not applied here; see [`apply_d_checked`].
pub fn apply_d(sys: &DescriptorSystem, x: &GridFn) -> Result<RhsPair> {
    sys.check_state(x)?;
    let fx = x.apply(sys.f())?;
    let cx = x.apply_nodewise(sys.c_nodes())?;
    let f = diff(&fx).sub(&cx)?;
    Ok(RhsPair {
        f0: fx.first().to_vec(),
        f,
    })
}

/// [`apply_d`] together with the membership screen of `x`.
pub fn apply_d_checked(sys: &DescriptorSystem, x: &GridFn) -> Result<(RhsPair, Membership)> {
    let rhs = apply_d(sys, x)?;
    Ok((rhs, membership_w2f(sys.f(), x)))
}

/// `max_i ‖F x(t_i) - f0 - ∫_a^{t_i} (C x + f)‖_∞`, the defect of `x` in the
/// Volterra form of the initial value problem.
pub fn residual_integral_form(sys: &DescriptorSystem, x: &GridFn, rhs: &RhsPair) -> Result<f64> {
    sys.check_state(x)?;
    rhs.check(sys)?;
    let fx = x.apply(sys.f())?;
    let integrand = x.apply_nodewise(sys.c_nodes())?.add(&rhs.f)?;
    let integral = integrand.cumulative_integral();
    let mut worst = 0.0f64;
    for i in 0..sys.grid().len() {
        for k in 0..sys.m() {
            let r = fx.at(i)[k] - rhs.f0[k] - integral.at(i)[k];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// `D'(z, z0) = -d/dt F' z - C' z`; fails unless `(z, z0)` passes
/// [`membership_adjoint`].
pub fn apply_d_adjoint(sys: &DescriptorSystem, el: &AdjointElement) -> Result<GridFn> {
    let mem = membership_adjoint(sys, el)?;
    if !mem.member {
        return Err(Error::Membership(format!(
            "adjoint element rejected: w2f={}, |F'z(c)|={:.3e}, |F'd|={:.3e}",
            mem.w2f.member, mem.terminal_defect, mem.kernel_defect
        )));
    }
    adjoint_action(sys, &el.z)
}

pub(crate) fn adjoint_action(sys: &DescriptorSystem, z: &GridFn) -> Result<GridFn> {
    let ftz = z.apply(sys.f_transpose())?;
    let ct: Vec<Mat> = sys.c_nodes().iter().map(Mat::transpose).collect();
    let ctz = z.apply_nodewise(&ct)?;
    Ok(diff(&ftz).add(&ctz)?.scale(-1.0))
}

/// `|∫(d/dt Fx, z) + (d/dt F'z, x) - [(Fx, Pz)]_a^c|` with `P = F'^+ F'`.
pub fn ibp_residual(f: &Mat, x: &GridFn, z: &GridFn) -> Result<f64> {
    if x.grid() != z.grid() {
        return dim_err("x and z live on different grids");
    }
    if x.dim() != f.cols() || z.dim() != f.rows() {
        return dim_err(format!(
            "F is {}x{}, x has dim {}, z has dim {}",
            f.rows(),
            f.cols(),
            x.dim(),
            z.dim()
        ));
    }
    let ft = f.transpose();
    let p = orth_projector(&ft);
    let fx = x.apply(f)?;
    let ftz = z.apply(&ft)?;
    let lhs = l2_inner(&diff(&fx), z)? + l2_inner(&diff(&ftz), x)?;
    let bracket = |a: &[f64], b: &[f64]| -> f64 {
        let pb = p.mul_vec(b);
        a.iter().zip(&pb).map(|(u, v)| u * v).sum()
    };
    let rhs = bracket(fx.last(), z.last()) - bracket(fx.first(), z.first());
    Ok((lhs - rhs).abs())
}

/// `|<D x, (z, z0)> - <x, D'(z, z0)>|`, zero in the continuum whenever both
/// arguments lie in their domains.
pub fn adjoint_pairing_residual(sys: &DescriptorSystem, x: &GridFn, el: &AdjointElement) -> Result<f64> {
    let mem = membership_w2f(sys.f(), x);
    if !mem.member {
        return Err(Error::Membership("state rejected by the W2^F screen".into()));
    }
    let dx = apply_d(sys, x)?;
    let dz = apply_d_adjoint(sys, el)?;
    let left = l2_inner(&dx.f, &el.z)? + dx.f0.iter().zip(&el.z0).map(|(a, b)| a * b).sum::<f64>();
    let right = l2_inner(x, &dz)?;
    Ok((left - right).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    fn example1(n: usize) -> DescriptorSystem {
        let f = Mat::diag(&[1.0, 0.0]);
        let c = Mat::from_rows(&[[1.0, -1.0], [1.0, 0.0]]).unwrap();
        DescriptorSystem::constant(f, c, grid(n)).unwrap()
    }

    #[test]
    fn system_validation() {
        let g = grid(5);
        assert!(DescriptorSystem::constant(Mat::identity(2), Mat::identity(3), g).is_err());
        assert!(DescriptorSystem::new(Mat::identity(2), CoefSource::Poly(vec![]), g).is_err());
        let samples = CoefSource::Samples {
            grid: grid(4),
            values: vec![Mat::identity(2); 3],
        };
        assert!(DescriptorSystem::new(Mat::identity(2), samples, g).is_err());
    }

    #[test]
    fn poly_and_sampled_coefficients() {
        let m0 = Mat::identity(1);
        let m1 = Mat::diag(&[2.0]);
        let m2 = Mat::diag(&[-3.0]);
        let c = CoefSource::Poly(vec![m0, m1, m2]);
        assert_abs_diff_eq!(c.eval(0.5)[(0, 0)], 1.0 + 1.0 - 0.75, epsilon = 1e-15);
        assert!(!c.is_constant());
        let g = grid(3);
        let s = CoefSource::Samples {
            grid: g,
            values: vec![Mat::diag(&[0.0]), Mat::diag(&[1.0]), Mat::diag(&[4.0])],
        };
        assert_eq!(s.eval(0.5)[(0, 0)], 1.0);
        assert_abs_diff_eq!(s.eval(0.75)[(0, 0)], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn apply_d_of_zero_is_zero() {
        let sys = example1(11);
        let rhs = apply_d(&sys, &GridFn::zeros(*sys.grid(), 2)).unwrap();
        assert_eq!(rhs.f.sup_norm(), 0.0);
        assert_eq!(rhs.f0, vec![0.0, 0.0]);
    }

    #[test]
    fn apply_d_reads_example_solution_backwards() {
        let sys = example1(2001);
        let x = GridFn::from_fn(*sys.grid(), 2, |t, o| {
            o[0] = t.exp();
            o[1] = 0.0;
        });
        let rhs = apply_d(&sys, &x).unwrap();
        let expected = GridFn::from_fn(*sys.grid(), 2, |t, o| {
            o[0] = 0.0;
            o[1] = -t.exp();
        });
        assert!(rhs.f.sub(&expected).unwrap().sup_norm() < 1e-5);
        assert_eq!(rhs.f0, vec![1.0, 0.0]);
        assert!(residual_integral_form(&sys, &x, &rhs).unwrap() <= 1e-4);
    }

    #[test]
    fn apply_d_identity_system() {
        let sys = DescriptorSystem::constant(Mat::identity(2), Mat::zeros(2, 2), grid(21)).unwrap();
        let x = GridFn::from_fn(*sys.grid(), 2, |t, o| {
            o[0] = t;
            o[1] = t * t;
        });
        let rhs = apply_d(&sys, &x).unwrap();
        for (i, t) in sys.grid().nodes().enumerate() {
            assert_abs_diff_eq!(rhs.f.at(i)[0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rhs.f.at(i)[1], 2.0 * t, epsilon = 1e-11);
        }
        assert_eq!(rhs.f0, vec![0.0, 0.0]);
        assert!(apply_d(&sys, &GridFn::zeros(*sys.grid(), 3)).is_err());
    }

    #[test]
    fn integral_residual_examples() {
        let sys = example1(11);
        let g = *sys.grid();
        let zero = GridFn::zeros(g, 2);
        assert_eq!(residual_integral_form(&sys, &zero, &RhsPair::zero(g, 2)).unwrap(), 0.0);
        let rhs = RhsPair::new(GridFn::zeros(g, 2), vec![1.0, 0.0]).unwrap();
        assert_eq!(residual_integral_form(&sys, &zero, &rhs).unwrap(), 1.0);
    }

    #[test]
    fn w2f_screen() {
        let g = grid(2001);
        let f = Mat::diag(&[1.0, 0.0]);
        let poly = GridFn::from_fn(g, 2, |t, o| {
            o[0] = 1.0 + t - 2.0 * t * t * t;
            o[1] = t * t;
        });
        assert!(membership_w2f(&f, &poly).member);
        let dust = GridFn::from_fn(g, 2, |t, o| {
            o[0] = 0.0;
            o[1] = crate::function_space::cantor(t).unwrap();
        });
        let mem = membership_w2f(&f, &dust);
        assert!(mem.member);
        assert_eq!(mem.derivative_norms, vec![0.0, 0.0]);
        let jump = GridFn::from_fn(g, 2, |t, o| {
            o[0] = if t < 0.3 { 0.0 } else { 1.0 };
            o[1] = 0.0;
        });
        let mem = membership_w2f(&f, &jump);
        assert!(!mem.member, "{mem:?}");
        assert!(mem.refinement_growth[0] > 1.3);
    }

    #[test]
    fn adjoint_domain_examples() {
        let sys = example1(401);
        let g = *sys.grid();
        let zero = AdjointElement::new(GridFn::zeros(g, 2), vec![0.0; 2]).unwrap();
        assert!(membership_adjoint(&sys, &zero).unwrap().member);
        assert_eq!(apply_d_adjoint(&sys, &zero).unwrap().sup_norm(), 0.0);

        // z2 is only required to be square integrable: use a rough sawtooth
        let z = GridFn::from_fn(g, 2, |t, o| {
            o[0] = (1.0 - t) * (3.0 * t).cos();
            o[1] = ((37.0 * t).fract() - 0.5) * 4.0;
        });
        let el = AdjointElement::with_kernel_part(&sys, z, &[0.0, 2.5]).unwrap();
        assert!(membership_adjoint(&sys, &el).unwrap().member);

        let bad = GridFn::from_fn(g, 2, |t, o| {
            o[0] = t;
            o[1] = 0.0;
        });
        let el = AdjointElement::new(bad, vec![0.0; 2]).unwrap();
        let mem = membership_adjoint(&sys, &el).unwrap();
        assert!(!mem.member);
        assert_abs_diff_eq!(mem.terminal_defect, 1.0, epsilon = 1e-15);
        assert!(apply_d_adjoint(&sys, &el).is_err());
    }

    #[test]
    fn adjoint_action_on_example_one() {
        let sys = example1(2001);
        let g = *sys.grid();
        let z = GridFn::from_fn(g, 2, |t, o| {
            o[0] = (1.0 - t) * t.sin();
            o[1] = t.cos();
        });
        let el = AdjointElement::with_kernel_part(&sys, z, &[0.0, 0.0]).unwrap();
        let dz = apply_d_adjoint(&sys, &el).unwrap();
        let expected = GridFn::from_fn(g, 2, |t, o| {
            let z1 = (1.0 - t) * t.sin();
            let dz1 = -t.sin() + (1.0 - t) * t.cos();
            o[0] = -dz1 - z1 - t.cos();
            o[1] = z1;
        });
        assert!(dz.sub(&expected).unwrap().sup_norm() < 1e-5);
    }

    #[test]
    fn ibp_scalar_case_is_exact() {
        let g = grid(11);
        let t = GridFn::from_scalar_fn(g, |t| t);
        assert!(ibp_residual(&Mat::identity(1), &t, &t).unwrap() < 1e-14);
        let zero2 = GridFn::zeros(g, 2);
        assert_eq!(ibp_residual(&Mat::diag(&[1.0, 0.0]), &zero2, &zero2).unwrap(), 0.0);
        assert!(ibp_residual(&Mat::identity(1), &t, &zero2).is_err());
    }

    #[test]
    fn pairing_example_one() {
        let sys = example1(2001);
        let g = *sys.grid();
        let x = GridFn::from_fn(g, 2, |t, o| {
            o[0] = t.exp();
            o[1] = 0.0;
        });
        let z = GridFn::from_fn(g, 2, |t, o| {
            o[0] = (1.0 - t) * t.sin();
            o[1] = t.cos();
        });
        let el = AdjointElement::new(z, vec![0.0, 0.0]).unwrap();
        assert!(adjoint_pairing_residual(&sys, &x, &el).unwrap() <= 1e-4);
        let zero = GridFn::zeros(g, 2);
        assert_eq!(adjoint_pairing_residual(&sys, &zero, &el).unwrap(), 0.0);
    }
}
