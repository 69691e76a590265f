//! Riccati decoupling and closed-form evaluators for the system
//! `F = diag(1, 0)`, `C = [[1, -1], [1, 0]]`.
//!
//! Eliminating `x2 = -z1/eps^2` and `z2 = -x1 - f2` from the regularized
//! problem leaves the two-point problem
//!
//! ```text
//!     x1' =  x1 + (1 + eps^-2) z1 + f1,     x1(t0) - z1(t0) = f1^0
//!     z1' = -z1 + (1 + eps^2)  x1 + f2,     z1(T) = 0
//! ```
//!
//! The substitution `x1 = k z1 + phi` decouples it when `k` solves
//! `k' = U(k) = 2k + (1 + eps^-2) - (1 + eps^2) k^2`, `k(t0) = 1`.
//! With `q = exp(∫ (1 + eps^2) k)` the remaining pieces `phi` and `z1` are
//! explicit integrals.

use crate::error::{dim_err, Error, Result};
use crate::function_space::{Grid, GridFn};

/// Upper end of the `eps` range `(0, EPS0)` on which `k- < k < k+` and
/// `k' > 0` are asserted.
pub const EPS0: f64 = 1.0;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("eps must be positive, got {eps}")))
    }
}

/// `sqrt(eps^2 + 3 eps^4 + eps^6)`.
fn root(eps: f64) -> f64 {
    let e2 = eps * eps;
    (e2 + 3.0 * e2 * e2 + e2 * e2 * e2).sqrt()
}

/// Roots `(k-, k+)` of `U`, i.e. `(eps^2 ∓ root) / (eps^2 + eps^4)`.
pub fn riccati_bounds(eps: f64) -> (f64, f64) {
    let e2 = eps * eps;
    let s = root(eps);
    let den = e2 + e2 * e2;
    ((e2 - s) / den, (e2 + s) / den)
}

/// `U(k) = 2k + (1 + eps^-2) - (1 + eps^2) k^2`.
pub fn riccati_rhs(eps: f64, k: f64) -> f64 {
    let e2 = eps * eps;
    2.0 * k + (1.0 + 1.0 / e2) - (1.0 + e2) * k * k
}

/// `k(·, eps)` on `grid` with `k(t0) = 1`, by classical RK4.
pub fn riccati_sweep(eps: f64, grid: &Grid) -> Result<GridFn> {
    riccati_sweep_from(eps, grid, 1.0)
}

/// RK4 for `k' = U(k)` from an arbitrary initial value.
///
/// The iteration runs on `w = k+ - k` with `U` in its factored form
/// `(1 + eps^2)(k - k-)(k+ - k)`; RK4 commutes with this affine change of
/// variables, and the equilibrium `k+` is then reproduced exactly.
pub fn riccati_sweep_from(eps: f64, grid: &Grid, k0: f64) -> Result<GridFn> {
    check_eps(eps)?;
    let (km, kp) = riccati_bounds(eps);
    let b = 1.0 + eps * eps;
    let gap = kp - km;
    let dw = |w: f64| -b * (gap - w) * w;
    let h = grid.step();
    let mut w = kp - k0;
    let mut out = GridFn::zeros(*grid, 1);
    out.at_mut(0)[0] = k0;
    for i in 1..grid.len() {
        let s1 = dw(w);
        let s2 = dw(w + 0.5 * h * s1);
        let s3 = dw(w + 0.5 * h * s2);
        let s4 = dw(w + h * s3);
        w += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        let k = kp - w;
        if !(k >= km - 1.0 && k <= kp + 1.0) {
            return Err(Error::SolveFailure {
                message: format!(
                    "Riccati step {i} left [k- - 1, k+ + 1] (k = {k:.6e}); refine the grid below h = {h:.3e}"
                ),
                residual: f64::INFINITY,
                condition: f64::INFINITY,
            });
        }
        out.at_mut(i)[0] = k;
    }
    Ok(out)
}

/// Closed form of `q(·, eps)` with `q(t0) = 1`, `q'(t0) = 1 + eps^2`:
/// `q = A e^{λ+ τ} + B e^{λ- τ}`, `τ = t - t0`, `λ± = (eps^2 ± root)/eps^2`,
/// `A = (root + eps^4)/(2 root)`, `B = (root - eps^4)/(2 root)`.
#[derive(Clone, Copy, Debug)]
pub struct QClosedForm {
    lam_plus: f64,
    lam_minus: f64,
    a: f64,
    b: f64,
}

impl QClosedForm {
    pub fn new(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let e2 = eps * eps;
        let e4 = e2 * e2;
        let s = root(eps);
        Ok(QClosedForm {
            lam_plus: (e2 + s) / e2,
            lam_minus: (e2 - s) / e2,
            a: (s + e4) / (2.0 * s),
            b: (s - e4) / (2.0 * s),
        })
    }

    /// `ln q(t0 + tau)`, evaluated without forming `e^{λ+ τ}`.
    pub fn log_q(&self, tau: f64) -> Result<f64> {
        let decay = ((self.lam_minus - self.lam_plus) * tau).exp();
        let v = self.lam_plus * tau + (self.a + self.b * decay).ln();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!("ln q overflows at tau = {tau}")))
        }
    }

    /// `q'(t0 + tau) / q(t0 + tau)`.
    pub fn log_derivative(&self, tau: f64) -> f64 {
        let decay = ((self.lam_minus - self.lam_plus) * tau).exp();
        (self.a * self.lam_plus + self.b * self.lam_minus * decay) / (self.a + self.b * decay)
    }
}

/// `ln ‖q(·, eps)‖₂` on `grid` (trapezoidal rule, log-sum-exp).
pub fn log_l2_norm_q(eps: f64, grid: &Grid) -> Result<f64> {
    let q = QClosedForm::new(eps)?;
    let t0 = grid.start();
    let h = grid.step();
    let n = grid.len();
    let mut terms = Vec::with_capacity(n);
    for (i, t) in grid.nodes().enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 * h } else { h };
        terms.push(2.0 * q.log_q(t - t0)? + w.ln());
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|v| (v - top).exp()).sum();
    Ok(0.5 * (top + sum.ln()))
}

/// Closed-form solution pieces on a grid.
#[derive(Clone, Debug)]
pub struct Example1ClosedForm {
    pub x1: GridFn,
    pub x2: GridFn,
    /// `z1(·, eps)`.
    pub z: GridFn,
    pub k: GridFn,
    pub phi: GridFn,
    pub log_q: GridFn,
}

/// Evaluates `x1 = k z + phi`, `x2 = -z / eps^2` from the integral formulas
///
/// ```text
///     phi(t) = e^{t-t0}/q(t) { f1^0 + ∫_{t0}^t q e^{-(τ-t0)} f1 - q' e^{-(τ-t0)} f2 / (1+eps^2) dτ }
///     z(t)   = -q(t)/e^t ∫_t^T e^s/q(s) (f2(s) + (1+eps^2) phi(s)) ds
/// ```
///
/// The running integrals are carried as ratios `q(τ)/q(t)` so nothing
/// overflows when `q` grows like `e^{(t-t0)/eps}`. `k` comes from
/// [`riccati_sweep`] on the same grid.
pub fn example1_closed_form(eps: f64, grid: &Grid, f1: &GridFn, f2: &GridFn, f01: f64) -> Result<Example1ClosedForm> {
    check_eps(eps)?;
    for f in [f1, f2] {
        if f.grid() != grid || f.dim() != 1 {
            return dim_err("f1 and f2 must be scalar functions on the evaluation grid");
        }
    }
    let q = QClosedForm::new(eps)?;
    let b = 1.0 + eps * eps;
    let t0 = grid.start();
    let n = grid.len();
    let h = grid.step();
    let tau: Vec<f64> = grid.nodes().map(|t| t - t0).collect();
    let logq = tau.iter().map(|&s| q.log_q(s)).collect::<Result<Vec<f64>>>()?;
    let f1v = f1.values();
    let f2v = f2.values();

    // psi(t) = phi(t) e^{-(t-t0)}
    let g: Vec<f64> = (0..n)
        .map(|i| (-tau[i]).exp() * (f1v[i] - q.log_derivative(tau[i]) * f2v[i] / b))
        .collect();
    let mut psi = vec![0.0; n];
    psi[0] = f01;
    for i in 0..n - 1 {
        let rho = (logq[i] - logq[i + 1]).exp();
        psi[i + 1] = rho * psi[i] + 0.5 * h * (rho * g[i] + g[i + 1]);
    }
    let phi: Vec<f64> = (0..n).map(|i| tau[i].exp() * psi[i]).collect();

    let big_g: Vec<f64> = (0..n).map(|i| f2v[i] + b * phi[i]).collect();
    let mut zint = vec![0.0; n];
    for i in (0..n - 1).rev() {
        let sigma = (h + logq[i] - logq[i + 1]).exp();
        zint[i] = sigma * zint[i + 1] + 0.5 * h * (big_g[i] + sigma * big_g[i + 1]);
    }
    let z: Vec<f64> = zint.iter().map(|v| -v).collect();

    let k = riccati_sweep(eps, grid)?;
    let x1: Vec<f64> = (0..n).map(|i| k.values()[i] * z[i] + phi[i]).collect();
    let x2: Vec<f64> = z.iter().map(|v| -v / (eps * eps)).collect();
    Ok(Example1ClosedForm {
        x1: GridFn::from_values(*grid, 1, x1)?,
        x2: GridFn::from_values(*grid, 1, x2)?,
        z: GridFn::from_values(*grid, 1, z)?,
        k,
        phi: GridFn::from_values(*grid, 1, phi)?,
        log_q: GridFn::from_values(*grid, 1, logq)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn factorization_identity() {
        for &eps in &[0.01, 0.1, 0.5, 0.9, 2.0] {
            let (km, kp) = riccati_bounds(eps);
            assert!(riccati_rhs(eps, kp).abs() < 1e-8 * (1.0 + kp * kp));
            for &k in &[-3.0, 0.0, 1.0, 7.5] {
                let factored = (1.0 + eps * eps) * (k - km) * (kp - k);
                assert_abs_diff_eq!(
                    riccati_rhs(eps, k),
                    factored,
                    epsilon = 1e-8 * (1.0 + k * k / (eps * eps))
                );
            }
        }
    }

    #[test]
    fn sweep_initial_value_and_equilibrium() {
        let g = unit(2001);
        let k = riccati_sweep(0.1, &g).unwrap();
        assert_eq!(k.first()[0], 1.0);
        let (_, kp) = riccati_bounds(0.1);
        let eq = riccati_sweep_from(0.1, &g, kp).unwrap();
        assert!(eq.values().iter().all(|v| (v - kp).abs() <= 1e-8));
    }

    #[test]
    fn sweep_matches_log_derivative_of_q() {
        // k = q' / ((1 + eps^2) q)
        let eps = 0.2;
        let g = unit(4001);
        let k = riccati_sweep(eps, &g).unwrap();
        let q = QClosedForm::new(eps).unwrap();
        for (i, t) in g.nodes().enumerate() {
            let exact = q.log_derivative(t) / (1.0 + eps * eps);
            assert_abs_diff_eq!(k.at(i)[0], exact, epsilon = 1e-9 * exact);
        }
    }

    #[test]
    fn sweep_detects_unstable_steps() {
        assert!(riccati_sweep(0.001, &unit(11)).is_err());
        assert!(riccati_sweep(0.0, &unit(11)).is_err());
    }

    #[test]
    fn q_starts_at_one_and_increases() {
        for &eps in &[0.05, 0.3, 0.9] {
            let q = QClosedForm::new(eps).unwrap();
            assert_abs_diff_eq!(q.log_q(0.0).unwrap(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(q.log_derivative(0.0), 1.0 + eps * eps, epsilon = 1e-12);
            let mut prev = 0.0;
            for i in 1..=100 {
                let v = q.log_q(i as f64 / 100.0).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
        assert!(QClosedForm::new(1e-3).unwrap().log_q(1.0).unwrap() > 900.0);
    }

    #[test]
    fn phi_matches_specialized_formula() {
        let eps = 0.3;
        let g = unit(4001);
        let f1 = GridFn::zeros(g, 1);
        let f2 = GridFn::from_scalar_fn(g, |t| -t.exp());
        let cf = example1_closed_form(eps, &g, &f1, &f2, 1.0).unwrap();
        let b = 1.0 + eps * eps;
        for (i, t) in g.nodes().enumerate() {
            let q = cf.log_q.at(i)[0].exp();
            let expected = eps * eps * t.exp() / (b * q) + t.exp() / b;
            // trapezoid recursion, second order in h
            assert_abs_diff_eq!(cf.phi.at(i)[0], expected, epsilon = 5.0 * g.step().powi(2));
        }
    }

    #[test]
    fn z_matches_specialized_formula() {
        // z = -eps^2 q(t) e^{-t} ∫_t^1 e^{2s} / q(s)^2 ds, checked by Simpson on a finer grid
        let eps = 0.3;
        let g = unit(2001);
        let f1 = GridFn::zeros(g, 1);
        let f2 = GridFn::from_scalar_fn(g, |t| -t.exp());
        let cf = example1_closed_form(eps, &g, &f1, &f2, 1.0).unwrap();
        let qf = QClosedForm::new(eps).unwrap();
        for &t in &[0.0, 0.25, 0.5, 0.9] {
            let m = 4000;
            let hs = (1.0 - t) / m as f64;
            let integrand = |s: f64| (2.0 * s - 2.0 * qf.log_q(s).unwrap()).exp();
            let mut acc = integrand(t) + integrand(1.0);
            for j in 1..m {
                acc += if j % 2 == 1 { 4.0 } else { 2.0 } * integrand(t + j as f64 * hs);
            }
            let exact = -eps * eps * qf.log_q(t).unwrap().exp() * (-t).exp() * acc * hs / 3.0;
            let i = (t * 2000.0).round() as usize;
            assert_abs_diff_eq!(cf.z.at(i)[0], exact, epsilon = 5.0 * g.step().powi(2));
        }
        assert_eq!(cf.z.last()[0], 0.0);
    }
}
