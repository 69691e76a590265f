//! Least squares for sparse systems whose rows each touch a short contiguous
//! window of columns. Rows are folded into an upper-triangular band by Givens
//! rotations; the band width of `R` equals the widest row.

use crate::error::{Error, Result};

struct Row {
    start: usize,
    vals: Vec<f64>,
    rhs: f64,
}

pub(crate) struct BandedLsq {
    ncols: usize,
    bw: usize,
    // row j of R holds R[j, j..j+bw]
    r: Vec<f64>,
    qtb: Vec<f64>,
    filled: Vec<bool>,
    rows: Vec<Row>,
    buf: Vec<f64>,
}

pub(crate) struct LsqSolution {
    pub x: Vec<f64>,
    /// `‖A x - b‖ / (‖A‖_F ‖x‖ + ‖b‖)`.
    pub relative_residual: f64,
    /// `max |R_jj| / min |R_jj|`, a cheap lower estimate of `cond(A)`.
    pub condition: f64,
}

impl BandedLsq {
    pub fn new(ncols: usize, bw: usize) -> Self {
        BandedLsq {
            ncols,
            bw,
            r: vec![0.0; ncols * bw],
            qtb: vec![0.0; ncols],
            filled: vec![false; ncols],
            rows: Vec::new(),
            buf: vec![0.0; bw],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `Σ_k vals[k] x[start + k] = rhs`.
    pub fn push(&mut self, start: usize, vals: Vec<f64>, rhs: f64) {
        assert!(vals.len() <= self.bw, "row wider than the band");
        assert!(start + vals.len() <= self.ncols, "row exceeds the column range");
        self.fold(start, &vals, rhs);
        self.rows.push(Row { start, vals, rhs });
    }

    fn fold(&mut self, start: usize, vals: &[f64], rhs: f64) {
        let bw = self.bw;
        let buf = &mut self.buf;
        buf.fill(0.0);
        buf[..vals.len()].copy_from_slice(vals);
        let mut b = rhs;
        let mut j = start;
        while j < self.ncols {
            if buf.iter().all(|v| *v == 0.0) {
                return;
            }
            if buf[0] != 0.0 {
                let rj = &mut self.r[j * bw..(j + 1) * bw];
                if !self.filled[j] {
                    rj.copy_from_slice(buf);
                    self.qtb[j] = b;
                    self.filled[j] = true;
                    return;
                }
                let (a, e) = (rj[0], buf[0]);
                let nrm = a.hypot(e);
                let (c, s) = (a / nrm, e / nrm);
                for (rk, wk) in rj.iter_mut().zip(buf.iter_mut()) {
                    let (p, q) = (*rk, *wk);
                    *rk = c * p + s * q;
                    *wk = -s * p + c * q;
                }
                let (p, q) = (self.qtb[j], b);
                self.qtb[j] = c * p + s * q;
                b = -s * p + c * q;
                buf[0] = 0.0;
            }
            buf.copy_within(1.., 0);
            buf[bw - 1] = 0.0;
            j += 1;
        }
    }

    pub fn solve(&self) -> Result<LsqSolution> {
        let bw = self.bw;
        let n = self.ncols;
        let mut dmax = 0.0f64;
        let mut dmin = f64::INFINITY;
        for j in 0..n {
            let d = if self.filled[j] { self.r[j * bw].abs() } else { 0.0 };
            dmax = dmax.max(d);
            dmin = dmin.min(d);
        }
        if n > 0 && dmin == 0.0 {
            return Err(Error::SolveFailure {
                message: "discrete system is rank deficient".into(),
                residual: f64::INFINITY,
                condition: f64::INFINITY,
            });
        }
        let mut x = vec![0.0; n];
        for j in (0..n).rev() {
            let rj = &self.r[j * bw..(j + 1) * bw];
            let mut s = self.qtb[j];
            for k in 1..bw.min(n - j) {
                s -= rj[k] * x[j + k];
            }
            x[j] = s / rj[0];
        }
        let condition = if n == 0 { 1.0 } else { dmax / dmin };
        Ok(LsqSolution {
            relative_residual: self.relative_residual(&x),
            x,
            condition,
        })
    }

    fn relative_residual(&self, x: &[f64]) -> f64 {
        let (mut res2, mut a2, mut b2) = (0.0, 0.0, 0.0);
        for row in &self.rows {
            let ax: f64 = row
                .vals
                .iter()
                .zip(&x[row.start..row.start + row.vals.len()])
                .map(|(a, v)| a * v)
                .sum();
            res2 += (ax - row.rhs).powi(2);
            a2 += row.vals.iter().map(|v| v * v).sum::<f64>();
            b2 += row.rhs * row.rhs;
        }
        let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let denom = a2.sqrt() * xn + b2.sqrt();
        if denom == 0.0 {
            0.0
        } else {
            res2.sqrt() / denom
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tridiagonal_square_system() {
        // -x_{i-1} + 2 x_i - x_{i+1} = 1 with zero ends, x_i = i (n+1-i) / 2
        let n = 50;
        let mut lsq = BandedLsq::new(n, 3);
        for i in 0..n {
            match i {
                0 => lsq.push(0, vec![2.0, -1.0], 1.0),
                _ if i == n - 1 => lsq.push(i - 1, vec![-1.0, 2.0], 1.0),
                _ => lsq.push(i - 1, vec![-1.0, 2.0, -1.0], 1.0),
            }
        }
        let sol = lsq.solve().unwrap();
        for (i, v) in sol.x.iter().enumerate() {
            let k = (i + 1) as f64;
            assert_abs_diff_eq!(*v, k * (n as f64 + 1.0 - k) / 2.0, epsilon = 1e-9);
        }
        assert!(sol.relative_residual < 1e-14);
    }

    #[test]
    fn overdetermined_consistent_rows_and_duplicates() {
        let mut lsq = BandedLsq::new(2, 2);
        lsq.push(0, vec![1.0, 1.0], 3.0);
        lsq.push(0, vec![1.0, -1.0], -1.0);
        lsq.push(0, vec![2.0, 2.0], 6.0);
        lsq.push(1, vec![0.0], 0.0);
        assert_eq!(lsq.nrows(), 4);
        let sol = lsq.solve().unwrap();
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.x[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn least_squares_fit() {
        // fit y = c for observations 1, 2, 3 -> c = 2, residual sqrt(2)
        let mut lsq = BandedLsq::new(1, 1);
        for y in [1.0, 2.0, 3.0] {
            lsq.push(0, vec![1.0], y);
        }
        let sol = lsq.solve().unwrap();
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-14);
        let expected = 2f64.sqrt() / (3f64.sqrt() * 2.0 + 14f64.sqrt());
        assert_abs_diff_eq!(sol.relative_residual, expected, epsilon = 1e-14);
    }

    #[test]
    fn missing_column_is_rank_deficient() {
        let mut lsq = BandedLsq::new(3, 2);
        lsq.push(0, vec![1.0, 1.0], 1.0);
        lsq.push(0, vec![2.0, 2.0], 2.0);
        lsq.push(2, vec![1.0], 1.0);
        assert!(matches!(lsq.solve(), Err(Error::SolveFailure { .. })));
    }
}
