//! Dense real matrices and the small amount of linear algebra the descriptor
//! toolkit needs: Moore-Penrose pseudoinverse, the entrywise mod-norm,
//! reduction of `F` to `diag(E_r, 0)`, pencil regularity and range inclusion.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{dim_err, Error, Result};

/// Relative singular-value cutoff for rank decisions.
pub const TAU_RANK: f64 = 1e-10;
/// Tolerance for the Penrose conditions and projector identities.
pub const TAU_PINV: f64 = 1e-9;
/// Tolerance for `L F R = diag(E_r, 0)`.
pub const TAU_REDUCE: f64 = 1e-9;
/// Relative zero threshold for pencil determinants.
pub const TAU_PENCIL: f64 = 1e-8;

/// Dense real matrix stored row-major.
///
/// Zero-sized matrices are allowed so that block partitions such as
/// `C2 = C[0..r, r..n]` stay well defined when `r = n`.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `diag(E_r, 0)` of shape `rows x cols`.
    pub fn canonical(rows: usize, cols: usize, rank: usize) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rank.min(rows).min(cols) {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return dim_err(format!("{} entries supplied for a {rows}x{cols} matrix", data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return dim_err(format!("row {i} has {} entries, expected {cols}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Mat::from_vec(rows.len(), cols, data)
    }

    /// Single column from a vector.
    pub fn column(v: &[f64]) -> Self {
        Mat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec: length mismatch");
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub(crate) fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `self' * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_mul_vec: length mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    /// Copy of the block starting at `(r0, c0)` with shape `nr x nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        let mut b = Mat::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                b[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        b
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return dim_err("hstack: row counts differ");
        }
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        Ok(m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of absolute values of all entries.
    pub fn mod_norm(&self) -> f64 {
        mod_norm(self)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<f64> {
        if !self.is_square() {
            return dim_err(format!("det of non-square {}x{} matrix", self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            let piv = a[p * n + k];
            if piv == 0.0 {
                return Ok(0.0);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            det *= piv;
            for i in k + 1..n {
                let l = a[i * n + k] / piv;
                if l != 0.0 {
                    for j in k..n {
                        a[i * n + j] -= l * a[k * n + j];
                    }
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * X = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &Mat) -> Result<Mat> {
        if !self.is_square() || rhs.rows != self.rows {
            return dim_err("solve: need square matrix with matching right-hand side");
        }
        let n = self.rows;
        let k = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap();
            let piv = a[p * n + c];
            if piv.abs() <= f64::EPSILON * scale {
                return Err(Error::SolveFailure {
                    message: "singular matrix in dense solve".into(),
                    residual: f64::INFINITY,
                    condition: f64::INFINITY,
                });
            }
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                for j in 0..k {
                    b.swap(c * k + j, p * k + j);
                }
            }
            for i in c + 1..n {
                let l = a[i * n + c] / piv;
                if l != 0.0 {
                    for j in c..n {
                        a[i * n + j] -= l * a[c * n + j];
                    }
                    for j in 0..k {
                        b[i * k + j] -= l * b[c * k + j];
                    }
                }
            }
        }
        for c in (0..n).rev() {
            for j in 0..k {
                let mut s = b[c * k + j];
                for i in c + 1..n {
                    s -= a[c * n + i] * b[i * k + j];
                }
                b[c * k + j] = s / a[c * n + c];
            }
        }
        Mat::from_vec(n, k, b)
    }

    pub fn inverse(&self) -> Result<Mat> {
        self.solve(&Mat::identity(self.rows))
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, f64>) -> Mat {
        let mut out = Mat::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `‖A‖_mod = Σ |A_ij|`.
pub fn mod_norm(a: &Mat) -> f64 {
    a.data.iter().map(|v| v.abs()).sum()
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Vec::new();
    }
    let mut s = a.to_faer().singular_values().expect("SVD did not converge");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank with cutoff `TAU_RANK * sigma_max`.
pub fn rank(a: &Mat) -> usize {
    let s = singular_values(a);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > TAU_RANK * smax).count()
}

/// Moore-Penrose pseudoinverse via SVD, truncating singular values below
/// `TAU_RANK * sigma_max`.
pub fn pinv(a: &Mat) -> Mat {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || a.max_abs() == 0.0 {
        return Mat::zeros(n, m);
    }
    let svd = a.to_faer().thin_svd().expect("SVD did not converge");
    let (u, v) = (svd.U(), svd.V());
    let sv = svd.S().column_vector();
    let smax = (0..sv.nrows()).fold(0.0f64, |acc, k| acc.max(sv[k]));
    let cutoff = TAU_RANK * smax;
    let mut out = Mat::zeros(n, m);
    for k in 0..sv.nrows() {
        let s = sv[k];
        if s > cutoff {
            // out += v_k u_k' / s
            for i in 0..n {
                let vik = v[(i, k)] / s;
                for j in 0..m {
                    out[(i, j)] += vik * u[(j, k)];
                }
            }
        }
    }
    out
}

/// `pinv(A) * A`, the orthogonal projector onto `range(A')`.
pub fn orth_projector(a: &Mat) -> Mat {
    &pinv(a) * a
}

/// Result of reducing `F` to canonical block form.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Invertible `m x m` left factor.
    pub left: Mat,
    /// Invertible `n x n` right factor.
    pub right: Mat,
    pub rank: usize,
}

impl Reduction {
    /// `‖L F R - diag(E_r, 0)‖_mod` for an arbitrary admissible pair.
    pub fn defect(left: &Mat, f: &Mat, right: &Mat, rank: usize) -> f64 {
        let lfr = &(left * f) * right;
        mod_norm(&(&lfr - &Mat::canonical(f.rows(), f.cols(), rank)))
    }

    /// Checks `‖L F R - diag(E_r,0)‖_mod ≤ TAU_REDUCE·(1+‖F‖_mod)` and that
    /// `L`, `R` are invertible.
    pub fn verify(left: &Mat, f: &Mat, right: &Mat, rank: usize) -> bool {
        if left.shape() != (f.rows(), f.rows()) || right.shape() != (f.cols(), f.cols()) {
            return false;
        }
        let invertible = |m: &Mat| m.rows() == 0 || self::rank(m) == m.rows();
        Reduction::defect(left, f, right, rank) <= TAU_REDUCE * (1.0 + mod_norm(f))
            && invertible(left)
            && invertible(right)
    }
}

/// Finds invertible `L`, `R` with `L F R = diag(E_r, 0)` by elimination with
/// complete pivoting. The pair is one admissible choice among many.
pub fn canonical_reduction(f: &Mat) -> Reduction {
    let (m, n) = f.shape();
    let mut a = f.clone();
    let mut left = Mat::identity(m);
    let mut right = Mat::identity(n);
    let tol = TAU_RANK * f.max_abs() * (m.max(n) as f64);
    let mut r = 0;
    while r < m.min(n) {
        let (mut pi, mut pj, mut best) = (r, r, 0.0);
        for i in r..m {
            for j in r..n {
                if a[(i, j)].abs() > best {
                    best = a[(i, j)].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tol || best == 0.0 {
            break;
        }
        swap_rows(&mut a, r, pi);
        swap_rows(&mut left, r, pi);
        swap_cols(&mut a, r, pj);
        swap_cols(&mut right, r, pj);

        let piv = a[(r, r)];
        scale_row(&mut a, r, 1.0 / piv);
        scale_row(&mut left, r, 1.0 / piv);
        for i in 0..m {
            if i != r {
                let factor = a[(i, r)];
                if factor != 0.0 {
                    axpy_row(&mut a, i, r, -factor);
                    axpy_row(&mut left, i, r, -factor);
                }
            }
        }
        for j in 0..n {
            if j != r {
                let factor = a[(r, j)];
                if factor != 0.0 {
                    axpy_col(&mut a, j, r, -factor);
                    axpy_col(&mut right, j, r, -factor);
                }
            }
        }
        r += 1;
    }
    Reduction { left, right, rank: r }
}

fn swap_rows(a: &mut Mat, i: usize, j: usize) {
    if i != j {
        for c in 0..a.cols {
            a.data.swap(i * a.cols + c, j * a.cols + c);
        }
    }
}

fn swap_cols(a: &mut Mat, i: usize, j: usize) {
    if i != j {
        for r in 0..a.rows {
            a.data.swap(r * a.cols + i, r * a.cols + j);
        }
    }
}

fn scale_row(a: &mut Mat, i: usize, s: f64) {
    for c in 0..a.cols {
        a[(i, c)] *= s;
    }
}

// row_dst += s * row_src
fn axpy_row(a: &mut Mat, dst: usize, src: usize, s: f64) {
    for c in 0..a.cols {
        let v = a[(src, c)];
        a[(dst, c)] += s * v;
    }
}

// col_dst += s * col_src
fn axpy_col(a: &mut Mat, dst: usize, src: usize, s: f64) {
    for r in 0..a.rows {
        let v = a[(r, src)];
        a[(r, dst)] += s * v;
    }
}

/// Whether `λ ↦ det(λF + C)` is not identically zero.
///
/// The determinant is a polynomial of degree at most `n`, so it is sampled at
/// `λ = 1, ..., n+1`; a sample counts as nonzero when it exceeds
/// `TAU_PENCIL` times the Hadamard bound of `λF + C`.
pub fn pencil_regular(f: &Mat, c: &Mat) -> Result<bool> {
    if !f.is_square() || !c.is_square() || f.shape() != c.shape() {
        return dim_err(format!(
            "pencil needs square matrices of equal size, got {:?} and {:?}",
            f.shape(),
            c.shape()
        ));
    }
    let n = f.rows();
    for k in 0..=n {
        let lambda = (k + 1) as f64;
        let p = &f.scale(lambda) + c;
        let hadamard: f64 = (0..n)
            .map(|i| p.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        if hadamard == 0.0 {
            continue;
        }
        if p.det()?.abs() > TAU_PENCIL * hadamard {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether every column of `a` lies in the column space of `b`, i.e.
/// `rank([b | a]) = rank(b)` with the `TAU_RANK` cutoff. Both matrices are
/// normalized to unit Frobenius norm first so the cutoff is scale-free.
pub fn range_inclusion(a: &Mat, b: &Mat) -> Result<bool> {
    if a.rows() != b.rows() {
        return dim_err(format!("range_inclusion: {} rows vs {} rows", a.rows(), b.rows()));
    }
    let na = a.frobenius_norm();
    if na == 0.0 || a.cols() == 0 {
        return Ok(true);
    }
    let nb = b.frobenius_norm();
    if nb == 0.0 || b.cols() == 0 {
        return Ok(false);
    }
    let bn = b.scale(1.0 / nb);
    let joint = bn.hstack(&a.scale(1.0 / na))?;
    let s_joint = singular_values(&joint);
    let cutoff = TAU_RANK * s_joint[0];
    let count = |s: &[f64]| s.iter().filter(|&&v| v > cutoff).count();
    Ok(count(&s_joint) == count(&singular_values(&bn)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    #[test]
    fn mod_norm_examples() {
        assert_eq!(mod_norm(&Mat::zeros(2, 2)), 0.0);
        assert_eq!(mod_norm(&Mat::diag(&[1.0, 0.0])), 1.0);
        assert_eq!(mod_norm(&m(&[&[-2.0, 6.0], &[2.0, -6.0]])), 16.0);
    }

    #[test]
    fn from_rows_rejects_ragged_and_nonfinite() {
        assert!(Mat::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(Mat::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn pinv_of_identity_and_projector() {
        let i3 = Mat::identity(3);
        assert!(mod_norm(&(&pinv(&i3) - &i3)) < 1e-14);
        let p = Mat::diag(&[1.0, 0.0]);
        assert!(mod_norm(&(&pinv(&p) - &p)) < 1e-14);
        assert_eq!(pinv(&Mat::zeros(2, 3)).shape(), (3, 2));
    }

    #[test]
    fn pinv_of_rank_deficient_wide_matrix() {
        // rank-2 4x3 product of random factors; its transpose once produced
        // a non-symmetric projector
        let f = m(&[
            &[-0.23354306476895834, 0.7323997246312146, 0.5903087027177768],
            &[-0.28384227644549676, 0.07423098564182655, -0.4483657623763041],
            &[0.48762366704551474, -0.25274506724688084, 0.5913431852363763],
            &[-0.1292968803023232, 0.5206986840320798, 0.4914442351563888],
        ]);
        for a in [f.clone(), f.transpose()] {
            let p = pinv(&a);
            assert!((&(&(&a * &p) * &a) - &a).max_abs() < 1e-12);
            let pa = &p * &a;
            assert!((&pa - &pa.transpose()).max_abs() < 1e-12);
            assert_eq!(rank(&a), 2);
        }
    }

    #[test]
    fn projector_examples() {
        assert_eq!(orth_projector(&Mat::zeros(2, 2)), Mat::zeros(2, 2));
        let f = Mat::diag(&[1.0, 0.0]);
        assert!(mod_norm(&(&orth_projector(&f.transpose()) - &f)) < 1e-14);
        let ft = m(&[&[-2.0, 6.0], &[2.0, -6.0]]).transpose();
        let p = orth_projector(&ft);
        assert!(mod_norm(&(&(&p * &p) - &p)) < TAU_PINV);
        assert!(mod_norm(&(&p - &p.transpose())) < TAU_PINV);
        assert_eq!(rank(&p), 1);
    }

    #[test]
    fn det_and_solve() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        assert_abs_diff_eq!(a.det().unwrap(), 5.0, epsilon = 1e-14);
        let inv = a.inverse().unwrap();
        assert!(mod_norm(&(&(&a * &inv) - &Mat::identity(2))) < 1e-14);
        assert!(Mat::zeros(2, 2).inverse().is_err());
        assert!(Mat::zeros(2, 3).det().is_err());
    }

    #[test]
    fn reduction_of_canonical_input_is_trivial() {
        let f = Mat::diag(&[1.0, 0.0]);
        let red = canonical_reduction(&f);
        assert_eq!(red.rank, 1);
        assert!(Reduction::verify(&red.left, &f, &red.right, 1));
        assert!(Reduction::verify(&Mat::identity(2), &f, &Mat::identity(2), 1));
    }

    #[test]
    fn reduction_accepts_printed_pair_for_rank_one_example() {
        let f = m(&[&[-2.0, 6.0], &[2.0, -6.0]]);
        let left = m(&[&[-1.0 / 3.0, 1.0 / 6.0], &[1.0 / 3.0, 1.0 / 3.0]]);
        let right = m(&[&[0.0, 0.5], &[-1.0 / 3.0, 1.0 / 6.0]]);
        assert!(Reduction::verify(&left, &f, &right, 1));
        let red = canonical_reduction(&f);
        assert_eq!(red.rank, 1);
        assert!(Reduction::verify(&red.left, &f, &red.right, red.rank));
    }

    #[test]
    fn reduction_of_zero_and_wide_matrices() {
        let z = Mat::zeros(2, 3);
        let red = canonical_reduction(&z);
        assert_eq!(red.rank, 0);
        assert!(Reduction::verify(&red.left, &z, &red.right, 0));
        let w = m(&[&[1.0, 2.0, 3.0]]);
        let red = canonical_reduction(&w);
        assert_eq!(red.rank, 1);
        assert!(Reduction::verify(&red.left, &w, &red.right, 1));
    }

    #[test]
    fn pencil_examples() {
        assert!(pencil_regular(&Mat::identity(3), &Mat::identity(3)).unwrap());
        let f1 = Mat::diag(&[1.0, 0.0]);
        let c0 = m(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(!pencil_regular(&f1, &c0).unwrap());
        let c = m(&[&[1.0, -1.0], &[1.0, 0.0]]);
        assert!(pencil_regular(&f1, &c).unwrap());
        assert!(pencil_regular(&Mat::zeros(2, 3), &Mat::zeros(2, 3)).is_err());
        assert!(pencil_regular(&Mat::identity(2), &Mat::identity(3)).is_err());
    }

    #[test]
    fn range_inclusion_examples() {
        assert!(range_inclusion(&Mat::zeros(2, 1), &Mat::zeros(2, 2)).unwrap());
        assert!(!range_inclusion(&m(&[&[1.0]]), &m(&[&[0.0]])).unwrap());
        let b = m(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(range_inclusion(&m(&[&[3.0], &[0.0]]), &b).unwrap());
        assert!(!range_inclusion(&m(&[&[3.0], &[1.0]]), &b).unwrap());
        assert!(range_inclusion(&Mat::zeros(3, 1), &Mat::zeros(2, 1)).is_err());
    }
}
