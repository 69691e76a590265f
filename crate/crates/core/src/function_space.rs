//! Grid surrogate of `L2^n([a, c])`.
//!
//! A [`GridFn`] holds one `dim`-vector per node of a uniform [`Grid`]. Inner
//! products use the trapezoidal rule and derivatives use second-order finite
//! differences (central inside, one-sided at the ends), so both are exact on
//! polynomials of degree at most one and two respectively.
//!
//! Also here: the Cantor-Lebesgue function and Bernstein polynomials, used to
//! show that `x ↦ F dx/dt` is not closed on absolutely continuous functions
//! even though `x ↦ d/dt F x` is.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{dim_err, Error, Result};
use crate::linalg::Mat;

/// Ternary digits used by [`cantor`]; truncation error is below `2^-40`.
pub const CANTOR_DEPTH: usize = 40;

/// Uniform grid `t_i = a + i h`, `h = (c - a) / (n - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    a: f64,
    c: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, c: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && c.is_finite()) || a >= c {
            return Err(Error::InvalidInput(format!("grid needs a < c, got [{a}, {c}]")));
        }
        if n < 3 {
            return Err(Error::InvalidInput(format!("grid needs at least 3 nodes, got {n}")));
        }
        Ok(Grid { a, c, n })
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.c
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.c - self.a) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.c
        } else {
            self.a + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Same interval with a different node count.
    pub fn with_len(&self, n: usize) -> Result<Grid> {
        Grid::new(self.a, self.c, n)
    }
}

/// Vector-valued function sampled on a grid; values are stored node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl GridFn {
    pub fn zeros(grid: Grid, dim: usize) -> Self {
        GridFn {
            grid,
            dim,
            values: vec![0.0; grid.len() * dim],
        }
    }

    pub fn from_values(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("grid function needs dim >= 1".into()));
        }
        if values.len() != grid.len() * dim {
            return dim_err(format!(
                "{} values for {} nodes of dimension {dim}",
                values.len(),
                grid.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid function values must be finite".into()));
        }
        Ok(GridFn { grid, dim, values })
    }

    /// Samples `f(t, out)` at every node.
    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut g = GridFn::zeros(grid, dim);
        for i in 0..grid.len() {
            let t = grid.node(i);
            f(t, g.at_mut(i));
        }
        g
    }

    pub fn from_scalar_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        GridFn::from_fn(grid, 1, |t, out| out[0] = f(t))
    }

    /// Stacks components: `(u_1, ..., u_k)` with dimension `Σ dim(u_j)`.
    pub fn stack(parts: &[&GridFn]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidInput("stack of no parts".into()));
        };
        let grid = first.grid;
        if parts.iter().any(|p| p.grid != grid) {
            return dim_err("stack: parts live on different grids");
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let mut out = GridFn::zeros(grid, dim);
        for i in 0..grid.len() {
            let mut off = 0;
            for p in parts {
                out.at_mut(i)[off..off + p.dim].copy_from_slice(p.at(i));
                off += p.dim;
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn at_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn first(&self) -> &[f64] {
        self.at(0)
    }

    pub fn last(&self) -> &[f64] {
        self.at(self.grid.len() - 1)
    }

    pub fn component(&self, k: usize) -> GridFn {
        assert!(k < self.dim, "component {k} of a {}-dimensional function", self.dim);
        GridFn {
            grid: self.grid,
            dim: 1,
            values: self.values.iter().skip(k).step_by(self.dim).copied().collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Node-wise `M u(t_i)`.
    pub fn apply(&self, m: &Mat) -> Result<GridFn> {
        if m.cols() != self.dim {
            return dim_err(format!(
                "cannot apply a {}x{} matrix to a {}-dimensional function",
                m.rows(),
                m.cols(),
                self.dim
            ));
        }
        let mut out = GridFn::zeros(self.grid, m.rows());
        for i in 0..self.grid.len() {
            let (src, dst) = (self.at(i).to_vec(), out.at_mut(i));
            m.mul_vec_into(&src, dst);
        }
        Ok(out)
    }

    /// Node-wise `M_i u(t_i)` with one matrix per node.
    pub fn apply_nodewise(&self, ms: &[Mat]) -> Result<GridFn> {
        if ms.len() != self.grid.len() {
            return dim_err("apply_nodewise: one matrix per node required");
        }
        let rows = ms.first().map_or(0, Mat::rows);
        if ms.iter().any(|m| m.cols() != self.dim || m.rows() != rows) {
            return dim_err("apply_nodewise: matrix shapes disagree with the function");
        }
        let mut out = GridFn::zeros(self.grid, rows);
        for (i, m) in ms.iter().enumerate() {
            let src = self.at(i).to_vec();
            m.mul_vec_into(&src, out.at_mut(i));
        }
        Ok(out)
    }

    fn check_same(&self, other: &GridFn) -> Result<()> {
        if self.grid != other.grid {
            return dim_err("functions live on different grids");
        }
        if self.dim != other.dim {
            return dim_err(format!("dimensions differ: {} vs {}", self.dim, other.dim));
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &GridFn) -> Result<GridFn> {
        self.check_same(other)?;
        Ok(GridFn {
            grid: self.grid,
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn> {
        self.axpy(1.0, other)
    }

    pub fn scale(&self, s: f64) -> GridFn {
        GridFn {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Running trapezoidal integral `∫_a^{t_i} u`.
    pub fn cumulative_integral(&self) -> GridFn {
        let h = self.grid.step();
        let mut out = GridFn::zeros(self.grid, self.dim);
        for i in 1..self.grid.len() {
            for k in 0..self.dim {
                let prev = out.values[(i - 1) * self.dim + k];
                let inc = 0.5 * h * (self.values[(i - 1) * self.dim + k] + self.values[i * self.dim + k]);
                out.values[i * self.dim + k] = prev + inc;
            }
        }
        out
    }

    /// Every other node; the last node is dropped when `len` is even.
    pub fn coarsen(&self) -> Result<GridFn> {
        let n = self.grid.len();
        let keep = n.div_ceil(2);
        let last = 2 * (keep - 1);
        let grid = Grid::new(self.grid.start(), self.grid.node(last), keep)?;
        let mut out = GridFn::zeros(grid, self.dim);
        for j in 0..keep {
            out.at_mut(j).copy_from_slice(self.at(2 * j));
        }
        Ok(out)
    }

    /// Piecewise-linear resampling onto another grid inside the same interval.
    pub fn resample(&self, grid: &Grid) -> Result<GridFn> {
        if *grid == self.grid {
            return Ok(self.clone());
        }
        let (a, c) = (self.grid.start(), self.grid.end());
        let tol = 1e-12 * (c - a);
        if grid.start() < a - tol || grid.end() > c + tol {
            return Err(Error::Domain("resample target leaves the source interval".into()));
        }
        let h = self.grid.step();
        let last = self.grid.len() - 1;
        Ok(GridFn::from_fn(*grid, self.dim, |t, out| {
            let s = ((t - a) / h).clamp(0.0, last as f64);
            let i = (s.floor() as usize).min(last - 1);
            let w = s - i as f64;
            for (k, o) in out.iter_mut().enumerate() {
                *o = (1.0 - w) * self.values[i * self.dim + k] + w * self.values[(i + 1) * self.dim + k];
            }
        }))
    }

    /// CSV with header `t,v1,...,vdim`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|k| format!("v{k}")));
        wtr.write_record(&header)?;
        for i in 0..self.grid.len() {
            let mut rec = vec![self.grid.node(i).to_string()];
            rec.extend(self.at(i).iter().map(f64::to_string));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads the format written by [`GridFn::write_csv`]; nodes must be uniform.
    pub fn read_csv<R: Read>(r: R) -> Result<GridFn> {
        let mut rdr = csv::Reader::from_reader(r);
        let dim = rdr.headers()?.len().saturating_sub(1);
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad number {s:?}: {e}")))
            };
            ts.push(parse(&rec[0])?);
            for k in 1..=dim {
                values.push(parse(&rec[k])?);
            }
        }
        if ts.len() < 3 {
            return Err(Error::InvalidInput("CSV needs at least 3 rows".into()));
        }
        let grid = Grid::new(ts[0], ts[ts.len() - 1], ts.len())?;
        let tol = 1e-9 * (grid.end() - grid.start());
        if ts.iter().enumerate().any(|(i, t)| (t - grid.node(i)).abs() > tol) {
            return Err(Error::InvalidInput("CSV nodes are not uniformly spaced".into()));
        }
        GridFn::from_values(grid, dim, values)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<GridFn> {
        GridFn::read_csv(std::fs::File::open(path)?)
    }
}

/// Trapezoidal `∫_a^c (u(t), v(t)) dt`.
pub fn l2_inner(u: &GridFn, v: &GridFn) -> Result<f64> {
    u.check_same(v)?;
    let n = u.grid.len();
    let node = |i: usize| -> f64 { u.at(i).iter().zip(v.at(i)).map(|(a, b)| a * b).sum() };
    let interior: f64 = (1..n - 1).map(node).sum();
    Ok(u.grid.step() * (interior + 0.5 * (node(0) + node(n - 1))))
}

pub fn l2_norm(u: &GridFn) -> f64 {
    l2_inner(u, u).expect("a function matches itself").max(0.0).sqrt()
}

/// Second-order finite-difference derivative of every component.
pub fn diff(u: &GridFn) -> GridFn {
    let n = u.grid.len();
    let d = u.dim;
    let inv2h = 0.5 / u.grid.step();
    let v = &u.values;
    let mut out = GridFn::zeros(u.grid, d);
    for k in 0..d {
        let at = |i: usize| v[i * d + k];
        out.values[k] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
        for i in 1..n - 1 {
            out.values[i * d + k] = (at(i + 1) - at(i - 1)) * inv2h;
        }
        out.values[(n - 1) * d + k] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
    }
    out
}

/// Cantor-Lebesgue function on `[0, 1]`.
///
/// The ternary digits of `t` are extracted exactly from its binary
/// representation (fixed point with 64 fractional bits), digits `0, 2` map
/// to binary `0, 1`, and the expansion stops at the first digit `1`.
pub fn cantor(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("cantor is defined on [0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    const ONE: u128 = 1 << 64;
    // exact for t >= 2^-11; smaller inputs lose bits far below 3^-40
    let mut frac = (t * (ONE as f64)) as u128;
    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..CANTOR_DEPTH {
        frac *= 3;
        let digit = frac >> 64;
        frac &= ONE - 1;
        match digit {
            0 => {}
            1 => return Ok(value + weight),
            _ => value += weight,
        }
        weight *= 0.5;
    }
    Ok(value)
}

/// Bernstein polynomial `B_n(f)(t) = Σ f(i/n) C(n,i) t^i (1-t)^(n-i)` sampled
/// on `grid`, evaluated by de Casteljau's recurrence.
pub fn bernstein(f: impl Fn(f64) -> f64, n: usize, grid: &Grid) -> Result<GridFn> {
    if n == 0 {
        return Err(Error::InvalidInput("Bernstein degree must be >= 1".into()));
    }
    if grid.start() < 0.0 || grid.end() > 1.0 {
        return Err(Error::Domain(format!(
            "Bernstein polynomials live on [0, 1], grid is [{}, {}]",
            grid.start(),
            grid.end()
        )));
    }
    let coeffs: Vec<f64> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
    let mut work = vec![0.0; n + 1];
    Ok(GridFn::from_fn(*grid, 1, |t, out| {
        work.copy_from_slice(&coeffs);
        for r in 1..=n {
            for i in 0..=n - r {
                work[i] = (1.0 - t) * work[i] + t * work[i + 1];
            }
        }
        out[0] = work[0];
    }))
}
