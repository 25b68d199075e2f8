//! Periodic uniform grids and spectral operators.
//!
//! A grid samples the period cell `A = L·F` at `n` points per axis. Points
//! sit at `x = A·(i/n)` and all differential operators are diagonal in the
//! discrete Fourier basis with wave vectors `k = 2π A⁻ᵀ m`.
//!
//! Two Laplacians coexist. [`Grid::laplacian`] uses the full symbol `-|k|²`
//! and is the inverse of [`Grid::poisson_periodic`]. [`Grid::div_grad`] is
//! the composition of the real-valued gradient (whose Nyquist modes are
//! dropped) with its adjoint, which makes `∫|∇u|²` and its variation exactly
//! consistent; the solver uses it for the kinetic term.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A periodic cell in `d ≤ 3` dimensions. `matrix[i][j]` is component `i` of
/// the `j`-th cell vector; unused dimensions hold the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CellRepr", into = "CellRepr")]
pub struct Cell {
    pub d: usize,
    pub matrix: [[f64; 3]; 3],
    inverse: [[f64; 3]; 3],
}

#[derive(Serialize, Deserialize)]
struct CellRepr {
    d: usize,
    matrix: [[f64; 3]; 3],
}

impl TryFrom<CellRepr> for Cell {
    type Error = Error;
    fn try_from(r: CellRepr) -> Result<Self> {
        Cell::new(r.d, r.matrix)
    }
}

impl From<Cell> for CellRepr {
    fn from(c: Cell) -> Self {
        CellRepr { d: c.d, matrix: c.matrix }
    }
}

impl Cell {
    pub fn new(d: usize, matrix: [[f64; 3]; 3]) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 1..=3")));
        }
        let mut m = matrix;
        for i in 0..3 {
            for j in 0..3 {
                if i >= d || j >= d {
                    m[i][j] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        let mat = nalgebra::Matrix3::from_fn(|i, j| m[i][j]);
        let det = mat.determinant();
        if !(det.is_finite() && det.abs() > 1e-300) {
            return Err(Error::InvalidGrid("singular cell matrix".into()));
        }
        let inv = mat.try_inverse().ok_or_else(|| Error::InvalidGrid("singular cell matrix".into()))?;
        let mut inverse = [[0.0; 3]; 3];
        for (i, row) in inverse.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = inv[(i, j)];
            }
        }
        Ok(Cell { d, matrix: m, inverse })
    }

    /// Cubic cell of side `side`.
    pub fn cubic(d: usize, side: f64) -> Result<Self> {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = side;
        }
        Cell::new(d, m)
    }

    pub fn volume(&self) -> f64 {
        let mat = nalgebra::Matrix3::from_fn(|i, j| self.matrix[i][j]);
        mat.determinant().abs()
    }

    pub fn to_cartesian(&self, frac: &[f64; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (i, xi) in x.iter_mut().enumerate().take(self.d) {
            *xi = (0..self.d).map(|j| self.matrix[i][j] * frac[j]).sum();
        }
        x
    }

    pub fn to_fractional(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (i, si) in s.iter_mut().enumerate().take(self.d) {
            *si = (0..self.d).map(|j| self.inverse[i][j] * x[j]).sum();
        }
        s
    }

    /// Length of cell vector `j`.
    pub fn edge_length(&self, j: usize) -> f64 {
        (0..self.d).map(|i| self.matrix[i][j].powi(2)).sum::<f64>().sqrt()
    }

    /// Shortest periodic displacement `a - b`.
    pub fn min_image(&self, a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
        let mut diff = [0.0; 3];
        for i in 0..self.d {
            diff[i] = a[i] - b[i];
        }
        let mut s = self.to_fractional(&diff);
        for si in s.iter_mut().take(self.d) {
            *si -= si.round();
        }
        let mut best = self.to_cartesian(&s);
        let mut best_norm = norm2(&best);
        let range: &[i32] = &[-1, 0, 1];
        let shifts = |k: usize| if k < self.d { range } else { &[0][..] };
        for &a0 in shifts(0) {
            for &a1 in shifts(1) {
                for &a2 in shifts(2) {
                    if a0 == 0 && a1 == 0 && a2 == 0 {
                        continue;
                    }
                    let t = [s[0] + a0 as f64, s[1] + a1 as f64, s[2] + a2 as f64];
                    let x = self.to_cartesian(&t);
                    let nrm = norm2(&x);
                    if nrm < best_norm - 1e-15 {
                        best = x;
                        best_norm = nrm;
                    }
                }
            }
        }
        best
    }

    pub fn periodic_distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        norm2(&self.min_image(a, b)).sqrt()
    }
}

pub(crate) fn norm2(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

/// Geometry of a periodic uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub cell: Cell,
    /// Points per axis.
    pub n: usize,
}

impl GridSpec {
    pub fn new(cell: Cell, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n = {n} < 8")));
        }
        Ok(GridSpec { cell, n })
    }

    pub fn d(&self) -> usize {
        self.cell.d
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid spacing along each cell axis.
    pub fn spacing(&self) -> Vec<f64> {
        (0..self.d()).map(|j| self.cell.edge_length(j) / self.n as f64).collect()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().into_iter().fold(0.0, f64::max)
    }

    /// Quadrature weight of a single grid point.
    pub fn cell_volume(&self) -> f64 {
        self.cell.volume() / self.len() as f64
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.d() {
            1 => [idx, 0, 0],
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn flat_index(&self, mi: [usize; 3]) -> usize {
        let n = self.n;
        match self.d() {
            1 => mi[0],
            2 => mi[0] * n + mi[1],
            _ => (mi[0] * n + mi[1]) * n + mi[2],
        }
    }

    pub fn fractional(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let n = self.n as f64;
        let mut s = [0.0; 3];
        for j in 0..self.d() {
            s[j] = mi[j] as f64 / n;
        }
        s
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.cell.to_cartesian(&self.fractional(idx))
    }
}

struct GridInner {
    spec: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Reciprocal matrix `2π A⁻ᵀ`.
    recip: [[f64; 3]; 3],
}

/// A grid with cached FFT plans. Cloning is cheap.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("spec", &self.inner.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(spec.n);
        let inv = planner.plan_fft_inverse(spec.n);
        let mut recip = [[0.0; 3]; 3];
        for (i, row) in recip.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 2.0 * PI * spec.cell.inverse[j][i];
            }
        }
        Grid { inner: Arc::new(GridInner { spec, fwd, inv, recip }) }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.inner.spec
    }

    pub fn cell(&self) -> &Cell {
        &self.inner.spec.cell
    }

    pub fn d(&self) -> usize {
        self.inner.spec.d()
    }

    pub fn n(&self) -> usize {
        self.inner.spec.n
    }

    pub fn len(&self) -> usize {
        self.inner.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.inner.spec.cell.volume()
    }

    pub fn weight(&self) -> f64 {
        self.inner.spec.cell_volume()
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.inner.spec.position(idx)
    }

    pub fn zeros(&self) -> ScalarField {
        ScalarField { grid: self.clone(), values: vec![0.0; self.len()] }
    }

    pub fn constant(&self, c: f64) -> ScalarField {
        ScalarField { grid: self.clone(), values: vec![c; self.len()] }
    }

    pub fn field(&self, values: Vec<f64>) -> Result<ScalarField> {
        ScalarField::new(self.clone(), values)
    }

    /// Samples `f` at every grid point.
    pub fn sample(&self, f: impl Fn(&[f64; 3]) -> f64) -> ScalarField {
        let values = (0..self.len()).map(|i| f(&self.position(i))).collect();
        ScalarField { grid: self.clone(), values }
    }

    fn signed_freq(&self, i: usize) -> (f64, bool) {
        let n = self.n();
        let nyq = n % 2 == 0 && i == n / 2;
        let f = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        (f, nyq)
    }

    /// Calls `f(flat_index, k, touches_nyquist)` for every Fourier mode.
    pub(crate) fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 3], bool)) {
        let d = self.d();
        let n = self.n();
        let r = &self.inner.recip;
        let counts = [n, if d >= 2 { n } else { 1 }, if d >= 3 { n } else { 1 }];
        let mut idx = 0;
        for i0 in 0..counts[0] {
            let (m0, q0) = self.signed_freq(i0);
            for i1 in 0..counts[1] {
                let (m1, q1) = if d >= 2 { self.signed_freq(i1) } else { (0.0, false) };
                for i2 in 0..counts[2] {
                    let (m2, q2) = if d >= 3 { self.signed_freq(i2) } else { (0.0, false) };
                    let m = [m0, m1, m2];
                    let mut k = [0.0; 3];
                    for (a, ka) in k.iter_mut().enumerate().take(d) {
                        *ka = (0..d).map(|b| r[a][b] * m[b]).sum();
                    }
                    f(idx, k, q0 || q1 || q2);
                    idx += 1;
                }
            }
        }
    }

    fn fft_axes(&self, data: &mut [Complex64], inverse: bool) {
        let d = self.d();
        let n = self.n();
        let plan = if inverse { &self.inner.inv } else { &self.inner.fwd };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
            let mut line = 0;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    let dst = &mut lines[line * n..(line + 1) * n];
                    for (k, v) in dst.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    line += 1;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            line = 0;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    let src = &lines[line * n..(line + 1) * n];
                    for (k, v) in src.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                    line += 1;
                }
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_axes(&mut data, false);
        data
    }

    /// Inverse transform including the `1/N` normalization; keeps the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.fft_axes(&mut spectrum, true);
        let scale = 1.0 / self.len() as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    fn apply_symbol(&self, values: &[f64], symbol: impl Fn([f64; 3], bool) -> Complex64) -> Vec<f64> {
        let mut spec = self.forward(values);
        self.for_each_mode(|i, k, nyq| spec[i] *= symbol(k, nyq));
        self.inverse_real(spec)
    }

    fn check(&self, f: &ScalarField) -> Result<()> {
        if f.grid != *self {
            return Err(Error::GridMismatch("field lives on a different grid".into()));
        }
        Ok(())
    }

    /// Spectral Laplacian with the full symbol `-|k|²`.
    pub fn laplacian(&self, f: &ScalarField) -> ScalarField {
        let values = self.apply_symbol(&f.values, |k, _| Complex64::new(-norm2(&k), 0.0));
        ScalarField { grid: self.clone(), values }
    }

    /// Divergence of the real gradient, symbol `-|k|²` off the Nyquist modes.
    pub fn div_grad(&self, f: &ScalarField) -> ScalarField {
        let values = self.div_grad_values(&f.values);
        ScalarField { grid: self.clone(), values }
    }

    pub(crate) fn div_grad_values(&self, values: &[f64]) -> Vec<f64> {
        self.apply_symbol(values, |k, nyq| if nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(-norm2(&k), 0.0) })
    }

    /// `∫|∇f|²` through Parseval, consistent with [`Grid::gradient`].
    pub fn dirichlet_energy(&self, values: &[f64]) -> f64 {
        let spec = self.forward(values);
        let mut acc = 0.0;
        self.for_each_mode(|i, k, nyq| {
            if !nyq {
                acc += norm2(&k) * spec[i].norm_sqr();
            }
        });
        acc * self.volume() / (self.len() as f64).powi(2)
    }

    /// Solves `-Δφ = rhs` for the zero-mean `φ`. The right-hand side must be
    /// neutral: `|mean| ≤ 1e-8·‖rhs‖∞`.
    pub fn poisson_periodic(&self, rhs: &ScalarField) -> Result<ScalarField> {
        self.check(rhs)?;
        let mean = rhs.mean();
        let allowed = 1e-8 * rhs.max_abs();
        if mean.abs() > allowed && mean.abs() > 1e-300 {
            return Err(Error::NotNeutral { mean, allowed });
        }
        Ok(ScalarField { grid: self.clone(), values: self.inverse_laplacian_values(&rhs.values) })
    }

    /// `(-Δ)⁻¹` on the zero-mean part of `values`; the constant mode is dropped.
    pub(crate) fn inverse_laplacian_values(&self, values: &[f64]) -> Vec<f64> {
        self.apply_symbol(values, |k, _| {
            let k2 = norm2(&k);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / k2, 0.0)
            }
        })
    }

    /// Spectral partial derivatives; Nyquist modes are dropped so the result is real.
    pub fn gradient(&self, f: &ScalarField) -> Vec<ScalarField> {
        let spec = self.forward(&f.values);
        (0..self.d())
            .map(|j| {
                let mut s = spec.clone();
                self.for_each_mode(|i, k, nyq| {
                    s[i] *= if nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k[j]) };
                });
                ScalarField { grid: self.clone(), values: self.inverse_real(s) }
            })
            .collect()
    }

    /// Second derivatives `∂_i∂_j f` for `i ≤ j`, in row-major upper-triangular order.
    pub fn hessian(&self, f: &ScalarField) -> Vec<((usize, usize), ScalarField)> {
        let spec = self.forward(&f.values);
        let mut out = Vec::new();
        for a in 0..self.d() {
            for b in a..self.d() {
                let mut s = spec.clone();
                self.for_each_mode(|i, k, nyq| {
                    s[i] *= if nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(-k[a] * k[b], 0.0) };
                });
                out.push(((a, b), ScalarField { grid: self.clone(), values: self.inverse_real(s) }));
            }
        }
        out
    }

    /// Trigonometric interpolation of `f` at an arbitrary point.
    pub fn interpolate(&self, f: &ScalarField, x: &[f64; 3]) -> f64 {
        let spec = self.forward(&f.values);
        self.interpolate_spectrum(&spec, x)
    }

    pub(crate) fn interpolate_spectrum(&self, spec: &[Complex64], x: &[f64; 3]) -> f64 {
        let d = self.d();
        let n = self.n();
        let s = self.cell().to_fractional(x);
        let phases: Vec<Vec<Complex64>> = (0..3)
            .map(|a| {
                if a < d {
                    (0..n)
                        .map(|i| {
                            let (m, _) = self.signed_freq(i);
                            Complex64::from_polar(1.0, 2.0 * PI * m * s[a])
                        })
                        .collect()
                } else {
                    vec![Complex64::new(1.0, 0.0)]
                }
            })
            .collect();
        let c1 = phases[1].len();
        let c2 = phases[2].len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i0, p0) in phases[0].iter().enumerate() {
            for (i1, p1) in phases[1].iter().enumerate() {
                let mut inner = Complex64::new(0.0, 0.0);
                let base = (i0 * c1 + i1) * c2;
                for (i2, p2) in phases[2].iter().enumerate() {
                    inner += spec[base + i2] * p2;
                }
                acc += inner * p0 * p1;
            }
        }
        acc.re / self.len() as f64
    }

    /// Applies a real Fourier multiplier `symbol(k)`.
    pub(crate) fn multiplier(&self, values: &[f64], symbol: impl Fn(f64) -> f64) -> Vec<f64> {
        self.apply_symbol(values, |k, _| Complex64::new(symbol(norm2(&k)), 0.0))
    }

    /// Periodic shell profile of `f` about `center`: for annuli
    /// `[j·width, (j+1)·width)` of periodic distance returns the quadrature
    /// L² norm and the maximum of `|f|`.
    pub fn shell_profile(&self, f: &ScalarField, center: &[f64; 3], width: f64) -> Result<Vec<Shell>> {
        self.check(f)?;
        if !(width >= self.inner.spec.max_spacing() * (1.0 - 1e-12)) {
            return Err(Error::InvalidGrid(format!("shell width {width} below grid spacing")));
        }
        let w = self.weight();
        let mut shells: Vec<Shell> = Vec::new();
        for (i, &v) in f.values.iter().enumerate() {
            let r = self.cell().periodic_distance(&self.position(i), center);
            let j = (r / width + 1e-12).floor() as usize;
            if shells.len() <= j {
                shells.resize_with(j + 1, Shell::default);
            }
            let s = &mut shells[j];
            s.l2 += v * v * w;
            s.max = s.max.max(v.abs());
            s.points += 1;
        }
        for (j, s) in shells.iter_mut().enumerate() {
            s.inner_radius = j as f64 * width;
            s.width = width;
            s.l2 = s.l2.sqrt();
        }
        Ok(shells)
    }
}

/// One annulus of a [`Grid::shell_profile`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub inner_radius: f64,
    pub width: f64,
    pub l2: f64,
    pub max: f64,
    pub points: usize,
}

impl Shell {
    pub fn mid_radius(&self) -> f64 {
        self.inner_radius + 0.5 * self.width
    }
}

/// Real scalar field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite field value".into()));
        }
        Ok(ScalarField { grid, values })
    }

    /// Volume-weighted sum over the cell.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.weight()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Quadrature L² norm.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.weight()).sqrt()
    }

    /// Quadrature L² inner product.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        dot(&self.values, &other.values) * self.grid.weight()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        ScalarField { grid: self.grid.clone(), values }
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |a, b| a - b)
    }

    /// Cyclic shift by whole grid steps along each axis.
    pub fn shifted(&self, steps: [usize; 3]) -> ScalarField {
        let spec = self.grid.spec();
        let n = spec.n;
        let mut values = vec![0.0; self.values.len()];
        for (i, &v) in self.values.iter().enumerate() {
            let mut mi = spec.multi_index(i);
            for (a, m) in mi.iter_mut().enumerate().take(spec.d()) {
                *m = (*m + steps[a]) % n;
            }
            values[spec.flat_index(mi)] = v;
        }
        ScalarField { grid: self.grid.clone(), values }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Radial profile `η̃_ρ(r)`: zero on `[0, ρ]`, rising smoothly to one at `2ρ`.
pub fn eta_tilde(rho: f64, r: f64) -> f64 {
    if r <= rho {
        0.0
    } else if r <= 1.5 * rho {
        // exp(−ρ ln2 / (2(r − ρ))) in base 2, with ρ/2 taken as the rounded
        // half-width so the value at the breakpoint is exactly ½
        (-(1.5 * rho - rho) / (r - rho)).exp2()
    } else if r < 2.0 * rho {
        1.0 - eta_tilde(rho, 3.0 * rho - r)
    } else {
        1.0
    }
}

/// Derivative of [`eta_tilde`] in `r`.
pub fn eta_tilde_derivative(rho: f64, r: f64) -> f64 {
    if r <= rho || r >= 2.0 * rho {
        0.0
    } else if r <= 1.5 * rho {
        let e = eta_tilde(rho, r);
        e * (1.5 * rho - rho) * std::f64::consts::LN_2 / (r - rho).powi(2)
    } else {
        eta_tilde_derivative(rho, 3.0 * rho - r)
    }
}

/// Cutoff `η_ρ` vanishing near a set of point charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffEta {
    pub rho: f64,
    pub centers: Vec<[f64; 3]>,
}

impl CutoffEta {
    pub fn new(rho: f64, centers: Vec<[f64; 3]>) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidGrid(format!("cutoff radius {rho} must be positive")));
        }
        Ok(CutoffEta { rho, centers })
    }

    /// Value at `x`, using the periodic distance to the nearest center.
    pub fn eval(&self, cell: &Cell, x: &[f64; 3]) -> f64 {
        let r = self
            .centers
            .iter()
            .map(|c| cell.periodic_distance(x, c))
            .fold(f64::INFINITY, f64::min);
        eta_tilde(self.rho, r)
    }

    pub fn field(&self, grid: &Grid) -> ScalarField {
        grid.sample(|x| self.eval(grid.cell(), x))
    }
}
