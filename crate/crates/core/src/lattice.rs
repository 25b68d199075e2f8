//! Random nuclear lattices: Bravais lattices, i.i.d. species occupancy on an
//! `L`-periodic cell, and their realization as charge fields on a grid.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, Grid, GridSpec, ScalarField};

/// Primitive vectors of a Bravais lattice `F·Z^d`; `basis[i][j]` is
/// component `i` of vector `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BravaisLattice {
    pub d: usize,
    pub basis: [[f64; 3]; 3],
}

impl BravaisLattice {
    pub fn new(d: usize, basis: [[f64; 3]; 3]) -> Result<Self> {
        let lat = BravaisLattice { d, basis };
        lat.validate()?;
        Ok(lat)
    }

    /// Builds the lattice from a list of matrix rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if !(1..=3).contains(&d) || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidLattice(format!("expected a square matrix of size 1..=3, got {d} rows")));
        }
        let mut basis = [[0.0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                basis[i][j] = v;
            }
        }
        BravaisLattice::new(d, basis)
    }

    pub fn cubic(d: usize) -> Self {
        let mut basis = [[0.0; 3]; 3];
        for (i, row) in basis.iter_mut().enumerate().take(d) {
            row[i] = 1.0;
        }
        BravaisLattice { d, basis }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::InvalidLattice(format!("dimension {} not in 1..=3", self.d)));
        }
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::InvalidLattice(format!("det F = {det} must be positive")));
        }
        Ok(())
    }

    pub fn det(&self) -> f64 {
        let m = nalgebra::Matrix3::from_fn(|i, j| {
            if i < self.d && j < self.d {
                self.basis[i][j]
            } else if i == j {
                1.0
            } else {
                0.0
            }
        });
        m.determinant()
    }

    pub fn to_cartesian(&self, xi: &[f64; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (i, xv) in x.iter_mut().enumerate().take(self.d) {
            *xv = (0..self.d).map(|j| self.basis[i][j] * xi[j]).sum();
        }
        x
    }

    /// Shortest nonzero lattice vector length.
    pub fn min_distance(&self) -> f64 {
        let r = 2i32;
        let mut best = f64::INFINITY;
        let range = |k: usize| if k < self.d { -r..=r } else { 0..=0 };
        for a in range(0) {
            for b in range(1) {
                for c in range(2) {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let x = self.to_cartesian(&[a as f64, b as f64, c as f64]);
                    best = best.min((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
                }
            }
        }
        best
    }

    /// Period cell `L·F`.
    pub fn supercell(&self, l: usize) -> Result<Cell> {
        let mut m = self.basis;
        for row in m.iter_mut().take(self.d) {
            for v in row.iter_mut().take(self.d) {
                *v *= l as f64;
            }
        }
        Cell::new(self.d, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub charge: f64,
    pub probability: f64,
}

/// Species of nuclei with their i.i.d. site probabilities. An empty table
/// describes a lattice without nuclei.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SpeciesTable {
    pub entries: Vec<Species>,
}

impl SpeciesTable {
    pub fn new(entries: Vec<Species>) -> Result<Self> {
        let t = SpeciesTable { entries };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        for (k, s) in self.entries.iter().enumerate() {
            if !(s.charge > 0.0 && s.charge.is_finite()) {
                return Err(Error::InvalidSpecies(format!("species {k}: charge {} must be positive", s.charge)));
            }
            if !(0.0..=1.0).contains(&s.probability) {
                return Err(Error::InvalidSpecies(format!("species {k}: probability {} outside [0,1]", s.probability)));
            }
            for t in &self.entries[..k] {
                if t.charge == s.charge {
                    return Err(Error::InvalidSpecies(format!("duplicate charge {}", s.charge)));
                }
            }
        }
        let total: f64 = self.entries.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpecies(format!("probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn charge(&self, k: usize) -> f64 {
        self.entries[k].charge
    }

    pub fn max_charge(&self) -> f64 {
        self.entries.iter().map(|s| s.charge).fold(0.0, f64::max)
    }

    /// Inverse-CDF draw from a uniform variate in `[0, 1)`.
    pub fn draw(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, s) in self.entries.iter().enumerate() {
            acc += s.probability;
            if u < acc {
                return k;
            }
        }
        // rounding slack in the cumulative sum: last species with positive mass
        self.entries.iter().rposition(|s| s.probability > 0.0).unwrap_or(0)
    }
}

/// Law of the random nuclear charge distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub lattice: BravaisLattice,
    pub species: SpeciesTable,
    /// Standard deviation of the Gaussian used to smear each nucleus.
    pub sigma: f64,
    /// Separation radius: distinct nuclei are at least `4·rho_sep` apart.
    pub rho_sep: f64,
    /// Constant continuous charge density added everywhere.
    #[serde(default)]
    pub background: f64,
}

impl EnsembleSpec {
    pub fn new(lattice: BravaisLattice, species: SpeciesTable, sigma: f64, rho_sep: f64, background: f64) -> Result<Self> {
        let s = EnsembleSpec { lattice, species, sigma, rho_sep, background };
        s.validate()?;
        Ok(s)
    }

    /// Two-species cubic ensemble used throughout the tests and demos.
    pub fn binary(d: usize, charges: (f64, f64), p_first: f64, sigma: f64) -> Result<Self> {
        let species = SpeciesTable::new(vec![
            Species { charge: charges.0, probability: p_first },
            Species { charge: charges.1, probability: 1.0 - p_first },
        ])?;
        EnsembleSpec::new(BravaisLattice::cubic(d), species, sigma, 0.25, 0.0)
    }

    pub fn d(&self) -> usize {
        self.lattice.d
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.species.validate()?;
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidEnsemble(format!("sigma = {} must be positive", self.sigma)));
        }
        if !(self.rho_sep > 0.0) {
            return Err(Error::InvalidEnsemble(format!("rho_sep = {} must be positive", self.rho_sep)));
        }
        if self.sigma > self.rho_sep * (1.0 + 1e-12) {
            return Err(Error::InvalidEnsemble(format!("sigma = {} exceeds rho_sep = {}", self.sigma, self.rho_sep)));
        }
        let dmin = self.lattice.min_distance();
        if 4.0 * self.rho_sep > dmin * (1.0 + 1e-12) {
            return Err(Error::InvalidEnsemble(format!(
                "4·rho_sep = {} exceeds minimal site distance {dmin}",
                4.0 * self.rho_sep
            )));
        }
        if !(self.background >= 0.0) {
            return Err(Error::InvalidEnsemble(format!("background {} must be nonnegative", self.background)));
        }
        Ok(())
    }

    /// Grid over the `L`-periodic cell with `n` points per axis.
    pub fn grid(&self, l: usize, n: usize) -> Result<Grid> {
        Ok(Grid::new(GridSpec::new(self.lattice.supercell(l)?, n)?))
    }
}

/// Mixes a master seed with an index into an independent 64-bit seed
/// (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform variate of site `site` under `seed`. The stream is counter
/// based: site `i` always reads ChaCha8 word position `2i`.
pub fn site_uniform(seed: u64, site: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * site as u128);
    to_unit(rng.next_u64())
}

/// Number of lattice sites in the `L`-periodic cell.
pub fn site_count(d: usize, l: usize) -> usize {
    l.pow(d as u32)
}

/// Integer lattice coordinates of site `index` (row-major, axis 0 slowest).
pub fn site_coords(d: usize, l: usize, index: usize) -> [i64; 3] {
    let mut c = [0i64; 3];
    let mut rem = index;
    for a in (0..d).rev() {
        c[a] = (rem % l) as i64;
        rem /= l;
    }
    c
}

pub fn site_index(d: usize, l: usize, coords: [i64; 3]) -> usize {
    let li = l as i64;
    let mut idx = 0usize;
    for &c in coords.iter().take(d) {
        idx = idx * l + c.rem_euclid(li) as usize;
    }
    idx
}

/// One `L`-periodic configuration: a species index per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSample {
    pub spec: EnsembleSpec,
    pub l: usize,
    /// Species index per site; empty when the species table is empty.
    pub occupancy: Vec<usize>,
    pub seed: u64,
}

impl PeriodicSample {
    pub fn d(&self) -> usize {
        self.spec.d()
    }

    pub fn sites(&self) -> usize {
        site_count(self.d(), self.l)
    }

    pub fn species_at(&self, coords: [i64; 3]) -> usize {
        self.occupancy[site_index(self.d(), self.l, coords)]
    }

    /// Builds a sample from an explicit occupancy array.
    pub fn from_occupancy(spec: EnsembleSpec, l: usize, occupancy: Vec<usize>, seed: u64) -> Result<Self> {
        spec.validate()?;
        let expected = if spec.species.is_empty() { 0 } else { site_count(spec.d(), l) };
        if occupancy.len() != expected {
            return Err(Error::InvalidEnsemble(format!("occupancy has {} entries, expected {expected}", occupancy.len())));
        }
        if let Some(&k) = occupancy.iter().find(|&&k| k >= spec.species.len()) {
            return Err(Error::UnknownSpecies(k));
        }
        Ok(PeriodicSample { spec, l, occupancy, seed })
    }
}

/// Draws an i.i.d. `L`-periodic occupancy. Identical inputs give identical
/// samples.
pub fn sample_periodic(spec: &EnsembleSpec, l: usize, seed: u64) -> Result<PeriodicSample> {
    if l < 2 {
        return Err(Error::InvalidEnsemble(format!("L = {l} must be at least 2")));
    }
    spec.validate()?;
    let occupancy = if spec.species.is_empty() {
        Vec::new()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..site_count(spec.d(), l)).map(|_| spec.species.draw(to_unit(rng.next_u64()))).collect()
    };
    Ok(PeriodicSample { spec: spec.clone(), l, occupancy, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nucleus {
    pub position: [f64; 3],
    pub charge: f64,
    /// Lattice site the nucleus occupies, when it came from a sample.
    pub site: Option<usize>,
}

/// Axis-aligned half-open box `[lo, hi)` in lattice coordinates `ξ` with
/// `x = F·ξ`, interpreted periodically on the `L`-cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl LatticeBox {
    pub fn new(d: usize, lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        for a in 0..d {
            if !(hi[a] > lo[a]) {
                return Err(Error::InvalidWindow(format!("empty extent along axis {a}: [{}, {})", lo[a], hi[a])));
            }
        }
        Ok(LatticeBox { lo, hi })
    }

    pub fn full(d: usize, l: usize) -> Self {
        let mut hi = [0.0; 3];
        for v in hi.iter_mut().take(d) {
            *v = l as f64;
        }
        LatticeBox { lo: [0.0; 3], hi }
    }

    /// Cube `y + [-h, h)^d` about the lattice point `y`.
    pub fn centered(d: usize, y: [f64; 3], half: f64) -> Result<Self> {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..d {
            lo[a] = y[a] - half;
            hi[a] = y[a] + half;
        }
        LatticeBox::new(d, lo, hi)
    }

    pub fn check(&self, d: usize, l: usize) -> Result<()> {
        for a in 0..d {
            let side = self.hi[a] - self.lo[a];
            if !(side > 0.0) {
                return Err(Error::InvalidWindow(format!("empty extent along axis {a}")));
            }
            if side > l as f64 * (1.0 + 1e-12) {
                return Err(Error::InvalidWindow(format!("side {side} along axis {a} exceeds the cell (L = {l})")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, d: usize, l: usize, xi: &[f64; 3]) -> bool {
        let lf = l as f64;
        (0..d).all(|a| {
            let t = xi[a] - self.lo[a];
            let t = t - lf * (t / lf).floor();
            // values within rounding of a full period belong to the face at lo
            let t = if (lf - t).abs() < 1e-9 * lf { 0.0 } else { t };
            t < self.hi[a] - self.lo[a] - 1e-9 * lf
        })
    }

    pub fn is_full(&self, d: usize, l: usize) -> bool {
        (0..d).all(|a| self.hi[a] - self.lo[a] >= l as f64 * (1.0 - 1e-12))
    }

    /// Volume in lattice units (multiply by `det F` for the Cartesian volume).
    pub fn lattice_volume(&self, d: usize) -> f64 {
        (0..d).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn center(&self, d: usize) -> [f64; 3] {
        let mut c = [0.0; 3];
        for a in 0..d {
            c[a] = 0.5 * (self.lo[a] + self.hi[a]);
        }
        c
    }
}

/// Nuclear charge distribution on a periodic grid: a continuous part plus
/// point nuclei regularized as Gaussians of width `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeDistribution {
    pub lattice: BravaisLattice,
    pub l: usize,
    /// Continuous density `m_c` without the nuclei.
    pub continuous: ScalarField,
    pub nuclei: Vec<Nucleus>,
    pub sigma: f64,
    density: ScalarField,
}

impl ChargeDistribution {
    pub fn new(lattice: BravaisLattice, l: usize, continuous: ScalarField, nuclei: Vec<Nucleus>, sigma: f64) -> Result<Self> {
        let grid = continuous.grid.clone();
        let cell = lattice.supercell(l)?;
        if cell.d != grid.d() || (0..3).any(|i| (0..3).any(|j| (cell.matrix[i][j] - grid.cell().matrix[i][j]).abs() > 1e-12)) {
            return Err(Error::GridMismatch("grid cell differs from L·F".into()));
        }
        if continuous.values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidCharge("continuous density must be nonnegative".into()));
        }
        if let Some(n) = nuclei.iter().find(|n| !(n.charge > 0.0 && n.charge.is_finite())) {
            return Err(Error::InvalidCharge(format!("nuclear charge {} must be positive", n.charge)));
        }
        if !nuclei.is_empty() {
            let required = 2.0 * grid.spec().max_spacing();
            if sigma < required * (1.0 - 1e-12) {
                return Err(Error::UnderResolved { sigma, required });
            }
        }
        let mut values = continuous.values.clone();
        for n in &nuclei {
            deposit_gaussian(&grid, &mut values, &n.position, n.charge, sigma);
        }
        let density = ScalarField { grid, values };
        Ok(ChargeDistribution { lattice, l, continuous, nuclei, sigma, density })
    }

    /// Constant density `c0` and no nuclei.
    pub fn homogeneous(lattice: BravaisLattice, l: usize, n: usize, c0: f64) -> Result<Self> {
        let grid = Grid::new(GridSpec::new(lattice.supercell(l)?, n)?);
        let cont = grid.constant(c0);
        ChargeDistribution::new(lattice, l, cont, Vec::new(), 1.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.density.grid
    }

    pub fn d(&self) -> usize {
        self.lattice.d
    }

    /// Total smeared density `m_c + Σ c_x g_σ(· − x)`.
    pub fn density(&self) -> &ScalarField {
        &self.density
    }

    pub fn nuclear_charge(&self) -> f64 {
        self.nuclei.iter().map(|n| n.charge).sum()
    }

    /// `∫ m` over the cell with nuclei counted as point masses.
    pub fn total_charge(&self) -> f64 {
        self.continuous.integrate() + self.nuclear_charge()
    }

    /// Lattice coordinates of grid point `idx`.
    pub fn lattice_coords(&self, idx: usize) -> [f64; 3] {
        let s = self.grid().spec().fractional(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.d() {
            xi[a] = s[a] * self.l as f64;
        }
        xi
    }

    pub fn lattice_coords_of(&self, x: &[f64; 3]) -> [f64; 3] {
        let s = self.grid().cell().to_fractional(x);
        let mut xi = [0.0; 3];
        for a in 0..self.d() {
            xi[a] = s[a] * self.l as f64;
        }
        xi
    }

    /// Grid-point mask of a window.
    pub fn window_mask(&self, window: &LatticeBox) -> Vec<bool> {
        (0..self.grid().len()).map(|i| window.contains(self.d(), self.l, &self.lattice_coords(i))).collect()
    }

    /// Same distribution with the continuous part replaced.
    pub fn with_continuous(&self, continuous: ScalarField) -> Result<Self> {
        ChargeDistribution::new(self.lattice.clone(), self.l, continuous, self.nuclei.clone(), self.sigma)
    }
}

/// Adds a periodic Gaussian of mass `charge` centred at `center`.
fn deposit_gaussian(grid: &Grid, values: &mut [f64], center: &[f64; 3], charge: f64, sigma: f64) {
    let d = grid.d();
    let n = grid.n() as i64;
    let cell = grid.cell();
    let s = cell.to_fractional(center);
    let cutoff = 9.0 * sigma;
    let norm = charge / (2.0 * std::f64::consts::PI * sigma * sigma).powf(d as f64 / 2.0);
    let inv = {
        let m = nalgebra::Matrix3::from_fn(|i, j| cell.matrix[i][j]);
        m.try_inverse().expect("cell validated")
    };
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for a in 0..d {
        let row_norm = (0..d).map(|b| inv[(a, b)].powi(2)).sum::<f64>().sqrt();
        let r = cutoff * row_norm;
        lo[a] = ((s[a] - r) * n as f64).floor() as i64;
        hi[a] = ((s[a] + r) * n as f64).ceil() as i64;
    }
    let spec = grid.spec();
    let two_s2 = 2.0 * sigma * sigma;
    let range = |a: usize| if a < d { lo[a]..=hi[a] } else { 0..=0 };
    for i0 in range(0) {
        for i1 in range(1) {
            for i2 in range(2) {
                let idx = [i0, i1, i2];
                let mut t = [0.0; 3];
                for a in 0..d {
                    t[a] = idx[a] as f64 / n as f64 - s[a];
                }
                let x = cell.to_cartesian(&t);
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if r2 > cutoff * cutoff {
                    continue;
                }
                let mut mi = [0usize; 3];
                for a in 0..d {
                    mi[a] = idx[a].rem_euclid(n) as usize;
                }
                values[spec.flat_index(mi)] += norm * (-r2 / two_s2).exp();
            }
        }
    }
}

/// Places every occupied site as a smeared nucleus and adds the background.
pub fn realize_charges(sample: &PeriodicSample, grid: &Grid) -> Result<ChargeDistribution> {
    let spec = &sample.spec;
    let d = spec.d();
    let nuclei = sample
        .occupancy
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let c = site_coords(d, sample.l, i);
            let xi = [c[0] as f64, c[1] as f64, c[2] as f64];
            Nucleus { position: spec.lattice.to_cartesian(&xi), charge: spec.species.charge(k), site: Some(i) }
        })
        .collect();
    ChargeDistribution::new(spec.lattice.clone(), sample.l, grid.constant(spec.background), nuclei, spec.sigma)
}

/// Keeps `m` inside `window` and replaces it by the constant density 1
/// outside; nuclei outside the window are dropped.
pub fn restrict_extend(m: &ChargeDistribution, window: &LatticeBox) -> Result<ChargeDistribution> {
    let d = m.d();
    window.check(d, m.l)?;
    if window.is_full(d, m.l) {
        return Ok(m.clone());
    }
    let mask = m.window_mask(window);
    let values = m.continuous.values.iter().zip(&mask).map(|(&v, &inside)| if inside { v } else { 1.0 }).collect();
    let cont = ScalarField { grid: m.grid().clone(), values };
    let nuclei = m
        .nuclei
        .iter()
        .filter(|n| window.contains(d, m.l, &m.lattice_coords_of(&n.position)))
        .copied()
        .collect();
    ChargeDistribution::new(m.lattice.clone(), m.l, cont, nuclei, m.sigma)
}

/// Diagnostics for the uniform local finiteness and lower-bound assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Smallest periodic distance between distinct nuclei (∞ with < 2 nuclei).
    pub min_separation: f64,
    pub separation_ok: bool,
    /// Largest total charge in a closed unit ball.
    pub max_local_mass: f64,
    /// `sup (∫_{B1} m_c²)^½ + sup (Σ_{B1} c²)^½`, the mixed norm bound.
    pub mixed_norm_bound: f64,
    /// `(R, min over centres of the ball-averaged density)`.
    pub ball_averages: Vec<(f64, f64)>,
    pub lower_bound_ok: bool,
}

/// Convolution of grid values with the indicator of the closed ball of
/// radius `r`; returns `∫_{B_r(x)} f` at every grid point and the ball's
/// discrete volume.
fn ball_integrals(grid: &Grid, values: &[f64], r: f64) -> (Vec<f64>, f64) {
    let origin = [0.0; 3];
    let ind: Vec<f64> = (0..grid.len())
        .map(|i| if grid.cell().periodic_distance(&grid.position(i), &origin) <= r + 1e-9 { 1.0 } else { 0.0 })
        .collect();
    let count: f64 = ind.iter().sum();
    let a = grid.forward(values);
    let b = grid.forward(&ind);
    let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let w = grid.weight();
    let conv = grid.inverse_real(prod).into_iter().map(|v| v * w).collect();
    (conv, count * w)
}

/// Nuclei deposited as point masses at the nearest grid node, scaled to densities.
fn point_deposit(m: &ChargeDistribution, power: i32) -> Vec<f64> {
    let grid = m.grid();
    let spec = grid.spec();
    let n = spec.n as f64;
    let mut out = vec![0.0; grid.len()];
    for nu in &m.nuclei {
        let s = grid.cell().to_fractional(&nu.position);
        let mut mi = [0usize; 3];
        for a in 0..m.d() {
            mi[a] = ((s[a] * n).round() as i64).rem_euclid(spec.n as i64) as usize;
        }
        out[spec.flat_index(mi)] += nu.charge.powi(power) / grid.weight();
    }
    out
}

pub fn verify_assumptions(m: &ChargeDistribution, rho_sep: f64, omega0: f64) -> AssumptionReport {
    let cell = m.grid().cell();
    let mut min_sep = f64::INFINITY;
    for (i, a) in m.nuclei.iter().enumerate() {
        for b in &m.nuclei[i + 1..] {
            min_sep = min_sep.min(cell.periodic_distance(&a.position, &b.position));
        }
    }
    let grid = m.grid();
    let points = point_deposit(m, 1);
    let total: Vec<f64> = m.continuous.values.iter().zip(&points).map(|(a, b)| a + b).collect();
    let (local, _) = ball_integrals(grid, &total, 1.0);
    let max_local_mass = local.iter().copied().fold(0.0, f64::max);

    let sq: Vec<f64> = m.continuous.values.iter().map(|v| v * v).collect();
    let (cont_sq, _) = ball_integrals(grid, &sq, 1.0);
    let (pt_sq, _) = ball_integrals(grid, &point_deposit(m, 2), 1.0);
    let mixed = cont_sq.iter().copied().fold(0.0, f64::max).max(0.0).sqrt() + pt_sq.iter().copied().fold(0.0, f64::max).max(0.0).sqrt();

    let mut ball_averages = Vec::new();
    if omega0 > 0.0 {
        for r in [1.0 / omega0, 2.0 / omega0] {
            let (integrals, vol) = ball_integrals(grid, &total, r);
            let min = integrals.iter().copied().fold(f64::INFINITY, f64::min) / vol;
            ball_averages.push((r, min));
        }
    }
    let lower_bound_ok = omega0 > 0.0 && ball_averages.iter().all(|&(_, v)| v >= omega0 * (1.0 - 1e-12));
    AssumptionReport {
        min_separation: min_sep,
        separation_ok: min_sep >= 4.0 * rho_sep * (1.0 - 1e-12),
        max_local_mass,
        mixed_norm_bound: mixed,
        ball_averages,
        lower_bound_ok,
    }
}
