//! Statistical quantities of lattice samples (species densities, contact
//! densities, motifs), their expectations under i.i.d. occupancy, and the
//! covariance diagnostics relating them to the energy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{site_coords, EnsembleSpec, PeriodicSample};

/// One constraint of a motif: the site at `offset` from the anchor holds `species`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifEntry {
    pub offset: [i64; 3],
    pub species: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    /// Density of sites holding species `a`.
    Species { a: usize },
    /// Density of `a`-sites with at least one axis neighbour of species `b`.
    Contact { a: usize, b: usize },
    Motif { pattern: Vec<MotifEntry> },
}

impl Descriptor {
    pub fn label(&self) -> String {
        match self {
            Descriptor::Species { a } => format!("species_{a}"),
            Descriptor::Contact { a, b } => format!("contact_{a}_{b}"),
            Descriptor::Motif { pattern } => {
                let parts: Vec<String> = pattern
                    .iter()
                    .map(|e| format!("{}.{}.{}:{}", e.offset[0], e.offset[1], e.offset[2], e.species))
                    .collect();
                format!("motif_{}", parts.join("_"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatVector {
    pub values: Vec<f64>,
    pub descriptors: Vec<Descriptor>,
}

fn check_species(sample: &PeriodicSample, a: usize) -> Result<()> {
    if a >= sample.spec.species.len() {
        return Err(Error::UnknownSpecies(a));
    }
    Ok(())
}

fn normalization(sample: &PeriodicSample) -> f64 {
    sample.spec.lattice.det() * sample.sites() as f64
}

pub fn species_density(sample: &PeriodicSample, a: usize) -> Result<f64> {
    check_species(sample, a)?;
    let count = sample.occupancy.iter().filter(|&&k| k == a).count();
    Ok(count as f64 / normalization(sample))
}

fn neighbour(d: usize, c: [i64; 3], axis: usize, step: i64) -> [i64; 3] {
    let mut n = c;
    if axis < d {
        n[axis] += step;
    }
    n
}

pub fn nn_contact_density(sample: &PeriodicSample, a: usize, b: usize) -> Result<f64> {
    check_species(sample, a)?;
    check_species(sample, b)?;
    let d = sample.d();
    let count = (0..sample.sites())
        .filter(|&i| {
            if sample.occupancy[i] != a {
                return false;
            }
            let c = site_coords(d, sample.l, i);
            (0..d).any(|j| [-1, 1].iter().any(|&s| sample.species_at(neighbour(d, c, j, s)) == b))
        })
        .count();
    Ok(count as f64 / normalization(sample))
}

pub fn motif_density(sample: &PeriodicSample, pattern: &[MotifEntry]) -> Result<f64> {
    if pattern.is_empty() {
        return Err(Error::InvalidStatistic("empty motif".into()));
    }
    let d = sample.d();
    let half = (sample.l / 2) as i64;
    for e in pattern {
        check_species(sample, e.species)?;
        if (0..3).any(|j| if j < d { e.offset[j].abs() > half } else { e.offset[j] != 0 }) {
            return Err(Error::InvalidStatistic(format!("motif offset {:?} exceeds L/2 = {half}", e.offset)));
        }
    }
    let count = (0..sample.sites())
        .filter(|&i| {
            let c = site_coords(d, sample.l, i);
            pattern.iter().all(|e| sample.species_at([c[0] + e.offset[0], c[1] + e.offset[1], c[2] + e.offset[2]]) == e.species)
        })
        .count();
    Ok(count as f64 / normalization(sample))
}

pub fn evaluate_descriptor(sample: &PeriodicSample, desc: &Descriptor) -> Result<f64> {
    match desc {
        Descriptor::Species { a } => species_density(sample, *a),
        Descriptor::Contact { a, b } => nn_contact_density(sample, *a, *b),
        Descriptor::Motif { pattern } => motif_density(sample, pattern),
    }
}

pub fn evaluate(sample: &PeriodicSample, descriptors: &[Descriptor]) -> Result<StatVector> {
    if descriptors.is_empty() {
        return Err(Error::InvalidStatistic("at least one descriptor is required".into()));
    }
    let values = descriptors.iter().map(|d| evaluate_descriptor(sample, d)).collect::<Result<_>>()?;
    Ok(StatVector { values, descriptors: descriptors.to_vec() })
}

/// Expectations of the descriptors under i.i.d. occupancy. Contact densities
/// assume `L ≥ 3`, so that the `2d` axis neighbours are distinct sites.
pub fn expected_stats(spec: &EnsembleSpec, descriptors: &[Descriptor]) -> Result<Vec<f64>> {
    let det = spec.lattice.det();
    let n_species = spec.species.len();
    let p = |a: usize| -> Result<f64> {
        if a >= n_species {
            return Err(Error::UnknownSpecies(a));
        }
        Ok(spec.species.entries[a].probability)
    };
    let two_d = 2 * spec.d() as i32;
    descriptors
        .iter()
        .map(|desc| match desc {
            Descriptor::Species { a } => Ok(p(*a)? / det),
            Descriptor::Contact { a, b } => Ok(p(*a)? * (1.0 - (1.0 - p(*b)?).powi(two_d)) / det),
            Descriptor::Motif { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidStatistic("empty motif".into()));
                }
                let mut seen: Vec<&MotifEntry> = Vec::new();
                let mut prob = 1.0;
                for e in pattern {
                    match seen.iter().find(|s| s.offset == e.offset) {
                        Some(s) if s.species != e.species => return Ok(0.0),
                        Some(_) => {}
                        None => {
                            prob *= p(e.species)?;
                            seen.push(e);
                        }
                    }
                }
                Ok(prob / det)
            }
        })
        .collect()
}

/// `Var F_{1,a} = p(1 − p) / (det F² L^d)` for i.i.d. occupancy; `None` for
/// descriptors without a closed form here.
pub fn analytic_variance(spec: &EnsembleSpec, desc: &Descriptor, l: usize) -> Option<f64> {
    match desc {
        Descriptor::Species { a } => {
            let p = spec.species.entries.get(*a)?.probability;
            let det = spec.lattice.det();
            Some(p * (1.0 - p) / (det * det * (l as f64).powi(spec.d() as i32)))
        }
        _ => None,
    }
}

/// Streaming mean and co-moment accumulator for a vector `(E, F_1, …, F_N)`,
/// mergeable in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CovAccumulator {
    pub count: usize,
    mean: Vec<f64>,
    comoment: Vec<f64>,
}

impl CovAccumulator {
    pub fn new(dim: usize) -> Self {
        CovAccumulator { count: 0, mean: vec![0.0; dim], comoment: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, z: &[f64]) {
        let k = self.dim();
        self.count += 1;
        let n = self.count as f64;
        let delta: Vec<f64> = z.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl / n;
        }
        for i in 0..k {
            let after = z[i] - self.mean[i];
            for j in 0..k {
                self.comoment[i * k + j] += delta[j] * after;
            }
        }
    }

    pub fn merge(&mut self, other: &CovAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let k = self.dim();
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += other.comoment[i * k + j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl * nb / n;
        }
        self.count += other.count;
    }

    /// Pairwise tree reduction over chunks of `chunk` rows.
    pub fn from_rows(rows: &[Vec<f64>], chunk: usize) -> Self {
        let dim = rows.first().map_or(0, |r| r.len());
        let mut level: Vec<CovAccumulator> = rows
            .chunks(chunk.max(1))
            .map(|c| {
                let mut acc = CovAccumulator::new(dim);
                for r in c {
                    acc.push(r);
                }
                acc
            })
            .collect();
        if level.is_empty() {
            return CovAccumulator::new(dim);
        }
        while level.len() > 1 {
            level = level
                .chunks(2)
                .map(|p| {
                    let mut a = p[0].clone();
                    if let Some(b) = p.get(1) {
                        a.merge(b);
                    }
                    a
                })
                .collect();
        }
        level.pop().expect("nonempty")
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased covariance matrix.
    pub fn covariance(&self) -> DMatrix<f64> {
        let k = self.dim();
        let denom = (self.count as f64 - 1.0).max(1.0);
        DMatrix::from_fn(k, k, |i, j| 0.5 * (self.comoment[i * k + j] + self.comoment[j * k + i]) / denom)
    }
}

/// Relative eigenvalue cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub samples: usize,
    pub mean_e: f64,
    pub var_e: f64,
    pub mean_f: Vec<f64>,
    pub cov_ff: Vec<Vec<f64>>,
    pub cov_ef: Vec<f64>,
    /// Squared multiple correlation `Cov[E,F] Var(F)⁻¹ Cov[F,E] / Var E`.
    pub explained: f64,
    /// Condition number of the joint covariance of `(E, F)`.
    pub kappa: f64,
    /// `L^{-d} / Var E`.
    pub r_var: f64,
    /// Some eigenvalue of `Var F` fell below the cutoff and was dropped.
    pub near_singular: bool,
}

/// Pseudo-inverse of a symmetric positive semidefinite matrix; also reports
/// whether any eigenvalue was dropped.
pub fn pinv_symmetric(m: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut dropped = false;
    let inv: DVector<f64> = eig.eigenvalues.map(|v| {
        if v > PINV_CUTOFF * max && v > 0.0 {
            1.0 / v
        } else {
            dropped = true;
            0.0
        }
    });
    let q = &eig.eigenvectors;
    (q * DMatrix::from_diagonal(&inv) * q.transpose(), dropped)
}

/// Covariance diagnostics of `(E, F)` pairs from cells of side `l` in `d` dimensions.
pub fn correlation_report(pairs: &[(f64, Vec<f64>)], l: usize, d: usize) -> Result<CorrelationReport> {
    let n = pairs.first().map_or(0, |p| p.1.len());
    if n == 0 {
        return Err(Error::InvalidStatistic("empty statistic vector".into()));
    }
    if pairs.iter().any(|p| p.1.len() != n) {
        return Err(Error::InvalidStatistic("statistic vectors differ in length".into()));
    }
    if pairs.len() < n + 2 {
        return Err(Error::TooFewSamples { got: pairs.len(), need: n + 2 });
    }
    let rows: Vec<Vec<f64>> = pairs
        .iter()
        .map(|(e, f)| {
            let mut r = Vec::with_capacity(n + 1);
            r.push(*e);
            r.extend_from_slice(f);
            r
        })
        .collect();
    let acc = CovAccumulator::from_rows(&rows, 64);
    let cov = acc.covariance();
    let var_e = cov[(0, 0)];
    let cov_ff = cov.view((1, 1), (n, n)).into_owned();
    if cov_ff.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("all statistics are constant across samples".into()));
    }
    if !(var_e > 0.0) {
        return Err(Error::Degenerate("energy variance vanishes".into()));
    }
    let cov_ef = DVector::from_iterator(n, (0..n).map(|i| cov[(0, i + 1)]));
    // the quadratic form is evaluated on standardized statistics so that it
    // does not depend on their units
    let scale: Vec<f64> = (0..n).map(|i| cov_ff[(i, i)].sqrt()).collect();
    let inv_scale = |i: usize| if scale[i] > 0.0 { 1.0 / scale[i] } else { 0.0 };
    let corr = DMatrix::from_fn(n, n, |i, j| cov_ff[(i, j)] * inv_scale(i) * inv_scale(j));
    let c = DVector::from_fn(n, |i, _| cov_ef[i] * inv_scale(i));
    let (pinv, dropped) = pinv_symmetric(&corr);
    let near_singular = dropped || scale.iter().any(|&s| s == 0.0);
    let explained = ((c.transpose() * &pinv * &c)[(0, 0)] / var_e).clamp(0.0, 1.0);
    let eig = SymmetricEigen::new(cov.clone()).eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let kappa = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok(CorrelationReport {
        samples: pairs.len(),
        mean_e: acc.mean()[0],
        var_e,
        mean_f: acc.mean()[1..].to_vec(),
        cov_ff: (0..n).map(|i| (0..n).map(|j| cov_ff[(i, j)]).collect()).collect(),
        cov_ef: cov_ef.iter().copied().collect(),
        explained,
        kappa,
        r_var: (l as f64).powi(-(d as i32)) / var_e,
        near_singular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BravaisLattice, Species, SpeciesTable};
    use approx::assert_relative_eq;

    fn spec(d: usize) -> EnsembleSpec {
        EnsembleSpec::binary(d, (1.0, 2.0), 0.5, 0.25).unwrap()
    }

    fn checkerboard(l: usize) -> PeriodicSample {
        let occ = (0..l * l)
            .map(|i| {
                let c = site_coords(2, l, i);
                ((c[0] + c[1]) % 2) as usize
            })
            .collect();
        PeriodicSample::from_occupancy(spec(2), l, occ, 0).unwrap()
    }

    #[test]
    fn species_density_counts() {
        let s = PeriodicSample::from_occupancy(spec(3), 2, vec![0, 1, 1, 0, 1, 0, 1, 1], 0).unwrap();
        assert_relative_eq!(species_density(&s, 0).unwrap(), 3.0 / 8.0);
        let all = PeriodicSample::from_occupancy(spec(3), 2, vec![0; 8], 0).unwrap();
        assert_eq!(species_density(&all, 0).unwrap(), 1.0);
        assert_eq!(species_density(&all, 1).unwrap(), 0.0);
        assert_eq!(species_density(&all, 2).unwrap_err(), Error::UnknownSpecies(2));
    }

    #[test]
    fn contact_density_cases() {
        let s = checkerboard(4);
        assert_relative_eq!(nn_contact_density(&s, 0, 1).unwrap(), 0.5);
        assert_eq!(nn_contact_density(&s, 0, 0).unwrap(), 0.0);
        let all = PeriodicSample::from_occupancy(spec(2), 4, vec![0; 16], 0).unwrap();
        assert_eq!(nn_contact_density(&all, 0, 0).unwrap(), 1.0);
        assert_eq!(nn_contact_density(&all, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn motif_reduces_to_species_density() {
        let s = crate::lattice::sample_periodic(&spec(2), 4, 8).unwrap();
        let single = [MotifEntry { offset: [0, 0, 0], species: 1 }];
        assert_eq!(motif_density(&s, &single).unwrap(), species_density(&s, 1).unwrap());
        let all = PeriodicSample::from_occupancy(spec(2), 4, vec![0; 16], 0).unwrap();
        let pair = [MotifEntry { offset: [0, 0, 0], species: 0 }, MotifEntry { offset: [1, 0, 0], species: 0 }];
        assert_eq!(motif_density(&all, &pair).unwrap(), 1.0);
        let big = [MotifEntry { offset: [3, 0, 0], species: 0 }];
        assert!(matches!(motif_density(&all, &big), Err(Error::InvalidStatistic(_))));
    }

    #[test]
    fn expectations_in_closed_form() {
        let one = EnsembleSpec::new(
            BravaisLattice::cubic(3),
            SpeciesTable::new(vec![Species { charge: 1.0, probability: 1.0 }]).unwrap(),
            0.25,
            0.25,
            0.0,
        )
        .unwrap();
        assert_eq!(expected_stats(&one, &[Descriptor::Species { a: 0 }]).unwrap(), vec![1.0]);
        // all 2^7 configurations of an a-site's neighbourhood, enumerated
        let mut hits = 0;
        for cfg in 0u32..128 {
            let centre_a = cfg & 1 == 0;
            let any_b = (1..7).any(|j| (cfg >> j) & 1 == 1);
            if centre_a && any_b {
                hits += 1;
            }
        }
        let e = expected_stats(&spec(3), &[Descriptor::Contact { a: 0, b: 1 }]).unwrap()[0];
        assert_relative_eq!(e, hits as f64 / 128.0, max_relative = 1e-15);
        assert_relative_eq!(e, 63.0 / 128.0, max_relative = 1e-15);
    }

    #[test]
    fn perfect_correlation() {
        let pairs: Vec<(f64, Vec<f64>)> = (0..50).map(|i| ((i as f64 * 0.37).sin(), vec![(i as f64 * 0.37).sin()])).collect();
        let r = correlation_report(&pairs, 4, 2).unwrap();
        assert!((r.explained - 1.0).abs() <= 1e-10);
        assert!(r.kappa.is_infinite() || r.kappa > 1e10);
    }

    #[test]
    fn report_rejects_small_and_constant_inputs() {
        let pairs = vec![(1.0, vec![1.0, 2.0]); 3];
        assert!(matches!(correlation_report(&pairs, 4, 2), Err(Error::TooFewSamples { got: 3, need: 4 })));
        let pairs: Vec<(f64, Vec<f64>)> = (0..10).map(|i| (i as f64, vec![2.0])).collect();
        assert!(matches!(correlation_report(&pairs, 4, 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn merge_matches_single_pass() {
        let rows: Vec<Vec<f64>> = (0..101).map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos(), i as f64 * 0.01]).collect();
        let mut one = CovAccumulator::new(3);
        for r in &rows {
            one.push(r);
        }
        let tree = CovAccumulator::from_rows(&rows, 7);
        let (a, b) = (one.covariance(), tree.covariance());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-13);
        }
    }
}
