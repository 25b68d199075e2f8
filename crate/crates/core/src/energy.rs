//! TFW energy of a computed ground state: totals, representative-volume
//! energy per unit volume, and energies restricted to windows.
//!
//! In [`NucleusMode::Smeared`] the Gaussian nuclei are treated as part of the
//! continuous density. In [`NucleusMode::Point`] (three dimensions) the
//! continuous Coulomb term uses `m_c` only and each nucleus contributes
//! `½ c_x (φ − φ_x)(x)`, with the self-potential of the smeared nucleus
//! removed analytically.
//!
//! Local energies use the potential `φ − θ`, the gauge in which the electron
//! equation reads `−Δu + (5/3)u^{7/3} − φu = 0`. Cell totals do not depend on
//! the gauge since the cell is neutral; window energies do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::lattice::{ChargeDistribution, LatticeBox, Nucleus};
use crate::solver::{el_residual, TfwSolution};

/// Largest relative residual accepted for energy evaluation.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NucleusMode {
    #[default]
    Smeared,
    Point,
}

/// Energy terms over the period cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub tf: f64,
    pub coulomb_cont: f64,
    pub coulomb_point: f64,
    pub total: f64,
    /// `total / (L^d det F)`.
    pub per_volume: f64,
    pub mode: NucleusMode,
    pub d: usize,
    pub n: usize,
    pub l: usize,
    pub sigma: f64,
    pub residual: f64,
    pub seed: Option<u64>,
}

/// Peak value of the potential `∫ g(y)/|y| dy` of a unit-mass Gaussian of
/// standard deviation `sigma` in three dimensions.
pub fn self_potential_peak(sigma: f64) -> f64 {
    (2.0 / std::f64::consts::PI).sqrt() / sigma
}

/// `c_x (φ − φ_x)(x)` for one nucleus: the grid potential at the centre,
/// interpolated spectrally, minus the smeared self-potential `c_x K_σ`.
pub fn point_term(sol: &TfwSolution, m: &ChargeDistribution, x: &Nucleus) -> Result<f64> {
    if m.d() != 3 {
        return Err(Error::PointModeDimension(m.d()));
    }
    let phi = m.grid().interpolate(&sol.phi, &x.position) - sol.theta;
    Ok(x.charge * (phi - x.charge * self_potential_peak(m.sigma)))
}

fn point_terms(sol: &TfwSolution, m: &ChargeDistribution) -> Result<Vec<f64>> {
    if m.d() != 3 {
        return Err(Error::PointModeDimension(m.d()));
    }
    let grid = m.grid();
    let spec = grid.forward(&sol.phi.values);
    let k = self_potential_peak(m.sigma);
    Ok(m.nuclei.iter().map(|x| x.charge * (grid.interpolate_spectrum(&spec, &x.position) - sol.theta - x.charge * k)).collect())
}

/// Pointwise energy densities of a solution, ready for window sums.
#[derive(Debug, Clone)]
pub struct EnergyDensity {
    pub mode: NucleusMode,
    pub kinetic: ScalarField,
    pub tf: ScalarField,
    pub coulomb: ScalarField,
    /// `(lattice coordinates, ½ c_x (φ − φ_x)(x))` per nucleus; empty in smeared mode.
    pub points: Vec<([f64; 3], f64)>,
    mask_source: ChargeDistribution,
}

impl EnergyDensity {
    pub fn new(sol: &TfwSolution, m: &ChargeDistribution, mode: NucleusMode) -> Result<Self> {
        let grid = m.grid();
        if sol.u.grid != *grid || sol.phi.grid != *grid {
            return Err(Error::GridMismatch("solution and charge distribution live on different grids".into()));
        }
        let (ru, _) = el_residual(sol, m);
        let residual = sol.residual.max(ru / sol.u.l2_norm().max(1e-300));
        if !(residual <= RESIDUAL_LIMIT) {
            return Err(Error::ResidualTooLarge { residual, limit: RESIDUAL_LIMIT });
        }
        let grads = grid.gradient(&sol.u);
        let kinetic = grads.iter().fold(grid.zeros(), |acc, g| acc.zip_map(g, |a, b| a + b * b));
        let tf = sol.u.map(|v| v.abs().powf(10.0 / 3.0));
        let source = match mode {
            NucleusMode::Smeared => m.density(),
            NucleusMode::Point => &m.continuous,
        };
        let rho = source.zip_map(&sol.u, |a, b| a - b * b);
        let coulomb = rho.zip_map(&sol.phi, |r, p| 0.5 * r * (p - sol.theta));
        let points = match mode {
            NucleusMode::Smeared => Vec::new(),
            NucleusMode::Point => {
                let terms = point_terms(sol, m)?;
                m.nuclei.iter().zip(terms).map(|(x, t)| (m.lattice_coords_of(&x.position), 0.5 * t)).collect()
            }
        };
        Ok(EnergyDensity { mode, kinetic, tf, coulomb, points, mask_source: m.clone() })
    }

    fn masked_sum(&self, f: &ScalarField, mask: &[bool]) -> f64 {
        f.values.iter().zip(mask).filter(|(_, &inside)| inside).map(|(v, _)| v).sum::<f64>() * f.grid.weight()
    }

    /// Terms `(kinetic, tf, coulomb_cont, coulomb_point)` restricted to `q`.
    pub fn window_terms(&self, q: &LatticeBox) -> Result<[f64; 4]> {
        let m = &self.mask_source;
        q.check(m.d(), m.l)?;
        let mask = m.window_mask(q);
        let point = self.points.iter().filter(|(xi, _)| q.contains(m.d(), m.l, xi)).map(|(_, v)| v).sum();
        Ok([self.masked_sum(&self.kinetic, &mask), self.masked_sum(&self.tf, &mask), self.masked_sum(&self.coulomb, &mask), point])
    }

    pub fn window(&self, q: &LatticeBox) -> Result<f64> {
        Ok(self.window_terms(q)?.iter().sum())
    }

    pub fn total_terms(&self) -> [f64; 4] {
        let w = self.kinetic.grid.weight();
        let s = |f: &ScalarField| f.values.iter().sum::<f64>() * w;
        [s(&self.kinetic), s(&self.tf), s(&self.coulomb), self.points.iter().map(|(_, v)| v).sum()]
    }
}

/// Representative-volume energy of a converged solution.
pub fn energy_rve(sol: &TfwSolution, m: &ChargeDistribution, mode: NucleusMode) -> Result<EnergyBreakdown> {
    let dens = EnergyDensity::new(sol, m, mode)?;
    let [kinetic, tf, coulomb_cont, coulomb_point] = dens.total_terms();
    let total = kinetic + tf + coulomb_cont + coulomb_point;
    let volume = (m.l as f64).powi(m.d() as i32) * m.lattice.det();
    Ok(EnergyBreakdown {
        kinetic,
        tf,
        coulomb_cont,
        coulomb_point,
        total,
        per_volume: total / volume,
        mode,
        d: m.d(),
        n: m.grid().n(),
        l: m.l,
        sigma: m.sigma,
        residual: sol.residual,
        seed: None,
    })
}

/// Energy of a solution restricted to the window `q`.
pub fn windowed_energy(sol: &TfwSolution, m: &ChargeDistribution, mode: NucleusMode, q: &LatticeBox) -> Result<f64> {
    EnergyDensity::new(sol, m, mode)?.window(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BravaisLattice, Nucleus};
    use crate::solver::{homogeneous_reference, solve, SolverConfig};
    use approx::assert_relative_eq;

    fn homogeneous(c0: f64) -> (ChargeDistribution, TfwSolution) {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(3), 2, 16, c0).unwrap();
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        (m, sol)
    }

    #[test]
    fn homogeneous_per_volume() {
        let (m, sol) = homogeneous(1.0);
        let e = energy_rve(&sol, &m, NucleusMode::Smeared).unwrap();
        assert_relative_eq!(e.per_volume, 1.0, max_relative = 1e-10);
        assert!(e.kinetic.abs() < 1e-20 && e.coulomb_cont.abs() < 1e-20);
        let (m, sol) = homogeneous(8.0);
        let e = energy_rve(&sol, &m, NucleusMode::Smeared).unwrap();
        assert_relative_eq!(e.per_volume, 32.0, max_relative = 1e-10);
        assert_eq!(e.total, e.kinetic + e.tf + e.coulomb_cont + e.coulomb_point);
    }

    #[test]
    fn refuses_unconverged_solution() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(3), 2, 16, 1.0).unwrap();
        let mut sol = homogeneous_reference(m.grid(), 1.0).unwrap();
        sol.u = sol.u.map(|v| v * 1.01);
        assert!(matches!(energy_rve(&sol, &m, NucleusMode::Smeared), Err(Error::ResidualTooLarge { .. })));
    }

    #[test]
    fn windows_of_homogeneous_state() {
        let (m, sol) = homogeneous(8.0);
        let q = LatticeBox::new(3, [0.0, 0.5, 0.0], [1.0, 1.5, 0.5]).unwrap();
        let e = windowed_energy(&sol, &m, NucleusMode::Smeared, &q).unwrap();
        assert_relative_eq!(e, 32.0 * 0.5, max_relative = 1e-10);
        let full = windowed_energy(&sol, &m, NucleusMode::Smeared, &LatticeBox::full(3, 2)).unwrap();
        assert_relative_eq!(full, energy_rve(&sol, &m, NucleusMode::Smeared).unwrap().total, max_relative = 1e-14);
    }

    #[test]
    fn point_mode_needs_three_dimensions() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(2), 2, 16, 1.0).unwrap();
        let sol = homogeneous_reference(m.grid(), 1.0).unwrap();
        assert_eq!(energy_rve(&sol, &m, NucleusMode::Point).unwrap_err(), Error::PointModeDimension(2));
        let x = Nucleus { position: [0.0; 3], charge: 1.0, site: None };
        assert!(point_term(&sol, &m, &x).is_err());
    }

    #[test]
    fn point_term_is_linear_for_small_charge() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(3), 2, 16, 1.0).unwrap();
        let mut sol = homogeneous_reference(m.grid(), 1.0).unwrap();
        sol.phi = m.grid().sample(|x| (std::f64::consts::PI * x[0]).cos());
        let at = |c: f64| point_term(&sol, &m, &Nucleus { position: [0.3, 0.0, 0.0], charge: c, site: None }).unwrap();
        let slope = (std::f64::consts::PI * 0.3).cos() - sol.theta;
        for c in [1e-3, 1e-5] {
            assert_relative_eq!(at(c) / c, slope, max_relative = 3.0 * c);
        }
    }
}
