//! Periodic TFW ground state by constrained energy minimization.
//!
//! The functional minimized over `u` with `∫u² = ∫m` is
//!
//! ```text
//! E[u] = ∫ |∇u|² + |u|^{10/3} + ½ (m − u²) φ[u],   −Δφ[u] = 4π (m − u² − mean)
//! ```
//!
//! where `m` is the smeared nuclear density. Its L² gradient is
//! `−2Δu + (10/3)|u|^{4/3}u − 2φu`, and at a constrained minimizer
//! `−Δu + (5/3)u^{7/3} − φu + θu = 0` with the multiplier `θ`.
//!
//! Steps are projected gradient steps preconditioned by the Fourier symbol of
//! the Hessian at the homogeneous state, `2|k|² + (40/9)ū^{2/3} + 16πū/|k|²`,
//! followed by backtracking, `u ← |u|` and exact renormalization.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::grid::{dot, Grid, ScalarField};
use crate::lattice::ChargeDistribution;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitStrategy {
    /// `u ≡ √(∫m / |cell|)`.
    Constant,
    /// Constant plus a smooth positive random modulation of relative size `amplitude`.
    Perturbed { amplitude: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target for the relative Euler–Lagrange residual `‖r‖/‖u‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Target for the relative energy change of the last accepted step.
    pub energy_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_backtracks: usize,
    pub init: InitStrategy,
    /// Keep the per-iteration log.
    pub record_log: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 2000,
            energy_tol: 1e-12,
            armijo: 1e-4,
            max_backtracks: 40,
            init: InitStrategy::Constant,
            record_log: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolverConfig { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub energy: f64,
    pub residual: f64,
    pub step: f64,
}

/// Converged (or last) state of a TFW solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TfwSolution {
    /// Square root of the electron density.
    pub u: ScalarField,
    /// Zero-mean electrostatic potential.
    pub phi: ScalarField,
    /// Multiplier of the charge constraint.
    pub theta: f64,
    /// Relative Euler–Lagrange residual.
    pub residual: f64,
    pub iterations: usize,
    pub energy: f64,
    pub log: Vec<IterRecord>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Input(#[from] Error),
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64, last: Box<TfwSolution> },
}

impl From<SolveError> for Error {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Input(e) => e,
            other => Error::Solver(other.to_string()),
        }
    }
}

fn potential(grid: &Grid, m: &[f64], u: &[f64]) -> Vec<f64> {
    let rhs: Vec<f64> = m.iter().zip(u).map(|(a, b)| FOUR_PI * (a - b * b)).collect();
    grid.inverse_laplacian_values(&rhs)
}

struct Terms {
    kinetic: f64,
    tf: f64,
    coulomb: f64,
    phi: Vec<f64>,
}

impl Terms {
    fn total(&self) -> f64 {
        self.kinetic + self.tf + self.coulomb
    }
}

fn evaluate(grid: &Grid, m: &[f64], u: &[f64]) -> Terms {
    let w = grid.weight();
    let phi = potential(grid, m, u);
    let kinetic = grid.dirichlet_energy(u);
    let tf = u.iter().map(|v| v.abs().powf(10.0 / 3.0)).sum::<f64>() * w;
    let coulomb = 0.5 * m.iter().zip(u).zip(&phi).map(|((a, b), p)| (a - b * b) * p).sum::<f64>() * w;
    Terms { kinetic, tf, coulomb, phi }
}

/// `−Δu + (5/3)|u|^{4/3}u − φu`, half the energy gradient.
fn half_gradient(grid: &Grid, u: &[f64], phi: &[f64]) -> Vec<f64> {
    let lap = grid.div_grad_values(u);
    u.iter()
        .zip(&lap)
        .zip(phi)
        .map(|((&v, &l), &p)| -l + (5.0 / 3.0) * v.abs().powf(4.0 / 3.0) * v - p * v)
        .collect()
}

/// The TFW energy of `u` (with `m` the smeared density), as minimized by [`solve`].
pub fn functional(u: &ScalarField, m: &ChargeDistribution) -> f64 {
    evaluate(m.grid(), &m.density().values, &u.values).total()
}

/// `δE/δu = −2Δu + (10/3)u^{7/3} − 2φ[u]u`.
pub fn energy_gradient(u: &ScalarField, m: &ChargeDistribution) -> ScalarField {
    let grid = m.grid();
    let phi = potential(grid, &m.density().values, &u.values);
    let g = half_gradient(grid, &u.values, &phi).into_iter().map(|v| 2.0 * v).collect();
    ScalarField { grid: grid.clone(), values: g }
}

fn rayleigh_theta(u: &[f64], half_grad: &[f64]) -> f64 {
    -dot(u, half_grad) / dot(u, u)
}

/// L² norms of the residuals of both Euler–Lagrange equations:
/// `−Δu + (5/3)u^{7/3} − φu + θu` and `−Δφ − 4π(m − u²)`.
pub fn el_residual(sol: &TfwSolution, m: &ChargeDistribution) -> (f64, f64) {
    let grid = m.grid();
    let hg = half_gradient(grid, &sol.u.values, &sol.phi.values);
    let w = grid.weight();
    let ru = hg.iter().zip(&sol.u.values).map(|(g, v)| (g + sol.theta * v).powi(2)).sum::<f64>() * w;
    let lap = grid.laplacian(&sol.phi);
    let rp = lap
        .values
        .iter()
        .zip(&m.density().values)
        .zip(&sol.u.values)
        .map(|((l, mm), v)| (-l - FOUR_PI * (mm - v * v)).powi(2))
        .sum::<f64>()
        * w;
    (ru.sqrt(), rp.sqrt())
}

/// Closed-form ground state for the constant density `c0`.
pub fn homogeneous_reference(grid: &Grid, c0: f64) -> Result<TfwSolution, Error> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidCharge(format!("homogeneous density {c0} must be positive")));
    }
    let u = grid.constant(c0.sqrt());
    let energy = c0.powf(5.0 / 3.0) * grid.volume();
    Ok(TfwSolution {
        u,
        phi: grid.zeros(),
        theta: -(5.0 / 3.0) * c0.powf(2.0 / 3.0),
        residual: 0.0,
        iterations: 0,
        energy,
        log: Vec::new(),
    })
}

fn initial_guess(grid: &Grid, mean: f64, init: &InitStrategy) -> Vec<f64> {
    let base = mean.sqrt();
    match init {
        InitStrategy::Constant => vec![base; grid.len()],
        InitStrategy::Perturbed { amplitude, seed } => {
            let d = grid.d();
            let phases: Vec<f64> = (0..6).map(|i| 2.0 * std::f64::consts::PI * crate::lattice::site_uniform(*seed, i)).collect();
            (0..grid.len())
                .map(|i| {
                    let s = grid.spec().fractional(i);
                    let mut wave = 0.0;
                    for a in 0..d {
                        let t = 2.0 * std::f64::consts::PI * s[a];
                        wave += (t + phases[a]).sin() + 0.5 * (2.0 * t + phases[a + 3]).cos();
                    }
                    base * (1.0 + amplitude * wave / (1.5 * d as f64))
                })
                .collect()
        }
    }
}

fn normalize(u: &mut [f64], w: f64, charge: f64) {
    for v in u.iter_mut() {
        *v = v.abs();
    }
    let norm = dot(u, u) * w;
    let s = (charge / norm).sqrt();
    for v in u.iter_mut() {
        *v *= s;
    }
}

/// Minimizes the TFW energy for the smeared density of `m`.
pub fn solve(m: &ChargeDistribution, cfg: &SolverConfig) -> Result<TfwSolution, SolveError> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Solver(format!("tolerance {} must be positive", cfg.tol)).into());
    }
    let grid = m.grid();
    let dens = &m.density().values;
    if dens.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidCharge("negative density".into()).into());
    }
    let charge = m.density().integrate();
    if !(charge > 0.0) {
        return Err(Error::InvalidCharge("total charge must be positive".into()).into());
    }
    let w = grid.weight();
    let mean = charge / grid.volume();

    let a0 = (40.0 / 9.0) * mean.powf(2.0 / 3.0);
    let coul = 16.0 * std::f64::consts::PI * mean;
    let precond = |v: &[f64]| grid.multiplier(v, |k2| if k2 == 0.0 { 1.0 / a0 } else { 1.0 / (2.0 * k2 + a0 + coul / k2) });

    let mut u = initial_guess(grid, mean, &cfg.init);
    normalize(&mut u, w, charge);
    let mut terms = evaluate(grid, dens, &u);
    let mut energy = terms.total();
    let mut log = Vec::new();
    let mut step = 1.0f64;
    let mut last_change = f64::INFINITY;
    let mut iter = 0;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    loop {
        let hg = half_gradient(grid, &u, &terms.phi);
        let theta = rayleigh_theta(&u, &hg);
        let r2: f64 = hg.iter().zip(&u).map(|(g, v)| (g + theta * v).powi(2)).sum();
        let residual = (r2 / dot(&u, &u)).sqrt();
        if cfg.record_log {
            log.push(IterRecord { iter, energy, residual, step });
        }
        let converged = residual <= cfg.tol && (iter == 0 || last_change <= cfg.energy_tol);
        if converged || iter >= cfg.max_iter {
            let sol = TfwSolution {
                u: ScalarField { grid: grid.clone(), values: u },
                phi: ScalarField { grid: grid.clone(), values: terms.phi },
                theta,
                residual,
                iterations: iter,
                energy,
                log,
            };
            if converged {
                return Ok(sol);
            }
            return Err(SolveError::NotConverged { iterations: iter, residual, last: Box::new(sol) });
        }
        iter += 1;

        let g: Vec<f64> = hg.iter().map(|v| 2.0 * v).collect();
        let pg = precond(&g);
        let pu = precond(&u);
        let alpha = dot(&u, &pg) / dot(&u, &pu);
        let sd: Vec<f64> = pg.iter().zip(&pu).map(|(a, b)| -(a - alpha * b)).collect();
        let dir = sd;
        let slope = dot(&g, &dir) * w;

        // energies below this are indistinguishable from rounding
        let scale = terms.kinetic.abs() + terms.tf.abs() + terms.coulomb.abs();
        let floor = 1e-13 * scale;
        // Barzilai–Borwein estimate from the previous step, safeguarded below
        let mut t = match &previous {
            Some((u_old, sd_old)) => {
                let s: Vec<f64> = u.iter().zip(u_old).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = sd_old.iter().zip(&dir).map(|(a, b)| a - b).collect();
                let bb = dot(&s, &s) / dot(&s, &y);
                if bb.is_finite() && bb > 0.0 { bb.clamp(0.5 * step, 1e4) } else { (2.0 * step).min(1.0) }
            }
            None => 1.0,
        };
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let mut trial: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            normalize(&mut trial, w, charge);
            let tt = evaluate(grid, dens, &trial);
            let e = tt.total();
            let armijo = e <= energy + cfg.armijo * t * slope;
            let rounding = (t * slope).abs() <= floor && e <= energy + floor;
            if armijo || rounding {
                accepted = Some((trial, tt, e));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, tt, e)) => {
                let u_prev = std::mem::replace(&mut u, trial);
                let dir_prev = dir;
                last_change = ((energy - e) / energy.abs().max(1e-300)).abs();
                terms = tt;
                energy = e;
                step = t;
                previous = Some((u_prev, dir_prev));
            }
            None => {
                let sol = TfwSolution {
                    u: ScalarField { grid: grid.clone(), values: u },
                    phi: ScalarField { grid: grid.clone(), values: terms.phi },
                    theta,
                    residual,
                    iterations: iter,
                    energy,
                    log,
                };
                return Err(SolveError::NotConverged { iterations: iter, residual, last: Box::new(sol) });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{realize_charges, sample_periodic, BravaisLattice, EnsembleSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn homogeneous_unit_density() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(3), 2, 16, 1.0).unwrap();
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        assert!(sol.u.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(sol.phi.max_abs() < 1e-12);
        assert_abs_diff_eq!(sol.theta, -5.0 / 3.0, epsilon = 1e-12);
        assert!(sol.residual <= 1e-8);
    }

    #[test]
    fn homogeneous_scaling() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(2), 3, 16, 8.0).unwrap();
        let sol = solve(&m, &SolverConfig::default()).unwrap();
        let r = homogeneous_reference(m.grid(), 8.0).unwrap();
        assert_abs_diff_eq!(sol.theta, -20.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.u.values[0], 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert!(sol.u.sub(&r.u).max_abs() < 1e-8);
        assert!(homogeneous_reference(m.grid(), 0.0).is_err());
    }

    #[test]
    fn rejects_empty_charge() {
        let m = ChargeDistribution::homogeneous(BravaisLattice::cubic(1), 2, 16, 0.0).unwrap();
        assert!(matches!(solve(&m, &SolverConfig::default()), Err(SolveError::Input(Error::InvalidCharge(_)))));
    }

    #[test]
    fn homogeneous_residuals_vanish() {
        let grid = ChargeDistribution::homogeneous(BravaisLattice::cubic(2), 2, 16, 2.0).unwrap();
        let r = homogeneous_reference(grid.grid(), 2.0).unwrap();
        let (ru, rp) = el_residual(&r, &grid);
        assert!(ru <= 1e-10 && rp <= 1e-10);
        let g = energy_gradient(&r.u, &grid);
        let mean = g.mean();
        assert!(g.values.iter().all(|v| (v - mean).abs() < 1e-8));
    }

    #[test]
    fn residual_phi_of_zero_potential() {
        let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.5, 0.25).unwrap();
        let s = sample_periodic(&spec, 2, 3).unwrap();
        let m = realize_charges(&s, &spec.grid(2, 16).unwrap()).unwrap();
        let mut sol = homogeneous_reference(m.grid(), m.density().integrate() / m.grid().volume()).unwrap();
        sol.phi = m.grid().zeros();
        let (_, rp) = el_residual(&sol, &m);
        let expected = m.density().zip_map(&sol.u, |a, b| FOUR_PI * (a - b * b)).l2_norm();
        assert_abs_diff_eq!(rp, expected, epsilon = 1e-10 * expected);
    }

    #[test]
    fn max_iter_exhaustion_reports_state() {
        let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.5, 0.25).unwrap();
        let s = sample_periodic(&spec, 4, 3).unwrap();
        let m = realize_charges(&s, &spec.grid(4, 32).unwrap()).unwrap();
        let cfg = SolverConfig { max_iter: 1, ..Default::default() };
        match solve(&m, &cfg) {
            Err(SolveError::NotConverged { iterations, last, .. }) => {
                assert_eq!(iterations, 1);
                assert!(last.residual > 1e-8);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
