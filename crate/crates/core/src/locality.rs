//! Response of the TFW ground state to a local change of the nuclear charge.
//!
//! `w = u₁ − u₂` and `ψ` is the difference of the effective potentials
//! `φ − θ`, which removes the constant offset the zero-mean gauge would put on
//! `φ₁ − φ₂` when the two cells carry different total charge.

use serde::{Deserialize, Serialize};

use crate::energy::{EnergyDensity, NucleusMode};
use crate::error::{Error, Result};
use crate::grid::{CutoffEta, Grid, ScalarField, Shell};
use crate::lattice::{realize_charges, site_coords, ChargeDistribution, LatticeBox, PeriodicSample};
use crate::solver::{solve, SolverConfig, TfwSolution};

/// Shells or windows below this value are treated as numerical noise.
pub const DEFAULT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Edit {
    /// Replace the species at lattice site `site`.
    Site { site: usize, species: usize },
    /// Add a Gaussian `amplitude·exp(−|x − center|²/(2 width²))` to `m_c`.
    Bump { center: [f64; 3], amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub base: PeriodicSample,
    pub edits: Vec<Edit>,
}

impl PerturbationSpec {
    pub fn new(base: PeriodicSample, edits: Vec<Edit>) -> Result<Self> {
        if edits.is_empty() {
            return Err(Error::InvalidPerturbation("edit list is empty".into()));
        }
        for e in &edits {
            match *e {
                Edit::Site { site, species } => {
                    if site >= base.sites() {
                        return Err(Error::InvalidPerturbation(format!("site {site} outside the {} sites of the cell", base.sites())));
                    }
                    if species >= base.spec.species.len() {
                        return Err(Error::UnknownSpecies(species));
                    }
                }
                Edit::Bump { amplitude, width, .. } => {
                    if !(width > 0.0) || !amplitude.is_finite() {
                        return Err(Error::InvalidPerturbation(format!("bump width {width}, amplitude {amplitude}")));
                    }
                }
            }
        }
        Ok(PerturbationSpec { base, edits })
    }

    /// Cartesian positions of the edits.
    pub fn edit_positions(&self) -> Vec<[f64; 3]> {
        let d = self.base.d();
        self.edits
            .iter()
            .map(|e| match *e {
                Edit::Site { site, .. } => {
                    let c = site_coords(d, self.base.l, site);
                    self.base.spec.lattice.to_cartesian(&[c[0] as f64, c[1] as f64, c[2] as f64])
                }
                Edit::Bump { center, .. } => center,
            })
            .collect()
    }

    /// Base and edited charge distributions on `grid`.
    pub fn realize(&self, grid: &Grid) -> Result<(ChargeDistribution, ChargeDistribution)> {
        let m1 = realize_charges(&self.base, grid)?;
        let mut occ = self.base.occupancy.clone();
        for e in &self.edits {
            if let Edit::Site { site, species } = *e {
                occ[site] = species;
            }
        }
        let edited = PeriodicSample::from_occupancy(self.base.spec.clone(), self.base.l, occ, self.base.seed)?;
        let m2 = realize_charges(&edited, grid)?;
        let cell = grid.cell();
        let mut cont = m2.continuous.clone();
        for e in &self.edits {
            if let Edit::Bump { center, amplitude, width } = *e {
                let bump = grid.sample(|x| {
                    let r = cell.periodic_distance(x, &center);
                    amplitude * (-r * r / (2.0 * width * width)).exp()
                });
                cont = cont.zip_map(&bump, |a, b| a + b);
            }
        }
        if cont.min() < 0.0 {
            return Err(Error::InvalidPerturbation(format!("edited continuous density reaches {}", cont.min())));
        }
        let m2 = m2.with_continuous(cont)?;
        Ok((m1, m2))
    }
}

/// Both solutions of a perturbation experiment and their differences.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub m1: ChargeDistribution,
    pub m2: ChargeDistribution,
    pub sol1: TfwSolution,
    pub sol2: TfwSolution,
    pub w: ScalarField,
    pub psi: ScalarField,
    /// Centroid of the edit positions.
    pub center: [f64; 3],
}

fn effective_potential(sol: &TfwSolution) -> ScalarField {
    sol.phi.map(|p| p - sol.theta)
}

pub fn perturbation_from(m1: ChargeDistribution, m2: ChargeDistribution, center: [f64; 3], cfg: &SolverConfig) -> Result<Perturbation> {
    let (s1, s2) = rayon::join(|| solve(&m1, cfg), || solve(&m2, cfg));
    let (sol1, sol2) = (s1?, s2?);
    let w = sol1.u.sub(&sol2.u);
    let psi = effective_potential(&sol1).sub(&effective_potential(&sol2));
    Ok(Perturbation { m1, m2, sol1, sol2, w, psi, center })
}

/// Solves the base and edited problems with the same settings.
pub fn perturb_and_solve(p: &PerturbationSpec, grid: &Grid, cfg: &SolverConfig) -> Result<Perturbation> {
    let (m1, m2) = p.realize(grid)?;
    let pos = p.edit_positions();
    let mut center = [0.0; 3];
    for x in &pos {
        for a in 0..3 {
            center[a] += x[a] / pos.len() as f64;
        }
    }
    perturbation_from(m1, m2, center, cfg)
}

/// Log-linear fit `log y ≈ intercept − rate·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Abscissae of the first and last point used.
    pub range: (f64, f64),
    pub points: usize,
    pub floor: f64,
    /// `rate > 0` and `r2 ≥ 0.5`.
    pub decaying: bool,
}

/// Weighted least squares of `log y` against `x` over points with `y > floor`.
pub fn log_linear_fit(points: &[(f64, f64, f64)], floor: f64, min_points: usize) -> Result<DecayFit> {
    let pts: Vec<(f64, f64, f64)> = points.iter().copied().filter(|p| p.1 > floor && p.2 > 0.0).collect();
    if pts.len() < min_points {
        return Err(Error::Fit(format!("{} points above the floor {floor:e}, need {min_points}", pts.len())));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1.ln()).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1.ln() - my)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1.ln() - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 0.0 };
    let rate = -slope;
    Ok(DecayFit {
        rate,
        intercept: my - slope * mx,
        r2,
        range: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
        floor,
        decaying: rate > 0.0 && r2 >= 0.5,
    })
}

/// RMS of a shell, which removes the growth of the shell volume with radius.
pub fn shell_rms(s: &Shell, weight: f64) -> f64 {
    if s.points == 0 {
        0.0
    } else {
        s.l2 / (s.points as f64 * weight).sqrt()
    }
}

/// Fits the shell RMS against the inner radius over shells contained in
/// `[r_min, r_max]`, weighting each shell by its number of grid points.
pub fn decay_fit(profile: &[Shell], weight: f64, floor: f64, r_min: f64, r_max: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64, f64)> = profile
        .iter()
        .filter(|s| s.points > 0 && s.inner_radius >= r_min - 1e-9 && s.inner_radius + s.width <= r_max + 1e-9)
        .map(|s| (s.inner_radius, shell_rms(s, weight), s.points as f64))
        .collect();
    log_linear_fit(&pts, floor, 4)
}

/// Shell profile of `f` about the perturbation centre and its decay fit over
/// `[1, L/2 − 1]`, beyond which periodic images contaminate the profile.
pub fn field_decay(pert: &Perturbation, f: &ScalarField, width: f64, floor: f64) -> Result<(Vec<Shell>, DecayFit)> {
    let grid = pert.m1.grid();
    let shells = grid.shell_profile(f, &pert.center, width)?;
    let r_max = pert.m1.l as f64 / 2.0 - 1.0;
    let fit = decay_fit(&shells, grid.weight(), floor, 1.0, r_max)?;
    Ok((shells, fit))
}

/// Cutoff vanishing near the nuclei whose charge differs between the two
/// distributions; identically one when there are none.
pub fn difference_cutoff(m1: &ChargeDistribution, m2: &ChargeDistribution, rho: f64) -> Result<CutoffEta> {
    let key = |x: &[f64; 3]| x.map(|v| (v * 1e9).round() as i64);
    let charge_at = |m: &ChargeDistribution, x: &[f64; 3]| -> f64 {
        m.nuclei.iter().filter(|n| key(&n.position) == key(x)).map(|n| n.charge).sum()
    };
    let mut centers: Vec<[f64; 3]> = Vec::new();
    for n in m1.nuclei.iter().chain(&m2.nuclei) {
        if charge_at(m1, &n.position) != charge_at(m2, &n.position) && !centers.iter().any(|c| key(c) == key(&n.position)) {
            centers.push(n.position);
        }
    }
    CutoffEta::new(rho, centers)
}

/// Both sides of the weighted estimate, `(LHS, RHS)` with
/// `LHS = ∫ (w² + |∇w|² + ψ² + η|∇ψ|² + η² Σ|∂ᵢⱼψ|²) e^{−2γ|x−y|}` and
/// `RHS = ∫_{η<1} (w² + ψ²) e^{−2γ|x−y|} + ∫ (δm_c)² e^{−2γ|x−y|}`.
pub fn weighted_norm(pert: &Perturbation, eta: &CutoffEta, gamma: f64, y: &[f64; 3]) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidPerturbation(format!("weight exponent {gamma} must be positive")));
    }
    let grid = pert.w.grid.clone();
    let cell = grid.cell().clone();
    let weight = grid.sample(|x| (-2.0 * gamma * cell.periodic_distance(x, y)).exp());
    let eta_f = eta.field(&grid);
    let gw = grid.gradient(&pert.w);
    let gp = grid.gradient(&pert.psi);
    let hp = grid.hessian(&pert.psi);
    let dmc = pert.m1.continuous.sub(&pert.m2.continuous);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..grid.len() {
        let (w, p, e) = (pert.w.values[i], pert.psi.values[i], eta_f.values[i]);
        let grad_w: f64 = gw.iter().map(|g| g.values[i].powi(2)).sum();
        let grad_p: f64 = gp.iter().map(|g| g.values[i].powi(2)).sum();
        let hess: f64 = hp.iter().map(|((a, b), h)| if a == b { 1.0 } else { 2.0 } * h.values[i].powi(2)).sum();
        lhs += (w * w + grad_w + p * p + e * grad_p + e * e * hess) * weight.values[i];
        let near = if e < 1.0 { w * w + p * p } else { 0.0 };
        rhs += (near + dmc.values[i].powi(2)) * weight.values[i];
    }
    Ok((lhs * grid.weight(), rhs * grid.weight()))
}

/// Energy change of one unit window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowDiff {
    /// Lattice coordinates of the window centre.
    pub site: [f64; 3],
    /// Periodic distance from the window centre to the perturbation centre.
    pub distance: f64,
    pub e1: f64,
    pub e2: f64,
    pub diff: f64,
}

/// Energy differences of the unit cubes centred on every lattice site,
/// sorted by distance from the perturbation.
pub fn window_decay_study(pert: &Perturbation, mode: NucleusMode) -> Result<Vec<WindowDiff>> {
    let d1 = EnergyDensity::new(&pert.sol1, &pert.m1, mode)?;
    let d2 = EnergyDensity::new(&pert.sol2, &pert.m2, mode)?;
    let d = pert.m1.d();
    let l = pert.m1.l;
    let cell = pert.m1.grid().cell().clone();
    let lat = &pert.m1.lattice;
    let mut out = (0..crate::lattice::site_count(d, l))
        .map(|i| {
            let c = site_coords(d, l, i);
            let site = [c[0] as f64, c[1] as f64, c[2] as f64];
            let q = LatticeBox::centered(d, site, 0.5)?;
            let (e1, e2) = (d1.window(&q)?, d2.window(&q)?);
            let distance = cell.periodic_distance(&lat.to_cartesian(&site), &pert.center);
            Ok(WindowDiff { site, distance, e1, e2, diff: (e1 - e2).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(out)
}

/// Upper envelope `d ↦ max{|ΔE_Q| : dist(Q) ≥ d}` at each distinct distance.
pub fn upper_envelope(windows: &[WindowDiff]) -> Vec<(f64, f64)> {
    let mut dists: Vec<f64> = windows.iter().map(|w| w.distance).collect();
    dists.sort_by(f64::total_cmp);
    dists.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    dists
        .into_iter()
        .map(|r| (r, windows.iter().filter(|w| w.distance >= r - 1e-9).map(|w| w.diff).fold(0.0, f64::max)))
        .collect()
}

/// Log-linear fit of the upper envelope over distances `[r_min, r_max]`.
pub fn envelope_fit(envelope: &[(f64, f64)], floor: f64, r_min: f64, r_max: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64, f64)> =
        envelope.iter().filter(|p| p.0 >= r_min - 1e-9 && p.0 <= r_max + 1e-9).map(|p| (p.0, p.1, 1.0)).collect();
    log_linear_fit(&pts, floor, 3)
}
