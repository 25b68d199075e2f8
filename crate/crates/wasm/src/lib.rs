//! Browser bindings for three small two-dimensional experiments. The
//! computations live in plain functions so they run and test natively; the
//! exported wrappers only convert errors.

use tfwlab::energy::{energy_rve, NucleusMode};
use tfwlab::lattice::{derive_seed, realize_charges, sample_periodic, site_index, EnsembleSpec, PeriodicSample};
use tfwlab::locality::{field_decay, perturb_and_solve, Edit, PerturbationSpec, DEFAULT_FLOOR};
use tfwlab::selection::{expectations, gaussian_acceptance, Criterion, Selector};
use tfwlab::solver::{solve, SolverConfig};
use tfwlab::stats::{evaluate, Descriptor};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 128;

fn ensemble(p_first: f64) -> Result<EnsembleSpec, String> {
    if !(0.0..=1.0).contains(&p_first) {
        return Err(format!("probability {p_first} outside [0, 1]"));
    }
    EnsembleSpec::binary(2, (1.0, 2.0), p_first, 0.25).map_err(|e| e.to_string())
}

fn points(l: usize, per_unit: usize) -> Result<usize, String> {
    let n = l * per_unit;
    if n > MAX_POINTS {
        return Err(format!("{n} grid points per axis; the demo allows at most {MAX_POINTS}"));
    }
    Ok(n)
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct Heatmap {
    /// Grid points per axis; `values` is row-major `n × n`.
    pub n: usize,
    pub values: Vec<f64>,
    /// Occupancy of the lattice sites, row-major `l × l`.
    pub species: Vec<u32>,
    pub energy_per_volume: f64,
    pub theta: f64,
    pub iterations: usize,
}

pub fn heatmap(l: usize, p_first: f64, seed: u64, per_unit: usize) -> Result<Heatmap, String> {
    let spec = ensemble(p_first)?;
    let sample = sample_periodic(&spec, l, seed).map_err(|e| e.to_string())?;
    let grid = spec.grid(l, points(l, per_unit)?).map_err(|e| e.to_string())?;
    let m = realize_charges(&sample, &grid).map_err(|e| e.to_string())?;
    let sol = solve(&m, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let e = energy_rve(&sol, &m, NucleusMode::Smeared).map_err(|e| e.to_string())?;
    Ok(Heatmap {
        n: grid.n(),
        values: sol.u.values.iter().map(|v| v * v).collect(),
        species: sample.occupancy.iter().map(|&s| s as u32).collect(),
        energy_per_volume: e.per_volume,
        theta: sol.theta,
        iterations: sol.iterations,
    })
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct AcceptanceHistogram {
    /// Bin edges of the standardized statistic, `counts.len() + 1` entries.
    pub edges: Vec<f64>,
    pub counts: Vec<u32>,
    pub accepted: usize,
    pub candidates: usize,
    pub rate: f64,
    /// Acceptance of a standard normal statistic at the same δ.
    pub gaussian_rate: f64,
}

/// Screens candidates by the standardized density of the first species
/// without solving.
pub fn acceptance(l: usize, p_first: f64, delta: f64, candidates: usize, seed: u64) -> Result<AcceptanceHistogram, String> {
    let spec = ensemble(p_first)?;
    let descs = [Descriptor::Species { a: 0 }];
    let ex = expectations(&spec, &descs, l, 0, seed).map_err(|e| e.to_string())?;
    let (mean, sd) = (ex.mean[0], ex.sd[0]);
    if !(sd > 0.0) {
        return Err("the statistic is constant for this probability".into());
    }
    let sel = Selector::new(Criterion::Standardized, delta, ex, l, 2).map_err(|e| e.to_string())?;
    let bins = 32;
    let edges: Vec<f64> = (0..=bins).map(|k| -4.0 + 8.0 * k as f64 / bins as f64).collect();
    let mut counts = vec![0u32; bins];
    let mut accepted = 0;
    for i in 0..candidates as u64 {
        let s: PeriodicSample = sample_periodic(&spec, l, derive_seed(seed, i)).map_err(|e| e.to_string())?;
        let f = evaluate(&s, &descs).map_err(|e| e.to_string())?.values;
        accepted += sel.accepts(&f) as usize;
        let z = (f[0] - mean) / sd;
        let k = ((z + 4.0) / 8.0 * bins as f64).floor();
        if (0.0..bins as f64).contains(&k) {
            counts[k as usize] += 1;
        }
    }
    Ok(AcceptanceHistogram {
        edges,
        counts,
        accepted,
        candidates,
        rate: accepted as f64 / candidates.max(1) as f64,
        gaussian_rate: gaussian_acceptance(delta),
    })
}

#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct DecayProfile {
    /// Shell centres measured from the edited site.
    pub radii: Vec<f64>,
    pub w_rms: Vec<f64>,
    pub psi_rms: Vec<f64>,
    /// Fitted decay rates per lattice unit.
    pub w_rate: f64,
    pub psi_rate: f64,
}

/// Response to swapping the species of the central site. Fails when a
/// profile has too few shells above the noise floor.
pub fn decay(l: usize, p_first: f64, seed: u64, per_unit: usize) -> Result<DecayProfile, String> {
    let spec = ensemble(p_first)?;
    let sample = sample_periodic(&spec, l, seed).map_err(|e| e.to_string())?;
    let c = l as i64 / 2;
    let site = site_index(2, l, [c, c, 0]);
    let species = 1 - sample.occupancy[site];
    let p = PerturbationSpec::new(sample, vec![Edit::Site { site, species }]).map_err(|e| e.to_string())?;
    let grid = spec.grid(l, points(l, per_unit)?).map_err(|e| e.to_string())?;
    let pert = perturb_and_solve(&p, &grid, &SolverConfig::with_tol(1e-10)).map_err(|e| e.to_string())?;
    let width = 0.25;
    let (sw, fw) = field_decay(&pert, &pert.w, width, DEFAULT_FLOOR).map_err(|e| e.to_string())?;
    let fp = field_decay(&pert, &pert.psi, width, DEFAULT_FLOOR).map_err(|e| e.to_string())?;
    Ok(DecayProfile {
        radii: sw.iter().map(|s| s.inner_radius + 0.5 * s.width).collect(),
        w_rms: sw.iter().map(|s| s.l2).collect(),
        psi_rms: fp.0.iter().map(|s| s.l2).collect(),
        w_rate: fw.rate,
        psi_rate: fp.1.rate,
    })
}

#[wasm_bindgen(js_name = solveHeatmap)]
pub fn solve_heatmap(l: usize, p_first: f64, seed: u32, per_unit: usize) -> Result<Heatmap, JsError> {
    heatmap(l, p_first, seed as u64, per_unit).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = acceptanceHistogram)]
pub fn acceptance_histogram(l: usize, p_first: f64, delta: f64, candidates: usize, seed: u32) -> Result<AcceptanceHistogram, JsError> {
    acceptance(l, p_first, delta, candidates, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = decayProfile)]
pub fn decay_profile(l: usize, p_first: f64, seed: u32, per_unit: usize) -> Result<DecayProfile, JsError> {
    decay(l, p_first, seed as u64, per_unit).map_err(|e| JsError::new(&e))
}
