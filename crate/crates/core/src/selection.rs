//! Plain and selection-based representative-volume Monte Carlo.
//!
//! A candidate `i` of a run with master seed `s` is the periodic sample with
//! seed `derive_seed(s, i)`. Its statistics are evaluated first; the TFW
//! problem is solved only for accepted candidates.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::energy::{energy_rve, NucleusMode};
use crate::error::{Error, Result};
use crate::lattice::{derive_seed, realize_charges, restrict_extend, sample_periodic, EnsembleSpec, LatticeBox, PeriodicSample};
use crate::solver::{solve, SolverConfig};
use crate::stats::{analytic_variance, correlation_report, evaluate, expected_stats, CorrelationReport, Descriptor};

/// Number of bootstrap resamples behind every standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `|F_i − E F_i| ≤ δ L^{-d/2}`.
    Raw,
    /// `|F_i − E F_i| ≤ δ √Var F_i`.
    #[default]
    Standardized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationSource {
    Analytic,
    Pilot,
}

/// Centre and scale of the selection window for each statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub mean_source: ExpectationSource,
    pub sd_source: ExpectationSource,
}

fn pilot_seed(seed: u64) -> u64 {
    derive_seed(seed, u64::MAX)
}

/// Analytic expectations where available, otherwise a pilot run of
/// `pilot` samples (statistics only, no solves) drawn from an independent
/// seed stream.
pub fn expectations(spec: &EnsembleSpec, descriptors: &[Descriptor], l: usize, pilot: usize, seed: u64) -> Result<Expectations> {
    let mean = expected_stats(spec, descriptors)?;
    let analytic_sd: Option<Vec<f64>> = descriptors.iter().map(|d| analytic_variance(spec, d, l).map(f64::sqrt)).collect();
    let (sd, sd_source) = match analytic_sd {
        Some(sd) => (sd, ExpectationSource::Analytic),
        None => {
            if pilot < 2 {
                return Err(Error::TooFewSamples { got: pilot, need: 2 });
            }
            let ps = pilot_seed(seed);
            let rows: Vec<Vec<f64>> = (0..pilot as u64)
                .into_par_iter()
                .map(|i| Ok(evaluate(&sample_periodic(spec, l, derive_seed(ps, i))?, descriptors)?.values))
                .collect::<Result<_>>()?;
            let k = descriptors.len();
            let sd = (0..k)
                .map(|j| {
                    let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                    variance(&col).sqrt()
                })
                .collect();
            (sd, ExpectationSource::Pilot)
        }
    };
    Ok(Expectations { mean, sd, mean_source: ExpectationSource::Analytic, sd_source })
}

/// Solver, grid resolution and energy mode shared by all samples of a run;
/// counts the PDE solves it performs.
#[derive(Debug)]
pub struct Pipeline {
    pub spec: EnsembleSpec,
    /// Grid points per lattice unit along each axis.
    pub resolution: usize,
    pub solver: SolverConfig,
    pub mode: NucleusMode,
    solves: AtomicUsize,
}

impl Clone for Pipeline {
    fn clone(&self) -> Self {
        Pipeline::new(self.spec.clone(), self.resolution, self.solver.clone(), self.mode)
    }
}

/// One candidate of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub candidate: u64,
    pub seed: u64,
    pub accepted: bool,
    /// `E^RVE_L`, when the candidate was solved successfully.
    pub energy: Option<f64>,
    pub stats: Vec<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

impl Pipeline {
    pub fn new(spec: EnsembleSpec, resolution: usize, solver: SolverConfig, mode: NucleusMode) -> Self {
        Pipeline { spec, resolution, solver, mode, solves: AtomicUsize::new(0) }
    }

    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    /// `E^RVE_L` and solver iterations of one periodic sample.
    pub fn energy(&self, sample: &PeriodicSample) -> Result<(f64, usize)> {
        let grid = self.spec.grid(sample.l, self.resolution * sample.l)?;
        let m = realize_charges(sample, &grid)?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        let sol = solve(&m, &self.solver)?;
        let e = energy_rve(&sol, &m, self.mode)?;
        Ok((e.per_volume, sol.iterations))
    }

    fn solve_record(&self, mut rec: SampleRecord, sample: &PeriodicSample) -> SampleRecord {
        match self.energy(sample) {
            Ok((e, it)) => {
                rec.energy = Some(e);
                rec.iterations = Some(it);
            }
            Err(err) => rec.error = Some(err.to_string()),
        }
        rec
    }

    fn candidate(&self, l: usize, seed: u64, i: u64, descriptors: &[Descriptor]) -> Result<(PeriodicSample, Vec<f64>)> {
        let s = sample_periodic(&self.spec, l, derive_seed(seed, i))?;
        let f = evaluate(&s, descriptors)?.values;
        Ok((s, f))
    }
}

/// Every candidate `0..budget`, solved. Solver failures are recorded per
/// sample and do not stop the run.
pub fn run_plain(p: &Pipeline, l: usize, budget: usize, seed: u64, descriptors: &[Descriptor]) -> Result<Vec<SampleRecord>> {
    if budget < 2 {
        return Err(Error::TooFewSamples { got: budget, need: 2 });
    }
    (0..budget as u64)
        .into_par_iter()
        .map(|i| {
            let (s, f) = p.candidate(l, seed, i, descriptors)?;
            let rec = SampleRecord { candidate: i, seed: s.seed, accepted: true, energy: None, stats: f, iterations: None, error: None };
            Ok(p.solve_record(rec, &s))
        })
        .collect()
}

/// Acceptance test of a statistic vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selector {
    pub criterion: Criterion,
    pub delta: f64,
    pub expectations: Expectations,
    /// Half-widths of the acceptance window per statistic.
    pub half_width: Vec<f64>,
}

impl Selector {
    pub fn new(criterion: Criterion, delta: f64, expectations: Expectations, l: usize, d: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) && !(delta == 0.0 && criterion == Criterion::Raw) {
            return Err(Error::InvalidStatistic(format!("delta = {delta} outside (0, 1]")));
        }
        let half_width = match criterion {
            Criterion::Raw => vec![delta * (l as f64).powf(-(d as f64) / 2.0); expectations.mean.len()],
            Criterion::Standardized => expectations.sd.iter().map(|s| delta * s).collect(),
        };
        Ok(Selector { criterion, delta, expectations, half_width })
    }

    pub fn accepts(&self, f: &[f64]) -> bool {
        f.iter().zip(&self.expectations.mean).zip(&self.half_width).all(|((x, m), h)| (x - m).abs() <= *h * (1.0 + 1e-12))
    }
}

/// Outcome of a selected run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedRun {
    /// All candidates examined, in index order; only accepted ones carry energies.
    pub records: Vec<SampleRecord>,
    pub candidates: usize,
    pub accepted: usize,
    /// The run stopped at the candidate cap before reaching its budget.
    pub exhausted: bool,
}

impl SelectedRun {
    pub fn acceptance_rate(&self) -> f64 {
        if self.candidates == 0 {
            0.0
        } else {
            self.accepted as f64 / self.candidates as f64
        }
    }

    pub fn accepted_records(&self) -> impl Iterator<Item = &SampleRecord> {
        self.records.iter().filter(|r| r.accepted)
    }
}

/// Statistics of candidates `0..cap` are screened in order until `budget`
/// are accepted; only accepted candidates are solved.
pub fn run_selected(
    p: &Pipeline,
    l: usize,
    selector: &Selector,
    budget: usize,
    cap: usize,
    seed: u64,
    descriptors: &[Descriptor],
) -> Result<SelectedRun> {
    let mut records = Vec::new();
    let mut accepted = 0;
    let batch = 256u64;
    let mut next = 0u64;
    let cap = cap as u64;
    while accepted < budget && next < cap {
        let end = (next + batch).min(cap);
        let screened: Vec<(PeriodicSample, Vec<f64>)> =
            (next..end).into_par_iter().map(|i| p.candidate(l, seed, i, descriptors)).collect::<Result<_>>()?;
        for (k, (s, f)) in screened.into_iter().enumerate() {
            if accepted >= budget {
                break;
            }
            let ok = selector.accepts(&f);
            accepted += ok as usize;
            let rec = SampleRecord { candidate: next + k as u64, seed: s.seed, accepted: ok, energy: None, stats: f, iterations: None, error: None };
            records.push((rec, s));
        }
        next = end;
    }
    let candidates = records.len();
    if accepted == 0 {
        return Err(Error::SelectionStarved { candidates });
    }
    let solved: Vec<SampleRecord> =
        records.into_par_iter().map(|(rec, s)| if rec.accepted { p.solve_record(rec, &s) } else { rec }).collect();
    Ok(SelectedRun { records: solved, candidates, accepted, exhausted: accepted < budget })
}

/// Exact law of a finite ensemble: every occupancy configuration of the
/// `L`-cell with its probability, statistics and energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumerated {
    pub occupancy: Vec<usize>,
    pub probability: f64,
    pub stats: Vec<f64>,
    pub energy: f64,
}

pub fn enumerate_ensemble(p: &Pipeline, l: usize, descriptors: &[Descriptor]) -> Result<Vec<Enumerated>> {
    let s = p.spec.species.len();
    let sites = crate::lattice::site_count(p.spec.d(), l);
    let total = (s as f64).powi(sites as i32);
    if total > 1e5 {
        return Err(Error::InvalidStatistic(format!("{total} configurations are too many to enumerate")));
    }
    (0..total as usize)
        .into_par_iter()
        .map(|code| {
            let mut occ = Vec::with_capacity(sites);
            let mut c = code;
            for _ in 0..sites {
                occ.push(c % s);
                c /= s;
            }
            let probability = occ.iter().map(|&k| p.spec.species.entries[k].probability).product();
            let sample = PeriodicSample::from_occupancy(p.spec.clone(), l, occ.clone(), 0)?;
            let stats = evaluate(&sample, descriptors)?.values;
            let (energy, _) = p.energy(&sample)?;
            Ok(Enumerated { occupancy: occ, probability, stats, energy })
        })
        .collect()
}

/// Mean of the selected law over an enumerated ensemble, and the probability
/// of the acceptance event.
pub fn selected_law_mean(configs: &[Enumerated], selector: &Selector) -> Result<(f64, f64)> {
    let (mut mass, mut acc) = (0.0, 0.0);
    for c in configs.iter().filter(|c| selector.accepts(&c.stats)) {
        mass += c.probability;
        acc += c.probability * c.energy;
    }
    if mass == 0.0 {
        return Err(Error::SelectionStarved { candidates: configs.len() });
    }
    Ok((acc / mass, mass))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

fn resample<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> Vec<T> {
    (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())].clone()).collect()
}

fn sd(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Bootstrap standard error of a statistic of one stream.
pub fn bootstrap_se(xs: &[f64], seed: u64, stat: impl Fn(&[f64]) -> f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reps: Vec<f64> = (0..BOOTSTRAP_RESAMPLES).map(|_| stat(&resample(&mut rng, xs))).collect();
    sd(&reps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    pub var_plain: f64,
    pub var_selected: f64,
    pub ratio: f64,
    pub ratio_se: f64,
    pub explained: f64,
    pub delta: f64,
    /// `1 − (1 − δ²)|ρ̂|²`.
    pub bound: f64,
    /// Bootstrap standard error of `ratio − bound`, resampling both streams jointly.
    pub combined_se: f64,
    /// `ratio ≤ bound + 3·combined_se`.
    pub pass: bool,
    /// `ratio < 1 − 3·ratio_se`; required when `|ρ̂|² ≥ 0.1`.
    pub significant_reduction: bool,
    pub reduction_required: bool,
}

impl VarianceCheck {
    pub fn verdict(&self) -> bool {
        self.pass && (!self.reduction_required || self.significant_reduction)
    }
}

fn explained_of(pairs: &[(f64, Vec<f64>)]) -> f64 {
    // the dimensions only enter r_Var, which is not used here
    correlation_report(pairs, 1, 1).map(|r| r.explained).unwrap_or(0.0)
}

/// Empirical variance ratio of selected to plain energies against the bound
/// `1 − (1 − δ²)|ρ̂|²`, with `|ρ̂|²` estimated from the plain pairs.
pub fn variance_reduction_check(plain: &[(f64, Vec<f64>)], selected: &[f64], delta: f64, seed: u64) -> Result<VarianceCheck> {
    for (name, len) in [("plain", plain.len()), ("selected", selected.len())] {
        if len < 100 {
            return Err(Error::TooFewSamples { got: len, need: 100 }).map_err(|e| Error::InvalidStatistic(format!("{name} stream: {e}")));
        }
    }
    let pe: Vec<f64> = plain.iter().map(|p| p.0).collect();
    let var_plain = variance(&pe);
    if !(var_plain > 0.0) {
        return Err(Error::Degenerate("plain energies have zero variance".into()));
    }
    let var_selected = variance(selected);
    let ratio = var_selected / var_plain;
    let explained = correlation_report(plain, 1, 1)?.explained;
    let bound = 1.0 - (1.0 - delta * delta) * explained;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut gaps = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let bp = resample(&mut rng, plain);
        let bs = resample(&mut rng, selected);
        let vp = variance(&bp.iter().map(|p| p.0).collect::<Vec<_>>());
        let r = variance(&bs) / vp;
        ratios.push(r);
        gaps.push(r - (1.0 - (1.0 - delta * delta) * explained_of(&bp)));
    }
    let ratio_se = sd(&ratios);
    let combined_se = sd(&gaps);
    Ok(VarianceCheck {
        var_plain,
        var_selected,
        ratio,
        ratio_se,
        explained,
        delta,
        bound,
        combined_se,
        pass: ratio <= bound + 3.0 * combined_se,
        significant_reduction: ratio < 1.0 - 3.0 * ratio_se,
        reduction_required: explained >= 0.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanShiftCheck {
    pub mean_plain: f64,
    pub mean_selected: f64,
    pub shift: f64,
    /// Bootstrap standard error of the difference of means.
    pub combined_se: f64,
    pub pass: bool,
}

pub fn mean_shift_check(plain: &[f64], selected: &[f64], seed: u64) -> Result<MeanShiftCheck> {
    for len in [plain.len(), selected.len()] {
        if len < 100 {
            return Err(Error::TooFewSamples { got: len, need: 100 });
        }
    }
    let (mp, ms) = (mean(plain), mean(selected));
    let sp = bootstrap_se(plain, seed, mean);
    let ss = bootstrap_se(selected, derive_seed(seed, 1), mean);
    let combined_se = (sp * sp + ss * ss).sqrt();
    let shift = ms - mp;
    Ok(MeanShiftCheck { mean_plain: mp, mean_selected: ms, shift, combined_se, pass: shift.abs() <= 3.0 * combined_se })
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r2: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Fit(format!("need at least two paired points, got {n}")));
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope_se = if n > 2 { (sse / (n as f64 - 2.0) / sxx).sqrt() } else { f64::NAN };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    Ok(LineFit { slope, intercept, slope_se, r2 })
}

/// Slope of `log Var E` against `log L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltFit {
    /// `(L, Var E^RVE_L, samples)`.
    pub points: Vec<(usize, f64, usize)>,
    pub fit: LineFit,
}

pub fn clt_fit(points: Vec<(usize, f64, usize)>) -> Result<CltFit> {
    let mut ls: Vec<usize> = points.iter().map(|p| p.0).collect();
    ls.sort_unstable();
    ls.dedup();
    if ls.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 distinct L, got {}", ls.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Degenerate(format!("variance at L = {} is {}; log-log fit undefined", p.0, p.1)));
    }
    let x: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&x, &y)?;
    Ok(CltFit { points, fit })
}

/// Energies of successfully solved records.
pub fn energies(records: &[SampleRecord]) -> Vec<f64> {
    records.iter().filter(|r| r.accepted).filter_map(|r| r.energy).collect()
}

pub fn pairs(records: &[SampleRecord]) -> Vec<(f64, Vec<f64>)> {
    records.iter().filter(|r| r.accepted).filter_map(|r| r.energy.map(|e| (e, r.stats.clone()))).collect()
}

/// Plain runs at every `L` and the fitted CLT slope.
pub fn clt_scaling_study(p: &Pipeline, ls: &[usize], budget: usize, seed: u64, descriptors: &[Descriptor]) -> Result<CltFit> {
    let mut points = Vec::new();
    for (k, &l) in ls.iter().enumerate() {
        let e = energies(&run_plain(p, l, budget, derive_seed(seed, k as u64), descriptors)?);
        if e.len() < 2 {
            return Err(Error::TooFewSamples { got: e.len(), need: 2 });
        }
        points.push((l, variance(&e), e.len()));
    }
    clt_fit(points)
}

/// Window `y + [−(w + ½), w + ½)^d`, the full cell once it covers it.
pub fn radius_window(d: usize, l: usize, y: [f64; 3], w: usize) -> Result<LatticeBox> {
    if 2 * w + 1 >= l {
        return Ok(LatticeBox::full(d, l));
    }
    LatticeBox::centered(d, y, w as f64 + 0.5)
}

/// `|E_{Q₁(y)}[m] − E_{Q₁(y)}[m restricted to Q_w(y) and extended by 1]|`
/// for each radius `w`, with `Q₁(y)` the unit cube centred on site `y`.
pub fn multilevel_remainder_diag(p: &Pipeline, sample: &PeriodicSample, y: [f64; 3], radii: &[usize]) -> Result<Vec<(usize, f64)>> {
    let d = sample.d();
    let l = sample.l;
    let grid = p.spec.grid(l, p.resolution * l)?;
    let m = realize_charges(sample, &grid)?;
    let q1 = LatticeBox::centered(d, y, 0.5)?;
    let window_energy = |m: &crate::lattice::ChargeDistribution| -> Result<f64> {
        p.solves.fetch_add(1, Ordering::Relaxed);
        let sol = solve(m, &p.solver)?;
        crate::energy::windowed_energy(&sol, m, p.mode, &q1)
    };
    let base = window_energy(&m)?;
    radii
        .iter()
        .map(|&w| {
            let q = radius_window(d, l, y, w)?;
            q.check(d, l)?;
            let ext = restrict_extend(&m, &q)?;
            let e = if ext == m { base } else { window_energy(&ext)? };
            Ok((w, (e - base).abs()))
        })
        .collect()
}

/// `2Φ(δ) − 1`, the acceptance probability of a standardized Gaussian statistic.
pub fn gaussian_acceptance(delta: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    2.0 * n.cdf(delta) - 1.0
}

/// Acceptance rates of the standardized criterion over candidates `0..candidates`.
pub fn acceptance_rates(
    spec: &EnsembleSpec,
    l: usize,
    selector_for: impl Fn(f64) -> Result<Selector>,
    deltas: &[f64],
    candidates: usize,
    seed: u64,
    descriptors: &[Descriptor],
) -> Result<Vec<(f64, f64)>> {
    let stats: Vec<Vec<f64>> = (0..candidates as u64)
        .into_par_iter()
        .map(|i| Ok(evaluate(&sample_periodic(spec, l, derive_seed(seed, i))?, descriptors)?.values))
        .collect::<Result<_>>()?;
    deltas
        .iter()
        .map(|&delta| {
            let sel = selector_for(delta)?;
            let hits = stats.iter().filter(|f| sel.accepts(f)).count();
            Ok((delta, hits as f64 / candidates as f64))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub l: usize,
    pub plain_samples: usize,
    pub plain_failures: usize,
    pub mean_plain: Option<f64>,
    pub var_plain: Option<f64>,
    pub selected_samples: usize,
    pub selected_failures: usize,
    pub mean_selected: Option<f64>,
    pub var_selected: Option<f64>,
    pub candidates: usize,
    pub acceptance_rate: f64,
    pub half_width: Vec<f64>,
    pub correlation: Option<CorrelationReport>,
    pub variance_check: Option<VarianceCheck>,
    pub mean_shift: Option<MeanShiftCheck>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub delta: f64,
    pub criterion: Criterion,
    pub descriptors: Vec<Descriptor>,
    pub mean_source: ExpectationSource,
    pub sd_source: ExpectationSource,
    pub levels: Vec<LevelReport>,
    pub clt: Option<CltFit>,
    pub flags: Vec<String>,
}

/// Budgets and selection settings of a full experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub delta: f64,
    pub descriptors: Vec<Descriptor>,
    pub criterion: Criterion,
    pub plain_budget: usize,
    pub selected_budget: usize,
    pub pilot: usize,
    /// Largest number of candidates screened per level.
    pub candidate_cap: usize,
    pub ls: Vec<usize>,
    pub seed: u64,
}

/// Streams of one level, kept for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStreams {
    pub l: usize,
    pub plain: Vec<SampleRecord>,
    pub selected: SelectedRun,
}

fn summarize(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    match xs.len() {
        0 => (None, None),
        1 => (Some(xs[0]), None),
        _ => (Some(mean(xs)), Some(variance(xs))),
    }
}

/// Plain and selected runs at every `L` of `cfg`, with all checks.
pub fn run_experiment(p: &Pipeline, cfg: &SelectionConfig) -> Result<(RunReport, Vec<LevelStreams>)> {
    if cfg.descriptors.is_empty() {
        return Err(Error::InvalidStatistic("at least one descriptor is required".into()));
    }
    let d = p.spec.d();
    let mut levels = Vec::new();
    let mut streams = Vec::new();
    let mut flags = Vec::new();
    let mut sources = (ExpectationSource::Analytic, ExpectationSource::Analytic);
    for (k, &l) in cfg.ls.iter().enumerate() {
        let level_seed = derive_seed(cfg.seed, k as u64);
        let ex = expectations(&p.spec, &cfg.descriptors, l, cfg.pilot, level_seed)?;
        sources = (ex.mean_source, ex.sd_source);
        let selector = Selector::new(cfg.criterion, cfg.delta, ex, l, d)?;
        let mut lflags = Vec::new();
        let n = cfg.descriptors.len() as i32;
        if cfg.delta.powi(n) < (l as f64).powf(-(d as f64) / 2.0) {
            lflags.push(format!("delta^N = {:e} is below L^(-d/2); the acceptance guarantee is vacuous", cfg.delta.powi(n)));
        }
        let plain = run_plain(p, l, cfg.plain_budget, derive_seed(level_seed, 0), &cfg.descriptors)?;
        let selected = run_selected(p, l, &selector, cfg.selected_budget, cfg.candidate_cap, derive_seed(level_seed, 1), &cfg.descriptors)?;
        if selected.exhausted {
            lflags.push(format!("candidate cap reached with {} of {} accepted", selected.accepted, cfg.selected_budget));
        }
        let pp = pairs(&plain);
        let pe: Vec<f64> = pp.iter().map(|x| x.0).collect();
        let se = energies(&selected.records);
        let correlation = match correlation_report(&pp, l, d) {
            Ok(r) => {
                if r.near_singular {
                    lflags.push("covariance of the statistics is near singular; pseudo-inverse used".into());
                }
                Some(r)
            }
            Err(e) => {
                lflags.push(format!("correlation report unavailable: {e}"));
                None
            }
        };
        let variance_check = match variance_reduction_check(&pp, &se, cfg.delta, derive_seed(level_seed, 2)) {
            Ok(v) => Some(v),
            Err(e) => {
                lflags.push(format!("variance check unavailable: {e}"));
                None
            }
        };
        let mean_shift = match mean_shift_check(&pe, &se, derive_seed(level_seed, 3)) {
            Ok(v) => Some(v),
            Err(e) => {
                lflags.push(format!("mean-shift check unavailable: {e}"));
                None
            }
        };
        let (mean_plain, var_plain) = summarize(&pe);
        let (mean_selected, var_selected) = summarize(&se);
        if var_plain == Some(0.0) {
            lflags.push("degenerate variance: all plain energies are equal".into());
        }
        levels.push(LevelReport {
            l,
            plain_samples: pe.len(),
            plain_failures: plain.iter().filter(|r| r.error.is_some()).count(),
            mean_plain,
            var_plain,
            selected_samples: se.len(),
            selected_failures: selected.records.iter().filter(|r| r.error.is_some()).count(),
            mean_selected,
            var_selected,
            candidates: selected.candidates,
            acceptance_rate: selected.acceptance_rate(),
            half_width: selector.half_width.clone(),
            correlation,
            variance_check,
            mean_shift,
            flags: lflags,
        });
        streams.push(LevelStreams { l, plain, selected });
    }
    let clt_points: Vec<(usize, f64, usize)> = levels.iter().filter_map(|lv| lv.var_plain.map(|v| (lv.l, v, lv.plain_samples))).collect();
    let clt = if cfg.ls.len() >= 3 {
        match clt_fit(clt_points) {
            Ok(f) => Some(f),
            Err(e) => {
                flags.push(format!("CLT fit unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    let report = RunReport {
        delta: cfg.delta,
        criterion: cfg.criterion,
        descriptors: cfg.descriptors.clone(),
        mean_source: sources.0,
        sd_source: sources.1,
        levels,
        clt,
        flags,
    };
    Ok((report, streams))
}
