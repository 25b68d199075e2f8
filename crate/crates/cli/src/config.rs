use std::path::PathBuf;

use serde::Deserialize;
use tfwlab::energy::NucleusMode;
use tfwlab::lattice::{BravaisLattice, EnsembleSpec, Species, SpeciesTable};
use tfwlab::selection::Criterion;
use tfwlab::solver::SolverConfig;
use tfwlab::stats::Descriptor;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub ensemble: EnsembleSection,
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub selection: Option<SelectionSection>,
    pub perturbation: Option<PerturbationSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub dimension: usize,
    /// Rows of F; the unit cubic lattice when absent.
    pub lattice: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub species: Vec<Species>,
    #[serde(default = "default_width")]
    pub sigma: f64,
    #[serde(default = "default_width")]
    pub rho_sep: f64,
    #[serde(default)]
    pub background: f64,
}

fn default_width() -> f64 {
    0.25
}

impl EnsembleSection {
    pub fn spec(&self) -> tfwlab::Result<EnsembleSpec> {
        let lattice = match &self.lattice {
            Some(rows) => BravaisLattice::from_rows(rows)?,
            None => BravaisLattice::cubic(self.dimension),
        };
        if lattice.d != self.dimension {
            return Err(tfwlab::Error::InvalidLattice(format!("lattice has {} rows but dimension is {}", lattice.d, self.dimension)));
        }
        EnsembleSpec::new(lattice, SpeciesTable::new(self.species.clone())?, self.sigma, self.rho_sep, self.background)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Grid points per lattice unit along each axis.
    #[serde(default = "default_resolution")]
    pub points_per_unit: usize,
    /// Cell size for `solve` and `locality`.
    pub l: Option<usize>,
    /// Cell sizes for `mc`.
    pub l_list: Option<Vec<usize>>,
}

fn default_resolution() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub mode: NucleusMode,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    2000
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { tol: default_tol(), max_iter: default_max_iter(), mode: NucleusMode::default() }
    }
}

impl SolverSection {
    pub fn config(&self) -> SolverConfig {
        SolverConfig { tol: self.tol, max_iter: self.max_iter, ..SolverConfig::default() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionSection {
    pub delta: f64,
    pub descriptors: Vec<Descriptor>,
    #[serde(default)]
    pub criterion: Criterion,
    pub plain_budget: usize,
    pub selected_budget: usize,
    #[serde(default)]
    pub pilot: usize,
    #[serde(default = "default_cap")]
    pub candidate_cap: usize,
}

fn default_cap() -> usize {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EditEntry {
    Site { coords: Vec<i64>, species: usize },
    Bump { center: Vec<f64>, amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub edits: Vec<EditEntry>,
    /// Seed of the base sample; the experiment seed when absent.
    pub sample_seed: Option<u64>,
    #[serde(default = "default_width")]
    pub shell_width: f64,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    tfwlab::locality::DEFAULT_FLOOR
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default)]
    pub svg: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("tfwlab-out")
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: default_dir(), svg: false }
    }
}

pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
