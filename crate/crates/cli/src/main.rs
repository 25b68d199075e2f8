//! `tfwlab`: batch experiments on random TFW lattices.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver
//! non-convergence, 3 selection starvation.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use tfwlab::energy::energy_rve;
use tfwlab::lattice::{realize_charges, sample_periodic, site_index};
use tfwlab::locality::{self, Edit, PerturbationSpec};
use tfwlab::selection::{run_experiment, Pipeline, SelectionConfig};
use tfwlab::solver::{solve, SolveError, SolverConfig};
use tfwlab::Error;

use config::{EditEntry, ExperimentConfig};
use output::{line_chart, num, opt, Output, Provenance};

#[derive(Parser)]
#[command(name = "tfwlab", version, about = "TFW ground states, RVE sampling and locality diagnostics for random lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the seed of the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also writes SVG charts.
    #[arg(long, global = true)]
    svg: bool,
    /// Overrides the output directory of the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state and energy of one sample.
    Solve { config: PathBuf },
    /// Plain and selected Monte Carlo at every cell size.
    Mc { config: PathBuf },
    /// Decay of the response to a local edit.
    Locality { config: PathBuf },
}

enum Failure {
    Config(String),
    Solver(String),
    Starved(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Starved(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) | Failure::Starved(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver(_) | Error::ResidualTooLarge { .. } => Failure::Solver(e.to_string()),
            Error::SelectionStarved { .. } => Failure::Starved(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Config(e)
    }
}

struct Run {
    cfg: ExperimentConfig,
    out: Output,
    svg: bool,
}

fn load(cli: &Cli, path: &PathBuf, command: &str) -> Result<Run, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = config::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let out = Output::new(&dir, Provenance::new(&text, cfg.seed, command))?;
    let svg = cli.svg || cfg.output.svg;
    Ok(Run { cfg, out, svg })
}

fn require_l(cfg: &ExperimentConfig) -> Result<usize, Failure> {
    cfg.grid.l.ok_or_else(|| Failure::Config("grid.l is required for this command".into()))
}

fn log_rows(log: &[tfwlab::solver::IterRecord]) -> Vec<Vec<String>> {
    log.iter().map(|r| vec![r.iter.to_string(), num(r.energy), num(r.residual), num(r.step)]).collect()
}

fn cmd_solve(run: &Run) -> Result<(), Failure> {
    let cfg = &run.cfg;
    let spec = cfg.ensemble.spec()?;
    let l = require_l(cfg)?;
    let sample = sample_periodic(&spec, l, cfg.seed)?;
    let grid = spec.grid(l, cfg.grid.points_per_unit * l)?;
    let m = realize_charges(&sample, &grid)?;
    let solver = SolverConfig { record_log: true, ..cfg.solver.config() };
    let log_header = ["iter", "energy", "residual", "step"].map(String::from);
    match solve(&m, &solver) {
        Ok(sol) => {
            let mut e = energy_rve(&sol, &m, cfg.solver.mode)?;
            e.seed = Some(cfg.seed);
            run.out.json("energy.json", &e)?;
            run.out.csv("iterations.csv", &log_header, &log_rows(&sol.log))?;
            for (name, f) in [("u.bin", &sol.u), ("phi.bin", &sol.phi)] {
                let mut buf = Vec::new();
                tfwlab::io::write_field(&mut buf, f)?;
                run.out.bytes(name, &buf)?;
            }
            let slice = tfwlab::io::line_slice(&sol.u, 0, [0; 3])?;
            let rows: Vec<Vec<String>> = slice.iter().map(|(x, v)| vec![num(*x), num(*v)]).collect();
            run.out.csv("u_slice.csv", &["x".into(), "u".into()], &rows)?;
            if run.svg {
                let log: Vec<(f64, f64)> = sol.log.iter().map(|r| (r.iter as f64, r.residual)).collect();
                run.out.text("residual.svg", &line_chart("solver residual", "iteration", "residual", &[("residual".into(), log)], false, true))?;
            }
            println!("converged in {} iterations, E/volume = {:.12}", sol.iterations, e.per_volume);
            Ok(())
        }
        Err(SolveError::NotConverged { iterations, residual, last }) => {
            #[derive(Serialize)]
            struct Diagnostics {
                converged: bool,
                iterations: usize,
                residual: f64,
                energy: f64,
                theta: f64,
            }
            let diag = Diagnostics { converged: false, iterations, residual, energy: last.energy, theta: last.theta };
            run.out.json("energy.json", &diag)?;
            run.out.csv("iterations.csv", &log_header, &log_rows(&last.log))?;
            Err(Failure::Solver(format!("no convergence after {iterations} iterations (residual {residual:e})")))
        }
        Err(SolveError::Input(e)) => Err(e.into()),
    }
}

fn cmd_mc(run: &Run) -> Result<(), Failure> {
    let cfg = &run.cfg;
    let sel = cfg.selection.as_ref().ok_or_else(|| Failure::Config("the mc command needs a [selection] section".into()))?;
    let ls = cfg.grid.l_list.clone().or(cfg.grid.l.map(|l| vec![l])).ok_or_else(|| Failure::Config("grid.l_list is required for mc".into()))?;
    let spec = cfg.ensemble.spec()?;
    let pipeline = Pipeline::new(spec, cfg.grid.points_per_unit, cfg.solver.config(), cfg.solver.mode);
    let sc = SelectionConfig {
        delta: sel.delta,
        descriptors: sel.descriptors.clone(),
        criterion: sel.criterion,
        plain_budget: sel.plain_budget,
        selected_budget: sel.selected_budget,
        pilot: sel.pilot,
        candidate_cap: sel.candidate_cap,
        ls,
        seed: cfg.seed,
    };
    let (report, streams) = run_experiment(&pipeline, &sc)?;
    let nf = sc.descriptors.len();
    let mut header: Vec<String> = ["candidate_index", "accepted", "E"].map(String::from).to_vec();
    header.extend((1..=nf).map(|i| format!("F_{i}")));
    header.push("solver_iters".into());
    for s in &streams {
        for (kind, records) in [("plain", &s.plain), ("selected", &s.selected.records)] {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let mut row = vec![r.candidate.to_string(), (r.accepted as u8).to_string(), opt(r.energy)];
                    row.extend(r.stats.iter().map(|v| num(*v)));
                    row.push(r.iterations.map(|i| i.to_string()).unwrap_or_default());
                    row
                })
                .collect();
            run.out.csv(&format!("{kind}_L{}.csv", s.l), &header, &rows)?;
        }
    }
    run.out.json("report.json", &report)?;
    if run.svg {
        let plain: Vec<(f64, f64)> = report.levels.iter().filter_map(|l| l.var_plain.map(|v| (l.l as f64, v))).collect();
        let selected: Vec<(f64, f64)> = report.levels.iter().filter_map(|l| l.var_selected.map(|v| (l.l as f64, v))).collect();
        let chart = line_chart("energy variance", "L", "Var E", &[("plain".into(), plain), ("selected".into(), selected)], true, true);
        run.out.text("variance.svg", &chart)?;
    }
    for lv in &report.levels {
        let verdict = |b: Option<bool>| match b {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "n/a",
        };
        println!(
            "L={}: acceptance {:.3}, variance ratio {}, mean shift {}",
            lv.l,
            lv.acceptance_rate,
            verdict(lv.variance_check.as_ref().map(|v| v.verdict())),
            verdict(lv.mean_shift.as_ref().map(|v| v.pass))
        );
        for f in &lv.flags {
            eprintln!("warning: L={}: {f}", lv.l);
        }
    }
    if let Some(c) = &report.clt {
        println!("CLT slope {:.3} ± {:.3}", c.fit.slope, c.fit.slope_se);
    }
    for f in &report.flags {
        eprintln!("warning: {f}");
    }
    Ok(())
}

#[derive(Serialize)]
struct FitOutcome {
    fit: Option<locality::DecayFit>,
    /// Why no fit was possible.
    flag: Option<String>,
}

impl From<tfwlab::Result<locality::DecayFit>> for FitOutcome {
    fn from(r: tfwlab::Result<locality::DecayFit>) -> Self {
        match r {
            Ok(f) => {
                let flag = (!f.decaying).then(|| "non-decaying profile".to_string());
                FitOutcome { fit: Some(f), flag }
            }
            Err(e) => FitOutcome { fit: None, flag: Some(format!("no signal: {e}")) },
        }
    }
}

#[derive(Serialize)]
struct LocalityReport {
    center: [f64; 3],
    w_max: f64,
    psi_max: f64,
    w: FitOutcome,
    psi: FitOutcome,
    windows: FitOutcome,
}

fn cmd_locality(run: &Run) -> Result<(), Failure> {
    let cfg = &run.cfg;
    let pert_cfg = cfg.perturbation.as_ref().ok_or_else(|| Failure::Config("the locality command needs a [perturbation] section".into()))?;
    let spec = cfg.ensemble.spec()?;
    let l = require_l(cfg)?;
    let d = spec.d();
    let base = sample_periodic(&spec, l, pert_cfg.sample_seed.unwrap_or(cfg.seed))?;
    let to3 = |v: &[f64]| -> Result<[f64; 3], Failure> {
        if v.len() != d {
            return Err(Failure::Config(format!("expected {d} coordinates, got {}", v.len())));
        }
        let mut x = [0.0; 3];
        x[..d].copy_from_slice(v);
        Ok(x)
    };
    let edits = pert_cfg
        .edits
        .iter()
        .map(|e| match e {
            EditEntry::Site { coords, species } => {
                let c: Vec<f64> = coords.iter().map(|&v| v as f64).collect();
                let x = to3(&c)?;
                Ok(Edit::Site { site: site_index(d, l, [x[0] as i64, x[1] as i64, x[2] as i64]), species: *species })
            }
            EditEntry::Bump { center, amplitude, width } => Ok(Edit::Bump { center: to3(center)?, amplitude: *amplitude, width: *width }),
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let p = PerturbationSpec::new(base, edits)?;
    let grid = spec.grid(l, cfg.grid.points_per_unit * l)?;
    let pert = locality::perturb_and_solve(&p, &grid, &cfg.solver.config())?;

    let shell_rows = |shells: &[tfwlab::grid::Shell]| -> Vec<Vec<String>> {
        shells.iter().map(|s| vec![num(s.inner_radius), num(locality::shell_rms(s, grid.weight())), num(s.l2), num(s.max), s.points.to_string()]).collect()
    };
    let shell_header = ["radius", "rms", "norm", "max", "points"].map(String::from);
    let r_max = l as f64 / 2.0 - 1.0;
    let mut fits = Vec::new();
    for (name, f) in [("w", &pert.w), ("psi", &pert.psi)] {
        let shells = grid.shell_profile(f, &pert.center, pert_cfg.shell_width)?;
        run.out.csv(&format!("shells_{name}.csv"), &shell_header, &shell_rows(&shells))?;
        fits.push((shells.clone(), FitOutcome::from(locality::decay_fit(&shells, grid.weight(), pert_cfg.floor, 1.0, r_max))));
    }
    let windows = locality::window_decay_study(&pert, cfg.solver.mode)?;
    let rows: Vec<Vec<String>> = windows
        .iter()
        .map(|w| {
            let mut r: Vec<String> = w.site[..d].iter().map(|v| num(*v)).collect();
            r.extend([num(w.distance), num(w.e1), num(w.e2), num(w.diff)]);
            r
        })
        .collect();
    let mut header: Vec<String> = ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect();
    header.extend(["distance", "E1", "E2", "diff"].map(String::from));
    run.out.csv("windows.csv", &header, &rows)?;
    let envelope = locality::upper_envelope(&windows);
    let env_fit = FitOutcome::from(locality::envelope_fit(&envelope, pert_cfg.floor, 1.0, r_max));
    if run.svg {
        let series = |s: &[tfwlab::grid::Shell]| s.iter().map(|s| (s.inner_radius, locality::shell_rms(s, grid.weight()))).collect::<Vec<_>>();
        let chart = line_chart(
            "shell RMS of the response",
            "radius",
            "RMS",
            &[("w".into(), series(&fits[0].0)), ("psi".into(), series(&fits[1].0))],
            false,
            true,
        );
        run.out.text("decay.svg", &chart)?;
        run.out.text("windows.svg", &line_chart("window energy envelope", "distance", "|dE|", &[("envelope".into(), envelope.clone())], false, true))?;
    }
    let mut it = fits.into_iter().map(|f| f.1);
    let report = LocalityReport {
        center: pert.center,
        w_max: pert.w.max_abs(),
        psi_max: pert.psi.max_abs(),
        w: it.next().unwrap(),
        psi: it.next().unwrap(),
        windows: env_fit,
    };
    run.out.json("decay.json", &report)?;
    for (name, f) in [("w", &report.w), ("psi", &report.psi), ("windows", &report.windows)] {
        match (&f.fit, &f.flag) {
            (Some(fit), _) => println!("{name}: rate {:.4}, R² {:.4}", fit.rate, fit.r2),
            (None, Some(flag)) => eprintln!("warning: {name}: {flag}"),
            _ => {}
        }
    }
    Ok(())
}

fn init_workers() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("TFWLAB_WORKERS") {
        let n: usize = v.parse().map_err(|_| Failure::Config(format!("TFWLAB_WORKERS = {v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_workers().and_then(|_| match &cli.command {
        Command::Solve { config } => load(&cli, config, "solve").and_then(|r| cmd_solve(&r)),
        Command::Mc { config } => load(&cli, config, "mc").and_then(|r| cmd_mc(&r)),
        Command::Locality { config } => load(&cli, config, "locality").and_then(|r| cmd_locality(&r)),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
