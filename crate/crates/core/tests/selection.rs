use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfwlab::energy::NucleusMode;
use tfwlab::lattice::{sample_periodic, BravaisLattice, EnsembleSpec, SpeciesTable};
use tfwlab::selection::{mean_shift_check, multilevel_remainder_diag, run_plain, Pipeline};
use tfwlab::solver::SolverConfig;
use tfwlab::stats::{correlation_report, Descriptor};

fn pipeline(spec: EnsembleSpec) -> Pipeline {
    Pipeline::new(spec, 8, SolverConfig::with_tol(1e-10), NucleusMode::Smeared)
}

#[test]
fn full_window_leaves_the_energy_unchanged() {
    let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.5, 0.25).unwrap();
    let p = pipeline(spec.clone());
    let s = sample_periodic(&spec, 4, 1).unwrap();
    let diffs = multilevel_remainder_diag(&p, &s, [2.0, 2.0, 0.0], &[2, 5]).unwrap();
    assert!(diffs.iter().all(|d| d.1 <= 1e-10), "{diffs:?}");
}

#[test]
fn homogeneous_unit_background_is_its_own_extension() {
    let spec = EnsembleSpec::new(BravaisLattice::cubic(2), SpeciesTable::default(), 0.25, 0.25, 1.0).unwrap();
    let p = pipeline(spec.clone());
    let s = sample_periodic(&spec, 6, 0).unwrap();
    let diffs = multilevel_remainder_diag(&p, &s, [3.0, 3.0, 0.0], &[0, 1, 2]).unwrap();
    assert!(diffs.iter().all(|d| d.1 <= 1e-12), "{diffs:?}");
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let spec = EnsembleSpec::binary(1, (1.0, 2.0), 0.5, 0.25).unwrap();
    let descs = [Descriptor::Species { a: 0 }];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_plain(&pipeline(spec.clone()), 4, 12, 5, &descs).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn report_is_invariant_under_stream_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(f64, Vec<f64>)> = (0..500)
        .map(|_| {
            let f: f64 = rng.random();
            (f + 0.3 * rng.random::<f64>(), vec![f, rng.random()])
        })
        .collect();
    let mut perm = pairs.clone();
    perm.reverse();
    perm.swap(3, 400);
    let a = correlation_report(&pairs, 4, 2).unwrap();
    let b = correlation_report(&perm, 4, 2).unwrap();
    assert!((a.explained - b.explained).abs() <= 1e-12);
    assert!((a.var_e - b.var_e).abs() <= 1e-12 * a.var_e);
}

#[test]
fn symmetric_event_preserves_the_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws: Vec<(f64, f64)> = (0..4000).map(|_| (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let plain: Vec<f64> = draws.iter().map(|d| d.0 + d.1).collect();
    // |F| ≤ 0.2 is symmetric under (E, F) → (−E, −F)
    let selected: Vec<f64> = draws.iter().filter(|d| d.1.abs() <= 0.2).map(|d| d.0 + d.1).collect();
    assert!(mean_shift_check(&plain, &selected, 1).unwrap().pass);
}
