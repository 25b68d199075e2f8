use tfwlab::energy::NucleusMode;
use tfwlab::lattice::{sample_periodic, site_coords, site_index, BravaisLattice, EnsembleSpec, SpeciesTable};
use tfwlab::locality::{
    difference_cutoff, field_decay, perturb_and_solve, perturbation_from, weighted_norm, window_decay_study, Edit, PerturbationSpec,
    DEFAULT_FLOOR,
};
use tfwlab::solver::SolverConfig;

fn flip(l: usize, n: usize, tol: f64) -> tfwlab::locality::Perturbation {
    let spec = EnsembleSpec::binary(3, (1.0, 2.0), 0.5, 0.25).unwrap();
    let mut s = sample_periodic(&spec, l, 8).unwrap();
    let c = l as i64 / 2;
    let site = site_index(3, l, [c, c, c]);
    s.occupancy[site] = 0;
    let p = PerturbationSpec::new(s, vec![Edit::Site { site, species: 1 }]).unwrap();
    perturb_and_solve(&p, &spec.grid(l, n).unwrap(), &SolverConfig::with_tol(tol)).unwrap()
}

#[test]
fn response_peaks_at_the_edit() {
    let pert = flip(6, 48, 1e-10);
    let grid = pert.w.grid.clone();
    let (imax, _) = pert.w.values.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
    let dist = grid.cell().periodic_distance(&grid.position(imax), &pert.center);
    assert!(dist <= 1.0, "max of |w| at distance {dist}");
}

#[test]
fn swapping_the_pair_negates_the_response() {
    let tol = 1e-10;
    let a = flip(4, 32, tol);
    let b = perturbation_from(a.m2.clone(), a.m1.clone(), a.center, &SolverConfig::with_tol(tol)).unwrap();
    let ws = a.w.zip_map(&b.w, |x, y| x + y).max_abs();
    let ps = a.psi.zip_map(&b.psi, |x, y| x + y).max_abs();
    assert!(ws <= 2.0 * tol && ps <= 2.0 * tol, "{ws:e} {ps:e}");
}

#[test]
fn field_and_potential_decay_at_comparable_rates() {
    // L = 6 leaves only four shells in the fit window, where ψ still shows the neighbouring nuclei
    let pert = flip(8, 64, 1e-10);
    let (_, fw) = field_decay(&pert, &pert.w, 0.25, DEFAULT_FLOOR).unwrap();
    let (_, fp) = field_decay(&pert, &pert.psi, 0.25, DEFAULT_FLOOR).unwrap();
    assert!(fw.rate > 0.0 && fp.rate > 0.0);
    let ratio = fw.rate / fp.rate;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "w rate {} psi rate {}", fw.rate, fp.rate);
}

#[test]
fn cutoff_region_is_the_union_of_balls() {
    let pert = flip(4, 32, 1e-8);
    let rho = 0.25;
    let eta = difference_cutoff(&pert.m1, &pert.m2, rho).unwrap();
    assert_eq!(eta.centers.len(), 1);
    let grid = pert.w.grid.clone();
    let field = eta.field(&grid);
    for i in 0..grid.len() {
        let r = grid.cell().periodic_distance(&grid.position(i), &eta.centers[0]);
        assert_eq!(field.values[i] < 1.0, r < 2.0 * rho, "r = {r}");
    }
}

#[test]
fn weighted_estimate_has_a_uniform_constant_for_bumps() {
    let spec = EnsembleSpec::binary(3, (1.0, 2.0), 0.5, 0.25).unwrap();
    let s = sample_periodic(&spec, 4, 2).unwrap();
    let grid = spec.grid(4, 32).unwrap();
    let mut ratios = Vec::new();
    for center in [[2.0, 2.0, 2.0], [0.5, 1.5, 2.5]] {
        let p = PerturbationSpec::new(s.clone(), vec![Edit::Bump { center, amplitude: 0.5, width: 0.3 }]).unwrap();
        let pert = perturb_and_solve(&p, &grid, &SolverConfig::with_tol(1e-10)).unwrap();
        let eta = difference_cutoff(&pert.m1, &pert.m2, 0.25).unwrap();
        // no nucleus changes, so η ≡ 1 and the near-nucleus term is absent
        assert!(eta.centers.is_empty());
        for gamma in [0.1, 0.2] {
            let (lhs, rhs) = weighted_norm(&pert, &eta, gamma, &center).unwrap();
            assert!(lhs > 0.0 && rhs > 0.0);
            ratios.push(lhs / rhs);
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 10.0, "{ratios:?}");
}

#[test]
fn central_bump_on_homogeneous_background() {
    let spec = EnsembleSpec::new(BravaisLattice::cubic(3), SpeciesTable::default(), 0.25, 0.25, 1.0).unwrap();
    let l = 8;
    let s = sample_periodic(&spec, l, 0).unwrap();
    let p = PerturbationSpec::new(s, vec![Edit::Bump { center: [4.0, 4.0, 4.0], amplitude: 1.0, width: 0.3 }]).unwrap();
    let pert = perturb_and_solve(&p, &spec.grid(l, 64).unwrap(), &SolverConfig::with_tol(1e-10)).unwrap();
    let windows = window_decay_study(&pert, NucleusMode::Smeared).unwrap();
    let near = windows.iter().filter(|w| w.distance < 1e-9).map(|w| w.diff).fold(0.0, f64::max);
    let far = windows.iter().filter(|w| (w.distance - (l as f64 / 2.0 - 1.0)).abs() < 1e-9).map(|w| w.diff).fold(0.0, f64::max);
    assert!(near >= 10.0 * far, "near {near:e} far {far:e}");
    assert!(windows.iter().all(|w| site_coords(3, l, 0) == [0, 0, 0] && w.distance <= (3.0f64 * 16.0).sqrt() + 1e-9));
}
