use statrs::distribution::{ChiSquared, ContinuousCDF};
use tfwlab::lattice::{realize_charges, restrict_extend, sample_periodic, EnsembleSpec, LatticeBox};

#[test]
fn species_frequency_matches_binomial_law() {
    let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.5, 0.25).unwrap();
    let runs = 10_000u64;
    let sites = 256.0;
    let zeros: usize = (0..runs).map(|s| sample_periodic(&spec, 16, s).unwrap().occupancy.iter().filter(|&&k| k == 0).count()).sum();
    let freq = zeros as f64 / (runs as f64 * sites);
    let se = (0.25 / (runs as f64 * sites)).sqrt();
    assert!((freq - 0.5).abs() <= 3.0 * se, "{freq}");
}

#[test]
fn contiguous_pairs_follow_the_product_law() {
    let spec = EnsembleSpec::binary(1, (1.0, 2.0), 0.3, 0.25).unwrap();
    let runs = 100_000u64;
    let mut counts = [0u64; 4];
    for s in 0..runs {
        let smp = sample_periodic(&spec, 4, s).unwrap();
        counts[smp.occupancy[1] * 2 + smp.occupancy[2]] += 1;
    }
    let p = [0.3, 0.7];
    let chi2: f64 = (0..4)
        .map(|c| {
            let e = runs as f64 * p[c / 2] * p[c % 2];
            (counts[c] as f64 - e).powi(2) / e
        })
        .sum();
    let pval = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
    assert!(pval > 0.001, "chi2 {chi2}, p {pval}");
}

#[test]
fn realization_conserves_charge() {
    let spec = EnsembleSpec::binary(3, (1.0, 3.0), 0.4, 0.25).unwrap();
    let s = sample_periodic(&spec, 2, 4).unwrap();
    for n in [16, 24, 32] {
        let m = realize_charges(&s, &spec.grid(2, n).unwrap()).unwrap();
        let total = m.density().integrate();
        assert!((total - m.total_charge()).abs() <= 1e-10 * total);
    }
}

#[test]
fn restrict_extend_is_idempotent_on_random_windows() {
    let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.5, 0.25).unwrap();
    let s = sample_periodic(&spec, 6, 3).unwrap();
    let m = realize_charges(&s, &spec.grid(6, 48).unwrap()).unwrap();
    for (lo, hi) in [([0.5, 1.5, 0.0], [3.5, 4.5, 0.0]), ([4.5, 5.5, 0.0], [7.5, 8.5, 0.0])] {
        let w = LatticeBox::new(2, lo, hi).unwrap();
        let once = restrict_extend(&m, &w).unwrap();
        let twice = restrict_extend(&once, &w).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.nuclei.len(), 9);
    }
}
