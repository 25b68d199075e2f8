use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tfwlab::lattice::{sample_periodic, site_coords, EnsembleSpec, PeriodicSample};
use tfwlab::stats::{
    analytic_variance, correlation_report, evaluate, expected_stats, motif_density, nn_contact_density, species_density, Descriptor,
    MotifEntry,
};

fn binary(d: usize) -> EnsembleSpec {
    EnsembleSpec::binary(d, (1.0, 2.0), 0.5, 0.25).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn contact_expectation_matches_monte_carlo() {
    let spec = EnsembleSpec::binary(2, (1.0, 2.0), 0.3, 0.25).unwrap();
    let descs = [Descriptor::Contact { a: 0, b: 1 }, Descriptor::Contact { a: 1, b: 1 }, Descriptor::Species { a: 0 }];
    let expected = expected_stats(&spec, &descs).unwrap();
    let samples: Vec<Vec<f64>> = (0..100_000u64).map(|s| evaluate(&sample_periodic(&spec, 4, s).unwrap(), &descs).unwrap().values).collect();
    for (k, e) in expected.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|r| r[k]).collect();
        let (m, se) = mean_and_se(&col);
        assert!((m - e).abs() <= 3.0 * se, "{:?}: {m} vs {e} (se {se})", descs[k]);
    }
}

#[test]
fn species_density_variance_matches_binomial() {
    let spec = binary(2);
    let d = Descriptor::Species { a: 0 };
    let xs: Vec<f64> = (0..10_000u64).map(|s| species_density(&sample_periodic(&spec, 4, s).unwrap(), 0).unwrap()).collect();
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let var = dev.iter().sum::<f64>() / (n - 1.0);
    // standard error of the variance estimate from the fourth moment
    let m4 = dev.iter().map(|v| v * v).sum::<f64>() / n;
    let se = ((m4 - var * var) / n).sqrt();
    let exact = analytic_variance(&spec, &d, 4).unwrap();
    assert!((var - exact).abs() <= 3.0 * se, "{var} vs {exact} (se {se})");
}

#[test]
fn statistics_are_invariant_under_origin_shift() {
    let spec = binary(2);
    let s = sample_periodic(&spec, 6, 77).unwrap();
    let shifted: Vec<usize> = (0..s.sites())
        .map(|i| {
            let c = site_coords(2, 6, i);
            s.species_at([c[0] + 2, c[1] + 5, 0])
        })
        .collect();
    let t = PeriodicSample::from_occupancy(spec, 6, shifted, 0).unwrap();
    let descs = [
        Descriptor::Species { a: 1 },
        Descriptor::Contact { a: 0, b: 1 },
        Descriptor::Motif { pattern: vec![MotifEntry { offset: [0, 0, 0], species: 0 }, MotifEntry { offset: [1, 1, 0], species: 1 }] },
    ];
    assert_eq!(evaluate(&s, &descs).unwrap().values, evaluate(&t, &descs).unwrap().values);
}

#[test]
fn contact_density_is_bounded_by_species_density() {
    let spec = binary(3);
    for seed in 0..200 {
        let s = sample_periodic(&spec, 4, seed).unwrap();
        for a in 0..2 {
            let f1 = species_density(&s, a).unwrap();
            for b in 0..2 {
                let f2 = nn_contact_density(&s, a, b).unwrap();
                assert!((0.0..=f1).contains(&f2));
            }
        }
    }
}

#[test]
fn motif_matches_brute_force_scan() {
    let spec = binary(2);
    let pattern = vec![
        MotifEntry { offset: [0, 0, 0], species: 1 },
        MotifEntry { offset: [1, 0, 0], species: 0 },
        MotifEntry { offset: [0, -1, 0], species: 1 },
    ];
    for seed in 0..20 {
        let s = sample_periodic(&spec, 4, seed).unwrap();
        let grid: Vec<Vec<usize>> = (0..4).map(|x| (0..4).map(|y| s.occupancy[x * 4 + y]).collect()).collect();
        let mut count = 0;
        for x in 0..4usize {
            for y in 0..4usize {
                if grid[x][y] == 1 && grid[(x + 1) % 4][y] == 0 && grid[x][(y + 3) % 4] == 1 {
                    count += 1;
                }
            }
        }
        assert_eq!(motif_density(&s, &pattern).unwrap(), count as f64 / 16.0);
    }
}

#[test]
fn independent_streams_explain_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs: Vec<(f64, Vec<f64>)> = (0..10_000).map(|_| (rng.random::<f64>(), vec![rng.random::<f64>()])).collect();
    let r = correlation_report(&pairs, 4, 2).unwrap();
    assert!(r.explained <= 0.01, "{}", r.explained);
}

#[test]
fn bivariate_gaussian_explained_fraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rho: f64 = 0.6;
    let pairs: Vec<(f64, Vec<f64>)> = (0..100_000)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (a, vec![rho * a + (1.0 - rho * rho).sqrt() * b])
        })
        .collect();
    let r = correlation_report(&pairs, 4, 2).unwrap();
    assert!((r.explained - 0.36).abs() <= 0.01, "{}", r.explained);
    assert!(r.kappa >= 1.0);
    for i in 0..r.cov_ff.len() {
        for j in 0..r.cov_ff.len() {
            assert_eq!(r.cov_ff[i][j], r.cov_ff[j][i]);
        }
    }
}

#[test]
fn explained_fraction_is_invariant_under_affine_rescaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<(f64, Vec<f64>)> = (0..2000)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            let z: f64 = StandardNormal.sample(&mut rng);
            (x + 0.5 * y, vec![x, y + 0.3 * z])
        })
        .collect();
    let base = correlation_report(&pairs, 4, 2).unwrap().explained;
    let scaled: Vec<(f64, Vec<f64>)> = pairs.iter().map(|(e, f)| (*e, vec![f[0] * 1e-3 + 7.0, f[1] * 250.0 - 3.0])).collect();
    let other = correlation_report(&scaled, 4, 2).unwrap().explained;
    assert!((base - other).abs() <= 1e-10, "{base} vs {other}");
}
