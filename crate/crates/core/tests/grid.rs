use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfwlab::grid::{eta_tilde, eta_tilde_derivative, Cell, CutoffEta, Grid, GridSpec, ScalarField};

fn square(n: usize, side: f64) -> Grid {
    Grid::new(GridSpec::new(Cell::cubic(2, side).unwrap(), n).unwrap())
}

/// Smooth zero-mean field from a handful of random low modes.
fn random_modes(grid: &Grid, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| (rng.random_range(1..4) as f64, rng.random_range(0..4) as f64, rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() - 0.5))
        .collect();
    let side = grid.cell().edge_length(0);
    grid.sample(|x| modes.iter().map(|&(a, b, ph, amp)| amp * (2.0 * PI * (a * x[0] + b * x[1]) / side + ph).sin()).sum())
}

/// Five-point second-order Laplacian, written independently of the spectral code.
fn fd_laplacian(f: &ScalarField, n: usize, h: f64) -> Vec<f64> {
    let at = |i: usize, j: usize| f.values[(i % n) * n + (j % n)];
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (at(i + 1, j) + at(i + n - 1, j) + at(i, j + 1) + at(i, j + n - 1) - 4.0 * at(i, j)) / (h * h);
        }
    }
    out
}

#[test]
fn poisson_against_finite_differences() {
    let side = 3.0;
    let mut errs = Vec::new();
    for n in [32, 64] {
        let grid = square(n, side);
        let rhs = random_modes(&grid, 42);
        let phi = grid.poisson_periodic(&rhs).unwrap();
        let back = grid.laplacian(&phi);
        let spectral_err = back.values.iter().zip(&rhs.values).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        assert!(spectral_err <= 1e-10 * rhs.max_abs());
        let fd = fd_laplacian(&phi, n, side / n as f64);
        errs.push(fd.iter().zip(&rhs.values).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max));
    }
    // second order: halving h divides the error by four
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 2.0).abs() <= 0.1, "observed order {order}");
}

#[test]
fn poisson_inverts_laplacian() {
    let grid = square(32, 2.5);
    let f = random_modes(&grid, 3);
    let lap = grid.laplacian(&f).map(|v| -v);
    let back = grid.poisson_periodic(&lap).unwrap();
    assert!(back.sub(&f).max_abs() <= 1e-12 * f.max_abs().max(1.0));
}

#[test]
fn parseval_matches_gradient_quadrature() {
    let grid = square(32, 2.0);
    let f = random_modes(&grid, 9).map(|v| v + 0.3 * v * v);
    let grads = grid.gradient(&f);
    let quad: f64 = grads.iter().map(|g| g.dot(g)).sum();
    let spec = grid.dirichlet_energy(&f.values);
    assert!((quad - spec).abs() <= 1e-10 * spec);
}

#[test]
fn operators_commute_with_grid_translations() {
    let grid = square(32, 2.0);
    let f = random_modes(&grid, 12).map(|v| v + 0.2 * v.powi(3));
    let shift = [5, 11, 0];
    let rhs = f.map(|v| v - f.mean());
    let pairs = [
        (grid.laplacian(&f.shifted(shift)), grid.laplacian(&f).shifted(shift)),
        (grid.poisson_periodic(&rhs.shifted(shift)).unwrap(), grid.poisson_periodic(&rhs).unwrap().shifted(shift)),
        (grid.gradient(&f.shifted(shift))[1].clone(), grid.gradient(&f)[1].shifted(shift)),
    ];
    for (a, b) in pairs {
        assert!(a.sub(&b).max_abs() <= 1e-12 * a.max_abs().max(1.0));
    }
}

#[test]
fn sine_mode_integrates_to_zero() {
    let grid = square(16, 2.0);
    let f = grid.sample(|x| (PI * x[0]).sin());
    assert!(f.integrate().abs() <= 1e-12);
    assert!((grid.constant(1.0).integrate() - 4.0).abs() <= 1e-12);
}

#[test]
fn eta_is_continuous_and_has_bounded_log_derivative() {
    let rho = 0.3;
    for r in [rho, 1.5 * rho, 2.0 * rho] {
        let eps = 1e-12;
        assert!((eta_tilde(rho, r - eps) - eta_tilde(rho, r + eps)).abs() <= 1e-9, "jump at {r}");
    }
    assert_eq!(eta_tilde(rho, 0.5 * rho), 0.0);
    assert_eq!(eta_tilde(rho, 3.0 * rho), 1.0);
    assert!((eta_tilde(rho, 1.5 * rho) - 0.5).abs() <= 1e-15);
    let mut sup: f64 = 0.0;
    for i in 1..20_000 {
        let r = rho + rho * i as f64 / 20_000.0;
        let e = eta_tilde(rho, r);
        if e > 0.0 {
            sup = sup.max(eta_tilde_derivative(rho, r).powi(2) / e);
        }
    }
    assert!(sup.is_finite() && sup < 100.0 / (rho * rho), "sup {sup}");
    let eta = CutoffEta::new(rho, vec![[0.0; 3]]).unwrap();
    let grid = square(32, 2.0);
    for v in eta.field(&grid).values {
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn shell_profile_of_exponential_field() {
    let grid = Grid::new(GridSpec::new(Cell::cubic(3, 8.0).unwrap(), 48).unwrap());
    let c = [4.0, 4.0, 4.0];
    let gamma = 0.9;
    let f = grid.sample(|x| (-gamma * grid.cell().periodic_distance(x, &c)).exp());
    let shells = grid.shell_profile(&f, &c, 0.25).unwrap();
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.inner_radius >= 0.5 && s.inner_radius + s.width <= 2.0 + 1e-9 && s.points > 0)
        .map(|s| (s.inner_radius, s.max.ln()))
        .collect();
    assert!(pts.len() >= 4);
    // the maximum over the annulus sits at its inner radius
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + gamma).abs() <= 0.02 * gamma, "slope {slope}");
}
