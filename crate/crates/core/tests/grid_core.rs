use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use copgrid::grid::{empirical_checkerboard, estimator_resolution, grid_from_mass};
use copgrid::measures::spearman_rho;
use copgrid::{CopulaError, CopulaGrid, ParametricCopula, SampleSet};

fn gaussian(rho: f64, n: usize) -> CopulaGrid {
    ParametricCopula::gaussian(rho)
        .unwrap()
        .materialize(n)
        .unwrap()
}

/// Spearman's rho of a sample through ranks (no ties in continuous data).
fn sample_spearman(pairs: &[(f64, f64)]) -> f64 {
    let ranks = |vals: Vec<f64>| {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut r = vec![0.0; vals.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let rx = ranks(pairs.iter().map(|p| p.0).collect());
    let ry = ranks(pairs.iter().map(|p| p.1).collect());
    let n = pairs.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn constructor_examples() {
    let m = grid_from_mass(&[vec![0.5, 0.0], vec![0.0, 0.5]], "m").unwrap();
    assert_eq!(m.n(), 2);
    let pi = grid_from_mass(&[vec![0.25, 0.25], vec![0.25, 0.25]], "pi").unwrap();
    assert_eq!(pi.label(), "pi");
    match grid_from_mass(&[vec![0.6, 0.0], vec![0.0, 0.4]], "bad") {
        Err(CopulaError::MarginalViolation {
            index, deviation, ..
        }) => {
            assert_eq!(index, 0);
            assert_abs_diff_eq!(deviation, 0.1, epsilon = 1e-15);
        }
        other => panic!("expected a marginal violation, got {other:?}"),
    }
}

#[test]
fn input_round_off_is_accepted_and_refitted() {
    let eps = 4e-10;
    let g = grid_from_mass(&[vec![0.5 + eps, 0.0], vec![0.0, 0.5 - eps]], "m").unwrap();
    let rows: Vec<f64> = g.mass_matrix().iter().map(|r| r.iter().sum()).collect();
    for s in rows {
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-14);
    }
}

#[test]
fn derivative_field_examples() {
    let m = ParametricCopula::FrechetM
        .materialize(2)
        .unwrap()
        .derivative_field();
    assert_eq!(m.row(1), &[1.0, 0.0]);
    assert_eq!(m.row(2), &[1.0, 1.0]);
    let w = ParametricCopula::FrechetW
        .materialize(2)
        .unwrap()
        .derivative_field();
    assert_eq!(w.row(1), &[0.0, 1.0]);
    let n = 7;
    let pi = ParametricCopula::Independence
        .materialize(n)
        .unwrap()
        .derivative_field();
    for k in 1..=n {
        for &h in pi.row(k) {
            assert_abs_diff_eq!(h, k as f64 / n as f64, epsilon = 1e-15);
        }
    }
}

#[test]
fn cdf_examples() {
    let m = ParametricCopula::FrechetM.materialize(2).unwrap();
    assert_abs_diff_eq!(m.cdf(0.5, 0.5).unwrap(), 0.5, epsilon = 1e-15);
    assert!(matches!(m.cdf(-0.1, 0.5), Err(CopulaError::Domain(_))));
    assert!(matches!(m.cdf(0.5, 1.5), Err(CopulaError::Domain(_))));

    // arcsine identity, then an independent double integral of the density
    let rho: f64 = 0.6;
    let arcsine = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
    let density = |x: f64, y: f64| {
        let q = (x * x - 2.0 * rho * x * y + y * y) / (1.0 - rho * rho);
        (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * (1.0 - rho * rho).sqrt())
    };
    let steps = 1200;
    let h = 9.0 / steps as f64;
    let mut double = 0.0;
    for i in 0..steps {
        for j in 0..steps {
            let x = -9.0 + (i as f64 + 0.5) * h;
            let y = -9.0 + (j as f64 + 0.5) * h;
            double += density(x, y) * h * h;
        }
    }
    assert_abs_diff_eq!(double, arcsine, epsilon = 1e-5);
    let g = gaussian(rho, 128);
    assert_abs_diff_eq!(g.cdf(0.5, 0.5).unwrap(), 0.35242, epsilon = 0.002);
    assert_abs_diff_eq!(g.cdf(0.5, 0.5).unwrap(), arcsine, epsilon = 1e-9);
}

#[test]
fn si_examples() {
    let n = 6;
    assert!(ParametricCopula::FrechetM
        .materialize(n)
        .unwrap()
        .is_si(0.0));
    assert!(!ParametricCopula::FrechetW
        .materialize(n)
        .unwrap()
        .is_si(0.0));
    assert!(ParametricCopula::Independence
        .materialize(n)
        .unwrap()
        .is_si(1e-15));
}

#[test]
fn sampling_examples() {
    let m = ParametricCopula::FrechetM.materialize(64).unwrap();
    let s = m.sample(5000, 3);
    assert!(s.is_pseudo());
    assert!(s.pairs().iter().all(|(x, y)| (x - y).abs() <= 1.0 / 64.0));

    let pi = ParametricCopula::Independence.materialize(16).unwrap();
    let s = pi.sample(100_000, 1);
    let mean: f64 = s.pairs().iter().map(|p| p.0).sum::<f64>() / s.len() as f64;
    assert_abs_diff_eq!(mean, 0.5, epsilon = 0.01);

    let g = gaussian(0.6, 256);
    let s = g.sample(100_000, 5);
    assert_abs_diff_eq!(sample_spearman(s.pairs()), spearman_rho(&g), epsilon = 0.02);
}

#[test]
fn sampling_is_reproducible() {
    let g = CopulaGrid::random(12, 3.0, 8);
    assert_eq!(g.sample(500, 42), g.sample(500, 42));
    assert_ne!(g.sample(500, 42), g.sample(500, 43));
}

#[test]
fn estimator_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let comonotone: Vec<(f64, f64)> = (0..10_000)
        .map(|_| {
            let u: f64 = rng.random();
            (u, u)
        })
        .collect();
    let g = empirical_checkerboard(&SampleSet::new(comonotone, false).unwrap(), 0.45).unwrap();
    assert_eq!(g.n(), 63);
    let diag: f64 = (0..g.n()).map(|i| g.mass(i, i)).sum();
    assert!(diag >= 0.99, "diagonal mass {diag}");

    let independent: Vec<(f64, f64)> = (0..10_000).map(|_| (rng.random(), rng.random())).collect();
    let g = empirical_checkerboard(&SampleSet::new(independent, false).unwrap(), 0.45).unwrap();
    let n2 = (g.n() * g.n()) as f64;
    let worst = g
        .masses()
        .iter()
        .map(|m| (m - 1.0 / n2).abs())
        .fold(0.0, f64::max);
    assert!(worst < 5.0 / n2, "worst deviation {worst}");

    let two = SampleSet::new(vec![(0.1, 0.2), (0.3, 0.4)], false).unwrap();
    assert!(matches!(
        empirical_checkerboard(&two, 0.45),
        Err(CopulaError::TooFewSamples { count: 2, .. })
    ));
}

#[test]
fn estimator_ties_follow_input_order() {
    // all x tied except one: stable ranks spread the ties over the bins
    let pairs: Vec<(f64, f64)> = (0..16)
        .map(|i| (if i == 15 { 1.0 } else { 0.0 }, i as f64))
        .collect();
    let g = empirical_checkerboard(&SampleSet::new(pairs, false).unwrap(), 0.49).unwrap();
    assert_eq!(g.n(), estimator_resolution(16, 0.49));
    // stable tie order reproduces x-rank = y-rank, hence the diagonal
    let diag: f64 = (0..g.n()).map(|i| g.mass(i, i)).sum();
    assert_abs_diff_eq!(diag, 1.0, epsilon = 1e-10);
}

#[test]
fn estimator_output_has_uniform_marginals() {
    let g = gaussian(0.4, 32);
    let s = g.sample(3000, 2);
    let est = empirical_checkerboard(&s, 0.4).unwrap();
    let n = est.n();
    for row in est.mass_matrix() {
        assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0 / n as f64, epsilon = 1e-10);
    }
    for j in 0..n {
        let col: f64 = (0..n).map(|i| est.mass(i, j)).sum();
        assert_abs_diff_eq!(col, 1.0 / n as f64, epsilon = 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_invariants_and_round_trip(n in 2usize..24, seed in any::<u64>(), sharp in 0.5f64..5.0) {
        let g = CopulaGrid::random(n, sharp, seed);
        let f = g.derivative_field();
        for k in 1..=n {
            let row = f.row(k);
            prop_assert!(row.iter().all(|&h| (0.0..=1.0).contains(&h)));
            let mean = row.iter().sum::<f64>() / n as f64;
            prop_assert!((mean - k as f64 / n as f64).abs() < 1e-12);
            if k > 1 {
                let prev = f.row(k - 1);
                prop_assert!(row.iter().zip(prev).all(|(a, b)| a >= b));
            }
        }
        prop_assert!(f.row(n).iter().all(|&h| h == 1.0));

        let back = grid_from_mass(&f.to_grid("").mass_matrix(), "back").unwrap();
        for (a, b) in g.masses().iter().zip(back.masses()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cdf_at_vertices_is_cumulative_mass(n in 2usize..16, seed in any::<u64>()) {
        let g = CopulaGrid::random(n, 2.0, seed);
        for k in 0..=n {
            for l in 0..=n {
                let direct: f64 = (0..k).flat_map(|i| (0..l).map(move |j| (i, j))).map(|(i, j)| g.mass(i, j)).sum();
                let c = g.cdf(k as f64 / n as f64, l as f64 / n as f64).unwrap();
                prop_assert!((c - direct).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn countermonotone_field_and_boundaries() {
    let w = grid_from_mass(&[vec![0.0, 0.5], vec![0.5, 0.0]], "w").unwrap();
    let f = w.derivative_field();
    assert_eq!(f.row(1), &[0.0, 1.0]);
    assert_eq!(f.row(2), &[1.0, 1.0]);
    let g = CopulaGrid::random(9, 2.0, 77);
    for v in [0.0, 0.13, 0.5, 0.91, 1.0] {
        assert_eq!(g.cdf(0.0, v).unwrap(), 0.0);
        assert_eq!(g.cdf(v, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(g.cdf(1.0, v).unwrap(), v, epsilon = 1e-14);
        assert_abs_diff_eq!(g.cdf(v, 1.0).unwrap(), v, epsilon = 1e-14);
    }
}

#[test]
fn grid_and_sample_files() {
    use copgrid::io::{grid_from_csv, grid_to_csv, samples_from_csv, samples_to_csv};
    let g = ParametricCopula::Independence.materialize(4).unwrap();
    let text = grid_to_csv(&g);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N=4"));
    assert_eq!(lines.next(), Some("0.0625,0.0625,0.0625,0.0625"));
    assert_eq!(text.lines().count(), 5);

    let r = gaussian(0.3, 16);
    let back = grid_from_csv(&grid_to_csv(&r), "r").unwrap();
    for (a, b) in r.masses().iter().zip(back.masses()) {
        assert!((a - b).abs() <= 1e-11 * a + 1e-15);
    }
    assert!(grid_from_csv("N=2\n0.5,0\n0,0.5,1\n", "x").is_err());
    assert!(grid_from_csv("N=2\n0.6,0\n0,0.4\n", "x").is_err());

    let s = r.sample(20, 4);
    let parsed = samples_from_csv(&samples_to_csv(&s), true).unwrap();
    assert_eq!(parsed.len(), 20);
    assert!(samples_from_csv("a,b\n1,2\n", false).is_err());
}
