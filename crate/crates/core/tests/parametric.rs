use approx::assert_abs_diff_eq;

use copgrid::order::vertex_sup_distance;
use copgrid::parametric::{efgm_inverse_first_integral, transpose_shuffle};
use copgrid::{CopulaError, CopulaGrid, ParametricCopula};

fn grid(c: ParametricCopula, n: usize) -> CopulaGrid {
    c.materialize(n).unwrap()
}

fn pi(n: usize) -> CopulaGrid {
    grid(ParametricCopula::Independence, n)
}

#[test]
fn materialize_examples() {
    assert!(pi(4).masses().iter().all(|&m| m == 0.0625));
    let g0 = grid(ParametricCopula::gaussian(0.0).unwrap(), 8);
    assert_eq!(g0.masses(), pi(8).masses());

    let n = 6;
    let id = ParametricCopula::shuffle((1..=n).collect()).unwrap();
    assert_eq!(
        grid(id, n).masses(),
        grid(ParametricCopula::FrechetM, n).masses()
    );
    let rev = ParametricCopula::shuffle((1..=n).rev().collect()).unwrap();
    assert_eq!(
        grid(rev, n).masses(),
        grid(ParametricCopula::FrechetW, n).masses()
    );
}

#[test]
fn parameter_guards() {
    let err = ParametricCopula::gaussian(1.5).unwrap_err();
    assert!(matches!(err, CopulaError::ParamOutOfRange(_)));
    assert!(err.to_string().contains("rho"));
    assert!(ParametricCopula::efgm(-1.2).is_err());
    assert!(ParametricCopula::shuffle(vec![1, 1, 3]).is_err());
    let s = ParametricCopula::shuffle(vec![2, 1, 3]).unwrap();
    assert!(matches!(
        s.materialize(8),
        Err(CopulaError::ResolutionMismatch { .. })
    ));
    assert!(transpose_shuffle(1).is_err());
}

#[test]
fn extreme_gaussians_are_frechet_bounds() {
    let n = 16;
    let up = grid(ParametricCopula::gaussian(1.0).unwrap(), n);
    assert_eq!(up.masses(), grid(ParametricCopula::FrechetM, n).masses());
    let down = grid(ParametricCopula::gaussian(-1.0).unwrap(), n);
    assert_eq!(down.masses(), grid(ParametricCopula::FrechetW, n).masses());
}

#[test]
fn descriptors_round_trip() {
    for s in ["gaussian:0.6", "efgm:1", "m", "w", "pi", "shuffle:2,1,3"] {
        let c: ParametricCopula = s.parse().unwrap();
        assert_eq!(c.to_string().parse::<ParametricCopula>().unwrap(), c);
    }
    let t: ParametricCopula = "tshuffle:2".parse().unwrap();
    assert_eq!(t, ParametricCopula::ShuffleOfMin(vec![1, 3, 2, 4]));
    assert!("gaussian:x".parse::<ParametricCopula>().is_err());
    assert!("clayton:2".parse::<ParametricCopula>().is_err());
}

#[test]
fn transpose_shuffle_examples() {
    assert_eq!(
        transpose_shuffle(2).unwrap(),
        ParametricCopula::ShuffleOfMin(vec![1, 3, 2, 4])
    );
    // oracle: cumulative sums of the permutation matrix computed here
    let vsup_to_pi = |m: usize| {
        let n = m * m;
        let ParametricCopula::ShuffleOfMin(sigma) = transpose_shuffle(m).unwrap() else {
            unreachable!()
        };
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            for l in 0..=n {
                let count = (0..k).filter(|&i| sigma[i] <= l).count();
                let c = count as f64 / n as f64;
                worst = worst.max((c - (k * l) as f64 / (n * n) as f64).abs());
            }
        }
        let g = grid(transpose_shuffle(m).unwrap(), n);
        assert_abs_diff_eq!(
            vertex_sup_distance(&g, &pi(n)).unwrap(),
            worst,
            epsilon = 1e-12
        );
        worst
    };
    let d8 = vsup_to_pi(8);
    assert!(d8 <= 0.25, "{d8}");
    assert!(vsup_to_pi(16) < d8);
}

#[test]
fn shuffle_grids_are_scaled_permutations() {
    for c in [
        transpose_shuffle(3).unwrap(),
        ParametricCopula::shuffle(vec![3, 1, 2]).unwrap(),
    ] {
        let n = 18;
        let g = grid(c, n);
        for i in 0..n {
            let nz = (0..n).filter(|&j| g.mass(i, j) != 0.0).count();
            assert_eq!(nz, 1);
            let nz = (0..n).filter(|&j| g.mass(j, i) != 0.0).count();
            assert_eq!(nz, 1);
        }
    }
}

#[test]
fn gaussian_grids_are_si_and_increasing_in_rho() {
    let n = 64;
    let rhos = [0.0, 0.3, std::f64::consts::FRAC_1_SQRT_2, 0.936, 1.0];
    let grids: Vec<CopulaGrid> = rhos
        .iter()
        .map(|&r| grid(ParametricCopula::gaussian(r).unwrap(), n))
        .collect();
    for g in &grids {
        assert!(g.derivative_field().is_si(1e-12), "{}", g.label());
    }
    for w in grids.windows(2) {
        let (a, b) = (w[0].vertex_values(), w[1].vertex_values());
        assert!(a.iter().zip(&b).all(|(x, y)| *x <= y + 1e-10));
    }
}

#[test]
fn cell_masses_match_rectangle_probabilities() {
    // oracle: rectangle probability by 2-D midpoint quadrature of the copula density
    let rho: f64 = 0.5;
    let n = 4;
    let g = grid(ParametricCopula::gaussian(rho).unwrap(), n);
    let q = |p: f64| copgrid::normal::quantile(p);
    let density = |u: f64, v: f64| {
        let (x, y) = (q(u), q(v));
        let r2 = 1.0 - rho * rho;
        (-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)).exp() / r2.sqrt()
    };
    let steps = 400;
    for (i, j) in [(0, 0), (1, 2), (3, 3), (2, 1)] {
        let h = 1.0 / (n * steps) as f64;
        let mut acc = 0.0;
        for a in 0..steps {
            for b in 0..steps {
                let u = i as f64 / n as f64 + (a as f64 + 0.5) * h;
                let v = j as f64 / n as f64 + (b as f64 + 0.5) * h;
                acc += density(u, v) * h * h;
            }
        }
        assert_abs_diff_eq!(g.mass(i, j), acc, epsilon = 2e-4);
    }
}

#[test]
fn efgm_grid_matches_closed_form() {
    let n = 10;
    let g = grid(ParametricCopula::efgm(1.0).unwrap(), n);
    let verts = g.vertex_values();
    for k in 0..=n {
        for l in 0..=n {
            let (v, u) = (k as f64 / n as f64, l as f64 / n as f64);
            let c = v * u + v * u * (1.0 - v) * (1.0 - u);
            assert_abs_diff_eq!(verts[k * (n + 1) + l], c, epsilon = 1e-14);
        }
    }
}

/// Oracle: invert t -> x -> d/dt C(x, t) by bisection, then integrate over t
/// with a fine midpoint rule.
fn efgm_integral_by_bisection(theta: f64, v: f64) -> f64 {
    let cond = |x: f64, t: f64| x + theta * x * (1.0 - x) * (1.0 - 2.0 * t);
    let steps = 20_000;
    let mut acc = 0.0;
    for s in 0..steps {
        let t = (s as f64 + 0.5) / steps as f64;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if cond(mid, t) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        acc += 0.5 * (lo + hi);
    }
    acc / steps as f64
}

#[test]
fn efgm_first_component_inverse() {
    assert_abs_diff_eq!(
        efgm_inverse_first_integral(0.0, 0.25).unwrap(),
        0.25,
        epsilon = 1e-9
    );
    for &(theta, v) in &[(1.0, 0.25), (1.0, 0.2), (0.5, 0.7), (-1.0, 0.4)] {
        let got = efgm_inverse_first_integral(theta, v).unwrap();
        assert_abs_diff_eq!(got, efgm_integral_by_bisection(theta, v), epsilon = 1e-6);
    }
    let at_quarter = efgm_inverse_first_integral(1.0, 0.25).unwrap();
    assert!((at_quarter - 0.25).abs() > 0.01);
    assert!(efgm_inverse_first_integral(1.0, 0.0).is_err());
}
