use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use copgrid::measures::{rearranged_measure, wasserstein_correlation};
use copgrid::order::{
    dp_distance, dp_distance_profiles, lo_compare, lo_compare_profiles, norm_profiles,
    robust_relation, schur_compare, schur_compare_profiles, vertex_sup_distance, OrderKind,
};
use copgrid::parametric::transpose_shuffle;
use copgrid::transforms::{rearrange_profiles, upper_transform, upper_transform_profiles};
use copgrid::{
    CopulaError, CopulaGrid, CostSpec, MeasureKind, ParametricCopula, ProfileField, Relation,
};

const TOL: f64 = 1e-10;

fn fam(c: ParametricCopula, n: usize) -> CopulaGrid {
    c.materialize(n).unwrap()
}

fn gaussian(rho: f64, n: usize) -> CopulaGrid {
    fam(ParametricCopula::gaussian(rho).unwrap(), n)
}

fn named_set(n: usize) -> Vec<CopulaGrid> {
    let mut v: Vec<CopulaGrid> = [0.0, 0.3, 0.6, 0.9]
        .iter()
        .map(|&r| gaussian(r, n))
        .collect();
    v.push(fam(ParametricCopula::FrechetW, n));
    v.push(fam(ParametricCopula::FrechetM, n));
    v.push(fam(ParametricCopula::efgm(1.0).unwrap(), n));
    for s in 0..3 {
        v.push(CopulaGrid::random(n, 2.0 + s as f64, 40 + s));
    }
    v
}

#[test]
fn distance_examples() {
    for n in [8, 32, 128] {
        let m = fam(ParametricCopula::FrechetM, n).derivative_field();
        let pi = fam(ParametricCopula::Independence, n).derivative_field();
        let d1 = dp_distance(&m, &pi, 1.0).unwrap();
        assert!((d1 - 1.0 / 3.0).abs() <= 1.0 / n as f64, "{d1}");
        assert_eq!(dp_distance(&m, &m, 2.0).unwrap(), 0.0);
    }
    let (d, e) = (gaussian(0.3, 128), gaussian(0.7, 128));
    let (pd, pe) = (ProfileField::from(&d), ProfileField::from(&e));
    let t = dp_distance(
        &upper_transform(&d.derivative_field()).derivative_field(),
        &upper_transform(&e.derivative_field()).derivative_field(),
        1.0,
    )
    .unwrap();
    let exact_t = dp_distance_profiles(
        &upper_transform_profiles(&pd),
        &upper_transform_profiles(&pe),
        1.0,
    )
    .unwrap();
    let up = dp_distance_profiles(&rearrange_profiles(&pd), &rearrange_profiles(&pe), 1.0).unwrap();
    assert_abs_diff_eq!(exact_t, up, epsilon = 1e-10);
    // the checkerboards of T(D), T(E) only approximate the exact profiles
    assert_abs_diff_eq!(t, up, epsilon = 1e-3);

    let small = fam(ParametricCopula::Independence, 4).derivative_field();
    assert!(matches!(
        dp_distance(&small, &d.derivative_field(), 1.0),
        Err(CopulaError::ResolutionMismatch { .. })
    ));
    assert!(dp_distance(&small, &small, 0.5).is_err());
}

#[test]
fn lower_orthant_examples() {
    let n = 32;
    let pi = fam(ParametricCopula::Independence, n);
    let w = fam(ParametricCopula::FrechetW, n);
    for g in named_set(n).into_iter().filter(|g| g.is_si(1e-12)) {
        assert!(
            lo_compare(&pi, &g, TOL)
                .unwrap()
                .relation
                .is_less_or_equal(),
            "{}",
            g.label()
        );
    }
    assert_eq!(lo_compare(&w, &pi, TOL).unwrap().relation, Relation::Less);
    assert_eq!(
        lo_compare(&pi, &w, TOL).unwrap().relation,
        Relation::Greater
    );
    assert_eq!(
        lo_compare(&gaussian(0.3, n), &gaussian(0.7, n), TOL)
            .unwrap()
            .relation,
        Relation::Less
    );
    assert_eq!(lo_compare(&pi, &pi, TOL).unwrap().relation, Relation::Equal);

    let v = lo_compare(
        &gaussian(-0.5, n),
        &fam(ParametricCopula::efgm(1.0).unwrap(), n),
        TOL,
    )
    .unwrap();
    assert_eq!(v.relation, Relation::Less);
    let v = lo_compare(
        &fam(ParametricCopula::shuffle(vec![2, 1]).unwrap(), n),
        &pi,
        TOL,
    )
    .unwrap();
    assert_eq!(v.relation, Relation::Incomparable);
    assert!(v.witness.unwrap().magnitude > TOL);
}

#[test]
fn schur_examples() {
    let n = 32;
    let pi = fam(ParametricCopula::Independence, n).derivative_field();
    let w = fam(ParametricCopula::FrechetW, n).derivative_field();
    assert_eq!(
        schur_compare(&pi, &w, TOL).unwrap().relation,
        Relation::Less
    );
    for g in named_set(n) {
        let f = g.derivative_field();
        assert!(schur_compare(&pi, &f, TOL)
            .unwrap()
            .relation
            .is_less_or_equal());
        let up = copgrid::transforms::increasing_rearrangement(&f).derivative_field();
        assert_eq!(
            schur_compare(&f, &up, TOL).unwrap().relation,
            Relation::Equal
        );
    }
}

#[test]
fn upper_products_order_like_schur() {
    let n = 64;
    let set: Vec<ProfileField> = named_set(n).iter().map(ProfileField::from).collect();
    let mut robust = 0;
    for d in &set {
        for e in &set {
            let s = robust_relation(OrderKind::Schur, d, e, TOL).unwrap();
            let (td, te) = (upper_transform_profiles(d), upper_transform_profiles(e));
            let lo_t = robust_relation(OrderKind::LowerOrthant, &td, &te, TOL).unwrap();
            let (t2d, t2e) = (upper_transform_profiles(&td), upper_transform_profiles(&te));
            let lo_t2 = robust_relation(OrderKind::LowerOrthant, &t2d, &t2e, TOL).unwrap();
            let (Some(s), Some(lo_t), Some(lo_t2)) = (s, lo_t, lo_t2) else {
                continue;
            };
            robust += 1;
            assert_eq!(s == Relation::Less, lo_t == Relation::Greater);
            assert_eq!(s == Relation::Less, lo_t2 == Relation::Less);

            // measures built on T and T^2 are Schur-monotone
            if s == Relation::Less {
                let (gd, ge) = (d.to_field(), e.to_field());
                let cost = CostSpec::Absolute;
                assert!(
                    wasserstein_correlation(&gd, cost) <= wasserstein_correlation(&ge, cost) + 1e-9
                );
                let k = MeasureKind::SpearmanRho;
                assert!(
                    rearranged_measure(&gd, k).unwrap()
                        <= rearranged_measure(&ge, k).unwrap() + 1e-9
                );
            }
        }
    }
    assert!(robust >= 50, "{robust} robust pairs");

    // the W / Pi counterexample: the two orders disagree
    let pi = &set[0];
    let w = &set[4];
    assert_eq!(
        lo_compare_profiles(w, pi, TOL).unwrap().relation,
        Relation::Less
    );
    assert_eq!(
        schur_compare_profiles(pi, w, TOL).unwrap().relation,
        Relation::Less
    );
}

#[test]
fn transform_isometries_and_norms() {
    let n = 128;
    for s in 0..6u64 {
        let d = ProfileField::from(&CopulaGrid::random(n, 3.0, 2 * s));
        let e = ProfileField::from(&CopulaGrid::random(n, 3.0, 2 * s + 1));
        let (td, te) = (upper_transform_profiles(&d), upper_transform_profiles(&e));
        let (t2d, t2e) = (upper_transform_profiles(&td), upper_transform_profiles(&te));
        let d1_t = dp_distance_profiles(&td, &te, 1.0).unwrap();
        let d1_t2 = dp_distance_profiles(&t2d, &t2e, 1.0).unwrap();
        let d1_up =
            dp_distance_profiles(&rearrange_profiles(&d), &rearrange_profiles(&e), 1.0).unwrap();
        assert_abs_diff_eq!(d1_t, d1_up, epsilon = 1e-10);
        assert_abs_diff_eq!(d1_t2, d1_up, epsilon = 1e-10);
        for p in [1.0, 2.0] {
            let before = dp_distance_profiles(&d, &e, p).unwrap();
            assert!(dp_distance_profiles(&td, &te, p).unwrap() <= before + 1e-12);
        }
        assert_abs_diff_eq!(
            norm_profiles(&td, 1.0),
            norm_profiles(&d, 1.0),
            epsilon = 1e-12
        );
        for p in [1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(
                norm_profiles(&t2d, p),
                norm_profiles(&d, p),
                epsilon = 1e-12
            );
        }
    }
}

#[test]
fn transform_is_continuous_along_gaussians() {
    let n = 128;
    let limit = ProfileField::from(&gaussian(0.6, n));
    let t_limit = upper_transform_profiles(&limit);
    let mut last = (f64::INFINITY, f64::INFINITY);
    for m in 0..=6 {
        let rho = 0.6 + 0.3 * 0.5f64.powi(m);
        let p = ProfileField::from(&gaussian(rho, n));
        let d = dp_distance_profiles(&p, &limit, 1.0).unwrap();
        let dt = dp_distance_profiles(&upper_transform_profiles(&p), &t_limit, 1.0).unwrap();
        assert!(d < last.0 && dt < last.1, "m={m}: {d} {dt}");
        last = (d, dt);
    }
    assert!(last.0 < 0.01 && last.1 < 0.01);
}

#[test]
fn transform_is_discontinuous_along_shuffles() {
    let mut last = f64::INFINITY;
    for m in [4usize, 8, 16] {
        let n = m * m;
        let s = fam(transpose_shuffle(m).unwrap(), n);
        let pi = fam(ParametricCopula::Independence, n);
        let mm = fam(ParametricCopula::FrechetM, n);
        let to_pi = vertex_sup_distance(&s, &pi).unwrap();
        assert!(to_pi < last && to_pi < 0.25);
        last = to_pi;
        let t = upper_transform(&s.derivative_field());
        assert!(vertex_sup_distance(&t, &pi).unwrap() <= 1e-12);
        // max over the diagonal of min(u,u) - u^2 is 1/4
        assert_abs_diff_eq!(vertex_sup_distance(&t, &mm).unwrap(), 0.25, epsilon = 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_is_a_metric(n in 2usize..16, s in any::<u64>(), p in 1.0f64..3.0) {
        let [a, b, c] = [0u64, 1, 2].map(|i| CopulaGrid::random(n, 2.5, s.wrapping_add(i)).derivative_field());
        let ab = dp_distance(&a, &b, p).unwrap();
        let ba = dp_distance(&b, &a, p).unwrap();
        let ac = dp_distance(&a, &c, p).unwrap();
        let cb = dp_distance(&c, &b, p).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() < 1e-14);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert_eq!(dp_distance(&a, &a, p).unwrap(), 0.0);
        prop_assert!(ab > 0.0);
    }

    #[test]
    fn verdicts_are_antisymmetric(n in 2usize..12, s in any::<u64>()) {
        let a = CopulaGrid::random(n, 2.0, s);
        let b = CopulaGrid::random(n, 2.0, s ^ 0x5555);
        let ab = lo_compare(&a, &b, TOL).unwrap();
        let ba = lo_compare(&b, &a, TOL).unwrap();
        prop_assert_eq!(ab.relation.flip(), ba.relation);
        prop_assert_eq!(ab.witness.is_some(), ab.relation == Relation::Incomparable);
        let sab = schur_compare(&a.derivative_field(), &b.derivative_field(), TOL).unwrap();
        let sba = schur_compare(&b.derivative_field(), &a.derivative_field(), TOL).unwrap();
        prop_assert_eq!(sab.relation.flip(), sba.relation);
    }
}
