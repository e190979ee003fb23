use coapprox::halfspace::{HalfSpaceProjection, SearchBudget};
use coapprox::intersect::averaged_map;
use coapprox::oracle::{find_coapprox, is_coapprox, nonconvex_projection_linf2, SampledSet};
use coapprox::spaces::{complex_lp_norm, complexify, realified_norm, realify};
use coapprox::{ComplexPoint, ConvexBody, DualFunctional, Exponent, HalfSpace, NormSpec, Point};
use num_complex::Complex64;
use proptest::prelude::*;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

/// `f` with `|f_0| ≥ Σ_{i>0} |f_i|`.
fn dominated(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0..1.0f64, n - 1), 0.0..1.0f64, prop::bool::ANY).prop_map(|(rest, extra, neg)| {
        let s: f64 = rest.iter().map(|v| v.abs()).sum::<f64>() + extra + 0.05;
        let mut f = vec![if neg { -s } else { s }];
        f.extend(rest);
        f
    })
}

fn two_sparse(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..n, 0..n, 0.1..1.0f64, -1.0..1.0f64).prop_map(move |(i, j, a, b)| {
        let mut f = vec![0.0; n];
        f[j] = b;
        f[i] = a;
        f
    })
}

fn projection(space: &NormSpec, f: Vec<f64>, d: f64) -> HalfSpaceProjection {
    let h = HalfSpace::normalized(&DualFunctional::from(f), d, space).unwrap();
    HalfSpaceProjection::certify(h, &SearchBudget::default()).unwrap()
}

fn check_contractive(q: &HalfSpaceProjection, x: &[f64], z: &[f64]) -> Result<(), TestCaseError> {
    let space = q.space().clone();
    let h = q.halfspace();
    let qx = q.apply(x);
    let qz = q.apply(z);
    prop_assert!(h.violation(&qx) <= 1e-9);
    let qqx = q.apply(&qx);
    prop_assert!(space.distance(&qqx, &qx) <= 1e-9);
    if h.contains(x) {
        prop_assert_eq!(qx.coords(), x);
    }
    prop_assert!(space.distance(&qx, &qz) <= space.distance(x, z) * (1.0 + 1e-9) + 1e-12);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linf_dominated_halfspaces_are_contractive(f in dominated(4), d in -2.0..2.0f64, x in coords(4), z in coords(4)) {
        let q = projection(&NormSpec::linf(4), f, d);
        check_contractive(&q, &x, &z)?;
    }

    #[test]
    fn l1_two_sparse_halfspaces_are_contractive(f in two_sparse(5), d in -2.0..2.0f64, x in coords(5), z in coords(5)) {
        let q = projection(&NormSpec::l1(5), f, d);
        check_contractive(&q, &x, &z)?;
    }

    #[test]
    fn l2_halfspaces_are_contractive(f in coords(3), d in -2.0..2.0f64, x in coords(3), z in coords(3)) {
        prop_assume!(f.iter().map(|v| v * v).sum::<f64>() > 1e-2);
        let q = projection(&NormSpec::l2(3), f, d);
        check_contractive(&q, &x, &z)?;
    }

    #[test]
    fn averaged_map_fixes_the_intersection(f in dominated(3), g in dominated(3), x in coords(3)) {
        let space = NormSpec::linf(3);
        let qs = vec![projection(&space, f, 0.5), projection(&space, g, 1.0)];
        let q = averaged_map(qs, None).unwrap();
        if q.max_violation(&x) <= 0.0 {
            let y = q.apply(&x);
            prop_assert_eq!(y.coords(), &x[..]);
        }
        let y = q.apply(&x);
        prop_assert!(space.distance(&y, &q.apply(&y)) <= space.distance(&x, &y) + 1e-12);
    }

    #[test]
    fn realification_is_an_isometry(re in coords(4), im in coords(4)) {
        let z: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let v = realify(&ComplexPoint::from_complex(&z));
        prop_assert_eq!(complexify(v.coords()).unwrap().to_complex(), z.clone());
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(3.5), Exponent::Infinity] {
            let a = complex_lp_norm(p, &z);
            prop_assert!((realified_norm(p, v.coords()) - a).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn gauge_is_positively_homogeneous(x in coords(3), t in 0.0..10.0f64) {
        let body = ConvexBody::axis_box(&[-1.0, -2.0, -0.5], &[3.0, 1.0, 0.5], &NormSpec::linf(3)).unwrap();
        let g = body.gauge(&x, 1e-12).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * t).collect();
        prop_assert!((body.gauge(&scaled, 1e-12).unwrap() - t * g).abs() <= 1e-9 * (1.0 + t * g));
        prop_assert!(g >= 0.0);
    }

    #[test]
    fn nonconvex_retraction_is_idempotent(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let p = nonconvex_projection_linf2([x, y]);
        prop_assert!(p[1].abs() <= p[0].abs());
        prop_assert_eq!(nonconvex_projection_linf2([p[0], p[1]]), p);
    }

    #[test]
    fn oracle_candidate_agrees_with_membership(x in coords(2), tol in 0.0..0.5f64) {
        let space = NormSpec::linf(2);
        let pts: Vec<Point> = (-8..=8).flat_map(|i| (-2..=2).map(move |j| Point::from(vec![0.25 * i as f64, 0.25 * j as f64]))).collect();
        let set = SampledSet::explicit(&space, pts, 0.25).unwrap();
        let rep = find_coapprox(&space, &set, &x, tol).unwrap();
        prop_assert!(is_coapprox(&space, &set, &rep.candidate, &x, rep.margin + 1e-12));
        prop_assert_eq!(rep.passed(), is_coapprox(&space, &set, &rep.candidate, &x, tol));
        // no sample does better than the reported margin
        for d in set.iter() {
            prop_assert!(!is_coapprox(&space, &set, d, &x, rep.margin - 1e-9));
        }
    }
}
