use bjortho::minimize::minimize_convex;
use bjortho::norm::NormSpec;
use bjortho::operator::{LinearOperator, OperatorSpace};
use bjortho::orthogonality::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const SPECS: [&str; 12] = [
    "lp:1:2",
    "lp:1.5:2",
    "lp:2:2",
    "lp:3:2",
    "lp:inf:2",
    "wlp:3:1,2",
    "poly:1,0;0,1;1,1",
    "lp:1.5:3",
    "lp:2:3",
    "lp:3:3",
    "lp:inf:3",
    "wlp:1.5:2,1,0.5",
];

const SMOOTH: [&str; 6] = ["lp:1.5:2", "lp:3:2", "wlp:3:1,2", "lp:1.5:3", "lp:3:3", "wlp:1.5:2,1,0.5"];

fn vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-10.0f64..10.0, n).prop_map(DVector::from_vec)
}

fn nonzero(n: usize) -> impl Strategy<Value = DVector<f64>> {
    vector(n).prop_filter("nonzero", |v| v.amax() > 1e-3)
}

fn matrix(n: usize) -> impl Strategy<Value = LinearOperator> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| LinearOperator(DMatrix::from_vec(n, n, v)))
}

fn with_pair(specs: &'static [&'static str]) -> impl Strategy<Value = (NormSpec, DVector<f64>, DVector<f64>)> {
    prop::sample::select(specs).prop_flat_map(|s| {
        let spec: NormSpec = s.parse().unwrap();
        let n = spec.dim();
        (Just(spec), nonzero(n), vector(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_homogeneous_and_subadditive((spec, x, y) in with_pair(&SPECS), t in 1e-3f64..1e3) {
        let nx = spec.norm(x.as_slice());
        prop_assert!(nx > 0.0);
        prop_assert!((spec.norm((t * &x).as_slice()) - t * nx).abs() <= 1e-10 * t * nx);
        let s = spec.norm((&x + &y).as_slice());
        prop_assert!(s <= nx + spec.norm(y.as_slice()) + 1e-12 * (1.0 + s));
    }

    #[test]
    fn one_sided_derivatives_are_ordered((spec, x, y) in with_pair(&SPECS)) {
        let (dm, dp) = spec.dir_derivs(&x, &y).unwrap();
        prop_assert!(dm <= dp + 1e-12, "{dm} > {dp}");
    }

    #[test]
    fn supporting_functional_contract((spec, x, _y) in with_pair(&SMOOTH)) {
        let f = spec.supporting_functional(&x).unwrap();
        let nx = spec.norm(x.as_slice());
        prop_assert!((f.apply(&x) - nx).abs() <= 1e-10 * nx.max(1.0));
        let worst = spec.sphere_sample(2000, 3).iter().map(|u| f.apply(u)).fold(f64::MIN, f64::max);
        prop_assert!(worst <= 1.0 + 1e-6);
    }

    #[test]
    fn euclidean_derivative_is_inner_product(x in nonzero(3), y in vector(3)) {
        let spec: NormSpec = "lp:2:3".parse().unwrap();
        let dp = spec.dir_deriv_plus(&x, &y).unwrap();
        prop_assert!((dp - x.dot(&y) / x.norm()).abs() <= 1e-10 * (1.0 + y.norm()));
    }

    #[test]
    fn verdict_fields_are_consistent((spec, x, y) in with_pair(&SPECS)) {
        let v = is_bj_orthogonal(&spec, &x, &y).unwrap();
        prop_assert!(v.margin <= 0.0);
        match v.decision {
            Decision::Orthogonal => {
                prop_assert!(v.deriv_minus <= TAU_ORTH && v.deriv_plus >= -TAU_ORTH);
            }
            Decision::NotOrthogonal => {
                let violation = v.deriv_minus.max(-v.deriv_plus);
                prop_assert!(v.margin < -TAU_ORTH || violation > TAU_ORTH);
            }
            Decision::Indeterminate => {
                prop_assert!(v.margin.abs() <= TAU_ORTH);
            }
        }
    }

    #[test]
    fn cone_decomposition((spec, x, y) in with_pair(&SPECS)) {
        let v = is_bj_orthogonal(&spec, &x, &y).unwrap();
        let both = in_plus(&spec, &x, &y).unwrap() && in_minus(&spec, &x, &y).unwrap();
        prop_assert_eq!(v.is_orthogonal(), both);
    }

    #[test]
    fn relation_is_scale_invariant((spec, x, y) in with_pair(&SPECS), t in 0.01f64..100.0, s in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0]) {
        let a = is_bj_orthogonal(&spec, &x, &y).unwrap();
        let b = is_bj_orthogonal(&spec, &(t * &x), &(s * &y)).unwrap();
        prop_assert_eq!(a.decision, b.decision);
    }

    #[test]
    fn euclidean_verdicts_follow_the_inner_product(x in nonzero(2), y in nonzero(2), project in any::<bool>()) {
        let spec: NormSpec = "lp:2:2".parse().unwrap();
        let y = if project { &y - &x * (x.dot(&y) / x.dot(&x)) } else { y };
        prop_assume!(y.amax() > 1e-6);
        let expected = x.dot(&y).abs() <= TAU_ORTH * x.norm() * y.norm();
        prop_assert_eq!(is_bj_orthogonal(&spec, &x, &y).unwrap().is_orthogonal(), expected);
    }

    #[test]
    fn james_foot_is_orthogonal_and_unique((spec, x, y) in with_pair(&SPECS)) {
        let a0 = james_foot(&spec, &x, &y).unwrap();
        let foot = &y + a0 * &x;
        if foot.amax() > 1e-9 * (1.0 + y.amax()) {
            prop_assert!(is_bj_orthogonal(&spec, &foot, &x).unwrap().is_orthogonal());
        }
        if spec.is_strictly_convex() {
            let far = minimize_convex(|a| spec.norm((&y + a * &x).as_slice()), 25.0, 0.5, 1e-13);
            prop_assert!((far.arg - a0).abs() <= 1e-6 * (1.0 + a0.abs()), "{} vs {a0}", far.arg);
        }
    }

    #[test]
    fn zero_right_argument_is_orthogonal((spec, x, _y) in with_pair(&SPECS)) {
        let zero = DVector::zeros(spec.dim());
        prop_assert!(is_bj_orthogonal(&spec, &x, &zero).unwrap().is_orthogonal());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_norm_triangle_inequality(s in prop::sample::select(&SPECS[..7]), t in matrix(2), a in matrix(2), lam in -3.0f64..3.0) {
        let space = OperatorSpace::new(&s.parse().unwrap());
        let nt = space.norm(&t).unwrap();
        let bound = space.norm(&t.plus_scaled(lam, &a)).unwrap() + lam.abs() * space.norm(&a).unwrap();
        prop_assert!(nt <= bound + 1e-9 * (1.0 + bound));
    }

    #[test]
    fn maximizers_attain_the_norm(s in prop::sample::select(&SPECS), seed in any::<u64>()) {
        let spec: NormSpec = s.parse().unwrap();
        let n = spec.dim();
        let m = DMatrix::from_fn(n, n, |i, j| (bjortho::seed::derive_index(seed, (i * n + j) as u64) % 2001) as f64 / 1000.0 - 1.0);
        let t = LinearOperator(m);
        let att = OperatorSpace::new(&spec).attainment(&t).unwrap();
        for x in &att.maximizers {
            prop_assert!((spec.norm(x.as_slice()) - 1.0).abs() <= 1e-10);
            prop_assert!(spec.norm(t.apply(x).as_slice()) >= att.op_norm - 1e-8);
        }
    }

    #[test]
    fn euclidean_norm_is_top_singular_value(t in matrix(3)) {
        let space = OperatorSpace::new(&"lp:2:3".parse().unwrap());
        let sigma = t.0.clone().singular_values().max();
        prop_assert!((space.norm(&t).unwrap() - sigma).abs() <= 1e-6);
    }

    #[test]
    fn zero_operator_is_orthogonal_both_ways(s in prop::sample::select(&SPECS[..7]), a in matrix(2)) {
        let space = OperatorSpace::new(&s.parse().unwrap());
        let z = LinearOperator::zero(2);
        prop_assert!(space.bj_orthogonal(&z, &a).unwrap().is_orthogonal());
        prop_assert!(space.bj_orthogonal(&a, &z).unwrap().is_orthogonal());
    }
}
