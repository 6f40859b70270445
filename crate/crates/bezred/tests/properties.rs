//! Randomized invariants over the core operations.

mod common;

use bezred::bernstein::{inner_i, BezierCurve, JacobiWeight};
use bezred::continuity::ContinuitySpec;
use bezred::reduction::{reduce, upsilon, Mode, ReductionProblem};
use proptest::prelude::*;

fn coords(degree: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0..10.0f64, dim), degree + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elevation_preserves_evaluation(pts in coords(5, 2), extra in 1usize..8) {
        let c = BezierCurve::new(pts).unwrap();
        let up = c.elevate(c.degree() + extra).unwrap();
        for g in 0..=20 {
            let t = g as f64 / 20.0;
            let a = c.eval(t);
            let b = up.eval(t);
            for h in 0..2 {
                prop_assert!((a[h] - b[h]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inner_product_symmetry(a in prop::collection::vec(-5.0..5.0f64, 1..8),
                              b in prop::collection::vec(-5.0..5.0f64, 1..8)) {
        let w = JacobiWeight::new(0.5, -0.5).unwrap();
        let xy = inner_i(&a, &b, w);
        let yx = inner_i(&b, &a, w);
        prop_assert!((xy - yx).abs() <= 1e-12 * xy.abs().max(1.0));
    }

    #[test]
    fn upsilon_without_boundary_is_identity(pts in coords(7, 2)) {
        let c = BezierCurve::new(pts).unwrap();
        let u = upsilon(&c, 4, &[], &[]);
        prop_assert_eq!(u, c.points().to_vec());
    }

    #[test]
    fn curve_eval_stays_in_coordinate_hull(pts in coords(6, 2), t in 0.0..1.0f64) {
        let c = BezierCurve::new(pts).unwrap();
        let v = c.eval(t);
        for h in 0..2 {
            let lo = c.points().iter().map(|p| p[h]).fold(f64::INFINITY, f64::min);
            let hi = c.points().iter().map(|p| p[h]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(v[h] >= lo - 1e-9 && v[h] <= hi + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mode_error_ordering(pts in coords(9, 2), k in 0i32..3, l in 0i32..3) {
        let m = 6usize;
        prop_assume!(k + l < m as i32 - 1);
        let c = BezierCurve::new(pts).unwrap();
        let spec = ContinuitySpec::new(k, l).unwrap();
        let problem =
            ReductionProblem::new(c, m, spec, JacobiWeight::legendre()).unwrap();
        let e_c = reduce(&problem, Mode::C).unwrap().e2;
        let e_cg = reduce(&problem, Mode::Cg).unwrap().e2;
        let e_g = reduce(&problem, Mode::G).unwrap().e2;
        prop_assert!(e_g <= e_cg + 1e-9, "g={} cg={}", e_g, e_cg);
        prop_assert!(e_cg <= e_c + 1e-9, "cg={} c={}", e_cg, e_c);
    }
}
