use descriptor::function_space::{bernstein, cantor, diff, l2_inner, l2_norm, Grid, GridFn};
use proptest::prelude::*;

/// `|cantor(s) - cantor(t)| <= 2 |s - t|^{ln 2 / ln 3}`: an input rounding of
/// 1e-16 moves the value by up to about 2e-10.
const CANTOR_TOL: f64 = 1e-9;

fn grid_fn(g: Grid, dim: usize, coeffs: &[f64]) -> GridFn {
    GridFn::from_fn(g, dim, |t, o| {
        for (k, v) in o.iter_mut().enumerate() {
            let c = &coeffs[3 * k..3 * k + 3];
            *v = c[0] + c[1] * (c[2] * t).sin() + c[2] * t * t;
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inner_product_is_symmetric_and_bounded(
        n in 3usize..200,
        dim in 1usize..4,
        cu in prop::collection::vec(-2.0f64..2.0, 9),
        cv in prop::collection::vec(-2.0f64..2.0, 9),
    ) {
        let g = Grid::new(-1.0, 2.0, n).unwrap();
        let u = grid_fn(g, dim, &cu);
        let v = grid_fn(g, dim, &cv);
        let uv = l2_inner(&u, &v).unwrap();
        prop_assert!((uv - l2_inner(&v, &u).unwrap()).abs() <= 1e-12 * (1.0 + uv.abs()));
        prop_assert!(uv.abs() <= l2_norm(&u) * l2_norm(&v) * (1.0 + 1e-12) + 1e-14);
        prop_assert!(l2_norm(&u.add(&v).unwrap()) <= l2_norm(&u) + l2_norm(&v) + 1e-12);
    }

    #[test]
    fn cantor_is_monotone_and_symmetric(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cantor(lo).unwrap() <= cantor(hi).unwrap());
        prop_assert!((cantor(a).unwrap() + cantor(1.0 - a).unwrap() - 1.0).abs() <= CANTOR_TOL);
        // self-similarity on the left third
        prop_assert!((cantor(a / 3.0).unwrap() - cantor(a).unwrap() / 2.0).abs() <= CANTOR_TOL);
    }

    #[test]
    fn diff_is_exact_on_quadratics(n in 3usize..100, c in prop::collection::vec(-3.0f64..3.0, 3)) {
        let g = Grid::new(0.5, 1.5, n).unwrap();
        let u = GridFn::from_scalar_fn(g, |t| c[0] + c[1] * t + c[2] * t * t);
        let du = diff(&u);
        for (i, t) in g.nodes().enumerate() {
            prop_assert!((du.at(i)[0] - (c[1] + 2.0 * c[2] * t)).abs() <= 1e-9);
        }
    }

    #[test]
    fn bernstein_reproduces_linear_functions(n in 1usize..60, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = Grid::new(0.0, 1.0, 41).unwrap();
        let bn = bernstein(|t| a + b * t, n, &g).unwrap();
        for (i, t) in g.nodes().enumerate() {
            prop_assert!((bn.at(i)[0] - (a + b * t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_exact(n in 3usize..50, dim in 1usize..4, c in prop::collection::vec(-1e3f64..1e3, 9)) {
        let g = Grid::new(-0.3, 0.7, n).unwrap();
        let u = grid_fn(g, dim, &c);
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = GridFn::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values(), u.values());
        prop_assert_eq!(back.dim(), dim);
    }
}

#[test]
fn cantor_values_at_triadic_points() {
    for (t, v) in [
        (0.0, 0.0),
        (1.0 / 3.0, 0.5),
        (2.0 / 3.0, 0.5),
        (1.0 / 9.0, 0.25),
        (1.0, 1.0),
        (0.25, 1.0 / 3.0),
    ] {
        assert!((cantor(t).unwrap() - v).abs() < CANTOR_TOL, "cantor({t})");
    }
    assert!(cantor(-0.1).is_err());
}

#[test]
fn bernstein_approximation_of_cantor_improves() {
    let g = Grid::new(0.0, 1.0, 2001).unwrap();
    let target = GridFn::from_scalar_fn(g, |t| cantor(t).unwrap());
    let errs: Vec<f64> = [5, 20, 80, 320]
        .iter()
        .map(|&n| {
            let b = bernstein(|t| cantor(t).unwrap(), n, &g).unwrap();
            b.sub(&target).unwrap().sup_norm()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
