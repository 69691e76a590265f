use descriptor::linalg::{
    canonical_reduction, mod_norm, orth_projector, pencil_regular, pinv, range_inclusion, rank, Mat, Reduction,
    TAU_REDUCE,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// `r x c` matrix of rank `k` (generically) as a product of random factors.
fn with_rank(rng: &mut ChaCha8Rng, r: usize, c: usize, k: usize) -> Mat {
    &random(rng, r, k) * &random(rng, k, c)
}

/// Rank by Gaussian elimination with full pivoting,
/// independent of the library's SVD.
fn elimination_rank(a: &Mat, tol: f64) -> usize {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<f64>> = a.to_rows();
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let mut r = 0;
    while r < m.min(n) {
        let mut best = (0.0, r, r);
        for (i, row) in w.iter().enumerate().skip(r) {
            for (j, v) in row.iter().enumerate().skip(r) {
                if v.abs() > best.0 {
                    best = (v.abs(), i, j);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        w.swap(r, best.1);
        for row in w.iter_mut() {
            row.swap(r, best.2);
        }
        for i in r + 1..m {
            let f = w[i][r] / w[r][r];
            for j in r..n {
                w[i][j] -= f * w[r][j];
            }
        }
        r += 1;
    }
    r
}

fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(m, n)| (Just(m), Just(n), 0..=m.min(n), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_conditions((m, n, k, seed) in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = with_rank(&mut rng, m, n, k);
        let p = pinv(&a);
        prop_assert_eq!(p.shape(), (n, m));
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!(close(&(&ap * &a), &a, 1e-8));
        prop_assert!(close(&(&pa * &p), &p, 1e-8));
        prop_assert!(close(&ap, &ap.transpose(), 1e-8));
        prop_assert!(close(&pa, &pa.transpose(), 1e-8));
    }

    #[test]
    fn projector_is_idempotent_symmetric_and_fixes_the_row_space((m, n, k, seed) in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = with_rank(&mut rng, m, n, k);
        let p = orth_projector(&a);
        prop_assert!(close(&(&p * &p), &p, 1e-8));
        prop_assert!(close(&p, &p.transpose(), 1e-8));
        // rows of A lie in range(A'), so A P = A
        prop_assert!(close(&(&a * &p), &a, 1e-8));
        let trace: f64 = (0..n).map(|i| p[(i, i)]).sum();
        prop_assert!((trace - k as f64).abs() < 1e-6);
    }

    #[test]
    fn rank_agrees_with_elimination((m, n, k, seed) in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = with_rank(&mut rng, m, n, k);
        prop_assert_eq!(rank(&a), k);
        prop_assert_eq!(elimination_rank(&a, 1e-9), k);
    }

    #[test]
    fn reduction_reaches_canonical_form((m, n, k, seed) in dims()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = with_rank(&mut rng, m, n, k);
        let red = canonical_reduction(&f);
        prop_assert_eq!(red.rank, elimination_rank(&f, 1e-9));
        prop_assert!(Reduction::defect(&red.left, &f, &red.right, red.rank) <= TAU_REDUCE * (1.0 + mod_norm(&f)));
        prop_assert!(red.left.det().unwrap().abs() > 1e-12);
        prop_assert!(red.right.det().unwrap().abs() > 1e-12);
    }

    #[test]
    fn pencil_regularity_is_invariant_under_equivalence(n in 1usize..=5, k in 0usize..=5, singular in any::<bool>(), seed in any::<u64>()) {
        let k = k.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = with_rank(&mut rng, n, n, k);
        let mut c = random(&mut rng, n, n);
        if singular {
            // a shared null vector makes det(λF + C) vanish for every λ
            let j = rng.gen_range(0..n);
            for i in 0..n {
                f[(i, j)] = 0.0;
                c[(i, j)] = 0.0;
            }
        }
        let l = &random(&mut rng, n, n) + &Mat::identity(n).scale(3.0);
        let r = &random(&mut rng, n, n) + &Mat::identity(n).scale(3.0);
        let before = pencil_regular(&f, &c).unwrap();
        let after = pencil_regular(&(&(&l * &f) * &r), &(&(&l * &c) * &r)).unwrap();
        prop_assert_eq!(before, !singular);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn mod_norm_is_a_norm((m, n, _k, seed) in dims(), s in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random(&mut rng, m, n);
        let b = random(&mut rng, m, n);
        prop_assert!(mod_norm(&(&a + &b)) <= mod_norm(&a) + mod_norm(&b) + 1e-12);
        prop_assert!((mod_norm(&a.scale(s)) - s.abs() * mod_norm(&a)).abs() <= 1e-12 * (1.0 + mod_norm(&a)));
        prop_assert!(mod_norm(&a) >= a.max_abs());
    }

    #[test]
    fn range_inclusion_matches_construction((m, n, k, seed) in dims(), extra in 1usize..=3, inside in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = with_rank(&mut rng, m, n, k);
        let a = if inside {
            &b * &random(&mut rng, n, extra)
        } else {
            // add a column orthogonal to range(B) unless B already spans everything
            let q = &b * &pinv(&b);
            let w = random(&mut rng, m, 1);
            let out = &w - &(&q * &w);
            if out.frobenius_norm() < 1e-3 {
                return Ok(());
            }
            (&b * &random(&mut rng, n, extra)).hstack(&out).unwrap()
        };
        prop_assert_eq!(range_inclusion(&a, &b).unwrap(), inside);
    }
}
