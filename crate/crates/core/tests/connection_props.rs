use gconvex::classify::{to_quadratic_form, QuadraticForm};
use gconvex::connection::{
    construct_no_critical, construct_quadratic_flat, hessian_under, quadratic_normal_form, verify_hessian_target,
    zero_target, Connection, ExprMatrix,
};
use gconvex::geoverify::integrate_geodesic;
use gconvex::holonomy::curvature;
use gconvex::linalg::{mat_mul, rank};
use gconvex::polycore::{rat, Polynomial, RatExpr, Rational};
use proptest::prelude::*;

/// `f' = c * prod (x^2 + p x + q)` with `p^2 < 4q`, integrated.
fn rootless_derivative(n: usize, var: usize) -> impl Strategy<Value = Polynomial> {
    let factor = (-3i64..=3, 1i64..=6).prop_filter("irreducible", |(p, q)| p * p < 4 * q);
    (
        prop::sample::select(vec![-2i64, -1, 1, 3]),
        prop::collection::vec(factor, 1..=2),
        -3i64..=3,
    )
        .prop_map(move |(c, factors, c0)| {
            let x = Polynomial::var(1, 0);
            let fp = factors.iter().fold(Polynomial::from_int(1, c), |acc, &(p, q)| {
                &acc * &(&(&(&x * &x) + &x.scale(&rat(p))) + &Polynomial::from_int(1, q))
            });
            let coeffs = fp.univariate_coeffs(0).unwrap();
            let mut integ = vec![rat(c0)];
            integ.extend(coeffs.iter().enumerate().map(|(k, a)| a / rat(k as i64 + 1)));
            Polynomial::from_univariate(n, var, &integ)
        })
}

/// Symmetric `A` of rank < n with `b` outside its range, as `A = M^T D M`.
fn critical_free_quadratic() -> impl Strategy<Value = QuadraticForm> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-2i64..=2, n * n),
                prop::collection::vec(-2i64..=2, n),
                prop::collection::vec(-3i64..=3, n),
                -3i64..=3,
            )
        })
        .prop_filter_map("no critical point", |(n, m, d, b, c)| {
            let m: Vec<Vec<Rational>> = m.chunks(n).map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
            let mut dm = m.clone();
            for (i, row) in dm.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    *v = &*v * rat(d[i]);
                }
            }
            let mt: Vec<Vec<Rational>> = (0..n).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect();
            let q = QuadraticForm { a: mat_mul(&mt, &dm), b: b.into_iter().map(rat).collect(), c: rat(c) };
            (rank(&q.augmented()) > rank(&q.a)).then_some(q)
        })
}

fn no_critical_input() -> impl Strategy<Value = Polynomial> {
    prop_oneof![
        rootless_derivative(1, 0),
        critical_free_quadratic().prop_map(|q| q.to_polynomial()),
        // A rootless block plus an arbitrary block has no critical point.
        (rootless_derivative(2, 0), prop::collection::vec(-3i64..=3, 1..5)).prop_map(|(f, c)| {
            let c: Vec<Rational> = c.into_iter().map(rat).collect();
            &f + &Polynomial::from_univariate(2, 1, &c)
        }),
    ]
}

fn constant_target(n: usize, seed: &[i64]) -> ExprMatrix {
    let mut t = zero_target(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = RatExpr::constant(n, rat(seed[k % seed.len()]));
            k += 1;
            t[i][j] = v.clone();
            t[j][i] = v;
        }
    }
    t
}

fn assert_symmetric(conn: &Connection) {
    let n = conn.n();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                assert_eq!(conn.symbol(k, i, j), conn.symbol(k, j, i));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn construction_meets_zero_target(f in no_critical_input()) {
        let target = zero_target(f.nvars());
        let conn = construct_no_critical(&f, &target).unwrap();
        assert_symmetric(&conn);
        prop_assert!(verify_hessian_target(&f, &conn, &target).unwrap().verified());
    }

    #[test]
    fn construction_meets_constant_targets(f in no_critical_input(), seed in prop::collection::vec(-3i64..=3, 1..6)) {
        let target = constant_target(f.nvars(), &seed);
        let conn = construct_no_critical(&f, &target).unwrap();
        assert_symmetric(&conn);
        prop_assert!(verify_hessian_target(&f, &conn, &target).unwrap().verified());
    }

    #[test]
    fn flat_construction_is_flat_and_annihilates(q in critical_free_quadratic()) {
        let conn = construct_quadratic_flat(&q).unwrap();
        assert_symmetric(&conn);
        prop_assert!(curvature(&conn).is_zero());
        let h = hessian_under(&q.to_polynomial(), &conn).unwrap();
        prop_assert!(h.iter().flatten().all(RatExpr::is_zero));
        prop_assert_eq!(to_quadratic_form(&q.to_polynomial()).unwrap(), q);
    }

    #[test]
    fn normal_form_connection_is_flat_and_annihilates(q in critical_free_quadratic()) {
        let nf = quadratic_normal_form(&q).unwrap();
        let conn = nf.flat_connection();
        assert_symmetric(&conn);
        prop_assert!(curvature(&conn).is_zero());
        let h = hessian_under(&nf.polynomial(), &conn).unwrap();
        prop_assert!(h.iter().flatten().all(RatExpr::is_zero));
    }

    // Geodesics of the pulled-back connection are images of normal-form geodesics.
    #[test]
    fn pullback_geodesics_match_normal_form(
        q in critical_free_quadratic(),
        x0 in prop::collection::vec(-1.0f64..1.0, 4),
        v0 in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let nf = quadratic_normal_form(&q).unwrap();
        let n = nf.n();
        let (x0, v0) = (&x0[..n], &v0[..n]);
        let y0 = nf.to_normal(x0);
        let shifted: Vec<f64> = x0.iter().zip(v0).map(|(a, b)| a + b).collect();
        let w0: Vec<f64> = nf.to_normal(&shifted).iter().zip(&y0).map(|(a, b)| a - b).collect();
        let xs = integrate_geodesic(&nf.pullback_flat(), x0, v0, 1.0, 200).unwrap();
        let ys = integrate_geodesic(&nf.flat_connection(), &y0, &w0, 1.0, 200).unwrap();
        let mapped = nf.from_normal(ys.endpoint());
        let scale = mapped.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in mapped.iter().zip(xs.endpoint()) {
            prop_assert!((a - b).abs() <= 1e-8 * scale, "{:?} vs {:?}", mapped, xs.endpoint());
        }
    }
}
