use gconvex::connection::Connection;
use gconvex::geoverify::integrate_geodesic;
use gconvex::polycore::parse_rational_expression;
use proptest::prelude::*;

fn benchmark() -> Connection {
    let g = parse_rational_expression("6*x/(3*x^2 + 1)", &["x"]).unwrap();
    Connection::zero(1).with_symbol(0, 0, 0, g)
}

/// Along a geodesic `u = x^3 + x` is affine, so `x(T)` is the real root of
/// `x^3 + x = x0^3 + x0 + T (3 x0^2 + 1) v0`.
fn exact_endpoint(x0: f64, v0: f64, t: f64) -> f64 {
    let u = x0 * x0 * x0 + x0 + t * (3.0 * x0 * x0 + 1.0) * v0;
    let mut x = u.cbrt();
    for _ in 0..100 {
        x -= (x * x * x + x - u) / (3.0 * x * x + 1.0);
    }
    x
}

fn endpoint(conn: &Connection, x0: f64, v0: f64, steps: usize) -> f64 {
    integrate_geodesic(conn, &[x0], &[v0], 1.0, steps).unwrap().endpoint()[0]
}

// The error of a single trajectory can change sign as the step shrinks, so
// the ratio is taken over summed errors on a grid of initial conditions in
// [-1/2, 1/2]^2, where 40 steps are already in the asymptotic regime.
#[test]
fn halving_the_step_cuts_error_sixteenfold() {
    let conn = benchmark();
    let grid: Vec<f64> = (-4..=4).map(|k| k as f64 / 8.0).collect();
    let (mut coarse, mut fine) = (0.0, 0.0);
    for &x0 in &grid {
        for &v0 in grid.iter().filter(|v| **v != 0.0) {
            let reference = endpoint(&conn, x0, v0, 800);
            assert!((reference - exact_endpoint(x0, v0, 1.0)).abs() < 1e-9);
            coarse += (endpoint(&conn, x0, v0, 40) - reference).abs();
            fine += (endpoint(&conn, x0, v0, 80) - reference).abs();
        }
    }
    let ratio = coarse / fine;
    assert!((15.0..=17.0).contains(&ratio), "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euclidean_geodesics_are_lines(
        x0 in prop::collection::vec(-10.0f64..10.0, 1..=4),
        v in prop::collection::vec(-10.0f64..10.0, 4),
    ) {
        let n = x0.len();
        let v0 = &v[..n];
        let path = integrate_geodesic(&Connection::zero(n), &x0, v0, 1.0, 100).unwrap();
        for (i, (a, b)) in path.endpoint().iter().zip(x0.iter().zip(v0)).enumerate() {
            let expected = b.0 + b.1;
            prop_assert!((a - expected).abs() <= 1e-12, "coordinate {i}: {a} vs {expected}");
        }
    }
}
