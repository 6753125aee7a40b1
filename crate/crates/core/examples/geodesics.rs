//! Floating cross-checks of a certificate: geodesics of the constructed
//! connection, convexity of f along them, and sampled Hessian positivity.
//!
//!     cargo run --release --example geodesics

use gconvex::connection::{construct_no_critical, zero_target, Connection};
use gconvex::geoverify::{
    convexity_along, integrate_geodesic, random_geodesics, sample_hessian_psd, DEFAULT_STEPS, DEFAULT_TOL,
};
use gconvex::polycore::parse_expression;

fn main() {
    let f = parse_expression("x^3 + x", &["x"]).unwrap();
    let conn = construct_no_critical(&f, &zero_target(1)).unwrap();

    let path = integrate_geodesic(&conn, &[0.0], &[1.0], 1.0, DEFAULT_STEPS).unwrap();
    println!("geodesic from 0 with speed 1 ends at {:.12}", path.endpoint()[0]);
    for m in (0..path.len()).step_by(50) {
        let x = path.positions[m][0];
        println!("  t = {:.2}  x = {:+.6}  f = {:+.6}", path.times[m], x, x * x * x + x);
    }
    println!("f along it: {:?}", convexity_along(&f, &path, DEFAULT_TOL));

    // Along straight lines x^3 is concave for x < 0.
    let line = integrate_geodesic(&Connection::zero(1), &[-1.0], &[1.0], 1.0, DEFAULT_STEPS).unwrap();
    let cubic = parse_expression("x^3", &["x"]).unwrap();
    println!("x^3 on [-1, 0]: {:?}", convexity_along(&cubic, &line, DEFAULT_TOL));

    println!("100 random geodesics: {:?}", random_geodesics(&f, &conn, 100, DEFAULT_STEPS, DEFAULT_TOL, 0));

    let g = parse_expression("x1^2*x2^2", &["x1", "x2"]).unwrap();
    let r = sample_hessian_psd(&g, &Connection::zero(2), &[(-1.0, 1.0), (-1.0, 1.0)], 1000, DEFAULT_TOL, 0).unwrap();
    println!("x1^2*x2^2 under the flat connection: {} of {} samples indefinite", r.violations, r.evaluated);
}
