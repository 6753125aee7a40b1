//! Christoffel symbols that make a function's Hessian vanish, checked
//! symbolically, plus the quadratic normal form behind the flat construction.
//!
//!     cargo run --example build_connections

use gconvex::classify::to_quadratic_form;
use gconvex::connection::{
    construct_no_critical, construct_quadratic_flat, hessian_under, quadratic_normal_form, verify_hessian_target,
    zero_target,
};
use gconvex::polycore::parse_expression;

fn main() {
    let f = parse_expression("x^3 + x", &["x"]).unwrap();
    let conn = construct_no_critical(&f, &zero_target(1)).unwrap();
    let names = vec!["x".to_string()];
    println!("x^3 + x:\n{}", serde_json::to_string_pretty(&conn.to_json(Some(&names))).unwrap());
    println!("Hessian check: {:?}", verify_hessian_target(&f, &conn, &zero_target(1)).unwrap());

    let vars = ["x1", "x2", "x3"];
    let g = parse_expression("(x1 + x2)^2 + x1 + 3*x3^2", &vars).unwrap();
    let q = to_quadratic_form(&g).unwrap();
    let flat = construct_quadratic_flat(&q).unwrap();
    println!("\n(x1 + x2)^2 + x1 + 3*x3^2, flat connection:");
    for (k, i, j, e) in flat.nonzero_symbols() {
        println!("  Gamma^{}_{}{} = {e}", k + 1, i + 1, j + 1);
    }
    let h = hessian_under(&g, &flat).unwrap();
    println!("  Hessian identically zero: {}", h.iter().flatten().all(|e| e.is_zero()));

    let nf = quadratic_normal_form(&q).unwrap();
    println!("  normal form: mu = {:?}, nu = {:?}, kappa = {:.6}, rank {}", nf.mu, nf.nu, nf.kappa, nf.r);
    println!("  |Q^T Q - I| = {:.2e}", nf.orthogonality_error());
}
