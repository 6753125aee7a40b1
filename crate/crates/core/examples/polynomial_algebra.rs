//! Exact polynomial and rational-function arithmetic.
//!
//!     cargo run --example polynomial_algebra

use gconvex::polycore::{
    euclidean_hessian, gradient, infer_variables, parse_expression, parse_rational_expression, poly_gcd,
};

fn main() {
    let text = "(x1 + x2)^3 - 3/2*x1*x2";
    let vars = infer_variables(text).unwrap();
    let f = parse_expression(text, &vars).unwrap();
    println!("f          = {}", f.to_string_with(&vars));

    for (i, g) in gradient(&f).iter().enumerate() {
        println!("df/d{}     = {}", vars[i], g.to_string_with(&vars));
    }
    let h = euclidean_hessian(&parse_expression("x1^2*x2^2", &vars).unwrap());
    println!("Hess(x1^2*x2^2) = [[{}, {}], [{}, {}]]", h[0][0], h[0][1], h[1][0], h[1][1]);

    let x = ["x".to_string()];
    let a = parse_expression("x^3 - x", &x).unwrap();
    let b = parse_expression("x^2 + 2*x + 1", &x).unwrap();
    println!("gcd(x^3 - x, (x + 1)^2) = {}", poly_gcd(&a, &b).to_string_with(&x));

    // Rational functions are kept with coprime numerator and denominator.
    let r = parse_rational_expression("(x^2 - 1)/(x^2 + 2*x + 1)", &x).unwrap();
    println!("(x^2 - 1)/(x + 1)^2 = {}", r.to_string_with(&x));
}
