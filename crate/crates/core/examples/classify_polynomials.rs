//! Does some connection make `f` geodesically convex? Verdicts with their
//! certificates or witnesses, for each supported class.
//!
//!     cargo run --example classify_polynomials [EXPR ...]

use gconvex::classify::{classify, count_isolated_critical_points};
use gconvex::polycore::{infer_variables, parse_expression};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs: Vec<String> = if args.is_empty() {
        [
            "x^3",             // even-order critical point of f' = 3x^2
            "3*x^4",           // single odd root of f', positive cofactor
            "x^3 + x",         // no critical point at all
            "x^4 - x^2",       // three critical points
            "x1^3 + x2",       // gradient never vanishes
            "x1^2 - x2^2",     // indefinite quadratic with a critical point
            "x1^2 + x2",       // quadratic, singular A, no critical point
            "x^2*y^2",         // monomial with two even powers
            "x1^4 + x2^3 + x2", // separable: one block is critical-point free
        ]
        .map(String::from)
        .to_vec()
    } else {
        args
    };
    for text in inputs {
        let vars = infer_variables(&text).unwrap();
        let f = parse_expression(&text, &vars).unwrap();
        let v = classify(&f);
        println!("{text:<20} {}", v.kind());
        println!("    {}", serde_json::to_string(&v).unwrap());
        let crit = count_isolated_critical_points(&f);
        println!("    critical points: {}", serde_json::to_string(&crit).unwrap());
    }
}
