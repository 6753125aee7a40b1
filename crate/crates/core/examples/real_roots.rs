//! Square-free decomposition and exact real-root isolation.
//!
//!     cargo run --example real_roots

use gconvex::polycore::{format_rational, parse_expression, ratio};
use gconvex::realroots::{count_real_roots, isolate_real_roots, refine_root, squarefree_decompose};

fn main() {
    let x = ["x".to_string()];
    let b = parse_expression("(x - 1)^3*(x + 2)^2*(x^2 + 1)*(2*x - 1)", &x).unwrap();
    println!("b = {}", b.to_string_with(&x));

    let sqf = squarefree_decompose(&b).unwrap();
    for (s, m) in &sqf.factors {
        println!("  factor ({})^{m}", s.to_string_with(&x));
    }
    println!("distinct real roots: {}", count_real_roots(&b, None).unwrap());

    for r in isolate_real_roots(&b).unwrap() {
        let tight = refine_root(&b, &r, &ratio(1, 1 << 20));
        println!(
            "  root in [{}, {}], multiplicity {}, ~{:.6}",
            format_rational(&r.lo),
            format_rational(&r.hi),
            r.multiplicity,
            tight.midpoint()
        );
    }
}
