//! Is a connection the Levi-Civita connection of some metric? Curvature,
//! its covariant derivatives, and the Lie algebra they generate at a point.
//!
//!     cargo run --example levi_civita_test [CONNECTION.json] [POINT]

use gconvex::connection::Connection;
use gconvex::holonomy::{generators_at, lc_check, stabilized_algebra};
use gconvex::polycore::{format_rational, qserde::parse_rational};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/curved_connection.json").into());
    let point = args.next().unwrap_or_else(|| "1,0".into());
    let conn = Connection::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let x: Vec<_> = point.split(',').map(|s| parse_rational(s).expect("rational coordinate")).collect();

    println!("generators at ({point}):");
    for g in generators_at(&conn, &x, 2).unwrap() {
        let rows: Vec<Vec<String>> = g.matrix.iter().map(|r| r.iter().map(format_rational).collect()).collect();
        println!("  X{:?} = {:?}", g.indices, rows);
    }
    let (k, alg) = stabilized_algebra(&conn, &x).unwrap();
    println!("algebra stabilizes at order {k}, dimension {}", alg.dim());
    let report = lc_check(&conn, &x).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
