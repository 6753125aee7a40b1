//! How often a random polynomial admits a convexifying connection.
//!
//!     cargo run --release --example density_experiments [TRIALS]

use gconvex::density::{
    monomial_density_exact, psd_ball_fraction, sample_quadratic, sample_separable, sample_univariate,
};
use gconvex::polycore::format_rational;

fn main() {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);

    println!("univariate, coefficients uniform on [-1, 1]:");
    for d in [1, 2, 3, 7, 15, 31] {
        let r = sample_univariate(d, 1.0, trials, 0);
        println!("  d = {d:>2}  {:.4} +- {:.4}", r.estimate, r.ci95_halfwidth);
    }

    println!("quadratics and the PSD cone (closed form 2^-(n(n+1)/2) alongside):");
    for n in 1..=3 {
        let q = sample_quadratic(n, 1.0, trials, 0);
        let p = psd_ball_fraction(n, trials, 0);
        println!(
            "  n = {n}  quadratic {:.4}  psd {:.4}  formula {}",
            q.estimate,
            p.estimate,
            format_rational(q.exact.as_ref().unwrap())
        );
    }

    println!("separable, two blocks of degree d:");
    for d in [1, 3, 7] {
        let r = sample_separable(2, d, 1.0, trials, 0);
        println!("  d = {d}  {:.4} +- {:.4}", r.estimate, r.ci95_halfwidth);
    }

    println!("monomials, counted exactly:");
    for (n, d) in [(1, 2), (2, 4), (3, 6)] {
        let m = monomial_density_exact(n, d);
        println!(
            "  n = {n} d = {d}  |N| = {:>3}  oracle {:>6}  formula {:>6}  classifier {:>6}",
            m.tuples,
            format_rational(&m.oracle),
            format_rational(&m.closed_form),
            format_rational(&m.classifier)
        );
    }
}
