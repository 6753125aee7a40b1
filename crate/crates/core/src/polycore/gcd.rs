//! Multivariate gcd over the rationals by recursive content / primitive-part
//! reduction and primitive pseudo-remainder sequences.

use num_traits::{One, Zero};

use super::{Polynomial, Rational};

/// Gcd normalized to integer coefficients with content 1 and positive leading
/// coefficient. `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.nvars());
    }
    if a == b {
        return a.primitive_part();
    }
    let va = a.variables();
    let vb = b.variables();
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return poly_gcd(a, &content_in(b, v));
    }
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return poly_gcd(&content_in(a, v), b);
    }
    // Shortest remainder sequence: eliminate the variable of lowest degree.
    let var = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).min(b.degree_in(v)), v))
        .expect("non-constant input");

    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let g_content = poly_gcd(&ca, &cb);

    let (mut r0, mut r1) = if pa.degree_in(var) >= pb.degree_in(var) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    if r0.exact_div(&r1).is_some() {
        return (&g_content * &r1).primitive_part();
    }
    // Subresultant PRS: the known extraneous factors are removed by exact
    // division, so no content gcd is needed until the end.
    let mut g = Polynomial::one(a.nvars());
    let mut h = Polynomial::one(a.nvars());
    let g_prim = loop {
        let delta = r0.degree_in(var) - r1.degree_in(var);
        let r = exact_pseudo_rem(&r0, &r1, var);
        if r.is_zero() {
            break r1;
        }
        if r.degree_in(var) == 0 {
            break Polynomial::one(a.nvars());
        }
        let divisor = &g * &h.pow(delta);
        r0 = r1;
        r1 = r.exact_div(&divisor).expect("subresultant division is exact");
        g = leading_coeff_in(&r0, var);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).exact_div(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    };
    let g_prim = primitive_in(&g_prim, var);
    (&g_content * &g_prim).primitive_part()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
pub(crate) fn content_in(p: &Polynomial, var: usize) -> Polynomial {
    let mut g = Polynomial::zero(p.nvars());
    for c in p.coeffs_in(var).into_values() {
        g = poly_gcd(&g, &c);
        if g.is_constant() {
            return Polynomial::one(p.nvars());
        }
    }
    g
}

pub(crate) fn primitive_in(p: &Polynomial, var: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, var);
    p.exact_div(&c).expect("content divides").primitive_part()
}

fn leading_coeff_in(p: &Polynomial, var: usize) -> Polynomial {
    p.coeffs_in(var).pop_last().map(|(_, c)| c).expect("nonzero polynomial")
}

/// `lc(b)^(deg a - deg b + 1) a mod b` with respect to `var`.
fn exact_pseudo_rem(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    let lcb = leading_coeff_in(b, var);
    let mut r = a.clone();
    let mut steps = 0;
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lcr = r.coeffs_in(var).remove(&dr).expect("leading coefficient");
        let mut shift = vec![0; a.nvars()];
        shift[var] = dr - db;
        let t = (&lcr * b).mul_monomial(&shift, &Rational::one());
        r = &(&lcb * &r) - &t;
        steps += 1;
    }
    &lcb.pow(da + 1 - db - steps) * &r
}

/// Lowest common multiple, normalized like [`poly_gcd`].
pub fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.nvars());
    }
    let g = poly_gcd(a, b);
    (&a.exact_div(&g).expect("gcd divides") * b).primitive_part()
}

/// Whether two polynomials are coprime over the rationals.
pub fn coprime(a: &Polynomial, b: &Polynomial) -> bool {
    let g = poly_gcd(a, b);
    !g.is_zero() && g.is_constant() && !g.constant_term().is_zero()
}
