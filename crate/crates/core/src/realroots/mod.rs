//! Exact real-root analysis of univariate polynomials.
//!
//! Root counting uses Sturm chains built from a primitive integer pseudo-remainder
//! sequence; isolation bisects with exact rationals, so every count is a proof.

mod descartes;
mod upoly;

use serde::Serialize;
use thiserror::Error;

use crate::polycore::{qserde, rational_to_f64, Polynomial, Rational};
pub(crate) use descartes::{simple_roots, two_sign_changes};
pub(crate) use upoly::{SturmChain, UPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
}

/// `b = unit * prod S_m^m` with each `S_m` monic, square-free and pairwise coprime.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFreeDecomposition {
    pub unit: Rational,
    /// `(S_m, m)` in increasing order of `m`; only non-constant factors appear.
    pub factors: Vec<(Polynomial, u32)>,
}

impl SquareFreeDecomposition {
    /// Multiplies the factorization back out.
    pub fn expand(&self, nvars: usize) -> Polynomial {
        let mut p = Polynomial::constant(nvars, self.unit.clone());
        for (s, m) in &self.factors {
            p = &p * &s.pow(*m);
        }
        p
    }
}

/// A real root isolated in the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootRecord {
    #[serde(serialize_with = "qserde::rational")]
    pub lo: Rational,
    #[serde(serialize_with = "qserde::rational")]
    pub hi: Rational,
    pub multiplicity: u32,
}

impl RootRecord {
    pub fn midpoint(&self) -> f64 {
        (rational_to_f64(&self.lo) + rational_to_f64(&self.hi)) / 2.0
    }
}

/// The variable a univariate polynomial is written in (0 for constants).
pub(crate) fn univariate_var(b: &Polynomial) -> Result<usize, RootError> {
    match b.variables().as_slice() {
        [] => Ok(0),
        [v] => Ok(*v),
        _ => Err(RootError::NotUnivariate),
    }
}

pub(crate) fn to_upoly(b: &Polynomial) -> Result<(usize, UPoly), RootError> {
    if b.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let var = univariate_var(b)?;
    let c = b
        .univariate_coeffs(var)
        .map_err(|_| RootError::NotUnivariate)?;
    Ok((var, UPoly::from_rationals(&c)))
}

fn monic_poly(p: &UPoly, nvars: usize, var: usize) -> Polynomial {
    let lc = Rational::from_integer(p.lc().clone());
    let c: Vec<Rational> = p.to_rationals().into_iter().map(|x| x / &lc).collect();
    Polynomial::from_univariate(nvars, var, &c)
}

/// Square-free decomposition by the repeated-gcd cascade: with `g = gcd(b, b')`
/// and `w = b/g`, each round splits off `S_i = w / gcd(w, g)`.
pub fn squarefree_decompose(b: &Polynomial) -> Result<SquareFreeDecomposition, RootError> {
    let (var, p) = to_upoly(b)?;
    let nv = b.nvars();
    let unit = b
        .univariate_coeffs(var)
        .ok()
        .and_then(|c| c.last().cloned())
        .expect("nonzero polynomial");
    let mut factors = Vec::new();
    if p.degree() == 0 {
        return Ok(SquareFreeDecomposition { unit, factors });
    }
    let mut g = p.gcd(&p.derivative());
    let mut w = p.div_primitive(&g);
    let mut m = 1u32;
    while w.degree() > 0 {
        let y = w.gcd(&g);
        let s = w.div_primitive(&y);
        if s.degree() > 0 {
            factors.push((monic_poly(&s, nv, var), m));
        }
        g = g.div_primitive(&y);
        w = y;
        m += 1;
    }
    Ok(SquareFreeDecomposition { unit, factors })
}

/// Number of distinct real roots, in `(lo, hi]` when an interval is given and
/// otherwise on the whole line.
pub fn count_real_roots(
    b: &Polynomial,
    interval: Option<(&Rational, &Rational)>,
) -> Result<usize, RootError> {
    let (_, p) = to_upoly(b)?;
    if p.degree() == 0 {
        return Ok(0);
    }
    let chain = SturmChain::new(&p.squarefree_part());
    Ok(match interval {
        Some((lo, hi)) => chain.count_in(lo, hi),
        None => chain.count_all(),
    })
}

/// Isolating intervals for every distinct real root, sorted, with multiplicities.
pub fn isolate_real_roots(b: &Polynomial) -> Result<Vec<RootRecord>, RootError> {
    let (_, p) = to_upoly(b)?;
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let sqf = p.squarefree_part();
    let chain = SturmChain::new(&sqf);
    let bound = p.cauchy_bound();
    let mut intervals = Vec::new();
    bisect(&chain, -&bound, bound, &mut intervals);

    let decomposition = squarefree_decompose(b)?;
    let factor_chains: Vec<(SturmChain, u32)> = decomposition
        .factors
        .iter()
        .map(|(s, m)| (SturmChain::new(&to_upoly(s).expect("nonzero factor").1), *m))
        .collect();

    Ok(intervals
        .into_iter()
        .map(|(lo, hi)| {
            let owners: Vec<u32> = factor_chains
                .iter()
                .filter(|(c, _)| c.count_in(&lo, &hi) == 1)
                .map(|(_, m)| *m)
                .collect();
            // The factors are coprime and the interval holds one root of their
            // product, so exactly one factor owns it.
            debug_assert_eq!(owners.len(), 1);
            RootRecord {
                lo,
                hi,
                multiplicity: owners[0],
            }
        })
        .collect())
}

fn bisect(chain: &SturmChain, lo: Rational, hi: Rational, out: &mut Vec<(Rational, Rational)>) {
    let n = chain.count_in(&lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((lo, hi));
        return;
    }
    let mid = (&lo + &hi) / Rational::from_integer(2.into());
    bisect(chain, lo, mid.clone(), out);
    bisect(chain, mid, hi, out);
}

/// Refines an isolating interval until its width is at most `width`.
pub fn refine_root(b: &Polynomial, record: &RootRecord, width: &Rational) -> RootRecord {
    let (_, p) = to_upoly(b).expect("record came from this polynomial");
    let chain = SturmChain::new(&p.squarefree_part());
    let (mut lo, mut hi) = (record.lo.clone(), record.hi.clone());
    let two = Rational::from_integer(2.into());
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if chain.count_in(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RootRecord {
        lo,
        hi,
        multiplicity: record.multiplicity,
    }
}

/// True when `x` is a root of `b`.
pub fn is_root(b: &Polynomial, x: &Rational) -> bool {
    to_upoly(b)
        .map(|(_, p)| p.sign_at(x) == 0)
        .unwrap_or(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_expression, ratio};

    fn p(s: &str) -> Polynomial {
        parse_expression(s, &["x"]).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let d = squarefree_decompose(&p("3*x^2")).unwrap();
        assert_eq!(d.unit, ratio(3, 1));
        assert_eq!(d.factors, vec![(p("x"), 2)]);

        let d = squarefree_decompose(&p("x^3 - x")).unwrap();
        assert_eq!(d.factors, vec![(p("x^3 - x"), 1)]);

        let d = squarefree_decompose(&p("x^3 - x^2")).unwrap();
        assert_eq!(d.factors, vec![(p("x - 1"), 1), (p("x"), 2)]);
        assert_eq!(d.expand(1), p("x^3 - x^2"));

        assert_eq!(
            squarefree_decompose(&Polynomial::zero(1)),
            Err(RootError::ZeroPolynomial)
        );
    }

    #[test]
    fn decomposition_with_three_levels() {
        let f = p("-2*(x - 1)*(x + 2)^2*(x^2 + 1)^3");
        let d = squarefree_decompose(&f).unwrap();
        assert_eq!(d.unit, ratio(-2, 1));
        assert_eq!(
            d.factors,
            vec![(p("x - 1"), 1), (p("x + 2"), 2), (p("x^2 + 1"), 3)]
        );
        assert_eq!(d.expand(1), f);
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_real_roots(&p("x^2 + 1"), None), Ok(0));
        assert_eq!(count_real_roots(&p("3*x^2 - 3"), None), Ok(2));
        assert_eq!(count_real_roots(&p("x^3 + x"), None), Ok(1));
        assert_eq!(count_real_roots(&p("(x - 1)^4"), None), Ok(1));
        let (lo, hi) = (ratio(0, 1), ratio(1, 1));
        assert_eq!(count_real_roots(&p("3*x^2 - 3"), Some((&lo, &hi))), Ok(1));
    }

    #[test]
    fn isolation_examples() {
        let r = isolate_real_roots(&p("x^2*(x - 1)")).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].lo < ratio(0, 1) && ratio(0, 1) <= r[0].hi);
        assert_eq!(r[0].multiplicity, 2);
        assert!(r[1].lo < ratio(1, 1) && ratio(1, 1) <= r[1].hi);
        assert_eq!(r[1].multiplicity, 1);

        assert!(isolate_real_roots(&p("x^2 + 1")).unwrap().is_empty());

        let r = isolate_real_roots(&p("4*x^3 + 4*x")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 1);
        assert!(r[0].lo < ratio(0, 1) && ratio(0, 1) <= r[0].hi);
    }

    #[test]
    fn refinement_narrows_onto_irrational_root() {
        let f = p("x^2 - 2");
        let r = isolate_real_roots(&f).unwrap();
        let fine = refine_root(&f, &r[1], &ratio(1, 1 << 30));
        assert!((fine.midpoint() - 2f64.sqrt()).abs() < 1e-8);
    }
}
