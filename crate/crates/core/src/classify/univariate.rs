//! Univariate decision procedure.
//!
//! A univariate `f` is g-convex for some connection iff `f'` has no real root,
//! or `f' = (x - u)^(2r-1) p(x)` with `p > 0` everywhere. With `b = f'`, the
//! second form is equivalent to "exactly one distinct real root, of odd
//! multiplicity, and `lc(b) > 0`": `p` then has no real root, so its sign is
//! constant and equals its sign at `+inf`, which is the sign of `lc(b)`.

use num_traits::Signed;

use super::verdict::{Certificate, Interval, Verdict, Witness};
use super::ClassifyError;
use crate::polycore::Polynomial;
use crate::realroots::{
    isolate_real_roots, simple_roots, to_upoly, two_sign_changes, univariate_var, UPoly,
};

/// Bisection depth for the Descartes fast path before deferring to Sturm.
const DESCARTES_DEPTH: u32 = 64;

pub fn classify_univariate(f: &Polynomial) -> Result<Verdict, ClassifyError> {
    decide(f, true)
}

/// Same decision using only Sturm-chain isolation, with no fast screening.
pub fn classify_univariate_exact(f: &Polynomial) -> Result<Verdict, ClassifyError> {
    decide(f, false)
}

fn decide(f: &Polynomial, fast: bool) -> Result<Verdict, ClassifyError> {
    let var = univariate_var(f).map_err(|_| ClassifyError::NotUnivariate)?;
    let b = f.diff(var);
    if b.is_zero() {
        return Ok(Verdict::gconvex(Certificate::ConstantFunction));
    }
    let lc_positive = b.leading_coefficient().is_positive();
    let (_, bu) = to_upoly(&b).expect("nonzero univariate derivative");
    if bu.degree() == 0 {
        return Ok(Verdict::gconvex(Certificate::NoCriticalPoint));
    }
    if fast {
        if let Some(v) = fast_path(&bu, lc_positive) {
            return Ok(v);
        }
    }
    Ok(from_records(&b, lc_positive))
}

fn fast_path(bu: &UPoly, lc_positive: bool) -> Option<Verdict> {
    if let Some(changes) = two_sign_changes(bu) {
        return Some(Verdict::not_gconvex(Witness::MultipleOddRoots {
            roots: changes.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect(),
        }));
    }
    let roots = simple_roots(bu, DESCARTES_DEPTH)?;
    let mut roots: Vec<Interval> = roots.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect();
    Some(match roots.len() {
        0 => Verdict::gconvex(Certificate::NoCriticalPoint),
        1 => single_odd_root(roots.remove(0), 1, lc_positive),
        _ => Verdict::not_gconvex(Witness::MultipleOddRoots { roots }),
    })
}

fn single_odd_root(root: Interval, multiplicity: u32, lc_positive: bool) -> Verdict {
    if lc_positive {
        Verdict::gconvex(Certificate::UnivariateOddRoot {
            root,
            multiplicity,
            cofactor_positive: true,
        })
    } else {
        Verdict::not_gconvex(Witness::NegativeLeadingCofactor { root, multiplicity })
    }
}

fn from_records(b: &Polynomial, lc_positive: bool) -> Verdict {
    let records = isolate_real_roots(b).expect("nonzero univariate derivative");
    let interval = |i: usize| Interval::new(records[i].lo.clone(), records[i].hi.clone());
    match records.len() {
        0 => Verdict::gconvex(Certificate::NoCriticalPoint),
        1 => {
            let m = records[0].multiplicity;
            if m % 2 == 1 {
                single_odd_root(interval(0), m, lc_positive)
            } else {
                Verdict::not_gconvex(Witness::EvenMultiplicityRoot {
                    root: interval(0),
                    multiplicity: m,
                })
            }
        }
        _ => {
            let odd: Vec<usize> = (0..records.len())
                .filter(|&i| records[i].multiplicity % 2 == 1)
                .collect();
            if odd.len() >= 2 {
                Verdict::not_gconvex(Witness::MultipleOddRoots {
                    roots: odd.into_iter().map(interval).collect(),
                })
            } else {
                let even = (0..records.len())
                    .find(|&i| records[i].multiplicity % 2 == 0)
                    .expect("at most one odd root among several");
                Verdict::not_gconvex(Witness::EvenMultiplicityRoot {
                    root: interval(even),
                    multiplicity: records[even].multiplicity,
                })
            }
        }
    }
}
