use num_traits::Zero;
use serde::Serialize;

use super::verdict::{Certificate, Verdict, Witness};
use super::ClassifyError;
use crate::linalg::{is_psd, rank, solve, RMatrix};
use crate::polycore::{qserde, Polynomial, Rational};

/// `f(x) = 1/2 x^T A x + b^T x + c` with `A` symmetric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticForm {
    #[serde(serialize_with = "qserde::matrix")]
    pub a: RMatrix,
    #[serde(serialize_with = "qserde::vec")]
    pub b: Vec<Rational>,
    #[serde(serialize_with = "qserde::rational")]
    pub c: Rational,
}

impl QuadraticForm {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.n();
        let half = Rational::new(1.into(), 2.into());
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((e, &self.a[i][j] * &half));
            }
            let mut e = vec![0; n];
            e[i] = 1;
            terms.push((e, self.b[i].clone()));
        }
        terms.push((vec![0; n], self.c.clone()));
        Polynomial::from_terms(n, terms)
    }

    /// `[A | b]`.
    pub fn augmented(&self) -> RMatrix {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect()
    }

    /// `rank([A|b]) > rank(A)`: the gradient `A x + b` never vanishes.
    pub fn has_no_critical_point(&self) -> bool {
        rank(&self.augmented()) > rank(&self.a)
    }

    /// A solution of `A x = -b`, if any.
    pub fn critical_point(&self) -> Option<Vec<Rational>> {
        let neg_b: Vec<Rational> = self.b.iter().map(|x| -x).collect();
        solve(&self.a, &neg_b)
    }
}

pub fn to_quadratic_form(f: &Polynomial) -> Result<QuadraticForm, ClassifyError> {
    if f.total_degree().unwrap_or(0) > 2 {
        return Err(ClassifyError::DegreeTooHigh);
    }
    let n = f.nvars();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    let mut c = Rational::zero();
    for (e, coef) in f.terms() {
        let vars: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        match (vars.as_slice(), e.iter().sum::<u32>()) {
            ([], _) => c = coef.clone(),
            ([i], 1) => b[*i] = coef.clone(),
            ([i], 2) => a[*i][*i] = coef * Rational::from_integer(2.into()),
            ([i, j], 2) => {
                a[*i][*j] = coef.clone();
                a[*j][*i] = coef.clone();
            }
            _ => unreachable!("total degree at most 2"),
        }
    }
    Ok(QuadraticForm { a, b, c })
}

/// A quadratic is g-convex iff it has no critical point or `A` is PSD. The
/// rank test runs first so a critical-point-free quadratic always receives the
/// certificate that carries a flat connection.
pub fn classify_quadratic(q: &QuadraticForm) -> Verdict {
    if q.has_no_critical_point() {
        return Verdict::gconvex(Certificate::QuadraticNoCritical);
    }
    if is_psd(&q.a) {
        return Verdict::gconvex(Certificate::QuadraticPsd);
    }
    let point = q.critical_point().expect("consistent system");
    Verdict::not_gconvex(Witness::IndefiniteHessianAtCritical { point })
}
