use num_traits::Zero;
use serde::Serialize;

use crate::linalg::{mat_mul, RMatrix};
use crate::polycore::{format_rational, Rational};

pub type FMatrix = Vec<Vec<f64>>;

/// Incremental echelon form over the rationals, for span-membership tests.
#[derive(Debug, Clone, Default)]
pub(crate) struct RationalSpan {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RationalSpan {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is outside the span; returns whether it was.
    pub fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        // Each row is zero in the pivots of earlier rows, so one pass in
        // insertion order reduces v completely.
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &c * r;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let inv = v[p].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// Orthonormal basis built by Gram-Schmidt; `tol` is relative to `|v|`.
#[derive(Debug, Clone)]
pub(crate) struct FloatSpan {
    basis: Vec<Vec<f64>>,
    tol: f64,
}

impl FloatSpan {
    pub fn new(tol: f64) -> Self {
        FloatSpan { basis: Vec::new(), tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn insert(&mut self, v: Vec<f64>) -> bool {
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            return false;
        }
        let mut w = v;
        for _ in 0..2 {
            for b in &self.basis {
                let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= self.tol * norm0 {
            return false;
        }
        self.basis.push(w.into_iter().map(|x| x / norm).collect());
        true
    }
}

fn flatten<T: Clone>(m: &[Vec<T>]) -> Vec<T> {
    m.iter().flatten().cloned().collect()
}

pub fn bracket(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    ab.iter()
        .zip(&ba)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

fn bracket_f64(a: &FMatrix, b: &FMatrix) -> FMatrix {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| a[i][k] * b[k][j] - b[i][k] * a[k][j]).sum();
        }
    }
    out
}

/// A basis of a matrix Lie algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieAlgebraBasis {
    pub n: usize,
    #[serde(serialize_with = "matrices")]
    pub matrices: Vec<RMatrix>,
}

fn matrices<S: serde::Serializer>(ms: &[RMatrix], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(ms.len()))?;
    for m in ms {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(format_rational).collect()).collect();
        seq.serialize_element(&rows)?;
    }
    seq.end()
}

impl LieAlgebraBasis {
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    /// Whether `m` lies in the span of the basis.
    pub fn contains(&self, m: &RMatrix) -> bool {
        let mut span = RationalSpan::default();
        for b in &self.matrices {
            span.insert(flatten(b));
        }
        !span.insert(flatten(m))
    }
}

/// Floating counterpart of [`LieAlgebraBasis`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericLieBasis {
    pub n: usize,
    pub matrices: Vec<FMatrix>,
}

impl NumericLieBasis {
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }
}

/// Smallest bracket-closed subspace containing `mats`: an independent subset
/// of the inputs, extended by brackets until no bracket enlarges the span.
pub fn lie_closure(n: usize, mats: &[RMatrix]) -> LieAlgebraBasis {
    let mut span = RationalSpan::default();
    let mut basis: Vec<RMatrix> = Vec::new();
    for m in mats {
        assert!(m.len() == n && m.iter().all(|r| r.len() == n), "matrix size");
        if span.insert(flatten(m)) {
            basis.push(m.clone());
        }
    }
    // Brackets of each new element with everything before it.
    let mut next = 1;
    while next < basis.len() && span.dim() < n * n {
        for i in 0..next {
            let c = bracket(&basis[i], &basis[next]);
            if span.insert(flatten(&c)) {
                basis.push(c);
            }
        }
        next += 1;
    }
    LieAlgebraBasis { n, matrices: basis }
}

/// [`lie_closure`] with span decisions up to a relative tolerance.
pub fn lie_closure_numeric(n: usize, mats: &[FMatrix], tol: f64) -> NumericLieBasis {
    let mut span = FloatSpan::new(tol);
    let mut basis: Vec<FMatrix> = Vec::new();
    for m in mats {
        if span.insert(flatten(m)) {
            basis.push(m.clone());
        }
    }
    let mut next = 1;
    while next < basis.len() && span.dim() < n * n {
        for i in 0..next {
            let c = bracket_f64(&basis[i], &basis[next]);
            if span.insert(flatten(&c)) {
                basis.push(c);
            }
        }
        next += 1;
    }
    NumericLieBasis { n, matrices: basis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    fn m(rows: &[&[i64]]) -> RMatrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn closure_examples() {
        assert_eq!(lie_closure(2, &[]).dim(), 0);
        let e12 = m(&[&[0, 1], &[0, 0]]);
        let e21 = m(&[&[0, 0], &[1, 0]]);
        let alg = lie_closure(2, &[e12.clone(), e21.clone()]);
        assert_eq!(alg.dim(), 3);
        assert!(alg.contains(&m(&[&[1, 0], &[0, -1]])));
        assert!(!alg.contains(&m(&[&[1, 0], &[0, 0]])));
    }

    #[test]
    fn closure_is_idempotent() {
        let alg = lie_closure(3, &[m(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]), m(&[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]])]);
        assert_eq!(alg.dim(), 3);
        assert_eq!(lie_closure(3, &alg.matrices).dim(), 3);
    }

    #[test]
    fn numeric_matches_exact() {
        let e12 = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        let e21 = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(lie_closure_numeric(2, &[e12.clone(), e21], 1e-9).dim(), 3);
        let tiny = vec![vec![0.0, 1.0 + 1e-14], vec![0.0, 0.0]];
        assert_eq!(lie_closure_numeric(2, &[e12, tiny], 1e-9).dim(), 1);
    }
}
