//! Torsion-free affine connections on `R^n` given by rational Christoffel
//! symbols, the Hessian they induce, and constructors that make a given
//! function's Hessian vanish.

mod construct;
mod format;
mod normal_form;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polycore::{
    euclidean_hessian, gradient, PolyError, Polynomial, RatExpr, Rational,
};

pub use construct::{construct_no_critical, construct_quadratic_flat, zero_target};
pub use format::ConnectionFile;
pub use normal_form::{quadratic_normal_form, NormalForm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Christoffel symbols are not symmetric in the lower indices (k={k}, i={i}, j={j})")]
    NotSymmetric { k: usize, i: usize, j: usize },
    #[error("target Hessian is not symmetric")]
    TargetNotSymmetric,
    #[error("the function has a critical point")]
    CriticalPointDetected,
    #[error("the quadratic has a critical point")]
    HasCriticalPoint,
    #[error("eigendecomposition did not converge")]
    NumericalFailure,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("malformed connection file: {0}")]
    Format(String),
}

/// Whether the symbols are exact, or rationalized floating-point values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Exact,
    Floating,
}

/// `gamma[i][j][k]` is `Γ^k_{ij}`, symmetric in `i, j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    n: usize,
    gamma: Vec<Vec<Vec<RatExpr>>>,
    precision: Precision,
}

impl Connection {
    /// The flat Euclidean connection.
    pub fn zero(n: usize) -> Self {
        Connection {
            n,
            gamma: vec![vec![vec![RatExpr::zero(n); n]; n]; n],
            precision: Precision::Exact,
        }
    }

    /// Checks shape and lower-index symmetry.
    pub fn new(gamma: Vec<Vec<Vec<RatExpr>>>, precision: Precision) -> Result<Self, ConnectionError> {
        let n = gamma.len();
        for (i, row) in gamma.iter().enumerate() {
            if row.len() != n {
                return Err(ConnectionError::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, ks) in row.iter().enumerate() {
                if ks.len() != n {
                    return Err(ConnectionError::DimensionMismatch { expected: n, found: ks.len() });
                }
                for (k, e) in ks.iter().enumerate() {
                    if e.nvars() != n {
                        return Err(ConnectionError::DimensionMismatch { expected: n, found: e.nvars() });
                    }
                    if *e != gamma[j][i][k] {
                        return Err(ConnectionError::NotSymmetric { k, i, j });
                    }
                }
            }
        }
        Ok(Connection { n, gamma, precision })
    }

    /// Sets `Γ^k_{ij}` and `Γ^k_{ji}` (0-based indices).
    pub fn with_symbol(mut self, k: usize, i: usize, j: usize, value: RatExpr) -> Self {
        assert_eq!(value.nvars(), self.n, "symbol lives in the wrong number of variables");
        self.gamma[i][j][k] = value.clone();
        self.gamma[j][i][k] = value;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub(crate) fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    /// `Γ^k_{ij}`.
    pub fn symbol(&self, k: usize, i: usize, j: usize) -> &RatExpr {
        &self.gamma[i][j][k]
    }

    pub fn is_zero(&self) -> bool {
        self.symbols().all(|(_, _, _, e)| e.is_zero())
    }

    /// Every symbol is a constant.
    pub fn is_constant(&self) -> bool {
        self.symbols().all(|(_, _, _, e)| e.is_constant())
    }

    /// `(k, i, j, Γ^k_{ij})` for `i <= j`.
    pub fn symbols(&self) -> impl Iterator<Item = (usize, usize, usize, &RatExpr)> {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (i..n).flat_map(move |j| (0..n).map(move |k| (k, i, j, &self.gamma[i][j][k])))
        })
    }

    pub fn nonzero_symbols(&self) -> impl Iterator<Item = (usize, usize, usize, &RatExpr)> {
        self.symbols().filter(|(_, _, _, e)| !e.is_zero())
    }

    /// Exact values `gamma[i][j][k]` at `x`.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Vec<Vec<Vec<Rational>>>, PolyError> {
        self.gamma
            .iter()
            .map(|row| row.iter().map(|ks| ks.iter().map(|e| e.evaluate(x)).collect()).collect())
            .collect()
    }

    /// Floating values `gamma[i][j][k]` at `x`; `None` when some denominator
    /// is smaller than `pole_tol` in magnitude.
    pub fn eval_f64(&self, x: &[f64], pole_tol: f64) -> Option<Vec<Vec<Vec<f64>>>> {
        self.gamma
            .iter()
            .map(|row| row.iter().map(|ks| ks.iter().map(|e| e.eval_f64(x, pole_tol)).collect()).collect())
            .collect()
    }

    /// Smallest denominator magnitude among the symbols at `x`.
    pub fn min_denominator(&self, x: &[f64]) -> f64 {
        self.symbols()
            .filter(|(_, _, _, e)| !e.is_polynomial())
            .map(|(_, _, _, e)| e.denominator().eval_f64(x).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

pub type ExprMatrix = Vec<Vec<RatExpr>>;

/// `H_ij = f_ij - sum_k Γ^k_ij f_k`.
pub fn hessian_under(f: &Polynomial, conn: &Connection) -> Result<ExprMatrix, ConnectionError> {
    let n = conn.n();
    if f.nvars() != n {
        return Err(ConnectionError::DimensionMismatch { expected: n, found: f.nvars() });
    }
    let grad: Vec<RatExpr> = gradient(f).into_iter().map(RatExpr::from).collect();
    let hess = euclidean_hessian(f);
    let mut h = vec![vec![RatExpr::zero(n); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut e = RatExpr::from(hess[i][j].clone());
            for (k, gk) in grad.iter().enumerate() {
                let g = conn.symbol(k, i, j);
                if !g.is_zero() && !gk.is_zero() {
                    e = &e - &(g * gk);
                }
            }
            h[j][i] = e.clone();
            h[i][j] = e;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum HessianCheck {
    /// Every entry of `Hess - target` was canonicalized; `nonzero` lists the
    /// surviving entries `(i, j, expr)` with `i <= j`, 0-based.
    Symbolic {
        verified: bool,
        nonzero: Vec<(usize, usize, String)>,
    },
    /// Largest relative residual over sampled points in `[-1, 1]^n`.
    Sampled {
        verified: bool,
        max_residual: f64,
        samples: usize,
        skipped: usize,
    },
}

impl HessianCheck {
    pub fn verified(&self) -> bool {
        match self {
            HessianCheck::Symbolic { verified, .. } | HessianCheck::Sampled { verified, .. } => *verified,
        }
    }
}

const SAMPLED_POINTS: usize = 1000;
const SAMPLED_TOL: f64 = 1e-8;

/// Checks `hessian_under(f, conn) == target`: symbolically for exact
/// connections, at sampled points for floating ones.
pub fn verify_hessian_target(
    f: &Polynomial,
    conn: &Connection,
    target: &[Vec<RatExpr>],
) -> Result<HessianCheck, ConnectionError> {
    let n = conn.n();
    if target.len() != n || target.iter().any(|r| r.len() != n) {
        return Err(ConnectionError::DimensionMismatch { expected: n, found: target.len() });
    }
    let h = hessian_under(f, conn)?;
    let mut diff = vec![vec![RatExpr::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            diff[i][j] = &h[i][j] - &target[i][j];
        }
    }
    if conn.precision() == Precision::Exact {
        let nonzero: Vec<(usize, usize, String)> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !diff[i][j].is_zero())
            .map(|(i, j)| (i, j, diff[i][j].to_text()))
            .collect();
        return Ok(HessianCheck::Symbolic { verified: nonzero.is_empty(), nonzero });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..SAMPLED_POINTS {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mut point = Vec::with_capacity(n * n);
        let mut scale: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                point.push(diff[i][j].eval_f64(&x, 1e-9));
                if let (Some(a), Some(b)) = (h[i][j].eval_f64(&x, 1e-9), target[i][j].eval_f64(&x, 1e-9)) {
                    scale = scale.max(a.abs()).max(b.abs());
                }
            }
        }
        match point.into_iter().collect::<Option<Vec<f64>>>() {
            Some(vals) => {
                let m = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                worst = worst.max(m / scale);
            }
            None => skipped += 1,
        }
    }
    Ok(HessianCheck::Sampled {
        verified: worst <= SAMPLED_TOL,
        max_residual: worst,
        samples: SAMPLED_POINTS,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_expression, parse_rational_expression};

    fn p(s: &str) -> Polynomial {
        parse_expression(s, &["x1", "x2"]).unwrap()
    }

    fn e(s: &str) -> RatExpr {
        parse_rational_expression(s, &["x1", "x2"]).unwrap()
    }

    pub(crate) fn curved_example() -> Connection {
        Connection::zero(2)
            .with_symbol(0, 0, 0, e("4*x1/(1 + 4*x1^2)"))
            .with_symbol(1, 0, 0, e("2/(1 + 4*x1^2)"))
            .with_symbol(0, 1, 1, e("1"))
            .with_symbol(1, 1, 1, e("-2*x1"))
    }

    #[test]
    fn zero_connection_gives_euclidean_hessian() {
        let f = p("x1^3*x2 + x2^2");
        let h = hessian_under(&f, &Connection::zero(2)).unwrap();
        let expect = euclidean_hessian(&f);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(h[i][j], RatExpr::from(expect[i][j].clone()));
            }
        }
    }

    #[test]
    fn hessian_examples() {
        let f = p("x1^2 + x2");
        let conn = Connection::zero(2).with_symbol(1, 0, 0, e("2"));
        assert!(hessian_under(&f, &conn).unwrap().iter().flatten().all(|x| x.is_zero()));
        assert!(hessian_under(&f, &curved_example()).unwrap().iter().flatten().all(|x| x.is_zero()));
        assert!(verify_hessian_target(&f, &curved_example(), &zero_target(2)).unwrap().verified());
    }

    #[test]
    fn residual_reported_for_wrong_connection() {
        let f = parse_expression("x^2", &["x"]).unwrap();
        match verify_hessian_target(&f, &Connection::zero(1), &zero_target(1)).unwrap() {
            HessianCheck::Symbolic { verified, nonzero } => {
                assert!(!verified);
                assert_eq!(nonzero, vec![(0, 0, "2".to_string())]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_symbols_rejected() {
        let mut g = vec![vec![vec![RatExpr::zero(2); 2]; 2]; 2];
        g[0][1][0] = e("x1");
        assert_eq!(
            Connection::new(g, Precision::Exact),
            Err(ConnectionError::NotSymmetric { k: 0, i: 0, j: 1 })
        );
    }
}
