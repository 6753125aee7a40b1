use serde::Serialize;

use super::{Connection, ConnectionError, Precision};
use crate::classify::QuadraticForm;
use crate::linalg::jacobi_eigen;
use crate::polycore::{f64_to_rational, rat, rational_to_f64, Polynomial, RatExpr};

/// `f(Q^T (y - v)) = sum_{i<r} μ_i y_i^2 + sum_{j>=r} ν_j y_j + κ`, with `Q`
/// orthogonal. Indices are 0-based, so `nu[j - r]` multiplies `y_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalForm {
    pub q: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub kappa: f64,
    pub r: usize,
}

const ZERO_EIGEN: f64 = 1e-10;

pub fn quadratic_normal_form(q: &QuadraticForm) -> Result<NormalForm, ConnectionError> {
    if !q.has_no_critical_point() {
        return Err(ConnectionError::HasCriticalPoint);
    }
    let n = q.n();
    let a: Vec<Vec<f64>> = q.a.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
    let b: Vec<f64> = q.b.iter().map(rational_to_f64).collect();
    let norm = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let (values, vectors) = jacobi_eigen(&a).ok_or(ConnectionError::NumericalFailure)?;
    let threshold = ZERO_EIGEN * norm;
    let mut order: Vec<usize> = (0..n).filter(|&i| values[i].abs() > threshold).collect();
    let r = order.len();
    order.extend((0..n).filter(|&i| values[i].abs() <= threshold));

    let rows: Vec<Vec<f64>> = order.iter().map(|&c| (0..n).map(|i| vectors[i][c]).collect()).collect();
    let beta: Vec<f64> = rows.iter().map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum()).collect();
    let lambda: Vec<f64> = order.iter().map(|&c| values[c]).collect();

    let mut v = vec![0.0; n];
    let mut kappa = rational_to_f64(&q.c);
    for i in 0..r {
        v[i] = beta[i] / lambda[i];
        kappa -= beta[i] * beta[i] / (2.0 * lambda[i]);
    }
    let nf = NormalForm {
        q: rows,
        v,
        mu: lambda[..r].iter().map(|l| l / 2.0).collect(),
        nu: beta[r..].to_vec(),
        kappa,
        r,
    };
    let scale = b.iter().fold(norm, |m, x| m.max(x.abs())).max(1.0);
    if nf.nu.iter().all(|x| x.abs() <= ZERO_EIGEN * scale) {
        return Err(ConnectionError::NumericalFailure);
    }
    Ok(nf)
}

impl NormalForm {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `y = Q x + v`.
    pub fn to_normal(&self, x: &[f64]) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.v)
            .map(|(row, vi)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + vi)
            .collect()
    }

    /// `x = Q^T (y - v)`.
    pub fn from_normal(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|k| self.q[k][i] * (y[k] - self.v[k])).sum())
            .collect()
    }

    /// `max |Q^T Q - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.q[k][i] * self.q[k][j]).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - id).abs());
            }
        }
        worst
    }

    /// The normal form as an exact polynomial in `y`, using the exact values
    /// of the stored doubles.
    pub fn polynomial(&self) -> Polynomial {
        let n = self.n();
        let mut terms = Vec::new();
        for (i, m) in self.mu.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 2;
            terms.push((e, f64_to_rational(*m)));
        }
        for (j, nu) in self.nu.iter().enumerate() {
            let mut e = vec![0; n];
            e[self.r + j] = 1;
            terms.push((e, f64_to_rational(*nu)));
        }
        terms.push((vec![0; n], f64_to_rational(self.kappa)));
        Polynomial::from_terms(n, terms)
    }

    /// Index `j0 >= r` of the linear coefficient of largest magnitude.
    pub fn pivot(&self) -> usize {
        let k = (0..self.nu.len())
            .max_by(|&a, &b| self.nu[a].abs().total_cmp(&self.nu[b].abs()))
            .expect("some linear coordinate");
        self.r + k
    }

    /// `Γ^{j0}_{pp} = 2 μ_p / ν_{j0}` in normal coordinates, exact for the
    /// stored doubles: flat, and the Hessian of [`Self::polynomial`] vanishes.
    pub fn flat_connection(&self) -> Connection {
        let n = self.n();
        let j0 = self.pivot();
        let nu = f64_to_rational(self.nu[j0 - self.r]);
        let mut conn = Connection::zero(n);
        for (p, m) in self.mu.iter().enumerate() {
            let value = f64_to_rational(*m) * rat(2) / &nu;
            conn = conn.with_symbol(j0, p, p, RatExpr::constant(n, value));
        }
        conn
    }

    /// [`Self::flat_connection`] carried back to `x` by the affine change
    /// `y = Q x + v`, in floating point: `Γ^k_ij = sum Q_ck Γ~^c_ab Q_ai Q_bj`.
    pub fn pullback_flat(&self) -> Connection {
        let n = self.n();
        let j0 = self.pivot();
        let nu = self.nu[j0 - self.r];
        let mut conn = Connection::zero(n).with_precision(Precision::Floating);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..self.r).map(|p| 2.0 * self.mu[p] / nu * self.q[p][i] * self.q[p][j]).sum();
                for k in 0..n {
                    let value = self.q[j0][k] * s;
                    if value != 0.0 {
                        conn = conn.with_symbol(k, i, j, RatExpr::constant(n, f64_to_rational(value)));
                    }
                }
            }
        }
        conn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::to_quadratic_form;
    use crate::connection::{construct_quadratic_flat, hessian_under, verify_hessian_target, zero_target};
    use crate::polycore::parse_expression;

    fn quad(s: &str) -> QuadraticForm {
        to_quadratic_form(&parse_expression(s, &["x1", "x2"]).unwrap()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn examples() {
        let nf = quadratic_normal_form(&quad("x1^2 + x2")).unwrap();
        assert_eq!(nf.r, 1);
        assert!(close(&nf.mu, &[1.0]));
        assert!(close(&nf.nu.iter().map(|x| x.abs()).collect::<Vec<_>>(), &[1.0]));
        assert!(nf.kappa.abs() < 1e-12);

        let nf = quadratic_normal_form(&quad("x1")).unwrap();
        assert_eq!(nf.r, 0);
        assert!(close(&nf.nu, &[1.0, 0.0]));
    }

    #[test]
    fn invertible_matrix_has_critical_point() {
        // The swap matrix [[0,1],[1,0]] is invertible, so Ax = -b always solves.
        let q = quad("x1*x2 + x1 + x2");
        assert_eq!(quadratic_normal_form(&q), Err(ConnectionError::HasCriticalPoint));
        let (values, _) = jacobi_eigen(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(close(&values, &[-1.0, 1.0]));
    }

    #[test]
    fn reconstruction_and_flatness() {
        let q = quad("3*x1^2 + 2*x1*x2 + 1/3*x2^2 + x1 - 2*x2 + 5");
        let nf = quadratic_normal_form(&q).unwrap();
        assert!(nf.orthogonality_error() < 1e-10);
        let f = q.to_polynomial();
        let g = nf.polynomial();
        for x in [[0.3, -1.2], [2.0, 0.5], [-0.7, 0.1]] {
            let y = nf.to_normal(&x);
            assert!((f.eval_f64(&x) - g.eval_f64(&y)).abs() < 1e-8);
            assert!(nf.from_normal(&y).iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-12));
        }
        let h = hessian_under(&g, &nf.flat_connection()).unwrap();
        assert!(h.iter().flatten().all(|e| e.is_zero()));

        let pulled = nf.pullback_flat();
        assert_eq!(pulled.precision(), Precision::Floating);
        assert!(verify_hessian_target(&f, &pulled, &zero_target(2)).unwrap().verified());
        // The floating pullback agrees with the exact construction.
        let exact = construct_quadratic_flat(&q).unwrap();
        for (k, i, j, e) in exact.symbols() {
            let a = e.constant_f64().unwrap();
            let b = pulled.symbol(k, i, j).constant_f64().unwrap();
            assert!((a - b).abs() < 1e-9, "{k}{i}{j}: {a} vs {b}");
        }
    }
}
