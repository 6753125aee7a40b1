use num_traits::Zero;

use super::{Connection, ConnectionError, ExprMatrix};
use crate::classify::{count_isolated_critical_points, CriticalCount, QuadraticForm};
use crate::linalg::{mat_mul, nullspace, solve, transpose};
use crate::polycore::{euclidean_hessian, gradient, Polynomial, RatExpr, Rational};

pub fn zero_target(n: usize) -> ExprMatrix {
    vec![vec![RatExpr::zero(n); n]; n]
}

/// `Γ^k_ij = (f_ij - a_ij) f_k / |∇f|^2`, which gives `Hess f = a`.
///
/// The symbols have poles exactly at the critical points of `f`. For the
/// classes the classifier understands, a critical point is reported as an
/// error; outside them the caller vouches for `f`.
pub fn construct_no_critical(f: &Polynomial, target: &[Vec<RatExpr>]) -> Result<Connection, ConnectionError> {
    let n = f.nvars();
    if target.len() != n || target.iter().any(|r| r.len() != n) {
        return Err(ConnectionError::DimensionMismatch { expected: n, found: target.len() });
    }
    for i in 0..n {
        for j in 0..i {
            if target[i][j] != target[j][i] {
                return Err(ConnectionError::TargetNotSymmetric);
            }
        }
    }
    match count_isolated_critical_points(f).count {
        CriticalCount::Finite(0) | CriticalCount::Unknown(_) => {}
        _ => return Err(ConnectionError::CriticalPointDetected),
    }
    let grad = gradient(f);
    let norm2 = grad.iter().fold(Polynomial::zero(n), |acc, g| &acc + &(g * g));
    if norm2.is_zero() {
        return Err(ConnectionError::CriticalPointDetected);
    }
    let hess = euclidean_hessian(f);
    let mut conn = Connection::zero(n);
    for i in 0..n {
        for j in i..n {
            let excess = &RatExpr::from(hess[i][j].clone()) - &target[i][j];
            if excess.is_zero() {
                continue;
            }
            for (k, gk) in grad.iter().enumerate() {
                if gk.is_zero() {
                    continue;
                }
                let num = excess.mul_poly(gk);
                let value = (&num / &RatExpr::from(norm2.clone()))?;
                conn = conn.with_symbol(k, i, j, value);
            }
        }
    }
    Ok(conn)
}

/// Constant symbols `Γ^k_ij = u_k A_ij / (u·b)` for a kernel vector `u` of
/// `A` with `u·b != 0`.
///
/// Along `u` the gradient `A x + b` has the constant component `u·b`, so the
/// Hessian `A - Γ·∇f` vanishes; curvature vanishes because `A u = 0`. In the
/// normal-form coordinates this is `Γ^{j0}_{pp} = 2 μ_p / ν_{j0}`. The kernel
/// vector is the projection of `b` onto `ker A`, the direction of largest
/// `|ν|`, so the symbols stay exact for every rational input.
pub fn construct_quadratic_flat(q: &QuadraticForm) -> Result<Connection, ConnectionError> {
    if !q.has_no_critical_point() {
        return Err(ConnectionError::HasCriticalPoint);
    }
    let n = q.n();
    let u = kernel_projection(&q.a, &q.b);
    let ub: Rational = u.iter().zip(&q.b).map(|(x, y)| x * y).sum();
    debug_assert!(!ub.is_zero());
    let mut conn = Connection::zero(n);
    for i in 0..n {
        for j in i..n {
            if q.a[i][j].is_zero() {
                continue;
            }
            for (k, uk) in u.iter().enumerate() {
                if !uk.is_zero() {
                    let value = uk * &q.a[i][j] / &ub;
                    conn = conn.with_symbol(k, i, j, RatExpr::constant(n, value));
                }
            }
        }
    }
    Ok(conn)
}

/// Orthogonal projection of `b` onto `ker A`.
fn kernel_projection(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Rational> {
    let n = b.len();
    let kernel = nullspace(&a.to_vec(), n);
    if kernel.is_empty() {
        return vec![Rational::zero(); n];
    }
    // K columns span ker A; u = K (K^T K)^{-1} K^T b.
    let k: Vec<Vec<Rational>> = (0..n).map(|i| kernel.iter().map(|v| v[i].clone()).collect()).collect();
    let kt = transpose(&k);
    let gram = mat_mul(&kt, &k);
    let ktb: Vec<Rational> = kt.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect();
    let coef = solve(&gram, &ktb).expect("Gram matrix of a basis is invertible");
    (0..n).map(|i| k[i].iter().zip(&coef).map(|(x, c)| x * c).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::to_quadratic_form;
    use crate::connection::{hessian_under, verify_hessian_target};
    use crate::polycore::{parse_expression, parse_rational_expression, rat};

    fn quad(s: &str, n: usize) -> QuadraticForm {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        to_quadratic_form(&parse_expression(s, &names).unwrap()).unwrap()
    }

    #[test]
    fn no_critical_examples() {
        let f = parse_expression("x", &["x"]).unwrap();
        assert!(construct_no_critical(&f, &zero_target(1)).unwrap().is_zero());

        let f = parse_expression("x^3 + x", &["x"]).unwrap();
        let conn = construct_no_critical(&f, &zero_target(1)).unwrap();
        assert_eq!(*conn.symbol(0, 0, 0), parse_rational_expression("6*x/(3*x^2 + 1)", &["x"]).unwrap());
        assert!(verify_hessian_target(&f, &conn, &zero_target(1)).unwrap().verified());

        let f = parse_expression("x1^2 + x2", &["x1", "x2"]).unwrap();
        let conn = construct_no_critical(&f, &zero_target(2)).unwrap();
        let e = |s: &str| parse_rational_expression(s, &["x1", "x2"]).unwrap();
        assert_eq!(*conn.symbol(0, 0, 0), e("4*x1/(4*x1^2 + 1)"));
        assert_eq!(*conn.symbol(1, 0, 0), e("2/(4*x1^2 + 1)"));
        assert_eq!(conn.nonzero_symbols().count(), 2);
    }

    #[test]
    fn nonzero_target() {
        let names = ["x1", "x2"];
        let f = parse_expression("x1^3 + x1 + x2^2*x1 + x2", &names).unwrap();
        let e = |s: &str| parse_rational_expression(s, &names).unwrap();
        let target = vec![vec![e("1"), e("x2/(x1^2 + 1)")], vec![e("x2/(x1^2 + 1)"), e("3")]];
        let conn = construct_no_critical(&f, &target).unwrap();
        let h = hessian_under(&f, &conn).unwrap();
        assert_eq!(h, target);
    }

    #[test]
    fn critical_points_refused() {
        let f = parse_expression("x^2", &["x"]).unwrap();
        assert_eq!(construct_no_critical(&f, &zero_target(1)), Err(ConnectionError::CriticalPointDetected));
        assert_eq!(construct_quadratic_flat(&quad("x1^2 + x2^2", 2)), Err(ConnectionError::HasCriticalPoint));
    }

    #[test]
    fn flat_examples() {
        let conn = construct_quadratic_flat(&quad("x1^2 + x2", 2)).unwrap();
        assert_eq!(conn.symbol(1, 0, 0).constant_value(), Some(rat(2)));
        assert_eq!(conn.nonzero_symbols().count(), 1);

        assert!(construct_quadratic_flat(&quad("x2", 2)).unwrap().is_zero());

        let conn = construct_quadratic_flat(&quad("2*x1^2 - x2", 2)).unwrap();
        assert_eq!(conn.symbol(1, 0, 0).constant_value(), Some(rat(-4)));
    }

    #[test]
    fn flat_rotated_quadratic_is_exact() {
        // ker A is spanned by (1, -1, 0), and b = (1, 0, 0) is not in range(A).
        let q = quad("(x1 + x2)^2 + x1 + 3*x3^2", 3);
        let conn = construct_quadratic_flat(&q).unwrap();
        let f = q.to_polynomial();
        assert!(verify_hessian_target(&f, &conn, &zero_target(3)).unwrap().verified());
    }
}
