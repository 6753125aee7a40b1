//! Small dense linear algebra: exact over the rationals, plus a float Jacobi
//! eigensolver for symmetric matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polycore::Rational;

pub type RMatrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> RMatrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> RMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &RMatrix) -> RMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Rank by fraction-free (Bareiss) elimination after clearing denominators row by row.
pub fn rank(a: &RMatrix) -> usize {
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(a: &RMatrix) -> (RMatrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace(a: &RMatrix, cols: usize) -> Vec<Vec<Rational>> {
    if a.is_empty() {
        return (0..cols)
            .map(|k| (0..cols).map(|j| if j == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// A solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &RMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(b.len(), |r| r.len());
    let aug: RMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = m[row][n].clone();
    }
    Some(x)
}

pub fn determinant(a: &RMatrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let v = &f * &m[c][j];
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Coefficients `[1, c_1, ..., c_n]` of `det(tI - A) = t^n + c_1 t^(n-1) + ... + c_n`,
/// by Faddeev-LeVerrier.
pub fn char_poly(a: &RMatrix) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::one()];
    let mut m = zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs.push(-tr / Rational::from_integer(BigInt::from(k)));
    }
    coeffs
}

/// Elementary symmetric functions `e_1..e_n` of the eigenvalues, i.e. the sums
/// of principal minors of each order.
pub fn principal_minor_sums(a: &RMatrix) -> Vec<Rational> {
    char_poly(a)
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| if k % 2 == 1 { -c } else { c })
        .collect()
}

/// Exact positive-semidefiniteness of a symmetric matrix by symmetric
/// elimination: a PSD matrix has no negative diagonal entry, a zero diagonal
/// entry forces a zero row, and eliminating a positive pivot leaves a PSD
/// Schur complement.
pub fn is_psd(a: &RMatrix) -> bool {
    let mut m = a.clone();
    let mut live: Vec<usize> = (0..m.len()).collect();
    while !live.is_empty() {
        if live.iter().any(|&i| m[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = live.iter().position(|&i| m[i][i].is_positive()) else {
            return live.iter().all(|&i| live.iter().all(|&j| m[i][j].is_zero()));
        };
        let p = live.swap_remove(pos);
        let inv = m[p][p].recip();
        for &i in &live {
            if m[i][p].is_zero() {
                continue;
            }
            let f = &m[i][p] * &inv;
            for &j in &live {
                let v = &f * &m[p][j];
                m[i][j] -= v;
            }
        }
    }
    true
}

/// `(positive, negative, zero)` eigenvalue counts of a symmetric matrix, read
/// off the characteristic polynomial by Descartes' rule (exact for real-rooted
/// polynomials).
pub fn inertia(a: &RMatrix) -> (usize, usize, usize) {
    let n = a.len();
    let c = char_poly(a); // c[k] multiplies t^(n-k)
    let zero = c.iter().rev().take_while(|x| x.is_zero()).count();
    let var = |flip: bool| {
        let mut last = 0i8;
        let mut v = 0;
        for (k, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mut s: i8 = if x.is_positive() { 1 } else { -1 };
            if flip && (n - k) % 2 == 1 {
                s = -s;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    };
    (var(false), var(true), zero)
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations. Returns
/// eigenvalues in ascending order and the matching eigenvectors as columns.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Some((vec![0.0; n], v));
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&x, &y| m[x][x].total_cmp(&m[y][y]));
            let vals = idx.iter().map(|&i| m[i][i]).collect();
            let vecs = (0..n).map(|r| idx.iter().map(|&c| v[r][c]).collect()).collect();
            return Some((vals, vecs));
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    None
}

/// Smallest eigenvalue of a symmetric float matrix.
pub fn min_eigenvalue(a: &[Vec<f64>]) -> Option<f64> {
    jacobi_eigen(a).map(|(vals, _)| vals.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::ratio;

    fn m(rows: &[&[i64]]) -> RMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| ratio(x, 1)).collect())
            .collect()
    }

    /// Principal-minor sums by explicit enumeration over index subsets.
    fn minors_by_enumeration(a: &RMatrix) -> Vec<Rational> {
        let n = a.len();
        let mut e = vec![Rational::zero(); n];
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub: RMatrix = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect())
                .collect();
            e[idx.len() - 1] += determinant(&sub);
        }
        e
    }

    #[test]
    fn minor_sums_match_enumeration() {
        let a = m(&[&[2, -1, 3], &[-1, 0, 4], &[3, 4, -5]]);
        assert_eq!(principal_minor_sums(&a), minors_by_enumeration(&a));
    }

    #[test]
    fn psd_and_inertia() {
        assert!(is_psd(&m(&[&[2, 0], &[0, 0]])));
        assert!(!is_psd(&m(&[&[-2, 0], &[0, 2]])));
        assert!(!is_psd(&m(&[&[0, 1], &[1, 0]])));
        assert!(is_psd(&m(&[&[1, 1], &[1, 1]])));
        assert_eq!(inertia(&m(&[&[0, 1], &[1, 0]])), (1, 1, 0));
        assert_eq!(inertia(&m(&[&[1, 1], &[1, 1]])), (1, 0, 1));
        assert_eq!(inertia(&m(&[&[-3, 0, 0], &[0, -1, 0], &[0, 0, 2]])), (1, 2, 0));
    }

    #[test]
    fn rank_and_solve() {
        let a = m(&[&[2, 0], &[0, 0]]);
        assert_eq!(rank(&a), 1);
        let ab = m(&[&[2, 0, 0], &[0, 0, 1]]);
        assert_eq!(rank(&ab), 2);
        assert!(solve(&a, &[ratio(0, 1), ratio(-1, 1)]).is_none());
        let x = solve(&m(&[&[1, 2], &[3, 4]]), &[ratio(5, 1), ratio(6, 1)]).unwrap();
        assert_eq!(x, vec![ratio(-4, 1), ratio(9, 2)]);
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
    }

    #[test]
    fn nullspace_basis() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let r: Rational = (0..3).map(|j| &a[0][j] * &v[j]).sum();
            assert!(r.is_zero());
        }
    }

    #[test]
    fn determinant_and_char_poly() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&a), ratio(-1, 1));
        assert_eq!(char_poly(&a), vec![ratio(1, 1), ratio(0, 1), ratio(-1, 1)]);
    }

    #[test]
    fn jacobi_recovers_swap_eigenvalues() {
        let (vals, vecs) = jacobi_eigen(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let dot = vecs[0][0] * vecs[0][1] + vecs[1][0] * vecs[1][1];
        assert!(dot.abs() < 1e-14);
    }
}
