//! Curvature of a connection, covariant derivatives of tensor fields, and the
//! Lie algebras `L_k` generated at a point by the curvature endomorphisms
//! `X_{v1,v2,...}(u) = (∇^j R(v1, v2))(u, v3, ..., v_{j+2})`. On `R^n`, the
//! connection is Levi-Civita for a metric of some signature iff the stable
//! algebra preserves a non-degenerate symmetric form.

mod lie;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::connection::{Connection, Precision};
use crate::linalg::{determinant, inertia, jacobi_eigen, mat_mul, nullspace, transpose, RMatrix};
use crate::polycore::{qserde, rat, rational_to_f64, PolyError, RatExpr, Rational};

pub use lie::{bracket, lie_closure, lie_closure_numeric, FMatrix, LieAlgebraBasis, NumericLieBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolonomyError {
    #[error("a Christoffel symbol has a pole at the point")]
    PoleAtPoint,
    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no stabilization by order {0}")]
    IterationCap(usize),
}

impl From<PolyError> for HolonomyError {
    fn from(_: PolyError) -> Self {
        HolonomyError::PoleAtPoint
    }
}

/// A `(1, s)` tensor field. Components are stored with the upper index first
/// and lower indices in slot order, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    n: usize,
    lower: usize,
    comps: Vec<RatExpr>,
}

impl TensorField {
    pub fn new(n: usize, lower: usize, comps: Vec<RatExpr>) -> Self {
        assert_eq!(comps.len(), n.pow(lower as u32 + 1), "component count");
        TensorField { n, lower, comps }
    }

    pub fn zero(n: usize, lower: usize) -> Self {
        Self::new(n, lower, vec![RatExpr::zero(n); n.pow(lower as u32 + 1)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lower indices.
    pub fn lower(&self) -> usize {
        self.lower
    }

    fn index(&self, upper: usize, lower: &[usize]) -> usize {
        debug_assert_eq!(lower.len(), self.lower);
        lower.iter().fold(upper, |acc, &a| acc * self.n + a)
    }

    pub fn component(&self, upper: usize, lower: &[usize]) -> &RatExpr {
        &self.comps[self.index(upper, lower)]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatExpr::is_zero)
    }

    /// All lower multi-indices in storage order.
    fn lower_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (n, s) = (self.n, self.lower);
        (0..n.pow(s as u32)).map(move |mut c| {
            let mut idx = vec![0; s];
            for slot in (0..s).rev() {
                idx[slot] = c % n;
                c /= n;
            }
            idx
        })
    }

    /// The endomorphism `u |-> T(u, rest...)` at `x`, as the matrix whose
    /// `(l, c)` entry is `T^l_{c, rest}`.
    pub fn endomorphism_at(&self, rest: &[usize], x: &[Rational]) -> Result<RMatrix, PolyError> {
        assert_eq!(rest.len() + 1, self.lower, "all but the first lower slot are fixed");
        let n = self.n;
        let mut idx = vec![0; self.lower];
        idx[1..].copy_from_slice(rest);
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (l, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                idx[0] = c;
                *entry = self.component(l, &idx).evaluate(x)?;
            }
        }
        Ok(m)
    }
}

/// `R^l_{ijk}`, stored as the `(1, 3)` field with lower slots `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor(TensorField);

impl CurvatureTensor {
    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn component(&self, l: usize, i: usize, j: usize, k: usize) -> &RatExpr {
        self.0.component(l, &[i, j, k])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_tensor(&self) -> &TensorField {
        &self.0
    }

    /// `R(∂_i, ∂_j)` as a `(1, 1)` field: `E^l_k = R^l_{ijk}`.
    pub fn endomorphism_field(&self, i: usize, j: usize) -> TensorField {
        let n = self.n();
        let comps = (0..n)
            .flat_map(|l| (0..n).map(move |k| (l, k)))
            .map(|(l, k)| self.component(l, i, j, k).clone())
            .collect();
        TensorField::new(n, 1, comps)
    }
}

/// `R^l_{ijk} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + sum_t (Γ^t_{jk} Γ^l_{it} - Γ^t_{ik} Γ^l_{jt})`.
pub fn curvature(conn: &Connection) -> CurvatureTensor {
    let n = conn.n();
    let mut comps = Vec::with_capacity(n.pow(4));
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j {
                        comps.push(RatExpr::zero(n));
                        continue;
                    }
                    let mut e = &conn.symbol(l, j, k).diff(i) - &conn.symbol(l, i, k).diff(j);
                    for t in 0..n {
                        let a = conn.symbol(t, j, k);
                        let b = conn.symbol(l, i, t);
                        if !a.is_zero() && !b.is_zero() {
                            e = &e + &(a * b);
                        }
                        let c = conn.symbol(t, i, k);
                        let d = conn.symbol(l, j, t);
                        if !c.is_zero() && !d.is_zero() {
                            e = &e - &(c * d);
                        }
                    }
                    comps.push(e);
                }
            }
        }
    }
    CurvatureTensor(TensorField::new(n, 3, comps))
}

/// `(∇T)^l_{a_1..a_s m} = ∂_m T^l_a + Γ^l_{mt} T^t_a - sum_p Γ^t_{m a_p} T^l_{..t..}`,
/// with the differentiation slot `m` appended last.
pub fn covariant_derivative(t: &TensorField, conn: &Connection) -> TensorField {
    let n = t.n;
    assert_eq!(conn.n(), n, "dimension");
    let s = t.lower;
    let lowers: Vec<Vec<usize>> = t.lower_indices().collect();
    let mut comps = Vec::with_capacity(n.pow(s as u32 + 2));
    for l in 0..n {
        for a in &lowers {
            for m in 0..n {
                let mut e = t.component(l, a).diff(m);
                for tt in 0..n {
                    let g = conn.symbol(l, m, tt);
                    let v = t.component(tt, a);
                    if !g.is_zero() && !v.is_zero() {
                        e = &e + &(g * v);
                    }
                }
                for p in 0..s {
                    let mut b = a.clone();
                    for tt in 0..n {
                        let g = conn.symbol(tt, m, a[p]);
                        if g.is_zero() {
                            continue;
                        }
                        b[p] = tt;
                        let v = t.component(l, &b);
                        if !v.is_zero() {
                            e = &e - &(g * v);
                        }
                    }
                }
                comps.push(e);
            }
        }
    }
    TensorField::new(n, s + 1, comps)
}

/// One evaluated generator `X_{i1, i2, i3, ...}`; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "qserde::matrix")]
    pub matrix: RMatrix,
}

impl Generator {
    pub fn order(&self) -> usize {
        self.indices.len() - 2
    }
}

/// Holds `∇^j R(∂_i1, ∂_i2)` for every `i1 < i2` and extends `j` on demand.
struct Tower<'a> {
    conn: &'a Connection,
    order: usize,
    fields: Vec<((usize, usize), TensorField)>,
}

impl<'a> Tower<'a> {
    fn new(conn: &'a Connection) -> Self {
        let n = conn.n();
        let r = curvature(conn);
        let fields = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), r.endomorphism_field(i, j)))
            .collect();
        Tower { conn, order: 0, fields }
    }

    fn advance(&mut self) {
        for (_, f) in self.fields.iter_mut() {
            if !f.is_zero() {
                *f = covariant_derivative(f, self.conn);
            } else {
                *f = TensorField::zero(f.n, f.lower + 1);
            }
        }
        self.order += 1;
    }

    /// Generators of the current order at `x`.
    fn generators(&self, x: &[Rational]) -> Result<Vec<Generator>, PolyError> {
        let n = self.conn.n();
        let j = self.order;
        let mut out = Vec::new();
        for ((i1, i2), field) in &self.fields {
            for c in 0..n.pow(j as u32) {
                let mut rest = vec![0; j];
                let mut cc = c;
                for slot in (0..j).rev() {
                    rest[slot] = cc % n;
                    cc /= n;
                }
                let matrix = if field.is_zero() {
                    vec![vec![Rational::zero(); n]; n]
                } else {
                    field.endomorphism_at(&rest, x)?
                };
                let mut indices = vec![i1 + 1, i2 + 1];
                indices.extend(rest.iter().map(|r| r + 1));
                out.push(Generator { indices, matrix });
            }
        }
        Ok(out)
    }
}

fn check_point(conn: &Connection, x: &[Rational]) -> Result<(), HolonomyError> {
    if x.len() != conn.n() {
        return Err(HolonomyError::DimensionMismatch { expected: conn.n(), found: x.len() });
    }
    for (_, _, _, e) in conn.nonzero_symbols() {
        if e.denominator().evaluate(x)?.is_zero() {
            return Err(HolonomyError::PoleAtPoint);
        }
    }
    Ok(())
}

/// Every generator of order `0..=k` at `x`, pruned to `i1 < i2`.
pub fn generators_at(conn: &Connection, x: &[Rational], k: usize) -> Result<Vec<Generator>, HolonomyError> {
    check_point(conn, x)?;
    let mut tower = Tower::new(conn);
    let mut out = tower.generators(x)?;
    for _ in 0..k {
        tower.advance();
        out.extend(tower.generators(x)?);
    }
    Ok(out)
}

/// The stable algebra at `x` and the first order `k` at which `L_{k+1} = L_k`.
pub fn stabilized_algebra(conn: &Connection, x: &[Rational]) -> Result<(usize, LieAlgebraBasis), HolonomyError> {
    let n = conn.n();
    check_point(conn, x)?;
    let mut tower = Tower::new(conn);
    let mats = |gs: Vec<Generator>| gs.into_iter().map(|g| g.matrix).collect::<Vec<_>>();
    let mut alg = lie_closure(n, &mats(tower.generators(x)?));
    for k in 0..=n * n {
        if alg.dim() == n * n {
            return Ok((k, alg));
        }
        tower.advance();
        let mut all = alg.matrices.clone();
        all.extend(mats(tower.generators(x)?));
        let next = lie_closure(n, &all);
        if next.dim() == alg.dim() {
            return Ok((k, alg));
        }
        alg = next;
    }
    Err(HolonomyError::IterationCap(n * n))
}

/// Rank tolerance relative to the matrix scale for floating connections.
const NUMERIC_TOL: f64 = 1e-9;

fn to_f64(m: &RMatrix) -> FMatrix {
    m.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect()
}

/// [`stabilized_algebra`] with floating span decisions.
pub fn stabilized_algebra_numeric(conn: &Connection, x: &[Rational]) -> Result<(usize, NumericLieBasis), HolonomyError> {
    let n = conn.n();
    check_point(conn, x)?;
    let mut tower = Tower::new(conn);
    let mats = |gs: Vec<Generator>| gs.iter().map(|g| to_f64(&g.matrix)).collect::<Vec<_>>();
    let mut alg = lie_closure_numeric(n, &mats(tower.generators(x)?), NUMERIC_TOL);
    for k in 0..=n * n {
        if alg.dim() == n * n {
            return Ok((k, alg));
        }
        tower.advance();
        let mut all = alg.matrices.clone();
        all.extend(mats(tower.generators(x)?));
        let next = lie_closure_numeric(n, &all, NUMERIC_TOL);
        if next.dim() == alg.dim() {
            return Ok((k, alg));
        }
        alg = next;
    }
    Err(HolonomyError::IterationCap(n * n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BilinearForm {
    Exact(#[serde(serialize_with = "qserde::matrix")] RMatrix),
    Numeric(FMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum LcVerdict {
    /// The algebra is zero: flat, so every signature occurs.
    MetricExistsAllSignatures,
    /// An invariant non-degenerate form with `(positive, negative)` signature.
    MetricExists { signature: (usize, usize), form: BilinearForm },
    /// The algebra is too large to preserve any non-degenerate form.
    NoMetric,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcReport {
    pub k_stable: usize,
    pub dim: usize,
    pub verdict: LcVerdict,
    pub numeric: bool,
    pub notes: Vec<String>,
}

const FORM_SAMPLES: usize = 50;

/// Symmetric basis `S_ab = E_ab + E_ba` (`a < b`) and `E_aa`.
fn symmetric_basis(n: usize) -> Vec<RMatrix> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut m = vec![vec![Rational::zero(); n]; n];
            m[a][b] = rat(1);
            m[b][a] = rat(1);
            out.push(m);
        }
    }
    out
}

/// `X^T B + B X`.
pub fn invariance_defect(x: &RMatrix, b: &RMatrix) -> RMatrix {
    let l = mat_mul(&transpose(x), b);
    let r = mat_mul(b, x);
    l.iter().zip(&r).map(|(p, q)| p.iter().zip(q).map(|(u, v)| u + v).collect()).collect()
}

/// Levi-Civita test at `x`.
pub fn lc_check(conn: &Connection, x: &[Rational]) -> Result<LcReport, HolonomyError> {
    if conn.precision() == Precision::Floating {
        return lc_check_numeric(conn, x);
    }
    let n = conn.n();
    let (k_stable, alg) = stabilized_algebra(conn, x)?;
    let dim = alg.dim();
    let report = |verdict, notes| LcReport { k_stable, dim, verdict, numeric: false, notes };
    if dim == 0 {
        return Ok(report(LcVerdict::MetricExistsAllSignatures, vec![]));
    }
    if dim > (n * n - n) / 2 {
        return Ok(report(LcVerdict::NoMetric, vec![format!("dim {dim} > {}", (n * n - n) / 2)]));
    }
    let sym = symmetric_basis(n);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for xm in &alg.matrices {
        let images: Vec<RMatrix> = sym.iter().map(|s| invariance_defect(xm, s)).collect();
        for i in 0..n {
            for j in i..n {
                rows.push(images.iter().map(|im| im[i][j].clone()).collect());
            }
        }
    }
    let kernel = nullspace(&rows, sym.len());
    if kernel.is_empty() {
        return Ok(report(LcVerdict::Inconclusive, vec!["only the zero form is invariant".into()]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..FORM_SAMPLES {
        let coeffs: Vec<Rational> = kernel.iter().map(|_| rat(rng.random_range(-10..=10))).collect();
        let mut b = vec![vec![Rational::zero(); n]; n];
        for (c, v) in coeffs.iter().zip(&kernel) {
            for (s, vs) in sym.iter().zip(v) {
                let w = c * vs;
                if w.is_zero() {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        if !s[i][j].is_zero() {
                            b[i][j] += &w;
                        }
                    }
                }
            }
        }
        if !determinant(&b).is_zero() {
            let (p, q, _) = inertia(&b);
            return Ok(report(
                LcVerdict::MetricExists { signature: (p, q), form: BilinearForm::Exact(b) },
                vec![format!("invariant forms span dimension {}", kernel.len())],
            ));
        }
    }
    Ok(report(
        LcVerdict::Inconclusive,
        vec![format!("{FORM_SAMPLES} sampled invariant forms were all degenerate")],
    ))
}

fn lc_check_numeric(conn: &Connection, x: &[Rational]) -> Result<LcReport, HolonomyError> {
    let n = conn.n();
    let (k_stable, alg) = stabilized_algebra_numeric(conn, x)?;
    let dim = alg.dim();
    let mut notes = vec!["floating connection: span and rank decisions are numeric".to_string()];
    let report = |verdict, notes| LcReport { k_stable, dim, verdict, numeric: true, notes };
    if dim == 0 {
        return Ok(report(LcVerdict::MetricExistsAllSignatures, notes));
    }
    if dim > (n * n - n) / 2 {
        return Ok(report(LcVerdict::NoMetric, notes));
    }
    let sym: Vec<FMatrix> = symmetric_basis(n).iter().map(to_f64).collect();
    let s = sym.len();
    // Gram matrix of the linear map B |-> (X^T B + B X)_X; its near-null
    // eigenvectors are the invariant forms.
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); s];
    for xm in &alg.matrices {
        for (c, sm) in sym.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    let v: f64 = (0..n).map(|t| xm[t][i] * sm[t][j] + sm[i][t] * xm[t][j]).sum();
                    columns[c].push(v);
                }
            }
        }
    }
    let gram: FMatrix = (0..s)
        .map(|a| (0..s).map(|b| columns[a].iter().zip(&columns[b]).map(|(u, v)| u * v).sum()).collect())
        .collect();
    let (vals, vecs) = jacobi_eigen(&gram).expect("symmetric eigensolve");
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let kernel: Vec<Vec<f64>> = (0..s)
        .filter(|&c| vals[c].abs() <= NUMERIC_TOL * scale)
        .map(|c| (0..s).map(|r| vecs[r][c]).collect())
        .collect();
    if kernel.is_empty() {
        notes.push("only the zero form is invariant".into());
        return Ok(report(LcVerdict::Inconclusive, notes));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..FORM_SAMPLES {
        let mut b = vec![vec![0.0; n]; n];
        for v in &kernel {
            let c = rng.random_range(-10..=10) as f64;
            for (sm, w) in sym.iter().zip(v) {
                for i in 0..n {
                    for j in 0..n {
                        b[i][j] += c * w * sm[i][j];
                    }
                }
            }
        }
        let (ev, _) = jacobi_eigen(&b).expect("symmetric eigensolve");
        let bscale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if bscale > 0.0 && ev.iter().all(|v| v.abs() > NUMERIC_TOL * bscale) {
            let p = ev.iter().filter(|v| **v > 0.0).count();
            return Ok(report(
                LcVerdict::MetricExists { signature: (p, n - p), form: BilinearForm::Numeric(b) },
                notes,
            ));
        }
    }
    notes.push(format!("{FORM_SAMPLES} sampled invariant forms were all degenerate"));
    Ok(report(LcVerdict::Inconclusive, notes))
}
