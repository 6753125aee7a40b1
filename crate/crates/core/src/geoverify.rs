//! Floating-point cross-checks for connections: RK4 geodesics, discrete
//! convexity of `f` along them, and sampled positivity of `Hess_∇ f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::connection::{hessian_under, Connection, ConnectionError};
use crate::linalg::min_eigenvalue;
use crate::polycore::{rational_to_f64, Polynomial, RatExpr};

/// Denominators below this magnitude abort integration.
pub const POLE_TOL: f64 = 1e-12;
/// Sample points whose Hessian denominators fall below this are skipped.
pub const SAMPLE_POLE_TOL: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error")]
pub enum GeodesicError {
    #[error("pole of the connection at t = {t}")]
    PoleEncountered { t: f64, position: Vec<f64> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("expected vectors of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Polynomial with `f64` coefficients, for repeated evaluation.
#[derive(Debug, Clone)]
struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    fn new(p: &Polynomial) -> Self {
        FloatPoly {
            terms: p.terms().map(|(e, c)| (e.clone(), rational_to_f64(c))).collect(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .filter(|(d, _)| **d > 0)
                    .fold(*c, |t, (d, xi)| t * xi.powi(*d as i32))
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
struct FloatRatio {
    num: FloatPoly,
    den: Option<FloatPoly>,
}

impl FloatRatio {
    fn new(e: &RatExpr) -> Self {
        FloatRatio {
            num: FloatPoly::new(e.numerator()),
            den: (!e.is_polynomial()).then(|| FloatPoly::new(e.denominator())),
        }
    }

    /// `None` when the denominator is below `pole_tol` in magnitude.
    fn eval(&self, x: &[f64], pole_tol: f64) -> Option<f64> {
        match &self.den {
            None => Some(self.num.eval(x)),
            Some(d) => {
                let dv = d.eval(x);
                (dv.abs() >= pole_tol).then(|| self.num.eval(x) / dv)
            }
        }
    }
}

/// Nonzero symbols `(k, i, j)` over all ordered pairs, ready for evaluation.
struct FloatConnection {
    n: usize,
    symbols: Vec<(usize, usize, usize, FloatRatio)>,
}

impl FloatConnection {
    fn new(conn: &Connection) -> Self {
        let n = conn.n();
        let mut symbols = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let e = conn.symbol(k, i, j);
                    if !e.is_zero() {
                        symbols.push((k, i, j, FloatRatio::new(e)));
                    }
                }
            }
        }
        FloatConnection { n, symbols }
    }

    /// Signs of the denominators; a change between two points of one RK4
    /// stencil means the stencil straddles a pole.
    fn denominator_signs(&self, x: &[f64]) -> Vec<bool> {
        self.symbols
            .iter()
            .filter_map(|(_, _, _, g)| g.den.as_ref())
            .map(|d| d.eval(x) > 0.0)
            .collect()
    }

    /// `a^k = -sum Γ^k_ij v^i v^j`.
    fn acceleration(&self, x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        let mut a = vec![0.0; self.n];
        for (k, i, j, g) in &self.symbols {
            a[*k] -= g.eval(x, POLE_TOL)? * v[*i] * v[*j];
        }
        Some(a)
    }
}

/// Samples of a geodesic on the uniform grid `t_m = m T / steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl GeodesicPath {
    pub fn endpoint(&self) -> &[f64] {
        self.positions.last().expect("at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Classical RK4 on `(x, v)' = (v, -Γ(x)(v, v))` with step `T / steps`.
pub fn integrate_geodesic(
    conn: &Connection,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath, GeodesicError> {
    let fc = FloatConnection::new(conn);
    integrate(&fc, x0, v0, t_end, steps)
}

fn integrate(
    fc: &FloatConnection,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<GeodesicPath, GeodesicError> {
    let n = fc.n;
    for len in [x0.len(), v0.len()] {
        if len != n {
            return Err(GeodesicError::DimensionMismatch { expected: n, found: len });
        }
    }
    let steps = steps.max(1);
    let h = t_end / steps as f64;
    let mut path = GeodesicPath {
        times: vec![0.0],
        positions: vec![x0.to_vec()],
        velocities: vec![v0.to_vec()],
    };
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let axpy = |base: &[f64], d: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(d).map(|(b, di)| b + s * di).collect()
    };
    for m in 0..steps {
        let t = m as f64 * h;
        let accel = |xs: &[f64], vs: &[f64], ts: f64| {
            fc.acceleration(xs, vs).ok_or_else(|| GeodesicError::PoleEncountered {
                t: ts,
                position: xs.to_vec(),
            })
        };
        let a1 = accel(&x, &v, t)?;
        let signs = fc.denominator_signs(&x);
        let (x2, v2) = (axpy(&x, &v, h / 2.0), axpy(&v, &a1, h / 2.0));
        let a2 = accel(&x2, &v2, t + h / 2.0)?;
        let (x3, v3) = (axpy(&x, &v2, h / 2.0), axpy(&v, &a2, h / 2.0));
        let a3 = accel(&x3, &v3, t + h / 2.0)?;
        let (x4, v4) = (axpy(&x, &v3, h), axpy(&v, &a3, h));
        let a4 = accel(&x4, &v4, t + h)?;
        for c in 0..n {
            x[c] += h / 6.0 * (v[c] + 2.0 * v2[c] + 2.0 * v3[c] + v4[c]);
            v[c] += h / 6.0 * (a1[c] + 2.0 * a2[c] + 2.0 * a3[c] + a4[c]);
        }
        let t_next = (m + 1) as f64 * h;
        for (probe, ts) in [(&x2, t + h / 2.0), (&x3, t + h / 2.0), (&x4, t + h), (&x, t_next)] {
            if probe.iter().all(|z| z.is_finite()) && fc.denominator_signs(probe) != signs {
                return Err(GeodesicError::PoleEncountered { t: ts, position: probe.clone() });
            }
        }
        if x.iter().chain(&v).any(|z| !z.is_finite()) {
            return Err(GeodesicError::NonFinite { t: t_next });
        }
        path.times.push(t_next);
        path.positions.push(x.clone());
        path.velocities.push(v.clone());
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Smallest `g_{m-1} - 2 g_m + g_{m+1}` for `g = f∘γ`.
    pub min_second_difference: f64,
    /// Largest `|g_{m-1} - 2 g_m + g_{m+1}| / scale`; small when `f∘γ` is affine.
    pub affine_residual: f64,
    pub scale: f64,
}

/// Discrete convexity of `f∘γ`: every centered second difference is at least
/// `-tol * max(1, max |f∘γ|)`.
pub fn convexity_along(f: &Polynomial, path: &GeodesicPath, tol: f64) -> ConvexityReport {
    let fp = FloatPoly::new(f);
    convexity_of(&fp, path, tol)
}

fn convexity_of(fp: &FloatPoly, path: &GeodesicPath, tol: f64) -> ConvexityReport {
    let g: Vec<f64> = path.positions.iter().map(|x| fp.eval(x)).collect();
    let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut min_d2 = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    for w in g.windows(3) {
        let d2 = w[0] - 2.0 * w[1] + w[2];
        min_d2 = min_d2.min(d2);
        max_abs = max_abs.max(d2.abs());
    }
    if g.len() < 3 {
        min_d2 = 0.0;
    }
    ConvexityReport {
        convex: min_d2 >= -tol * scale,
        min_second_difference: min_d2,
        affine_residual: max_abs / scale,
        scale,
    }
}

/// Axis-aligned box `[lo_i, hi_i]`.
pub type Region = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdSampleReport {
    pub samples: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub violations: usize,
    /// Smallest eigenvalue seen, and the point where it occurred.
    pub worst_eigenvalue: f64,
    pub worst_point: Option<Vec<f64>>,
}

/// Evaluates `hessian_under(f, conn)` at `samples` seeded uniform points of
/// `region` and counts points whose smallest eigenvalue is below
/// `-tol * |H|_F`. Point `m` draws from its own stream seeded `seed ^ m`.
pub fn sample_hessian_psd(
    f: &Polynomial,
    conn: &Connection,
    region: &[(f64, f64)],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<PsdSampleReport, ConnectionError> {
    let n = conn.n();
    if region.len() != n {
        return Err(ConnectionError::DimensionMismatch { expected: n, found: region.len() });
    }
    let h = hessian_under(f, conn)?;
    let entries: Vec<Vec<FloatRatio>> = h.iter().map(|r| r.iter().map(FloatRatio::new).collect()).collect();
    let results: Vec<Option<(f64, bool, Vec<f64>)>> = (0..samples)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m as u64);
            let x: Vec<f64> = region.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
            let mut hm = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    hm[i][j] = entries[i][j].eval(&x, SAMPLE_POLE_TOL)?;
                }
            }
            let norm = hm.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            let lam = min_eigenvalue(&hm)?;
            Some((lam, lam < -tol * norm, x))
        })
        .collect();
    let mut report = PsdSampleReport {
        samples,
        evaluated: 0,
        skipped: 0,
        violations: 0,
        worst_eigenvalue: f64::INFINITY,
        worst_point: None,
    };
    for r in results {
        match r {
            None => report.skipped += 1,
            Some((lam, bad, x)) => {
                report.evaluated += 1;
                report.violations += bad as usize;
                if lam < report.worst_eigenvalue {
                    report.worst_eigenvalue = lam;
                    report.worst_point = Some(x);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicSweep {
    pub geodesics: usize,
    pub convex: usize,
    /// Geodesics abandoned at a pole or a non-finite state.
    pub aborted: usize,
    pub min_second_difference: f64,
    pub max_affine_residual: f64,
}

impl GeodesicSweep {
    /// Every integrated geodesic passed and none was abandoned.
    pub fn all_convex(&self) -> bool {
        self.aborted == 0 && self.convex == self.geodesics
    }
}

/// Runs `count` geodesics with `x0, v0` uniform in `[-1, 1]^n` (stream
/// `seed ^ m` for geodesic `m`) over `[0, 1]` and tests `f` along each.
pub fn random_geodesics(
    f: &Polynomial,
    conn: &Connection,
    count: usize,
    steps: usize,
    tol: f64,
    seed: u64,
) -> GeodesicSweep {
    let fc = FloatConnection::new(conn);
    let fp = FloatPoly::new(f);
    let n = conn.n();
    let outcomes: Vec<Option<ConvexityReport>> = (0..count)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m as u64);
            let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let path = integrate(&fc, &x0, &v0, 1.0, steps).ok()?;
            Some(convexity_of(&fp, &path, tol))
        })
        .collect();
    let mut sweep = GeodesicSweep {
        geodesics: count,
        convex: 0,
        aborted: 0,
        min_second_difference: f64::INFINITY,
        max_affine_residual: 0.0,
    };
    for o in outcomes {
        match o {
            None => sweep.aborted += 1,
            Some(r) => {
                sweep.convex += r.convex as usize;
                sweep.min_second_difference = sweep.min_second_difference.min(r.min_second_difference);
                sweep.max_affine_residual = sweep.max_affine_residual.max(r.affine_residual);
            }
        }
    }
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::to_quadratic_form;
    use crate::connection::{construct_no_critical, construct_quadratic_flat, zero_target};
    use crate::polycore::{parse_expression, parse_rational_expression};

    fn p1(s: &str) -> Polynomial {
        parse_expression(s, &["x"]).unwrap()
    }

    fn p2(s: &str) -> Polynomial {
        parse_expression(s, &["x1", "x2"]).unwrap()
    }

    #[test]
    fn straight_lines() {
        let path = integrate_geodesic(&Connection::zero(1), &[0.0], &[1.0], 1.0, 100).unwrap();
        assert_eq!(path.len(), 101);
        assert!((path.endpoint()[0] - 1.0).abs() <= 1e-12);
        assert!(convexity_along(&p1("x^2"), &path, DEFAULT_TOL).convex);

        let path = integrate_geodesic(&Connection::zero(1), &[-1.0], &[1.0], 1.0, 200).unwrap();
        let r = convexity_along(&p1("x^3"), &path, DEFAULT_TOL);
        assert!(!r.convex);
        assert!(r.min_second_difference < 0.0);
    }

    #[test]
    fn constructed_connection_makes_f_affine() {
        let f = p1("x^3 + x");
        let conn = construct_no_critical(&f, &zero_target(1)).unwrap();
        let path = integrate_geodesic(&conn, &[0.0], &[1.0], 1.0, DEFAULT_STEPS).unwrap();
        let r = convexity_along(&f, &path, DEFAULT_TOL);
        assert!(r.convex);
        assert!(r.affine_residual < 1e-9, "{r:?}");

        let f = p2("x1^2 + x2");
        let conn = construct_quadratic_flat(&to_quadratic_form(&f).unwrap()).unwrap();
        let path = integrate_geodesic(&conn, &[0.3, -0.2], &[1.0, 0.5], 1.0, DEFAULT_STEPS).unwrap();
        assert!(convexity_along(&f, &path, DEFAULT_TOL).affine_residual < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let conn = construct_no_critical(&p1("x^3 + x"), &zero_target(1)).unwrap();
        let end = |steps| integrate_geodesic(&conn, &[0.0], &[1.0], 1.0, steps).unwrap().endpoint()[0];
        let reference = end(400);
        let e1 = (end(20) - reference).abs();
        let e2 = (end(40) - reference).abs();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn pole_aborts() {
        let e = parse_rational_expression("1/x", &["x"]).unwrap();
        let conn = Connection::zero(1).with_symbol(0, 0, 0, e);
        let err = integrate_geodesic(&conn, &[0.0], &[1.0], 1.0, 10).unwrap_err();
        assert!(matches!(err, GeodesicError::PoleEncountered { .. }));
        assert!(matches!(
            integrate_geodesic(&conn, &[0.0, 1.0], &[1.0], 1.0, 10),
            Err(GeodesicError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stepping_over_a_pole_aborts() {
        // Under Γ = 1/x, x^2 = 1 - 4t reaches the pole at t = 1/4 without any
        // stencil point landing near it.
        let e = parse_rational_expression("1/x", &["x"]).unwrap();
        let conn = Connection::zero(1).with_symbol(0, 0, 0, e);
        match integrate_geodesic(&conn, &[1.0], &[-2.0], 1.0, 200) {
            Err(GeodesicError::PoleEncountered { t, .. }) => assert!((0.24..=0.26).contains(&t), "t = {t}"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn blowup_is_non_finite() {
        // x'' = -x'^2 from v0 = -20 is x = ln(1 - 20 t), singular at t = 1/20.
        let conn = Connection::zero(1).with_symbol(0, 0, 0, parse_rational_expression("1", &["x"]).unwrap());
        let r = integrate_geodesic(&conn, &[0.0], &[-20.0], 1.0, 10);
        assert!(matches!(r, Err(GeodesicError::NonFinite { .. })), "{r:?}");
    }

    #[test]
    fn sampled_psd() {
        let square = vec![(-1.0, 1.0); 2];
        let r = sample_hessian_psd(&p2("x1^2 + x2^2"), &Connection::zero(2), &square, 200, DEFAULT_TOL, 0).unwrap();
        assert_eq!((r.violations, r.skipped, r.evaluated), (0, 0, 200));

        let f = p1("x^3 + x");
        let conn = construct_no_critical(&f, &zero_target(1)).unwrap();
        let r = sample_hessian_psd(&f, &conn, &[(-2.0, 2.0)], 200, DEFAULT_TOL, 3).unwrap();
        assert_eq!(r.violations, 0);

        let r = sample_hessian_psd(&p2("x1^2*x2^2"), &Connection::zero(2), &square, 200, DEFAULT_TOL, 0).unwrap();
        assert!(r.violations > 0);
        assert!(r.worst_eigenvalue < 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = p2("x1^2*x2^2 - x1");
        let square = vec![(-1.0, 1.0); 2];
        let a = sample_hessian_psd(&f, &Connection::zero(2), &square, 100, DEFAULT_TOL, 9).unwrap();
        let b = sample_hessian_psd(&f, &Connection::zero(2), &square, 100, DEFAULT_TOL, 9).unwrap();
        assert_eq!(a, b);
        let s = random_geodesics(&p1("x^2"), &Connection::zero(1), 50, 50, DEFAULT_TOL, 4);
        assert!(s.all_convex());
        assert_eq!(s, random_geodesics(&p1("x^2"), &Connection::zero(1), 50, 50, DEFAULT_TOL, 4));
    }
}
