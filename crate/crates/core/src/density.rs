//! How rare g-convexity is: Monte Carlo estimates over the sampled parameter
//! families, and exact counting for monomials.
//!
//! Trial `m` draws from ChaCha stream `m` under the given seed, so a report
//! depends only on its parameters and seed, not on how trials are scheduled.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, classify_quadratic, classify_univariate, QuadraticForm, Verdict};
use crate::linalg::is_psd;
use crate::polycore::{f64_to_rational, format_rational, qserde, rational_to_f64, Polynomial, Rational};

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Univariate,
    Quadratic,
    Monomial,
    Separable,
    #[serde(rename = "PSDBall")]
    PsdBall,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Univariate => "univariate",
            Family::Quadratic => "quadratic",
            Family::Monomial => "monomial",
            Family::Separable => "separable",
            Family::PsdBall => "psdball",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub family: Family,
    pub n: usize,
    pub d: u32,
    pub r: f64,
    pub trials: u64,
    pub hits: u64,
    /// Trials the classifier could not decide; they count as misses.
    pub unknown: u64,
    pub estimate: f64,
    pub ci95_halfwidth: f64,
    pub ci95: (f64, f64),
    #[serde(serialize_with = "opt_rational")]
    pub exact: Option<Rational>,
    /// `|estimate - exact|` when an exact value is known.
    pub deviation: Option<f64>,
    pub seed: u64,
}

fn opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(q) => qserde::rational(q, s),
        None => s.serialize_none(),
    }
}

impl DensityReport {
    #[allow(clippy::too_many_arguments)]
    fn new(family: Family, n: usize, d: u32, r: f64, trials: u64, tally: Tally, exact: Option<Rational>, seed: u64) -> Self {
        let estimate = tally.hits as f64 / trials as f64;
        let (lo, hi) = wilson_interval(tally.hits, trials);
        let deviation = exact.as_ref().map(|q| (estimate - rational_to_f64(q)).abs());
        DensityReport {
            family,
            n,
            d,
            r,
            trials,
            hits: tally.hits,
            unknown: tally.unknown,
            estimate,
            ci95_halfwidth: (hi - lo) / 2.0,
            ci95: (lo, hi),
            exact,
            deviation,
            seed,
        }
    }

    pub fn exact_contained(&self) -> Option<bool> {
        self.exact.as_ref().map(|q| {
            let x = rational_to_f64(q);
            self.ci95.0 <= x && x <= self.ci95.1
        })
    }
}

/// 95% Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    hits: u64,
    unknown: u64,
}

fn run_trials<F>(trials: u64, seed: u64, trial: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng) -> Option<bool> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(m);
            match trial(&mut rng) {
                Some(true) => Tally { hits: 1, unknown: 0 },
                Some(false) => Tally::default(),
                None => Tally { hits: 0, unknown: 1 },
            }
        })
        .reduce(Tally::default, |a, b| Tally {
            hits: a.hits + b.hits,
            unknown: a.unknown + b.unknown,
        })
}

fn hit(v: &Verdict) -> Option<bool> {
    (!v.is_unknown()).then(|| v.is_gconvex())
}

fn uniform_coeffs(rng: &mut ChaCha8Rng, count: usize, r: f64) -> Vec<Rational> {
    (0..count).map(|_| f64_to_rational(rng.random_range(-r..=r))).collect()
}

/// Uniform point of the radius-`r` ball in `R^dim`.
fn ball_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let radius = r * u.powf(1.0 / dim as f64);
    g.into_iter().map(|x| x * radius / norm).collect()
}

/// Uniform symmetric matrix in the Frobenius ball of radius `r`. The
/// coordinates `a_ii` and `sqrt(2) a_ij` (`i < j`) are an isometry onto
/// `R^(n(n+1)/2)`.
fn frobenius_ball_matrix(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Vec<Rational>> {
    let y = ball_point(rng, n * (n + 1) / 2, r);
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut it = y.into_iter();
    for i in 0..n {
        for j in i..n {
            let v = it.next().expect("enough coordinates");
            let v = if i == j { v } else { v / std::f64::consts::SQRT_2 };
            let q = f64_to_rational(v);
            a[i][j] = q.clone();
            a[j][i] = q;
        }
    }
    a
}

/// Multiplies dyadic values by their largest denominator so all become
/// integers; positive scaling changes neither PSD-ness nor g-convexity, and
/// integer entries keep the exact arithmetic cheap.
fn clear_dyadic_denominators(values: &mut [&mut Rational]) {
    let scale = values.iter().map(|q| q.denom().clone()).max().unwrap_or_else(BigInt::one);
    let scale = Rational::from_integer(scale);
    for q in values.iter_mut() {
        **q *= &scale;
    }
}

/// `2^-(n(n+1)/2)`.
pub fn psd_fraction_formula(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << (n * (n + 1) / 2))
}

/// `f = sum_{j<=d} a_j x^j` with `a_j` uniform on `[-r, r]`.
pub fn sample_univariate(d: u32, r: f64, trials: u64, seed: u64) -> DensityReport {
    let tally = run_trials(trials, seed, |rng| {
        let coeffs = uniform_coeffs(rng, d as usize + 1, r);
        let f = Polynomial::from_univariate(1, 0, &coeffs);
        classify_univariate(&f).ok().and_then(|v| hit(&v))
    });
    DensityReport::new(Family::Univariate, 1, d, r, trials, tally, None, seed)
}

/// `f = x^T A x + b^T x + c` with `A` uniform in the Frobenius ball of radius
/// `r` and `(b, c)` uniform in the radius-`r` ball of `R^(n+1)`.
pub fn sample_quadratic(n: usize, r: f64, trials: u64, seed: u64) -> DensityReport {
    let tally = run_trials(trials, seed, |rng| {
        let a = frobenius_ball_matrix(rng, n, r);
        let bc = ball_point(rng, n + 1, r);
        let two = Rational::from_integer(2.into());
        let mut q = QuadraticForm {
            a: a.into_iter().map(|row| row.into_iter().map(|x| x * &two).collect()).collect(),
            b: bc[..n].iter().map(|&x| f64_to_rational(x)).collect(),
            c: f64_to_rational(bc[n]),
        };
        let QuadraticForm { a, b, c } = &mut q;
        clear_dyadic_denominators(&mut a.iter_mut().flatten().chain(b.iter_mut()).chain([c]).collect::<Vec<_>>());
        hit(&classify_quadratic(&q))
    });
    DensityReport::new(Family::Quadratic, n, 2, r, trials, tally, Some(psd_fraction_formula(n)), seed)
}

/// Fraction of the unit Frobenius ball of symmetric matrices that is PSD.
pub fn psd_ball_fraction(n: usize, trials: u64, seed: u64) -> DensityReport {
    let tally = run_trials(trials, seed, |rng| {
        let mut a = frobenius_ball_matrix(rng, n, 1.0);
        clear_dyadic_denominators(&mut a.iter_mut().flatten().collect::<Vec<_>>());
        Some(is_psd(&a))
    });
    DensityReport::new(Family::PsdBall, n, 2, 1.0, trials, tally, Some(psd_fraction_formula(n)), seed)
}

/// `f = sum_j f_j(x_j)`, each block with `d + 1` coefficients uniform on `[-r, r]`.
pub fn sample_separable(n: usize, d: u32, r: f64, trials: u64, seed: u64) -> DensityReport {
    let tally = run_trials(trials, seed, |rng| {
        let mut f = Polynomial::zero(n);
        for j in 0..n {
            let coeffs = uniform_coeffs(rng, d as usize + 1, r);
            f = &f + &Polynomial::from_univariate(n, j, &coeffs);
        }
        hit(&classify(&f))
    });
    DensityReport::new(Family::Separable, n, d, r, trials, tally, None, seed)
}

/// Exponent tuples `(d_1, ..., d_n) >= 0` with `sum d_i <= d`.
pub fn exponent_tuples(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Monomial counting against the closed form `n(⌊d/2⌋+1) / (2 binom(n+1+d, n))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialDensity {
    pub n: usize,
    pub d: u32,
    /// `|N_{n,d}|` by enumeration.
    pub tuples: usize,
    /// Whether the enumeration equals `binom(n+d, n)`.
    pub stars_and_bars: bool,
    /// Pairs `(i, 2j)` with `2j <= d`: `x_i^(2j)`, the constant once per `i`.
    pub pairs: usize,
    #[serde(serialize_with = "qserde::rational")]
    pub oracle: Rational,
    #[serde(serialize_with = "qserde::rational")]
    pub closed_form: Rational,
    #[serde(rename = "match")]
    pub matches: bool,
    /// As `oracle`, counting the constant monomial once.
    #[serde(serialize_with = "qserde::rational")]
    pub deduplicated: Rational,
    /// Fraction of `(sign a, exponents)` configurations the classifier calls
    /// g-convex; constants count for both signs.
    #[serde(serialize_with = "qserde::rational")]
    pub classifier: Rational,
}

pub fn monomial_density_exact(n: usize, d: u32) -> MonomialDensity {
    assert!(n >= 1 && d >= 1, "n, d >= 1");
    let tuples = exponent_tuples(n, d);
    let size = BigInt::from(tuples.len());
    let pairs = n * (d as usize / 2 + 1);
    let two = BigInt::from(2);
    let oracle = Rational::new(BigInt::from(pairs), &two * &size);
    let closed_form = Rational::new(
        BigInt::from(pairs),
        &two * binomial(n as u64 + 1 + d as u64, n as u64),
    );
    let deduplicated = Rational::new(BigInt::from(n * (d as usize / 2) + 1), &two * &size);
    let convex = tuples
        .iter()
        .flat_map(|e| [1i64, -1].map(|s| (e.clone(), s)))
        .filter(|(e, s)| classify(&Polynomial::monomial(e.clone(), Rational::from_integer((*s).into()))).is_gconvex())
        .count();
    MonomialDensity {
        n,
        d,
        tuples: tuples.len(),
        stars_and_bars: size == binomial(n as u64 + d as u64, n as u64),
        pairs,
        matches: oracle == closed_form,
        oracle,
        closed_form,
        deduplicated,
        classifier: Rational::new(BigInt::from(convex), &two * &size),
    }
}

/// One CSV line per `(family, n, d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub family: String,
    pub n: usize,
    pub d: u32,
    pub r: Option<f64>,
    pub trials: Option<u64>,
    pub hits: Option<u64>,
    pub estimate: f64,
    pub ci95_halfwidth: Option<f64>,
    pub exact: Option<String>,
    pub closed_form: Option<String>,
    pub seed: Option<u64>,
}

impl From<&DensityReport> for CsvRow {
    fn from(r: &DensityReport) -> Self {
        CsvRow {
            family: r.family.name().into(),
            n: r.n,
            d: r.d,
            r: Some(r.r),
            trials: Some(r.trials),
            hits: Some(r.hits),
            estimate: r.estimate,
            ci95_halfwidth: Some(r.ci95_halfwidth),
            exact: r.exact.as_ref().map(format_rational),
            closed_form: None,
            seed: Some(r.seed),
        }
    }
}

impl From<&MonomialDensity> for CsvRow {
    fn from(m: &MonomialDensity) -> Self {
        CsvRow {
            family: Family::Monomial.name().into(),
            n: m.n,
            d: m.d,
            r: None,
            trials: None,
            hits: None,
            estimate: rational_to_f64(&m.oracle),
            ci95_halfwidth: None,
            exact: Some(format_rational(&m.oracle)),
            closed_form: Some(format_rational(&m.closed_form)),
            seed: None,
        }
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
