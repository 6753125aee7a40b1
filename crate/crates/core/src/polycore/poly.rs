use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{PolyError, Rational};

/// Exponent vector of a single term, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Every stored coefficient is nonzero and every exponent vector has length
/// `nvars`; the zero polynomial is the empty term map.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

/// Graded lexicographic comparison: total degree first, then lex.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    /// Dense univariate coefficients `c[0] + c[1] x_var + ...` lifted into `nvars` variables.
    pub fn from_univariate(nvars: usize, var: usize, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Indices of variables that occur with positive exponent in some term.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    /// Leading term in graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Terms sorted by descending graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_cmp(b.0, a.0));
        v
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &[u32], c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| {
                    let ne: Exponents = e.iter().zip(exps).map(|(a, b)| a + b).collect();
                    (ne, v * c)
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        Ok(self.diff(i))
    }

    /// Unchecked partial derivative; panics when `i >= nvars`.
    pub(crate) fn diff(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.terms
                .insert(ne, c * Rational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut total = Rational::zero();
        let mut powers: Vec<Vec<Rational>> = vec![vec![Rational::one()]; self.nvars];
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= d as usize {
                    let next = cache.last().unwrap() * &point[i];
                    cache.push(next);
                }
                t *= &cache[d as usize];
            }
            total += t;
        }
        Ok(total)
    }

    /// Floating evaluation; coefficients are rounded to `f64`.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rational_to_f64(c);
                for (i, &d) in e.iter().enumerate() {
                    if d > 0 {
                        t *= point[i].powi(d as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Composition with a translation: returns `f(x + shift)`.
    pub fn translate(&self, shift: &[Rational]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        let lin: Vec<Polynomial> = (0..self.nvars)
            .map(|i| &Self::var(self.nvars, i) + &Self::constant(self.nvars, shift[i].clone()))
            .collect();
        for (e, c) in &self.terms {
            let mut t = Self::constant(self.nvars, c.clone());
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    t = &t * &lin[i].pow(d);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds the polynomial into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &d) in e.iter().enumerate() {
                ne[map[i]] += d;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Dense coefficients in the given variable, assuming no other variable occurs.
    pub fn univariate_coeffs(&self, var: usize) -> Result<Vec<Rational>, PolyError> {
        if self.variables().iter().any(|&v| v != var) {
            return Err(PolyError::NotUnivariate);
        }
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Rational::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &self.terms {
            out[e[var] as usize] = c.clone();
        }
        Ok(out)
    }

    /// Coefficients with respect to `var`: exponent of `var` to the cofactor polynomial.
    pub(crate) fn coeffs_in(&self, var: usize) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let d = ne[var];
            ne[var] = 0;
            out.entry(d)
                .or_insert_with(|| Polynomial::zero(self.nvars))
                .terms
                .insert(ne, c.clone());
        }
        out
    }

    /// Rational content with the sign of the leading coefficient; dividing by it
    /// yields integer coefficients with gcd 1 and positive leading coefficient.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        if self.leading_coefficient().is_negative() {
            content = -content;
        }
        content
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if d.is_constant() {
            return Some(self.scale(&d.constant_term().recip()));
        }
        let (lde, ldc) = d.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((re, rc)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&lde).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponents = re.iter().zip(&lde).map(|(a, b)| a - b).collect();
            let qc = &rc / &ldc;
            rem = &rem - &d.mul_monomial(&qe, &qc);
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Canonical text using the names `x1..xn`.
    pub fn to_text(&self) -> String {
        self.to_string_with(&default_names(self.nvars))
    }

    /// Canonical text with explicit `*` and `^`, terms in descending grlex order.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&d| d == 0);
            if !abs.is_one() || is_const {
                factors.push(format_rational(&abs));
            }
            for (i, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], d)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// The default variable names `x1, ..., xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` to a rational, accurate for very large numerators and denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = 64 - (nb - db);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
}

/// Exact dyadic value of a finite `f64`.
pub fn f64_to_rational(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self.to_text())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Component-wise partial derivatives.
pub fn gradient(f: &Polynomial) -> Vec<Polynomial> {
    (0..f.nvars()).map(|i| f.diff(i)).collect()
}

/// Matrix of second partial derivatives; symmetric by construction.
pub fn euclidean_hessian(f: &Polynomial) -> Vec<Vec<Polynomial>> {
    let n = f.nvars();
    let grad = gradient(f);
    let mut h = vec![vec![Polynomial::zero(n); n]; n];
    for i in 0..n {
        for j in i..n {
            let d = grad[i].diff(j);
            h[j][i] = d.clone();
            h[i][j] = d;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn derivative_of_power_and_constant() {
        let f = x(1, 0).pow(3);
        assert_eq!(f.diff(0), x(1, 0).pow(2).scale(&q(3, 1)));
        assert!(Polynomial::from_int(1, 5).diff(0).is_zero());
        assert!(matches!(
            f.partial_derivative(1),
            Err(PolyError::IndexOutOfRange { index: 1, nvars: 1 })
        ));
    }

    #[test]
    fn gradient_and_hessian_of_x2y2() {
        let f = &x(2, 0).pow(2) * &x(2, 1).pow(2);
        let g = gradient(&f);
        assert_eq!(g[0], (&x(2, 0) * &x(2, 1).pow(2)).scale(&q(2, 1)));
        assert_eq!(g[1], (&x(2, 0).pow(2) * &x(2, 1)).scale(&q(2, 1)));
        let h = euclidean_hessian(&f);
        assert_eq!(h[0][0], x(2, 1).pow(2).scale(&q(2, 1)));
        assert_eq!(h[0][1], (&x(2, 0) * &x(2, 1)).scale(&q(4, 1)));
        assert_eq!(h[1][0], h[0][1]);
        assert_eq!(h[1][1], x(2, 0).pow(2).scale(&q(2, 1)));
    }

    #[test]
    fn hessian_of_linear_is_zero() {
        let f = &(&x(3, 0) + &x(3, 2)) + &Polynomial::from_int(3, 4);
        for row in euclidean_hessian(&f) {
            assert!(row.iter().all(Polynomial::is_zero));
        }
    }

    #[test]
    fn evaluate_at_origin_is_constant_term() {
        let f = &(&x(2, 0).pow(2) * &x(2, 1)) + &Polynomial::constant(2, q(-7, 3));
        assert_eq!(f.evaluate(&[q(0, 1), q(0, 1)]).unwrap(), q(-7, 3));
        assert!(f.evaluate(&[q(0, 1)]).is_err());
    }

    #[test]
    fn exact_division() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &Polynomial::from_int(2, 1);
        let p = &a * &b;
        assert_eq!(p.exact_div(&a), Some(b.clone()));
        assert_eq!(p.exact_div(&b), Some(a));
        assert_eq!(x(2, 0).exact_div(&x(2, 1)), None);
    }

    #[test]
    fn canonical_text() {
        let f = &(&x(2, 0).pow(2).scale(&q(3, 1)) - &x(2, 1).scale(&q(1, 2)))
            + &Polynomial::from_int(2, -1);
        assert_eq!(f.to_text(), "3*x1^2 - 1/2*x2 - 1");
        assert_eq!((-&x(1, 0)).to_text(), "-x1");
        assert_eq!(Polynomial::zero(2).to_text(), "0");
    }

    #[test]
    fn rational_to_f64_handles_huge_values() {
        let big = Rational::new(BigInt::from(1) << 2000usize, (BigInt::from(1) << 1999usize) * 3);
        assert!((rational_to_f64(&big) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(rational_to_f64(&q(-3, 4)), -0.75);
    }
}
