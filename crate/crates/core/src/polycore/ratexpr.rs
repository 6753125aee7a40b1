use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::poly::{default_names, rational_to_f64};
use super::{PolyError, Polynomial, Rational};

/// Quotient of two polynomials, kept in canonical form: numerator and
/// denominator coprime, denominator with integer coefficients of content 1 and
/// positive leading coefficient. The zero expression is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: Polynomial,
    den: Polynomial,
}

impl RatExpr {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        assert_eq!(num.nvars(), den.nvars(), "variable count mismatch");
        Ok(Self::canonical(num, den))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        RatExpr {
            num: p,
            den: Polynomial::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    fn canonical(num: Polynomial, den: Polynomial) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return Self::zero(n);
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = poly_gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides numerator"),
                    den.exact_div(&g).expect("gcd divides denominator"),
                )
            }
        };
        let c = den.content();
        let inv = c.recip();
        RatExpr {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// Symbolic zero test.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Value of a constant expression.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.num.constant_term() / self.den.constant_term())
        } else {
            None
        }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(PolyError::PoleAtPoint);
        }
        Ok(self.num.evaluate(point)? / d)
    }

    /// Floating evaluation; `None` when the denominator magnitude is below `pole_tol`.
    pub fn eval_f64(&self, point: &[f64], pole_tol: f64) -> Option<f64> {
        let d = self.den.eval_f64(point);
        if d.abs() < pole_tol {
            return None;
        }
        Some(self.num.eval_f64(point) / d)
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.nvars() {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                nvars: self.nvars(),
            });
        }
        Ok(self.diff(i))
    }

    pub(crate) fn diff(&self, i: usize) -> Self {
        if self.is_polynomial() {
            let c = self.den.constant_term();
            return Self::from_poly(self.num.diff(i).scale(&c.recip()));
        }
        let dn = self.num.diff(i);
        let dd = self.den.diff(i);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::canonical(num, &self.den * &self.den)
    }

    pub fn recip(&self) -> Result<Self, PolyError> {
        RatExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RatExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::canonical(self.num.pow(k), self.den.pow(k))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        Self::canonical(&self.num * p, self.den.clone())
    }

    pub fn to_text(&self) -> String {
        self.to_string_with(&default_names(self.nvars()))
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.den.is_one() {
            return self.num.to_string_with(names);
        }
        let wrap = |p: &Polynomial| {
            let s = p.to_string_with(names);
            if p.num_terms() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatExpr({})", self.to_text())
    }
}

impl From<Polynomial> for RatExpr {
    fn from(p: Polynomial) -> Self {
        RatExpr::from_poly(p)
    }
}

impl<'a> Add<&'a RatExpr> for &'a RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return RatExpr::canonical(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatExpr::canonical(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a RatExpr> for &'a RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatExpr> for &'a RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero(self.nvars());
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        RatExpr::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RatExpr> for &'a RatExpr {
    type Output = Result<RatExpr, PolyError>;
    fn div(self, rhs: &RatExpr) -> Result<RatExpr, PolyError> {
        RatExpr::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: RatExpr) -> RatExpr {
        &self + &rhs
    }
}

impl RatExpr {
    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// Floating value of a constant expression.
    pub fn constant_f64(&self) -> Option<f64> {
        self.constant_value().map(|c| rational_to_f64(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse_expression;
    use num_bigint::BigInt;

    fn p(s: &str) -> Polynomial {
        parse_expression(s, &["x1", "x2"]).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn evaluates_example_symbol() {
        let e = RatExpr::new(p("4*x1"), p("1 + 4*x1^2")).unwrap();
        assert_eq!(e.evaluate(&[q(1, 1), q(0, 1)]).unwrap(), q(4, 5));
        assert_eq!(e.to_text(), "4*x1/(4*x1^2 + 1)");
    }

    #[test]
    fn pole_detection() {
        let one_over_x = RatExpr::new(p("1"), p("x1")).unwrap();
        assert!(matches!(
            one_over_x.evaluate(&[q(0, 1), q(0, 1)]),
            Err(PolyError::PoleAtPoint)
        ));
        assert!(matches!(
            RatExpr::new(p("1"), p("0")),
            Err(PolyError::ZeroDenominator)
        ));
    }

    #[test]
    fn canonicalization_cancels_common_factors() {
        let e = RatExpr::new(p("6*x1*(3*x1^2+1)"), p("(3*x1^2+1)^2")).unwrap();
        assert_eq!(e.numerator(), &p("6*x1"));
        assert_eq!(e.denominator(), &p("3*x1^2 + 1"));
        let neg = RatExpr::new(p("x1"), p("-2*x1 - 2")).unwrap();
        assert_eq!(neg.to_text(), "-1/2*x1/(x1 + 1)");
    }

    #[test]
    fn symbolic_zero_after_arithmetic() {
        let a = RatExpr::new(p("1"), p("x1 + 1")).unwrap();
        let b = RatExpr::new(p("x1"), p("x1 + 1")).unwrap();
        let sum = &a + &b;
        assert_eq!(sum, RatExpr::one(2));
        assert!((&sum - &RatExpr::one(2)).is_zero());
    }

    #[test]
    fn quotient_rule() {
        let e = RatExpr::new(p("1"), p("1 + 4*x1^2")).unwrap();
        let d = e.diff(0);
        let expected = RatExpr::new(p("-8*x1"), p("(1 + 4*x1^2)^2")).unwrap();
        assert_eq!(d, expected);
        assert!(e.diff(1).is_zero());
    }
}
