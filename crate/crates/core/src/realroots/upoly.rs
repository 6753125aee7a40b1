//! Dense univariate polynomials with integer coefficients, lowest degree first.
//! Everything in root analysis happens here; rational inputs are cleared of
//! denominators on entry since scaling by a positive constant changes no root.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polycore::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UPoly(pub Vec<BigInt>);

impl UPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    /// Positive integer multiple of the rational coefficient vector, made primitive.
    pub fn from_rationals(c: &[Rational]) -> Self {
        let mut l = BigInt::one();
        for r in c {
            l = l.lcm(r.denom());
        }
        let v = c
            .iter()
            .map(|r| r.numer() * (&l / r.denom()))
            .collect();
        UPoly::new(v).primitive_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide by the content, keeping the sign.
    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        UPoly(self.0.iter().map(|c| c / &g).collect())
    }

    /// Primitive with positive leading coefficient.
    pub fn primitive_abs(&self) -> Self {
        let p = self.primitive();
        if !p.is_zero() && p.lc().is_negative() {
            UPoly(p.0.into_iter().map(|c| -c).collect())
        } else {
            p
        }
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Returns `(s, r)` with `lc(b)^(deg a - deg b + 1) * a = q*b + r`, where `s`
    /// is the sign of that power of `lc(b)`.
    pub fn pseudo_rem(&self, b: &UPoly) -> (i8, UPoly) {
        let db = b.degree();
        let lcb = b.lc().clone();
        let mut r = self.0.clone();
        let mut steps = 0u32;
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lcr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lcb;
            }
            let shift = dr - db;
            for (i, bc) in b.0.iter().enumerate() {
                r[i + shift] -= &lcr * bc;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
            steps += 1;
        }
        // Any step count is a valid pseudo-remainder multiplier; only its sign matters.
        let sign = if lcb.is_negative() && steps % 2 == 1 { -1 } else { 1 };
        (sign, UPoly(r))
    }

    /// Exact quotient, assuming `b` divides `self` over the rationals and both
    /// are integer polynomials with `lc(b)` dividing every step.
    pub fn exact_div(&self, b: &UPoly) -> Option<UPoly> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(UPoly(vec![]));
        }
        if self.degree() < b.degree() {
            return None;
        }
        let db = b.degree();
        let mut r = self.0.clone();
        let mut q = vec![BigInt::zero(); self.degree() - db + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            let (c, rem) = top.div_rem(b.lc());
            if !rem.is_zero() {
                return None;
            }
            for (i, bc) in b.0.iter().enumerate() {
                r[i + k] -= &c * bc;
            }
            q[k] = c;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(UPoly::new(q))
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        if self.is_zero() {
            return other.primitive_abs();
        }
        if other.is_zero() {
            return self.primitive_abs();
        }
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive(), other.primitive())
        } else {
            (other.primitive(), self.primitive())
        };
        loop {
            if b.degree() == 0 {
                return UPoly(vec![BigInt::one()]);
            }
            let (_, r) = a.pseudo_rem(&b);
            if r.is_zero() {
                return b.primitive_abs();
            }
            a = b;
            b = r.primitive();
        }
    }

    /// Divide a primitive polynomial by a divisor, returning a primitive result.
    pub fn div_primitive(&self, b: &UPoly) -> UPoly {
        // Scale so the leading coefficient of b divides every step.
        let k = self.degree().saturating_sub(b.degree()) + 1;
        let scale = num_traits::pow(b.lc().clone(), k);
        let scaled = UPoly(self.0.iter().map(|c| c * &scale).collect());
        scaled
            .exact_div(b)
            .expect("divisor divides dividend")
            .primitive_abs()
    }

    /// Sign of `p(x)` at `x = n/d` with `d > 0`.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if x.is_integer() {
            let n = x.numer();
            let mut acc = BigInt::zero();
            for c in self.0.iter().rev() {
                acc = acc * n + c;
            }
            return sign_of(&acc);
        }
        sign_of(&self.eval_homogeneous(x.numer(), x.denom()))
    }

    /// `d^deg * p(n/d)`, which has the sign of `p(n/d)` for `d > 0`.
    fn eval_homogeneous(&self, n: &BigInt, d: &BigInt) -> BigInt {
        let deg = self.degree();
        let mut dpows = Vec::with_capacity(deg + 1);
        dpows.push(BigInt::one());
        for i in 1..=deg {
            let next = &dpows[i - 1] * d;
            dpows.push(next);
        }
        let mut acc = BigInt::zero();
        for (i, c) in self.0.iter().enumerate().rev() {
            acc = acc * n + c * &dpows[deg - i];
        }
        acc
    }

    pub fn sign_at_pos_inf(&self) -> i8 {
        if self.is_zero() {
            0
        } else {
            sign_of(self.lc())
        }
    }

    pub fn sign_at_neg_inf(&self) -> i8 {
        let s = self.sign_at_pos_inf();
        if self.degree() % 2 == 1 {
            -s
        } else {
            s
        }
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    /// Square-free part, primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> UPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.primitive_abs();
        }
        self.primitive_abs().div_primitive(&g)
    }

    /// Cauchy bound `1 + max|a_i| / |a_n|` on the magnitude of every root.
    pub fn cauchy_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let m = self.0[..self.degree()]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        Rational::one() + Rational::new(m, lc)
    }
}

pub(crate) fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Sturm chain of a square-free polynomial, each member made primitive with
/// its sign preserved so that sign variations are unchanged.
#[derive(Clone, Debug)]
pub(crate) struct SturmChain(pub Vec<UPoly>);

impl SturmChain {
    /// Chain of `p, p', -rem, ...`; the last member is gcd(p, p') up to a
    /// constant, so the input need not be square-free for construction.
    pub fn new(p: &UPoly) -> Self {
        let p0 = p.primitive();
        let mut chain = vec![p0.clone()];
        if p0.degree() == 0 {
            return SturmChain(chain);
        }
        let p1 = p0.derivative().primitive();
        chain.push(p1);
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.degree() == 0 {
                break;
            }
            let (s, r) = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            let g = r.content();
            let sgn = BigInt::from(-(s as i32));
            let next = UPoly(r.0.iter().map(|c| c / &g * &sgn).collect());
            chain.push(next);
        }
        SturmChain(chain)
    }

    fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    pub fn var_at(&self, x: &Rational) -> usize {
        Self::variations(self.0.iter().map(|p| p.sign_at(x)))
    }

    pub fn var_pos_inf(&self) -> usize {
        Self::variations(self.0.iter().map(|p| p.sign_at_pos_inf()))
    }

    pub fn var_neg_inf(&self) -> usize {
        Self::variations(self.0.iter().map(|p| p.sign_at_neg_inf()))
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count_in(&self, lo: &Rational, hi: &Rational) -> usize {
        if lo.cmp(hi) != Ordering::Less {
            return 0;
        }
        self.var_at(lo).saturating_sub(self.var_at(hi))
    }

    pub fn count_all(&self) -> usize {
        self.var_neg_inf().saturating_sub(self.var_pos_inf())
    }
}
