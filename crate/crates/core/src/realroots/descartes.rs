//! Fast exact root screening for the univariate classifier.
//!
//! Two cheap exact tools:
//! - `two_sign_changes`: float evaluation proposes where the sign changes, exact
//!   evaluation at those dyadic points confirms.
//! - `simple_roots`: Vincent-Collins-Akritas bisection driven by Descartes'
//!   rule of signs, using only integer Taylor shifts. A node with zero sign
//!   variations has no root and a node with one has exactly one simple root,
//!   so any terminating run is a proof that every real root is simple.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::upoly::{sign_of, UPoly};
use crate::polycore::{rational_to_f64, Rational};

fn variations(c: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for x in c {
        let s = sign_of(x);
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

/// In-place `p(x) -> p(x + 1)`.
fn taylor_shift_one(c: &mut [BigInt]) {
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let (lo, hi) = c.split_at_mut(j + 1);
            lo[j] += &hi[0];
        }
    }
}

/// Sign variations of `(x+1)^n p(1/(x+1))`, an upper bound on the number of
/// roots of `p` in `(0, 1)` with the same parity.
fn descartes_bound(c: &[BigInt]) -> usize {
    let mut r: Vec<BigInt> = c.iter().rev().cloned().collect();
    taylor_shift_one(&mut r);
    variations(&r)
}

/// `2^n p(x/2)`: roots in `(0, 1/2)` move to `(0, 1)`.
fn halve(c: &[BigInt]) -> Vec<BigInt> {
    let n = c.len() - 1;
    c.iter()
        .enumerate()
        .map(|(i, a)| a << (n - i))
        .collect()
}

fn strip_content(c: &mut [BigInt]) {
    let g = UPoly(c.to_vec()).content();
    if !g.is_zero() && !g.is_one() {
        for x in c.iter_mut() {
            *x /= &g;
        }
    }
}

/// Isolates the roots of `c` in `(0, 1)`, reported as `(a, a + w)` in the
/// original scale, or `(u, u)` for a root that landed on a bisection point.
/// `None` when the depth cap is hit or a midpoint is a multiple root.
fn unit_interval(
    mut c: Vec<BigInt>,
    a: Rational,
    w: Rational,
    depth: u32,
    out: &mut Vec<(Rational, Rational)>,
) -> Option<()> {
    strip_content(&mut c);
    match descartes_bound(&c) {
        0 => return Some(()),
        1 => {
            out.push((a.clone(), a + w));
            return Some(());
        }
        _ => {}
    }
    if depth == 0 {
        return None;
    }
    let left = halve(&c);
    let mut right = left.clone();
    taylor_shift_one(&mut right);
    let half = w / Rational::from_integer(2.into());
    let mid = &a + &half;
    let mid_root = right[0].is_zero();
    if mid_root {
        // The midpoint is a root; accept it only when it is simple, then deflate.
        if right[1].is_zero() {
            return None;
        }
        right.remove(0);
    }
    unit_interval(left, a, half.clone(), depth - 1, out)?;
    if mid_root {
        out.push((mid.clone(), mid.clone()));
    }
    unit_interval(right, mid, half, depth - 1, out)
}

/// All real roots of `p` as disjoint open intervals (or exact points `(u, u)`)
/// when every real root is simple and nonzero; `None` when that cannot be established within `max_depth`.
pub(crate) fn simple_roots(p: &UPoly, max_depth: u32) -> Option<Vec<(Rational, Rational)>> {
    if p.is_zero() || p.0[0].is_zero() {
        return None;
    }
    let n = p.degree();
    if n == 0 {
        return Some(Vec::new());
    }
    // 2^k bounds every root magnitude.
    let bound = p.cauchy_bound();
    let mut k = 0u32;
    while Rational::from_integer(BigInt::one() << k) < bound {
        k += 1;
    }
    let scale = Rational::from_integer(BigInt::one() << k);
    let scaled = |neg: bool| -> Vec<BigInt> {
        p.0.iter()
            .enumerate()
            .map(|(i, a)| {
                let v = a << (k as usize * i);
                if neg && i % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    };
    let mut neg = Vec::new();
    unit_interval(scaled(true), Rational::zero(), scale.clone(), max_depth, &mut neg)?;
    let mut pos = Vec::new();
    unit_interval(scaled(false), Rational::zero(), scale, max_depth, &mut pos)?;
    let mut out: Vec<(Rational, Rational)> = neg.into_iter().rev().map(|(a, b)| (-b, -a)).collect();
    out.extend(pos);
    Some(out)
}

/// Dyadic and reciprocal-dyadic probe points covering the whole line.
fn probe_points() -> Vec<Rational> {
    const K: i64 = 32;
    let mut pts: Vec<Rational> = (-K..=K)
        .map(|i| Rational::new(i.into(), K.into()))
        .collect();
    for i in 1..K {
        pts.push(Rational::new(K.into(), i.into()));
        pts.push(Rational::new((-K).into(), i.into()));
    }
    pts.sort();
    pts
}

/// Two disjoint intervals on which `p` changes sign, each therefore holding a
/// root of odd multiplicity. Returns `None` when the float screen finds fewer
/// than two confirmed changes.
pub(crate) fn two_sign_changes(p: &UPoly) -> Option<Vec<(Rational, Rational)>> {
    if p.degree() < 2 {
        return None;
    }
    let coeffs: Vec<f64> = p
        .0
        .iter()
        .map(|c| rational_to_f64(&Rational::from_integer(c.clone())))
        .collect();
    let n = coeffs.len() - 1;
    let magnitude = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if !magnitude.is_finite() || magnitude == 0.0 {
        return None;
    }
    // Float value up to a positive factor: p(x) for |x| <= 1, x^-n p(x) otherwise.
    let eval = |x: f64| -> f64 {
        if x.abs() <= 1.0 {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        } else {
            let t = 1.0 / x;
            let v = coeffs.iter().fold(0.0, |acc, c| acc * t + c);
            if n % 2 == 1 && x < 0.0 {
                -v
            } else {
                v
            }
        }
    };

    // Representative point of each run of constant float sign.
    let mut runs: Vec<(i8, f64, Rational)> = Vec::new();
    for x in probe_points() {
        let v = eval(rational_to_f64(&x)) / magnitude;
        if !v.is_finite() || v.abs() < 1e-9 {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        match runs.last_mut() {
            Some((rs, best, pt)) if *rs == s => {
                if v.abs() > *best {
                    *best = v.abs();
                    *pt = x;
                }
            }
            _ => runs.push((s, v.abs(), x)),
        }
    }
    if runs.len() < 3 {
        return None;
    }

    let mut confirmed: Vec<(i8, Rational)> = Vec::new();
    for (_, _, x) in runs {
        let s = p.sign_at(&x);
        if s == 0 {
            continue;
        }
        match confirmed.last() {
            Some((ls, _)) if *ls == s => {}
            _ => confirmed.push((s, x)),
        }
    }
    if confirmed.len() < 3 {
        return None;
    }
    Some(
        confirmed
            .windows(2)
            .map(|w| (w[0].1.clone(), w[1].1.clone()))
            .collect(),
    )
}
