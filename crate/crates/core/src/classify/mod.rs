//! Decides g-convexity for univariate, quadratic, monomial and additively
//! separable polynomials, and checks the necessary conditions at critical points.

mod monomial;
mod quadratic;
mod univariate;
mod verdict;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::is_psd;
use crate::polycore::{euclidean_hessian, gradient, Polynomial, Rational};
use crate::realroots::count_real_roots;

pub use monomial::classify_monomial;
pub use quadratic::{classify_quadratic, to_quadratic_form, QuadraticForm};
pub use univariate::{classify_univariate, classify_univariate_exact};
pub use verdict::{
    BlockCertificate, Certificate, Interval, MonomialObstruction, Verdict, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
    #[error("total degree exceeds 2")]
    DegreeTooHigh,
    #[error("polynomial has more than one term")]
    NotMonomial,
}

/// One block of an additive splitting `f = sum f_t` over disjoint variable sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// 0-based indices of the variables the block depends on.
    pub variables: Vec<usize>,
    /// The summand, still written in all `nvars` variables.
    pub summand: Polynomial,
}

impl Block {
    /// The summand rewritten in just its own variables, in order.
    pub fn restricted(&self) -> Polynomial {
        let n = self.summand.nvars();
        let mut map = vec![0; n];
        for (k, &v) in self.variables.iter().enumerate() {
            map[v] = k;
        }
        self.summand.remap(self.variables.len(), &map)
    }
}

/// Finest splitting: variables are linked when they share a term, and blocks
/// are the connected components, ordered by smallest variable. The constant
/// term joins the first block.
pub fn separable_partition(f: &Polynomial) -> Vec<Block> {
    let n = f.nvars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let occurring = f.variables();
    for (e, _) in f.terms() {
        let vars: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut root_of_block: Vec<usize> = Vec::new();
    for &v in &occurring {
        let r = find(&mut parent, v);
        match root_of_block.iter().position(|&x| x == r) {
            Some(k) => blocks[k].variables.push(v),
            None => {
                root_of_block.push(r);
                blocks.push(Block {
                    variables: vec![v],
                    summand: Polynomial::zero(n),
                });
            }
        }
    }
    if blocks.is_empty() {
        return vec![Block {
            variables: Vec::new(),
            summand: f.clone(),
        }];
    }
    let mut per_block: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); blocks.len()];
    for (e, c) in f.terms() {
        let k = match (0..n).find(|&i| e[i] > 0) {
            Some(v) => {
                let r = find(&mut parent, v);
                root_of_block.iter().position(|&x| x == r).expect("known root")
            }
            None => 0,
        };
        per_block[k].push((e.clone(), c.clone()));
    }
    for (b, terms) in blocks.iter_mut().zip(per_block) {
        b.summand = Polynomial::from_terms(n, terms);
    }
    blocks
}

/// Whether a polynomial has a critical point, as far as can be proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CriticalStatus {
    None,
    Some,
    Unknown,
}

fn critical_status(f: &Polynomial, verdict: &Verdict) -> CriticalStatus {
    match verdict {
        Verdict::GConvex { certificate } if certificate.excludes_critical_points() => {
            CriticalStatus::None
        }
        // Every other verdict of a supported class comes with a critical point:
        // a root of f', a solution of Ax = -b, or a zero of a monomial.
        Verdict::GConvex { .. } | Verdict::NotGConvex { .. } => CriticalStatus::Some,
        Verdict::Unknown { .. } => {
            // Without linear terms the gradient vanishes at the origin.
            if f.terms().all(|(e, _)| e.iter().sum::<u32>() != 1) {
                CriticalStatus::Some
            } else {
                CriticalStatus::Unknown
            }
        }
    }
}

/// Dispatches constant, univariate, monomial, quadratic, then separable.
pub fn classify(f: &Polynomial) -> Verdict {
    if f.is_constant() {
        return Verdict::gconvex(Certificate::ConstantFunction);
    }
    if f.variables().len() == 1 {
        return classify_univariate(f).expect("one variable");
    }
    if f.num_terms() == 1 {
        return classify_monomial(f).expect("one term");
    }
    if f.total_degree().unwrap_or(0) <= 2 {
        return classify_quadratic(&to_quadratic_form(f).expect("degree at most 2"));
    }
    classify_separable(f)
}

fn one_based(vars: &[usize]) -> Vec<usize> {
    vars.iter().map(|v| v + 1).collect()
}

fn classify_separable(f: &Polynomial) -> Verdict {
    let blocks = separable_partition(f);
    if blocks.len() < 2 {
        return Verdict::Unknown {
            reason: "not univariate, a monomial, quadratic, or additively separable".into(),
        };
    }
    let analysed: Vec<(Verdict, CriticalStatus)> = blocks
        .iter()
        .map(|b| {
            let g = b.restricted();
            let v = classify(&g);
            let s = critical_status(&g, &v);
            (v, s)
        })
        .collect();

    if analysed.iter().any(|(_, s)| *s == CriticalStatus::None) {
        return Verdict::gconvex(Certificate::NoCriticalPoint);
    }
    if analysed.iter().all(|(v, _)| v.is_gconvex()) {
        let blocks = blocks
            .iter()
            .zip(&analysed)
            .map(|(b, (v, _))| BlockCertificate {
                variables: one_based(&b.variables),
                certificate: v.certificate().expect("g-convex block").clone(),
            })
            .collect();
        return Verdict::gconvex(Certificate::Separable { blocks });
    }
    let all_critical = analysed.iter().all(|(_, s)| *s == CriticalStatus::Some);
    if all_critical {
        if let Some(k) = analysed.iter().position(|(v, _)| v.is_not_gconvex()) {
            return Verdict::not_gconvex(Witness::SeparableFailure {
                block: k + 1,
                variables: one_based(&blocks[k].variables),
                witness: Box::new(analysed[k].0.witness().expect("failing block").clone()),
            });
        }
    }
    let k = analysed
        .iter()
        .position(|(v, s)| v.is_unknown() || *s == CriticalStatus::Unknown)
        .unwrap_or(0);
    Verdict::Unknown {
        reason: format!(
            "block {} (variables {:?}) could not be classified",
            k + 1,
            one_based(&blocks[k].variables)
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalCheck {
    pub is_critical: bool,
    pub hessian_psd: bool,
}

impl CriticalCheck {
    /// A critical point with a non-PSD Hessian rules out every connection.
    pub fn is_disproof(&self) -> bool {
        self.is_critical && !self.hessian_psd
    }
}

/// At each point: does the gradient vanish, and is the Euclidean Hessian PSD?
pub fn check_necessary_at_critical(f: &Polynomial, points: &[Vec<Rational>]) -> Vec<CriticalCheck> {
    let grad = gradient(f);
    let hess = euclidean_hessian(f);
    points
        .iter()
        .map(|p| {
            let is_critical = grad
                .iter()
                .all(|g| g.evaluate(p).expect("point dimension").is_zero());
            let h: Vec<Vec<Rational>> = hess
                .iter()
                .map(|row| row.iter().map(|e| e.evaluate(p).expect("point dimension")).collect())
                .collect();
            CriticalCheck {
                is_critical,
                hessian_psd: is_psd(&h),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum CriticalCount {
    Finite(usize),
    Continuum,
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPointCount {
    pub count: CriticalCount,
    /// Two or more isolated critical points: no geodesically complete
    /// connection can make `f` g-convex.
    pub excludes_complete_connection: bool,
}

/// Counts critical points of `f` on `R^n` for the supported classes.
pub fn count_isolated_critical_points(f: &Polynomial) -> CriticalPointCount {
    let count = critical_count(f);
    let excludes = matches!(count, CriticalCount::Finite(k) if k >= 2);
    CriticalPointCount {
        count,
        excludes_complete_connection: excludes,
    }
}

fn critical_count(f: &Polynomial) -> CriticalCount {
    let n = f.nvars();
    if f.is_constant() {
        return if n == 0 {
            CriticalCount::Finite(1)
        } else {
            CriticalCount::Continuum
        };
    }
    let present = f.variables();
    let free = n - present.len();
    let with_free = |k: usize| {
        if k > 0 && free > 0 {
            CriticalCount::Continuum
        } else {
            CriticalCount::Finite(k)
        }
    };
    if present.len() == 1 {
        let b = f.diff(present[0]);
        if b.is_zero() {
            return CriticalCount::Continuum;
        }
        return with_free(count_real_roots(&b, None).expect("nonzero derivative"));
    }
    if f.num_terms() == 1 {
        let (e, _) = f.terms().next().expect("one term");
        let degrees: Vec<u32> = present.iter().map(|&i| e[i]).collect();
        let total: u32 = degrees.iter().sum();
        if total == 1 {
            return CriticalCount::Finite(0);
        }
        // With several variables present, the critical set contains every point
        // where two of them vanish, plus the hyperplane x_p = 0 when d_p >= 2.
        return if degrees == [1, 1] {
            with_free(1)
        } else {
            CriticalCount::Continuum
        };
    }
    if f.total_degree().unwrap_or(0) <= 2 {
        let q = to_quadratic_form(f).expect("degree at most 2");
        if q.has_no_critical_point() {
            return CriticalCount::Finite(0);
        }
        return if crate::linalg::rank(&q.a) == n {
            CriticalCount::Finite(1)
        } else {
            CriticalCount::Continuum
        };
    }
    let blocks = separable_partition(f);
    if blocks.len() < 2 {
        return CriticalCount::Unknown(
            "not univariate, a monomial, quadratic, or additively separable".into(),
        );
    }
    let counts: Vec<CriticalCount> = blocks.iter().map(|b| critical_count(&b.restricted())).collect();
    if counts.contains(&CriticalCount::Finite(0)) {
        return CriticalCount::Finite(0);
    }
    if let Some(u) = counts.iter().find(|c| matches!(c, CriticalCount::Unknown(_))) {
        return u.clone();
    }
    if counts.contains(&CriticalCount::Continuum) {
        return CriticalCount::Continuum;
    }
    let product = counts
        .iter()
        .map(|c| match c {
            CriticalCount::Finite(k) => *k,
            _ => unreachable!(),
        })
        .product();
    with_free(product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_expression, rat};

    fn p(s: &str, n: usize) -> Polynomial {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        parse_expression(s, &names).unwrap()
    }

    #[test]
    fn partition_examples() {
        let b = separable_partition(&p("x1^3 + x2", 2));
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].variables.clone(), b[0].summand.clone()), (vec![0], p("x1^3", 2)));
        assert_eq!((b[1].variables.clone(), b[1].summand.clone()), (vec![1], p("x2", 2)));

        let b = separable_partition(&p("x1*x2 + x3", 3));
        assert_eq!(b.iter().map(|x| x.variables.clone()).collect::<Vec<_>>(), vec![vec![0, 1], vec![2]]);

        let b = separable_partition(&p("x1^2*x2^2", 2));
        assert_eq!(b.len(), 1);

        let f = p("x3^2 + 5 + x1*x2 - x2", 3);
        let b = separable_partition(&f);
        assert_eq!(b[0].summand, p("x1*x2 - x2 + 5", 3));
        let sum = b.iter().fold(Polynomial::zero(3), |acc, x| &acc + &x.summand);
        assert_eq!(sum, f);
    }

    #[test]
    fn dispatcher_examples() {
        assert_eq!(classify(&p("x1^3 + x2", 2)).kind(), "GConvex/NoCriticalPoint");
        let v = classify(&p("x1^3 + x2^2", 2));
        match v.witness() {
            Some(Witness::SeparableFailure { block, .. }) => assert_eq!(*block, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(classify(&p("x1^4 + x2^2", 2)).kind(), "GConvex/Separable");
        assert!(classify(&p("x1^2*x2^2 + x3^3", 3)).is_not_gconvex());
        assert_eq!(classify(&p("x1^2*x2^2", 2)).kind(), "NotGConvex/MonomialStructure");
        assert_eq!(classify(&p("3*x1^4", 1)).kind(), "GConvex/UnivariateOddRoot");
        assert_eq!(classify(&p("x1^2*x2 + x1*x2^2", 2)).kind(), "Unknown");
    }

    #[test]
    fn unknown_block_with_critical_point_still_yields_verdicts() {
        // The first block is outside every class but has a critical point at 0.
        let v = classify(&p("x1^2*x2 + x1*x2^2 + x3^3", 3));
        match v.witness() {
            Some(Witness::SeparableFailure { block, .. }) => assert_eq!(*block, 2),
            other => panic!("unexpected {other:?}"),
        }
        let v = classify(&p("x1^2*x2 + x1*x2^2 + x3^4", 3));
        assert_eq!(v.kind(), "Unknown");
        let v = classify(&p("x1^2*x2 + x1*x2^2 + x3", 3));
        assert_eq!(v.kind(), "GConvex/NoCriticalPoint");
    }

    #[test]
    fn necessary_condition_examples() {
        let checks = check_necessary_at_critical(&p("x1^3", 1), &[vec![rat(0)]]);
        assert_eq!(checks[0], CriticalCheck { is_critical: true, hessian_psd: true });
        let checks = check_necessary_at_critical(&p("x1^2*x2^2", 2), &[vec![rat(0), rat(0)]]);
        assert_eq!(checks[0], CriticalCheck { is_critical: true, hessian_psd: true });
        let checks = check_necessary_at_critical(&p("x1^2 - x2^2", 2), &[vec![rat(0), rat(0)], vec![rat(1), rat(0)]]);
        assert!(checks[0].is_disproof());
        assert!(!checks[1].is_critical);
    }

    #[test]
    fn critical_counts() {
        let c = count_isolated_critical_points(&p("x1^3 - 3*x1", 1));
        assert_eq!(c.count, CriticalCount::Finite(2));
        assert!(c.excludes_complete_connection);
        assert_eq!(count_isolated_critical_points(&p("x1^2 + x2^2", 2)).count, CriticalCount::Finite(1));
        assert_eq!(count_isolated_critical_points(&p("x1^2 + x2", 2)).count, CriticalCount::Finite(0));
        assert_eq!(count_isolated_critical_points(&p("x1*x2", 2)).count, CriticalCount::Finite(1));
        assert_eq!(count_isolated_critical_points(&p("x1^2*x2", 2)).count, CriticalCount::Continuum);
        assert_eq!(
            count_isolated_critical_points(&p("x1^3 - 3*x1 + x2^4 - 2*x2^2", 2)).count,
            CriticalCount::Finite(6)
        );
        assert_eq!(count_isolated_critical_points(&p("x1^3", 2)).count, CriticalCount::Continuum);
    }
}
