use gconvex::polycore::{rat, ratio, Polynomial, Rational};
use gconvex::realroots::{count_real_roots, isolate_real_roots, squarefree_decompose};
use proptest::prelude::*;

fn univariate() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-6i64..=6, 2..10).prop_filter_map("nonconstant", |c| {
        let c: Vec<Rational> = c.into_iter().map(rat).collect();
        let p = Polynomial::from_univariate(1, 0, &c);
        (p.total_degree().unwrap_or(0) >= 1).then_some(p)
    })
}

/// `lead * prod (x - r)^m`, with the factors as data so the roots are known.
fn linear_product() -> impl Strategy<Value = (Rational, Vec<(Rational, u32)>)> {
    let root = (-8i64..=8, 1i64..=3).prop_map(|(p, q)| ratio(p, q));
    (
        (-3i64..=3).prop_filter("nonzero", |c| *c != 0).prop_map(rat),
        prop::collection::vec((root, 1u32..=3), 1..5),
    )
        .prop_filter("degree <= 8", |(_, f)| f.iter().map(|(_, m)| m).sum::<u32>() <= 8)
}

fn expand(lead: &Rational, factors: &[(Rational, u32)]) -> Polynomial {
    let x = Polynomial::var(1, 0);
    factors.iter().fold(Polynomial::constant(1, lead.clone()), |acc, (r, m)| {
        &acc * &(&x - &Polynomial::constant(1, r.clone())).pow(*m)
    })
}

proptest! {
    #[test]
    fn multiplicities_never_exceed_degree(p in univariate()) {
        let recs = isolate_real_roots(&p).unwrap();
        let total: u32 = recs.iter().map(|r| r.multiplicity).sum();
        prop_assert!(total <= p.total_degree().unwrap());
    }

    // Adding the rootless factor x^2 + 1 makes the inequality strict.
    #[test]
    fn multiplicities_fill_degree_iff_roots_all_real((lead, factors) in linear_product(), extra in any::<bool>()) {
        let mut p = expand(&lead, &factors);
        if extra {
            let x = Polynomial::var(1, 0);
            p = &p * &(&(&x * &x) + &Polynomial::one(1));
        }
        let total: u32 = isolate_real_roots(&p).unwrap().iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(total == p.total_degree().unwrap(), !extra);
    }

    #[test]
    fn squarefree_count_matches_isolation(p in univariate()) {
        let d = squarefree_decompose(&p).unwrap();
        let sqf = d.factors.iter().fold(Polynomial::one(1), |acc, (s, _)| &acc * s);
        let count = if sqf.is_constant() { 0 } else { count_real_roots(&sqf, None).unwrap() };
        prop_assert_eq!(count, isolate_real_roots(&p).unwrap().len());
        prop_assert_eq!(d.expand(1), p);
    }

    #[test]
    fn isolation_recovers_linear_factors((lead, factors) in linear_product()) {
        let p = expand(&lead, &factors);
        let mut expected: Vec<(Rational, u32)> = Vec::new();
        for (r, m) in &factors {
            match expected.iter_mut().find(|(s, _)| s == r) {
                Some(e) => e.1 += m,
                None => expected.push((r.clone(), *m)),
            }
        }
        expected.sort();
        let recs = isolate_real_roots(&p).unwrap();
        prop_assert_eq!(recs.len(), expected.len());
        for (rec, (r, m)) in recs.iter().zip(&expected) {
            prop_assert!(&rec.lo < r && r <= &rec.hi);
            prop_assert_eq!(rec.multiplicity, *m);
        }
    }
}
