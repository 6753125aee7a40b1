use gconvex::polycore::{default_names, parse_expression, ratio, Polynomial, RatExpr, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn poly_up_to(n: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..=deg, n), coeff()), 0..6)
        .prop_map(move |terms| Polynomial::from_terms(n, terms))
}

fn poly(n: usize) -> impl Strategy<Value = Polynomial> {
    poly_up_to(n, 3)
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(coeff(), n)
}

fn sized() -> impl Strategy<Value = (usize, Polynomial, Polynomial, Vec<Rational>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), poly(n), poly(n), point(n)))
}

// Lower degree where a multivariate gcd runs on products.
fn sized_for_gcd() -> impl Strategy<Value = (usize, Polynomial, Polynomial, Vec<Rational>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), poly_up_to(n, 2), poly_up_to(n, 2), point(n)))
}

proptest! {
    #[test]
    fn canonical_text_parses_back((n, f, _, _) in sized()) {
        let back = parse_expression(&f.to_text(), &default_names(n)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn derivative_is_linear((n, f, g, _) in sized(), a in coeff(), b in coeff()) {
        for i in 0..n {
            let lhs = (&f.scale(&a) + &g.scale(&b)).partial_derivative(i).unwrap();
            let rhs = &f.partial_derivative(i).unwrap().scale(&a) + &g.partial_derivative(i).unwrap().scale(&b);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn leibniz_rule((n, f, g, _) in sized()) {
        for i in 0..n {
            let lhs = (&f * &g).partial_derivative(i).unwrap();
            let rhs = &(&f.partial_derivative(i).unwrap() * &g) + &(&f * &g.partial_derivative(i).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluation_is_multiplicative((_, f, g, p) in sized()) {
        let fg = (&f * &g).evaluate(&p).unwrap();
        prop_assert_eq!(fg, f.evaluate(&p).unwrap() * g.evaluate(&p).unwrap());
    }

    // p/q + r/s vanishes exactly when p s + r q is the zero polynomial.
    #[test]
    fn ratexpr_zero_test_matches_cross_multiplication(
        (n, p, r, _) in sized_for_gcd(),
        cq in coeff(),
        cs in coeff(),
        cancel in any::<bool>(),
    ) {
        // x1^2 + c with c > 0 is never the zero polynomial.
        let x = Polynomial::var(n, 0);
        let q = &(&x * &x) + &Polynomial::constant(n, cq.abs() + ratio(1, 1));
        let (r, s) = if cancel {
            (-&p, q.clone())
        } else {
            (r, &(&x * &x) + &Polynomial::constant(n, cs.abs() + ratio(1, 1)))
        };
        let e = &RatExpr::new(p.clone(), q.clone()).unwrap() + &RatExpr::new(r.clone(), s.clone()).unwrap();
        let cross = &(&p * &s) + &(&r * &q);
        prop_assert_eq!(e.is_zero(), cross.is_zero());
        prop_assert_eq!(e.is_zero(), e.numerator().is_zero());
    }

    #[test]
    fn difference_of_equal_quotients_is_zero((n, p, q, _) in sized_for_gcd()) {
        prop_assume!(!q.is_zero());
        let e = RatExpr::new(&p * &q, &q * &q).unwrap();
        let same = RatExpr::new(p.clone(), q.clone()).unwrap();
        let diff = &e - &same;
        prop_assert!(diff.is_zero());
        prop_assert!(diff.numerator().is_zero());
        prop_assert_eq!(e.numerator().nvars(), n);
    }

    #[test]
    fn quotient_evaluates_like_its_parts((n, p, q, pt) in sized_for_gcd()) {
        prop_assume!(!q.is_zero());
        let qv = q.evaluate(&pt).unwrap();
        prop_assume!(!qv.is_zero());
        let e = RatExpr::new(p.clone(), q.clone()).unwrap();
        prop_assert_eq!(e.evaluate(&pt).unwrap(), p.evaluate(&pt).unwrap() / qv);
        prop_assert_eq!(e.nvars(), n);
    }
}
