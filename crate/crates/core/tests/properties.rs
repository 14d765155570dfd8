//! Property tests for exact scalars and the symbol calculus.

use lgla::symbols::{opd_commutator, poisson_bracket, symbol_bracket, SymbolIndex, TwistedPDO};
use lgla::{Rational, Scalar};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-40i64..40, 1i64..12, -40i64..40, 1i64..12)
        .prop_map(|(a, b, c, d)| Scalar::new(Rational::new(a, b), Rational::new(c, d)))
}

fn small() -> impl Strategy<Value = Scalar> {
    (-6i64..6, 1i64..4, -3i64..3, 1i64..3)
        .prop_map(|(a, b, c, d)| Scalar::new(Rational::new(a, b), Rational::new(c, d)))
}

fn index() -> impl Strategy<Value = SymbolIndex> {
    (small(), small()).prop_map(|(a, b)| SymbolIndex::new(a, b))
}

proptest! {
    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a);
        }
    }

    #[test]
    fn text_round_trip(a in scalar()) {
        let back: Scalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn exact_roots(a in scalar(), n in 1u32..5) {
        let x = a.powi(n as i64);
        let r = x.nth_root(n).expect("a perfect power has a root");
        prop_assert_eq!(r.powi(n as i64), x);
    }

    #[test]
    fn poisson_bracket_is_antisymmetric(l in index(), m in index()) {
        let (c1, i1) = poisson_bracket(&l, &m);
        let (c2, i2) = poisson_bracket(&m, &l);
        prop_assert_eq!(c1, -c2);
        prop_assert_eq!(i1, i2);
    }

    #[test]
    fn poisson_bracket_jacobi(l in index(), m in index(), n in index()) {
        let cyc = |a: &SymbolIndex, b: &SymbolIndex, c: &SymbolIndex| {
            let (x, bc) = poisson_bracket(b, c);
            let (y, _) = poisson_bracket(a, &bc);
            &x * &y
        };
        let total = &(&cyc(&l, &m, &n) + &cyc(&m, &n, &l)) + &cyc(&n, &l, &m);
        prop_assert!(total.is_zero());
    }

    #[test]
    fn commutator_leading_term_is_the_symbol_bracket(
        s1 in small(), x1 in small(), s2 in small(), x2 in small()
    ) {
        let p = TwistedPDO::monomial(s1.clone(), x1.clone());
        let q = TwistedPDO::monomial(s2.clone(), x2.clone());
        let one = Scalar::one();
        let (s, x) = (&(&s1 + &s2) - &one, &(&x1 + &x2) - &one);
        let lhs = opd_commutator(&p, &q, 4).coefficient(&s, &x);
        let rhs = symbol_bracket(&p, &q).coefficient(&s, &x);
        prop_assert_eq!(lhs, rhs);
    }
}
