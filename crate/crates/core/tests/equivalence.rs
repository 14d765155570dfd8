//! Diagonal equivalence on structures whose rescaling group is larger than
//! the character group, or whose relations only pin values down jointly.

use lgla::catalog::{construct, pullback, CatalogName};
use lgla::scalar_lie::{diagonal_equivalence, verify_rescaling, Rescaling};
use lgla::{AdditiveMap, GradingGroup, LatticeBox, LatticePoint, Scalar};

fn q(s: &str) -> Scalar {
    s.parse().unwrap()
}

fn wpi(rows: [[&str; 2]; 2]) -> lgla::ScalarStructure {
    let pi = AdditiveMap::pair(rows.iter().map(|r| [q(r[0]), q(r[1])]).collect());
    construct(&CatalogName::WPi { pi }).unwrap()
}

#[test]
fn scalar_multiple_with_isotropic_generator() {
    // π(e₂) is proportional to ρ, so the points k·e₂ bracket to zero among
    // themselves and t(e₂)·t(−e₂) is only fixed through other degrees.
    let s = wpi([["2-1/2i", "1"], ["-1-i", "-1-i"]]);
    for r in 1..=3 {
        let b = LatticeBox::new(r);
        let t = diagonal_equivalence(&s, &s.scaled(q("2")), &b).unwrap();
        assert!(t.is_some(), "radius {r}");
    }
}

#[test]
fn scalar_multiple_generic() {
    let s = wpi([["-1", "1"], ["1+1/2i", "3/2"]]);
    for r in 1..=4 {
        let b = LatticeBox::new(r);
        let t = diagonal_equivalence(&s, &s.scaled(q("3")), &b).unwrap().expect("equivalent");
        assert!(verify_rescaling(&s, &s.scaled(q("3")), &b, &t));
    }
}

#[test]
fn rescaled_structures_are_equivalent() {
    let s = wpi([["1", "0"], ["0", "i"]]);
    let r = s.rescaled(|p: &LatticePoint| Scalar::from_int(p.0[0] * p.0[0] + 2 * p.0[1].abs() + 1));
    let b = LatticeBox::new(3);
    assert!(diagonal_equivalence(&s, &r, &b).unwrap().is_some());
    assert!(diagonal_equivalence(&r, &s, &b).unwrap().is_some());
}

#[test]
fn loop_algebra_has_extra_torus() {
    // A₁⁽¹⁾ admits the sl₂ torus on top of the characters of ℤ.
    let a = construct(&CatalogName::A1_1).unwrap();
    let b = LatticeBox::new(6);
    assert!(diagonal_equivalence(&a, &a, &b).unwrap().is_some());
    assert!(diagonal_equivalence(&a, &a.scaled(q("-1/5")), &b).unwrap().is_some());
    let g = pullback(&GradingGroup::free(1), &[LatticePoint(vec![1])], &construct(&CatalogName::Sl2Gamma3).unwrap())
        .unwrap();
    assert!(diagonal_equivalence(&a, &g, &b).unwrap().is_some());
}

#[test]
fn inequivalent_structures_are_rejected() {
    // A single bracket flipped in sign is not a coboundary.
    let w = construct(&CatalogName::Witt).unwrap();
    let w2 = w.clone();
    let flipped = lgla::ScalarStructure::with_full_support(GradingGroup::free(1), w.field, "flipped", move |a, b| {
        let c = w2.c(a, b);
        if (a.0[0], b.0[0]) == (1, 2) || (a.0[0], b.0[0]) == (2, 1) { -c } else { c }
    });
    assert!(diagonal_equivalence(&w, &flipped, &LatticeBox::new(4)).unwrap().is_none());
    assert!(diagonal_equivalence(&w, &w.scaled(q("7")), &LatticeBox::new(4)).unwrap().is_some());

    let s = wpi([["1", "0"], ["0", "1"]]);
    let t = wpi([["1", "0"], ["0", "2"]]);
    assert!(diagonal_equivalence(&s, &t, &LatticeBox::new(2)).unwrap().is_none());
}

#[test]
fn wrong_rescaling_fails_verification() {
    let s = wpi([["1", "0"], ["0", "i"]]);
    let b = LatticeBox::new(1);
    let t = Rescaling { radius: 1, values: b.points(&s.group).into_iter().map(|p| (p, q("1/2"))).collect() };
    assert!(verify_rescaling(&s, &s.scaled(q("2")), &b, &t));
    assert!(!verify_rescaling(&s, &s.scaled(q("3")), &b, &t));
}
