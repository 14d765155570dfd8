//! Graded Jordan algebras and their Kantor–Koecher–Tits Lie algebras.

use lgla::catalog::{construct, CatalogName};
use lgla::jordan::{check_admissible, check_jordan, extract_jordan, kkt, AdmissibleDatum, GradedJordan};
use lgla::scalar_lie::{check_jacobi, diagonal_equivalence};
use lgla::{LatticeBox, LatticePoint, Scalar};

fn p(x: i64) -> LatticePoint {
    LatticePoint(vec![x])
}

#[test]
fn group_algebra_datum_is_admissible() {
    let d = AdmissibleDatum { j: GradedJordan::multiples(3), sublattice: vec![p(3)], alpha: p(1) };
    let b = LatticeBox::new(6);
    assert!(check_jordan(&d.j, &b).is_empty());
    assert!(check_admissible(&d, &b).holds());
    let s = kkt(&d, &b).unwrap();
    assert!(check_jacobi(&s, &b).is_empty());
    let a = construct(&CatalogName::A1_1).unwrap();
    assert!(diagonal_equivalence(&s, &a, &b).unwrap().is_some());
}

#[test]
fn overlapping_datum_is_refuted() {
    // α inside the support of J: the three layers collide.
    let d = AdmissibleDatum { j: GradedJordan::multiples(1), sublattice: vec![p(1)], alpha: p(1) };
    assert!(!check_admissible(&d, &LatticeBox::new(4)).holds());
}

#[test]
fn corrupted_product_is_not_jordan() {
    let j = GradedJordan::multiples(3).corrupted(p(3), p(3), Scalar::from_int(5));
    assert!(!check_jordan(&j, &LatticeBox::new(6)).is_empty());
}

#[test]
fn extraction_round_trips() {
    let a = construct(&CatalogName::A1_1).unwrap();
    let b = LatticeBox::new(6);
    let j = extract_jordan(&a, &p(1), &b).unwrap();
    let back = kkt(&AdmissibleDatum { j, sublattice: vec![p(3)], alpha: p(1) }, &b).unwrap();
    assert!(diagonal_equivalence(&back, &a, &b).unwrap().is_some());
}
