//! Catalog constructions survive the JSON interchange format unchanged.

use lgla::catalog::{construct, CatalogName};
use lgla::json::{structure_from_json, structure_to_json, StructureFile};
use lgla::scalar_lie::check_jacobi;
use lgla::{AdditiveMap, LatticeBox, Scalar};

fn q(s: &str) -> Scalar {
    s.parse().unwrap()
}

fn catalog() -> Vec<CatalogName> {
    vec![
        CatalogName::Witt,
        CatalogName::GenWitt { l: AdditiveMap::scalar(vec![q("1"), q("i")]) },
        CatalogName::WPi { pi: AdditiveMap::pair(vec![[q("1"), q("0")], [q("1/2"), q("i")]]) },
        CatalogName::A1_1,
        CatalogName::A2_2,
        CatalogName::Sl2Gamma3,
        CatalogName::Sl3Gamma8,
    ]
}

#[test]
fn round_trip_preserves_constants() {
    for name in catalog() {
        let s = construct(&name).unwrap();
        let b = LatticeBox::new(3);
        let text = structure_to_json(&s, &b).unwrap();
        let back = structure_from_json(&text).unwrap();
        assert_eq!(back.group, s.group, "{name}");
        for a in s.support_in(&b) {
            assert!(back.in_support(&a), "{name}: {a}");
            for c in s.support_in(&b) {
                if b.contains(&s.group, &s.group.add(&a, &c)) {
                    assert_eq!(back.c(&a, &c), s.c(&a, &c), "{name}: c({a},{c})");
                }
            }
        }
        assert!(check_jacobi(&back, &b).is_empty(), "{name}");
    }
}

#[test]
fn file_format_is_stable() {
    let s = construct(&CatalogName::Witt).unwrap();
    let text = structure_to_json(&s, &LatticeBox::new(1)).unwrap();
    let f = StructureFile::from_json(&text).unwrap();
    assert_eq!(f.rank, 1);
    assert_eq!(f.radius, 1);
    // [L₋₁, L₁] = 2 L₀, [L₋₁, L₀] = L₋₁, [L₀, L₁] = L₁.
    let entries = f.entries.unwrap();
    assert_eq!(entries.len(), 3);
    assert!(entries.iter().any(|e| e.lam == vec![-1] && e.mu == vec![1] && e.c == q("2")));
}

#[test]
fn malformed_input_is_rejected() {
    assert!(structure_from_json("{").is_err());
    assert!(structure_from_json(r#"{"rank": 1, "field": "Q", "box": 1, "entries": [{"lam": [0], "mu": [1], "c": "x"}]}"#).is_err());
}

#[test]
fn catalog_algebras_satisfy_jacobi() {
    for name in catalog() {
        let s = construct(&name).unwrap();
        assert!(check_jacobi(&s, &LatticeBox::new(3)).is_empty(), "{name}");
    }
}
