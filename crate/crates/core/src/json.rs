//! The structure-constant interchange format.
//!
//! ```json
//! {"rank": 1, "field": "Q", "box": 4,
//!  "entries": [{"lam": [0], "mu": [1], "c": "1"}]}
//! ```
//!
//! Omitted entries are zero. Lie structures store `entries` and are completed
//! antisymmetrically on load (a pair given in both orders must agree up to
//! sign); Jordan structures store `product` instead and are completed
//! symmetrically. Optional keys: `moduli` (torsion coordinates, 0 = free),
//! `support` (defaults to every point of the box) and `provenance`.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GradingGroup, LatticeBox, LatticePoint};
use crate::scalar::{Field, Scalar};
use crate::structure::ScalarStructure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub lam: Vec<i64>,
    pub mu: Vec<i64>,
    pub c: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub rank: usize,
    pub field: Field,
    #[serde(rename = "box")]
    pub radius: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<Entry>>,
}

/// Symmetry applied when completing a table on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Antisymmetric,
    Symmetric,
}

/// A finite table loaded from a file: group, box, support set and the
/// completed constants.
#[derive(Clone, Debug)]
pub struct Table {
    pub group: GradingGroup,
    pub field: Field,
    pub domain: LatticeBox,
    pub provenance: String,
    pub support: HashSet<LatticePoint>,
    pub values: HashMap<(LatticePoint, LatticePoint), Scalar>,
}

impl StructureFile {
    pub fn group(&self) -> Result<GradingGroup> {
        match &self.moduli {
            None => Ok(GradingGroup::free(self.rank)),
            Some(m) if m.len() == self.rank => Ok(GradingGroup { moduli: m.clone() }),
            Some(m) => Err(Error::RankMismatch { expected: self.rank, got: m.len() }),
        }
    }

    /// Validate and complete the table stored under `entries` or `product`.
    pub fn table(&self, symmetry: Symmetry) -> Result<Table> {
        if self.radius < 0 {
            return Err(Error::Malformed(format!("negative box radius {}", self.radius)));
        }
        let group = self.group()?;
        let domain = LatticeBox::new(self.radius);
        let point = |v: &[i64], what: &str| -> Result<LatticePoint> {
            let p = LatticePoint(v.to_vec());
            group.check_rank(&p)?;
            let p = group.canonical(&p);
            if !domain.contains(&group, &p) {
                return Err(Error::Malformed(format!("{what} {p} lies outside the box of radius {}", self.radius)));
            }
            Ok(p)
        };
        let support: HashSet<LatticePoint> = match &self.support {
            None => domain.points(&group).into_iter().collect(),
            Some(list) => list.iter().map(|v| point(v, "support point")).collect::<Result<_>>()?,
        };
        let raw = match symmetry {
            Symmetry::Antisymmetric => self.entries.as_ref(),
            Symmetry::Symmetric => self.product.as_ref(),
        };
        let key = match symmetry {
            Symmetry::Antisymmetric => "entries",
            Symmetry::Symmetric => "product",
        };
        let raw = raw.ok_or_else(|| Error::Malformed(format!("missing `{key}`")))?;
        let mut values: HashMap<(LatticePoint, LatticePoint), Scalar> = HashMap::new();
        for e in raw {
            let a = point(&e.lam, "lam")?;
            let b = point(&e.mu, "mu")?;
            let s = group.add(&a, &b);
            if !domain.contains(&group, &s) {
                return Err(Error::Malformed(format!("lam+mu = {s} lies outside the box")));
            }
            if !self.field.admits(&e.c) {
                return Err(Error::Malformed(format!("constant {} is not in the field {}", e.c, self.field)));
            }
            for p in [&a, &b, &s] {
                if !e.c.is_zero() && !support.contains(p) {
                    return Err(Error::Malformed(format!("nonzero constant touches unsupported degree {p}")));
                }
            }
            let mirrored = match symmetry {
                Symmetry::Antisymmetric => -&e.c,
                Symmetry::Symmetric => e.c.clone(),
            };
            for (k, v) in [((a.clone(), b.clone()), e.c.clone()), ((b.clone(), a.clone()), mirrored)] {
                if let Some(old) = values.get(&k) {
                    if *old != v {
                        return Err(Error::Malformed(format!(
                            "inconsistent constants for ({}, {}): {} vs {}",
                            k.0, k.1, old, v
                        )));
                    }
                }
                values.insert(k, v);
            }
        }
        Ok(Table {
            group,
            field: self.field,
            domain,
            provenance: self.provenance.clone().unwrap_or_else(|| "external".into()),
            support,
            values,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

impl Table {
    /// A Lie structure whose constants are known on the table's box.
    pub fn into_structure(self) -> ScalarStructure {
        let values = Arc::new(self.values);
        let support = Arc::new(self.support);
        ScalarStructure::new(
            self.group,
            self.field,
            self.provenance,
            move |a, b| values.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(Scalar::zero),
            move |p| support.contains(p),
        )
        .with_domain(self.domain)
    }
}

/// Serialize the constants of `s` on a box: one entry per unordered pair with
/// λ before μ in box order, λ+μ in the box and c(λ,μ) ≠ 0.
pub fn structure_to_file(s: &ScalarStructure, b: &LatticeBox) -> StructureFile {
    let pts = b.points(&s.group);
    let supported: Vec<&LatticePoint> = pts.iter().filter(|p| s.in_support(p)).collect();
    let mut entries = Vec::new();
    for (i, a) in supported.iter().enumerate() {
        for bb in &supported[i + 1..] {
            let sum = s.group.add(a, bb);
            if !b.contains(&s.group, &sum) || !s.defined(a, bb) {
                continue;
            }
            let c = s.c(a, bb);
            if !c.is_zero() {
                entries.push(Entry { lam: a.0.clone(), mu: bb.0.clone(), c });
            }
        }
    }
    let full = supported.len() == pts.len();
    StructureFile {
        rank: s.rank(),
        field: s.field,
        radius: b.radius,
        moduli: (!s.group.is_free()).then(|| s.group.moduli.clone()),
        provenance: Some(s.provenance.clone()),
        support: (!full).then(|| supported.iter().map(|p| p.0.clone()).collect()),
        entries: Some(entries),
        product: None,
    }
}

/// Parse interchange JSON into a Lie structure (antisymmetric completion).
pub fn structure_from_json(text: &str) -> Result<ScalarStructure> {
    Ok(StructureFile::from_json(text)?.table(Symmetry::Antisymmetric)?.into_structure())
}

pub fn structure_to_json(s: &ScalarStructure, b: &LatticeBox) -> Result<String> {
    structure_to_file(s, b).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{construct, CatalogName};

    #[test]
    fn round_trip_witt() {
        let w = construct(&CatalogName::Witt).unwrap();
        let b = LatticeBox::new(3);
        let text = structure_to_json(&w, &b).unwrap();
        let back = structure_from_json(&text).unwrap();
        for p in b.points(&w.group) {
            for q in b.points(&w.group) {
                if b.contains(&w.group, &p.add(&q)) {
                    assert_eq!(w.c(&p, &q), back.c(&p, &q), "{p} {q}");
                }
            }
        }
        assert_eq!(back.provenance, "witt");
        assert_eq!(structure_to_json(&back, &b).unwrap(), text);
    }

    #[test]
    fn rejects_inconsistent_pairs() {
        let text = r#"{"rank":1,"field":"Q","box":2,"entries":[
            {"lam":[0],"mu":[1],"c":"1"},{"lam":[1],"mu":[0],"c":"1"}]}"#;
        assert!(matches!(structure_from_json(text), Err(Error::Malformed(_))));
    }

    #[test]
    fn rejects_field_violation_and_out_of_box() {
        let text = r#"{"rank":1,"field":"Q","box":2,"entries":[{"lam":[0],"mu":[1],"c":"i"}]}"#;
        assert!(structure_from_json(text).is_err());
        let text = r#"{"rank":1,"field":"Q","box":2,"entries":[{"lam":[2],"mu":[1],"c":"1"}]}"#;
        assert!(structure_from_json(text).is_err());
    }

    #[test]
    fn torsion_round_trip() {
        let g = construct(&CatalogName::Sl3Gamma8).unwrap();
        let b = LatticeBox::new(1);
        let back = structure_from_json(&structure_to_json(&g, &b).unwrap()).unwrap();
        for p in b.points(&g.group) {
            for q in b.points(&g.group) {
                assert_eq!(g.c(&p, &q), back.c(&p, &q));
            }
        }
    }
}
