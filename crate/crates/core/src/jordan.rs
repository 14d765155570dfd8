//! Graded Jordan algebras with one-dimensional components, their inner
//! derivations, the Kantor–Koecher–Tits algebra 𝔰𝔩(2, J) and the extraction
//! of J(α) from an integrable algebra of type 1.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{Entry, StructureFile, Symmetry};
use crate::lattice::{generates_group, GradingGroup, LatticeBox, LatticePoint};
use crate::matrix::rank_of_rows;
use crate::scalar::{Field, Scalar};
use crate::scalar_lie::{analyze_l, AlternativeResult};
use crate::structure::{GradedProduct, ScalarStructure};

type ProductFn = dyn Fn(&LatticePoint, &LatticePoint) -> Scalar + Send + Sync;
type SupportFn = dyn Fn(&LatticePoint) -> bool + Send + Sync;

/// X_λ · X_μ = p(λ,μ) X_{λ+μ}, unit X_0.
#[derive(Clone)]
pub struct GradedJordan {
    pub group: GradingGroup,
    pub field: Field,
    pub domain: Option<LatticeBox>,
    product: Arc<ProductFn>,
    support: Arc<SupportFn>,
}

impl std::fmt::Debug for GradedJordan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedJordan").field("group", &self.group).field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl GradedJordan {
    /// `product` is only consulted when λ, μ and λ+μ are supported.
    pub fn new(
        group: GradingGroup,
        field: Field,
        product: impl Fn(&LatticePoint, &LatticePoint) -> Scalar + Send + Sync + 'static,
        support: impl Fn(&LatticePoint) -> bool + Send + Sync + 'static,
    ) -> Self {
        GradedJordan { group, field, domain: None, product: Arc::new(product), support: Arc::new(support) }
    }

    /// The group algebra K[M] (p ≡ 1) on the support set M.
    pub fn group_algebra(group: GradingGroup, support: impl Fn(&LatticePoint) -> bool + Send + Sync + 'static) -> Self {
        Self::new(group, Field::Q, |_, _| Scalar::one(), support)
    }

    /// K[kℤ] inside ℤ.
    pub fn multiples(k: i64) -> Self {
        Self::group_algebra(GradingGroup::free(1), move |p| p.0[0].rem_euclid(k) == 0)
    }

    /// The spin factor K·1 ⊕ K v₁ ⊕ K v₋₁ with v₁v₋₁ = 1 and v₁² = v₋₁² = 0,
    /// graded by ℤ: Jordan but not associative.
    pub fn spin_factor() -> Self {
        Self::new(GradingGroup::free(1), Field::Q, |_, _| Scalar::one(), |p| p.0[0].abs() <= 1)
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn in_support(&self, p: &LatticePoint) -> bool {
        let p = self.group.canonical(p);
        if let Some(d) = &self.domain {
            if !d.contains(&self.group, &p) {
                return false;
            }
        }
        (self.support)(&p)
    }

    pub fn defined(&self, a: &LatticePoint, b: &LatticePoint) -> bool {
        match &self.domain {
            None => true,
            Some(d) => [a, b, &self.group.add(a, b)].iter().all(|p| d.contains(&self.group, p)),
        }
    }

    pub fn p(&self, a: &LatticePoint, b: &LatticePoint) -> Scalar {
        let a = self.group.canonical(a);
        let b = self.group.canonical(b);
        if !self.defined(&a, &b) {
            return Scalar::zero();
        }
        let s = self.group.add(&a, &b);
        if !(self.support)(&a) || !(self.support)(&b) || !(self.support)(&s) {
            return Scalar::zero();
        }
        (self.product)(&a, &b)
    }

    /// Same products with one constant overwritten (negative controls).
    pub fn corrupted(&self, a: LatticePoint, b: LatticePoint, v: Scalar) -> GradedJordan {
        let inner = self.clone();
        let mut out = GradedJordan::new(
            self.group.clone(),
            self.field,
            move |x, y| {
                if (x == &a && y == &b) || (x == &b && y == &a) {
                    v.clone()
                } else {
                    inner.p(x, y)
                }
            },
            {
                let s = self.support.clone();
                move |p| s(p)
            },
        );
        out.domain = self.domain;
        out
    }

    pub fn support_in(&self, b: &LatticeBox) -> Vec<LatticePoint> {
        b.points(&self.group).into_iter().filter(|p| self.in_support(p)).collect()
    }

    /// Coefficient of [M_{X_λ}, M_{X_μ}](X_γ) on X_{λ+μ+γ}.
    pub fn inner_coeff(&self, lam: &LatticePoint, mu: &LatticePoint, gamma: &LatticePoint) -> Scalar {
        let g = &self.group;
        &(&self.p(mu, gamma) * &self.p(lam, &g.add(mu, gamma)))
            - &(&self.p(lam, gamma) * &self.p(mu, &g.add(lam, gamma)))
    }

    /// Interchange JSON with a `product` table.
    pub fn to_file(&self, b: &LatticeBox) -> StructureFile {
        let pts = self.support_in(b);
        let mut product = Vec::new();
        for (i, a) in pts.iter().enumerate() {
            for c in &pts[i..] {
                let s = self.group.add(a, c);
                if b.contains(&self.group, &s) && self.defined(a, c) {
                    let v = self.p(a, c);
                    if !v.is_zero() {
                        product.push(Entry { lam: a.0.clone(), mu: c.0.clone(), c: v });
                    }
                }
            }
        }
        let full = pts.len() == b.size(&self.group);
        StructureFile {
            rank: self.rank(),
            field: self.field,
            radius: b.radius,
            moduli: (!self.group.is_free()).then(|| self.group.moduli.clone()),
            provenance: Some("jordan".into()),
            support: (!full).then(|| pts.iter().map(|p| p.0.clone()).collect()),
            entries: None,
            product: Some(product),
        }
    }

    pub fn from_file(f: &StructureFile) -> Result<GradedJordan> {
        let t = f.table(Symmetry::Symmetric)?;
        let values = Arc::new(t.values);
        let support = Arc::new(t.support);
        let mut j = GradedJordan::new(
            t.group,
            t.field,
            move |a, b| values.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(Scalar::zero),
            move |p| support.contains(p),
        );
        j.domain = Some(t.domain);
        Ok(j)
    }
}

impl GradedProduct for GradedJordan {
    fn group(&self) -> &GradingGroup {
        &self.group
    }
    fn in_support(&self, p: &LatticePoint) -> bool {
        GradedJordan::in_support(self, p)
    }
    fn product(&self, a: &LatticePoint, b: &LatticePoint) -> Scalar {
        self.p(a, b)
    }
    fn defined(&self, a: &LatticePoint, b: &LatticePoint) -> bool {
        GradedJordan::defined(self, a, b)
    }
}

/// [M_{X_λ}, M_{X_μ}] on the supported points of a box, as a homogeneous map
/// of degree λ+μ: `coeffs[γ]` is the coefficient of X_{λ+μ+γ} in D(X_γ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerDerivation {
    pub lam: LatticePoint,
    pub mu: LatticePoint,
    pub coeffs: BTreeMap<LatticePoint, Scalar>,
}

impl InnerDerivation {
    pub fn degree(&self, g: &GradingGroup) -> LatticePoint {
        g.add(&self.lam, &self.mu)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// D(ab) = D(a)b + aD(b) on all in-box homogeneous pairs (products leaving
    /// the box are skipped).
    pub fn is_derivation(&self, j: &GradedJordan, b: &LatticeBox) -> bool {
        let g = &j.group;
        let sigma = self.degree(g);
        let pts = j.support_in(b);
        let d = |p: &LatticePoint| j.inner_coeff(&self.lam, &self.mu, p);
        pts.par_iter().all(|a| {
            pts.iter().all(|c| {
                let ac = g.add(a, c);
                if !b.contains(g, &ac) {
                    return true;
                }
                let lhs = &j.p(a, c) * &d(&ac);
                let rhs = &(&d(a) * &j.p(&g.add(a, &sigma), c)) + &(&j.p(a, &g.add(c, &sigma)) * &d(c));
                lhs == rhs
            })
        })
    }
}

/// The commutator [M_{X_λ}, M_{X_μ}] restricted to the box.
pub fn inner_derivation(j: &GradedJordan, lam: &LatticePoint, mu: &LatticePoint, b: &LatticeBox) -> InnerDerivation {
    let coeffs = j.support_in(b).into_iter().map(|p| {
        let c = j.inner_coeff(lam, mu, &p);
        (p, c)
    });
    InnerDerivation { lam: lam.clone(), mu: mu.clone(), coeffs: coeffs.collect() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "identity", rename_all = "snake_case")]
pub enum JordanViolation {
    Commutativity { x: LatticePoint, y: LatticePoint },
    Unit { x: LatticePoint },
    /// (x²y)x = x²(yx)
    JordanIdentity { x: LatticePoint, y: LatticePoint },
    /// [X², Y] = 2[X, XY] as operators, evaluated on X_z
    SquareCommutator { x: LatticePoint, y: LatticePoint, z: LatticePoint },
    /// X²Y² + 2(XY)(XY) = Y(X²Y) + 2X(Y(YX))
    QuarticIdentity { x: LatticePoint, y: LatticePoint },
    /// Σ_cyc ((ab)d)c = Σ_cyc (ab)(dc) over (a, b, c)
    Linearized { a: LatticePoint, b: LatticePoint, c: LatticePoint, d: LatticePoint },
}

/// Verify commutativity, the unit, the Jordan identity, the square-commutator
/// and quartic identities and the fully linearized Jordan identity on homogeneous elements
/// of the box. Identities whose intermediate degrees leave a finite domain are
/// skipped.
pub fn check_jordan(j: &GradedJordan, b: &LatticeBox) -> Vec<JordanViolation> {
    let g = &j.group;
    let pts = j.support_in(b);
    let zero = LatticePoint::zero(j.rank());
    let ok = |ps: &[&LatticePoint]| match &j.domain {
        None => true,
        Some(d) => ps.iter().all(|p| d.contains(g, p)),
    };
    let mut out = Vec::new();
    for x in &pts {
        if j.in_support(&zero) && j.p(&zero, x) != Scalar::one() {
            out.push(JordanViolation::Unit { x: x.clone() });
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..pts.len()).flat_map(|i| (0..pts.len()).map(move |k| (i, k))).collect();
    let pair_viol: Vec<Vec<JordanViolation>> = pairs
        .par_iter()
        .map(|&(i, k)| {
            let (x, y) = (&pts[i], &pts[k]);
            let mut v = Vec::new();
            if j.p(x, y) != j.p(y, x) {
                v.push(JordanViolation::Commutativity { x: x.clone(), y: y.clone() });
            }
            let x2 = g.add(x, x);
            let y2 = g.add(y, y);
            let xy = g.add(x, y);
            let x2y = g.add(&x2, y);
            let sq = j.p(x, x);
            if ok(&[&x2, &xy, &x2y, &g.add(&x2y, x)]) {
                let lhs = &(&(&sq * &j.p(&x2, y)) * &j.p(&x2y, x));
                let rhs = &(&sq * &j.p(y, x)) * &j.p(&x2, &xy);
                if lhs != &rhs {
                    v.push(JordanViolation::JordanIdentity { x: x.clone(), y: y.clone() });
                }
            }
            // [M_{X²}, M_Y] = 2 [M_X, M_{XY}] on every X_z.
            for z in &pts {
                let tgt = g.add(&x2y, z);
                if !ok(&[&x2, &xy, &tgt, &g.add(y, z), &g.add(&x2, z), &g.add(x, z), &g.add(&xy, z)]) {
                    continue;
                }
                let lhs = &sq * &j.inner_coeff(&x2, y, z);
                let rhs = &(&Scalar::from_int(2) * &j.p(x, y)) * &j.inner_coeff(x, &xy, z);
                if lhs != rhs {
                    v.push(JordanViolation::SquareCommutator { x: x.clone(), y: y.clone(), z: z.clone() });
                }
            }
            // X²Y² + 2(XY)(XY) = Y(X²Y) + 2X(Y(YX))
            let yyx = g.add(y, &xy);
            if ok(&[&x2, &y2, &xy, &x2y, &yyx, &g.add(&x2, &y2)]) {
                let two = Scalar::from_int(2);
                let pxy = j.p(x, y);
                let lhs = &(&(&sq * &j.p(y, y)) * &j.p(&x2, &y2)) + &(&two * &(&(&pxy * &pxy) * &j.p(&xy, &xy)));
                let r1 = &(&sq * &j.p(&x2, y)) * &j.p(y, &x2y);
                let r2 = &two * &(&(&j.p(y, x) * &j.p(y, &xy)) * &j.p(x, &yyx));
                if lhs != &r1 + &r2 {
                    v.push(JordanViolation::QuarticIdentity { x: x.clone(), y: y.clone() });
                }
            }
            v
        })
        .collect();
    out.extend(pair_viol.into_iter().flatten());

    // Linearized identity: ((ab)d)c + ((bc)d)a + ((ca)d)b = (ab)(dc) + (bc)(da) + (ca)(db).
    let n = pts.len();
    let quads: Vec<JordanViolation> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|ij| {
            let (a, bb) = (&pts[ij / n], &pts[ij % n]);
            let pts = &pts;
            let ok = &ok;
            pts.iter().flat_map(move |c| {
                pts.iter().filter_map(move |d| {
                    let total = g.add(&g.add(a, bb), &g.add(c, d));
                    let three = |u: &LatticePoint, w: &LatticePoint, r: &LatticePoint| -> Option<(Scalar, Scalar)> {
                        let uw = g.add(u, w);
                        let uwd = g.add(&uw, d);
                        let dr = g.add(d, r);
                        if !ok(&[&uw, &uwd, &dr, &total]) {
                            return None;
                        }
                        let puw = j.p(u, w);
                        Some((&(&puw * &j.p(&uw, d)) * &j.p(&uwd, r), &(&puw * &j.p(d, r)) * &j.p(&uw, &dr)))
                    };
                    let terms = [three(a, bb, c), three(bb, c, a), three(c, a, bb)];
                    if terms.iter().any(|t| t.is_none()) {
                        return None;
                    }
                    let (mut l, mut r) = (Scalar::zero(), Scalar::zero());
                    for (x, y) in terms.into_iter().flatten() {
                        l += x;
                        r += y;
                    }
                    (l != r).then(|| JordanViolation::Linearized {
                        a: a.clone(),
                        b: bb.clone(),
                        c: c.clone(),
                        d: d.clone(),
                    })
                })
            })
        })
        .collect();
    out.extend(quads);
    out
}

/// Y with XY = 1 and [M_X, M_Y] = 0 on the box, as (degree, scalar κ) with
/// Y = κ·X_μ. Only μ = −λ can give XY ∈ K·1.
pub fn strongly_invertible(j: &GradedJordan, lam: &LatticePoint, b: &LatticeBox) -> Option<(LatticePoint, Scalar)> {
    if !j.in_support(lam) {
        return None;
    }
    let mu = j.group.neg(lam);
    let c = j.p(lam, &mu);
    if c.is_zero() || !inner_derivation(j, lam, &mu, b).is_zero() {
        return None;
    }
    Some((mu, c.inv()))
}

/// X_λ² is central: [M_{X_λ²}, M_{X_μ}] = 0 on the box for every μ.
pub fn square_is_central(j: &GradedJordan, lam: &LatticePoint, b: &LatticeBox) -> bool {
    let x2 = j.group.add(lam, lam);
    if j.p(lam, lam).is_zero() {
        return true;
    }
    j.support_in(b).iter().all(|mu| inner_derivation(j, &x2, mu, b).is_zero())
}

/// (J, Λ′, α): J graded by Λ with support in Λ′.
#[derive(Clone, Debug)]
pub struct AdmissibleDatum {
    pub j: GradedJordan,
    pub sublattice: Vec<LatticePoint>,
    pub alpha: LatticePoint,
}

/// Result of checking admissibility on a box (a refutation or a statement
/// that no conflict was found up to the radius).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub radius: i64,
    pub generates: bool,
    /// Degrees where two of Supp J, ±α + Supp J, Supp Inn J meet.
    pub overlaps: Vec<LatticePoint>,
}

impl AdmissibilityReport {
    pub fn holds(&self) -> bool {
        self.generates && self.overlaps.is_empty()
    }
}

/// Summand of 𝔰𝔩(2, J) occupying a degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    E,
    H,
    F,
    D,
}

struct KktLayout {
    slots: HashMap<LatticePoint, Slot>,
    /// Chosen spanning pair and a reference point γ with d(γ) ≠ 0 for each Inn degree.
    inn: HashMap<LatticePoint, (LatticePoint, LatticePoint, LatticePoint, Scalar)>,
    clashes: Vec<(LatticePoint, String)>,
}

fn kkt_layout(d: &AdmissibleDatum, b: &LatticeBox) -> KktLayout {
    let j = &d.j;
    let g = &j.group;
    // Inner derivations are tested on a wider box so that degrees near the
    // boundary of `b` are still seen.
    let scan = LatticeBox::new(b.radius * 2 + 2);
    let scan_pts = j.support_in(&scan);
    let mut slots = HashMap::new();
    let mut inn = HashMap::new();
    let mut clashes = Vec::new();
    for nu in b.points(g) {
        let mut found: Vec<Slot> = Vec::new();
        if j.in_support(&g.add(&nu, &g.neg(&d.alpha))) {
            found.push(Slot::E);
        }
        if j.in_support(&nu) {
            found.push(Slot::H);
        }
        if j.in_support(&g.add(&nu, &d.alpha)) {
            found.push(Slot::F);
        }
        // Inn J at degree ν: span of [M_a, M_{ν−a}], a in the scan box.
        let mut vecs: Vec<(LatticePoint, LatticePoint, Vec<Scalar>)> = Vec::new();
        for a in &scan_pts {
            let c = g.add(&nu, &g.neg(a));
            if !j.in_support(&c) {
                continue;
            }
            let v: Vec<Scalar> = scan_pts.iter().map(|gm| j.inner_coeff(a, &c, gm)).collect();
            if v.iter().any(|x| !x.is_zero()) {
                vecs.push((a.clone(), c, v));
            }
        }
        if !vecs.is_empty() {
            found.push(Slot::D);
            let rows: Vec<Vec<Scalar>> = vecs.iter().map(|v| v.2.clone()).collect();
            let r = rank_of_rows(&rows);
            if r > 1 {
                clashes.push((nu.clone(), format!("Inn J of dimension {r}")));
            }
            let (a, c, v) = &vecs[0];
            let k = v.iter().position(|x| !x.is_zero()).unwrap();
            inn.insert(nu.clone(), (a.clone(), c.clone(), scan_pts[k].clone(), v[k].clone()));
        }
        if found.len() > 1 {
            clashes.push((nu.clone(), format!("{found:?}")));
        }
        if let Some(s) = found.first() {
            slots.insert(nu, *s);
        }
    }
    KktLayout { slots, inn, clashes }
}

/// Check the admissibility conditions of a datum on a box.
pub fn check_admissible(d: &AdmissibleDatum, b: &LatticeBox) -> AdmissibilityReport {
    let g = &d.j.group;
    let mut gens = d.sublattice.clone();
    gens.push(d.alpha.clone());
    let generates = generates_group(g, &gens);
    let layout = kkt_layout(d, b);
    let mut overlaps: Vec<LatticePoint> = layout.clashes.into_iter().map(|c| c.0).collect();
    overlaps.sort();
    AdmissibilityReport { radius: b.radius, generates, overlaps }
}

/// 𝔰𝔩(2, J) = 𝔰𝔩(2)⊗J ⊕ Inn J with
/// [x⊗a, y⊗b] = [x,y]⊗ab + k(x,y)[M_a, M_b], k(x,y) = ½ tr(xy), graded by
/// deg e⊗X_μ = α+μ, deg h⊗X_μ = μ, deg f⊗X_μ = μ−α, deg [M_a,M_b] = deg a + deg b.
/// Basis: E_ν = e⊗X_{ν−α}, H_ν = h⊗X_ν, F_ν = f⊗X_{ν+α}, and for Inn degrees the
/// first non-zero commutator in box order. The result is known on the box.
pub fn kkt(d: &AdmissibleDatum, b: &LatticeBox) -> Result<ScalarStructure> {
    let adm = check_admissible(d, b);
    if !adm.generates {
        return Err(Error::InvalidParameter("Λ′ and α do not generate the grading group".into()));
    }
    let layout = kkt_layout(d, b);
    if let Some((deg, what)) = layout.clashes.first() {
        return Err(Error::MultiplicityClash { degree: deg.to_string(), what: what.clone() });
    }
    let j = d.j.clone();
    let g = j.group.clone();
    let alpha = d.alpha.clone();
    let slots = Arc::new(layout.slots);
    let inn = Arc::new(layout.inn);
    let half = Scalar::ratio(1, 2);
    let field = j.field;

    // Evaluate a derivation given in slot form at degree ν on X_γ.
    let slots2 = slots.clone();
    let inn2 = inn.clone();
    let j2 = j.clone();
    let g2 = g.clone();
    let coeff = move |lam: &LatticePoint, mu: &LatticePoint| -> Scalar {
        let (j, g) = (&j2, &g2);
        let (Some(&sl), Some(&sm)) = (slots2.get(lam), slots2.get(mu)) else { return Scalar::zero() };
        let nu = g.add(lam, mu);
        let Some(&target) = slots2.get(&nu) else { return Scalar::zero() };
        let neg_a = g.neg(&alpha);
        // J-degree of the 𝔰𝔩(2)⊗J basis vector at a degree.
        let jdeg = |s: Slot, p: &LatticePoint| match s {
            Slot::E => g.add(p, &neg_a),
            Slot::H => p.clone(),
            Slot::F => g.add(p, &alpha),
            Slot::D => unreachable!(),
        };
        // Basis derivation value at a point.
        let dval = |deg: &LatticePoint, gm: &LatticePoint| -> Scalar {
            let (a, c, _, _) = &inn2[deg];
            j.inner_coeff(a, c, gm)
        };
        // Express k·[M_a, M_c] (degree ν) in the basis D_ν.
        let as_inn = |k: Scalar, a: &LatticePoint, c: &LatticePoint| -> Scalar {
            if k.is_zero() || target != Slot::D {
                return Scalar::zero();
            }
            let (_, _, gm, v) = &inn2[&nu];
            &(&k * &j.inner_coeff(a, c, gm)) / v
        };
        let two = Scalar::from_int(2);
        match (sl, sm) {
            (Slot::D, Slot::D) => {
                if target != Slot::D {
                    return Scalar::zero();
                }
                let (_, _, gm, v) = &inn2[&nu];
                let val = &(&dval(lam, &g.add(gm, mu)) * &dval(mu, gm)) - &(&dval(mu, &g.add(gm, lam)) * &dval(lam, gm));
                &val / v
            }
            (Slot::D, s) => {
                if target != s {
                    return Scalar::zero();
                }
                dval(lam, &jdeg(s, mu))
            }
            (s, Slot::D) => {
                if target != s {
                    return Scalar::zero();
                }
                -dval(mu, &jdeg(s, lam))
            }
            (x, y) => {
                let (a, c) = (jdeg(x, lam), jdeg(y, mu));
                let ab = j.p(&a, &c);
                // [x, y] in 𝔰𝔩(2) and k(x, y)
                let (lie, k): (Option<(Slot, Scalar)>, Scalar) = match (x, y) {
                    (Slot::E, Slot::F) => (Some((Slot::H, Scalar::one())), half.clone()),
                    (Slot::F, Slot::E) => (Some((Slot::H, -Scalar::one())), half.clone()),
                    (Slot::H, Slot::E) => (Some((Slot::E, two.clone())), Scalar::zero()),
                    (Slot::E, Slot::H) => (Some((Slot::E, -two.clone())), Scalar::zero()),
                    (Slot::H, Slot::F) => (Some((Slot::F, -two.clone())), Scalar::zero()),
                    (Slot::F, Slot::H) => (Some((Slot::F, two.clone())), Scalar::zero()),
                    (Slot::H, Slot::H) => (None, Scalar::one()),
                    _ => (None, Scalar::zero()),
                };
                let sl2_part = match lie {
                    Some((s, coef)) if s == target => &coef * &ab,
                    _ => Scalar::zero(),
                };
                &sl2_part + &as_inn(k, &a, &c)
            }
        }
    };
    let slots3 = slots.clone();
    Ok(ScalarStructure::new(g, field, "kkt", coeff, move |p| slots3.contains_key(p)).with_domain(*b))
}

/// J(α) on ℒ¹ = ⊕_{l(λ)=l(α)} ℒ_λ with J(α)_μ = ℒ_{μ+α} and product
/// x·y = [[L_{−α}, x], y], L_{−α} rescaled so that L_α is the unit:
/// p(μ,ν) = c(−α, μ+α)·c(μ, ν+α) / (c(−α, α)·l(α)).
pub fn extract_jordan(s: &ScalarStructure, alpha: &LatticePoint, b: &LatticeBox) -> Result<GradedJordan> {
    let la = s.l(alpha);
    let g = s.group.clone();
    let neg = g.neg(alpha);
    let norm = &s.c(&neg, alpha) * &la;
    if la.is_zero() || norm.is_zero() {
        return Err(Error::InvalidParameter(format!("{alpha} is not in Σ")));
    }
    let values: Vec<Scalar> = s.support_in(b).iter().map(|p| s.l(p)).collect();
    let ok = values.iter().all(|v| v.is_zero() || *v == la || *v == -&la);
    if !ok {
        let kind = match analyze_l(s, b) {
            Ok(AlternativeResult::Bounded { n, .. }) => format!("type {n}"),
            Ok(AlternativeResult::Additive { .. }) => "non-integrable".into(),
            _ => "unknown type".into(),
        };
        return Err(Error::TypeMismatch(format!("l takes values outside {{0, ±l(α)}} ({kind})")));
    }
    let (s1, s2) = (s.clone(), s.clone());
    let (a1, a2) = (alpha.clone(), alpha.clone());
    let (g1, g2) = (g.clone(), g.clone());
    let la2 = la.clone();
    Ok(GradedJordan::new(
        g,
        s.field,
        move |mu, nu| {
            let m1 = g1.add(mu, &a1);
            let n1 = g1.add(nu, &a1);
            &(&s1.c(&g1.neg(&a1), &m1) * &s1.c(mu, &n1)) / &norm
        },
        move |mu| {
            let p = g2.add(mu, &a2);
            s2.in_support(&p) && s2.l(&p) == la2
        },
    ))
}
