//! The classifier: decides between the integrable and non-integrable cases and
//! certifies a match with the catalog by an explicit diagonal rescaling.
//!
//! Non-integrable pipeline: pick a primitive α with l(α) ≠ 0, rescale so that
//! l(α) = 1, identify the α-section with the Witt algebra, recognize the
//! W-module carried by each ℤα-coset, read off the degree function δ, recover
//! π(λ) = (l(λ) − δ(λ) − 1, −1 − δ(λ)), check the quasi-cocycle law and finally
//! solve for the rescaling against W_π. Integrable inputs are matched against
//! pullbacks of the finite gradations Γ₃ (type 1) and Γ₈ (type 2).

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{construct, pi_integer_matrix, pullback, wpi_coeff, CatalogName};
use crate::error::{Error, Result};
use crate::lattice::{generates_group, int_kernel, AdditiveMap, GradingGroup, LatticeBox, LatticePoint};
use crate::scalar::{Field, Scalar};
use crate::scalar_lie::{analyze_l, diagonal_equivalence, AlternativeResult, Rescaling};
use crate::structure::ScalarStructure;
use crate::symbols::{fit_rescaling, module_recognize, ActionWindow, DensityModuleSpec};

/// Shortest coset window handed to the module recognizer.
const MIN_WINDOW: usize = 5;

/// δ on the ℤα-cosets met by the box. Cosets are represented by the point
/// with coordinate `pivot` equal to 0 (α has that coordinate equal to 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeFunction {
    pub alpha: LatticePoint,
    pub pivot: usize,
    pub radius: i64,
    /// (coset representative, δ), sorted by representative.
    pub values: Vec<(LatticePoint, Scalar)>,
    /// The recognized module of every coset, same order as `values`.
    pub modules: Vec<(LatticePoint, DensityModuleSpec)>,
}

impl DegreeFunction {
    pub fn representative(&self, p: &LatticePoint) -> LatticePoint {
        p.sub(&self.alpha.scale(p.0[self.pivot]))
    }

    pub fn delta(&self, p: &LatticePoint) -> Option<Scalar> {
        let r = self.representative(p);
        self.values.binary_search_by(|(q, _)| q.cmp(&r)).ok().map(|i| self.values[i].1.clone())
    }
}

/// The normalization stack behind a reported π.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub alpha: LatticePoint,
    /// The structure is multiplied by 1/l(α) so that l(α) = 1.
    pub l_alpha: Scalar,
    /// π(α) = (1, 0).
    pub pi_alpha: [Scalar; 2],
    /// How each coset module is identified with a density module.
    pub module_basis: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleReport {
    /// Coset pairs on which the mismatch c(β, γ) was determined.
    pub pairs: usize,
    /// Coset triples on which the cocycle identity was checked.
    pub triples: usize,
    /// Coset pairs skipped because both degrees are 0.
    pub excluded_pairs: usize,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Classification {
    Integrable {
        type_n: i64,
        /// Provenance of the matched catalog pullback.
        matched: String,
        /// Images of the standard generators in ℤ/3 or ℤ/8.
        images: Vec<LatticePoint>,
        /// Rescaling from the input to the matched pullback.
        witness: Rescaling,
        radius: i64,
    },
    NonIntegrable {
        pi: AdditiveMap,
        alpha: LatticePoint,
        l_alpha: Scalar,
        /// Basis of ker π (nonempty exactly for imprimitive inputs).
        kernel: Vec<LatticePoint>,
        imprimitive: bool,
        degree_function: DegreeFunction,
        cocycle: CocycleReport,
        normalization: Normalization,
        /// Rescaling from the input to W_π.
        witness: Rescaling,
        radius: i64,
    },
    Inconclusive {
        reason: String,
        radius: i64,
    },
}

impl Classification {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Classification::Inconclusive { .. })
    }
}

/// The one-parameter subalgebra ⊕_n ℒ_{nα} as a ℤ-graded structure on [−k, k].
fn alpha_section(s: &ScalarStructure, alpha: &LatticePoint, k: i64) -> ScalarStructure {
    let (s1, s2) = (s.clone(), s.clone());
    let (a1, a2) = (alpha.clone(), alpha.clone());
    ScalarStructure::new(
        GradingGroup::free(1),
        s.field,
        format!("section({})", s.provenance),
        move |n, m| s1.c(&a1.scale(n.0[0]), &a1.scale(m.0[0])),
        move |n| s2.in_support(&a2.scale(n.0[0])),
    )
    .with_domain(LatticeBox::new(k))
}

fn section_radius(alpha: &LatticePoint, b: &LatticeBox) -> i64 {
    b.radius / alpha.sup_norm().max(1)
}

/// Everything computed per coset on the way to δ.
struct CosetData {
    /// Window points (consecutive along α).
    points: Vec<LatticePoint>,
    window: ActionWindow,
    spec: DensityModuleSpec,
}

struct Analysis {
    scaled: ScalarStructure,
    dfun: DegreeFunction,
    cosets: BTreeMap<LatticePoint, CosetData>,
}

fn pivot_of(alpha: &LatticePoint) -> Option<usize> {
    alpha.0.iter().position(|&x| x == 1)
}

fn analyse(s: &ScalarStructure, alpha: &LatticePoint, b: &LatticeBox) -> Result<Analysis> {
    if !s.group.is_free() {
        return Err(Error::InvalidParameter("the degree function needs a free grading group".into()));
    }
    let pivot = pivot_of(alpha)
        .ok_or_else(|| Error::InvalidParameter(format!("α = {alpha} has no coordinate equal to 1")))?;
    let l_alpha = s.l(alpha);
    if l_alpha.is_zero() {
        return Err(Error::InvalidParameter(format!("l({alpha}) = 0")));
    }
    let scaled = s.scaled(l_alpha.inv());
    let k = section_radius(alpha, b);
    let section = alpha_section(&scaled, alpha, k);
    let witt = construct(&CatalogName::Witt)?;
    let t = diagonal_equivalence(&section, &witt, &LatticeBox::new(k))?
        .ok_or_else(|| Error::Recognition(format!("the {alpha}-section is not isomorphic to the Witt algebra")))?;
    let t_n = |n: i64| t.values.get(&LatticePoint(vec![n])).cloned();

    let reps: Vec<LatticePoint> =
        b.points(&s.group).into_iter().filter(|p| p.0[pivot] == 0).collect();
    let cosets: Vec<(LatticePoint, Result<Option<CosetData>>)> = reps
        .par_iter()
        .map(|rep| {
            // Longest run of supported in-box points along α.
            let mut best: Vec<LatticePoint> = Vec::new();
            let mut cur: Vec<LatticePoint> = Vec::new();
            for j in -2 * b.radius..=2 * b.radius {
                let p = rep.add(&alpha.scale(j));
                if b.contains(&s.group, &p) && scaled.in_support(&p) {
                    cur.push(p);
                } else {
                    if cur.len() > best.len() {
                        best = std::mem::take(&mut cur);
                    }
                    cur.clear();
                }
            }
            if cur.len() > best.len() {
                best = cur;
            }
            if best.len() < MIN_WINDOW {
                return (rep.clone(), Ok(None));
            }
            let mut w = ActionWindow::new(scaled.l(&best[0]), best.len());
            for (i, p) in best.iter().enumerate() {
                for n in -2..=2i64 {
                    let j = i as i64 + n;
                    if j < 0 || j >= best.len() as i64 {
                        continue;
                    }
                    let Some(tn) = t_n(n) else { continue };
                    let na = alpha.scale(n);
                    if !scaled.defined(&na, p) {
                        continue;
                    }
                    w.set(n, i as i64, &scaled.c(&na, p) / &tn);
                }
            }
            let res = module_recognize(&w).map(|spec| Some(CosetData { points: best, window: w, spec }));
            (rep.clone(), res)
        })
        .collect();

    let mut data = BTreeMap::new();
    for (rep, r) in cosets {
        match r {
            Ok(Some(d)) => {
                data.insert(rep, d);
            }
            Ok(None) => {}
            Err(e) => return Err(Error::Recognition(format!("coset {rep}: {e}"))),
        }
    }

    // δ(β) + δ(−β) = −2 singles out one degree of each {0, 1} module.
    let two = Scalar::from_int(-2);
    let mut values: BTreeMap<LatticePoint, Scalar> = BTreeMap::new();
    for (rep, d) in &data {
        if let DensityModuleSpec::Density { delta, .. } = &d.spec {
            values.insert(rep.clone(), delta.clone());
        }
    }
    for (rep, d) in &data {
        let neg = rep.neg();
        let opposite = values.get(&neg).cloned();
        match (&d.spec, opposite) {
            (DensityModuleSpec::Density { delta, .. }, Some(o)) => {
                if (delta + &o) != two {
                    return Err(Error::AffineLaw(format!("δ({rep}) + δ({neg}) = {} ≠ −2", delta + &o)));
                }
            }
            (DensityModuleSpec::Density { .. }, None) => {}
            (_, Some(o)) => {
                let v = &two - &o;
                if !d.spec.degrees().contains(&v) {
                    return Err(Error::AffineLaw(format!(
                        "coset {rep} has degrees {{0, 1}} but −2 − δ({neg}) = {v}"
                    )));
                }
                values.insert(rep.clone(), v);
            }
            (_, None) => {
                return Err(Error::Recognition(format!(
                    "coset {rep} has degrees {{0, 1}} and the opposite coset does not decide between them"
                )))
            }
        }
    }
    let zero = s.zero_point();
    match values.get(&zero) {
        Some(v) if *v == Scalar::from_int(-1) => {}
        other => {
            return Err(Error::AffineLaw(format!(
                "δ(0) = {} instead of −1",
                other.map(|v| v.to_string()).unwrap_or_else(|| "undetermined".into())
            )))
        }
    }
    // Affine law on every pair of cosets whose sum was recognized.
    let one = Scalar::one();
    for (p, dp) in &values {
        for (q, dq) in &values {
            if let Some(dpq) = values.get(&p.add(q)) {
                if *dpq != &(dp + dq) + &one {
                    return Err(Error::AffineLaw(format!(
                        "δ({p}+{q}) = {dpq} but δ({p}) + δ({q}) + 1 = {}",
                        &(dp + dq) + &one
                    )));
                }
            }
        }
    }
    let dfun = DegreeFunction {
        alpha: alpha.clone(),
        pivot,
        radius: b.radius,
        modules: data.iter().map(|(r, d)| (r.clone(), d.spec.clone())).collect(),
        values: values.into_iter().collect(),
    };
    Ok(Analysis { scaled, dfun, cosets: data })
}

/// The degree function of a non-integrable structure along α on the box.
pub fn degree_function(s: &ScalarStructure, alpha: &LatticePoint, b: &LatticeBox) -> Result<DegreeFunction> {
    Ok(analyse(s, alpha, b)?.dfun)
}

/// π(λ) = (l(λ) − δ(λ) − 1, −1 − δ(λ)) with l normalized by l(α) = 1, as an
/// additive map; additivity is checked on every box point with a known δ.
pub fn recover_embedding(
    s: &ScalarStructure,
    alpha: &LatticePoint,
    b: &LatticeBox,
    delta: &DegreeFunction,
) -> Result<AdditiveMap> {
    let l_alpha = s.l(alpha);
    if l_alpha.is_zero() {
        return Err(Error::InvalidParameter(format!("l({alpha}) = 0")));
    }
    let one = Scalar::one();
    let pi_at = |p: &LatticePoint| -> Option<[Scalar; 2]> {
        let d = delta.delta(p)?;
        let l = &s.l(p) / &l_alpha;
        Some([&(&l - &d) - &one, -&(&d + &one)])
    };
    let rank = s.rank();
    let mut images = Vec::with_capacity(rank);
    for i in 0..rank {
        let e = LatticePoint::unit(rank, i);
        let v = pi_at(&e).ok_or_else(|| Error::Recognition(format!("δ is unknown at the generator {e}")))?;
        images.push(v);
    }
    let pi = AdditiveMap::pair(images);
    for p in b.points(&s.group) {
        if !s.in_support(&p) {
            continue;
        }
        if let Some(v) = pi_at(&p) {
            if pi.apply2(&p)? != v {
                return Err(Error::AffineLaw(format!("π is not additive at {p}")));
            }
        }
    }
    if pi.apply2(alpha)? != [one, Scalar::zero()] {
        return Err(Error::AffineLaw("π(α) ≠ (1, 0)".into()));
    }
    Ok(pi)
}

/// Basis of the kernel of π: Λ → K² (as integer vectors).
pub fn pi_kernel(pi: &AdditiveMap) -> Result<Vec<LatticePoint>> {
    let (rows, _) = pi_integer_matrix(pi)?;
    let big = || Error::InvalidParameter("kernel vector too large".into());
    int_kernel(&rows, pi.rank())
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| big()))
                .collect::<Result<Vec<i64>>>()
                .map(LatticePoint)
        })
        .collect()
}

/// Identify every coset with its density module (lowest window vector ↦
/// u^δ_x) and check that the mismatch with the symbol bracket of W_π is a
/// function of the coset pair satisfying the cocycle identity.
fn quasi_cocycle(a: &Analysis, pi: &AdditiveMap) -> Result<CocycleReport> {
    let mut tau: HashMap<LatticePoint, Scalar> = HashMap::new();
    let mut coset_of: HashMap<LatticePoint, LatticePoint> = HashMap::new();
    for (rep, d) in &a.cosets {
        let delta = a.dfun.delta(rep).expect("recognized cosets carry δ");
        let w = &d.window;
        let model = |n: i64, k: i64| &w.x(k) + &(&Scalar::from_int(n) * &delta);
        let t = fit_rescaling(w, &model)
            .ok_or_else(|| Error::Recognition(format!("coset {rep} is not a rescaled density module")))?;
        for (p, v) in d.points.iter().zip(t) {
            tau.insert(p.clone(), v);
            coset_of.insert(p.clone(), rep.clone());
        }
    }
    let zero = Scalar::zero();
    let s = &a.scaled;
    let mut cc: BTreeMap<(LatticePoint, LatticePoint), Scalar> = BTreeMap::new();
    let mut excluded = std::collections::BTreeSet::new();
    let pts: Vec<&LatticePoint> = tau.keys().collect();
    for p in &pts {
        for q in &pts {
            let sum = p.add(q);
            let Some(ts) = tau.get(&sum) else { continue };
            if !s.defined(p, q) {
                continue;
            }
            let (bp, bq) = (coset_of[*p].clone(), coset_of[*q].clone());
            let (dp, dq) = (a.dfun.delta(p).unwrap(), a.dfun.delta(q).unwrap());
            if dp == zero && dq == zero {
                excluded.insert((bp, bq));
                continue;
            }
            let c = s.c(p, q);
            let w = wpi_coeff(pi, p, q);
            match (c.is_zero(), w.is_zero()) {
                (true, true) => continue,
                (false, false) => {}
                _ => {
                    return Ok(CocycleReport {
                        pairs: cc.len(),
                        triples: 0,
                        excluded_pairs: excluded.len(),
                        holds: false,
                        witness: Some(format!("c({p}, {q}) and the symbol bracket disagree on vanishing")),
                    })
                }
            }
            let v = &(&c * ts) / &(&(&tau[*p] * &tau[*q]) * &w);
            match cc.get(&(bp.clone(), bq.clone())) {
                Some(old) if *old != v => {
                    return Ok(CocycleReport {
                        pairs: cc.len(),
                        triples: 0,
                        excluded_pairs: excluded.len(),
                        holds: false,
                        witness: Some(format!("mismatch is not constant on the cosets of ({p}, {q})")),
                    })
                }
                Some(_) => {}
                None => {
                    cc.insert((bp, bq), v);
                }
            }
        }
    }
    let mut triples = 0;
    for ((b1, b2), c12) in &cc {
        for ((g, b3), c23) in cc.range((b2.clone(), LatticePoint(vec![i64::MIN; b2.rank()]))..) {
            if g != b2 {
                break;
            }
            let (Some(c12_3), Some(c1_23)) =
                (cc.get(&(b1.add(b2), b3.clone())), cc.get(&(b1.clone(), b2.add(b3))))
            else {
                continue;
            };
            triples += 1;
            if (c12 * c12_3) != (c1_23 * c23) {
                return Ok(CocycleReport {
                    pairs: cc.len(),
                    triples,
                    excluded_pairs: excluded.len(),
                    holds: false,
                    witness: Some(format!("cocycle identity fails on cosets ({b1}, {b2}, {b3})")),
                });
            }
        }
    }
    Ok(CocycleReport { pairs: cc.len(), triples, excluded_pairs: excluded.len(), holds: true, witness: None })
}

/// Candidate α: vectors with entries in {−1, 0, 1} and a leading 1, fewest
/// nonzero entries first.
fn alpha_candidates(rank: usize) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let total = 3usize.pow(rank as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..rank)
            .map(|_| {
                let d = (c % 3) as i64;
                c /= 3;
                [0, 1, -1][d as usize]
            })
            .collect();
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(LatticePoint(v));
        }
    }
    out.sort_by_key(|p| (p.0.iter().filter(|&&x| x != 0).count(), p.0.iter().map(|&x| (x == 0, x < 0)).collect::<Vec<_>>()));
    out
}

fn choose_alpha(s: &ScalarStructure, b: &LatticeBox) -> Option<LatticePoint> {
    alpha_candidates(s.rank()).into_iter().find(|a| {
        let na = a.neg();
        b.contains(&s.group, a)
            && s.in_support(a)
            && s.in_support(&na)
            && !s.l(a).is_zero()
            && s.defined(a, &na)
            && !s.c(a, &na).is_zero()
    })
}

fn inconclusive(reason: impl Into<String>, b: &LatticeBox) -> Classification {
    Classification::Inconclusive { reason: reason.into(), radius: b.radius }
}

fn classify_additive(s: &ScalarStructure, b: &LatticeBox) -> Classification {
    if !s.group.is_free() {
        return inconclusive("additive l on a grading group with torsion", b);
    }
    let Some(alpha) = choose_alpha(s, b) else {
        return inconclusive("no α with l(α) ≠ 0 and c(α, −α) ≠ 0 among the small primitive vectors", b);
    };
    let run = || -> Result<Classification> {
        let a = analyse(s, &alpha, b)?;
        let pi = recover_embedding(s, &alpha, b, &a.dfun)?;
        let cocycle = quasi_cocycle(&a, &pi)?;
        if !cocycle.holds {
            return Ok(inconclusive(
                format!("quasi-cocycle check failed: {}", cocycle.witness.clone().unwrap_or_default()),
                b,
            ));
        }
        let target = construct(&CatalogName::WPi { pi: pi.clone() })?;
        let Some(witness) = diagonal_equivalence(s, &target, b)? else {
            return Ok(inconclusive("no diagonal rescaling onto the recovered W_π", b));
        };
        let kernel = pi_kernel(&pi)?;
        let l_alpha = s.l(&alpha);
        Ok(Classification::NonIntegrable {
            imprimitive: !kernel.is_empty(),
            kernel,
            alpha: alpha.clone(),
            l_alpha: l_alpha.clone(),
            degree_function: a.dfun,
            cocycle,
            normalization: Normalization {
                alpha: alpha.clone(),
                l_alpha,
                pi_alpha: [Scalar::one(), Scalar::zero()],
                module_basis: "lowest in-box vector of each coset window ↦ u^δ_x with coefficient 1".into(),
            },
            pi,
            witness,
            radius: b.radius,
        })
    };
    run().unwrap_or_else(|e| inconclusive(e.to_string(), b))
}

/// All generator-image tuples into ℤ/m that respect the source torsion and
/// generate ℤ/m, in lexicographic order.
fn surjections(source: &GradingGroup, m: u64) -> Vec<Vec<LatticePoint>> {
    let target = GradingGroup::cyclic(m);
    let r = source.rank();
    let mut out = Vec::new();
    let total = (m as usize).pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let imgs: Vec<LatticePoint> = (0..r)
            .map(|_| {
                let d = (c % m as usize) as i64;
                c /= m as usize;
                LatticePoint(vec![d])
            })
            .collect();
        let well_defined = imgs
            .iter()
            .zip(&source.moduli)
            .all(|(img, &k)| k == 0 || (img.0[0] * k as i64).rem_euclid(m as i64) == 0);
        if well_defined && generates_group(&target, &imgs) {
            out.push(imgs);
        }
    }
    out
}

/// Largest number of surjections tried in the integrable branch.
const MAX_SURJECTIONS: usize = 1 << 12;

fn classify_bounded(s: &ScalarStructure, b: &LatticeBox, n: i64) -> Classification {
    let (name, m) = match n {
        1 => (CatalogName::Sl2Gamma3, 3),
        2 => (CatalogName::Sl3Gamma8, 8),
        _ => return inconclusive(format!("bounded l of type {n}; only types 1 and 2 occur in class 𝒢"), b),
    };
    let finite = match construct(&name) {
        Ok(f) => f,
        Err(e) => return inconclusive(e.to_string(), b),
    };
    let maps = surjections(&s.group, m);
    if maps.len() > MAX_SURJECTIONS {
        return inconclusive(format!("{} candidate surjections exceed the search bound", maps.len()), b);
    }
    let found = maps.par_iter().find_map_first(|imgs| {
        let pb = pullback(&s.group, imgs, &finite).ok()?;
        let t = diagonal_equivalence(s, &pb, b).ok()??;
        Some((imgs.clone(), pb.provenance.clone(), t))
    });
    match found {
        Some((images, matched, witness)) => {
            Classification::Integrable { type_n: n, matched, images, witness, radius: b.radius }
        }
        None => inconclusive(format!("no pullback of {name} along a surjection onto ℤ/{m} matches"), b),
    }
}

/// Classify a structure on a box. Every definite answer carries a rescaling
/// witness; every failure is reported as `Inconclusive`.
pub fn classify(s: &ScalarStructure, b: &LatticeBox) -> Classification {
    let support = s.support_in(b);
    if !generates_group(&s.group, &support) {
        return inconclusive("the support in the box does not generate the grading group", b);
    }
    match analyze_l(s, b) {
        Err(e) => inconclusive(e.to_string(), b),
        Ok(AlternativeResult::Violation { witness, reason }) => inconclusive(
            format!(
                "{reason} (witness {})",
                witness.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            ),
            b,
        ),
        Ok(AlternativeResult::Bounded { n, .. }) => classify_bounded(s, b, n),
        Ok(AlternativeResult::Additive { l_hat }) => {
            if l_hat.images.iter().flatten().all(|x| x.is_zero()) {
                return inconclusive("l vanishes identically", b);
            }
            classify_additive(s, b)
        }
    }
}

/// The four possible rank-one sections ⊕_n ℒ_{nα}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionType {
    Witt,
    /// W⁺ ⋉ V⁺ with W⁺ = ⟨L_n : n ≥ −1⟩ and V⁺ = W/W⁺.
    WPlusVPlus,
    /// W⁻ ⋉ V⁻ with W⁻ = ⟨L_n : n ≤ 1⟩ and V⁻ = W/W⁻.
    WMinusVMinus,
    /// 𝔰𝔩(2) ⋉ (V⁺ ⊕ V⁻).
    Sl2VPlusVMinus,
}

impl SectionType {
    pub const ALL: [SectionType; 4] =
        [SectionType::Witt, SectionType::WPlusVPlus, SectionType::WMinusVMinus, SectionType::Sl2VPlusVMinus];

    /// Constant of the model: m − n, or 0 where the model bracket vanishes.
    pub fn model_coeff(&self, n: i64, m: i64) -> Scalar {
        let vanishes = match self {
            SectionType::Witt => false,
            SectionType::WPlusVPlus => plus_vanishes(n, m),
            SectionType::WMinusVMinus => plus_vanishes(-n, -m),
            SectionType::Sl2VPlusVMinus => {
                let (a, b) = (n.abs() <= 1, m.abs() <= 1);
                match (a, b) {
                    (true, true) => false,
                    (false, false) => true,
                    _ => (n + m).abs() <= 1,
                }
            }
        };
        if vanishes {
            Scalar::zero()
        } else {
            Scalar::from_int(m - n)
        }
    }
}

fn plus_vanishes(n: i64, m: i64) -> bool {
    let (a, b) = (n >= -1, m >= -1);
    match (a, b) {
        (true, true) => false,
        (false, false) => true,
        _ => n + m >= -1,
    }
}

/// The model algebra of a section type, graded by ℤ.
pub fn section_model(kind: SectionType) -> ScalarStructure {
    ScalarStructure::with_full_support(GradingGroup::free(1), Field::Q, format!("section_model({kind:?})"), move |a, b| {
        kind.model_coeff(a.0[0], b.0[0])
    })
}

/// Match the vanishing pattern of c(nα, mα) on the box against the four
/// models.
pub fn rank1_section_type(s: &ScalarStructure, alpha: &LatticePoint, b: &LatticeBox) -> Result<SectionType> {
    let na = alpha.neg();
    if s.l(alpha).is_zero() || !s.defined(alpha, &na) || s.c(alpha, &na).is_zero() {
        return Err(Error::InvalidParameter(format!("need l(α) ≠ 0 and c(α, −α) ≠ 0 at α = {alpha}")));
    }
    let k = section_radius(alpha, b);
    let section = alpha_section(s, alpha, k);
    let pattern: Vec<(i64, i64, bool)> = (-k..=k)
        .flat_map(|n| (-k..=k).map(move |m| (n, m)))
        .filter(|&(n, m)| {
            (n + m).abs() <= k
                && section.defined(&LatticePoint(vec![n]), &LatticePoint(vec![m]))
        })
        .map(|(n, m)| (n, m, !section.c(&LatticePoint(vec![n]), &LatticePoint(vec![m])).is_zero()))
        .collect();
    SectionType::ALL
        .into_iter()
        .find(|t| pattern.iter().all(|&(n, m, nz)| nz == !t.model_coeff(n, m).is_zero()))
        .ok_or_else(|| Error::TypeMismatch(format!("the {alpha}-section matches none of the four section types")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::imprimitive;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn witt_is_nonintegrable_with_trivial_pi() {
        let w = construct(&CatalogName::Witt).unwrap();
        match classify(&w, &LatticeBox::new(5)) {
            Classification::NonIntegrable { pi, kernel, .. } => {
                assert_eq!(pi.images, vec![vec![q("1"), q("0")]]);
                assert!(kernel.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wpi_degree_function() {
        // π(m, n) = (m, n·i): δ(λ) = −1 − π₂(λ) after normalization.
        let pi = AdditiveMap::pair(vec![[q("1"), q("0")], [q("0"), q("i")]]);
        let s = construct(&CatalogName::WPi { pi: pi.clone() }).unwrap();
        let b = LatticeBox::new(3);
        let alpha = LatticePoint(vec![1, 0]);
        let d = degree_function(&s, &alpha, &b).unwrap();
        assert_eq!(d.delta(&LatticePoint(vec![0, 0])), Some(q("-1")));
        assert_eq!(d.delta(&LatticePoint(vec![2, 1])), Some(q("-1-i")));
        let rec = recover_embedding(&s, &alpha, &b, &d).unwrap();
        assert_eq!(rec, pi);
    }

    #[test]
    fn imprimitive_has_kernel() {
        let w = construct(&CatalogName::Witt).unwrap();
        let s = imprimitive(&w, 1).unwrap();
        match classify(&s, &LatticeBox::new(3)) {
            Classification::NonIntegrable { kernel, imprimitive, .. } => {
                assert!(imprimitive);
                assert_eq!(kernel.len(), 1);
                assert_eq!(kernel[0].0[0], 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_algebras_are_integrable() {
        let a = construct(&CatalogName::A1_1).unwrap();
        match classify(&a, &LatticeBox::new(6)) {
            Classification::Integrable { type_n, matched, .. } => {
                assert_eq!(type_n, 1);
                assert_eq!(matched, "pullback(sl2_gamma3)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn section_types() {
        for t in SectionType::ALL {
            let m = section_model(t);
            let got = rank1_section_type(&m, &LatticePoint(vec![1]), &LatticeBox::new(6)).unwrap();
            assert_eq!(got, t);
        }
    }

    #[test]
    fn section_models_are_lie_algebras() {
        for t in SectionType::ALL {
            let m = section_model(t);
            assert!(crate::scalar_lie::check_jacobi(&m, &LatticeBox::new(5)).is_empty(), "{t:?}");
        }
    }
}
