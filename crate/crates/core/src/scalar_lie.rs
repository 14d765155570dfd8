//! Verification and structural analysis of scalar structures: Jacobi sweeps,
//! the l-function alternative, Σ/Π, the simplicity probe, centroid solves,
//! diagonal equivalence and reflections.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AdditiveMap, LatticeBox, LatticePoint};
use crate::matrix::{nullspace, solve, ExactMatrix};
use crate::scalar::Scalar;
use crate::structure::{GradedProduct, ScalarStructure};

/// A failed axiom on concrete degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// c(λ,μ) ≠ −c(μ,λ).
    Antisymmetry { lam: LatticePoint, mu: LatticePoint },
    /// Non-zero Jacobi residue.
    Jacobi { lam: LatticePoint, mu: LatticePoint, nu: LatticePoint, residue: Scalar },
    /// c(λ,μ) ≠ 0 but l(λ+μ) ≠ l(λ) + l(μ).
    Additivity { lam: LatticePoint, mu: LatticePoint },
}

/// Dense cache of c on B×B and on (2B)×B.
struct CoeffTable<'a> {
    s: &'a ScalarStructure,
    b: LatticeBox,
    b2: LatticeBox,
    pts: Vec<LatticePoint>,
    n: usize,
    inner: Vec<Option<Scalar>>,
    outer: Option<Vec<Option<Scalar>>>,
}

impl<'a> CoeffTable<'a> {
    fn new(s: &'a ScalarStructure, b: LatticeBox) -> Self {
        let pts = b.points(&s.group);
        let n = pts.len();
        let eval = |x: &LatticePoint, y: &LatticePoint| {
            if s.defined(x, y) {
                Some(s.c(x, y))
            } else {
                None
            }
        };
        let inner: Vec<Option<Scalar>> = (0..n * n)
            .into_par_iter()
            .map(|k| eval(&pts[k / n], &pts[k % n]))
            .collect();
        let b2 = LatticeBox::new(2 * b.radius);
        let n2 = b2.size(&s.group);
        let outer = if n2 * n <= 8_000_000 {
            let pts2 = b2.points(&s.group);
            Some(
                (0..n2 * n)
                    .into_par_iter()
                    .map(|k| eval(&pts2[k / n], &pts[k % n]))
                    .collect(),
            )
        } else {
            None
        };
        CoeffTable { s, b, b2, pts, n, inner, outer }
    }

    fn inner(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.inner[i * self.n + j].as_ref()
    }

    /// c(σ, p_j) for σ = p_a + p_b.
    fn outer(&self, sum: &LatticePoint, j: usize) -> Option<Scalar> {
        match &self.outer {
            Some(t) => {
                let k = self.b2.index_of(&self.s.group, &self.s.group.canonical(sum))?;
                t[k * self.n + j].clone()
            }
            None => {
                let q = &self.pts[j];
                if self.s.defined(sum, q) {
                    Some(self.s.c(sum, q))
                } else {
                    None
                }
            }
        }
    }
}

/// All antisymmetry and Jacobi violations among degrees of the box. Triples
/// whose partial sums leave the oracle's domain are skipped.
pub fn check_jacobi(s: &ScalarStructure, b: &LatticeBox) -> Vec<Violation> {
    let t = CoeffTable::new(s, *b);
    let n = t.n;
    let g = &s.group;
    let mut out: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let t = &t;
            (i..n).filter_map(move |j| {
                let (x, y) = (t.inner(i, j)?, t.inner(j, i)?);
                if x != &-y {
                    Some(Violation::Antisymmetry { lam: t.pts[i].clone(), mu: t.pts[j].clone() })
                } else {
                    None
                }
            })
        })
        .collect();
    let jac: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let t = &t;
            (i..n).flat_map(move |j| {
                (j..n).filter_map(move |k| {
                    let (l, m, v) = (&t.pts[i], &t.pts[j], &t.pts[k]);
                    let lm = g.add(l, m);
                    let mv = g.add(m, v);
                    let vl = g.add(v, l);
                    let term = |c1: Option<&Scalar>, sum: &LatticePoint, idx: usize| -> Option<Scalar> {
                        let c1 = c1?;
                        let c2 = t.outer(sum, idx)?;
                        Some(if c1.is_zero() { Scalar::zero() } else { c1 * &c2 })
                    };
                    let a = term(t.inner(i, j), &lm, k)?;
                    let b = term(t.inner(j, k), &mv, i)?;
                    let c = term(t.inner(k, i), &vl, j)?;
                    let r = &(&a + &b) + &c;
                    if r.is_zero() {
                        None
                    } else {
                        Some(Violation::Jacobi { lam: l.clone(), mu: m.clone(), nu: v.clone(), residue: r })
                    }
                })
            })
        })
        .collect();
    let _ = t.b;
    out.extend(jac);
    out
}

/// Additivity of l along nonzero brackets: c(λ,μ) ≠ 0 ⇒ l(λ+μ) = l(λ) + l(μ).
pub fn additivity_violations(s: &ScalarStructure, b: &LatticeBox) -> Vec<Violation> {
    let pts = s.support_in(b);
    let ls: Vec<Scalar> = pts.iter().map(|p| s.l(p)).collect();
    (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (pts, ls) = (&pts, &ls);
            (0..pts.len()).filter_map(move |j| {
                if !s.defined(&pts[i], &pts[j]) || s.c(&pts[i], &pts[j]).is_zero() {
                    return None;
                }
                let sum = s.group.add(&pts[i], &pts[j]);
                let zero = s.zero_point();
                if !s.defined(&zero, &sum) {
                    return None;
                }
                if s.l(&sum) != &ls[i] + &ls[j] {
                    Some(Violation::Additivity { lam: pts[i].clone(), mu: pts[j].clone() })
                } else {
                    None
                }
            })
        })
        .collect()
}

/// Outcome of the l-function alternative on a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum AlternativeResult {
    Additive { l_hat: AdditiveMap },
    Bounded { n: i64, a: Scalar },
    Violation { witness: Vec<LatticePoint>, reason: String },
}

/// Decide between additive and bounded l on the box.
pub fn analyze_l(s: &ScalarStructure, b: &LatticeBox) -> Result<AlternativeResult> {
    if b.radius < 2 {
        return Err(Error::Inconclusive(format!("box radius {} < 2 cannot decide the l-alternative", b.radius)));
    }
    let zero = s.zero_point();
    if !s.in_support(&zero) {
        return Err(Error::InvalidParameter("degree 0 is not in the support".into()));
    }
    let pts: Vec<LatticePoint> =
        s.support_in(b).into_iter().filter(|p| s.defined(&zero, p)).collect();
    let ls: Vec<Scalar> = pts.iter().map(|p| s.l(p)).collect();

    // Additivity: solve for generator images over the free coordinates
    // (torsion directions must carry l = 0 in characteristic zero).
    let free: Vec<usize> = (0..s.rank()).filter(|&i| s.group.moduli[i] == 0).collect();
    let m = ExactMatrix::from_rows(
        pts.iter().map(|p| free.iter().map(|&i| Scalar::from_int(p.0[i])).collect()).collect(),
    );
    let candidate = if free.is_empty() {
        if ls.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        }
    } else {
        solve(&m, &ls)
    };
    if let Some(x) = candidate {
        let mut images = vec![Scalar::zero(); s.rank()];
        for (k, &i) in free.iter().enumerate() {
            images[i] = x[k].clone();
        }
        return Ok(AlternativeResult::Additive { l_hat: AdditiveMap::scalar(images) });
    }

    // Bounded: value set exactly [−N, N]·a.
    let a = ls
        .iter()
        .filter(|x| !x.is_zero())
        .min_by(|x, y| x.norm().cmp(&y.norm()).then_with(|| y.is_positive_oriented().cmp(&x.is_positive_oriented())))
        .map(|x| if x.is_positive_oriented() { x.clone() } else { -x });
    if let Some(a) = a {
        let mut ks = std::collections::BTreeSet::new();
        let mut ok = true;
        for v in &ls {
            match (v / &a).to_i64() {
                Some(k) => {
                    ks.insert(k);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let n = ks.iter().map(|k| k.abs()).max().unwrap_or(0);
            if n > 0 && ks.len() as i64 == 2 * n + 1 {
                return Ok(AlternativeResult::Bounded { n, a });
            }
        }
    }

    // Neither: report a concrete witness.
    let idx: HashMap<&LatticePoint, usize> = pts.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let mut fallback = None;
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            let sum = s.group.add(p, q);
            let Some(&k) = idx.get(&sum) else { continue };
            if ls[k] != &ls[i] + &ls[j] {
                let w = vec![p.clone(), q.clone(), sum];
                if !s.c(p, q).is_zero() {
                    return Ok(AlternativeResult::Violation {
                        witness: w,
                        reason: "l(λ+μ) ≠ l(λ)+l(μ) although c(λ,μ) ≠ 0".into(),
                    });
                }
                fallback.get_or_insert(w);
            }
        }
    }
    Ok(AlternativeResult::Violation {
        witness: fallback.unwrap_or_default(),
        reason: "l is neither additive nor of the form [−N,N]·a on the box".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaPi {
    pub radius: i64,
    pub pi: Vec<LatticePoint>,
    pub sigma: Vec<LatticePoint>,
    /// Σ ∩ B = {λ ∈ B : l(λ) ≠ 0}.
    pub sigma_is_nonzero_l: bool,
}

pub fn sigma_pi(s: &ScalarStructure, b: &LatticeBox) -> SigmaPi {
    let pts = s.support_in(b);
    let zero = s.zero_point();
    let mut pi = Vec::new();
    let mut sigma = Vec::new();
    let mut nonzero_l = Vec::new();
    for p in &pts {
        let l = s.l(p);
        if !l.is_zero() {
            nonzero_l.push(p.clone());
        }
        let q = s.group.neg(p);
        if *p == zero || !s.in_support(&q) || !s.defined(p, &q) {
            continue;
        }
        if !s.c(p, &q).is_zero() {
            pi.push(p.clone());
            if !l.is_zero() {
                sigma.push(p.clone());
            }
        }
    }
    let sigma_is_nonzero_l = sigma == nonzero_l;
    SigmaPi { radius: b.radius, pi, sigma, sigma_is_nonzero_l }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub radius: i64,
    pub pairs_tested: usize,
    pub witnessed: usize,
    /// Pairs (λ, μ) with no in-box witness θ (inconclusive, not refutations).
    pub unwitnessed: Vec<(LatticePoint, LatticePoint)>,
}

/// Search θ with c(θ,λ) ≠ 0 and c(μ−θ−λ, θ+λ) ≠ 0 for sampled pairs.
/// `trials == 0` (or at least the number of pairs) sweeps every pair.
pub fn simplicity_probe(s: &ScalarStructure, b: &LatticeBox, trials: usize, seed: u64) -> SimplicityReport {
    let pts = s.support_in(b);
    let mut pairs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|i| (0..pts.len()).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    if trials > 0 && trials < pairs.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(trials);
        pairs.sort_unstable();
    }
    let g = &s.group;
    let found: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lam, mu) = (&pts[i], &pts[j]);
            pts.iter().any(|theta| {
                if !s.defined(theta, lam) || s.c(theta, lam).is_zero() {
                    return false;
                }
                let tl = g.add(theta, lam);
                let rest = g.canonical(&mu.sub(&tl));
                s.defined(&rest, &tl) && !s.c(&rest, &tl).is_zero()
            })
        })
        .collect();
    let unwitnessed: Vec<_> = pairs
        .iter()
        .zip(&found)
        .filter(|(_, f)| !**f)
        .map(|(&(i, j), _)| (pts[i].clone(), pts[j].clone()))
        .collect();
    SimplicityReport {
        radius: b.radius,
        pairs_tested: pairs.len(),
        witnessed: pairs.len() - unwitnessed.len(),
        unwitnessed,
    }
}

/// A homogeneous map ψ(L_λ) = ψ_λ L_{λ+μ}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentroidElement {
    pub degree: LatticePoint,
    pub coeffs: BTreeMap<LatticePoint, Scalar>,
}

impl CentroidElement {
    pub fn coeff(&self, p: &LatticePoint) -> Scalar {
        self.coeffs.get(p).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Composition ψ₁∘ψ₂ on the points where both are known.
    pub fn compose(&self, other: &CentroidElement, a: &dyn GradedProduct) -> CentroidElement {
        let g = a.group();
        let coeffs = other
            .coeffs
            .iter()
            .filter_map(|(p, c2)| {
                let q = g.add(p, &other.degree);
                self.coeffs.get(&q).map(|c1| (p.clone(), c1 * c2))
            })
            .collect();
        CentroidElement { degree: g.add(&self.degree, &other.degree), coeffs }
    }
}

/// Degree-μ maps commuting with all in-box left and right multiplications,
/// by one exact nullspace solve.
pub fn centroid_solve(a: &dyn GradedProduct, b: &LatticeBox, mu: &LatticePoint) -> Vec<CentroidElement> {
    let g = a.group();
    let pts: Vec<LatticePoint> = b.points(g).into_iter().filter(|p| a.in_support(p)).collect();
    let unknowns: Vec<LatticePoint> =
        pts.iter().filter(|p| a.in_support(&g.add(p, mu))).cloned().collect();
    let uidx: HashMap<&LatticePoint, usize> = unknowns.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let n = unknowns.len();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut push = |terms: Vec<(usize, Scalar)>| {
        if terms.iter().all(|(_, c)| c.is_zero()) {
            return;
        }
        let mut row = vec![Scalar::zero(); n];
        for (k, c) in terms {
            row[k] += &c;
        }
        if row.iter().any(|x| !x.is_zero()) {
            rows.push(row);
        }
    };
    for lam in &pts {
        for nu in &pts {
            let s = g.add(lam, nu);
            if !b.contains(g, &s) || !a.defined(lam, nu) {
                continue;
            }
            let c = a.product(lam, nu);
            let lm = g.add(lam, mu);
            let nm = g.add(nu, mu);
            // ψ(x·y) = ψ(x)·y:  c(λ,ν) ψ_{λ+ν} − c(λ+μ,ν) ψ_λ = 0
            // ψ(x·y) = x·ψ(y):  c(λ,ν) ψ_{λ+ν} − c(λ,ν+μ) ψ_ν = 0
            for (other, cc) in [
                (lam, if a.defined(&lm, nu) { Some(a.product(&lm, nu)) } else { None }),
                (nu, if a.defined(lam, &nm) { Some(a.product(lam, &nm)) } else { None }),
            ] {
                let Some(cc) = cc else { continue };
                let mut terms = Vec::new();
                if let Some(&k) = uidx.get(&s) {
                    terms.push((k, c.clone()));
                }
                if let Some(&k) = uidx.get(other) {
                    terms.push((k, -&cc));
                }
                push(terms);
            }
        }
    }
    let m = if rows.is_empty() { ExactMatrix::zeros(0, n) } else { ExactMatrix::from_rows(rows) };
    nullspace(&m)
        .into_iter()
        .map(|v| {
            let first = v.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Scalar::one);
            CentroidElement {
                degree: mu.clone(),
                coeffs: unknowns.iter().cloned().zip(v.iter().map(|x| x / &first)).collect(),
            }
        })
        .collect()
}

/// Whether ψ commutes with the in-box multiplications on a (shrunken) box.
pub fn is_centroid_element(a: &dyn GradedProduct, b: &LatticeBox, psi: &CentroidElement) -> bool {
    let g = a.group();
    let pts: Vec<LatticePoint> = b.points(g).into_iter().filter(|p| a.in_support(p)).collect();
    for lam in &pts {
        for nu in &pts {
            let s = g.add(lam, nu);
            if !b.contains(g, &s) {
                continue;
            }
            let lhs = &a.product(lam, nu) * &psi.coeff(&s);
            let rhs = &a.product(&g.add(lam, &psi.degree), nu) * &psi.coeff(lam);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// A diagonal rescaling t on the supported points of a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rescaling {
    pub radius: i64,
    /// Serialized as a list of `[point, t]` pairs (JSON keys must be strings).
    #[serde(with = "point_map")]
    pub values: BTreeMap<LatticePoint, Scalar>,
}

pub(crate) mod point_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::lattice::LatticePoint;
    use crate::scalar::Scalar;

    pub fn serialize<S: Serializer>(m: &BTreeMap<LatticePoint, Scalar>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(&LatticePoint, &Scalar)> = m.iter().collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<LatticePoint, Scalar>, D::Error> {
        Ok(Vec::<(LatticePoint, Scalar)>::deserialize(d)?.into_iter().collect())
    }
}

enum Stall {
    Determined(Vec<(usize, Scalar)>),
    Free(usize),
    Done,
}

/// Log-linear elimination on the relations t(i)·t(j)/t(k) = r among the
/// still-unknown values. Rows are kept in Hermite form over ℤ (extended-gcd
/// row operations only), so the right-hand sides stay in ℚ(i) and no
/// information is lost. Returns the values the relations determine, or else
/// an unknown that is a free variable of the system.
fn resolve_stall(t: &[Option<Scalar>], rels: &[([usize; 3], Scalar)], order: &[usize]) -> Stall {
    type Row = BTreeMap<usize, i64>;
    // a·x + b·y on sparse rows; None on overflow.
    fn comb(a: i64, x: &Row, b: i64, y: &Row) -> Option<Row> {
        let mut out = Row::new();
        for c in x.keys().chain(y.keys()) {
            if out.contains_key(c) {
                continue;
            }
            let u = a.checked_mul(*x.get(c).unwrap_or(&0))?;
            let v = b.checked_mul(*y.get(c).unwrap_or(&0))?;
            let w = u.checked_add(v)?;
            out.insert(*c, w);
        }
        out.retain(|_, v| *v != 0);
        Some(out)
    }
    let rhs_comb = |a: i64, x: &Scalar, b: i64, y: &Scalar| &x.powi(a) * &y.powi(b);
    // Columns in reverse search order: pivots take the leading columns, so
    // the free variables left over are the points nearest 0 (generators
    // first), which keeps gauge choices on a ℤ-basis whenever possible.
    let mut col = vec![0usize; t.len()];
    for (rank, &k) in order.iter().enumerate() {
        col[k] = order.len() - 1 - rank;
    }

    // Pivot rows keyed by their leading column, with positive leading entry.
    let mut pivots: BTreeMap<usize, (Row, Scalar)> = BTreeMap::new();
    'rows: for (ids, r) in rels {
        let mut row = Row::new();
        let mut rhs = r.clone();
        for (pos, &x) in ids.iter().enumerate() {
            let e = if pos == 2 { -1 } else { 1 };
            match &t[x] {
                Some(v) => rhs = &rhs * &v.powi(-e),
                None => *row.entry(col[x]).or_insert(0) += e,
            }
        }
        row.retain(|_, v| *v != 0);
        // Cheap probe: rows already in the span need no right-hand side work.
        {
            let mut probe = row.clone();
            while let Some((&c, &e)) = probe.iter().next() {
                match pivots.get(&c) {
                    Some((p, _)) if e % p[&c] == 0 => match comb(1, &probe, -(e / p[&c]), p) {
                        Some(next) => probe = next,
                        None => continue 'rows,
                    },
                    _ => break,
                }
            }
            if probe.is_empty() {
                continue;
            }
        }
        loop {
            let Some((&c, &e)) = row.iter().next() else { break };
            if e < 0 {
                row.values_mut().for_each(|v| *v = -*v);
                rhs = rhs.inv();
                continue;
            }
            let Some((p, prhs)) = pivots.remove(&c) else {
                pivots.insert(c, (row, rhs));
                break;
            };
            let d = p[&c];
            let ext = e.extended_gcd(&d);
            let (g, u, v) = (ext.gcd, ext.x, ext.y);
            let (Some(new_piv), Some(rest)) = (comb(u, &row, v, &p), comb(d / g, &row, -(e / g), &p)) else {
                pivots.insert(c, (p, prhs));
                continue 'rows;
            };
            let new_rhs = rhs_comb(u, &rhs, v, &prhs);
            rhs = rhs_comb(d / g, &rhs, -(e / g), &prhs);
            pivots.insert(c, (new_piv, new_rhs));
            row = rest;
        }
    }
    // Back-substitute exactly where the division is exact.
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    for &c in &cols {
        let (mut row, mut rhs) = pivots.remove(&c).unwrap();
        let others: Vec<usize> = row.keys().copied().filter(|&x| x != c).collect();
        for x in others {
            let Some((q, qrhs)) = pivots.get(&x) else { continue };
            let (e, d) = (row[&x], q[&x]);
            if e % d == 0 {
                if let Some(next) = comb(1, &row, -(e / d), q) {
                    rhs = rhs_comb(1, &rhs, -(e / d), qrhs);
                    row = next;
                }
            }
        }
        pivots.insert(c, (row, rhs));
    }
    let mut determined = Vec::new();
    for (&c, (row, rhs)) in &pivots {
        if row.len() == 1 {
            match rhs.nth_root(row[&c] as u32) {
                Some(v) => determined.push((order[order.len() - 1 - c], v)),
                None => return Stall::Done,
            }
        }
    }
    if !determined.is_empty() {
        return Stall::Determined(determined);
    }
    match order.iter().copied().find(|&k| t[k].is_none() && !pivots.contains_key(&col[k])) {
        Some(k) => Stall::Free(k),
        None => Stall::Done,
    }
}

/// Re-check c₁(λ,μ)·t(λ+μ) = t(λ)·t(μ)·c₂(λ,μ) on every in-box pair.
pub fn verify_rescaling(s1: &ScalarStructure, s2: &ScalarStructure, b: &LatticeBox, t: &Rescaling) -> bool {
    let pts = s1.support_in(b);
    if pts.iter().any(|p| t.values.get(p).is_none_or(|v| v.is_zero())) {
        return false;
    }
    let g = &s1.group;
    pts.par_iter().all(|p| {
        pts.iter().all(|q| {
            let sum = g.add(p, q);
            let Some(ts) = t.values.get(&sum) else { return true };
            if !s1.defined(p, q) || !s2.defined(p, q) {
                return true;
            }
            &s1.c(p, q) * ts == &(&t.values[p] * &t.values[q]) * &s2.c(p, q)
        })
    })
}

/// Find t with c₁(λ,μ) t(λ+μ) = t(λ) t(μ) c₂(λ,μ) on the box, i.e. an
/// isomorphism L_λ ↦ t(λ) L'_λ from S1 to S2.
///
/// t(0) is read off the l-ratio c₁(0,λ)/c₂(0,λ); the remaining values are
/// propagated breadth-first from 0. When propagation stalls, the relations
/// among the unknowns are put in Hermite form: values they determine are
/// filled in, and otherwise one free variable (a point as close to 0 as
/// possible) is gauge-fixed to 1. Any answer is re-verified on all pairs, so
/// the gauge choice cannot create false positives.
pub fn diagonal_equivalence(
    s1: &ScalarStructure,
    s2: &ScalarStructure,
    b: &LatticeBox,
) -> Result<Option<Rescaling>> {
    if s1.group != s2.group {
        return Err(Error::RankMismatch { expected: s1.rank(), got: s2.rank() });
    }
    let pts = s1.support_in(b);
    for p in b.points(&s1.group) {
        if s1.in_support(&p) != s2.in_support(&p) {
            return Err(Error::SupportMismatch(p.to_string()));
        }
    }
    let g = &s1.group;
    // BFS order from 0 along ± generators.
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by_key(|&k| {
        let p = &pts[k];
        (p.sup_norm(), p.0.iter().map(|x| x.abs()).sum::<i64>(), p.0.iter().map(|x| (x.abs(), *x < 0)).collect::<Vec<_>>())
    });
    let idx: HashMap<LatticePoint, usize> = pts.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();

    struct Rel {
        i: usize,
        j: usize,
        k: usize,
        c1: Scalar,
        c2: Scalar,
    }
    let mut rels: Vec<Rel> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate().skip(i) {
            let Some(&k) = idx.get(&g.add(p, q)) else { continue };
            if !s1.defined(p, q) || !s2.defined(p, q) {
                continue;
            }
            let (c1, c2) = (s1.c(p, q), s2.c(p, q));
            match (c1.is_zero(), c2.is_zero()) {
                (true, true) => {}
                (false, false) => rels.push(Rel { i, j, k, c1, c2 }),
                _ => return Ok(None),
            }
        }
    }
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for (r, rel) in rels.iter().enumerate() {
        for x in [rel.i, rel.j, rel.k] {
            if !by_point[x].contains(&r) {
                by_point[x].push(r);
            }
        }
    }
    let mut t: Vec<Option<Scalar>> = vec![None; pts.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let set = |t: &mut Vec<Option<Scalar>>, queue: &mut VecDeque<usize>, x: usize, v: Scalar| {
        t[x] = Some(v);
        queue.push_back(x);
    };
    if let Some(&z) = idx.get(&s1.zero_point()) {
        // c₁(0,λ) t(λ) = t(0) t(λ) c₂(0,λ)
        if let Some(rel) = rels.iter().find(|r| r.i == z || r.j == z) {
            set(&mut t, &mut queue, z, &rel.c1 / &rel.c2);
        }
    }
    loop {
        while let Some(x) = queue.pop_front() {
            for &r in &by_point[x] {
                let rel = &rels[r];
                let (i, j, k) = (rel.i, rel.j, rel.k);
                let unknown: Vec<usize> = {
                    let mut u: Vec<usize> = [i, j, k].into_iter().filter(|&y| t[y].is_none()).collect();
                    u.dedup();
                    u
                };
                if unknown.len() != 1 {
                    continue;
                }
                let y = unknown[0];
                // Count multiplicity of y in the left side t(i)·t(j).
                let mult = (i == y) as u8 + (j == y) as u8;
                let on_right = k == y;
                let v = match (mult, on_right) {
                    (0, true) => &(&(&rel.c2 * t[i].as_ref().unwrap()) * t[j].as_ref().unwrap()) / &rel.c1,
                    (1, false) => {
                        let other = if i == y { j } else { i };
                        &(&rel.c1 * t[k].as_ref().unwrap()) / &(&rel.c2 * t[other].as_ref().unwrap())
                    }
                    // (1, true) is a λ = 0 relation in which t(λ) cancels.
                    _ => continue,
                };
                if v.is_zero() {
                    return Ok(None);
                }
                set(&mut t, &mut queue, y, v);
            }
        }
        // Stalled: some values may still be pinned down by relations with
        // several unknowns; only a genuinely free value may be gauge-fixed.
        let known: Vec<Option<Scalar>> = t.clone();
        let triples: Vec<([usize; 3], Scalar)> = rels.iter().map(|r| ([r.i, r.j, r.k], &r.c1 / &r.c2)).collect();
        match resolve_stall(&known, &triples, &order) {
            Stall::Determined(vals) => {
                for (y, v) in vals {
                    if v.is_zero() {
                        return Ok(None);
                    }
                    set(&mut t, &mut queue, y, v);
                }
            }
            Stall::Free(y) => set(&mut t, &mut queue, y, Scalar::one()),
            Stall::Done => break,
        }
    }
    if t.iter().any(|x| x.is_none()) {
        return Ok(None);
    }
    let resc = Rescaling {
        radius: b.radius,
        values: pts.iter().cloned().zip(t.into_iter().map(|x| x.unwrap())).collect(),
    };
    Ok(if verify_rescaling(s1, s2, b, &resc) { Some(resc) } else { None })
}

/// A graded automorphism of a finite-support structure, as a matrix on the
/// basis `basis` (columns are images of basis vectors).
#[derive(Clone, Debug)]
pub struct GradedAutomorphism {
    pub basis: Vec<LatticePoint>,
    pub matrix: ExactMatrix,
}

impl GradedAutomorphism {
    pub fn image(&self, p: &LatticePoint) -> Vec<(LatticePoint, Scalar)> {
        let Some(j) = self.basis.iter().position(|q| q == p) else { return vec![] };
        (0..self.basis.len())
            .filter(|&i| !self.matrix.get(i, j).is_zero())
            .map(|i| (self.basis[i].clone(), self.matrix.get(i, j).clone()))
            .collect()
    }

    pub fn compose(&self, other: &GradedAutomorphism) -> GradedAutomorphism {
        GradedAutomorphism { basis: self.basis.clone(), matrix: self.matrix.mul(&other.matrix) }
    }

    /// Check s([x,y]) = [s x, s y] on all basis pairs.
    pub fn is_automorphism(&self, s: &ScalarStructure) -> bool {
        let n = self.basis.len();
        let idx: HashMap<&LatticePoint, usize> = self.basis.iter().enumerate().map(|(k, p)| (p, k)).collect();
        let bracket = |u: &[Scalar], v: &[Scalar]| -> Vec<Scalar> {
            let mut out = vec![Scalar::zero(); n];
            for a in 0..n {
                if u[a].is_zero() {
                    continue;
                }
                for b in 0..n {
                    if v[b].is_zero() {
                        continue;
                    }
                    let c = s.c(&self.basis[a], &self.basis[b]);
                    if c.is_zero() {
                        continue;
                    }
                    let k = idx[&s.group.add(&self.basis[a], &self.basis[b])];
                    out[k] += &(&(&u[a] * &v[b]) * &c);
                }
            }
            out
        };
        for a in 0..n {
            for b in 0..n {
                let mut e = vec![Scalar::zero(); n];
                let c = s.c(&self.basis[a], &self.basis[b]);
                if !c.is_zero() {
                    e[idx[&s.group.add(&self.basis[a], &self.basis[b])]] = c;
                }
                let lhs = self.matrix.mul_vec(&e);
                let rhs = bracket(&self.matrix.column(a), &self.matrix.column(b));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

fn ad_matrix(s: &ScalarStructure, basis: &[LatticePoint], x: &LatticePoint, scale: &Scalar) -> ExactMatrix {
    let n = basis.len();
    let idx: HashMap<&LatticePoint, usize> = basis.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let mut m = ExactMatrix::zeros(n, n);
    for (j, p) in basis.iter().enumerate() {
        let c = s.c(x, p);
        if !c.is_zero() {
            m.set(idx[&s.group.add(x, p)], j, &c * scale);
        }
    }
    m
}

fn exp_nilpotent(a: &ExactMatrix) -> Result<ExactMatrix> {
    let n = a.rows;
    let mut acc = ExactMatrix::identity(n);
    let mut term = ExactMatrix::identity(n);
    for k in 1..=n + 1 {
        term = term.mul(a).scale(&Scalar::ratio(1, k as i64));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&term);
    }
    Err(Error::NotNilpotent(n + 1))
}

/// s_β = exp(−ad e)∘exp(ad f)∘exp(−ad e), with e = L_β and f the multiple of
/// L_{−β} normalized by [e, f] = 2 L₀ / l(β).
pub fn reflection(s: &ScalarStructure, beta: &LatticePoint) -> Result<GradedAutomorphism> {
    if s.group.moduli.contains(&0) {
        return Err(Error::InvalidParameter("reflection needs a finite grading group".into()));
    }
    let basis = s.support_in(&LatticeBox::new(0));
    let beta = s.group.canonical(beta);
    let mbeta = s.group.neg(&beta);
    let l = s.l(&beta);
    let h = s.c(&beta, &mbeta);
    if l.is_zero() || h.is_zero() {
        return Err(Error::InvalidParameter(format!("{beta} is not in Σ")));
    }
    let kappa = &Scalar::from_int(2) / &(&l * &h);
    let ade = ad_matrix(s, &basis, &beta, &Scalar::one());
    let adf = ad_matrix(s, &basis, &mbeta, &kappa);
    let e_minus = exp_nilpotent(&ade.scale(&Scalar::from_int(-1)))?;
    let f_plus = exp_nilpotent(&adf)?;
    let matrix = e_minus.mul(&f_plus).mul(&e_minus);
    Ok(GradedAutomorphism { basis, matrix })
}

/// t_{α,β} = s_α s_β s_α s_β.
pub fn t_alpha_beta(s: &ScalarStructure, alpha: &LatticePoint, beta: &LatticePoint) -> Result<GradedAutomorphism> {
    let sa = reflection(s, alpha)?;
    let sb = reflection(s, beta)?;
    Ok(sa.compose(&sb).compose(&sa).compose(&sb))
}
