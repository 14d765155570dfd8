//! Local Lie algebras (W, V⁺, V⁻, pairing) built from tensor density modules,
//! and the levels of the minimal graded Lie algebra ℒ^min they generate.
//!
//! Elements of level n ≥ 1 are right-normed words [v⁺_{j₁}, [v⁺_{j₂}, … v⁺_{jₙ}]]
//! (indices are offsets: v⁺_j has L₀-eigenvalue s₊ + j). V⁻ acts on words as a
//! derivation through the pairing, W acts leafwise. In ℒ^min a level-n element
//! vanishes exactly when every iterated bracket with n−1 elements of V⁻ does
//! (R₁ = 0 and R_{n+1} = {z : [V⁻, z] ⊂ R_n}), so the level is the row space of
//! the "signature" matrix of these brackets. Spanning words and test
//! sequences are truncated to indices in [−J, J]; truncation can only lower a
//! rank, so each dimension is also recomputed with J − 1 and flagged unstable
//! when the two disagree.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{echelon, solve, ExactMatrix};
use crate::scalar::Scalar;
use crate::symbols::{ActionWindow, DensityModule};

type Word = Vec<i64>;
type Elem = HashMap<Word, Scalar>;

fn push(e: &mut Elem, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match e.get_mut(&w) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                e.remove(&w);
            }
        }
        None => {
            e.insert(w, c);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    /// [v⁻_y, v⁺_x] = κ·L_{x+y} with κ constant (the commutative product into Ω^{−1}).
    Product,
    /// [v⁻_y, v⁺_x] = κ·(δ₊·y − δ₋·x)·L_{x+y} (the symbol Poisson bracket).
    Bracket,
}

impl std::str::FromStr for PairingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(PairingKind::Product),
            "bracket" => Ok(PairingKind::Bracket),
            _ => Err(Error::Parse(format!("unknown pairing `{s}` (expected product or bracket)"))),
        }
    }
}

/// (W, V⁺ = Ω^{δ₊}_{s₊}, V⁻ = Ω^{δ₋}_{s₋}, pairing) with s₊ + s₋ ∈ ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalAlgebra {
    pub plus: DensityModule,
    pub minus: DensityModule,
    pub pairing: PairingKind,
    pub scale: Scalar,
}

impl LocalAlgebra {
    pub fn new(plus: DensityModule, minus: DensityModule, pairing: PairingKind) -> Result<Self> {
        let la = LocalAlgebra { plus, minus, pairing, scale: Scalar::one() };
        la.sigma()?;
        Ok(la)
    }

    /// (W, Ω^{−δ}_s, Ω^{δ−1}_{−s}, product): the one-parameter family whose
    /// level-3 dimensions single out δ ∈ {−1, 2}.
    pub fn product_family(delta: &Scalar, s: &Scalar) -> Result<Self> {
        Self::new(
            DensityModule { delta: -delta, s: s.clone() },
            DensityModule { delta: delta - &Scalar::one(), s: -s },
            PairingKind::Product,
        )
    }

    /// (W, Ω^δ_s, Ω^{−2−δ}_{−s}, Poisson bracket): a slice of the symbol algebra.
    pub fn bracket_slice(delta: &Scalar, s: &Scalar) -> Result<Self> {
        Self::new(
            DensityModule { delta: delta.clone(), s: s.clone() },
            DensityModule { delta: &Scalar::from_int(-2) - delta, s: -s },
            PairingKind::Bracket,
        )
    }

    /// Pairing multiplied by k (k = 0 gives the degenerate local algebra).
    pub fn scaled(mut self, k: Scalar) -> Self {
        self.scale = &self.scale * &k;
        self
    }

    /// The opposite local algebra (V⁻, V⁺): [v′⁻, v′⁺] = [v⁺, v⁻] = −[v⁻, v⁺].
    /// For the bracket pairing the sign is absorbed by swapping δ₊ and δ₋.
    pub fn opposite(&self) -> Self {
        let scale = match self.pairing {
            PairingKind::Product => -&self.scale,
            PairingKind::Bracket => self.scale.clone(),
        };
        LocalAlgebra { plus: self.minus.clone(), minus: self.plus.clone(), pairing: self.pairing, scale }
    }

    /// s₊ + s₋ as an integer.
    pub fn sigma(&self) -> Result<i64> {
        (&self.plus.s + &self.minus.s)
            .to_i64()
            .ok_or_else(|| Error::InvalidParameter("s₊ + s₋ must be an integer".into()))
    }

    fn xp(&self, j: i64) -> Scalar {
        &self.plus.s + &Scalar::from_int(j)
    }

    fn xm(&self, y: i64) -> Scalar {
        &self.minus.s + &Scalar::from_int(y)
    }

    /// [v⁻_y, v⁺_j] = kappa(j, y)·L_{σ+j+y}.
    pub fn kappa(&self, j: i64, y: i64) -> Scalar {
        match self.pairing {
            PairingKind::Product => self.scale.clone(),
            PairingKind::Bracket => {
                let v = &(&self.plus.delta * &self.xm(y)) - &(&self.minus.delta * &self.xp(j));
                &self.scale * &v
            }
        }
    }

    /// Violations of W-equivariance of the pairing,
    /// (m−n)κ(j,y) = (x⁻_y + nδ₋)κ(j,y+n) + (x⁺_j + nδ₊)κ(j+n,y), on a window.
    pub fn equivariance_violations(&self, radius: i64) -> Vec<(i64, i64, i64)> {
        let sigma = self.sigma().unwrap_or(0);
        let mut out = Vec::new();
        for n in -radius..=radius {
            for j in -radius..=radius {
                for y in -radius..=radius {
                    let m = sigma + j + y;
                    let ns = Scalar::from_int(n);
                    let lhs = &self.kappa(j, y) * &Scalar::from_int(m - n);
                    let r1 = &(&self.xm(y) + &(&ns * &self.minus.delta)) * &self.kappa(j, y + n);
                    let r2 = &(&self.xp(j) + &(&ns * &self.plus.delta)) * &self.kappa(j + n, y);
                    if lhs != &r1 + &r2 {
                        out.push((n, j, y));
                    }
                }
            }
        }
        out
    }

    /// [L_m, word]: W acts on each leaf by the density action of V⁺.
    fn act_w(&self, m: i64, w: &[i64]) -> Vec<(Word, Scalar)> {
        let ms = Scalar::from_int(m);
        (0..w.len())
            .filter_map(|i| {
                let c = &self.xp(w[i]) + &(&ms * &self.plus.delta);
                if c.is_zero() {
                    return None;
                }
                let mut v = w.to_vec();
                v[i] += m;
                Some((v, c))
            })
            .collect()
    }

    /// [v⁻_y, word] for a word of length ≥ 2.
    fn ad_minus_word(&self, y: i64, w: &[i64], out: &mut Elem, k: &Scalar) {
        let sigma = self.sigma().expect("checked on construction");
        let a = w[0];
        let ka = self.kappa(a, y);
        if !ka.is_zero() {
            for (v, c) in self.act_w(sigma + a + y, &w[1..]) {
                push(out, v, &(&ka * &c) * k);
            }
        }
        if w.len() == 2 {
            let b = w[1];
            let kb = self.kappa(b, y);
            if !kb.is_zero() {
                for (v, c) in self.act_w(sigma + b + y, &[a]) {
                    push(out, v, -(&(&kb * &c) * k));
                }
            }
        } else {
            let mut inner = Elem::new();
            self.ad_minus_word(y, &w[1..], &mut inner, k);
            for (mut v, c) in inner {
                v.insert(0, a);
                push(out, v, c);
            }
        }
    }

    fn ad_minus(&self, y: i64, e: &Elem) -> Elem {
        let mut out = Elem::new();
        for (w, c) in e {
            self.ad_minus_word(y, w, &mut out, c);
        }
        out
    }

    /// Coefficients of all iterated brackets [v⁻_{y_{n−1}}, … [v⁻_{y₁}, e]] with
    /// y in [−J, J] for a level-n element e: a vector of length (2J+1)^{n−1}.
    fn signature(&self, e: &Elem, n: usize, j: i64) -> Vec<Scalar> {
        let mut out = Vec::with_capacity((2 * j as usize + 1).pow(n as u32 - 1));
        self.signature_into(e, n, j, &mut out);
        out
    }

    fn signature_into(&self, e: &Elem, n: usize, j: i64, out: &mut Vec<Scalar>) {
        if n == 1 {
            out.push(e.values().fold(Scalar::zero(), |acc, c| &acc + c));
            return;
        }
        for y in -j..=j {
            let next = self.ad_minus(y, e);
            self.signature_into(&next, n - 1, j, out);
        }
    }
}

/// Words of length n with letters in [−J, J] summing to d (first letter below
/// the second for n = 2, by antisymmetry).
fn words(n: usize, d: i64, j: i64) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, d: i64, j: i64, cur: &mut Vec<i64>, out: &mut Vec<Word>) {
        if cur.len() + 1 == n {
            if d.abs() <= j {
                cur.push(d);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for a in -j..=j {
            cur.push(a);
            rec(n, d - a, j, cur, out);
            cur.pop();
        }
    }
    rec(n, d, j, &mut cur, &mut out);
    if n == 2 {
        out.retain(|w| w[0] < w[1]);
    }
    out
}

/// One graded piece (L^min_n)_d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeData {
    /// Offset d: the L₀-eigenvalue is x = n·s₊ + d.
    pub degree: i64,
    pub x: Scalar,
    pub dim: usize,
    /// The dimension agrees with the one computed on the window shrunk by 1.
    pub stable: bool,
    pub interior: bool,
    /// Words whose classes form a basis.
    pub basis: Vec<Word>,
    #[serde(skip)]
    signatures: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelData {
    pub level: i64,
    /// Interior degrees are |d| ≤ `interior`.
    pub interior: i64,
    pub degrees: Vec<DegreeData>,
}

impl LevelData {
    pub fn degree(&self, d: i64) -> Option<&DegreeData> {
        self.degrees.iter().find(|x| x.degree == d)
    }

    pub fn interior_degrees(&self) -> impl Iterator<Item = &DegreeData> {
        self.degrees.iter().filter(|x| x.interior)
    }

    /// Largest dimension over interior degrees.
    pub fn max_interior_dim(&self) -> usize {
        self.interior_degrees().map(|d| d.dim).max().unwrap_or(0)
    }
}

fn rank_and_basis(la: &LocalAlgebra, ws: &[Word], j: i64) -> (Vec<usize>, Vec<Vec<Scalar>>) {
    let sigs: Vec<Vec<Scalar>> = ws
        .iter()
        .map(|w| {
            let mut e = Elem::new();
            e.insert(w.clone(), Scalar::one());
            la.signature(&e, w.len(), j)
        })
        .collect();
    if sigs.is_empty() {
        return (vec![], vec![]);
    }
    let m = ExactMatrix::from_rows(sigs.clone());
    let ech = echelon(&m);
    let mut rows = ech.source_rows.clone();
    rows.sort_unstable();
    (rows, sigs)
}

/// Levels 2..=max_level of ℒ^min on the window J = window/2; degrees with
/// |d| ≤ J/2 are interior, and two extra degrees on each side are computed so
/// that L_{±1}, L_{±2} actions out of interior degrees can be expressed.
pub fn lmin_build(la: &LocalAlgebra, max_level: usize, window: i64) -> Result<Vec<LevelData>> {
    if max_level < 2 {
        return Err(Error::InvalidParameter("max level must be at least 2".into()));
    }
    let j = window / 2;
    if j < max_level as i64 || j < 2 {
        return Err(Error::WindowExhausted(format!(
            "window {window} is too narrow for level {max_level} (need at least {})",
            2 * max_level.max(2)
        )));
    }
    let interior = j / 2;
    let mut levels = Vec::new();
    for n in 2..=max_level {
        let degs: Vec<i64> = (-(interior + 2)..=interior + 2).collect();
        let degrees: Vec<DegreeData> = degs
            .par_iter()
            .map(|&d| {
                let ws = words(n, d, j);
                let (rows, sigs) = rank_and_basis(la, &ws, j);
                let small = rank_and_basis(la, &words(n, d, j - 1), j - 1).0.len();
                DegreeData {
                    degree: d,
                    x: &(&Scalar::from_int(n as i64) * &la.plus.s) + &Scalar::from_int(d),
                    dim: rows.len(),
                    stable: small == rows.len(),
                    interior: d.abs() <= interior,
                    basis: rows.iter().map(|&r| ws[r].clone()).collect(),
                    signatures: rows.iter().map(|&r| sigs[r].clone()).collect(),
                }
            })
            .collect();
        levels.push(LevelData { level: n as i64, interior, degrees });
    }
    Ok(levels)
}

/// Coordinates of L_m·(basis word `k` of `from`) in the basis of `to`
/// (`to` has degree from.degree + m). `None` when the image leaves the span.
fn w_action_coords(la: &LocalAlgebra, from: &DegreeData, k: usize, m: i64, to: &DegreeData, j: i64) -> Option<Vec<Scalar>> {
    let mut e = Elem::new();
    for (w, c) in la.act_w(m, &from.basis[k]) {
        push(&mut e, w, c);
    }
    let sig = la.signature(&e, from.basis[k].len(), j);
    if to.dim == 0 {
        return sig.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let cols = ExactMatrix::from_rows(to.signatures.clone()).transpose();
    solve(&cols, &sig)
}

/// The action window L_n·v_k (n ∈ [−2, 2]) of a level whose interior
/// degrees are all one-dimensional; `None` otherwise.
pub fn level_window(la: &LocalAlgebra, level: &LevelData, window: i64) -> Option<ActionWindow> {
    let j = window / 2;
    let inner: Vec<&DegreeData> = level.interior_degrees().collect();
    if inner.iter().any(|d| d.dim != 1) {
        return None;
    }
    let first = inner.first()?;
    let mut w = ActionWindow::new(first.x.clone(), inner.len());
    for (k, d) in inner.iter().enumerate() {
        for m in -2..=2i64 {
            let t = k as i64 + m;
            if t < 0 || t >= inner.len() as i64 {
                continue;
            }
            let coords = w_action_coords(la, d, 0, m, inner[t as usize], j)?;
            w.set(m, k as i64, coords[0].clone());
        }
    }
    Some(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    /// Per level: every interior degree is one-dimensional and L_{±1} connect
    /// consecutive interior degrees (no proper invariant graded subspace).
    pub simple_levels: Vec<(i64, bool)>,
    /// (level, degree) pairs of dimension > 1.
    pub multidimensional: Vec<(i64, i64)>,
    /// Levels n with [L₁, L_n] = 0 on the interior.
    pub zero_brackets: Vec<i64>,
    pub holds: bool,
}

/// Sufficient conditions for the computed levels to be those of a minimal
/// algebra: simple one-dimensional levels and no vanishing [L₁, L_n].
pub fn minimality_check(la: &LocalAlgebra, levels: &[LevelData], window: i64) -> MinimalityReport {
    let j = window / 2;
    let mut simple_levels = Vec::new();
    let mut multidimensional = Vec::new();
    let mut zero_brackets = Vec::new();
    // Level 1 is V⁺ itself.
    let v_simple = {
        let interior = levels.first().map(|l| l.interior).unwrap_or(j / 2);
        (-interior..interior).all(|d| {
            let x = la.xp(d);
            let up = &x + &la.plus.delta;
            let down = &(&x + &Scalar::one()) - &la.plus.delta;
            !up.is_zero() && !down.is_zero()
        })
    };
    simple_levels.push((1, v_simple));
    let mut prev_nonzero = true;
    for level in levels {
        let inner: Vec<&DegreeData> = level.interior_degrees().collect();
        for d in &inner {
            if d.dim > 1 {
                multidimensional.push((level.level, d.degree));
            }
        }
        let nonzero = inner.iter().any(|d| d.dim > 0);
        if prev_nonzero && !nonzero {
            zero_brackets.push(level.level - 1);
        }
        prev_nonzero = nonzero;
        let simple = nonzero
            && inner.iter().all(|d| d.dim == 1)
            && inner.windows(2).all(|p| {
                let up = w_action_coords(la, p[0], 0, 1, p[1], j);
                let down = w_action_coords(la, p[1], 0, -1, p[0], j);
                matches!((up, down), (Some(u), Some(d)) if !u[0].is_zero() && !d[0].is_zero())
            });
        simple_levels.push((level.level, simple));
    }
    let holds = simple_levels.iter().all(|s| s.1) && multidimensional.is_empty() && zero_brackets.is_empty();
    MinimalityReport { simple_levels, multidimensional, zero_brackets, holds }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma66Row {
    pub delta: Scalar,
    /// Largest interior dimension of level 3.
    pub plus: usize,
    /// Largest interior dimension of level −3 (level 3 of the opposite algebra).
    pub minus: usize,
    /// max(plus, minus): 1 exactly for δ ∈ {−1, 2}.
    pub dim: usize,
    /// Every reported dimension was stable under shrinking the window.
    pub stable: bool,
}

/// For each δ, the level-±3 interior dimensions of ℒ^min for
/// (W, Ω^{−δ}_s, Ω^{δ−1}_{−s}, product).
pub fn lemma66_table(deltas: &[Scalar], s: &Scalar, window: i64) -> Result<Vec<Lemma66Row>> {
    deltas
        .iter()
        .map(|delta| {
            let la = LocalAlgebra::product_family(delta, s)?;
            let up = lmin_build(&la, 3, window)?;
            let down = lmin_build(&la.opposite(), 3, window)?;
            let stable = up.iter().chain(&down).all(|l| l.interior_degrees().all(|d| d.stable));
            let plus = up[1].max_interior_dim();
            let minus = down[1].max_interior_dim();
            Ok(Lemma66Row { delta: delta.clone(), plus, minus, dim: plus.max(minus), stable })
        })
        .collect()
}

/// B₁(h, f⊗g) = [[h,f],g] + [f,[h,g]] computed from the local algebra equals
/// (1+δ)·h(fg′ − f′g)∂^δ for h = v⁻_y, f = v⁺_a, g = v⁺_b on the window.
pub fn b1_closed_form_holds(delta: &Scalar, s: &Scalar, radius: i64) -> Result<bool> {
    let la = LocalAlgebra::product_family(delta, s)?;
    let sigma = la.sigma()?;
    let one = Scalar::one();
    for y in -radius..=radius {
        for a in -radius..=radius {
            for b in -radius..=radius {
                let mut e = Elem::new();
                e.insert(vec![a, b], one.clone());
                let got = la.ad_minus(y, &e);
                let target = vec![a + b + y + sigma];
                let expect = &(&one + delta) * &(&la.xp(b) - &la.xp(a));
                let val = got.get(&target).cloned().unwrap_or_else(Scalar::zero);
                if got.len() > 1 || val != expect {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{module_recognize, DensityModuleSpec};

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn pairings_are_equivariant() {
        for d in ["0", "1/3", "2", "-1"] {
            let la = LocalAlgebra::product_family(&q(d), &q("1/4")).unwrap();
            assert!(la.equivariance_violations(3).is_empty());
            assert!(la.opposite().equivariance_violations(3).is_empty());
            let lb = LocalAlgebra::bracket_slice(&q(d), &q("1/4")).unwrap();
            assert!(lb.equivariance_violations(3).is_empty());
            assert!(lb.opposite().equivariance_violations(3).is_empty());
        }
    }

    #[test]
    fn b1_matches_closed_form() {
        for d in ["0", "1/3", "2", "-1", "5/2"] {
            assert!(b1_closed_form_holds(&q(d), &q("0"), 3).unwrap());
        }
    }

    #[test]
    fn words_enumeration() {
        assert_eq!(words(2, 0, 1), vec![vec![-1, 1]]);
        assert_eq!(words(3, 3, 1), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn bracket_slice_levels_are_densities() {
        let la = LocalAlgebra::bracket_slice(&q("1/3"), &q("0")).unwrap();
        let levels = lmin_build(&la, 3, 8).unwrap();
        for l in &levels {
            for d in l.interior_degrees() {
                assert_eq!(d.dim, 1, "level {} degree {}", l.level, d.degree);
            }
        }
        // Level 2 is Ω^{2δ+1}.
        let w = level_window(&la, &levels[0], 8).unwrap();
        match module_recognize(&w).unwrap() {
            DensityModuleSpec::Density { delta, .. } => assert_eq!(delta, q("5/3")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(minimality_check(&la, &levels, 8).holds);
    }

    #[test]
    fn level_three_dimensions() {
        let ds: Vec<Scalar> = ["-1", "2", "0", "1", "3", "1/3"].iter().map(|s| q(s)).collect();
        let rows = lemma66_table(&ds, &q("1/5"), 8).unwrap();
        let dims: Vec<usize> = rows.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 1, 2, 2, 2, 2]);
        assert!(rows.iter().all(|r| r.stable));
        // δ = −1 kills B₁, so the positive side already dies at level 2.
        assert_eq!((rows[0].plus, rows[0].minus), (0, 1));
    }

    #[test]
    fn zero_pairing_is_flagged() {
        let la = LocalAlgebra::product_family(&q("1/3"), &q("0")).unwrap().scaled(Scalar::zero());
        let levels = lmin_build(&la, 2, 6).unwrap();
        let r = minimality_check(&la, &levels, 6);
        assert!(!r.holds);
        assert_eq!(r.zero_brackets, vec![1]);
    }
}

