//! Symbols of twisted pseudo-differential operators and the W-modules built
//! from them: the Poisson algebra 𝒫 with basis E_λ, a brute-force operator
//! product used as an oracle, tensor density modules Ω^δ_s, the
//! Kaplansky–Santharoubane A/B families, the log-derivation module ℰ, the
//! maps π, β₁, β₂ on tensor products of densities, the bilinear-map degree table, and module recognition from
//! an action window.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::symplectic_form;
use crate::scalar::{binomial, Scalar};

/// λ ∈ K², standing for E_λ = σ(z^{λ₁+1} ∂^{λ₂+1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolIndex(pub [Scalar; 2]);

impl SymbolIndex {
    pub fn new(a: Scalar, b: Scalar) -> Self {
        SymbolIndex([a, b])
    }

    pub fn ints(a: i64, b: i64) -> Self {
        SymbolIndex([Scalar::from_int(a), Scalar::from_int(b)])
    }

    /// (z-exponent, ∂-exponent) of the represented monomial.
    pub fn exponents(&self) -> (Scalar, Scalar) {
        (&self.0[0] + &Scalar::one(), &self.0[1] + &Scalar::one())
    }

    pub fn from_exponents(s: &Scalar, x: &Scalar) -> Self {
        SymbolIndex([s - &Scalar::one(), x - &Scalar::one()])
    }

    fn plus_rho(&self) -> [Scalar; 2] {
        let (s, x) = self.exponents();
        [s, x]
    }

    pub fn add(&self, other: &SymbolIndex) -> SymbolIndex {
        SymbolIndex([&self.0[0] + &other.0[0], &self.0[1] + &other.0[1]])
    }
}

/// {E_λ, E_μ} = ⟨λ+ρ|μ+ρ⟩ E_{λ+μ}.
pub fn poisson_bracket(lam: &SymbolIndex, mu: &SymbolIndex) -> (Scalar, SymbolIndex) {
    (symplectic_form(&lam.plus_rho(), &mu.plus_rho()), lam.add(mu))
}

/// E_λ · E_μ = E_{λ+μ+ρ}.
pub fn commutative_product(lam: &SymbolIndex, mu: &SymbolIndex) -> SymbolIndex {
    let one = Scalar::one();
    SymbolIndex([&(&lam.0[0] + &mu.0[0]) + &one, &(&lam.0[1] + &mu.0[1]) + &one])
}

/// coeff · z^s ∂^x.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdoTerm {
    pub coeff: Scalar,
    pub s: Scalar,
    pub x: Scalar,
}

impl PdoTerm {
    pub fn new(coeff: Scalar, s: Scalar, x: Scalar) -> Self {
        PdoTerm { coeff, s, x }
    }

    pub fn monomial(s: Scalar, x: Scalar) -> Self {
        PdoTerm { coeff: Scalar::one(), s, x }
    }
}

/// A finite sum of terms z^s ∂^x (the "good" support is automatic for finite
/// sums). Kept merged, pruned and canonically sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TwistedPDO {
    pub terms: Vec<PdoTerm>,
}

fn descent_order(a: &PdoTerm, b: &PdoTerm) -> std::cmp::Ordering {
    a.x.frac()
        .lex_cmp(&b.x.frac())
        .then_with(|| b.x.lex_cmp(&a.x))
        .then_with(|| b.s.lex_cmp(&a.s))
}

impl TwistedPDO {
    pub fn zero() -> Self {
        TwistedPDO { terms: vec![] }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PdoTerm>) -> Self {
        let mut acc: HashMap<(Scalar, Scalar), Scalar> = HashMap::new();
        let mut order: Vec<(Scalar, Scalar)> = Vec::new();
        for t in terms {
            let key = (t.s, t.x);
            match acc.get_mut(&key) {
                Some(c) => *c += &t.coeff,
                None => {
                    order.push(key.clone());
                    acc.insert(key, t.coeff);
                }
            }
        }
        let mut terms: Vec<PdoTerm> = order
            .into_iter()
            .filter_map(|k| {
                let c = acc.remove(&k)?;
                (!c.is_zero()).then_some(PdoTerm { coeff: c, s: k.0, x: k.1 })
            })
            .collect();
        terms.sort_by(descent_order);
        TwistedPDO { terms }
    }

    pub fn monomial(s: Scalar, x: Scalar) -> Self {
        Self::from_terms([PdoTerm::monomial(s, x)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TwistedPDO) -> TwistedPDO {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &TwistedPDO) -> TwistedPDO {
        Self::from_terms(
            self.terms
                .iter()
                .cloned()
                .chain(other.terms.iter().map(|t| PdoTerm { coeff: -&t.coeff, ..t.clone() })),
        )
    }

    pub fn scale(&self, k: &Scalar) -> TwistedPDO {
        Self::from_terms(self.terms.iter().map(|t| PdoTerm { coeff: &t.coeff * k, ..t.clone() }))
    }

    /// Coefficient of z^s ∂^x.
    pub fn coefficient(&self, s: &Scalar, x: &Scalar) -> Scalar {
        self.terms
            .iter()
            .find(|t| &t.s == s && &t.x == x)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// The term of highest ∂-exponent within the descent x₀ + ℤ.
    pub fn leading_in_descent(&self, x0: &Scalar) -> Option<&PdoTerm> {
        let cls = x0.frac();
        self.terms.iter().filter(|t| t.x.frac() == cls).max_by(|a, b| a.x.re.cmp(&b.x.re))
    }
}

impl fmt::Display for TwistedPDO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|t| format!("{} * z^{} d^{}", t.coeff, t.s, t.x)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for TwistedPDO {
    type Err = Error;
    /// Accepts the canonical form; the `c * ` prefix may be omitted.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Ok(TwistedPDO::zero());
        }
        let bad = |w: &str| Error::Parse(format!("invalid operator term `{w}`"));
        let mut terms = Vec::new();
        for part in text.split(" + ") {
            let (coeff, mono) = match part.split_once('*') {
                Some((c, m)) => (c.trim().parse()?, m.trim()),
                None => (Scalar::one(), part.trim()),
            };
            let mut s = Scalar::zero();
            let mut x = Scalar::zero();
            for tok in mono.split_whitespace() {
                if let Some(v) = tok.strip_prefix("z^") {
                    s = v.parse()?;
                } else if let Some(v) = tok.strip_prefix("d^") {
                    x = v.parse()?;
                } else if tok == "z" {
                    s = Scalar::one();
                } else if tok == "d" {
                    x = Scalar::one();
                } else if tok == "1" {
                } else {
                    return Err(bad(part));
                }
            }
            terms.push(PdoTerm { coeff, s, x });
        }
        Ok(TwistedPDO::from_terms(terms))
    }
}

/// z^s∂^x · z^t∂^y = Σ_{k<cut} k!·C(x,k)·C(t,k)·z^{s+t−k}∂^{x+y−k}.
pub fn opd_product(p: &TwistedPDO, q: &TwistedPDO, order_cut: usize) -> TwistedPDO {
    let mut out = Vec::new();
    for a in &p.terms {
        for b in &q.terms {
            let base = &a.coeff * &b.coeff;
            let mut fact = Scalar::one();
            for k in 0..order_cut {
                if k > 0 {
                    fact = &fact * &Scalar::from_int(k as i64);
                }
                let c = &(&fact * &binomial(&a.x, k as u32)) * &binomial(&b.s, k as u32);
                if c.is_zero() {
                    // C(x,k) or C(t,k) vanished for a non-negative integer; so do all later terms.
                    break;
                }
                let kk = Scalar::from_int(k as i64);
                out.push(PdoTerm { coeff: &base * &c, s: &(&a.s + &b.s) - &kk, x: &(&a.x + &b.x) - &kk });
            }
        }
    }
    TwistedPDO::from_terms(out)
}

/// pq − qp.
pub fn opd_commutator(p: &TwistedPDO, q: &TwistedPDO, order_cut: usize) -> TwistedPDO {
    opd_product(p, q, order_cut).sub(&opd_product(q, p, order_cut))
}

/// Poisson bracket of symbols written as operators:
/// {f∂^a, g∂^b} = (a·f·g′ − b·f′·g)∂^{a+b−1}.
pub fn symbol_bracket(p: &TwistedPDO, q: &TwistedPDO) -> TwistedPDO {
    let one = Scalar::one();
    let mut out = Vec::new();
    for a in &p.terms {
        for b in &q.terms {
            let c = symplectic_form(&[a.s.clone(), a.x.clone()], &[b.s.clone(), b.x.clone()]);
            out.push(PdoTerm {
                coeff: &(&a.coeff * &b.coeff) * &c,
                s: &(&a.s + &b.s) - &one,
                x: &(&a.x + &b.x) - &one,
            });
        }
    }
    TwistedPDO::from_terms(out)
}

// ---------------------------------------------------------------------------
// W-modules.

/// {L_n, u^δ_x} = (x + nδ) u^δ_{x+n}: returns (x + nδ, x + n).
pub fn density_action(n: i64, delta: &Scalar, x: &Scalar) -> (Scalar, Scalar) {
    let n = Scalar::from_int(n);
    (x + &(&n * delta), x + &n)
}

/// c · u^δ_x = c · E_{(x−δ−1, −δ−1)}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityVector {
    pub delta: Scalar,
    pub x: Scalar,
    pub coeff: Scalar,
}

impl DensityVector {
    pub fn new(delta: Scalar, x: Scalar, coeff: Scalar) -> Self {
        DensityVector { delta, x, coeff }
    }

    pub fn index(&self) -> SymbolIndex {
        let one = Scalar::one();
        SymbolIndex([&(&self.x - &self.delta) - &one, -&(&self.delta + &one)])
    }

    /// The operator term c · z^{x−δ} ∂^{−δ}.
    pub fn term(&self) -> PdoTerm {
        PdoTerm { coeff: self.coeff.clone(), s: &self.x - &self.delta, x: -&self.delta }
    }
}

/// A W-module with one basis vector v_x per L₀-eigenvalue x in a coset s + ℤ.
pub trait WModule {
    /// L_n · v_x = coefficient · v_{x+n}.
    fn act(&self, n: i64, x: &Scalar) -> Scalar;
}

/// Ω^δ_s with basis u^δ_x, x ∈ s + ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityModule {
    pub delta: Scalar,
    pub s: Scalar,
}

impl WModule for DensityModule {
    fn act(&self, n: i64, x: &Scalar) -> Scalar {
        density_action(n, &self.delta, x).0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ABKind {
    A,
    B,
}

/// A_{a,b} or B_{a,b}, basis u_n (n ∈ ℤ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ABModule {
    pub kind: ABKind,
    pub a: Scalar,
    pub b: Scalar,
}

impl ABModule {
    fn quad(&self, m: i64) -> Scalar {
        let m = Scalar::from_int(m);
        &(&(&self.a * &m) * &m) + &(&self.b * &m)
    }

    /// Projective normalization: a = 1 when a ≠ 0, else b = 1 when b ≠ 0.
    pub fn normalized(&self) -> ABModule {
        let k = if !self.a.is_zero() {
            self.a.clone()
        } else if !self.b.is_zero() {
            self.b.clone()
        } else {
            Scalar::one()
        };
        ABModule { kind: self.kind, a: &self.a / &k, b: &self.b / &k }
    }
}

/// L_m · u_n for the A/B families: returns (coefficient, m+n).
pub fn ab_action(module: &ABModule, m: i64, n: i64) -> (Scalar, i64) {
    let c = match module.kind {
        ABKind::A if n == 0 => module.quad(m),
        ABKind::A => Scalar::from_int(m + n),
        ABKind::B if m + n == 0 => module.quad(m),
        ABKind::B => Scalar::from_int(n),
    };
    (c, m + n)
}

impl WModule for ABModule {
    /// x must be an integer.
    fn act(&self, n: i64, x: &Scalar) -> Scalar {
        ab_action(self, n, x.to_i64().expect("AB modules are graded by ℤ")).0
    }
}

/// Violations of [L_n, L_m]·v_x = L_n(L_m v_x) − L_m(L_n v_x) for n, m in
/// `nm` and x in `xs`; returns the failing (n, m, x).
pub fn module_axiom_violations(
    module: &dyn WModule,
    nm: std::ops::RangeInclusive<i64>,
    xs: &[Scalar],
) -> Vec<(i64, i64, Scalar)> {
    let mut out = Vec::new();
    for n in nm.clone() {
        for m in nm.clone() {
            for x in xs {
                let (xn, xm) = (x + &Scalar::from_int(n), x + &Scalar::from_int(m));
                let lhs = &Scalar::from_int(m - n) * &module.act(n + m, x);
                let rhs = &(&module.act(m, x) * &module.act(n, &xm)) - &(&module.act(n, x) * &module.act(m, &xn));
                if lhs != rhs {
                    out.push((n, m, x.clone()));
                }
            }
        }
    }
    out
}

/// Whether a bilinear map Ω^{δ₁} × Ω^{δ₂} → Ω^γ of degree γ−δ₁−δ₂ is listed in
/// the admissibility table for degrees −2 … 3.
pub fn bilinear_degree_admissible(d1: &Scalar, d2: &Scalar, gamma: &Scalar) -> bool {
    let deg = &(gamma - d1) - d2;
    let Some(deg) = deg.to_i64() else { return false };
    let q = |n: i64, d: i64| Scalar::ratio(n, d);
    let z = Scalar::zero();
    let one = Scalar::one();
    let eq = |a: &Scalar, b: &Scalar, c: &Scalar| d1 == a && d2 == b && gamma == c;
    match deg {
        3 => {
            eq(&q(-2, 3), &q(-2, 3), &q(5, 3))
                || eq(&z, &z, &Scalar::from_int(3))
                || eq(&z, &Scalar::from_int(-2), &one)
                || eq(&Scalar::from_int(-2), &z, &one)
        }
        // (0,δ,δ+2), (δ,0,δ+2), (δ,−1−δ,1)
        2 => d1.is_zero() || d2.is_zero() || ((d1 + d2) == -&one && gamma == &one),
        1 | 0 => true,
        // (1,δ,δ), (δ,1,δ), (δ,1−δ,0)
        -1 => d1 == &one || d2 == &one || ((d1 + d2) == one && gamma.is_zero()),
        -2 => eq(&one, &one, &z),
        _ => false,
    }
}

/// Product or Poisson-bracket bilinear maps between density modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearKind {
    Product,
    Bracket,
}

/// For f = c₁z^a ∂^{−δ} ∈ Ω^δ and g = c₂z^b ∂^{−δ′} ∈ Ω^{δ′}: the product
/// P^{δ,δ′} = fg∂^{−δ−δ′} or the bracket
/// B^{δ,δ′} = (δ′·f′g − δ·fg′)∂^{−δ−δ′−1}, which is the symbol Poisson bracket.
pub fn density_bilinear(kind: BilinearKind, f: &PdoTerm, g: &PdoTerm) -> PdoTerm {
    match kind {
        BilinearKind::Product => PdoTerm { coeff: &f.coeff * &g.coeff, s: &f.s + &g.s, x: &f.x + &g.x },
        BilinearKind::Bracket => {
            let one = Scalar::one();
            // δ = −f.x, δ′ = −g.x; f′g carries a, fg′ carries b.
            let (delta, delta2) = (-&f.x, -&g.x);
            let c = &(&delta2 * &f.s) - &(&delta * &g.s);
            PdoTerm { coeff: &(&f.coeff * &g.coeff) * &c, s: &(&f.s + &g.s) - &one, x: &(&f.x + &g.x) - &one }
        }
    }
}

/// An element of ℰ = Ā ⊕ K log z ⊕ K log ∂, where Ā = span{e_n : n ≠ 0}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogDerivationElement {
    pub e: BTreeMap<i64, Scalar>,
    pub log_z: Scalar,
    pub log_d: Scalar,
}

impl LogDerivationElement {
    pub fn zero() -> Self {
        LogDerivationElement { e: BTreeMap::new(), log_z: Scalar::zero(), log_d: Scalar::zero() }
    }

    pub fn e_n(n: i64) -> Self {
        let mut x = Self::zero();
        if n != 0 {
            x.e.insert(n, Scalar::one());
        }
        x
    }

    pub fn log_z() -> Self {
        LogDerivationElement { log_z: Scalar::one(), ..Self::zero() }
    }

    pub fn log_d() -> Self {
        LogDerivationElement { log_d: Scalar::one(), ..Self::zero() }
    }

    fn add_e(&mut self, n: i64, c: Scalar) {
        if n == 0 || c.is_zero() {
            return;
        }
        let v = self.e.remove(&n).unwrap_or_else(Scalar::zero) + c;
        if !v.is_zero() {
            self.e.insert(n, v);
        }
    }

    pub fn add(&self, other: &LogDerivationElement) -> LogDerivationElement {
        let mut out = self.clone();
        for (&n, c) in &other.e {
            out.add_e(n, c.clone());
        }
        out.log_z = &out.log_z + &other.log_z;
        out.log_d = &out.log_d + &other.log_d;
        out
    }

    pub fn scale(&self, k: &Scalar) -> LogDerivationElement {
        let mut out = LogDerivationElement::zero();
        for (&n, c) in &self.e {
            out.add_e(n, c * k);
        }
        out.log_z = &self.log_z * k;
        out.log_d = &self.log_d * k;
        out
    }

    pub fn in_a_bar(&self) -> bool {
        self.log_z.is_zero() && self.log_d.is_zero()
    }

    /// The derivation ξ acting on u^δ_x: lands in Ω^{δ+1}. Returns terms
    /// (coefficient, x′) of u^{δ+1}_{x′}.
    pub fn apply_density(&self, delta: &Scalar, x: &Scalar) -> Vec<(Scalar, Scalar)> {
        let mut out = Vec::new();
        for (&n, c) in &self.e {
            // {z^n, u^δ_x} = nδ u^{δ+1}_{x+n}
            out.push((&(c * &Scalar::from_int(n)) * delta, x + &Scalar::from_int(n)));
        }
        // {log z, u^δ_x} = δ u^{δ+1}_x ;  {log ∂, u^δ_x} = (x−δ) u^{δ+1}_x
        let c = &(&self.log_z * delta) + &(&self.log_d * &(x - delta));
        out.push((c, x.clone()));
        out.retain(|(c, _)| !c.is_zero());
        out
    }
}

/// L_n · ξ per the ℰ action table.
pub fn log_action(n: i64, xi: &LogDerivationElement) -> LogDerivationElement {
    let mut out = LogDerivationElement::zero();
    for (&m, c) in &xi.e {
        out.add_e(n + m, c * &Scalar::from_int(m));
    }
    if n != 0 {
        out.add_e(n, xi.log_z.clone());
        out.add_e(n, &xi.log_d * &Scalar::from_int(-(n + 1)));
    }
    out
}

/// A combination Σ cᵢ · z^{aᵢ}∂^{−δ} ⊗ z^{bᵢ}∂^{−η}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTensor {
    pub delta: Scalar,
    pub eta: Scalar,
    pub terms: Vec<(Scalar, Scalar, Scalar)>,
}

/// (π, β₁, β₂) = (fg∂^{−δ−η}, fg′∂^{−δ−η−1}, f′g∂^{−δ−η−1}), extended linearly.
pub fn lemma65_maps(t: &DensityTensor) -> (TwistedPDO, TwistedPDO, TwistedPDO) {
    let one = Scalar::one();
    let x0 = -&(&t.delta + &t.eta);
    let x1 = &x0 - &one;
    let mut pi = Vec::new();
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    for (c, a, b) in &t.terms {
        let s = a + b;
        pi.push(PdoTerm::new(c.clone(), s.clone(), x0.clone()));
        b1.push(PdoTerm::new(c * b, &s - &one, x1.clone()));
        b2.push(PdoTerm::new(c * a, &s - &one, x1.clone()));
    }
    (TwistedPDO::from_terms(pi), TwistedPDO::from_terms(b1), TwistedPDO::from_terms(b2))
}

// ---------------------------------------------------------------------------
// Module recognition.

/// Action constants L_n · v_k = a_n(k) v_{k+n} of a W-module window with
/// basis v_0 … v_{len−1}, where L₀ acts on v_k by x₀ + k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionWindow {
    pub x0: Scalar,
    pub len: usize,
    entries: HashMap<(i64, i64), Scalar>,
}

impl ActionWindow {
    pub fn new(x0: Scalar, len: usize) -> Self {
        ActionWindow { x0, len, entries: HashMap::new() }
    }

    pub fn set(&mut self, n: i64, k: i64, v: Scalar) {
        assert!(k >= 0 && (k as usize) < self.len && k + n >= 0 && ((k + n) as usize) < self.len);
        self.entries.insert((n, k), v);
    }

    pub fn get(&self, n: i64, k: i64) -> Option<&Scalar> {
        self.entries.get(&(n, k))
    }

    pub fn x(&self, k: i64) -> Scalar {
        &self.x0 + &Scalar::from_int(k)
    }

    /// Window of a model module on n ∈ [−2, 2], rescaled by v_k = τ_k·m_k.
    pub fn from_module(module: &dyn WModule, x0: Scalar, len: usize, tau: Option<&[Scalar]>) -> Self {
        let mut w = ActionWindow::new(x0, len);
        for k in 0..len as i64 {
            for n in -2..=2i64 {
                let t = k + n;
                if t < 0 || t >= len as i64 {
                    continue;
                }
                let mut v = module.act(n, &w.x(k));
                if let Some(tau) = tau {
                    v = &(&v * &tau[k as usize]) / &tau[t as usize];
                }
                w.set(n, k, v);
            }
        }
        w
    }

    fn entries_sorted(&self) -> Vec<((i64, i64), &Scalar)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, v)| (*k, v)).collect();
        v.sort_by_key(|(k, _)| (k.1, k.0));
        v
    }
}

/// Find τ with a_n(k) = model(n,k)·τ_k/τ_{k+n} on every window entry
/// (τ_0 = 1; disconnected pieces gauge-fixed to 1). `None` if inconsistent.
pub fn fit_rescaling(w: &ActionWindow, model: &dyn Fn(i64, i64) -> Scalar) -> Option<Vec<Scalar>> {
    let len = w.len;
    let mut tau: Vec<Option<Scalar>> = vec![None; len];
    let entries = w.entries_sorted();
    loop {
        let Some(start) = tau.iter().position(|t| t.is_none()) else { break };
        tau[start] = Some(Scalar::one());
        loop {
            let mut progress = false;
            for &((n, k), a) in &entries {
                if n == 0 || a.is_zero() {
                    continue;
                }
                let m = model(n, k);
                if m.is_zero() {
                    return None;
                }
                let (ku, tu) = (k as usize, (k + n) as usize);
                match (&tau[ku], &tau[tu]) {
                    (Some(tk), None) => {
                        tau[tu] = Some(&(&m * tk) / a);
                        progress = true;
                    }
                    (None, Some(tt)) => {
                        tau[ku] = Some(&(a * tt) / &m);
                        progress = true;
                    }
                    _ => {}
                }
            }
            if !progress {
                break;
            }
        }
    }
    let tau: Vec<Scalar> = tau.into_iter().map(|t| t.unwrap()).collect();
    for &((n, k), a) in &entries {
        let expect = &(&model(n, k) * &tau[k as usize]) / &tau[(k + n) as usize];
        if &expect != a {
            return None;
        }
    }
    Some(tau)
}

/// Recognized module type of a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum DensityModuleSpec {
    /// Ω^δ_s with a single-valued degree.
    Density { delta: Scalar, s: Scalar },
    /// Degree {0, 1}: Ω⁰_s ≅ Ω¹_s (s ∉ ℤ), or an integral window avoiding the
    /// special vector.
    DensityPair { s: Scalar },
    /// A reducible module of the AB-family (degree {0, 1}).
    AB { module: ABModule },
}

impl DensityModuleSpec {
    pub fn degrees(&self) -> Vec<Scalar> {
        match self {
            DensityModuleSpec::Density { delta, .. } => vec![delta.clone()],
            _ => vec![Scalar::zero(), Scalar::one()],
        }
    }
}

fn solve_ab(q: &[(i64, Scalar)]) -> Option<(Scalar, Scalar)> {
    // q_m = a m² + b m from two distinct m ≠ 0, verified on the rest.
    let (m1, q1) = q.first()?;
    let (m2, q2) = q.iter().find(|(m, _)| m != m1)?;
    let (m1s, m2s) = (Scalar::from_int(*m1), Scalar::from_int(*m2));
    // [m1² m1; m2² m2] (a,b) = (q1,q2)
    let det = &(&(&m1s * &m1s) * &m2s) - &(&(&m2s * &m2s) * &m1s);
    let a = &(&(q1 * &m2s) - &(q2 * &m1s)) / &det;
    let b = &(&(&(&m1s * &m1s) * q2) - &(&(&m2s * &m2s) * q1)) / &det;
    for (m, v) in q {
        let ms = Scalar::from_int(*m);
        if &(&(&(&a * &ms) * &ms) + &(&b * &ms)) != v {
            return None;
        }
    }
    Some((a, b))
}

/// Identify the class-𝒮(W) module generating a window whose basis scaling is
/// unknown. Uses the scaling-invariant loops a₁(x)a₋₁(x+1) = x(x+1) + δ(1−δ)
/// and a₁(x)a₁(x+1)a₋₂(x+2) = (x+δ)(x+1+δ)(x+2−2δ), then verifies by solving
/// for the rescaling and checking every entry.
pub fn module_recognize(w: &ActionWindow) -> Result<DensityModuleSpec> {
    let err = |m: &str| Err(Error::Recognition(m.to_string()));
    let len = w.len as i64;
    for k in 0..len {
        if let Some(a0) = w.get(0, k) {
            if a0 != &w.x(k) {
                return err(&format!("L0 acts on v_{k} by {a0}, expected {}", w.x(k)));
            }
        }
    }
    let s = w.x0.frac();
    // p = δ(1−δ) from two-step loops avoiding the x = 0 vector.
    let mut p: Option<Scalar> = None;
    for k in 0..len - 1 {
        let (x, x1) = (w.x(k), w.x(k + 1));
        if x.is_zero() || x1.is_zero() {
            continue;
        }
        let (Some(a), Some(b)) = (w.get(1, k), w.get(-1, k + 1)) else { continue };
        let v = &(a * b) - &(&x * &x1);
        match &p {
            None => p = Some(v),
            Some(q) if q != &v => return err("two-step loop invariant is not constant"),
            _ => {}
        }
    }
    let Some(p) = p else { return err("window too short for loop invariants") };

    if !p.is_zero() {
        let two = Scalar::from_int(2);
        let mut delta: Option<Scalar> = None;
        for k in 0..len - 2 {
            let (Some(a1), Some(a2), Some(a3)) = (w.get(1, k), w.get(1, k + 1), w.get(-2, k + 2)) else { continue };
            let x = w.x(k);
            let tr = &(a1 * a2) * a3;
            let big_a = &(&x * &(&x + &Scalar::one())) - &p;
            let big_b = &(&two * &x) + &two;
            let c = &x + &two;
            let u = &(&big_a * &c) + &(&(&two * &big_b) * &p);
            let d = &(&tr - &u) / &(&two * &p);
            match &delta {
                None => delta = Some(d),
                Some(q) if q != &d => return err("triangle invariant is not constant"),
                _ => {}
            }
        }
        let Some(delta) = delta else { return err("window too short for the triangle invariant") };
        let model = |n: i64, k: i64| &w.x(k) + &(&Scalar::from_int(n) * &delta);
        return match fit_rescaling(w, &model) {
            Some(_) => Ok(DensityModuleSpec::Density { delta, s }),
            None => err("no rescaling matches the recognized density module"),
        };
    }

    // p = 0: degree {0, 1}.
    let omega0 = |_n: i64, k: i64| w.x(k);
    let k0 = (0..len).find(|&k| w.x(k).is_zero());
    let Some(k0) = k0.filter(|_| w.x0.is_integer()) else {
        return match fit_rescaling(w, &omega0) {
            Some(_) => Ok(DensityModuleSpec::DensityPair { s }),
            None => err("degree-{0,1} window does not match Ω⁰"),
        };
    };
    let into_zero = (-2..=2).filter(|&n| n != 0).all(|n| w.get(n, k0 - n).is_none_or(|v| v.is_zero()));
    let out_zero = (-2..=2).filter(|&n| n != 0).all(|n| w.get(n, k0).is_none_or(|v| v.is_zero()));
    let kind = match (into_zero, out_zero) {
        (true, _) => ABKind::A,
        (false, true) => ABKind::B,
        (false, false) => return err("integral degree-{0,1} window is neither A- nor B-shaped"),
    };
    // Rescaling away from v_{k0} from Ω¹ (A) or Ω⁰ (B), ignoring entries at k0.
    let mut partial = ActionWindow::new(w.x0.clone(), w.len);
    for (&(n, k), v) in &w.entries {
        if k != k0 && k + n != k0 {
            partial.entries.insert((n, k), v.clone());
        }
    }
    let base = |n: i64, k: i64| match kind {
        ABKind::A => &w.x(k) + &Scalar::from_int(n),
        ABKind::B => w.x(k),
    };
    let Some(tau) = fit_rescaling(&partial, &base) else { return err("AB window inconsistent away from 0") };
    let t0 = &tau[k0 as usize];
    let mut q = Vec::new();
    for m in [-2i64, -1, 1, 2] {
        match kind {
            ABKind::A => {
                if let Some(v) = w.get(m, k0) {
                    // a_m(k0) = q_m τ_{k0}/τ_{k0+m}
                    q.push((m, &(v * &tau[(k0 + m) as usize]) / t0));
                }
            }
            ABKind::B => {
                if let Some(v) = w.get(m, k0 - m) {
                    // a_m(k0−m) = q_m τ_{k0−m}/τ_{k0}
                    q.push((m, &(v * t0) / &tau[(k0 - m) as usize]));
                }
            }
        }
    }
    let (a, b) = if q.iter().all(|(_, v)| v.is_zero()) {
        (Scalar::zero(), Scalar::zero())
    } else {
        match solve_ab(&q) {
            Some(ab) => ab,
            None => return err("AB parameters inconsistent"),
        }
    };
    let module = ABModule { kind, a, b }.normalized();
    let xi = |k: i64| w.x(k).to_i64().expect("integral window");
    let full = |n: i64, k: i64| ab_action(&module, n, xi(k)).0;
    match fit_rescaling(w, &full) {
        Some(_) => Ok(DensityModuleSpec::AB { module }),
        None => err("no rescaling matches the recognized AB module"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn mono(s: i64, x: i64) -> TwistedPDO {
        TwistedPDO::monomial(Scalar::from_int(s), Scalar::from_int(x))
    }

    #[test]
    fn operator_product_examples() {
        let p = opd_product(&mono(1, 2), &mono(2, 1), 3);
        assert_eq!(p.to_string(), "1 * z^3 d^3 + 4 * z^2 d^2 + 2 * z^1 d^1");
        let dz = opd_product(&mono(0, 1), &mono(1, 0), 5);
        assert_eq!(dz.to_string(), "1 * z^1 d^1 + 1 * z^0 d^0");
        let zz = opd_product(&mono(2, 0), &mono(-5, 0), 5);
        assert_eq!(zz, mono(-3, 0));
        let parsed: TwistedPDO = "1 * z^3 d^3 + 4 * z^2 d^2 + 2 * z^1 d^1".parse().unwrap();
        assert_eq!(parsed, p);
    }

    #[test]
    fn poisson_examples() {
        let (c, i) = poisson_bracket(&SymbolIndex::ints(1, 0), &SymbolIndex::ints(2, 0));
        assert_eq!((c, i), (Scalar::one(), SymbolIndex::ints(3, 0)));
        let (c, _) = poisson_bracket(&SymbolIndex::ints(-1, -1), &SymbolIndex::ints(4, 7));
        assert!(c.is_zero());
        let (c, i) = poisson_bracket(&SymbolIndex::ints(0, 1), &SymbolIndex::ints(1, 0));
        assert_eq!((c, i), (Scalar::from_int(3), SymbolIndex::ints(1, 1)));
        assert_eq!(commutative_product(&SymbolIndex::ints(0, 0), &SymbolIndex::ints(0, 0)), SymbolIndex::ints(1, 1));
        let mu = SymbolIndex::new(q("1/2"), q("i"));
        assert_eq!(commutative_product(&SymbolIndex::ints(-1, -1), &mu), mu);
    }

    #[test]
    fn density_examples() {
        let x = q("3/7");
        assert_eq!(density_action(0, &q("5"), &x), (x.clone(), x.clone()));
        assert_eq!(density_action(3, &q("-1"), &x), (&x - &q("3"), &x + &q("3")));
        assert_eq!(density_action(2, &q("1/2"), &Scalar::zero()), (q("1"), q("2")));
    }

    #[test]
    fn ab_examples() {
        let m = ABModule { kind: ABKind::A, a: q("1"), b: q("0") };
        assert_eq!(ab_action(&m, 2, 0), (q("4"), 2));
        assert_eq!(ab_action(&m, 0, 5), (q("5"), 5));
        for kind in [ABKind::A, ABKind::B] {
            let m = ABModule { kind, a: q("2/3"), b: q("-5") };
            let xs: Vec<Scalar> = (-5..=5).map(Scalar::from_int).collect();
            assert!(module_axiom_violations(&m, -3..=3, &xs).is_empty());
        }
    }

    #[test]
    fn log_table() {
        assert_eq!(log_action(2, &LogDerivationElement::log_d()), LogDerivationElement::e_n(2).scale(&q("-3")));
        assert_eq!(log_action(0, &LogDerivationElement::log_d()), LogDerivationElement::zero());
        assert_eq!(log_action(0, &LogDerivationElement::log_z()), LogDerivationElement::zero());
        assert_eq!(log_action(3, &LogDerivationElement::e_n(-3)), LogDerivationElement::zero());
    }

    #[test]
    fn admissibility_table() {
        assert!(bilinear_degree_admissible(&q("0"), &q("0"), &q("3")));
        assert!(bilinear_degree_admissible(&q("1/7"), &q("2/5"), &(&(&q("1/7") + &q("2/5")) + &Scalar::one())));
        assert!(!bilinear_degree_admissible(&q("1/2"), &q("1/2"), &q("5")));
        assert!(bilinear_degree_admissible(&q("1"), &q("1"), &q("0")));
        assert!(!bilinear_degree_admissible(&q("1"), &q("2"), &q("1")));
    }

    #[test]
    fn recognize_basic_windows() {
        let w = ActionWindow::from_module(&DensityModule { delta: q("1/2"), s: q("0") }, q("-3"), 8, None);
        assert_eq!(module_recognize(&w).unwrap(), DensityModuleSpec::Density { delta: q("1/2"), s: q("0") });
        let w = ActionWindow::from_module(&DensityModule { delta: q("-1"), s: q("0") }, q("-4"), 9, None);
        assert_eq!(module_recognize(&w).unwrap(), DensityModuleSpec::Density { delta: q("-1"), s: q("0") });
        // δ and 1 − δ share the two-step invariant but not the triangle.
        let w = ActionWindow::from_module(&DensityModule { delta: q("3"), s: q("1/3") }, q("-8/3"), 7, None);
        assert_eq!(module_recognize(&w).unwrap(), DensityModuleSpec::Density { delta: q("3"), s: q("1/3") });
        let w = ActionWindow::from_module(&DensityModule { delta: q("-2"), s: q("1/3") }, q("-8/3"), 7, None);
        assert_eq!(module_recognize(&w).unwrap(), DensityModuleSpec::Density { delta: q("-2"), s: q("1/3") });
    }

    #[test]
    fn recognize_degenerate_windows() {
        let w = ActionWindow::from_module(&DensityModule { delta: q("0"), s: q("1/2") }, q("-5/2"), 7, None);
        assert_eq!(module_recognize(&w).unwrap(), DensityModuleSpec::DensityPair { s: q("1/2") });
        // Ω¹_0 = A_{0,1}, Ω⁰_0 = B_{0,−1} ≅ B_{0,1}
        let w = ActionWindow::from_module(&DensityModule { delta: q("1"), s: q("0") }, q("-3"), 7, None);
        let ab = |kind, a: &str, b: &str| DensityModuleSpec::AB { module: ABModule { kind, a: q(a), b: q(b) } };
        assert_eq!(module_recognize(&w).unwrap(), ab(ABKind::A, "0", "1"));
        let w = ActionWindow::from_module(&DensityModule { delta: q("0"), s: q("0") }, q("-3"), 7, None);
        assert_eq!(module_recognize(&w).unwrap(), ab(ABKind::B, "0", "1"));
        let m = ABModule { kind: ABKind::A, a: q("2"), b: q("3") };
        let tau: Vec<Scalar> = (1..=7).map(|k| Scalar::from_int(k * k + 1)).collect();
        let w = ActionWindow::from_module(&m, q("-3"), 7, Some(&tau));
        assert_eq!(module_recognize(&w).unwrap(), ab(ABKind::A, "1", "3/2"));
    }
}
