//! Named algebras: the Witt algebra, W_l, W_π, the loop algebras A₁⁽¹⁾ and
//! A₂⁽²⁾, the finite gradations Γ₃ of 𝔰𝔩(2) and Γ₈ of 𝔰𝔩(3), pullbacks and
//! imprimitive forms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{generates_group, int_solve, symplectic_form, AdditiveMap, GradingGroup, LatticePoint};
use crate::matrix::ExactMatrix;
use crate::scalar::{Field, Scalar};
use crate::structure::ScalarStructure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CatalogName {
    Witt,
    GenWitt { l: AdditiveMap },
    WPi { pi: AdditiveMap },
    #[serde(rename = "a1_1")]
    A1_1,
    #[serde(rename = "a2_2")]
    A2_2,
    #[serde(rename = "sl2_gamma3")]
    Sl2Gamma3,
    #[serde(rename = "sl3_gamma8")]
    Sl3Gamma8,
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CatalogName::Witt => "witt",
            CatalogName::GenWitt { .. } => "gen_witt",
            CatalogName::WPi { .. } => "wpi",
            CatalogName::A1_1 => "a1_1",
            CatalogName::A2_2 => "a2_2",
            CatalogName::Sl2Gamma3 => "sl2_gamma3",
            CatalogName::Sl3Gamma8 => "sl3_gamma8",
        })
    }
}

fn parse_scalars(text: &str) -> Result<Vec<Scalar>> {
    text.split(',').map(|t| t.trim().parse()).collect()
}

/// Two comma-separated scalars, e.g. `"1,-1/2"`.
pub fn parse_pair(text: &str) -> Result<[Scalar; 2]> {
    let v = parse_scalars(text)?;
    <[Scalar; 2]>::try_from(v).map_err(|_| Error::Parse(format!("expected two comma-separated scalars in `{text}`")))
}

impl CatalogName {
    /// A catalog name from its textual form. `param` carries the generator
    /// images: `"1,i"` for the l of `gen_witt`, `"1,0;0,i"` for the π of `wpi`.
    pub fn from_spec(name: &str, param: Option<&str>) -> Result<CatalogName> {
        let needs = |what: &str| Error::Parse(format!("{name} needs generator images of {what}"));
        Ok(match name {
            "witt" => CatalogName::Witt,
            "gen_witt" => CatalogName::GenWitt { l: AdditiveMap::scalar(parse_scalars(param.ok_or_else(|| needs("l"))?)?) },
            "wpi" => CatalogName::WPi {
                pi: AdditiveMap::pair(param.ok_or_else(|| needs("π"))?.split(';').map(parse_pair).collect::<Result<_>>()?),
            },
            "a1_1" => CatalogName::A1_1,
            "a2_2" => CatalogName::A2_2,
            "sl2_gamma3" => CatalogName::Sl2Gamma3,
            "sl3_gamma8" => CatalogName::Sl3Gamma8,
            other => return Err(Error::Parse(format!("unknown catalog name `{other}`"))),
        })
    }
}

/// The status of condition 𝒞 for an additive map π: Λ → K².
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionC {
    /// Generator images are ℤ-independent.
    pub injective: bool,
    /// π(Λ) ⊄ Kρ.
    pub outside_k_rho: bool,
    /// 2ρ ∈ π(Λ).
    pub two_rho_in_image: bool,
}

impl ConditionC {
    pub fn holds(&self) -> bool {
        self.outside_k_rho && !self.two_rho_in_image
    }
}

/// Real coordinates (Re π₁, Im π₁, Re π₂, Im π₂) of every generator image,
/// scaled to a common integer matrix (4 × n) together with the scale.
pub(crate) fn pi_integer_matrix(pi: &AdditiveMap) -> Result<(Vec<Vec<i128>>, i128)> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let coords: Vec<Vec<crate::scalar::Rational>> = pi
        .images
        .iter()
        .map(|img| vec![img[0].re.clone(), img[0].im.clone(), img[1].re.clone(), img[1].im.clone()])
        .collect();
    let mut l = num_bigint::BigInt::from(1);
    for c in coords.iter().flatten() {
        l = l.lcm(&c.denom());
    }
    let big = || Error::InvalidParameter("π coordinates too large".into());
    let scale = l.to_i128().ok_or_else(big)?;
    let mut rows = vec![vec![0i128; pi.rank()]; 4];
    for (j, col) in coords.iter().enumerate() {
        for (i, c) in col.iter().enumerate() {
            let v = c.numer() * (&l / c.denom());
            rows[i][j] = v.to_i128().ok_or_else(big)?;
        }
    }
    Ok((rows, scale))
}

pub fn condition_c(pi: &AdditiveMap) -> Result<ConditionC> {
    if pi.dim != 2 {
        return Err(Error::InvalidParameter("π must take values in K²".into()));
    }
    let (rows, scale) = pi_integer_matrix(pi)?;
    let m = ExactMatrix::from_rows(
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x as i64)).collect()).collect(),
    );
    let injective = m.rank() == pi.rank();
    let outside_k_rho = pi.images.iter().any(|img| img[0] != img[1]);
    let target = [2 * scale, 0, 2 * scale, 0];
    let two_rho_in_image = int_solve(&rows, pi.rank(), &target).is_some();
    Ok(ConditionC { injective, outside_k_rho, two_rho_in_image })
}

/// A loop-algebra grading table: degree d = P·q + r (r among P consecutive
/// representatives starting at `rmin`) carries x_r ⊗ T^{K q + k_r}.
struct LoopTable {
    period: i64,
    rmin: i64,
    /// c_fin[a][b]: [x_a, x_b] = c_fin[a][b] · x_{a+b}.
    table: Vec<Vec<Scalar>>,
}

impl LoopTable {
    fn build(rmin: i64, tmult: i64, elems: Vec<(ExactMatrix, i64)>) -> LoopTable {
        let p = elems.len() as i64;
        let mut table = vec![vec![Scalar::zero(); elems.len()]; elems.len()];
        for (a, (xa, ka)) in elems.iter().enumerate() {
            for (b, (xb, kb)) in elems.iter().enumerate() {
                let br = xa.mul(xb).sub(&xb.mul(xa));
                if br.is_zero() {
                    continue;
                }
                let sum = 2 * rmin + a as i64 + b as i64;
                let carry = (sum - rmin).div_euclid(p);
                let t = (sum - rmin).rem_euclid(p) as usize;
                let (xt, kt) = &elems[t];
                assert_eq!(ka + kb, tmult * carry + kt, "inconsistent loop exponents");
                // br = κ·x_t
                let (i, j) = (0..xt.rows)
                    .flat_map(|i| (0..xt.cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !xt.get(i, j).is_zero())
                    .expect("zero basis element");
                let kappa = br.get(i, j) / xt.get(i, j);
                assert_eq!(br, xt.scale(&kappa), "bracket not proportional to basis element");
                table[a][b] = kappa;
            }
        }
        LoopTable { period: p, rmin, table }
    }

    fn index(&self, d: i64) -> usize {
        (d - self.rmin).rem_euclid(self.period) as usize
    }

    fn c(&self, d1: i64, d2: i64) -> Scalar {
        self.table[self.index(d1)][self.index(d2)].clone()
    }
}

fn unit(n: usize, i: usize, j: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(n, n);
    m.set(i, j, Scalar::one());
    m
}

fn sl2_table() -> LoopTable {
    let e = unit(2, 0, 1);
    let f = unit(2, 1, 0);
    let h = unit(2, 0, 0).sub(&unit(2, 1, 1));
    LoopTable::build(-1, 1, vec![(f, 0), (h, 0), (e, 0)])
}

fn sl3_table() -> LoopTable {
    let e1 = unit(3, 0, 1);
    let e2 = unit(3, 1, 2);
    let f1 = unit(3, 1, 0);
    let f2 = unit(3, 2, 1);
    let h1 = unit(3, 0, 0).sub(&unit(3, 1, 1));
    let h2 = unit(3, 1, 1).sub(&unit(3, 2, 2));
    let comm = |a: &ExactMatrix, b: &ExactMatrix| a.mul(b).sub(&b.mul(a));
    LoopTable::build(
        -1,
        2,
        vec![
            (f1.add(&f2), 0),  // 8n−1
            (h1.add(&h2), 0),  // 8n
            (e1.add(&e2), 0),  // 8n+1
            (comm(&f1, &f2), 1), // 8n+2
            (f1.sub(&f2), 1),  // 8n+3
            (h1.sub(&h2), 1),  // 8n+4
            (e1.sub(&e2), 1),  // 8n+5
            (comm(&e1, &e2), 1), // 8n+6
        ],
    )
}

fn rho() -> [Scalar; 2] {
    [Scalar::one(), Scalar::one()]
}

fn field_of(maps: &AdditiveMap) -> Field {
    if maps.images.iter().flatten().all(|x| x.is_real()) {
        Field::Q
    } else {
        Field::Qi
    }
}

/// Construct a catalog algebra. WPi instances violating condition 𝒞 or
/// injectivity are still constructed (useful as negative controls); the
/// provenance tag records the status.
pub fn construct(name: &CatalogName) -> Result<ScalarStructure> {
    Ok(match name {
        CatalogName::Witt => ScalarStructure::with_full_support(GradingGroup::free(1), Field::Q, "witt", |a, b| {
            Scalar::from_int(b.0[0] - a.0[0])
        }),
        CatalogName::GenWitt { l } => {
            if l.dim != 1 {
                return Err(Error::InvalidParameter("l must be scalar-valued".into()));
            }
            let l2 = l.clone();
            ScalarStructure::with_full_support(GradingGroup::free(l.rank()), field_of(l), "gen_witt", move |a, b| {
                l2.apply1(&b.sub(a)).expect("rank checked")
            })
        }
        CatalogName::WPi { pi } => {
            let cc = condition_c(pi)?;
            let tag = format!(
                "wpi[injective={},condition_c={}]",
                cc.injective,
                cc.holds()
            );
            let pi2 = pi.clone();
            ScalarStructure::with_full_support(GradingGroup::free(pi.rank()), field_of(pi), tag, move |a, b| {
                wpi_coeff(&pi2, a, b)
            })
        }
        CatalogName::A1_1 => {
            let t = Arc::new(sl2_table());
            ScalarStructure::with_full_support(GradingGroup::free(1), Field::Q, "a1_1", move |a, b| t.c(a.0[0], b.0[0]))
        }
        CatalogName::A2_2 => {
            let t = Arc::new(sl3_table());
            ScalarStructure::with_full_support(GradingGroup::free(1), Field::Q, "a2_2", move |a, b| t.c(a.0[0], b.0[0]))
        }
        CatalogName::Sl2Gamma3 => {
            let t = Arc::new(sl2_table());
            ScalarStructure::with_full_support(GradingGroup::cyclic(3), Field::Q, "sl2_gamma3", move |a, b| {
                t.c(a.0[0], b.0[0])
            })
        }
        CatalogName::Sl3Gamma8 => {
            let t = Arc::new(sl3_table());
            ScalarStructure::with_full_support(GradingGroup::cyclic(8), Field::Q, "sl3_gamma8", move |a, b| {
                t.c(a.0[0], b.0[0])
            })
        }
    })
}

/// ⟨π(λ)+ρ | π(μ)+ρ⟩.
pub fn wpi_coeff(pi: &AdditiveMap, a: &LatticePoint, b: &LatticePoint) -> Scalar {
    let [a1, a2] = pi.apply2(a).expect("rank checked");
    let [b1, b2] = pi.apply2(b).expect("rank checked");
    let r = rho();
    symplectic_form(&[&a1 + &r[0], &a2 + &r[1]], &[&b1 + &r[0], &b2 + &r[1]])
}

/// π*A for the additive surjection sending the i-th generator of `source` to
/// `images[i]` in A's grading group: c*(λ,μ) = c_A(π(λ), π(μ)).
pub fn pullback(source: &GradingGroup, images: &[LatticePoint], a: &ScalarStructure) -> Result<ScalarStructure> {
    if images.len() != source.rank() {
        return Err(Error::RankMismatch { expected: source.rank(), got: images.len() });
    }
    for img in images {
        a.group.check_rank(img)?;
    }
    if !generates_group(&a.group, images) {
        return Err(Error::NotSurjective(format!(
            "images {} do not generate the target group",
            images.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    let target = a.group.clone();
    let imgs: Vec<LatticePoint> = images.to_vec();
    let project = move |p: &LatticePoint| -> LatticePoint {
        let mut acc = LatticePoint::zero(target.rank());
        for (k, img) in p.0.iter().zip(&imgs) {
            acc = acc.add(&img.scale(*k));
        }
        target.canonical(&acc)
    };
    let project = Arc::new(project);
    let (pa, pb) = (project.clone(), project);
    let (a1, a2) = (a.clone(), a.clone());
    Ok(ScalarStructure::new(
        source.clone(),
        a.field,
        format!("pullback({})", a.provenance),
        move |x, y| a1.c(&pa(x), &pa(y)),
        move |x| a2.in_support(&pb(x)),
    ))
}

/// ℒ ⊗ K[z₁^{±1},…,z_m^{±1}], graded by Λ × ℤ^m.
pub fn imprimitive(s: &ScalarStructure, m: usize) -> Result<ScalarStructure> {
    if m == 0 {
        return Err(Error::InvalidParameter("imprimitive form needs m ≥ 1".into()));
    }
    let n = s.rank();
    let mut moduli = s.group.moduli.clone();
    moduli.extend(std::iter::repeat_n(0, m));
    let (s1, s2) = (s.clone(), s.clone());
    let head = move |p: &LatticePoint| LatticePoint(p.0[..n].to_vec());
    Ok(ScalarStructure::new(
        GradingGroup { moduli },
        s.field,
        format!("imprimitive({},{m})", s.provenance),
        move |a, b| s1.c(&head(a), &head(b)),
        move |p| s2.in_support(&LatticePoint(p.0[..n].to_vec())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeBox;

    fn p(x: i64) -> LatticePoint {
        LatticePoint(vec![x])
    }

    #[test]
    fn a2_2_sample_bracket() {
        let s = construct(&CatalogName::A2_2).unwrap();
        // [e1+e2, f1+f2] = h1+h2
        assert_eq!(s.c(&p(1), &p(-1)), Scalar::one());
        assert_eq!(s.l(&p(1)), Scalar::one());
        assert_eq!(s.l(&p(6)), Scalar::from_int(2));
        assert_eq!(s.l(&p(4)), Scalar::zero());
    }

    #[test]
    fn a1_1_l_values() {
        let s = construct(&CatalogName::A1_1).unwrap();
        for n in -4..=4 {
            assert_eq!(s.l(&p(3 * n + 1)), Scalar::from_int(2));
            assert_eq!(s.l(&p(3 * n)), Scalar::zero());
            assert_eq!(s.l(&p(3 * n - 1)), Scalar::from_int(-2));
        }
    }

    #[test]
    fn wpi_of_witt_map_is_witt() {
        let w = construct(&CatalogName::Witt).unwrap();
        let pi = AdditiveMap::pair(vec![[Scalar::one(), Scalar::zero()]]);
        let s = construct(&CatalogName::WPi { pi }).unwrap();
        for a in -5..=5 {
            for b in -5..=5 {
                assert_eq!(w.c(&p(a), &p(b)), s.c(&p(a), &p(b)));
            }
        }
    }

    #[test]
    fn condition_c_cases() {
        let good = AdditiveMap::pair(vec![[Scalar::one(), Scalar::zero()], [Scalar::zero(), Scalar::i()]]);
        assert!(condition_c(&good).unwrap().holds());
        let bad = AdditiveMap::pair(vec![[Scalar::one(), Scalar::one()], [Scalar::one(), Scalar::zero()]]);
        let c = condition_c(&bad).unwrap();
        assert!(c.two_rho_in_image && !c.holds());
        let diag = AdditiveMap::pair(vec![[Scalar::ratio(1, 3), Scalar::ratio(1, 3)]]);
        assert!(!condition_c(&diag).unwrap().outside_k_rho);
        let noninj = AdditiveMap::pair(vec![[Scalar::one(), Scalar::zero()], [Scalar::from_int(2), Scalar::zero()]]);
        assert!(!condition_c(&noninj).unwrap().injective);
    }

    #[test]
    fn pullback_identity_and_surjectivity() {
        let g3 = construct(&CatalogName::Sl2Gamma3).unwrap();
        let same = pullback(&GradingGroup::cyclic(3), &[p(1)], &g3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(same.c(&p(a), &p(b)), g3.c(&p(a), &p(b)));
            }
        }
        let g8 = construct(&CatalogName::Sl3Gamma8).unwrap();
        assert!(pullback(&GradingGroup::free(1), &[p(2)], &g8).is_err());
        let a1 = construct(&CatalogName::A1_1).unwrap();
        let pb = pullback(&GradingGroup::free(1), &[p(1)], &g3).unwrap();
        let b = LatticeBox::new(6);
        for x in b.points(&pb.group) {
            for y in b.points(&pb.group) {
                assert_eq!(pb.c(&x, &y), a1.c(&x, &y));
            }
        }
    }
}
