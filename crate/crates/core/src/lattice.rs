//! Lattice points, grading groups, symmetric boxes, additive maps, the
//! symplectic form on K², and integer-lattice utilities (echelon forms over ℤ).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A degree: integer coordinates with respect to the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticePoint(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| a * k).collect())
    }

    /// Max-norm of the coordinates.
    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// The grading group ℤ^a × ∏ ℤ/mᵢ, one modulus per coordinate (0 = free).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradingGroup {
    pub moduli: Vec<u64>,
}

impl GradingGroup {
    pub fn free(rank: usize) -> Self {
        GradingGroup { moduli: vec![0; rank] }
    }

    pub fn cyclic(m: u64) -> Self {
        GradingGroup { moduli: vec![m] }
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_free(&self) -> bool {
        self.moduli.iter().all(|&m| m == 0)
    }

    /// Reduce torsion coordinates to residues in [0, m).
    pub fn canonical(&self, p: &LatticePoint) -> LatticePoint {
        if self.is_free() {
            return p.clone();
        }
        LatticePoint(
            p.0.iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| if m == 0 { x } else { x.rem_euclid(m as i64) })
                .collect(),
        )
    }

    pub fn add(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        self.canonical(&a.add(b))
    }

    pub fn neg(&self, a: &LatticePoint) -> LatticePoint {
        self.canonical(&a.neg())
    }

    pub fn check_rank(&self, p: &LatticePoint) -> Result<()> {
        if p.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: p.rank() });
        }
        Ok(())
    }
}

/// The symmetric box {λ : |λᵢ| ≤ N} on free coordinates (all residues on
/// torsion coordinates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBox {
    pub radius: i64,
}

impl LatticeBox {
    pub fn new(radius: i64) -> Self {
        assert!(radius >= 0, "box radius must be non-negative");
        LatticeBox { radius }
    }

    pub fn contains(&self, group: &GradingGroup, p: &LatticePoint) -> bool {
        p.0.iter()
            .zip(&group.moduli)
            .all(|(&x, &m)| m != 0 || x.abs() <= self.radius)
    }

    /// All points, in lexicographic order of canonical coordinates.
    pub fn points(&self, group: &GradingGroup) -> Vec<LatticePoint> {
        let ranges: Vec<(i64, i64)> = group
            .moduli
            .iter()
            .map(|&m| if m == 0 { (-self.radius, self.radius) } else { (0, m as i64 - 1) })
            .collect();
        let mut out = vec![Vec::with_capacity(ranges.len())];
        for &(lo, hi) in &ranges {
            let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
            for prefix in &out {
                for x in lo..=hi {
                    let mut v = prefix.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(LatticePoint).collect()
    }

    /// Dense index of a contained point (matches the order of `points`).
    pub fn index_of(&self, group: &GradingGroup, p: &LatticePoint) -> Option<usize> {
        let mut idx = 0usize;
        for (&x, &m) in p.0.iter().zip(&group.moduli) {
            let (off, width) = if m == 0 {
                if x.abs() > self.radius {
                    return None;
                }
                (x + self.radius, 2 * self.radius + 1)
            } else {
                (x.rem_euclid(m as i64), m as i64)
            };
            idx = idx * width as usize + off as usize;
        }
        Some(idx)
    }

    pub fn size(&self, group: &GradingGroup) -> usize {
        group
            .moduli
            .iter()
            .map(|&m| if m == 0 { 2 * self.radius as usize + 1 } else { m as usize })
            .product()
    }

    pub fn shrink(&self, by: i64) -> LatticeBox {
        LatticeBox::new((self.radius - by).max(0))
    }
}

/// ⟨(a,b)|(c,d)⟩ = b·c − a·d.
///
/// The orientation is the one for which E_{(n,0)} ↦ L_n reproduces the Witt
/// bracket: ⟨(n+1,1)|(m+1,1)⟩ = (m+1) − (n+1) = m − n.
pub fn symplectic_form(u: &[Scalar; 2], v: &[Scalar; 2]) -> Scalar {
    &(&u[1] * &v[0]) - &(&u[0] * &v[1])
}

/// An additive map Λ → K^d given by the images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveMap {
    /// `images[i]` is the image of the i-th generator (length d each).
    pub images: Vec<Vec<Scalar>>,
    pub dim: usize,
}

impl AdditiveMap {
    pub fn new(images: Vec<Vec<Scalar>>) -> Result<Self> {
        let dim = images.first().map(|v| v.len()).unwrap_or(1);
        if images.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter("generator images of unequal length".into()));
        }
        Ok(AdditiveMap { images, dim })
    }

    /// Scalar-valued map (d = 1).
    pub fn scalar(images: Vec<Scalar>) -> Self {
        AdditiveMap { images: images.into_iter().map(|x| vec![x]).collect(), dim: 1 }
    }

    /// K²-valued map (d = 2).
    pub fn pair(images: Vec<[Scalar; 2]>) -> Self {
        AdditiveMap { images: images.into_iter().map(|[a, b]| vec![a, b]).collect(), dim: 2 }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, p: &LatticePoint) -> Result<Vec<Scalar>> {
        if p.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: p.rank() });
        }
        let mut out = vec![Scalar::zero(); self.dim];
        for (img, &k) in self.images.iter().zip(&p.0) {
            if k == 0 {
                continue;
            }
            let k = Scalar::from_int(k);
            for (o, g) in out.iter_mut().zip(img) {
                *o += &(&k * g);
            }
        }
        Ok(out)
    }

    /// Scalar value of a d = 1 map.
    pub fn apply1(&self, p: &LatticePoint) -> Result<Scalar> {
        Ok(self.apply(p)?.swap_remove(0))
    }

    /// Pair value of a d = 2 map.
    pub fn apply2(&self, p: &LatticePoint) -> Result<[Scalar; 2]> {
        let mut v = self.apply(p)?;
        let b = v.pop().unwrap_or_else(Scalar::zero);
        let a = v.pop().unwrap_or_else(Scalar::zero);
        Ok([a, b])
    }

    /// Componentwise image under a K-linear map given by a d'×d matrix.
    pub fn compose_linear(&self, m: &[Vec<Scalar>]) -> AdditiveMap {
        let images = self
            .images
            .iter()
            .map(|img| {
                m.iter()
                    .map(|row| row.iter().zip(img).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        AdditiveMap { images, dim: m.len() }
    }
}

/// Apply an additive map; errors on rank mismatch.
pub fn apply_map(m: &AdditiveMap, p: &LatticePoint) -> Result<Vec<Scalar>> {
    m.apply(p)
}

// ---------------------------------------------------------------------------
// Integer lattices.

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g ≥ 0
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Column echelon form of an integer matrix: `a · u = h` with `u` unimodular.
/// Returns (h, u, pivot rows); columns of `h` past the pivots are zero, so the
/// matching columns of `u` span the integer kernel.
pub struct IntEchelon {
    pub h: Vec<Vec<i128>>,
    pub u: Vec<Vec<i128>>,
    pub pivot_rows: Vec<usize>,
}

pub fn int_column_echelon(a: &[Vec<i128>], ncols: usize) -> IntEchelon {
    let m = a.len();
    let mut h: Vec<Vec<i128>> = a.to_vec();
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |mat: &mut Vec<Vec<i128>>, c1: usize, c2: usize, x: i128, y: i128, z: i128, w: i128| {
        // (col c1, col c2) ← (x·c1 + y·c2, z·c1 + w·c2)
        for row in mat.iter_mut() {
            let (p, q) = (row[c1], row[c2]);
            row[c1] = x * p + y * q;
            row[c2] = z * p + w * q;
        }
    };
    let mut pivot_rows = Vec::new();
    let mut pc = 0;
    for r in 0..m {
        if pc >= ncols {
            break;
        }
        for c in pc + 1..ncols {
            let (p, q) = (h[r][pc], h[r][c]);
            if q == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(p, q);
            // [x -q/g; y p/g] has determinant (x p + y q)/g = 1.
            let (z, w) = (-q / g, p / g);
            col_op(&mut h, pc, c, x, y, z, w);
            col_op(&mut u, pc, c, x, y, z, w);
        }
        if h[r][pc] != 0 {
            if h[r][pc] < 0 {
                for row in h.iter_mut() {
                    row[pc] = -row[pc];
                }
                for row in u.iter_mut() {
                    row[pc] = -row[pc];
                }
            }
            // Reduce earlier pivot columns modulo this pivot for a canonical form.
            for c in 0..pc {
                let q = h[r][c].div_euclid(h[r][pc]);
                if q != 0 {
                    col_op(&mut h, c, pc, 1, -q, 0, 1);
                    col_op(&mut u, c, pc, 1, -q, 0, 1);
                }
            }
            pivot_rows.push(r);
            pc += 1;
        }
    }
    IntEchelon { h, u, pivot_rows }
}

/// Basis (as columns) of the integer kernel of `a` (m × n).
pub fn int_kernel(a: &[Vec<i128>], ncols: usize) -> Vec<Vec<i128>> {
    let e = int_column_echelon(a, ncols);
    let r = e.pivot_rows.len();
    (r..ncols).map(|c| e.u.iter().map(|row| row[c]).collect()).collect()
}

/// An integer solution of `a · k = b`, if one exists.
pub fn int_solve(a: &[Vec<i128>], ncols: usize, b: &[i128]) -> Option<Vec<i128>> {
    let e = int_column_echelon(a, ncols);
    let r = e.pivot_rows.len();
    let mut y = vec![0i128; ncols];
    let mut resid: Vec<i128> = b.to_vec();
    for (j, &pr) in e.pivot_rows.iter().enumerate() {
        let piv = e.h[pr][j];
        if resid[pr] % piv != 0 {
            return None;
        }
        y[j] = resid[pr] / piv;
        for (row, res) in e.h.iter().zip(resid.iter_mut()) {
            *res -= row[j] * y[j];
        }
    }
    if resid.iter().any(|&x| x != 0) {
        return None;
    }
    let _ = r;
    Some((0..ncols).map(|i| (0..ncols).map(|j| e.u[i][j] * y[j]).sum()).collect())
}

/// Hermite basis of the subgroup of ℤⁿ generated by `gens`.
pub fn int_span_basis(gens: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let a: Vec<Vec<i128>> = (0..n)
        .map(|i| gens.iter().map(|g| g[i] as i128).collect())
        .collect();
    let e = int_column_echelon(&a, gens.len());
    (0..e.pivot_rows.len())
        .map(|c| e.h.iter().map(|row| row[c] as i64).collect())
        .collect()
}

/// Whether `gens` generate the group (torsion coordinates are taken modulo mᵢ).
pub fn generates_group(group: &GradingGroup, gens: &[LatticePoint]) -> bool {
    let n = group.rank();
    let mut cols: Vec<Vec<i64>> = gens.iter().map(|g| g.0.clone()).collect();
    for (i, &m) in group.moduli.iter().enumerate() {
        if m != 0 {
            let mut v = vec![0; n];
            v[i] = m as i64;
            cols.push(v);
        }
    }
    let basis = int_span_basis(&cols, n);
    if basis.len() != n {
        return false;
    }
    // Lower-triangular with positive pivots; index = product of pivots.
    let mut prow = 0;
    let mut index: i128 = 1;
    for col in &basis {
        while prow < n && col[prow] == 0 {
            prow += 1;
        }
        index *= col[prow] as i128;
        prow += 1;
    }
    index == 1
}
