//! Exact dense matrices over ℚ(i) with fraction-free elimination.
//!
//! Rows are first scaled to Gaussian-integer entries; Bareiss elimination then
//! keeps every intermediate entry a Gaussian integer (each division is exact),
//! which bounds coefficient growth. Pivot choice: the first non-zero entry in
//! column order, so results are deterministic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ExactMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> ExactMatrix {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }

    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        nullspace(self)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn lcm_denominators(row: &[Scalar]) -> BigInt {
    let mut l = BigInt::one();
    for x in row {
        for part in [&x.re, &x.im] {
            let d = part.denom();
            if !d.is_one() {
                l = l.lcm(&d);
            }
        }
    }
    l
}

/// Row echelon form produced by Bareiss elimination over ℤ[i].
pub struct Echelon {
    /// Echelon rows (Gaussian-integer entries), one per pivot, in pivot order.
    pub rows: Vec<Vec<Scalar>>,
    /// Pivot column of each echelon row.
    pub pivots: Vec<usize>,
    /// For each echelon row, the index of the source row it came from.
    pub source_rows: Vec<usize>,
}

pub fn echelon(m: &ExactMatrix) -> Echelon {
    let mut a: Vec<Vec<Scalar>> = Vec::with_capacity(m.rows);
    let mut origin: Vec<usize> = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let row = m.row(i);
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let l = Scalar::from_rational(Rational::from_bigs(lcm_denominators(row), BigInt::one()));
        a.push(if l.is_one() { row.to_vec() } else { row.iter().map(|x| x * &l).collect() });
        origin.push(i);
    }
    let n = a.len();
    let mut prev = Scalar::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r >= n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        origin.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for j in c..m.cols {
                // Bareiss: (piv·a_ij − f·a_rj) / prev is exact in ℤ[i].
                let v = &(&piv * &row[j]) - &(&f * &pivot_row[j]);
                row[j] = if prev.is_one() { v } else { &v / &prev };
            }
            for x in row.iter_mut().take(c) {
                *x = Scalar::zero();
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    origin.truncate(r);
    Echelon { rows: a, pivots, source_rows: origin }
}

/// Basis of the right nullspace: one vector per free column, with that free
/// variable set to 1 and the other free variables 0.
pub fn nullspace(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let e = echelon(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&j| !is_pivot[j]) {
        let mut x = vec![Scalar::zero(); m.cols];
        x[free] = Scalar::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots).rev() {
            let mut acc = Scalar::zero();
            for j in p + 1..m.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc += &(&row[j] * &x[j]);
                }
            }
            x[p] = -(&acc / &row[p]);
        }
        basis.push(x);
    }
    basis
}

/// One solution of `m · x = b`, or `None` when inconsistent.
pub fn solve(m: &ExactMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows);
    let mut aug = ExactMatrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols, b[i].clone());
    }
    let e = echelon(&aug);
    if e.pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for (row, &p) in e.rows.iter().zip(&e.pivots).rev() {
        let mut acc = row[m.cols].clone();
        for j in p + 1..m.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= &(&row[j] * &x[j]);
            }
        }
        x[p] = &acc / &row[p];
    }
    Some(x)
}

/// Rank of a list of vectors (as rows).
pub fn rank_of_rows(rows: &[Vec<Scalar>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(rows.to_vec()).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_trivial_nullspace() {
        assert!(ExactMatrix::identity(3).nullspace().is_empty());
    }

    #[test]
    fn zero_matrix_nullspace_is_everything() {
        assert_eq!(ExactMatrix::zeros(2, 3).nullspace().len(), 3);
    }

    #[test]
    fn rank_one_example() {
        let m = ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        // proportional to (2, -1)
        assert_eq!(&v[0] * &Scalar::from_int(-1), &v[1] * &Scalar::from_int(2));
        assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn gaussian_entries() {
        let i = Scalar::i();
        let one = Scalar::one();
        let half: Scalar = "1/2".parse().unwrap();
        let m = ExactMatrix::from_rows(vec![
            vec![one.clone(), i.clone(), half.clone()],
            vec![i.clone(), -one.clone(), &half * &i],
        ]);
        assert_eq!(m.rank(), 1);
        for v in m.nullspace() {
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
        let b = vec![Scalar::from_int(2), &Scalar::from_int(2) * &i];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        assert!(solve(&m, &[one.clone(), one]).is_none());
    }
}
