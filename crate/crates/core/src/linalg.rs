//! Exact (and tolerance-guarded float) linear algebra over [`Scalar`].
//!
//! Two tools: an incremental sparse echelon form used for large, sparse
//! systems (Haar solves, spans, orbit closures) and a small dense matrix with
//! Gauss-Jordan elimination used for inverses, kernels and characteristic
//! polynomials.

use std::collections::{BTreeMap, HashMap};

use crate::error::{AqgError, Result};
use crate::scalar::Scalar;

pub type SparseRow = BTreeMap<usize, Scalar>;

/// Result of inserting a row into an [`Echelon`].
#[derive(Debug, Clone, PartialEq)]
pub enum Insert {
    /// The row was independent and now owns this pivot column.
    Pivot(usize),
    /// The row reduced to zero.
    Dependent,
    /// The row reduced to a nonzero combination of right-hand-side columns only.
    Inconsistent(SparseRow),
}

/// Incremental row echelon form.
///
/// Columns `>= rhs_start` are right-hand-side columns and never become pivots.
/// Pivots are eliminated in insertion order, which guarantees termination of
/// the reduction loop; [`Echelon::reduced_rows`] back-substitutes to RREF.
#[derive(Debug, Clone)]
pub struct Echelon {
    rows: Vec<(usize, SparseRow)>,
    pivot_of: HashMap<usize, usize>,
    rhs_start: usize,
    tol: f64,
}

fn is_negligible(s: &Scalar, tol: f64) -> bool {
    s.is_zero_tol(tol)
}

/// `row += factor * other`, dropping entries that cancel.
pub fn axpy(row: &mut SparseRow, factor: &Scalar, other: &SparseRow, tol: f64) {
    for (c, v) in other {
        let add = factor * v;
        match row.get_mut(c) {
            Some(x) => {
                *x += &add;
                if is_negligible(x, tol) {
                    row.remove(c);
                }
            }
            None => {
                if !is_negligible(&add, tol) {
                    row.insert(*c, add);
                }
            }
        }
    }
}

impl Echelon {
    pub fn new(rhs_start: usize, tol: f64) -> Self {
        Self { rows: Vec::new(), pivot_of: HashMap::new(), rhs_start, tol }
    }

    /// An echelon with no right-hand side (for spans and ranks).
    pub fn homogeneous(tol: f64) -> Self {
        Self::new(usize::MAX, tol)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of.contains_key(&col)
    }

    /// Reduces `row` against the current pivots.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !is_negligible(v, self.tol));
        loop {
            let next = row
                .keys()
                .filter_map(|c| self.pivot_of.get(c).map(|&i| (i, *c)))
                .min();
            let Some((i, c)) = next else { break };
            let f = -row.remove(&c).expect("pivot entry");
            let prow = &self.rows[i].1;
            for (k, v) in prow {
                if *k == c {
                    continue;
                }
                let add = &f * v;
                match row.get_mut(k) {
                    Some(x) => {
                        *x += &add;
                        if is_negligible(x, self.tol) {
                            row.remove(k);
                        }
                    }
                    None => {
                        if !is_negligible(&add, self.tol) {
                            row.insert(*k, add);
                        }
                    }
                }
            }
        }
        row
    }

    pub fn insert(&mut self, row: SparseRow) -> Insert {
        let row = self.reduce(row);
        let candidate = if self.tol > 0.0 && row.values().any(|v| !v.is_exact()) {
            row.iter()
                .filter(|(c, _)| **c < self.rhs_start)
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(c, _)| *c)
        } else {
            row.keys().copied().find(|c| *c < self.rhs_start)
        };
        match candidate {
            Some(p) => {
                let inv = row[&p].inv().expect("nonzero pivot");
                let mut normalized: SparseRow = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                normalized.insert(p, Scalar::one());
                self.pivot_of.insert(p, self.rows.len());
                self.rows.push((p, normalized));
                Insert::Pivot(p)
            }
            None if row.is_empty() => Insert::Dependent,
            None => Insert::Inconsistent(row),
        }
    }

    /// Fully reduced rows (each pivot column appears only in its own row),
    /// in insertion order.
    pub fn reduced_rows(&self) -> Vec<(usize, SparseRow)> {
        let n = self.rows.len();
        let mut done: Vec<Option<SparseRow>> = vec![None; n];
        for i in (0..n).rev() {
            let (p, row) = &self.rows[i];
            let mut row = row.clone();
            let later: Vec<(usize, usize)> = row
                .keys()
                .filter(|c| **c != *p)
                .filter_map(|c| self.pivot_of.get(c).map(|&j| (j, *c)))
                .collect();
            for (j, c) in later {
                debug_assert!(j > i);
                if let Some(f) = row.remove(&c) {
                    let other = done[j].as_ref().expect("later row reduced");
                    let mut tail = other.clone();
                    tail.remove(&c);
                    axpy(&mut row, &-f, &tail, self.tol);
                }
            }
            done[i] = Some(row);
        }
        self.rows.iter().map(|(p, _)| *p).zip(done.into_iter().map(|r| r.unwrap())).collect()
    }

    /// Particular solution with free variables set to zero.
    ///
    /// Only meaningful with a single right-hand-side column at `rhs_start`.
    pub fn solution(&self) -> BTreeMap<usize, Scalar> {
        let mut out = BTreeMap::new();
        for (p, row) in self.reduced_rows() {
            if let Some(v) = row.get(&self.rhs_start) {
                out.insert(p, v.clone());
            }
        }
        out
    }

    /// Free (non-pivot) columns among `0..ncols`.
    pub fn free_columns(&self, ncols: usize) -> Vec<usize> {
        (0..ncols).filter(|c| !self.pivot_of.contains_key(c)).collect()
    }
}

/// A small dense matrix of scalars, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add_scaled_identity(&self, s: &Scalar) -> DenseMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = self.get(i, i) + s;
            m.set(i, i, v);
        }
        m
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    /// In-place Gauss-Jordan elimination; returns the pivot columns.
    pub fn rref(&mut self, tol: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        let exact = self.is_exact();
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let pick = if exact {
                (r..self.rows).find(|&i| !self.get(i, c).is_zero())
            } else {
                (r..self.rows)
                    .map(|i| (i, self.get(i, c).abs()))
                    .filter(|(_, a)| *a > tol)
                    .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .map(|(i, _)| i)
            };
            let Some(p) = pick else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero_tol(if exact { 0.0 } else { tol }) {
                    if !exact {
                        self.set(i, c, Scalar::zero().to_float());
                    }
                    continue;
                }
                for j in 0..self.cols {
                    let rv = self.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &(&f * rv);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.clone().rref(tol).len()
    }

    /// Basis of the right kernel.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, tol: f64) -> Result<DenseMatrix> {
        if self.rows != self.cols {
            return Err(AqgError::Singular("non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = DenseMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let pivots = aug.rref(tol);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(AqgError::Singular(format!("rank {} < {}", pivots.iter().filter(|p| **p < n).count(), n)));
        }
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Coefficients `c_0..c_n` of `det(xI - A)`, with `c_n = 1`.
    pub fn char_poly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut c = vec![Scalar::zero(); n + 1];
        c[n] = Scalar::one();
        let mut m = DenseMatrix::zeros(n, n);
        for k in 1..=n {
            m = self.mul(&m).add_scaled_identity(&c[n + 1 - k]);
            let am = self.mul(&m);
            c[n - k] = -(&am.trace() / &Scalar::int(k as i64));
        }
        c
    }
}

/// Solves `A x = b` for a square, invertible `A`, via a precomputed inverse.
pub fn apply_inverse(inv: &DenseMatrix, b: &[Scalar]) -> Vec<Scalar> {
    inv.mul_vec(b)
}

/// Exact LDL* test for Hermitian positive definiteness.
///
/// Returns the diagonal pivots; all must be positive rationals.
pub fn ldl_pivots(g: &DenseMatrix) -> Result<Vec<Scalar>> {
    let n = g.rows;
    let mut a = g.clone();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let d = a.get(k, k).clone();
        if d.is_zero() {
            return Err(AqgError::Singular(format!("zero pivot at {k}")));
        }
        let dinv = d.inv()?;
        for i in (k + 1)..n {
            let f = a.get(i, k) * &dinv;
            if f.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let v = a.get(i, j) - &(&f * a.get(k, j));
                a.set(i, j, v);
            }
        }
        pivots.push(d);
    }
    Ok(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|(c, v)| (*c, Scalar::int(*v))).collect()
    }

    #[test]
    fn echelon_solves_small_system() {
        // x + y = 3, x - y = 1, 2x + 2y = 6  =>  x = 2, y = 1
        let mut e = Echelon::new(2, 0.0);
        assert!(matches!(e.insert(row(&[(0, 1), (1, 1), (2, 3)])), Insert::Pivot(_)));
        assert!(matches!(e.insert(row(&[(0, 1), (1, -1), (2, 1)])), Insert::Pivot(_)));
        assert_eq!(e.insert(row(&[(0, 2), (1, 2), (2, 6)])), Insert::Dependent);
        let s = e.solution();
        assert_eq!(s[&0], Scalar::int(2));
        assert_eq!(s[&1], Scalar::int(1));
        assert!(matches!(e.insert(row(&[(0, 1), (2, 5)])), Insert::Inconsistent(_)));
    }

    #[test]
    fn dense_inverse_and_kernel() {
        let m = DenseMatrix::from_columns(2, &[vec![Scalar::int(2), Scalar::int(1)], vec![Scalar::int(1), Scalar::int(1)]]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), DenseMatrix::identity(2));
        let s = DenseMatrix::from_columns(2, &[vec![Scalar::int(1), Scalar::int(2)], vec![Scalar::int(2), Scalar::int(4)]]);
        let k = s.nullspace(0.0);
        assert_eq!(k.len(), 1);
        assert!(s.mul_vec(&k[0]).iter().all(Scalar::is_zero));
        assert!(s.inverse(0.0).is_err());
    }

    #[test]
    fn char_poly_of_diagonal() {
        let mut m = DenseMatrix::zeros(3, 3);
        m.set(0, 0, Scalar::int(2));
        m.set(1, 1, Scalar::ratio(1, 2));
        m.set(2, 2, Scalar::int(2));
        // (x-2)^2 (x-1/2) = x^3 - 9/2 x^2 + 6 x - 2
        let c = m.char_poly();
        assert_eq!(c, vec![Scalar::int(-2), Scalar::int(6), Scalar::ratio(-9, 2), Scalar::one()]);
    }

    #[test]
    fn ldl_detects_indefinite() {
        let g = DenseMatrix::from_columns(2, &[vec![Scalar::int(1), Scalar::int(2)], vec![Scalar::int(2), Scalar::int(1)]]);
        let p = ldl_pivots(&g).unwrap();
        assert_eq!(p[1], Scalar::int(-3));
    }
}
