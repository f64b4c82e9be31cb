//! Exact linear algebra: sparse matrices, reduced row echelon form, kernels,
//! images and subspace arithmetic. Vectors are column vectors; a matrix of a
//! map `V -> W` has `dim W` rows and `dim V` columns.

use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("second subspace is not contained in the first")]
    NotASubspace,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Vector<K> = Vec<<K as Field>::Elem>;

/// Row-sparse matrix. Each row holds `(col, value)` pairs sorted by column,
/// with no explicit zeros, so structural equality is numerical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<K: Field> {
    field: K,
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, K::Elem)>>,
}

impl<K: Field> Matrix<K> {
    pub fn zero(field: K, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(field: K, n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    pub fn scalar(field: K, n: usize, s: K::Elem) -> Self {
        if field.is_zero(&s) {
            return Self::zero(field, n, n);
        }
        let data = (0..n).map(|i| vec![(i, s.clone())]).collect();
        Matrix { field, rows: n, cols: n, data }
    }

    /// Diagonal matrix (zeros on the diagonal are dropped).
    pub fn diagonal(field: K, diag: Vec<K::Elem>) -> Self {
        let n = diag.len();
        Self::from_triples(field, n, n, diag.into_iter().enumerate().map(|(i, v)| (i, i, v)))
    }

    /// Build from triples; duplicate positions are summed, zeros dropped.
    pub fn from_triples<I>(field: K, rows: usize, cols: usize, triples: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, K::Elem)>,
    {
        let mut data: Vec<Vec<(usize, K::Elem)>> = vec![Vec::new(); rows];
        for (r, c, v) in triples {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            data[r].push((c, v));
        }
        for row in data.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, K::Elem)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 = field.add(&last.1, &v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| !field.is_zero(&e.1));
            *row = merged;
        }
        Matrix { field, rows, cols, data }
    }

    pub fn from_dense(field: K, rows: usize, cols: usize, dense: &[Vector<K>]) -> Self {
        assert_eq!(dense.len(), rows);
        let data = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols);
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !field.is_zero(v))
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        Matrix { field, rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: K, rows: usize, columns: &[Vector<K>]) -> Self {
        let cols = columns.len();
        let triples = columns.iter().enumerate().flat_map(|(c, v)| {
            assert_eq!(v.len(), rows);
            v.iter()
                .enumerate()
                .filter(|(_, x)| !field.is_zero(x))
                .map(move |(r, x)| (r, c, x.clone()))
        });
        Self::from_triples(field, rows, cols, triples)
    }

    pub fn field(&self) -> K {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_entries(&self, r: usize) -> &[(usize, K::Elem)] {
        &self.data[r]
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &K::Elem)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> K::Elem {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vector<K>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in self.triples() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn column(&self, c: usize) -> Vector<K> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vector<K>> {
        let mut out = vec![vec![self.field.zero(); self.rows]; self.cols];
        for (r, c, v) in self.triples() {
            out[c][r] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let t = self.triples().map(|(r, c, v)| (c, r, v.clone()));
        Self::from_triples(self.field, self.cols, self.rows, t)
    }

    pub fn mul(&self, other: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, other.rows, "mul shape {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let k = self.field;
        let mut acc: Vec<Option<K::Elem>> = vec![None; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            for (j, a) in row {
                for (c, b) in &other.data[*j] {
                    let p = k.mul(a, b);
                    match &mut acc[*c] {
                        Some(x) => *x = k.add(x, &p),
                        slot @ None => {
                            *slot = Some(p);
                            touched.push(*c);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut out_row = Vec::with_capacity(touched.len());
            for c in touched.drain(..) {
                let v = acc[c].take().unwrap();
                if !k.is_zero(&v) {
                    out_row.push((c, v));
                }
            }
            data.push(out_row);
        }
        Matrix { field: k, rows: self.rows, cols: other.cols, data }
    }

    pub fn apply(&self, v: &[K::Elem]) -> Vector<K> {
        assert_eq!(v.len(), self.cols);
        let k = self.field;
        self.data
            .iter()
            .map(|row| {
                row.iter().fold(k.zero(), |s, (c, a)| {
                    if k.is_zero(&v[*c]) {
                        s
                    } else {
                        k.add(&s, &k.mul(a, &v[*c]))
                    }
                })
            })
            .collect()
    }

    fn combine(&self, other: &Matrix<K>, sign: bool) -> Matrix<K> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        let k = self.field;
        let t = self.triples().map(|(r, c, v)| (r, c, v.clone())).chain(
            other
                .triples()
                .map(|(r, c, v)| (r, c, if sign { k.neg(v) } else { v.clone() })),
        );
        Self::from_triples(k, self.rows, self.cols, t)
    }

    pub fn add(&self, other: &Matrix<K>) -> Matrix<K> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Matrix<K>) -> Matrix<K> {
        self.combine(other, true)
    }

    pub fn scale(&self, s: &K::Elem) -> Matrix<K> {
        let k = self.field;
        let t = self.triples().map(|(r, c, v)| (r, c, k.mul(s, v)));
        Self::from_triples(k, self.rows, self.cols, t)
    }

    pub fn neg(&self) -> Matrix<K> {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn pow(&self, e: usize) -> Matrix<K> {
        assert_eq!(self.rows, self.cols);
        let mut out = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Scale rows by per-row factors.
    pub fn scale_rows(&self, factors: &[K::Elem]) -> Matrix<K> {
        let k = self.field;
        let t = self.triples().map(|(r, c, v)| (r, c, k.mul(&factors[r], v)));
        Self::from_triples(k, self.rows, self.cols, t)
    }

    /// Scale columns by per-column factors.
    pub fn scale_cols(&self, factors: &[K::Elem]) -> Matrix<K> {
        let k = self.field;
        let t = self.triples().map(|(r, c, v)| (r, c, k.mul(&factors[c], v)));
        Self::from_triples(k, self.rows, self.cols, t)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<K> {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (i, c) in cols.iter().enumerate() {
            col_pos[*c] = i;
        }
        let t = rows.iter().enumerate().flat_map(|(i, r)| {
            let col_pos = &col_pos;
            self.data[*r]
                .iter()
                .filter(move |(c, _)| col_pos[*c] != usize::MAX)
                .map(move |(c, v)| (i, col_pos[*c], v.clone()))
        });
        Self::from_triples(self.field, rows.len(), cols.len(), t)
    }

    /// Assemble a block matrix from `(block_row, block_col, matrix)` entries.
    pub fn from_blocks(field: K, row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, &Matrix<K>)]) -> Matrix<K> {
        let row_off: Vec<usize> = offsets(row_sizes);
        let col_off: Vec<usize> = offsets(col_sizes);
        let rows = row_sizes.iter().sum();
        let cols = col_sizes.iter().sum();
        let t = blocks.iter().flat_map(|(bi, bj, m)| {
            assert_eq!((m.rows, m.cols), (row_sizes[*bi], col_sizes[*bj]), "block ({bi},{bj}) shape");
            let (ro, co) = (row_off[*bi], col_off[*bj]);
            m.triples().map(move |(r, c, v)| (r + ro, c + co, v.clone()))
        });
        Self::from_triples(field, rows, cols, t)
    }

    pub fn block_diag(field: K, ms: &[&Matrix<K>]) -> Matrix<K> {
        let rs: Vec<usize> = ms.iter().map(|m| m.rows).collect();
        let cs: Vec<usize> = ms.iter().map(|m| m.cols).collect();
        let blocks: Vec<(usize, usize, &Matrix<K>)> = ms.iter().enumerate().map(|(i, m)| (i, i, *m)).collect();
        Self::from_blocks(field, &rs, &cs, &blocks)
    }

    pub fn rank(&self) -> usize {
        reduce(self).rank
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .iter()
        .map(|s| {
            let o = acc;
            acc += s;
            o
        })
        .collect()
}

/// Result of row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced<K: Field> {
    pub rref: Matrix<K>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan on dense rows in place; returns pivot columns.
/// The pivot row for a column is the first remaining row with a nonzero entry.
pub fn rref_rows<K: Field>(k: &K, rows: &mut Vec<Vector<K>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !k.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = k.inv(&rows[r][c]).unwrap();
        if !k.is_one(&inv) {
            for x in rows[r][c..].iter_mut() {
                *x = k.mul(x, &inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || k.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !k.is_zero(y) {
                    *x = k.sub(x, &k.mul(&f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r.max(0));
    pivots
}

/// Reduced row echelon form. Zero rows are kept at the bottom so the shape is preserved.
pub fn reduce<K: Field>(m: &Matrix<K>) -> Reduced<K> {
    let k = m.field;
    let mut rows = m.to_dense();
    let pivots = rref_rows(&k, &mut rows, m.cols);
    let rank = pivots.len();
    rows.resize(m.rows, vec![k.zero(); m.cols]);
    Reduced { rref: Matrix::from_dense(k, m.rows, m.cols, &rows), pivots, rank }
}

/// A subspace of `k^ambient`, stored as the rows of its reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace<K: Field> {
    field: K,
    ambient: usize,
    basis: Vec<Vector<K>>,
    pivots: Vec<usize>,
}

impl<K: Field> Subspace<K> {
    pub fn zero(field: K, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: K, ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| unit_vector(&field, ambient, i)).collect();
        Subspace { field, ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(field: K, ambient: usize, vecs: Vec<Vector<K>>) -> Self {
        let mut rows: Vec<Vector<K>> = vecs.into_iter().inspect(|v| assert_eq!(v.len(), ambient)).collect();
        let pivots = rref_rows(&field, &mut rows, ambient);
        Subspace { field, ambient, basis: rows, pivots }
    }

    /// Span of the columns of `m`.
    pub fn column_space(m: &Matrix<K>) -> Self {
        Self::from_vectors(m.field, m.rows, m.columns())
    }

    pub fn field(&self) -> K {
        self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vector<K>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns = basis vectors (`ambient x dim`).
    pub fn basis_matrix(&self) -> Matrix<K> {
        Matrix::from_columns(self.field, self.ambient, &self.basis)
    }

    /// Subtract the basis components at pivot positions.
    pub fn reduce_vec(&self, v: &[K::Elem]) -> Vector<K> {
        let k = &self.field;
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if k.is_zero(&w[p]) {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !k.is_zero(y) {
                    *x = k.sub(x, &k.mul(&f, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[K::Elem]) -> bool {
        self.reduce_vec(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Coordinates with respect to the echelon basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[K::Elem]) -> Option<Vector<K>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace<K>) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    fn check_ambient(&self, other: &Subspace<K>) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace<K>) -> Result<Subspace<K>, LinalgError> {
        self.check_ambient(other)?;
        let vecs = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace::from_vectors(self.field, self.ambient, vecs))
    }

    pub fn intersect(&self, other: &Subspace<K>) -> Result<Subspace<K>, LinalgError> {
        self.check_ambient(other)?;
        let k = self.field;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(k, self.ambient));
        }
        // kernel of [U | V]: each (a, b) gives sum a_i u_i in the intersection
        let cols: Vec<Vector<K>> = self.basis.iter().chain(&other.basis).cloned().collect();
        let m = Matrix::from_columns(k, self.ambient, &cols);
        let (ker, _) = kernel_image(&m);
        let u = self.basis_matrix();
        let vecs = ker
            .basis
            .iter()
            .map(|z| u.apply(&z[..self.dim()]))
            .collect();
        Ok(Subspace::from_vectors(k, self.ambient, vecs))
    }

    /// Quotient `self / v`; requires `v ⊆ self`.
    pub fn quotient(&self, v: &Subspace<K>) -> Result<Quotient<K>, LinalgError> {
        self.check_ambient(v)?;
        if !self.contains_subspace(v) {
            return Err(LinalgError::NotASubspace);
        }
        let reduced = self.basis.iter().map(|u| v.reduce_vec(u)).collect();
        let lifts = Subspace::from_vectors(self.field, self.ambient, reduced);
        Ok(Quotient { sub: v.clone(), lifts })
    }

    /// Image of the subspace under `m`.
    pub fn image_under(&self, m: &Matrix<K>) -> Subspace<K> {
        assert_eq!(m.cols, self.ambient);
        let vecs = self.basis.iter().map(|b| m.apply(b)).collect();
        Subspace::from_vectors(self.field, m.rows, vecs)
    }

    /// Preimage of the subspace under `m`.
    pub fn preimage_under(&self, m: &Matrix<K>) -> Subspace<K> {
        assert_eq!(m.rows, self.ambient);
        // v with m v in self: kernel of (projection killing self) . m
        let k = self.field;
        let reduced: Vec<Vector<K>> = m.columns().iter().map(|c| self.reduce_vec(c)).collect();
        let comp = Matrix::from_columns(k, self.ambient, &reduced);
        kernel_image(&comp).0
    }

    pub fn is_stable_under(&self, m: &Matrix<K>) -> bool {
        self.basis.iter().all(|b| self.contains(&m.apply(b)))
    }
}

/// A quotient `U / V` with echelon lifts of a complement of `V` in `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient<K: Field> {
    pub sub: Subspace<K>,
    pub lifts: Subspace<K>,
}

impl<K: Field> Quotient<K> {
    pub fn dim(&self) -> usize {
        self.lifts.dim()
    }

    pub fn lift(&self, i: usize) -> &Vector<K> {
        &self.lifts.basis[i]
    }

    /// Class coordinates of `w`; `None` unless `w` lies in `U`.
    pub fn coords(&self, w: &[K::Elem]) -> Option<Vector<K>> {
        self.lifts.coords(&self.sub.reduce_vec(w))
    }

    /// Matrix (`dim x ambient`) sending a vector of `U` to its class coordinates.
    /// Only meaningful on `U`.
    pub fn projection(&self) -> Matrix<K> {
        let k = self.sub.field;
        let n = self.sub.ambient;
        let cols: Vec<Vector<K>> = (0..n)
            .map(|j| {
                let e = unit_vector(&k, n, j);
                let r = self.sub.reduce_vec(&e);
                self.lifts.pivots.iter().map(|&p| r[p].clone()).collect()
            })
            .collect();
        Matrix::from_columns(k, self.dim(), &cols)
    }
}

pub fn unit_vector<K: Field>(k: &K, n: usize, i: usize) -> Vector<K> {
    let mut v = vec![k.zero(); n];
    v[i] = k.one();
    v
}

/// Kernel (in the source) and image (in the target) of `m`.
pub fn kernel_image<K: Field>(m: &Matrix<K>) -> (Subspace<K>, Subspace<K>) {
    let k = m.field;
    let red = reduce(m);
    let dense = red.rref.to_dense();
    let mut is_pivot = vec![false; m.cols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    let mut kernel = Vec::new();
    for f in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![k.zero(); m.cols];
        v[f] = k.one();
        for (r, &p) in red.pivots.iter().enumerate() {
            v[p] = k.neg(&dense[r][f]);
        }
        kernel.push(v);
    }
    let image = Subspace::column_space(m);
    (Subspace::from_vectors(k, m.cols, kernel), image)
}

/// Result of [`subspace_arith`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceArith<K: Field> {
    pub sum: Subspace<K>,
    pub intersection: Subspace<K>,
    /// Present when `v ⊆ u`.
    pub quotient: Option<Quotient<K>>,
}

pub fn subspace_arith<K: Field>(u: &Subspace<K>, v: &Subspace<K>) -> Result<SubspaceArith<K>, LinalgError> {
    let sum = u.sum(v)?;
    let intersection = u.intersect(v)?;
    let quotient = if u.contains_subspace(v) { Some(u.quotient(v)?) } else { None };
    Ok(SubspaceArith { sum, intersection, quotient })
}

/// Some `x` with `m x = b`.
pub fn solve<K: Field>(m: &Matrix<K>, b: &[K::Elem]) -> Option<Vector<K>> {
    let k = m.field;
    assert_eq!(b.len(), m.rows);
    let mut rows = m.to_dense();
    for (row, bi) in rows.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let pivots = rref_rows(&k, &mut rows, m.cols + 1);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![k.zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = rows[r][m.cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(v: i64) -> BigRational {
        Rationals.from_i64(v)
    }

    #[test]
    fn reduce_identity_and_zero() {
        let k = Rationals;
        let id = Matrix::identity(k, 2);
        let r = reduce(&id);
        assert_eq!(r.rref, id);
        assert_eq!(r.pivots, vec![0, 1]);
        let z = Matrix::zero(k, 3, 3);
        let r = reduce(&z);
        assert_eq!(r.rref, z);
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn reduce_over_f5() {
        let k = PrimeField::new(5).unwrap();
        let m = Matrix::from_dense(k, 2, 2, &[vec![2, 4], vec![1, 2]]);
        let r = reduce(&m);
        assert_eq!(r.rref.to_dense(), vec![vec![1, 2], vec![0, 0]]);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn kernel_image_ones() {
        let k = Rationals;
        let m = Matrix::from_dense(k, 2, 2, &[vec![q(1), q(1)], vec![q(1), q(1)]]);
        let (ker, im) = kernel_image(&m);
        assert_eq!(ker, Subspace::from_vectors(k, 2, vec![vec![q(1), q(-1)]]));
        assert_eq!(im, Subspace::from_vectors(k, 2, vec![vec![q(1), q(1)]]));
        let (ker, im) = kernel_image(&Matrix::identity(k, 2));
        assert_eq!((ker.dim(), im.dim()), (0, 2));
        let (ker, im) = kernel_image(&Matrix::zero(k, 2, 2));
        assert_eq!((ker.dim(), im.dim()), (2, 0));
    }

    #[test]
    fn subspace_basic_arith() {
        let k = Rationals;
        let u = Subspace::from_vectors(k, 2, vec![vec![q(1), q(2)]]);
        let a = subspace_arith(&u, &u).unwrap();
        assert_eq!(a.intersection, u);
        assert_eq!(a.quotient.unwrap().dim(), 0);
        let v = Subspace::from_vectors(k, 2, vec![vec![q(1), q(0)]]);
        let a = subspace_arith(&u, &v).unwrap();
        assert_eq!(a.intersection.dim(), 0);
        assert_eq!(a.sum.dim(), 2);
        assert!(a.quotient.is_none());
        assert_eq!(u.quotient(&v), Err(LinalgError::NotASubspace));
        let w = Subspace::zero(k, 3);
        assert_eq!(u.sum(&w), Err(LinalgError::AmbientMismatch(2, 3)));
    }

    #[test]
    fn solve_and_preimage() {
        let k = Rationals;
        let m = Matrix::from_dense(k, 2, 2, &[vec![q(1), q(1)], vec![q(0), q(2)]]);
        let x = solve(&m, &[q(3), q(4)]).unwrap();
        assert_eq!(m.apply(&x), vec![q(3), q(4)]);
        let s = Matrix::from_dense(k, 2, 2, &[vec![q(1), q(1)], vec![q(1), q(1)]]);
        assert!(solve(&s, &[q(1), q(0)]).is_none());
        let line = Subspace::zero(k, 2);
        assert_eq!(line.preimage_under(&s).dim(), 1);
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<PrimeField>> {
        proptest::collection::vec(0u32..5, rows * cols).prop_map(move |v| {
            let k = PrimeField::new(5).unwrap();
            let dense: Vec<Vec<u32>> = v.chunks(cols).map(|c| c.to_vec()).collect();
            Matrix::from_dense(k, rows, cols, &dense)
        })
    }

    // brute-force subspace dimension by enumerating F_3-combinations
    fn brute_dim(vecs: &[Vec<u32>], n: usize) -> usize {
        let p = 3u32;
        let mut seen = std::collections::HashSet::new();
        let count = vecs.len();
        for code in 0..p.pow(count as u32) {
            let mut c = code;
            let mut v = vec![0u32; n];
            for w in vecs {
                let a = c % p;
                c /= p;
                for i in 0..n {
                    v[i] = (v[i] + a * w[i]) % p;
                }
            }
            seen.insert(v);
        }
        let mut d = 0;
        while p.pow(d as u32) < seen.len() as u32 {
            d += 1;
        }
        d
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reduce_is_idempotent(m in arb_matrix(4, 5)) {
            let r = reduce(&m);
            prop_assert_eq!(reduce(&r.rref).rref, r.rref.clone());
            prop_assert_eq!(r.rank, r.pivots.len());
        }

        #[test]
        fn kernel_image_reverify(m in arb_matrix(4, 5)) {
            let (ker, im) = kernel_image(&m);
            prop_assert_eq!(ker.dim() + im.dim(), 5);
            for v in ker.basis() {
                prop_assert!(m.apply(v).iter().all(|x| *x == 0));
            }
            let cols = Subspace::column_space(&m);
            prop_assert!(cols.contains_subspace(&im));
        }

        #[test]
        fn modular_law(a in proptest::collection::vec(0u32..3, 8), b in proptest::collection::vec(0u32..3, 8)) {
            let k = PrimeField::new(3).unwrap();
            let ua: Vec<Vec<u32>> = a.chunks(4).map(|c| c.to_vec()).collect();
            let vb: Vec<Vec<u32>> = b.chunks(4).map(|c| c.to_vec()).collect();
            let u = Subspace::from_vectors(k, 4, ua.clone());
            let v = Subspace::from_vectors(k, 4, vb.clone());
            let ar = subspace_arith(&u, &v).unwrap();
            prop_assert_eq!(ar.sum.dim() + ar.intersection.dim(), u.dim() + v.dim());
            prop_assert_eq!(u.dim(), brute_dim(&ua, 4));
            let all: Vec<Vec<u32>> = ua.iter().chain(&vb).cloned().collect();
            prop_assert_eq!(ar.sum.dim(), brute_dim(&all, 4));
            prop_assert!(u.contains_subspace(&ar.intersection) && v.contains_subspace(&ar.intersection));
        }

        #[test]
        fn quotient_lifts_independent(a in proptest::collection::vec(0u32..5, 15)) {
            let k = PrimeField::new(5).unwrap();
            let vecs: Vec<Vec<u32>> = a.chunks(5).map(|c| c.to_vec()).collect();
            let u = Subspace::from_vectors(k, 5, vecs.clone());
            let v = Subspace::from_vectors(k, 5, vecs[..1].to_vec());
            let quo = u.quotient(&v).unwrap();
            prop_assert_eq!(quo.dim() + v.dim(), u.dim());
            for i in 0..quo.dim() {
                prop_assert!(u.contains(quo.lift(i)));
            }
            prop_assert_eq!(v.sum(&quo.lifts).unwrap(), u);
        }
    }
}
