//! Graded vector spaces, homogeneous maps and complexes, with the usual
//! toolbox: cohomology, shifts, cones, sums, duals and exactness checks.
//!
//! Spaces are flat: basis element `i` carries a degree. In parity mode
//! degrees are normalised to `{0, 1}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::linalg::{kernel_image, Matrix, Quotient, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("grading mismatch")]
    GradingMismatch,
    #[error("map is not closed (d f != f d)")]
    NotClosed,
    #[error("d^2 != 0 starting in degree {0}")]
    NotAComplex(i64),
    #[error("entry ({row},{col}) breaks homogeneity of degree {degree}")]
    Inhomogeneous { row: usize, col: usize, degree: i64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("maps {0} and {1} are not composable")]
    NotComposable(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grading {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Z/2")]
    Parity,
}

impl Grading {
    pub fn norm(&self, d: i64) -> i64 {
        match self {
            Grading::Integers => d,
            Grading::Parity => d.rem_euclid(2),
        }
    }

    pub fn is_odd(d: i64) -> bool {
        d.rem_euclid(2) == 1
    }

    /// Degree of a dual element.
    pub fn dual(&self, d: i64) -> i64 {
        self.norm(-d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    grading: Grading,
    degrees: Vec<i64>,
}

impl GradedSpace {
    pub fn new(grading: Grading, degrees: Vec<i64>) -> Self {
        let degrees = degrees.into_iter().map(|d| grading.norm(d)).collect();
        GradedSpace { grading, degrees }
    }

    pub fn zero(grading: Grading) -> Self {
        GradedSpace { grading, degrees: Vec::new() }
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }
    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }
    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn indices_in(&self, d: i64) -> Vec<usize> {
        let d = self.grading.norm(d);
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn support(&self) -> BTreeSet<i64> {
        self.degrees.iter().copied().collect()
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for d in &self.degrees {
            *m.entry(*d).or_insert(0) += 1;
        }
        m
    }

    /// `V[s]`, whose degree-`d` part is the degree `d+s` part of `V`.
    pub fn shift(&self, s: i64) -> Self {
        GradedSpace::new(self.grading, self.degrees.iter().map(|d| d - s).collect())
    }

    pub fn direct_sum(parts: &[&GradedSpace]) -> Result<Self, GradedError> {
        let grading = parts.first().map(|p| p.grading).unwrap_or(Grading::Integers);
        if parts.iter().any(|p| p.grading != grading) {
            return Err(GradedError::GradingMismatch);
        }
        Ok(GradedSpace { grading, degrees: parts.iter().flat_map(|p| p.degrees.iter().copied()).collect() })
    }

    pub fn dual(&self) -> Self {
        GradedSpace::new(self.grading, self.degrees.iter().map(|d| -d).collect())
    }

    pub fn restrict(&self, indices: &[usize]) -> Self {
        GradedSpace { grading: self.grading, degrees: indices.iter().map(|&i| self.degrees[i]).collect() }
    }

    /// Degree of a nonzero homogeneous vector (its first nonzero entry decides).
    pub fn vector_degree<K: Field>(&self, k: &K, v: &[K::Elem]) -> Option<i64> {
        v.iter().position(|x| !k.is_zero(x)).map(|i| self.degrees[i])
    }

    /// Is the vector homogeneous of degree `d` (zero counts)?
    pub fn is_homogeneous<K: Field>(&self, k: &K, v: &[K::Elem], d: i64) -> bool {
        let d = self.grading.norm(d);
        v.iter().enumerate().all(|(i, x)| k.is_zero(x) || self.degrees[i] == d)
    }

    /// Space spanned by a homogeneous basis of vectors.
    pub fn of_vectors<K: Field>(&self, k: &K, vecs: &[Vector<K>]) -> Self {
        let degrees = vecs
            .iter()
            .map(|v| self.vector_degree(k, v).expect("basis vectors are nonzero"))
            .collect();
        GradedSpace { grading: self.grading, degrees }
    }
}

/// Check that `m: source -> target` raises degrees by `degree`.
pub fn check_homogeneous<K: Field>(source: &GradedSpace, target: &GradedSpace, degree: i64, m: &Matrix<K>) -> Result<(), GradedError> {
    if source.grading != target.grading {
        return Err(GradedError::GradingMismatch);
    }
    if m.rows() != target.dim() || m.cols() != source.dim() {
        return Err(GradedError::Shape(format!(
            "{}x{} matrix for {} -> {}",
            m.rows(),
            m.cols(),
            source.dim(),
            target.dim()
        )));
    }
    let g = source.grading;
    for (r, c, _) in m.triples() {
        if target.degrees[r] != g.norm(source.degrees[c] + degree) {
            return Err(GradedError::Inhomogeneous { row: r, col: c, degree });
        }
    }
    Ok(())
}

/// Sign `(-1)^{deg}` per basis element.
pub fn parity_signs<K: Field>(k: &K, space: &GradedSpace) -> Vector<K> {
    space.degrees.iter().map(|d| k.sign(Grading::is_odd(*d))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap<K: Field> {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i64,
    pub matrix: Matrix<K>,
}

impl<K: Field> GradedMap<K> {
    pub fn new(source: GradedSpace, target: GradedSpace, degree: i64, matrix: Matrix<K>) -> Result<Self, GradedError> {
        check_homogeneous(&source, &target, degree, &matrix)?;
        let degree = source.grading.norm(degree);
        Ok(GradedMap { source, target, degree, matrix })
    }

    pub fn zero(k: K, source: GradedSpace, target: GradedSpace, degree: i64) -> Self {
        let matrix = Matrix::zero(k, target.dim(), source.dim());
        GradedMap { source, target, degree, matrix }
    }

    pub fn identity(k: K, space: GradedSpace) -> Self {
        let matrix = Matrix::identity(k, space.dim());
        GradedMap { source: space.clone(), target: space, degree: 0, matrix }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GradedMap<K>) -> Result<Self, GradedError> {
        if first.target != self.source {
            return Err(GradedError::NotComposable(0, 1));
        }
        Ok(GradedMap {
            source: first.source.clone(),
            target: self.target.clone(),
            degree: self.source.grading.norm(self.degree + first.degree),
            matrix: self.matrix.mul(&first.matrix),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex<K: Field> {
    space: GradedSpace,
    d: Matrix<K>,
}

/// Per-degree cohomology with representative cycles (full-length vectors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexReport<K: Field> {
    pub grading: Grading,
    pub dims: BTreeMap<i64, usize>,
    pub representatives: BTreeMap<i64, Vec<Vector<K>>>,
}

impl<K: Field> ComplexReport<K> {
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }
    pub fn is_acyclic(&self) -> bool {
        self.total() == 0
    }
    pub fn dim(&self, d: i64) -> usize {
        self.dims.get(&self.grading.norm(d)).copied().unwrap_or(0)
    }
}

impl<K: Field> Complex<K> {
    pub fn new(space: GradedSpace, d: Matrix<K>) -> Result<Self, GradedError> {
        check_homogeneous(&space, &space, 1, &d)?;
        let sq = d.mul(&d);
        if let Some((_, c, _)) = sq.triples().next() {
            return Err(GradedError::NotAComplex(space.degree(c)));
        }
        Ok(Complex { space, d })
    }

    pub fn zero(k: K, grading: Grading) -> Self {
        Complex { space: GradedSpace::zero(grading), d: Matrix::zero(k, 0, 0) }
    }

    /// Complex with zero differential.
    pub fn trivial(k: K, space: GradedSpace) -> Self {
        let n = space.dim();
        Complex { space, d: Matrix::zero(k, n, n) }
    }

    pub fn field(&self) -> K {
        self.d.field()
    }
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }
    pub fn differential(&self) -> &Matrix<K> {
        &self.d
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn grading(&self) -> Grading {
        self.space.grading
    }

    /// The block `C^deg -> C^{deg+1}` together with the index lists.
    fn block(&self, deg: i64) -> (Vec<usize>, Vec<usize>, Matrix<K>) {
        let src = self.space.indices_in(deg);
        let tgt = self.space.indices_in(deg + 1);
        let m = self.d.submatrix(&tgt, &src);
        (src, tgt, m)
    }

    /// Cycles and boundaries in degree `deg`, as subspaces of the full space.
    pub fn cycles_boundaries(&self, deg: i64) -> (Subspace<K>, Subspace<K>) {
        let k = self.field();
        let n = self.dim();
        let (src, _, m) = self.block(deg);
        let (ker, _) = kernel_image(&m);
        let embed = |local: &Vector<K>, idx: &[usize]| {
            let mut v = vec![k.zero(); n];
            for (x, &i) in local.iter().zip(idx) {
                v[i] = x.clone();
            }
            v
        };
        let cycles = Subspace::from_vectors(k, n, ker.basis().iter().map(|v| embed(v, &src)).collect());
        let prev = self.space.indices_in(deg - 1);
        let im: Vec<Vector<K>> = prev.iter().map(|&j| self.d.column(j)).collect();
        let boundaries = Subspace::from_vectors(k, n, im);
        (cycles, boundaries)
    }

    pub fn cohomology(&self) -> ComplexReport<K> {
        let mut dims = BTreeMap::new();
        let mut representatives = BTreeMap::new();
        for deg in self.space.support() {
            let (z, b) = self.cycles_boundaries(deg);
            let q = z.quotient(&b).expect("boundaries are cycles");
            if q.dim() > 0 {
                dims.insert(deg, q.dim());
                representatives.insert(deg, q.lifts.basis().to_vec());
            }
        }
        ComplexReport { grading: self.grading(), dims, representatives }
    }

    /// Cohomology dimensions only, computed from ranks.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        let ranks: BTreeMap<i64, usize> =
            self.space.support().into_iter().map(|d| (d, self.block(d).2.rank())).collect();
        let dims = self.space.dims();
        for (deg, dim) in dims {
            let r_out = ranks[&deg];
            let r_in = ranks.get(&self.grading().norm(deg - 1)).copied().unwrap_or(0);
            let h = dim - r_out - r_in;
            if h > 0 {
                out.insert(deg, h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_dims().is_empty()
    }

    /// `C[s]`: degrees lowered by `s`, differential negated when `s` is odd.
    pub fn shift(&self, s: i64) -> Self {
        let d = if Grading::is_odd(s) { self.d.neg() } else { self.d.clone() };
        Complex { space: self.space.shift(s), d }
    }

    pub fn direct_sum(parts: &[&Complex<K>]) -> Result<Self, GradedError> {
        let k = parts.first().map(|c| c.field()).ok_or_else(|| GradedError::Shape("empty sum".into()))?;
        let spaces: Vec<&GradedSpace> = parts.iter().map(|c| &c.space).collect();
        let space = GradedSpace::direct_sum(&spaces)?;
        let ds: Vec<&Matrix<K>> = parts.iter().map(|c| &c.d).collect();
        Ok(Complex { space, d: Matrix::block_diag(k, &ds) })
    }

    /// Linear dual: degrees negated, `dφ = -(-1)^{|φ|} φ∘d`.
    pub fn dual(&self) -> Self {
        let k = self.field();
        let space = self.space.dual();
        let signs: Vector<K> = parity_signs(&k, &space).iter().map(|s| k.neg(s)).collect();
        let d = self.d.transpose().scale_cols(&signs);
        Complex { space, d }
    }

    /// Subquotient complex `U / V` for `d`-stable subspaces `V ⊆ U`.
    pub fn subquotient(&self, u: &Subspace<K>, v: &Subspace<K>) -> Result<(Complex<K>, Quotient<K>), GradedError> {
        subquotient(&self.space, &self.d, u, v)
    }

    /// Rank of the map induced on `H^deg` by a chain map `f: self -> target`.
    pub fn induced_rank(&self, target: &Complex<K>, f: &Matrix<K>, deg: i64) -> usize {
        let (z, _) = self.cycles_boundaries(deg);
        let (_, b) = target.cycles_boundaries(deg);
        let img = z.image_under(f);
        img.sum(&b).unwrap().dim() - b.dim()
    }
}

/// The complex induced by a degree-1 operator `d` on `U / V`, for stable
/// subspaces `V ⊆ U` on which `d^2` vanishes modulo `V`.
pub fn subquotient<K: Field>(space: &GradedSpace, d: &Matrix<K>, u: &Subspace<K>, v: &Subspace<K>) -> Result<(Complex<K>, Quotient<K>), GradedError> {
    let q = u.quotient(v).map_err(|e| GradedError::Shape(e.to_string()))?;
    let k = d.field();
    let qspace = space.of_vectors(&k, q.lifts.basis());
    let cols: Vec<Vector<K>> = q
        .lifts
        .basis()
        .iter()
        .map(|l| q.coords(&d.apply(l)).ok_or(GradedError::NotClosed))
        .collect::<Result<_, _>>()?;
    let qd = Matrix::from_columns(k, q.dim(), &cols);
    Ok((Complex::new(qspace, qd)?, q))
}

/// Over a field, complexes are isomorphic iff the dimensions of all chain
/// groups and the ranks of all differentials agree.
pub fn complexes_isomorphic<K: Field>(a: &Complex<K>, b: &Complex<K>) -> bool {
    if a.grading() != b.grading() || a.space.dims() != b.space.dims() {
        return false;
    }
    a.space.support().into_iter().all(|deg| a.block(deg).2.rank() == b.block(deg).2.rank())
}

/// A degree-0 chain map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap<K: Field> {
    pub source: Complex<K>,
    pub target: Complex<K>,
    pub map: Matrix<K>,
}

impl<K: Field> ChainMap<K> {
    pub fn new(source: Complex<K>, target: Complex<K>, map: Matrix<K>) -> Result<Self, GradedError> {
        check_homogeneous(&source.space, &target.space, 0, &map)?;
        if target.d.mul(&map) != map.mul(&source.d) {
            return Err(GradedError::NotClosed);
        }
        Ok(ChainMap { source, target, map })
    }

    pub fn identity(c: &Complex<K>) -> Self {
        ChainMap { source: c.clone(), target: c.clone(), map: Matrix::identity(c.field(), c.dim()) }
    }

    pub fn graded(&self) -> GradedMap<K> {
        GradedMap {
            source: self.source.space.clone(),
            target: self.target.space.clone(),
            degree: 0,
            matrix: self.map.clone(),
        }
    }

    /// `Y ⊕ X[1]` with `d(y, x) = (d y + f x, -d x)`.
    pub fn cone(&self) -> Complex<K> {
        let k = self.map.field();
        let (x, y) = (&self.source, &self.target);
        let space = GradedSpace::direct_sum(&[&y.space, &x.space.shift(1)]).unwrap();
        let nd = x.d.neg();
        let d = Matrix::from_blocks(k, &[y.dim(), x.dim()], &[y.dim(), x.dim()], &[(0, 0, &y.d), (0, 1, &self.map), (1, 1, &nd)]);
        Complex { space, d }
    }

    pub fn cocone(&self) -> Complex<K> {
        self.cone().shift(-1)
    }

    pub fn is_quasi_iso(&self) -> bool {
        self.cone().is_acyclic()
    }

    pub fn induced_rank(&self, deg: i64) -> usize {
        self.source.induced_rank(&self.target, &self.map, deg)
    }
}

pub fn cone<K: Field>(f: &ChainMap<K>) -> Complex<K> {
    f.cone()
}

/// Exactness at each interior joint of a composable sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    /// `joints[j]`: `ker f_{j+1} = im f_j`.
    pub joints: Vec<bool>,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.joints.iter().all(|b| *b)
    }
}

pub fn is_exact<K: Field>(seq: &[GradedMap<K>]) -> Result<ExactnessReport, GradedError> {
    for j in 1..seq.len() {
        if seq[j - 1].target != seq[j].source {
            return Err(GradedError::NotComposable(j - 1, j));
        }
    }
    let joints = (1..seq.len())
        .map(|j| {
            let (_, im) = kernel_image(&seq[j - 1].matrix);
            let (ker, _) = kernel_image(&seq[j].matrix);
            im == ker
        })
        .collect();
    Ok(ExactnessReport { joints })
}

/// `0 -> A -f-> B -g-> C -> 0` exactness.
pub fn short_exact<K: Field>(f: &GradedMap<K>, g: &GradedMap<K>) -> Result<bool, GradedError> {
    let k = f.matrix.field();
    let a = f.source.clone();
    let c = g.target.clone();
    let z = GradedSpace::zero(a.grading);
    let seq = vec![
        GradedMap::zero(k, z.clone(), a, 0),
        f.clone(),
        g.clone(),
        GradedMap::zero(k, c, z, 0),
    ];
    Ok(is_exact(&seq)?.exact())
}
