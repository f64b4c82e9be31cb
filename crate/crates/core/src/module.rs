//! Curved dg modules over a deformation, stored as matrices: the t-action,
//! the predifferential and the action of each basis element of `A`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError, DeformedAlgebra};
use crate::field::Field;
use crate::graded::{check_homogeneous, parity_signs, ChainMap, Complex, GradedError, GradedSpace, Grading};
use crate::linalg::{kernel_image, Matrix, Subspace, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("malformed module: {0}")]
    Malformed(String),
    #[error("t^(n+1) != 0 in degree {0}")]
    TNotNilpotent(i64),
    #[error("not R_n-linear: {0}")]
    NotRLinear(String),
    #[error("unit does not act as the identity")]
    UnitAction,
    #[error("action not associative on ({0}, {1})")]
    NotAssociativeAction(String, String),
    #[error("Leibniz rule fails for {0}")]
    LeibnizFailure(String),
    #[error("d^2 != c in degree {0}")]
    CurvatureLawFailure(i64),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("morphism is not closed")]
    NotClosed,
    #[error("morphism has degree {0}, expected 0")]
    WrongDegree(i64),
    #[error("map is not A_n-linear: {0}")]
    NotLinear(String),
    #[error("index {0} out of range 0..={1}")]
    IndexOutOfRange(usize, usize),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Unvalidated module data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleData<K: Field> {
    pub names: Vec<String>,
    pub space: GradedSpace,
    pub t: Matrix<K>,
    pub d: Matrix<K>,
    /// One matrix per basis element of `A`.
    pub action: Vec<Matrix<K>>,
}

pub fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A module satisfying every axiom except possibly the curvature law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QdgModule<K: Field> {
    algebra: Arc<DeformedAlgebra<K>>,
    data: ModuleData<K>,
}

/// A qdg module whose predifferential squares to the curvature action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdgModule<K: Field>(QdgModule<K>);

impl<K: Field> std::ops::Deref for CdgModule<K> {
    type Target = QdgModule<K>;
    fn deref(&self) -> &QdgModule<K> {
        &self.0
    }
}

fn sign_of<K: Field>(k: &K, odd: bool) -> K::Elem {
    k.sign(odd)
}

impl<K: Field> QdgModule<K> {
    pub fn algebra(&self) -> &Arc<DeformedAlgebra<K>> {
        &self.algebra
    }
    pub fn data(&self) -> &ModuleData<K> {
        &self.data
    }
    pub fn field(&self) -> K {
        self.algebra.field()
    }
    pub fn space(&self) -> &GradedSpace {
        &self.data.space
    }
    pub fn dim(&self) -> usize {
        self.data.space.dim()
    }
    pub fn grading(&self) -> Grading {
        self.data.space.grading()
    }
    pub fn t(&self) -> &Matrix<K> {
        &self.data.t
    }
    pub fn d(&self) -> &Matrix<K> {
        &self.data.d
    }
    pub fn action(&self, b: usize) -> &Matrix<K> {
        &self.data.action[b]
    }
    pub fn names(&self) -> &[String] {
        &self.data.names
    }

    pub fn t_pow(&self, e: usize) -> Matrix<K> {
        self.data.t.pow(e)
    }

    /// The action of an element of `A_n`, expanded through powers of `T`.
    pub fn act_elem(&self, x: &AlgebraElement<K>) -> Matrix<K> {
        let k = self.field();
        let n = self.dim();
        let mut out = Matrix::zero(k, n, n);
        let mut pows: BTreeMap<usize, Matrix<K>> = BTreeMap::new();
        for (s, c, b) in x.terms() {
            let ts = pows.entry(s).or_insert_with(|| self.t_pow(s)).clone();
            out = out.add(&ts.mul(&self.data.action[b]).scale(c));
        }
        out
    }

    pub fn curvature_action(&self) -> Matrix<K> {
        self.act_elem(self.algebra.curvature())
    }

    /// `d^2 - c`.
    pub fn mc_residual(&self) -> Matrix<K> {
        self.data.d.mul(&self.data.d).sub(&self.curvature_action())
    }

    pub fn is_cdg(&self) -> bool {
        self.mc_residual().is_zero()
    }

    pub fn into_cdg(self) -> Result<CdgModule<K>, ModuleError> {
        let r = self.mc_residual();
        if let Some((_, c, _)) = r.triples().next() {
            return Err(ModuleError::CurvatureLawFailure(self.space().degree(c)));
        }
        Ok(CdgModule(self))
    }

    /// `M[s]`: degrees lowered by `s`, `d` times `(-1)^s`, `b` acting with `(-1)^{s|b|}`.
    pub fn shift(&self, s: i64) -> Self {
        let odd = Grading::is_odd(s);
        let d = if odd { self.data.d.neg() } else { self.data.d.clone() };
        let action = self
            .data
            .action
            .iter()
            .enumerate()
            .map(|(b, m)| if odd && Grading::is_odd(self.algebra.degree(b)) { m.neg() } else { m.clone() })
            .collect();
        QdgModule {
            algebra: self.algebra.clone(),
            data: ModuleData { names: self.data.names.clone(), space: self.data.space.shift(s), t: self.data.t.clone(), d, action },
        }
    }

    pub fn direct_sum(parts: &[&QdgModule<K>]) -> Result<Self, ModuleError> {
        let first = parts.first().ok_or_else(|| ModuleError::Malformed("empty direct sum".into()))?;
        if parts.iter().any(|p| p.algebra != first.algebra) {
            return Err(ModuleError::AlgebraMismatch);
        }
        let k = first.field();
        let spaces: Vec<&GradedSpace> = parts.iter().map(|p| &p.data.space).collect();
        let space = GradedSpace::direct_sum(&spaces)?;
        let diag = |f: &dyn Fn(&QdgModule<K>) -> &Matrix<K>| {
            let ms: Vec<&Matrix<K>> = parts.iter().map(|p| f(p)).collect();
            Matrix::block_diag(k, &ms)
        };
        let t = diag(&|p| &p.data.t);
        let d = diag(&|p| &p.data.d);
        let action = (0..first.algebra.dim()).map(|b| diag(&|p| &p.data.action[b])).collect();
        let names = parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.data.names.iter().map(move |n| format!("{i}.{n}")))
            .collect();
        Ok(QdgModule { algebra: first.algebra.clone(), data: ModuleData { names, space, t, d, action } })
    }

    /// Replace `d` by `d + f` for an A_n-linear perturbation of degree 1.
    pub fn perturb(&self, f: &Matrix<K>) -> Result<Self, ModuleError> {
        check_homogeneous(self.space(), self.space(), 1, f)?;
        check_linear(self, self, 1, f)?;
        let mut data = self.data.clone();
        data.d = data.d.add(f);
        Ok(QdgModule { algebra: self.algebra.clone(), data })
    }

    pub fn zero(algebra: Arc<DeformedAlgebra<K>>) -> Self {
        let k = algebra.field();
        let nb = algebra.dim();
        let g = algebra.grading();
        QdgModule {
            algebra,
            data: ModuleData {
                names: Vec::new(),
                space: GradedSpace::zero(g),
                t: Matrix::zero(k, 0, 0),
                d: Matrix::zero(k, 0, 0),
                action: vec![Matrix::zero(k, 0, 0); nb],
            },
        }
    }

    /// Restrict all structure to a subspace stable under `T`, `d` and the action,
    /// given by a homogeneous echelon basis.
    pub fn submodule(&self, sub: &Subspace<K>) -> Result<Self, ModuleError> {
        let k = self.field();
        let restrict = |m: &Matrix<K>| -> Result<Matrix<K>, ModuleError> {
            let cols = sub
                .basis()
                .iter()
                .map(|v| sub.coords(&m.apply(v)).ok_or_else(|| ModuleError::Malformed("subspace not stable".into())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Matrix::from_columns(k, sub.dim(), &cols))
        };
        let space = self.space().of_vectors(&k, sub.basis());
        let data = ModuleData {
            names: default_names("s", sub.dim()),
            space,
            t: restrict(&self.data.t)?,
            d: restrict(&self.data.d)?,
            action: self.data.action.iter().map(restrict).collect::<Result<_, _>>()?,
        };
        Ok(QdgModule { algebra: self.algebra.clone(), data })
    }

    /// Quotient module `M / V` for a stable subspace.
    pub fn quotient_module(&self, v: &Subspace<K>) -> Result<Self, ModuleError> {
        let k = self.field();
        let full = Subspace::full(k, self.dim());
        let q = full.quotient(v).map_err(|e| ModuleError::Malformed(e.to_string()))?;
        let induce = |m: &Matrix<K>| -> Result<Matrix<K>, ModuleError> {
            let cols = q
                .lifts
                .basis()
                .iter()
                .map(|l| q.coords(&m.apply(l)).expect("full space contains everything"))
                .collect::<Vec<_>>();
            if !v.is_stable_under(m) {
                return Err(ModuleError::Malformed("subspace not stable".into()));
            }
            Ok(Matrix::from_columns(k, q.dim(), &cols))
        };
        let space = self.space().of_vectors(&k, q.lifts.basis());
        let data = ModuleData {
            names: default_names("q", q.dim()),
            space,
            t: induce(&self.data.t)?,
            d: induce(&self.data.d)?,
            action: self.data.action.iter().map(induce).collect::<Result<_, _>>()?,
        };
        Ok(QdgModule { algebra: self.algebra.clone(), data })
    }

    /// Kernel of `T^e` as a subspace.
    pub fn ker_t_pow(&self, e: usize) -> Subspace<K> {
        kernel_image(&self.t_pow(e)).0
    }

    /// Image of `T^e` as a subspace.
    pub fn im_t_pow(&self, e: usize) -> Subspace<K> {
        Subspace::column_space(&self.t_pow(e))
    }

    /// Stable subspace `t^a Ker t^b`.
    pub fn t_ker(&self, a: usize, b: usize) -> Subspace<K> {
        self.ker_t_pow(b).image_under(&self.t_pow(a))
    }
}

impl<K: Field> CdgModule<K> {
    pub fn qdg(&self) -> &QdgModule<K> {
        &self.0
    }
    pub fn into_qdg(self) -> QdgModule<K> {
        self.0
    }

    pub fn shift(&self, s: i64) -> Self {
        CdgModule(self.0.shift(s))
    }

    pub fn direct_sum(parts: &[&CdgModule<K>]) -> Result<Self, ModuleError> {
        let qs: Vec<&QdgModule<K>> = parts.iter().map(|p| &p.0).collect();
        Ok(CdgModule(QdgModule::direct_sum(&qs)?))
    }

    pub fn zero(algebra: Arc<DeformedAlgebra<K>>) -> Self {
        CdgModule(QdgModule::zero(algebra))
    }

    pub fn identity(&self) -> Morphism<K> {
        Morphism {
            source: self.clone(),
            target: self.clone(),
            degree: 0,
            matrix: Matrix::identity(self.field(), self.dim()),
        }
    }

    /// Restriction to a subspace stable under `t`, `d` and the action.
    pub fn submodule(&self, sub: &Subspace<K>) -> Result<Self, ModuleError> {
        QdgModule::submodule(self, sub)?.into_cdg()
    }

    pub fn quotient_module(&self, v: &Subspace<K>) -> Result<Self, ModuleError> {
        QdgModule::quotient_module(self, v)?.into_cdg()
    }

    /// The underlying complex, when `d^2 = 0`.
    pub fn as_complex(&self) -> Result<Complex<K>, GradedError> {
        Complex::new(self.space().clone(), self.d().clone())
    }
}

/// Check `f ∘ T_M = T_N ∘ f` and `f ∘ b_M = (-1)^{deg f |b|} b_N ∘ f`.
pub fn check_linear<K: Field>(m: &QdgModule<K>, n: &QdgModule<K>, degree: i64, f: &Matrix<K>) -> Result<(), ModuleError> {
    if m.algebra != n.algebra {
        return Err(ModuleError::AlgebraMismatch);
    }
    let k = m.field();
    if f.mul(m.t()) != n.t().mul(f) {
        return Err(ModuleError::NotLinear("t".into()));
    }
    for b in 0..m.algebra.dim() {
        let s = sign_of(&k, Grading::is_odd(degree) && Grading::is_odd(m.algebra.degree(b)));
        if f.mul(m.action(b)) != n.action(b).mul(f).scale(&s) {
            return Err(ModuleError::NotLinear(m.algebra.name(b).to_string()));
        }
    }
    Ok(())
}

/// Validate everything but the curvature law.
pub fn validate_qdg<K: Field>(data: ModuleData<K>, algebra: Arc<DeformedAlgebra<K>>) -> Result<QdgModule<K>, ModuleError> {
    let k = algebra.field();
    let sp = &data.space;
    let n = sp.dim();
    if sp.grading() != algebra.grading() {
        return Err(ModuleError::Graded(GradedError::GradingMismatch));
    }
    if data.action.len() != algebra.dim() {
        return Err(ModuleError::Malformed(format!("{} action matrices for {} basis elements", data.action.len(), algebra.dim())));
    }
    if data.names.len() != n {
        return Err(ModuleError::Malformed("names and basis differ in length".into()));
    }
    check_homogeneous(sp, sp, 0, &data.t)?;
    check_homogeneous(sp, sp, 1, &data.d)?;
    for (b, m) in data.action.iter().enumerate() {
        check_homogeneous(sp, sp, algebra.degree(b), m)?;
    }
    let m = QdgModule { algebra: algebra.clone(), data };
    let tn = m.t_pow(algebra.order() + 1);
    if let Some((_, c, _)) = tn.triples().next() {
        return Err(ModuleError::TNotNilpotent(m.space().degree(c)));
    }
    if m.action(algebra.unit()) != &Matrix::identity(k, n) {
        return Err(ModuleError::UnitAction);
    }
    for b in 0..algebra.dim() {
        if m.t().mul(m.action(b)) != m.action(b).mul(m.t()) {
            return Err(ModuleError::NotRLinear(format!("t and {}", algebra.name(b))));
        }
    }
    if m.d().mul(m.t()) != m.t().mul(m.d()) {
        return Err(ModuleError::NotRLinear("t and d".into()));
    }
    for a in 0..algebra.dim() {
        for b in 0..algebra.dim() {
            let lhs = m.action(a).mul(m.action(b));
            if lhs != m.act_elem(algebra.mult(a, b)) {
                return Err(ModuleError::NotAssociativeAction(algebra.name(a).into(), algebra.name(b).into()));
            }
        }
    }
    for b in 0..algebra.dim() {
        let s = sign_of(&k, Grading::is_odd(algebra.degree(b)));
        let lhs = m.d().mul(m.action(b));
        let rhs = m.act_elem(algebra.diff(b)).add(&m.action(b).mul(m.d()).scale(&s));
        if lhs != rhs {
            return Err(ModuleError::LeibnizFailure(algebra.name(b).into()));
        }
    }
    Ok(m)
}

pub fn validate_module<K: Field>(data: ModuleData<K>, algebra: Arc<DeformedAlgebra<K>>) -> Result<CdgModule<K>, ModuleError> {
    validate_qdg(data, algebra)?.into_cdg()
}

/// `A_i = A_n / t^{i+1}` with left multiplication; a qdg module (cdg iff uncurved).
pub fn regular_module<K: Field>(algebra: &Arc<DeformedAlgebra<K>>, i: usize) -> QdgModule<K> {
    let a = algebra.as_ref();
    let k = a.field();
    let action = (0..a.dim()).map(|b| a.left_mult_matrix(&AlgebraElement::monomial(k, 0, b), i)).collect();
    let names = (0..=i)
        .flat_map(|s| (0..a.dim()).map(move |b| format!("t{s}*{}", a.name(b))))
        .collect();
    QdgModule {
        algebra: algebra.clone(),
        data: ModuleData { names, space: a.reg_space(i), t: a.reg_t_matrix(i), d: a.reg_d_matrix(i), action },
    }
}

/// An A_n-linear map of some degree between modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism<K: Field> {
    pub source: CdgModule<K>,
    pub target: CdgModule<K>,
    pub degree: i64,
    pub matrix: Matrix<K>,
}

impl<K: Field> Morphism<K> {
    pub fn new(source: CdgModule<K>, target: CdgModule<K>, degree: i64, matrix: Matrix<K>) -> Result<Self, ModuleError> {
        check_homogeneous(source.space(), target.space(), degree, &matrix)?;
        check_linear(&source, &target, degree, &matrix)?;
        let degree = source.grading().norm(degree);
        Ok(Morphism { source, target, degree, matrix })
    }

    /// `df = d_N f - (-1)^{deg f} f d_M`.
    pub fn differential(&self) -> Matrix<K> {
        let k = self.source.field();
        let s = k.sign(Grading::is_odd(self.degree));
        self.target.d().mul(&self.matrix).sub(&self.matrix.mul(self.source.d()).scale(&s))
    }

    pub fn is_closed(&self) -> bool {
        self.differential().is_zero()
    }

    pub(crate) fn require_closed_degree0(&self) -> Result<(), ModuleError> {
        if self.degree != 0 {
            return Err(ModuleError::WrongDegree(self.degree));
        }
        if !self.is_closed() {
            return Err(ModuleError::NotClosed);
        }
        Ok(())
    }

    /// `N ⊕ M[1]` with `d(n, m) = (d n + f m, -d m)`.
    pub fn cone(&self) -> Result<CdgModule<K>, ModuleError> {
        self.require_closed_degree0()?;
        let k = self.source.field();
        let m1 = self.source.shift(1);
        let sum = QdgModule::direct_sum(&[self.target.qdg(), m1.qdg()])?;
        let (nt, ns) = (self.target.dim(), self.source.dim());
        let f = Matrix::from_blocks(k, &[nt, ns], &[nt, ns], &[(0, 1, &self.matrix)]);
        sum.perturb(&f)?.into_cdg()
    }

    /// `Cone(f)[-1]`.
    pub fn cocone(&self) -> Result<CdgModule<K>, ModuleError> {
        Ok(self.cone()?.shift(-1))
    }

    pub fn compose(&self, first: &Morphism<K>) -> Result<Morphism<K>, ModuleError> {
        if first.target != self.source {
            return Err(ModuleError::Malformed("morphisms not composable".into()));
        }
        Ok(Morphism {
            source: first.source.clone(),
            target: self.target.clone(),
            degree: self.source.grading().norm(self.degree + first.degree),
            matrix: self.matrix.mul(&first.matrix),
        })
    }
}

pub fn cone_module<K: Field>(f: &Morphism<K>) -> Result<CdgModule<K>, ModuleError> {
    f.cone()
}

/// One graded piece of a hom complex.
#[derive(Debug, Clone, PartialEq, Eq)]
struct HomBlock<K: Field> {
    /// `(target index, source index)` for each coordinate.
    vars: Vec<(usize, usize)>,
    solutions: Subspace<K>,
    offset: usize,
}

/// The hom complex with an explicit basis of linear maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomComplex<K: Field> {
    pub complex: Complex<K>,
    /// `maps[j]` is the map (target x source matrix) of basis element `j`.
    pub maps: Vec<Matrix<K>>,
    blocks: BTreeMap<i64, HomBlock<K>>,
    source_dim: usize,
    target_dim: usize,
}

impl<K: Field> HomComplex<K> {
    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    /// Coordinates of a homogeneous linear map of degree `deg` in the hom basis.
    pub fn coords(&self, f: &Matrix<K>, deg: i64) -> Option<Vector<K>> {
        let k = f.field();
        let deg = self.complex.grading().norm(deg);
        let mut out = vec![k.zero(); self.dim()];
        let Some(block) = self.blocks.get(&deg) else {
            return if f.is_zero() { Some(out) } else { None };
        };
        let v: Vector<K> = block.vars.iter().map(|(j, i)| f.get(*j, *i)).collect();
        if f.nnz() != v.iter().filter(|x| !k.is_zero(x)).count() {
            return None;
        }
        let c = block.solutions.coords(&v)?;
        for (x, y) in out[block.offset..block.offset + c.len()].iter_mut().zip(c) {
            *x = y;
        }
        Some(out)
    }

    /// Map represented by a coordinate vector.
    pub fn map_of(&self, v: &[K::Elem]) -> Matrix<K> {
        let k = self.complex.field();
        let mut out = Matrix::zero(k, self.target_dim, self.source_dim);
        for (c, m) in v.iter().zip(&self.maps) {
            if !k.is_zero(c) {
                out = out.add(&m.scale(c));
            }
        }
        out
    }
}

/// `Hom(M, N)`: in degree `d`, maps raising degree by `d` that commute with `T`
/// and satisfy `f b = (-1)^{d|b|} b f`; differential `d_N f - (-1)^d f d_M`.
pub fn hom_complex<K: Field>(m: &QdgModule<K>, n: &QdgModule<K>) -> Result<HomComplex<K>, ModuleError> {
    if m.algebra != n.algebra {
        return Err(ModuleError::AlgebraMismatch);
    }
    let k = m.field();
    let a = m.algebra.clone();
    let g = m.grading();
    let (dm, dn) = (m.dim(), n.dim());
    let mut degrees: Vec<i64> = Vec::new();
    for i in 0..dm {
        for j in 0..dn {
            degrees.push(g.norm(n.space().degree(j) - m.space().degree(i)));
        }
    }
    degrees.sort();
    degrees.dedup();
    // constraint operators: (left factor on f's source side, right factor on target side, sign-dependent on degree)
    let mut ops: Vec<(Matrix<K>, Matrix<K>, bool)> = vec![(m.t().clone(), n.t().clone(), false)];
    for b in 0..a.dim() {
        if b == a.unit() {
            continue;
        }
        ops.push((m.action(b).clone(), n.action(b).clone(), Grading::is_odd(a.degree(b))));
    }
    let ops_t: Vec<Matrix<K>> = ops.iter().map(|(_, nb, _)| nb.transpose()).collect();
    let mut blocks = BTreeMap::new();
    let mut maps = Vec::new();
    let mut space_degs = Vec::new();
    for &deg in &degrees {
        let vars: Vec<(usize, usize)> = (0..dn)
            .flat_map(|j| (0..dm).map(move |i| (j, i)))
            .filter(|(j, i)| n.space().degree(*j) == g.norm(m.space().degree(*i) + deg))
            .collect();
        let mut triples = Vec::new();
        let mut row_id: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for (v, &(j, i)) in vars.iter().enumerate() {
            for (o, ((mb, _, _), nbt)) in ops.iter().zip(&ops_t).enumerate() {
                let odd = ops[o].2 && Grading::is_odd(deg);
                // (f mb)[j][c] += f[j][i] mb[i][c]
                for (c, x) in mb.row_entries(i) {
                    let len = row_id.len();
                    let r = *row_id.entry((o, j, *c)).or_insert(len);
                    triples.push((r, v, x.clone()));
                }
                // -(±)(nb f)[r][i] = -(±) nb[r][j] f[j][i]
                for (r, x) in nbt.row_entries(j) {
                    let len = row_id.len();
                    let rr = *row_id.entry((o, *r, i)).or_insert(len);
                    let val = if odd { x.clone() } else { k.neg(x) };
                    triples.push((rr, v, val));
                }
            }
        }
        let cons = Matrix::from_triples(k, row_id.len(), vars.len(), triples);
        let (sol, _) = kernel_image(&cons);
        let offset = maps.len();
        for s in sol.basis() {
            let t = vars.iter().zip(s).filter(|(_, x)| !k.is_zero(x)).map(|(&(j, i), x)| (j, i, x.clone()));
            maps.push(Matrix::from_triples(k, dn, dm, t));
            space_degs.push(deg);
        }
        blocks.insert(deg, HomBlock { vars, solutions: sol, offset });
    }
    let space = GradedSpace::new(g, space_degs);
    let mut hom = HomComplex {
        complex: Complex::trivial(k, space.clone()),
        maps,
        blocks,
        source_dim: dm,
        target_dim: dn,
    };
    let mut cols = Vec::with_capacity(hom.dim());
    for (idx, f) in hom.maps.iter().enumerate() {
        let deg = space.degree(idx);
        let s = k.sign(Grading::is_odd(deg));
        let df = n.d().mul(f).sub(&f.mul(m.d()).scale(&s));
        let c = hom
            .coords(&df, deg + 1)
            .ok_or_else(|| ModuleError::NotLinear("hom differential leaves the hom space".into()))?;
        cols.push(c);
    }
    let d = Matrix::from_columns(k, hom.dim(), &cols);
    hom.complex = Complex::new(space, d)?;
    Ok(hom)
}

/// Linear dual as a module over the opposite algebra.
pub fn dualize<K: Field>(m: &CdgModule<K>) -> Result<CdgModule<K>, ModuleError> {
    let k = m.field();
    let op = Arc::new(m.algebra().opposite()?);
    let space = m.space().dual();
    let par = parity_signs(&k, &space);
    let minus_par: Vector<K> = par.iter().map(|s| k.neg(s)).collect();
    let d = m.d().transpose().scale_cols(&minus_par);
    let t = m.t().transpose();
    let action = (0..op.dim())
        .map(|b| {
            let mt = m.action(b).transpose();
            if Grading::is_odd(op.degree(b)) {
                mt.scale_cols(&par)
            } else {
                mt
            }
        })
        .collect();
    let names = m.names().iter().map(|n| format!("{n}*")).collect();
    validate_module(ModuleData { names, space, t, d, action }, op)
}

/// Evaluation `M -> M^∨∨`, `m ↦ (φ ↦ (-1)^{|m||φ|} φ(m))`.
pub fn evaluation<K: Field>(m: &CdgModule<K>) -> Result<Morphism<K>, ModuleError> {
    let dd = dualize(&dualize(m)?)?;
    let k = m.field();
    let diag = parity_signs(&k, m.space());
    let mut dd = dd;
    // the double dual of the opposite of the opposite is the original algebra
    if dd.algebra() != m.algebra() {
        return Err(ModuleError::AlgebraMismatch);
    }
    dd = CdgModule(QdgModule { algebra: m.algebra().clone(), data: dd.data().clone() });
    Morphism::new(m.clone(), dd, 0, Matrix::diagonal(k, diag))
}

fn check_index<K: Field>(m: &QdgModule<K>, i: usize) -> Result<(), ModuleError> {
    let n = m.algebra().order();
    if i > n {
        return Err(ModuleError::IndexOutOfRange(i, n));
    }
    Ok(())
}

/// Basis of a subspace with coordinates in the ambient module, plus the
/// submatrix helper expressing a map between two such subspaces.
fn restrict_between<K: Field>(from: &Subspace<K>, to: &Subspace<K>, m: &Matrix<K>) -> Result<Matrix<K>, ModuleError> {
    let k = from.field();
    let cols = from
        .basis()
        .iter()
        .map(|v| to.coords(&m.apply(v)).ok_or_else(|| ModuleError::Malformed("map leaves the subspace".into())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_columns(k, to.dim(), &cols))
}

/// Closed form of `Hom(Γ_i, M)`: pairs `(x, y)` with `x = f(1) ∈ Ker t^{i+1}`,
/// `y = f(s1) ∈ Ker t^i[-1]`, `D(x, y) = (dx - (-1)^{|f|} (c/t) y, dy - (-1)^{|f|} t x)`.
/// Returns the unshifted complex and the two subspaces.
pub fn hom_gamma_closed_form<K: Field>(m: &CdgModule<K>, i: usize) -> Result<(Complex<K>, Subspace<K>, Subspace<K>), ModuleError> {
    check_index(m, i)?;
    let k = m.field();
    let kx = m.ker_t_pow(i + 1);
    let ky = m.ker_t_pow(i);
    let ct = m.act_elem(&m.algebra().curvature_over_t());
    let sx = m.space().of_vectors(&k, kx.basis());
    let sy = m.space().of_vectors(&k, ky.basis()).shift(-1);
    let dxx = restrict_between(&kx, &kx, m.d())?;
    let dyy = restrict_between(&ky, &ky, m.d())?;
    // y of degree e contributes with sign -(-1)^{e+1} = (-1)^e
    let cyx = restrict_between(&ky, &kx, &ct)?.scale_cols(&parity_signs(&k, &sy).iter().map(|s| k.neg(s)).collect::<Vec<_>>());
    let txy = restrict_between(&kx, &ky, m.t())?.scale_cols(&parity_signs(&k, &sx).iter().map(|s| k.neg(s)).collect::<Vec<_>>());
    let (nx, ny) = (kx.dim(), ky.dim());
    let d = Matrix::from_blocks(k, &[nx, ny], &[nx, ny], &[(0, 0, &dxx), (0, 1, &cyx), (1, 0, &txy), (1, 1, &dyy)]);
    let space = GradedSpace::direct_sum(&[&sx, &sy])?;
    Ok((Complex::new(space, d)?, kx, ky))
}

/// `(M)_i = Hom(Γ_i, M)[1]` in closed form.
pub fn f_hom<K: Field>(m: &CdgModule<K>, i: usize) -> Result<Complex<K>, ModuleError> {
    Ok(hom_gamma_closed_form(m, i)?.0.shift(1))
}

/// `Q_i(M) = M/t^{i+1}M ⊕ M/t^iM[1]`, `d(u, v) = (du + tv, -dv - π((c/t)u))`.
pub fn q_tensor<K: Field>(m: &CdgModule<K>, i: usize) -> Result<Complex<K>, ModuleError> {
    check_index(m, i)?;
    let k = m.field();
    let full = Subspace::full(k, m.dim());
    let qu = full.quotient(&m.im_t_pow(i + 1)).expect("image is a subspace");
    let qv = full.quotient(&m.im_t_pow(i)).expect("image is a subspace");
    let ct = m.act_elem(&m.algebra().curvature_over_t());
    let induce = |from: &crate::linalg::Quotient<K>, to: &crate::linalg::Quotient<K>, op: &Matrix<K>| {
        let cols: Vec<Vector<K>> = from.lifts.basis().iter().map(|l| to.coords(&op.apply(l)).unwrap()).collect();
        Matrix::from_columns(k, to.dim(), &cols)
    };
    let duu = induce(&qu, &qu, m.d());
    let dvv = induce(&qv, &qv, m.d()).neg();
    let tvu = induce(&qv, &qu, m.t());
    let cuv = induce(&qu, &qv, &ct).neg();
    let su = m.space().of_vectors(&k, qu.lifts.basis());
    let sv = m.space().of_vectors(&k, qv.lifts.basis()).shift(1);
    let (nu, nv) = (qu.dim(), qv.dim());
    let d = Matrix::from_blocks(k, &[nu, nv], &[nu, nv], &[(0, 0, &duu), (0, 1, &tvu), (1, 0, &cuv), (1, 1, &dvv)]);
    Ok(Complex::new(GradedSpace::direct_sum(&[&su, &sv])?, d)?)
}

/// `Q_i(f)` for a closed degree-0 morphism.
pub fn q_tensor_map<K: Field>(f: &Morphism<K>, i: usize) -> Result<ChainMap<K>, ModuleError> {
    f.require_closed_degree0()?;
    let (m, n) = (&f.source, &f.target);
    let k = m.field();
    let induce = |e: usize| {
        let qm = Subspace::full(k, m.dim()).quotient(&m.im_t_pow(e)).expect("image is a subspace");
        let qn = Subspace::full(k, n.dim()).quotient(&n.im_t_pow(e)).expect("image is a subspace");
        let cols: Vec<Vector<K>> = qm.lifts.basis().iter().map(|l| qn.coords(&f.matrix.apply(l)).unwrap()).collect();
        Matrix::from_columns(k, qn.dim(), &cols)
    };
    let map = Matrix::block_diag(k, &[&induce(i + 1), &induce(i)]);
    Ok(ChainMap::new(q_tensor(m, i)?, q_tensor(n, i)?, map)?)
}

/// The map induced on the closed form of `Hom(Γ_i, -)` (unshifted).
pub fn hom_gamma_map<K: Field>(f: &Morphism<K>, i: usize) -> Result<ChainMap<K>, ModuleError> {
    f.require_closed_degree0()?;
    let (cm, kxm, kym) = hom_gamma_closed_form(&f.source, i)?;
    let (cn, kxn, kyn) = hom_gamma_closed_form(&f.target, i)?;
    let k = f.source.field();
    let a = restrict_between(&kxm, &kxn, &f.matrix)?;
    let b = restrict_between(&kym, &kyn, &f.matrix)?;
    Ok(ChainMap::new(cm, cn, Matrix::block_diag(k, &[&a, &b]))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{graded_field_model, ground_ring};
    use crate::field::{PrimeField, Rationals};

    fn r1<K: Field>(k: K, g: Grading) -> Arc<DeformedAlgebra<K>> {
        Arc::new(ground_ring(k, g, 1, vec![]).unwrap())
    }

    /// R_1 as a module over itself (A = k).
    fn free_r1<K: Field>(a: &Arc<DeformedAlgebra<K>>) -> CdgModule<K> {
        regular_module(a, a.order()).into_cdg().unwrap()
    }

    #[test]
    fn zero_module_valid() {
        let a = r1(Rationals, Grading::Integers);
        let z = CdgModule::zero(a.clone());
        let data = z.data().clone();
        assert!(validate_module(data, a).is_ok());
    }

    #[test]
    fn gf_curvature_law() {
        let k = Rationals;
        let a = Arc::new(graded_field_model(k));
        // R_1 ⊕ R_1[1] with d = [[0, 1], [t, 0]]: a matrix factorisation of t
        let base = regular_module(&a, 1);
        let sum = QdgModule::direct_sum(&[&base, &base.shift(1)]).unwrap();
        let t = base.t().clone();
        let id = Matrix::identity(k, 2);
        let f = Matrix::from_blocks(k, &[2, 2], &[2, 2], &[(0, 1, &id), (1, 0, &t)]);
        let mf = sum.perturb(&f).unwrap();
        assert!(mf.clone().into_cdg().is_ok());
        let g = Matrix::from_blocks(k, &[2, 2], &[2, 2], &[(0, 1, &id)]);
        let bad = sum.perturb(&g).unwrap();
        assert!(matches!(bad.into_cdg(), Err(ModuleError::CurvatureLawFailure(_))));
    }

    #[test]
    fn detects_bad_t() {
        let k = PrimeField::default();
        let a = r1(k, Grading::Integers);
        let sp = GradedSpace::new(Grading::Integers, vec![0]);
        let data = ModuleData {
            names: default_names("v", 1),
            space: sp,
            t: Matrix::identity(k, 1),
            d: Matrix::zero(k, 1, 1),
            action: vec![Matrix::identity(k, 1)],
        };
        assert_eq!(validate_module(data, a).unwrap_err(), ModuleError::TNotNilpotent(0));
    }

    #[test]
    fn hom_into_zero_and_from_a() {
        let k = PrimeField::default();
        let a = r1(k, Grading::Integers);
        let m = free_r1(&a);
        let z = CdgModule::zero(a.clone());
        assert_eq!(hom_complex(&m, &z).unwrap().dim(), 0);
        // Hom(A, M) = Ker t_M where A = A_n / t
        let gamma0 = regular_module(&a, 0).into_cdg().unwrap();
        let h = hom_complex(&gamma0, &m).unwrap();
        assert_eq!(h.dim(), m.ker_t_pow(1).dim());
    }

    #[test]
    fn hom_differential_squares_to_zero() {
        let k = Rationals;
        let a = Arc::new(graded_field_model(k));
        let base = regular_module(&a, 1);
        let sum = QdgModule::direct_sum(&[&base, &base.shift(1)]).unwrap();
        let t = base.t().clone();
        let id = Matrix::identity(k, 2);
        let f = Matrix::from_blocks(k, &[2, 2], &[2, 2], &[(0, 1, &id), (1, 0, &t)]);
        let mf = sum.perturb(&f).unwrap().into_cdg().unwrap();
        let h = hom_complex(&mf, &mf).unwrap();
        assert!(h.complex.differential().mul(h.complex.differential()).is_zero());
        // the identity is a closed endomorphism
        let id4 = Matrix::identity(k, 4);
        assert!(h.coords(&id4, 0).is_some());
    }

    #[test]
    fn cone_of_identity_valid() {
        let k = PrimeField::default();
        let a = r1(k, Grading::Integers);
        let m = free_r1(&a);
        let c = m.identity().cone().unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.as_complex().unwrap().is_acyclic());
        let not_closed = Morphism { degree: 1, ..m.identity() };
        assert_eq!(not_closed.cone().unwrap_err(), ModuleError::WrongDegree(1));
    }

    #[test]
    fn dual_and_evaluation() {
        let k = Rationals;
        let a = Arc::new(graded_field_model(k));
        let base = regular_module(&a, 1);
        let sum = QdgModule::direct_sum(&[&base, &base.shift(1)]).unwrap();
        let t = base.t().clone();
        let id = Matrix::identity(k, 2);
        let f = Matrix::from_blocks(k, &[2, 2], &[2, 2], &[(0, 1, &id), (1, 0, &t)]);
        let mf = sum.perturb(&f).unwrap().into_cdg().unwrap();
        let dual = dualize(&mf).unwrap();
        assert_eq!(dual.algebra().curvature(), &a.curvature().neg());
        let ev = evaluation(&mf).unwrap();
        assert!(ev.is_closed());
        assert_eq!(ev.matrix.rank(), mf.dim());
        let z = CdgModule::zero(a.clone());
        assert_eq!(dualize(&z).unwrap().dim(), 0);
    }

    #[test]
    fn closed_forms_are_complexes() {
        let k = PrimeField::default();
        let a = r1(k, Grading::Integers);
        let m = free_r1(&a);
        for i in 0..=1 {
            assert!(f_hom(&m, i).is_ok());
            assert!(q_tensor(&m, i).is_ok());
        }
        assert_eq!(f_hom(&m, 2).unwrap_err(), ModuleError::IndexOutOfRange(2, 1));
        // (M)_0 = Ker t [1]
        let f0 = f_hom(&m, 0).unwrap();
        assert_eq!(f0.dim(), m.ker_t_pow(1).dim());
    }
}
