//! The t-adic and K-filtrations, n-acyclicity, n-quasi-isomorphisms,
//! R_n-freeness, the submodule identities, and the change-of-order functors.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::DeformedAlgebra;
use crate::field::Field;
use crate::graded::{short_exact, subquotient, ChainMap, Complex, GradedError, GradedMap, GradedSpace};
use crate::linalg::{Matrix, Quotient, Subspace};
use crate::module::{hom_complex, CdgModule, ModuleData, ModuleError, Morphism, QdgModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("t-adic route says {t_route}, K route says {k_route}")]
    EquivalenceViolation { t_route: bool, k_route: bool },
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiltrationKind {
    #[serde(rename = "t-adic")]
    TAdic,
    #[serde(rename = "K")]
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrPiece<K: Field> {
    pub complex: Complex<K>,
    /// The piece as `U / V` inside the module.
    pub quotient: Quotient<K>,
    pub cohomology: BTreeMap<i64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationReport<K: Field> {
    pub kind: FiltrationKind,
    pub pieces: Vec<GrPiece<K>>,
}

impl<K: Field> FiltrationReport<K> {
    pub fn all_acyclic(&self) -> bool {
        self.pieces.iter().all(|p| p.cohomology.is_empty())
    }

    pub fn profile(&self) -> Vec<BTreeMap<i64, usize>> {
        self.pieces.iter().map(|p| p.cohomology.clone()).collect()
    }
}

/// The pair `(U, V)` of stable subspaces whose quotient is the `i`-th piece.
pub fn piece_bounds<K: Field>(m: &QdgModule<K>, kind: FiltrationKind, i: usize) -> (Subspace<K>, Subspace<K>) {
    match kind {
        FiltrationKind::TAdic => (m.im_t_pow(i), m.im_t_pow(i + 1)),
        FiltrationKind::Kernel => (m.ker_t_pow(i + 1), m.ker_t_pow(i)),
    }
}

pub fn gr_piece<K: Field>(m: &QdgModule<K>, kind: FiltrationKind, i: usize) -> Result<GrPiece<K>, FiltrationError> {
    let (u, v) = piece_bounds(m, kind, i);
    let (complex, quotient) = subquotient(m.space(), m.d(), &u, &v)?;
    let cohomology = complex.cohomology_dims();
    Ok(GrPiece { complex, quotient, cohomology })
}

pub fn gr<K: Field>(m: &QdgModule<K>, kind: FiltrationKind) -> Result<FiltrationReport<K>, FiltrationError> {
    let n = m.algebra().order();
    let pieces = (0..=n).map(|i| gr_piece(m, kind, i)).collect::<Result<_, _>>()?;
    Ok(FiltrationReport { kind, pieces })
}

/// A graded piece as a module on which `t` acts by zero.
pub fn gr_piece_module<K: Field>(m: &CdgModule<K>, kind: FiltrationKind, i: usize) -> Result<CdgModule<K>, FiltrationError> {
    let (u, v) = piece_bounds(m, kind, i);
    let sub = m.submodule(&u)?;
    // coordinates of V inside U
    let vin: Vec<_> = v.basis().iter().map(|b| u.coords(b).expect("V inside U")).collect();
    let vsub = Subspace::from_vectors(m.field(), u.dim(), vin);
    Ok(sub.quotient_module(&vsub)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acyclicity<K: Field> {
    pub answer: bool,
    pub t_route: FiltrationReport<K>,
    pub k_route: FiltrationReport<K>,
}

/// Both routes are computed independently and must agree.
pub fn is_n_acyclic<K: Field>(m: &QdgModule<K>) -> Result<Acyclicity<K>, FiltrationError> {
    let t_route = gr(m, FiltrationKind::TAdic)?;
    let k_route = gr(m, FiltrationKind::Kernel)?;
    let (a, b) = (t_route.all_acyclic(), k_route.all_acyclic());
    if a != b {
        return Err(FiltrationError::EquivalenceViolation { t_route: a, k_route: b });
    }
    Ok(Acyclicity { answer: a, t_route, k_route })
}

/// Chain map induced on a graded piece by a degree-0 closed morphism.
pub fn gr_map<K: Field>(f: &Morphism<K>, kind: FiltrationKind, i: usize) -> Result<ChainMap<K>, FiltrationError> {
    let ps = gr_piece(&f.source, kind, i)?;
    let pt = gr_piece(&f.target, kind, i)?;
    let k = f.source.field();
    let cols: Vec<_> = ps
        .quotient
        .lifts
        .basis()
        .iter()
        .map(|l| pt.quotient.coords(&f.matrix.apply(l)).expect("morphisms preserve the filtrations"))
        .collect();
    let map = Matrix::from_columns(k, pt.quotient.dim(), &cols);
    Ok(ChainMap::new(ps.complex, pt.complex, map)?)
}

/// Cone n-acyclic; cross-checked against quasi-isomorphism on every t-adic piece.
pub fn is_n_quasi_iso<K: Field>(f: &Morphism<K>) -> Result<bool, FiltrationError> {
    let cone = f.cone()?;
    let by_cone = is_n_acyclic(&cone)?.answer;
    let n = f.source.algebra().order();
    let mut by_pieces = true;
    for i in 0..=n {
        by_pieces &= gr_map(f, FiltrationKind::TAdic, i)?.is_quasi_iso();
    }
    if by_cone != by_pieces {
        return Err(FiltrationError::EquivalenceViolation { t_route: by_cone, k_route: by_pieces });
    }
    Ok(by_cone)
}

/// Degree-wise `dim Ker T = dim Im T^n`.
pub fn is_rn_free<K: Field>(m: &QdgModule<K>) -> bool {
    let k = m.field();
    let n = m.algebra().order();
    let ker = m.ker_t_pow(1);
    let im = m.im_t_pow(n);
    m.space().of_vectors(&k, ker.basis()).dims() == m.space().of_vectors(&k, im.basis()).dims()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub i: usize,
    pub j: usize,
    /// `t^i M ∩ Ker t^j = t^i Ker t^{i+j}`.
    pub intersection_identity: bool,
    /// the sequence through `t: t^{i-1}M/t^iM -> t^iM/t^{i+1}M` (needs `i ≥ 1`)
    pub fundamental_ses: Option<bool>,
    /// the sequence ending in `Ker t^i / t Ker t^{i+1}` (needs `i ≥ 1`)
    pub ses1: Option<bool>,
    /// `t^{i-1}: t Ker t^{i+1} / t Ker t^i -> t^i Ker t^{i+1}` is bijective
    pub ses1_first_term_iso: Option<bool>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.intersection_identity
            && self.fundamental_ses.unwrap_or(true)
            && self.ses1.unwrap_or(true)
            && self.ses1_first_term_iso.unwrap_or(true)
    }
}

/// Graded map between two subquotients `U1/V1 -> U2/V2` induced by `op`.
fn induced_map<K: Field>(space: &GradedSpace, op: &Matrix<K>, from: &Quotient<K>, to: &Quotient<K>) -> Option<GradedMap<K>> {
    let k = op.field();
    let cols = from.lifts.basis().iter().map(|l| to.coords(&op.apply(l))).collect::<Option<Vec<_>>>()?;
    let m = Matrix::from_columns(k, to.dim(), &cols);
    let s = space.of_vectors(&k, from.lifts.basis());
    let t = space.of_vectors(&k, to.lifts.basis());
    GradedMap::new(s, t, 0, m).ok()
}

pub fn structure_identities<K: Field>(m: &QdgModule<K>, i: usize, j: usize) -> StructureReport {
    let k = m.field();
    let n = m.algebra().order();
    let sp = m.space();
    let lhs = m.im_t_pow(i).intersect(&m.ker_t_pow(j)).unwrap();
    let rhs = m.t_ker(i, i + j);
    let intersection_identity = lhs == rhs;
    let id = Matrix::identity(k, m.dim());
    let quo = |u: Subspace<K>, v: &Subspace<K>| u.quotient(v).ok();
    let (fundamental_ses, ses1, ses1_first_term_iso) = if i >= 1 && i <= n + 1 {
        let a = quo(m.t_ker(i - 1, i), &m.t_ker(i, i + 1));
        let b = quo(m.im_t_pow(i - 1), &m.im_t_pow(i));
        let c = quo(m.im_t_pow(i), &m.im_t_pow(i + 1));
        let fses = match (a, b, c) {
            (Some(a), Some(b), Some(c)) => {
                match (induced_map(sp, &id, &a, &b), induced_map(sp, m.t(), &b, &c)) {
                    (Some(f), Some(g)) => short_exact(&f, &g).unwrap_or(false),
                    _ => false,
                }
            }
            _ => false,
        };
        let a1 = quo(m.t_ker(1, i + 1), &m.t_ker(1, i));
        let b1 = quo(m.ker_t_pow(i), &m.t_ker(1, i));
        let c1 = quo(m.ker_t_pow(i), &m.t_ker(1, i + 1));
        let s1 = match (&a1, b1, c1) {
            (Some(a1), Some(b1), Some(c1)) => match (induced_map(sp, &id, a1, &b1), induced_map(sp, &id, &b1, &c1)) {
                (Some(f), Some(g)) => short_exact(&f, &g).unwrap_or(false),
                _ => false,
            },
            _ => false,
        };
        let target = m.t_ker(i, i + 1);
        let iso = match a1 {
            Some(a1) => {
                let zero = Subspace::zero(k, m.dim());
                let tq = target.quotient(&zero).unwrap();
                match induced_map(sp, &m.t_pow(i - 1), &a1, &tq) {
                    Some(f) => f.matrix.rank() == a1.dim() && a1.dim() == tq.dim(),
                    None => false,
                }
            }
            None => false,
        };
        (Some(fses), Some(s1), Some(iso))
    } else {
        (None, None, None)
    };
    StructureReport { i, j, intersection_identity, fundamental_ses, ses1, ses1_first_term_iso }
}

/// View a module over `A_m = truncate(a, m)` as a module over `a`.
pub fn forget<K: Field>(m: &CdgModule<K>, a: &Arc<DeformedAlgebra<K>>) -> Result<CdgModule<K>, ModuleError> {
    let order = m.algebra().order();
    if order > a.order() {
        return Err(ModuleError::IndexOutOfRange(order, a.order()));
    }
    if a.truncate(order)? != **m.algebra() {
        return Err(ModuleError::AlgebraMismatch);
    }
    crate::module::validate_module(m.data().clone(), a.clone())
}

/// `M / t^i M` over `A_{i-1}`, for `1 ≤ i ≤ n+1`.
pub fn coker_t_pow<K: Field>(m: &CdgModule<K>, i: usize) -> Result<CdgModule<K>, ModuleError> {
    let n = m.algebra().order();
    if i == 0 || i > n + 1 {
        return Err(ModuleError::IndexOutOfRange(i, n + 1));
    }
    let q = m.quotient_module(&m.im_t_pow(i))?;
    let a = Arc::new(m.algebra().truncate(i - 1)?);
    crate::module::validate_module(q.data().clone(), a)
}

/// `Ker t^i` over `A_{i-1}`, for `1 ≤ i ≤ n+1`.
pub fn ker_t_pow<K: Field>(m: &CdgModule<K>, i: usize) -> Result<CdgModule<K>, ModuleError> {
    let n = m.algebra().order();
    if i == 0 || i > n + 1 {
        return Err(ModuleError::IndexOutOfRange(i, n + 1));
    }
    let s = m.submodule(&m.ker_t_pow(i))?;
    let a = Arc::new(m.algebra().truncate(i - 1)?);
    crate::module::validate_module(s.data().clone(), a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjunctionReport {
    pub coker_side: BTreeMap<i64, usize>,
    pub forget_side: BTreeMap<i64, usize>,
    pub isomorphic: bool,
}

/// `Hom(M / t^i M, N) ≅ Hom(M, forget N)` for `N` over `A_{i-1}`.
pub fn adjunction_check<K: Field>(m: &CdgModule<K>, n_low: &CdgModule<K>, i: usize) -> Result<AdjunctionReport, ModuleError> {
    let left = hom_complex(coker_t_pow(m, i)?.qdg(), n_low.qdg())?;
    let fn_ = forget(n_low, m.algebra())?;
    let right = hom_complex(m.qdg(), fn_.qdg())?;
    let iso = crate::graded::complexes_isomorphic(&left.complex, &right.complex);
    Ok(AdjunctionReport { coker_side: left.complex.cohomology_dims(), forget_side: right.complex.cohomology_dims(), isomorphic: iso })
}

/// Replace the algebra of a module by an equal one (used after round trips).
pub fn rebase<K: Field>(m: &CdgModule<K>, a: &Arc<DeformedAlgebra<K>>) -> Result<CdgModule<K>, ModuleError> {
    let data: ModuleData<K> = m.data().clone();
    crate::module::validate_module(data, a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ground_ring;
    use crate::field::PrimeField;
    use crate::graded::Grading;
    use crate::module::{default_names, regular_module, validate_module};

    type K = PrimeField;

    fn r1(g: Grading) -> Arc<DeformedAlgebra<K>> {
        Arc::new(ground_ring(PrimeField::default(), g, 1, vec![]).unwrap())
    }

    /// N = 0 -> k -> R_1 -> k -> 0 in degrees 0, 1, 2 over R_1.
    pub(crate) fn module_n() -> CdgModule<K> {
        let k = PrimeField::default();
        let a = r1(Grading::Integers);
        // basis: u (deg 0), e = 1 (deg 1), f = t (deg 1), w (deg 2)
        let space = GradedSpace::new(Grading::Integers, vec![0, 1, 1, 2]);
        let t = Matrix::from_triples(k, 4, 4, [(2, 1, 1)]);
        let d = Matrix::from_triples(k, 4, 4, [(2, 0, 1), (3, 1, 1)]);
        validate_module(ModuleData { names: default_names("n", 4), space, t, d, action: vec![Matrix::identity(k, 4)] }, a).unwrap()
    }

    /// ... -> R_1 -t-> R_1 -t-> ... in parity mode.
    fn periodic_m() -> CdgModule<K> {
        let k = PrimeField::default();
        let a = r1(Grading::Parity);
        // basis 1_e, t_e (even), 1_o, t_o (odd)
        let space = GradedSpace::new(Grading::Parity, vec![0, 0, 1, 1]);
        let t = Matrix::from_triples(k, 4, 4, [(1, 0, 1), (3, 2, 1)]);
        let d = Matrix::from_triples(k, 4, 4, [(3, 0, 1), (1, 2, 1)]);
        validate_module(ModuleData { names: default_names("p", 4), space, t, d, action: vec![Matrix::identity(k, 4)] }, a).unwrap()
    }

    #[test]
    fn counterexample_n() {
        let n = module_n();
        assert!(n.as_complex().unwrap().is_acyclic());
        let g = gr(&n, FiltrationKind::TAdic).unwrap();
        assert_eq!(g.pieces[0].complex.space().dims(), BTreeMap::from([(0, 1), (1, 1), (2, 1)]));
        assert_eq!(g.pieces[1].complex.space().dims(), BTreeMap::from([(1, 1)]));
        let ac = is_n_acyclic(&n).unwrap();
        assert!(!ac.answer);
        let s = structure_identities(&n, 1, 1);
        assert!(s.all_pass());
        assert_eq!(n.im_t_pow(1).intersect(&n.ker_t_pow(1)).unwrap(), n.im_t_pow(1));
        assert_eq!(n.t_ker(1, 2), n.im_t_pow(1));
    }

    #[test]
    fn counterexample_periodic() {
        let m = periodic_m();
        assert!(m.as_complex().unwrap().is_acyclic());
        assert!(!is_n_acyclic(&m).unwrap().answer);
        let g0 = gr_piece(&m, FiltrationKind::TAdic, 0).unwrap();
        assert_eq!(g0.cohomology, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(is_rn_free(&m));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let m = module_n();
        let c = m.identity().cone().unwrap();
        assert!(is_n_acyclic(&c).unwrap().answer);
        assert!(is_n_quasi_iso(&m.identity()).unwrap());
        assert!(gr(&CdgModule::zero(m.algebra().clone()), FiltrationKind::TAdic).unwrap().all_acyclic());
    }

    #[test]
    fn freeness() {
        let a = r1(Grading::Integers);
        let free = regular_module(&a, 1).into_cdg().unwrap();
        assert!(is_rn_free(&free));
        let a0 = regular_module(&a, 0).into_cdg().unwrap();
        assert!(!is_rn_free(&a0));
    }

    #[test]
    fn change_of_order() {
        let m = module_n();
        let low = coker_t_pow(&m, 1).unwrap();
        assert_eq!(low.algebra().order(), 0);
        let back = forget(&low, m.algebra()).unwrap();
        assert_eq!(coker_t_pow(&back, 1).unwrap().dim(), low.dim());
        assert_eq!(ker_t_pow(&m, 2).unwrap().dim(), m.dim());
        let rep = adjunction_check(&m, &low, 1).unwrap();
        assert!(rep.isomorphic);
        assert!(coker_t_pow(&m, 3).is_err());
    }
}
