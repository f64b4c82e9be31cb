//! Curved dg deformations `A_n = A[t]/(t^{n+1})` given by structure constants
//! on a basis of `A`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::Field;
use crate::graded::{GradedSpace, Grading};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("multiplication not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("unit fails on {0}")]
    UnitFailure(String),
    #[error("Leibniz rule fails on ({0}, {1})")]
    LeibnizFailure(String, String),
    #[error("curvature is not closed")]
    CurvatureNotClosed,
    #[error("d^2 != [c, -] on {0}")]
    DSquareMismatch(String),
    #[error("curvature has a term without t")]
    CurvatureNotDivisible,
    #[error("curvature is not homogeneous of degree 2")]
    CurvatureDegree,
}

/// Element of `A_n`: coefficients keyed by `(t-power, basis index)`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement<K: Field> {
    field: K,
    terms: BTreeMap<(usize, usize), K::Elem>,
}

impl<K: Field> fmt::Debug for AlgebraElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for ((s, b), c) in &self.terms {
            write!(f, " {}*t^{}*e{}", crate::field::format_elem(&self.field, c), s, b)?;
        }
        write!(f, " ]")
    }
}

impl<K: Field> AlgebraElement<K> {
    pub fn zero(field: K) -> Self {
        AlgebraElement { field, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, K::Elem, usize)>>(field: K, terms: I) -> Self {
        let mut out = Self::zero(field);
        for (s, c, b) in terms {
            out.add_term(s, b, &c);
        }
        out
    }

    pub fn monomial(field: K, s: usize, b: usize) -> Self {
        Self::from_terms(field, [(s, field.one(), b)])
    }

    pub fn add_term(&mut self, s: usize, b: usize, c: &K::Elem) {
        let k = self.field;
        let e = self.terms.entry((s, b)).or_insert_with(|| k.zero());
        *e = k.add(e, c);
        if k.is_zero(e) {
            self.terms.remove(&(s, b));
        }
    }

    /// `(t-power, coefficient, basis)` triples in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &K::Elem, usize)> + '_ {
        self.terms.iter().map(|((s, b), c)| (*s, c, *b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c, b) in other.terms() {
            out.add_term(s, b, c);
        }
        out
    }

    pub fn scale(&self, c: &K::Elem) -> Self {
        let k = self.field;
        Self::from_terms(k, self.terms().map(|(s, x, b)| (s, k.mul(c, x), b)))
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply by `t^e`, dropping terms above `t^n`.
    pub fn t_shift(&self, e: usize, n: usize) -> Self {
        Self::from_terms(self.field, self.terms().filter(|(s, _, _)| s + e <= n).map(|(s, c, b)| (s + e, c.clone(), b)))
    }

    /// Term-wise t-power decrement; terms without t are dropped.
    pub fn t_decrement(&self) -> Self {
        Self::from_terms(self.field, self.terms().filter(|(s, _, _)| *s > 0).map(|(s, c, b)| (s - 1, c.clone(), b)))
    }

    /// Reduce modulo `t^{m+1}`.
    pub fn truncate(&self, m: usize) -> Self {
        Self::from_terms(self.field, self.terms().filter(|(s, _, _)| *s <= m).map(|(s, c, b)| (s, c.clone(), b)))
    }

    /// Component of t-power `s`, as a map basis index -> coefficient.
    pub fn t_component(&self, s: usize) -> Vec<(usize, K::Elem)> {
        self.terms().filter(|(p, _, _)| *p == s).map(|(_, c, b)| (b, c.clone())).collect()
    }

    pub fn min_t_power(&self) -> Option<usize> {
        self.terms().map(|(s, _, _)| s).min()
    }
}

/// Unvalidated algebra description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraData<K: Field> {
    pub field: K,
    pub grading: Grading,
    pub order: usize,
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub unit: usize,
    /// `mult[a][b]` is the product of basis elements `a` and `b`.
    pub mult: Vec<Vec<AlgebraElement<K>>>,
    pub diff: Vec<AlgebraElement<K>>,
    pub curvature: AlgebraElement<K>,
}

/// A validated cdg deformation of order `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformedAlgebra<K: Field> {
    data: AlgebraData<K>,
}

impl<K: Field> DeformedAlgebra<K> {
    pub fn data(&self) -> &AlgebraData<K> {
        &self.data
    }
    pub fn field(&self) -> K {
        self.data.field
    }
    pub fn grading(&self) -> Grading {
        self.data.grading
    }
    pub fn order(&self) -> usize {
        self.data.order
    }
    pub fn dim(&self) -> usize {
        self.data.names.len()
    }
    pub fn degree(&self, b: usize) -> i64 {
        self.data.degrees[b]
    }
    pub fn name(&self, b: usize) -> &str {
        &self.data.names[b]
    }
    pub fn unit(&self) -> usize {
        self.data.unit
    }
    pub fn curvature(&self) -> &AlgebraElement<K> {
        &self.data.curvature
    }
    pub fn diff(&self, b: usize) -> &AlgebraElement<K> {
        &self.data.diff[b]
    }
    pub fn mult(&self, a: usize, b: usize) -> &AlgebraElement<K> {
        &self.data.mult[a][b]
    }

    pub fn is_curved(&self) -> bool {
        !self.data.curvature.is_zero()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.data.names.iter().position(|n| n == name)
    }

    pub fn mul(&self, x: &AlgebraElement<K>, y: &AlgebraElement<K>) -> AlgebraElement<K> {
        mul_with(&self.data, x, y)
    }

    pub fn d(&self, x: &AlgebraElement<K>) -> AlgebraElement<K> {
        d_with(&self.data, x)
    }

    /// Graded commutator `[x, y] = xy - (-1)^{|x||y|} yx` for homogeneous x, y.
    pub fn commutator(&self, x: &AlgebraElement<K>, y: &AlgebraElement<K>) -> AlgebraElement<K> {
        let (dx, dy) = (self.elem_degree(x).unwrap_or(0), self.elem_degree(y).unwrap_or(0));
        let sign = self.field().sign(Grading::is_odd(dx) && Grading::is_odd(dy));
        self.mul(x, y).sub(&self.mul(y, x).scale(&sign))
    }

    pub fn elem_degree(&self, x: &AlgebraElement<K>) -> Option<i64> {
        x.terms().next().map(|(_, _, b)| self.degree(b))
    }

    pub fn one(&self) -> AlgebraElement<K> {
        AlgebraElement::monomial(self.field(), 0, self.unit())
    }

    /// The canonical `c/t`: every t-power of `c` lowered by one.
    pub fn curvature_over_t(&self) -> AlgebraElement<K> {
        self.data.curvature.t_decrement()
    }

    /// Is `x` a valid witness for `c/t`, i.e. `t x = c` with the right degree?
    pub fn is_curvature_witness(&self, x: &AlgebraElement<K>) -> bool {
        let deg_ok = x.terms().all(|(_, _, b)| self.grading().norm(self.degree(b)) == self.grading().norm(2));
        deg_ok && x.t_shift(1, self.order()) == self.data.curvature
    }

    /// Opposite algebra: `a∘b = (-1)^{|a||b|} b·a`, same d, curvature `-c`.
    pub fn opposite(&self) -> Result<DeformedAlgebra<K>, AlgebraError> {
        let k = self.field();
        let n = self.dim();
        let mut data = self.data.clone();
        for a in 0..n {
            for b in 0..n {
                let s = k.sign(Grading::is_odd(self.degree(a)) && Grading::is_odd(self.degree(b)));
                data.mult[a][b] = self.data.mult[b][a].scale(&s);
            }
        }
        data.curvature = self.data.curvature.neg();
        validate_algebra(data)
    }

    /// `A_m = A_n ⊗ R_m` for `m ≤ n`.
    pub fn truncate(&self, m: usize) -> Result<DeformedAlgebra<K>, AlgebraError> {
        if m > self.order() {
            return Err(AlgebraError::Malformed(format!("truncation order {m} exceeds {}", self.order())));
        }
        let mut data = self.data.clone();
        data.order = m;
        for row in data.mult.iter_mut() {
            for x in row.iter_mut() {
                *x = x.truncate(m);
            }
        }
        for x in data.diff.iter_mut() {
            *x = x.truncate(m);
        }
        data.curvature = data.curvature.truncate(m);
        validate_algebra(data)
    }

    // ---- regular representation on A_i = A_n / t^{i+1} ----

    /// Basis index of `t^s b` in `A_i`.
    pub fn reg_index(&self, s: usize, b: usize) -> usize {
        s * self.dim() + b
    }

    /// Graded space of `A_i` (basis `t^s b`, `s ≤ i`).
    pub fn reg_space(&self, i: usize) -> GradedSpace {
        let degs = (0..=i).flat_map(|_| self.data.degrees.iter().copied()).collect();
        GradedSpace::new(self.grading(), degs)
    }

    fn reg_matrix<F: Fn(usize, usize) -> AlgebraElement<K>>(&self, i: usize, f: F) -> Matrix<K> {
        let n = (i + 1) * self.dim();
        let mut t = Vec::new();
        for s in 0..=i {
            for b in 0..self.dim() {
                let col = self.reg_index(s, b);
                for (p, c, e) in f(s, b).terms() {
                    if p <= i {
                        t.push((self.reg_index(p, e), col, c.clone()));
                    }
                }
            }
        }
        Matrix::from_triples(self.field(), n, n, t)
    }

    pub fn left_mult_matrix(&self, x: &AlgebraElement<K>, i: usize) -> Matrix<K> {
        self.reg_matrix(i, |s, b| self.mul(x, &AlgebraElement::monomial(self.field(), s, b)))
    }

    pub fn right_mult_matrix(&self, x: &AlgebraElement<K>, i: usize) -> Matrix<K> {
        self.reg_matrix(i, |s, b| self.mul(&AlgebraElement::monomial(self.field(), s, b), x))
    }

    pub fn reg_d_matrix(&self, i: usize) -> Matrix<K> {
        self.reg_matrix(i, |s, b| self.diff(b).t_shift(s, self.order()))
    }

    pub fn reg_t_matrix(&self, i: usize) -> Matrix<K> {
        self.reg_matrix(i, |s, b| AlgebraElement::monomial(self.field(), s + 1, b))
    }

    /// Projection `π: A_i -> A_{i-1}`.
    pub fn reg_projection(&self, i: usize) -> Matrix<K> {
        let t = (0..i * self.dim()).map(|j| (j, j, self.field().one()));
        Matrix::from_triples(self.field(), i * self.dim(), (i + 1) * self.dim(), t)
    }

    /// Multiplication by t viewed as `A_{i-1} -> A_i`.
    pub fn reg_t_up(&self, i: usize) -> Matrix<K> {
        let d = self.dim();
        let t = (0..i * d).map(|j| (j + d, j, self.field().one()));
        Matrix::from_triples(self.field(), (i + 1) * d, i * d, t)
    }
}

fn mul_with<K: Field>(data: &AlgebraData<K>, x: &AlgebraElement<K>, y: &AlgebraElement<K>) -> AlgebraElement<K> {
    let k = data.field;
    let mut out = AlgebraElement::zero(k);
    for (s1, c1, b1) in x.terms() {
        for (s2, c2, b2) in y.terms() {
            if s1 + s2 > data.order {
                continue;
            }
            let c = k.mul(c1, c2);
            for (s, c3, e) in data.mult[b1][b2].terms() {
                if s1 + s2 + s <= data.order {
                    out.add_term(s1 + s2 + s, e, &k.mul(&c, c3));
                }
            }
        }
    }
    out
}

fn d_with<K: Field>(data: &AlgebraData<K>, x: &AlgebraElement<K>) -> AlgebraElement<K> {
    let k = data.field;
    let mut out = AlgebraElement::zero(k);
    for (s, c, b) in x.terms() {
        for (p, c2, e) in data.diff[b].terms() {
            if s + p <= data.order {
                out.add_term(s + p, e, &k.mul(c, c2));
            }
        }
    }
    out
}

fn homogeneous_of<K: Field>(data: &AlgebraData<K>, x: &AlgebraElement<K>, deg: i64) -> bool {
    x.terms().all(|(_, _, b)| data.grading.norm(data.degrees[b]) == data.grading.norm(deg))
}

/// Check every axiom over the finite basis.
pub fn validate_algebra<K: Field>(mut data: AlgebraData<K>) -> Result<DeformedAlgebra<K>, AlgebraError> {
    let n = data.names.len();
    let g = data.grading;
    let order = data.order;
    let malformed = |s: String| Err(AlgebraError::Malformed(s));
    data.degrees = data.degrees.iter().map(|d| g.norm(*d)).collect();
    if data.degrees.len() != n || data.mult.len() != n || data.diff.len() != n {
        return malformed("basis, mult and diff lengths differ".into());
    }
    if data.unit >= n {
        return malformed("unit index out of range".into());
    }
    let mut sorted = data.names.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != n {
        return malformed("duplicate basis names".into());
    }
    let check_elem = |x: &AlgebraElement<K>, what: &str| {
        for (s, _, b) in x.terms() {
            if b >= n {
                return Err(AlgebraError::Malformed(format!("{what}: basis index {b} out of range")));
            }
            if s > order {
                return Err(AlgebraError::Malformed(format!("{what}: t-power {s} exceeds order {order}")));
            }
        }
        Ok(())
    };
    for a in 0..n {
        if data.mult[a].len() != n {
            return malformed(format!("mult row {} has wrong length", data.names[a]));
        }
        for b in 0..n {
            let p = &data.mult[a][b];
            check_elem(p, "mult")?;
            if !homogeneous_of(&data, p, data.degrees[a] + data.degrees[b]) {
                return malformed(format!("product {}*{} is not homogeneous", data.names[a], data.names[b]));
            }
        }
        check_elem(&data.diff[a], "diff")?;
        if !homogeneous_of(&data, &data.diff[a], data.degrees[a] + 1) {
            return malformed(format!("d({}) has wrong degree", data.names[a]));
        }
    }
    check_elem(&data.curvature, "curvature")?;
    if !homogeneous_of(&data, &data.curvature, 2) {
        return Err(AlgebraError::CurvatureDegree);
    }
    if data.curvature.min_t_power() == Some(0) {
        return Err(AlgebraError::CurvatureNotDivisible);
    }
    let k = data.field;
    let basis = |b: usize| AlgebraElement::monomial(k, 0, b);
    let u = basis(data.unit);
    for b in 0..n {
        let e = basis(b);
        if mul_with(&data, &u, &e) != e || mul_with(&data, &e, &u) != e {
            return Err(AlgebraError::UnitFailure(data.names[b].clone()));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = mul_with(&data, &basis(a), &basis(b));
            for c in 0..n {
                let bc = mul_with(&data, &basis(b), &basis(c));
                if mul_with(&data, &ab, &basis(c)) != mul_with(&data, &basis(a), &bc) {
                    return Err(AlgebraError::NotAssociative(data.names[a].clone(), data.names[b].clone(), data.names[c].clone()));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let lhs = d_with(&data, &mul_with(&data, &basis(a), &basis(b)));
            let sign = k.sign(Grading::is_odd(data.degrees[a]));
            let rhs = mul_with(&data, &data.diff[a], &basis(b)).add(&mul_with(&data, &basis(a), &data.diff[b]).scale(&sign));
            if lhs != rhs {
                return Err(AlgebraError::LeibnizFailure(data.names[a].clone(), data.names[b].clone()));
            }
        }
    }
    if !d_with(&data, &data.curvature).is_zero() {
        return Err(AlgebraError::CurvatureNotClosed);
    }
    for b in 0..n {
        let e = basis(b);
        let dd = d_with(&data, &d_with(&data, &e));
        // c has even degree, so [c, e] = ce - ec
        let comm = mul_with(&data, &data.curvature, &e).sub(&mul_with(&data, &e, &data.curvature));
        if dd != comm {
            return Err(AlgebraError::DSquareMismatch(data.names[b].clone()));
        }
    }
    Ok(DeformedAlgebra { data })
}

/// `R_n` itself: `A = k` in degree 0, zero differential and curvature `c`.
pub fn ground_ring<K: Field>(k: K, grading: Grading, order: usize, curvature: Vec<(usize, K::Elem)>) -> Result<DeformedAlgebra<K>, AlgebraError> {
    let c = AlgebraElement::from_terms(k, curvature.into_iter().map(|(s, v)| (s, v, 0)));
    validate_algebra(AlgebraData {
        field: k,
        grading,
        order,
        names: vec!["1".into()],
        degrees: vec![0],
        unit: 0,
        mult: vec![vec![AlgebraElement::monomial(k, 0, 0)]],
        diff: vec![AlgebraElement::zero(k)],
        curvature: c,
    })
}

/// The graded-field model in parity mode: `A = k`, `n = 1`, `d = 0`, `c = t`.
pub fn graded_field_model<K: Field>(k: K) -> DeformedAlgebra<K> {
    ground_ring(k, Grading::Parity, 1, vec![(1, k.one())]).expect("graded field model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    /// k[y]/(y^3), |y| = 1, order n, curvature given.
    fn truncated_poly<K: Field>(k: K, grading: Grading, n: usize, curv: Vec<(usize, K::Elem, usize)>) -> AlgebraData<K> {
        let mut mult = vec![vec![AlgebraElement::zero(k); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                if a + b < 3 {
                    mult[a][b] = AlgebraElement::monomial(k, 0, a + b);
                }
            }
        }
        AlgebraData {
            field: k,
            grading,
            order: n,
            names: vec!["1".into(), "y".into(), "y2".into()],
            degrees: vec![0, 1, 2],
            unit: 0,
            mult,
            diff: vec![AlgebraElement::zero(k); 3],
            curvature: AlgebraElement::from_terms(k, curv),
        }
    }

    #[test]
    fn ground_ring_is_valid() {
        let a = ground_ring(Rationals, Grading::Integers, 1, vec![]).unwrap();
        assert!(!a.is_curved());
        assert!(a.curvature_over_t().is_zero());
    }

    #[test]
    fn graded_field_model_checks() {
        let k = Rationals;
        let a = graded_field_model(k);
        assert_eq!(a.curvature_over_t(), a.one());
        let op = a.opposite().unwrap();
        assert_eq!(op.curvature(), &AlgebraElement::from_terms(k, [(1, k.from_i64(-1), 0)]));
        let bad = ground_ring(k, Grading::Parity, 1, vec![(0, k.one())]);
        assert_eq!(bad, Err(AlgebraError::CurvatureNotDivisible));
    }

    #[test]
    fn curvature_decrement() {
        let k = PrimeField::default();
        let a = validate_algebra(truncated_poly(k, Grading::Integers, 2, vec![(2, 1, 2)])).unwrap();
        assert_eq!(a.curvature_over_t(), AlgebraElement::monomial(k, 1, 2));
        assert!(a.is_curvature_witness(&a.curvature_over_t()));
        // the ambiguity t^n A_n
        let alt = a.curvature_over_t().add(&AlgebraElement::monomial(k, 2, 2));
        assert!(a.is_curvature_witness(&alt));
        assert_eq!(a.curvature_over_t().t_shift(1, 2), *a.curvature());
    }

    #[test]
    fn detects_axiom_failures() {
        let k = PrimeField::default();
        let mut d = truncated_poly(k, Grading::Parity, 1, vec![]);
        d.mult[1][2] = AlgebraElement::monomial(k, 0, 1);
        assert!(matches!(validate_algebra(d), Err(AlgebraError::NotAssociative(..))));
        let mut d = truncated_poly(k, Grading::Integers, 1, vec![]);
        d.mult[0][1] = AlgebraElement::zero(k);
        assert!(matches!(validate_algebra(d), Err(AlgebraError::UnitFailure(_))));
        let mut d = truncated_poly(k, Grading::Integers, 1, vec![]);
        d.diff[0] = AlgebraElement::monomial(k, 0, 1);
        assert!(matches!(validate_algebra(d), Err(AlgebraError::LeibnizFailure(..))));
        // d(y) = y^2 is a genuine differential, but d^2 = 0 != [c, -] fails once c is not central
        let mut d = truncated_poly(k, Grading::Integers, 1, vec![]);
        d.diff[1] = AlgebraElement::monomial(k, 0, 2);
        assert!(validate_algebra(d).is_ok());
        let d = truncated_poly(k, Grading::Integers, 1, vec![(1, 1, 1)]);
        assert_eq!(validate_algebra(d), Err(AlgebraError::CurvatureDegree));
    }

    #[test]
    fn opposite_and_truncate() {
        let k = PrimeField::default();
        let a = validate_algebra(truncated_poly(k, Grading::Integers, 3, vec![(1, 1, 2), (3, 5, 2)])).unwrap();
        let op = a.opposite().unwrap();
        assert_eq!(op.opposite().unwrap(), a);
        let t2 = a.truncate(2).unwrap();
        assert_eq!(t2.truncate(1).unwrap(), a.truncate(1).unwrap());
        let t0 = a.truncate(0).unwrap();
        assert!(!t0.is_curved());
        assert!(a.truncate(4).is_err());
        let comm = ground_ring(k, Grading::Integers, 2, vec![]).unwrap();
        assert_eq!(comm.opposite().unwrap(), comm);
    }

    #[test]
    fn regular_matrices_consistent() {
        let k = PrimeField::default();
        let a = validate_algebra(truncated_poly(k, Grading::Parity, 2, vec![(1, 1, 2)])).unwrap();
        let y = AlgebraElement::monomial(k, 0, 1);
        let l = a.left_mult_matrix(&y, 2);
        let t = a.reg_t_matrix(2);
        assert_eq!(l.mul(&t), t.mul(&l));
        assert!(t.pow(3).is_zero());
        let pi = a.reg_projection(2);
        let up = a.reg_t_up(2);
        assert_eq!(up.mul(&pi), t);
    }
}
