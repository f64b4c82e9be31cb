//! Seeded random algebras and modules, and greedy reproducer minimisation.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{validate_algebra, AlgebraData, AlgebraElement, DeformedAlgebra};
use crate::field::Field;
use crate::filtration::forget;
use crate::generators::{gamma, gamma_star, twist, TwistSpec};
use crate::graded::Grading;
use crate::module::{hom_complex, regular_module, CdgModule, ModuleError, Morphism};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BaseAlgebra {
    /// `A = k`.
    Ground,
    /// `k[y]/(y^3)`, `|y| = 1`.
    TruncatedPoly,
    /// `k[x]/(x^2)`, `|x| = 2`.
    DualNumbers,
    /// `M_2(k)` with `|e12| = 1`, `|e21| = -1`, `d = [e12, -]`.
    Matrices,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraRecipe {
    pub base: BaseAlgebra,
    pub grading: Grading,
    pub order: usize,
    /// add a curvature term directly (for bases with a central degree-2 element)
    pub direct_curvature: bool,
    /// twist the differential by an odd element of `tA`
    pub inner_twist: bool,
    /// conjugate by `id + t g`
    pub gauge: bool,
    pub seed: u64,
}

fn elem<K: Field>(k: K, terms: &[(usize, i64, usize)]) -> AlgebraElement<K> {
    AlgebraElement::from_terms(k, terms.iter().map(|&(s, c, b)| (s, k.from_i64(c), b)))
}

fn base_data<K: Field>(k: K, base: BaseAlgebra, grading: Grading, order: usize) -> AlgebraData<K> {
    let mono = |b| AlgebraElement::monomial(k, 0, b);
    let zero = AlgebraElement::zero(k);
    let (names, degrees, mult, diff): (Vec<&str>, Vec<i64>, Vec<Vec<AlgebraElement<K>>>, Vec<AlgebraElement<K>>) = match base {
        BaseAlgebra::Ground => (vec!["1"], vec![0], vec![vec![mono(0)]], vec![zero.clone()]),
        BaseAlgebra::TruncatedPoly => {
            let mult = (0..3).map(|a| (0..3).map(|b| if a + b < 3 { mono(a + b) } else { zero.clone() }).collect()).collect();
            (vec!["1", "y", "y2"], vec![0, 1, 2], mult, vec![zero.clone(); 3])
        }
        BaseAlgebra::DualNumbers => {
            let mult = vec![vec![mono(0), mono(1)], vec![mono(1), zero.clone()]];
            (vec!["1", "x"], vec![0, 2], mult, vec![zero.clone(); 2])
        }
        BaseAlgebra::Matrices => {
            // basis 1, e11, e12, e21; a 2x2 matrix [[p, q], [r, s]] is s + (p - s) e11 + q e12 + r e21
            let mats: [[i64; 4]; 4] = [[1, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]];
            let to_elem = |m: [i64; 4]| elem(k, &[(0, m[3], 0), (0, m[0] - m[3], 1), (0, m[1], 2), (0, m[2], 3)]);
            let prod = |x: [i64; 4], y: [i64; 4]| {
                [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
            };
            let mult = (0..4).map(|a| (0..4).map(|b| to_elem(prod(mats[a], mats[b]))).collect()).collect();
            let diff = vec![zero.clone(), elem(k, &[(0, -1, 2)]), zero.clone(), mono(0)];
            (vec!["1", "e11", "e12", "e21"], vec![0, 0, 1, -1], mult, diff)
        }
    };
    AlgebraData {
        field: k,
        grading,
        order,
        names: names.into_iter().map(String::from).collect(),
        degrees: degrees.into_iter().map(|d| grading.norm(d)).collect(),
        unit: 0,
        mult,
        diff,
        curvature: zero,
    }
}

fn random_coeff<K: Field, R: Rng>(k: &K, rng: &mut R) -> K::Elem {
    loop {
        let c = k.random(rng);
        if !k.is_zero(&c) {
            return c;
        }
    }
}

/// Random combination of `t^s b` with `s ≥ min_t` and `deg b ≡ deg`.
fn random_homogeneous<K: Field, R: Rng>(k: K, data: &AlgebraData<K>, deg: i64, min_t: usize, rng: &mut R) -> AlgebraElement<K> {
    let mut out = AlgebraElement::zero(k);
    for b in 0..data.names.len() {
        if data.grading.norm(data.degrees[b]) != data.grading.norm(deg) {
            continue;
        }
        for s in min_t..=data.order {
            if rng.gen_bool(0.5) {
                out.add_term(s, b, &random_coeff(&k, rng));
            }
        }
    }
    out
}

/// `d' = d + [α, -]`, `c' = c + dα + α^2` for odd `α`.
fn inner_twist<K: Field>(a: &DeformedAlgebra<K>, alpha: &AlgebraElement<K>) -> AlgebraData<K> {
    let k = a.field();
    let mut data = a.data().clone();
    for b in 0..a.dim() {
        let e = AlgebraElement::monomial(k, 0, b);
        let s = k.sign(Grading::is_odd(a.degree(b)));
        let comm = a.mul(alpha, &e).sub(&a.mul(&e, alpha).scale(&s));
        data.diff[b] = data.diff[b].add(&comm);
    }
    data.curvature = a.curvature().add(&a.d(alpha)).add(&a.mul(alpha, alpha));
    data
}

/// Transport of structure along `φ = id + t g`, `g` degree-preserving with `g(1) = 0`.
fn gauge<K: Field, R: Rng>(a: &DeformedAlgebra<K>, rng: &mut R) -> AlgebraData<K> {
    let k = a.field();
    let n = a.order();
    let g: Vec<AlgebraElement<K>> = (0..a.dim())
        .map(|b| {
            if b == a.unit() {
                AlgebraElement::zero(k)
            } else {
                random_homogeneous(k, a.data(), a.degree(b), 0, rng)
            }
        })
        .collect();
    let tg = |x: &AlgebraElement<K>| {
        let mut out = AlgebraElement::zero(k);
        for (s, c, b) in x.terms() {
            out = out.add(&g[b].t_shift(s + 1, n).scale(c));
        }
        out
    };
    let phi = |x: &AlgebraElement<K>| x.add(&tg(x));
    let phi_inv = |x: &AlgebraElement<K>| {
        let mut y = x.clone();
        for _ in 0..=n {
            y = x.sub(&tg(&y));
        }
        y
    };
    let mut data = a.data().clone();
    for l in 0..a.dim() {
        for r in 0..a.dim() {
            let pl = phi(&AlgebraElement::monomial(k, 0, l));
            let pr = phi(&AlgebraElement::monomial(k, 0, r));
            data.mult[l][r] = phi_inv(&a.mul(&pl, &pr));
        }
        data.diff[l] = phi_inv(&a.d(&phi(&AlgebraElement::monomial(k, 0, l))));
    }
    data.curvature = phi_inv(a.curvature());
    data
}

pub fn build_algebra<K: Field>(k: K, r: &AlgebraRecipe) -> DeformedAlgebra<K> {
    let mut rng = rng_from_seed(r.seed);
    let mut data = base_data(k, r.base, r.grading, r.order);
    if r.direct_curvature {
        data.curvature = random_homogeneous(k, &data, 2, 1, &mut rng);
        if r.base == BaseAlgebra::Matrices {
            // only scalars are central
            data.curvature = AlgebraElement::from_terms(k, data.curvature.terms().filter(|(_, _, b)| *b == 0).map(|(s, c, b)| (s, c.clone(), b)).collect::<Vec<_>>());
        }
    }
    let mut a = validate_algebra(data).expect("base recipes are valid");
    if r.inner_twist {
        let alpha = random_homogeneous(k, a.data(), 1, 1, &mut rng);
        a = validate_algebra(inner_twist(&a, &alpha)).expect("inner twists are valid");
    }
    if r.gauge {
        a = validate_algebra(gauge(&a, &mut rng)).expect("gauge transforms are valid");
    }
    a
}

pub fn random_algebra_recipe<R: Rng>(rng: &mut R, orders: &[usize]) -> AlgebraRecipe {
    let base = *[BaseAlgebra::Ground, BaseAlgebra::TruncatedPoly, BaseAlgebra::DualNumbers, BaseAlgebra::Matrices]
        .choose(rng)
        .unwrap();
    let grading = if rng.gen_bool(0.5) { Grading::Integers } else { Grading::Parity };
    let order = *orders.choose(rng).unwrap();
    AlgebraRecipe {
        base,
        grading,
        order,
        direct_curvature: rng.gen_bool(0.6),
        inner_twist: rng.gen_bool(0.5),
        gauge: rng.gen_bool(0.4),
        seed: rng.gen(),
    }
}

pub fn random_algebra<K: Field, R: Rng>(k: K, rng: &mut R, orders: &[usize]) -> (AlgebraRecipe, DeformedAlgebra<K>) {
    let r = random_algebra_recipe(rng, orders);
    let a = build_algebra(k, &r);
    (r, a)
}

/// A description of how a random module is assembled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Recipe {
    Gamma { i: usize, shift: i64 },
    GammaStar { i: usize, shift: i64 },
    /// `A_n` itself; only for uncurved algebras.
    Regular { shift: i64 },
    /// `A_n e ⊕ A_n f`, `de = f`, `df = ce`.
    Contractible { shift: i64 },
    /// built over `truncate(a, order)` and forgotten.
    Forget { order: usize, inner: Box<Recipe> },
    Sum(Vec<Recipe>),
    /// cone of a random closed degree-0 morphism
    Cone { source: Box<Recipe>, target: Box<Recipe>, seed: u64 },
    /// `lower ⊕ upper` twisted by a random degree-1 cycle `lower -> upper`
    Twist { lower: Box<Recipe>, upper: Box<Recipe>, seed: u64 },
    IdentityCone(Box<Recipe>),
}

impl Recipe {
    fn children(&self) -> Vec<Recipe> {
        match self {
            Recipe::Forget { inner, .. } => vec![(**inner).clone()],
            Recipe::Sum(parts) => {
                let mut out = parts.clone();
                if parts.len() > 1 {
                    for j in 0..parts.len() {
                        let mut p = parts.clone();
                        p.remove(j);
                        out.push(Recipe::Sum(p));
                    }
                }
                out
            }
            Recipe::Cone { source, target, .. } | Recipe::Twist { lower: source, upper: target, .. } => {
                vec![(**source).clone(), (**target).clone()]
            }
            Recipe::IdentityCone(inner) => vec![(**inner).clone()],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModulePolicy {
    pub max_dim: usize,
    pub max_depth: usize,
    /// weights for: shifted generators, forget, cones, twists, contractible/identity cones
    pub weights: [u32; 5],
}

impl Default for ModulePolicy {
    fn default() -> Self {
        ModulePolicy { max_dim: 40, max_depth: 2, weights: [4, 2, 2, 2, 1] }
    }
}

impl ModulePolicy {
    pub fn small() -> Self {
        ModulePolicy { max_dim: 16, ..Self::default() }
    }
}

fn random_closed<K: Field>(src: &CdgModule<K>, tgt: &CdgModule<K>, degree: i64, seed: u64) -> Result<Morphism<K>, ModuleError> {
    let k = src.field();
    let mut rng = rng_from_seed(seed);
    let hom = hom_complex(src, tgt)?;
    let (z, _) = hom.complex.cycles_boundaries(degree);
    let mut v = vec![k.zero(); hom.dim()];
    for b in z.basis() {
        let c = k.random(&mut rng);
        for (x, y) in v.iter_mut().zip(b) {
            *x = k.add(x, &k.mul(&c, y));
        }
    }
    Morphism::new(src.clone(), tgt.clone(), degree, hom.map_of(&v))
}

pub fn contractible<K: Field>(a: &Arc<DeformedAlgebra<K>>) -> Result<CdgModule<K>, ModuleError> {
    let n = a.order();
    let reg = regular_module(a, n);
    let c = a.right_mult_matrix(a.curvature(), n);
    let id = crate::linalg::Matrix::identity(a.field(), reg.dim());
    let spec = TwistSpec { summands: vec![reg.clone(), reg.shift(-1)], blocks: vec![(0, 1, c), (1, 0, id)] };
    twist(&spec).map_err(|e| ModuleError::Malformed(e.to_string()))?.module.into_cdg()
}

pub fn build_module<K: Field>(a: &Arc<DeformedAlgebra<K>>, r: &Recipe) -> Result<CdgModule<K>, ModuleError> {
    let lift = |e: crate::generators::GeneratorError| ModuleError::Malformed(e.to_string());
    Ok(match r {
        Recipe::Gamma { i, shift } => gamma(a, *i).map_err(lift)?.shift(*shift),
        Recipe::GammaStar { i, shift } => gamma_star(a, *i).map_err(lift)?.shift(*shift),
        Recipe::Regular { shift } => regular_module(a, a.order()).into_cdg()?.shift(*shift),
        Recipe::Contractible { shift } => contractible(a)?.shift(*shift),
        Recipe::Forget { order, inner } => {
            let low = Arc::new(a.truncate(*order)?);
            forget(&build_module(&low, inner)?, a)?
        }
        Recipe::Sum(parts) => {
            let ms = parts.iter().map(|p| build_module(a, p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&CdgModule<K>> = ms.iter().collect();
            if refs.is_empty() {
                CdgModule::zero(a.clone())
            } else {
                CdgModule::direct_sum(&refs)?
            }
        }
        Recipe::Cone { source, target, seed } => {
            let s = build_module(a, source)?;
            let t = build_module(a, target)?;
            random_closed(&s, &t, 0, *seed)?.cone()?
        }
        Recipe::Twist { lower, upper, seed } => {
            let l = build_module(a, lower)?;
            let u = build_module(a, upper)?;
            let f = random_closed(&l, &u, 1, *seed)?;
            let spec = TwistSpec { summands: vec![l.into_qdg(), u.into_qdg()], blocks: vec![(1, 0, f.matrix)] };
            twist(&spec).map_err(lift)?.module.into_cdg()?
        }
        Recipe::IdentityCone(inner) => build_module(a, inner)?.identity().cone()?,
    })
}

fn leaf<K: Field, R: Rng>(a: &DeformedAlgebra<K>, rng: &mut R) -> Recipe {
    let n = a.order();
    let shift = rng.gen_range(-2..=2);
    match rng.gen_range(0..10) {
        0 => Recipe::Contractible { shift },
        1 if !a.is_curved() => Recipe::Regular { shift },
        2 => Recipe::GammaStar { i: rng.gen_range(0..=n), shift },
        _ => Recipe::Gamma { i: rng.gen_range(0..=n), shift },
    }
}

fn random_recipe<K: Field, R: Rng>(a: &DeformedAlgebra<K>, p: &ModulePolicy, depth: usize, rng: &mut R) -> Recipe {
    if depth >= p.max_depth {
        return leaf(a, rng);
    }
    let total: u32 = p.weights.iter().sum();
    let mut pick = rng.gen_range(0..total.max(1));
    let mut kind = 0;
    for (j, w) in p.weights.iter().enumerate() {
        if pick < *w {
            kind = j;
            break;
        }
        pick -= w;
    }
    match kind {
        0 => {
            let count = rng.gen_range(1..=2);
            let parts: Vec<Recipe> = (0..count).map(|_| leaf(a, rng)).collect();
            if parts.len() == 1 {
                parts.into_iter().next().unwrap()
            } else {
                Recipe::Sum(parts)
            }
        }
        1 if a.order() > 0 => {
            let order = rng.gen_range(0..a.order());
            let low = a.truncate(order).expect("truncation of a valid algebra");
            Recipe::Forget { order, inner: Box::new(random_recipe(&low, p, depth + 1, rng)) }
        }
        2 => Recipe::Cone {
            source: Box::new(random_recipe(a, p, depth + 1, rng)),
            target: Box::new(random_recipe(a, p, depth + 1, rng)),
            seed: rng.gen(),
        },
        3 => Recipe::Twist {
            lower: Box::new(random_recipe(a, p, depth + 1, rng)),
            upper: Box::new(random_recipe(a, p, depth + 1, rng)),
            seed: rng.gen(),
        },
        4 => Recipe::IdentityCone(Box::new(leaf(a, rng))),
        _ => leaf(a, rng),
    }
}

fn estimate<K: Field>(a: &DeformedAlgebra<K>, r: &Recipe) -> usize {
    let d = a.dim();
    match r {
        Recipe::Gamma { i, .. } | Recipe::GammaStar { i, .. } => (2 * i + 1) * d,
        Recipe::Regular { .. } => (a.order() + 1) * d,
        Recipe::Contractible { .. } => 2 * (a.order() + 1) * d,
        Recipe::Forget { order, inner } => estimate(&a.truncate(*order).expect("valid truncation"), inner),
        Recipe::Sum(ps) => ps.iter().map(|p| estimate(a, p)).sum(),
        Recipe::Cone { source, target, .. } | Recipe::Twist { lower: source, upper: target, .. } => estimate(a, source) + estimate(a, target),
        Recipe::IdentityCone(inner) => 2 * estimate(a, inner),
    }
}

/// A random valid module of dimension at most `policy.max_dim`.
pub fn random_module<K: Field, R: Rng>(a: &Arc<DeformedAlgebra<K>>, policy: &ModulePolicy, rng: &mut R) -> (Recipe, CdgModule<K>) {
    for _ in 0..64 {
        let r = random_recipe(a, policy, 0, rng);
        if estimate(a, &r) > policy.max_dim {
            continue;
        }
        let m = build_module(a, &r).expect("recipes build valid modules");
        let m = crate::module::validate_module(m.data().clone(), a.clone()).expect("recipes build valid modules");
        return (r, m);
    }
    let r = Recipe::Gamma { i: 0, shift: 0 };
    let m = build_module(a, &r).expect("Γ_0 is valid");
    (r, m)
}

/// Greedily replace the recipe by sub-recipes for which `fails` still holds.
pub fn minimize<K: Field>(a: &Arc<DeformedAlgebra<K>>, r: &Recipe, fails: &dyn Fn(&CdgModule<K>) -> bool) -> Recipe {
    let mut cur = r.clone();
    'outer: loop {
        for c in cur.children() {
            if let Ok(m) = build_module(a, &c) {
                if fails(&m) {
                    cur = c;
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::filtration::is_n_acyclic;

    #[test]
    fn algebras_validate() {
        let k = PrimeField::default();
        let mut rng = rng_from_seed(11);
        let mut curved = 0;
        for _ in 0..40 {
            let (_, a) = random_algebra(k, &mut rng, &[1, 2, 3]);
            curved += a.is_curved() as usize;
            assert!(a.opposite().is_ok());
        }
        assert!(curved > 5);
    }

    #[test]
    fn deterministic() {
        let k = PrimeField::default();
        let run = || {
            let mut rng = rng_from_seed(7);
            let (_, a) = random_algebra(k, &mut rng, &[1, 2]);
            let a = Arc::new(a);
            random_module(&a, &ModulePolicy::small(), &mut rng).1
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn both_verdicts_occur() {
        let k = PrimeField::default();
        let mut rng = rng_from_seed(3);
        let (mut yes, mut no) = (0, 0);
        for _ in 0..30 {
            let (_, a) = random_algebra(k, &mut rng, &[1, 2]);
            let a = Arc::new(a);
            let (_, m) = random_module(&a, &ModulePolicy::small(), &mut rng);
            if is_n_acyclic(&m).unwrap().answer {
                yes += 1;
            } else {
                no += 1;
            }
        }
        assert!(yes > 0 && no > 0, "{yes} {no}");
    }

    #[test]
    fn contractible_is_n_acyclic() {
        let k = PrimeField::default();
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let (_, a) = random_algebra(k, &mut rng, &[1, 2]);
            let c = contractible(&Arc::new(a)).unwrap();
            assert!(is_n_acyclic(&c).unwrap().answer);
            assert!(crate::filtration::is_rn_free(&c));
        }
    }

    #[test]
    fn minimizes_to_a_leaf() {
        let k = PrimeField::default();
        let a = Arc::new(crate::algebra::graded_field_model(k));
        let r = Recipe::Sum(vec![Recipe::Gamma { i: 0, shift: 0 }, Recipe::Gamma { i: 1, shift: 1 }]);
        let fails = |m: &CdgModule<PrimeField>| m.dim() > 0 && !m.t().is_zero();
        assert_eq!(minimize(&a, &r, &fails), Recipe::Gamma { i: 1, shift: 1 });
    }
}
