//! Base fields: the rationals and prime fields F_p.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} too large (must be below 2^31)")]
    ModulusTooLarge(u64),
    #[error("unknown field descriptor {0:?}")]
    BadDescriptor(String),
}

/// Which field a workbench run uses; parsed from `q` or `fp:P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    Prime(u32),
}

impl FieldKind {
    pub fn parse(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if s == "q" || s == "Q" {
            return Ok(FieldKind::Rationals);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u64 = p.parse().map_err(|_| FieldError::BadDescriptor(s.to_string()))?;
            PrimeField::new(p)?;
            return Ok(FieldKind::Prime(p as u32));
        }
        Err(FieldError::BadDescriptor(s.to_string()))
    }

    pub fn descriptor(&self) -> String {
        match self {
            FieldKind::Rationals => "q".to_string(),
            FieldKind::Prime(p) => format!("fp:{p}"),
        }
    }
}

/// Exact field arithmetic. Elements carry no context; the field value does.
pub trait Field: Copy + Debug + PartialEq + Eq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn kind(&self) -> FieldKind;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem, FieldError>;
    /// Canonical numerator/denominator pair (denominator positive; 1 for F_p).
    fn to_ratio(&self, a: &Self::Elem) -> (BigInt, BigInt);
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// A random element; small numerators for the rationals.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn sign(&self, odd: bool) -> Self::Elem {
        if odd {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn kind(&self) -> FieldKind {
        FieldKind::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<BigRational, FieldError> {
        if den.is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn to_ratio(&self, a: &BigRational) -> (BigInt, BigInt) {
        (a.numer().clone(), a.denom().clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.gen_range(-3..=3);
        let den: i64 = rng.gen_range(1..=2);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// F_p with p < 2^31, elements stored as canonical residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

pub const DEFAULT_PRIME: u32 = 32003;

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_big(&self, v: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u32().expect("residue fits in u32")
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn kind(&self) -> FieldKind {
        FieldKind::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<u32, FieldError> {
        let d = self.reduce_big(den);
        let d = self.inv(&d).ok_or(FieldError::ZeroDenominator)?;
        Ok(self.mul(&self.reduce_big(num), &d))
    }
    fn to_ratio(&self, a: &u32) -> (BigInt, BigInt) {
        (BigInt::from(*a), BigInt::one())
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + self.p as u64 - *b as u64;
        (s % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - *a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let p = self.p as u64;
        let mut base = *a as u64;
        let mut e = p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Some(acc as u32)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

/// Render an element as `n` or `n/d` (F_p elements as residues).
pub fn format_elem<K: Field>(k: &K, a: &K::Elem) -> String {
    let (n, d) = k.to_ratio(a);
    if d.is_one() {
        n.to_string()
    } else {
        format!("{}/{}", n, d.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_inverse_roundtrip() {
        let k = PrimeField::new(5).unwrap();
        for a in 1..5u32 {
            assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), 1);
        }
        assert_eq!(k.inv(&0), None);
    }

    #[test]
    fn ratio_into_prime_field() {
        let k = PrimeField::new(7).unwrap();
        // 1/2 = 4 mod 7
        assert_eq!(k.from_ratio(&BigInt::from(1), &BigInt::from(2)).unwrap(), 4);
        assert_eq!(k.from_i64(-1), 6);
        assert!(k.from_ratio(&BigInt::from(1), &BigInt::from(7)).is_err());
    }

    #[test]
    fn descriptor_parse() {
        assert_eq!(FieldKind::parse("q").unwrap(), FieldKind::Rationals);
        assert_eq!(FieldKind::parse("fp:32003").unwrap(), FieldKind::Prime(32003));
        assert!(FieldKind::parse("fp:8").is_err());
        assert!(FieldKind::parse("r").is_err());
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let k = Rationals;
        let third = k.from_ratio(&BigInt::from(1), &BigInt::from(3)).unwrap();
        let s = k.add(&k.add(&third, &third), &third);
        assert!(k.is_one(&s));
        assert_eq!(format_elem(&k, &third), "1/3");
    }
}
