//! Finite sparse multilinear forms and the explicit forms used throughout the crate.
//!
//! A form of arity `m` is `T(x¹,…,xᵐ) = Σ α_{i₁…iₘ} x¹_{i₁}⋯xᵐ_{iₘ}` over a finite
//! support. Indices are 1-based in the API and in serialized files. Terms are
//! kept sorted by index and `dims` is always the largest used index per slot,
//! so two forms with the same term set compare equal.

use std::fmt;
use std::ops::Neg;

use num::traits::{Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational, Integer, One};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, rational_from_f64, rational_to_f64};

/// Coefficient of a monomial: exact rational unless built from an irrational real.
#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    Rational(BigRational),
    Real(f64),
}

impl Coef {
    pub fn int(n: i64) -> Self {
        Coef::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Coef::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn real(x: f64) -> Self {
        Coef::Real(x)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Rational(r) => r.is_zero(),
            Coef::Real(x) => *x == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coef::Rational(r) => rational_to_f64(r),
            Coef::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coef::Rational(r) => Some(r),
            Coef::Real(_) => None,
        }
    }

    pub fn abs(&self) -> Coef {
        match self {
            Coef::Rational(r) => Coef::Rational(r.abs()),
            Coef::Real(x) => Coef::Real(x.abs()),
        }
    }

    pub fn mul(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Rational(a), Coef::Rational(b)) => Coef::Rational(a * b),
            _ => Coef::Real(self.to_f64() * other.to_f64()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Coef::Rational(r) if r.is_integer() => match r.numer().to_i64() {
                Some(n) => Value::from(n),
                None => Value::String(format_rational(r)),
            },
            Coef::Rational(r) => Value::String(format_rational(r)),
            Coef::Real(x) => Value::from(*x),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidCoefficient(v.to_string());
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Coef::int(i))
                } else {
                    let x = n.as_f64().ok_or_else(bad)?;
                    rational_from_f64(x).map(Coef::Rational).ok_or_else(bad)
                }
            }
            Value::String(s) => parse_rational(s).map(Coef::Rational).ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        match self {
            Coef::Rational(r) => Coef::Rational(-r),
            Coef::Real(x) => Coef::Real(-x),
        }
    }
}

impl From<i64> for Coef {
    fn from(n: i64) -> Self {
        Coef::int(n)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Rational(r) => write!(f, "{}", format_rational(r)),
            Coef::Real(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    pub index: Vec<u32>,
    pub coef: Coef,
}

impl MonomialTerm {
    pub fn new(index: Vec<u32>, coef: impl Into<Coef>) -> Self {
        Self { index, coef: coef.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct MultilinearForm {
    arity: usize,
    dims: Vec<u32>,
    terms: Vec<MonomialTerm>,
}

impl MultilinearForm {
    /// Validates and canonicalizes: terms sorted by index, dims shrunk to the
    /// largest used index per slot.
    pub fn new(arity: usize, dims: &[u32], mut terms: Vec<MonomialTerm>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ArityTooSmall { min: 1, found: 0 });
        }
        if dims.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: dims.len() });
        }
        if terms.is_empty() {
            return Err(Error::EmptyForm);
        }
        for t in &terms {
            if t.index.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: t.index.len() });
            }
            if t.index.iter().zip(dims).any(|(&i, &d)| i == 0 || i > d) {
                return Err(Error::IndexOutOfRange { index: t.index.clone(), dims: dims.to_vec() });
            }
            if t.coef.is_zero() {
                return Err(Error::ZeroCoefficient(t.index.clone()));
            }
            if let Coef::Real(x) = t.coef {
                if !x.is_finite() {
                    return Err(Error::InvalidCoefficient(x.to_string()));
                }
            }
        }
        terms.sort_by(|a, b| a.index.cmp(&b.index));
        if let Some(w) = terms.windows(2).find(|w| w[0].index == w[1].index) {
            return Err(Error::DuplicateIndex(w[0].index.clone()));
        }
        let mut min_dims = vec![0u32; arity];
        for t in &terms {
            for (d, &i) in min_dims.iter_mut().zip(&t.index) {
                *d = (*d).max(i);
            }
        }
        Ok(Self { arity, dims: min_dims, terms })
    }

    /// Builds a form whose dims are inferred from the terms.
    pub fn from_terms(arity: usize, terms: Vec<MonomialTerm>) -> Result<Self> {
        let mut dims = vec![0u32; arity];
        for t in &terms {
            for (d, &i) in dims.iter_mut().zip(&t.index) {
                *d = (*d).max(i);
            }
        }
        Self::new(arity, &dims, terms)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, index: &[u32]) -> Option<&Coef> {
        self.terms
            .binary_search_by(|t| t.index.as_slice().cmp(index))
            .ok()
            .map(|k| &self.terms[k].coef)
    }

    /// Sorted, deduplicated indices used in a slot (0-based slot).
    pub fn used_indices(&self, slot: usize) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.iter().map(|t| t.index[slot]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|t| matches!(t.coef, Coef::Rational(_)))
    }

    pub fn is_unimodular(&self) -> bool {
        self.terms.iter().all(|t| match &t.coef {
            Coef::Rational(r) => r.abs().is_one(),
            Coef::Real(_) => false,
        })
    }

    /// Coefficients as integers over a common denominator, when they fit `i64`.
    pub fn integer_coefficients(&self) -> Option<(Vec<i64>, BigInt)> {
        let mut den = BigInt::one();
        for t in &self.terms {
            den = den.lcm(t.coef.as_rational()?.denom());
        }
        let coefs = self
            .terms
            .iter()
            .map(|t| {
                let r = t.coef.as_rational()?;
                (r.numer() * (&den / r.denom())).to_i64()
            })
            .collect::<Option<Vec<i64>>>()?;
        Some((coefs, den))
    }

    fn check_vectors<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<()> {
        if vectors.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: vectors.len() });
        }
        for (k, (v, &d)) in vectors.iter().zip(&self.dims).enumerate() {
            if v.as_ref().len() < d as usize {
                return Err(Error::VectorTooShort {
                    slot: k + 1,
                    needed: d as usize,
                    found: v.as_ref().len(),
                });
            }
        }
        Ok(())
    }

    pub fn evaluate<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<f64> {
        self.check_vectors(vectors)?;
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.index
                    .iter()
                    .zip(vectors)
                    .fold(t.coef.to_f64(), |acc, (&i, v)| acc * v.as_ref()[i as usize - 1])
            })
            .sum())
    }

    /// Exact evaluation; vector entries are read as exact decimals.
    /// `None` when a coefficient or entry is not rational.
    pub fn evaluate_exact<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<Option<BigRational>> {
        self.check_vectors(vectors)?;
        let exact: Option<Vec<Vec<BigRational>>> = vectors
            .iter()
            .map(|v| v.as_ref().iter().map(|&x| rational_from_f64(x)).collect())
            .collect();
        let Some(exact) = exact else { return Ok(None) };
        let mut total = BigRational::zero();
        for t in &self.terms {
            let Some(c) = t.coef.as_rational() else { return Ok(None) };
            let mut prod = c.clone();
            for (&i, v) in t.index.iter().zip(&exact) {
                prod *= &v[i as usize - 1];
            }
            total += prod;
        }
        Ok(Some(total))
    }

    /// Translates every index of `slot` (1-based) by `offset`.
    pub fn shift_slot(&self, slot: usize, offset: u32) -> Result<Self> {
        if slot == 0 || slot > self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: slot });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut index = t.index.clone();
                index[slot - 1] += offset;
                MonomialTerm { index, coef: t.coef.clone() }
            })
            .collect();
        Self::from_terms(self.arity, terms)
    }

    pub fn scaled(&self, c: &Coef) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroCoefficient(vec![]));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| MonomialTerm { index: t.index.clone(), coef: t.coef.mul(c) })
            .collect();
        Self::new(self.arity, &self.dims, terms)
    }

    /// Reorders slots: new slot `j` is old slot `perm[j]` (1-based).
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.arity)?;
        let terms = self
            .terms
            .iter()
            .map(|t| MonomialTerm {
                index: perm.iter().map(|&p| t.index[p - 1]).collect(),
                coef: t.coef.clone(),
            })
            .collect();
        Self::from_terms(self.arity, terms)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("form serialization is infallible")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Short content hash of the canonical serialization.
    pub fn fingerprint(&self) -> String {
        let compact = serde_json::to_string(self).expect("form serialization is infallible");
        let digest = Sha256::digest(compact.as_bytes());
        hex::encode(&digest[..8])
    }
}

pub(crate) fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(Error::InvalidSlotOrder(perm.to_vec()));
    }
    for &p in perm {
        if p == 0 || p > m || seen[p - 1] {
            return Err(Error::InvalidSlotOrder(perm.to_vec()));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

impl fmt::Display for MultilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let c = t.coef.to_string();
            let (neg, mag) = match c.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, c),
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != "1" {
                write!(f, "{mag}·")?;
            }
            let vars: Vec<String> =
                t.index.iter().enumerate().map(|(s, i)| format!("x{}_{}", s + 1, i)).collect();
            write!(f, "{}", vars.join(""))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    arity: usize,
    dims: Vec<u32>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    idx: Vec<u32>,
    coef: Value,
}

impl From<MultilinearForm> for FormJson {
    fn from(f: MultilinearForm) -> Self {
        FormJson {
            arity: f.arity,
            dims: f.dims,
            terms: f
                .terms
                .into_iter()
                .map(|t| TermJson { coef: t.coef.to_json(), idx: t.index })
                .collect(),
        }
    }
}

impl TryFrom<FormJson> for MultilinearForm {
    type Error = Error;
    fn try_from(j: FormJson) -> Result<Self> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok(MonomialTerm { index: t.idx.clone(), coef: Coef::from_json(&t.coef)? }))
            .collect::<Result<Vec<_>>>()?;
        MultilinearForm::new(j.arity, &j.dims, terms)
    }
}

/// `x₁y₁ + x₁y₂ + x₂y₁ − x₂y₂`, the bilinear Littlewood extremum.
pub fn gen_t2() -> MultilinearForm {
    let terms = vec![
        MonomialTerm::new(vec![1, 1], 1),
        MonomialTerm::new(vec![1, 2], 1),
        MonomialTerm::new(vec![2, 1], 1),
        MonomialTerm::new(vec![2, 2], -1),
    ];
    MultilinearForm::new(2, &[2, 2], terms).expect("T2 is a valid form")
}

/// The strategic forms `Sₘ`:
/// `Sₘ = (xᵐ₁ + xᵐ₂)·Sₘ₋₁(x¹,…) + (xᵐ₁ − xᵐ₂)·Sₘ₋₁(x¹ shifted by 2^{m−2}, …)`.
///
/// Slot 1 has dimension `2^{m−1}`, every other slot dimension 2, and there are
/// `4^{m−1}` unimodular monomials.
pub fn gen_sm(m: usize) -> Result<MultilinearForm> {
    if m < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: m });
    }
    let mut terms: Vec<MonomialTerm> = gen_t2().terms;
    for level in 3..=m {
        let shift = 1u32 << (level - 2);
        let mut next = Vec::with_capacity(terms.len() * 4);
        for t in &terms {
            for (last, sign) in [(1u32, 1i64), (2, 1)] {
                let mut index = t.index.clone();
                index.push(last);
                next.push(MonomialTerm { index, coef: t.coef.mul(&Coef::int(sign)) });
            }
        }
        for t in &terms {
            for (last, sign) in [(1u32, 1i64), (2, -1)] {
                let mut index = t.index.clone();
                index[0] += shift;
                index.push(last);
                next.push(MonomialTerm { index, coef: t.coef.mul(&Coef::int(sign)) });
            }
        }
        terms = next;
    }
    MultilinearForm::from_terms(m, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeIIVariant {
    Basic,
    Extended,
}

/// Bilinear forms made of type II elementary terms (complexity 2, no 2×2 block).
///
/// Basic: `x₁y₁ + x₁y₂ + x₃y₁ + x₄y₂ + x₃y₅ − x₄y₅` (norm 4).
/// Extended: `x₁y₁ + x₁y₂ + x₃y₁ + x₄y₂ + x₃y₅ + x₄y₆ + x₅y₅ − x₅y₆` (norm 6).
/// The single negative sign makes the column cycle frustrated, which is what
/// keeps the norm at `2·(#pairs − 1)`.
pub fn gen_type_ii(which: TypeIIVariant) -> MultilinearForm {
    let cells: &[([u32; 2], i64)] = match which {
        TypeIIVariant::Basic => &[([1, 1], 1), ([1, 2], 1), ([3, 1], 1), ([4, 2], 1), ([3, 5], 1), ([4, 5], -1)],
        TypeIIVariant::Extended => &[
            ([1, 1], 1),
            ([1, 2], 1),
            ([3, 1], 1),
            ([4, 2], 1),
            ([3, 5], 1),
            ([4, 6], 1),
            ([5, 5], 1),
            ([5, 6], -1),
        ],
    };
    let terms = cells.iter().map(|(i, c)| MonomialTerm::new(i.to_vec(), *c)).collect();
    MultilinearForm::from_terms(2, terms).expect("type II forms are valid")
}

pub(crate) fn decode_linear(mut lin: u128, dims: &[u32]) -> Vec<u32> {
    let mut idx = vec![0u32; dims.len()];
    for k in (0..dims.len()).rev() {
        let d = dims[k] as u128;
        idx[k] = (lin % d) as u32 + 1;
        lin /= d;
    }
    idx
}

/// Random form with exactly `term_count` distinct indices inside `dims` and
/// ±1 coefficients, reproducible from `seed`.
pub fn random_unimodular_form(m: usize, dims: &[u32], term_count: usize, seed: u64) -> Result<MultilinearForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unimodular_with(&mut rng, m, dims, term_count)
}

pub(crate) fn random_unimodular_with<R: Rng>(
    rng: &mut R,
    m: usize,
    dims: &[u32],
    term_count: usize,
) -> Result<MultilinearForm> {
    if dims.len() != m {
        return Err(Error::ArityMismatch { expected: m, found: dims.len() });
    }
    if dims.contains(&0) {
        return Err(Error::OutOfRange(format!("dims {dims:?} must be positive")));
    }
    let capacity = dims.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128)).unwrap_or(u128::MAX);
    if term_count as u128 > capacity {
        return Err(Error::TooManyTerms { requested: term_count as u128, capacity });
    }
    let linear: Vec<u128> = if capacity <= u32::MAX as u128 {
        let mut v: Vec<u128> =
            index::sample(rng, capacity as usize, term_count).into_iter().map(|i| i as u128).collect();
        v.sort_unstable();
        v
    } else {
        let mut set = std::collections::BTreeSet::new();
        while set.len() < term_count {
            set.insert(rng.random_range(0..capacity));
        }
        set.into_iter().collect()
    };
    let terms = linear
        .into_iter()
        .map(|lin| {
            let sign = if rng.random::<bool>() { 1 } else { -1 };
            MonomialTerm::new(decode_linear(lin, dims), sign)
        })
        .collect();
    MultilinearForm::new(m, dims, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term_set(f: &MultilinearForm) -> Vec<(Vec<u32>, i64)> {
        f.terms().iter().map(|t| (t.index.clone(), t.coef.to_f64() as i64)).collect()
    }

    #[test]
    fn single_monomial_form() {
        let f = MultilinearForm::new(1, &[1], vec![MonomialTerm::new(vec![1], 1)]).unwrap();
        assert_eq!(f.monomial_count(), 1);
        assert_eq!(f.dims(), &[1]);
    }

    #[test]
    fn construction_errors() {
        let dup = vec![MonomialTerm::new(vec![1, 1], 1), MonomialTerm::new(vec![1, 1], 2)];
        assert!(matches!(MultilinearForm::new(2, &[2, 2], dup), Err(Error::DuplicateIndex(_))));
        let oob = vec![MonomialTerm::new(vec![3, 1], 1)];
        assert!(matches!(MultilinearForm::new(2, &[2, 2], oob), Err(Error::IndexOutOfRange { .. })));
        let zero = vec![MonomialTerm::new(vec![1, 1], 0)];
        assert!(matches!(MultilinearForm::new(2, &[2, 2], zero), Err(Error::ZeroCoefficient(_))));
        assert!(matches!(MultilinearForm::new(2, &[2, 2], vec![]), Err(Error::EmptyForm)));
        let short = vec![MonomialTerm::new(vec![1], 1)];
        assert!(matches!(MultilinearForm::new(2, &[2, 2], short), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn canonical_order_and_minimal_dims() {
        let a = MultilinearForm::new(
            2,
            &[5, 5],
            vec![MonomialTerm::new(vec![2, 1], 1), MonomialTerm::new(vec![1, 3], -1)],
        )
        .unwrap();
        let b = MultilinearForm::new(
            2,
            &[2, 3],
            vec![MonomialTerm::new(vec![1, 3], -1), MonomialTerm::new(vec![2, 1], 1)],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dims(), &[2, 3]);
    }

    #[test]
    fn t2_shape() {
        let t2 = gen_t2();
        assert_eq!(t2.monomial_count(), 4);
        assert_eq!(t2.dims(), &[2, 2]);
        assert_eq!(t2.coefficient(&[2, 2]), Some(&Coef::int(-1)));
        assert_eq!(t2, gen_sm(2).unwrap());
    }

    #[test]
    fn t2_evaluates() {
        let t2 = gen_t2();
        assert_eq!(t2.evaluate(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(), 2.0);
        assert_eq!(t2.evaluate(&[vec![0.0, 0.0], vec![3.0, -1.0]]).unwrap(), 0.0);
        assert!(matches!(t2.evaluate(&[vec![1.0], vec![1.0, 1.0]]), Err(Error::VectorTooShort { .. })));
        assert!(matches!(t2.evaluate(&[vec![1.0, 1.0]]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn s3_matches_expanded_display() {
        // (z1+z2)(x1y1+x1y2+x2y1−x2y2) + (z1−z2)(x3y1+x3y2+x4y1−x4y2)
        let mut expected = Vec::new();
        for (z, zs) in [(1u32, 1i64), (2, 1)] {
            for (x, y, c) in [(1u32, 1u32, 1i64), (1, 2, 1), (2, 1, 1), (2, 2, -1)] {
                expected.push((vec![x, y, z], c * zs));
            }
        }
        for (z, zs) in [(1u32, 1i64), (2, -1)] {
            for (x, y, c) in [(3u32, 1u32, 1i64), (3, 2, 1), (4, 1, 1), (4, 2, -1)] {
                expected.push((vec![x, y, z], c * zs));
            }
        }
        expected.sort();
        let s3 = gen_sm(3).unwrap();
        assert_eq!(term_set(&s3), expected);
        assert_eq!(s3.dims(), &[4, 2, 2]);
    }

    #[test]
    fn s4_second_half_uses_rows_5_to_8() {
        let s4 = gen_sm(4).unwrap();
        assert_eq!(s4.dims(), &[8, 2, 2, 2]);
        // (w1−w2)(z1+z2)(x5y1 + …): coefficient of x5 y1 z1 w2 is −1
        assert_eq!(s4.coefficient(&[5, 1, 1, 2]), Some(&Coef::int(-1)));
        assert_eq!(s4.coefficient(&[8, 2, 2, 2]), Some(&Coef::int(-1)));
    }

    #[test]
    fn sm_sizes_and_unimodularity() {
        for m in 2..=5 {
            let s = gen_sm(m).unwrap();
            assert_eq!(s.monomial_count(), 4usize.pow(m as u32 - 1));
            assert_eq!(s.dims()[0], 1 << (m - 1));
            assert!(s.dims()[1..].iter().all(|&d| d == 2));
            assert!(s.is_unimodular());
        }
        assert!(matches!(gen_sm(1), Err(Error::ArityTooSmall { .. })));
    }

    #[test]
    fn sm_restricted_to_last_slot_plus_is_twice_previous() {
        // Fixing xᵐ = (1,1) kills the shifted half and doubles Sₘ₋₁.
        for m in 3..=5 {
            let s = gen_sm(m).unwrap();
            let prev = gen_sm(m - 1).unwrap();
            let mut folded: std::collections::BTreeMap<Vec<u32>, i64> = Default::default();
            for t in s.terms() {
                let c = t.coef.to_f64() as i64;
                *folded.entry(t.index[..m - 1].to_vec()).or_default() += c;
            }
            folded.retain(|_, c| *c != 0);
            let doubled: Vec<(Vec<u32>, i64)> =
                prev.terms().iter().map(|t| (t.index.clone(), 2 * t.coef.to_f64() as i64)).collect();
            assert_eq!(folded.into_iter().collect::<Vec<_>>(), doubled);
        }
    }

    #[test]
    fn shift_slot_moves_rows() {
        let t2 = gen_t2();
        assert_eq!(t2.shift_slot(1, 0).unwrap(), t2);
        let s = t2.shift_slot(1, 2).unwrap();
        assert_eq!(s.used_indices(0), vec![3, 4]);
        assert_eq!(s.dims(), &[4, 2]);
        let x = [0.3, -0.7];
        let y = [1.5, 0.25];
        let shifted_x = [0.0, 0.0, 0.3, -0.7];
        assert_eq!(t2.evaluate(&[&x[..], &y[..]]).unwrap(), s.evaluate(&[&shifted_x[..], &y[..]]).unwrap());
        assert!(matches!(t2.shift_slot(3, 1), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn type_ii_shapes() {
        let basic = gen_type_ii(TypeIIVariant::Basic);
        assert_eq!(basic.monomial_count(), 6);
        assert_eq!(basic.dims(), &[4, 5]);
        assert_eq!(gen_type_ii(TypeIIVariant::Extended).monomial_count(), 8);
    }

    #[test]
    fn random_forms() {
        let a = random_unimodular_form(2, &[3, 3], 4, 7).unwrap();
        let b = random_unimodular_form(2, &[3, 3], 4, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.monomial_count(), 4);
        assert!(a.is_unimodular());
        let full = random_unimodular_form(3, &[2, 3, 2], 12, 1).unwrap();
        assert_eq!(full.monomial_count(), 12);
        assert!(matches!(random_unimodular_form(2, &[2, 2], 5, 0), Err(Error::TooManyTerms { .. })));
    }

    #[test]
    fn json_round_trip_with_rationals() {
        let f = MultilinearForm::new(
            2,
            &[2, 2],
            vec![MonomialTerm::new(vec![1, 2], Coef::ratio(3, 4)), MonomialTerm::new(vec![2, 1], -2)],
        )
        .unwrap();
        let s = f.to_json_string();
        assert!(s.contains("\"3/4\""));
        assert_eq!(MultilinearForm::from_json_str(&s).unwrap(), f);
        let parsed = MultilinearForm::from_json_str(
            r#"{"arity":2,"dims":[2,2],"terms":[{"idx":[1,1],"coef":0.5},{"idx":[2,2],"coef":"-1/3"}]}"#,
        )
        .unwrap();
        assert_eq!(parsed.coefficient(&[1, 1]), Some(&Coef::ratio(1, 2)));
        assert!(MultilinearForm::from_json_str(r#"{"arity":1,"dims":[1],"terms":[{"idx":[1],"coef":"x"}]}"#).is_err());
    }

    #[test]
    fn exact_evaluation_of_rational_forms() {
        let f = MultilinearForm::new(1, &[2], vec![MonomialTerm::new(vec![1], Coef::ratio(1, 3)), MonomialTerm::new(vec![2], 1)])
            .unwrap();
        let v = f.evaluate_exact(&[vec![3.0, 0.5]]).unwrap().unwrap();
        assert_eq!(v, BigRational::new(3.into(), 2.into()));
    }
}
