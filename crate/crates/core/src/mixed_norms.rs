//! Nested mixed sums `(Σ_{j₁}(Σ_{j₂}(⋯)^{q₁/q₂})⋯)^{1/q₁}` over the
//! coefficients of a sparse form, and the exponent formulas that go with them.

use std::fmt;
use std::str::FromStr;

use num::rational::Rational64;
use num::traits::{One, ToPrimitive, Zero};
use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Radical};
use crate::forms::{check_permutation, MultilinearForm};
use crate::lp_norm::PExponent;

/// A single exponent `q ≥ 1`, exact when rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Rational(Rational64),
    Real(f64),
}

impl Exponent {
    pub fn int(q: i64) -> Self {
        Exponent::Rational(Rational64::from_integer(q))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Exponent::Rational(Rational64::new(p, q))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Real(x) => x,
        }
    }

    fn big(self) -> Option<BigRational> {
        match self {
            Exponent::Rational(r) => Some(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))),
            Exponent::Real(_) => None,
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s).ok_or_else(|| Error::InvalidExponent(s.to_string()))?;
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Ok(Exponent::Rational(Rational64::new(n, d))),
            _ => s.trim().parse::<f64>().map(Exponent::Real).map_err(|_| Error::InvalidExponent(s.to_string())),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Real(x) => write!(f, "{x}"),
        }
    }
}

/// `(q₁,…,qₘ)` with every `qᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentTuple {
    values: Vec<Exponent>,
}

impl ExponentTuple {
    pub fn new(values: Vec<Exponent>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidExponent("empty exponent tuple".into()));
        }
        for q in &values {
            let ok = match q {
                Exponent::Rational(r) => *r >= Rational64::one(),
                Exponent::Real(x) => x.is_finite() && *x >= 1.0,
            };
            if !ok {
                return Err(Error::InvalidExponent(format!("{q} is below 1")));
            }
        }
        Ok(Self { values })
    }

    /// Comma separated list such as `"4/3,4/3"` or `"2,2,1"`.
    pub fn parse_list(s: &str) -> Result<Self> {
        Self::new(s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?)
    }

    pub fn uniform(q: Exponent, m: usize) -> Result<Self> {
        Self::new(vec![q; m])
    }

    /// `(2m/(m+1), …, 2m/(m+1))`.
    pub fn bh(m: usize) -> Self {
        Self { values: vec![Exponent::Rational(bh_exponent(m)); m] }
    }

    /// Exponent 1 at 0-based position `one_at`, 2 elsewhere.
    pub fn mixed_l1l2(m: usize, one_at: usize) -> Self {
        Self { values: (0..m).map(|i| Exponent::int(if i == one_at { 1 } else { 2 })).collect() }
    }

    pub fn values(&self) -> &[Exponent] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// All `qᵢ ∈ [1,2]` and `Σ 1/qᵢ ≤ (m+1)/2`; exact for rational entries.
    pub fn is_bh_exponent(&self) -> bool {
        let m = self.values.len() as i64;
        let exact: Option<Vec<BigRational>> = self.values.iter().map(|q| q.big()).collect();
        match exact {
            Some(qs) => {
                let two = BigRational::from_integer(BigInt::from(2));
                if qs.iter().any(|q| *q < BigRational::one() || *q > two) {
                    return false;
                }
                let sum = qs.iter().fold(BigRational::zero(), |acc, q| acc + q.recip());
                sum <= BigRational::new(BigInt::from(m + 1), BigInt::from(2))
            }
            None => {
                let qs: Vec<f64> = self.values.iter().map(|q| q.to_f64()).collect();
                qs.iter().all(|q| (1.0..=2.0).contains(q)) && qs.iter().map(|q| 1.0 / q).sum::<f64>() <= (m + 1) as f64 / 2.0
            }
        }
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn bh_exponent(m: usize) -> Rational64 {
    let m = m as i64;
    Rational64::new(2 * m, m + 1)
}

/// `2mp/(mp+p−2m)` for `p ≥ 2m`; `p = ∞` gives the Bohnenblust–Hille exponent.
pub fn hl_exponent(m: usize, p: PExponent) -> Result<Rational64> {
    let mi = m as i64;
    match p {
        PExponent::Infinity => Ok(bh_exponent(m)),
        PExponent::Finite(p) => {
            if p < Rational64::from_integer(2 * mi) {
                return Err(Error::ExponentRange(format!("p = {p} is below 2m = {}", 2 * mi)));
            }
            let m = Rational64::from_integer(mi);
            let two = Rational64::from_integer(2);
            Ok(two * m * p / (m * p + p - two * m))
        }
    }
}

/// `2p/(p−2m+2)` for `p > 2m`; tends to 2 as `p → ∞`.
pub fn tech_exponent(m: usize, p: PExponent) -> Result<Rational64> {
    let mi = m as i64;
    match p {
        PExponent::Infinity => Ok(Rational64::from_integer(2)),
        PExponent::Finite(p) => {
            if p <= Rational64::from_integer(2 * mi) {
                return Err(Error::ExponentRange(format!("p = {p} must exceed 2m = {}", 2 * mi)));
            }
            let two = Rational64::from_integer(2);
            Ok(two * p / (p - Rational64::from_integer(2 * mi) + two))
        }
    }
}

fn resolve_order(m: usize, order: Option<&[usize]>) -> Result<Vec<usize>> {
    match order {
        Some(o) => {
            check_permutation(o, m)?;
            Ok(o.to_vec())
        }
        None => Ok((1..=m).collect()),
    }
}

/// Folds the sorted `(key, value)` list level by level from the innermost
/// summation outward. `combine(values, level)` returns the level's norm.
fn nest<T: Clone>(
    mut entries: Vec<(Vec<u32>, T)>,
    levels: usize,
    combine: impl Fn(&[T], usize) -> Option<T>,
) -> Option<T> {
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for level in (0..levels).rev() {
        let mut next: Vec<(Vec<u32>, T)> = Vec::new();
        let mut start = 0;
        while start < entries.len() {
            let prefix = &entries[start].0[..level];
            let mut end = start + 1;
            while end < entries.len() && entries[end].0[..level] == *prefix {
                end += 1;
            }
            let group: Vec<T> = entries[start..end].iter().map(|e| e.1.clone()).collect();
            next.push((prefix.to_vec(), combine(&group, level)?));
            start = end;
        }
        entries = next;
    }
    entries.pop().map(|e| e.1)
}

fn keyed<T>(form: &MultilinearForm, order: &[usize], value: impl Fn(usize) -> T) -> Vec<(Vec<u32>, T)> {
    form.terms()
        .iter()
        .enumerate()
        .map(|(t, term)| (order.iter().map(|&s| term.index[s - 1]).collect(), value(t)))
        .collect()
}

/// Mixed sum with summation nesting `slot_order` (outermost first, 1-based)
/// and `qᵢ` attached to the i-th nesting level. Default order is `(1,…,m)`.
pub fn mixed_sum(form: &MultilinearForm, exps: &ExponentTuple, slot_order: Option<&[usize]>) -> Result<f64> {
    if exps.len() != form.arity() {
        return Err(Error::ArityMismatch { expected: form.arity(), found: exps.len() });
    }
    let order = resolve_order(form.arity(), slot_order)?;
    let qs: Vec<f64> = exps.values().iter().map(|q| q.to_f64()).collect();
    let entries = keyed(form, &order, |t| form.terms()[t].coef.to_f64().abs());
    let total = nest(entries, form.arity(), |vals, level| Some(lq_combine(vals, qs[level])));
    Ok(total.unwrap_or(0.0))
}

fn lq_combine(vals: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        return vals.iter().sum();
    }
    if q == 2.0 {
        return vals.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    // Scale by the maximum so large forms do not overflow.
    let max = vals.iter().fold(0.0f64, |a, &v| a.max(v));
    if max == 0.0 {
        return 0.0;
    }
    max * vals.iter().map(|v| (v / max).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Exact mixed sum as a radical, when the form is rational, every exponent is
/// rational and each level stays inside the radical set (always the case for
/// forms whose groups have equal moduli, such as unimodular forms).
pub fn mixed_sum_exact(
    form: &MultilinearForm,
    exps: &ExponentTuple,
    slot_order: Option<&[usize]>,
) -> Result<Option<Radical>> {
    if exps.len() != form.arity() {
        return Err(Error::ArityMismatch { expected: form.arity(), found: exps.len() });
    }
    let order = resolve_order(form.arity(), slot_order)?;
    let qs: Option<Vec<Rational64>> = exps
        .values()
        .iter()
        .map(|q| match q {
            Exponent::Rational(r) => Some(*r),
            Exponent::Real(_) => None,
        })
        .collect();
    let Some(qs) = qs else { return Ok(None) };
    let coefs: Option<Vec<Radical>> =
        form.terms().iter().map(|t| t.coef.as_rational().map(|r| Radical::from_rational(r.clone()))).collect();
    let Some(coefs) = coefs else { return Ok(None) };
    let entries = keyed(form, &order, |t| coefs[t].clone());
    Ok(nest(entries, form.arity(), |vals, level| {
        let (a, b) = (*qs[level].numer(), *qs[level].denom());
        let powered: Option<Vec<Radical>> = vals.iter().map(|v| v.pow_ratio(a, b)).collect();
        Radical::sum(&powered?)?.pow_ratio(b, a)
    }))
}

/// `(Σ_i |Π_s T_s(e_i)|^{2/(m+1)})^{(m+1)/(2m)}` for `m` forms of arity `m`.
pub fn product_bh_sum(forms: &[MultilinearForm]) -> Result<f64> {
    let m = forms.len();
    if m == 0 {
        return Err(Error::ArityMismatch { expected: 1, found: 0 });
    }
    if let Some(f) = forms.iter().find(|f| f.arity() != m) {
        return Err(Error::ArityMismatch { expected: m, found: f.arity() });
    }
    let e = 2.0 / (m as f64 + 1.0);
    let sum: f64 = forms[0]
        .terms()
        .iter()
        .filter_map(|t| {
            forms[1..].iter().try_fold(t.coef.to_f64(), |acc, f| f.coefficient(&t.index).map(|c| acc * c.to_f64()))
        })
        .map(|v| v.abs().powf(e))
        .sum();
    Ok(sum.powf((m as f64 + 1.0) / (2.0 * m as f64)))
}
