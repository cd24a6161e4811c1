//! Exact arithmetic helpers.
//!
//! [`Radical`] represents a nonnegative number `base^(1/root)` with a rational
//! base. Nested mixed sums of unimodular (or otherwise structured) forms stay
//! inside this set, which lets the certification code compare values such as
//! `4^(3/4) / 2` against `2^(1/2)` without floating point.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::rational::Ratio;
use num::traits::{One, Pow, Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational, Integer};

use crate::error::{Error, Result};

/// Parses `"p/q"`, `"p"` or a plain decimal literal (`"1.25"`, `"-0.5"`).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    })
}

/// Exact rational for a finite `f64`, taken from its shortest decimal form
/// (`0.1` becomes `1/10`, not the nearest dyadic fraction).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    parse_decimal(&format!("{x}"))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let ln = ln_bigint(r.numer().abs()) - ln_bigint(r.denom().clone());
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln.exp()
}

fn ln_bigint(n: BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (&n >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ratio64_to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Integer power of a rational, negative exponents invert.
pub fn rational_powi(r: &BigRational, e: i64) -> BigRational {
    let mag = u32::try_from(e.unsigned_abs()).expect("exponent fits in u32");
    let p = BigRational::new(Pow::pow(r.numer(), mag), Pow::pow(r.denom(), mag));
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn exact_nth_root(n: &BigInt, d: u32) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.nth_root(d);
    if Pow::pow(&r, d) == *n {
        Some(r)
    } else {
        None
    }
}

/// Nonnegative real `base^(1/root)` with rational `base`.
#[derive(Clone, Debug)]
pub struct Radical {
    base: BigRational,
    root: u32,
}

impl Radical {
    pub fn new(base: BigRational, root: u32) -> Result<Self> {
        if base.is_negative() || root == 0 {
            return Err(Error::OutOfRange(format!("radical {base}^(1/{root})")));
        }
        Ok(Self { base, root }.normalized())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { base: r.abs(), root: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `2^(num/den)`.
    pub fn pow2(num: i64, den: u32) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        Self { base: rational_powi(&two, num), root: den }.normalized()
    }

    pub fn base(&self) -> &BigRational {
        &self.base
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.root == 1).then_some(&self.base)
    }

    fn normalized(mut self) -> Self {
        if self.base.is_zero() || self.base.is_one() {
            self.root = 1;
            return self;
        }
        let mut d = self.root;
        while d >= 2 {
            if self.root.is_multiple_of(d) {
                if let (Some(n), Some(q)) = (
                    exact_nth_root(self.base.numer(), d),
                    exact_nth_root(self.base.denom(), d),
                ) {
                    self.base = BigRational::new(n, q);
                    self.root /= d;
                    d = self.root;
                    continue;
                }
            }
            d -= 1;
        }
        self
    }

    /// `self^(num/den)` for a positive rational exponent.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Option<Self> {
        if den <= 0 || num == 0 {
            return None;
        }
        let base = rational_powi(&self.base, num);
        let root = (self.root as i64).checked_mul(den)?;
        let root = u32::try_from(root).ok()?;
        Some(Self { base, root }.normalized())
    }

    /// Exact sum; `None` when the result leaves the radical set.
    pub fn sum(items: &[Radical]) -> Option<Self> {
        let first = items.first()?;
        if items.iter().all(|r| r.root == 1) {
            let total = items.iter().fold(BigRational::zero(), |acc, r| acc + &r.base);
            return Some(Self::from_rational(total));
        }
        if items.iter().all(|r| r.root == first.root && r.base == first.base) {
            let count = BigRational::from_integer(BigInt::from(items.len()));
            let base = rational_powi(&count, first.root as i64) * &first.base;
            return Some(Self { base, root: first.root }.normalized());
        }
        None
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        let factor = rational_powi(&r.abs(), self.root as i64);
        Self { base: &self.base * factor, root: self.root }.normalized()
    }

    pub fn div_rational(&self, r: &BigRational) -> Option<Self> {
        if r.is_zero() {
            return None;
        }
        Some(self.mul_rational(&r.recip()))
    }

    /// `self^root` as an exact rational (`self` raised to a power that clears the root).
    pub fn pow_to_rational(&self, power: u32) -> Option<BigRational> {
        if !power.is_multiple_of(self.root) {
            return None;
        }
        Some(rational_powi(&self.base, (power / self.root) as i64))
    }

    pub fn to_f64(&self) -> f64 {
        let b = rational_to_f64(&self.base);
        if self.root == 1 {
            b
        } else {
            b.powf(1.0 / self.root as f64)
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((base, rest)) = s.split_once("^(1/") {
            let root: u32 = rest.strip_suffix(')')?.parse().ok()?;
            let base = base.trim_start_matches('(').trim_end_matches(')');
            Self::new(parse_rational(base)?, root).ok()
        } else {
            Some(Self::from_rational(parse_rational(s)?))
        }
    }
}

impl PartialEq for Radical {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Radical {}

impl PartialOrd for Radical {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Radical {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.root.lcm(&other.root);
        let a = rational_powi(&self.base, (l / self.root) as i64);
        let b = rational_powi(&other.base, (l / other.root) as i64);
        a.cmp(&b)
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root == 1 {
            write!(f, "{}", format_rational(&self.base))
        } else if self.base.is_integer() {
            write!(f, "{}^(1/{})", self.base.numer(), self.root)
        } else {
            write!(f, "({})^(1/{})", format_rational(&self.base), self.root)
        }
    }
}
