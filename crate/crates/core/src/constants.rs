//! Closed-form constants: Khinchin's `A_p` and its breakpoint `p₀`, the
//! Γ-product upper bounds, the sharp mixed and restricted lower bounds, and the
//! Hardy–Littlewood bounds built on the Clarkson sup.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exact::Radical;
use crate::lp_norm::{clarkson_sup, PExponent};

pub use statrs::consts::EULER_MASCHERONI;

const CLARKSON_TOL: f64 = 1e-12;

/// A constant with the formula that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantValue {
    pub formula_id: &'static str,
    pub m: Option<usize>,
    pub p: Option<String>,
    pub value: f64,
    /// Set when the formula is evaluated outside its intended regime.
    pub note: Option<&'static str>,
}

/// Root of `Γ((p+1)/2) = √π/2` in `(1, 2)` by bisection.
///
/// `p = 2` is also a root, so the right end is never evaluated: the function
/// is positive at 1 and negative on `(p₀, 2)`.
pub fn khinchin_p0(tol: f64) -> f64 {
    let target = PI.sqrt() / 2.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > tol.max(f64::EPSILON) {
        let mid = 0.5 * (lo + hi);
        if gamma((mid + 1.0) / 2.0) - target > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn p0() -> f64 {
    static P0: OnceLock<f64> = OnceLock::new();
    *P0.get_or_init(|| khinchin_p0(1e-15))
}

/// Best constant of the real Khinchin inequality for Rademacher sums in `L_p`.
pub fn khinchin_a(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("khinchin constant needs 0 < p < inf, got {p}")));
    }
    Ok(if p >= p0() { khinchin_gamma_branch(p) } else { khinchin_power_branch(p) })
}

pub fn khinchin_gamma_branch(p: f64) -> f64 {
    2f64.sqrt() * (gamma((1.0 + p) / 2.0) / PI.sqrt()).powf(1.0 / p)
}

pub fn khinchin_power_branch(p: f64) -> f64 {
    2f64.powf(0.5 - 1.0 / p)
}

/// `Π_{j=2}^m Γ(2 − 1/j)^{j/(2−2j)}`.
pub fn bh_upper_complex(m: usize) -> f64 {
    (2..=m)
        .map(|j| {
            let j = j as f64;
            gamma(2.0 - 1.0 / j).powf(j / (2.0 - 2.0 * j))
        })
        .product()
}

/// `2^{446381/55440 − m/2} Π_{j=14}^m (Γ(3/2 − 1/j)/√π)^{j/(2−2j)}`, evaluated
/// as written (empty product below 14).
pub fn bh_upper_real(m: usize) -> f64 {
    let log2 = 446381.0 / 55440.0 - m as f64 / 2.0
        + (14..=m)
            .map(|j| {
                let j = j as f64;
                (gamma(1.5 - 1.0 / j) / PI.sqrt()).log2() * j / (2.0 - 2.0 * j)
            })
            .sum::<f64>();
    2f64.powf(log2)
}

/// `(√2)^{m−1}`.
pub fn mixed_l1l2_sharp(m: usize) -> f64 {
    2f64.powf((m as f64 - 1.0) / 2.0)
}

/// `(√2)^{m−1}` as an exact radical.
pub fn mixed_l1l2_sharp_exact(m: usize) -> Radical {
    Radical::pow2(m as i64 - 1, 2)
}

/// `2^{1−1/m}`.
pub fn bh_lower_real(m: usize) -> f64 {
    2f64.powf(1.0 - 1.0 / m as f64)
}

fn require_at_least_2m(m: usize, p: PExponent, strict: bool) -> Result<()> {
    if let PExponent::Finite(r) = p {
        let bound = num::rational::Rational64::from_integer(2 * m as i64);
        if r < bound || (strict && r == bound) {
            let rel = if strict { ">" } else { ">=" };
            return Err(Error::ExponentRange(format!("need p {rel} 2m = {}, got {p}", 2 * m)));
        }
    }
    Ok(())
}

/// `2^{(2mp+2m−p−2m²)/(mp)} / clarkson_sup(p)` for `p ≥ 2m`.
pub fn hl_lower_bound(m: usize, p: PExponent) -> Result<f64> {
    require_at_least_2m(m, p, false)?;
    let mf = m as f64;
    let exponent = match p {
        PExponent::Infinity => (2.0 * mf - 1.0) / mf,
        PExponent::Finite(_) => {
            let pf = p.to_f64();
            (2.0 * mf * pf + 2.0 * mf - pf - 2.0 * mf * mf) / (mf * pf)
        }
    };
    Ok(2f64.powf(exponent) / clarkson_sup(p, CLARKSON_TOL)?.0)
}

/// `2^{2(p−2m)(m−1)/(2m²+p−4m)}` for `p > 2m`; `4^{m−1}` at `p = ∞`.
pub fn hl_entropy_lower(m: usize, p: PExponent) -> Result<f64> {
    require_at_least_2m(m, p, true)?;
    let mf = m as f64;
    Ok(match p {
        PExponent::Infinity => 4f64.powf(mf - 1.0),
        PExponent::Finite(_) => {
            let pf = p.to_f64();
            2f64.powf(2.0 * (pf - 2.0 * mf) * (mf - 1.0) / (2.0 * mf * mf + pf - 4.0 * mf))
        }
    })
}

/// Lower bound `2(m−1)/(log₂ clarkson_sup(p) + m − 2)` on the exponent `η` of
/// a would-be universal extremum.
pub fn min_universal_eta(m: usize, p: PExponent) -> Result<f64> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("m = {m} must be at least 2")));
    }
    require_at_least_2m(m, p, false)?;
    let c = clarkson_sup(p, CLARKSON_TOL)?.0;
    Ok(2.0 * (m as f64 - 1.0) / (c.log2() + m as f64 - 2.0))
}

/// Every constant at the given `m` (and `p` where it applies).
pub fn table(m: usize, p: PExponent) -> Result<Vec<ConstantValue>> {
    let ps = Some(p.to_string());
    let mut rows = vec![
        ConstantValue { formula_id: "khinchin_p0", m: None, p: None, value: p0(), note: None },
        ConstantValue { formula_id: "bh_lower_real", m: Some(m), p: None, value: bh_lower_real(m), note: None },
        ConstantValue { formula_id: "mixed_l1l2_sharp", m: Some(m), p: None, value: mixed_l1l2_sharp(m), note: None },
        ConstantValue { formula_id: "bh_upper_complex", m: Some(m), p: None, value: bh_upper_complex(m), note: None },
        ConstantValue {
            formula_id: "bh_upper_real",
            m: Some(m),
            p: None,
            value: bh_upper_real(m),
            note: (m < 14).then_some("outside the formula's intended regime (m < 14)"),
        },
    ];
    if let PExponent::Finite(_) = p {
        rows.push(ConstantValue {
            formula_id: "khinchin_a",
            m: None,
            p: ps.clone(),
            value: khinchin_a(p.to_f64())?,
            note: None,
        });
    }
    if p.to_f64() >= 2.0 {
        rows.push(ConstantValue {
            formula_id: "clarkson_sup",
            m: None,
            p: ps.clone(),
            value: clarkson_sup(p, CLARKSON_TOL)?.0,
            note: None,
        });
    }
    if let Ok(v) = hl_lower_bound(m, p) {
        rows.push(ConstantValue { formula_id: "hl_lower_bound", m: Some(m), p: ps.clone(), value: v, note: None });
    }
    if let Ok(v) = hl_entropy_lower(m, p) {
        rows.push(ConstantValue { formula_id: "hl_entropy_lower", m: Some(m), p: ps.clone(), value: v, note: None });
    }
    if let Ok(v) = min_universal_eta(m, p) {
        rows.push(ConstantValue { formula_id: "min_universal_eta", m: Some(m), p: ps, value: v, note: None });
    }
    Ok(rows)
}
