//! Sup norms over products of ℓp unit balls, and the one-dimensional Clarkson
//! maximization that gives the exact ℓp norm of the 2×2 Hadamard form.

use std::fmt;
use std::str::FromStr;

use num::rational::Rational64;
use num::traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::parse_rational;
use crate::forms::{gen_t2, MonomialTerm, MultilinearForm};
use crate::hypercube_norm::{sup_norm_exact, sup_norm_heuristic, Compact, NormResult, DEFAULT_BUDGET};

/// Exponent `p ∈ (1, ∞]` with `∞` kept distinct from large floats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PExponent {
    Finite(Rational64),
    Infinity,
}

impl PExponent {
    pub fn int(p: i64) -> Self {
        PExponent::Finite(Rational64::from_integer(p))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            PExponent::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            PExponent::Infinity => f64::INFINITY,
        }
    }

    /// Conjugate exponent `p/(p−1)` as a float (1 for `p = ∞`).
    pub fn conjugate(self) -> f64 {
        match self {
            PExponent::Finite(r) => {
                let p = r.to_f64().unwrap_or(f64::NAN);
                p / (p - 1.0)
            }
            PExponent::Infinity => 1.0,
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "Inf" | "∞") {
            return Ok(PExponent::Infinity);
        }
        let r = parse_rational(t).ok_or_else(|| Error::InvalidExponent(s.to_string()))?;
        let (n, d) = (r.numer().to_i64(), r.denom().to_i64());
        match (n, d) {
            (Some(n), Some(d)) => Ok(PExponent::Finite(Rational64::new(n, d))),
            _ => Err(Error::InvalidExponent(s.to_string())),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            PExponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpOptions {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    /// Enumeration budget for the `p = ∞` exact path.
    pub budget: u128,
    pub max_sweeps: usize,
}

impl LpOptions {
    pub fn new(seed: u64) -> Self {
        Self { restarts: 16, tol: 1e-10, seed, budget: DEFAULT_BUDGET, max_sweeps: 10_000 }
    }
}

/// Lower-bound estimate of `‖T‖` on `ℓp × ⋯ × ℓp` by alternating best responses.
///
/// With every slot but `k` fixed the form is a linear functional `c` on slot
/// `k`; its maximizer on the ℓp ball is `sign(c)|c|^{p*−1}/‖c‖_{p*}^{p*−1}`
/// and the value is `‖c‖_{p*}`, so each step is non-decreasing.
pub fn sup_norm_lp(form: &MultilinearForm, p: PExponent, opts: &LpOptions) -> Result<NormResult> {
    match p {
        PExponent::Infinity => match sup_norm_exact(form, opts.budget) {
            Err(Error::BudgetExceeded { .. }) => Ok(sup_norm_heuristic(form, opts.restarts, opts.seed)),
            other => other,
        },
        PExponent::Finite(r) => {
            if r <= Rational64::from_integer(1) {
                return Err(Error::InvalidExponent(format!("p = {p} must exceed 1")));
            }
            let compact = Compact::new(form);
            let pf = p.to_f64();
            let runs: Vec<Ascent> = (0..opts.restarts.max(1))
                .into_par_iter()
                .map(|r| lp_ascent(&compact, pf, opts, r as u64))
                .collect();
            let mut best = 0;
            for (r, run) in runs.iter().enumerate() {
                if run.value > runs[best].value {
                    best = r;
                }
            }
            let run = &runs[best];
            Ok(NormResult {
                value: run.value,
                exact_value: None,
                certificate: compact.expand(form.dims(), &run.x, 0.0),
                exact: false,
                converged: run.converged,
            })
        }
    }
}

/// Objective values after every best-response step of one restart.
pub fn lp_ascent_trace(form: &MultilinearForm, p: f64, opts: &LpOptions, restart: u64) -> Vec<f64> {
    lp_ascent(&Compact::new(form), p, opts, restart).trace
}

struct Ascent {
    value: f64,
    x: Vec<Vec<f64>>,
    converged: bool,
    trace: Vec<f64>,
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |a, x| a.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_ascent(compact: &Compact, p: f64, opts: &LpOptions, restart: u64) -> Ascent {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(restart);
    let mut x: Vec<Vec<f64>> = compact
        .used
        .iter()
        .map(|u| {
            let v: Vec<f64> = u.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = lp_norm(&v, p);
            v.into_iter().map(|a| a / n).collect()
        })
        .collect();
    let q = p / (p - 1.0);
    let mut value = compact.value(&x);
    let mut trace = vec![value];
    let mut converged = false;
    for _ in 0..opts.max_sweeps {
        let before = value;
        for k in 0..x.len() {
            let c = compact.functional(&x, k);
            let norm = lp_norm(&c, q);
            if norm == 0.0 {
                continue;
            }
            x[k] = c.iter().map(|&v| v.signum() * (v.abs() / norm).powf(q - 1.0)).collect();
            assert!(
                norm >= value - 1e-12 * value.abs().max(1.0),
                "best response decreased the objective: {value} -> {norm}"
            );
            value = norm;
            trace.push(value);
        }
        if (value - before).abs() <= opts.tol * value.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ascent { value, x, converged, trace }
}

fn clarkson_ratio(x: f64, p: f64, q: f64) -> f64 {
    ((1.0 + x).powf(q) + (1.0 - x).powf(q)).powf(1.0 / q) / (1.0 + x.powf(p)).powf(1.0 / p)
}

/// `sup_{x∈[0,1]} ((1+x)^{p*}+(1−x)^{p*})^{1/p*} / (1+x^p)^{1/p}` and its argmax.
pub fn clarkson_sup(p: PExponent, tol: f64) -> Result<(f64, f64)> {
    let pf = match p {
        PExponent::Infinity => return Ok((2.0, 0.0)),
        PExponent::Finite(r) if r < Rational64::from_integer(2) => {
            return Err(Error::InvalidExponent(format!("clarkson sup needs p >= 2, got {p}")))
        }
        PExponent::Finite(_) => p.to_f64(),
    };
    let q = p.conjugate();
    let f = |x: f64| clarkson_ratio(x, pf, q);
    const STEPS: usize = 1000;
    let mut best = (f(0.0), 0usize);
    for i in 1..=STEPS {
        let v = f(i as f64 / STEPS as f64);
        if v > best.0 {
            best = (v, i);
        }
    }
    let lo = best.1.saturating_sub(1) as f64 / STEPS as f64;
    let hi = (best.1 + 1).min(STEPS) as f64 / STEPS as f64;
    let (x, v) = golden_max(f, lo, hi, tol.max(1e-15));
    Ok(if v > best.0 { (v, x) } else { (best.0, best.1 as f64 / STEPS as f64) })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Coefficient pattern of the Hardy–Littlewood extremal candidates `T_{m,p}`:
/// `T_m = (x^m_1 + x^m_2)·T_{m−1} + (x^m_1 − x^m_2)·T_{m−1}(shifted)`, where the
/// shifted copy moves every slot past the block used by `T_{m−1}`.
pub fn gen_tmp_pattern(m: usize) -> Result<MultilinearForm> {
    if m < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: m });
    }
    let mut form = gen_t2();
    for _ in 3..=m {
        let shifts: Vec<u32> = form.dims().to_vec();
        let mut terms = Vec::with_capacity(form.monomial_count() * 4);
        for t in form.terms() {
            for last in [1u32, 2] {
                let mut index = t.index.clone();
                index.push(last);
                terms.push(MonomialTerm { index, coef: t.coef.clone() });
            }
            for (last, neg) in [(1u32, false), (2, true)] {
                let mut index: Vec<u32> = t.index.iter().zip(&shifts).map(|(i, s)| i + s).collect();
                index.push(last);
                let coef = if neg { -t.coef.clone() } else { t.coef.clone() };
                terms.push(MonomialTerm { index, coef });
            }
        }
        form = MultilinearForm::from_terms(form.arity() + 1, terms)?;
    }
    Ok(form)
}
