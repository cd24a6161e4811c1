//! Sup norm of a real multilinear form over products of ℓ∞ unit balls.
//!
//! Multilinearity puts the supremum at sign vectors. The exact routine fixes
//! one slot analytically: once every other slot holds a sign vector the form is
//! a linear functional `c` on the remaining slot, whose ℓ∞-norm is `Σ|c_j|`.
//! The other slots are walked in Gray-code order so each step flips one sign
//! and updates `c` in time proportional to the monomials touching that
//! coordinate.

use num::traits::Zero;
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::forms::MultilinearForm;

pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Norm value plus the vectors that attain (or witness) it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormResult {
    pub value: f64,
    /// Exact value when the form has rational coefficients and the value was
    /// obtained by full enumeration (or replayed exactly at the certificate).
    pub exact_value: Option<BigRational>,
    /// One vector per slot, each of full slot dimension.
    pub certificate: Vec<Vec<f64>>,
    /// `true` only for full enumeration.
    pub exact: bool,
    /// `false` when an iterative method stopped at its sweep limit.
    pub converged: bool,
}

/// Per-slot compaction of a form onto its used coordinates.
pub(crate) struct Compact {
    pub used: Vec<Vec<u32>>,
    /// `pos[t][k]`: position of term `t`'s slot-`k` index inside `used[k]`.
    pub pos: Vec<Vec<u32>>,
    pub coef: Vec<f64>,
}

impl Compact {
    pub fn new(form: &MultilinearForm) -> Self {
        let used: Vec<Vec<u32>> = (0..form.arity()).map(|k| form.used_indices(k)).collect();
        let pos = form
            .terms()
            .iter()
            .map(|t| {
                t.index
                    .iter()
                    .enumerate()
                    .map(|(k, i)| used[k].binary_search(i).expect("index is used") as u32)
                    .collect()
            })
            .collect();
        let coef = form.terms().iter().map(|t| t.coef.to_f64()).collect();
        Self { used, pos, coef }
    }

    /// Linear functional on slot `k` induced by the other slots of `x`.
    pub fn functional(&self, x: &[Vec<f64>], k: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.used[k].len()];
        for (p, &a) in self.pos.iter().zip(&self.coef) {
            let mut v = a;
            for (l, &q) in p.iter().enumerate() {
                if l != k {
                    v *= x[l][q as usize];
                }
            }
            c[p[k] as usize] += v;
        }
        c
    }

    pub fn value(&self, x: &[Vec<f64>]) -> f64 {
        self.pos
            .iter()
            .zip(&self.coef)
            .map(|(p, &a)| p.iter().enumerate().fold(a, |acc, (l, &q)| acc * x[l][q as usize]))
            .sum()
    }

    /// Full-dimension vectors, `fill` on unused coordinates.
    pub fn expand(&self, dims: &[u32], x: &[Vec<f64>], fill: f64) -> Vec<Vec<f64>> {
        dims.iter()
            .enumerate()
            .map(|(k, &d)| {
                let mut v = vec![fill; d as usize];
                for (q, &i) in self.used[k].iter().enumerate() {
                    v[i as usize - 1] = x[k][q];
                }
                v
            })
            .collect()
    }
}

trait Acc: Copy + PartialOrd + Send + Sync {
    const ZERO: Self;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn abs(self) -> Self;
}

impl Acc for i128 {
    const ZERO: Self = 0;
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn neg(self) -> Self {
        -self
    }
    fn abs(self) -> Self {
        i128::abs(self)
    }
}

impl Acc for f64 {
    const ZERO: Self = 0.0;
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn neg(self) -> Self {
        -self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

struct Plan {
    compact: Compact,
    elim: usize,
    /// `bit_of[k][q]`: free bit for coordinate `q` of slot `k`; `None` for the
    /// eliminated slot and for the first coordinate of each enumerated slot,
    /// which stays at +1 (flipping a whole slot leaves `Σ|c_j|` unchanged).
    bit_of: Vec<Vec<Option<u32>>>,
    term_bits: Vec<Vec<u32>>,
    buckets: Vec<Vec<u32>>,
    free_bits: u32,
}

impl Plan {
    fn new(form: &MultilinearForm) -> Self {
        let compact = Compact::new(form);
        let m = form.arity();
        let mut elim = 0;
        for k in 0..m {
            if compact.used[k].len() >= compact.used[elim].len() {
                elim = k;
            }
        }
        let mut free_bits = 0u32;
        let bit_of: Vec<Vec<Option<u32>>> = (0..m)
            .map(|k| {
                (0..compact.used[k].len())
                    .map(|q| {
                        if k == elim || q == 0 {
                            None
                        } else {
                            free_bits += 1;
                            Some(free_bits - 1)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut buckets = vec![Vec::new(); free_bits as usize];
        let term_bits = compact
            .pos
            .iter()
            .enumerate()
            .map(|(t, p)| {
                let bits: Vec<u32> = p.iter().enumerate().filter_map(|(k, &q)| bit_of[k][q as usize]).collect();
                for &b in &bits {
                    buckets[b as usize].push(t as u32);
                }
                bits
            })
            .collect();
        Self { compact, elim, bit_of, term_bits, buckets, free_bits }
    }

    fn required(&self) -> u128 {
        if self.free_bits >= 127 {
            u128::MAX
        } else {
            1u128 << self.free_bits
        }
    }

    fn chunks(&self) -> u64 {
        if self.free_bits <= 14 {
            1
        } else {
            1 << (self.free_bits - 14).min(12)
        }
    }

    fn scan<A: Acc>(&self, coefs: &[A], start: u64, end: u64) -> (A, u64) {
        let g = start ^ (start >> 1);
        let mut neg: Vec<bool> = self
            .term_bits
            .iter()
            .map(|bits| bits.iter().filter(|&&b| g >> b & 1 == 1).count() % 2 == 1)
            .collect();
        let elim_pos: Vec<usize> = self.compact.pos.iter().map(|p| p[self.elim] as usize).collect();
        let mut c = vec![A::ZERO; self.compact.used[self.elim].len()];
        for (t, &a) in coefs.iter().enumerate() {
            let v = if neg[t] { a.neg() } else { a };
            c[elim_pos[t]] = c[elim_pos[t]].add(v);
        }
        let mut total = c.iter().fold(A::ZERO, |acc, v| acc.add(v.abs()));
        let (mut best, mut best_i) = (total, start);
        for i in start + 1..end {
            let b = i.trailing_zeros() as usize;
            for &t in &self.buckets[b] {
                let t = t as usize;
                let contrib = if neg[t] { coefs[t].neg() } else { coefs[t] };
                let slot = &mut c[elim_pos[t]];
                let old = *slot;
                *slot = old.sub(contrib).sub(contrib);
                total = total.add(slot.abs()).sub(old.abs());
                neg[t] = !neg[t];
            }
            if total > best {
                best = total;
                best_i = i;
            }
        }
        (best, best_i)
    }

    fn run<A: Acc>(&self, coefs: &[A]) -> u64 {
        let total = 1u64 << self.free_bits;
        let n = self.chunks();
        let size = total / n;
        let results: Vec<(A, u64)> =
            (0..n).into_par_iter().map(|c| self.scan(coefs, c * size, (c + 1) * size)).collect();
        let mut best = results[0];
        for r in &results[1..] {
            if r.0 > best.0 {
                best = *r;
            }
        }
        best.1
    }

    /// Compact sign vectors for the Gray index `i`, eliminated slot left at +1.
    fn signs(&self, i: u64) -> Vec<Vec<f64>> {
        let g = i ^ (i >> 1);
        self.bit_of
            .iter()
            .map(|slot| slot.iter().map(|b| b.map_or(1.0, |b| if g >> b & 1 == 1 { -1.0 } else { 1.0 })).collect())
            .collect()
    }
}

/// Number of sign assignments `sup_norm_exact` would enumerate.
pub fn required_budget(form: &MultilinearForm) -> u128 {
    Plan::new(form).required()
}

/// Exact `‖T‖` on `ℓ∞ × ⋯ × ℓ∞`. Integer arithmetic is used whenever the
/// coefficients are rational, so the value is an exact rational.
pub fn sup_norm_exact(form: &MultilinearForm, budget: u128) -> Result<NormResult> {
    let plan = Plan::new(form);
    let required = plan.required();
    if required > budget || plan.free_bits > 62 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let int = form.integer_coefficients();
    let best_i = match &int {
        Some((coefs, _)) => {
            let coefs: Vec<i128> = coefs.iter().map(|&c| c as i128).collect();
            plan.run(&coefs)
        }
        None => plan.run(&plan.compact.coef),
    };
    let mut x = plan.signs(best_i);
    let c = plan.compact.functional(&x, plan.elim);
    x[plan.elim] = c.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let certificate = plan.compact.expand(form.dims(), &x, 1.0);

    let (value, exact_value) = if int.is_some() {
        // Recompute at the certificate so the reported value is the replayed one.
        let v = form.evaluate_exact(&certificate)?.expect("rational form");
        (rational_to_f64(&v), Some(v))
    } else {
        (form.evaluate(&certificate)?, None)
    };
    Ok(NormResult { value, exact_value, certificate, exact: true, converged: true })
}

/// Lower bound on `‖T‖` by best-response sign ascent from random starts.
pub fn sup_norm_heuristic(form: &MultilinearForm, restarts: usize, seed: u64) -> NormResult {
    let compact = Compact::new(form);
    let restarts = restarts.max(1);
    let runs: Vec<(f64, Vec<Vec<f64>>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            sign_ascent(&compact, &mut rng)
        })
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = r;
        }
    }
    let certificate = compact.expand(form.dims(), &runs[best].1, 1.0);
    let value = form.evaluate(&certificate).expect("certificate has form dims");
    let exact_value = form.evaluate_exact(&certificate).ok().flatten();
    NormResult { value, exact_value, certificate, exact: false, converged: true }
}

pub(crate) fn sign_ascent<R: Rng>(compact: &Compact, rng: &mut R) -> (f64, Vec<Vec<f64>>) {
    let mut x: Vec<Vec<f64>> = compact
        .used
        .iter()
        .map(|u| u.iter().map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    let mut value = compact.value(&x);
    for _ in 0..1000 {
        let before = value;
        for k in 0..x.len() {
            let c = compact.functional(&x, k);
            x[k] = c.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
            value = c.iter().map(|v| v.abs()).sum();
        }
        if value <= before + 1e-12 * before.abs().max(1.0) {
            break;
        }
    }
    (value, x)
}

/// Full brute force over every sign vector of every slot (test oracle).
#[doc(hidden)]
pub fn brute_force_norm(form: &MultilinearForm) -> BigRational {
    let dims: Vec<u32> = form.dims().to_vec();
    let total_bits: u32 = dims.iter().sum();
    assert!(total_bits <= 24, "brute force limited to 24 sign bits");
    let mut best = BigRational::zero();
    for mask in 0u64..(1 << total_bits) {
        let mut offset = 0;
        let vectors: Vec<Vec<f64>> = dims
            .iter()
            .map(|&d| {
                let v = (0..d).map(|j| if mask >> (offset + j) & 1 == 1 { -1.0 } else { 1.0 }).collect();
                offset += d;
                v
            })
            .collect();
        let v = form.evaluate_exact(&vectors).unwrap().expect("rational form");
        if v > best {
            best = v;
        }
    }
    best
}
