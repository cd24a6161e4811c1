//! Complexity and entropy diagnostics for sparse forms, the classifier of
//! bilinear extrema for the 4/3 inequality, and the unimodular NT inequality
//! `card(δ)^{(m+1)/(2m)} / 2^{1−1/m} ≤ max_{x∈{±1}} Σ δ x¹⋯xᵐ`.

use std::collections::BTreeSet;

use num::traits::{Pow, Signed};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::RatioCertificate;
use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::forms::{Coef, MonomialTerm, MultilinearForm};
use crate::hypercube_norm::sup_norm_exact;
use crate::mixed_norms::{mixed_sum, mixed_sum_exact, ExponentTuple};

/// Terms whose slot-`slot` index equals `index` (both 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportSet {
    pub slot: usize,
    pub index: u32,
    pub members: Vec<Vec<u32>>,
}

pub fn support_sets(form: &MultilinearForm) -> Vec<SupportSet> {
    let mut out = Vec::new();
    for k in 0..form.arity() {
        for i in form.used_indices(k) {
            let members = form.terms().iter().filter(|t| t.index[k] == i).map(|t| t.index.clone()).collect();
            out.push(SupportSet { slot: k + 1, index: i, members });
        }
    }
    out
}

/// Largest number of monomials sharing one index in one slot.
pub fn complexity(form: &MultilinearForm) -> usize {
    support_sets(form).iter().map(|s| s.members.len()).max().unwrap_or(0)
}

/// Mixed sum over exact norm, with both parts and the norm certificate.
pub fn ratio(
    form: &MultilinearForm,
    exps: &ExponentTuple,
    slot_order: Option<&[usize]>,
    budget: u128,
) -> Result<RatioCertificate> {
    let order: Vec<usize> = slot_order.map_or_else(|| (1..=form.arity()).collect(), <[usize]>::to_vec);
    let sum = mixed_sum(form, exps, Some(&order))?;
    let sum_exact = mixed_sum_exact(form, exps, Some(&order))?;
    let norm = sup_norm_exact(form, budget)?;
    let ratio_exact = match (&sum_exact, &norm.exact_value) {
        (Some(s), Some(n)) => s.div_rational(n),
        _ => None,
    };
    Ok(RatioCertificate {
        form_id: form.fingerprint(),
        form_hash: form.fingerprint(),
        exponents: exps.to_string(),
        slot_order: order,
        mixed_sum: sum,
        mixed_sum_exact: sum_exact.as_ref().map(|r| r.to_string()),
        norm: norm.value,
        norm_exact: norm.exact_value.as_ref().map(crate::exact::format_rational),
        norm_certificate: norm.certificate,
        ratio: sum / norm.value,
        ratio_exact: ratio_exact.as_ref().map(|r| r.to_string()),
        claimed_bound: None,
        claimed_bound_exact: None,
        verdict: None,
        ratio_radical: ratio_exact,
    })
}

/// `(√k, observed)` for the `(2,…,2,1)` ratio with slot 1 innermost, where `k`
/// is the monomial count. Hölder on the innermost ℓ₁ level forces
/// `observed ≤ √k`; a violation signals a bug and is returned as an error.
pub fn holder_k_bound(form: &MultilinearForm, budget: u128) -> Result<(f64, f64)> {
    let m = form.arity();
    let mut order: Vec<usize> = (2..=m).collect();
    order.push(1);
    let exps = ExponentTuple::mixed_l1l2(m, m - 1);
    let observed = ratio(form, &exps, Some(&order), budget)?.ratio;
    let bound = (form.monomial_count() as f64).sqrt();
    if observed > bound + 1e-12 {
        return Err(Error::BoundViolated { observed, bound });
    }
    Ok((bound, observed))
}

/// Result of a successful entropy search.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyWitness {
    pub k: usize,
    pub form: MultilinearForm,
    pub ratio: f64,
}

/// Search parameters for [`entropy_search`].
#[derive(Clone, Debug)]
pub struct EntropySearch {
    pub exponents: ExponentTuple,
    pub slot_order: Option<Vec<usize>>,
    pub dims_cap: Vec<u32>,
    pub max_terms: usize,
    pub target_ratio: f64,
    pub tol: f64,
    pub budget: u128,
}

/// Smallest `k ≤ max_terms` for which some unimodular form supported inside
/// `dims_cap` reaches `ratio ≥ target − tol`. Supports are deduplicated under
/// per-slot index permutations and sign patterns under per-index sign flips,
/// both of which leave norm and mixed sums unchanged.
pub fn entropy_search(search: &EntropySearch) -> Result<Option<EntropyWitness>> {
    let m = search.dims_cap.len();
    if search.exponents.len() != m {
        return Err(Error::ArityMismatch { expected: m, found: search.exponents.len() });
    }
    let order = search.slot_order.as_deref();
    for k in 1..=search.max_terms {
        let classes = unimodular_classes_of_size(&search.dims_cap, k, search.budget)?;
        let hits: Vec<Option<(f64, MultilinearForm)>> = classes
            .par_iter()
            .map(|forms| -> Result<Option<(f64, MultilinearForm)>> {
                let mut best: Option<(f64, MultilinearForm)> = None;
                for f in forms {
                    let sum = mixed_sum(f, &search.exponents, order)?;
                    let norm = sup_norm_exact(f, search.budget)?.value;
                    let r = sum / norm;
                    if best.as_ref().is_none_or(|b| r > b.0) {
                        best = Some((r, f.clone()));
                    }
                }
                Ok(best.filter(|b| b.0 >= search.target_ratio - search.tol))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some((r, form)) = hits.into_iter().flatten().next() {
            return Ok(Some(EntropyWitness { k, form, ratio: r }));
        }
    }
    Ok(None)
}

/// Every unimodular form with support inside `dims_cap` and at most
/// `max_terms` monomials, one representative per symmetry class.
pub fn unimodular_classes(dims_cap: &[u32], max_terms: usize, budget: u128) -> Result<Vec<MultilinearForm>> {
    let mut out = Vec::new();
    for k in 1..=max_terms {
        out.extend(unimodular_classes_of_size(dims_cap, k, budget)?.into_iter().flatten());
    }
    Ok(out)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Canonical supports of size `k`, each with its sign-class representatives.
fn unimodular_classes_of_size(dims_cap: &[u32], k: usize, budget: u128) -> Result<Vec<Vec<MultilinearForm>>> {
    let cells: u128 = dims_cap.iter().map(|&d| d as u128).product();
    if k as u128 > cells {
        return Ok(Vec::new());
    }
    let required = binomial(cells, k as u128).saturating_mul(1u128 << k.min(127));
    if required > budget || k > 63 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let perms: Vec<Vec<Vec<u32>>> = dims_cap.iter().map(|&d| permutations(d)).collect();
    let all_cells: Vec<Vec<u32>> = (0..cells).map(|c| crate::forms::decode_linear(c, dims_cap)).collect();
    let mut supports: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        let support: Vec<Vec<u32>> = choice.iter().map(|&c| all_cells[c].clone()).collect();
        supports.insert(canonical_support(&support, &perms));
        if !next_combination(&mut choice, cells as usize) {
            break;
        }
    }
    Ok(supports.into_iter().map(|s| sign_classes(&s)).collect())
}

fn permutations(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut p: Vec<u32> = (1..=n).collect();
    permute(&mut p, 0, &mut out);
    out.sort();
    out
}

fn permute(p: &mut Vec<u32>, i: usize, out: &mut Vec<Vec<u32>>) {
    if i == p.len() {
        out.push(p.clone());
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, out);
        p.swap(i, j);
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lexicographically smallest sorted image under all per-slot permutations.
fn canonical_support(support: &[Vec<u32>], perms: &[Vec<Vec<u32>>]) -> Vec<Vec<u32>> {
    let m = perms.len();
    let mut best: Option<Vec<Vec<u32>>> = None;
    let mut pick = vec![0usize; m];
    loop {
        let mut image: Vec<Vec<u32>> = support
            .iter()
            .map(|idx| idx.iter().enumerate().map(|(k, &i)| perms[k][pick[k]][i as usize - 1]).collect())
            .collect();
        image.sort();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
        let mut k = 0;
        while k < m {
            pick[k] += 1;
            if pick[k] < perms[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    best.expect("at least the identity permutation")
}

/// One form per coset of the sign-flip subspace: a GF(2) basis of the flip
/// vectors is put in echelon form and only masks that vanish on every pivot
/// bit are kept, which is exactly one representative per coset.
fn sign_classes(support: &[Vec<u32>]) -> Vec<MultilinearForm> {
    let m = support[0].len();
    let mut basis: Vec<u64> = Vec::new();
    for k in 0..m {
        let mut indices: Vec<u32> = support.iter().map(|s| s[k]).collect();
        indices.sort_unstable();
        indices.dedup();
        for i in indices {
            let mut v: u64 = 0;
            for (t, s) in support.iter().enumerate() {
                if s[k] == i {
                    v |= 1 << t;
                }
            }
            for b in &basis {
                let top = 63 - b.leading_zeros();
                if v >> top & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                let top = 63 - v.leading_zeros();
                for b in basis.iter_mut() {
                    if *b >> top & 1 == 1 {
                        *b ^= v;
                    }
                }
                basis.push(v);
            }
        }
    }
    let pivots: u64 = basis.iter().fold(0, |acc, b| acc | 1 << (63 - b.leading_zeros()));
    let free: Vec<usize> = (0..support.len()).filter(|t| pivots >> t & 1 == 0).collect();
    (0u64..1 << free.len())
        .map(|bits| {
            let terms = support
                .iter()
                .enumerate()
                .map(|(t, idx)| {
                    let neg = free.iter().position(|&f| f == t).is_some_and(|p| bits >> p & 1 == 1);
                    MonomialTerm::new(idx.clone(), if neg { -1 } else { 1 })
                })
                .collect();
            MultilinearForm::from_terms(m, terms).expect("support cells are valid")
        })
        .collect()
}

/// Why a bilinear form is not an extremum for the 4/3 inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FailureReason {
    /// Complexity differs from 2.
    Complexity { complexity: usize },
    /// Two monomials in one row differ in modulus.
    RowMagnitudes { row: u32 },
    /// Two monomials in one column differ in modulus.
    ColumnMagnitudes { column: u32 },
    /// Support is not a disjoint union of full 2×2 blocks.
    NotTypeI,
    /// More than one 2×2 block.
    MultipleBlocks { blocks: usize },
    /// The single block has an even number of negative signs.
    SignProduct,
}

/// The unique 2×2 block of an extremal form: `α·(±x_r y_c ± ⋯)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalBlock {
    pub alpha: f64,
    pub rows: [u32; 2],
    pub columns: [u32; 2],
    /// Signs at (r₁,c₁), (r₁,c₂), (r₂,c₁), (r₂,c₂).
    pub signs: [i8; 4],
    #[serde(skip)]
    alpha_coef: Coef,
}

impl ExtremalBlock {
    pub fn expand(&self) -> MultilinearForm {
        let cells = [
            [self.rows[0], self.columns[0]],
            [self.rows[0], self.columns[1]],
            [self.rows[1], self.columns[0]],
            [self.rows[1], self.columns[1]],
        ];
        let terms = cells
            .iter()
            .zip(self.signs)
            .map(|(c, s)| {
                let coef = if s < 0 { -self.alpha_coef.clone() } else { self.alpha_coef.clone() };
                MonomialTerm::new(c.to_vec(), coef)
            })
            .collect();
        MultilinearForm::from_terms(2, terms).expect("block is a valid form")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    Extremal(ExtremalBlock),
    NotExtremal(FailureReason),
}

fn same_modulus(a: &Coef, b: &Coef, tol: f64) -> bool {
    match (a.as_rational(), b.as_rational()) {
        (Some(x), Some(y)) => x.abs() == y.abs(),
        _ => {
            let (x, y) = (a.to_f64().abs(), b.to_f64().abs());
            (x - y).abs() <= tol * x.max(y)
        }
    }
}

/// Extremal iff the form is one 2×2 block with equal moduli and an odd number
/// of negative signs. Failures report the first violated condition in the
/// order complexity, row moduli, column moduli, type I, block count, signs.
pub fn classify_bilinear_extremum(form: &MultilinearForm, tol: f64) -> Result<Classification> {
    if form.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: form.arity() });
    }
    let c = complexity(form);
    if c != 2 {
        return Ok(Classification::NotExtremal(FailureReason::Complexity { complexity: c }));
    }
    let sets = support_sets(form);
    for s in &sets {
        let coefs: Vec<&Coef> = s.members.iter().map(|i| form.coefficient(i).expect("member")).collect();
        if coefs.windows(2).any(|w| !same_modulus(w[0], w[1], tol)) {
            let reason = if s.slot == 1 {
                FailureReason::RowMagnitudes { row: s.index }
            } else {
                FailureReason::ColumnMagnitudes { column: s.index }
            };
            // Rows are listed before columns, matching the reporting order.
            return Ok(Classification::NotExtremal(reason));
        }
    }
    // Type I: every row and column holds exactly two monomials and rows pair
    // up on identical column pairs.
    if sets.iter().any(|s| s.members.len() != 2) {
        return Ok(Classification::NotExtremal(FailureReason::NotTypeI));
    }
    let mut blocks: Vec<([u32; 2], Vec<u32>)> = Vec::new();
    for s in sets.iter().filter(|s| s.slot == 1) {
        let cols = [s.members[0][1], s.members[1][1]];
        match blocks.iter_mut().find(|b| b.0 == cols) {
            Some(b) => b.1.push(s.index),
            None => blocks.push((cols, vec![s.index])),
        }
    }
    if blocks.iter().any(|b| b.1.len() != 2) {
        return Ok(Classification::NotExtremal(FailureReason::NotTypeI));
    }
    if blocks.len() != 1 {
        return Ok(Classification::NotExtremal(FailureReason::MultipleBlocks { blocks: blocks.len() }));
    }
    let (columns, rows) = (blocks[0].0, [blocks[0].1[0], blocks[0].1[1]]);
    let cells = [[rows[0], columns[0]], [rows[0], columns[1]], [rows[1], columns[0]], [rows[1], columns[1]]];
    let coefs: Vec<&Coef> = cells.iter().map(|c| form.coefficient(c).expect("block cell")).collect();
    let signs: Vec<i8> = coefs.iter().map(|c| if c.to_f64() < 0.0 { -1 } else { 1 }).collect();
    if signs.iter().map(|&s| s as i32).product::<i32>() > 0 {
        return Ok(Classification::NotExtremal(FailureReason::SignProduct));
    }
    Ok(Classification::Extremal(ExtremalBlock {
        alpha: coefs[0].to_f64().abs(),
        rows,
        columns,
        signs: [signs[0], signs[1], signs[2], signs[3]],
        alpha_coef: coefs[0].abs(),
    }))
}

/// A table `δ ∈ {−1,0,1}` on `{1..n}^m`, zeros omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternJson", into = "PatternJson")]
pub struct SignPattern {
    m: usize,
    n: u32,
    entries: Vec<(Vec<u32>, i8)>,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    m: usize,
    n: u32,
    entries: Vec<PatternEntry>,
}

#[derive(Serialize, Deserialize)]
struct PatternEntry {
    idx: Vec<u32>,
    sign: i8,
}

impl From<SignPattern> for PatternJson {
    fn from(p: SignPattern) -> Self {
        PatternJson {
            m: p.m,
            n: p.n,
            entries: p.entries.into_iter().map(|(idx, sign)| PatternEntry { idx, sign }).collect(),
        }
    }
}

impl TryFrom<PatternJson> for SignPattern {
    type Error = Error;

    fn try_from(j: PatternJson) -> Result<Self> {
        SignPattern::new(j.m, j.n, j.entries.into_iter().map(|e| (e.idx, e.sign)).collect())
    }
}

impl SignPattern {
    pub fn new(m: usize, n: u32, mut entries: Vec<(Vec<u32>, i8)>) -> Result<Self> {
        entries.retain(|e| e.1 != 0);
        if entries.is_empty() {
            return Err(Error::EmptyForm);
        }
        for (idx, s) in &entries {
            if idx.len() != m {
                return Err(Error::ArityMismatch { expected: m, found: idx.len() });
            }
            if idx.iter().any(|&i| i == 0 || i > n) {
                return Err(Error::IndexOutOfRange { index: idx.clone(), dims: vec![n; m] });
            }
            if s.abs() != 1 {
                return Err(Error::InvalidCoefficient(format!("sign {s} at {idx:?}")));
            }
        }
        entries.sort();
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIndex(w[0].0.clone()));
        }
        Ok(Self { m, n, entries })
    }

    /// Pattern of a unimodular form, with `n` the largest slot dimension.
    pub fn from_form(form: &MultilinearForm) -> Result<Self> {
        if !form.is_unimodular() {
            return Err(Error::InvalidCoefficient("pattern needs ±1 coefficients".into()));
        }
        let n = *form.dims().iter().max().expect("arity >= 1");
        let entries = form
            .terms()
            .iter()
            .map(|t| (t.index.clone(), if t.coef.to_f64() < 0.0 { -1 } else { 1 }))
            .collect();
        Self::new(form.arity(), n, entries)
    }

    /// Each cell independently uniform on {−1,0,1}; redrawn if all zero.
    pub fn random<R: Rng>(rng: &mut R, m: usize, n: u32) -> Self {
        let cells = (n as u128).pow(m as u32);
        loop {
            let entries: Vec<(Vec<u32>, i8)> = (0..cells)
                .filter_map(|c| {
                    let s: i8 = rng.random_range(-1..=1);
                    (s != 0).then(|| (crate::forms::decode_linear(c, &vec![n; m]), s))
                })
                .collect();
            if let Ok(p) = Self::new(m, n, entries) {
                return p;
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cardinality(&self) -> usize {
        self.entries.len()
    }

    pub fn to_form(&self) -> MultilinearForm {
        let terms = self.entries.iter().map(|(idx, s)| MonomialTerm::new(idx.clone(), *s as i64)).collect();
        MultilinearForm::from_terms(self.m, terms).expect("pattern entries are valid")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("pattern serialization is infallible")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NtResult {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub gap: f64,
}

/// Checks the NT inequality for one pattern. `holds` is decided exactly by
/// comparing `card^{m+1}` with `2^{2m−2}·rhs^{2m}`.
pub fn nt_check(pattern: &SignPattern, budget: u128) -> Result<NtResult> {
    let m = pattern.m as u32;
    let card = pattern.cardinality();
    let norm = sup_norm_exact(&pattern.to_form(), budget)?;
    let rhs_exact = norm.exact_value.expect("unimodular norm is exact");
    let rhs_int = rhs_exact.to_integer();
    let lhs_pow: BigInt = Pow::pow(BigInt::from(card), m + 1);
    let rhs_pow: BigInt = Pow::pow(rhs_int, 2 * m) * Pow::pow(BigInt::from(2), 2 * m - 2);
    let lhs = (card as f64).powf((m as f64 + 1.0) / (2.0 * m as f64)) / 2f64.powf(1.0 - 1.0 / m as f64);
    let rhs = rational_to_f64(&rhs_exact);
    let gap = if lhs_pow == rhs_pow { 0.0 } else { rhs - lhs };
    Ok(NtResult { holds: lhs_pow <= rhs_pow, lhs, rhs, gap })
}

/// A pattern for which the NT inequality failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NtViolation {
    pub sample: usize,
    pub pattern: SignPattern,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NtProbeReport {
    pub m: usize,
    pub n: u32,
    pub samples: usize,
    pub seed: u64,
    pub min_gap: f64,
    pub equality_cases: usize,
    pub violations: Vec<NtViolation>,
}

/// Runs `nt_check` on seeded random patterns. Violations are collected, not
/// raised: the inequality is an open question.
pub fn nt_probe(m: usize, n: u32, samples: usize, seed: u64, budget: u128) -> Result<NtProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns: Vec<SignPattern> = (0..samples).map(|_| SignPattern::random(&mut rng, m, n)).collect();
    let results: Vec<NtResult> = patterns.par_iter().map(|p| nt_check(p, budget)).collect::<Result<_>>()?;
    let mut report =
        NtProbeReport { m, n, samples, seed, min_gap: f64::INFINITY, equality_cases: 0, violations: Vec::new() };
    for (i, (p, r)) in patterns.into_iter().zip(results).enumerate() {
        report.min_gap = report.min_gap.min(r.gap);
        if r.gap == 0.0 {
            report.equality_cases += 1;
        }
        if !r.holds {
            report.violations.push(NtViolation { sample: i, pattern: p, lhs: r.lhs, rhs: r.rhs });
        }
    }
    Ok(report)
}
