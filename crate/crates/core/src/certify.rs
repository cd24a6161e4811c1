//! End-to-end checks of the sharp constants on the strategic forms, the
//! interpolation and universality probes, and the report writer.
//!
//! Headline claims are all of the form `2^r` with rational `r`, so they are
//! verified as exact radicals: both sides are raised to a common power that
//! clears the roots and compared as rationals.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::constants::khinchin_a;
use crate::entropy::ratio;
use crate::error::{Error, Result};
use crate::exact::{format_rational, Radical};
use crate::forms::{gen_sm, random_unimodular_with, MultilinearForm};
use crate::hypercube_norm::required_budget;
use crate::mixed_norms::{Exponent, ExponentTuple};

/// Tolerance for float comparisons against a claimed bound.
pub const VERDICT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Meets,
    Exceeds,
    Below,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Meets => "meets",
            Verdict::Exceeds => "exceeds",
            Verdict::Below => "below",
        }
    }
}

/// Mixed sum, norm and their ratio for one form, exponent tuple and order.
#[derive(Clone, Debug, Serialize)]
pub struct RatioCertificate {
    pub form_id: String,
    pub form_hash: String,
    pub exponents: String,
    pub slot_order: Vec<usize>,
    pub mixed_sum: f64,
    pub mixed_sum_exact: Option<String>,
    pub norm: f64,
    pub norm_exact: Option<String>,
    pub norm_certificate: Vec<Vec<f64>>,
    pub ratio: f64,
    pub ratio_exact: Option<String>,
    pub claimed_bound: Option<f64>,
    pub claimed_bound_exact: Option<String>,
    pub verdict: Option<Verdict>,
    #[serde(skip)]
    pub ratio_radical: Option<Radical>,
}

impl RatioCertificate {
    pub fn named(mut self, id: impl Into<String>) -> Self {
        self.form_id = id.into();
        self
    }

    /// Attaches a claimed value; the verdict is exact when both sides are radicals.
    pub fn with_claim(mut self, bound: f64, exact: Option<Radical>) -> Self {
        let verdict = match (&self.ratio_radical, &exact) {
            (Some(r), Some(b)) => match r.cmp(b) {
                std::cmp::Ordering::Equal => Verdict::Meets,
                std::cmp::Ordering::Greater => Verdict::Exceeds,
                std::cmp::Ordering::Less => Verdict::Below,
            },
            _ if (self.ratio - bound).abs() <= VERDICT_TOL * bound.abs() => Verdict::Meets,
            _ if self.ratio > bound => Verdict::Exceeds,
            _ => Verdict::Below,
        };
        self.claimed_bound = Some(bound);
        self.claimed_bound_exact = exact.map(|r| r.to_string());
        self.verdict = Some(verdict);
        self
    }

    pub fn to_record(&self, task: &str, claim: &str) -> ReportRecord {
        let mut inputs = Map::new();
        inputs.insert("form_id".into(), json!(self.form_id));
        inputs.insert("form_hash".into(), json!(self.form_hash));
        inputs.insert("exponents".into(), json!(self.exponents));
        inputs.insert("slot_order".into(), json!(self.slot_order));
        let mut values = Map::new();
        values.insert("mixed_sum".into(), json!(self.mixed_sum));
        values.insert("norm".into(), json!(self.norm));
        values.insert("ratio".into(), json!(self.ratio));
        values.insert("norm_certificate".into(), json!(self.norm_certificate));
        for (k, v) in [
            ("mixed_sum_exact", &self.mixed_sum_exact),
            ("norm_exact", &self.norm_exact),
            ("ratio_exact", &self.ratio_exact),
            ("claimed_bound_exact", &self.claimed_bound_exact),
        ] {
            if let Some(v) = v {
                values.insert(k.into(), json!(v));
            }
        }
        if let Some(b) = self.claimed_bound {
            values.insert("claimed_bound".into(), json!(b));
        }
        ReportRecord {
            task: task.into(),
            inputs,
            values,
            verdict: self.verdict.map_or("none", Verdict::as_str).into(),
            claim: claim.into(),
        }
    }
}

fn check_m(m: usize) -> Result<()> {
    if !(2..=6).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m} must lie in 2..=6")));
    }
    Ok(())
}

/// Strategic form `Sₘ` under `(2,…,2,1)` with slot 1 innermost: the ratio
/// must equal `(√2)^{m−1}` with norm exactly `2^{m−1}`.
pub fn certify_mixed_lower(m: usize, budget: u128) -> Result<RatioCertificate> {
    check_m(m)?;
    let form = gen_sm(m)?;
    let mut order: Vec<usize> = (2..=m).collect();
    order.push(1);
    let exps = ExponentTuple::mixed_l1l2(m, m - 1);
    let cert = ratio(&form, &exps, Some(&order), budget)?.named(format!("S{m}"));
    let claim = Radical::pow2(m as i64 - 1, 2);
    let cert = cert.with_claim(claim.to_f64(), Some(claim));
    let norm_ok = cert.norm_exact.as_deref() == Some(&(1u64 << (m - 1)).to_string());
    Ok(if norm_ok { cert } else { RatioCertificate { verdict: Some(Verdict::Below), ..cert } })
}

/// `Sₘ` under the Bohnenblust–Hille exponent: ratio `2^{1−1/m}` exactly.
pub fn certify_bh_ratio(m: usize, budget: u128) -> Result<RatioCertificate> {
    check_m(m)?;
    let form = gen_sm(m)?;
    let cert = ratio(&form, &ExponentTuple::bh(m), None, budget)?.named(format!("S{m}"));
    let claim = Radical::pow2(m as i64 - 1, m as u32);
    Ok(cert.with_claim(claim.to_f64(), Some(claim)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedReport {
    pub m: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub bound: f64,
    pub max_ratio: f64,
    pub max_ratio_form: String,
    pub strategic_included: bool,
    pub violations: usize,
}

/// Bohnenblust–Hille ratios of random unimodular forms with at most `K^m`
/// monomials stay below `√K`. `Sₘ` is added when it fits the restriction.
pub fn restricted_bound_check(m: usize, k: usize, samples: usize, seed: u64, budget: u128) -> Result<RestrictedReport> {
    if m == 0 || k == 0 {
        return Err(Error::OutOfRange(format!("need m, K >= 1 (got m = {m}, K = {k})")));
    }
    let max_terms = (k as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forms: Vec<MultilinearForm> = Vec::with_capacity(samples + 1);
    for _ in 0..samples {
        let dims: Vec<u32> = (0..m).map(|_| rng.random_range(1..=k as u32 + 1)).collect();
        let cells: u128 = dims.iter().map(|&d| d as u128).product();
        let terms = rng.random_range(1..=cells.min(max_terms)) as usize;
        forms.push(random_unimodular_with(&mut rng, m, &dims, terms)?);
    }
    let mut strategic_included = false;
    if m >= 2 && 4u128.pow(m as u32 - 1) <= max_terms {
        let s = gen_sm(m)?;
        if required_budget(&s) <= budget {
            forms.push(s);
            strategic_included = true;
        }
    }
    let exps = ExponentTuple::bh(m);
    let ratios: Vec<f64> = forms.par_iter().map(|f| ratio(f, &exps, None, budget).map(|c| c.ratio)).collect::<Result<_>>()?;
    let bound = (k as f64).sqrt();
    let mut best = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if r > ratios[best] {
            best = i;
        }
    }
    Ok(RestrictedReport {
        m,
        k,
        samples,
        seed,
        bound,
        max_ratio: ratios.get(best).copied().unwrap_or(0.0),
        max_ratio_form: forms.get(best).map(|f| f.fingerprint()).unwrap_or_default(),
        strategic_included,
        violations: ratios.iter().filter(|&&r| r > bound * (1.0 + 1e-12)).count(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterpFamily {
    /// The `m` tuples with one exponent 1 and the rest 2.
    MixedL1L2,
    /// The `m` tuples with one exponent 2 and the rest `2k/(k+1)`.
    KFamily(usize),
}

impl InterpFamily {
    pub fn members(self, m: usize) -> Vec<ExponentTuple> {
        (0..m)
            .map(|i| match self {
                InterpFamily::MixedL1L2 => ExponentTuple::mixed_l1l2(m, i),
                InterpFamily::KFamily(k) => {
                    let q = Exponent::ratio(2 * k as i64, k as i64 + 1);
                    let values = (0..m).map(|j| if j == i { Exponent::int(2) } else { q }).collect();
                    ExponentTuple::new(values).expect("exponents in [1,2]")
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpReport {
    pub form_hash: String,
    pub family: String,
    pub slot_order: Vec<usize>,
    pub exponents: Vec<String>,
    pub ratios: Vec<f64>,
    pub geometric_mean: f64,
}

/// Geometric mean of the ratios over every member of `family`, with one form
/// and one slot order throughout.
pub fn interp_ratio(
    form: &MultilinearForm,
    family: InterpFamily,
    slot_order: Option<&[usize]>,
    budget: u128,
) -> Result<InterpReport> {
    let m = form.arity();
    let members = family.members(m);
    let certs: Vec<_> = members.iter().map(|e| ratio(form, e, slot_order, budget)).collect::<Result<_>>()?;
    let ratios: Vec<f64> = certs.iter().map(|c| c.ratio).collect();
    let log_mean = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    Ok(InterpReport {
        form_hash: form.fingerprint(),
        family: match family {
            InterpFamily::MixedL1L2 => "mixed_l1l2".into(),
            InterpFamily::KFamily(k) => format!("k_family({k})"),
        },
        slot_order: certs[0].slot_order.clone(),
        exponents: members.iter().map(|e| e.to_string()).collect(),
        ratios,
        geometric_mean: log_mean.exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalEntry {
    pub id: String,
    pub form_hash: String,
    pub ratios: Vec<f64>,
    /// `(√2)^{m−1} − ratio` per exponent tuple.
    pub shortfalls: Vec<f64>,
    pub universal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalReport {
    pub m: usize,
    pub target: f64,
    pub entries: Vec<UniversalEntry>,
}

/// Checks whether each candidate reaches `(√2)^{m−1}` for all `m` mixed
/// (ℓ₁,ℓ₂) exponents at once (within 1e−9), with a common slot order.
pub fn universal_extremum_probe(
    m: usize,
    candidates: &[(String, MultilinearForm)],
    slot_order: Option<&[usize]>,
    budget: u128,
) -> Result<UniversalReport> {
    let target = 2f64.powf((m as f64 - 1.0) / 2.0);
    let entries = candidates
        .iter()
        .map(|(id, form)| {
            if form.arity() != m {
                return Err(Error::ArityMismatch { expected: m, found: form.arity() });
            }
            let rep = interp_ratio(form, InterpFamily::MixedL1L2, slot_order, budget)?;
            let shortfalls: Vec<f64> = rep.ratios.iter().map(|r| target - r).collect();
            Ok(UniversalEntry {
                id: id.clone(),
                form_hash: rep.form_hash,
                universal: shortfalls.iter().all(|s| s.abs() <= 1e-9),
                ratios: rep.ratios,
                shortfalls,
            })
        })
        .collect::<Result<_>>()?;
    Ok(UniversalReport { m, target, entries })
}

/// `‖a‖₂ / (E|Σ εⱼaⱼ|^p)^{1/p}` with the expectation taken exactly over all
/// sign vectors (one sign fixed by symmetry).
pub fn szarek_ratio(a: &[f64], p: f64) -> Result<f64> {
    let n = a.len();
    if n == 0 || n > 12 {
        return Err(Error::BudgetExceeded { required: 1u128 << n.min(127), budget: 1 << 12 });
    }
    let half = 1u32 << (n - 1);
    let mut sum = 0.0;
    for mask in 0..half {
        let s: f64 = a[0] + (1..n).map(|j| if mask >> (j - 1) & 1 == 1 { -a[j] } else { a[j] }).sum::<f64>();
        sum += s.abs().powf(p);
    }
    let rp = (sum / half as f64).powf(1.0 / p);
    let l2 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(l2 / rp)
}

/// Euclidean distance from `a/‖a‖₂` to the nearest `(±eᵢ ± eⱼ)/√2`.
pub fn distance_to_pair_pattern(a: &[f64]) -> f64 {
    let l2 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut mags: Vec<f64> = a.iter().map(|x| x.abs() / l2).collect();
    mags.sort_by(|x, y| y.total_cmp(x));
    let dot = (mags[0] + mags.get(1).copied().unwrap_or(0.0)) / 2f64.sqrt();
    (2.0 - 2.0 * dot).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SzarekSample {
    pub a: Vec<f64>,
    pub ratio: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SzarekReport {
    pub p: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// `1/A_p`, the best possible ratio.
    pub target: f64,
    pub max_ratio: f64,
    /// The five samples with the largest ratio.
    pub top: Vec<SzarekSample>,
    /// Smallest pattern distance among samples within 1e−3 of the target.
    pub near_target_max_distance: Option<f64>,
}

/// Random coefficient vectors (random support size, Gaussian entries): how
/// close to the extremal ratio they get, and how far they are from the
/// two-coordinate pattern when they do.
pub fn szarek_probe(p: f64, n: usize, samples: usize, seed: u64) -> Result<SzarekReport> {
    if n == 0 || n > 12 {
        return Err(Error::BudgetExceeded { required: 1u128 << n.min(127), budget: 1 << 12 });
    }
    let target = 1.0 / khinchin_a(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let support = rng.random_range(1..=n);
            let mut a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            for x in a.iter_mut().skip(support) {
                *x = 0.0;
            }
            a
        })
        .collect();
    let mut all: Vec<SzarekSample> = vectors
        .into_par_iter()
        .map(|a| {
            let ratio = szarek_ratio(&a, p)?;
            Ok(SzarekSample { distance: distance_to_pair_pattern(&a), ratio, a })
        })
        .collect::<Result<_>>()?;
    let near_target_max_distance =
        all.iter().filter(|s| target - s.ratio < 1e-3).map(|s| s.distance).fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });
    all.sort_by(|x, y| y.ratio.total_cmp(&x.ratio));
    let max_ratio = all.first().map_or(0.0, |s| s.ratio);
    all.truncate(5);
    Ok(SzarekReport { p, n, samples, seed, target, max_ratio, top: all, near_target_max_distance })
}

/// One row of a report file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub task: String,
    pub inputs: Map<String, Value>,
    pub values: Map<String, Value>,
    pub verdict: String,
    #[serde(rename = "paper_claim")]
    pub claim: String,
}

impl ReportRecord {
    pub fn new(task: &str, inputs: Value, values: Value, verdict: &str, claim: &str) -> Self {
        let as_map = |v: Value| match v {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        Self { task: task.into(), inputs: as_map(inputs), values: as_map(values), verdict: verdict.into(), claim: claim.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn render_report(records: &[ReportRecord], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(records)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let inputs: BTreeSet<&String> = records.iter().flat_map(|r| r.inputs.keys()).collect();
            let values: BTreeSet<&String> = records.iter().flat_map(|r| r.values.keys()).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = vec!["task".into(), "verdict".into(), "paper_claim".into()];
            header.extend(inputs.iter().map(|k| format!("inputs.{k}")));
            header.extend(values.iter().map(|k| format!("values.{k}")));
            w.write_record(&header)?;
            for r in records {
                let mut row = vec![r.task.clone(), r.verdict.clone(), r.claim.clone()];
                row.extend(inputs.iter().map(|k| r.inputs.get(*k).map(cell).unwrap_or_default()));
                row.extend(values.iter().map(|k| r.values.get(*k).map(cell).unwrap_or_default()));
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Writes records as a JSON array or a flattened CSV table. Keys are sorted,
/// so the output is byte-stable for equal inputs.
pub fn write_report(records: &[ReportRecord], path: &Path, format: ReportFormat) -> Result<()> {
    fs::write(path, render_report(records, format)?)?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<Vec<ReportRecord>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Exact rational as a report string.
pub fn rational_field(r: &BigRational) -> Value {
    json!(format_rational(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{gen_t2, Coef, MonomialTerm};
    use crate::hypercube_norm::DEFAULT_BUDGET;

    #[test]
    fn mixed_lower_is_exact() {
        for m in 2..=5 {
            let c = certify_mixed_lower(m, DEFAULT_BUDGET).unwrap();
            assert_eq!(c.verdict, Some(Verdict::Meets), "m={m}");
            assert_eq!(c.ratio_radical, Some(Radical::pow2(m as i64 - 1, 2)));
            assert_eq!(c.norm_exact.as_deref(), Some((1u32 << (m - 1)).to_string().as_str()));
        }
        assert_eq!(certify_mixed_lower(3, DEFAULT_BUDGET).unwrap().ratio_exact.as_deref(), Some("2"));
        assert!(matches!(certify_mixed_lower(7, DEFAULT_BUDGET), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn bh_ratio_is_exact() {
        for m in 2..=5 {
            let c = certify_bh_ratio(m, DEFAULT_BUDGET).unwrap();
            assert_eq!(c.verdict, Some(Verdict::Meets), "m={m}");
            let sq = c.ratio_radical.unwrap().pow_to_rational(m as u32).unwrap();
            assert_eq!(sq, BigRational::from_integer(num::BigInt::from(1) << (m - 1)));
        }
    }

    #[test]
    fn float_verdicts() {
        let c = ratio(&gen_t2(), &ExponentTuple::bh(2), None, DEFAULT_BUDGET).unwrap();
        let c = RatioCertificate { ratio_radical: None, ..c };
        assert_eq!(c.clone().with_claim(2f64.sqrt(), None).verdict, Some(Verdict::Meets));
        assert_eq!(c.clone().with_claim(1.0, None).verdict, Some(Verdict::Exceeds));
        assert_eq!(c.with_claim(2.0, None).verdict, Some(Verdict::Below));
    }

    #[test]
    fn restricted_examples() {
        let r = restricted_bound_check(3, 4, 40, 1, DEFAULT_BUDGET).unwrap();
        assert!(r.strategic_included);
        assert!(r.max_ratio >= 2f64.powf(2.0 / 3.0) - 1e-12);
        assert_eq!(r.violations, 0);
        let r = restricted_bound_check(2, 1, 30, 2, DEFAULT_BUDGET).unwrap();
        assert!(r.max_ratio <= 1.0 + 1e-12);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn interp_examples() {
        let r = interp_ratio(&gen_t2(), InterpFamily::MixedL1L2, None, DEFAULT_BUDGET).unwrap();
        assert!(r.ratios.iter().all(|x| (x - 2f64.sqrt()).abs() < 1e-12));
        assert!((r.geometric_mean - 2f64.sqrt()).abs() < 1e-12);
        let single = MultilinearForm::from_terms(3, vec![MonomialTerm::new(vec![1, 2, 1], Coef::int(-3))]).unwrap();
        for fam in [InterpFamily::MixedL1L2, InterpFamily::KFamily(2)] {
            assert!((interp_ratio(&single, fam, None, DEFAULT_BUDGET).unwrap().geometric_mean - 1.0).abs() < 1e-12);
        }
        let s3 = gen_sm(3).unwrap();
        let r = interp_ratio(&s3, InterpFamily::MixedL1L2, Some(&[2, 3, 1]), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.ratios[2], 2.0);
        let k = InterpFamily::KFamily(2).members(3);
        assert_eq!(k[1].to_string(), "(4/3,2,4/3)");
    }

    #[test]
    fn universal_probe() {
        let r = universal_extremum_probe(2, &[("T2".into(), gen_t2())], None, DEFAULT_BUDGET).unwrap();
        assert!(r.entries[0].universal);
        let r = universal_extremum_probe(3, &[("S3".into(), gen_sm(3).unwrap())], None, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.entries[0].ratios.len(), 3);
        assert!(universal_extremum_probe(2, &[], None, DEFAULT_BUDGET).unwrap().entries.is_empty());
    }

    #[test]
    fn szarek_examples() {
        assert!((szarek_ratio(&[1.0, 1.0], 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((szarek_ratio(&[1.0], 1.0).unwrap() - 1.0).abs() < 1e-15);
        // E|±1±1±1| = (3 + 1 + 1 + 1)/4 = 3/2
        let r = szarek_ratio(&[1.0, 1.0, 1.0], 1.0).unwrap();
        assert!((r - 3f64.sqrt() / 1.5).abs() < 1e-15);
        assert!(r < 2f64.sqrt());
        assert!(szarek_ratio(&[1.0; 13], 1.0).is_err());
        assert_eq!(distance_to_pair_pattern(&[0.0, 3.0, -3.0]), 0.0);
        let rep = szarek_probe(1.0, 6, 200, 3).unwrap();
        assert!(rep.max_ratio <= rep.target + 1e-12);
        assert_eq!(rep, szarek_probe(1.0, 6, 200, 3).unwrap());
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_report(&[], &path, ReportFormat::Json).unwrap();
        assert!(read_report_json(&path).unwrap().is_empty());
        let rec = certify_mixed_lower(3, DEFAULT_BUDGET).unwrap().to_record("mixed-lower", "ratio = (√2)^(m-1)");
        write_report(std::slice::from_ref(&rec), &path, ReportFormat::Json).unwrap();
        let back = read_report_json(&path).unwrap();
        assert_eq!(back, vec![rec.clone()]);
        assert_eq!(back[0].values["ratio_exact"], json!("2"));
        let csv = render_report(&[rec], ReportFormat::Csv).unwrap();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("task,verdict,paper_claim,inputs.exponents"));
        assert_eq!(render_report(&[], ReportFormat::Csv).unwrap().trim(), "task,verdict,paper_claim");
    }
}
