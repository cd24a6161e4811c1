//! Command-line front end. Every command builds report records; stdout gets a
//! short summary and `-o` gets the full report.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{
    certify_bh_ratio, certify_mixed_lower, interp_ratio, render_report, restricted_bound_check, szarek_probe,
    universal_extremum_probe, InterpFamily, ReportFormat, ReportRecord, Verdict,
};
use crate::constants::{
    bh_upper_complex, bh_upper_real, hl_entropy_lower, hl_lower_bound, khinchin_a, khinchin_p0, table,
};
use crate::entropy::{
    classify_bilinear_extremum, complexity, entropy_search, nt_check, nt_probe, ratio, support_sets, Classification,
    EntropySearch, SignPattern,
};
use crate::error::{Error, Result};
use crate::exact::format_rational;
use crate::forms::{gen_sm, gen_t2, gen_type_ii, random_unimodular_form, MultilinearForm, TypeIIVariant};
use crate::hypercube_norm::{sup_norm_exact, sup_norm_heuristic, NormResult, DEFAULT_BUDGET};
use crate::lp_norm::{gen_tmp_pattern, sup_norm_lp, LpOptions, PExponent};
use crate::mixed_norms::{mixed_sum, mixed_sum_exact, ExponentTuple};

#[derive(Parser, Debug)]
#[command(name = "bhlab", version, about = "Multilinear forms, hypercube norms and sharp constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Maximum number of hypercube evaluations for exhaustive modes.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Required by every randomized mode.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, env = "BHLAB_THREADS")]
    threads: Option<usize>,
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a form as JSON.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Sup norm over the hypercube or the ℓp ball.
    Norm {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, value_enum, default_value_t = NormMode::Exact)]
        mode: NormMode,
        #[arg(long)]
        p: Option<PExponent>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Nested mixed sum of the coefficients.
    MixedSum {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        exponents: String,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Mixed sum divided by the exact sup norm.
    Ratio {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        exponents: String,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    #[command(subcommand)]
    Certify(CertifyCmd),
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Decide whether a bilinear form attains √2.
    Classify {
        #[arg(long)]
        form: PathBuf,
    },
    /// Check the cardinality inequality on a sign pattern, or on random ones.
    NtCheck {
        #[arg(long, required_unless_present = "m")]
        pattern: Option<PathBuf>,
        #[arg(long, requires = "n")]
        m: Option<usize>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    #[command(subcommand)]
    Constants(ConstantsCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormMode {
    Exact,
    Heuristic,
    Lp,
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    T2,
    Sm {
        #[arg(long)]
        m: usize,
    },
    Tmp {
        #[arg(long)]
        m: usize,
    },
    Type2 {
        #[arg(long)]
        extended: bool,
    },
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<u32>,
        #[arg(long)]
        terms: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CertifyCmd {
    MixedLower {
        #[arg(long)]
        m: usize,
    },
    BhRatio {
        #[arg(long)]
        m: usize,
    },
    Restricted {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    Interp {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, value_enum, default_value_t = FamilyArg::MixedL1l2)]
        family: FamilyArg,
        /// Parameter of the k-family; defaults to m − 1.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    UniversalProbe {
        #[arg(long, required = true, num_args = 1..)]
        form: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    SzarekProbe {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    MixedL1l2,
    KFamily,
}

#[derive(Subcommand, Debug)]
enum EntropyCmd {
    Complexity {
        #[arg(long)]
        form: PathBuf,
    },
    Search {
        #[arg(long)]
        exponents: String,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<u32>,
        #[arg(long)]
        max_terms: usize,
        /// Ratio to reach; defaults to (√2)^(m−1).
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstantsCmd {
    Khinchin {
        #[arg(long)]
        p: f64,
    },
    P0,
    Upper {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Field::Real)]
        field: Field,
    },
    HlLower {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: PExponent,
    },
    EntropyLower {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: PExponent,
    },
    Table {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "inf")]
        p: PExponent,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Field {
    Real,
    Complex,
}

/// What a command produced: stdout lines, report records, or a raw file body.
struct Outcome {
    summary: Vec<String>,
    records: Vec<ReportRecord>,
    raw: Option<String>,
    failed: bool,
}

impl Outcome {
    fn report(summary: Vec<String>, records: Vec<ReportRecord>) -> Self {
        Self { summary, records, raw: None, failed: false }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code: 0 success, 1 usage or input error, 2 budget exceeded, 3 failed
/// certification.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let outcome = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::OutOfRange(e.to_string())),
        },
        None => execute(&cli),
    };
    match outcome.and_then(|o| emit(&cli.global, o, out)) {
        Ok(failed) => {
            if failed {
                3
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded { required, .. } => {
                    let _ = writeln!(err, "re-run with --budget {required} to proceed");
                    2
                }
                _ => 1,
            }
        }
    }
}

fn emit(g: &Global, o: Outcome, out: &mut dyn Write) -> Result<bool> {
    let body = match (&o.raw, g.format) {
        (Some(raw), _) => Some(raw.clone()),
        (None, Some(f)) => Some(render(&o.records, f)?),
        (None, None) if g.output.is_some() => Some(render(&o.records, FormatArg::Json)?),
        _ => None,
    };
    match (&g.output, body) {
        (Some(path), Some(body)) => {
            fs::write(path, body)?;
            for line in &o.summary {
                writeln!(out, "{line}")?;
            }
        }
        (None, Some(body)) => write!(out, "{body}")?,
        _ => {
            for line in &o.summary {
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(o.failed)
}

fn render(records: &[ReportRecord], f: FormatArg) -> Result<String> {
    render_report(
        records,
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        },
    )
}

/// 12 significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mant));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn need_seed(g: &Global) -> Result<u64> {
    g.seed.ok_or_else(|| Error::OutOfRange("this mode is randomized and needs --seed".into()))
}

fn load_form(path: &Path) -> Result<MultilinearForm> {
    MultilinearForm::from_json_str(&fs::read_to_string(path)?)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn norm_values(n: &NormResult) -> Value {
    json!({
        "value": n.value,
        "exact_value": n.exact_value.as_ref().map(format_rational),
        "certificate": n.certificate,
        "exact": n.exact,
        "converged": n.converged,
    })
}

fn norm_headline(n: &NormResult) -> String {
    n.exact_value.as_ref().map_or_else(|| fmt_num(n.value), format_rational)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(cmd) => {
            let form = match cmd {
                GenCmd::T2 => gen_t2(),
                GenCmd::Sm { m } => gen_sm(*m)?,
                GenCmd::Tmp { m } => gen_tmp_pattern(*m)?,
                GenCmd::Type2 { extended } => {
                    gen_type_ii(if *extended { TypeIIVariant::Extended } else { TypeIIVariant::Basic })
                }
                GenCmd::Random { m, dims, terms } => random_unimodular_form(*m, dims, *terms, need_seed(g)?)?,
            };
            let mut body = form.to_json_string();
            body.push('\n');
            Ok(Outcome { summary: vec![form.fingerprint()], records: Vec::new(), raw: Some(body), failed: false })
        }
        Command::Norm { form, mode, p, restarts } => {
            let f = load_form(form)?;
            let (n, p_str) = match mode {
                NormMode::Exact => (sup_norm_exact(&f, g.budget)?, "inf".to_string()),
                NormMode::Heuristic => (sup_norm_heuristic(&f, *restarts, need_seed(g)?), "inf".to_string()),
                NormMode::Lp => {
                    let p = p.ok_or_else(|| Error::OutOfRange("--mode lp needs --p".into()))?;
                    let opts = LpOptions { restarts: *restarts, tol: g.tol, budget: g.budget, ..LpOptions::new(need_seed(g)?) };
                    (sup_norm_lp(&f, p, &opts)?, p.to_string())
                }
            };
            let rec = ReportRecord::new(
                "norm",
                json!({"form_hash": f.fingerprint(), "mode": format!("{mode:?}").to_lowercase(), "p": p_str}),
                norm_values(&n),
                if n.exact { "exact" } else if n.converged { "converged" } else { "not_converged" },
                "",
            );
            Ok(Outcome::report(vec![norm_headline(&n)], vec![rec]))
        }
        Command::MixedSum { form, exponents, order } => {
            let f = load_form(form)?;
            let exps = ExponentTuple::parse_list(exponents)?;
            let value = mixed_sum(&f, &exps, order.as_deref())?;
            let exact = mixed_sum_exact(&f, &exps, order.as_deref())?.map(|r| r.to_string());
            let rec = ReportRecord::new(
                "mixed-sum",
                json!({"form_hash": f.fingerprint(), "exponents": exps.to_string(), "slot_order": order}),
                json!({"value": value, "exact": exact}),
                "computed",
                "",
            );
            Ok(Outcome::report(vec![exact.unwrap_or_else(|| fmt_num(value))], vec![rec]))
        }
        Command::Ratio { form, exponents, order } => {
            let f = load_form(form)?;
            let exps = ExponentTuple::parse_list(exponents)?;
            let c = ratio(&f, &exps, order.as_deref(), g.budget)?;
            let head = c.ratio_exact.clone().unwrap_or_else(|| fmt_num(c.ratio));
            Ok(Outcome::report(vec![head], vec![c.to_record("ratio", "")]))
        }
        Command::Certify(cmd) => certify(cmd, g),
        Command::Entropy(EntropyCmd::Complexity { form }) => {
            let f = load_form(form)?;
            let c = complexity(&f);
            let rec = ReportRecord::new(
                "entropy-complexity",
                json!({"form_hash": f.fingerprint()}),
                json!({"complexity": c, "support_sets": to_json(&support_sets(&f))}),
                "computed",
                "",
            );
            Ok(Outcome::report(vec![c.to_string()], vec![rec]))
        }
        Command::Entropy(EntropyCmd::Search { exponents, dims, max_terms, target, order }) => {
            let exps = ExponentTuple::parse_list(exponents)?;
            let target = target.unwrap_or_else(|| 2f64.powf((dims.len() as f64 - 1.0) / 2.0));
            let search = EntropySearch {
                exponents: exps.clone(),
                slot_order: order.clone(),
                dims_cap: dims.clone(),
                max_terms: *max_terms,
                target_ratio: target,
                tol: g.tol.max(1e-12),
                budget: g.budget,
            };
            let found = entropy_search(&search)?;
            let (head, values) = match &found {
                Some(w) => (
                    w.k.to_string(),
                    json!({"k": w.k, "ratio": w.ratio, "witness": serde_json::from_str::<Value>(&w.form.to_json_string())?}),
                ),
                None => (format!("none up to {max_terms} terms"), json!({"k": null})),
            };
            let rec = ReportRecord::new(
                "entropy-search",
                json!({"exponents": exps.to_string(), "dims_cap": dims, "max_terms": max_terms, "target_ratio": target, "slot_order": order}),
                values,
                if found.is_some() { "found" } else { "not_found" },
                "",
            );
            Ok(Outcome::report(vec![head], vec![rec]))
        }
        Command::Classify { form } => {
            let f = load_form(form)?;
            let c = classify_bilinear_extremum(&f, g.tol)?;
            let head = match &c {
                Classification::Extremal { .. } => "extremal".to_string(),
                Classification::NotExtremal { .. } => "not extremal".to_string(),
            };
            let verdict = if matches!(c, Classification::Extremal { .. }) { "extremal" } else { "not_extremal" };
            let rec = ReportRecord::new("classify", json!({"form_hash": f.fingerprint()}), to_json(&c), verdict, "");
            Ok(Outcome::report(vec![head], vec![rec]))
        }
        Command::NtCheck { pattern: Some(path), .. } => {
            let p = SignPattern::from_json_str(&fs::read_to_string(path)?)?;
            let r = nt_check(&p, g.budget)?;
            let head = format!("{}, gap {}", if r.holds { "holds" } else { "violated" }, fmt_num(r.gap));
            let rec = ReportRecord::new(
                "nt-check",
                json!({"m": p.m(), "n": p.n(), "cardinality": p.cardinality()}),
                to_json(&r),
                if r.holds { "holds" } else { "violated" },
                "",
            );
            Ok(Outcome::report(vec![head], vec![rec]))
        }
        Command::NtCheck { m: Some(m), n: Some(n), samples, .. } => {
            let seed = need_seed(g)?;
            let r = nt_probe(*m, *n, *samples, seed, g.budget)?;
            let head = format!(
                "{} violations in {} samples, min gap {}",
                r.violations.len(),
                r.samples,
                fmt_num(r.min_gap)
            );
            let verdict = if r.violations.is_empty() { "holds" } else { "violations_found" };
            let rec = ReportRecord::new(
                "nt-probe",
                json!({"m": m, "n": n, "samples": samples, "seed": seed}),
                to_json(&r),
                verdict,
                "",
            );
            Ok(Outcome::report(vec![head], vec![rec]))
        }
        Command::NtCheck { .. } => Err(Error::OutOfRange("nt-check needs --pattern or --m and --n".into())),
        Command::Constants(cmd) => constants(cmd, g),
    }
}

fn certify(cmd: &CertifyCmd, g: &Global) -> Result<Outcome> {
    match cmd {
        CertifyCmd::MixedLower { m } | CertifyCmd::BhRatio { m } => {
            let (c, task, claim) = if let CertifyCmd::MixedLower { .. } = cmd {
                (certify_mixed_lower(*m, g.budget)?, "certify-mixed-lower", "ratio = 2^((m-1)/2)")
            } else {
                (certify_bh_ratio(*m, g.budget)?, "certify-bh-ratio", "ratio = 2^(1-1/m)")
            };
            let verdict = c.verdict.unwrap_or(Verdict::Below);
            let head = format!(
                "{} ({}), {}",
                c.ratio_exact.clone().unwrap_or_else(|| fmt_num(c.ratio)),
                fmt_num(c.ratio),
                verdict.as_str()
            );
            Ok(Outcome { failed: verdict != Verdict::Meets, ..Outcome::report(vec![head], vec![c.to_record(task, claim)]) })
        }
        CertifyCmd::Restricted { m, k, samples } => {
            let seed = need_seed(g)?;
            let r = restricted_bound_check(*m, *k, *samples, seed, g.budget)?;
            let head = format!("max ratio {} <= {}: {}", fmt_num(r.max_ratio), fmt_num(r.bound), r.violations == 0);
            let rec = ReportRecord::new(
                "certify-restricted",
                json!({"m": m, "k": k, "samples": samples, "seed": seed}),
                to_json(&r),
                if r.violations == 0 { "meets" } else { "exceeds" },
                "ratio <= sqrt(K) for forms with at most K^m monomials",
            );
            Ok(Outcome { failed: r.violations > 0, ..Outcome::report(vec![head], vec![rec]) })
        }
        CertifyCmd::Interp { form, family, k, order } => {
            let f = load_form(form)?;
            let fam = match family {
                FamilyArg::MixedL1l2 => InterpFamily::MixedL1L2,
                FamilyArg::KFamily => InterpFamily::KFamily(k.unwrap_or(f.arity().saturating_sub(1).max(1))),
            };
            let r = interp_ratio(&f, fam, order.as_deref(), g.budget)?;
            let rec = ReportRecord::new(
                "certify-interp",
                json!({"form_hash": r.form_hash, "family": r.family, "slot_order": r.slot_order}),
                to_json(&r),
                "computed",
                "",
            );
            Ok(Outcome::report(vec![fmt_num(r.geometric_mean)], vec![rec]))
        }
        CertifyCmd::UniversalProbe { form, order } => {
            let forms: Vec<(String, MultilinearForm)> = form
                .iter()
                .map(|p| Ok((p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()), load_form(p)?)))
                .collect::<Result<_>>()?;
            let m = forms[0].1.arity();
            let r = universal_extremum_probe(m, &forms, order.as_deref(), g.budget)?;
            let summary = r.entries.iter().map(|e| format!("{}: {}", e.id, if e.universal { "universal" } else { "not universal" })).collect();
            let rec = ReportRecord::new("certify-universal-probe", json!({"m": m, "slot_order": order}), to_json(&r), "finding", "");
            Ok(Outcome::report(summary, vec![rec]))
        }
        CertifyCmd::SzarekProbe { p, n, samples } => {
            let seed = need_seed(g)?;
            let r = szarek_probe(*p, *n, *samples, seed)?;
            let head = format!("max ratio {} of {}", fmt_num(r.max_ratio), fmt_num(r.target));
            let rec = ReportRecord::new(
                "certify-szarek-probe",
                json!({"p": p, "n": n, "samples": samples, "seed": seed}),
                to_json(&r),
                "finding",
                "",
            );
            Ok(Outcome::report(vec![head], vec![rec]))
        }
    }
}

fn constants(cmd: &ConstantsCmd, g: &Global) -> Result<Outcome> {
    let one = |task: &str, inputs: Value, value: f64| {
        Ok(Outcome::report(
            vec![fmt_num(value)],
            vec![ReportRecord::new(task, inputs, json!({ "value": value }), "computed", "")],
        ))
    };
    match cmd {
        ConstantsCmd::Khinchin { p } => one("constants-khinchin", json!({"p": p}), khinchin_a(*p)?),
        ConstantsCmd::P0 => one("constants-p0", json!({"tol": g.tol}), khinchin_p0(g.tol.min(1e-12))),
        ConstantsCmd::Upper { m, field } => match field {
            Field::Real => one("constants-upper", json!({"m": m, "field": "real"}), bh_upper_real(*m)),
            Field::Complex => one("constants-upper", json!({"m": m, "field": "complex"}), bh_upper_complex(*m)),
        },
        ConstantsCmd::HlLower { m, p } => {
            one("constants-hl-lower", json!({"m": m, "p": p.to_string()}), hl_lower_bound(*m, *p)?)
        }
        ConstantsCmd::EntropyLower { m, p } => {
            one("constants-entropy-lower", json!({"m": m, "p": p.to_string()}), hl_entropy_lower(*m, *p)?)
        }
        ConstantsCmd::Table { m, p } => {
            let rows = table(*m, *p)?;
            let summary = rows.iter().map(|r| format!("{} {}", r.formula_id, fmt_num(r.value))).collect();
            let records = rows
                .iter()
                .map(|r| {
                    ReportRecord::new(
                        "constants-table",
                        json!({"formula_id": r.formula_id, "m": r.m, "p": r.p}),
                        json!({"value": r.value, "note": r.note}),
                        "computed",
                        "",
                    )
                })
                .collect();
            Ok(Outcome::report(summary, records))
        }
    }
}
