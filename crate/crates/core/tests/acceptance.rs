//! Acceptance suite: one line per criterion with its outcome and runtime.
//! Run with `cargo test --test acceptance`.

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bhlab::certify::{certify_bh_ratio, certify_mixed_lower, Verdict};
use bhlab::constants::{
    bh_upper_complex, hl_entropy_lower, khinchin_a, khinchin_gamma_branch, khinchin_p0, khinchin_power_branch,
};
use bhlab::entropy::{classify_bilinear_extremum, nt_check, nt_probe, ratio, unimodular_classes, Classification, SignPattern};
use bhlab::exact::Radical;
use bhlab::forms::{gen_sm, gen_t2};
use bhlab::hypercube_norm::{sup_norm_exact, DEFAULT_BUDGET};
use bhlab::lp_norm::{clarkson_sup, sup_norm_lp, LpOptions, PExponent};
use bhlab::mixed_norms::ExponentTuple;
use bhlab::{MonomialTerm, MultilinearForm};
use num::{BigInt, BigRational, One};
use proptest::strategy::Strategy;
use proptest::test_runner::TestRunner;
use rayon::prelude::*;
use statrs::consts::EULER_MASCHERONI;

use common::config;
use common::suites::*;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pow2(e: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

fn artifact_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&dir).expect("artifact directory");
    dir
}

fn strategic_norms() -> Outcome {
    let mut seen = Vec::new();
    for (m, expect) in [(2, 2), (3, 4), (4, 8), (5, 16)] {
        let r = sup_norm_exact(&gen_sm(m).unwrap(), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let v = r.exact_value.ok_or("no exact value")?;
        ensure(v == BigRational::from_integer(BigInt::from(expect)), format!("|S{m}| = {v}, expected {expect}"))?;
        seen.push(v.to_string());
    }
    Ok(format!("|S2..S5| = {}", seen.join(", ")))
}

fn mixed_sharp() -> Outcome {
    for m in 2..=5 {
        let c = certify_mixed_lower(m, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let sq = c.ratio_radical.as_ref().and_then(|r| r.pow_to_rational(2)).ok_or("ratio not exact")?;
        ensure(sq == pow2(m - 1), format!("m = {m}: ratio^2 = {sq}"))?;
        ensure(c.verdict == Some(Verdict::Meets), format!("m = {m}: verdict {:?}", c.verdict))?;
    }
    Ok("ratio^2 = 2^(m-1) exactly for m = 2..5".into())
}

fn bh_restricted() -> Outcome {
    for m in 2..=5 {
        let c = certify_bh_ratio(m, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let pw = c.ratio_radical.as_ref().and_then(|r| r.pow_to_rational(m as u32)).ok_or("ratio not exact")?;
        ensure(pw == pow2(m - 1), format!("m = {m}: ratio^m = {pw}"))?;
        ensure(c.verdict == Some(Verdict::Meets), format!("m = {m}: verdict {:?}", c.verdict))?;
    }
    Ok("ratio^m = 2^(m-1) exactly for m = 2..5".into())
}

fn khinchin() -> Outcome {
    let p0 = khinchin_p0(1e-15);
    ensure((p0 - 1.8474).abs() <= 1e-4, format!("p0 = {p0}"))?;
    let a2 = khinchin_a(2.0).map_err(|e| e.to_string())?;
    ensure((a2 - 1.0).abs() <= 1e-10, format!("A_2 = {a2}"))?;
    let jump = (khinchin_gamma_branch(p0) - khinchin_power_branch(p0)).abs();
    ensure(jump <= 1e-8, format!("branch jump {jump:e}"))?;
    Ok(format!("p0 = {p0:.10}, A_2 = {a2}, jump {jump:.1e}"))
}

fn complex_product() -> Outcome {
    let c2 = bh_upper_complex(2);
    let expect = 2.0 / std::f64::consts::PI.sqrt();
    ensure((c2 - expect).abs() <= 1e-10, format!("C_2 = {c2}, expected {expect}"))?;
    let slope = (bh_upper_complex(64).ln() - bh_upper_complex(16).ln()) / (64f64.ln() - 16f64.ln());
    let target = (1.0 - EULER_MASCHERONI) / 2.0;
    ensure((slope - target).abs() <= 0.02, format!("slope {slope} vs {target}"))?;
    Ok(format!("C_2 = {c2:.12}, slope {slope:.5} vs {target:.5}"))
}

fn hardy_littlewood() -> Outcome {
    let lp = sup_norm_lp(&gen_t2(), PExponent::int(4), &LpOptions::new(1)).map_err(|e| e.to_string())?.value;
    let (cl, _) = clarkson_sup(PExponent::int(4), 1e-12).map_err(|e| e.to_string())?;
    ensure((lp - cl).abs() <= 1e-6, format!("|T2|_4 = {lp}, clarkson {cl}"))?;
    let mut worst = 0.0f64;
    for m in 2..=3 {
        let v = hl_entropy_lower(m, PExponent::int(100_000_000)).map_err(|e| e.to_string())?;
        let lim = 4f64.powi(m as i32 - 1);
        let rel = (v - lim).abs() / lim;
        ensure(rel <= 1e-6, format!("m = {m}: {v} vs {lim} (relative {rel:e})"))?;
        worst = worst.max(rel);
    }
    Ok(format!("|T2|_4 = {lp:.12} vs {cl:.12}; entropy bound at p = 1e8 within {worst:.1e} of 4^(m-1)"))
}

fn all_grid_forms() -> Vec<MultilinearForm> {
    let mut out = Vec::new();
    for support in 1u32..(1 << 9) {
        let k = support.count_ones();
        if k > 6 {
            continue;
        }
        let cells: Vec<[u32; 2]> = (0..9).filter(|c| support >> c & 1 == 1).map(|c| [c / 3 + 1, c % 3 + 1]).collect();
        for signs in 0u32..(1 << k) {
            let terms = cells
                .iter()
                .enumerate()
                .map(|(i, c)| MonomialTerm::new(c.to_vec(), if signs >> i & 1 == 1 { -1 } else { 1 }))
                .collect();
            out.push(MultilinearForm::from_terms(2, terms).unwrap());
        }
    }
    out
}

fn classification_oracle() -> Outcome {
    let classes = unimodular_classes(&[3, 3], 6, 1 << 40).map_err(|e| e.to_string())?.len();
    let forms = all_grid_forms();
    let sqrt2 = Radical::pow2(1, 2);
    let exps = ExponentTuple::bh(2);
    let results: Vec<Result<(bool, Radical), String>> = forms
        .par_iter()
        .map(|f| {
            let r = ratio(f, &exps, None, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let exact = r.ratio_radical.ok_or("ratio not exact")?;
            let verdict =
                matches!(classify_bilinear_extremum(f, 1e-12).map_err(|e| e.to_string())?, Classification::Extremal(_));
            ensure(verdict == (exact == sqrt2), format!("classifier says {verdict}, ratio {exact} for {}", f.to_json_string()))?;
            ensure(exact <= sqrt2, format!("ratio {exact} exceeds sqrt 2"))?;
            Ok((verdict, exact))
        })
        .collect();
    let mut extremal = 0;
    let mut best: Option<Radical> = None;
    for r in results {
        let (verdict, exact) = r?;
        extremal += usize::from(verdict);
        if best.as_ref().is_none_or(|b| exact > *b) {
            best = Some(exact);
        }
    }
    let best = best.ok_or("empty enumeration")?;
    ensure(best == sqrt2, format!("max ratio {best}"))?;
    Ok(format!("{} forms ({classes} symmetry classes), {extremal} extremal, max ratio {best}", forms.len()))
}

fn nt_inequality() -> Outcome {
    let mut lines = Vec::new();
    for m in 2..=4 {
        let r = nt_check(&SignPattern::from_form(&gen_sm(m).unwrap()).unwrap(), DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?;
        ensure(r.holds && r.gap.abs() < 1e-12, format!("S{m}: gap {}", r.gap))?;
    }
    let mut reports = Vec::new();
    for (m, n, seed) in [(2, 4, 2024), (3, 3, 2025)] {
        let r = nt_probe(m, n, 10_000, seed, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        lines.push(format!("({m},{n}): {} violations, min gap {:.3e}", r.violations.len(), r.min_gap));
        reports.push(r);
    }
    let path = artifact_dir().join("nt_findings.json");
    fs::write(&path, serde_json::to_string_pretty(&reports).unwrap()).map_err(|e| e.to_string())?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    ensure(violations == 0, format!("{violations} violations recorded in {}", path.display()))?;
    Ok(format!("S2..S4 equality; {}; findings at {}", lines.join("; "), path.display()))
}

fn run_suite<S: Strategy>(
    name: &str,
    seed: u64,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(config(1000, seed));
    runner.run(&strategy, check).map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    run_suite("l2 bound", 0x9e37, l2_forms(), |f| l2_bound(&f))?;
    run_suite("interchange", 0x7a11, interchange_inputs(), |(f, p, q)| interchange(&f, p, q))?;
    run_suite("sqrt k", 0x51ab, holder_forms(), |f| holder_sqrt_k(&f))?;
    run_suite("restricted sqrt K", 0xc0de, restricted_inputs(), |(k, f)| restricted_sqrt_k(k, &f))?;
    run_suite("order independence", 0x0dd5, order_inputs(), |(f, perm, q)| order_independent(&f, &perm, q))?;
    Ok("5 suites x 1000 cases, no violations".into())
}

fn cli(dir: &Path, threads: &str, args: &[&str], out: &str) -> Result<Vec<u8>, String> {
    let path = dir.join(format!("{out}.t{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_bhlab"))
        .args(args)
        .args(["--threads", threads, "-o"])
        .arg(&path)
        .env_remove("BHLAB_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))?;
    fs::read(&path).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = artifact_dir().join("determinism");
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let s3 = dir.join("s3.json");
    let t2 = dir.join("t2.json");
    let rnd = dir.join("random.json");
    let pat = dir.join("pattern.json");
    cli(&dir, "1", &["gen", "sm", "--m", "3"], "s3")?;
    fs::copy(dir.join("s3.t1"), &s3).map_err(|e| e.to_string())?;
    cli(&dir, "1", &["gen", "t2"], "t2")?;
    fs::copy(dir.join("t2.t1"), &t2).map_err(|e| e.to_string())?;
    cli(&dir, "1", &["gen", "random", "--m", "3", "--dims", "3,3,3", "--terms", "12", "--seed", "7"], "rnd")?;
    fs::copy(dir.join("rnd.t1"), &rnd).map_err(|e| e.to_string())?;
    fs::write(&pat, SignPattern::from_form(&gen_sm(3).unwrap()).unwrap().to_json_string()).map_err(|e| e.to_string())?;
    let (s3, t2, rnd, pat) = (s3.to_str().unwrap(), t2.to_str().unwrap(), rnd.to_str().unwrap(), pat.to_str().unwrap());
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("gen-random", vec!["gen", "random", "--m", "3", "--dims", "3,3,3", "--terms", "12", "--seed", "7"]),
        ("gen-tmp", vec!["gen", "tmp", "--m", "3"]),
        ("norm-exact", vec!["norm", "--form", rnd, "--mode", "exact"]),
        ("norm-heuristic", vec!["norm", "--form", rnd, "--mode", "heuristic", "--seed", "3"]),
        ("norm-lp", vec!["norm", "--form", rnd, "--mode", "lp", "--p", "3", "--seed", "3"]),
        ("mixed-sum", vec!["mixed-sum", "--form", s3, "--exponents", "2,2,1", "--order", "2,3,1", "--format", "csv"]),
        ("ratio", vec!["ratio", "--form", rnd, "--exponents", "3/2,3/2,3/2"]),
        ("certify-mixed", vec!["certify", "mixed-lower", "--m", "4"]),
        ("certify-bh", vec!["certify", "bh-ratio", "--m", "4", "--format", "csv"]),
        ("certify-restricted", vec!["certify", "restricted", "--m", "3", "--k", "2", "--samples", "300", "--seed", "5"]),
        ("certify-interp", vec!["certify", "interp", "--form", s3, "--family", "k-family"]),
        ("certify-universal", vec!["certify", "universal-probe", "--form", t2, "--form", t2]),
        ("certify-szarek", vec!["certify", "szarek-probe", "--n", "8", "--samples", "300", "--seed", "9"]),
        ("entropy-complexity", vec!["entropy", "complexity", "--form", s3]),
        ("entropy-search", vec!["entropy", "search", "--exponents", "2,1", "--dims", "3,3", "--max-terms", "4"]),
        ("classify", vec!["classify", "--form", t2]),
        ("nt-check", vec!["nt-check", "--pattern", pat]),
        ("nt-probe", vec!["nt-check", "--m", "3", "--n", "3", "--samples", "2000", "--seed", "4"]),
        ("constants", vec!["constants", "table", "--m", "4", "--p", "10", "--format", "csv"]),
        ("p0", vec!["constants", "p0"]),
    ];
    for (name, args) in &runs {
        let a = cli(&dir, "1", args, name)?;
        let b = cli(&dir, "4", args, name)?;
        ensure(!a.is_empty(), format!("{name}: empty report"))?;
        ensure(a == b, format!("{name}: reports differ between 1 and 4 threads"))?;
    }
    Ok(format!("{} invocations byte-identical at 1 and 4 threads", runs.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "strategic-form norms", Duration::from_secs(10), strategic_norms),
        (2, "mixed sharp constants", Duration::from_secs(30), mixed_sharp),
        (3, "restricted BH constant", Duration::from_secs(30), bh_restricted),
        (4, "Khinchin constants", Duration::MAX, khinchin),
        (5, "complex upper-bound product", Duration::MAX, complex_product),
        (6, "Hardy-Littlewood values", Duration::MAX, hardy_littlewood),
        (7, "bilinear classifier vs ratio oracle", Duration::from_secs(300), classification_oracle),
        (8, "NT inequality", Duration::from_secs(600), nt_inequality),
        (9, "property suites", Duration::MAX, property_suites),
        (10, "CLI determinism across threads", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:.0?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
