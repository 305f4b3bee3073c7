//! Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Criteria listed in `KNOWN_RED` are expected to fail; the run aborts if one of them
//! starts passing (or if anything else fails).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ri_copoly::exec::Exec;
use ri_copoly::harness::{run_suite, run_table, Check, SuiteReport, TableReport, TABLE_TOL};

/// Table columns that do not reproduce with the stated family data.
const KNOWN_RED: [&str; 2] = ["1/T2", "1/T3"];

struct Line {
    id: String,
    pass: bool,
    text: String,
}

fn table_line(r: &TableReport, elapsed: Duration) -> Line {
    let dev = r.columns.iter().map(|c| c.max_abs_dev).fold(0.0, f64::max);
    let fast = elapsed < Duration::from_secs(1);
    let mut text = format!(
        "{} {} P_{}: max |dev| {:.2e} (tol {:.0e}), level {} (printed {}), {:.1} ms",
        r.id,
        r.family,
        r.degree,
        dev,
        TABLE_TOL,
        r.resolved_level,
        r.stated_level,
        elapsed.as_secs_f64() * 1e3
    );
    for c in r.columns.iter().filter(|c| !c.pass) {
        let rows: Vec<String> = c.offending.iter().map(|(i, g, x)| format!("row {i}: {g} vs {x:.10}")).collect();
        text.push_str(&format!("\n      [{}] {}", c.label, rows.join("; ")));
    }
    if let Some(d) = &r.diagnostic {
        text.push_str(&format!("\n      diagnostic, {}: max |dev| {:.2e}", d.description, d.max_abs_dev));
    }
    let cols_ok = r.columns.iter().all(|c| c.pass);
    Line { id: format!("1/{}", r.id), pass: cols_ok && fast, text }
}

fn interlacing_line(r: &TableReport) -> Line {
    let want = r.expected_interlacing.clone().unwrap_or_default();
    let got = r.interlacing.clone().unwrap_or_default();
    let mut pass = want == got;
    let mut text = format!("{}: pattern {got} (expected {want})", r.id);
    if r.id == "T1" {
        pass &= r.common_zeros == Some(0);
        text.push_str(&format!(", {} common zeros", r.common_zeros.unwrap_or(usize::MAX)));
    }
    if r.id == "T5" {
        let neg = r.columns[1].computed.first().copied().unwrap_or(f64::NAN);
        pass &= (neg - -0.1627959860).abs() <= TABLE_TOL;
        text.push_str(&format!(", negative zero {neg:.10}"));
    }
    Line { id: format!("2/{}", r.id), pass, text }
}

fn checks_line(id: &str, what: &str, checks: &[&Check]) -> Line {
    let failed: Vec<&&Check> = checks.iter().filter(|c| !c.pass).collect();
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let mut text = format!("{what}: {}/{} checks, max residual {worst:e}", checks.len() - failed.len(), checks.len());
    for c in failed.iter().take(5) {
        text.push_str(&format!("\n      {} | {} | {}", c.name, c.subject, c.detail));
    }
    Line { id: id.into(), pass: !checks.is_empty() && failed.is_empty(), text }
}

fn named(r: &SuiteReport, pred: impl Fn(&str) -> bool) -> Vec<&Check> {
    r.checks.iter().filter(|c| pred(&c.name)).collect()
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let exec = Exec::default();

    for id in ["T1", "T2", "T3", "T4", "T5"] {
        let start = Instant::now();
        let r = run_table(id).expect("table runs");
        lines.push(table_line(&r, start.elapsed()));
        if r.expected_interlacing.is_some() {
            lines.push(interlacing_line(&r));
        }
        if let Some(m) = r.monotone {
            let dir = if id == "T3" { "increasing" } else { "decreasing" };
            lines.push(Line {
                id: format!("1/{id}/monotone"),
                pass: m,
                text: format!("{id}: zeros {dir} across columns"),
            });
        }
    }

    let all = |c: &str| !c.is_empty();
    let rep = run_suite("representation", exec).unwrap();
    lines.push(checks_line(
        "3",
        "represented = direct, builtins, k <= 5, n <= 12 (pole-free), three kinds",
        &named(&rep, all),
    ));
    let tr = run_suite("transfer", exec).unwrap();
    lines.push(checks_line("4", "transfer identity and cof(M_k) ~ full homography, exact", &named(&tr, all)));
    let zs = run_suite("zeros", exec).unwrap();
    lines.push(checks_line(
        "4/zeros",
        "co-recursive interlacing by sign(mu); common zeros in P_k / S_k, exact",
        &named(&zs, |n| n.starts_with("co-recursive") || n.starts_with("common zeros")),
    ));
    let st = run_suite("stieltjes", exec).unwrap();
    lines.push(checks_line("5", "truncation laws, m <= 8, 3 screened rational points, exact", &named(&st, all)));
    lines.push(checks_line(
        "6",
        "Casoratti identities, n <= 10, k <= 4, exact",
        &named(&zs, |n| n.starts_with("Casoratti")),
    ));
    lines.push(checks_line("7", "zero lemma, n <= 10, backward error <= 1e-10", &named(&zs, |n| n == "zero lemma")));
    let start = Instant::now();
    let toda = run_suite("toda", exec).unwrap();
    let toda_time = start.elapsed();
    let mut l8 = checks_line("8", "Toda order 2 +- 0.3, locality, RK4 <= 1e-6", &named(&toda, all));
    l8.pass &= toda_time < Duration::from_secs(10);
    l8.text.push_str(&format!(", {:.2} s", toda_time.as_secs_f64()));
    lines.push(l8);
    let ch = run_suite("chain", exec).unwrap();
    lines.push(checks_line(
        "9",
        "chain sequences: minimal, maximal (1e-8), Verblunsky, degeneration, delta",
        &named(&ch, all),
    ));
    lines.push(checks_line(
        "10",
        "hypergeometric representation, n <= 8, 5 points, exact",
        &named(&zs, |n| n.starts_with("hypergeometric")),
    ));

    let mut ok = true;
    for l in &lines {
        let red = KNOWN_RED.contains(&l.id.as_str());
        let tag = match (l.pass, red) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (expected red)",
        };
        println!("[{tag}] {} {}", l.id, l.text);
        ok &= l.pass != red;
    }
    let green = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {green}/{} lines pass, {} known red", lines.len(), KNOWN_RED.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
