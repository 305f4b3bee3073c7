//! `ri-copoly`: reports for R_I polynomial families, their perturbations and the related
//! Toda and chain-sequence machinery. Exit status is 0 iff every check in the run passed,
//! 1 when a check failed and 2 on usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{One, Zero};
use serde_json::{json, Value};

use ri_copoly::chainseq::{
    analyze, complementary, delta_from_chain, eta_chain_f64, eta_family, half_quarter_chain, minimal_parameters,
    perturbed_delta, quarter_chain, szego_from_chain, szego_from_delta, ChainSequence, VerblunskySeq,
};
use ri_copoly::exec::Exec;
use ri_copoly::family::FamilySpec;
use ri_copoly::harness::{pattern_name, run_suite, run_table};
use ri_copoly::perturbation::{
    apply_all, parse_perturbations, perturbed_family_direct, perturbed_family_represented, s_polynomials,
};
use ri_copoly::recurrence::{generate_family, generate_second_kind};
use ri_copoly::scalar::{parse_rational, Rational, RealScalar};
use ri_copoly::stieltjes::{admissible_point, convergent, pointwise_laws, ri_fraction, screen_point};
use ri_copoly::toda::{
    affected_levels, coeffs_from_moments, coeffs_from_moments_exact, integrate_flow, toda_rhs, verify_flow,
    DiscreteMeasure, PerturbationSchedule, ScheduleValues, TodaParams,
};
use ri_copoly::zeros::{common_zero_check, interlacing_report, real_zeros_exact, COMMON_TOL};
use ri_copoly::{CoefficientSequences, Perturbation, Poly};

#[derive(Parser)]
#[command(
    name = "ri-copoly",
    version,
    about = "R_I polynomial families, perturbations, zeros, Toda flows and chain sequences"
)]
struct Cli {
    /// Arithmetic: exact rationals or f64. Defaults to rational, or float for zeros/interlace/toda.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Float tolerance for identity checks.
    #[arg(long, global = true, env = "RI_COPOLY_PRECISION", default_value_t = 1e-10)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Allow rational mode for toda by restricting it to exact algebraic checks.
    #[arg(long, global = true)]
    algebra_only: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FamilyArgs {
    /// `builtin: example1`, `builtin: ljacobi, a=11, c=12`, `builtin: eta, eta=1, t=0`
    /// or `c=[..], lambda=[..], a=[..]`.
    #[arg(long, default_value = "builtin: example1")]
    family: String,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomials P_0..P_n (and optionally Q_0..Q_n).
    Family {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long)]
        second_kind: bool,
    },
    /// Perturbed family: direct recurrence vs. representation through unperturbed polynomials.
    Perturb {
        #[command(flatten)]
        fam: FamilyArgs,
        /// `k=3,mu=-1/2,nu=2`; several separated by `;` (direct recurrence only).
        #[arg(long)]
        perturb: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Real zeros of P_n and, with --perturb, of the perturbed P_n.
    Zeros {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        perturb: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Merged zero ordering of P_n and the perturbed P_n.
    Interlace {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        perturb: String,
        #[arg(long)]
        n: usize,
    },
    /// Convergents and truncation-law residuals of the perturbed fraction.
    Stieltjes {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        perturb: String,
        /// Tail depth m; the full fractions are taken to depth k + 1 + m.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Evaluation points; repeat or comma-separate. Defaults to screened sample points.
        #[arg(long, value_delimiter = ',')]
        z: Vec<String>,
    },
    /// Toda flow residuals on a discrete measure, and RK4 trajectories.
    Toda {
        /// `nodes=..,weights=..` or `@file` holding that text. Defaults to the six-node measure.
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Highest level checked.
        #[arg(long = "N", default_value_t = 4)]
        levels: usize,
        /// `k,mu,nu` constant perturbation schedule.
        #[arg(long)]
        sched: Option<String>,
        /// `T,steps`: integrate from t0 to T with RK4.
        #[arg(long)]
        integrate: Option<String>,
    },
    /// Chain-sequence parameters, complements, co-dilation and Szegő polynomials.
    Chain {
        /// Comma list d_1,d_2,.. (the last value repeats) or `builtin: quarter`,
        /// `builtin: half-quarter`, `builtin: eta, eta=1, t=0`.
        #[arg(long, default_value = "builtin: half-quarter")]
        d: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        complement: bool,
        /// `k,nu`: co-dilate d_k by nu.
        #[arg(long)]
        perturb_nu: Option<String>,
        /// Build phi_0..phi_N from the (final) chain.
        #[arg(long)]
        szego: Option<usize>,
        /// Start the delta recursion from delta_0 = x.
        #[arg(long, allow_hyphen_values = true)]
        delta0: Option<String>,
    },
    /// Regenerate a zero table (T1..T5) and compare with the printed values.
    Table { id: String },
    /// Run an identity suite over the builtin families.
    Suite {
        name: String,
        #[arg(long)]
        sequential: bool,
    },
}

struct Report {
    body: String,
    pass: bool,
}

fn json_report(v: Value, pass: bool) -> Result<Report> {
    Ok(Report { body: serde_json::to_string_pretty(&v)? + "\n", pass })
}

fn poly_json<S: RealScalar>(p: &Poly<S>) -> Value {
    p.to_json()
}

fn polys_json<S: RealScalar>(ps: &[Poly<S>]) -> Value {
    Value::Array(ps.iter().map(poly_json).collect())
}

fn polys_csv<S: RealScalar>(kind: &str, ps: &[Poly<S>], out: &mut String) {
    for (n, p) in ps.iter().enumerate() {
        for (j, c) in p.coeffs().iter().enumerate() {
            out.push_str(&format!("{kind},{n},{j},{c}\n"));
        }
    }
}

fn single(perturb: &str) -> Result<Perturbation<Rational>> {
    let mut ps = parse_perturbations(perturb)?;
    if ps.len() != 1 {
        bail!("expected exactly one perturbation, got {}", ps.len());
    }
    Ok(ps.remove(0))
}

fn family_cmd(cli: &Cli, spec: &FamilySpec, n: usize, second: bool) -> Result<Report> {
    let seqs = spec.build()?;
    match cli.mode.unwrap_or(Mode::Rational) {
        Mode::Rational => family_report(cli, spec, &seqs, n, second),
        Mode::Float => family_report(cli, spec, &seqs.to_f64(), n, second),
    }
}

fn family_report<S: RealScalar>(
    cli: &Cli,
    spec: &FamilySpec,
    seqs: &CoefficientSequences<S>,
    n: usize,
    second: bool,
) -> Result<Report> {
    let p = generate_family(seqs, n, 0)?;
    let q = if second { Some(generate_second_kind(seqs, n)?) } else { None };
    if cli.format == Some(Format::Csv) {
        let mut body = String::from("kind,n,j,coeff\n");
        polys_csv("P", &p, &mut body);
        if let Some(q) = &q {
            polys_csv("Q", q, &mut body);
        }
        return Ok(Report { body, pass: true });
    }
    json_report(
        json!({
            "family": spec.to_string(),
            "positive_l": seqs.positive_l,
            "P": polys_json(&p),
            "Q": q.as_deref().map(polys_json),
        }),
        true,
    )
}

fn perturb_cmd(cli: &Cli, spec: &FamilySpec, perturb: &str, n: usize) -> Result<Report> {
    let seqs = spec.build()?;
    let perts = parse_perturbations(perturb)?;
    match cli.mode.unwrap_or(Mode::Rational) {
        Mode::Rational => perturb_report(spec, &seqs, &perts, n, 0.0),
        Mode::Float => {
            let fp: Vec<_> = perts.iter().map(|p| p.map(|x| x.to_f64())).collect();
            perturb_report(spec, &seqs.to_f64(), &fp, n, cli.tol)
        }
    }
}

fn perturb_report<S: RealScalar>(
    spec: &FamilySpec,
    seqs: &CoefficientSequences<S>,
    perts: &[Perturbation<S>],
    n: usize,
    tol: f64,
) -> Result<Report> {
    let labels: Vec<String> = perts.iter().map(|p| p.to_string()).collect();
    if let [pert] = perts {
        let direct = perturbed_family_direct(seqs, pert, n)?;
        let rep = perturbed_family_represented(seqs, pert, n)?;
        let agree = direct.iter().zip(&rep).all(|(a, b)| if tol == 0.0 { a == b } else { a.approx_eq(b, tol) });
        let (s, s_hat) = s_polynomials(seqs, pert)?;
        return json_report(
            json!({
                "family": spec.to_string(),
                "perturbations": labels,
                "kind": format!("{:?}", pert.kind()),
                "direct": polys_json(&direct),
                "represented": polys_json(&rep),
                "S_k": poly_json(&s),
                "S_hat_k": poly_json(&s_hat),
                "agree": agree,
            }),
            agree,
        );
    }
    let direct = generate_family(&apply_all(seqs, perts)?, n, 0)?;
    json_report(json!({ "family": spec.to_string(), "perturbations": labels, "direct": polys_json(&direct) }), true)
}

fn require_float(cli: &Cli, what: &str) -> Result<()> {
    if cli.mode == Some(Mode::Rational) {
        bail!("`{what}` needs root-finding and cannot run in rational mode; use --mode float");
    }
    Ok(())
}

fn zeros_cmd(cli: &Cli, spec: &FamilySpec, perturb: Option<&str>, n: usize) -> Result<Report> {
    require_float(cli, "zeros")?;
    let seqs = spec.build()?;
    let mut series = vec![("none".to_string(), generate_family(&seqs, n, 0)?.remove(n))];
    if let Some(p) = perturb {
        let perts = parse_perturbations(p)?;
        let label = perts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
        series.push((label, generate_family(&apply_all(&seqs, &perts)?, n, 0)?.remove(n)));
    }
    let fam = spec.to_string();
    let mut rows = Vec::new();
    for (label, poly) in &series {
        let zs = real_zeros_exact(poly, cli.tol)?;
        for (j, (x, r)) in zs.zeros.iter().zip(&zs.residuals).enumerate() {
            rows.push((label.clone(), j + 1, *x, *r));
        }
    }
    if cli.format == Some(Format::Json) {
        let v: Vec<Value> = rows
            .iter()
            .map(|(p, j, x, r)| json!({"family": fam, "pert": p, "n": n, "j": j, "zero": x, "residual": r}))
            .collect();
        return json_report(Value::Array(v), true);
    }
    let mut body = String::from("family,pert,n,j,zero,residual\n");
    for (p, j, x, r) in rows {
        body.push_str(&format!("\"{fam}\",\"{p}\",{n},{j},{x},{r:e}\n"));
    }
    Ok(Report { body, pass: true })
}

fn interlace_cmd(cli: &Cli, spec: &FamilySpec, perturb: &str, n: usize) -> Result<Report> {
    require_float(cli, "interlace")?;
    let seqs = spec.build()?;
    let pert = single(perturb)?;
    let base = real_zeros_exact(&generate_family(&seqs, n, 0)?[n], cli.tol)?;
    let pm = real_zeros_exact(&perturbed_family_direct(&seqs, &pert, n)?[n], cli.tol)?;
    let rep = interlacing_report(&base, &pm, COMMON_TOL);
    let cz = common_zero_check(&seqs, &pert, n)?;
    // common zeros must be zeros of S_k
    let pass = cz.s_k_values.iter().all(|v| *v <= COMMON_TOL);
    json_report(
        json!({
            "family": spec.to_string(),
            "perturbation": pert.to_string(),
            "n": n,
            "pattern": pattern_name(rep.pattern),
            "common": rep.common,
            "merged": rep.details.iter().map(|(x, s)| json!({"x": x, "source": format!("{s:?}")})).collect::<Vec<_>>(),
            "s_k_at_common": cz.s_k_values,
            "p_k_at_common": cz.p_k_values,
        }),
        pass,
    )
}

fn stieltjes_cmd(cli: &Cli, spec: &FamilySpec, perturb: &str, depth: usize, zs: &[String]) -> Result<Report> {
    let seqs = spec.build()?;
    let pert = single(perturb)?;
    let points: Vec<Rational> = if zs.is_empty() {
        [(7, 3), (-5, 4), (13, 2)]
            .into_iter()
            .map(|(p, q)| screen_point(Rational::new(p.into(), q.into()), |z| admissible_point(&seqs, &pert, z, depth)))
            .collect::<ri_copoly::Result<_>>()?
    } else {
        zs.iter().map(|s| parse_rational(s)).collect::<ri_copoly::Result<_>>()?
    };
    match cli.mode.unwrap_or(Mode::Rational) {
        Mode::Rational => stieltjes_report(spec, &seqs, &pert, depth, &points, 0.0),
        Mode::Float => {
            let fz: Vec<f64> = points.iter().map(|z| z.to_f64()).collect();
            stieltjes_report(spec, &seqs.to_f64(), &pert.map(|x| x.to_f64()), depth, &fz, cli.tol)
        }
    }
}

fn stieltjes_report<S: RealScalar>(
    spec: &FamilySpec,
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    depth: usize,
    points: &[S],
    tol: f64,
) -> Result<Report> {
    let ps = apply_all(seqs, std::slice::from_ref(pert))?;
    let mut pass = true;
    let mut out = Vec::new();
    for z in points {
        let conv: Vec<String> = (1..=pert.k + 1 + depth)
            .map(|d| convergent(&ri_fraction(&ps), z, d).map(|v| v.to_string()))
            .collect::<ri_copoly::Result<_>>()?;
        let laws = pointwise_laws(seqs, pert, z, depth)?;
        pass &= laws.iter().all(|(_, _, r)| *r <= tol);
        out.push(json!({
            "z": z.to_string(),
            "perturbed_convergents": conv,
            "residuals": laws.iter().map(|(l, m, r)| json!({"law": l, "depth": m, "residual": r})).collect::<Vec<_>>(),
        }));
    }
    json_report(json!({"family": spec.to_string(), "perturbation": pert.to_string(), "points": out}), pass)
}

fn parse_measure(arg: Option<&str>) -> Result<DiscreteMeasure> {
    Ok(match arg {
        None => DiscreteMeasure::six_node(),
        Some(s) => match s.strip_prefix('@') {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading measure file {path}"))?;
                DiscreteMeasure::parse(text.trim())?
            }
            None => DiscreteMeasure::parse(s)?,
        },
    })
}

struct TodaRun<'a> {
    measure: Option<&'a str>,
    params: TodaParams,
    h: f64,
    levels: usize,
    sched: Option<&'a str>,
    integrate: Option<&'a str>,
}

/// Exact checks only: reduction under the identity schedule and level locality at t = 0.
fn toda_algebra(run: &TodaRun) -> Result<Report> {
    let m = parse_measure(run.measure)?;
    let frame = coeffs_from_moments_exact(&m, &TodaParams { t: 0.0, ..run.params }, m.len())?.closed();
    let mut checks = Vec::new();
    let mut pass = true;
    let (k, mu, nu) = match run.sched {
        Some(s) => {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                bail!("schedule must be k,mu,nu");
            }
            (parts[0].parse::<usize>()?, parse_rational(parts[1])?, parse_rational(parts[2])?)
        }
        None => (1, Rational::zero(), Rational::one()),
    };
    let id = ScheduleValues::identity(k);
    let sv = ScheduleValues { k, mu, nu, mu_dot: Rational::zero(), nu_dot: Rational::zero() };
    let (c_aff, l_aff) = affected_levels(k);
    for n in 1..=run.levels.min(m.len()) {
        let plain = toda_rhs(&frame, &run.params, None, n)?;
        let reduced = toda_rhs(&frame, &run.params, Some(&id), n)?;
        let pert = toda_rhs(&frame, &run.params, Some(&sv), n)?;
        let reduction = plain == reduced;
        let local_c = c_aff.contains(&n) || pert.0 == plain.0;
        let local_l = l_aff.contains(&n) || pert.1 == plain.1;
        pass &= reduction && local_c && local_l;
        checks.push(json!({"n": n, "reduction": reduction, "locality_c": local_c, "locality_lambda": local_l}));
    }
    json_report(json!({"mode": "rational", "k": k, "checks": checks}), pass)
}

fn toda_cmd(cli: &Cli, run: TodaRun) -> Result<Report> {
    if cli.mode == Some(Mode::Rational) {
        if !cli.algebra_only {
            bail!("`toda` needs exponentials; use --mode float, or --algebra-only for the exact checks");
        }
        return toda_algebra(&run);
    }
    let m = parse_measure(run.measure)?;
    let sched = run.sched.map(PerturbationSchedule::parse).transpose()?;
    let report = verify_flow(&m, run.params, sched.as_ref(), run.params.t, run.h, run.levels)?;
    let order_ok = |o: f64| (o - 2.0).abs() <= 0.3;
    let mut pass = order_ok(report.order) && report.locality;
    if let Some(po) = report.perturbed_order {
        pass &= order_ok(po);
    }
    let traj = match run.integrate {
        Some(spec) => {
            let (t_end, steps) = spec.split_once(',').ok_or_else(|| anyhow!("--integrate expects T,steps"))?;
            let (t_end, steps): (f64, usize) = (t_end.trim().parse()?, steps.trim().parse()?);
            let mut f0 = coeffs_from_moments(&m, &run.params, m.len())?;
            if let Some(s) = &sched {
                f0 = f0.unhat(&s.at(run.params.t)?)?;
            }
            Some(integrate_flow(&f0, &run.params, sched.as_ref(), t_end, steps)?)
        }
        None => None,
    };
    if cli.format == Some(Format::Csv) {
        let t = traj.ok_or_else(|| anyhow!("--format csv needs --integrate"))?;
        return Ok(Report { body: t.to_csv(), pass });
    }
    json_report(json!({"flow": report, "trajectory": traj}), pass)
}

enum ChainSpec {
    List(Vec<Rational>),
    Quarter,
    HalfQuarter,
    Eta(Rational, Rational),
}

impl ChainSpec {
    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("builtin:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            return Ok(match parts[0] {
                "quarter" => ChainSpec::Quarter,
                "half-quarter" => ChainSpec::HalfQuarter,
                "eta" => {
                    let mut eta = None;
                    let mut t = Rational::zero();
                    for kv in &parts[1..] {
                        match kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                            Some(("eta", v)) => eta = Some(parse_rational(v)?),
                            Some(("t", v)) => t = parse_rational(v)?,
                            _ => bail!("unexpected eta parameter {kv:?}"),
                        }
                    }
                    ChainSpec::Eta(eta.ok_or_else(|| anyhow!("eta builtin needs eta=..."))?, t)
                }
                other => bail!("unknown chain builtin `{other}`"),
            });
        }
        let v = s.split(',').map(|t| parse_rational(t.trim())).collect::<ri_copoly::Result<Vec<_>>>()?;
        if v.is_empty() {
            bail!("empty chain sequence");
        }
        Ok(ChainSpec::List(v))
    }

    fn exact(&self) -> Result<ChainSequence<Rational>> {
        Ok(match self {
            ChainSpec::List(v) => repeat_last(v.clone(), |x| x.clone()),
            ChainSpec::Quarter => quarter_chain(),
            ChainSpec::HalfQuarter => half_quarter_chain(),
            ChainSpec::Eta(eta, t) => eta_family(eta, t)?.0,
        })
    }

    fn float(&self) -> ChainSequence<f64> {
        match self {
            ChainSpec::List(v) => repeat_last(v.clone(), |x| x.to_f64()),
            ChainSpec::Quarter => quarter_chain(),
            ChainSpec::HalfQuarter => half_quarter_chain(),
            ChainSpec::Eta(eta, t) => eta_chain_f64(eta.to_f64(), t.to_f64()),
        }
    }
}

fn repeat_last<S: RealScalar>(v: Vec<Rational>, f: impl Fn(&Rational) -> S) -> ChainSequence<S> {
    let vals: Vec<S> = v.iter().map(f).collect();
    let label = format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    ChainSequence::from_rule(move |n| Ok(vals[(n - 1).min(vals.len() - 1)].clone()), label)
}

struct ChainRun<'a> {
    d: &'a str,
    n: usize,
    complement: bool,
    perturb_nu: Option<&'a str>,
    szego: Option<usize>,
    delta0: Option<&'a str>,
}

fn chain_cmd(cli: &Cli, run: ChainRun) -> Result<Report> {
    let spec = ChainSpec::parse(run.d)?;
    let nu = match run.perturb_nu {
        Some(s) => {
            let (k, nu) = s.split_once(',').ok_or_else(|| anyhow!("--perturb-nu expects k,nu"))?;
            Some((k.trim().parse::<usize>()?, parse_rational(nu.trim())?))
        }
        None => None,
    };
    match cli.mode.unwrap_or(Mode::Rational) {
        Mode::Rational => chain_report(&run, spec.exact()?, spec.float(), nu, |x| x.clone()),
        Mode::Float => chain_report(&run, spec.float(), spec.float(), nu, |x| x.to_f64()),
    }
}

fn strs<S: RealScalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn chain_report<S: RealScalar>(
    run: &ChainRun,
    d: ChainSequence<S>,
    df: ChainSequence<f64>,
    nu: Option<(usize, Rational)>,
    conv: impl Fn(&Rational) -> S,
) -> Result<Report> {
    let n = run.n;
    let terms = |c: &ChainSequence<S>| -> Result<Vec<String>> {
        Ok((1..=n).map(|j| c.d(j).map(|x| x.to_string())).collect::<ri_copoly::Result<_>>()?)
    };
    let mut out = serde_json::Map::new();
    out.insert("chain".into(), json!(d.label));
    out.insert("d".into(), json!(terms(&d)?));
    let (mut chain, mut chain_f) = (d.clone(), df);
    if let Some((k, nu)) = &nu {
        chain = chain.co_dilate(*k, conv(nu))?;
        chain_f = chain_f.co_dilate(*k, nu.to_f64())?;
        out.insert("co_dilated".into(), json!(terms(&chain)?));
    }
    let a = analyze(&chain_f, n)?;
    out.insert("minimal".into(), json!(strs(&minimal_parameters(&chain, n)?)));
    out.insert("maximal".into(), json!(a.maximal));
    out.insert("sppcs".into(), json!(a.sppcs));
    out.insert("gap".into(), json!(a.gap));
    if run.complement {
        chain = complementary(&chain, n + 1)?;
        out.insert("complement".into(), json!(terms(&chain)?));
        out.insert("complement_minimal".into(), json!(strs(&minimal_parameters(&chain, n)?)));
    }
    if let Some(sz) = run.szego {
        let fam = szego_from_chain(&S::zero(), &chain, sz)?;
        out.insert("phi".into(), Value::Array(fam.phi.iter().map(|p| p.to_json()).collect()));
        out.insert("verblunsky".into(), json!(fam.verblunsky.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
    }
    let mut pass = true;
    if let Some(x) = run.delta0 {
        let delta0 = conv(&parse_rational(x)?);
        if delta0.is_zero() {
            bail!("delta_0 must be nonzero");
        }
        let two = S::one() + S::one();
        let four = two.clone() * two.clone();
        let delta1 = (S::one() - four * d.d(1)?) / (two * delta0.clone());
        let v = delta_from_chain(delta1, &d, n)?;
        pass &= v.checks.iter().all(|c| c.condition && c.product_form);
        out.insert("delta".into(), json!(strs(&[std::slice::from_ref(&delta0), &v.delta[..]].concat())));
        out.insert("delta_checks".into(), json!(v.checks));
        let (phi, _) = szego_from_delta(&v.delta, n)?;
        out.insert("phi_from_delta".into(), Value::Array(phi.iter().map(|p| p.to_json()).collect()));
        if let Some((k, nu)) = &nu {
            let pd = perturbed_delta(&VerblunskySeq::explicit(v.delta.clone()), &d, *k, conv(nu), n)?;
            out.insert("perturbed_delta".into(), json!(strs(&pd.delta)));
        }
    }
    json_report(Value::Object(out), pass)
}

fn table_cmd(id: &str) -> Result<Report> {
    let r = run_table(id)?;
    let pass = r.pass;
    json_report(serde_json::to_value(r)?, pass)
}

fn suite_cmd(name: &str, sequential: bool) -> Result<Report> {
    let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
    let r = run_suite(name, exec)?;
    let pass = r.pass;
    json_report(serde_json::to_value(r)?, pass)
}

fn run(cli: &Cli) -> Result<Report> {
    let fam = |a: &FamilyArgs| FamilySpec::parse(&a.family).map_err(anyhow::Error::from);
    match &cli.cmd {
        Command::Family { fam: f, n, second_kind } => family_cmd(cli, &fam(f)?, *n, *second_kind),
        Command::Perturb { fam: f, perturb, n } => perturb_cmd(cli, &fam(f)?, perturb, *n),
        Command::Zeros { fam: f, perturb, n } => zeros_cmd(cli, &fam(f)?, perturb.as_deref(), *n),
        Command::Interlace { fam: f, perturb, n } => interlace_cmd(cli, &fam(f)?, perturb, *n),
        Command::Stieltjes { fam: f, perturb, depth, z } => stieltjes_cmd(cli, &fam(f)?, perturb, *depth, z),
        Command::Toda { measure, p, q, t0, h, levels, sched, integrate } => toda_cmd(
            cli,
            TodaRun {
                measure: measure.as_deref(),
                params: TodaParams::new(*p, *q, *t0),
                h: *h,
                levels: *levels,
                sched: sched.as_deref(),
                integrate: integrate.as_deref(),
            },
        ),
        Command::Chain { d, n, complement, perturb_nu, szego, delta0 } => chain_cmd(
            cli,
            ChainRun {
                d,
                n: *n,
                complement: *complement,
                perturb_nu: perturb_nu.as_deref(),
                szego: *szego,
                delta0: delta0.as_deref(),
            },
        ),
        Command::Table { id } => table_cmd(id),
        Command::Suite { name, sequential } => suite_cmd(name, *sequential),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &report.body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", report.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
