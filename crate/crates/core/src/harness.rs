//! Table reproduction and identity suites with JSON-serializable reports.

use num::{One, Zero};
use serde::Serialize;

use crate::chainseq::{
    complementary, delta_from_chain, eta_family, half_quarter_chain, maximal_parameters_converged, minimal_parameters,
    perturbed_delta, szego_from_chain, szego_from_delta, VerblunskySeq,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{positive_l_families, FamilySpec};
use crate::perturbation::{
    apply_all, perturbed_family_direct, perturbed_family_represented, s_polynomials, transfer_identity_residual,
    Perturbation,
};
use crate::poly::Poly;
use crate::recurrence::{generate_family, CoefficientSequences};
use crate::scalar::{int, rat, Rational, RealScalar};
use crate::stieltjes::{
    admissible_point, cofactor_transform, full_law_residual, homography_from_full, pointwise_laws, screen_point,
    tail_from_full_residual, tail_law_residual,
};
use crate::toda::{
    coeffs_from_moments, integrate_flow, verify_flow, DiscreteMeasure, PerturbationSchedule, TodaParams,
};
use crate::zeros::{
    backward_errors, casoratti_assoc_residual, common_zero_check, corecursive_casoratti_residual,
    hypergeometric_oracle, interlacing_report, real_zeros_exact, zero_pair, InterlacePattern, ProductStart, ZeroSet,
    COMMON_TOL, DEFAULT_TOL,
};

pub const TABLE_TOL: f64 = 1e-6;
pub const TABLES: [&str; 5] = ["T1", "T2", "T3", "T4", "T5"];
pub const SUITES: [&str; 6] = ["representation", "transfer", "stieltjes", "zeros", "toda", "chain"];
/// Highest perturbation level and degree in the identity grids.
pub const GRID_LEVEL: usize = 5;
pub const GRID_DEGREE: usize = 12;
pub const GRID_DEPTH: usize = 8;

#[derive(Clone, Debug)]
enum Column {
    Base(&'static [f64]),
    /// Co-recursive/co-modified perturbation (mu, nu) at the resolved level.
    Single(Rational, Rational, &'static [f64]),
    /// Co-recursive shifts at the resolved level and the next one.
    Double(Rational, Rational, &'static [f64]),
}

struct TableDef {
    id: &'static str,
    family: FamilySpec,
    degree: usize,
    /// Level as printed next to the table.
    stated_level: usize,
    columns: Vec<Column>,
    interlacing: Option<InterlacePattern>,
    /// Zeros move monotonically across the columns: Some(true) increasing.
    monotone_increasing: Option<bool>,
    /// c_0 override used only for the informational diagnostic.
    diagnostic_c0: Option<Rational>,
}

const T1_BASE: [f64; 6] = [1.049267646, 1.179086731, 1.432298501, 1.918525281, 2.955569922, 5.865251919];
const T1_PERT: [f64; 6] = [0.1082567303, 1.096706355, 1.381373784, 1.828789066, 2.307145896, 5.677728168];
const T2_BASE: [f64; 5] = [0.2275033589, 0.4145169935, 0.5944664499, 0.7482316477, 0.9015129657];
const T2_PERT: [f64; 5] = [0.2372878714, 0.5301738824, 0.6051319225, 0.7803963908, 1.233241348];
const T3_A: [f64; 5] = [0.2999926673, 0.5211303622, 0.7066042795, 0.8409538337, 1.217550273];
const T3_B: [f64; 5] = [0.3132112858, 0.5436842407, 0.7579538961, 0.9413087382, 1.430073255];
const T4_A: [f64; 6] = [1.007621277, 1.133428374, 1.394713267, 1.876397431, 2.846890957, 5.690948695];
const T4_B: [f64; 6] = [0.7796705496, 1.096706319, 1.340698443, 1.745550775, 2.601438104, 5.335935809];
const T5_BASE: [f64; 8] =
    [0.04116240276, 0.1710311797, 0.4069296692, 0.7690388590, 1.261114831, 1.843070331, 2.415792909, 2.841859819];
const T5_PERT: [f64; 8] =
    [-0.1627959860, 0.1516686302, 0.3578291909, 0.6942294338, 1.297084073, 1.771409201, 2.454426431, 2.936149025];

fn table_def(id: &str) -> Result<TableDef> {
    let lj_pos = FamilySpec::LJacobi { a: int(11), c: int(12) };
    let lj_neg = FamilySpec::LJacobi { a: int(-12), c: int(-10) };
    Ok(match id {
        "T1" => TableDef {
            id: "T1",
            family: lj_pos,
            degree: 6,
            stated_level: 4,
            columns: vec![Column::Base(&T1_BASE), Column::Single(int(-2), int(1), &T1_PERT)],
            interlacing: Some(InterlacePattern::BStarts),
            monotone_increasing: None,
            diagnostic_c0: None,
        },
        "T2" => TableDef {
            id: "T2",
            family: lj_neg,
            degree: 5,
            stated_level: 3,
            columns: vec![Column::Base(&T2_BASE), Column::Single(rat(1, 2), int(1), &T2_PERT)],
            interlacing: Some(InterlacePattern::AStarts),
            monotone_increasing: None,
            diagnostic_c0: Some(rat(5, 7)),
        },
        "T3" => TableDef {
            id: "T3",
            family: lj_neg,
            degree: 5,
            stated_level: 3,
            columns: vec![
                Column::Base(&T2_BASE),
                Column::Double(rat(3, 10), rat(2, 5), &T3_A),
                Column::Double(rat(1, 2), rat(3, 5), &T3_B),
            ],
            interlacing: None,
            monotone_increasing: Some(true),
            diagnostic_c0: Some(rat(5, 7)),
        },
        "T4" => TableDef {
            id: "T4",
            family: lj_pos,
            degree: 6,
            stated_level: 3,
            columns: vec![
                Column::Base(&T1_BASE),
                Column::Double(rat(-1, 5), rat(-1, 4), &T4_A),
                Column::Double(rat(-7, 10), rat(-4, 5), &T4_B),
            ],
            interlacing: None,
            monotone_increasing: Some(false),
            diagnostic_c0: None,
        },
        "T5" => TableDef {
            id: "T5",
            family: FamilySpec::Example1,
            degree: 8,
            stated_level: 3,
            columns: vec![Column::Base(&T5_BASE), Column::Single(rat(-1, 2), int(2), &T5_PERT)],
            interlacing: Some(InterlacePattern::Violated),
            monotone_increasing: None,
            diagnostic_c0: None,
        },
        other => return Err(Error::Usage(format!("unknown table `{other}` (expected one of {})", TABLES.join(", ")))),
    })
}

impl Column {
    fn golden(&self) -> &'static [f64] {
        match self {
            Column::Base(g) | Column::Single(_, _, g) | Column::Double(_, _, g) => g,
        }
    }

    fn label(&self, k: usize) -> String {
        match self {
            Column::Base(_) => "unperturbed".into(),
            Column::Single(mu, nu, _) => format!("k={k},mu={mu},nu={nu}"),
            Column::Double(m1, m2, _) => format!("k={k},mu={m1};k={},mu={m2}", k + 1),
        }
    }

    fn perturbations(&self, k: usize) -> Result<Vec<Perturbation<Rational>>> {
        Ok(match self {
            Column::Base(_) => Vec::new(),
            Column::Single(mu, nu, _) => vec![Perturbation::new(k, mu.clone(), nu.clone())?],
            Column::Double(m1, m2, _) => {
                vec![Perturbation::new(k, m1.clone(), int(1))?, Perturbation::new(k + 1, m2.clone(), int(1))?]
            }
        })
    }

    fn zeros(&self, seqs: &CoefficientSequences<Rational>, k: usize, n: usize) -> Result<ZeroSet> {
        let s = apply_all(seqs, &self.perturbations(k)?)?;
        real_zeros_exact(&generate_family(&s, n, 0)?[n], DEFAULT_TOL)
    }
}

fn max_dev(computed: &[f64], golden: &[f64]) -> f64 {
    if computed.len() != golden.len() {
        return f64::INFINITY;
    }
    computed.iter().zip(golden).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnReport {
    pub label: String,
    pub golden: Vec<f64>,
    pub computed: Vec<f64>,
    pub max_abs_dev: f64,
    /// (row, golden, computed) for entries outside tolerance.
    pub offending: Vec<(usize, f64, f64)>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub description: String,
    pub max_abs_dev: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub id: String,
    pub family: String,
    pub degree: usize,
    pub stated_level: usize,
    pub resolved_level: usize,
    /// Max deviation of the perturbed columns for each candidate level.
    pub candidates: Vec<(usize, f64)>,
    pub columns: Vec<ColumnReport>,
    pub interlacing: Option<String>,
    pub expected_interlacing: Option<String>,
    pub common_zeros: Option<usize>,
    pub monotone: Option<bool>,
    /// Not part of the verdict.
    pub diagnostic: Option<Diagnostic>,
    pub pass: bool,
}

pub fn pattern_name(p: InterlacePattern) -> &'static str {
    match p {
        InterlacePattern::AStarts => "unperturbed-starts",
        InterlacePattern::BStarts => "perturbed-starts",
        InterlacePattern::Violated => "violated",
    }
}

fn perturbed_dev(def: &TableDef, seqs: &CoefficientSequences<Rational>, k: usize) -> f64 {
    def.columns
        .iter()
        .filter(|c| !matches!(c, Column::Base(_)))
        .map(|c| c.zeros(seqs, k, def.degree).map(|z| max_dev(&z.zeros, c.golden())).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// Regenerate one of the zero tables and compare with the printed values.
pub fn run_table(id: &str) -> Result<TableReport> {
    let def = table_def(id)?;
    let seqs = def.family.build()?;
    let lo = def.stated_level.saturating_sub(1);
    let candidates: Vec<(usize, f64)> =
        (lo..=def.stated_level + 1).map(|k| (k, perturbed_dev(&def, &seqs, k))).collect();
    let resolved = candidates.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|c| c.0).unwrap_or(def.stated_level);

    let mut sets = Vec::new();
    let mut columns = Vec::new();
    for col in &def.columns {
        let zs = col.zeros(&seqs, resolved, def.degree)?;
        let golden = col.golden();
        let offending = if zs.len() == golden.len() {
            zs.zeros
                .iter()
                .zip(golden)
                .enumerate()
                .filter(|(_, (a, b))| (*a - *b).abs() > TABLE_TOL)
                .map(|(i, (a, b))| (i, *b, *a))
                .collect()
        } else {
            vec![(usize::MAX, golden.len() as f64, zs.len() as f64)]
        };
        let dev = max_dev(&zs.zeros, golden);
        columns.push(ColumnReport {
            label: col.label(resolved),
            golden: golden.to_vec(),
            computed: zs.zeros.clone(),
            max_abs_dev: dev,
            offending,
            pass: dev <= TABLE_TOL,
        });
        sets.push(zs);
    }

    let (interlacing, common_zeros) = match def.interlacing {
        Some(_) => {
            let rep = interlacing_report(&sets[0], &sets[1], COMMON_TOL);
            (Some(rep.pattern), Some(rep.common.len()))
        }
        None => (None, None),
    };
    let monotone = def.monotone_increasing.map(|inc| {
        sets.windows(2).all(|w| {
            w[0].len() == w[1].len() && w[0].zeros.iter().zip(&w[1].zeros).all(|(x, y)| if inc { y > x } else { y < x })
        })
    });
    let diagnostic = match &def.diagnostic_c0 {
        Some(c0) => {
            let mut alt = seqs.clone();
            alt.c.set(0, c0.clone());
            let dev = def
                .columns
                .iter()
                .map(|c| {
                    c.zeros(&alt, resolved, def.degree).map(|z| max_dev(&z.zeros, c.golden())).unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max);
            Some(Diagnostic { description: format!("c_0 replaced by {c0}"), max_abs_dev: dev })
        }
        None => None,
    };
    let pass = columns.iter().all(|c| c.pass)
        && def.interlacing.is_none_or(|want| interlacing == Some(want))
        && monotone.unwrap_or(true);
    Ok(TableReport {
        id: def.id.into(),
        family: def.family.to_string(),
        degree: def.degree,
        stated_level: def.stated_level,
        resolved_level: resolved,
        candidates,
        columns,
        interlacing: interlacing.map(|p| pattern_name(p).into()),
        expected_interlacing: def.interlacing.map(|p| pattern_name(p).into()),
        common_zeros,
        monotone,
        diagnostic,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub subject: String,
    pub detail: String,
    /// Largest residual observed (0 for exact identities that hold).
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, subject: impl Into<String>, detail: impl Into<String>, residual: f64, pass: bool) -> Self {
        Check { name: name.into(), subject: subject.into(), detail: detail.into(), residual, pass }
    }

    fn from_result(name: &str, subject: impl Into<String>, r: Result<(String, f64, bool)>) -> Self {
        match r {
            Ok((detail, residual, pass)) => Check::new(name, subject, detail, residual, pass),
            Err(e) => Check::new(name, subject, format!("error: {e}"), f64::NAN, false),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        SuiteReport { suite: suite.into(), passed, failed, pass: failed == 0, checks }
    }
}

/// Co-recursive at every level, co-dilated and co-modified from level 1.
pub fn perturbation_grid(max_k: usize) -> Vec<Perturbation<Rational>> {
    let mut out = Vec::new();
    for k in 0..=max_k {
        out.push(Perturbation { k, mu: rat(-2, 3), nu: int(1) });
        if k >= 1 {
            out.push(Perturbation { k, mu: int(0), nu: rat(3, 2) });
            out.push(Perturbation { k, mu: rat(1, 3), nu: int(2) });
        }
    }
    out
}

struct GridItem {
    seqs: CoefficientSequences<Rational>,
    pert: Perturbation<Rational>,
    /// Highest pole-free degree, capped at GRID_DEGREE.
    top: usize,
}

impl GridItem {
    fn subject(&self) -> String {
        format!("{} [{}]", self.seqs.label, self.pert)
    }
}

fn grid() -> Result<Vec<GridItem>> {
    let mut items = Vec::new();
    for spec in FamilySpec::builtins() {
        let seqs = spec.build()?;
        let top = seqs.max_degree(GRID_DEGREE);
        for pert in perturbation_grid(GRID_LEVEL) {
            if pert.k + 2 <= top {
                items.push(GridItem { seqs: seqs.clone(), pert, top });
            }
        }
    }
    Ok(items)
}

fn poly_residual(p: &Poly<Rational>) -> f64 {
    p.coeffs().iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
}

fn representation_check(it: &GridItem) -> Check {
    let r = (|| {
        let rep = perturbed_family_represented(&it.seqs, &it.pert, it.top)?;
        let dir = perturbed_family_direct(&it.seqs, &it.pert, it.top)?;
        let bad = rep.iter().zip(&dir).filter(|(a, b)| a != b).count();
        let worst = rep.iter().zip(&dir).map(|(a, b)| poly_residual(&(a - b))).fold(0.0, f64::max);
        Ok((format!("degrees 0..={}, {bad} mismatches", it.top), worst, bad == 0))
    })();
    Check::from_result("represented = direct", it.subject(), r)
}

fn transfer_checks(it: &GridItem) -> Vec<Check> {
    let k = it.pert.k;
    let identity = (|| {
        let mut worst = 0.0f64;
        let lo = k.saturating_sub(1);
        for n in lo..it.top {
            let [a, b] = transfer_identity_residual(&it.seqs, &it.pert, n)?;
            worst = worst.max(poly_residual(&a)).max(poly_residual(&b));
        }
        Ok((format!("n = {lo}..{}", it.top - 1), worst, worst == 0.0))
    })();
    let cofactor = (|| {
        let cof = cofactor_transform(&it.seqs, &it.pert)?;
        let full = homography_from_full(&it.seqs, &it.pert)?;
        let worst = cof.cross_residuals(&full).iter().map(poly_residual).fold(0.0, f64::max);
        Ok(("cross-multiplied 2x2 minors".to_string(), worst, cof.equivalent(&full)))
    })();
    vec![
        Check::from_result("transfer identity", it.subject(), identity),
        Check::from_result("cof(M_k) ~ full homography", it.subject(), cofactor),
    ]
}

const SAMPLE_STARTS: [(i64, i64); 3] = [(7, 3), (-5, 4), (13, 2)];

fn stieltjes_checks(it: &GridItem) -> Vec<Check> {
    let k = it.pert.k;
    let depth = GRID_DEPTH.min(it.top.saturating_sub(k + 1));
    let laws = (|| {
        let hf = homography_from_full(&it.seqs, &it.pert)?;
        let mut worst = 0.0f64;
        for m in 0..=depth {
            worst = worst
                .max(poly_residual(&tail_law_residual(&it.seqs, &it.pert, m)?))
                .max(poly_residual(&tail_from_full_residual(&it.seqs, k, m)?))
                .max(poly_residual(&full_law_residual(&it.seqs, &it.pert, &hf, k + 1 + m)?));
        }
        Ok((format!("polynomial laws, m = 0..={depth}"), worst, worst == 0.0))
    })();
    let points = (|| {
        let mut worst = 0.0f64;
        let mut used = Vec::new();
        for (p, q) in SAMPLE_STARTS {
            let z = screen_point(rat(p, q), |z| admissible_point(&it.seqs, &it.pert, z, depth))?;
            for (_, _, r) in pointwise_laws(&it.seqs, &it.pert, &z, depth)? {
                worst = worst.max(r);
            }
            used.push(z.to_string());
        }
        Ok((format!("z in {{{}}}, m = 0..={depth}", used.join(", ")), worst, worst == 0.0))
    })();
    vec![
        Check::from_result("truncation laws (polynomial)", it.subject(), laws),
        Check::from_result("truncation laws (pointwise)", it.subject(), points),
    ]
}

/// Casoratti identities, the zero lemma and the hypergeometric oracle on positive_L families.
fn zeros_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for seqs in positive_l_families()? {
        let top = seqs.max_degree(10);
        let label = seqs.label.clone();
        // the Casoratti residual at n needs degree n + 1
        let nmax = seqs.max_degree(11).saturating_sub(1).clamp(1, 10);
        for k in 1..=4usize {
            let r = (|| {
                let mut worst = 0.0f64;
                for n in k..=nmax {
                    worst = worst.max(poly_residual(&casoratti_assoc_residual(&seqs, k, n)?));
                }
                Ok((format!("shift {k}, n = {k}..={nmax}"), worst, worst == 0.0))
            })();
            checks.push(Check::from_result("Casoratti P_n vs associated", &label, r));
            let r = (|| {
                let pert = Perturbation { k, mu: rat(-1, 2), nu: int(1) };
                let mut worst = 0.0f64;
                for n in k..=nmax {
                    worst = worst.max(poly_residual(&corecursive_casoratti_residual(
                        &seqs,
                        &pert,
                        n,
                        ProductStart::AfterK,
                    )?));
                }
                Ok((format!("k = {k}, mu = -1/2, n = {k}..={nmax}"), worst, worst == 0.0))
            })();
            checks.push(Check::from_result("Casoratti P_n vs co-recursive", &label, r));
        }
        for k in 1..=4usize {
            let r = (|| {
                let (mut ok, mut common, mut near) = (true, 0usize, 0usize);
                for mu in [rat(-1, 2), rat(1, 2)] {
                    let pert = Perturbation { k, mu: mu.clone(), nu: int(1) };
                    let want = if mu.is_positive() { InterlacePattern::AStarts } else { InterlacePattern::BStarts };
                    let base = generate_family(&seqs, top, 0)?;
                    let pm = perturbed_family_direct(&seqs, &pert, top)?;
                    for n in k + 1..=top {
                        let (a, b) = zero_pair(&seqs, &pert, n)?;
                        ok &= interlacing_report(&a, &b, COMMON_TOL).pattern == want;
                        // common zeros: gcd(P_n, P_n(.;mu)) must divide P_k exactly
                        let g = base[n].gcd(&pm[n]);
                        ok &= base[k].div_rem(&g).1.is_zero();
                        common += g.degree().max(0) as usize;
                        near += common_zero_check(&seqs, &pert, n)?.common.len();
                    }
                }
                Ok((
                    format!(
                        "k = {k}, mu = -1/2 and 1/2, n = {}..={top}: {common} exact common zeros, {near} within the float tolerance",
                        k + 1
                    ),
                    0.0,
                    ok,
                ))
            })();
            checks.push(Check::from_result("co-recursive interlacing and common zeros", &label, r));
            let r = (|| {
                let pert = Perturbation { k, mu: rat(1, 3), nu: int(2) };
                let (s_k, _) = s_polynomials(&seqs, &pert)?;
                let base = generate_family(&seqs, top, 0)?;
                let pm = perturbed_family_direct(&seqs, &pert, top)?;
                // exceptional set: zeros of z P_k under the calibrated shift
                let x_poly = &Poly::x() * &base[k];
                let (mut ok, mut excluded) = (true, 0);
                for n in k + 1..=top {
                    let mut g = base[n].gcd(&pm[n]);
                    loop {
                        let h = g.gcd(&x_poly);
                        if h.degree() <= 0 {
                            break;
                        }
                        excluded += h.degree() as usize;
                        g = g.div_rem(&h).0;
                    }
                    ok &= s_k.div_rem(&g).1.is_zero();
                }
                Ok((
                    format!("k = {k}, mu = 1/3, nu = 2, n = {}..={top}, {excluded} common zeros in z P_k", k + 1),
                    0.0,
                    ok,
                ))
            })();
            checks.push(Check::from_result("common zeros outside z P_k divide S_k", &label, r));
        }
        let r = (|| {
            let fam = generate_family(&seqs, top, 0)?;
            let sets = (1..=top).map(|n| real_zeros_exact(&fam[n], DEFAULT_TOL)).collect::<Result<Vec<_>>>()?;
            let mut worst = 0.0f64;
            let mut ok = true;
            for (i, z) in sets.iter().enumerate() {
                let n = i + 1;
                worst = backward_errors(&fam[n].to_f64(), z).into_iter().fold(worst, f64::max);
                ok &= z.len() == n && z.complex_count == 0 && z.zeros.iter().all(|x| *x > 0.0);
                if n >= 2 {
                    let rep = interlacing_report(&sets[i - 1], z, COMMON_TOL);
                    ok &= rep.common.is_empty() && rep.pattern == InterlacePattern::BStarts;
                }
            }
            ok &= worst <= DEFAULT_TOL;
            Ok((format!("n = 1..={top}: real, simple, positive, interlacing; relative backward error"), worst, ok))
        })();
        checks.push(Check::from_result("zero lemma", &label, r));
    }
    for spec in FamilySpec::builtins() {
        if let FamilySpec::LJacobi { a, c } = &spec {
            let r = (|| {
                let seqs = spec.build()?;
                let fam = generate_family(&seqs, 8, 0)?;
                let xs = [rat(1, 3), rat(-2, 5), rat(7, 2), int(2), rat(-11, 7)];
                let mut bad = 0;
                for (n, p) in fam.iter().enumerate() {
                    for x in &xs {
                        if p.eval(x) != hypergeometric_oracle(a, c, n, x)? {
                            bad += 1;
                        }
                    }
                }
                Ok((format!("n = 0..=8 at {} points, {bad} mismatches", xs.len()), bad as f64, bad == 0))
            })();
            checks.push(Check::from_result("hypergeometric representation", spec.to_string(), r));
        }
    }
    Ok(checks)
}

fn toda_checks() -> Vec<Check> {
    let m = DiscreteMeasure::six_node();
    let subject = "six-node measure";
    let mut checks = Vec::new();
    for (p, q) in [(1.0, 0.0), (0.0, 1.0)] {
        let r = verify_flow(&m, TodaParams::new(p, q, 0.0), None, 0.1, 1e-3, 4).map(|r| {
            (format!("p={p}, q={q}, observed order {:.3}", r.order), r.max_residual[0], (r.order - 2.0).abs() <= 0.3)
        });
        checks.push(Check::from_result("unperturbed flow order", subject, r));
    }
    let r = PerturbationSchedule::constant(2, 0.3, 1.0).and_then(|s| {
        verify_flow(&m, TodaParams::new(1.0, 0.0, 0.0), Some(&s), 0.1, 1e-3, 5).map(|r| {
            let ord = r.perturbed_order.unwrap_or(f64::NAN);
            (
                format!("k=2, mu=0.3, nu=1: perturbed-level order {ord:.3}, locality {}", r.locality),
                r.max_residual[0],
                (ord - 2.0).abs() <= 0.3 && r.locality,
            )
        })
    });
    checks.push(Check::from_result("perturbed flow (reparametrization)", subject, r));
    let r = (|| {
        let params = TodaParams::new(1.0, 0.0, 0.0);
        let f0 = coeffs_from_moments(&m, &params, m.len())?;
        let end = coeffs_from_moments(&m, &params.at(0.2), m.len())?;
        let last = integrate_flow(&f0, &params, None, 0.2, 2000)?.last_frame();
        let err = (1..=4)
            .map(|n| (last.c[n] - end.c[n]).abs().max((last.lambda[n] - end.lambda[n]).abs()))
            .fold(0.0, f64::max);
        Ok(("RK4, T = 0.2, 2000 steps, levels 1..=4".to_string(), err, err <= 1e-6))
    })();
    checks.push(Check::from_result("RK4 vs moment oracle", subject, r));
    checks
}

fn chain_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let subject = "{1/2,1/4,...} co-dilated by 1/2 at level 1";
    let dil = half_quarter_chain::<Rational>().co_dilate(1, rat(1, 2));
    let r = dil.as_ref().map_err(Clone::clone).and_then(|d| {
        let m = minimal_parameters(d, 10)?;
        let ok = m.iter().enumerate().all(|(n, v)| *v == int(n as i64) / int(2 * n as i64 + 2));
        Ok(("m_n = n/(2n+2), n <= 10".to_string(), 0.0, ok))
    });
    checks.push(Check::from_result("minimal parameters", subject, r));
    let r = half_quarter_chain::<f64>().co_dilate(1, 0.5).and_then(|d| {
        let est = maximal_parameters_converged(&d, 4, 1e-8)?;
        let err = est.params.iter().map(|g| (g - 0.5).abs()).fold(0.0, f64::max);
        Ok((format!("tail depth {}", est.tail_depth), err, est.converged && err <= 1e-8))
    });
    checks.push(Check::from_result("maximal parameters", subject, r));
    let r = dil.as_ref().map_err(Clone::clone).and_then(|d| {
        let fam = szego_from_chain(&int(0), d, 6)?;
        let ok = (1..=6).all(|n| -fam.phi[n].coeff(0).re.clone() == Rational::one() / int(n as i64 + 1));
        Ok(("-phi_n(0) = 1/(n+1), n <= 6".to_string(), 0.0, ok))
    });
    checks.push(Check::from_result("Verblunsky coefficients", subject, r));
    let r = (|| {
        let (chain, _) = eta_family(&int(0), &int(0))?;
        let a = complementary(&chain, 9)?;
        let fam = szego_from_chain(&int(0), &a, 8)?;
        let ok = (0..=8).all(|n| fam.phi[n].real() == Some(Poly::monomial(n)));
        Ok(("phi_n = z^n, n <= 8".to_string(), 0.0, ok))
    })();
    checks.push(Check::from_result("Szego-Chebyshev degeneration", "complement of eta = 0", r));
    let r = (|| {
        // delta_n = -1/(n+1), d_{n+1} = (1 + delta_n)(1 - delta_{n+1}) / 4
        let delta: Vec<Rational> = (1..=8).map(|n| -(Rational::one() / int(n + 1))).collect();
        let mut dl = vec![Rational::zero()];
        dl.extend((1..8).map(|n| rat(1, 4) * (int(1) + delta[n - 1].clone()) * (int(1) - delta[n].clone())));
        let d = crate::chainseq::ChainSequence::from_list(dl, "caratheodory");
        let v = delta_from_chain(delta[0].clone(), &d, 8)?;
        let mut ok = v.delta == delta && v.checks.iter().all(|c| c.condition && c.product_form);
        for k in 1..=4 {
            let nu = rat(1, 2);
            let p = perturbed_delta(&VerblunskySeq::explicit(delta.clone()), &d, k, nu.clone(), 8)?;
            let direct = (int(1) - int(4) * nu * d.d(k + 1)?) / (int(2) * delta[k - 1].clone());
            ok &= p.delta[k] == direct && p.delta[..k] == delta[..k];
        }
        let (phi, star) = szego_from_delta(&delta, 8)?;
        ok &= (0..=8).all(|n| star[n] == phi[n].reversed_conj(n));
        Ok(("delta_n = -1/(n+1): recursion, proposition (k <= 4), reversal".to_string(), 0.0, ok))
    })();
    checks.push(Check::from_result("delta recursion and proposition", "caratheodory family", r));
    checks
}

/// Run one identity suite over the builtin families.
pub fn run_suite(name: &str, exec: Exec) -> Result<SuiteReport> {
    let checks = match name {
        "representation" => exec.map(&grid()?, representation_check),
        "transfer" => exec.map(&grid()?, transfer_checks).into_iter().flatten().collect(),
        "stieltjes" => exec.map(&grid()?, stieltjes_checks).into_iter().flatten().collect(),
        "zeros" => zeros_checks()?,
        "toda" => toda_checks(),
        "chain" => chain_checks(),
        other => {
            return Err(Error::Usage(format!("unknown suite `{other}` (expected one of {})", SUITES.join(", "))));
        }
    };
    Ok(SuiteReport::new(name, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_ids_are_usage_errors() {
        assert!(matches!(run_table("T9"), Err(Error::Usage(_))));
        assert!(matches!(run_suite("nope", Exec::Sequential), Err(Error::Usage(_))));
    }

    #[test]
    fn table_one_and_five() {
        let t1 = run_table("T1").unwrap();
        assert!(t1.pass, "{t1:#?}");
        assert_eq!(t1.resolved_level, 3);
        assert_eq!(t1.common_zeros, Some(0));
        let t5 = run_table("T5").unwrap();
        assert!(t5.pass, "{t5:#?}");
        assert_eq!(t5.interlacing.as_deref(), Some("violated"));
    }

    #[test]
    fn chain_suite_passes() {
        let r = run_suite("chain", Exec::Sequential).unwrap();
        assert!(r.pass, "{:#?}", r.checks);
    }

    #[test]
    fn grid_covers_all_kinds() {
        let g = perturbation_grid(2);
        assert_eq!(g.len(), 7);
    }
}
