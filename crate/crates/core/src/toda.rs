//! Time-deformed moment functionals L^(t)[x^m] = L[x^m exp(-t(px + q/x))],
//! their L-orthogonal recurrence coefficients, and the (perturbed) extended
//! relativistic Toda equations those coefficients satisfy.
//!
//! L-orthogonal polynomials: R_{n+1} = (x - c_{n+1}) R_n - lambda_{n+1} x R_{n-1},
//! with c_0 = 1, lambda_0 = -1, lambda_1 = 0.

use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{f64_to_rational, parse_rational, rat, Rational, RealScalar, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<Rational>,
    weights: Vec<Rational>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<Rational>, weights: Vec<Rational>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Domain(format!("{} nodes but {} weights", nodes.len(), weights.len())));
        }
        if let Some(x) = nodes.iter().find(|x| !x.is_positive()) {
            return Err(Error::Domain(format!("node {x} is not positive")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::Domain(format!("weight {w} is not positive")));
        }
        for (i, x) in nodes.iter().enumerate() {
            if nodes[..i].contains(x) {
                return Err(Error::Domain(format!("repeated node {x}")));
            }
        }
        Ok(DiscreteMeasure { nodes, weights })
    }

    /// Nodes 1, 3/2, ..., 7/2 with unit weights.
    pub fn six_node() -> Self {
        DiscreteMeasure::new((2..8).map(|i| rat(i, 2)).collect(), vec![Rational::one(); 6]).unwrap()
    }

    /// `nodes=1,3/2,2,weights=1,1,1` (weights optional, default 1).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s.strip_prefix("nodes=").ok_or_else(|| Error::Parse("measure must start with nodes=".into()))?;
        let (nodes_s, weights_s) = match body.find("weights=") {
            Some(i) => (&body[..i], Some(&body[i + "weights=".len()..])),
            None => (body, None),
        };
        let list = |t: &str| -> Result<Vec<Rational>> {
            t.split([',', ' ', ';']).map(str::trim).filter(|x| !x.is_empty()).map(parse_rational).collect()
        };
        let nodes = list(nodes_s)?;
        let weights = match weights_s {
            Some(w) => list(w)?,
            None => vec![Rational::one(); nodes.len()],
        };
        DiscreteMeasure::new(nodes, weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    /// w_i exp(-t(p x_i + q/x_i)); exact when the exponent vanishes, otherwise the f64 value taken exactly.
    pub fn effective_weights(&self, params: &TodaParams) -> Result<Vec<Rational>> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                let e = params.exponent(x.to_f64());
                if e == 0.0 {
                    Ok(w.clone())
                } else {
                    f64_to_rational(w.to_f64() * (-e).exp())
                        .filter(|v| v.is_positive())
                        .ok_or_else(|| Error::Domain(format!("weight at node {x} underflows at t = {}", params.t)))
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TodaParams {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl TodaParams {
    pub fn new(p: f64, q: f64, t: f64) -> Self {
        TodaParams { p, q, t }
    }

    pub fn at(self, t: f64) -> Self {
        TodaParams { t, ..self }
    }

    fn exponent(&self, x: f64) -> f64 {
        self.t * (self.p * x + self.q / x)
    }
}

/// sum_i w_i x_i^m exp(-t(p x_i + q/x_i)).
pub fn moment(measure: &DiscreteMeasure, params: &TodaParams, m: i32) -> f64 {
    measure
        .nodes
        .iter()
        .zip(&measure.weights)
        .map(|(x, w)| {
            let x = x.to_f64();
            w.to_f64() * x.powi(m) * (-params.exponent(x)).exp()
        })
        .sum()
}

fn exact_moment(nodes: &[Rational], weights: &[Rational], m: i32) -> Rational {
    nodes.iter().zip(weights).map(|(x, w)| w.clone() * num::pow::Pow::pow(x, m)).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFrame<S> {
    pub t: f64,
    /// c_0 .. c_N, c_0 = 1.
    pub c: Vec<S>,
    /// lambda_0 .. lambda_N; lambda_0 = -1 is carried but never consulted, lambda_1 = 0.
    pub lambda: Vec<S>,
    /// a[n] = coefficients of R_n, ascending; a[n][n] = 1.
    pub a: Vec<Vec<S>>,
    /// sigma_{n,-1} = L^(t)[x^{-n-1} R_n].
    pub sigma_m1: Vec<S>,
    /// sigma_{n,n} = L^(t)[R_n].
    pub sigma_nn: Vec<S>,
}

impl<S: RealScalar> CoefficientFrame<S> {
    /// A frame with only recurrence coefficients; `c` and `lambda` start at index 1.
    pub fn from_coefficients(t: f64, c: &[S], lambda_from_2: &[S]) -> Self {
        let mut cs = vec![S::one()];
        cs.extend_from_slice(c);
        let mut ls = vec![-S::one(), S::zero()];
        ls.extend_from_slice(lambda_from_2);
        CoefficientFrame { t, c: cs, lambda: ls, a: Vec::new(), sigma_m1: Vec::new(), sigma_nn: Vec::new() }
    }

    /// Highest level N.
    pub fn levels(&self) -> usize {
        self.c.len() - 1
    }

    pub fn c(&self, n: usize) -> Result<S> {
        self.c.get(n).cloned().ok_or(Error::IndexOutOfRange { name: "c", index: n, first: 0, end: self.c.len() })
    }

    pub fn lambda(&self, n: usize) -> Result<S> {
        self.lambda.get(n).cloned().ok_or(Error::IndexOutOfRange {
            name: "lambda",
            index: n,
            first: 0,
            end: self.lambda.len(),
        })
    }

    /// Append c_{N+1} = 1, lambda_{N+1} = 0: the finite lattice of an N-node measure.
    pub fn closed(&self) -> Self {
        let mut f = self.clone();
        f.c.push(S::one());
        f.lambda.push(S::zero());
        f
    }

    /// c_{k+1} += mu, lambda_{k+1} /= nu: recover the unhatted variables of the perturbed theorem.
    pub fn unhat(&self, s: &ScheduleValues<S>) -> Result<Self> {
        let mut f = self.clone();
        let i = s.k + 1;
        f.c[i] = f.c(i)? + s.mu.clone();
        f.lambda[i] = f.lambda(i)? / s.nu.clone();
        Ok(f)
    }
}

impl CoefficientFrame<Rational> {
    pub fn to_f64(&self) -> CoefficientFrame<f64> {
        let v = |x: &[Rational]| x.iter().map(|r| r.to_f64()).collect::<Vec<_>>();
        CoefficientFrame {
            t: self.t,
            c: v(&self.c),
            lambda: v(&self.lambda),
            a: self.a.iter().map(|r| v(r)).collect(),
            sigma_m1: v(&self.sigma_m1),
            sigma_nn: v(&self.sigma_nn),
        }
    }
}

/// Pivots below this fraction of the largest entry count as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Gaussian elimination with partial pivoting; `Singular(column)` on a vanishing pivot.
#[allow(clippy::needless_range_loop)]
pub fn solve<S: RealScalar>(mut m: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = b.len();
    let scale = m.iter().flatten().map(Scalar::magnitude).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].magnitude().total_cmp(&m[j][col].magnitude())).unwrap_or(col);
        if m[piv][col].is_zero() || m[piv][col].magnitude() < PIVOT_TOL * scale {
            return Err(Error::Singular(col));
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col].clone() / m[col][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let v = m[col][j].clone() * f.clone();
                m[r][j] = m[r][j].clone() - v;
            }
            let v = b[col].clone() * f;
            b[r] = b[r].clone() - v;
        }
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for j in r + 1..n {
            acc = acc - m[r][j].clone() * x[j].clone();
        }
        x[r] = acc / m[r][r].clone();
    }
    Ok(x)
}

/// Recurrence coefficients through level N from the moments of L^(t), in exact arithmetic
/// over the effective weights. Requires N <= number of nodes.
pub fn coeffs_from_moments_exact(
    measure: &DiscreteMeasure,
    params: &TodaParams,
    n: usize,
) -> Result<CoefficientFrame<Rational>> {
    if n > measure.len() {
        return Err(Error::Domain(format!("N = {n} exceeds the {} nodes of the measure", measure.len())));
    }
    let w = measure.effective_weights(params)?;
    let off = n as i32 + 1;
    let mom: Vec<Rational> = (-off..=n as i32).map(|m| exact_moment(&measure.nodes, &w, m)).collect();
    let mu = |m: i32| mom[(m + off) as usize].clone();

    let mut a = vec![vec![Rational::one()]];
    for deg in 1..=n {
        let d = deg as i32;
        let mat = (0..d).map(|s| (0..d).map(|j| mu(j - d + s)).collect()).collect();
        let rhs = (0..d).map(|s| -mu(s)).collect();
        let mut coeffs = solve(mat, rhs)?;
        coeffs.push(Rational::one());
        a.push(coeffs);
    }
    let mut c = vec![Rational::one()];
    let mut lambda = vec![-Rational::one(), Rational::zero()];
    for m in 0..n {
        c.push(-(a[m + 1][0].clone() / a[m][0].clone()));
        if m >= 1 {
            lambda.push(a[m][m - 1].clone() - a[m + 1][m].clone() - c[m + 1].clone());
        }
    }
    let sigma = |shift: i32| -> Vec<Rational> {
        a.iter()
            .enumerate()
            .map(|(deg, r)| {
                r.iter().enumerate().map(|(j, x)| x.clone() * mu(j as i32 + shift * (deg as i32 + 1))).sum()
            })
            .collect()
    };
    Ok(CoefficientFrame { t: params.t, c, lambda, sigma_m1: sigma(-1), sigma_nn: sigma(0), a })
}

pub fn coeffs_from_moments(measure: &DiscreteMeasure, params: &TodaParams, n: usize) -> Result<CoefficientFrame<f64>> {
    coeffs_from_moments_exact(measure, params, n).map(|f| f.to_f64())
}

/// mu_{k+1}, nu_{k+1} and their derivatives at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleValues<S> {
    pub k: usize,
    pub mu: S,
    pub nu: S,
    pub mu_dot: S,
    pub nu_dot: S,
}

impl<S: Scalar> ScheduleValues<S> {
    pub fn identity(k: usize) -> Self {
        ScheduleValues { k, mu: S::zero(), nu: S::one(), mu_dot: S::zero(), nu_dot: S::zero() }
    }
}

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Level-k schedule: hat c_{k+1} = c_{k+1} - mu(t), hat lambda_{k+1} = nu(t) lambda_{k+1}.
#[derive(Clone)]
pub struct PerturbationSchedule {
    pub k: usize,
    mu: TimeFn,
    nu: TimeFn,
    mu_dot: TimeFn,
    nu_dot: TimeFn,
}

impl std::fmt::Debug for PerturbationSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PerturbationSchedule(k={}, mu(0)={}, nu(0)={})", self.k, (self.mu)(0.0), (self.nu)(0.0))
    }
}

impl PerturbationSchedule {
    pub fn new(
        k: usize,
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        nu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
        nu_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PerturbationSchedule {
            k,
            mu: Arc::new(mu),
            nu: Arc::new(nu),
            mu_dot: Arc::new(mu_dot),
            nu_dot: Arc::new(nu_dot),
        }
    }

    pub fn constant(k: usize, mu: f64, nu: f64) -> Result<Self> {
        if nu <= 0.0 {
            return Err(Error::InvalidPerturbation(format!("nu must be positive, got {nu}")));
        }
        Ok(Self::new(k, move |_| mu, move |_| nu, |_| 0.0, |_| 0.0))
    }

    /// `k,mu,nu` with constant values.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("schedule must be k,mu,nu, got {s:?}")));
        }
        let k = parts[0].parse().map_err(|_| Error::Parse(format!("bad level {:?}", parts[0])))?;
        let num = |t: &str| parse_rational(t).map(|r| r.to_f64());
        Self::constant(k, num(parts[1])?, num(parts[2])?)
    }

    pub fn at(&self, t: f64) -> Result<ScheduleValues<f64>> {
        let nu = (self.nu)(t);
        if nu.is_nan() || nu <= 0.0 {
            return Err(Error::InvalidPerturbation(format!("nu({t}) = {nu} is not positive")));
        }
        Ok(ScheduleValues { k: self.k, mu: (self.mu)(t), nu, mu_dot: (self.mu_dot)(t), nu_dot: (self.nu_dot)(t) })
    }
}

fn div<S: RealScalar>(num: S, den: S, min_den: f64, what: &str) -> Result<S> {
    if den.is_zero() || den.magnitude() < min_den {
        return Err(Error::DivisionByZero(what.to_string()));
    }
    Ok(num / den)
}

/// (c'_n, lambda'_n) from the displayed equations.
///
/// With `sched`, c-levels k, k+1, k+2 and lambda-levels k+1, k+2 take the perturbed forms;
/// the two lambda equations displayed "for n = k" and "for n = k+1" govern lambda_{k+1}
/// and lambda_{k+2}. Everything else uses the unperturbed form.
pub fn toda_rhs<S: RealScalar>(
    frame: &CoefficientFrame<S>,
    params: &TodaParams,
    sched: Option<&ScheduleValues<S>>,
    n: usize,
) -> Result<(S, S)> {
    toda_rhs_guarded(frame, params, sched, n, 0.0)
}

fn toda_rhs_guarded<S: RealScalar>(
    f: &CoefficientFrame<S>,
    params: &TodaParams,
    sched: Option<&ScheduleValues<S>>,
    n: usize,
    min_den: f64,
) -> Result<(S, S)> {
    if n == 0 {
        return Err(Error::Domain("Toda equations start at n = 1".into()));
    }
    let p = S::from_f64(params.p);
    let q = S::from_f64(params.q);
    let one = S::one();
    let d = |num: S, den: S, what: &str| div(num, den, min_den, what);
    let c = |i| f.c(i);
    let l = |i| f.lambda(i);

    let generic_c = || -> Result<S> {
        let (cn, cm, cp) = (c(n)?, c(n - 1)?, c(n + 1)?);
        let inner = p.clone() * (l(n)? - l(n + 1)?)
            + q.clone() * (d(l(n + 1)?, cp * cn.clone(), "c_{n+1} c_n")? - d(l(n)?, cn.clone() * cm, "c_n c_{n-1}")?);
        Ok(cn * inner)
    };
    let generic_l = || -> Result<S> {
        let (cn, cm) = (c(n)?, c(n - 1)?);
        let inner = p.clone() * (l(n - 1)? + cm.clone() - l(n + 1)? - cn.clone())
            + q.clone() * (d(one.clone(), cm, "c_{n-1}")? - d(one.clone(), cn, "c_n")?);
        Ok(l(n)? * inner)
    };

    let Some(s) = sched else {
        return Ok((generic_c()?, generic_l()?));
    };
    let k = s.k;
    let nu = s.nu.clone();
    let hat_c = |i: usize| -> Result<S> { c(i).map(|v| v - s.mu.clone()) };

    let cdot = if k >= 1 && n == k {
        let (ck, ckm) = (c(k)?, c(k - 1)?);
        let nl = nu.clone() * l(k + 1)?;
        let inner = p.clone() * (l(k)? - nl.clone())
            + q.clone()
                * (d(nl, hat_c(k + 1)? * ck.clone(), "(c_{k+1} - mu) c_k")?
                    - d(l(k)?, ck.clone() * ckm, "c_k c_{k-1}")?);
        ck * inner
    } else if n == k + 1 {
        let nl = nu.clone() * l(k + 1)?;
        s.mu_dot.clone()
            + p.clone() * hat_c(k + 1)? * (nl.clone() - l(k + 2)?)
            + q.clone() * (d(l(k + 2)?, c(k + 2)?, "c_{k+2}")? - d(nl, c(k)?, "c_k")?)
    } else if n == k + 2 {
        let c2 = c(k + 2)?;
        let inner = p.clone() * (l(k + 2)? - l(k + 3)?)
            + q.clone()
                * (d(l(k + 3)?, c2.clone() * c(k + 3)?, "c_{k+2} c_{k+3}")?
                    - d(l(k + 2)?, hat_c(k + 1)? * c2.clone(), "(c_{k+1} - mu) c_{k+2}")?);
        c2 * inner
    } else {
        generic_c()?
    };

    let ldot = if n == k + 1 {
        let (lk1, ch) = (l(k + 1)?, hat_c(k + 1)?);
        let inner = -d(s.nu_dot.clone(), nu.clone(), "nu")?
            - p.clone() * (l(k + 2)? + ch.clone() + (nu.clone() - one.clone()) * lk1.clone() - c(k)? - l(k)?)
            - q.clone() * (d(one.clone(), ch, "c_{k+1} - mu")? - d(one.clone(), c(k)?, "c_k")?);
        lk1 * inner
    } else if n == k + 2 {
        let ch = hat_c(k + 1)?;
        let inner = -(p.clone() * (l(k + 3)? + c(k + 2)? - ch.clone() - nu.clone() * l(k + 1)?))
            - q.clone() * (d(one.clone(), c(k + 2)?, "c_{k+2}")? - d(one.clone(), ch, "c_{k+1} - mu")?);
        l(k + 2)? * inner
    } else {
        generic_l()?
    };
    Ok((cdot, ldot))
}

/// Levels whose equations change under a level-k schedule: (c levels, lambda levels).
pub fn affected_levels(k: usize) -> (Vec<usize>, Vec<usize>) {
    let c = [k, k + 1, k + 2].into_iter().filter(|&n| n >= 1).collect();
    (c, vec![k + 1, k + 2])
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelResidual {
    pub n: usize,
    /// |FD - RHS| for c_n at h and h/2.
    pub c: [f64; 2],
    /// Same for lambda_n.
    pub lambda: [f64; 2],
    /// True when the level uses a perturbed equation.
    pub perturbed: bool,
    /// Outside the affected levels: perturbed RHS equals unperturbed RHS exactly.
    pub matches_unperturbed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub p: f64,
    pub q: f64,
    pub t0: f64,
    pub h: f64,
    pub k: Option<usize>,
    pub levels: Vec<LevelResidual>,
    pub max_residual: [f64; 2],
    /// log2 of the max-residual ratio between h and h/2.
    pub order: f64,
    /// Order over the perturbed levels alone (None without a schedule).
    pub perturbed_order: Option<f64>,
    pub locality: bool,
}

/// Residuals below this are treated as exact when fitting orders.
const ORDER_FLOOR: f64 = 1e-13;

fn order(r: [f64; 2]) -> f64 {
    if r[0] < ORDER_FLOOR {
        return f64::NAN;
    }
    (r[0] / r[1]).log2()
}

/// Central differences of the moment-derived coefficients against `toda_rhs` at t0, for
/// steps h and h/2, levels 1..=N. With a schedule the moment-derived coefficients are the
/// hatted ones and the equations are checked for the unhatted variables.
pub fn verify_flow(
    measure: &DiscreteMeasure,
    base: TodaParams,
    sched: Option<&PerturbationSchedule>,
    t0: f64,
    h: f64,
    n: usize,
) -> Result<FlowReport> {
    let frame_at = |t: f64| -> Result<CoefficientFrame<f64>> {
        let f = coeffs_from_moments(measure, &base.at(t), n + 1)?;
        match sched {
            Some(s) => f.unhat(&s.at(t)?),
            None => Ok(f),
        }
    };
    let sv = sched.map(|s| s.at(t0)).transpose()?;
    let center = frame_at(t0)?;
    let (c_lv, l_lv) = sv.as_ref().map(|s| affected_levels(s.k)).unwrap_or_default();

    let mut levels: Vec<LevelResidual> = (1..=n)
        .map(|lvl| -> Result<LevelResidual> {
            let (rc, rl) = toda_rhs(&center, &base, sv.as_ref(), lvl)?;
            let (uc, ul) = toda_rhs(&center, &base, None, lvl)?;
            let perturbed = c_lv.contains(&lvl) || l_lv.contains(&lvl);
            let matches = (c_lv.contains(&lvl) || rc == uc) && (l_lv.contains(&lvl) || rl == ul);
            Ok(LevelResidual { n: lvl, c: [0.0; 2], lambda: [0.0; 2], perturbed, matches_unperturbed: matches })
        })
        .collect::<Result<_>>()?;

    for (slot, step) in [h, h / 2.0].into_iter().enumerate() {
        let plus = frame_at(t0 + step)?;
        let minus = frame_at(t0 - step)?;
        for lv in levels.iter_mut() {
            let (rc, rl) = toda_rhs(&center, &base, sv.as_ref(), lv.n)?;
            let fd = |a: f64, b: f64| (a - b) / (2.0 * step);
            lv.c[slot] = (fd(plus.c[lv.n], minus.c[lv.n]) - rc).abs();
            lv.lambda[slot] = (fd(plus.lambda[lv.n], minus.lambda[lv.n]) - rl).abs();
        }
    }
    let max_of = |it: &mut dyn Iterator<Item = &LevelResidual>| {
        it.fold([0.0f64; 2], |acc, lv| [acc[0].max(lv.c[0]).max(lv.lambda[0]), acc[1].max(lv.c[1]).max(lv.lambda[1])])
    };
    let max_residual = max_of(&mut levels.iter());
    let perturbed_order = sv.as_ref().map(|_| order(max_of(&mut levels.iter().filter(|l| l.perturbed))));
    Ok(FlowReport {
        p: base.p,
        q: base.q,
        t0,
        h,
        k: sv.as_ref().map(|s| s.k),
        locality: levels.iter().all(|l| l.matches_unperturbed),
        max_residual,
        order: order(max_residual),
        perturbed_order,
        levels,
    })
}

pub const BLOWUP_MAGNITUDE: f64 = 1e12;
pub const BLOWUP_DENOMINATOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// c_1..c_N per sample.
    pub c: Vec<Vec<f64>>,
    /// lambda_2..lambda_N per sample.
    pub lambda: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last_frame(&self) -> CoefficientFrame<f64> {
        CoefficientFrame::from_coefficients(
            *self.times.last().unwrap_or(&0.0),
            self.c.last().map(Vec::as_slice).unwrap_or(&[]),
            self.lambda.last().map(Vec::as_slice).unwrap_or(&[]),
        )
    }

    /// Rows `t,n,c_n,lambda_n` (lambda_1 = 0).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,n,c,lambda\n");
        for (i, t) in self.times.iter().enumerate() {
            for (j, c) in self.c[i].iter().enumerate() {
                let l = if j == 0 { 0.0 } else { self.lambda[i][j - 1] };
                out.push_str(&format!("{t},{},{c},{l}\n", j + 1));
            }
        }
        out
    }
}

/// Classical RK4 on the closed lattice (c_{N+1} = 1, lambda_{N+1} = 0), which is exact when
/// N equals the number of nodes of the generating measure. Samples about 100 frames.
pub fn integrate_flow(
    initial: &CoefficientFrame<f64>,
    params: &TodaParams,
    sched: Option<&PerturbationSchedule>,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::Domain("steps must be >= 1".into()));
    }
    let big_n = initial.levels();
    let t0 = initial.t;
    let h = (t_end - t0) / steps as f64;
    let every = (steps / 100).max(1);
    // state = c_1..c_N followed by lambda_2..lambda_N
    let mut y: Vec<f64> = initial.c[1..].iter().chain(&initial.lambda[2..]).copied().collect();
    let split = big_n;

    let eval = |t: f64, y: &[f64], step: usize| -> Result<Vec<f64>> {
        let frame = CoefficientFrame::from_coefficients(t, &y[..split], &y[split..]).closed();
        let sv = sched.map(|s| s.at(t)).transpose()?;
        let mut dc = Vec::with_capacity(big_n);
        let mut dl = Vec::with_capacity(big_n.saturating_sub(1));
        for n in 1..=big_n {
            let (a, b) = toda_rhs_guarded(&frame, params, sv.as_ref(), n, BLOWUP_DENOMINATOR).map_err(|e| match e {
                Error::DivisionByZero(what) => {
                    Error::BlowUp { step, reason: format!("denominator {what} below 1e-12") }
                }
                other => other,
            })?;
            dc.push(a);
            if n >= 2 {
                dl.push(b);
            }
        }
        dc.extend(dl);
        Ok(dc)
    };
    let axpy = |y: &[f64], k: &[f64], s: f64| y.iter().zip(k).map(|(a, b)| a + s * b).collect::<Vec<_>>();

    let mut traj = Trajectory { times: Vec::new(), c: Vec::new(), lambda: Vec::new() };
    let mut record = |t: f64, y: &[f64]| {
        traj.times.push(t);
        traj.c.push(y[..split].to_vec());
        traj.lambda.push(y[split..].to_vec());
    };
    record(t0, &y);
    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * h;
        let k1 = eval(t, &y, step)?;
        let k2 = eval(t + h / 2.0, &axpy(&y, &k1, h / 2.0), step)?;
        let k3 = eval(t + h / 2.0, &axpy(&y, &k2, h / 2.0), step)?;
        let k4 = eval(t + h, &axpy(&y, &k3, h), step)?;
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if let Some(v) = y[..split].iter().find(|v| !v.is_finite() || v.abs() > BLOWUP_MAGNITUDE) {
            return Err(Error::BlowUp { step, reason: format!("|c| = {v} exceeds 1e12") });
        }
        if step % every == 0 || step == steps {
            record(t0 + step as f64 * h, &y);
        }
    }
    Ok(traj)
}
