//! Positive chain sequences, their parameter sequences, and the Szegő
//! polynomials they generate on the unit circle.
//!
//! A chain sequence {d_n}_{n>=1} satisfies d_{n+1} = (1 - g_n) g_{n+1} for
//! some g_0 in [0,1), 0 < g_n < 1. The minimal sequence has g_0 = 0.

use num::{Complex, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyPair};
use crate::recurrence::Sequence;
use crate::scalar::{int, rat, Rational, RealScalar, Scalar};
use crate::stieltjes::ContinuedFraction;

pub const MAX_START_DEPTH: usize = 1000;
pub const MAX_DEPTH_CAP: usize = 1 << 27;
pub const SPPCS_TOL: f64 = 1e-6;

#[derive(Clone)]
pub struct ChainSequence<S> {
    d: Sequence<S>,
    pub label: String,
}

impl<S: Scalar> std::fmt::Debug for ChainSequence<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {:?}", self.label, self.d)
    }
}

impl<S: Scalar> ChainSequence<S> {
    /// `values[0]` is d_1.
    pub fn from_list(values: Vec<S>, label: impl Into<String>) -> Self {
        ChainSequence { d: Sequence::list("d", 1, values), label: label.into() }
    }

    pub fn from_rule(f: impl Fn(usize) -> Result<S> + Send + Sync + 'static, label: impl Into<String>) -> Self {
        ChainSequence { d: Sequence::rule("d", 1, f), label: label.into() }
    }

    /// d_n for n >= 1.
    pub fn d(&self, n: usize) -> Result<S> {
        if n == 0 {
            return Err(Error::Domain("chain sequences are indexed from 1".into()));
        }
        self.d.get(n)
    }

    /// d_index -> nu * d_index.
    pub fn co_dilate(&self, index: usize, nu: S) -> Result<Self> {
        let mut d = self.d.clone();
        d.set(index, self.d(index)? * nu.clone());
        Ok(ChainSequence { d, label: format!("{} [d_{index} *= {nu}]", self.label) })
    }

    /// The sequence {d_{n+1}}_{n>=1}.
    pub fn tail(&self) -> Self {
        let d = self.d.clone();
        ChainSequence::from_rule(move |n| d.get(n + 1), format!("tail of {}", self.label))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Send + Sync + Clone + 'static) -> ChainSequence<T> {
        ChainSequence { d: self.d.map(f), label: self.label.clone() }
    }
}

impl ChainSequence<Rational> {
    pub fn to_f64(&self) -> ChainSequence<f64> {
        self.map(|r| r.to_f64())
    }
}

/// [m_0 = 0, m_1, ..., m_N] from m_{n+1} = d_{n+1} / (1 - m_n).
pub fn minimal_parameters<S: RealScalar>(d: &ChainSequence<S>, n: usize) -> Result<Vec<S>> {
    let mut m = vec![S::zero()];
    for j in 0..n {
        let next = d.d(j + 1)? / (S::one() - m[j].clone());
        if !(next.is_positive() && next < S::one()) {
            return Err(Error::NotChain { index: j + 1, value: next.to_f64() });
        }
        m.push(next);
    }
    Ok(m)
}

/// [g_0 .. g_N] from g_depth = 1, g_n = 1 - d_{n+1} / g_{n+1}.
pub fn maximal_parameters<S: RealScalar>(d: &ChainSequence<S>, n: usize, tail_depth: usize) -> Result<Vec<S>> {
    if tail_depth < n {
        return Err(Error::Domain(format!("tail depth {tail_depth} < N = {n}")));
    }
    let mut g = S::one();
    let mut out = vec![S::zero(); n + 1];
    if tail_depth == n {
        out[n] = g.clone();
    }
    for j in (0..tail_depth).rev() {
        g = S::one() - d.d(j + 1)? / g;
        // g_0 may reach 0 for single-parameter sequences; interior breakdown is an error.
        if g < S::zero() || (j > 0 && !g.is_positive()) {
            return Err(Error::Breakdown(j));
        }
        if j <= n {
            out[j] = g.clone();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalEstimate {
    pub params: Vec<f64>,
    pub tail_depth: usize,
    /// Last change between successive doublings (max over entries).
    pub last_change: f64,
    pub converged: bool,
}

/// Backward recursion from depth 10^3, doubled until successive results differ by < `tol`.
pub fn maximal_parameters_converged(d: &ChainSequence<f64>, n: usize, tol: f64) -> Result<MaximalEstimate> {
    let mut depth = MAX_START_DEPTH.max(n);
    let mut prev = maximal_parameters(d, n, depth)?;
    loop {
        let next_depth = depth * 2;
        let next = maximal_parameters(d, n, next_depth)?;
        let change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change < tol || next_depth >= MAX_DEPTH_CAP {
            return Ok(MaximalEstimate {
                params: next,
                tail_depth: next_depth,
                last_change: change,
                converged: change < tol,
            });
        }
        depth = next_depth;
        prev = next;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainAnalysis {
    pub minimal: Vec<f64>,
    pub maximal: MaximalEstimate,
    /// Semi-decision: max |M_n - m_n| < 1e-6 over the computed range.
    pub sppcs: bool,
    pub gap: f64,
}

pub fn analyze(d: &ChainSequence<f64>, n: usize) -> Result<ChainAnalysis> {
    let minimal = minimal_parameters(d, n)?;
    let maximal = maximal_parameters_converged(d, n, 1e-8)?;
    let gap = minimal.iter().zip(&maximal.params).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ChainAnalysis { minimal, maximal, sppcs: gap < SPPCS_TOL, gap })
}

/// The complementary chain a_{n+1} = (1 - k_n) k_{n+1}, k_0 = 0, k_n = 1 - m_n (first N terms).
pub fn complementary<S: RealScalar>(d: &ChainSequence<S>, n: usize) -> Result<ChainSequence<S>> {
    let m = minimal_parameters(d, n)?;
    let k: Vec<S> = m.iter().enumerate().map(|(i, v)| if i == 0 { S::zero() } else { S::one() - v.clone() }).collect();
    let a = (0..n).map(|j| (S::one() - k[j].clone()) * k[j + 1].clone()).collect();
    Ok(ChainSequence::from_list(a, format!("complement of {}", d.label)))
}

/// r_0 = 1, r_1 = (1+i beta) z + (1 - i beta),
/// r_{n+1} = ((1+i beta) z + (1-i beta)) r_n - 4 d_{n+1} z r_{n-1}; beta is a real constant.
pub fn r_polynomials<S: RealScalar>(beta: &S, d: &ChainSequence<S>, n: usize) -> Result<Vec<Poly<Complex<S>>>> {
    let lin = Poly::new(vec![Complex::new(S::one(), -beta.clone()), Complex::new(S::one(), beta.clone())]);
    let mut r = vec![Poly::one()];
    if n >= 1 {
        r.push(lin.clone());
    }
    for j in 1..n {
        let four_d = Complex::new(S::from_i64(4) * d.d(j + 1)?, S::zero());
        let next = &lin * &r[j] - r[j - 1].shift_up(1).scale(&four_d);
        r.push(next);
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct SzegoFamily<S> {
    /// phi_0 .. phi_N.
    pub phi: Vec<Poly<Complex<S>>>,
    /// alpha_0 .. alpha_{N-1}, alpha_{n-1} = -conj(phi_n(0)).
    pub verblunsky: Vec<Complex<S>>,
}

/// phi_n prod_{k<=n}(1 + i beta) = r_n - 2 (1 - m_n) r_{n-1}.
pub fn szego_from_chain<S: RealScalar>(beta: &S, d: &ChainSequence<S>, n: usize) -> Result<SzegoFamily<S>> {
    let r = r_polynomials(beta, d, n)?;
    let m = minimal_parameters(d, n)?;
    let unit = Complex::new(S::one(), beta.clone());
    let mut scale = Complex::new(S::one(), S::zero());
    let mut phi = vec![Poly::one()];
    let mut verblunsky = Vec::new();
    for j in 1..=n {
        scale = scale * unit.clone();
        let two = Complex::new(S::from_i64(2) * (S::one() - m[j].clone()), S::zero());
        let num = &r[j] - &r[j - 1].scale(&two);
        let inv = Complex::new(S::one(), S::zero()) / scale.clone();
        let p = num.scale(&inv);
        verblunsky.push(-p.coeff(0).conj());
        phi.push(p);
    }
    Ok(SzegoFamily { phi, verblunsky })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaOrigin {
    Explicit,
    FromChain,
    FromPhi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub n: usize,
    /// delta_{n+1} delta_n = delta_{n+1} - delta_n.
    pub condition: bool,
    /// d_{n+1} = (1 + delta_n)(1 - delta_{n+1}) / 4.
    pub product_form: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerblunskySeq<S> {
    /// delta_1 .. delta_N.
    pub delta: Vec<S>,
    pub origin: DeltaOrigin,
    pub checks: Vec<DeltaCheck>,
}

impl<S: Scalar> VerblunskySeq<S> {
    pub fn explicit(delta: Vec<S>) -> Self {
        VerblunskySeq { delta, origin: DeltaOrigin::Explicit, checks: Vec::new() }
    }

    /// delta_n for n >= 1.
    pub fn get(&self, n: usize) -> Option<&S> {
        n.checked_sub(1).and_then(|i| self.delta.get(i))
    }
}

/// delta_{n+1} = (1 - 4 d_{n+1}) / (2 delta_n), starting from delta_1.
pub fn delta_from_chain<S: RealScalar>(delta1: S, d: &ChainSequence<S>, n: usize) -> Result<VerblunskySeq<S>> {
    let mut delta = vec![delta1];
    let mut checks = Vec::new();
    let quarter = S::one() / S::from_i64(4);
    for j in 1..n {
        let dj = delta[j - 1].clone();
        if dj.is_zero() {
            return Err(Error::DivisionByZero(format!("delta_{j} = 0")));
        }
        let dn = d.d(j + 1)?;
        let next = (S::one() - S::from_i64(4) * dn.clone()) / (S::from_i64(2) * dj.clone());
        let condition = (next.clone() * dj.clone()).close_to(&(next.clone() - dj.clone()), 1e-12);
        let product_form = dn.close_to(&(quarter.clone() * (S::one() + dj) * (S::one() - next.clone())), 1e-12);
        checks.push(DeltaCheck { n: j, condition, product_form });
        delta.push(next);
    }
    Ok(VerblunskySeq { delta, origin: DeltaOrigin::FromChain, checks })
}

/// delta^_n = delta_n (n <= k), delta^_{k+1} = delta_{k+1} + 2(1 - nu) d_{k+1} / delta_k,
/// then delta^_{n+1} = (1 - 4 d_{n+1}) / (2 delta^_n).
pub fn perturbed_delta<S: RealScalar>(
    delta: &VerblunskySeq<S>,
    d: &ChainSequence<S>,
    k: usize,
    nu: S,
    n: usize,
) -> Result<VerblunskySeq<S>> {
    let need = |i: usize| delta.get(i).cloned().ok_or_else(|| Error::Domain(format!("delta_{i} not available")));
    if k == 0 {
        return Err(Error::Domain("perturbation level must be >= 1".into()));
    }
    let dk = need(k)?;
    if dk.is_zero() {
        return Err(Error::DivisionByZero(format!("delta_{k} = 0")));
    }
    let mut out: Vec<S> = (1..=k.min(n)).map(need).collect::<Result<_>>()?;
    if n > k {
        let two = S::from_i64(2);
        out.push(need(k + 1)? + two.clone() * (S::one() - nu) * d.d(k + 1)? / dk);
        for j in k + 1..n {
            let prev = out[j - 1].clone();
            if prev.is_zero() {
                return Err(Error::DivisionByZero(format!("perturbed delta_{j} = 0")));
            }
            out.push((S::one() - S::from_i64(4) * d.d(j + 1)?) / (two.clone() * prev));
        }
    }
    Ok(VerblunskySeq { delta: out, origin: delta.origin, checks: Vec::new() })
}

/// Szegő recurrences phi*_n = conj(delta_n) z phi_{n-1} + phi*_{n-1},
/// phi_n = delta_n phi*_n + (1 - |delta_n|^2) z phi_{n-1}.
pub fn szego_from_delta<S: Scalar>(delta: &[S], n: usize) -> Result<PolyPair<S>> {
    let mut phi = vec![Poly::one()];
    let mut star = vec![Poly::one()];
    for j in 1..=n {
        let dj = delta.get(j - 1).ok_or_else(|| Error::Domain(format!("delta_{j} not available")))?;
        if !dj.modulus_lt_one() {
            return Err(Error::Modulus(j));
        }
        let zphi = phi[j - 1].shift_up(1);
        let s = &zphi.scale(&dj.conj()) + &star[j - 1];
        let p = &s.scale(dj) + &zphi.scale(&(S::one() - dj.abs_sq()));
        phi.push(p);
        star.push(s);
    }
    Ok((phi, star))
}

/// Tail of the PPC-fraction, -2 delta_0 / (1 + 1/(conj(delta_1) z + (1-|delta_1|^2) z/(delta_1 + ...))).
/// Its depth-(2n+1) denominator is phi_n, its depth-2n denominator phi*_n.
pub fn ppc_fraction<S: Scalar>(delta0: S, delta: Vec<S>) -> ContinuedFraction<S> {
    let dl = delta.clone();
    ContinuedFraction::new(
        move |j| {
            Ok(match j {
                0 => Poly::constant(-(S::from_i64(2) * delta0.clone())),
                _ if j % 2 == 1 => Poly::one(),
                _ => {
                    let dj =
                        dl.get(j / 2 - 1).ok_or_else(|| Error::Domain(format!("delta_{} not available", j / 2)))?;
                    Poly::monomial(1).scale(&(S::one() - dj.abs_sq()))
                }
            })
        },
        move |j| {
            Ok(match j {
                0 => Poly::one(),
                _ => {
                    let dj = delta
                        .get(j.div_ceil(2) - 1)
                        .ok_or_else(|| Error::Domain(format!("delta_{} not available", j.div_ceil(2))))?;
                    if j % 2 == 1 {
                        Poly::monomial(1).scale(&dj.conj())
                    } else {
                        Poly::constant(dj.clone())
                    }
                }
            })
        },
    )
}

/// delta_n = -1/(n + gamma).
pub fn caratheodory_delta(gamma: &Rational, n: usize) -> Vec<Rational> {
    (1..=n).map(|j| -(Rational::one() / (int(j as i64) + gamma.clone()))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EtaMetadata {
    pub eta: String,
    pub t: String,
    /// Minimal parameters of the tail {d_{n+1}}: n / (2(eta + n + 1)), n = 0..8.
    pub tail_minimal: Vec<String>,
    /// (2 eta + n) / (2 (eta + n)), n = 1..8, for eta > -1/2.
    pub maximal: Option<Vec<String>>,
    /// The tail is single-parameter iff eta <= -1/2.
    pub tail_sppcs: bool,
    /// The augmented head d_1 = (1 - t) M_1 is positive (eta > -1/2).
    pub augmented_valid: bool,
    /// The augmented sequence is single-parameter iff t = 0.
    pub augmented_sppcs: bool,
}

/// d_{n+1} = n(2 eta + n + 1) / (4 (eta + n)(eta + n + 1)) for n >= 1.
pub fn eta_d(eta: &Rational, n: usize) -> Rational {
    let nn = int(n as i64);
    let two = int(2);
    nn.clone() * (two * eta.clone() + nn.clone() + int(1))
        / (int(4) * (eta.clone() + nn.clone()) * (eta.clone() + nn + int(1)))
}

/// M_n = (2 eta + n) / (2 (eta + n)).
pub fn eta_maximal(eta: &Rational, n: usize) -> Rational {
    let nn = int(n as i64);
    (int(2) * eta.clone() + nn.clone()) / (int(2) * (eta.clone() + nn))
}

/// The eta-family chain sequence with augmented head d_1 = (1 - t) M_1.
pub fn eta_family(eta: &Rational, t: &Rational) -> Result<(ChainSequence<Rational>, EtaMetadata)> {
    if *eta <= int(-1) {
        return Err(Error::Domain(format!("eta must exceed -1, got {eta}")));
    }
    if *t < Rational::zero() || *t >= Rational::one() {
        return Err(Error::Domain(format!("t must lie in [0, 1), got {t}")));
    }
    let half = rat(-1, 2);
    let tail_sppcs = *eta <= half;
    let d1 = (Rational::one() - t.clone()) * eta_maximal(eta, 1);
    let e = eta.clone();
    let chain = ChainSequence::from_rule(
        move |n| if n == 1 { Ok(d1.clone()) } else { Ok(eta_d(&e, n - 1)) },
        format!("eta(eta={eta},t={t})"),
    );
    let meta = EtaMetadata {
        eta: eta.to_string(),
        t: t.to_string(),
        tail_minimal: (0..=8).map(|n| (int(n) / (int(2) * (eta.clone() + int(n) + int(1)))).to_string()).collect(),
        maximal: (!tail_sppcs).then(|| (1..=8).map(|n| eta_maximal(eta, n).to_string()).collect()),
        tail_sppcs,
        augmented_valid: !tail_sppcs,
        augmented_sppcs: !tail_sppcs && t.is_zero(),
    };
    Ok((chain, meta))
}

/// Float version of the eta-family chain, for deep maximal-parameter recursions.
pub fn eta_chain_f64(eta: f64, t: f64) -> ChainSequence<f64> {
    let d1 = (1.0 - t) * (2.0 * eta + 1.0) / (2.0 * (eta + 1.0));
    ChainSequence::from_rule(
        move |n| {
            if n == 1 {
                return Ok(d1);
            }
            let m = (n - 1) as f64;
            Ok(m * (2.0 * eta + m + 1.0) / (4.0 * (eta + m) * (eta + m + 1.0)))
        },
        format!("eta(eta={eta},t={t})"),
    )
}

/// omega when r = z^n + omega (z^{n-1} + ... + z) + 1 (n >= 2), else None.
pub fn palindromic_omega(r: &Poly<Rational>) -> Option<Rational> {
    let n = usize::try_from(r.degree()).ok().filter(|&n| n >= 2)?;
    let omega = r.coeff(1);
    let ends = r.coeff(0).is_one() && r.coeff(n).is_one();
    (ends && (1..n).all(|j| r.coeff(j) == omega)).then_some(omega)
}

/// {1/4, 1/4, ...}
pub fn quarter_chain<S: Scalar>() -> ChainSequence<S> {
    ChainSequence::from_rule(|_| Ok(S::one() / S::from_i64(4)), "{1/4}")
}

/// {1/2, 1/4, 1/4, ...}
pub fn half_quarter_chain<S: Scalar>() -> ChainSequence<S> {
    ChainSequence::from_rule(
        |n| Ok(if n == 1 { S::one() / S::from_i64(2) } else { S::one() / S::from_i64(4) }),
        "{1/2,1/4}",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_parameter_examples() {
        let m = minimal_parameters(&quarter_chain::<Rational>(), 3).unwrap();
        assert_eq!(m, vec![int(0), rat(1, 4), rat(1, 3), rat(3, 8)]);
        let m = minimal_parameters(&half_quarter_chain::<Rational>(), 3).unwrap();
        assert_eq!(m, vec![int(0), rat(1, 2), rat(1, 2), rat(1, 2)]);
        let bad = ChainSequence::from_list(vec![rat(1, 2), rat(3, 4)], "bad");
        assert!(matches!(minimal_parameters(&bad, 2), Err(Error::NotChain { index: 2, .. })));
    }

    #[test]
    fn float_eta_chain_matches_rational() {
        for (eta, t) in [(rat(1, 1), rat(0, 1)), (rat(-1, 4), rat(1, 3)), (rat(5, 2), rat(1, 2))] {
            let (exact, _) = eta_family(&eta, &t).unwrap();
            let f = eta_chain_f64(eta.to_f64(), t.to_f64());
            for n in 1..=12 {
                assert!((exact.d(n).unwrap().to_f64() - f.d(n).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn maximal_quarter_chain_matches_exact_tail_formula() {
        // Backward recursion from g_T = 1 gives g_n = 1/2 + 1/(2(T-n)+2) exactly.
        let t = 200usize;
        let g = maximal_parameters(&quarter_chain::<Rational>(), 2, t).unwrap();
        for (n, v) in g.iter().enumerate() {
            assert_eq!(*v, rat(1, 2) + Rational::one() / int(2 * (t - n) as i64 + 2));
        }
    }

    #[test]
    fn maximal_converged_quarter_and_half_quarter() {
        let est = maximal_parameters_converged(&quarter_chain::<f64>(), 2, 1e-8).unwrap();
        assert!(est.converged);
        assert!(est.params.iter().all(|g| (g - 0.5).abs() < 1e-8), "{:?}", est.params);
        let a = analyze(&half_quarter_chain::<f64>(), 3).unwrap();
        assert!(a.sppcs, "gap {}", a.gap);
    }

    #[test]
    fn eta_one_maximal_at_depth_thousand() {
        let (chain, meta) = eta_family(&int(1), &int(0)).unwrap();
        let g = maximal_parameters(&chain.to_f64(), 4, 1000).unwrap();
        for (n, gn) in g.iter().enumerate().take(5).skip(1) {
            assert!((gn - eta_maximal(&int(1), n).to_f64()).abs() < 1e-6);
        }
        assert!(meta.augmented_sppcs && !meta.tail_sppcs);
        assert_eq!(chain.d(1).unwrap(), rat(3, 4));
    }

    #[test]
    fn eta_family_minimal_and_complement() {
        let (chain, _) = eta_family(&int(1), &int(0)).unwrap();
        let a = complementary(&chain, 6).unwrap();
        for n in 1..=6 {
            assert_eq!(a.d(n).unwrap(), rat(1, 4));
        }
        let (chain0, _) = eta_family(&int(0), &int(0)).unwrap();
        let a = complementary(&chain0, 6).unwrap();
        assert_eq!(a.d(1).unwrap(), rat(1, 2));
        for n in 2..=6 {
            assert_eq!(a.d(n).unwrap(), rat(1, 4));
        }
        let tail_m = minimal_parameters(&chain0.tail(), 5).unwrap();
        for (n, m) in tail_m.iter().enumerate() {
            assert_eq!(*m, int(n as i64) / int(2 * n as i64 + 2));
        }
        assert!(eta_family(&int(-1), &int(0)).is_err());
        assert!(eta_family(&int(0), &int(1)).is_err());
    }

    #[test]
    fn eta_negative_three_quarters_tail_is_single_parameter() {
        let (chain, meta) = eta_family(&rat(-3, 4), &int(0)).unwrap();
        assert!(meta.tail_sppcs && !meta.augmented_valid);
        let tail = chain.tail();
        let m = minimal_parameters(&tail, 4).unwrap();
        for (n, v) in m.iter().enumerate() {
            assert_eq!(*v, int(n as i64) / (int(2) * (rat(-3, 4) + int(n as i64 + 1))));
        }
        // The gap closes slowly (like depth^{-1/2}) but monotonically.
        let tf = tail.to_f64();
        let mf = minimal_parameters(&tf, 3).unwrap();
        let gap = |depth| {
            let g = maximal_parameters(&tf, 3, depth).unwrap();
            g.iter().zip(&mf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (g1, g2, g3) = (gap(1_000), gap(10_000), gap(100_000));
        assert!(g1 > g2 && g2 > g3);
        assert!(g3 / g2 < 0.4 && g2 / g1 < 0.4);
    }

    #[test]
    fn r_polynomial_examples() {
        let r = r_polynomials(&int(0), &quarter_chain::<Rational>(), 3).unwrap();
        let real: Vec<Poly<Rational>> = r.iter().map(|p| p.real().unwrap()).collect();
        assert_eq!(real[1], Poly::new(vec![int(1), int(1)]));
        assert_eq!(real[2], Poly::new(vec![int(1), int(1), int(1)]));
        assert_eq!(real[3], Poly::new(vec![int(1); 4]));
        let rb = r_polynomials(&rat(1, 2), &quarter_chain::<Rational>(), 2).unwrap();
        assert!(rb[2].real().is_none());
    }

    #[test]
    fn szego_chain_examples() {
        let fam = szego_from_chain(&int(0), &half_quarter_chain::<Rational>(), 6).unwrap();
        for (n, p) in fam.phi.iter().enumerate() {
            assert_eq!(p.real().unwrap(), Poly::monomial(n));
        }
        let fam = szego_from_chain(&int(0), &quarter_chain::<Rational>(), 6).unwrap();
        for n in 1..=6 {
            assert_eq!(-fam.phi[n].coeff(0).re.clone(), Rational::one() / int(n as i64 + 1));
            assert_eq!(fam.verblunsky[n - 1].re, Rational::one() / int(n as i64 + 1));
        }
        let single = ChainSequence::from_list(vec![rat(1, 2)], "d1");
        let fam = szego_from_chain(&int(0), &single, 1).unwrap();
        assert_eq!(fam.phi[1].real().unwrap(), Poly::monomial(1));
    }

    #[test]
    fn delta_recursion_examples() {
        let v = delta_from_chain(rat(1, 2), &quarter_chain::<Rational>(), 2).unwrap();
        assert_eq!(v.delta, vec![rat(1, 2), int(0)]);
        assert!(delta_from_chain(rat(1, 2), &quarter_chain::<Rational>(), 3).is_err());

        let delta = caratheodory_delta(&int(1), 6);
        let d = ChainSequence::from_list(
            std::iter::once(int(0))
                .chain((1..6).map(|n| rat(1, 4) * (int(1) + delta[n - 1].clone()) * (int(1) - delta[n].clone())))
                .collect(),
            "caratheodory",
        );
        assert_eq!(d.d(2).unwrap(), rat(1, 6));
        let v = delta_from_chain(rat(-1, 2), &d, 6).unwrap();
        assert_eq!(v.delta, delta);
        assert!(v.checks.iter().all(|c| c.condition && c.product_form));
        for n in 1..6 {
            let (a, b) = (&delta[n - 1], &delta[n]);
            assert_eq!(b.clone() * a.clone(), b.clone() - a.clone());
        }
    }

    #[test]
    fn perturbed_delta_examples() {
        let delta = caratheodory_delta(&int(1), 5);
        let d = ChainSequence::from_list(
            std::iter::once(int(0))
                .chain((1..5).map(|n| rat(1, 4) * (int(1) + delta[n - 1].clone()) * (int(1) - delta[n].clone())))
                .collect(),
            "caratheodory",
        );
        let v = VerblunskySeq::explicit(delta.clone());
        assert_eq!(perturbed_delta(&v, &d, 1, int(1), 5).unwrap().delta, delta);
        let p = perturbed_delta(&v, &d, 1, rat(1, 2), 5).unwrap();
        assert_eq!(p.delta[1], rat(-2, 3));
        let alt = (int(1) - int(4) * rat(1, 2) * d.d(2).unwrap()) / (int(2) * delta[0].clone());
        assert_eq!(p.delta[1], alt);
    }

    #[test]
    fn szego_delta_examples() {
        let (phi, star) = szego_from_delta(&vec![int(0); 4], 4).unwrap();
        for n in 0..=4 {
            assert_eq!(phi[n], Poly::monomial(n));
            assert_eq!(star[n], Poly::one());
        }
        let (phi, star) = szego_from_delta(&[rat(1, 2)], 1).unwrap();
        assert_eq!(star[1], Poly::new(vec![int(1), rat(1, 2)]));
        assert_eq!(phi[1].coeff(0), rat(1, 2));
        let delta: Vec<Rational> = (1..=5).map(|n| -(Rational::one() / int(n + 2))).collect();
        let (phi, star) = szego_from_delta(&delta, 5).unwrap();
        for n in 0..=5 {
            assert_eq!(star[n], phi[n].reversed_conj(n));
        }
        assert_eq!(szego_from_delta(&[int(1)], 1), Err(Error::Modulus(1)));
    }

    #[test]
    fn chain_szego_matches_delta_szego() {
        let fam = szego_from_chain(&int(0), &quarter_chain::<Rational>(), 6).unwrap();
        let delta: Vec<Complex<Rational>> = (1..=6).map(|n| fam.phi[n].coeff(0)).collect();
        let (phi, _) = szego_from_delta(&delta, 6).unwrap();
        assert_eq!(phi, fam.phi);
    }

    #[test]
    fn ppc_denominators_are_szego() {
        let delta: Vec<Rational> = (1..=4).map(|n| -(Rational::one() / int(n + 1))).collect();
        let cf = ppc_fraction(rat(1, 3), delta.clone());
        let (_, b) = cf.wallis_polys(9).unwrap();
        let (phi, star) = szego_from_delta(&delta, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(b[2 * n + 1], phi[n]);
            if n >= 1 {
                assert_eq!(b[2 * n], star[n]);
            }
        }
    }

    #[test]
    fn complement_is_an_involution_on_minimal_parameters() {
        let d = half_quarter_chain::<Rational>();
        let cc = complementary(&complementary(&d, 8).unwrap(), 8).unwrap();
        assert_eq!(minimal_parameters(&cc, 8).unwrap(), minimal_parameters(&d, 8).unwrap());
    }

    #[test]
    fn palindromic_r_tilde() {
        for eta in [int(0), int(1)] {
            let (chain, _) = eta_family(&eta, &int(0)).unwrap();
            let a = complementary(&chain, 9).unwrap();
            let r = r_polynomials(&int(0), &a, 8).unwrap();
            for p in &r[2..] {
                assert_eq!(palindromic_omega(&p.real().unwrap()), Some(int(1)));
            }
        }
        assert_eq!(palindromic_omega(&Poly::new(vec![int(1), int(2), int(1)])), Some(int(2)));
        assert_eq!(palindromic_omega(&Poly::new(vec![int(1), int(2), int(3), int(1)])), None);
    }

    #[test]
    fn co_dilation_example() {
        let d = half_quarter_chain::<Rational>().co_dilate(1, rat(1, 2)).unwrap();
        for n in 1..=6 {
            assert_eq!(d.d(n).unwrap(), rat(1, 4));
        }
    }
}
