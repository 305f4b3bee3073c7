//! Single-level perturbations c_k -> c_k + mu, lambda_k -> nu * lambda_k.

use std::fmt;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::recurrence::{generate_family, generate_second_kind, CoefficientSequences};
use crate::scalar::{parse_rational, Rational, RealScalar, Scalar};
use crate::stieltjes::Homography;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    Identity,
    CoRecursive,
    CoDilated,
    CoModified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation<S> {
    pub k: usize,
    pub mu: S,
    pub nu: S,
}

impl<S: RealScalar> Perturbation<S> {
    pub fn new(k: usize, mu: S, nu: S) -> Result<Self> {
        if !nu.is_positive() {
            return Err(Error::InvalidPerturbation(format!("nu must be positive, got {nu}")));
        }
        if k == 0 && !nu.is_one() {
            return Err(Error::VacuousCoDilation);
        }
        Ok(Perturbation { k, mu, nu })
    }
}

impl<S: Scalar> Perturbation<S> {
    pub fn identity(k: usize) -> Self {
        Perturbation { k, mu: S::zero(), nu: S::one() }
    }

    pub fn kind(&self) -> PerturbationKind {
        match (self.mu.is_zero(), self.nu.is_one()) {
            (true, true) => PerturbationKind::Identity,
            (false, true) => PerturbationKind::CoRecursive,
            (true, false) => PerturbationKind::CoDilated,
            (false, false) => PerturbationKind::CoModified,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Perturbation<T> {
        Perturbation { k: self.k, mu: f(&self.mu), nu: f(&self.nu) }
    }
}

impl<S: Scalar> fmt::Display for Perturbation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={},mu={},nu={}", self.k, self.mu, self.nu)
    }
}

/// Parse `k=<int>,mu=<rat>,nu=<rat>[;...]`. Missing mu/nu default to 0/1.
pub fn parse_perturbations(s: &str) -> Result<Vec<Perturbation<Rational>>> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (mut k, mut mu, mut nu) = (None, Rational::zero(), Rational::one());
        for kv in part.split(',') {
            let (key, val) =
                kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))?;
            match key.trim() {
                "k" => k = Some(val.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad level {val:?}")))?),
                "mu" => mu = parse_rational(val)?,
                "nu" => nu = parse_rational(val)?,
                other => return Err(Error::Parse(format!("unknown perturbation key {other:?}"))),
            }
        }
        let k = k.ok_or_else(|| Error::Parse(format!("perturbation without level: {part:?}")))?;
        out.push(Perturbation::new(k, mu, nu)?);
    }
    Ok(out)
}

/// c*_k = c_k + mu, lambda~_k = nu lambda_k; everything else unchanged.
pub fn apply_perturbation<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
) -> Result<CoefficientSequences<S>> {
    let k = pert.k;
    if k == 0 && !pert.nu.is_one() {
        return Err(Error::VacuousCoDilation);
    }
    let mut out = seqs.clone();
    let ck = seqs.c(k)? + pert.mu.clone();
    out.c.set(k, ck.clone());
    let mut positive = seqs.positive_l;
    if k >= 1 {
        let lk = seqs.lambda(k)? * pert.nu.clone();
        if lk.is_zero() {
            return Err(Error::ZeroLambda(k));
        }
        positive &= lk.is_positive();
        out.lambda.set(k, lk);
    }
    if seqs.range.is_none_or(|r| k < r) {
        positive &= ck.is_positive();
    }
    out.positive_l = positive;
    out.label = format!("{} [{}]", seqs.label, pert);
    Ok(out)
}

/// Apply several perturbations in increasing level order.
pub fn apply_all<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    perts: &[Perturbation<S>],
) -> Result<CoefficientSequences<S>> {
    let mut sorted: Vec<&Perturbation<S>> = perts.iter().collect();
    sorted.sort_by_key(|p| p.k);
    sorted.iter().try_fold(seqs.clone(), |s, p| apply_perturbation(&s, p))
}

/// (S_k, Ŝ_k) with S_k = mu P_k + (nu-1) lambda_k (z-a_k) P_{k-1} and
/// Ŝ_k = -mu Q_k - (nu-1) lambda_k (z-a_k) Q_{k-1}.
pub fn s_polynomials<S: Scalar>(seqs: &CoefficientSequences<S>, pert: &Perturbation<S>) -> Result<(Poly<S>, Poly<S>)> {
    let k = pert.k;
    let p = generate_family(seqs, k, 0)?;
    let q = generate_second_kind(seqs, k)?;
    let mut s = p[k].scale(&pert.mu);
    let mut sh = -&q[k].scale(&pert.mu);
    if k >= 1 && !pert.nu.is_one() {
        let t = seqs.lambda_term(k)?.scale(&(pert.nu.clone() - S::one()));
        s = s + &t * &p[k - 1];
        sh = sh - &t * &q[k - 1];
    }
    Ok((s, sh))
}

/// Ground truth: run the recurrence on the perturbed coefficients.
pub fn perturbed_family_direct<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    n: usize,
) -> Result<Vec<Poly<S>>> {
    generate_family(&apply_perturbation(seqs, pert)?, n, 0)
}

/// Which associated family multiplies S_k in P_n(.;mu,nu) = P_n - S_k F_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AssocConvention {
    /// F = associated family of order k, degree m = n - k.
    ShiftK,
    /// F = associated family of order k + 1, degree m = n - k - 1.
    ShiftK1,
}

impl AssocConvention {
    pub const CANDIDATES: [AssocConvention; 2] = [AssocConvention::ShiftK, AssocConvention::ShiftK1];

    pub fn shift(self, k: usize) -> usize {
        match self {
            AssocConvention::ShiftK => k,
            AssocConvention::ShiftK1 => k + 1,
        }
    }

    /// Degree of the associated polynomial used at degree n, None when it is F_{-1} = 0.
    pub fn degree(self, k: usize, n: usize) -> Option<usize> {
        n.checked_sub(self.shift(k))
    }
}

fn represent<S: Scalar>(
    p: &[Poly<S>],
    s_k: &Poly<S>,
    assoc: &[Poly<S>],
    conv: AssocConvention,
    k: usize,
    n: usize,
) -> Poly<S> {
    match conv.degree(k, n) {
        Some(m) => &p[n] - &(s_k * &assoc[m]),
        None => p[n].clone(),
    }
}

/// Pick the convention reproducing the direct oracle at n = k, k+1, k+2.
pub fn calibrate_representation<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
) -> Result<AssocConvention> {
    let k = pert.k;
    let top = (k + 2).min(seqs.max_degree(k + 2));
    if top < k + 1 {
        return Err(Error::Calibration(format!("level {k} leaves no degree to compare")));
    }
    let direct = perturbed_family_direct(seqs, pert, top)?;
    let p = generate_family(seqs, top, 0)?;
    let (s_k, _) = s_polynomials(seqs, pert)?;
    for conv in AssocConvention::CANDIDATES {
        let shift = conv.shift(k);
        let assoc = generate_family(seqs, top.saturating_sub(shift), shift)?;
        if (k..=top).all(|n| represent(&p, &s_k, &assoc, conv, k, n).approx_eq(&direct[n], 1e-9)) {
            return Ok(conv);
        }
    }
    Err(Error::Calibration(format!("representation at level {k}")))
}

/// P_n(.;mu,nu) = P_n - S_k F_m with the calibrated associated family.
pub fn perturbed_family_represented<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    n: usize,
) -> Result<Vec<Poly<S>>> {
    let conv = calibrate_representation(seqs, pert)?;
    let k = pert.k;
    let p = generate_family(seqs, n, 0)?;
    let (s_k, _) = s_polynomials(seqs, pert)?;
    let shift = conv.shift(k);
    let assoc = generate_family(seqs, n.saturating_sub(shift), shift)?;
    Ok((0..=n).map(|m| represent(&p, &s_k, &assoc, conv, k, m)).collect())
}

/// M_k = [[Π + S_k Q_k, S_k P_k], [Q_k Ŝ_k, Ŝ_k P_k + Π]] with Π = prod_{j=1}^k lambda_j (z - a_j).
pub fn transfer_matrix_mk<S: Scalar>(seqs: &CoefficientSequences<S>, pert: &Perturbation<S>) -> Result<Homography<S>> {
    let k = pert.k;
    let pi = seqs.lambda_product(1, k)?;
    let p = generate_family(seqs, k, 0)?;
    let q = generate_second_kind(seqs, k)?;
    let (s, sh) = s_polynomials(seqs, pert)?;
    Ok(Homography::new(&pi + &(&s * &q[k]), &s * &p[k], &q[k] * &sh, &(&sh * &p[k]) + &pi))
}

/// Π (P_{n+1}(.;mu,nu), -Q_{n+1}(.;mu,nu)) - M_k (P_{n+1}, -Q_{n+1}); zero when the identity holds.
pub fn transfer_identity_residual<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    n: usize,
) -> Result<[Poly<S>; 2]> {
    let pert_seqs = apply_perturbation(seqs, pert)?;
    let pi = seqs.lambda_product(1, pert.k)?;
    let p = generate_family(seqs, n + 1, 0)?;
    let q = generate_second_kind(seqs, n + 1)?;
    let pp = generate_family(&pert_seqs, n + 1, 0)?;
    let qp = generate_second_kind(&pert_seqs, n + 1)?;
    let m = transfer_matrix_mk(seqs, pert)?.to_matrix();
    let rhs = m.apply(&[p[n + 1].clone(), -&q[n + 1]]);
    Ok([&(&pi * &pp[n + 1]) - &rhs[0], &(&pi * &(-&qp[n + 1])) - &rhs[1]])
}

/// Closed form of P_{n+1}(z; 1) for Example 1 perturbed by mu = 1 at level 0, real z > 3.
pub fn example1_unit_shift_closed_form(n: usize, z: f64) -> f64 {
    let s = (z - 3.0).sqrt() * z.sqrt();
    let k = (n + 1) as i32;
    ((z - s - 1.0).powi(k) * (s - z + 3.0) + (z + s - 1.0).powi(k) * (s + z - 3.0)) / (2f64.powi(k + 1) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::example1;
    use crate::scalar::{int, rat};
    use crate::zeros::ljacobi_seqs;

    fn p(v: &[(i64, i64)]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn pert(k: usize, mu: Rational, nu: Rational) -> Perturbation<Rational> {
        Perturbation::new(k, mu, nu).unwrap()
    }

    #[test]
    fn kinds() {
        assert_eq!(pert(1, int(0), int(1)).kind(), PerturbationKind::Identity);
        assert_eq!(pert(1, int(2), int(1)).kind(), PerturbationKind::CoRecursive);
        assert_eq!(pert(1, int(0), int(2)).kind(), PerturbationKind::CoDilated);
        assert_eq!(pert(1, int(1), int(2)).kind(), PerturbationKind::CoModified);
        assert_eq!(Perturbation::new(0, int(1), int(2)), Err(Error::VacuousCoDilation));
        assert!(Perturbation::new(1, int(1), int(0)).is_err());
    }

    #[test]
    fn parse_spec_strings() {
        let v = parse_perturbations("k=3,mu=-1/2,nu=2; k=4,mu=0.3").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], pert(3, rat(-1, 2), int(2)));
        assert_eq!(v[1], pert(4, rat(3, 10), int(1)));
        assert!(parse_perturbations("mu=1").is_err());
        assert!(parse_perturbations("k=0,nu=2").is_err());
    }

    #[test]
    fn apply_changes_only_level_k() {
        let s = example1::<Rational>();
        let t = apply_perturbation(&s, &pert(0, int(1), int(1))).unwrap();
        assert_eq!(t.c(0).unwrap(), int(2));
        assert_eq!(t.c(1).unwrap(), int(1));
        assert_eq!(t.lambda(1).unwrap(), rat(1, 4));

        let lj = ljacobi_seqs(int(11), int(12), 10).unwrap();
        let u = apply_perturbation(&lj, &pert(4, int(-2), int(1))).unwrap();
        for n in 0..10 {
            let d = u.c(n).unwrap() - lj.c(n).unwrap();
            assert_eq!(d, if n == 4 { int(-2) } else { int(0) });
        }
    }

    #[test]
    fn s_polynomial_examples() {
        let s = example1::<Rational>();
        assert_eq!(s_polynomials(&s, &Perturbation::identity(3)).unwrap(), (Poly::zero(), Poly::zero()));
        assert_eq!(s_polynomials(&s, &pert(0, int(1), int(1))).unwrap().0, Poly::one());
        let (s1, sh1) = s_polynomials(&s, &pert(1, int(0), int(2))).unwrap();
        assert_eq!(s1, p(&[(1, 4), (1, 4)]));
        assert_eq!(sh1, Poly::zero());
    }

    #[test]
    fn example1_corecursive_direct() {
        let s = example1::<Rational>();
        let f = perturbed_family_direct(&s, &pert(0, int(1), int(1)), 2).unwrap();
        assert_eq!(f[1], p(&[(-2, 1), (1, 1)]));
        assert_eq!(f[2], p(&[(7, 4), (-13, 4), (1, 1)]));
    }

    #[test]
    fn example1_corecursive_represented() {
        let s = example1::<Rational>();
        let base = generate_family(&s, 9, 0).unwrap();
        let rep = perturbed_family_represented(&s, &pert(0, int(1), int(1)), 8).unwrap();
        for n in 0..8 {
            assert_eq!(rep[n + 1], &base[n + 1] - &base[n]);
        }
    }

    #[test]
    fn example1_corecursive_closed_form() {
        let s = example1::<Rational>();
        let f = perturbed_family_direct(&s, &pert(0, int(1), int(1)), 11).unwrap();
        for n in 0..=10usize {
            let v = f[n + 1].to_f64().eval(&4.0);
            let closed = example1_unit_shift_closed_form(n, 4.0);
            assert!((v - closed).abs() <= 1e-10 * v.abs().max(1.0), "n={n}: {v} vs {closed}");
        }
    }

    #[test]
    fn representation_calibrates_to_shift_k_plus_one() {
        let lj = ljacobi_seqs(int(11), int(12), 10).unwrap();
        let pt = pert(4, int(-2), int(1));
        assert_eq!(calibrate_representation(&lj, &pt).unwrap(), AssocConvention::ShiftK1);
        assert_eq!(perturbed_family_represented(&lj, &pt, 6).unwrap(), perturbed_family_direct(&lj, &pt, 6).unwrap());
    }

    #[test]
    fn mk_identity_and_determinant() {
        let s = example1::<Rational>();
        let m = transfer_matrix_mk(&s, &Perturbation::identity(2)).unwrap();
        let pi = s.lambda_product(1, 2).unwrap();
        assert_eq!(m, Homography::new(pi.clone(), Poly::zero(), Poly::zero(), pi));

        let lj = ljacobi_seqs(int(11), int(12), 10).unwrap();
        let pt = pert(3, rat(1, 2), int(1));
        let m = transfer_matrix_mk(&lj, &pt).unwrap();
        let (sk, shk) = s_polynomials(&lj, &pt).unwrap();
        let pf = generate_family(&lj, 3, 0).unwrap();
        let qf = generate_second_kind(&lj, 3).unwrap();
        let pi = lj.lambda_product(1, 3).unwrap();
        let expect = &pi * &(&(&pi + &(&sk * &qf[3])) + &(&shk * &pf[3]));
        assert_eq!(m.det(), expect);
    }

    #[test]
    fn mk_example1_codilated_at_two() {
        let s = example1::<Rational>();
        let pt = pert(1, int(0), int(2));
        for n in 0..6 {
            let r = transfer_identity_residual(&s, &pt, n).unwrap();
            assert!(r[0].is_zero() && r[1].is_zero(), "n={n}");
        }
        let m = transfer_matrix_mk(&s, &pt).unwrap();
        let z = int(2);
        let v = m.a.eval(&z);
        assert_eq!(v, rat(3, 4) + rat(3, 4));
    }
}
