//! Real zeros of the a_n = 0 families, interlacing, and monotonicity scans.
//! Also houses the L-Jacobi family and its hypergeometric representation.

use nalgebra::DMatrix;
use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::perturbation::{apply_all, apply_perturbation, perturbed_family_direct, s_polynomials, Perturbation};
use crate::poly::Poly;
use crate::recurrence::{generate_family, CoefficientSequences, Sequence};
use crate::scalar::{int, Rational, RealScalar, Scalar};

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 20;

/// Relative tolerance under which two zeros count as common.
pub const COMMON_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Eigenvalues discarded as non-real.
    pub complex_count: usize,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

// Error-free transformations for compensated Horner.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Horner evaluation carried in doubled precision.
pub fn comp_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = coeffs.split_last() else { return 0.0 };
    let (mut s, mut c) = (last, 0.0);
    for &a in rest.iter().rev() {
        let (p, pe) = two_prod(s, x);
        let (t, se) = two_sum(p, a);
        s = t;
        c = c * x + (pe + se);
    }
    s + c
}

fn derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, &a)| acc * x + a * i as f64)
}

fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, rr) = (c, r);
            while cc < rr / radix {
                cc *= radix * radix;
                f *= radix;
            }
            while cc > rr * radix {
                cc /= radix * radix;
                f /= radix;
            }
            if (c * f + r / f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// All real zeros of `p`: balanced companion-matrix eigenvalues, then Newton
/// polishing. Each accepted zero satisfies |p(x)| <= tol * max(1, ||p||_1).
pub fn real_zeros(p: &Poly<f64>, tol: f64) -> Result<ZeroSet> {
    let deg = p.degree();
    if deg < 1 {
        return Err(Error::Domain("real_zeros needs a nonconstant polynomial".into()));
    }
    let n = deg as usize;
    let lead = *p.leading().unwrap_or(&1.0);
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c / lead).collect();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    balance(&mut comp);
    let eig = comp.complex_eigenvalues();

    // backward-error bound: tol * sum |c_i| |x|^i
    let bound = |x: f64| tol * coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs()).max(1.0);
    let mut zeros = Vec::new();
    let mut complex_count = 0;
    for e in eig.iter() {
        if e.im.abs() > 1e-6 * e.re.abs().max(1.0) {
            complex_count += 1;
            continue;
        }
        let mut x = e.re;
        for _ in 0..MAX_NEWTON {
            let v = comp_horner(&coeffs, x);
            let d = derivative(&coeffs, x);
            if v == 0.0 || d == 0.0 {
                break;
            }
            let dx = v / d;
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let r = comp_horner(&coeffs, x).abs();
        if r.is_nan() || r > bound(x) {
            return Err(Error::NonConvergence(format!("zero near {x}: residual {r:e} > {:e}", bound(x))));
        }
        zeros.push(x);
    }
    zeros.sort_by(f64::total_cmp);
    for w in zeros.windows(2) {
        if (w[1] - w[0]).abs() <= 1e-9 * w[0].abs().max(1.0) {
            return Err(Error::MultipleZero(w[0]));
        }
    }
    let residuals = zeros.iter().map(|&x| comp_horner(&coeffs, x).abs()).collect();
    Ok(ZeroSet { zeros, residuals, complex_count })
}

/// |p(x)| / sum |c_i| |x|^i for each zero (coefficients taken monic).
pub fn backward_errors(p: &Poly<f64>, zs: &ZeroSet) -> Vec<f64> {
    let lead = *p.leading().unwrap_or(&1.0);
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c / lead).collect();
    zs.zeros
        .iter()
        .zip(&zs.residuals)
        .map(|(x, r)| r / coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs()))
        .collect()
}

/// Zeros of an exact polynomial (coefficients rounded once to f64).
pub fn real_zeros_exact(p: &Poly<Rational>, tol: f64) -> Result<ZeroSet> {
    real_zeros(&p.to_f64(), tol)
}

/// L-Jacobi coefficients c_n = (c+n)/(a-n-1), lambda_n = n(c+n-a)/((a-n-1)(a-n)), a_n = 0.
/// `range` is the degree N for which positivity is asserted; poles inside it are errors.
pub fn ljacobi_seqs(a: Rational, c: Rational, range: usize) -> Result<CoefficientSequences<Rational>> {
    for n in 0..range {
        let den = a.clone() - int(n as i64 + 1);
        if den.is_zero() || (n >= 1 && (a.clone() - int(n as i64)).is_zero()) {
            return Err(Error::Pole(format!("L-Jacobi a = {a} has a pole at n = {n}")));
        }
    }
    let (a1, c1, a2, c2) = (a.clone(), c.clone(), a.clone(), c.clone());
    let cs = Sequence::rule("c", 0, move |n| {
        let den = a1.clone() - int(n as i64 + 1);
        if den.is_zero() {
            return Err(Error::Pole(format!("c_{n}: a - n - 1 = 0")));
        }
        Ok((c1.clone() + int(n as i64)) / den)
    });
    let ls = Sequence::rule("lambda", 1, move |n| {
        let nn = int(n as i64);
        let den = (a2.clone() - nn.clone() - int(1)) * (a2.clone() - nn.clone());
        if den.is_zero() {
            return Err(Error::Pole(format!("lambda_{n}: (a-n-1)(a-n) = 0")));
        }
        Ok(nn.clone() * (c2.clone() + nn - a2.clone()) / den)
    });
    let mut seqs = CoefficientSequences::new(
        cs,
        ls,
        Sequence::constant("a", 1, Rational::zero()),
        format!("ljacobi(a={a},c={c})"),
    );
    let nn = int(range as i64);
    seqs.positive_l = (c > a && a > nn) || (a < c && c < int(1) - nn);
    seqs.range = Some(range);
    Ok(seqs)
}

fn pochhammer(x: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, i| acc * (x.clone() + int(i as i64)))
}

/// ((c)_n / (1-a)_n) * 2F1(-n, 1-a; 1-c-n; x), evaluated exactly.
pub fn hypergeometric_oracle(a: &Rational, c: &Rational, n: usize, x: &Rational) -> Result<Rational> {
    let one = Rational::one();
    let b = one.clone() - a.clone();
    let d = one - c.clone() - int(n as i64);
    let pre_den = pochhammer(&b, n);
    if pre_den.is_zero() {
        return Err(Error::Pole(format!("(1-a)_{n} = 0")));
    }
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for j in 0..n {
        let jj = int(j as i64);
        let den = (d.clone() + jj.clone()) * (jj.clone() + int(1));
        if den.is_zero() {
            return Err(Error::Pole(format!("(1-c-n)_{} = 0", j + 1)));
        }
        term = term * (int(-(n as i64)) + jj.clone()) * (b.clone() + jj) * x.clone() / den;
        sum += term.clone();
    }
    Ok(pochhammer(c, n) / pre_den * sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterlacePattern {
    AStarts,
    BStarts,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    A,
    B,
    Common,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub common: Vec<f64>,
    pub pattern: InterlacePattern,
    /// Merged ascending ordering with provenance.
    pub details: Vec<(f64, Source)>,
}

pub fn is_common(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(1.0)
}

/// Strip common zeros (within `rel`), then test the rest for strict alternation.
pub fn interlacing_report(a: &ZeroSet, b: &ZeroSet, rel: f64) -> InterlacingReport {
    let mut used_b = vec![false; b.len()];
    let mut common = Vec::new();
    let mut details = Vec::new();
    for &x in &a.zeros {
        let hit = b.zeros.iter().enumerate().position(|(j, &y)| !used_b[j] && is_common(x, y, rel));
        match hit {
            Some(j) => {
                used_b[j] = true;
                common.push(x);
                details.push((x, Source::Common));
            }
            None => details.push((x, Source::A)),
        }
    }
    for (j, &y) in b.zeros.iter().enumerate() {
        if !used_b[j] {
            details.push((y, Source::B));
        }
    }
    details.sort_by(|p, q| p.0.total_cmp(&q.0));
    let tags: Vec<Source> = details.iter().map(|d| d.1).filter(|s| *s != Source::Common).collect();
    let alternates = tags.windows(2).all(|w| w[0] != w[1]);
    let pattern = match (alternates, tags.first()) {
        (false, _) => InterlacePattern::Violated,
        (true, Some(Source::B)) => InterlacePattern::BStarts,
        _ => InterlacePattern::AStarts,
    };
    InterlacingReport { common, pattern, details }
}

/// Product lower index in D(P_n, P_n(.;mu)) = -mu (prod lambda_j) prod_{j>k} (x - a_j) P_k^2
/// (x^{n-k} when a = 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProductStart {
    /// lambda_n ... lambda_k, as displayed.
    AtK,
    /// lambda_n ... lambda_{k+1}.
    AfterK,
}

/// Residual polynomial of the co-recursive Casoratti identity at degree n for a given product start.
pub fn corecursive_casoratti_residual<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    n: usize,
    start: ProductStart,
) -> Result<Poly<S>> {
    let k = pert.k;
    let p = generate_family(seqs, n + 1, 0)?;
    let pm = perturbed_family_direct(seqs, pert, n + 1)?;
    let lhs = &p[n] * &pm[n + 1] - &p[n + 1] * &pm[n];
    let lo = match start {
        ProductStart::AtK => k.max(1),
        ProductStart::AfterK => k + 1,
    };
    let mut prod = -pert.mu.clone();
    for j in lo..=n {
        prod = prod * seqs.lambda(j)?;
    }
    let mut factor = &p[k] * &p[k];
    for j in k + 1..=n {
        factor = &factor * &Poly::linear(seqs.a(j)?);
    }
    let rhs = factor.scale(&prod);
    Ok(lhs - rhs)
}

/// Verify the co-recursive Casoratti identity; returns the product start that holds and the max residual.
pub fn sign_witness_corecursive<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    n: usize,
) -> Result<(ProductStart, f64)> {
    if !pert.nu.is_one() {
        return Err(Error::InvalidPerturbation("sign witness needs a co-recursive perturbation".into()));
    }
    if n < pert.k {
        return Err(Error::Domain(format!("need n >= k, got n = {n}, k = {}", pert.k)));
    }
    let tol = if S::EXACT { 0.0 } else { 1e-9 };
    let mut best = None;
    for start in [ProductStart::AtK, ProductStart::AfterK] {
        let r = corecursive_casoratti_residual(seqs, pert, n, start)?;
        let m = r.coeffs().iter().map(|c| c.magnitude()).fold(0.0, f64::max);
        let scale = if S::EXACT { 1.0 } else { 1.0 + r.l1_norm() };
        if m <= tol * scale {
            return Ok((start, m));
        }
        best = Some(best.map_or(m, |b: f64| b.min(m)));
    }
    Err(Error::Calibration(format!(
        "co-recursive Casoratti identity at n = {n}, k = {} (best residual {:e})",
        pert.k,
        best.unwrap_or(f64::NAN)
    )))
}

/// Casoratti identity with an associated family of order `shift`:
/// P_n F_{n-shift+1} - P_{n+1} F_{n-shift} - prod_{j=shift}^{n} lambda_j (x - a_j) P_{shift-1}.
pub fn casoratti_assoc_residual<S: Scalar>(seqs: &CoefficientSequences<S>, shift: usize, n: usize) -> Result<Poly<S>> {
    if shift == 0 || n < shift {
        return Err(Error::Domain(format!("need 1 <= shift <= n, got shift = {shift}, n = {n}")));
    }
    let p = generate_family(seqs, n + 1, 0)?;
    let f = generate_family(seqs, n - shift + 1, shift)?;
    let lhs = &p[n] * &f[n - shift + 1] - &p[n + 1] * &f[n - shift];
    Ok(lhs - &seqs.lambda_product(shift, n)? * &p[shift - 1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommonZeroCheck {
    pub common: Vec<f64>,
    /// |S_k(x)| / max(1, ||S_k||_1) at each common zero.
    pub s_k_values: Vec<f64>,
    /// |P_k(x)| / max(1, ||P_k||_1), meaningful for co-recursive perturbations.
    pub p_k_values: Vec<f64>,
}

/// Common zeros of P_n and P_n(.;mu,nu) and the values of S_k, P_k there.
pub fn common_zero_check(
    seqs: &CoefficientSequences<Rational>,
    pert: &Perturbation<Rational>,
    n: usize,
) -> Result<CommonZeroCheck> {
    let p = generate_family(seqs, n, 0)?;
    let pm = perturbed_family_direct(seqs, pert, n)?;
    let za = real_zeros_exact(&p[n], DEFAULT_TOL)?;
    let zb = real_zeros_exact(&pm[n], DEFAULT_TOL)?;
    let rep = interlacing_report(&za, &zb, COMMON_TOL);
    let (s_k, _) = s_polynomials(seqs, pert)?;
    let (sf, pk) = (s_k.to_f64(), p[pert.k].to_f64());
    let norm = |q: &Poly<f64>| q.l1_norm().max(1.0);
    Ok(CommonZeroCheck {
        s_k_values: rep.common.iter().map(|x| comp_horner(sf.coeffs(), *x).abs() / norm(&sf)).collect(),
        p_k_values: rep.common.iter().map(|x| comp_horner(pk.coeffs(), *x).abs() / norm(&pk)).collect(),
        common: rep.common,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub pairs: Vec<(f64, f64)>,
    pub columns: Vec<ZeroSet>,
    /// Every column strictly exceeds (positive pairs) or undercuts (negative pairs) its predecessor.
    pub monotone: bool,
}

/// Zeros of P_n under the double co-recursive perturbation (mu_k, mu_{k+1}) for each pair.
pub fn monotonicity_scan(
    seqs: &CoefficientSequences<Rational>,
    k: usize,
    pairs: &[(Rational, Rational)],
    n: usize,
    exec: Exec,
) -> Result<MonotonicityScan> {
    let cols: Vec<Result<ZeroSet>> = exec.map(pairs, |(m1, m2)| {
        let perts = [
            Perturbation { k, mu: m1.clone(), nu: Rational::one() },
            Perturbation { k: k + 1, mu: m2.clone(), nu: Rational::one() },
        ];
        let s = apply_all(seqs, &perts)?;
        real_zeros_exact(&generate_family(&s, n, 0)?[n], DEFAULT_TOL)
    });
    let columns = cols.into_iter().collect::<Result<Vec<_>>>()?;
    let increasing = pairs.first().is_some_and(|(a, b)| a.is_positive() || b.is_positive());
    let monotone = columns.windows(2).all(|w| {
        w[0].len() == w[1].len()
            && w[0].zeros.iter().zip(&w[1].zeros).all(|(x, y)| if increasing { y > x } else { y < x })
    });
    Ok(MonotonicityScan { pairs: pairs.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect(), columns, monotone })
}

/// Zeros of P_n for the unperturbed and singly perturbed families.
pub fn zero_pair(
    seqs: &CoefficientSequences<Rational>,
    pert: &Perturbation<Rational>,
    n: usize,
) -> Result<(ZeroSet, ZeroSet)> {
    let base = generate_family(seqs, n, 0)?;
    let pm = generate_family(&apply_perturbation(seqs, pert)?, n, 0)?;
    Ok((real_zeros_exact(&base[n], DEFAULT_TOL)?, real_zeros_exact(&pm[n], DEFAULT_TOL)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn quadratic_and_linear() {
        let p = Poly::new(vec![0.75, -2.25, 1.0]);
        let z = real_zeros(&p, DEFAULT_TOL).unwrap();
        let s = 33f64.sqrt();
        assert!((z.zeros[0] - (9.0 - s) / 8.0).abs() < 1e-14);
        assert!((z.zeros[1] - (9.0 + s) / 8.0).abs() < 1e-14);
        let z = real_zeros(&Poly::new(vec![-1.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(z.zeros, vec![1.0]);
    }

    #[test]
    fn complex_roots_skipped_and_repeated_flagged() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let z = real_zeros(&p, DEFAULT_TOL).unwrap();
        assert!(z.is_empty());
        assert_eq!(z.complex_count, 2);
        let sq = Poly::new(vec![-1.0, 1.0]).pow(2);
        assert!(matches!(real_zeros(&sq, DEFAULT_TOL), Err(Error::MultipleZero(_)) | Err(Error::NonConvergence(_))));
        assert!(real_zeros(&Poly::new(vec![2.0]), DEFAULT_TOL).is_err());
    }

    #[test]
    fn comp_horner_beats_naive_near_root() {
        let p = Poly::new(vec![-1.0, 1.0]).pow(5).into_coeffs();
        let v = comp_horner(&p, 1.0 + 1e-3);
        assert!((v - 1e-15).abs() < 1e-22);
    }

    #[test]
    fn ljacobi_coefficients() {
        let s = ljacobi_seqs(int(11), int(12), 10).unwrap();
        assert_eq!(s.c(0).unwrap(), rat(6, 5));
        assert_eq!(s.lambda(1).unwrap(), rat(1, 45));
        assert!(s.positive_l && s.check_positive_l(10).unwrap());
        assert!(!ljacobi_seqs(int(11), int(12), 11).is_ok_and(|s| s.positive_l));
        let t = ljacobi_seqs(int(-12), int(-10), 10).unwrap();
        assert!(t.positive_l && t.check_positive_l(10).unwrap());
        assert!(!ljacobi_seqs(int(-12), int(-10), 11).unwrap().positive_l);
        assert!(matches!(ljacobi_seqs(int(3), int(5), 6), Err(Error::Pole(_))));
    }

    #[test]
    fn hypergeometric_small_cases() {
        let (a, c) = (int(11), int(12));
        let x = rat(3, 7);
        assert_eq!(hypergeometric_oracle(&a, &c, 0, &x).unwrap(), int(1));
        let s = ljacobi_seqs(a.clone(), c.clone(), 10).unwrap();
        assert_eq!(hypergeometric_oracle(&a, &c, 1, &x).unwrap(), x.clone() - s.c(0).unwrap());
        let p6 = &generate_family(&s, 6, 0).unwrap()[6];
        assert_eq!(hypergeometric_oracle(&a, &c, 6, &int(2)).unwrap(), p6.eval(&int(2)));
    }

    #[test]
    fn table1_unperturbed_column() {
        let s = ljacobi_seqs(int(11), int(12), 10).unwrap();
        let p6 = &generate_family(&s, 6, 0).unwrap()[6];
        let z = real_zeros_exact(p6, DEFAULT_TOL).unwrap();
        let golden = [1.049267646, 1.179086731, 1.432298501, 1.918525281, 2.955569922, 5.865251919];
        for (x, g) in z.zeros.iter().zip(golden) {
            assert!((x - g).abs() < 1e-6);
        }
    }

    #[test]
    fn interlacing_patterns() {
        let zs = |v: &[f64]| ZeroSet { zeros: v.to_vec(), residuals: vec![0.0; v.len()], complex_count: 0 };
        let r = interlacing_report(&zs(&[1.0, 3.0]), &zs(&[0.5, 2.0]), COMMON_TOL);
        assert_eq!(r.pattern, InterlacePattern::BStarts);
        let r = interlacing_report(&zs(&[1.0, 3.0]), &zs(&[2.0, 4.0]), COMMON_TOL);
        assert_eq!(r.pattern, InterlacePattern::AStarts);
        let r = interlacing_report(&zs(&[1.0, 2.0]), &zs(&[3.0, 4.0]), COMMON_TOL);
        assert_eq!(r.pattern, InterlacePattern::Violated);
        let r = interlacing_report(&zs(&[1.0, 2.0]), &zs(&[1.0, 2.0]), COMMON_TOL);
        assert_eq!(r.common.len(), 2);
        assert_ne!(r.pattern, InterlacePattern::Violated);
    }

    #[test]
    fn corecursive_witness_examples() {
        let s = ljacobi_seqs(int(11), int(12), 10).unwrap();
        let pt = Perturbation::new(4, int(-2), int(1)).unwrap();
        assert_eq!(sign_witness_corecursive(&s, &pt, 5).unwrap(), (ProductStart::AfterK, 0.0));
        let e = CoefficientSequences::constant(int(1), rat(1, 4), int(0), "constant");
        let pt = Perturbation::new(2, int(1), int(1)).unwrap();
        assert_eq!(sign_witness_corecursive(&e, &pt, 3).unwrap().1, 0.0);
        let id = Perturbation::identity(2);
        assert_eq!(sign_witness_corecursive(&e, &id, 4).unwrap().1, 0.0);
    }

    #[test]
    fn casoratti_with_shift_k() {
        let s = ljacobi_seqs(int(-12), int(-10), 10).unwrap();
        for k in 1..=4 {
            for n in k..=9 {
                assert!(casoratti_assoc_residual(&s, k, n).unwrap().is_zero(), "k={k} n={n}");
            }
        }
    }
}
