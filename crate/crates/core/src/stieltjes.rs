//! Continued fractions, their Wallis convergents, and the homographies
//! relating perturbed and unperturbed R_I-fractions.
//!
//! Every statement about the limit functions is checked at matched finite
//! depth, where it becomes an identity between rational functions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perturbation::{apply_perturbation, transfer_matrix_mk, Perturbation};
use crate::poly::{Poly, PolyMatrix, PolyPair};
use crate::recurrence::{generate_family, generate_second_kind, CoefficientSequences};
use crate::scalar::{RealScalar, Scalar};

/// u -> (A u + B) / (C u + D) with polynomial entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Homography<S> {
    pub a: Poly<S>,
    pub b: Poly<S>,
    pub c: Poly<S>,
    pub d: Poly<S>,
}

impl<S: Scalar> Homography<S> {
    pub fn new(a: Poly<S>, b: Poly<S>, c: Poly<S>, d: Poly<S>) -> Self {
        Homography { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    pub fn from_matrix(m: PolyMatrix<S>) -> Self {
        let [[a, b], [c, d]] = m.m;
        Self::new(a, b, c, d)
    }

    pub fn to_matrix(&self) -> PolyMatrix<S> {
        PolyMatrix::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }

    /// AD - BC.
    pub fn det(&self) -> Poly<S> {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_degenerate(&self) -> bool {
        self.det().is_zero()
    }

    pub fn check_nondegenerate(self) -> Result<Self> {
        if self.is_degenerate() {
            Err(Error::DegenerateHomography)
        } else {
            Ok(self)
        }
    }

    pub fn apply(&self, z: &S, u: &S) -> Result<S> {
        let num = self.a.eval(z) * u.clone() + self.b.eval(z);
        let den = self.c.eval(z) * u.clone() + self.d.eval(z);
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("homography denominator at z = {z}")));
        }
        Ok(num / den)
    }

    /// Apply to u = num/den without dividing: returns the new (num, den) pair.
    pub fn apply_pair(&self, num: &Poly<S>, den: &Poly<S>) -> (Poly<S>, Poly<S>) {
        (&(&self.a * num) + &(&self.b * den), &(&self.c * num) + &(&self.d * den))
    }

    /// self after inner: u -> self(inner(u)).
    pub fn compose(&self, inner: &Self) -> Self {
        Self::from_matrix(self.to_matrix().mul(&inner.to_matrix()))
    }

    pub fn cofactor(&self) -> Self {
        Self::from_matrix(self.to_matrix().cofactor())
    }

    /// All 2x2 minors of the entry vectors; all zero iff the homographies are
    /// proportional by a rational-function factor.
    pub fn cross_residuals(&self, other: &Self) -> Vec<Poly<S>> {
        let u = [&self.a, &self.b, &self.c, &self.d];
        let v = [&other.a, &other.b, &other.c, &other.d];
        let mut out = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                out.push(u[i] * v[j] - u[j] * v[i]);
            }
        }
        out
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        let nonzero = |h: &Self| !(h.a.is_zero() && h.b.is_zero() && h.c.is_zero() && h.d.is_zero());
        nonzero(self) && nonzero(other) && self.cross_residuals(other).iter().all(Poly::is_zero)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Homography<T> {
        Homography::new(self.a.map(f), self.b.map(f), self.c.map(f), self.d.map(f))
    }
}

impl<S: Scalar> fmt::Display for Homography<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

type PolyRule<S> = Arc<dyn Fn(usize) -> Result<Poly<S>> + Send + Sync>;

/// alpha_0 / (beta_0 + alpha_1 / (beta_1 + alpha_2 / (beta_2 + ...))).
#[derive(Clone)]
pub struct ContinuedFraction<S> {
    alpha: PolyRule<S>,
    beta: PolyRule<S>,
}

impl<S: Scalar> fmt::Debug for ContinuedFraction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &PolyRule<S>, n| r(n).map(|p| p.to_string()).unwrap_or_else(|e| e.to_string());
        f.debug_struct("ContinuedFraction")
            .field("alpha_0", &show(&self.alpha, 0))
            .field("beta_0", &show(&self.beta, 0))
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> ContinuedFraction<S> {
    pub fn new(
        alpha: impl Fn(usize) -> Result<Poly<S>> + Send + Sync + 'static,
        beta: impl Fn(usize) -> Result<Poly<S>> + Send + Sync + 'static,
    ) -> Self {
        ContinuedFraction { alpha: Arc::new(alpha), beta: Arc::new(beta) }
    }

    pub fn alpha(&self, n: usize) -> Result<Poly<S>> {
        (self.alpha)(n)
    }

    pub fn beta(&self, n: usize) -> Result<Poly<S>> {
        (self.beta)(n)
    }

    /// Wallis numerators and denominators (A_0..A_depth, B_0..B_depth) as polynomials.
    pub fn wallis_polys(&self, depth: usize) -> Result<PolyPair<S>> {
        let mut a = vec![Poly::zero()];
        let mut b = vec![Poly::one()];
        let (mut a2, mut b2) = (Poly::one(), Poly::zero());
        for j in 0..depth {
            let (al, be) = (self.alpha(j)?, self.beta(j)?);
            let na = &(&be * &a[j]) + &(&al * &a2);
            let nb = &(&be * &b[j]) + &(&al * &b2);
            a2 = a[j].clone();
            b2 = b[j].clone();
            a.push(na);
            b.push(nb);
        }
        Ok((a, b))
    }

    /// (A_depth, B_depth).
    pub fn convergent_polys(&self, depth: usize) -> Result<(Poly<S>, Poly<S>)> {
        let (mut a, mut b) = self.wallis_polys(depth)?;
        Ok((a.pop().unwrap_or_else(Poly::zero), b.pop().unwrap_or_else(Poly::one)))
    }
}

/// A_depth(z) / B_depth(z) by forward Wallis recursion on values.
pub fn convergent<S: Scalar>(cf: &ContinuedFraction<S>, z: &S, depth: usize) -> Result<S> {
    let (mut a1, mut b1) = (S::zero(), S::one());
    let (mut a2, mut b2) = (S::one(), S::zero());
    for j in 0..depth {
        let (al, be) = (cf.alpha(j)?.eval(z), cf.beta(j)?.eval(z));
        let na = be.clone() * a1.clone() + al.clone() * a2;
        let nb = be * b1.clone() + al * b2;
        a2 = std::mem::replace(&mut a1, na);
        b2 = std::mem::replace(&mut b1, nb);
    }
    if b1.is_zero() {
        return Err(Error::ZeroDenominator { depth });
    }
    Ok(a1 / b1)
}

/// Fraction whose n-th convergent is Q_n / P_n: 1/(z-c_0 - lambda_1(z-a_1)/(z-c_1 - ...)).
pub fn ri_fraction<S: Scalar>(seqs: &CoefficientSequences<S>) -> ContinuedFraction<S> {
    tail_from(seqs, 0)
}

/// The fraction of the associated recurrence starting at index k+1.
pub fn tail_fraction<S: Scalar>(seqs: &CoefficientSequences<S>, k: usize) -> ContinuedFraction<S> {
    tail_from(seqs, k + 1)
}

fn tail_from<S: Scalar>(seqs: &CoefficientSequences<S>, start: usize) -> ContinuedFraction<S> {
    let (s1, s2) = (seqs.clone(), seqs.clone());
    ContinuedFraction::new(
        move |n| if n == 0 { Ok(Poly::one()) } else { Ok(-s1.lambda_term(start + n)?) },
        move |n| Ok(Poly::linear(s2.c(start + n)?)),
    )
}

/// Homography mapping the tail fraction at level k+1 to the perturbed fraction.
pub fn homography_from_tail<S: Scalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
) -> Result<Homography<S>> {
    let k = pert.k;
    let p = generate_family(seqs, k + 1, 0)?;
    let q = generate_second_kind(seqs, k + 1)?;
    let l1 = seqs.lambda_term(k + 1)?;
    let mut b = &q[k].scale(&pert.mu) - &q[k + 1];
    let mut d = &p[k].scale(&pert.mu) - &p[k + 1];
    if k >= 1 && !pert.nu.is_one() {
        let t = seqs.lambda_term(k)?.scale(&(pert.nu.clone() - S::one()));
        b = b + &t * &q[k - 1];
        d = d + &t * &p[k - 1];
    }
    Homography::new(&l1 * &q[k], b, &l1 * &p[k], d).check_nondegenerate()
}

/// Sign attached to prod_{j=1}^k lambda_j (z - a_j) in the A and D entries of the
/// full-function homography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProductSign {
    Plus,
    Minus,
}

impl ProductSign {
    pub const CANDIDATES: [ProductSign; 2] = [ProductSign::Plus, ProductSign::Minus];
}

/// Entries A, B, C, D of the full-function homography with the chosen product sign.
pub fn homography_from_full_with_sign<S: Scalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    sign: ProductSign,
) -> Result<Homography<S>> {
    let k = pert.k;
    let p = generate_family(seqs, k, 0)?;
    let q = generate_second_kind(seqs, k)?;
    let mut pi = seqs.lambda_product(1, k)?;
    if sign == ProductSign::Minus {
        pi = -pi;
    }
    let mu = &pert.mu;
    let mut a = &pi + &(&q[k] * &p[k]).scale(mu);
    let mut b = -&(&q[k] * &q[k]).scale(mu);
    let mut c = (&p[k] * &p[k]).scale(mu);
    let mut d = &pi - &(&q[k] * &p[k]).scale(mu);
    if k >= 1 && !pert.nu.is_one() {
        let t = seqs.lambda_term(k)?.scale(&(pert.nu.clone() - S::one()));
        a = a + &t * &(&q[k - 1] * &p[k]);
        b = b - &t * &(&q[k - 1] * &q[k]);
        c = c + &t * &(&p[k - 1] * &p[k]);
        d = d - &t * &(&p[k - 1] * &q[k]);
    }
    Homography::new(a, b, c, d).check_nondegenerate()
}

/// Cross-multiplied residual of the full-function law at depth n:
/// Q~_n (C Q_n + D P_n) - P~_n (A Q_n + B P_n).
pub fn full_law_residual<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    h: &Homography<S>,
    n: usize,
) -> Result<Poly<S>> {
    let ps = apply_perturbation(seqs, pert)?;
    let (pn, qn) = (generate_family(seqs, n, 0)?, generate_second_kind(seqs, n)?);
    let (pp, qp) = (generate_family(&ps, n, 0)?, generate_second_kind(&ps, n)?);
    let (num, den) = h.apply_pair(&qn[n], &pn[n]);
    Ok(&qp[n] * &den - &pp[n] * &num)
}

/// Pick the product sign for which the full-function law holds at depths k+1..k+3.
pub fn calibrate_full_sign<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
) -> Result<ProductSign> {
    let k = pert.k;
    let top = (k + 3).min(seqs.max_degree(k + 3));
    for sign in ProductSign::CANDIDATES {
        let h = match homography_from_full_with_sign(seqs, pert, sign) {
            Ok(h) => h,
            Err(Error::DegenerateHomography) => continue,
            Err(e) => return Err(e),
        };
        let mut ok = top > k;
        for n in k + 1..=top {
            if !full_law_residual(seqs, pert, &h, n)?.approx_eq(&Poly::zero(), 1e-9) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(sign);
        }
    }
    Err(Error::Calibration(format!("full-function homography at level {k}")))
}

/// Homography mapping the unperturbed fraction to the perturbed one, with the
/// product sign fixed by the finite-depth oracle.
pub fn homography_from_full<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
) -> Result<Homography<S>> {
    let sign = calibrate_full_sign(seqs, pert)?;
    homography_from_full_with_sign(seqs, pert, sign)
}

/// cof(M_k).
pub fn cofactor_transform<S: Scalar>(seqs: &CoefficientSequences<S>, pert: &Perturbation<S>) -> Result<Homography<S>> {
    transfer_matrix_mk(seqs, pert)?.cofactor().check_nondegenerate()
}

/// u -> lambda_{k+1}(z - a_{k+1}) * tail: (P_{k+1} u - Q_{k+1}) / (lambda_{k+1}(z-a_{k+1})(P_k u - Q_k)).
pub fn tail_from_full_map<S: Scalar>(seqs: &CoefficientSequences<S>, k: usize) -> Result<Homography<S>> {
    let p = generate_family(seqs, k + 1, 0)?;
    let q = generate_second_kind(seqs, k + 1)?;
    let l1 = seqs.lambda_term(k + 1)?;
    Homography::new(p[k + 1].clone(), -&q[k + 1], &l1 * &p[k], -&(&l1 * &q[k])).check_nondegenerate()
}

/// Cross-multiplied residual of the tail law at tail depth m:
/// convergent(perturbed, k+1+m) against H_tail(convergent(tail, m)).
pub fn tail_law_residual<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    m: usize,
) -> Result<Poly<S>> {
    let h = homography_from_tail(seqs, pert)?;
    let (ta, tb) = tail_fraction(seqs, pert.k).convergent_polys(m)?;
    let (fa, fb) = ri_fraction(&apply_perturbation(seqs, pert)?).convergent_polys(pert.k + 1 + m)?;
    let (num, den) = h.apply_pair(&ta, &tb);
    Ok(&fa * &den - &fb * &num)
}

/// Residual of lambda_{k+1}(z-a_{k+1}) t_m = (P_{k+1}u - Q_{k+1})/(P_k u - Q_k),
/// u the unperturbed convergent at depth k+1+m.
pub fn tail_from_full_residual<S: Scalar>(seqs: &CoefficientSequences<S>, k: usize, m: usize) -> Result<Poly<S>> {
    let (ta, tb) = tail_fraction(seqs, k).convergent_polys(m)?;
    let (fa, fb) = ri_fraction(seqs).convergent_polys(k + 1 + m)?;
    let (num, den) = tail_from_full_map(seqs, k)?.apply_pair(&fa, &fb);
    Ok(&ta * &den - &tb * &num)
}

/// Retry z, z+1, ... (at most 5 retries) until `ok` accepts the point.
pub fn screen_point<S: Scalar>(z: S, ok: impl Fn(&S) -> bool) -> Result<S> {
    let mut z = z;
    for _ in 0..=5 {
        if ok(&z) {
            return Ok(z);
        }
        z = z + S::one();
    }
    Err(Error::DivisionByZero("no admissible sample point after 5 retries".into()))
}

/// Pointwise check of the three truncation laws at `z` for tail depths 0..=max_m.
/// Returns (law name, depth, |lhs - rhs|) for every comparison.
pub fn pointwise_laws<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    z: &S,
    max_m: usize,
) -> Result<Vec<(&'static str, usize, f64)>> {
    let k = pert.k;
    let ps = apply_perturbation(seqs, pert)?;
    let (full, pfull, tail) = (ri_fraction(seqs), ri_fraction(&ps), tail_fraction(seqs, k));
    let ht = homography_from_tail(seqs, pert)?;
    let hf = homography_from_full(seqs, pert)?;
    let g = tail_from_full_map(seqs, k)?;
    let mut out = Vec::new();
    for m in 0..=max_m {
        let t = convergent(&tail, z, m)?;
        let lhs = convergent(&pfull, z, k + 1 + m)?;
        out.push(("tail", m, (lhs.clone() - ht.apply(z, &t)?).magnitude()));
        let u = convergent(&full, z, k + 1 + m)?;
        out.push(("full", k + 1 + m, (lhs - hf.apply(z, &u)?).magnitude()));
        let lt = seqs.lambda_term(k + 1)?.eval(z) * t;
        let rhs = g.apply(z, &u)? * seqs.lambda_term(k + 1)?.eval(z);
        out.push(("tail-from-full", m, (lt - rhs).magnitude()));
    }
    Ok(out)
}

/// True when every polynomial entering the pointwise laws is nonzero at z.
pub fn admissible_point<S: RealScalar>(
    seqs: &CoefficientSequences<S>,
    pert: &Perturbation<S>,
    z: &S,
    max_m: usize,
) -> bool {
    let k = pert.k;
    let Ok(ps) = apply_perturbation(seqs, pert) else { return false };
    let depth = k + 1 + max_m;
    let dens = |cf: &ContinuedFraction<S>, d: usize| -> bool {
        cf.wallis_polys(d).map(|(_, b)| b.iter().all(|p| !p.eval(z).is_zero())).unwrap_or(false)
    };
    let hom_ok = |h: Result<Homography<S>>| h.is_ok();
    let lt = seqs.lambda_term(k + 1).map(|p| !p.eval(z).is_zero()).unwrap_or(false);
    lt && dens(&ri_fraction(seqs), depth)
        && dens(&ri_fraction(&ps), depth)
        && dens(&tail_fraction(seqs, k), max_m)
        && hom_ok(homography_from_tail(seqs, pert))
        && hom_ok(homography_from_full(seqs, pert))
        && pointwise_laws(seqs, pert, z, max_m).is_ok()
}

/// The first-approximant sanity check: z * convergent(full, z, n) for each z.
pub fn large_z_products(seqs: &CoefficientSequences<f64>, n: usize, zs: &[f64]) -> Result<Vec<f64>> {
    let cf = ri_fraction(seqs);
    zs.iter().map(|z| convergent(&cf, z, n).map(|v| v * z)).collect()
}
