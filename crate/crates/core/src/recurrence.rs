//! R_I recurrences: P_{n+1} = (z - c_n) P_n - lambda_n (z - a_n) P_{n-1}.
//!
//! `c` is indexed from 0, `lambda` and `a` from 1. Indices below a sequence's
//! first index read as zero (the unused lambda_0, a_0 placeholders).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyMatrix};
use crate::scalar::{Rational, RealScalar, Scalar};

type Rule<S> = Arc<dyn Fn(usize) -> Result<S> + Send + Sync>;

#[derive(Clone)]
enum Source<S> {
    Rule { f: Rule<S>, end: Option<usize> },
    List(Vec<S>),
}

/// A scalar sequence given by a closed-form rule or an explicit finite list.
#[derive(Clone)]
pub struct Sequence<S> {
    name: &'static str,
    first: usize,
    source: Source<S>,
    overrides: Vec<(usize, S)>,
}

impl<S: Scalar> Sequence<S> {
    pub fn rule(name: &'static str, first: usize, f: impl Fn(usize) -> Result<S> + Send + Sync + 'static) -> Self {
        Sequence { name, first, source: Source::Rule { f: Arc::new(f), end: None }, overrides: Vec::new() }
    }

    pub fn constant(name: &'static str, first: usize, v: S) -> Self {
        Self::rule(name, first, move |_| Ok(v.clone()))
    }

    /// `values[i]` is the term of index `first + i`.
    pub fn list(name: &'static str, first: usize, values: Vec<S>) -> Self {
        Sequence { name, first, source: Source::List(values), overrides: Vec::new() }
    }

    /// Truncate a rule-based sequence so indices >= `end` are out of range.
    pub fn with_end(mut self, end: usize) -> Self {
        if let Source::Rule { end: e, .. } = &mut self.source {
            *e = Some(end);
        }
        self
    }

    pub fn first(&self) -> usize {
        self.first
    }

    /// One past the last defined index, if finite.
    pub fn end(&self) -> Option<usize> {
        match &self.source {
            Source::Rule { end, .. } => *end,
            Source::List(v) => Some(self.first + v.len()),
        }
    }

    pub fn get(&self, n: usize) -> Result<S> {
        if let Some((_, v)) = self.overrides.iter().find(|(i, _)| *i == n) {
            return Ok(v.clone());
        }
        if n < self.first {
            return Ok(S::zero());
        }
        let oob = || Error::IndexOutOfRange {
            name: self.name,
            index: n,
            first: self.first,
            end: self.end().unwrap_or(usize::MAX),
        };
        match &self.source {
            Source::Rule { f, end } => match end {
                Some(e) if n >= *e => Err(oob()),
                _ => f(n),
            },
            Source::List(v) => v.get(n - self.first).cloned().ok_or_else(oob),
        }
    }

    pub fn set(&mut self, n: usize, v: S) {
        self.overrides.retain(|(i, _)| *i != n);
        self.overrides.push((n, v));
    }

    pub fn overridden_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.overrides.iter().map(|(i, _)| *i).collect();
        v.sort_unstable();
        v
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Send + Sync + Clone + 'static) -> Sequence<T> {
        let overrides = self.overrides.iter().map(|(i, v)| (*i, f(v))).collect();
        let source = match &self.source {
            Source::List(v) => Source::List(v.iter().map(&f).collect()),
            Source::Rule { f: g, end } => {
                let g = g.clone();
                Source::Rule { f: Arc::new(move |n| g(n).map(|v| f(&v))), end: *end }
            }
        };
        Sequence { name: self.name, first: self.first, source, overrides }
    }
}

impl<S: Scalar> fmt::Debug for Sequence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = (self.first..self.first + 4)
            .map(|i| self.get(i).map(|v| v.to_string()).unwrap_or_else(|_| "?".into()))
            .collect();
        write!(f, "{}[{}..] = [{}, ...]", self.name, self.first, head.join(", "))
    }
}

/// The triple (c_n, lambda_n, a_n) of an R_I recurrence.
#[derive(Clone)]
pub struct CoefficientSequences<S> {
    pub c: Sequence<S>,
    pub lambda: Sequence<S>,
    pub a: Sequence<S>,
    /// a_n = 0, c_n > 0, lambda_n > 0 over the declared range.
    pub positive_l: bool,
    /// Degrees for which `positive_l` was established (None = unbounded).
    pub range: Option<usize>,
    pub label: String,
}

impl<S: Scalar> fmt::Debug for CoefficientSequences<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequences")
            .field("label", &self.label)
            .field("c", &self.c)
            .field("lambda", &self.lambda)
            .field("a", &self.a)
            .field("positive_l", &self.positive_l)
            .field("range", &self.range)
            .finish()
    }
}

impl<S: Scalar> CoefficientSequences<S> {
    pub fn new(c: Sequence<S>, lambda: Sequence<S>, a: Sequence<S>, label: impl Into<String>) -> Self {
        CoefficientSequences { c, lambda, a, positive_l: false, range: None, label: label.into() }
    }

    /// Constant coefficients c_n = c, lambda_n = lambda, a_n = a.
    pub fn constant(c: S, lambda: S, a: S, label: impl Into<String>) -> Self {
        Self::new(
            Sequence::constant("c", 0, c),
            Sequence::constant("lambda", 1, lambda),
            Sequence::constant("a", 1, a),
            label,
        )
    }

    /// Explicit lists: `c` starts at c_0, `lambda` and `a` at index 1.
    pub fn from_lists(c: Vec<S>, lambda: Vec<S>, a: Vec<S>) -> Self {
        Self::new(Sequence::list("c", 0, c), Sequence::list("lambda", 1, lambda), Sequence::list("a", 1, a), "explicit")
    }

    pub fn c(&self, n: usize) -> Result<S> {
        self.c.get(n)
    }

    pub fn lambda(&self, n: usize) -> Result<S> {
        self.lambda.get(n)
    }

    pub fn a(&self, n: usize) -> Result<S> {
        self.a.get(n)
    }

    /// lambda_n (z - a_n) as a polynomial.
    pub fn lambda_term(&self, n: usize) -> Result<Poly<S>> {
        Ok(Poly::linear(self.a(n)?).scale(&self.lambda(n)?))
    }

    /// prod_{j=from}^{to} lambda_j (z - a_j); empty product is 1.
    pub fn lambda_product(&self, from: usize, to: usize) -> Result<Poly<S>> {
        let mut p = Poly::one();
        if to < from {
            return Ok(p);
        }
        for j in from..=to {
            p = &p * &self.lambda_term(j)?;
        }
        Ok(p)
    }

    /// Largest N <= limit for which P_0..P_N can be generated.
    pub fn max_degree(&self, limit: usize) -> usize {
        for m in 0..limit {
            let ok = self.c(m).is_ok() && (m == 0 || self.lambda(m).is_ok_and(|l| !l.is_zero()) && self.a(m).is_ok());
            if !ok {
                return m;
            }
        }
        limit
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Send + Sync + Clone + 'static) -> CoefficientSequences<T> {
        CoefficientSequences {
            c: self.c.map(f.clone()),
            lambda: self.lambda.map(f.clone()),
            a: self.a.map(f),
            positive_l: self.positive_l,
            range: self.range,
            label: self.label.clone(),
        }
    }
}

impl CoefficientSequences<Rational> {
    pub fn to_f64(&self) -> CoefficientSequences<f64> {
        self.map(|r| r.to_f64())
    }
}

impl<S: RealScalar> CoefficientSequences<S> {
    /// Check a_j = 0, c_j > 0 (j < n) and lambda_j > 0 (1 <= j < n) directly.
    pub fn check_positive_l(&self, n: usize) -> Result<bool> {
        for j in 0..n {
            if !self.c(j)?.is_positive() {
                return Ok(false);
            }
            if j >= 1 && (!self.lambda(j)?.is_positive() || !self.a(j)?.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// [F_0 .. F_N] for the associated family of order `shift`; shift 0 gives P_n.
pub fn generate_family<S: Scalar>(seqs: &CoefficientSequences<S>, n: usize, shift: usize) -> Result<Vec<Poly<S>>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = Poly::zero();
    let mut cur = Poly::one();
    out.push(cur.clone());
    for m in 0..n {
        let idx = m + shift;
        let mut next = cur.mul_linear(&seqs.c(idx)?);
        if m >= 1 {
            let lam = seqs.lambda(idx)?;
            if lam.is_zero() {
                return Err(Error::ZeroLambda(idx));
            }
            next = next - prev.mul_linear(&seqs.a(idx)?).scale(&lam);
        }
        prev = std::mem::replace(&mut cur, next);
        out.push(cur.clone());
    }
    Ok(out)
}

/// [Q_0 .. Q_N] with Q_0 = 0, Q_1 = 1.
pub fn generate_second_kind<S: Scalar>(seqs: &CoefficientSequences<S>, n: usize) -> Result<Vec<Poly<S>>> {
    let mut out = vec![Poly::zero()];
    if n == 0 {
        return Ok(out);
    }
    out.push(Poly::one());
    for m in 1..n {
        let lam = seqs.lambda(m)?;
        if lam.is_zero() {
            return Err(Error::ZeroLambda(m));
        }
        let next = out[m].mul_linear(&seqs.c(m)?) - out[m - 1].mul_linear(&seqs.a(m)?).scale(&lam);
        out.push(next);
    }
    Ok(out)
}

pub fn evaluate<S: Scalar>(p: &Poly<S>, z: &S) -> S {
    p.eval(z)
}

pub type TransferMatrix<S> = PolyMatrix<S>;

/// A_n(x) = [[x - c_n, -lambda_n (x - a_n)], [1, 0]].
pub fn transfer_step<S: Scalar>(seqs: &CoefficientSequences<S>, n: usize) -> Result<TransferMatrix<S>> {
    Ok(PolyMatrix::new(Poly::linear(seqs.c(n)?), -seqs.lambda_term(n)?, Poly::one(), Poly::zero()))
}

/// A_n ... A_0.
pub fn cumulative_transfer<S: Scalar>(seqs: &CoefficientSequences<S>, n: usize) -> Result<TransferMatrix<S>> {
    let mut acc = PolyMatrix::identity();
    for j in 0..=n {
        acc = transfer_step(seqs, j)?.mul(&acc);
    }
    Ok(acc)
}

/// u_n v_{n+1} - u_{n+1} v_n.
pub fn casoratti<S: Scalar>(u: &[S], v: &[S], n: usize) -> S {
    u[n].clone() * v[n + 1].clone() - u[n + 1].clone() * v[n].clone()
}

/// Casoratti determinant of two polynomial sequences.
pub fn casoratti_poly<S: Scalar>(u: &[Poly<S>], v: &[Poly<S>], n: usize) -> Poly<S> {
    &u[n] * &v[n + 1] - &u[n + 1] * &v[n]
}

/// Example 1: c_n = 1, lambda_n = 1/4, a_n = -1.
pub fn example1<S: Scalar>() -> CoefficientSequences<S> {
    let q = S::one() / S::from_i64(4);
    CoefficientSequences::constant(S::one(), q, -S::one(), "example1")
}

/// Closed form of the Example 1 family for real z > 3.
pub fn example1_closed_form(n: usize, z: f64) -> f64 {
    let s = (z - 3.0).sqrt() * z.sqrt();
    let k = (n + 1) as i32;
    let p = (z + s - 1.0).powi(k) - (z - s - 1.0).powi(k);
    p / (2f64.powi(k) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(v: &[(i64, i64)]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn example1_family() {
        let s = example1::<Rational>();
        let f = generate_family(&s, 3, 0).unwrap();
        assert_eq!(f[0], Poly::one());
        assert_eq!(f[1], p(&[(-1, 1), (1, 1)]));
        assert_eq!(f[2], p(&[(3, 4), (-9, 4), (1, 1)]));
        assert_eq!(f[3], p(&[(-1, 2), (3, 1), (-7, 2), (1, 1)]));
        assert_eq!(generate_family(&s, 0, 5).unwrap(), vec![Poly::one()]);
    }

    #[test]
    fn example1_second_kind() {
        let s = example1::<Rational>();
        let q = generate_second_kind(&s, 3).unwrap();
        assert_eq!(q[0], Poly::zero());
        assert_eq!(q[1], Poly::one());
        assert_eq!(q[2], p(&[(-1, 1), (1, 1)]));
        assert_eq!(q[3], p(&[(3, 4), (-9, 4), (1, 1)]));
        assert_eq!(generate_second_kind(&s, 1).unwrap().len(), 2);
    }

    #[test]
    fn second_kind_is_shift_one_family() {
        let s = CoefficientSequences::from_lists(
            vec![int(1), int(2), int(3), int(5), int(7)],
            vec![rat(1, 2), rat(1, 3), rat(2, 5), rat(3, 7)],
            vec![int(0), int(-1), rat(1, 2), int(2)],
        );
        let q = generate_second_kind(&s, 4).unwrap();
        let f = generate_family(&s, 3, 1).unwrap();
        for n in 1..=4 {
            assert_eq!(q[n], f[n - 1]);
        }
    }

    #[test]
    fn finite_list_too_short() {
        let s = CoefficientSequences::from_lists(vec![int(1)], vec![], vec![]);
        assert!(matches!(generate_family(&s, 2, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn zero_lambda_rejected() {
        let s = CoefficientSequences::constant(int(1), int(0), int(0), "degenerate");
        assert_eq!(generate_family(&s, 1, 0).unwrap().len(), 2);
        assert_eq!(generate_family(&s, 2, 0), Err(Error::ZeroLambda(1)));
    }

    #[test]
    fn transfer_steps() {
        let s = example1::<Rational>();
        let a1 = transfer_step(&s, 1).unwrap();
        assert_eq!(a1.m[0][0], p(&[(-1, 1), (1, 1)]));
        assert_eq!(a1.m[0][1], p(&[(-1, 4), (-1, 4)]));
        assert_eq!(a1.det(), p(&[(1, 4), (1, 4)]));
        let prod = cumulative_transfer(&s, 1).unwrap();
        let fam = generate_family(&s, 2, 0).unwrap();
        let v = prod.apply(&[Poly::one(), Poly::zero()]);
        assert_eq!(v[0], fam[2]);
        assert_eq!(v[1], fam[1]);
    }

    #[test]
    fn casoratti_basics() {
        let ones = [int(1), int(1), int(1)];
        assert_eq!(casoratti(&ones, &ones, 1), int(0));
        assert_eq!(casoratti(&[int(1), int(2)], &[int(3), int(5)], 0), int(-1));
    }

    #[test]
    fn lambda_product_empty_is_one() {
        let s = example1::<Rational>();
        assert_eq!(s.lambda_product(1, 0).unwrap(), Poly::one());
        assert_eq!(s.lambda_product(1, 1).unwrap(), p(&[(1, 4), (1, 4)]));
    }

    #[test]
    fn closed_form_matches_recurrence() {
        let s = example1::<Rational>();
        let fam = generate_family(&s, 12, 0).unwrap();
        for z in [4.0, 5.0, 4.5] {
            for (n, pn) in fam.iter().enumerate() {
                let v = pn.to_f64().eval(&z);
                assert!((v - example1_closed_form(n, z)).abs() <= 1e-10 * v.abs(), "n={n} z={z}");
            }
        }
    }
}
