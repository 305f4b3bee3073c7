//! Family specifications: the builtin families and explicit coefficient lists.
//!
//! Text forms (one per family):
//! `builtin: example1`, `builtin: ljacobi, a=11, c=12`,
//! `builtin: eta, eta=1, t=0`, `c=[1,2,3], lambda=[1/4,1/4], a=[0,0]`.

use std::fmt;

use crate::chainseq::eta_family;
use crate::error::{Error, Result};
use crate::recurrence::{example1, CoefficientSequences, Sequence};
use crate::scalar::{int, parse_rational, Rational};
use crate::zeros::ljacobi_seqs;

/// Degree range over which L-Jacobi positivity is asserted by default.
pub const DEFAULT_RANGE: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Example1,
    LJacobi {
        a: Rational,
        c: Rational,
    },
    /// R_I form of the r_n recurrence at beta = 0: c_n = -1, lambda_n = 4 d_{n+1}, a_n = 0.
    Eta {
        eta: Rational,
        t: Rational,
    },
    /// `lambda` and `a` start at index 1.
    Explicit {
        c: Vec<Rational>,
        lambda: Vec<Rational>,
        a: Vec<Rational>,
    },
}

/// Split on commas that are not inside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.into_iter().filter(|p| !p.is_empty()).collect()
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..] list, got {s:?}")))?;
    inner.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_rational).collect()
}

fn key_values(parts: &[&str]) -> Result<Vec<(String, String)>> {
    parts
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {p:?}")))
        })
        .collect()
}

fn lookup<'a>(kv: &'a [(String, String)], key: &str) -> Result<&'a str> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).ok_or_else(|| Error::Parse(format!("missing `{key}`")))
}

impl FamilySpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("builtin:") {
            let parts = split_top(rest);
            let (name, params) = parts.split_first().ok_or_else(|| Error::Parse("empty builtin".into()))?;
            let kv = key_values(params)?;
            return match name.to_ascii_lowercase().as_str() {
                "example1" => Ok(FamilySpec::Example1),
                "ljacobi" => Ok(FamilySpec::LJacobi {
                    a: parse_rational(lookup(&kv, "a")?)?,
                    c: parse_rational(lookup(&kv, "c")?)?,
                }),
                "eta" => Ok(FamilySpec::Eta {
                    eta: parse_rational(lookup(&kv, "eta")?)?,
                    t: parse_rational(lookup(&kv, "t").unwrap_or("0"))?,
                }),
                other => Err(Error::Parse(format!("unknown builtin `{other}`"))),
            };
        }
        let kv = key_values(&split_top(s))?;
        let c = parse_list(lookup(&kv, "c")?)?;
        let lambda = parse_list(lookup(&kv, "lambda")?)?;
        let a = match lookup(&kv, "a") {
            Ok(v) => parse_list(v)?,
            Err(_) => vec![Rational::from_integer(0.into()); lambda.len()],
        };
        Ok(FamilySpec::Explicit { c, lambda, a })
    }

    pub fn build(&self) -> Result<CoefficientSequences<Rational>> {
        match self {
            FamilySpec::Example1 => Ok(example1()),
            FamilySpec::LJacobi { a, c } => ljacobi_seqs(a.clone(), c.clone(), DEFAULT_RANGE),
            FamilySpec::Eta { eta, t } => {
                let (chain, _) = eta_family(eta, t)?;
                let lambda = Sequence::rule("lambda", 1, move |n| Ok(int(4) * chain.d(n + 1)?));
                Ok(CoefficientSequences::new(
                    Sequence::constant("c", 0, int(-1)),
                    lambda,
                    Sequence::constant("a", 1, int(0)),
                    self.to_string(),
                ))
            }
            FamilySpec::Explicit { c, lambda, a } => {
                let mut seqs = CoefficientSequences::from_lists(c.clone(), lambda.clone(), a.clone());
                let n = c.len().min(lambda.len() + 1);
                seqs.positive_l = n > 0 && seqs.check_positive_l(n)?;
                seqs.range = Some(n);
                seqs.label = self.to_string();
                Ok(seqs)
            }
        }
    }

    /// The families every suite runs over.
    pub fn builtins() -> Vec<FamilySpec> {
        vec![
            FamilySpec::Example1,
            FamilySpec::LJacobi { a: int(11), c: int(12) },
            FamilySpec::LJacobi { a: int(-12), c: int(-10) },
            FamilySpec::Eta { eta: int(1), t: int(0) },
        ]
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            FamilySpec::Example1 => write!(f, "builtin: example1"),
            FamilySpec::LJacobi { a, c } => write!(f, "builtin: ljacobi, a={a}, c={c}"),
            FamilySpec::Eta { eta, t } => write!(f, "builtin: eta, eta={eta}, t={t}"),
            FamilySpec::Explicit { c, lambda, a } => {
                write!(f, "c=[{}], lambda=[{}], a=[{}]", list(c), list(lambda), list(a))
            }
        }
    }
}

/// c = 1, lambda = 1/4, a = 0: a positive_L family with no poles.
pub fn constant_positive() -> CoefficientSequences<Rational> {
    let mut seqs = CoefficientSequences::constant(int(1), crate::scalar::rat(1, 4), int(0), "constant(c=1,lambda=1/4)");
    seqs.positive_l = true;
    seqs
}

/// Builtins with `positive_l` set, plus the constant family.
pub fn positive_l_families() -> Result<Vec<CoefficientSequences<Rational>>> {
    let mut out: Vec<_> = FamilySpec::builtins()
        .iter()
        .map(FamilySpec::build)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|s| s.positive_l)
        .collect();
    out.push(constant_positive());
    Ok(out)
}
