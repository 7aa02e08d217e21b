//! Growth classification of count sequences (zero, bounded, or `mu q^{rm}` with a
//! square-root error witness) and the Felgner sample harness.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{EvalError, Evaluator};
use crate::formula::{Formula, FormulaError, VarDecl};
use crate::gf::{is_prime, make_field};

/// Denominator cap for the leading coefficient.
pub const MU_DENOMINATOR_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DichotomyError {
    #[error("need at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample index m = {0} appears twice")]
    DuplicateIndex(u32),
    #[error("base q = {0} must be at least 2")]
    BadBase(u64),
    #[error("counts must be non-negative, got {0}")]
    NegativeCount(BigInt),
    #[error("expected exactly one free variable, found {0}")]
    Arity(usize),
    #[error("variable `{var}` has sort {sort}; only sorts 1 and 2 are meaningful over F_(p^2)")]
    WrongSort { var: String, sort: u32 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthKind {
    Zero,
    Bounded,
    Power,
}

impl fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthKind::Zero => "ZERO",
            GrowthKind::Bounded => "BOUNDED",
            GrowthKind::Power => "POWER",
        })
    }
}

/// `POWER`: `|B - mu s^r| <= C s^(r-1) floor(sqrt s)` at every sample, where `s`
/// is the sample scale (`q^m`). `BOUNDED`: every sample is at most `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthClass {
    pub kind: GrowthKind,
    pub r: u32,
    pub mu: BigRational,
    pub c: BigRational,
    /// `(index, B - mu s^r)` per sample, in input order; empty unless `POWER`.
    pub residuals: Vec<(u64, BigRational)>,
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn floor_rat(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Simplest rational (smallest denominator, then numerator) in `[lo, hi]`, `0 < lo <= hi`.
fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = floor_rat(lo);
    let fl_r = BigRational::from_integer(fl.clone());
    if &fl_r == lo {
        return fl_r;
    }
    if fl_r.clone() + BigRational::one() <= *hi {
        return fl_r + BigRational::one();
    }
    let inner = simplest_between(&(hi - &fl_r).recip(), &(lo - &fl_r).recip());
    fl_r + inner.recip()
}

/// Best approximation of `x > 0` with denominator at most `cap`.
fn best_with_cap(x: &BigRational, cap: u64) -> BigRational {
    let cap = BigInt::from(cap);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    loop {
        let a = floor_rat(&rest);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > cap {
            let semi = (&cap - &k0) / &k1;
            let cand = BigRational::new(&semi * &h1 + &h0, &semi * &k1 + &k0);
            let conv = BigRational::new(h1, k1);
            return if (&cand - x).abs() < (&conv - x).abs() { cand } else { conv };
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            return BigRational::new(h1, k1);
        }
        rest = frac.recip();
    }
}

/// Leading coefficient estimate from `x = B / s^r` at the largest scale: the
/// simplest rational within relative distance `1/floor(sqrt s)` of `x`.
fn leading_coefficient(x: &BigRational, s: &BigInt) -> BigRational {
    let root = s.sqrt().max(BigInt::one());
    let delta = BigRational::new(BigInt::one(), root);
    let lo = x * (BigRational::one() - &delta);
    let hi = x * (BigRational::one() + &delta);
    let mu = if lo.is_positive() { simplest_between(&lo, &hi) } else { x.clone() };
    if mu.denom() > &BigInt::from(MU_DENOMINATOR_CAP) {
        best_with_cap(x, MU_DENOMINATOR_CAP)
    } else {
        mu
    }
}

/// Classifies counts `B` against scales `s` (`index`, `s`, `B`); needs at least 4 samples.
pub fn classify_scaled(samples: &[(u64, BigInt, BigInt)]) -> Result<GrowthClass, DichotomyError> {
    if samples.len() < 4 {
        return Err(DichotomyError::TooFewSamples(samples.len()));
    }
    if let Some((_, _, b)) = samples.iter().find(|(_, _, b)| b.is_negative()) {
        return Err(DichotomyError::NegativeCount(b.clone()));
    }
    if samples.iter().all(|(_, _, b)| b.is_zero()) {
        return Ok(GrowthClass {
            kind: GrowthKind::Zero,
            r: 0,
            mu: BigRational::zero(),
            c: BigRational::zero(),
            residuals: Vec::new(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].1.cmp(&samples[b].1));
    let (top, prev) = (&samples[order[order.len() - 1]], &samples[order[order.len() - 2]]);
    let r_est = if top.2.is_zero() {
        0.0
    } else if prev.2.is_zero() || prev.1 == top.1 {
        ln_big(&top.2) / ln_big(&top.1)
    } else {
        (ln_big(&top.2) - ln_big(&prev.2)) / (ln_big(&top.1) - ln_big(&prev.1))
    };
    let r = r_est.round();
    let bounded = |samples: &[(u64, BigInt, BigInt)]| {
        let max = samples.iter().map(|(_, _, b)| b.clone()).max().unwrap();
        GrowthClass {
            kind: GrowthKind::Bounded,
            r: 0,
            mu: BigRational::zero(),
            c: BigRational::from_integer(max),
            residuals: Vec::new(),
        }
    };
    if !(r >= 1.0) {
        return Ok(bounded(samples));
    }
    let r = r as u32;
    // The estimate is made on the primitive sequence so that it scales with the counts.
    let content = samples.iter().fold(BigInt::zero(), |g, (_, _, b)| g.gcd(b));
    let x = BigRational::new(&top.2 / &content, num_traits::pow(top.1.clone(), r as usize));
    let mu = leading_coefficient(&x, &top.1) * BigRational::from_integer(content);
    let mut c = BigRational::zero();
    let mut residuals = Vec::with_capacity(samples.len());
    for (idx, s, b) in samples {
        let main = &mu * BigRational::from_integer(num_traits::pow(s.clone(), r as usize));
        let res = BigRational::from_integer(b.clone()) - main;
        let scale = num_traits::pow(s.clone(), (r - 1) as usize) * s.sqrt().max(BigInt::one());
        let ratio = res.abs() / BigRational::from_integer(scale);
        if ratio > c {
            c = ratio;
        }
        residuals.push((*idx, res));
    }
    Ok(GrowthClass { kind: GrowthKind::Power, r, mu, c, residuals })
}

/// Classifies `(m, B_m)` samples as counts over `F_{q^m}`.
pub fn classify_growth(samples: &[(u32, BigInt)], q: u64) -> Result<GrowthClass, DichotomyError> {
    if q < 2 {
        return Err(DichotomyError::BadBase(q));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (m, _) in samples {
        if !seen.insert(*m) {
            return Err(DichotomyError::DuplicateIndex(*m));
        }
    }
    let scaled: Vec<(u64, BigInt, BigInt)> = samples
        .iter()
        .map(|(m, b)| (*m as u64, num_traits::pow(BigInt::from(q), *m as usize), b.clone()))
        .collect();
    classify_scaled(&scaled)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FelgnerRow {
    pub p: u64,
    pub count: u64,
    pub target: u64,
    pub gap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FelgnerConclusion {
    /// No sampled prime has exactly `p` satisfying points in `F_{p^2}`.
    RefutedAtSamples,
    /// Some sampled prime has exactly `p` points.
    NotRefuted,
}

impl fmt::Display for FelgnerConclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FelgnerConclusion::RefutedAtSamples => "REFUTED_AT_SAMPLES",
            FelgnerConclusion::NotRefuted => "NOT_REFUTED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FelgnerVerdict {
    pub rows: Vec<FelgnerRow>,
    /// Counts classified against the field size `p^2` as scale; `None` with fewer than 4 primes.
    pub advisory: Option<GrowthClass>,
    pub conclusion: FelgnerConclusion,
}

/// Puts a candidate in Felgner's setting: every variable ranges over `F_{p^2}`. A
/// closed formula gets an unused free variable, so it defines all or nothing.
pub fn felgner_normalize(formula: &Formula) -> Result<Formula, DichotomyError> {
    let free = formula.free();
    if free.len() > 1 {
        return Err(DichotomyError::Arity(free.len()));
    }
    for d in free {
        if d.sort > 2 {
            return Err(DichotomyError::WrongSort { var: d.name.clone(), sort: d.sort });
        }
    }
    for b in formula.prefix() {
        if b.sort > 2 {
            return Err(DichotomyError::WrongSort { var: b.vars[0].clone(), sort: b.sort });
        }
    }
    let lifted = formula.map_sorts(|_, _| 2);
    if !free.is_empty() {
        return Ok(lifted);
    }
    let taken = lifted.matrix().variables();
    let bound: Vec<&String> = lifted.prefix().iter().flat_map(|b| b.vars.iter()).collect();
    let mut name = "x".to_string();
    while taken.contains(&name) || bound.contains(&&name) {
        name.push('\'');
        if name.len() > 8 {
            name = format!("x{}", name.len());
        }
    }
    Ok(Formula::new(
        vec![VarDecl::new(&name, 2)],
        lifted.prefix().to_vec(),
        lifted.matrix().clone(),
    )?)
}

pub fn felgner_test(
    formula: &Formula,
    primes: &[u64],
    evaluator: &Evaluator,
) -> Result<FelgnerVerdict, DichotomyError> {
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(DichotomyError::NotPrime(p));
    }
    let candidate = felgner_normalize(formula)?;
    let rows = primes
        .par_iter()
        .map(|&p| {
            let ambient = make_field(p, 2).map_err(EvalError::from)?;
            let count = evaluator.count_satisfying(&candidate, &ambient)?;
            Ok(FelgnerRow { p, count, target: p, gap: count.abs_diff(p) })
        })
        .collect::<Result<Vec<_>, DichotomyError>>()?;
    let conclusion = if rows.iter().all(|r| r.count != r.target) {
        FelgnerConclusion::RefutedAtSamples
    } else {
        FelgnerConclusion::NotRefuted
    };
    let advisory = if rows.len() >= 4 {
        let samples: Vec<(u64, BigInt, BigInt)> = rows
            .iter()
            .map(|r| (r.p, BigInt::from(r.p) * r.p, BigInt::from(r.count)))
            .collect();
        Some(classify_scaled(&samples)?)
    } else {
        None
    };
    Ok(FelgnerVerdict { rows, advisory, conclusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use proptest::prelude::*;

    fn samples(f: impl Fn(u32) -> BigInt, ms: std::ops::RangeInclusive<u32>) -> Vec<(u32, BigInt)> {
        ms.map(|m| (m, f(m))).collect()
    }

    fn pow(q: u64, e: u32) -> BigInt {
        num_traits::pow(BigInt::from(q), e as usize)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn half_plus_half() {
        let s = samples(|m| (pow(3, m) + 1) / 2, 1..=8);
        let g = classify_growth(&s, 3).unwrap();
        assert_eq!(g.kind, GrowthKind::Power);
        assert_eq!(g.r, 1);
        assert_eq!(g.mu, rat(1, 2));
        assert!(g.c <= BigRational::one());
        assert!(g.residuals.iter().all(|(_, r)| *r == rat(1, 2)));
    }

    #[test]
    fn zero_and_constant() {
        let z = classify_growth(&samples(|_| BigInt::zero(), 1..=5), 3).unwrap();
        assert_eq!(z.kind, GrowthKind::Zero);
        let b = classify_growth(&samples(|_| BigInt::from(7), 1..=6), 3).unwrap();
        assert_eq!(b.kind, GrowthKind::Bounded);
        assert_eq!(b.c, rat(7, 1));
    }

    #[test]
    fn errors() {
        assert_eq!(
            classify_growth(&samples(|_| BigInt::one(), 1..=3), 3),
            Err(DichotomyError::TooFewSamples(3))
        );
        assert_eq!(
            classify_growth(&samples(|_| BigInt::one(), 1..=4), 1),
            Err(DichotomyError::BadBase(1))
        );
        let dup = vec![(1, BigInt::one()), (1, BigInt::one()), (2, BigInt::one()), (3, BigInt::one())];
        assert_eq!(classify_growth(&dup, 2), Err(DichotomyError::DuplicateIndex(1)));
    }

    #[test]
    fn exact_powers() {
        for q in [2u64, 3, 5] {
            for r in 1..=3u32 {
                let g = classify_growth(&samples(|m| pow(q, r * m), 1..=6), q).unwrap();
                assert_eq!((g.kind, g.r), (GrowthKind::Power, r));
                assert_eq!(g.mu, BigRational::one());
                assert!(g.c.is_zero());
            }
        }
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(49, 100), &rat(51, 100)), rat(1, 2));
        assert_eq!(simplest_between(&rat(3, 10), &rat(7, 20)), rat(1, 3));
        assert_eq!(simplest_between(&rat(5, 2), &rat(5, 2)), rat(5, 2));
        assert_eq!(best_with_cap(&rat(355, 113), 100), rat(311, 99));
    }

    #[test]
    fn felgner_examples() {
        let ev = Evaluator::default();
        let primes = [3, 5, 7];
        let v = felgner_test(&parse("x = x").unwrap(), &primes, &ev).unwrap();
        assert_eq!(v.rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![9, 25, 49]);
        assert_eq!(v.conclusion, FelgnerConclusion::RefutedAtSamples);
        assert!(v.advisory.is_none());
        let v = felgner_test(&parse("E y : ext 2 . y^2 - x = 0").unwrap(), &primes, &ev).unwrap();
        assert_eq!(v.rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![5, 13, 25]);
        assert_eq!(v.rows[0].gap, 2);
        let v = felgner_test(&parse("1 = 0").unwrap(), &[3, 5, 7, 11], &ev).unwrap();
        assert!(v.rows.iter().all(|r| r.count == 0));
        assert_eq!(v.advisory.unwrap().kind, GrowthKind::Zero);
        let v = felgner_test(&parse("1 = 1").unwrap(), &[3, 5, 7, 11], &ev).unwrap();
        assert_eq!(v.rows[3].count, 121);
        let adv = v.advisory.unwrap();
        assert_eq!((adv.r, adv.mu.clone()), (1, BigRational::one()));
        let v = felgner_test(&parse("E y : ext 2 . A z : ext 2 . x*y = 1 & z^2 != y").unwrap(), &[3, 5, 7, 11, 13], &ev).unwrap();
        assert_eq!(v.advisory.unwrap().mu, rat(1, 2));
    }

    #[test]
    fn felgner_detects_a_hit() {
        // x^p = x cuts out F_p inside F_{p^2}: exactly p points.
        let ev = Evaluator::default();
        let f = parse("x^3 = x").unwrap();
        let v = felgner_test(&f, &[3], &ev).unwrap();
        assert_eq!(v.rows[0].count, 3);
        assert_eq!(v.conclusion, FelgnerConclusion::NotRefuted);
    }

    #[test]
    fn felgner_errors() {
        let ev = Evaluator::default();
        assert_eq!(
            felgner_test(&parse("x = y").unwrap(), &[3], &ev),
            Err(DichotomyError::Arity(2))
        );
        assert!(matches!(
            felgner_test(&parse("free x : ext 3 . x = x").unwrap(), &[3], &ev),
            Err(DichotomyError::WrongSort { .. })
        ));
        assert_eq!(felgner_test(&parse("x = x").unwrap(), &[9], &ev), Err(DichotomyError::NotPrime(9)));
    }

    proptest! {
        #[test]
        fn scale_consistent(c in 1i64..20, num in 1i64..7, den in 1i64..5, lower in -3i64..4, q in 2u64..6) {
            // B_m = c (num q^{2m} + lower q^m den) / den, kept integral.
            let base: Vec<(u32, BigInt)> = (1..=8)
                .map(|m| (m, BigInt::from(num) * pow(q, 2 * m) + BigInt::from(lower * den) * pow(q, m)))
                .collect();
            prop_assume!(base.iter().all(|(_, b)| !b.is_negative()));
            let scaled: Vec<(u32, BigInt)> = base.iter().map(|(m, b)| (*m, b * c)).collect();
            let g = classify_growth(&base, q).unwrap();
            let h = classify_growth(&scaled, q).unwrap();
            prop_assert_eq!(g.r, 2);
            if lower == 0 {
                prop_assert_eq!(g.mu.clone(), rat(num, 1));
            }
            prop_assert_eq!(h.r, g.r);
            prop_assert_eq!(h.mu, g.mu * rat(c, 1));
            prop_assert_eq!(h.c, g.c * rat(c, 1));
        }
    }
}
