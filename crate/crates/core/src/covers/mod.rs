//! Plane covers `f(x, y) = 0` over the `x`-line: Frobenius cycle types of fibers,
//! class censuses, and the exceptionality pattern across extensions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{with_threads, CountSequence};
use crate::formula::{Coeff, PolyTerm};
use crate::gf::poly::{factor_degrees, UniPoly};
use crate::gf::{make_field, Field, FieldError, FieldSpec};

/// Default ceiling on fibers examined by a scan.
pub const DEFAULT_COVER_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("the cover polynomial must involve y")]
    ConstantInY,
    #[error("cover polynomials may only use the variables x and y, found `{0}`")]
    UnknownVariable(String),
    #[error("coefficient {found} does not live in {field}")]
    ForeignCoefficient { found: String, field: String },
    #[error("refusing m = {m}: {fibers} fibers exceed the budget of {budget}")]
    Budget { m: u32, fibers: u128, budget: u128 },
    #[error("at least one extension degree is required")]
    EmptyRange,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Multiset of factor degrees, ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable();
        CycleType(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn has_fixed_point(&self) -> bool {
        self.0.contains(&1)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fiber {
    Ramified,
    Unramified(CycleType),
}

/// `f` as a polynomial in `y` whose coefficients are polynomials in `x`.
#[derive(Debug, Clone)]
pub struct Cover {
    poly: PolyTerm,
    // y-degree -> (x-degree, coefficient)
    rows: Vec<Vec<(u32, Coeff)>>,
}

impl Cover {
    pub fn new(poly: PolyTerm) -> Result<Self, CoverError> {
        if let Some(v) = poly.variables().into_iter().find(|v| v != "x" && v != "y") {
            return Err(CoverError::UnknownVariable(v));
        }
        let dy = poly.degree_in("y") as usize;
        if dy == 0 {
            return Err(CoverError::ConstantInY);
        }
        let mut rows = vec![Vec::new(); dy + 1];
        for (mono, c) in poly.terms() {
            rows[mono.degree_in("y") as usize].push((mono.degree_in("x"), c.clone()));
        }
        Ok(Cover { poly, rows })
    }

    pub fn poly(&self) -> &PolyTerm {
        &self.poly
    }

    pub fn degree_y(&self) -> usize {
        self.rows.len() - 1
    }

    /// Per-`y`-degree coefficient polynomials in `x` over `field`.
    fn over(&self, field: &Field) -> Result<Vec<UniPoly>, CoverError> {
        self.rows
            .iter()
            .map(|row| {
                let mut coeffs = Vec::new();
                for (dx, c) in row {
                    if let Coeff::Elem(e) = c {
                        if e.field() != field {
                            return Err(CoverError::ForeignCoefficient {
                                found: e.to_string(),
                                field: field.spec().to_string(),
                            });
                        }
                    }
                    let dx = *dx as usize;
                    if coeffs.len() <= dx {
                        coeffs.resize(dx + 1, 0);
                    }
                    coeffs[dx] = field.add_raw(coeffs[dx], c.to_field(field).code());
                }
                Ok(UniPoly::new(coeffs))
            })
            .collect()
    }
}

struct FiberMap<'a> {
    field: &'a Field,
    rows: Vec<UniPoly>,
    degree: usize,
}

impl<'a> FiberMap<'a> {
    fn new(cover: &Cover, field: &'a Field) -> Result<Self, CoverError> {
        Ok(FiberMap { field, rows: cover.over(field)?, degree: cover.degree_y() })
    }

    fn fiber_poly(&self, x0: u64) -> UniPoly {
        UniPoly::new(self.rows.iter().map(|r| r.eval(self.field, x0)).collect())
    }

    fn classify(&self, x0: u64) -> Fiber {
        let g = self.fiber_poly(x0);
        if g.degree() != Some(self.degree) || !g.is_separable(self.field) {
            return Fiber::Ramified;
        }
        Fiber::Unramified(CycleType::new(factor_degrees(self.field, &g)))
    }

    /// Whether `f(x0, y) = 0` has a root in the field, by gcd with `y^Q - y`.
    fn has_root(&self, x0: u64) -> bool {
        let g = self.fiber_poly(x0);
        match g.degree() {
            None => true,
            Some(0) => false,
            Some(_) => {
                let f = self.field;
                let yq = UniPoly::x().pow_mod(f, f.size() as u128, &g);
                let h = g.gcd(f, &yq.sub(f, &UniPoly::x()));
                h.degree().is_some_and(|d| d >= 1)
            }
        }
    }

    fn has_point(&self, x0: u64) -> bool {
        match self.classify(x0) {
            Fiber::Unramified(t) => t.has_fixed_point(),
            Fiber::Ramified => self.has_root(x0),
        }
    }
}

pub fn fiber_cycle_type(cover: &Cover, x0: &crate::gf::FieldElement) -> Result<Fiber, CoverError> {
    let map = FiberMap::new(cover, x0.field())?;
    Ok(map.classify(x0.code()))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Census {
    pub classes: BTreeMap<CycleType, u64>,
    pub ramified: u64,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.classes.values().sum::<u64>() + self.ramified
    }

    fn merge(mut self, other: Census) -> Census {
        for (k, v) in other.classes {
            *self.classes.entry(k).or_default() += v;
        }
        self.ramified += other.ramified;
        self
    }
}

pub fn frobenius_class_census(cover: &Cover, field: &Field) -> Result<Census, CoverError> {
    let map = FiberMap::new(cover, field)?;
    Ok((0..field.size())
        .into_par_iter()
        .fold(Census::default, |mut acc, x0| {
            match map.classify(x0) {
                Fiber::Ramified => acc.ramified += 1,
                Fiber::Unramified(t) => *acc.classes.entry(t).or_default() += 1,
            }
            acc
        })
        .reduce(Census::default, Census::merge))
}

/// Number of `x0` in `field` whose fiber has a rational point.
pub fn fiber_point_count(cover: &Cover, field: &Field) -> Result<u64, CoverError> {
    let map = FiberMap::new(cover, field)?;
    Ok((0..field.size()).into_par_iter().filter(|&x0| map.has_point(x0)).count() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    /// Maximum total fibers examined.
    pub budget: u128,
    pub threads: usize,
    /// Count the point at infinity of the `x`-line.
    pub projective: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { budget: DEFAULT_COVER_BUDGET, threads: 0, projective: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalityReport {
    pub q: FieldSpec,
    pub projective: bool,
    /// `deg_y f = 1`: every fiber trivially has a point.
    pub degenerate: bool,
    /// `flags[m-1]`: every `x0` in `F_{q^m}` has a fiber point.
    pub flags: Vec<bool>,
    pub detected_period: Option<usize>,
    pub exceptional: bool,
    /// Fiber-point counts per `m`, including infinity when `projective`.
    pub coefficients: Vec<BigInt>,
    /// Flags for `m = M+1 ..`, used to re-check the period; empty when over budget.
    pub extension_flags: Vec<bool>,
    /// Whether the extension agrees with the period; `None` when not run.
    pub period_confirmed: Option<bool>,
}

/// Smallest `P` with `2P <= len` such that the sequence is `P`-periodic.
pub fn detect_period(flags: &[bool]) -> Option<usize> {
    (1..=flags.len() / 2).find(|&p| (p..flags.len()).all(|i| flags[i] == flags[i - p]))
}

fn scan_fibers(q: FieldSpec, ms: std::ops::RangeInclusive<u32>) -> Result<Vec<(u32, u128)>, CoverError> {
    ms.map(|m| {
        let size = q.extension(m).size().ok_or(CoverError::Budget { m, fibers: u128::MAX, budget: 0 })?;
        Ok((m, size))
    })
    .collect()
}

fn within_budget(sizes: &[(u32, u128)], budget: u128) -> Result<(), CoverError> {
    let mut total: u128 = 0;
    for &(m, s) in sizes {
        total = total.saturating_add(s);
        if total > budget {
            return Err(CoverError::Budget { m, fibers: total, budget });
        }
    }
    Ok(())
}

pub fn exceptionality_scan(
    cover: &Cover,
    q: FieldSpec,
    max_m: u32,
    config: &ScanConfig,
) -> Result<ExceptionalityReport, CoverError> {
    if max_m == 0 {
        return Err(CoverError::EmptyRange);
    }
    let sizes = scan_fibers(q, 1..=max_m).map_err(|e| match e {
        CoverError::Budget { m, fibers, .. } => CoverError::Budget { m, fibers, budget: config.budget },
        e => e,
    })?;
    within_budget(&sizes, config.budget)?;
    let run = |m: u32| -> Result<(bool, u64), CoverError> {
        let field = make_field(q.p, q.n * m)?;
        let count = with_threads(config.threads, || fiber_point_count(cover, &field))?;
        Ok((count == field.size(), count))
    };
    let mut flags = Vec::new();
    let mut coefficients = Vec::new();
    for m in 1..=max_m {
        let (flag, count) = run(m)?;
        flags.push(flag);
        coefficients.push(BigInt::from(count) + u8::from(config.projective));
    }
    let detected_period = detect_period(&flags);
    let mut extension_flags = Vec::new();
    let mut period_confirmed = None;
    if let Some(period) = detected_period {
        let extra = max_m.div_ceil(2);
        let ext = scan_fibers(q, max_m + 1..=max_m + extra);
        let affordable = ext.as_ref().is_ok_and(|ext| {
            let all: Vec<(u32, u128)> = sizes.iter().chain(ext.iter()).copied().collect();
            within_budget(&all, config.budget).is_ok()
        });
        if affordable {
            for m in max_m + 1..=max_m + extra {
                extension_flags.push(run(m)?.0);
            }
            let all: Vec<bool> = flags.iter().chain(extension_flags.iter()).copied().collect();
            period_confirmed = Some((period..all.len()).all(|i| all[i] == all[i - period]));
        }
    }
    let exceptional = detected_period.is_some()
        && flags.iter().any(|&f| f)
        && period_confirmed != Some(false);
    Ok(ExceptionalityReport {
        q,
        projective: config.projective,
        degenerate: cover.degree_y() == 1,
        flags,
        detected_period,
        exceptional,
        coefficients,
        extension_flags,
        period_confirmed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormCheck {
    pub m: u32,
    pub flagged: bool,
    pub coefficient: BigInt,
    /// Point count of the base line (`q^m`, plus one when projective); only for flagged `m`.
    pub expected: Option<BigInt>,
}

impl ClosedFormCheck {
    pub fn matches(&self) -> Option<bool> {
        self.expected.as_ref().map(|e| e == &self.coefficient)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalPoincare {
    pub sequence: CountSequence,
    pub checks: Vec<ClosedFormCheck>,
    pub scan: ExceptionalityReport,
}

impl ExceptionalPoincare {
    pub fn mismatches(&self) -> Vec<u32> {
        self.checks.iter().filter(|c| c.matches() == Some(false)).map(|c| c.m).collect()
    }
}

pub fn exceptional_poincare(
    cover: &Cover,
    q: FieldSpec,
    max_m: u32,
    config: &ScanConfig,
) -> Result<ExceptionalPoincare, CoverError> {
    let scan = exceptionality_scan(cover, q, max_m, config)?;
    let checks = (1..=max_m)
        .map(|m| {
            let i = (m - 1) as usize;
            let flagged = scan.flags[i];
            let expected = flagged.then(|| {
                let base = BigInt::from(q.extension(m).size().expect("scanned field has a size"));
                base + u8::from(config.projective)
            });
            ClosedFormCheck { m, flagged, coefficient: scan.coefficients[i].clone(), expected }
        })
        .collect();
    let mode = if config.projective { "projective" } else { "affine" };
    let sequence = CountSequence { q, mode: mode.into(), coefficients: scan.coefficients.clone() };
    Ok(ExceptionalPoincare { sequence, checks, scan })
}
