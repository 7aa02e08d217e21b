//! Brute-force truth and counting over finite fields.
//!
//! A formula is compiled against an ambient field: each variable gets its domain
//! (the subfield named by its sort), and the matrix becomes a tree of polynomial
//! evaluators over field codes. Quantifiers are evaluated outermost first with
//! short-circuiting; the free-assignment space is split into chunks that are
//! counted in parallel and summed exactly.

pub mod mode;

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{Coeff, Formula, Matrix, PolyTerm, Quantifier, Relation};
use crate::gf::{Field, FieldError, FieldSpec, MAX_FIELD_SIZE};

pub use mode::{default_mode, modes, Base, CoefficientMode, Lifted, ModeRegistry};

/// Default ceiling on the number of matrix evaluations an operation may plan.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error("variable `{var}` has domain degree {degree}, which does not divide the ambient degree {ambient}")]
    SortIncompatible { var: String, degree: u32, ambient: u32 },
    #[error("{}", budget_message(*.estimate, *.budget, *.m))]
    Budget { estimate: Option<u128>, budget: u128, m: Option<u32> },
    #[error("coefficient of the formula lives in {found}, not in the ambient {ambient}")]
    ForeignCoefficient { found: String, ambient: String },
    #[error("at least one coefficient index is required")]
    EmptyRange,
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn budget_message(estimate: Option<u128>, budget: u128, m: Option<u32>) -> String {
    let est = estimate.map_or_else(|| "more than 2^128".to_string(), |e| e.to_string());
    match m {
        Some(m) => format!("refusing coefficient m = {m}: estimated {est} evaluations exceed the budget of {budget}"),
        None => format!("refusing: estimated {est} evaluations exceed the budget of {budget}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// Refuse when the worst-case number of matrix evaluations exceeds this.
    pub budget: u128,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { budget: DEFAULT_BUDGET, threads: 0 }
    }
}

/// Runs `f` on a pool of the requested size.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Poincaré coefficients `m = 1..M` of a formula over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSequence {
    pub q: FieldSpec,
    pub mode: String,
    pub coefficients: Vec<BigInt>,
}

impl CountSequence {
    /// Coefficient at index `m >= 1`.
    pub fn coefficient(&self, m: usize) -> Option<&BigInt> {
        m.checked_sub(1).and_then(|i| self.coefficients.get(i))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

struct CompiledPoly {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    #[inline]
    fn eval(&self, f: &Field, vals: &[u64]) -> u64 {
        let mut acc = 0;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, e) in mono {
                let x = vals[v];
                t = f.mul_raw(t, if e == 1 { x } else { f.pow_raw(x, e as u128) });
                if t == 0 {
                    break;
                }
            }
            acc = f.add_raw(acc, t);
        }
        acc
    }
}

enum CompiledMatrix {
    Atom { poly: CompiledPoly, zero: bool },
    Not(Box<CompiledMatrix>),
    And(Vec<CompiledMatrix>),
    Or(Vec<CompiledMatrix>),
}

impl CompiledMatrix {
    fn eval(&self, f: &Field, vals: &[u64]) -> bool {
        match self {
            CompiledMatrix::Atom { poly, zero } => (poly.eval(f, vals) == 0) == *zero,
            CompiledMatrix::Not(m) => !m.eval(f, vals),
            CompiledMatrix::And(ms) => ms.iter().all(|m| m.eval(f, vals)),
            CompiledMatrix::Or(ms) => ms.iter().any(|m| m.eval(f, vals)),
        }
    }
}

/// A formula bound to an ambient field and concrete variable domains.
pub struct Program {
    field: Field,
    domains: Vec<Arc<Vec<u64>>>,
    quantifiers: Vec<Quantifier>,
    n_free: usize,
    matrix: CompiledMatrix,
}

impl Program {
    /// Compiles `formula` over `ambient`. A free variable of sort `d` ranges over the
    /// subfield of degree `d * free_scale`, a bound one over degree `d * bound_scale`.
    ///
    /// Refuses before materializing any domain if the worst-case number of matrix
    /// evaluations exceeds `budget`.
    pub fn compile(
        formula: &Formula,
        ambient: &Field,
        free_scale: u32,
        bound_scale: u32,
        budget: u128,
    ) -> Result<Program, EvalError> {
        let mut slots: HashMap<String, usize> = HashMap::new();
        let mut degrees = Vec::new();
        for d in formula.free() {
            slots.insert(d.name.clone(), degrees.len());
            degrees.push((d.name.clone(), d.sort * free_scale));
        }
        let mut quantifiers = Vec::new();
        for b in formula.prefix() {
            for v in &b.vars {
                slots.insert(v.clone(), degrees.len());
                degrees.push((v.clone(), b.sort * bound_scale));
                quantifiers.push(b.quantifier);
            }
        }

        let n = ambient.degree();
        for (var, degree) in &degrees {
            if n % degree != 0 {
                return Err(EvalError::SortIncompatible {
                    var: var.clone(),
                    degree: *degree,
                    ambient: n,
                });
            }
        }
        let p = ambient.characteristic() as u128;
        let estimate = degrees.iter().try_fold(1u128, |acc, (_, d)| {
            acc.checked_mul(crate::gf::checked_pow(p, *d as u64)?)
        });
        if !matches!(estimate, Some(e) if e <= budget) {
            return Err(EvalError::Budget { estimate, budget, m: None });
        }

        let mut cache: HashMap<u32, Arc<Vec<u64>>> = HashMap::new();
        let mut domains = Vec::with_capacity(degrees.len());
        for (_, degree) in degrees {
            let dom = match cache.get(&degree) {
                Some(d) => d.clone(),
                None => {
                    let d = Arc::new(ambient.subfield_codes(degree)?);
                    cache.insert(degree, d.clone());
                    d
                }
            };
            domains.push(dom);
        }

        let matrix = compile_matrix(formula.matrix(), ambient, &slots)?;
        Ok(Program {
            field: ambient.clone(),
            domains,
            quantifiers,
            n_free: formula.free().len(),
            matrix,
        })
    }

    /// Number of free assignments.
    pub fn free_space(&self) -> Option<u128> {
        self.domains[..self.n_free]
            .iter()
            .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
    }

    /// Worst-case number of matrix evaluations.
    pub fn estimate(&self) -> Option<u128> {
        self.domains
            .iter()
            .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
    }

    fn holds(&self, depth: usize, vals: &mut [u64]) -> bool {
        if depth == self.quantifiers.len() {
            return self.matrix.eval(&self.field, vals);
        }
        let slot = self.n_free + depth;
        let dom = &self.domains[slot];
        match self.quantifiers[depth] {
            Quantifier::Exists => {
                for &v in dom.iter() {
                    vals[slot] = v;
                    if self.holds(depth + 1, vals) {
                        return true;
                    }
                }
                false
            }
            Quantifier::Forall => {
                for &v in dom.iter() {
                    vals[slot] = v;
                    if !self.holds(depth + 1, vals) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Truth at a full assignment of the free variables, given as codes.
    pub fn holds_at(&self, free_values: &[u64]) -> bool {
        assert_eq!(free_values.len(), self.n_free);
        let mut vals = vec![0u64; self.domains.len()];
        vals[..self.n_free].copy_from_slice(free_values);
        self.holds(0, &mut vals)
    }

    /// Counts the free assignments (first variable most significant, codes ascending)
    /// under which the formula holds.
    pub fn count(&self) -> u64 {
        let total = self.free_space().expect("budget-checked before counting") as u64;
        if total == 0 {
            return 0;
        }
        const CHUNK: u64 = 4096;
        let chunks = total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                self.count_range(start, end)
            })
            .sum()
    }

    fn count_range(&self, start: u64, end: u64) -> u64 {
        let nf = self.n_free;
        let mut vals = vec![0u64; self.domains.len()];
        let mut digits = vec![0usize; nf];
        let mut r = start;
        for i in (0..nf).rev() {
            let len = self.domains[i].len() as u64;
            digits[i] = (r % len) as usize;
            r /= len;
            vals[i] = self.domains[i][digits[i]];
        }
        let mut count = 0;
        for _ in start..end {
            if self.holds(0, &mut vals) {
                count += 1;
            }
            for i in (0..nf).rev() {
                digits[i] += 1;
                if digits[i] < self.domains[i].len() {
                    vals[i] = self.domains[i][digits[i]];
                    break;
                }
                digits[i] = 0;
                vals[i] = self.domains[i][0];
            }
        }
        count
    }
}

fn compile_poly(
    poly: &PolyTerm,
    field: &Field,
    slots: &HashMap<String, usize>,
) -> Result<CompiledPoly, EvalError> {
    let mut terms = Vec::new();
    for (mono, coeff) in poly.terms() {
        let c = match coeff {
            Coeff::Int(v) => field.reduce_bigint(v),
            Coeff::Elem(e) if e.field() == field => e.code(),
            Coeff::Elem(e) => {
                return Err(EvalError::ForeignCoefficient {
                    found: e.field().to_string(),
                    ambient: field.to_string(),
                })
            }
        };
        if c == 0 {
            continue;
        }
        let vars = mono
            .powers()
            .iter()
            .map(|(v, e)| (slots[v], *e))
            .collect();
        terms.push((c, vars));
    }
    Ok(CompiledPoly { terms })
}

fn compile_matrix(
    m: &Matrix,
    field: &Field,
    slots: &HashMap<String, usize>,
) -> Result<CompiledMatrix, EvalError> {
    let many = |ms: &[Matrix]| {
        ms.iter()
            .map(|m| compile_matrix(m, field, slots))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(match m {
        Matrix::Atom(a) => CompiledMatrix::Atom {
            poly: compile_poly(&a.poly, field, slots)?,
            zero: a.relation == Relation::Eq,
        },
        Matrix::Not(inner) => CompiledMatrix::Not(Box::new(compile_matrix(inner, field, slots)?)),
        Matrix::And(ms) => CompiledMatrix::And(many(ms)?),
        Matrix::Or(ms) => CompiledMatrix::Or(many(ms)?),
    })
}

fn lcm(a: u32, b: u32) -> u32 {
    a / num_integer::gcd(a, b) * b
}

/// Evaluation entry points with a fixed budget and thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Evaluator {
    pub config: EvalConfig,
}

impl Evaluator {
    pub fn new(config: EvalConfig) -> Self {
        Evaluator { config }
    }

    fn check_budget(&self, estimate: Option<u128>, m: Option<u32>) -> Result<(), EvalError> {
        match estimate {
            Some(e) if e <= self.config.budget => Ok(()),
            _ => Err(EvalError::Budget { estimate, budget: self.config.budget, m }),
        }
    }

    /// Truth of a closed formula; variables of sort `d` range over `F_{p^d}`.
    pub fn decide(&self, formula: &Formula, ambient: &Field) -> Result<bool, EvalError> {
        if !formula.is_closed() {
            return Err(EvalError::FreeVariables(formula.free_variables()));
        }
        let prog = Program::compile(formula, ambient, 1, 1, self.config.budget)?;
        Ok(with_threads(self.config.threads, || prog.holds_at(&[])))
    }

    /// Number of free assignments, each variable in its sort subfield, satisfying
    /// the formula.
    pub fn count_satisfying(&self, formula: &Formula, ambient: &Field) -> Result<u64, EvalError> {
        self.count_scaled(formula, ambient, 1, 1)
    }

    /// [`count_satisfying`](Self::count_satisfying) with sorts multiplied by the
    /// given factors for free and bound variables.
    pub fn count_scaled(
        &self,
        formula: &Formula,
        ambient: &Field,
        free_scale: u32,
        bound_scale: u32,
    ) -> Result<u64, EvalError> {
        let prog = Program::compile(formula, ambient, free_scale, bound_scale, self.config.budget)?;
        Ok(with_threads(self.config.threads, || prog.count()))
    }

    /// Ambient field degree over `F_p` and the sort multipliers (over `F_p`) used
    /// for coefficient `m`.
    fn coefficient_plan(
        formula: &Formula,
        base: FieldSpec,
        m: u32,
        mode: &dyn CoefficientMode,
    ) -> (u32, u32, u32) {
        let (sf, sb) = mode.scales(m);
        let (sf, sb) = (sf * base.n, sb * base.n);
        let free_deg = formula.free().iter().map(|d| d.sort * sf);
        let bound_deg = formula.prefix().iter().map(|b| b.sort * sb);
        let degree = free_deg.chain(bound_deg).fold(base.n * m, lcm);
        (degree, sf, sb)
    }

    /// Worst-case evaluations for coefficient `m` without building any field.
    fn coefficient_estimate(
        formula: &Formula,
        base: FieldSpec,
        m: u32,
        mode: &dyn CoefficientMode,
    ) -> Option<u128> {
        let (degree, sf, sb) = Self::coefficient_plan(formula, base, m, mode);
        let p = base.p as u128;
        crate::gf::checked_pow(p, degree as u64).filter(|&s| s <= MAX_FIELD_SIZE as u128)?;
        let free = formula.free().iter().map(|d| d.sort * sf);
        let bound = formula
            .prefix()
            .iter()
            .flat_map(|b| std::iter::repeat(b.sort * sb).take(b.vars.len()));
        free.chain(bound).try_fold(1u128, |acc, deg| {
            acc.checked_mul(crate::gf::checked_pow(p, deg as u64)?)
        })
    }

    /// Coefficients `mu(m)`, `m = 1..max_m`: the number of satisfying free
    /// assignments over the degree-`m` extension of `F_q`, with domains chosen by `mode`.
    ///
    /// Refuses up front, naming the smallest offending `m`, if any coefficient would
    /// exceed the budget.
    pub fn poincare_coefficients(
        &self,
        formula: &Formula,
        base: FieldSpec,
        max_m: u32,
        mode: &dyn CoefficientMode,
    ) -> Result<CountSequence, EvalError> {
        if max_m == 0 {
            return Err(EvalError::EmptyRange);
        }
        for m in 1..=max_m {
            self.check_budget(Self::coefficient_estimate(formula, base, m, mode), Some(m))?;
        }
        let coefficients = (1..=max_m)
            .map(|m| {
                let (degree, sf, sb) = Self::coefficient_plan(formula, base, m, mode);
                let ambient = crate::gf::make_field(base.p, degree)?;
                let prog = Program::compile(formula, &ambient, sf, sb, self.config.budget)?;
                Ok(BigInt::from(with_threads(self.config.threads, || prog.count())))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(CountSequence { q: base, mode: mode.name().to_string(), coefficients })
    }
}

pub fn decide(formula: &Formula, ambient: &Field) -> Result<bool, EvalError> {
    Evaluator::default().decide(formula, ambient)
}

pub fn count_satisfying(formula: &Formula, ambient: &Field) -> Result<u64, EvalError> {
    Evaluator::default().count_satisfying(formula, ambient)
}

pub fn poincare_coefficients(
    formula: &Formula,
    base: FieldSpec,
    max_m: u32,
    mode: &dyn CoefficientMode,
) -> Result<CountSequence, EvalError> {
    Evaluator::default().poincare_coefficients(formula, base, max_m, mode)
}
