//! Points of affine systems fixed by a Frobenius vector `(Fr^{d_1}, .., Fr^{d_m})`,
//! their coefficient sequences over extensions of `F_q`, and rationality probes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::eval::{CountSequence, EvalError, Evaluator, Lifted};
use crate::formula::{parse_poly, Atom, Formula, FormulaError, Matrix, PolyTerm, Relation, VarDecl};
use crate::gf::FieldSpec;
use crate::series::{fit_rational, SeriesError, SeriesFit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistedError {
    #[error("Frobenius vector entries must be positive integers: `{0}`")]
    BadVector(String),
    #[error("Frobenius vector has {got} entries for {vars} variables")]
    Length { vars: usize, got: usize },
    #[error("twisted counting is only implemented for quantifier-free systems of equations; the formula has {0} quantified variables")]
    Quantified(usize),
    #[error("twisted counting needs a conjunction of equations; `{0}` is not one")]
    NotASystem(String),
    #[error("equation mentions `{0}`, which is not in the declared variable list")]
    Undeclared(String),
    #[error("line {line}: {source}")]
    Line { line: usize, source: FormulaError },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrobeniusVector(Vec<u32>);

impl FrobeniusVector {
    pub fn new(d: Vec<u32>) -> Result<Self, TwistedError> {
        if d.is_empty() || d.contains(&0) {
            return Err(TwistedError::BadVector(format!("{d:?}")));
        }
        Ok(FrobeniusVector(d))
    }

    pub fn untwisted(len: usize) -> Self {
        FrobeniusVector(vec![1; len])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for FrobeniusVector {
    type Err = TwistedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let d = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| TwistedError::BadVector(s.to_string()))?;
        FrobeniusVector::new(d)
    }
}

impl fmt::Display for FrobeniusVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Equations `P_i = 0` in ordered variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSystem {
    vars: Vec<String>,
    equations: Vec<PolyTerm>,
}

impl AffineSystem {
    /// Without `vars`, variables are taken in order of first appearance.
    pub fn new(vars: Option<Vec<String>>, equations: Vec<PolyTerm>) -> Result<Self, TwistedError> {
        let seen = {
            let mut seen: Vec<String> = Vec::new();
            for e in &equations {
                for v in e.variables() {
                    if !seen.contains(&v) {
                        seen.push(v);
                    }
                }
            }
            seen
        };
        let vars = match vars {
            Some(vars) => {
                if let Some(v) = seen.iter().find(|v| !vars.contains(v)) {
                    return Err(TwistedError::Undeclared(v.clone()));
                }
                vars
            }
            None => seen,
        };
        Ok(AffineSystem { vars, equations })
    }

    /// One equation per line, optionally preceded by `vars x1, x2, ..`; `#` comments.
    pub fn parse(text: &str) -> Result<Self, TwistedError> {
        let mut vars = None;
        let mut equations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("vars") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    let names: Vec<String> =
                        rest.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
                    vars = Some(names);
                    continue;
                }
            }
            let poly = parse_poly(line).map_err(|source| TwistedError::Line { line: i + 1, source })?;
            equations.push(poly);
        }
        AffineSystem::new(vars, equations)
    }

    /// Accepts `P_1 = 0 & .. & P_k = 0` with no quantifiers.
    pub fn from_formula(formula: &Formula) -> Result<Self, TwistedError> {
        if !formula.is_quantifier_free() {
            return Err(TwistedError::Quantified(formula.bound_count()));
        }
        fn collect(m: &Matrix, out: &mut Vec<PolyTerm>) -> bool {
            match m {
                Matrix::Atom(Atom { poly, relation: Relation::Eq }) => {
                    out.push(poly.clone());
                    true
                }
                Matrix::And(ms) => ms.iter().all(|m| collect(m, out)),
                _ => false,
            }
        }
        let mut equations = Vec::new();
        if !collect(formula.matrix(), &mut equations) {
            return Err(TwistedError::NotASystem(formula.to_string()));
        }
        AffineSystem::new(Some(formula.free_variables()), equations)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn equations(&self) -> &[PolyTerm] {
        &self.equations
    }

    /// Open formula with variable `i` of sort `sorts[i]`.
    pub fn to_formula(&self, sorts: &[u32]) -> Result<Formula, TwistedError> {
        if sorts.len() != self.vars.len() {
            return Err(TwistedError::Length { vars: self.vars.len(), got: sorts.len() });
        }
        let atoms: Vec<Matrix> = self
            .equations
            .iter()
            .map(|p| Matrix::Atom(Atom { poly: p.clone(), relation: Relation::Eq }))
            .collect();
        let matrix = match atoms.len() {
            0 => Matrix::Atom(Atom::eq(PolyTerm::zero(), &PolyTerm::zero())),
            1 => atoms.into_iter().next().unwrap(),
            _ => Matrix::And(atoms),
        };
        let free = self.vars.iter().zip(sorts).map(|(v, &s)| VarDecl::new(v, s)).collect();
        Ok(Formula::new(free, Vec::new(), matrix)?)
    }
}

impl fmt::Display for AffineSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.vars.join(", "))?;
        for e in &self.equations {
            writeln!(f, "{e} = 0")?;
        }
        Ok(())
    }
}

/// Tuples with `x_i` in the degree-`d_i` extension of `F_q` satisfying every equation.
pub fn twisted_count(
    system: &AffineSystem,
    q: FieldSpec,
    d: &FrobeniusVector,
    evaluator: &Evaluator,
) -> Result<BigInt, TwistedError> {
    let seq = wan_zeta_coefficients(system, q, d, 1, evaluator)?;
    Ok(seq.coefficients[0].clone())
}

/// Coefficient `s` counts the fixed points of `Fr_{q^s}^d`, `s = 1..smax`.
pub fn wan_zeta_coefficients(
    system: &AffineSystem,
    q: FieldSpec,
    d: &FrobeniusVector,
    smax: u32,
    evaluator: &Evaluator,
) -> Result<CountSequence, TwistedError> {
    let formula = system.to_formula(d.entries())?;
    let mut seq = evaluator.poincare_coefficients(&formula, q, smax, &Lifted)?;
    seq.mode = format!("twisted[{d}]");
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalityProbe {
    pub sequence: CountSequence,
    pub fit: SeriesFit,
    pub total_degree: Option<usize>,
}

pub fn twisted_rationality_probe(
    system: &AffineSystem,
    q: FieldSpec,
    d: &FrobeniusVector,
    smax: u32,
    evaluator: &Evaluator,
) -> Result<RationalityProbe, TwistedError> {
    let sequence = wan_zeta_coefficients(system, q, d, smax, evaluator)?;
    let fit = fit_rational(&sequence.coefficients)?;
    let total_degree = fit.result.as_ref().map(|r| r.total_degree());
    Ok(RationalityProbe { sequence, fit, total_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::count_satisfying;
    use crate::formula::parse;
    use crate::gf::make_field;
    use proptest::prelude::*;

    fn sys(text: &str) -> AffineSystem {
        AffineSystem::parse(text).unwrap()
    }

    fn dv(s: &str) -> FrobeniusVector {
        s.parse().unwrap()
    }

    fn spec(p: u64, n: u32) -> FieldSpec {
        FieldSpec::new(p, n).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn diagonal_meets_subfield() {
        let ev = Evaluator::default();
        let s = sys("x1 - x2");
        assert_eq!(twisted_count(&s, spec(2, 1), &dv("1,2"), &ev).unwrap(), BigInt::from(2));
        let seq = wan_zeta_coefficients(&s, spec(2, 1), &dv("1,2"), 3, &ev).unwrap();
        assert_eq!(seq.coefficients, ints(&[2, 4, 8]));
    }

    #[test]
    fn empty_system() {
        let ev = Evaluator::default();
        let s = sys("vars x1");
        assert_eq!(twisted_count(&s, spec(3, 1), &dv("2"), &ev).unwrap(), BigInt::from(9));
        let seq = wan_zeta_coefficients(&s, spec(2, 1), &dv("2"), 3, &ev).unwrap();
        assert_eq!(seq.coefficients, ints(&[4, 16, 64]));
        let probe = twisted_rationality_probe(&s, spec(2, 1), &dv("2"), 6, &ev).unwrap();
        assert_eq!(probe.fit.result.unwrap().to_string(), "(4*t)/(1 - 4*t)");
        assert_eq!(probe.total_degree, Some(2));
    }

    /// F_9 as a + b i with i^2 = -1, independent of the table-driven fields.
    fn circle_oracle() -> u64 {
        let mul = |(a, b): (i64, i64), (c, d): (i64, i64)| ((a * c - b * d).rem_euclid(3), (a * d + b * c).rem_euclid(3));
        let mut n = 0;
        for x1 in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let (s0, s1) = mul((x1, 0), (x1, 0));
                    let (t0, t1) = mul((a, b), (a, b));
                    if ((s0 + t0 - 1).rem_euclid(3), (s1 + t1).rem_euclid(3)) == (0, 0) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn circle_over_mixed_domains() {
        let ev = Evaluator::default();
        let s = sys("x1^2 + x2^2 - 1");
        let got = twisted_count(&s, spec(3, 1), &dv("1,2"), &ev).unwrap();
        assert_eq!(got, BigInt::from(circle_oracle()));
    }

    #[test]
    fn untwisted_matches_eval() {
        let ev = Evaluator::default();
        for text in ["x1^2 + x2^2 - 1", "x*y - 1\nx + y", "y^2 - x^3 - x"] {
            let s = sys(text);
            for p in [2u64, 3] {
                let f = make_field(p, 1).unwrap();
                let formula = parse(&text.lines().map(|l| format!("{l} = 0")).collect::<Vec<_>>().join(" & ")).unwrap();
                let direct = count_satisfying(&formula, &f).unwrap();
                let d = FrobeniusVector::untwisted(s.vars().len());
                assert_eq!(twisted_count(&s, spec(p, 1), &d, &ev).unwrap(), BigInt::from(direct));
            }
        }
    }

    #[test]
    fn parse_and_errors() {
        let s = sys("# a curve\nvars a, b, c\na*b = c\n\nb - 1 # trailing");
        assert_eq!(s.vars(), ["a", "b", "c"]);
        assert_eq!(s.equations().len(), 2);
        assert_eq!(s.to_string(), "vars a, b, c\na*b - c = 0\nb - 1 = 0\n");
        assert!(matches!(AffineSystem::parse("vars a\na + b"), Err(TwistedError::Undeclared(v)) if v == "b"));
        assert!(matches!(AffineSystem::parse("x +\n"), Err(TwistedError::Line { line: 1, .. })));
        assert!(matches!("1,0".parse::<FrobeniusVector>(), Err(TwistedError::BadVector(_))));
        assert!(matches!("1,x".parse::<FrobeniusVector>(), Err(TwistedError::BadVector(_))));
        let ev = Evaluator::default();
        assert_eq!(
            twisted_count(&sys("x1 - x2"), spec(2, 1), &dv("1"), &ev),
            Err(TwistedError::Length { vars: 2, got: 1 })
        );
    }

    #[test]
    fn quantified_formulas_rejected() {
        let f = parse("E y . y^2 = x").unwrap();
        assert_eq!(AffineSystem::from_formula(&f), Err(TwistedError::Quantified(1)));
        let g = parse("x = 0 | y = 0").unwrap();
        assert!(matches!(AffineSystem::from_formula(&g), Err(TwistedError::NotASystem(_))));
        let h = AffineSystem::from_formula(&parse("x*y = 1 & x = y").unwrap()).unwrap();
        assert_eq!(h.vars(), ["x", "y"]);
    }

    #[test]
    fn domains_are_frobenius_fixed_points() {
        let f = make_field(2, 6).unwrap();
        for d in [1u32, 2, 3, 6] {
            for a in 0..f.size() {
                assert_eq!(f.in_subfield(a, d), f.frobenius_raw(a, d as u64) == a);
            }
        }
    }

    #[test]
    fn budget_names_first_coefficient() {
        let ev = Evaluator::new(crate::eval::EvalConfig { budget: 100, threads: 0 });
        let err = wan_zeta_coefficients(&sys("x1 - x2"), spec(2, 1), &dv("1,2"), 4, &ev).unwrap_err();
        assert!(matches!(err, TwistedError::Eval(EvalError::Budget { m: Some(3), .. })));
    }

    proptest! {
        #[test]
        fn permutation_invariant(d1 in 1u32..3, d2 in 1u32..3, d3 in 1u32..3, c in 0i64..3) {
            let ev = Evaluator::default();
            let a = sys(&format!("vars u, v, w\nu*v - w^2 - {c}"));
            let b = sys(&format!("vars w, u, v\nu*v - w^2 - {c}"));
            let da = FrobeniusVector::new(vec![d1, d2, d3]).unwrap();
            let db = FrobeniusVector::new(vec![d3, d1, d2]).unwrap();
            prop_assert_eq!(
                twisted_count(&a, spec(2, 1), &da, &ev).unwrap(),
                twisted_count(&b, spec(2, 1), &db, &ev).unwrap()
            );
        }
    }
}
