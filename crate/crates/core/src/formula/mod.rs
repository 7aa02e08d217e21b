//! First-order formulas in the language of rings.
//!
//! A [`Formula`] is prenex: a list of quantifier blocks followed by a boolean
//! combination of polynomial atoms `P = 0` / `P != 0`. Every variable carries a
//! *sort* `d >= 1`: it ranges over the fixed field of `Fr^d` inside whatever ambient
//! field the formula is evaluated in.
//!
//! Concrete syntax (see [`parse`]):
//!
//! ```text
//! free x : ext 2 .  E y1, y2 . A z : ext 2 . y1^2 - x = 0 & !(z*y2 = 1)
//! ```

mod parser;
pub mod poly;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::gf::FieldElement;

pub use parser::{parse, parse_poly};
pub use poly::{Coeff, Monomial, PolyTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable `{0}` is neither declared free nor bound by a quantifier")]
    Unbound(String),
    #[error("variable `{0}` is bound more than once")]
    DuplicateBinding(String),
    #[error("sort of `{0}` must be a positive integer")]
    NonPositiveSort(String),
    #[error("cannot substitute for quantified variable `{0}`")]
    BindsQuantified(String),
    #[error("`{0}` is not a free variable of the formula")]
    UnknownVariable(String),
    #[error("value for `{var}` does not lie in the sort-{sort} subfield")]
    SortViolation { var: String, sort: u32 },
    #[error("substituted values come from different fields")]
    MixedFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "E",
            Quantifier::Forall => "A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: u32,
}

impl VarDecl {
    pub fn new(name: &str, sort: u32) -> Self {
        VarDecl { name: name.to_string(), sort }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<String>,
    pub sort: u32,
}

impl QuantBlock {
    pub fn new(quantifier: Quantifier, vars: &[&str], sort: u32) -> Self {
        QuantBlock {
            quantifier,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            sort,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
}

/// `poly = 0` or `poly != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub poly: PolyTerm,
    pub relation: Relation,
}

impl Atom {
    pub fn eq(lhs: PolyTerm, rhs: &PolyTerm) -> Self {
        Atom { poly: lhs.sub(rhs), relation: Relation::Eq }
    }

    pub fn ne(lhs: PolyTerm, rhs: &PolyTerm) -> Self {
        Atom { poly: lhs.sub(rhs), relation: Relation::Ne }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matrix {
    Atom(Atom),
    Not(Box<Matrix>),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

impl Matrix {
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Matrix::Atom(a) => out.push(a),
            Matrix::Not(m) => m.collect_atoms(out),
            Matrix::And(ms) | Matrix::Or(ms) => ms.iter().for_each(|m| m.collect_atoms(out)),
        }
    }

    /// Variables in printing order.
    pub fn variables(&self) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        for a in self.atoms() {
            for v in a.poly.variables() {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    }

    fn map_polys(&self, f: &impl Fn(&PolyTerm) -> PolyTerm) -> Matrix {
        match self {
            Matrix::Atom(a) => Matrix::Atom(Atom { poly: f(&a.poly), relation: a.relation }),
            Matrix::Not(m) => Matrix::Not(Box::new(m.map_polys(f))),
            Matrix::And(ms) => Matrix::And(ms.iter().map(|m| m.map_polys(f)).collect()),
            Matrix::Or(ms) => Matrix::Or(ms.iter().map(|m| m.map_polys(f)).collect()),
        }
    }
}

/// A prenex formula with declared free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    free: Vec<VarDecl>,
    prefix: Vec<QuantBlock>,
    matrix: Matrix,
}

impl Formula {
    /// Validates binding structure: no variable bound twice, every matrix variable
    /// free or bound, all sorts positive, no empty blocks.
    pub fn new(
        free: Vec<VarDecl>,
        prefix: Vec<QuantBlock>,
        matrix: Matrix,
    ) -> Result<Self, FormulaError> {
        let mut seen = HashSet::new();
        let declared = free
            .iter()
            .map(|d| (&d.name, d.sort))
            .chain(prefix.iter().flat_map(|b| b.vars.iter().map(move |v| (v, b.sort))));
        for (name, sort) in declared {
            if sort == 0 {
                return Err(FormulaError::NonPositiveSort(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(FormulaError::DuplicateBinding(name.clone()));
            }
        }
        if let Some(b) = prefix.iter().find(|b| b.vars.is_empty()) {
            return Err(FormulaError::Syntax {
                line: 0,
                column: 0,
                message: format!("empty {} block", b.quantifier.keyword()),
            });
        }
        if let Some(v) = matrix.variables().into_iter().find(|v| !seen.contains(v)) {
            return Err(FormulaError::Unbound(v));
        }
        Ok(Formula { free, prefix, matrix })
    }

    /// Quantifier-free formula whose free variables are those of the matrix, in
    /// printing order, all of sort 1.
    pub fn open(matrix: Matrix) -> Self {
        let free = matrix.variables().iter().map(|v| VarDecl::new(v, 1)).collect();
        Formula { free, prefix: Vec::new(), matrix }
    }

    pub fn free(&self) -> &[VarDecl] {
        &self.free
    }

    pub fn prefix(&self) -> &[QuantBlock] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn free_variables(&self) -> Vec<String> {
        self.free.iter().map(|d| d.name.clone()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Lengths `n_1, ..., n_k` of the quantifier blocks.
    pub fn block_lengths(&self) -> Vec<usize> {
        self.prefix.iter().map(|b| b.vars.len()).collect()
    }

    /// `N_k`, the total number of bound variables.
    pub fn bound_count(&self) -> usize {
        self.block_lengths().iter().sum()
    }

    /// Every sort appearing in the formula.
    pub fn sorts(&self) -> Vec<u32> {
        self.free
            .iter()
            .map(|d| d.sort)
            .chain(self.prefix.iter().map(|b| b.sort))
            .collect()
    }

    /// Returns the same formula with every sort replaced by `f(role, sort)`.
    pub fn map_sorts(&self, f: impl Fn(bool, u32) -> u32) -> Formula {
        Formula {
            free: self
                .free
                .iter()
                .map(|d| VarDecl { name: d.name.clone(), sort: f(true, d.sort) })
                .collect(),
            prefix: self
                .prefix
                .iter()
                .map(|b| QuantBlock { sort: f(false, b.sort), ..b.clone() })
                .collect(),
            matrix: self.matrix.clone(),
        }
    }

    /// Logical negation, pushed through the prefix.
    pub fn negated(&self) -> Formula {
        Formula {
            free: self.free.clone(),
            prefix: self
                .prefix
                .iter()
                .map(|b| QuantBlock { quantifier: b.quantifier.dual(), ..b.clone() })
                .collect(),
            matrix: Matrix::Not(Box::new(self.matrix.clone())),
        }
    }

    /// Folds values of free variables into the matrix coefficients.
    ///
    /// All values must come from one field and lie in the subfield named by the
    /// variable's sort. Coefficients of the result are elements of that field.
    pub fn substitute(
        &self,
        binding: &BTreeMap<String, FieldElement>,
    ) -> Result<Formula, FormulaError> {
        if binding.is_empty() {
            return Ok(self.clone());
        }
        let bound: HashSet<&String> = self.prefix.iter().flat_map(|b| &b.vars).collect();
        let mut field = None;
        for (var, value) in binding {
            if bound.contains(var) {
                return Err(FormulaError::BindsQuantified(var.clone()));
            }
            let decl = self
                .free
                .iter()
                .find(|d| &d.name == var)
                .ok_or_else(|| FormulaError::UnknownVariable(var.clone()))?;
            let f = value.field();
            match &field {
                None => field = Some(f.clone()),
                Some(g) if g != f => return Err(FormulaError::MixedFields),
                _ => {}
            }
            if f.degree() % decl.sort != 0 || !f.in_subfield(value.code(), decl.sort) {
                return Err(FormulaError::SortViolation { var: var.clone(), sort: decl.sort });
            }
        }
        let field = field.expect("binding is nonempty");
        let values: HashMap<String, FieldElement> =
            binding.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        Ok(Formula {
            free: self
                .free
                .iter()
                .filter(|d| !binding.contains_key(&d.name))
                .cloned()
                .collect(),
            prefix: self.prefix.clone(),
            matrix: self.matrix.map_polys(&|p| p.substitute(&field, &values)),
        })
    }

    /// Whether printing can omit the `free` clause and still reparse to `self`.
    fn free_clause_implied(&self) -> bool {
        let bound: HashSet<&String> = self.prefix.iter().flat_map(|b| &b.vars).collect();
        let inferred: Vec<String> = self
            .matrix
            .variables()
            .into_iter()
            .filter(|v| !bound.contains(v))
            .collect();
        self.free.iter().all(|d| d.sort == 1)
            && inferred == self.free.iter().map(|d| d.name.clone()).collect::<Vec<_>>()
    }
}

fn write_group(f: &mut fmt::Formatter<'_>, kw: &str, vars: &[&str], sort: u32) -> fmt::Result {
    write!(f, "{kw} {}", vars.join(", "))?;
    if sort != 1 {
        write!(f, " : ext {sort}")?;
    }
    write!(f, " . ")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.free.is_empty() && !self.free_clause_implied() {
            // consecutive free variables of equal sort share a clause
            let mut i = 0;
            while i < self.free.len() {
                let sort = self.free[i].sort;
                let mut j = i;
                while j < self.free.len() && self.free[j].sort == sort {
                    j += 1;
                }
                let names: Vec<&str> = self.free[i..j].iter().map(|d| d.name.as_str()).collect();
                write_group(f, "free", &names, sort)?;
                i = j;
            }
        }
        for b in &self.prefix {
            let names: Vec<&str> = b.vars.iter().map(String::as_str).collect();
            write_group(f, b.quantifier.keyword(), &names, b.sort)?;
        }
        write!(f, "{}", self.matrix)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, m: &Matrix| match m {
            Matrix::And(_) | Matrix::Or(_) => write!(f, "({m})"),
            _ => write!(f, "{m}"),
        };
        match self {
            Matrix::Atom(a) => {
                let rel = match a.relation {
                    Relation::Eq => "=",
                    Relation::Ne => "!=",
                };
                write!(f, "{} {rel} 0", a.poly)
            }
            Matrix::Not(m) => match **m {
                Matrix::Not(_) => write!(f, "!{m}"),
                _ => write!(f, "!({m})"),
            },
            Matrix::And(ms) | Matrix::Or(ms) => {
                let sep = if matches!(self, Matrix::And(_)) { " & " } else { " | " };
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    child(f, m)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn square_root_formula_shape() {
        let f = parse("E y . y^2 - x = 0").unwrap();
        assert_eq!(f.prefix(), &[QuantBlock::new(Quantifier::Exists, &["y"], 1)]);
        assert_eq!(f.free(), &[VarDecl::new("x", 1)]);
        assert_eq!(f.to_string(), "E y . y^2 - x = 0");
    }

    #[test]
    fn free_variables_in_declaration_order() {
        assert!(parse("0 = 0").unwrap().free_variables().is_empty());
        assert_eq!(parse("E y . y^2 - x = 0").unwrap().free_variables(), vec!["x"]);
        let f = parse("free x1, x2 . x2 - x1 = 0").unwrap();
        assert_eq!(f.free_variables(), vec!["x1", "x2"]);
        // printing order would be x1 first anyway, so the clause is omitted;
        // with the opposite declaration it must be kept
        let g = parse("free x2, x1 . x2 - x1 = 0").unwrap();
        assert_eq!(g.to_string(), "free x2, x1 . -x1 + x2 = 0");
        assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn substitute_closes_formula() {
        let f5 = make_field(5, 1).unwrap();
        let f = parse("E y . y^2 - x = 0").unwrap();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), f5.from_i64(1));
        let g = f.substitute(&b).unwrap();
        assert!(g.is_closed());
        assert_eq!(g.to_string(), "E y . y^2 - 1 = 0");
        assert_eq!(f.substitute(&BTreeMap::new()).unwrap(), f);
    }

    #[test]
    fn substitute_errors() {
        let f9 = make_field(3, 2).unwrap();
        let f = parse("free x . E y . y^2 - x = 0").unwrap();
        let mut b = BTreeMap::new();
        b.insert("y".to_string(), f9.one());
        assert_eq!(f.substitute(&b), Err(FormulaError::BindsQuantified("y".into())));
        let mut b = BTreeMap::new();
        b.insert("z".to_string(), f9.one());
        assert_eq!(f.substitute(&b), Err(FormulaError::UnknownVariable("z".into())));
        // code 3 = the adjoined root, not in F_3
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), f9.element(3));
        assert_eq!(
            f.substitute(&b),
            Err(FormulaError::SortViolation { var: "x".into(), sort: 1 })
        );
    }

    #[test]
    fn negation_dualizes_prefix() {
        let f = parse("E y . A z : ext 2 . y*z = 1").unwrap();
        let n = f.negated();
        assert_eq!(n.to_string(), "A y . E z : ext 2 . !(y*z - 1 = 0)");
        assert_eq!(n.negated().prefix(), f.prefix());
    }
}
