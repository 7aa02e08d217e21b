//! Multivariate polynomials in canonical form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::gf::{Field, FieldElement};

/// A product of variables with positive exponents, sorted by variable name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (String, u32)>>(powers: I) -> Self {
        let mut map: BTreeMap<String, u32> = BTreeMap::new();
        for (v, e) in powers {
            if e > 0 {
                *map.entry(v).or_default() += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn powers(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v == var)
            .map_or(0, |(_, e)| *e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.0.iter().chain(&other.0).cloned())
    }

    /// Splits into the part over `keep` variables and the rest.
    fn partition(&self, drop: impl Fn(&str) -> bool) -> (Monomial, Vec<(String, u32)>) {
        let (dropped, kept): (Vec<_>, Vec<_>) =
            self.0.iter().cloned().partition(|(v, _)| drop(v));
        (Monomial(kept), dropped)
    }
}

/// Graded order: higher total degree first, then earlier variables with higher powers.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .total_degree()
            .cmp(&self.total_degree())
            .then_with(|| {
                for ((va, ea), (vb, eb)) in self.0.iter().zip(&other.0) {
                    match va.cmp(vb).then(eb.cmp(ea)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                self.0.len().cmp(&other.0.len())
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A coefficient: an integer as parsed, or a field element once values were substituted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeff {
    Int(BigInt),
    Elem(FieldElement),
}

impl Coeff {
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Int(v) => v.is_zero(),
            Coeff::Elem(e) => e.is_zero(),
        }
    }

    /// Image in `field`.
    pub fn to_field(&self, field: &Field) -> FieldElement {
        match self {
            Coeff::Int(v) => field.element(field.reduce_bigint(v)),
            Coeff::Elem(e) => {
                assert!(e.field() == field, "coefficient lives in a different field");
                e.clone()
            }
        }
    }

    fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Int(a), Coeff::Int(b)) => Coeff::Int(a + b),
            (Coeff::Elem(a), b) | (b, Coeff::Elem(a)) => Coeff::Elem(a + &b.to_field(a.field())),
        }
    }

    fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Int(a), Coeff::Int(b)) => Coeff::Int(a * b),
            (Coeff::Elem(a), b) | (b, Coeff::Elem(a)) => Coeff::Elem(a * &b.to_field(a.field())),
        }
    }

    fn neg(&self) -> Coeff {
        match self {
            Coeff::Int(a) => Coeff::Int(-a),
            Coeff::Elem(a) => Coeff::Elem(-a),
        }
    }

    /// Signed integer used for printing; `None` for elements outside the prime field.
    fn printable_int(&self) -> Option<BigInt> {
        match self {
            Coeff::Int(v) => Some(v.clone()),
            Coeff::Elem(e) => e.as_prime_residue().map(|r| {
                let p = e.field().characteristic();
                if r > p / 2 {
                    BigInt::from(r) - BigInt::from(p)
                } else {
                    BigInt::from(r)
                }
            }),
        }
    }
}

/// A polynomial in named variables: monomials in graded order, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyTerm {
    terms: BTreeMap<Monomial, Coeff>,
}

impl PolyTerm {
    pub fn zero() -> Self {
        PolyTerm::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        PolyTerm::from_terms([(Monomial::one(), Coeff::Int(c.into()))])
    }

    pub fn var(name: &str) -> Self {
        PolyTerm::from_terms([(Monomial::var(name), Coeff::Int(BigInt::one()))])
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(terms: I) -> Self {
        let mut out = PolyTerm::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolyTerm) -> PolyTerm {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PolyTerm {
        PolyTerm {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &PolyTerm) -> PolyTerm {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyTerm) -> PolyTerm {
        let mut out = PolyTerm::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> PolyTerm {
        let mut acc = PolyTerm::constant(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Variables in printing order, each listed once.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.powers() {
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
        }
        seen
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.degree_in(var)).max().unwrap_or(0)
    }

    /// Folds the bound values into the coefficients; every coefficient of the result
    /// is an element of `field`.
    pub fn substitute(&self, field: &Field, binding: &HashMap<String, FieldElement>) -> PolyTerm {
        let mut out = PolyTerm::zero();
        for (m, c) in &self.terms {
            let (rest, bound) = m.partition(|v| binding.contains_key(v));
            let mut coeff = c.to_field(field);
            for (v, e) in bound {
                coeff = &coeff * &binding[&v].pow(e as u64);
            }
            out.add_term(rest, Coeff::Elem(coeff));
        }
        out
    }

    /// Evaluates at a full assignment.
    pub fn eval(&self, field: &Field, values: &HashMap<String, FieldElement>) -> FieldElement {
        let rest = self.substitute(field, values);
        assert!(
            rest.terms.keys().all(Monomial::is_one),
            "evaluation left unassigned variables"
        );
        rest.terms
            .values()
            .next()
            .map_or_else(|| field.zero(), |c| c.to_field(field))
    }
}

impl fmt::Display for PolyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (negative, body) = match c.printable_int() {
                Some(v) => {
                    let abs = v.abs();
                    let body = if m.is_one() {
                        abs.to_string()
                    } else if abs.is_one() {
                        m.to_string()
                    } else {
                        format!("{abs}*{m}")
                    };
                    (v.is_negative(), body)
                }
                None => {
                    let Coeff::Elem(e) = c else { unreachable!() };
                    let body = if m.is_one() {
                        e.to_string()
                    } else {
                        format!("{e}*{m}")
                    };
                    (false, body)
                }
            };
            match (i, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn x() -> PolyTerm {
        PolyTerm::var("x")
    }

    fn y() -> PolyTerm {
        PolyTerm::var("y")
    }

    #[test]
    fn canonical_order_and_printing() {
        let p = y().pow(2).sub(&x());
        assert_eq!(p.to_string(), "y^2 - x");
        let q = PolyTerm::constant(-1)
            .add(&x().mul(&y()))
            .add(&x().pow(2).mul(&PolyTerm::constant(3)))
            .add(&y().pow(2));
        assert_eq!(q.to_string(), "3*x^2 + x*y + y^2 - 1");
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = x().add(&y()).sub(&x());
        assert_eq!(p, y());
        assert!(x().sub(&x()).is_zero());
        assert_eq!(PolyTerm::zero().to_string(), "0");
    }

    #[test]
    fn substitution_folds_into_field_coefficients() {
        let f5 = make_field(5, 1).unwrap();
        let p = y().pow(2).sub(&x());
        let mut b = HashMap::new();
        b.insert("x".to_string(), f5.from_i64(1));
        let s = p.substitute(&f5, &b);
        assert_eq!(s.to_string(), "y^2 - 1");
        assert_eq!(s.variables(), vec!["y".to_string()]);
        b.insert("y".to_string(), f5.from_i64(4));
        assert!(p.eval(&f5, &b).is_zero());
    }

    #[test]
    fn binomial_expansion() {
        let p = x().add(&PolyTerm::constant(1)).pow(3);
        assert_eq!(p.to_string(), "x^3 + 3*x^2 + 3*x + 1");
        assert_eq!(p.degree_in("x"), 3);
        assert_eq!(p.degree_in("y"), 0);
    }
}
