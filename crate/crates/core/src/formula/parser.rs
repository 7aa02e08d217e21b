//! Recursive-descent parser for the formula syntax.
//!
//! ```text
//! formula := free* block* expr
//! free    := "free" var ("," var)* [":" "ext" INT] "."
//! block   := ("E" | "A") var ("," var)* [":" "ext" INT] "."
//! expr    := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | atom | "(" expr ")"
//! atom    := poly ("=" | "!=") poly
//! poly    := term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := "-" factor | base ["^" INT]
//! base    := INT | var | "(" poly ")"
//! ```
//!
//! `#` starts a comment running to the end of the line. Without a `free` clause the
//! free variables are the unbound matrix variables in order of first appearance.

use num_bigint::BigInt;

use super::{Atom, Formula, FormulaError, Matrix, PolyTerm, QuantBlock, Quantifier, Relation, VarDecl};

const KEYWORDS: [&str; 4] = ["E", "A", "free", "ext"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eq,
    Ne,
    Bang,
    Amp,
    Pipe,
    Dot,
    Comma,
    Colon,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", symbol(other)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Eq => "=",
        Tok::Ne => "!=",
        Tok::Bang => "!",
        Tok::Amp => "&",
        Tok::Pipe => "|",
        Tok::Dot => ".",
        Tok::Comma => ",",
        Tok::Colon => ":",
        _ => "?",
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            col += s.len();
            Tok::Int(s.parse().expect("digits parse as an integer"))
        } else if c.is_alphabetic() || c == '_' {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_alphanumeric() || **c == '_' || **c == '\'')
                .collect();
            i += s.chars().count();
            col += s.chars().count();
            Tok::Ident(s)
        } else {
            let two = chars.get(i + 1) == Some(&'=');
            let t = match c {
                '!' if two => Tok::Ne,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '=' => Tok::Eq,
                '!' => Tok::Bang,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                other => {
                    return Err(syntax(line, col, format!("unexpected character `{other}`")))
                }
            };
            let w = if t == Tok::Ne { 2 } else { 1 };
            i += w;
            col += w;
            t
        };
        out.push(Spanned { tok, line: start_line, column: start_col });
    }
    out.push(Spanned { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, FormulaError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> FormulaError {
        let s = &self.toks[self.pos];
        syntax(s.line, s.column, message)
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                t.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn variable(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error_here(format!("expected a variable, found {}", other.describe()))),
        }
    }

    /// `var ("," var)* [":" "ext" INT] "."`
    fn binder(&mut self) -> PResult<(Vec<String>, u32)> {
        let mut vars = vec![self.variable()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.variable()?);
        }
        let mut sort = 1;
        if *self.peek() == Tok::Colon {
            self.bump();
            if !self.is_keyword("ext") {
                return Err(self.error_here("expected `ext` after `:`"));
            }
            self.bump();
            sort = match self.bump() {
                Tok::Int(v) => match u32::try_from(&v) {
                    Ok(0) => return Err(FormulaError::NonPositiveSort(vars[0].clone())),
                    Ok(d) => d,
                    Err(_) => {
                        self.pos -= 1;
                        return Err(self.error_here("sort is too large"));
                    }
                },
                Tok::Minus => return Err(FormulaError::NonPositiveSort(vars[0].clone())),
                _ => {
                    self.pos -= 1;
                    return Err(self.error_here("expected a sort after `ext`"));
                }
            };
        }
        self.expect(Tok::Dot)?;
        Ok((vars, sort))
    }

    fn expr(&mut self) -> PResult<Matrix> {
        let mut parts = vec![self.and_expr()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.and_expr()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Matrix::Or(parts) })
    }

    fn and_expr(&mut self) -> PResult<Matrix> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Matrix::And(parts) })
    }

    fn unary(&mut self) -> PResult<Matrix> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Matrix::Not(Box::new(self.unary()?)));
        }
        if *self.peek() != Tok::LParen {
            return self.atom();
        }
        // `(` opens either a polynomial or a sub-formula; try the atom reading first
        let start = self.pos;
        let atom_err = match self.atom() {
            Ok(a) => return Ok(a),
            Err(e) => e,
        };
        let atom_reach = self.pos;
        self.pos = start;
        self.bump();
        let inner = self.expr().and_then(|m| self.expect(Tok::RParen).map(|_| m));
        match inner {
            Ok(m) => Ok(m),
            Err(e) if self.pos >= atom_reach => Err(e),
            Err(_) => Err(atom_err),
        }
    }

    fn atom(&mut self) -> PResult<Matrix> {
        let lhs = self.poly()?;
        let rel = self.bump();
        let rhs = match rel {
            Tok::Eq | Tok::Ne => self.poly()?,
            other => {
                self.pos -= 1;
                return Err(self.error_here(format!(
                    "expected `=` or `!=`, found {}",
                    other.describe()
                )));
            }
        };
        Ok(Matrix::Atom(if rel == Tok::Eq {
            Atom::eq(lhs, &rhs)
        } else {
            Atom::ne(lhs, &rhs)
        }))
    }

    fn poly(&mut self) -> PResult<PolyTerm> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<PolyTerm> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<PolyTerm> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                PolyTerm::constant(v)
            }
            Tok::LParen => {
                self.bump();
                let p = self.poly()?;
                self.expect(Tok::RParen)?;
                p
            }
            Tok::Ident(_) => PolyTerm::var(&self.variable()?),
            other => {
                return Err(self.error_here(format!(
                    "expected a polynomial, found {}",
                    other.describe()
                )))
            }
        };
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Tok::Int(v) => match u32::try_from(&v) {
                Ok(e) if e <= 4096 => Ok(base.pow(e)),
                _ => {
                    self.pos -= 1;
                    Err(self.error_here("exponent is too large"))
                }
            },
            _ => {
                self.pos -= 1;
                Err(self.error_here("expected a non-negative integer exponent"))
            }
        }
    }
}

/// Parses a single polynomial `P`, or an equation `L = R` read as `L - R`.
pub fn parse_poly(text: &str) -> Result<PolyTerm, FormulaError> {
    let src = if text.contains('=') { text.to_string() } else { format!("{text} = 0") };
    let f = parse(&src)?;
    match f.matrix() {
        Matrix::Atom(Atom { poly, relation: Relation::Eq }) if f.prefix().is_empty() => Ok(poly.clone()),
        _ => Err(FormulaError::Syntax {
            line: 1,
            column: 1,
            message: "expected a polynomial or a single equation".into(),
        }),
    }
}

/// Parses a formula; see the module documentation for the grammar.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };

    let mut free: Option<Vec<VarDecl>> = None;
    while p.is_keyword("free") {
        p.bump();
        let (vars, sort) = p.binder()?;
        free.get_or_insert_with(Vec::new)
            .extend(vars.iter().map(|v| VarDecl::new(v, sort)));
    }

    let mut prefix = Vec::new();
    loop {
        let quantifier = if p.is_keyword("E") {
            Quantifier::Exists
        } else if p.is_keyword("A") {
            Quantifier::Forall
        } else {
            break;
        };
        p.bump();
        let (vars, sort) = p.binder()?;
        prefix.push(QuantBlock { quantifier, vars, sort });
    }

    let matrix = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error_here(format!("unexpected {}", p.peek().describe())));
    }

    let free = match free {
        Some(f) => f,
        None => {
            let bound: Vec<&String> = prefix.iter().flat_map(|b: &QuantBlock| &b.vars).collect();
            let mut inferred: Vec<VarDecl> = Vec::new();
            for s in &p.toks {
                if let Tok::Ident(name) = &s.tok {
                    // source identifiers, so `x = x` keeps `x` after cancellation
                    if KEYWORDS.contains(&name.as_str())
                        || bound.contains(&name)
                        || inferred.iter().any(|d| &d.name == name)
                    {
                        continue;
                    }
                    inferred.push(VarDecl::new(name, 1));
                }
            }
            inferred
        }
    };
    Formula::new(free, prefix, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Relation;

    #[test]
    fn felgner_shape() {
        let f = parse("E y1 . A y2 . y1*y2 - x = 0").unwrap();
        let qs: Vec<_> = f.prefix().iter().map(|b| b.quantifier).collect();
        assert_eq!(qs, vec![Quantifier::Exists, Quantifier::Forall]);
        assert_eq!(f.block_lengths(), vec![1, 1]);
        assert_eq!(f.free_variables(), vec!["x"]);
    }

    #[test]
    fn extension_sort() {
        let f = parse("E y : ext 2 . y^2 - x = 0").unwrap();
        assert_eq!(f.prefix()[0].sort, 2);
        assert_eq!(f.to_string(), "E y : ext 2 . y^2 - x = 0");
        let g = parse("free x : ext 2 . E y, z : ext 2 . y^2 = x").unwrap();
        assert_eq!(g.free(), &[VarDecl::new("x", 2)]);
        assert_eq!(g.block_lengths(), vec![2]);
        assert_eq!(g.to_string(), "free x : ext 2 . E y, z : ext 2 . y^2 - x = 0");
    }

    #[test]
    fn boolean_structure_and_precedence() {
        let f = parse("x = 0 | y != 1 & !(x*y = 2)").unwrap();
        match f.matrix() {
            Matrix::Or(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[1], Matrix::And(a) if a.len() == 2));
            }
            other => panic!("expected a disjunction, got {other:?}"),
        }
        assert_eq!(f.to_string(), "x = 0 | (y - 1 != 0 & !(x*y - 2 = 0))");
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn parenthesized_polynomials_and_formulas() {
        let f = parse("(x + 1)^2 = 0").unwrap();
        let Matrix::Atom(a) = f.matrix() else { panic!() };
        assert_eq!(a.relation, Relation::Eq);
        assert_eq!(a.poly.to_string(), "x^2 + 2*x + 1");
        let g = parse("((x = 0) | (x - 1 = 0)) & x != 2").unwrap();
        assert!(matches!(g.matrix(), Matrix::And(_)));
    }

    #[test]
    fn comments_and_lines() {
        let f = parse("# squares\nE y .\n  y^2 = x  # done\n").unwrap();
        assert_eq!(f.to_string(), "E y . y^2 - x = 0");
    }

    #[test]
    fn syntax_error_positions() {
        match parse("E y .\n  y^2 = = x") {
            Err(FormulaError::Syntax { line, column, .. }) => {
                assert_eq!((line, column), (2, 9));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("E . x = 0"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("x = 0 )"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("x $ 0"), Err(FormulaError::Syntax { line: 1, column: 3, .. })));
        assert!(matches!(parse("x^y = 0"), Err(FormulaError::Syntax { .. })));
    }

    #[test]
    fn binding_errors() {
        assert_eq!(parse("free x . y = 0"), Err(FormulaError::Unbound("y".into())));
        assert_eq!(
            parse("E y . E y . y = 0"),
            Err(FormulaError::DuplicateBinding("y".into()))
        );
        assert_eq!(
            parse("free y . E y . y = 0"),
            Err(FormulaError::DuplicateBinding("y".into()))
        );
        assert_eq!(
            parse("E y : ext 0 . y = 0"),
            Err(FormulaError::NonPositiveSort("y".into()))
        );
    }

    #[test]
    fn cancelled_variables_stay_free() {
        let f = parse("x = x").unwrap();
        assert_eq!(f.free_variables(), vec!["x"]);
        assert_eq!(f.to_string(), "free x . 0 = 0");
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn unused_free_declaration_is_kept() {
        let f = parse("free x . 1 = 0").unwrap();
        assert_eq!(f.free_variables(), vec!["x"]);
        assert_eq!(f.to_string(), "free x . 1 = 0");
    }

    #[test]
    fn polynomials_alone_or_as_equations() {
        let a = parse_poly("y^3 - x").unwrap();
        let b = parse_poly("y^3 = x").unwrap();
        assert_eq!(a, b);
        assert!(parse_poly("y != x").is_err());
        assert!(parse_poly("E y . y = x").is_err());
        assert!(parse_poly("y = x & x = 1").is_err());
    }
}
