//! Lexer and recursive-descent parser for formulas and terms.
//!
//! Term syntax is shared with sequence expressions in the ultrapower module,
//! so terms are first parsed into a loose [`RawTerm`] tree and then checked.

use num_bigint::BigInt;

use super::{Formula, FormulaError, Pred, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Eq,
    Neq,
    Lt,
    Gt,
    Bar,
    Amp,
    Bang,
    Arrow,
    DArrow,
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Eof => "end of input".into(),
            other => {
                let s = match other {
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Caret => "^",
                    Tok::Eq => "=",
                    Tok::Neq => "!=",
                    Tok::Lt => "<",
                    Tok::Gt => ">",
                    Tok::Bar => "|",
                    Tok::Amp => "&",
                    Tok::Bang => "!",
                    Tok::Arrow => "->",
                    Tok::DArrow => "<->",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Comma => ",",
                    _ => ".",
                };
                format!("'{s}'")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Int(digits.parse().expect("ascii digits"))
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('-')) if chars.get(i + 2) == Some(&'>') => (Tok::DArrow, 3),
                ('!', Some('=')) => (Tok::Neq, 2),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('^', _) => (Tok::Caret, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('|', _) => (Tok::Bar, 1),
                ('&', _) => (Tok::Amp, 1),
                ('!', _) => (Tok::Bang, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                _ => {
                    return Err(FormulaError::SyntaxError {
                        line,
                        column,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            i += len;
            tok
        };
        column += i - start;
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

/// Untyped term tree: exponents may be arbitrary terms and calls are allowed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawTerm {
    Var(String),
    Int(BigInt),
    Neg(Box<RawTerm>),
    Add(Box<RawTerm>, Box<RawTerm>),
    Sub(Box<RawTerm>, Box<RawTerm>),
    Mul(Box<RawTerm>, Box<RawTerm>),
    Pow(Box<RawTerm>, Box<RawTerm>),
    Call(String, Vec<RawTerm>),
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const KEYWORDS: [&str; 3] = ["exists", "forall", "or"];

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, FormulaError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> FormulaError {
        let s = &self.toks[self.pos];
        FormulaError::SyntaxError { line: s.line, column: s.column, message: message.into() }
    }

    fn unexpected(&self, wanted: &str) -> FormulaError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    pub(crate) fn raw_term(&mut self) -> Result<RawTerm, FormulaError> {
        let mut lhs = self.raw_product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = RawTerm::Add(Box::new(lhs), Box::new(self.raw_product()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = RawTerm::Sub(Box::new(lhs), Box::new(self.raw_product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn raw_product(&mut self) -> Result<RawTerm, FormulaError> {
        let mut lhs = self.raw_unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = RawTerm::Mul(Box::new(lhs), Box::new(self.raw_unary()?));
        }
        Ok(lhs)
    }

    fn raw_unary(&mut self) -> Result<RawTerm, FormulaError> {
        if *self.peek() != Tok::Minus {
            return self.raw_power();
        }
        self.bump();
        // a bare literal folds into a negative constant
        if let (Tok::Int(n), false) = (self.peek().clone(), *self.peek_at(1) == Tok::Caret) {
            self.bump();
            return Ok(RawTerm::Int(-n));
        }
        Ok(RawTerm::Neg(Box::new(self.raw_unary()?)))
    }

    fn raw_power(&mut self) -> Result<RawTerm, FormulaError> {
        let base = self.raw_atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.raw_atom()?;
            return Ok(RawTerm::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn raw_atom(&mut self) -> Result<RawTerm, FormulaError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(RawTerm::Int(n))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.raw_args()?;
                    Ok(RawTerm::Call(name, args))
                } else {
                    Ok(RawTerm::Var(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.raw_term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    // after '(' up to and including ')'
    fn raw_args(&mut self) -> Result<Vec<RawTerm>, FormulaError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.raw_term()?);
            match self.bump() {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("',' or ')'"));
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let at = self.pos;
        let raw = self.raw_term()?;
        check_term(raw).map_err(|m| {
            let s = &self.toks[at];
            FormulaError::SyntaxError { line: s.line, column: s.column, message: m }
        })
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            lhs = Formula::Iff(Box::new(lhs), Box::new(self.implication()?));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while self.is_keyword("or") {
            self.bump();
            lhs = Formula::Or(Box::new(lhs), Box::new(self.conjunction()?));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, universal) in [("exists", false), ("forall", true)] {
            if self.is_keyword(kw) {
                self.bump();
                return self.quantifier(universal);
            }
        }
        self.primary()
    }

    fn quantifier(&mut self, universal: bool) -> Result<Formula, FormulaError> {
        let mut vars = Vec::new();
        while let Tok::Ident(name) = self.peek().clone() {
            if KEYWORDS.contains(&name.as_str()) {
                break;
            }
            self.variable_name(&name)?;
            self.bump();
            vars.push(name);
        }
        if vars.is_empty() {
            return Err(self.unexpected("a variable"));
        }
        self.expect(Tok::Dot, "'.'")?;
        let body = self.formula()?;
        Ok(vars.into_iter().rev().fold(body, |acc, v| {
            if universal {
                Formula::Forall(v, Box::new(acc))
            } else {
                Formula::Exists(v, Box::new(acc))
            }
        }))
    }

    fn variable_name(&self, name: &str) -> Result<(), FormulaError> {
        if is_variable(name) {
            Ok(())
        } else {
            Err(self.error(format!("'{name}' is not a valid variable name")))
        }
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        if *self.peek() == Tok::LParen {
            // either a parenthesized formula or the start of a term
            let save = self.pos;
            self.bump();
            let as_formula = self.formula().and_then(|f| self.expect(Tok::RParen, "')'").map(|_| f));
            match as_formula {
                Ok(f) if !starts_term_continuation(self.peek()) => return Ok(f),
                Ok(_) => {
                    self.pos = save;
                    return self.relation();
                }
                Err(formula_err) => {
                    let formula_end = self.pos;
                    self.pos = save;
                    return self.relation().map_err(|e| if self.pos >= formula_end { e } else { formula_err });
                }
            }
        }
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1).clone()) {
            if let Some(p) = Pred::from_name(&name) {
                self.bump();
                self.bump();
                let at = self.pos;
                let raw = self.raw_args()?;
                let mut args = Vec::with_capacity(raw.len());
                for r in raw {
                    args.push(check_term(r).map_err(|m| {
                        let s = &self.toks[at];
                        FormulaError::SyntaxError { line: s.line, column: s.column, message: m }
                    })?);
                }
                if args.len() != p.arity() {
                    return Err(FormulaError::ArityError { name, expected: p.arity(), got: args.len() });
                }
                return Ok(Formula::Atom(p, args));
            }
            if !is_variable(&name) || *self.peek_at(1) == Tok::LParen {
                return Err(self.error(format!("unknown predicate '{name}'")));
            }
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.term()?;
        let op = self.peek().clone();
        match op {
            Tok::Eq | Tok::Neq | Tok::Lt | Tok::Gt | Tok::Bar => {
                self.bump();
            }
            _ => return Err(self.unexpected("'=', '!=', '<', '>' or '|'")),
        }
        let rhs = self.term()?;
        Ok(match op {
            Tok::Eq => Formula::Eq(lhs, rhs),
            Tok::Neq => Formula::not(Formula::Eq(lhs, rhs)),
            Tok::Lt => Formula::Lt(lhs, rhs),
            Tok::Gt => Formula::Lt(rhs, lhs),
            _ => Formula::Divides(lhs, rhs),
        })
    }
}

fn starts_term_continuation(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::Eq | Tok::Neq | Tok::Lt | Tok::Gt | Tok::Bar
    )
}

pub(crate) fn is_variable(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !KEYWORDS.contains(&name)
}

fn check_term(raw: RawTerm) -> Result<Term, String> {
    let b = |r: Box<RawTerm>| check_term(*r).map(Box::new);
    Ok(match raw {
        RawTerm::Var(v) if is_variable(&v) => Term::Var(v),
        RawTerm::Var(v) => return Err(format!("'{v}' is not a valid variable name")),
        RawTerm::Int(n) => Term::Const(n),
        RawTerm::Neg(t) => Term::Neg(b(t)?),
        RawTerm::Add(x, y) => Term::Add(b(x)?, b(y)?),
        RawTerm::Sub(x, y) => Term::Sub(b(x)?, b(y)?),
        RawTerm::Mul(x, y) => Term::Mul(b(x)?, b(y)?),
        RawTerm::Pow(x, e) => match *e {
            RawTerm::Int(ref k) => {
                let k: u32 = k.try_into().map_err(|_| format!("exponent {k} is too large"))?;
                Term::Pow(b(x)?, k)
            }
            _ => return Err("exponents must be nonnegative integer literals".into()),
        },
        RawTerm::Call(name, _) => return Err(format!("'{name}(...)' is not a term")),
    })
}

/// Parses a formula in the documented text syntax.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_pos(text: &str) -> (usize, usize) {
        match parse(text) {
            Err(FormulaError::SyntaxError { line, column, .. }) => (line, column),
            other => panic!("{text}: {other:?}"),
        }
    }

    #[test]
    fn spec_examples() {
        let f = parse("Z(x) & x | y").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::Atom(Pred::Z, vec![Term::var("x")]),
                Formula::Divides(Term::var("x"), Term::var("y"))
            )
        );
        let g = parse("exists y. y*y = x").unwrap();
        assert!(matches!(g, Formula::Exists(ref v, _) if v == "y"));
        assert_eq!(err_pos("x = "), (1, 5));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("!a = 0 & b = 0 or c = 0 -> d = 0 <-> e = 0").unwrap();
        let s = |n: &str| Formula::Eq(Term::var(n), Term::constant(0));
        let expected = Formula::Iff(
            Box::new(Formula::Implies(
                Box::new(Formula::Or(
                    Box::new(Formula::and(Formula::not(s("a")), s("b"))),
                    Box::new(s("c")),
                )),
                Box::new(s("d")),
            )),
            Box::new(s("e")),
        );
        assert_eq!(f, expected);
        let g = parse("a = 0 -> b = 0 -> c = 0").unwrap();
        assert!(matches!(g, Formula::Implies(_, ref r) if matches!(**r, Formula::Implies(..))));
    }

    #[test]
    fn quantifier_blocks_desugar() {
        assert_eq!(
            parse("exists x y. x = y").unwrap(),
            parse("exists x. exists y. x = y").unwrap()
        );
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        assert_eq!(
            parse("(x + 1) * 2 = y").unwrap(),
            Formula::Eq(
                Term::Mul(
                    Box::new(Term::Add(Box::new(Term::var("x")), Box::new(Term::constant(1)))),
                    Box::new(Term::constant(2))
                ),
                Term::var("y")
            )
        );
        assert_eq!(parse("((x) = y)").unwrap(), Formula::Eq(Term::var("x"), Term::var("y")));
        assert_eq!(parse("x != 1").unwrap(), Formula::not(Formula::Eq(Term::var("x"), Term::constant(1))));
    }

    #[test]
    fn negative_literals() {
        assert_eq!(parse("x = -3").unwrap(), Formula::Eq(Term::var("x"), Term::constant(-3)));
        assert_eq!(
            parse("x = -3^2").unwrap(),
            Formula::Eq(Term::var("x"), Term::Neg(Box::new(Term::Pow(Box::new(Term::constant(3)), 2))))
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("P(x, y)"), Err(FormulaError::ArityError { expected: 1, got: 2, .. })));
        assert!(matches!(parse("d_p(x)"), Err(FormulaError::ArityError { expected: 3, .. })));
        assert_eq!(err_pos("Q(x)"), (1, 1));
        assert_eq!(err_pos("x = 1 &\n  y # 2"), (2, 5));
        assert!(parse("exists . x = 1").is_err());
        assert!(parse("X = 1").is_err());
        assert!(parse("x = y^z").is_err());
        assert!(parse("x = 1 y").is_err());
        assert!(parse("(x = 1").is_err());
    }
}
