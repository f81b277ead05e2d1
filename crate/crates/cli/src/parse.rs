//! Parser for the class description language.
//!
//! ```text
//! class   := "class" IDENT "{" block+ "}"
//! block   := "at" point ":" entry ("," entry)* ";"
//! point   := "inf" | rational
//! entry   := "<" poly ">" ["#" integer] ["{" eig (";" eig)* "}"]
//! poly    := "0" | ["-"] term (("+" | "-") term)*
//! term    := [rational "*"] "x" ["^" "(" rational ")"]
//! eig     := ["-"] (rational | IDENT) ":" "[" integer ("," integer)* "]"
//! ```
//!
//! `x` is the local coordinate: `z` at `inf` and `1/(z - a)` at a finite
//! point `a`. Exponents must be strictly positive. Decorations default as
//! follows: a bare `<q>` gets multiplicity one and a fresh symbolic
//! eigenvalue; `<q> # n` gets one symbolic eigenvalue with `n` unit blocks;
//! a class without `#` fixes the multiplicity to its dimension; when both
//! are present they must agree. Fresh symbols are named `t1`, `t2`, ...,
//! skipping any name the source uses explicitly.
//!
//! [`parse`] rejects ill-formed text with a position; [`build`] turns a
//! well-formed tree into a [`GlobalClass`] and reports semantic defects
//! (zero eigenvalues, repeated circles, mismatched multiplicities, ...).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use wildrep_core::{
    ConjClass, EigVal, ExactScalar, ExpFactor, Flavor, GlobalClass, LocalClass, LocalEntry, Rat,
    SpherePoint, StokesCircle,
};

/// A syntax error, with a one-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// Well-formed text that does not describe valid formal data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticError(pub String);

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for SemanticError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

const PUNCT: &str = "{}<>#()[],;:^*+-/";

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        if c == '\n' {
            it.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            it.next();
            col += 1;
        } else if c.is_ascii_digit() {
            let start = col;
            let mut s = String::new();
            while let Some(&d) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                it.next();
                col += 1;
            }
            toks.push(Token {
                tok: Tok::Int(s),
                line,
                col: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = col;
            let mut s = String::new();
            while let Some(&d) = it.peek() {
                if !d.is_ascii_alphanumeric() && d != '_' {
                    break;
                }
                s.push(d);
                it.next();
                col += 1;
            }
            toks.push(Token {
                tok: Tok::Ident(s),
                line,
                col: start,
            });
        } else if PUNCT.contains(c) {
            it.next();
            toks.push(Token {
                tok: Tok::Punct(c),
                line,
                col,
            });
            col += 1;
        } else {
            return Err(ParseError {
                line,
                col,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(toks)
}

/// A parsed class description, prior to semantic checking.
#[derive(Debug, Clone)]
pub struct ClassAst {
    pub name: String,
    pub blocks: Vec<BlockAst>,
}

#[derive(Debug, Clone)]
pub struct BlockAst {
    pub point: PointAst,
    pub entries: Vec<EntryAst>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointAst {
    Inf,
    Finite(Rat),
}

#[derive(Debug, Clone)]
pub struct EntryAst {
    /// `(exponent, coefficient)` pairs, as written.
    pub terms: Vec<(Rat, Rat)>,
    pub mult: Option<u64>,
    pub class: Option<Vec<EigAst>>,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct EigAst {
    pub eig: EigValAst,
    pub blocks: Vec<u64>,
}

#[derive(Debug, Clone)]
pub enum EigValAst {
    Rational(Rat),
    Symbol { name: String, neg: bool },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            // end of input: point one past the last token
            None => match self.toks.last() {
                Some(t) => (t.line, t.col + 1),
                None => (1, 1),
            },
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(t) => self.err(format!("expected `{c}`, found {t}")),
                None => self.err(format!("expected `{c}`, found end of input")),
            })
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected `{kw}`, found {t}"))),
            None => Err(self.err(format!("expected `{kw}`, found end of input"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_u64(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let v = s
                    .parse::<u64>()
                    .map_err(|_| self.err(format!("{what} is out of range")))?;
                self.pos += 1;
                Ok(v)
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_digits(&mut self, what: &str) -> Result<Rat, ParseError> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let q = Rat::from_str(s).map_err(|_| self.err(format!("bad {what}")))?;
                self.pos += 1;
                Ok(q)
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    /// `["-"] integer ["/" integer]`, with a nonzero denominator.
    fn rational(&mut self) -> Result<Rat, ParseError> {
        let neg = self.eat_punct('-');
        let mut q = self.expect_digits("number")?;
        if self.eat_punct('/') {
            match self.peek() {
                Some(Tok::Int(s)) if s.chars().all(|c| c == '0') => {
                    return Err(self.err("denominator is zero"));
                }
                _ => {}
            }
            let d = self.expect_digits("denominator")?;
            q /= d;
        }
        Ok(if neg { -q } else { q })
    }

    fn point(&mut self) -> Result<PointAst, ParseError> {
        if self.peek() == Some(&Tok::Ident("inf".into())) {
            self.pos += 1;
            return Ok(PointAst::Inf);
        }
        match self.peek() {
            Some(Tok::Int(_)) | Some(Tok::Punct('-')) => Ok(PointAst::Finite(self.rational()?)),
            Some(t) => Err(self.err(format!("expected a point (`inf` or a rational), found {t}"))),
            None => Err(self.err("expected a point, found end of input")),
        }
    }

    /// `[rational "*"] "x" ["^" "(" rational ")"]`; the sign, if any, was
    /// consumed by the caller.
    fn term(&mut self) -> Result<(Rat, Rat), ParseError> {
        let coeff = if matches!(self.peek(), Some(Tok::Int(_))) {
            let c = self.rational()?;
            self.expect_punct('*')?;
            c
        } else {
            Rat::from_str("1").unwrap()
        };
        self.expect_keyword("x")?;
        let exp = if self.eat_punct('^') {
            self.expect_punct('(')?;
            let k = self.rational()?;
            self.expect_punct(')')?;
            k
        } else {
            Rat::from_str("1").unwrap()
        };
        Ok((exp, coeff))
    }

    fn poly(&mut self) -> Result<Vec<(Rat, Rat)>, ParseError> {
        // a bare 0 is the tame factor
        if let (Some(Tok::Int(s)), Some(Tok::Punct('>'))) = (self.peek(), self.peek2()) {
            if s.chars().all(|c| c == '0') {
                self.pos += 1;
                return Ok(Vec::new());
            }
        }
        let mut terms = Vec::new();
        let mut neg = self.eat_punct('-');
        loop {
            let (k, c) = self.term()?;
            terms.push((k, if neg { -c } else { c }));
            if self.eat_punct('+') {
                neg = false;
            } else if self.eat_punct('-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(terms)
    }

    fn eig(&mut self) -> Result<EigAst, ParseError> {
        let eig = match (self.peek(), self.peek2()) {
            (Some(Tok::Punct('-')), Some(Tok::Ident(_))) => {
                self.pos += 1;
                EigValAst::Symbol {
                    name: self.expect_ident("an eigenvalue")?,
                    neg: true,
                }
            }
            (Some(Tok::Punct('-')), _) | (Some(Tok::Int(_)), _) => {
                EigValAst::Rational(self.rational()?)
            }
            (Some(Tok::Ident(_)), _) => EigValAst::Symbol {
                name: self.expect_ident("an eigenvalue")?,
                neg: false,
            },
            (Some(t), _) => return Err(self.err(format!("expected an eigenvalue, found {t}"))),
            (None, _) => return Err(self.err("expected an eigenvalue, found end of input")),
        };
        self.expect_punct(':')?;
        self.expect_punct('[')?;
        let mut blocks = vec![self.expect_u64("a block size")?];
        while self.eat_punct(',') {
            blocks.push(self.expect_u64("a block size")?);
        }
        self.expect_punct(']')?;
        Ok(EigAst { eig, blocks })
    }

    fn entry(&mut self) -> Result<EntryAst, ParseError> {
        let (line, col) = self.here();
        self.expect_punct('<')?;
        let terms = self.poly()?;
        self.expect_punct('>')?;
        let mult = if self.eat_punct('#') {
            Some(self.expect_u64("a multiplicity")?)
        } else {
            None
        };
        let class = if self.eat_punct('{') {
            let mut eigs = vec![self.eig()?];
            while self.eat_punct(';') {
                eigs.push(self.eig()?);
            }
            self.expect_punct('}')?;
            Some(eigs)
        } else {
            None
        };
        Ok(EntryAst {
            terms,
            mult,
            class,
            line,
            col,
        })
    }

    fn block(&mut self) -> Result<BlockAst, ParseError> {
        self.expect_keyword("at")?;
        let point = self.point()?;
        self.expect_punct(':')?;
        let mut entries = vec![self.entry()?];
        while self.eat_punct(',') {
            entries.push(self.entry()?);
        }
        self.expect_punct(';')?;
        Ok(BlockAst { point, entries })
    }

    fn class(&mut self) -> Result<ClassAst, ParseError> {
        self.expect_keyword("class")?;
        let name = self.expect_ident("a class name")?;
        self.expect_punct('{')?;
        let mut blocks = vec![self.block()?];
        while self.peek() != Some(&Tok::Punct('}')) {
            blocks.push(self.block()?);
        }
        self.expect_punct('}')?;
        if let Some(t) = self.next() {
            return Err(ParseError {
                line: self.toks[self.pos - 1].line,
                col: self.toks[self.pos - 1].col,
                msg: format!("trailing input after the class body: {t}"),
            });
        }
        Ok(ClassAst { name, blocks })
    }
}

/// Parses one class description.
pub fn parse(src: &str) -> Result<ClassAst, ParseError> {
    let toks = lex(src)?;
    Parser { toks, pos: 0 }.class()
}

fn symbols_used(ast: &ClassAst) -> BTreeSet<String> {
    let mut used = BTreeSet::new();
    for b in &ast.blocks {
        for e in &b.entries {
            for eig in e.class.iter().flatten() {
                if let EigValAst::Symbol { name, .. } = &eig.eig {
                    used.insert(name.clone());
                }
            }
        }
    }
    used
}

fn build_class(eigs: &[EigAst]) -> Result<ConjClass, wildrep_core::Error> {
    let pairs = eigs
        .iter()
        .map(|e| {
            let v = match &e.eig {
                EigValAst::Rational(q) => EigVal::Exact(ExactScalar::from_rat(q)),
                EigValAst::Symbol { name, neg } => {
                    let s = EigVal::symbolic(name);
                    if *neg {
                        s.neg()
                    } else {
                        s
                    }
                }
            };
            (v, e.blocks.clone())
        })
        .collect();
    ConjClass::new(pairs)
}

/// Checks a parsed description and assembles the global class.
pub fn build(ast: &ClassAst, flavor: Flavor) -> Result<GlobalClass, SemanticError> {
    let used = symbols_used(ast);
    let mut counter = 0u64;
    let mut fresh = move || loop {
        counter += 1;
        let name = format!("t{counter}");
        if !used.contains(&name) {
            return name;
        }
    };
    let mut locals = Vec::with_capacity(ast.blocks.len());
    for b in &ast.blocks {
        let point = match &b.point {
            PointAst::Inf => SpherePoint::Infinity,
            PointAst::Finite(a) => SpherePoint::Finite(ExactScalar::from_rat(a)),
        };
        let mut entries = Vec::with_capacity(b.entries.len());
        for e in &b.entries {
            let at = |err: wildrep_core::Error| {
                SemanticError(format!("entry at line {}, column {}: {err}", e.line, e.col))
            };
            let terms = e
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), ExactScalar::from_rat(c)))
                .collect();
            let circle = StokesCircle::new(ExpFactor::new(point.clone(), terms).map_err(at)?);
            let (mult, class) = match (&e.mult, &e.class) {
                (None, None) => (
                    1,
                    ConjClass::new(vec![(EigVal::symbolic(&fresh()), vec![1])]).map_err(at)?,
                ),
                (Some(n), None) => (
                    *n,
                    ConjClass::new(vec![(EigVal::symbolic(&fresh()), vec![1; *n as usize])])
                        .map_err(at)?,
                ),
                (None, Some(eigs)) => {
                    let class = build_class(eigs).map_err(at)?;
                    (class.dim(), class)
                }
                (Some(n), Some(eigs)) => {
                    let class = build_class(eigs).map_err(at)?;
                    if class.dim() != *n {
                        return Err(SemanticError(format!(
                            "entry at line {}, column {}: class dimension {} does not match the declared multiplicity {}",
                            e.line,
                            e.col,
                            class.dim(),
                            n
                        )));
                    }
                    (*n, class)
                }
            };
            entries.push(LocalEntry {
                circle,
                mult,
                class,
            });
        }
        locals.push(LocalClass::new(point, entries).map_err(|e| SemanticError(e.to_string()))?);
    }
    GlobalClass::new(flavor, locals).map_err(|e| SemanticError(e.to_string()))
}
