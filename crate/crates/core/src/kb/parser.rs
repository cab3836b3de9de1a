use thiserror::Error;

use super::{Clause, Constraint, HypothesisSchema, KnowledgeBase, ProbDecl};
use crate::term::{Atom, Term, Var};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Colon,
    Equals,
    Bar,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, expected: &str| ParseError { line, column, expected: expected.to_string() };

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
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            '|' => Some(Tok::Bar),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, line: start_line, column: start_col });
            i += 1;
            col += 1;
            continue;
        }
        if c == '<' {
            if chars.get(i + 1) == Some(&'-') {
                out.push(Spanned { tok: Tok::Arrow, line: start_line, column: start_col });
                i += 2;
                col += 2;
                continue;
            }
            return Err(err(start_line, start_col, "`<-`"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if c.is_ascii_uppercase() || c == '_' { Tok::Var(word) } else { Tok::Ident(word) };
            out.push(Spanned { tok, line: start_line, column: start_col });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // A dot is a decimal point only when a digit follows it.
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned { tok: Tok::Number(word), line: start_line, column: start_col });
            continue;
        }
        return Err(err(start_line, start_col, "a statement, term or punctuation"));
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, expected: &str) -> ParseError {
        ParseError {
            line: at.line,
            column: at.column,
            expected: format!("{expected}, found {}", at.tok.describe()),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_at(self.peek(), expected))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Var(name) => Ok(Term::Var(Var::new(&name))),
            Tok::Number(ref n) if n.chars().all(|c| c.is_ascii_digit()) => Ok(Term::Const(n.as_str().into())),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let args = self.term_list()?;
                    Ok(Term::App(name.into(), args))
                } else {
                    Ok(Term::Const(name.into()))
                }
            }
            _ => Err(self.error_at(&t, "a term")),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                    args.push(self.term()?);
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.error_at(self.peek(), "`,` or `)`")),
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let t = self.bump();
        let Tok::Ident(name) = t.tok.clone() else {
            return Err(self.error_at(&t, "an atom (lowercase predicate name)"));
        };
        let args = if self.peek().tok == Tok::LParen {
            self.bump();
            self.term_list()?
        } else {
            Vec::new()
        };
        Ok(Atom::new(&name, args))
    }

    fn ground_atom(&mut self) -> Result<Atom, ParseError> {
        let at = self.peek().clone();
        let a = self.atom()?;
        if a.is_ground() {
            Ok(a)
        } else {
            Err(self.error_at(&at, "a ground atom"))
        }
    }

    fn atoms(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut out = vec![self.atom()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn probability(&mut self) -> Result<f64, ParseError> {
        let t = self.bump();
        let Tok::Number(ref text) = t.tok else {
            return Err(self.error_at(&t, "a number"));
        };
        match text.parse::<f64>() {
            Ok(p) if p > 0.0 && p <= 1.0 => Ok(p),
            _ => Err(ParseError {
                line: t.line,
                column: t.column,
                expected: format!("a probability in (0,1], found `{text}`"),
            }),
        }
    }

    fn statement(&mut self, kb: &mut KnowledgeBase) -> Result<(), ParseError> {
        let t = self.bump();
        let keyword = match &t.tok {
            Tok::Ident(k) => k.clone(),
            _ => return Err(self.error_at(&t, "a statement keyword")),
        };
        match keyword.as_str() {
            "fact" => {
                let head = self.atom()?;
                let body = if self.peek().tok == Tok::Arrow {
                    self.bump();
                    self.atoms()?
                } else {
                    Vec::new()
                };
                kb.facts.push(Clause { head, body });
            }
            "false" => {
                self.expect(Tok::Arrow, "`<-`")?;
                let body = self.atoms()?;
                kb.constraints.push(Constraint { body });
            }
            "hypothesis" => {
                let pattern = self.atom()?;
                self.expect(Tok::Colon, "`:`")?;
                let prior = self.probability()?;
                kb.hypotheses.push(HypothesisSchema::new(pattern, prior));
            }
            "prior" => {
                let atom = self.ground_atom()?;
                self.expect(Tok::Equals, "`=`")?;
                let probability = self.probability()?;
                kb.prob_decls.push(ProbDecl::Prior { atom, probability });
            }
            "prob" => {
                let target = self.ground_atom()?;
                self.expect(Tok::Bar, "`|`")?;
                let given = self.ground_atom()?;
                self.expect(Tok::Equals, "`=`")?;
                let probability = self.probability()?;
                kb.prob_decls.push(ProbDecl::Conditional { target, given, probability });
            }
            "askable" => {
                let nt = self.bump();
                let Tok::Ident(name) = nt.tok.clone() else {
                    return Err(self.error_at(&nt, "a predicate name"));
                };
                self.expect(Tok::Slash, "`/`")?;
                let at = self.bump();
                let arity = match &at.tok {
                    Tok::Number(n) => n.parse::<usize>().map_err(|_| self.error_at(&at, "an arity"))?,
                    _ => return Err(self.error_at(&at, "an arity")),
                };
                kb.askables.push((name.into(), arity));
            }
            _ => {
                return Err(self.error_at(&t, "one of `fact`, `false`, `hypothesis`, `prior`, `prob`, `askable`"))
            }
        }
        self.expect(Tok::Dot, "`.`")
    }
}

/// Parses a knowledge base, stopping at the first syntax error.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut kb = KnowledgeBase::default();
    while p.peek().tok != Tok::Eof {
        p.statement(&mut kb)?;
    }
    Ok(kb)
}

/// Parses a comma-separated conjunction such as `a, b(X)`. An optional
/// trailing `.` is accepted. The empty string is the empty conjunction.
pub fn parse_atoms(text: &str) -> Result<Vec<Atom>, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    if p.peek().tok == Tok::Eof {
        return Ok(Vec::new());
    }
    let atoms = p.atoms()?;
    if p.peek().tok == Tok::Dot {
        p.bump();
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.error_at(p.peek(), "`,` or end of input"));
    }
    Ok(atoms)
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let a = p.atom()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error_at(p.peek(), "end of input"));
    }
    Ok(a)
}
