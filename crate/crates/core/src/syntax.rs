//! Concrete syntax: a backtracking recursive-descent parser and the matching printer.
//!
//! ```text
//! proc     := prefixed ('+' prefixed)*
//! prefixed := sumform '.' prefixed | sumform '*' prefixed | atom
//! atom     := '0' | VAR | '(' proc ')'
//! sumform  := '0' | ACT | '(' sfsum ')'
//! sfsum    := sumform ('+' sumform)*
//! ```
//! Actions are lowercase identifiers (optionally with a leading `'` for conames),
//! `tau` is the silent action, and variables start with an uppercase letter.

use std::fmt;

use crate::error::ParseError;
use crate::term::{Action, Alpha, Process, SumForm, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Zero,
    Act(String),
    Var(String),
    Plus,
    Dot,
    Star,
    Bar,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0' => Tok::Zero,
            _ if c == '\'' || c.is_ascii_alphabetic() || c == '_' => {
                i += 1;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let base = word.strip_prefix('\'').unwrap_or(word);
                let tok = if base.starts_with(|c: char| c.is_ascii_uppercase()) {
                    if word.starts_with('\'') {
                        return Err(ParseError::new(start, format!("variable `{base}` cannot be complemented")));
                    }
                    Tok::Var(word.to_string())
                } else if word == "tau" {
                    Tok::Act(word.to_string())
                } else {
                    Action::new(word).map_err(|e| ParseError::new(start, e.msg))?;
                    Tok::Act(word.to_string())
                };
                out.push((start, tok));
                continue;
            }
            _ => return Err(ParseError::new(start, format!("unexpected character `{c}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::new(self.offset(), msg.to_string()))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn proc(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.prefixed()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.prefixed()?;
            acc = Process::plus(acc, rhs);
        }
        Ok(acc)
    }

    fn prefixed(&mut self) -> Result<Process, ParseError> {
        let save = self.pos;
        if let Ok(s) = self.sumform() {
            if self.eat(&Tok::Dot) {
                return Ok(Process::prefix(s, self.prefixed()?));
            }
            if self.eat(&Tok::Star) {
                return Ok(Process::star(s, self.prefixed()?));
            }
        }
        self.pos = save;
        self.atom()
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Zero) => {
                self.pos += 1;
                Ok(Process::Nil)
            }
            Some(Tok::Var(x)) => {
                self.pos += 1;
                Ok(Process::Var(x))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let p = self.proc()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(p)
            }
            Some(Tok::Act(a)) => self.err(&format!("action `{a}` must be followed by `.` or `*`")),
            _ => self.err("expected a process expression"),
        }
    }

    fn sumform(&mut self) -> Result<SumForm, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Zero) => {
                self.pos += 1;
                Ok(SumForm::Zero)
            }
            Some(Tok::Act(a)) => {
                self.pos += 1;
                Ok(SumForm::Act(alpha_of(&a)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let s = self.sfsum()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(s)
            }
            _ => self.err("expected a sumform"),
        }
    }

    fn sfsum(&mut self) -> Result<SumForm, ParseError> {
        let mut acc = self.sumform()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.sumform()?;
            acc = SumForm::plus(acc, rhs);
        }
        Ok(acc)
    }
}

fn alpha_of(word: &str) -> Alpha {
    if word == "tau" {
        Alpha::Tau
    } else {
        Alpha::Act(Action::new(word).expect("checked by the lexer"))
    }
}

pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let mut p = Parser::new(text)?;
    let out = p.proc()?;
    p.finish()?;
    Ok(out)
}

/// Parse a top-level sumform such as `a+tau+0` (outer parentheses optional).
pub fn parse_sumform(text: &str) -> Result<SumForm, ParseError> {
    let mut p = Parser::new(text)?;
    let out = p.sfsum()?;
    p.finish()?;
    Ok(out)
}

pub fn parse_action(text: &str) -> Result<Alpha, ParseError> {
    match parse_sumform(text)? {
        SumForm::Act(a) => Ok(a),
        _ => Err(ParseError::new(0, format!("`{text}` is not a single action"))),
    }
}

/// A parser over `|`-separated process expressions, used for parallel networks.
/// Returns the operands as a left-nested tree via the callback.
pub(crate) fn parse_bars<T>(
    text: &str,
    leaf: &dyn Fn(Process) -> T,
    par: &dyn Fn(T, T) -> T,
) -> Result<T, ParseError> {
    let mut p = Parser::new(text)?;
    let out = net(&mut p, leaf, par)?;
    p.finish()?;
    Ok(out)
}

fn net<T>(p: &mut Parser, leaf: &dyn Fn(Process) -> T, par: &dyn Fn(T, T) -> T) -> Result<T, ParseError> {
    let mut acc = net_operand(p, leaf, par)?;
    while p.eat(&Tok::Bar) {
        let rhs = net_operand(p, leaf, par)?;
        acc = par(acc, rhs);
    }
    Ok(acc)
}

fn net_operand<T>(
    p: &mut Parser,
    leaf: &dyn Fn(Process) -> T,
    par: &dyn Fn(T, T) -> T,
) -> Result<T, ParseError> {
    let save = p.pos;
    if let Ok(proc) = p.proc() {
        if matches!(p.peek(), None | Some(Tok::Bar) | Some(Tok::RParen)) {
            return Ok(leaf(proc));
        }
    }
    p.pos = save;
    p.expect(&Tok::LParen, "`(`")?;
    let inner = net(p, leaf, par)?;
    p.expect(&Tok::RParen, "`)`")?;
    Ok(inner)
}

fn write_sumform_atom(s: &SumForm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match s {
        SumForm::Plus(..) => write!(f, "({s})"),
        _ => write!(f, "{s}"),
    }
}

impl fmt::Display for SumForm {
    /// Top-level form: `a+b+c` without outer parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumForm::Zero => f.write_str("0"),
            SumForm::Act(a) => a.fmt(f),
            SumForm::Plus(l, r) => {
                write!(f, "{l}+")?;
                write_sumform_atom(r, f)
            }
        }
    }
}

fn write_prefixed(p: &Process, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Process::Plus(..) => write!(f, "({p})"),
        _ => write!(f, "{p}"),
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Var(x) => f.write_str(x),
            Process::Nil => f.write_str("0"),
            Process::Prefix(s, p) => {
                write_sumform_atom(s, f)?;
                f.write_str(".")?;
                write_prefixed(p, f)
            }
            Process::Star(s, p) => {
                write_sumform_atom(s, f)?;
                f.write_str("*")?;
                write_prefixed(p, f)
            }
            Process::Plus(l, r) => {
                write!(f, "{l}+")?;
                write_prefixed(r, f)
            }
        }
    }
}

pub fn format_process(p: &Process) -> String {
    p.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Proc(p) => p.fmt(f),
            Term::Sum(s) => s.fmt(f),
        }
    }
}
