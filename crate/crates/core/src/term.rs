//! Abstract syntax of basic CCS with flat iteration.
//!
//! Two sorts: sumforms (finite sums of actions) and process expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use crate::error::ParseError;

/// An observable action name. Names starting with an apostrophe are conames.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Action(String);

impl Action {
    pub fn new(name: &str) -> Result<Action, ParseError> {
        let base = name.strip_prefix('\'').unwrap_or(name);
        let mut chars = base.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(ParseError::new(0, format!("`{name}` is not a legal action name")));
        }
        if base == "tau" {
            return Err(ParseError::new(0, "`tau` is reserved and has no complement".to_string()));
        }
        Ok(Action(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_coname(&self) -> bool {
        self.0.starts_with('\'')
    }

    /// Complementary action: `a` <-> `'a`.
    pub fn complement(&self) -> Action {
        match self.0.strip_prefix('\'') {
            Some(base) => Action(base.to_string()),
            None => Action(format!("'{}", self.0)),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An element of `A ∪ {τ}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Alpha {
    Tau,
    Act(Action),
}

impl Alpha {
    /// Shorthand for tests and internal construction; panics on illegal names.
    pub fn act(name: &str) -> Alpha {
        Alpha::Act(Action::new(name).expect("legal action name"))
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Alpha::Tau)
    }

    pub fn complement(&self) -> Option<Alpha> {
        match self {
            Alpha::Tau => None,
            Alpha::Act(a) => Some(Alpha::Act(a.complement())),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Tau => f.write_str("tau"),
            Alpha::Act(a) => a.fmt(f),
        }
    }
}

/// Transition label: a visible action, τ, or a process variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Tau,
    Visible(Action),
    Var(String),
}

impl Label {
    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    /// Label string used in Aldebaran output.
    pub fn aut_name(&self) -> String {
        match self {
            Label::Tau => "tau".to_string(),
            Label::Visible(a) => a.name().to_string(),
            Label::Var(x) => format!("var:{x}"),
        }
    }
}

impl From<Alpha> for Label {
    fn from(a: Alpha) -> Label {
        match a {
            Alpha::Tau => Label::Tau,
            Alpha::Act(a) => Label::Visible(a),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.aut_name())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SumForm {
    Zero,
    Act(Alpha),
    Plus(Rc<SumForm>, Rc<SumForm>),
}

impl SumForm {
    pub fn plus(l: SumForm, r: SumForm) -> SumForm {
        SumForm::Plus(Rc::new(l), Rc::new(r))
    }

    pub fn tau() -> SumForm {
        SumForm::Act(Alpha::Tau)
    }

    /// Right-nested sum of the given actions; the empty sum is `0`.
    pub fn sum_of<I: IntoIterator<Item = Alpha>>(actions: I) -> SumForm {
        let items: Vec<SumForm> = actions.into_iter().map(SumForm::Act).collect();
        items
            .into_iter()
            .rev()
            .reduce(|acc, s| SumForm::plus(s, acc))
            .unwrap_or(SumForm::Zero)
    }

    pub fn size(&self) -> usize {
        match self {
            SumForm::Zero | SumForm::Act(_) => 1,
            SumForm::Plus(l, r) => 1 + l.size() + r.size(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    Var(String),
    Nil,
    Prefix(SumForm, Rc<Process>),
    Plus(Rc<Process>, Rc<Process>),
    Star(SumForm, Rc<Process>),
}

impl Process {
    pub fn var(name: &str) -> Process {
        Process::Var(name.to_string())
    }

    pub fn prefix(s: SumForm, p: Process) -> Process {
        Process::Prefix(s, Rc::new(p))
    }

    pub fn act_prefix(a: Alpha, p: Process) -> Process {
        Process::Prefix(SumForm::Act(a), Rc::new(p))
    }

    pub fn plus(l: Process, r: Process) -> Process {
        Process::Plus(Rc::new(l), Rc::new(r))
    }

    pub fn star(s: SumForm, p: Process) -> Process {
        Process::Star(s, Rc::new(p))
    }

    /// Right-nested sum; the empty sum is `0`.
    pub fn sum_of<I: IntoIterator<Item = Process>>(parts: I) -> Process {
        let items: Vec<Process> = parts.into_iter().collect();
        items
            .into_iter()
            .rev()
            .reduce(|acc, p| Process::plus(p, acc))
            .unwrap_or(Process::Nil)
    }

    /// Summands of the top-level `+` tree, left to right.
    pub fn summands(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
            match p {
                Process::Plus(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(p: &Process, out: &mut BTreeSet<String>) {
            match p {
                Process::Var(x) => {
                    out.insert(x.clone());
                }
                Process::Nil => {}
                Process::Prefix(_, q) | Process::Star(_, q) => go(q, out),
                Process::Plus(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Every action occurring in the term, in prefix or loop position.
    pub fn actions(&self) -> BTreeSet<Alpha> {
        let mut out = BTreeSet::new();
        fn go(p: &Process, out: &mut BTreeSet<Alpha>) {
            match p {
                Process::Var(_) | Process::Nil => {}
                Process::Prefix(s, q) | Process::Star(s, q) => {
                    out.extend(init_actions(s));
                    go(q, out);
                }
                Process::Plus(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// True when every prefix and loop sumform is a single action.
    pub fn in_prefix_fragment(&self) -> bool {
        match self {
            Process::Var(_) | Process::Nil => true,
            Process::Prefix(s, q) | Process::Star(s, q) => {
                matches!(s, SumForm::Act(_)) && q.in_prefix_fragment()
            }
            Process::Plus(l, r) => l.in_prefix_fragment() && r.in_prefix_fragment(),
        }
    }
}

pub type Substitution = BTreeMap<String, Process>;

pub fn substitute(p: &Process, sigma: &Substitution) -> Process {
    match p {
        Process::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| p.clone()),
        Process::Nil => Process::Nil,
        Process::Prefix(s, q) => Process::prefix(s.clone(), substitute(q, sigma)),
        Process::Plus(l, r) => Process::plus(substitute(l, sigma), substitute(r, sigma)),
        Process::Star(s, q) => Process::star(s.clone(), substitute(q, sigma)),
    }
}

/// Number of AST nodes, sumform nodes included.
pub fn term_size(p: &Process) -> usize {
    match p {
        Process::Var(_) | Process::Nil => 1,
        Process::Prefix(s, q) | Process::Star(s, q) => 1 + s.size() + term_size(q),
        Process::Plus(l, r) => 1 + term_size(l) + term_size(r),
    }
}

/// `{α | s →α}`.
pub fn init_actions(s: &SumForm) -> BTreeSet<Alpha> {
    let mut out = BTreeSet::new();
    fn go(s: &SumForm, out: &mut BTreeSet<Alpha>) {
        match s {
            SumForm::Zero => {}
            SumForm::Act(a) => {
                out.insert(a.clone());
            }
            SumForm::Plus(l, r) => {
                go(l, out);
                go(r, out);
            }
        }
    }
    go(s, &mut out);
    out
}

pub fn sumform_leq(s: &SumForm, t: &SumForm) -> bool {
    init_actions(s).is_subset(&init_actions(t))
}

/// Sort of a subterm.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sort {
    Process,
    SumForm,
}

/// A term of either sort, as it appears in equations and positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Proc(Process),
    Sum(SumForm),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Proc(_) => Sort::Process,
            Term::Sum(_) => Sort::SumForm,
        }
    }

    pub fn as_proc(&self) -> Option<&Process> {
        match self {
            Term::Proc(p) => Some(p),
            Term::Sum(_) => None,
        }
    }

    pub fn as_sum(&self) -> Option<&SumForm> {
        match self {
            Term::Sum(s) => Some(s),
            Term::Proc(_) => None,
        }
    }

    /// Split a top-level `+` node.
    pub fn split_plus(&self) -> Option<(Term, Term)> {
        match self {
            Term::Proc(Process::Plus(l, r)) => {
                Some((Term::Proc((**l).clone()), Term::Proc((**r).clone())))
            }
            Term::Sum(SumForm::Plus(l, r)) => {
                Some((Term::Sum((**l).clone()), Term::Sum((**r).clone())))
            }
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Proc(Process::Nil) | Term::Sum(SumForm::Zero))
    }

    pub fn zero(sort: Sort) -> Term {
        match sort {
            Sort::Process => Term::Proc(Process::Nil),
            Sort::SumForm => Term::Sum(SumForm::Zero),
        }
    }

    /// Build `l + r`; both must have the same sort.
    pub fn plus(l: Term, r: Term) -> Term {
        match (l, r) {
            (Term::Proc(l), Term::Proc(r)) => Term::Proc(Process::plus(l, r)),
            (Term::Sum(l), Term::Sum(r)) => Term::Sum(SumForm::plus(l, r)),
            _ => panic!("ill-sorted sum"),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Proc(p) => term_size(p),
            Term::Sum(s) => s.size(),
        }
    }

    /// Subterm at a position. Children are numbered 0 (sumform or left) and 1.
    pub fn at(&self, path: &[u8]) -> Option<Term> {
        let mut cur = self.clone();
        for &i in path {
            cur = child(&cur, i)?;
        }
        Some(cur)
    }

    /// Replace the subterm at `path` by `new`, which must have the sort of the old one.
    pub fn replace(&self, path: &[u8], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return (new.sort() == self.sort()).then_some(new);
        };
        match (self, i) {
            (Term::Proc(Process::Prefix(s, p)), 0) => {
                let Term::Sum(s2) = Term::Sum(s.clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::Prefix(s2, p.clone())))
            }
            (Term::Proc(Process::Prefix(s, p)), 1) => {
                let Term::Proc(p2) = Term::Proc((**p).clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::prefix(s.clone(), p2)))
            }
            (Term::Proc(Process::Star(s, p)), 0) => {
                let Term::Sum(s2) = Term::Sum(s.clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::Star(s2, p.clone())))
            }
            (Term::Proc(Process::Star(s, p)), 1) => {
                let Term::Proc(p2) = Term::Proc((**p).clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::star(s.clone(), p2)))
            }
            (Term::Proc(Process::Plus(l, r)), 0) => {
                let Term::Proc(l2) = Term::Proc((**l).clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::Plus(Rc::new(l2), r.clone())))
            }
            (Term::Proc(Process::Plus(l, r)), 1) => {
                let Term::Proc(r2) = Term::Proc((**r).clone()).replace(rest, new)? else { return None };
                Some(Term::Proc(Process::Plus(l.clone(), Rc::new(r2))))
            }
            (Term::Sum(SumForm::Plus(l, r)), 0) => {
                let Term::Sum(l2) = Term::Sum((**l).clone()).replace(rest, new)? else { return None };
                Some(Term::Sum(SumForm::Plus(Rc::new(l2), r.clone())))
            }
            (Term::Sum(SumForm::Plus(l, r)), 1) => {
                let Term::Sum(r2) = Term::Sum((**r).clone()).replace(rest, new)? else { return None };
                Some(Term::Sum(SumForm::Plus(l.clone(), Rc::new(r2))))
            }
            _ => None,
        }
    }
}

fn child(t: &Term, i: u8) -> Option<Term> {
    Some(match (t, i) {
        (Term::Proc(Process::Prefix(s, _)), 0) | (Term::Proc(Process::Star(s, _)), 0) => {
            Term::Sum(s.clone())
        }
        (Term::Proc(Process::Prefix(_, p)), 1) | (Term::Proc(Process::Star(_, p)), 1) => {
            Term::Proc((**p).clone())
        }
        (Term::Proc(Process::Plus(l, _)), 0) => Term::Proc((**l).clone()),
        (Term::Proc(Process::Plus(_, r)), 1) => Term::Proc((**r).clone()),
        (Term::Sum(SumForm::Plus(l, _)), 0) => Term::Sum((**l).clone()),
        (Term::Sum(SumForm::Plus(_, r)), 1) => Term::Sum((**r).clone()),
        _ => return None,
    })
}

impl From<Process> for Term {
    fn from(p: Process) -> Term {
        Term::Proc(p)
    }
}

impl From<SumForm> for Term {
    fn from(s: SumForm) -> Term {
        Term::Sum(s)
    }
}
