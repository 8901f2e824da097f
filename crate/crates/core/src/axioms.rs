//! Axiom schemes, the five axiom systems and single-step scheme application.
//!
//! Schemes are written as ordinary terms in which the actions `s`, `t`, `u`
//! stand for sumform metavariables, `alpha` for an action metavariable and the
//! process variables `X`, `Y`, `Z` for process metavariables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use crate::equivalence::RelKind;
use crate::error::{Error, Result};
use crate::syntax::{parse_action, parse_process, parse_sumform};
use crate::term::{Alpha, Process, Sort, SumForm, Term};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SumPat {
    Zero,
    Tau,
    /// The action metavariable α.
    Alpha,
    Meta(char),
    Plus(Box<SumPat>, Box<SumPat>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProcPat {
    Meta(char),
    Nil,
    Prefix(SumPat, Box<ProcPat>),
    Plus(Box<ProcPat>, Box<ProcPat>),
    Star(SumPat, Box<ProcPat>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pattern {
    Proc(ProcPat),
    Sum(SumPat),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dir {
    L2R,
    R2L,
}

impl Dir {
    pub fn name(self) -> &'static str {
        match self {
            Dir::L2R => "l2r",
            Dir::R2L => "r2l",
        }
    }

    pub fn parse(s: &str) -> Option<Dir> {
        match s {
            "l2r" => Some(Dir::L2R),
            "r2l" => Some(Dir::R2L),
            _ => None,
        }
    }
}

/// Values for the metavariables of a scheme.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Assignment {
    pub sums: BTreeMap<char, SumForm>,
    pub procs: BTreeMap<char, Process>,
    pub alpha: Option<Alpha>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn sum(mut self, k: char, s: SumForm) -> Assignment {
        self.sums.insert(k, s);
        self
    }

    pub fn proc(mut self, k: char, p: Process) -> Assignment {
        self.procs.insert(k, p);
        self
    }

    pub fn alpha(mut self, a: Alpha) -> Assignment {
        self.alpha = Some(a);
        self
    }

    /// Entries of `other` override ours.
    pub fn merged(mut self, other: &Assignment) -> Assignment {
        self.sums.extend(other.sums.iter().map(|(k, v)| (*k, v.clone())));
        self.procs.extend(other.procs.iter().map(|(k, v)| (*k, v.clone())));
        if other.alpha.is_some() {
            self.alpha = other.alpha.clone();
        }
        self
    }

    /// Parse the inside of `[alpha:=tau, s:=a+b, x:=a.0]`.
    pub fn parse(text: &str) -> Result<Assignment, String> {
        let mut out = Assignment::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, val) = item.split_once(":=").ok_or_else(|| format!("bad binding `{item}`"))?;
            let val = val.trim();
            match key.trim() {
                "alpha" => out.alpha = Some(parse_action(val).map_err(|e| e.to_string())?),
                k @ ("s" | "t" | "u") => {
                    let s = parse_sumform(val).map_err(|e| e.to_string())?;
                    out.sums.insert(k.chars().next().unwrap(), s);
                }
                k @ ("x" | "y" | "z") => {
                    let p = parse_process(val).map_err(|e| e.to_string())?;
                    out.procs.insert(k.chars().next().unwrap(), p);
                }
                k => return Err(format!("unknown metavariable `{k}`")),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(a) = &self.alpha {
            parts.push(format!("alpha:={a}"));
        }
        parts.extend(self.sums.iter().map(|(k, v)| format!("{k}:={v}")));
        parts.extend(self.procs.iter().map(|(k, v)| format!("{k}:={v}")));
        write!(f, "[{}]", parts.join(", "))
    }
}

fn sum_pat(s: &SumForm) -> SumPat {
    match s {
        SumForm::Zero => SumPat::Zero,
        SumForm::Act(Alpha::Tau) => SumPat::Tau,
        SumForm::Act(Alpha::Act(a)) => match a.name() {
            "alpha" => SumPat::Alpha,
            n => SumPat::Meta(n.chars().next().unwrap()),
        },
        SumForm::Plus(l, r) => SumPat::Plus(Box::new(sum_pat(l)), Box::new(sum_pat(r))),
    }
}

fn proc_pat(p: &Process) -> ProcPat {
    match p {
        Process::Var(x) => ProcPat::Meta(x.to_ascii_lowercase().chars().next().unwrap()),
        Process::Nil => ProcPat::Nil,
        Process::Prefix(s, q) => ProcPat::Prefix(sum_pat(s), Box::new(proc_pat(q))),
        Process::Plus(l, r) => ProcPat::Plus(Box::new(proc_pat(l)), Box::new(proc_pat(r))),
        Process::Star(s, q) => ProcPat::Star(sum_pat(s), Box::new(proc_pat(q))),
    }
}

fn inst_sum(p: &SumPat, asg: &Assignment) -> Result<SumForm, String> {
    Ok(match p {
        SumPat::Zero => SumForm::Zero,
        SumPat::Tau => SumForm::Act(Alpha::Tau),
        SumPat::Alpha => SumForm::Act(asg.alpha.clone().ok_or("alpha is unassigned")?),
        SumPat::Meta(c) => asg.sums.get(c).cloned().ok_or_else(|| format!("{c} is unassigned"))?,
        SumPat::Plus(l, r) => SumForm::plus(inst_sum(l, asg)?, inst_sum(r, asg)?),
    })
}

fn inst_proc(p: &ProcPat, asg: &Assignment) -> Result<Process, String> {
    Ok(match p {
        ProcPat::Meta(c) => asg.procs.get(c).cloned().ok_or_else(|| format!("{c} is unassigned"))?,
        ProcPat::Nil => Process::Nil,
        ProcPat::Prefix(s, q) => Process::prefix(inst_sum(s, asg)?, inst_proc(q, asg)?),
        ProcPat::Plus(l, r) => Process::plus(inst_proc(l, asg)?, inst_proc(r, asg)?),
        ProcPat::Star(s, q) => Process::star(inst_sum(s, asg)?, inst_proc(q, asg)?),
    })
}

fn bind<K: Ord, V: PartialEq + Clone>(m: &mut BTreeMap<K, V>, k: K, v: &V) -> bool {
    match m.get(&k) {
        Some(old) => old == v,
        None => {
            m.insert(k, v.clone());
            true
        }
    }
}

fn match_sum(p: &SumPat, s: &SumForm, asg: &mut Assignment) -> bool {
    match (p, s) {
        (SumPat::Zero, SumForm::Zero) => true,
        (SumPat::Tau, SumForm::Act(Alpha::Tau)) => true,
        (SumPat::Alpha, SumForm::Act(a)) => match &asg.alpha {
            Some(b) => a == b,
            None => {
                asg.alpha = Some(a.clone());
                true
            }
        },
        (SumPat::Meta(c), s) => bind(&mut asg.sums, *c, s),
        (SumPat::Plus(pl, pr), SumForm::Plus(l, r)) => match_sum(pl, l, asg) && match_sum(pr, r, asg),
        _ => false,
    }
}

fn match_proc(p: &ProcPat, q: &Process, asg: &mut Assignment) -> bool {
    match (p, q) {
        (ProcPat::Meta(c), q) => bind(&mut asg.procs, *c, q),
        (ProcPat::Nil, Process::Nil) => true,
        (ProcPat::Prefix(ps, pp), Process::Prefix(s, q)) | (ProcPat::Star(ps, pp), Process::Star(s, q)) => {
            match_sum(ps, s, asg) && match_proc(pp, q, asg)
        }
        (ProcPat::Plus(pl, pr), Process::Plus(l, r)) => match_proc(pl, l, asg) && match_proc(pr, r, asg),
        _ => false,
    }
}

impl Pattern {
    pub fn instantiate(&self, asg: &Assignment) -> Result<Term, String> {
        match self {
            Pattern::Proc(p) => inst_proc(p, asg).map(Term::Proc),
            Pattern::Sum(s) => inst_sum(s, asg).map(Term::Sum),
        }
    }

    /// Extend `asg` so that the pattern instantiates to `t`, if possible.
    pub fn matches(&self, t: &Term, asg: &mut Assignment) -> bool {
        match (self, t) {
            (Pattern::Proc(p), Term::Proc(q)) => match_proc(p, q, asg),
            (Pattern::Sum(p), Term::Sum(s)) => match_sum(p, s, asg),
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scheme {
    pub name: &'static str,
    pub sort: Sort,
    pub lhs: Pattern,
    pub rhs: Pattern,
}

impl Scheme {
    /// Sumform metavariables occurring in the scheme.
    pub fn sum_metas(&self) -> BTreeSet<char> {
        fn sum(p: &SumPat, out: &mut BTreeSet<char>) {
            match p {
                SumPat::Meta(c) => {
                    out.insert(*c);
                }
                SumPat::Plus(l, r) => {
                    sum(l, out);
                    sum(r, out);
                }
                _ => {}
            }
        }
        fn proc(p: &ProcPat, out: &mut BTreeSet<char>) {
            match p {
                ProcPat::Prefix(s, q) | ProcPat::Star(s, q) => {
                    sum(s, out);
                    proc(q, out);
                }
                ProcPat::Plus(l, r) => {
                    proc(l, out);
                    proc(r, out);
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        for side in [&self.lhs, &self.rhs] {
            match side {
                Pattern::Proc(p) => proc(p, &mut out),
                Pattern::Sum(p) => sum(p, &mut out),
            }
        }
        out
    }

    fn sides(&self, dir: Dir) -> (&Pattern, &Pattern) {
        match dir {
            Dir::L2R => (&self.lhs, &self.rhs),
            Dir::R2L => (&self.rhs, &self.lhs),
        }
    }

    /// The instance `from = to` of this scheme read in direction `dir`.
    pub fn instance(&self, dir: Dir, asg: &Assignment) -> Result<(Term, Term), String> {
        let (from, to) = self.sides(dir);
        Ok((from.instantiate(asg)?, to.instantiate(asg)?))
    }

    /// Complete `extra` by matching the source side against `t`.
    pub fn match_source(&self, dir: Dir, t: &Term, extra: &Assignment) -> Option<Assignment> {
        let mut asg = extra.clone();
        self.sides(dir).0.matches(t, &mut asg).then_some(asg)
    }
}

const PROCESS_SCHEMES: &[(&str, &str, &str)] = &[
    ("A1", "X+Y", "Y+X"),
    ("A2", "(X+Y)+Z", "X+(Y+Z)"),
    ("A3", "X+X", "X"),
    ("A4", "X+0", "X"),
    ("A5", "(s+t).X", "s.X+t.X"),
    ("A6", "0.X", "0"),
    ("FA1", "0*X", "X"),
    ("FA2", "s*(t.((s+t)*X)+X)", "(s+t)*X"),
    ("FT1", "(s+tau)*X", "tau.(s*X)+s*X"),
    ("FT2", "alpha.(s*(tau.(s*(X+Y))+X))", "alpha.(s*(X+Y))"),
    ("T3", "alpha.(X+tau.Y)", "alpha.(X+tau.Y)+alpha.Y"),
    ("FT3", "s*(X+tau.Y)", "s*(X+tau.Y+s.Y)"),
    ("T1", "alpha.tau.X", "alpha.X"),
    ("FFIR", "(s+tau)*X", "tau.(s*X)"),
];

const SUMFORM_SCHEMES: &[(&str, &str, &str)] = &[
    ("A1", "s+t", "t+s"),
    ("A2", "(s+t)+u", "s+(t+u)"),
    ("A3", "s+s", "s"),
    ("A4", "s+0", "s"),
];

pub fn all_schemes() -> &'static [Scheme] {
    static SCHEMES: OnceLock<Vec<Scheme>> = OnceLock::new();
    SCHEMES.get_or_init(|| {
        let procs = PROCESS_SCHEMES.iter().map(|(name, l, r)| Scheme {
            name,
            sort: Sort::Process,
            lhs: Pattern::Proc(proc_pat(&parse_process(l).expect("scheme text"))),
            rhs: Pattern::Proc(proc_pat(&parse_process(r).expect("scheme text"))),
        });
        let sums = SUMFORM_SCHEMES.iter().map(|(name, l, r)| Scheme {
            name,
            sort: Sort::SumForm,
            lhs: Pattern::Sum(sum_pat(&parse_sumform(l).expect("scheme text"))),
            rhs: Pattern::Sum(sum_pat(&parse_sumform(r).expect("scheme text"))),
        });
        procs.chain(sums).collect()
    })
}

pub fn scheme(name: &str, sort: Sort) -> Option<&'static Scheme> {
    all_schemes().iter().find(|s| s.name == name && s.sort == sort)
}

/// The scheme names of an axiom system; A1–A4 cover both sorts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomSystem {
    pub kind: RelKind,
    pub names: Vec<&'static str>,
}

impl AxiomSystem {
    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(&name)
    }

    pub fn schemes(&self) -> impl Iterator<Item = &'static Scheme> + '_ {
        all_schemes().iter().filter(|s| self.contains(s.name))
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            RelKind::Strong => "E_s",
            RelKind::Branching => "E_b",
            RelKind::Eta => "E_eta",
            RelKind::Delay => "E_d",
            RelKind::Weak => "E_w",
        }
    }
}

pub fn axiom_system(k: RelKind) -> AxiomSystem {
    const STRONG: [&str; 8] = ["A1", "A2", "A3", "A4", "A5", "A6", "FA1", "FA2"];
    let extra: &[&str] = match k {
        RelKind::Strong => &[],
        RelKind::Branching => &["FT1", "FT2"],
        RelKind::Eta => &["FT1", "FT2", "T3", "FT3"],
        RelKind::Delay => &["T1", "FFIR"],
        RelKind::Weak => &["T1", "FFIR", "T3", "FT3"],
    };
    AxiomSystem { kind: k, names: STRONG.iter().chain(extra).copied().collect() }
}

/// Rewrite the subterm of `t` at `path` with one instance of `scheme`.
pub fn apply_scheme(t: &Term, scheme: &Scheme, path: &[u8], dir: Dir, asg: &Assignment) -> Result<Term> {
    let sub = t.at(path).ok_or_else(|| Error::IllSorted(format!("no subterm at {path:?}")))?;
    if sub.sort() != scheme.sort {
        return Err(Error::IllSorted(format!("{} applies to {:?} terms", scheme.name, scheme.sort)));
    }
    let (from, to) = scheme.instance(dir, asg).map_err(Error::NoMatch)?;
    if from != sub {
        return Err(Error::NoMatch(format!("{} does not match `{sub}`", scheme.name)));
    }
    t.replace(path, to).ok_or_else(|| Error::Internal("replacement failed".into()))
}
