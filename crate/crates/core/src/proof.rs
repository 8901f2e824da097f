//! Equational proofs: a flat list of steps with back-references, a builder
//! used by the proof-producing procedures, an independent checker and the
//! line-oriented certificate format.
//!
//! Certificate lines look like
//!
//! ```text
//! 0 axiom FA1 p l2r [x:=X] |- 0*X = X
//! 1 sym 0 |- X = 0*X
//! qed |- X = 0*X
//! ```
//!
//! `|-s` marks an equation between sumforms.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::axioms::{axiom_system, scheme, Assignment, Dir};
use crate::equivalence::RelKind;
use crate::error::{CertError, CheckError, Error, Result};
use crate::syntax::{parse_process, parse_sumform};
use crate::term::{substitute, Process, Sort, Substitution, Term};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Equation {
        Equation { lhs: lhs.into(), rhs: rhs.into() }
    }

    pub fn flipped(&self) -> Equation {
        Equation { lhs: self.rhs.clone(), rhs: self.lhs.clone() }
    }

    pub fn sort(&self) -> Sort {
        self.lhs.sort()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    Axiom { scheme: String, sort: Sort, dir: Dir, asg: Assignment },
    Refl,
    Sym(usize),
    Trans(usize, usize),
    Ctx { of: usize, path: Vec<u8> },
    Subst { of: usize, sigma: Substitution },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub rule: Rule,
    pub eq: Equation,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Proof {
    pub steps: Vec<Step>,
    pub claimed: Equation,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Scheme names cited by the proof, with multiplicity.
    pub fn cited(&self) -> Vec<&str> {
        self.steps
            .iter()
            .filter_map(|s| match &s.rule {
                Rule::Axiom { scheme, .. } => Some(scheme.as_str()),
                _ => None,
            })
            .collect()
    }

    /// The same derivation with `sigma` applied to every equation.
    pub fn substituted(&self, sigma: &Substitution) -> Proof {
        let n = self.steps.len();
        let sub = |t: &Term| match t {
            Term::Proc(p) => Term::Proc(substitute(p, sigma)),
            s => s.clone(),
        };
        let mut steps = self.steps.clone();
        for step in &self.steps {
            let rule = match &step.rule {
                Rule::Axiom { scheme, sort, dir, asg } => {
                    let mut asg = asg.clone();
                    for v in asg.procs.values_mut() {
                        *v = substitute(v, sigma);
                    }
                    Rule::Axiom { scheme: scheme.clone(), sort: *sort, dir: *dir, asg }
                }
                Rule::Refl => Rule::Refl,
                Rule::Sym(i) => Rule::Sym(i + n),
                Rule::Trans(i, j) => Rule::Trans(i + n, j + n),
                Rule::Ctx { of, path } => Rule::Ctx { of: of + n, path: path.clone() },
                Rule::Subst { of, sigma: tau } => {
                    // σ∘τ, applied to the unsubstituted copy of the premise
                    let mut comp: Substitution =
                        tau.iter().map(|(k, v)| (k.clone(), substitute(v, sigma))).collect();
                    for (k, v) in sigma {
                        comp.entry(k.clone()).or_insert_with(|| v.clone());
                    }
                    Rule::Subst { of: *of, sigma: comp }
                }
            };
            steps.push(Step { rule, eq: Equation { lhs: sub(&step.eq.lhs), rhs: sub(&step.eq.rhs) } });
        }
        Proof { steps, claimed: Equation { lhs: sub(&self.claimed.lhs), rhs: sub(&self.claimed.rhs) } }
    }
}

fn invalid(step: usize, reason: impl Into<String>) -> CheckError {
    CheckError::InvalidStep { step, reason: reason.into() }
}

/// Replay every step and compare the conclusion with the claim.
pub fn check_proof(pr: &Proof, k: RelKind) -> Result<(), CheckError> {
    let system = axiom_system(k);
    for (i, step) in pr.steps.iter().enumerate() {
        let eq = &step.eq;
        if eq.lhs.sort() != eq.rhs.sort() {
            return Err(invalid(i, "ill-sorted equation"));
        }
        let premise = |j: usize| -> Result<&Equation, CheckError> {
            if j < i {
                Ok(&pr.steps[j].eq)
            } else {
                Err(invalid(i, format!("reference to step {j} is not backwards")))
            }
        };
        match &step.rule {
            Rule::Axiom { scheme: name, sort, dir, asg } => {
                if !system.contains(name) {
                    return Err(CheckError::ForeignAxiom {
                        step: i,
                        name: name.clone(),
                        system: system.label().to_string(),
                    });
                }
                let sch = scheme(name, *sort).ok_or_else(|| invalid(i, format!("{name} has no {sort:?} form")))?;
                let (l, r) = sch.instance(*dir, asg).map_err(|e| invalid(i, e))?;
                if l != eq.lhs || r != eq.rhs {
                    return Err(invalid(i, format!("{name} instance is `{l} = {r}`")));
                }
            }
            Rule::Refl => {
                if eq.lhs != eq.rhs {
                    return Err(invalid(i, "reflexivity needs identical sides"));
                }
            }
            Rule::Sym(j) => {
                if premise(*j)?.flipped() != *eq {
                    return Err(invalid(i, "symmetry does not match its premise"));
                }
            }
            Rule::Trans(j, l) => {
                let (a, b) = (premise(*j)?, premise(*l)?);
                if a.rhs != b.lhs || a.lhs != eq.lhs || b.rhs != eq.rhs {
                    return Err(invalid(i, "transitivity premises do not chain"));
                }
            }
            Rule::Ctx { of, path } => {
                let a = premise(*of)?;
                if eq.lhs.at(path).as_ref() != Some(&a.lhs) {
                    return Err(invalid(i, "context hole does not hold the premise"));
                }
                if eq.lhs.replace(path, a.rhs.clone()).as_ref() != Some(&eq.rhs) {
                    return Err(invalid(i, "context does not yield the claimed right side"));
                }
            }
            Rule::Subst { of, sigma } => {
                let a = premise(*of)?;
                let ok = match (&a.lhs, &a.rhs, &eq.lhs, &eq.rhs) {
                    (Term::Proc(l), Term::Proc(r), Term::Proc(l2), Term::Proc(r2)) => {
                        substitute(l, sigma) == *l2 && substitute(r, sigma) == *r2
                    }
                    _ => a == eq,
                };
                if !ok {
                    return Err(invalid(i, "substitution instance does not match"));
                }
            }
        }
    }
    match pr.steps.last() {
        Some(last) if last.eq == pr.claimed => Ok(()),
        Some(last) => Err(CheckError::ConclusionMismatch {
            proved: last.eq.to_string(),
            claimed: pr.claimed.to_string(),
        }),
        None => Err(CheckError::ConclusionMismatch { proved: "nothing".into(), claimed: pr.claimed.to_string() }),
    }
}

/// Incremental construction of proofs; step ids are indices into `steps`.
#[derive(Clone, Debug, Default)]
pub struct ProofBuilder {
    steps: Vec<Step>,
    budget: Option<usize>,
}

impl ProofBuilder {
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    /// Fail with [`Error::OutOfFuel`] once more than `budget` steps are recorded.
    pub fn with_budget(budget: Option<usize>) -> ProofBuilder {
        ProofBuilder { steps: Vec::new(), budget }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn eq(&self, id: usize) -> &Equation {
        &self.steps[id].eq
    }

    pub fn lhs(&self, id: usize) -> &Term {
        &self.steps[id].eq.lhs
    }

    pub fn rhs(&self, id: usize) -> &Term {
        &self.steps[id].eq.rhs
    }

    fn push(&mut self, rule: Rule, eq: Equation) -> Result<usize> {
        if let Some(b) = self.budget {
            if self.steps.len() >= b {
                return Err(Error::OutOfFuel(self.steps.len()));
            }
        }
        self.steps.push(Step { rule, eq });
        Ok(self.steps.len() - 1)
    }

    pub fn refl(&mut self, t: impl Into<Term>) -> Result<usize> {
        let t = t.into();
        self.push(Rule::Refl, Equation { lhs: t.clone(), rhs: t })
    }

    pub fn sym(&mut self, id: usize) -> Result<usize> {
        let eq = self.eq(id).flipped();
        self.push(Rule::Sym(id), eq)
    }

    pub fn trans(&mut self, a: usize, b: usize) -> Result<usize> {
        if self.rhs(a) != self.lhs(b) {
            return Err(Error::Internal(format!("cannot chain `{}` with `{}`", self.eq(a), self.eq(b))));
        }
        let eq = Equation { lhs: self.lhs(a).clone(), rhs: self.rhs(b).clone() };
        self.push(Rule::Trans(a, b), eq)
    }

    /// Chain a non-empty sequence left to right.
    pub fn chain(&mut self, ids: &[usize]) -> Result<usize> {
        let (&first, rest) = ids.split_first().ok_or_else(|| Error::Internal("empty chain".into()))?;
        rest.iter().try_fold(first, |acc, &id| self.trans(acc, id))
    }

    /// Lift `id` into `whole`, whose subterm at `path` is the left side of `id`.
    pub fn ctx(&mut self, id: usize, path: &[u8], whole: &Term) -> Result<usize> {
        if path.is_empty() {
            return Ok(id);
        }
        if whole.at(path).as_ref() != Some(self.lhs(id)) {
            return Err(Error::Internal(format!("`{}` is not at {path:?} of `{whole}`", self.lhs(id))));
        }
        let rhs = whole
            .replace(path, self.rhs(id).clone())
            .ok_or_else(|| Error::IllSorted(format!("{path:?} in `{whole}`")))?;
        self.push(Rule::Ctx { of: id, path: path.to_vec() }, Equation { lhs: whole.clone(), rhs })
    }

    pub fn subst(&mut self, id: usize, sigma: Substitution) -> Result<usize> {
        let eq = self.eq(id);
        let eq = match (&eq.lhs, &eq.rhs) {
            (Term::Proc(l), Term::Proc(r)) => Equation::new(substitute(l, &sigma), substitute(r, &sigma)),
            _ => eq.clone(),
        };
        self.push(Rule::Subst { of: id, sigma }, eq)
    }

    /// One axiom instance whose source side is `t`; `extra` supplies metavariables
    /// that do not occur on the source side.
    pub fn axiom(&mut self, name: &str, dir: Dir, t: &Term, extra: &Assignment) -> Result<usize> {
        let sch = scheme(name, t.sort())
            .ok_or_else(|| Error::IllSorted(format!("{name} has no {:?} form", t.sort())))?;
        let asg = sch
            .match_source(dir, t, extra)
            .ok_or_else(|| Error::NoMatch(format!("{name} ({}) does not match `{t}`", dir.name())))?;
        let (l, r) = sch.instance(dir, &asg).map_err(Error::NoMatch)?;
        self.push(Rule::Axiom { scheme: name.to_string(), sort: t.sort(), dir, asg }, Equation { lhs: l, rhs: r })
    }

    /// Extract the steps needed for `id`, renumbered, as a proof of its equation.
    pub fn finish(&self, id: usize) -> Proof {
        let mut needed = vec![false; id + 1];
        needed[id] = true;
        for i in (0..=id).rev() {
            if !needed[i] {
                continue;
            }
            match &self.steps[i].rule {
                Rule::Sym(j) | Rule::Ctx { of: j, .. } | Rule::Subst { of: j, .. } => needed[*j] = true,
                Rule::Trans(j, l) => {
                    needed[*j] = true;
                    needed[*l] = true;
                }
                Rule::Axiom { .. } | Rule::Refl => {}
            }
        }
        let mut renum = vec![usize::MAX; id + 1];
        let mut steps = Vec::new();
        for i in 0..=id {
            if !needed[i] {
                continue;
            }
            renum[i] = steps.len();
            let rule = match &self.steps[i].rule {
                Rule::Sym(j) => Rule::Sym(renum[*j]),
                Rule::Trans(j, l) => Rule::Trans(renum[*j], renum[*l]),
                Rule::Ctx { of, path } => Rule::Ctx { of: renum[*of], path: path.clone() },
                Rule::Subst { of, sigma } => Rule::Subst { of: renum[*of], sigma: sigma.clone() },
                r => r.clone(),
            };
            steps.push(Step { rule, eq: self.steps[i].eq.clone() });
        }
        Proof { claimed: self.eq(id).clone(), steps }
    }
}

/// Forward reasoning on one term: each move rewrites a subterm of the current term.
pub struct Deriv<'a> {
    pub b: &'a mut ProofBuilder,
    start: Term,
    cur: Term,
    acc: Option<usize>,
}

impl<'a> Deriv<'a> {
    pub fn new(b: &'a mut ProofBuilder, start: impl Into<Term>) -> Deriv<'a> {
        let start = start.into();
        Deriv { b, cur: start.clone(), start, acc: None }
    }

    pub fn cur(&self) -> &Term {
        &self.cur
    }

    pub fn proc(&self) -> &Process {
        self.cur.as_proc().expect("process derivation")
    }

    /// Use the equation `id` at `path` of the current term.
    pub fn lemma(&mut self, id: usize, path: &[u8]) -> Result<()> {
        if self.b.lhs(id) == self.b.rhs(id) {
            return Ok(());
        }
        let lifted = self.b.ctx(id, path, &self.cur)?;
        self.cur = self.b.rhs(lifted).clone();
        self.acc = Some(match self.acc {
            None => lifted,
            Some(a) => self.b.trans(a, lifted)?,
        });
        Ok(())
    }

    pub fn axiom(&mut self, name: &str, dir: Dir, path: &[u8], extra: &Assignment) -> Result<()> {
        let sub = self.cur.at(path).ok_or_else(|| Error::IllSorted(format!("no subterm at {path:?}")))?;
        let id = self.b.axiom(name, dir, &sub, extra)?;
        self.lemma(id, path)
    }

    /// Apply a proof-producing function to the subterm at `path`.
    pub fn with<F>(&mut self, path: &[u8], f: F) -> Result<()>
    where
        F: FnOnce(&mut ProofBuilder, &Term) -> Result<usize>,
    {
        let sub = self.cur.at(path).ok_or_else(|| Error::IllSorted(format!("no subterm at {path:?}")))?;
        let id = f(self.b, &sub)?;
        self.lemma(id, path)
    }

    pub fn finish(self) -> Result<usize> {
        match self.acc {
            Some(a) => Ok(a),
            None => self.b.refl(self.start),
        }
    }
}

fn path_text(path: &[u8]) -> String {
    if path.is_empty() {
        "-".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn turnstile(eq: &Equation) -> &'static str {
    match eq.sort() {
        Sort::Process => "|-",
        Sort::SumForm => "|-s",
    }
}

/// Render a proof in the certificate format.
pub fn render_certificate(pr: &Proof) -> String {
    let mut out = String::new();
    for (i, s) in pr.steps.iter().enumerate() {
        let body = match &s.rule {
            Rule::Axiom { scheme, sort, dir, asg } => {
                let sort = if *sort == Sort::Process { "p" } else { "s" };
                format!("axiom {scheme} {sort} {} {asg}", dir.name())
            }
            Rule::Refl => "refl".to_string(),
            Rule::Sym(j) => format!("sym {j}"),
            Rule::Trans(j, l) => format!("trans {j} {l}"),
            Rule::Ctx { of, path } => format!("ctx {of} {}", path_text(path)),
            Rule::Subst { of, sigma } => {
                let items: Vec<String> = sigma.iter().map(|(k, v)| format!("{k}:={v}")).collect();
                format!("subst {of} [{}]", items.join(", "))
            }
        };
        let _ = writeln!(out, "{i} {body} {} {}", turnstile(&s.eq), s.eq);
    }
    let _ = writeln!(out, "qed {} {}", turnstile(&pr.claimed), pr.claimed);
    out
}

fn parse_equation(text: &str, sort: Sort) -> Result<Equation, String> {
    let (l, r) = text.split_once('=').ok_or("missing `=`")?;
    let term = |s: &str| -> Result<Term, String> {
        match sort {
            Sort::Process => parse_process(s.trim()).map(Term::Proc),
            Sort::SumForm => parse_sumform(s.trim()).map(Term::Sum),
        }
        .map_err(|e| e.to_string())
    };
    Ok(Equation { lhs: term(l)?, rhs: term(r)? })
}

fn bracketed(text: &str) -> Result<&str, String> {
    text.trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected `[...]`, found `{text}`"))
}

fn parse_rule(kind: &str, args: &str) -> Result<Rule, String> {
    let mut words = args.split_whitespace();
    let mut num = |what: &str| -> Result<usize, String> {
        words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| format!("`{kind}` expects a step id for {what}"))
    };
    let rule = match kind {
        "refl" => Rule::Refl,
        "sym" => Rule::Sym(num("its premise")?),
        "trans" => Rule::Trans(num("the first premise")?, num("the second premise")?),
        "ctx" => {
            let of = num("its premise")?;
            let p = words.next().ok_or("`ctx` expects a position")?;
            let path = if p == "-" {
                Vec::new()
            } else {
                p.split('.').map(|i| i.parse::<u8>().map_err(|_| format!("bad position `{p}`"))).collect::<Result<_, _>>()?
            };
            Rule::Ctx { of, path }
        }
        "subst" => {
            let of = num("its premise")?;
            let rest = args.trim_start().split_once(char::is_whitespace).map(|x| x.1).unwrap_or("");
            let mut sigma = BTreeMap::new();
            for item in bracketed(rest)?.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, v) = item.split_once(":=").ok_or_else(|| format!("bad binding `{item}`"))?;
                let v = parse_process(v.trim()).map_err(|e| e.to_string())?;
                sigma.insert(k.trim().to_string(), v);
            }
            Rule::Subst { of, sigma }
        }
        "axiom" => {
            let mut parts = args.trim().splitn(4, char::is_whitespace);
            let name = parts.next().ok_or("`axiom` expects a scheme name")?.to_string();
            let sort = match parts.next() {
                Some("p") => Sort::Process,
                Some("s") => Sort::SumForm,
                _ => return Err("`axiom` expects sort `p` or `s`".into()),
            };
            let dir = parts.next().and_then(Dir::parse).ok_or("`axiom` expects `l2r` or `r2l`")?;
            let asg = Assignment::parse(bracketed(parts.next().unwrap_or(""))?)?;
            Rule::Axiom { scheme: name, sort, dir, asg }
        }
        other => return Err(format!("unknown step kind `{other}`")),
    };
    Ok(rule)
}

/// Parse a certificate; structural problems are reported here, logical ones by [`check_proof`].
pub fn parse_certificate(text: &str) -> Result<Proof, CertError> {
    let mut steps = Vec::new();
    let mut claimed = None;
    for (n, line) in text.lines().enumerate() {
        let err = |msg: String| CertError { line: n + 1, msg };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if claimed.is_some() {
            return Err(err("text after the `qed` line".into()));
        }
        let (head, tail) = line.split_once("|-").ok_or_else(|| err("missing `|-`".into()))?;
        let (sort, eq_text) = match tail.strip_prefix('s') {
            Some(rest) => (Sort::SumForm, rest),
            None => (Sort::Process, tail),
        };
        let eq = parse_equation(eq_text, sort).map_err(err)?;
        let head = head.trim();
        let (id, rest) = head.split_once(char::is_whitespace).unwrap_or((head, ""));
        if id == "qed" {
            claimed = Some(eq);
            continue;
        }
        let id: usize = id.parse().map_err(|_| err(format!("bad step id `{id}`")))?;
        if id != steps.len() {
            return Err(err(format!("step ids must count up from 0, found {id}")));
        }
        let rest = rest.trim();
        let (kind, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let rule = parse_rule(kind, args).map_err(err)?;
        steps.push(Step { rule, eq });
    }
    let claimed = claimed.ok_or(CertError { line: text.lines().count(), msg: "missing `qed` line".into() })?;
    Ok(Proof { steps, claimed })
}
