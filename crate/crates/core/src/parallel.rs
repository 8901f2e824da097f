//! CCS parallel composition over closed terms, and its elimination through
//! the expansion law for flat iteration.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::lemmas::canon_sumform;
use crate::normalize::{summand_terms, to_normal_form, NfMode};
use crate::semantics::{transitions, Lts};
use crate::syntax::parse_bars;
use crate::term::{init_actions, Alpha, Label, Process, SumForm};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum NetProcess {
    Leaf(Process),
    Par(Box<NetProcess>, Box<NetProcess>),
}

impl NetProcess {
    pub fn par(l: NetProcess, r: NetProcess) -> NetProcess {
        NetProcess::Par(Box::new(l), Box::new(r))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            NetProcess::Leaf(p) => p.is_closed(),
            NetProcess::Par(l, r) => l.is_closed() && r.is_closed(),
        }
    }
}

impl fmt::Display for NetProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetProcess::Leaf(p) => match p {
                Process::Plus(..) => write!(f, "({p})"),
                _ => write!(f, "{p}"),
            },
            NetProcess::Par(l, r) => {
                write!(f, "{l} | ")?;
                match **r {
                    NetProcess::Par(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
        }
    }
}

/// Parses `P1 | P2 | ...` (left-associative, parentheses allowed).
pub fn parse_net(text: &str) -> Result<NetProcess, ParseError> {
    parse_bars(text, &NetProcess::Leaf, &NetProcess::par)
}

fn complementary(l: &Label, r: &Label) -> bool {
    matches!((l, r), (Label::Visible(a), Label::Visible(b)) if a.complement() == *b)
}

/// Interleaving moves of both components plus a τ for each pair of
/// complementary visible moves.
pub fn net_transitions(n: &NetProcess) -> BTreeSet<(Label, NetProcess)> {
    match n {
        NetProcess::Leaf(p) => transitions(p)
            .into_iter()
            .filter(|(l, _)| !matches!(l, Label::Var(_)))
            .map(|(l, q)| (l, NetProcess::Leaf(q)))
            .collect(),
        NetProcess::Par(l, r) => {
            let lt = net_transitions(l);
            let rt = net_transitions(r);
            let mut out = BTreeSet::new();
            for (a, l2) in &lt {
                out.insert((a.clone(), NetProcess::par(l2.clone(), (**r).clone())));
            }
            for (b, r2) in &rt {
                out.insert((b.clone(), NetProcess::par((**l).clone(), r2.clone())));
            }
            for (a, l2) in &lt {
                for (b, r2) in &rt {
                    if complementary(a, b) {
                        out.insert((Label::Tau, NetProcess::par(l2.clone(), r2.clone())));
                    }
                }
            }
            out
        }
    }
}

/// The transition system reachable from the given networks.
pub fn net_lts(roots: &[NetProcess]) -> (Lts<NetProcess>, Vec<usize>) {
    Lts::explore(roots, |n| net_transitions(n).into_iter().collect(), |_| None)
}

/// One application of the expansion law: `P | Q` for normal forms
/// `P = s*Σ α_i.P_i` and `Q = t*Σ β_j.Q_j`, as a loop and a list of summands
/// whose residuals are still parallel compositions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Expansion {
    pub loop_: SumForm,
    pub summands: Vec<(Alpha, Process, Process)>,
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.loop_ {
            SumForm::Plus(..) => write!(f, "({})*(", self.loop_)?,
            s => write!(f, "{s}*(")?,
        }
        if self.summands.is_empty() {
            f.write_str("0")?;
        }
        for (i, (a, l, r)) in self.summands.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{a}.({} | {})", NetProcess::Leaf(l.clone()), NetProcess::Leaf(r.clone()))?;
        }
        f.write_str(")")
    }
}

fn head_shape(p: &Process) -> Result<(SumForm, Vec<(Alpha, Process)>)> {
    let shape_err = || Error::Precondition(format!("`{p}` is not a closed normal form"));
    let Process::Star(s, body) = p else { return Err(shape_err()) };
    let mut out = Vec::new();
    if **body != Process::Nil {
        for q in summand_terms(body) {
            match q {
                Process::Prefix(SumForm::Act(a), r) => out.push((a, (*r).clone())),
                _ => return Err(shape_err()),
            }
        }
    }
    Ok((s.clone(), out))
}

pub fn expand_pair(p: &Process, q: &Process) -> Result<Expansion> {
    let (s, ps) = head_shape(p)?;
    let (t, qs) = head_shape(q)?;
    let (sa, ta) = (init_actions(&s), init_actions(&t));
    let sync_loops = sa.iter().any(|a| a.complement().is_some_and(|c| ta.contains(&c)));
    let mut atoms: BTreeSet<Alpha> = sa.union(&ta).cloned().collect();
    if sync_loops {
        atoms.insert(Alpha::Tau);
    }
    let loop_ = canon_sumform(&SumForm::sum_of(atoms));
    let mut summands = Vec::new();
    for (a, pi) in &ps {
        summands.push((a.clone(), pi.clone(), q.clone()));
    }
    for (b, qj) in &qs {
        summands.push((b.clone(), p.clone(), qj.clone()));
    }
    for (a, pi) in &ps {
        for (b, qj) in &qs {
            if a.complement().as_ref() == Some(b) {
                summands.push((Alpha::Tau, pi.clone(), qj.clone()));
            }
        }
        if a.complement().is_some_and(|c| ta.contains(&c)) {
            summands.push((Alpha::Tau, pi.clone(), q.clone()));
        }
    }
    for (b, qj) in &qs {
        if b.complement().is_some_and(|c| sa.contains(&c)) {
            summands.push((Alpha::Tau, p.clone(), qj.clone()));
        }
    }
    Ok(Expansion { loop_, summands })
}

#[derive(Default)]
struct Eliminator {
    memo: HashMap<(Process, Process), Process>,
}

impl Eliminator {
    fn pair(&mut self, p: &Process, q: &Process) -> Result<Process> {
        if let Some(r) = self.memo.get(&(p.clone(), q.clone())) {
            return Ok(r.clone());
        }
        let e = expand_pair(p, q)?;
        let mut body = Vec::new();
        for (a, l, r) in &e.summands {
            body.push(Process::act_prefix(a.clone(), self.pair(l, r)?));
        }
        let out = Process::star(e.loop_, Process::sum_of(body));
        self.memo.insert((p.clone(), q.clone()), out.clone());
        Ok(out)
    }

    fn net(&mut self, n: &NetProcess) -> Result<Process> {
        match n {
            NetProcess::Leaf(p) => Ok(to_normal_form(p, NfMode::Strong)?.0),
            NetProcess::Par(l, r) => {
                let (l, r) = (self.net(l)?, self.net(r)?);
                self.pair(&l, &r)
            }
        }
    }
}

/// A flat-iteration term strongly bisimilar to the network.
pub fn eliminate_parallel(n: &NetProcess) -> Result<Process> {
    if !n.is_closed() {
        return Err(Error::Precondition(format!("`{n}` has free variables")));
    }
    Eliminator::default().net(n)
}

/// Strong bisimilarity between a network and a term, on their joint LTS.
pub fn net_bisimilar(n: &NetProcess, p: &Process) -> bool {
    let (lts, roots) = net_lts(&[n.clone(), NetProcess::Leaf(p.clone())]);
    let rel = crate::equivalence::largest_bisimulation(&lts, crate::equivalence::RelKind::Strong);
    rel.related(roots[0], roots[1])
}
