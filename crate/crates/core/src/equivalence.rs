//! Strong, branching, η-, delay and weak bisimulation, their rooted congruences,
//! saturation predicates and the potential prefix-iteration check.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::semantics::{build_joint_lts, build_lts, tau_closure, Lts};
use crate::term::{Label, Process};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelKind {
    Strong,
    Branching,
    Eta,
    Delay,
    Weak,
}

impl RelKind {
    pub const ALL: [RelKind; 5] =
        [RelKind::Strong, RelKind::Branching, RelKind::Eta, RelKind::Delay, RelKind::Weak];

    pub fn name(self) -> &'static str {
        match self {
            RelKind::Strong => "strong",
            RelKind::Branching => "branching",
            RelKind::Eta => "eta",
            RelKind::Delay => "delay",
            RelKind::Weak => "weak",
        }
    }

    /// `self` is at least as fine as `other` (the implications of the lattice).
    pub fn finer_than(self, other: RelKind) -> bool {
        use RelKind::*;
        match (self, other) {
            (a, b) if a == b => true,
            (Strong, _) => true,
            (Branching, Eta | Delay | Weak) => true,
            (Eta | Delay, Weak) => true,
            _ => false,
        }
    }
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<RelKind, String> {
        RelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

/// Kinds for which saturation is defined.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SatKind {
    Eta,
    Delay,
    Weak,
}

impl TryFrom<RelKind> for SatKind {
    type Error = String;
    fn try_from(k: RelKind) -> Result<SatKind, String> {
        match k {
            RelKind::Eta => Ok(SatKind::Eta),
            RelKind::Delay => Ok(SatKind::Delay),
            RelKind::Weak => Ok(SatKind::Weak),
            other => Err(format!("saturation is not defined for {other}")),
        }
    }
}

impl SatKind {
    fn eta(self) -> bool {
        matches!(self, SatKind::Eta | SatKind::Weak)
    }
    fn delay(self) -> bool {
        matches!(self, SatKind::Delay | SatKind::Weak)
    }
}

/// A symmetric relation on the states of one LTS, stored as a boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivRelation {
    n: usize,
    bits: Vec<bool>,
}

impl EquivRelation {
    pub fn full(n: usize) -> EquivRelation {
        EquivRelation { n, bits: vec![true; n * n] }
    }

    pub fn empty(n: usize) -> EquivRelation {
        EquivRelation { n, bits: vec![false; n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
        self.bits[j * self.n + i] = v;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.related(i, j)).map(move |j| (i, j)))
    }

    pub fn is_equivalence(&self) -> bool {
        (0..self.n).all(|i| self.related(i, i))
            && self.pairs().all(|(i, j)| self.related(j, i))
            && self.pairs().all(|(i, j)| (0..self.n).all(|k| !self.related(j, k) || self.related(i, k)))
    }
}

/// Precomputed transition structure shared by the matching clauses.
pub(crate) struct Moves {
    pub succ: Vec<Vec<(Label, usize)>>,
    pub closure: Vec<Vec<usize>>,
}

impl Moves {
    pub fn new<S>(lts: &Lts<S>) -> Moves {
        Moves {
            succ: lts.successors(),
            closure: tau_closure(lts).into_iter().map(|c| c.into_iter().collect()).collect(),
        }
    }

    /// `t →(ξ) t2`: one ξ-step, or zero steps when ξ = τ.
    pub fn optional_step(&self, t: usize, l: &Label) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.succ[t].iter().filter(|(m, _)| m == l).map(|(_, j)| *j).collect();
        if l.is_tau() {
            out.push(t);
        }
        out
    }

    fn step(&self, t: usize, l: &Label) -> impl Iterator<Item = usize> + '_ {
        let l = l.clone();
        self.succ[t].iter().filter(move |(m, _)| *m == l).map(|(_, j)| *j)
    }

    /// Can the move `s →ξ s'` be matched from `t` under `r`?
    fn matched(&self, k: RelKind, r: &EquivRelation, s: usize, l: &Label, s2: usize, t: usize) -> bool {
        match k {
            RelKind::Strong => self.step(t, l).any(|t2| r.related(s2, t2)),
            RelKind::Branching => self.closure[t].iter().any(|&t1| {
                r.related(s, t1) && self.optional_step(t1, l).into_iter().any(|t2| r.related(s2, t2))
            }),
            RelKind::Eta => self.closure[t].iter().any(|&t1| {
                r.related(s, t1)
                    && self.optional_step(t1, l).into_iter().any(|t2| {
                        self.closure[t2].iter().any(|&t3| r.related(s2, t3))
                    })
            }),
            RelKind::Delay => self.closure[t].iter().any(|&t1| {
                self.optional_step(t1, l).into_iter().any(|t2| r.related(s2, t2))
            }),
            RelKind::Weak => self.closure[t].iter().any(|&t1| {
                self.optional_step(t1, l).into_iter().any(|t2| {
                    self.closure[t2].iter().any(|&t3| r.related(s2, t3))
                })
            }),
        }
    }

    fn all_matched(&self, k: RelKind, r: &EquivRelation, s: usize, t: usize) -> bool {
        self.succ[s].iter().all(|(l, s2)| self.matched(k, r, s, l, *s2, t))
    }
}

/// The largest `k`-bisimulation on the states of `lts`, by greatest-fixpoint refinement.
pub fn largest_bisimulation<S>(lts: &Lts<S>, k: RelKind) -> EquivRelation {
    let moves = Moves::new(lts);
    let n = lts.len();
    let mut r = EquivRelation::full(n);
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i..n {
                if r.related(i, j)
                    && !(moves.all_matched(k, &r, i, j) && moves.all_matched(k, &r, j, i))
                {
                    r.set(i, j, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

/// Check the defining clause of a `k`-bisimulation for a given symmetric relation.
pub fn is_bisimulation<S>(lts: &Lts<S>, r: &EquivRelation, k: RelKind) -> bool {
    let moves = Moves::new(lts);
    r.pairs().all(|(i, j)| moves.all_matched(k, r, i, j))
}

/// Result of an equivalence query: the joint LTS, the root indices and the largest bisimulation.
#[derive(Clone, Debug)]
pub struct Bisimulation {
    pub lts: Lts,
    pub roots: (usize, usize),
    pub relation: EquivRelation,
}

impl Bisimulation {
    pub fn holds(&self) -> bool {
        self.relation.related(self.roots.0, self.roots.1)
    }
}

pub fn bisimulation(p: &Process, q: &Process, k: RelKind) -> Bisimulation {
    let (lts, roots) = build_joint_lts(&[p.clone(), q.clone()]);
    let relation = largest_bisimulation(&lts, k);
    Bisimulation { roots: (roots[0], roots[1]), lts, relation }
}

pub fn bisimilar(p: &Process, q: &Process, k: RelKind) -> bool {
    bisimulation(p, q, k).holds()
}

/// Which side of a congruence query an unmatched move came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A root move that the other side cannot answer under the congruence clause.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootMismatch {
    pub side: Side,
    pub label: Label,
    pub target: Process,
}

impl fmt::Display for RootMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        write!(f, "{side} move --{}--> {} has no matching answer", self.label, self.target)
    }
}

/// Check the rooted congruence; on failure report an unmatched root move.
pub fn congruence(p: &Process, q: &Process, k: RelKind) -> Result<(), RootMismatch> {
    let b = bisimulation(p, q, k);
    let moves = Moves::new(&b.lts);
    let (rp, rq) = b.roots;
    for (side, s, t) in [(Side::Left, rp, rq), (Side::Right, rq, rp)] {
        for (l, s2) in &moves.succ[s] {
            if !root_matched(&moves, k, &b.relation, l, *s2, t) {
                return Err(RootMismatch { side, label: l.clone(), target: b.lts.states[*s2].clone() });
            }
        }
    }
    Ok(())
}

fn root_matched(moves: &Moves, k: RelKind, r: &EquivRelation, l: &Label, s2: usize, t: usize) -> bool {
    let direct = |t: usize| moves.succ[t].iter().filter(|(m, _)| m == l).map(|(_, j)| *j).collect::<Vec<_>>();
    match k {
        RelKind::Strong | RelKind::Branching => direct(t).into_iter().any(|t2| r.related(s2, t2)),
        RelKind::Eta => direct(t)
            .into_iter()
            .any(|t1| moves.closure[t1].iter().any(|&t2| r.related(s2, t2))),
        RelKind::Delay => moves.closure[t]
            .iter()
            .any(|&t1| direct(t1).into_iter().any(|t2| r.related(s2, t2))),
        RelKind::Weak => moves.closure[t].iter().any(|&t1| {
            direct(t1)
                .into_iter()
                .any(|t2| moves.closure[t2].iter().any(|&t3| r.related(s2, t3)))
        }),
    }
}

pub fn congruent(p: &Process, q: &Process, k: RelKind) -> bool {
    congruence(p, q, k).is_ok()
}

fn saturation_holds<S>(lts: &Lts<S>, k: SatKind) -> bool {
    let succ = lts.successors();
    let has = |q: usize, l: &Label, s: usize| succ[q].iter().any(|(m, j)| m == l && *j == s);
    for q in 0..lts.len() {
        for (l, r) in &succ[q] {
            for (m, s) in &succ[*r] {
                // Q →ξ R →τ S  implies  Q →ξ S
                if k.eta() && m.is_tau() && !has(q, l, *s) {
                    return false;
                }
                // Q →τ R →ξ S  implies  Q →ξ S
                if k.delay() && l.is_tau() && !has(q, m, *s) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_saturated(p: &Process, k: SatKind) -> bool {
    saturation_holds(&build_lts(p), k)
}

/// Indices of the proper derivatives (reachable by at least one action step).
fn proper_derivatives<S>(lts: &Lts<S>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for (j, l, k) in &lts.transitions {
            if *j == i && !matches!(l, Label::Var(_)) && seen.insert(*k) {
                stack.push(*k);
            }
        }
    }
    seen
}

pub fn is_strongly_saturated(p: &Process, k: SatKind) -> bool {
    let lts = build_lts(p);
    saturation_holds(&lts, k)
        && proper_derivatives(&lts)
            .into_iter()
            .all(|q| lts.transitions.iter().any(|(i, l, j)| *i == q && *j == q && l.is_tau()))
}

/// The derived graph with an edge `u --a--> v` whenever `u ⇒ u' →a v`, `a` visible.
pub fn weak_visible_edges<S>(lts: &Lts<S>) -> BTreeSet<(usize, Label, usize)> {
    let closure = tau_closure(lts);
    let mut out = BTreeSet::new();
    for (u, reach) in closure.iter().enumerate() {
        for &u1 in reach {
            for (i, l, v) in &lts.transitions {
                if *i == u1 && matches!(l, Label::Visible(_)) {
                    out.insert((u, l.clone(), *v));
                }
            }
        }
    }
    out
}

/// Every infinite `⇒→a` sequence is eventually constant in its action.
///
/// Decided on the derived graph of [`weak_visible_edges`]: inside each strongly
/// connected component all intra-component edges must carry the same label.
pub fn is_potential_prefix<S>(lts: &Lts<S>) -> bool {
    let edges = weak_visible_edges(lts);
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..lts.len()).map(|_| g.add_node(())).collect();
    for (u, _, v) in &edges {
        g.add_edge(nodes[*u], nodes[*v], ());
    }
    let mut component = vec![0; lts.len()];
    for (c, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for n in scc {
            component[n.index()] = c;
        }
    }
    let mut label_of: Vec<Option<&Label>> = vec![None; lts.len()];
    for (u, l, v) in &edges {
        if component[*u] != component[*v] {
            continue;
        }
        match label_of[component[*u]] {
            Some(m) if m != l => return false,
            _ => label_of[component[*u]] = Some(l),
        }
    }
    true
}
