//! Structural operational semantics and finite labelled transition systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::term::{init_actions, Label, Process};

/// All `(ξ, P')` with `p →ξ P'`.
pub fn transitions(p: &Process) -> BTreeSet<(Label, Process)> {
    let mut out = BTreeSet::new();
    collect(p, &mut out);
    out
}

fn collect(p: &Process, out: &mut BTreeSet<(Label, Process)>) {
    match p {
        Process::Var(x) => {
            out.insert((Label::Var(x.clone()), p.clone()));
        }
        Process::Nil => {}
        Process::Prefix(s, q) => {
            for a in init_actions(s) {
                out.insert((a.into(), (**q).clone()));
            }
        }
        Process::Plus(l, r) => {
            collect(l, out);
            collect(r, out);
        }
        Process::Star(s, q) => {
            for a in init_actions(s) {
                out.insert((a.into(), p.clone()));
            }
            collect(q, out);
        }
    }
}

/// `der(p)`: the closure of `{p}` under action (non-variable) transitions.
pub fn derivatives(p: &Process) -> BTreeSet<Process> {
    let mut seen = BTreeSet::new();
    seen.insert(p.clone());
    let mut work = vec![p.clone()];
    while let Some(q) = work.pop() {
        for (l, r) in transitions(&q) {
            if !matches!(l, Label::Var(_)) && seen.insert(r.clone()) {
                work.push(r);
            }
        }
    }
    seen
}

/// A finite LTS whose states carry the terms they stand for.
///
/// Variable states (`Var(x)`) are kept as states but not expanded: their
/// `x`-labelled self-loop is implicit and is reported by [`Lts::edges`] but not
/// stored in `transitions` or emitted in Aldebaran output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts<S = Process> {
    pub states: Vec<S>,
    pub transitions: Vec<(usize, Label, usize)>,
    pub var_states: Vec<Option<String>>,
}

impl<S: Clone + Ord> Lts<S> {
    /// Breadth-first exploration from the given roots; roots get indices `0..roots.len()`
    /// unless two roots coincide.
    pub fn explore<F, V>(roots: &[S], mut succ: F, var_of: V) -> (Lts<S>, Vec<usize>)
    where
        F: FnMut(&S) -> Vec<(Label, S)>,
        V: Fn(&S) -> Option<String>,
    {
        let mut index: BTreeMap<S, usize> = BTreeMap::new();
        let mut states = Vec::new();
        let mut var_states = Vec::new();
        let mut queue = VecDeque::new();
        let mut root_ids = Vec::new();
        let mut intern = |s: &S, states: &mut Vec<S>, var_states: &mut Vec<Option<String>>, queue: &mut VecDeque<usize>| {
            if let Some(&i) = index.get(s) {
                return i;
            }
            let i = states.len();
            index.insert(s.clone(), i);
            states.push(s.clone());
            var_states.push(var_of(s));
            queue.push_back(i);
            i
        };
        for r in roots {
            root_ids.push(intern(r, &mut states, &mut var_states, &mut queue));
        }
        let mut transitions = BTreeSet::new();
        while let Some(i) = queue.pop_front() {
            if var_states[i].is_some() {
                continue;
            }
            let src = states[i].clone();
            for (l, t) in succ(&src) {
                let j = intern(&t, &mut states, &mut var_states, &mut queue);
                transitions.insert((i, l, j));
            }
        }
        let lts = Lts { states, transitions: transitions.into_iter().collect(), var_states };
        (lts, root_ids)
    }
}

impl<S> Lts<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// All edges including the implicit variable self-loops.
    pub fn edges(&self) -> Vec<(usize, Label, usize)> {
        let mut out = self.transitions.clone();
        for (i, v) in self.var_states.iter().enumerate() {
            if let Some(x) = v {
                out.push((i, Label::Var(x.clone()), i));
            }
        }
        out
    }

    /// Outgoing edges per state, implicit loops included.
    pub fn successors(&self) -> Vec<Vec<(Label, usize)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, l, j) in self.edges() {
            out[i].push((l, j));
        }
        out
    }

    pub fn tau_successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, l, j) in &self.transitions {
            if l.is_tau() {
                out[*i].push(*j);
            }
        }
        out
    }

    /// Aldebaran (`.aut`) rendering with state 0 as the initial state.
    pub fn to_aut(&self) -> String {
        let mut lines: Vec<(usize, String, usize)> =
            self.transitions.iter().map(|(i, l, j)| (*i, l.aut_name(), *j)).collect();
        lines.sort();
        let mut out = format!("des (0,{},{})\n", lines.len(), self.states.len());
        for (i, l, j) in lines {
            let _ = writeln!(out, "({i},\"{l}\",{j})");
        }
        out
    }
}

/// The LTS of a process term (root is state 0).
pub fn build_lts(p: &Process) -> Lts {
    build_joint_lts(std::slice::from_ref(p)).0
}

/// One LTS containing all roots; identical subterms share a state.
pub fn build_joint_lts(roots: &[Process]) -> (Lts, Vec<usize>) {
    Lts::explore(roots, |p| transitions(p).into_iter().collect(), |p| match p {
        Process::Var(x) => Some(x.clone()),
        _ => None,
    })
}

/// Reflexive-transitive closure of the τ-edges: `closure[i]` lists every `j` with `i ⇒ j`.
pub fn tau_closure<S>(lts: &Lts<S>) -> Vec<BTreeSet<usize>> {
    let tau = lts.tau_successors();
    (0..lts.len())
        .map(|i| {
            let mut seen = BTreeSet::from([i]);
            let mut stack = vec![i];
            while let Some(k) = stack.pop() {
                for &j in &tau[k] {
                    if seen.insert(j) {
                        stack.push(j);
                    }
                }
            }
            seen
        })
        .collect()
}
