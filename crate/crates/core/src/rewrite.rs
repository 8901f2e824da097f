//! The left-to-right rewrite system over A5, A6, FA1 and FT1, sumform
//! classification, and the translation into the prefix-iteration fragment.

use std::collections::BTreeSet;

use crate::axioms::{all_schemes, axiom_system, Assignment, Dir};
use crate::equivalence::{is_potential_prefix, RelKind};
use crate::error::{Error, Result};
use crate::lemmas::provable_sumform_eq;
use crate::proof::{Equation, Proof};
use crate::semantics::build_lts;
use crate::term::{init_actions, Action, Alpha, Process, Sort, SumForm, Term};

/// Whether FT1 takes part in rewriting. It does not for strong bisimulation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RewriteMode {
    WeakFamily,
    Strong,
}

impl RewriteMode {
    pub fn for_relation(k: RelKind) -> RewriteMode {
        if k == RelKind::Strong {
            RewriteMode::Strong
        } else {
            RewriteMode::WeakFamily
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Innermost,
    Outermost,
}

fn sum_measure(s: &SumForm) -> u128 {
    match s {
        SumForm::Zero | SumForm::Act(_) => 1,
        SumForm::Plus(l, r) => sum_measure(l).saturating_add(sum_measure(r)).saturating_add(2),
    }
}

/// A weight that every rewrite step strictly decreases; it bounds the number
/// of steps from any term.
pub fn measure(p: &Process) -> u128 {
    match p {
        Process::Nil | Process::Var(_) => 4,
        Process::Plus(l, r) => measure(l).saturating_add(measure(r)).saturating_add(1),
        Process::Prefix(s, q) => (sum_measure(s) + 1).saturating_mul(measure(q)),
        Process::Star(s, q) => {
            let e = u32::try_from(sum_measure(s)).unwrap_or(u32::MAX);
            3u128.checked_pow(e).unwrap_or(u128::MAX).saturating_mul(measure(q))
        }
    }
}

/// One root step, if the root is a redex.
pub fn root_step(p: &Process, mode: RewriteMode) -> Option<(&'static str, Process)> {
    match p {
        Process::Prefix(SumForm::Plus(s, t), x) => Some((
            "A5",
            Process::plus(Process::prefix((**s).clone(), (**x).clone()), Process::prefix((**t).clone(), (**x).clone())),
        )),
        Process::Prefix(SumForm::Zero, _) => Some(("A6", Process::Nil)),
        Process::Star(SumForm::Zero, x) => Some(("FA1", (**x).clone())),
        Process::Star(SumForm::Plus(s, t), x)
            if mode == RewriteMode::WeakFamily && **t == SumForm::Act(Alpha::Tau) =>
        {
            let loop_ = Process::star((**s).clone(), (**x).clone());
            Some(("FT1", Process::plus(Process::act_prefix(Alpha::Tau, loop_.clone()), loop_)))
        }
        _ => None,
    }
}

fn with_child(p: &Process, i: usize, c: Process) -> Process {
    match p {
        Process::Plus(l, r) if i == 0 => Process::plus(c, (**r).clone()),
        Process::Plus(l, _) => Process::plus((**l).clone(), c),
        Process::Prefix(s, _) => Process::prefix(s.clone(), c),
        Process::Star(s, _) => Process::star(s.clone(), c),
        _ => unreachable!("leaf has no children"),
    }
}

fn children(p: &Process) -> Vec<&Process> {
    match p {
        Process::Plus(l, r) => vec![l, r],
        Process::Prefix(_, q) | Process::Star(_, q) => vec![q],
        _ => vec![],
    }
}

/// Rewrites the leftmost-outermost redex.
fn outermost_step(p: &Process, mode: RewriteMode) -> Option<Process> {
    if let Some((_, r)) = root_step(p, mode) {
        return Some(r);
    }
    children(p).into_iter().enumerate().find_map(|(i, c)| outermost_step(c, mode).map(|c2| with_child(p, i, c2)))
}

struct Fuel {
    left: u128,
    used: usize,
}

impl Fuel {
    fn spend(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::OutOfFuel(self.used));
        }
        self.left -= 1;
        self.used += 1;
        Ok(())
    }
}

fn innermost(p: &Process, mode: RewriteMode, fuel: &mut Fuel) -> Result<Process> {
    let mut cur = p.clone();
    for (i, c) in children(p).into_iter().enumerate() {
        cur = with_child(&cur, i, innermost(c, mode, fuel)?);
    }
    match root_step(&cur, mode) {
        Some((_, r)) => {
            fuel.spend()?;
            innermost(&r, mode, fuel)
        }
        None => Ok(cur),
    }
}

/// Normal form under R with the given strategy. Returns the number of steps.
pub fn rewrite_with(p: &Process, mode: RewriteMode, strategy: Strategy, fuel: u128) -> Result<(Process, usize)> {
    let mut f = Fuel { left: fuel, used: 0 };
    let out = match strategy {
        Strategy::Innermost => innermost(p, mode, &mut f)?,
        Strategy::Outermost => {
            let mut cur = p.clone();
            while let Some(next) = outermost_step(&cur, mode) {
                f.spend()?;
                cur = next;
            }
            cur
        }
    };
    Ok((out, f.used))
}

pub fn rewrite_r(p: &Process, mode: RewriteMode) -> Process {
    rewrite_with(p, mode, Strategy::Innermost, measure(p))
        .map(|(q, _)| q)
        .expect("each step decreases the measure")
}

pub fn is_r_normal(p: &Process, mode: RewriteMode) -> bool {
    outermost_step(p, mode).is_none()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SumformClass {
    IsZero,
    IsSingle(Alpha),
    IsVisiblePlusTau(Action),
}

impl SumformClass {
    /// The canonical sumform of the class.
    pub fn representative(&self) -> SumForm {
        match self {
            SumformClass::IsZero => SumForm::Zero,
            SumformClass::IsSingle(a) => SumForm::Act(a.clone()),
            SumformClass::IsVisiblePlusTau(a) => SumForm::plus(SumForm::Act(Alpha::Act(a.clone())), SumForm::tau()),
        }
    }
}

/// `None` when `s` denotes more than one visible action.
pub fn classify_sumform(s: &SumForm) -> Option<SumformClass> {
    let acts: Vec<Alpha> = init_actions(s).into_iter().collect();
    match acts.as_slice() {
        [] => Some(SumformClass::IsZero),
        [a] => Some(SumformClass::IsSingle(a.clone())),
        [Alpha::Tau, Alpha::Act(a)] => Some(SumformClass::IsVisiblePlusTau(a.clone())),
        _ => None,
    }
}

/// A sumform-sort proof that `s` equals its class representative.
pub fn classification_proof(s: &SumForm) -> Option<Proof> {
    provable_sumform_eq(s, &classify_sumform(s)?.representative())
}

fn classify_loops(p: &Process) -> Result<Process> {
    Ok(match p {
        Process::Nil | Process::Var(_) => p.clone(),
        Process::Plus(l, r) => Process::plus(classify_loops(l)?, classify_loops(r)?),
        Process::Prefix(s, q) => Process::prefix(s.clone(), classify_loops(q)?),
        Process::Star(s, q) => {
            let c = classify_sumform(s).ok_or_else(|| Error::Precondition(format!("loop `{s}` is not potential")))?;
            Process::star(c.representative(), classify_loops(q)?)
        }
    })
}

pub const NOT_POTENTIAL: &str = "not a potential prefix-iteration expression";

/// Translation into the prefix-iteration fragment.
pub fn phi(p: &Process) -> Result<Process> {
    phi_mode(p, RewriteMode::WeakFamily)
}

pub fn phi_mode(p: &Process, mode: RewriteMode) -> Result<Process> {
    if !is_potential_prefix(&build_lts(p)) {
        return Err(Error::Precondition(NOT_POTENTIAL.into()));
    }
    // The A5/A6/FA1 pass discards unreachable loops before classification.
    let pre = rewrite_r(p, RewriteMode::Strong);
    let out = rewrite_r(&classify_loops(&pre)?, mode);
    if !out.in_prefix_fragment() {
        return Err(Error::Precondition(format!("{NOT_POTENTIAL}: `{out}` keeps a compound loop")));
    }
    Ok(out)
}

fn sumform_samples(mode: RewriteMode) -> Vec<SumForm> {
    let a = SumForm::Act(Alpha::act("a"));
    match mode {
        RewriteMode::WeakFamily => vec![SumForm::Zero, SumForm::tau(), SumForm::plus(a, SumForm::tau())],
        RewriteMode::Strong => vec![SumForm::Zero, SumForm::tau(), a],
    }
}

/// The instances of the axioms of `E_k` under φ, per scheme, with identities
/// dropped. Sumform metavariables range over `0`, `τ` and `a+τ` (in strong
/// mode over `0`, `τ` and `a`), `α` is `a` and process metavariables become
/// the variables `X`, `Y`, `Z`.
pub fn phi_axioms(k: RelKind) -> Vec<(&'static str, Equation)> {
    let mode = RewriteMode::for_relation(k);
    let samples = sumform_samples(mode);
    let system = axiom_system(k);
    let mut out = Vec::new();
    for sch in all_schemes().iter().filter(|s| s.sort == Sort::Process && system.contains(s.name)) {
        let metas: Vec<char> = sch.sum_metas().into_iter().collect();
        let mut seen = BTreeSet::new();
        let mut choice = vec![0usize; metas.len()];
        loop {
            let mut asg = Assignment::new()
                .alpha(Alpha::act("a"))
                .proc('x', Process::var("X"))
                .proc('y', Process::var("Y"))
                .proc('z', Process::var("Z"));
            for (m, &c) in metas.iter().zip(&choice) {
                asg = asg.sum(*m, samples[c].clone());
            }
            if let Ok((Term::Proc(l), Term::Proc(r))) = sch.instance(Dir::L2R, &asg) {
                if let (Ok(l2), Ok(r2)) = (phi_mode(&l, mode), phi_mode(&r, mode)) {
                    if l2 != r2 && seen.insert((l2.clone(), r2.clone())) {
                        out.push((sch.name, Equation::new(l2, r2)));
                    }
                }
            }
            // next assignment in lexicographic order
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < samples.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }
    out
}
